//! Three-dimensional FFTs on a cubic collocation grid.
//!
//! Spectral data only occupies the band `|k_i| ≤ n` of the grid, so the inverse
//! transform skips lines that are identically zero and the forward transform skips
//! lines whose output is discarded. Two real fields are always transformed together
//! as the real and imaginary parts of one complex field.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::lattice::{Lattice, WaveIndex};
use crate::scalar::Scalar;

/// Smallest `m ≥ min` whose prime factors are all in {2, 3, 5, 7}.
pub fn fft_friendly_size(min: usize) -> usize {
    let mut m = min.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5, 7] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

pub struct Fft3<T: Scalar> {
    m: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Scalar> std::fmt::Debug for Fft3<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft3").field("m", &self.m).finish()
    }
}

#[derive(Clone, Copy)]
enum Axis {
    First,
    Second,
    Third,
}

impl<T: Scalar> Fft3<T> {
    pub fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft3 {
            m,
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
        }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn points(&self) -> usize {
        self.m * self.m * self.m
    }

    fn band(&self, n: usize) -> Vec<usize> {
        debug_assert!(2 * n < self.m);
        (0..=n).chain(self.m - n..self.m).collect()
    }

    #[inline]
    fn wrap(&self, c: i32) -> usize {
        c.rem_euclid(self.m as i32) as usize
    }

    /// Flat grid offset of wave vector `k` (index `(i1·m + i2)·m + i3`).
    #[inline]
    pub fn offset(&self, k: WaveIndex) -> usize {
        let [a, b, c] = k.components();
        (self.wrap(a) * self.m + self.wrap(b)) * self.m + self.wrap(c)
    }

    fn pass(&self, buf: &mut [Complex<T>], axis: Axis, outer: &[usize], inner: &[usize], fft: &dyn Fft<T>) {
        let m = self.m;
        let (sa, so, si) = match axis {
            Axis::First => (m * m, m, 1),
            Axis::Second => (m, m * m, 1),
            Axis::Third => (1, m * m, m),
        };
        let zero = Complex::new(T::zero(), T::zero());
        let mut scratch = vec![zero; fft.get_inplace_scratch_len()];
        if sa == 1 {
            // lines are contiguous: transform maximal runs of consecutive inner indices in place
            for &o in outer {
                let mut start = 0;
                while start < inner.len() {
                    let mut end = start + 1;
                    while end < inner.len() && inner[end] == inner[end - 1] + 1 {
                        end += 1;
                    }
                    let from = o * so + inner[start] * si;
                    let to = o * so + (inner[end - 1] + 1) * si;
                    fft.process_with_scratch(&mut buf[from..to], &mut scratch);
                    start = end;
                }
            }
            return;
        }
        let mut lines = vec![zero; inner.len() * m];
        for &o in outer {
            let base = o * so;
            for j in 0..m {
                let row = base + j * sa;
                for (r, &i) in inner.iter().enumerate() {
                    lines[r * m + j] = buf[row + i * si];
                }
            }
            fft.process_with_scratch(&mut lines, &mut scratch);
            for j in 0..m {
                let row = base + j * sa;
                for (r, &i) in inner.iter().enumerate() {
                    buf[row + i * si] = lines[r * m + j];
                }
            }
        }
    }

    /// Unnormalized inverse transform of data supported on the band `|k_i| ≤ n`.
    pub fn inverse_banded(&self, buf: &mut [Complex<T>], n: usize) {
        let band = self.band(n);
        let all: Vec<usize> = (0..self.m).collect();
        let fft = self.inverse.as_ref();
        self.pass(buf, Axis::Third, &band, &band, fft);
        self.pass(buf, Axis::Second, &band, &all, fft);
        self.pass(buf, Axis::First, &all, &all, fft);
    }

    /// Unnormalized forward transform; only entries in the band `|k_i| ≤ n` are valid afterwards.
    pub fn forward_banded(&self, buf: &mut [Complex<T>], n: usize) {
        let band = self.band(n);
        let all: Vec<usize> = (0..self.m).collect();
        let fft = self.forward.as_ref();
        self.pass(buf, Axis::Third, &all, &all, fft);
        self.pass(buf, Axis::Second, &all, &band, fft);
        self.pass(buf, Axis::First, &band, &band, fft);
    }

    /// Evaluates real scalar fields `Σ_k ĉ_k e^{ik·x}` on the grid, given half-lattice
    /// coefficients aligned with `lattice`.
    pub fn synthesize(&self, lattice: &Lattice, spectra: &[&[Complex<T>]]) -> Vec<Vec<T>> {
        let zero = Complex::new(T::zero(), T::zero());
        let mut out = Vec::with_capacity(spectra.len());
        let mut buf = vec![zero; self.points()];
        for pair in spectra.chunks(2) {
            buf.iter_mut().for_each(|z| *z = zero);
            for (idx, &k) in lattice.modes().iter().enumerate() {
                let x = pair[0][idx];
                let y = pair.get(1).map_or(zero, |s| s[idx]);
                // x + i·y at k, conj(x) + i·conj(y) at -k
                buf[self.offset(k)] = Complex::new(x.re - y.im, x.im + y.re);
                buf[self.offset(k.neg())] = Complex::new(x.re + y.im, y.re - x.im);
            }
            self.inverse_banded(&mut buf, lattice.truncation());
            out.push(buf.iter().map(|z| z.re).collect());
            if pair.len() == 2 {
                out.push(buf.iter().map(|z| z.im).collect());
            }
        }
        out
    }

    /// Full complex inverse transform of a single spectrum (no packing), for reality checks.
    pub fn synthesize_complex(&self, lattice: &Lattice, spectrum: &[Complex<T>]) -> Vec<Complex<T>> {
        let zero = Complex::new(T::zero(), T::zero());
        let mut buf = vec![zero; self.points()];
        for (idx, &k) in lattice.modes().iter().enumerate() {
            buf[self.offset(k)] = spectrum[idx];
            buf[self.offset(k.neg())] = spectrum[idx].conj();
        }
        self.inverse_banded(&mut buf, lattice.truncation());
        buf
    }

    /// Fourier coefficients `(1/m³) Σ_x f(x) e^{-ik·x}` of real grid fields on the stored
    /// modes of `lattice`. The grid must satisfy `m ≥ 2n+1`.
    pub fn analyze(&self, lattice: &Lattice, reals: &[&[T]]) -> Vec<Vec<Complex<T>>> {
        let zero = Complex::new(T::zero(), T::zero());
        let half = T::of(0.5) / T::of(self.points() as f64);
        let mut out = Vec::with_capacity(reals.len());
        let mut buf = vec![zero; self.points()];
        for pair in reals.chunks(2) {
            match pair {
                [a, b] => {
                    for ((z, &x), &y) in buf.iter_mut().zip(a.iter()).zip(b.iter()) {
                        *z = Complex::new(x, y);
                    }
                }
                [a] => {
                    for (z, &x) in buf.iter_mut().zip(a.iter()) {
                        *z = Complex::new(x, T::zero());
                    }
                }
                _ => unreachable!(),
            }
            self.forward_banded(&mut buf, lattice.truncation());
            let mut first = Vec::with_capacity(lattice.len());
            let mut second = Vec::with_capacity(lattice.len());
            for &k in lattice.modes() {
                let zk = buf[self.offset(k)];
                let zm = buf[self.offset(k.neg())].conj();
                first.push((zk + zm) * half);
                let d = zk - zm;
                // (zk - conj z_{-k}) / (2i)
                second.push(Complex::new(d.im, -d.re) * half);
            }
            out.push(first);
            if pair.len() == 2 {
                out.push(second);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn friendly_sizes() {
        assert_eq!(fft_friendly_size(11), 12);
        assert_eq!(fft_friendly_size(13), 14);
        assert_eq!(fft_friendly_size(49), 49);
        assert_eq!(fft_friendly_size(11 * 11), 125);
    }

    #[test]
    fn banded_transforms_match_dense_dft_on_small_grid() {
        // direct O(m^6) DFT as an independent check of the pruning
        let m = 7;
        let n = 2;
        let fft = Fft3::<f64>::new(m);
        let mut buf = vec![Complex::new(0.0, 0.0); m * m * m];
        let mut dense = buf.clone();
        let lat = Lattice::shared(n);
        for (i, &k) in lat.modes().iter().enumerate() {
            let v = Complex::new((i as f64).sin(), (i as f64 * 0.7).cos());
            buf[fft.offset(k)] = v;
            dense[fft.offset(k)] = v;
        }
        fft.inverse_banded(&mut buf, n);
        let tau = std::f64::consts::TAU / m as f64;
        for x in 0..m * m * m {
            let (x1, x2, x3) = (x / (m * m), (x / m) % m, x % m);
            let mut acc = Complex::new(0.0, 0.0);
            for (kf, &v) in dense.iter().enumerate() {
                let (a, b, c) = (kf / (m * m), (kf / m) % m, kf % m);
                let ph = tau * (a * x1 + b * x2 + c * x3) as f64;
                acc += v * Complex::from_polar(1.0, ph);
            }
            assert!((acc - buf[x]).norm() < 1e-12);
        }
    }
}
