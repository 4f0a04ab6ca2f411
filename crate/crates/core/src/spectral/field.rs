use std::sync::Arc;

use num_complex::Complex;

use super::lattice::{Lattice, Slot, WaveIndex};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A real, zero-mean periodic vector field stored by its Fourier coefficients.
///
/// Only one member of each `±k` pair is stored (see [`WaveIndex::is_representative`]);
/// the partner is the complex conjugate, so every reconstruction is real. Components
/// are kept as three separate coefficient arrays aligned with [`Lattice::modes`].
#[derive(Clone, Debug)]
pub struct SpectralField<T> {
    lattice: Arc<Lattice>,
    comps: [Vec<Complex<T>>; 3],
}

impl<T: PartialEq> PartialEq for SpectralField<T> {
    fn eq(&self, other: &Self) -> bool {
        self.lattice.truncation() == other.lattice.truncation() && self.comps == other.comps
    }
}

impl<T: Scalar> SpectralField<T> {
    pub fn zeros(n: usize) -> Self {
        Self::zeros_on(Lattice::shared(n))
    }

    pub fn zeros_on(lattice: Arc<Lattice>) -> Self {
        let len = lattice.len();
        let z = vec![Complex::new(T::zero(), T::zero()); len];
        SpectralField {
            lattice,
            comps: [z.clone(), z.clone(), z],
        }
    }

    /// Builds a field by evaluating `f` on every stored representative.
    pub fn from_fn(n: usize, mut f: impl FnMut(WaveIndex) -> [Complex<T>; 3]) -> Self {
        let mut out = Self::zeros(n);
        for (i, &k) in out.lattice.clone().modes().iter().enumerate() {
            out.set_at(i, f(k));
        }
        out
    }

    pub fn from_components(lattice: Arc<Lattice>, comps: [Vec<Complex<T>>; 3]) -> Result<Self> {
        for c in &comps {
            if c.len() != lattice.len() {
                return Err(Error::DimensionMismatch {
                    expected: lattice.len(),
                    got: c.len(),
                });
            }
        }
        Ok(SpectralField { lattice, comps })
    }

    /// A single real Fourier mode: `û_k = coeff`, `û_{-k} = conj(coeff)`.
    pub fn single_mode(n: usize, k: WaveIndex, coeff: [Complex<T>; 3]) -> Result<Self> {
        let mut out = Self::zeros(n);
        out.set(k, coeff)?;
        Ok(out)
    }

    #[inline]
    pub fn truncation(&self) -> usize {
        self.lattice.truncation()
    }

    #[inline]
    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    #[inline]
    pub fn components(&self) -> &[Vec<Complex<T>>; 3] {
        &self.comps
    }

    #[inline]
    pub fn components_mut(&mut self) -> &mut [Vec<Complex<T>>; 3] {
        &mut self.comps
    }

    #[inline]
    pub fn at(&self, i: usize) -> [Complex<T>; 3] {
        [self.comps[0][i], self.comps[1][i], self.comps[2][i]]
    }

    #[inline]
    pub fn set_at(&mut self, i: usize, v: [Complex<T>; 3]) {
        for (c, x) in self.comps.iter_mut().zip(v) {
            c[i] = x;
        }
    }

    /// Coefficient at any `k`, resolving conjugate storage; zero outside the cube.
    pub fn get(&self, k: WaveIndex) -> [Complex<T>; 3] {
        match self.lattice.slot(k) {
            Some(Slot::Direct(i)) => self.at(i),
            Some(Slot::Conjugate(i)) => self.at(i).map(|z| z.conj()),
            None => [Complex::new(T::zero(), T::zero()); 3],
        }
    }

    /// Sets `û_k` (and implicitly `û_{-k}`).
    pub fn set(&mut self, k: WaveIndex, v: [Complex<T>; 3]) -> Result<()> {
        match self.lattice.slot(k) {
            Some(Slot::Direct(i)) => self.set_at(i, v),
            Some(Slot::Conjugate(i)) => self.set_at(i, v.map(|z| z.conj())),
            None => {
                return Err(Error::invalid(
                    "k",
                    format!("{k} lies outside the truncation cube n = {}", self.truncation()),
                ))
            }
        }
        Ok(())
    }

    pub fn ensure_same_truncation(&self, other: &Self) -> Result<()> {
        if self.truncation() != other.truncation() {
            return Err(Error::TruncationMismatch {
                left: self.truncation(),
                right: other.truncation(),
            });
        }
        Ok(())
    }

    /// Multiplies each stored mode by a real symbol `m(i)`.
    pub fn apply_symbol(&self, mut m: impl FnMut(usize) -> T) -> Self {
        let mut out = self.clone();
        for i in 0..self.len() {
            let s = m(i);
            for c in out.comps.iter_mut() {
                c[i] = c[i] * s;
            }
        }
        out
    }

    pub fn scale(&self, a: T) -> Self {
        self.apply_symbol(|_| a)
    }

    /// `self + a·other`.
    pub fn axpy(&self, a: T, other: &Self) -> Result<Self> {
        self.ensure_same_truncation(other)?;
        let mut out = self.clone();
        for (c, o) in out.comps.iter_mut().zip(&other.comps) {
            for (x, y) in c.iter_mut().zip(o) {
                *x = *x + *y * a;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(T::one(), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-T::one(), other)
    }

    /// L² pairing `⟨u, v⟩ = Σ_{k∈Z³₀} û_k · v̂_{-k}`, with the `±k` halves both counted.
    pub fn inner(&self, other: &Self) -> Result<T> {
        self.ensure_same_truncation(other)?;
        let mut acc = T::zero();
        for (a, b) in self.comps.iter().zip(&other.comps) {
            for (x, y) in a.iter().zip(b) {
                acc = acc + x.re * y.re + x.im * y.im;
            }
        }
        Ok(acc + acc)
    }

    /// `Σ_k w(k)|û_k|²` over the full lattice, `w` indexed by storage slot.
    pub fn weighted_energy(&self, mut w: impl FnMut(usize) -> T) -> T {
        let mut acc = T::zero();
        for i in 0..self.len() {
            let e = self.comps[0][i].norm_sqr() + self.comps[1][i].norm_sqr() + self.comps[2][i].norm_sqr();
            acc = acc + w(i) * e;
        }
        acc + acc
    }

    /// Largest relative divergence `|û_k·k| / (|û_k||k|)` over stored modes (0 for zero modes).
    pub fn divergence_defect(&self) -> T {
        let mut worst = T::zero();
        for (i, k) in self.lattice.modes().iter().enumerate() {
            let kk = k.components().map(|c| T::of(c as f64));
            let v = self.at(i);
            let dot = v[0] * kk[0] + v[1] * kk[1] + v[2] * kk[2];
            let mag = (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt();
            if mag > T::zero() {
                let kn = T::of(self.lattice.norm_sq()[i] as f64).sqrt();
                worst = worst.max(dot.norm() / (mag * kn));
            }
        }
        worst
    }

    pub fn is_divergence_free(&self, tol: T) -> bool {
        self.divergence_defect() <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    /// Re-embeds the field into truncation `n`, dropping modes outside the new cube.
    pub fn retruncate(&self, n: usize) -> Self {
        let mut out = Self::zeros(n);
        let lat = out.lattice.clone();
        for (i, &k) in lat.modes().iter().enumerate() {
            if k.sup_norm() <= self.truncation() {
                out.set_at(i, self.get(k));
            }
        }
        out
    }

    /// Converts the coefficient type, e.g. `f64 → f32`.
    pub fn cast<U: Scalar>(&self) -> SpectralField<U> {
        let conv = |c: &Vec<Complex<T>>| {
            c.iter()
                .map(|z| Complex::new(U::of(z.re.as_f64()), U::of(z.im.as_f64())))
                .collect::<Vec<_>>()
        };
        SpectralField {
            lattice: self.lattice.clone(),
            comps: [conv(&self.comps[0]), conv(&self.comps[1]), conv(&self.comps[2])],
        }
    }
}
