use num_complex::Complex;

use super::fft::Fft3;
use super::field::SpectralField;
use super::lattice::Lattice;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A real vector field sampled on the uniform grid `x_j = 2πj/m`, `j ∈ [0, m)³`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalField<T> {
    m: usize,
    comps: [Vec<T>; 3],
}

impl<T: Scalar> PhysicalField<T> {
    pub fn new(m: usize, comps: [Vec<T>; 3]) -> Result<Self> {
        for c in &comps {
            if c.len() != m * m * m {
                return Err(Error::DimensionMismatch {
                    expected: m * m * m,
                    got: c.len(),
                });
            }
        }
        Ok(PhysicalField { m, comps })
    }

    /// Samples `f(x)` at every grid point.
    pub fn from_fn(m: usize, mut f: impl FnMut([T; 3]) -> [T; 3]) -> Self {
        let h = T::TAU() / T::of(m as f64);
        let mut comps = [Vec::new(), Vec::new(), Vec::new()];
        for i1 in 0..m {
            for i2 in 0..m {
                for i3 in 0..m {
                    let x = [i1, i2, i3].map(|i| h * T::of(i as f64));
                    let v = f(x);
                    for (c, y) in comps.iter_mut().zip(v) {
                        c.push(y);
                    }
                }
            }
        }
        PhysicalField { m, comps }
    }

    #[inline]
    pub fn grid_size(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn components(&self) -> &[Vec<T>; 3] {
        &self.comps
    }

    pub fn value(&self, i1: usize, i2: usize, i3: usize) -> [T; 3] {
        let i = (i1 * self.m + i2) * self.m + i3;
        [self.comps[0][i], self.comps[1][i], self.comps[2][i]]
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(|c| c.iter().all(|x| x.is_finite()))
    }
}

fn check_grid(m: usize, n: usize) -> Result<()> {
    if m < 2 * n + 1 {
        return Err(Error::GridTooSmall {
            grid: m,
            truncation: n,
            required: 2 * n + 1,
        });
    }
    Ok(())
}

/// Spectral → physical on an `m³` grid (`m ≥ 2n+1`).
pub fn to_physical<T: Scalar>(field: &SpectralField<T>, m: usize) -> Result<PhysicalField<T>> {
    check_grid(m, field.truncation())?;
    to_physical_with(&Fft3::new(m), field)
}

fn to_physical_with<T: Scalar>(fft: &Fft3<T>, field: &SpectralField<T>) -> Result<PhysicalField<T>> {
    check_grid(fft.size(), field.truncation())?;
    let c = field.components();
    let mut v = fft.synthesize(field.lattice(), &[&c[0], &c[1], &c[2]]).into_iter();
    let comps = [v.next().unwrap(), v.next().unwrap(), v.next().unwrap()];
    Ok(PhysicalField { m: fft.size(), comps })
}

/// Physical → spectral: the coefficients of the grid field on the half-lattice of
/// truncation `n`. The spatial mean and any content outside the cube are discarded.
pub fn to_spectral<T: Scalar>(field: &PhysicalField<T>, n: usize) -> Result<SpectralField<T>> {
    check_grid(field.m, n)?;
    if !field.is_finite() {
        return Err(Error::invalid("field", "non-finite grid values"));
    }
    to_spectral_with(&Fft3::new(field.m), field, n)
}

fn to_spectral_with<T: Scalar>(fft: &Fft3<T>, field: &PhysicalField<T>, n: usize) -> Result<SpectralField<T>> {
    check_grid(fft.size(), n)?;
    let lattice = Lattice::shared(n);
    let c = &field.comps;
    let mut v = fft.analyze(&lattice, &[&c[0], &c[1], &c[2]]).into_iter();
    SpectralField::from_components(lattice, [v.next().unwrap(), v.next().unwrap(), v.next().unwrap()])
}

/// Complex-valued reconstruction, one component at a time; the imaginary parts measure
/// how far the stored coefficients are from describing a real field.
pub fn to_physical_complex<T: Scalar>(field: &SpectralField<T>, m: usize) -> Result<[Vec<Complex<T>>; 3]> {
    check_grid(m, field.truncation())?;
    let fft = Fft3::new(m);
    let c = field.components();
    Ok([0, 1, 2].map(|i| fft.synthesize_complex(field.lattice(), &c[i])))
}
