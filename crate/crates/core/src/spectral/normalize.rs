use crate::error::{Result, ShapeError};
use crate::scalar::Scalar;

use super::dft::{Spectrum1D, Spectrum2D};

/// Coefficient the 1D magnitudes are divided by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    /// `|X[1]|`
    FirstHarmonic,
    /// `|X[0]|`, for signatures that are positive everywhere.
    Dc,
}

impl Reference {
    fn index(self) -> usize {
        match self {
            Reference::FirstHarmonic => 1,
            Reference::Dc => 0,
        }
    }
}

/// `out[i] = |X[i + 1]| / |X[ref]|` for `i < keep`.
///
/// The reference counts as zero when it is below `epsilon` times the total
/// spectral magnitude.
pub fn normalize_fd_1d<T: Scalar>(
    spec: &Spectrum1D<T>,
    keep: usize,
    reference: Reference,
) -> Result<Vec<T>> {
    if keep >= spec.len() {
        return Err(ShapeError::InvalidParams(format!(
            "cannot keep {keep} coefficients of a length-{} spectrum",
            spec.len()
        )));
    }
    let coeffs = spec.coefficients();
    let total: T = coeffs.iter().map(|c| c.norm()).sum();
    let r = coeffs[reference.index()].norm();
    if !(r > T::epsilon() * total) {
        return Err(ShapeError::ZeroReference);
    }
    Ok(coeffs[1..=keep].iter().map(|c| c.norm() / r).collect())
}

/// Radial-major `n_radial x n_angular` block of `|F(lambda, mu)| / |F(0, 0)|`,
/// with the `(0, 0)` slot replaced by `|F(0, 0)|` divided by the occupied
/// cell count of the source grid.
pub fn normalize_fd_2d<T: Scalar>(
    spec: &Spectrum2D<T>,
    n_radial: usize,
    n_angular: usize,
) -> Result<Vec<T>> {
    if n_radial == 0
        || n_angular == 0
        || n_radial > spec.radial_size()
        || n_angular > spec.angular_size()
    {
        return Err(ShapeError::InvalidParams(format!(
            "cannot keep {n_radial}x{n_angular} of a {}x{} spectrum",
            spec.radial_size(),
            spec.angular_size()
        )));
    }
    let dc = spec.get(0, 0).norm();
    if !(dc > T::zero()) || spec.occupied() == 0 {
        return Err(ShapeError::ZeroDc);
    }
    let mut out = Vec::with_capacity(n_radial * n_angular);
    for lambda in 0..n_radial {
        for mu in 0..n_angular {
            out.push(spec.get(lambda, mu).norm() / dc);
        }
    }
    out[0] = dc / T::from_usize_lossy(spec.occupied());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PolarGrid;
    use crate::spectral::{dft1d_real, polar_ft_2d};
    use num_complex::Complex;
    use std::f64::consts::PI;

    #[test]
    fn pure_first_harmonic() {
        let x: Vec<f64> = (0..32)
            .map(|n| (2.0 * PI * n as f64 / 32.0).cos())
            .collect();
        let out = normalize_fd_1d(&dft1d_real(&x), 8, Reference::FirstHarmonic).unwrap();
        assert!((out[0] - 1.0).abs() < 1e-12);
        assert!(out[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn scale_and_shift_invariance() {
        let x: Vec<f64> = (0..40)
            .map(|n| 1.0 + (n as f64 * 0.3).sin() + 0.2 * (n as f64).cos())
            .collect();
        let base = normalize_fd_1d(&dft1d_real(&x), 12, Reference::FirstHarmonic).unwrap();
        let scaled: Vec<f64> = x.iter().map(|v| v * 5.0).collect();
        let mut shifted = x.clone();
        shifted.rotate_left(7);
        for other in [scaled, shifted] {
            let o = normalize_fd_1d(&dft1d_real(&other), 12, Reference::FirstHarmonic).unwrap();
            for (a, b) in base.iter().zip(&o) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn zero_reference_and_bad_keep() {
        let constant = vec![2.0; 16];
        assert!(matches!(
            normalize_fd_1d(&dft1d_real(&constant), 4, Reference::FirstHarmonic),
            Err(ShapeError::ZeroReference)
        ));
        let dc: Vec<f64> = normalize_fd_1d(&dft1d_real(&constant), 4, Reference::Dc).unwrap();
        assert!(dc.iter().all(|v| v.abs() < 1e-12));
        assert!(normalize_fd_1d(&dft1d_real(&constant), 16, Reference::Dc).is_err());
    }

    #[test]
    fn nine_by_four_has_36_values() {
        let g = PolarGrid::from_fn(16, 16, |r, t| Complex::new(((r + t) % 3) as f64, 0.0)).unwrap();
        let out = normalize_fd_2d(&polar_ft_2d(&g), 9, 4).unwrap();
        assert_eq!(out.len(), 36);
    }

    #[test]
    fn zero_grid_has_zero_dc() {
        let g = PolarGrid::from_fn(8, 8, |_, _| Complex::new(0.0, 0.0)).unwrap();
        assert!(matches!(
            normalize_fd_2d(&polar_ft_2d(&g), 4, 4),
            Err(ShapeError::ZeroDc)
        ));
    }

    #[test]
    fn ratio_slots_ignore_amplitude() {
        let g = PolarGrid::from_fn(8, 8, |r, t| Complex::new(((r * 3 + t * 5) % 7) as f64, 0.0))
            .unwrap();
        let g3 = PolarGrid::from_fn(8, 8, |r, t| g.get(r, t) * 3.0).unwrap();
        let (a, b) = (
            normalize_fd_2d(&polar_ft_2d(&g), 4, 4).unwrap(),
            normalize_fd_2d(&polar_ft_2d(&g3), 4, 4).unwrap(),
        );
        for i in 1..16 {
            assert!((a[i] - b[i]).abs() < 1e-12);
        }
        assert!((b[0] - 3.0 * a[0]).abs() < 1e-12);
    }
}
