//! Discrete Fourier transforms, the polar 2D transform, Fourier descriptor
//! normalization and elliptic Fourier coefficients.

mod dft;
mod elliptic;
mod normalize;

pub use self::dft::{dft1d, dft1d_real, idft1d, polar_ft_2d, Spectrum1D, Spectrum2D};
pub use self::elliptic::{elliptic_coeffs, EllipticCoeffs};
pub use self::normalize::{normalize_fd_1d, normalize_fd_2d, Reference};
