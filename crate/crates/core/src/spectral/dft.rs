use num_complex::Complex;
use rustfft::FftPlanner;

use crate::geometry::PolarGrid;
use crate::scalar::Scalar;

/// Spectrum of a 1D signal; index `k` holds frequency `k`, index 0 is DC.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum1D<T> {
    coefficients: Vec<Complex<T>>,
}

impl<T: Scalar> Spectrum1D<T> {
    pub fn new(coefficients: Vec<Complex<T>>) -> Self {
        Self { coefficients }
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn dc(&self) -> Complex<T> {
        self.coefficients[0]
    }
}

/// `X[k] = sum_n x[n] exp(-2 pi i k n / N)`, any length.
pub fn dft1d<T: Scalar>(signal: &[Complex<T>]) -> Spectrum1D<T> {
    let mut buf = signal.to_vec();
    if !buf.is_empty() {
        FftPlanner::new()
            .plan_fft_forward(buf.len())
            .process(&mut buf);
    }
    Spectrum1D::new(buf)
}

pub fn dft1d_real<T: Scalar>(signal: &[T]) -> Spectrum1D<T> {
    let complex: Vec<_> = signal.iter().map(|&v| Complex::new(v, T::zero())).collect();
    dft1d(&complex)
}

/// Inverse of [`dft1d`], including the `1/N` factor.
pub fn idft1d<T: Scalar>(spectrum: &Spectrum1D<T>) -> Vec<Complex<T>> {
    let mut buf = spectrum.coefficients.clone();
    if buf.is_empty() {
        return buf;
    }
    FftPlanner::new()
        .plan_fft_inverse(buf.len())
        .process(&mut buf);
    let scale = T::one() / T::from_usize_lossy(buf.len());
    buf.iter_mut().for_each(|c| *c = c.scale(scale));
    buf
}

/// 2D spectrum over a polar grid, indexed `(lambda, mu)` radial-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum2D<T> {
    coefficients: Vec<Complex<T>>,
    radial_size: usize,
    angular_size: usize,
    occupied: usize,
}

impl<T: Scalar> Spectrum2D<T> {
    #[inline]
    pub fn get(&self, lambda: usize, mu: usize) -> Complex<T> {
        self.coefficients[lambda * self.angular_size + mu]
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coefficients
    }

    pub fn radial_size(&self) -> usize {
        self.radial_size
    }

    pub fn angular_size(&self) -> usize {
        self.angular_size
    }

    /// Occupied cell count of the source grid.
    pub fn occupied(&self) -> usize {
        self.occupied
    }
}

/// `F(lambda, mu) = sum_r sum_t f(r, t) exp(-2 pi i (r lambda / R + t mu / T))`
/// with `r`, `t` the integer bin indices, evaluated as angular then radial
/// 1D transforms.
pub fn polar_ft_2d<T: Scalar>(grid: &PolarGrid<T>) -> Spectrum2D<T> {
    let (rn, tn) = (grid.r_bins(), grid.t_bins());
    let mut planner = FftPlanner::new();
    let mut data = grid.cells().to_vec();
    let rows = planner.plan_fft_forward(tn);
    for row in data.chunks_exact_mut(tn) {
        rows.process(row);
    }
    let cols = planner.plan_fft_forward(rn);
    let mut column = vec![Complex::new(T::zero(), T::zero()); rn];
    for mu in 0..tn {
        for (r, c) in column.iter_mut().enumerate() {
            *c = data[r * tn + mu];
        }
        cols.process(&mut column);
        for (lambda, c) in column.iter().enumerate() {
            data[lambda * tn + mu] = *c;
        }
    }
    Spectrum2D {
        coefficients: data,
        radial_size: rn,
        angular_size: tn,
        occupied: grid.occupied(),
    }
}
