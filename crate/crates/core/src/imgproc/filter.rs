use crate::error::{Result, ShapeError};
use crate::scalar::Scalar;

use super::image::{Image, Raster};

/// Square convolution kernel of side `2 * radius + 1`, row-major with the
/// origin in the middle.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel2<T> {
    radius: usize,
    data: Vec<T>,
}

impl<T: Scalar> Kernel2<T> {
    pub fn from_fn(radius: usize, mut f: impl FnMut(i64, i64) -> T) -> Self {
        let r = radius as i64;
        let mut data = Vec::with_capacity((2 * radius + 1).pow(2));
        for dy in -r..=r {
            for dx in -r..=r {
                data.push(f(dx, dy));
            }
        }
        Self { radius, data }
    }

    #[inline]
    pub fn radius(&self) -> usize {
        self.radius
    }

    #[inline]
    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }

    /// Tap at offset `(dx, dy)` from the kernel centre.
    #[inline]
    pub fn at(&self, dx: i64, dy: i64) -> T {
        let r = self.radius as i64;
        self.data[((dy + r) as usize) * self.side() + (dx + r) as usize]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn sum(&self) -> T {
        self.data.iter().copied().sum()
    }

    pub fn transposed(&self) -> Self {
        Self::from_fn(self.radius, |dx, dy| self.at(dy, dx))
    }

    /// `a * self + b * other`, taps aligned at the centre.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Self {
        assert_eq!(self.radius, other.radius, "kernel radii differ");
        Self {
            radius: self.radius,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&p, &q)| a * p + b * q)
                .collect(),
        }
    }
}

/// First-derivative-of-Gaussian kernels along x (`g0`) and y (`g90`).
#[derive(Debug, Clone, PartialEq)]
pub struct DerivKernelPair<T> {
    pub sigma: T,
    pub radius: usize,
    pub g0: Kernel2<T>,
    pub g90: Kernel2<T>,
    /// 1D factors: `g0(dx, dy) = derivative[dx + r] * smoothing[dy + r]`.
    pub derivative: Vec<T>,
    pub smoothing: Vec<T>,
}

/// Responses of an image to both basis kernels at one scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponsePair<T> {
    pub sigma: T,
    pub r0: Raster<T>,
    pub r90: Raster<T>,
}

pub(crate) fn check_sigma<T: Scalar>(sigma: T) -> Result<()> {
    if !(sigma.is_finite() && sigma > T::zero()) {
        return Err(ShapeError::InvalidScale(sigma.as_f64()));
    }
    Ok(())
}

/// Truncation radius `ceil(3 sigma)`, at least one tap.
pub(crate) fn kernel_radius<T: Scalar>(sigma: T) -> usize {
    (T::lit(3.0) * sigma).ceil().to_usize().unwrap_or(1).max(1)
}

/// Samples `d/dx exp(-(x^2 + y^2) / 2 sigma^2)` and its transpose on a
/// `(2r + 1)^2` grid with `r = ceil(3 sigma)`, scaled so each positive lobe
/// sums to one.
///
/// The kernel is the outer product of a 1D derivative profile along x and a
/// 1D Gaussian along y, both kept in the pair for separable filtering.
/// `g0` is exactly antisymmetric in x: taps for `x > 0` are computed once and
/// mirrored, so the kernel sums to zero up to summation rounding.
pub fn gaussian_deriv_kernels<T: Scalar>(sigma: T) -> Result<DerivKernelPair<T>> {
    check_sigma(sigma)?;
    let radius = kernel_radius(sigma);
    let r = radius as i64;
    let two_s2 = T::lit(2.0) * sigma * sigma;
    let s2 = sigma * sigma;
    // -x/s^2 * exp(-x^2 / 2 s^2), evaluated at |x| and mirrored
    let raw: Vec<T> = (-r..=r)
        .map(|dx| {
            let ax = T::from_i64(dx.abs()).unwrap();
            let mag = ax / s2 * (-(ax * ax) / two_s2).exp();
            if dx > 0 {
                -mag
            } else {
                mag
            }
        })
        .collect();
    let lobe: T = raw.iter().copied().filter(|v| *v > T::zero()).sum();
    let derivative: Vec<T> = raw.iter().map(|&v| v / lobe).collect();
    let smoothing = gaussian_kernel_1d(sigma)?;
    let g0 = Kernel2::from_fn(radius, |dx, dy| {
        derivative[(dx + r) as usize] * smoothing[(dy + r) as usize]
    });
    let g90 = g0.transposed();
    Ok(DerivKernelPair {
        sigma,
        radius,
        g0,
        g90,
        derivative,
        smoothing,
    })
}

/// Normalized 1D Gaussian of radius `ceil(3 sigma)`.
pub fn gaussian_kernel_1d<T: Scalar>(sigma: T) -> Result<Vec<T>> {
    check_sigma(sigma)?;
    let radius = kernel_radius(sigma) as i64;
    let two_s2 = T::lit(2.0) * sigma * sigma;
    let taps: Vec<T> = (-radius..=radius)
        .map(|i| {
            let x = T::from_i64(i).unwrap();
            (-(x * x) / two_s2).exp()
        })
        .collect();
    let total: T = taps.iter().copied().sum();
    Ok(taps.into_iter().map(|t| t / total).collect())
}

/// Maps an out-of-range index back inside `[0, n)` by mirror reflection
/// about the edge samples (`d c b | a b c d | c b a`).
#[inline]
pub fn reflect(mut i: i64, n: usize) -> usize {
    let n = n as i64;
    if n == 1 {
        return 0;
    }
    loop {
        if i < 0 {
            i = -i;
        } else if i >= n {
            i = 2 * n - 2 - i;
        } else {
            return i as usize;
        }
    }
}

/// Convolution (kernel flipped) evaluated at a single pixel, reflect padding.
pub fn convolve_at<T: Scalar>(src: &Raster<T>, kernel: &Kernel2<T>, x: usize, y: usize) -> T {
    let r = kernel.radius() as i64;
    let (w, h) = (src.width(), src.height());
    let (xi, yi) = (x as i64, y as i64);
    let mut acc = T::zero();
    for dy in -r..=r {
        let sy = reflect(yi - dy, h);
        for dx in -r..=r {
            let k = kernel.at(dx, dy);
            if k != T::zero() {
                acc += k * src.get(reflect(xi - dx, w), sy);
            }
        }
    }
    acc
}

/// Full-raster 2D convolution with reflect padding.
pub fn convolve<T: Scalar>(src: &Raster<T>, kernel: &Kernel2<T>) -> Raster<T> {
    Raster::from_fn(src.width(), src.height(), |x, y| {
        convolve_at(src, kernel, x, y)
    })
}

/// `padded[j]` is the reflected index of `j - r` for `j < n + 2r`.
fn reflect_table(n: usize, r: usize) -> Vec<usize> {
    (0..n + 2 * r)
        .map(|j| reflect(j as i64 - r as i64, n))
        .collect()
}

/// 1D convolution along x (kernel flipped, origin in the middle), reflect
/// padding.
fn convolve_rows<T: Scalar>(src: &Raster<T>, taps: &[T]) -> Raster<T> {
    let r = taps.len() / 2;
    let (w, h) = (src.width(), src.height());
    let table = reflect_table(w, r);
    let data = src.data();
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        let row = &data[y * w..(y + 1) * w];
        for x in 0..w {
            // tap i reads source index x + r - i, stored at table[x + 2r - i]
            let mut acc = T::zero();
            for (i, &t) in taps.iter().enumerate() {
                acc += t * row[table[x + 2 * r - i]];
            }
            out.push(acc);
        }
    }
    Raster::new(w, h, out).expect("dimensions preserved")
}

/// 1D convolution along y, reflect padding.
fn convolve_cols<T: Scalar>(src: &Raster<T>, taps: &[T]) -> Raster<T> {
    let r = taps.len() / 2;
    let (w, h) = (src.width(), src.height());
    let table = reflect_table(h, r);
    let data = src.data();
    let mut out = vec![T::zero(); w * h];
    for y in 0..h {
        let dst = &mut out[y * w..(y + 1) * w];
        for (i, &t) in taps.iter().enumerate() {
            let sy = table[y + 2 * r - i];
            for (d, &v) in dst.iter_mut().zip(&data[sy * w..(sy + 1) * w]) {
                *d += t * v;
            }
        }
    }
    Raster::new(w, h, out).expect("dimensions preserved")
}

/// Separable Gaussian smoothing with reflect padding.
pub fn gaussian_blur<T: Scalar>(src: &Raster<T>, sigma: T) -> Result<Raster<T>> {
    let taps = gaussian_kernel_1d(sigma)?;
    Ok(convolve_cols(&convolve_rows(src, &taps), &taps))
}

/// Both basis responses of a raster, computed with the separable factors of
/// the kernels. Agrees with [`convolve`] by `g0` and `g90` up to rounding.
pub fn derivative_responses<T: Scalar>(
    src: &Raster<T>,
    pair: &DerivKernelPair<T>,
) -> (Raster<T>, Raster<T>) {
    let r0 = convolve_cols(&convolve_rows(src, &pair.derivative), &pair.smoothing);
    let r90 = convolve_rows(&convolve_cols(src, &pair.derivative), &pair.smoothing);
    (r0, r90)
}

/// Convolves `img` with both basis kernels.
pub fn responses<T: Scalar>(img: &Image<T>, pair: &DerivKernelPair<T>) -> ResponsePair<T> {
    let (r0, r90) = derivative_responses(img.raster(), pair);
    ResponsePair {
        sigma: pair.sigma,
        r0,
        r90,
    }
}

/// Oriented response `cos(theta) r0 + sin(theta) r90`.
pub fn steer_response<T: Scalar>(pair: &ResponsePair<T>, theta: T) -> Raster<T> {
    let (c, s) = (theta.cos(), theta.sin());
    pair.r0.zip_map(&pair.r90, |a, b| c * a + s * b)
}
