use std::collections::VecDeque;

use crate::error::{Result, ShapeError};
use crate::scalar::Scalar;

use super::filter::{derivative_responses, gaussian_deriv_kernels};
use super::image::{BinaryImage, Image, Raster};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CannyParams<T> {
    /// Scale of the Gaussian derivative used for smoothing and gradients.
    pub sigma: T,
    /// Low hysteresis threshold as a fraction of the high one.
    pub low_ratio: T,
    /// Quantile of the nonzero gradient magnitudes used as high threshold.
    pub high_quantile: T,
}

impl<T: Scalar> Default for CannyParams<T> {
    fn default() -> Self {
        Self {
            sigma: T::one(),
            low_ratio: T::lit(0.4),
            high_quantile: T::lit(0.9),
        }
    }
}

impl<T: Scalar> CannyParams<T> {
    pub(crate) fn validate(&self) -> Result<()> {
        let unit = |v: T| v > T::zero() && v < T::one();
        if !unit(self.low_ratio) || !unit(self.high_quantile) {
            return Err(ShapeError::InvalidParams(format!(
                "canny ratios must lie in (0, 1): low_ratio={}, high_quantile={}",
                self.low_ratio, self.high_quantile
            )));
        }
        Ok(())
    }
}

/// Gradient direction sector, quantized to the four pixel neighbour axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sector {
    Horizontal,
    Vertical,
    Diagonal,
    AntiDiagonal,
}

impl Sector {
    /// Sector of the gradient `(gx, gy)` using only comparisons of `|gx|`,
    /// `|gy|` and `sign(gx gy)`, so a 90 degree rotation of the input maps
    /// sectors exactly.
    fn of<T: Scalar>(gx: T, gy: T) -> Self {
        let t = T::lit(std::f64::consts::FRAC_PI_8.tan());
        let (a, b) = (gx.abs(), gy.abs());
        if b < t * a {
            Sector::Horizontal
        } else if a < t * b {
            Sector::Vertical
        } else if gx * gy > T::zero() {
            Sector::Diagonal
        } else {
            Sector::AntiDiagonal
        }
    }

    fn offsets(self) -> [(i64, i64); 2] {
        match self {
            Sector::Horizontal => [(1, 0), (-1, 0)],
            Sector::Vertical => [(0, 1), (0, -1)],
            Sector::Diagonal => [(1, 1), (-1, -1)],
            Sector::AntiDiagonal => [(1, -1), (-1, 1)],
        }
    }
}

fn value_or_zero<T: Scalar>(r: &Raster<T>, x: i64, y: i64) -> T {
    if x < 0 || y < 0 || x as usize >= r.width() || y as usize >= r.height() {
        T::zero()
    } else {
        r.get(x as usize, y as usize)
    }
}

/// Canny edge detector: derivative-of-Gaussian gradients, non-maximum
/// suppression along the quantized gradient direction and 8-connected
/// hysteresis.
///
/// Gradient components are snapped to a fine grid before any comparison so
/// that values equal in exact arithmetic stay equal regardless of summation
/// order; with symmetric tie handling in the suppression step the output
/// commutes with 90 degree rotations pixel for pixel.
pub fn canny_edges<T: Scalar>(img: &Image<T>, params: &CannyParams<T>) -> Result<BinaryImage> {
    params.validate()?;
    let pair = gaussian_deriv_kernels(params.sigma)?;
    let (w, h) = (img.width(), img.height());
    let (gx, gy) = derivative_responses(img.raster(), &pair);
    let gx = gx.map(|v| v.snap(T::one()));
    let gy = gy.map(|v| v.snap(T::one()));
    let mag = gx.zip_map(&gy, |a, b| (a * a + b * b).sqrt());

    let mut nonzero: Vec<T> = mag
        .data()
        .iter()
        .copied()
        .filter(|&m| m > T::zero())
        .collect();
    if nonzero.is_empty() {
        return Ok(BinaryImage::empty(w, h));
    }
    nonzero.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = nonzero.len();
    let rank = (params.high_quantile * T::from_usize_lossy(n))
        .ceil()
        .to_usize()
        .unwrap_or(1)
        .clamp(1, n);
    let high = nonzero[rank - 1];
    let low = params.low_ratio * high;

    let mut thin = Raster::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let m = mag.get(x, y);
            if m <= T::zero() {
                continue;
            }
            let sector = Sector::of(gx.get(x, y), gy.get(x, y));
            let is_max = sector
                .offsets()
                .iter()
                .all(|&(dx, dy)| m >= value_or_zero(&mag, x as i64 + dx, y as i64 + dy));
            if is_max {
                thin.set(x, y, m);
            }
        }
    }

    let mut edges = BinaryImage::empty(w, h);
    let mut queue = VecDeque::new();
    for y in 0..h {
        for x in 0..w {
            if thin.get(x, y) >= high && !edges.get(x, y) {
                edges.set(x, y, true);
                queue.push_back((x, y));
                while let Some((cx, cy)) = queue.pop_front() {
                    for dy in -1i64..=1 {
                        for dx in -1i64..=1 {
                            let (nx, ny) = (cx as i64 + dx, cy as i64 + dy);
                            if nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
                                continue;
                            }
                            let (nx, ny) = (nx as usize, ny as usize);
                            if !edges.get(nx, ny)
                                && thin.get(nx, ny) >= low
                                && thin.get(nx, ny) > T::zero()
                            {
                                edges.set(nx, ny, true);
                                queue.push_back((nx, ny));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(edges)
}
