use crate::error::{Result, ShapeError};
use crate::imgproc::{convolve_at, gaussian_deriv_kernels, DerivKernelPair, Image};
use crate::scalar::Scalar;

use super::contour::{Contour, PolarPoint};

/// Strongest oriented response at one boundary point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientSample<T> {
    /// `f(k)`: maximum absolute steered response over all scales and directions.
    pub magnitude: T,
    /// `f_d(k)`: the maximizing direction `m pi / M`, radians.
    pub direction: T,
    pub direction_index: usize,
    /// Index into the scale list of the maximizing scale.
    pub scale_index: usize,
    pub r: T,
    pub theta: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientSignature<T> {
    pub samples: Vec<GradientSample<T>>,
    pub num_directions: usize,
    pub scales: Vec<T>,
}

impl<T: Scalar> GradientSignature<T> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Samples steered first-derivative-of-Gaussian responses at every contour
/// point for `num_directions` directions `m pi / M` (responses at `theta`
/// and `theta + pi` differ only in sign) and every scale, keeping the
/// largest absolute response and its direction.
///
/// Responses are snapped to a fine grid before comparison, and directions
/// are scanned in the outer loop, so maxima that are equal in exact
/// arithmetic resolve to the smallest direction index, then the smallest
/// scale index, whatever the rounding of the individual terms.
pub fn multiscale_gradient_signature<T: Scalar>(
    img: &Image<T>,
    contour: &Contour<T>,
    scales: &[T],
    num_directions: usize,
) -> Result<GradientSignature<T>> {
    if scales.is_empty() {
        return Err(ShapeError::InvalidParams("scale list is empty".into()));
    }
    if num_directions < 4 {
        return Err(ShapeError::InvalidParams(format!(
            "need at least 4 directions, got {num_directions}"
        )));
    }
    let kernels: Vec<DerivKernelPair<T>> = scales
        .iter()
        .map(|&s| gaussian_deriv_kernels(s))
        .collect::<Result<_>>()?;
    let steer: Vec<(T, T, T)> = (0..num_directions)
        .map(|m| {
            let angle = T::from_usize_lossy(m) * T::PI() / T::from_usize_lossy(num_directions);
            (angle, angle.cos(), angle.sin())
        })
        .collect();

    let mut samples = Vec::with_capacity(contour.len());
    for &p in &contour.points {
        let (xr, yr) = (p.x.round(), p.y.round());
        if xr < T::zero()
            || yr < T::zero()
            || xr >= T::from_usize_lossy(img.width())
            || yr >= T::from_usize_lossy(img.height())
        {
            return Err(ShapeError::InvalidParams(format!(
                "contour point ({}, {}) lies outside the image",
                p.x, p.y
            )));
        }
        let (x, y) = (xr.to_usize().unwrap(), yr.to_usize().unwrap());
        let basis: Vec<(T, T)> = kernels
            .iter()
            .map(|k| {
                (
                    convolve_at(img.raster(), &k.g0, x, y),
                    convolve_at(img.raster(), &k.g90, x, y),
                )
            })
            .collect();
        let mut best = (-T::one(), 0usize, 0usize);
        for (m, &(_, c, s)) in steer.iter().enumerate() {
            for (si, &(r0, r90)) in basis.iter().enumerate() {
                let v = (c * r0 + s * r90).abs().snap(T::one());
                if v > best.0 {
                    best = (v, m, si);
                }
            }
        }
        let polar = PolarPoint::of(p, contour.centroid);
        samples.push(GradientSample {
            magnitude: best.0,
            direction: steer[best.1].0,
            direction_index: best.1,
            scale_index: best.2,
            r: polar.r,
            theta: polar.theta,
        });
    }
    Ok(GradientSignature {
        samples,
        num_directions,
        scales: scales.to_vec(),
    })
}
