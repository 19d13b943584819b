use crate::error::{Result, ShapeError};
use crate::imgproc::CornerSet;
use crate::scalar::Scalar;

use super::contour::{Contour, Point, PolarPoint};

/// Samples of the interpolated corner signature, one per integer degree.
pub const INTERPOLATED_SAMPLES: usize = 360;

/// Centroid distance `r(t)` at `num_samples` points equally spaced by arc
/// length along the closed contour.
///
/// Sampling starts at the first vertex farthest from the centroid, so the
/// output does not depend on where tracing happened to begin.
pub fn centroid_distance_signature<T: Scalar>(
    contour: &Contour<T>,
    num_samples: usize,
) -> Result<Vec<T>> {
    if num_samples < 8 {
        return Err(ShapeError::InvalidParams(format!(
            "need at least 8 samples, got {num_samples}"
        )));
    }
    let n = contour.len();
    if n < 4 {
        return Err(ShapeError::DegenerateContour(n));
    }
    let c = contour.centroid;
    let dist2 = |p: &Point<T>| (p.x - c.x).powi(2) + (p.y - c.y).powi(2);
    let mut start = 0;
    for (i, p) in contour.points.iter().enumerate() {
        if dist2(p) > dist2(&contour.points[start]) {
            start = i;
        }
    }
    let pts: Vec<Point<T>> = (0..=n).map(|i| contour.points[(start + i) % n]).collect();
    let seg: Vec<T> = pts.windows(2).map(|w| w[0].distance(&w[1])).collect();
    let total: T = seg.iter().copied().sum();
    if !(total > T::zero()) {
        return Err(ShapeError::DegenerateContour(n));
    }

    let step = total / T::from_usize_lossy(num_samples);
    let mut out = Vec::with_capacity(num_samples);
    let (mut k, mut walked) = (0usize, T::zero());
    for j in 0..num_samples {
        let s = step * T::from_usize_lossy(j);
        while k + 1 < seg.len() && walked + seg[k] < s {
            walked += seg[k];
            k += 1;
        }
        let t = if seg[k] > T::zero() {
            ((s - walked) / seg[k]).max(T::zero()).min(T::one())
        } else {
            T::zero()
        };
        let (a, b) = (pts[k], pts[k + 1]);
        let p = Point::new(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t);
        out.push(p.distance(&c));
    }
    Ok(out)
}

/// Corner radii normalized by their maximum, with corner angles.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSignature<T> {
    /// `(theta_n, r_bar_n)` pairs, `theta_n` in `[0, 2 pi)`, `r_bar_n` in `(0, 1]`.
    pub samples: Vec<(T, T)>,
    /// `Max(R)` the radii were divided by.
    pub normalizer: T,
}

/// Radial signature about the mean of `points`.
///
/// A point sitting exactly on the centroid has no defined angle and is
/// dropped.
pub fn radial_signature_from_points<T: Scalar>(points: &[Point<T>]) -> Result<RadialSignature<T>> {
    if points.len() < crate::imgproc::MIN_CORNERS {
        return Err(ShapeError::TooFewCorners {
            found: points.len(),
            needed: crate::imgproc::MIN_CORNERS,
        });
    }
    let centre = Point::mean(points).expect("non-empty");
    let polar: Vec<PolarPoint<T>> = points.iter().map(|&p| PolarPoint::of(p, centre)).collect();
    let max_r = polar.iter().map(|p| p.r).fold(T::zero(), T::max);
    if !(max_r > T::zero()) {
        return Err(ShapeError::DegenerateCorners);
    }
    let samples = polar
        .iter()
        .filter(|p| p.r > T::zero())
        .map(|p| (p.theta, p.r / max_r))
        .collect();
    Ok(RadialSignature {
        samples,
        normalizer: max_r,
    })
}

/// Radial signature of a corner set about the corner centroid.
pub fn corner_radial_signature<T: Scalar>(corners: &CornerSet<T>) -> Result<RadialSignature<T>> {
    let points: Vec<Point<T>> = corners
        .points
        .iter()
        .map(|c| Point::new(c.x, c.y))
        .collect();
    radial_signature_from_points(&points)
}

/// Nearest-neighbour resampling of a radial signature at every integer
/// degree, using circular angular distance.
///
/// A degree exactly halfway between two samples takes the one ahead of it
/// (counter-clockwise); coincident angles prefer the larger radius. Both
/// rules depend only on relative angles, so rotating the samples by whole
/// degrees circularly shifts the output. Ties are detected within
/// `sqrt(epsilon)` radians.
pub fn interpolate_signature<T: Scalar>(sig: &RadialSignature<T>) -> Vec<T> {
    if sig.samples.is_empty() {
        return vec![T::zero(); INTERPOLATED_SAMPLES];
    }
    let tau = T::TAU();
    let pi = T::PI();
    let tol = T::epsilon().sqrt();
    let deg = pi / T::lit(180.0);
    (0..INTERPOLATED_SAMPLES)
        .map(|d| {
            let angle = T::from_usize_lossy(d) * deg;
            let mut best: Option<(T, bool, T)> = None;
            for &(theta, r) in &sig.samples {
                let mut ahead = (theta - angle) % tau;
                if ahead < T::zero() {
                    ahead += tau;
                }
                let dist = ahead.min(tau - ahead);
                let is_ahead = ahead <= pi;
                let better = match best {
                    None => true,
                    Some((bd, b_ahead, br)) => {
                        if dist < bd - tol {
                            true
                        } else if dist > bd + tol {
                            false
                        } else if is_ahead != b_ahead {
                            is_ahead
                        } else {
                            r > br
                        }
                    }
                };
                if better {
                    best = Some((dist, is_ahead, r));
                }
            }
            best.map(|b| b.2).unwrap()
        })
        .collect()
}
