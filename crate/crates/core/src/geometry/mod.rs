//! Boundary extraction, centroids, polar coordinates and the shape
//! signatures derived from them.

mod contour;
mod gradient;
mod polar_grid;
mod signature;

pub use self::contour::{to_polar, trace_boundary, Contour, Point, PolarPoint};
pub use self::gradient::{multiscale_gradient_signature, GradientSample, GradientSignature};
pub use self::polar_grid::{rasterize_polar, sample_region_polar, PolarGrid};
pub use self::signature::{
    centroid_distance_signature, corner_radial_signature, interpolate_signature,
    radial_signature_from_points, RadialSignature, INTERPOLATED_SAMPLES,
};

use crate::scalar::Scalar;

/// Maps an angle into `[0, 2 pi)`.
#[inline]
pub(crate) fn wrap_angle<T: Scalar>(theta: T) -> T {
    let tau = T::TAU();
    let mut t = theta % tau;
    if t < T::zero() {
        t += tau;
    }
    if t >= tau {
        t = T::zero();
    }
    t
}
