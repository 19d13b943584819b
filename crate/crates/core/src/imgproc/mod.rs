//! Pixel-level primitives: rasters, Otsu binarization, Gaussian derivative
//! filters and their steering, Canny edges and Harris-Stephens corners.

mod canny;
mod filter;
mod harris;
mod image;
mod otsu;

pub use self::canny::{canny_edges, CannyParams};
pub use self::filter::{
    convolve, convolve_at, derivative_responses, gaussian_blur, gaussian_deriv_kernels,
    gaussian_kernel_1d, reflect, responses, steer_response, DerivKernelPair, Kernel2, ResponsePair,
};
pub use self::harris::{
    harris_corners, harris_response, Corner, CornerSet, HarrisParams, MIN_CORNERS,
};
pub use self::image::{BinaryImage, Image, Raster};
pub use self::otsu::{binarize, otsu_bin_from_histogram, otsu_threshold, OTSU_BINS};
