use crate::error::{Result, ShapeError};
use crate::geometry::{
    centroid_distance_signature, corner_radial_signature, interpolate_signature,
    multiscale_gradient_signature, rasterize_polar, sample_region_polar, trace_boundary, Contour,
    Point, RadialSignature,
};
use crate::imgproc::{
    binarize, canny_edges, harris_corners, otsu_threshold, BinaryImage, CornerSet, HarrisParams,
    Image,
};
use crate::scalar::Scalar;
use crate::spectral::{
    dft1d_real, elliptic_coeffs, normalize_fd_1d, normalize_fd_2d, polar_ft_2d, Reference,
};

use super::{combine_isd, Descriptor, DescriptorKind, ExtractionConfig, IsdWeights};

/// Largest bright connected component after Otsu binarization.
pub fn silhouette<T: Scalar>(img: &Image<T>) -> Result<BinaryImage> {
    let threshold = match otsu_threshold(img) {
        Ok(t) => t,
        Err(ShapeError::DegenerateHistogram) => return Err(ShapeError::EmptyShape),
        Err(e) => return Err(e),
    };
    binarize(img, threshold)
        .largest_component()
        .ok_or(ShapeError::EmptyShape)
}

fn traced_contour<T: Scalar>(mask: &BinaryImage) -> Result<Contour<T>> {
    let contour = trace_boundary(mask)?;
    if contour.len() < 4 {
        return Err(ShapeError::DegenerateContour(contour.len()));
    }
    Ok(contour)
}

/// Region descriptor: the silhouette sampled on a polar raster about its
/// centroid, out to its farthest pixel, then the low-frequency block of the
/// normalized polar Fourier spectrum.
pub fn extract_gfd<T: Scalar>(img: &Image<T>, cfg: &ExtractionConfig<T>) -> Result<Descriptor<T>> {
    cfg.validate()?;
    let mask = silhouette(img)?;
    let pixels: Vec<Point<T>> = (0..mask.height())
        .flat_map(|y| (0..mask.width()).map(move |x| (x, y)))
        .filter(|&(x, y)| mask.get(x, y))
        .map(|(x, y)| Point::new(T::from_usize_lossy(x), T::from_usize_lossy(y)))
        .collect();
    let centre = Point::mean(&pixels).ok_or(ShapeError::EmptyShape)?;
    let reach = pixels
        .iter()
        .map(|p| p.distance(&centre))
        .fold(T::zero(), T::max)
        + T::lit(0.5);
    let grid = sample_region_polar(&mask, centre, reach, cfg.gfd_grid.0, cfg.gfd_grid.1)?;
    let values = normalize_fd_2d(&polar_ft_2d(&grid), cfg.gfd_radial, cfg.gfd_angular)?;
    Descriptor::new(DescriptorKind::Gfd, values)
}

/// Contour descriptor from the strongest multi-scale steered responses
/// along the silhouette boundary.
pub fn extract_msgbd<T: Scalar>(
    img: &Image<T>,
    cfg: &ExtractionConfig<T>,
) -> Result<Descriptor<T>> {
    cfg.validate()?;
    let mask = silhouette(img)?;
    let contour = traced_contour(&mask)?;
    let sig = multiscale_gradient_signature(
        &mask.to_image(),
        &contour,
        &cfg.msgbd_scales(),
        cfg.msgbd_directions,
    )?;
    let grid = rasterize_polar(&sig, cfg.msgbd_grid.0, cfg.msgbd_grid.1)?;
    let values = normalize_fd_2d(&polar_ft_2d(&grid), cfg.msgbd_keep.0, cfg.msgbd_keep.1)?;
    Descriptor::new(DescriptorKind::Msgbd, values)
}

/// Corner descriptor: Harris corners of the silhouette lying on its Canny
/// edges, capped at the strongest `cbid_max_corners`.
pub fn extract_cbid<T: Scalar>(img: &Image<T>, cfg: &ExtractionConfig<T>) -> Result<Descriptor<T>> {
    cfg.validate()?;
    let sil = silhouette(img)?.to_image::<T>();
    let edges = canny_edges(&sil, &cfg.canny)?;
    let uncapped = HarrisParams {
        max_count: usize::MAX,
        ..cfg.harris
    };
    let corners = harris_corners(&sil, &uncapped)?;
    let reach = cfg.cbid_edge_distance as i64;
    let near_edge = |x: T, y: T| {
        let (cx, cy) = (
            x.round().to_i64().unwrap_or(-1),
            y.round().to_i64().unwrap_or(-1),
        );
        (-reach..=reach).any(|dy| (-reach..=reach).any(|dx| edges.get_signed(cx + dx, cy + dy)))
    };
    let kept = corners
        .points
        .into_iter()
        .filter(|c| near_edge(c.x, c.y))
        .collect();
    cbid_from_corners(
        &CornerSet::from_corners(kept, cfg.cbid_max_corners),
        cfg.cbid_fds,
    )
}

pub fn cbid_from_corners<T: Scalar>(corners: &CornerSet<T>, fds: usize) -> Result<Descriptor<T>> {
    cbid_from_signature(&corner_radial_signature(corners)?, fds)
}

/// Magnitudes of frequencies `1..=fds` of the interpolated signature,
/// divided by the DC magnitude.
pub fn cbid_from_signature<T: Scalar>(
    sig: &RadialSignature<T>,
    fds: usize,
) -> Result<Descriptor<T>> {
    let spectrum = dft1d_real(&interpolate_signature(sig));
    Descriptor::new(
        DescriptorKind::Cbid,
        normalize_fd_1d(&spectrum, fds, Reference::Dc)?,
    )
}

/// Magnitudes of the elliptic Fourier coefficients of the traced boundary,
/// normalized for start point, rotation and scale. Taking magnitudes removes
/// the sign ambiguity left by the half-turn choices of the normalization.
pub fn extract_efd<T: Scalar>(img: &Image<T>, cfg: &ExtractionConfig<T>) -> Result<Descriptor<T>> {
    cfg.validate()?;
    let contour = traced_contour(&silhouette(img)?)?;
    let coeffs = elliptic_coeffs(&contour, cfg.efd_harmonics)?.normalized()?;
    Descriptor::new(
        DescriptorKind::Efd,
        coeffs.into_iter().flatten().map(|v: T| v.abs()).collect(),
    )
}

/// Centroid-distance signature spectrum, divided by its DC magnitude.
pub fn extract_cbfd<T: Scalar>(img: &Image<T>, cfg: &ExtractionConfig<T>) -> Result<Descriptor<T>> {
    cfg.validate()?;
    let contour = traced_contour(&silhouette(img)?)?.smoothed(cfg.cbfd_smoothing);
    let sig = centroid_distance_signature(&contour, cfg.cbfd_samples)?;
    let values = normalize_fd_1d(&dft1d_real(&sig), cfg.cbfd_fds, Reference::Dc)?;
    Descriptor::new(DescriptorKind::Cbfd, values)
}

pub fn extract_isd<T: Scalar>(
    img: &Image<T>,
    cfg: &ExtractionConfig<T>,
    w: IsdWeights<T>,
) -> Result<Descriptor<T>> {
    combine_isd(&extract_gfd(img, cfg)?, &extract_msgbd(img, cfg)?, w)
}

pub fn extract<T: Scalar>(
    kind: DescriptorKind,
    img: &Image<T>,
    cfg: &ExtractionConfig<T>,
    w: IsdWeights<T>,
) -> Result<Descriptor<T>> {
    match kind {
        DescriptorKind::Gfd => extract_gfd(img, cfg),
        DescriptorKind::Msgbd => extract_msgbd(img, cfg),
        DescriptorKind::Cbid => extract_cbid(img, cfg),
        DescriptorKind::Efd => extract_efd(img, cfg),
        DescriptorKind::Cbfd => extract_cbfd(img, cfg),
        DescriptorKind::Isd => extract_isd(img, cfg, w),
    }
}
