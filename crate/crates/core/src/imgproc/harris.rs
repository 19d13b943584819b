use crate::error::{Result, ShapeError};
use crate::scalar::Scalar;

use super::filter::{derivative_responses, gaussian_blur, gaussian_deriv_kernels, kernel_radius};
use super::image::{Image, Raster};

/// Fewest corners any downstream signature can work with.
pub const MIN_CORNERS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarrisParams<T> {
    pub k: T,
    /// Scale of the Gaussian window integrating the structure tensor.
    pub window_sigma: T,
    /// Scale of the derivative-of-Gaussian kernels producing the gradients.
    pub deriv_sigma: T,
    /// Responses must exceed this fraction of
    /// `max(image max response, unit right-angle corner response)`.
    pub rel_threshold: T,
    pub nms_radius: usize,
    pub max_count: usize,
}

impl<T: Scalar> Default for HarrisParams<T> {
    fn default() -> Self {
        Self {
            k: T::lit(0.04),
            window_sigma: T::lit(1.5),
            deriv_sigma: T::lit(2.0),
            rel_threshold: T::lit(0.01),
            nms_radius: 3,
            max_count: 40,
        }
    }
}

impl<T: Scalar> HarrisParams<T> {
    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.k >= T::lit(0.02) && self.k <= T::lit(0.1)) {
            return Err(ShapeError::InvalidParams(format!(
                "harris k must lie in [0.02, 0.1], got {}",
                self.k
            )));
        }
        if self.max_count < MIN_CORNERS {
            return Err(ShapeError::InvalidParams(format!(
                "max_count must be at least {MIN_CORNERS}, got {}",
                self.max_count
            )));
        }
        if !(self.rel_threshold >= T::zero()) {
            return Err(ShapeError::InvalidParams(
                "rel_threshold must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corner<T> {
    pub x: T,
    pub y: T,
    pub strength: T,
}

/// Corners sorted by descending strength, at most `max_count` of them.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerSet<T> {
    pub points: Vec<Corner<T>>,
    pub max_count: usize,
}

impl<T: Scalar> CornerSet<T> {
    /// Builds a set from arbitrary corners: sorts by strength (ties by
    /// position) and truncates to `max_count`.
    pub fn from_corners(mut points: Vec<Corner<T>>, max_count: usize) -> Self {
        points.sort_by(|a, b| {
            b.strength
                .partial_cmp(&a.strength)
                .unwrap()
                .then(a.y.partial_cmp(&b.y).unwrap())
                .then(a.x.partial_cmp(&b.x).unwrap())
        });
        points.truncate(max_count);
        Self { points, max_count }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn raw_response<T: Scalar>(img: &Raster<T>, params: &HarrisParams<T>) -> Result<Raster<T>> {
    let pair = gaussian_deriv_kernels(params.deriv_sigma)?;
    let (ix, iy) = derivative_responses(img, &pair);
    let sxx = gaussian_blur(&ix.zip_map(&ix, |a, b| a * b), params.window_sigma)?;
    let syy = gaussian_blur(&iy.zip_map(&iy, |a, b| a * b), params.window_sigma)?;
    let sxy = gaussian_blur(&ix.zip_map(&iy, |a, b| a * b), params.window_sigma)?;
    let k = params.k;
    Ok(Raster::from_fn(img.width(), img.height(), |x, y| {
        let (a, b, c) = (sxx.get(x, y), syy.get(x, y), sxy.get(x, y));
        let trace = a + b;
        a * b - c * c - k * trace * trace
    }))
}

/// Peak response of an ideal unit-contrast right-angle corner.
fn unit_corner_response<T: Scalar>(params: &HarrisParams<T>) -> Result<T> {
    let reach = kernel_radius(params.deriv_sigma) + kernel_radius(params.window_sigma);
    let size = 4 * reach + 8;
    let half = size / 2;
    let corner = Raster::from_fn(size, size, |x, y| {
        if x >= half && y >= half {
            T::one()
        } else {
            T::zero()
        }
    });
    Ok(raw_response(&corner, params)?.max_value())
}

/// Harris-Stephens response `det(M) - k trace(M)^2` of the Gaussian-windowed
/// structure tensor, snapped to a grid relative to the unit-corner response.
pub fn harris_response<T: Scalar>(img: &Image<T>, params: &HarrisParams<T>) -> Result<Raster<T>> {
    params.validate()?;
    let reference = unit_corner_response(params)?;
    snapped_response(img, params, reference)
}

fn snapped_response<T: Scalar>(
    img: &Image<T>,
    params: &HarrisParams<T>,
    reference: T,
) -> Result<Raster<T>> {
    Ok(raw_response(img.raster(), params)?.map(|v| v.snap(reference)))
}

/// Detects corners: thresholding, non-maximum suppression over a disk of
/// radius `nms_radius`, and the strongest `max_count` survivors.
///
/// Equal maxima within suppression range of each other are merged into one
/// corner at their mean position, which keeps detection symmetric under
/// axis-aligned rotations and reflections.
pub fn harris_corners<T: Scalar>(img: &Image<T>, params: &HarrisParams<T>) -> Result<CornerSet<T>> {
    params.validate()?;
    let reference = unit_corner_response(params)?;
    let response = snapped_response(img, params, reference)?;
    let threshold = params.rel_threshold * response.max_value().max(reference);
    let (w, h) = (response.width() as i64, response.height() as i64);
    let r = params.nms_radius as i64;

    let mut peaks: Vec<(i64, i64, T)> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let v = response.get(x as usize, y as usize);
            if v <= threshold {
                continue;
            }
            let mut is_max = true;
            'window: for dy in -r..=r {
                for dx in -r..=r {
                    if dx * dx + dy * dy > r * r {
                        continue;
                    }
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w || ny >= h {
                        continue;
                    }
                    if response.get(nx as usize, ny as usize) > v {
                        is_max = false;
                        break 'window;
                    }
                }
            }
            if is_max {
                peaks.push((x, y, v));
            }
        }
    }

    let mut group = vec![usize::MAX; peaks.len()];
    let mut corners = Vec::new();
    for seed in 0..peaks.len() {
        if group[seed] != usize::MAX {
            continue;
        }
        group[seed] = seed;
        let mut members = vec![seed];
        let mut cursor = 0;
        while cursor < members.len() {
            let (cx, cy, cv) = peaks[members[cursor]];
            cursor += 1;
            for (j, &(px, py, pv)) in peaks.iter().enumerate() {
                if group[j] == usize::MAX
                    && pv == cv
                    && (px - cx).pow(2) + (py - cy).pow(2) <= r * r
                {
                    group[j] = seed;
                    members.push(j);
                }
            }
        }
        let count = T::from_usize_lossy(members.len());
        let sx: T = members
            .iter()
            .map(|&m| T::from_i64(peaks[m].0).unwrap())
            .sum();
        let sy: T = members
            .iter()
            .map(|&m| T::from_i64(peaks[m].1).unwrap())
            .sum();
        corners.push(Corner {
            x: sx / count,
            y: sy / count,
            strength: peaks[seed].2,
        });
    }

    if corners.len() < MIN_CORNERS {
        return Err(ShapeError::TooFewCorners {
            found: corners.len(),
            needed: MIN_CORNERS,
        });
    }
    Ok(CornerSet::from_corners(corners, params.max_count))
}
