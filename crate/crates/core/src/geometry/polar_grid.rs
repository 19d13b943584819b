use num_complex::Complex;

use crate::error::{Result, ShapeError};
use crate::imgproc::BinaryImage;
use crate::scalar::Scalar;

use super::contour::Point;
use super::gradient::GradientSignature;
use super::wrap_angle;

/// Complex samples on an `r_bins x t_bins` polar grid, radial-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarGrid<T> {
    r_bins: usize,
    t_bins: usize,
    cells: Vec<Complex<T>>,
    occupied: usize,
}

impl<T: Scalar> PolarGrid<T> {
    /// Grid from explicit cells; a cell counts as occupied when nonzero.
    pub fn new(r_bins: usize, t_bins: usize, cells: Vec<Complex<T>>) -> Result<Self> {
        if r_bins == 0 || t_bins == 0 || cells.len() != r_bins * t_bins {
            return Err(ShapeError::InvalidParams(format!(
                "{} cells do not fill a {r_bins}x{t_bins} grid",
                cells.len()
            )));
        }
        if cells.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(ShapeError::InvalidParams(
                "grid cells must be finite".into(),
            ));
        }
        let occupied = cells
            .iter()
            .filter(|c| **c != Complex::new(T::zero(), T::zero()))
            .count();
        Ok(Self {
            r_bins,
            t_bins,
            cells,
            occupied,
        })
    }

    pub fn from_fn(
        r_bins: usize,
        t_bins: usize,
        mut f: impl FnMut(usize, usize) -> Complex<T>,
    ) -> Result<Self> {
        let mut cells = Vec::with_capacity(r_bins * t_bins);
        for r in 0..r_bins {
            for t in 0..t_bins {
                cells.push(f(r, t));
            }
        }
        Self::new(r_bins, t_bins, cells)
    }

    #[inline]
    pub fn r_bins(&self) -> usize {
        self.r_bins
    }

    #[inline]
    pub fn t_bins(&self) -> usize {
        self.t_bins
    }

    #[inline]
    pub fn get(&self, r: usize, t: usize) -> Complex<T> {
        self.cells[r * self.t_bins + t]
    }

    pub fn cells(&self) -> &[Complex<T>] {
        &self.cells
    }

    /// Number of cells that received at least one sample.
    pub fn occupied(&self) -> usize {
        self.occupied
    }

    /// Circular shift along the angular axis by `shift` bins.
    pub fn shifted_theta(&self, shift: usize) -> Self {
        let t = self.t_bins;
        let mut cells = self.cells.clone();
        for r in 0..self.r_bins {
            for j in 0..t {
                cells[r * t + (j + shift) % t] = self.cells[r * t + j];
            }
        }
        Self {
            cells,
            ..self.clone()
        }
    }
}

/// Direction of the strongest response relative to the radial line through
/// the point, folded into `[0, 1]`: 0 when radial, 1 when tangential.
pub(crate) fn radial_relative_direction<T: Scalar>(direction: T, theta: T) -> T {
    let pi = T::PI();
    let mut phi = (direction - theta) % pi;
    if phi < T::zero() {
        phi += pi;
    }
    phi.min(pi - phi) / (pi / T::lit(2.0))
}

/// Bins a gradient signature onto a polar grid.
///
/// Each point deposits `f(k) / max f + i * d(k)`, where `d(k)` is the
/// response direction measured from the point's radial line
/// (see [`radial_relative_direction`]); radii are divided by the largest
/// radius. Cell `(floor(r_hat (R - 1)), floor(theta / 2pi * T))` averages its
/// deposits; cells without deposits stay zero.
pub fn rasterize_polar<T: Scalar>(
    sig: &GradientSignature<T>,
    r_bins: usize,
    t_bins: usize,
) -> Result<PolarGrid<T>> {
    if r_bins < 4 || t_bins < 4 {
        return Err(ShapeError::InvalidParams(format!(
            "polar grid must be at least 4x4, got {r_bins}x{t_bins}"
        )));
    }
    if sig.is_empty() {
        return Err(ShapeError::EmptySignature);
    }
    let max_r = sig.samples.iter().map(|s| s.r).fold(T::zero(), T::max);
    let max_f = sig
        .samples
        .iter()
        .map(|s| s.magnitude)
        .fold(T::zero(), T::max);
    let mut sums = vec![Complex::new(T::zero(), T::zero()); r_bins * t_bins];
    let mut counts = vec![0usize; r_bins * t_bins];
    let r_top = T::from_usize_lossy(r_bins - 1);
    let t_count = T::from_usize_lossy(t_bins);
    for s in &sig.samples {
        let r_hat = if max_r > T::zero() {
            s.r / max_r
        } else {
            T::zero()
        };
        let ri = (r_hat * r_top)
            .floor()
            .to_usize()
            .unwrap_or(0)
            .min(r_bins - 1);
        let ti = (wrap_angle(s.theta) / T::TAU() * t_count)
            .floor()
            .to_usize()
            .unwrap_or(0)
            .min(t_bins - 1);
        let re = if max_f > T::zero() {
            s.magnitude / max_f
        } else {
            T::zero()
        };
        let im = radial_relative_direction(s.direction, s.theta);
        sums[ri * t_bins + ti] += Complex::new(re, im);
        counts[ri * t_bins + ti] += 1;
    }
    let occupied = counts.iter().filter(|&&c| c > 0).count();
    let cells = sums
        .into_iter()
        .zip(&counts)
        .map(|(s, &c)| if c > 0 { s / T::from_usize_lossy(c) } else { s })
        .collect();
    Ok(PolarGrid {
        r_bins,
        t_bins,
        cells,
        occupied,
    })
}

/// Candidate pixel indices nearest to coordinate `v`: one, or both
/// neighbours when `v` sits halfway between them.
fn nearest_indices<T: Scalar>(v: T) -> ([i64; 2], usize) {
    let lo = v.floor();
    let frac = (v - lo).snap(T::one());
    let base = lo.to_i64().unwrap_or(i64::MIN / 2);
    let half = T::lit(0.5);
    if frac == half {
        ([base, base + 1], 2)
    } else if frac < half {
        ([base, base], 1)
    } else {
        ([base + 1, base + 1], 1)
    }
}

/// Polar raster of a region: cell `(r, t)` holds the mask value at the
/// pixel nearest to `centre + (r + 1/2) / R * max_radius * (cos, sin)(2 pi t / T)`.
///
/// A sample point exactly halfway between pixels takes the mean of the tied
/// pixels, which keeps the raster symmetric under quarter turns and mirror
/// images of the mask.
pub fn sample_region_polar<T: Scalar>(
    mask: &BinaryImage,
    centre: Point<T>,
    max_radius: T,
    r_bins: usize,
    t_bins: usize,
) -> Result<PolarGrid<T>> {
    let half = T::lit(0.5);
    let r_count = T::from_usize_lossy(r_bins);
    let t_count = T::from_usize_lossy(t_bins);
    let trig: Vec<(T, T)> = (0..t_bins)
        .map(|t| (T::TAU() * T::from_usize_lossy(t) / t_count).sin_cos())
        .collect();
    PolarGrid::from_fn(r_bins, t_bins, |r, t| {
        let rho = (T::from_usize_lossy(r) + half) / r_count * max_radius;
        let (s, c) = trig[t];
        let (xs, nx) = nearest_indices(centre.x + rho * c);
        let (ys, ny) = nearest_indices(centre.y + rho * s);
        let hits = ys[..ny]
            .iter()
            .flat_map(|&y| xs[..nx].iter().map(move |&x| (x, y)))
            .filter(|&(x, y)| mask.get_signed(x, y))
            .count();
        let v = T::from_usize_lossy(hits) / T::from_usize_lossy(nx * ny);
        Complex::new(v, T::zero())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GradientSample;
    use std::f64::consts::PI;

    fn sample(r: f64, theta: f64, f: f64, m: usize) -> GradientSample<f64> {
        GradientSample {
            magnitude: f,
            direction: m as f64 * PI / 10.0,
            direction_index: m,
            scale_index: 0,
            r,
            theta,
        }
    }

    fn signature(samples: Vec<GradientSample<f64>>) -> GradientSignature<f64> {
        GradientSignature {
            samples,
            num_directions: 10,
            scales: vec![1.0],
        }
    }

    #[test]
    fn single_point_single_cell() {
        let g = rasterize_polar(&signature(vec![sample(3.0, 1.0, 2.0, 0)]), 8, 8).unwrap();
        let nonzero: Vec<_> = g.cells().iter().filter(|c| c.norm() > 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(g.occupied(), 1);
        let expect_im = radial_relative_direction(0.0, 1.0);
        assert_eq!(*nonzero[0], Complex::new(1.0, expect_im));
        // r_hat = 1 lands in the outer ring; theta = 1 rad in bin floor(8/2pi)
        assert_eq!(g.get(7, 1), Complex::new(1.0, expect_im));
    }

    #[test]
    fn shared_cell_averages() {
        // two points in one cell with real parts 1/3 and 3/3, both radial
        let sig = signature(vec![
            sample(10.0, 0.0, 3.0, 0),
            sample(10.0, 0.01, 1.0, 0),
            sample(1.0, PI, 3.0, 0),
        ]);
        let g = rasterize_polar(&sig, 4, 4).unwrap();
        let cell = g.get(3, 0);
        assert!((cell.re - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn circle_fills_outer_ring() {
        let n = 720;
        let samples = (0..n)
            .map(|i| {
                let theta = (i as f64 + 0.5) / n as f64 * 2.0 * PI;
                GradientSample {
                    direction: theta % PI,
                    ..sample(5.0, theta, 1.0, 0)
                }
            })
            .collect();
        let g = rasterize_polar(&signature(samples), 6, 12).unwrap();
        let outer = g.get(5, 0);
        for t in 0..12 {
            assert!((g.get(5, t) - outer).norm() < 1e-12);
            for r in 0..5 {
                assert_eq!(g.get(r, t), Complex::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn conservation_of_deposits() {
        let sig = signature(
            (0..97)
                .map(|i| {
                    sample(
                        1.0 + (i % 13) as f64,
                        i as f64 * 0.37,
                        0.5 + (i % 5) as f64,
                        i % 10,
                    )
                })
                .collect(),
        );
        let g = rasterize_polar(&sig, 8, 12).unwrap();
        // recount occupancy independently
        let max_r = 13.0;
        let mut counts = vec![0usize; 96];
        let mut total = Complex::new(0.0, 0.0);
        for s in &sig.samples {
            let ri = ((s.r / max_r * 7.0).floor() as usize).min(7);
            let ti = ((wrap_angle(s.theta) / (2.0 * PI) * 12.0).floor() as usize).min(11);
            counts[ri * 12 + ti] += 1;
            total += Complex::new(
                s.magnitude / 4.5,
                radial_relative_direction(s.direction, s.theta),
            );
        }
        let weighted: Complex<f64> = g
            .cells()
            .iter()
            .zip(&counts)
            .map(|(c, &k)| c * k as f64)
            .sum();
        assert!((weighted - total).norm() < 1e-9);
    }

    #[test]
    fn relative_direction_folding() {
        assert_eq!(radial_relative_direction(0.0, 0.0), 0.0);
        assert!((radial_relative_direction(PI / 2.0, 0.0) - 1.0).abs() < 1e-15);
        assert!((radial_relative_direction(0.0, PI) - 0.0).abs() < 1e-15);
        assert!((radial_relative_direction(0.1, 2.0 * PI - 0.1) - 0.2 / (PI / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn empty_and_small_grids_rejected() {
        assert!(matches!(
            rasterize_polar(&signature(vec![]), 8, 8),
            Err(ShapeError::EmptySignature)
        ));
        assert!(rasterize_polar(&signature(vec![sample(1.0, 0.0, 1.0, 0)]), 3, 8).is_err());
    }

    #[test]
    fn region_sampling_averages_halfway_ties() {
        let mut mask = BinaryImage::empty(9, 9);
        mask.set(5, 4, true);
        // the centre sits halfway between pixels 4 and 5 on the x axis
        let g = sample_region_polar(&mask, Point::new(4.5, 4.0), 0.0, 4, 4).unwrap();
        assert_eq!(g.get(0, 0), Complex::new(0.5, 0.0));
        let filled = BinaryImage::from_fn(9, 9, |x, _| x >= 4);
        let g = sample_region_polar(&filled, Point::new(4.5, 4.0), 0.0, 4, 4).unwrap();
        assert_eq!(g.get(0, 0), Complex::new(1.0, 0.0));
    }

    #[test]
    fn region_sampling_commutes_with_quarter_turns() {
        let mask = BinaryImage::from_fn(21, 21, |x, y| {
            (3..15).contains(&x) && (6..12).contains(&y) || x == 14 && y < 9
        });
        let turned = BinaryImage::from_fn(21, 21, |x, y| mask.get(y, 20 - x));
        let centre = |m: &BinaryImage| {
            let pts: Vec<Point<f64>> = (0..21)
                .flat_map(|y| (0..21).map(move |x| (x, y)))
                .filter(|&(x, y)| m.get(x, y))
                .map(|(x, y)| Point::new(x as f64, y as f64))
                .collect();
            Point::mean(&pts).unwrap()
        };
        let a = sample_region_polar(&mask, centre(&mask), 9.0, 8, 16).unwrap();
        let b = sample_region_polar(&turned, centre(&turned), 9.0, 8, 16).unwrap();
        assert_eq!(a.shifted_theta(4), b);
    }
}
