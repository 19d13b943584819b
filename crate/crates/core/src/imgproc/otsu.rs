use std::cmp::Ordering;

use crate::error::{Result, ShapeError};
use crate::scalar::Scalar;

use super::image::{BinaryImage, Image};

pub const OTSU_BINS: usize = 256;

fn bin_of<T: Scalar>(v: T) -> usize {
    let b = (v * T::lit(OTSU_BINS as f64))
        .floor()
        .to_usize()
        .unwrap_or(0);
    b.min(OTSU_BINS - 1)
}

pub fn histogram<T: Scalar>(img: &Image<T>) -> [u64; OTSU_BINS] {
    let mut hist = [0u64; OTSU_BINS];
    for &v in img.data() {
        hist[bin_of(v)] += 1;
    }
    hist
}

/// Between-class variance of splitting after bin `i`, kept as the exact
/// fraction `d^2 / (n0 n1)` with `d = N S0 - n0 S` (a positive multiple of
/// the textbook `w0 w1 (mu0 - mu1)^2`).
struct SplitScore {
    d: u128,
    den: u128,
}

impl SplitScore {
    fn cmp(&self, other: &SplitScore) -> Ordering {
        let lhs = self
            .d
            .checked_mul(self.d)
            .and_then(|sq| sq.checked_mul(other.den));
        let rhs = other
            .d
            .checked_mul(other.d)
            .and_then(|sq| sq.checked_mul(self.den));
        match (lhs, rhs) {
            (Some(a), Some(b)) => a.cmp(&b),
            _ => {
                let a = (self.d as f64).powi(2) / self.den as f64;
                let b = (other.d as f64).powi(2) / other.den as f64;
                a.partial_cmp(&b).unwrap_or(Ordering::Equal)
            }
        }
    }
}

/// Index of the last background bin of the Otsu split; ties resolve to the
/// smallest bin.
pub fn otsu_bin_from_histogram(hist: &[u64]) -> Result<usize> {
    if hist.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(ShapeError::DegenerateHistogram);
    }
    let n: u128 = hist.iter().map(|&c| c as u128).sum();
    let s: u128 = hist
        .iter()
        .enumerate()
        .map(|(b, &c)| b as u128 * c as u128)
        .sum();
    let (mut n0, mut s0) = (0u128, 0u128);
    let mut best: Option<(usize, SplitScore)> = None;
    for (i, &c) in hist.iter().enumerate().take(hist.len() - 1) {
        n0 += c as u128;
        s0 += i as u128 * c as u128;
        let n1 = n - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let score = SplitScore {
            d: (n * s0).abs_diff(n0 * s),
            den: n0 * n1,
        };
        let better = match &best {
            None => true,
            Some((_, b)) => score.cmp(b) == Ordering::Greater,
        };
        if better {
            best = Some((i, score));
        }
    }
    best.map(|(i, _)| i).ok_or(ShapeError::DegenerateHistogram)
}

/// Otsu threshold over a 256-bin histogram of `[0, 1]`.
///
/// The value returned is the upper edge of the last background bin, so
/// `intensity > t` selects exactly the bins above the split for 8-bit data.
pub fn otsu_threshold<T: Scalar>(img: &Image<T>) -> Result<T> {
    let bin = otsu_bin_from_histogram(&histogram(img))?;
    Ok(T::from_usize_lossy(bin + 1) / T::from_usize_lossy(OTSU_BINS))
}

pub fn binarize<T: Scalar>(img: &Image<T>, threshold: T) -> BinaryImage {
    BinaryImage::from_fn(img.width(), img.height(), |x, y| img.get(x, y) > threshold)
}
