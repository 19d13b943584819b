use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::imgproc::{binarize, otsu_threshold, BinaryImage, Image};
use crate::scalar::Scalar;

/// Exact quarter turn: `(x, y) -> (h - 1 - y, x)`.
pub fn rotate90<T: Scalar>(img: &Image<T>) -> Image<T> {
    let (w, h) = (img.width(), img.height());
    Image::from_fn(h, w, |x, y| img.get(y, h - 1 - x))
}

/// Nearest-neighbour rotation by `angle` radians about the image centre
/// onto a canvas large enough to hold the whole rotated image; uncovered
/// pixels are 0.
pub fn rotate<T: Scalar>(img: &Image<T>, angle: f64) -> Image<T> {
    let (w, h) = (img.width() as f64, img.height() as f64);
    let (s, c) = angle.sin_cos();
    let nw = (w * c.abs() + h * s.abs()).ceil() as usize + 2;
    let nh = (w * s.abs() + h * c.abs()).ceil() as usize + 2;
    let (cx, cy) = ((w - 1.0) / 2.0, (h - 1.0) / 2.0);
    let (ncx, ncy) = ((nw as f64 - 1.0) / 2.0, (nh as f64 - 1.0) / 2.0);
    Image::from_fn(nw, nh, |x, y| {
        let (dx, dy) = (x as f64 - ncx, y as f64 - ncy);
        let sx = (c * dx + s * dy + cx).round();
        let sy = (-s * dx + c * dy + cy).round();
        if sx >= 0.0 && sy >= 0.0 && sx < w && sy < h {
            img.get(sx as usize, sy as usize)
        } else {
            T::zero()
        }
    })
}

/// Nearest-neighbour rescale by `factor`.
pub fn scale<T: Scalar>(img: &Image<T>, factor: f64) -> Image<T> {
    let nw = ((img.width() as f64 * factor).round() as usize).max(1);
    let nh = ((img.height() as f64 * factor).round() as usize).max(1);
    Image::from_fn(nw, nh, |x, y| {
        let sx = (((x as f64 + 0.5) / factor) as usize).min(img.width() - 1);
        let sy = (((y as f64 + 0.5) / factor) as usize).min(img.height() - 1);
        img.get(sx, sy)
    })
}

/// Surrounds the image with a `margin`-pixel border of zeros.
pub fn pad<T: Scalar>(img: &Image<T>, margin: usize) -> Image<T> {
    translate(img, margin, margin, margin)
}

/// Moves the content `dx` right and `dy` down, growing the canvas so that
/// `extra` zero pixels remain beyond the original right and bottom edges.
pub fn translate<T: Scalar>(img: &Image<T>, dx: usize, dy: usize, extra: usize) -> Image<T> {
    let (w, h) = (img.width(), img.height());
    Image::from_fn(w + dx + extra, h + dy + extra, |x, y| {
        if x >= dx && y >= dy && x - dx < w && y - dy < h {
            img.get(x - dx, y - dy)
        } else {
            T::zero()
        }
    })
}

/// Binarizes the image and flips `fraction` of the pixels that have a
/// 4-neighbour of the opposite value, chosen by a seeded ChaCha8 stream.
pub fn boundary_noise<T: Scalar>(img: &Image<T>, fraction: f64, seed: u64) -> Result<Image<T>> {
    let mask = binarize(img, otsu_threshold(img)?);
    let (w, h) = (mask.width(), mask.height());
    let differs = |x: usize, y: usize, nx: i64, ny: i64| {
        nx >= 0
            && ny >= 0
            && (nx as usize) < w
            && (ny as usize) < h
            && mask.get(nx as usize, ny as usize) != mask.get(x, y)
    };
    let candidates: Vec<(usize, usize)> = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .filter(|&(x, y)| {
            let (xi, yi) = (x as i64, y as i64);
            differs(x, y, xi - 1, yi)
                || differs(x, y, xi + 1, yi)
                || differs(x, y, xi, yi - 1)
                || differs(x, y, xi, yi + 1)
        })
        .collect();
    let count = (fraction * candidates.len() as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut noisy: BinaryImage = mask.clone();
    for i in sample(&mut rng, candidates.len(), count.min(candidates.len())) {
        let (x, y) = candidates[i];
        noisy.set(x, y, !mask.get(x, y));
    }
    Ok(noisy.to_image())
}
