//! Independent reference implementations shared by the oracle and
//! acceptance targets. Everything here is computed the slow, obvious way.

#![allow(dead_code)]

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shapekit::geometry::PolarGrid;
use shapekit::imgproc::{
    gaussian_deriv_kernels, harris_response, otsu_bin_from_histogram, responses, steer_response,
    HarrisParams, Image, OTSU_BINS,
};
use shapekit::learn::{best_split_1d, train_forest, write_forest, ForestParams, LabeledSet};
use shapekit::pipeline::{render_polygon, shape_vertices, Placement};
use shapekit::spectral::{dft1d, polar_ft_2d};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn twiddle(k: usize, n: usize, len: usize) -> Complex<f64> {
    // reduce the phase index first so large products keep full precision
    let phase = -TAU * ((k * n) % len) as f64 / len as f64;
    Complex::new(phase.cos(), phase.sin())
}

/// `X[k] = sum_n x[n] exp(-2 pi i k n / N)` by the definition.
pub fn direct_dft(x: &[Complex<f64>]) -> Vec<Complex<f64>> {
    let len = x.len();
    (0..len)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(n, &v)| v * twiddle(k, n, len))
                .sum()
        })
        .collect()
}

/// Double sum over the `R x T` grid `f(r, t)`, radial-major.
pub fn direct_polar_ft(cells: &[Complex<f64>], rn: usize, tn: usize) -> Vec<Complex<f64>> {
    let mut out = Vec::with_capacity(rn * tn);
    for lambda in 0..rn {
        for mu in 0..tn {
            let mut acc = Complex::new(0.0, 0.0);
            for r in 0..rn {
                let wr = twiddle(r, lambda, rn);
                for t in 0..tn {
                    acc += cells[r * tn + t] * wr * twiddle(t, mu, tn);
                }
            }
            out.push(acc);
        }
    }
    out
}

fn random_complex(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex<f64>> {
    (0..len)
        .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

fn max_abs_diff(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q).norm())
        .fold(0.0, f64::max)
}

/// Largest deviation of the library 1D transform and the polar 2D transform
/// from the direct sums over `instances` random inputs of each kind, sizes
/// up to 64.
pub fn spectral_max_error(instances: usize, seed: u64) -> f64 {
    let mut rng = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..instances {
        let len = rng.gen_range(1..=64);
        let x = random_complex(&mut rng, len);
        worst = worst.max(max_abs_diff(dft1d(&x).coefficients(), &direct_dft(&x)));

        let (rn, tn) = (rng.gen_range(1..=64), rng.gen_range(1..=64));
        let cells = random_complex(&mut rng, rn * tn);
        let grid = PolarGrid::new(rn, tn, cells.clone()).unwrap();
        worst = worst.max(max_abs_diff(
            polar_ft_2d(&grid).coefficients(),
            &direct_polar_ft(&cells, rn, tn),
        ));
    }
    worst
}

/// Bin after which the exhaustive maximum of the exact between-class
/// variance `w0 w1 (mu0 - mu1)^2` splits; the first maximum wins.
pub fn otsu_oracle(hist: &[u64]) -> Option<usize> {
    let total: u64 = hist.iter().sum();
    let mut best: Option<(usize, BigRational)> = None;
    for split in 0..hist.len() - 1 {
        let n0: u64 = hist[..=split].iter().sum();
        let n1 = total - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let s0: u64 = hist[..=split]
            .iter()
            .enumerate()
            .map(|(b, &c)| b as u64 * c)
            .sum();
        let s1: u64 = hist[split + 1..]
            .iter()
            .enumerate()
            .map(|(b, &c)| (b + split + 1) as u64 * c)
            .sum();
        let big = |v: u64| BigRational::from_integer(BigInt::from(v));
        let (w0, w1) = (big(n0) / big(total), big(n1) / big(total));
        let diff = big(s0) / big(n0) - big(s1) / big(n1);
        let var = w0 * w1 * diff.clone() * diff;
        if best.as_ref().is_none_or(|(_, b)| var > *b) {
            best = Some((split, var));
        }
    }
    best.map(|(s, _)| s)
}

/// A histogram with at least two occupied bins, drawn from a mix of
/// shapes: dense noise, two separated modes, a few sparse spikes, and
/// mirror-symmetric layouts that produce exact ties.
pub fn random_histogram(rng: &mut ChaCha8Rng) -> Vec<u64> {
    loop {
        let mut h = vec![0u64; OTSU_BINS];
        match rng.gen_range(0..4) {
            0 => h.iter_mut().for_each(|c| *c = rng.gen_range(0..1000)),
            1 => {
                for _ in 0..2 {
                    let centre = rng.gen_range(0..OTSU_BINS) as i64;
                    let width = rng.gen_range(1..30) as i64;
                    let height = rng.gen_range(1..100_000);
                    for d in -width..=width {
                        let b = centre + d;
                        if (0..OTSU_BINS as i64).contains(&b) {
                            h[b as usize] += height / (1 + d.unsigned_abs());
                        }
                    }
                }
            }
            2 => {
                for _ in 0..rng.gen_range(2..6) {
                    h[rng.gen_range(0..OTSU_BINS)] += rng.gen_range(1..5);
                }
            }
            _ => {
                for _ in 0..rng.gen_range(1..4) {
                    let b = rng.gen_range(0..OTSU_BINS / 2);
                    let c = rng.gen_range(1..50);
                    h[b] += c;
                    h[OTSU_BINS - 1 - b] += c;
                }
            }
        }
        if h.iter().filter(|&&c| c > 0).count() >= 2 {
            return h;
        }
    }
}

/// Histograms (out of `count`) where the library disagrees with the oracle.
pub fn otsu_mismatches(count: usize, seed: u64) -> usize {
    let mut rng = rng(seed);
    (0..count)
        .filter(|_| {
            let h = random_histogram(&mut rng);
            otsu_bin_from_histogram(&h).ok() != otsu_oracle(&h)
        })
        .count()
}

/// Reflect-101 index into `0..n`.
fn mirror(i: i64, n: usize) -> usize {
    let n = n as i64;
    if n == 1 {
        return 0;
    }
    let period = 2 * n - 2;
    let mut i = i.rem_euclid(period);
    if i >= n {
        i = period - i;
    }
    i as usize
}

/// Direct 2D convolution with a kernel given as a closure over offsets
/// in `[-radius, radius]^2`, mirrored borders.
pub fn direct_convolve(
    img: &[f64],
    w: usize,
    h: usize,
    radius: i64,
    kernel: impl Fn(i64, i64) -> f64,
) -> Vec<f64> {
    let taps: Vec<(i64, i64, f64)> = (-radius..=radius)
        .flat_map(|dy| (-radius..=radius).map(move |dx| (dx, dy)))
        .map(|(dx, dy)| (dx, dy, kernel(dx, dy)))
        .collect();
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            out[y * w + x] = taps
                .iter()
                .map(|&(dx, dy, k)| {
                    k * img[mirror(y as i64 - dy, h) * w + mirror(x as i64 - dx, w)]
                })
                .sum();
        }
    }
    out
}

pub fn kernel_radius(sigma: f64) -> i64 {
    ((3.0 * sigma).ceil() as i64).max(1)
}

/// First derivative of a Gaussian along direction `theta`, sampled on the
/// truncated square grid. The scale matches the library basis: the x lobe
/// of the 1D derivative profile sums to one and the cross profile is a
/// normalized Gaussian.
pub fn rotated_deriv_kernel(sigma: f64, theta: f64) -> (i64, impl Fn(i64, i64) -> f64) {
    let r = kernel_radius(sigma);
    let s2 = sigma * sigma;
    let lobe: f64 = (1..=r)
        .map(|d| d as f64 / s2 * (-(d * d) as f64 / (2.0 * s2)).exp())
        .sum();
    let gauss_sum: f64 = (-r..=r).map(|d| (-(d * d) as f64 / (2.0 * s2)).exp()).sum();
    let (c, s) = (theta.cos(), theta.sin());
    (r, move |dx: i64, dy: i64| {
        let (fx, fy) = (dx as f64, dy as f64);
        -(fx * c + fy * s) / s2 * (-(fx * fx + fy * fy) / (2.0 * s2)).exp() / (lobe * gauss_sum)
    })
}

/// Smooth test images: a soft disk, a rendered polygon, and a blend of
/// low-frequency waves.
pub fn steering_images(size: usize) -> Vec<Image<f64>> {
    let c = size as f64 / 2.0;
    let disk = Image::from_fn(size, size, |x, y| {
        let d = ((x as f64 - c).powi(2) + (y as f64 - c * 0.9).powi(2)).sqrt();
        1.0 / (1.0 + ((d - size as f64 * 0.3) / 2.0).exp())
    });
    let polygon = render_polygon(
        &shape_vertices("kite").unwrap(),
        Placement {
            size,
            radius: size as f64 * 0.35,
            rotation: 0.7,
            offset: (1.5, -2.0),
        },
    );
    let waves = Image::from_fn(size, size, |x, y| {
        let (u, v) = (x as f64 / size as f64, y as f64 / size as f64);
        0.5 + 0.25 * (TAU * (1.3 * u + 0.4 * v)).sin()
            + 0.2 * (TAU * (0.5 * u - 2.1 * v) + 0.3).cos()
    });
    vec![disk, polygon, waves]
}

/// Largest gap between steered basis responses and direct convolution with
/// the rotated kernel, over `angles` equally spaced directions.
pub fn steering_max_error(angles: usize, sigma: f64) -> f64 {
    let pair = gaussian_deriv_kernels(sigma).unwrap();
    let mut worst = 0.0f64;
    for img in steering_images(48) {
        let basis = responses(&img, &pair);
        for a in 0..angles {
            let theta = TAU * a as f64 / angles as f64;
            let steered = steer_response(&basis, theta);
            let (r, kernel) = rotated_deriv_kernel(sigma, theta);
            let direct = direct_convolve(img.data(), img.width(), img.height(), r, kernel);
            for (p, q) in steered.data().iter().zip(&direct) {
                worst = worst.max((p - q).abs());
            }
        }
    }
    worst
}

/// Harris response recomputed from the eigenvalues of the windowed
/// structure tensor; returns the largest gap relative to the peak response.
pub fn harris_relative_error(img: &Image<f64>, params: &HarrisParams<f64>) -> f64 {
    let (w, h) = (img.width(), img.height());
    let (r, kx) = rotated_deriv_kernel(params.deriv_sigma, 0.0);
    let ix = direct_convolve(img.data(), w, h, r, kx);
    let ky = {
        let (_, k) = rotated_deriv_kernel(params.deriv_sigma, 0.0);
        move |dx, dy| k(dy, dx)
    };
    let iy = direct_convolve(img.data(), w, h, r, ky);
    let ws = params.window_sigma;
    let wr = kernel_radius(ws);
    let norm: f64 = (-wr..=wr)
        .map(|d| (-(d * d) as f64 / (2.0 * ws * ws)).exp())
        .sum();
    let window =
        |dx: i64, dy: i64| (-((dx * dx + dy * dy) as f64) / (2.0 * ws * ws)).exp() / (norm * norm);
    let product = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).collect::<Vec<_>>();
    let sxx = direct_convolve(&product(&ix, &ix), w, h, wr, window);
    let syy = direct_convolve(&product(&iy, &iy), w, h, wr, window);
    let sxy = direct_convolve(&product(&ix, &iy), w, h, wr, window);
    let oracle: Vec<f64> = (0..w * h)
        .map(|i| {
            let (a, b, c) = (sxx[i], syy[i], sxy[i]);
            let mid = (a + b) / 2.0;
            let spread = (((a - b) / 2.0).powi(2) + c * c).sqrt();
            let (l1, l2) = (mid + spread, mid - spread);
            l1 * l2 - params.k * (l1 + l2).powi(2)
        })
        .collect();
    let lib = harris_response(img, params).unwrap();
    let peak = oracle.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    lib.data()
        .iter()
        .zip(&oracle)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max)
        / peak
}

fn big(v: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Weighted Gini impurity `sum_side n_side (1 - sum_c p_c^2)` of the split
/// sending `x <= threshold` left.
pub fn gini_of_partition(values: &[f64], labels: &[usize], threshold: f64) -> BigRational {
    let classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut sides = [vec![0usize; classes], vec![0usize; classes]];
    for (&v, &l) in values.iter().zip(labels) {
        sides[usize::from(v > threshold)][l] += 1;
    }
    sides
        .iter()
        .filter(|counts| counts.iter().sum::<usize>() > 0)
        .map(|counts| {
            let n: usize = counts.iter().sum();
            let squares: usize = counts.iter().map(|c| c * c).sum();
            big(n) - big(squares) / big(n)
        })
        .sum()
}

/// Smallest weighted Gini over every cut between distinct values, or
/// `None` when all values coincide.
pub fn gini_oracle(values: &[f64], labels: &[usize]) -> Option<BigRational> {
    let mut distinct = values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    distinct[..distinct.len().saturating_sub(1)]
        .iter()
        .map(|&cut| gini_of_partition(values, labels, cut))
        .min()
}

/// A 1D dataset of 1 to 20 points; values often repeat.
pub fn random_split_problem(rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<usize>) {
    let n = rng.gen_range(1..=20);
    let classes = rng.gen_range(1..=4);
    let coarse = rng.gen_bool(0.5);
    let values = (0..n)
        .map(|_| {
            if coarse {
                rng.gen_range(0..6) as f64 * 0.5
            } else {
                rng.gen_range(-10.0..10.0)
            }
        })
        .collect();
    let labels = (0..n).map(|_| rng.gen_range(0..classes)).collect();
    (values, labels)
}

/// Problems (out of `count`) where the library split is not a global
/// Gini minimum, reports the wrong impurity, or disagrees on whether a
/// split exists.
pub fn gini_mismatches(count: usize, seed: u64) -> usize {
    let mut rng = rng(seed);
    (0..count)
        .filter(|_| {
            let (values, labels) = random_split_problem(&mut rng);
            match (
                best_split_1d(&values, &labels),
                gini_oracle(&values, &labels),
            ) {
                (None, None) => false,
                (Some((threshold, impurity)), Some(best)) => {
                    let chosen = gini_of_partition(&values, &labels, threshold);
                    let best_f64 = num_traits::ToPrimitive::to_f64(&best).unwrap();
                    chosen != best || (impurity - best_f64).abs() > 1e-12
                }
                _ => true,
            }
        })
        .count()
}

/// Noise-free XOR of the two coordinate half-planes on `n` random points.
pub fn xor_set(n: usize, seed: u64) -> LabeledSet<f64> {
    let mut rng = rng(seed);
    let mut rows = Vec::with_capacity(n);
    let mut names = Vec::with_capacity(n);
    for _ in 0..n {
        let (x, y): (f64, f64) = (rng.gen(), rng.gen());
        names.push(if (x > 0.5) != (y > 0.5) {
            "one"
        } else {
            "zero"
        });
        rows.push(vec![x, y]);
    }
    LabeledSet::from_names(rows, &names).unwrap()
}

pub fn xor_training_accuracy(seed: u64) -> f64 {
    let data = xor_set(400, seed);
    let params = ForestParams {
        num_trees: 10,
        mtry: 2,
        seed,
    };
    let model = train_forest(&data, params).unwrap();
    let correct = data
        .rows()
        .iter()
        .zip(data.labels())
        .filter(|(x, &l)| shapekit::learn::predict_proba(&model, x).unwrap().argmax() == l)
        .count();
    correct as f64 / data.len() as f64
}

/// Serialized forest trained on a fixed random dataset.
pub fn forest_bytes(seed: u64) -> Vec<u8> {
    let mut rng = rng(99);
    let mut rows = Vec::new();
    let mut names = Vec::new();
    for i in 0..120 {
        let class = i % 3;
        rows.push(
            (0..8)
                .map(|d| rng.gen_range(-1.0..1.0) + (class * d % 3) as f64)
                .collect(),
        );
        names.push(["a", "b", "c"][class]);
    }
    let data = LabeledSet::from_names(rows, &names).unwrap();
    let model = train_forest(
        &data,
        ForestParams {
            num_trees: 10,
            mtry: 3,
            seed,
        },
    )
    .unwrap();
    let mut out = Vec::new();
    write_forest(&mut out, &model, &[]).unwrap();
    out
}
