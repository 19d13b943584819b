use std::f64::consts::{PI, TAU};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, ShapeError};
use crate::imgproc::Image;
use crate::scalar::Scalar;

/// Names accepted by [`shape_vertices`].
pub const SHAPE_NAMES: [&str; 13] = [
    "arrow",
    "chevron",
    "cross",
    "disk",
    "ellipse",
    "hexagon",
    "kite",
    "lshape",
    "rectangle",
    "square",
    "star",
    "triangle",
    "tshape",
];

/// Ten cornered polygons, the default shape set for invariance runs.
pub const POLYGON_SET: [&str; 10] = [
    "arrow",
    "chevron",
    "cross",
    "hexagon",
    "kite",
    "lshape",
    "rectangle",
    "star",
    "triangle",
    "tshape",
];

fn regular(n: usize, radius: f64, phase: f64) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let a = phase + TAU * i as f64 / n as f64;
            (radius * a.cos(), radius * a.sin())
        })
        .collect()
}

/// Outline of a named shape in unit coordinates, roughly centred on the
/// origin with extent about 1.
pub fn shape_vertices(name: &str) -> Result<Vec<(f64, f64)>> {
    let v = match name {
        "arrow" => vec![
            (-1.0, -0.25),
            (0.1, -0.25),
            (0.1, -0.7),
            (1.0, 0.0),
            (0.1, 0.7),
            (0.1, 0.25),
            (-1.0, 0.25),
        ],
        "chevron" => vec![
            (-1.0, -0.7),
            (0.0, 0.1),
            (1.0, -0.7),
            (1.0, 0.0),
            (0.0, 0.8),
            (-1.0, 0.0),
        ],
        "cross" => vec![
            (-0.2, -1.0),
            (0.2, -1.0),
            (0.2, -0.2),
            (1.0, -0.2),
            (1.0, 0.2),
            (0.2, 0.2),
            (0.2, 1.0),
            (-0.2, 1.0),
            (-0.2, 0.2),
            (-1.0, 0.2),
            (-1.0, -0.2),
            (-0.2, -0.2),
        ],
        "disk" => regular(96, 0.9, 0.0),
        "ellipse" => regular(96, 1.0, 0.0)
            .into_iter()
            .map(|(x, y)| (x, 0.5 * y))
            .collect(),
        "hexagon" => regular(6, 0.9, 0.0),
        "kite" => vec![(0.0, -1.0), (0.6, -0.3), (0.0, 1.0), (-0.6, -0.3)],
        "lshape" => vec![
            (-0.6, -1.0),
            (-0.1, -1.0),
            (-0.1, 0.5),
            (0.8, 0.5),
            (0.8, 1.0),
            (-0.6, 1.0),
        ],
        "rectangle" => vec![(-1.0, -0.5), (1.0, -0.5), (1.0, 0.5), (-1.0, 0.5)],
        "square" => regular(4, 1.0, PI / 4.0),
        "star" => (0..10)
            .map(|i| {
                let r = if i % 2 == 0 { 1.0 } else { 0.42 };
                let a = -PI / 2.0 + PI * i as f64 / 5.0;
                (r * a.cos(), r * a.sin())
            })
            .collect(),
        "triangle" => regular(3, 1.0, -PI / 2.0),
        "tshape" => vec![
            (-1.0, -1.0),
            (1.0, -1.0),
            (1.0, -0.55),
            (0.25, -0.55),
            (0.25, 1.0),
            (-0.25, 1.0),
            (-0.25, -0.55),
            (-1.0, -0.55),
        ],
        other => {
            return Err(ShapeError::InvalidParams(format!(
                "unknown synthetic shape {other:?}"
            )))
        }
    };
    Ok(v)
}

/// Placement of a unit outline on a square canvas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    pub size: usize,
    /// Pixels per unit.
    pub radius: f64,
    pub rotation: f64,
    pub offset: (f64, f64),
}

impl Placement {
    pub fn centred(size: usize) -> Self {
        Self {
            size,
            radius: size as f64 * 0.32,
            rotation: 0.0,
            offset: (0.0, 0.0),
        }
    }
}

/// Fills the polygon (even-odd rule, sampled at pixel centres) with 1 on a
/// background of 0.
pub fn render_polygon<T: Scalar>(verts: &[(f64, f64)], at: Placement) -> Image<T> {
    let (s, c) = at.rotation.sin_cos();
    let mid = (at.size as f64 - 1.0) / 2.0;
    let pts: Vec<(f64, f64)> = verts
        .iter()
        .map(|&(x, y)| {
            let (x, y) = (x * at.radius, y * at.radius);
            (
                c * x - s * y + mid + at.offset.0,
                s * x + c * y + mid + at.offset.1,
            )
        })
        .collect();
    Image::from_fn(at.size, at.size, |x, y| {
        let (px, py) = (x as f64, y as f64);
        let mut inside = false;
        for i in 0..pts.len() {
            let (ax, ay) = pts[i];
            let (bx, by) = pts[(i + 1) % pts.len()];
            if (ay > py) != (by > py) && px < ax + (py - ay) * (bx - ax) / (by - ay) {
                inside = !inside;
            }
        }
        if inside {
            T::one()
        } else {
            T::zero()
        }
    })
}

/// One image per name at a fixed centred placement.
pub fn synthetic_shapes<T: Scalar>(names: &[&str], size: usize) -> Result<Vec<Image<T>>> {
    names
        .iter()
        .map(|n| {
            Ok(render_polygon(
                &shape_vertices(n)?,
                Placement::centred(size),
            ))
        })
        .collect()
}

/// Writes `per_class` PNG variants `<name>-<i>.png` of each named shape,
/// each with a random rotation, a scale in `[0.8, 1.1]`, an offset of up
/// to 4 pixels and vertex jitter of up to 3% of the radius.
pub fn write_synthetic_dataset(
    dir: &Path,
    names: &[&str],
    per_class: usize,
    size: usize,
    seed: u64,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for name in names {
        let base = shape_vertices(name)?;
        for i in 1..=per_class {
            let verts: Vec<(f64, f64)> = base
                .iter()
                .map(|&(x, y)| {
                    (
                        x + rng.gen_range(-0.03..0.03),
                        y + rng.gen_range(-0.03..0.03),
                    )
                })
                .collect();
            let at = Placement {
                size,
                radius: size as f64 * 0.3 * rng.gen_range(0.8..1.1),
                rotation: rng.gen_range(0.0..TAU),
                offset: (rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)),
            };
            let img: Image<f64> = render_polygon(&verts, at);
            let pixels: Vec<u8> = img
                .data()
                .iter()
                .map(|&v| (v * 255.0).round() as u8)
                .collect();
            let path = dir.join(format!("{name}-{i}.png"));
            image::GrayImage::from_raw(size as u32, size as u32, pixels)
                .expect("buffer matches dimensions")
                .save(&path)
                .map_err(|source| ShapeError::Decode { path, source })?;
        }
    }
    Ok(())
}
