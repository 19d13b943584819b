use crate::error::{Result, ShapeError};
use crate::imgproc::BinaryImage;
use crate::scalar::Scalar;

use super::wrap_angle;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Self) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Mean of a non-empty point list.
    pub fn mean(points: &[Self]) -> Option<Self> {
        if points.is_empty() {
            return None;
        }
        let n = T::from_usize_lossy(points.len());
        let sx: T = points.iter().map(|p| p.x).sum();
        let sy: T = points.iter().map(|p| p.y).sum();
        Some(Self::new(sx / n, sy / n))
    }
}

/// Polar coordinates relative to a centroid, `theta` in `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint<T> {
    pub r: T,
    pub theta: T,
}

impl<T: Scalar> PolarPoint<T> {
    pub fn of(p: Point<T>, centre: Point<T>) -> Self {
        let (dx, dy) = (p.x - centre.x, p.y - centre.y);
        Self {
            r: (dx * dx + dy * dy).sqrt(),
            theta: wrap_angle(dy.atan2(dx)),
        }
    }
}

/// Ordered closed boundary with the centroid its polar coordinates refer to.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour<T> {
    pub points: Vec<Point<T>>,
    pub centroid: Point<T>,
}

impl<T: Scalar> Contour<T> {
    pub fn new(points: Vec<Point<T>>, centroid: Point<T>) -> Self {
        Self { points, centroid }
    }

    /// Contour whose centroid is the mean of its vertices.
    pub fn from_points(points: Vec<Point<T>>) -> Result<Self> {
        let centroid = Point::mean(&points).ok_or(ShapeError::DegenerateContour(0))?;
        Ok(Self { points, centroid })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn translated(&self, dx: T, dy: T) -> Self {
        let shift = |p: &Point<T>| Point::new(p.x + dx, p.y + dy);
        Self {
            points: self.points.iter().map(shift).collect(),
            centroid: shift(&self.centroid),
        }
    }

    /// Scales every coordinate about the origin.
    pub fn scaled(&self, factor: T) -> Self {
        let scale = |p: &Point<T>| Point::new(p.x * factor, p.y * factor);
        Self {
            points: self.points.iter().map(scale).collect(),
            centroid: scale(&self.centroid),
        }
    }

    /// Circular moving average of the points over `2 radius + 1`
    /// neighbours; the centroid is kept. Contours shorter than the window
    /// are returned unchanged.
    pub fn smoothed(&self, radius: usize) -> Self {
        let n = self.points.len();
        if radius == 0 || n < 2 * radius + 1 {
            return self.clone();
        }
        let width = T::from_usize_lossy(2 * radius + 1);
        let points = (0..n)
            .map(|i| {
                let (mut sx, mut sy) = (T::zero(), T::zero());
                for k in 0..=2 * radius {
                    let p = self.points[(i + n + k - radius) % n];
                    sx += p.x;
                    sy += p.y;
                }
                Point::new(sx / width, sy / width)
            })
            .collect();
        Self {
            points,
            centroid: self.centroid,
        }
    }

    /// Rotates the points about the centroid.
    pub fn rotated(&self, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let o = self.centroid;
        Self {
            points: self
                .points
                .iter()
                .map(|p| {
                    let (dx, dy) = (p.x - o.x, p.y - o.y);
                    Point::new(o.x + c * dx - s * dy, o.y + s * dx + c * dy)
                })
                .collect(),
            centroid: o,
        }
    }
}

pub fn to_polar<T: Scalar>(contour: &Contour<T>) -> Vec<PolarPoint<T>> {
    contour
        .points
        .iter()
        .map(|&p| PolarPoint::of(p, contour.centroid))
        .collect()
}

/// Clockwise (on screen, y down) Moore neighbourhood starting west.
const MOORE: [(i64, i64); 8] = [
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
];

fn moore_index(dx: i64, dy: i64) -> usize {
    MOORE
        .iter()
        .position(|&d| d == (dx, dy))
        .expect("offset is a Moore neighbour")
}

/// Next boundary pixel clockwise from the backtrack direction, with the new
/// backtrack direction relative to that pixel.
fn moore_step(mask: &BinaryImage, cur: (i64, i64), back: usize) -> Option<((i64, i64), usize)> {
    for i in 1..=8 {
        let d = (back + i) % 8;
        let p = (cur.0 + MOORE[d].0, cur.1 + MOORE[d].1);
        if mask.get_signed(p.0, p.1) {
            let prev = MOORE[(d + 7) % 8];
            let bp = (cur.0 + prev.0, cur.1 + prev.1);
            return Some((p, moore_index(bp.0 - p.0, bp.1 - p.1)));
        }
    }
    None
}

/// Moore-neighbour trace of the outer boundary of the largest 8-connected
/// foreground component, starting at its first pixel in raster order.
///
/// The centroid is the mean of all pixels of that component. Tracing stops
/// when the first move out of the start pixel would be repeated.
pub fn trace_boundary<T: Scalar>(mask: &BinaryImage) -> Result<Contour<T>> {
    let comp = mask.largest_component().ok_or(ShapeError::EmptyMask)?;
    let w = comp.width();
    let (mut sx, mut sy, mut n) = (T::zero(), T::zero(), 0usize);
    let mut start = None;
    for (i, _) in comp.mask().iter().enumerate().filter(|(_, &m)| m) {
        let (x, y) = (i % w, i / w);
        start.get_or_insert((x as i64, y as i64));
        sx += T::from_usize_lossy(x);
        sy += T::from_usize_lossy(y);
        n += 1;
    }
    let start = start.ok_or(ShapeError::EmptyMask)?;
    let nf = T::from_usize_lossy(n);
    let centroid = Point::new(sx / nf, sy / nf);
    let to_point = |p: (i64, i64)| Point::new(T::from_i64(p.0).unwrap(), T::from_i64(p.1).unwrap());

    let mut points = vec![to_point(start)];
    // west of the first raster pixel is background
    let Some((first, first_back)) = moore_step(&comp, start, 0) else {
        return Ok(Contour::new(points, centroid));
    };
    let (mut cur, mut back) = (first, first_back);
    let limit = 4 * n + 8;
    while points.len() <= limit {
        let (next, next_back) =
            moore_step(&comp, cur, back).expect("component pixel has a neighbour");
        if cur == start && next == first {
            break;
        }
        points.push(to_point(cur));
        cur = next;
        back = next_back;
    }
    Ok(Contour::new(points, centroid))
}
