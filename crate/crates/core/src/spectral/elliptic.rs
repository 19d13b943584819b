use crate::error::{Result, ShapeError};
use crate::geometry::{Contour, Point};
use crate::scalar::Scalar;

/// Elliptic Fourier coefficients of a closed polygon.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticCoeffs<T> {
    /// `(a_n, b_n, c_n, d_n)` for `n = 1..`.
    pub harmonics: Vec<[T; 4]>,
    /// Mean point `(A0, C0)`.
    pub dc: (T, T),
}

impl<T: Scalar> EllipticCoeffs<T> {
    /// Truncated-series point at perimeter fraction `s` in `[0, 1)`,
    /// measured from the first contour point.
    pub fn point_at(&self, s: T) -> Point<T> {
        let (mut x, mut y) = self.dc;
        for (i, h) in self.harmonics.iter().enumerate() {
            let w = T::TAU() * T::from_usize_lossy(i + 1) * s;
            let (sn, cs) = w.sin_cos();
            x += h[0] * cs + h[1] * sn;
            y += h[2] * cs + h[3] * sn;
        }
        Point::new(x, y)
    }

    /// Coefficients normalized for start point, rotation and scale: the
    /// first-harmonic ellipse is phase-shifted to its major axis, rotated
    /// onto the x axis and scaled to a unit semi-major axis.
    pub fn normalized(&self) -> Result<Vec<[T; 4]>> {
        let [a1, b1, c1, d1] = self.harmonics[0];
        let two = T::lit(2.0);
        let theta =
            T::lit(0.5) * (two * (a1 * b1 + c1 * d1)).atan2(a1 * a1 + c1 * c1 - b1 * b1 - d1 * d1);
        let phased: Vec<[T; 4]> = self
            .harmonics
            .iter()
            .enumerate()
            .map(|(i, &[a, b, c, d])| {
                let (sn, cs) = (T::from_usize_lossy(i + 1) * theta).sin_cos();
                [
                    a * cs + b * sn,
                    -a * sn + b * cs,
                    c * cs + d * sn,
                    -c * sn + d * cs,
                ]
            })
            .collect();
        let [a1s, _, c1s, _] = phased[0];
        let semi_major = a1s.hypot(c1s);
        if !(semi_major > T::zero()) {
            return Err(ShapeError::ZeroReference);
        }
        let (sn, cs) = c1s.atan2(a1s).sin_cos();
        Ok(phased
            .into_iter()
            .map(|[a, b, c, d]| {
                [
                    (cs * a + sn * c) / semi_major,
                    (cs * b + sn * d) / semi_major,
                    (-sn * a + cs * c) / semi_major,
                    (-sn * b + cs * d) / semi_major,
                ]
            })
            .collect())
    }
}

/// Elliptic Fourier coefficients of the closed polygon through the contour
/// points, parameterized by arc length.
pub fn elliptic_coeffs<T: Scalar>(
    contour: &Contour<T>,
    harmonics: usize,
) -> Result<EllipticCoeffs<T>> {
    let pts = &contour.points;
    if pts.len() < 4 {
        return Err(ShapeError::DegenerateContour(pts.len()));
    }
    if harmonics == 0 {
        return Err(ShapeError::InvalidParams(
            "need at least one harmonic".into(),
        ));
    }
    // segments p[i-1] -> p[i], closing with p[n-1] -> p[0] first
    let n = pts.len();
    let mut segs = Vec::with_capacity(n);
    let mut t = T::zero();
    let (mut mean_x, mut mean_y) = (T::zero(), T::zero());
    for i in 0..n {
        let (p, q) = (pts[i], pts[(i + 1) % n]);
        let dt = p.distance(&q);
        if dt > T::zero() {
            let half = T::lit(0.5);
            mean_x += (p.x + q.x) * half * dt;
            mean_y += (p.y + q.y) * half * dt;
            segs.push((q.x - p.x, q.y - p.y, dt, t, t + dt));
        }
        t += dt;
    }
    let perimeter = t;
    if !(perimeter > T::zero()) {
        return Err(ShapeError::DegenerateContour(n));
    }
    let mut out = Vec::with_capacity(harmonics);
    for h in 1..=harmonics {
        let w = T::TAU() * T::from_usize_lossy(h) / perimeter;
        let k = perimeter / (two_pi_sq::<T>() * T::from_usize_lossy(h * h));
        let mut acc = [T::zero(); 4];
        for &(dx, dy, dt, t0, t1) in &segs {
            let (s1, c1) = (w * t1).sin_cos();
            let (s0, c0) = (w * t0).sin_cos();
            acc[0] += dx / dt * (c1 - c0);
            acc[1] += dx / dt * (s1 - s0);
            acc[2] += dy / dt * (c1 - c0);
            acc[3] += dy / dt * (s1 - s0);
        }
        out.push(acc.map(|v| v * k));
    }
    Ok(EllipticCoeffs {
        harmonics: out,
        dc: (mean_x / perimeter, mean_y / perimeter),
    })
}

fn two_pi_sq<T: Scalar>() -> T {
    T::lit(2.0) * T::PI() * T::PI()
}
