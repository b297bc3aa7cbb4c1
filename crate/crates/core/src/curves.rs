//! Analytic obstacle motions implementing [`BaseCurve`].

use crate::error::{Error, Result};
use crate::geometry::{rot90, Vec2};
use crate::path::BaseCurve;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stationary {
    pub at: Vec2,
    pub t0: f64,
    pub t1: f64,
}

impl Stationary {
    pub fn new(at: Vec2, t0: f64, t1: f64) -> Self {
        Self { at, t0, t1 }
    }
}

impl BaseCurve for Stationary {
    fn domain(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }
    fn position(&self, _t: f64) -> Vec2 {
        self.at
    }
    fn velocity(&self, _t: f64) -> Vec2 {
        Vec2::ZERO
    }
}

/// Constant-velocity motion; extrapolates linearly outside the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linear {
    pub start: Vec2,
    pub velocity: Vec2,
    pub t0: f64,
    pub t1: f64,
}

impl BaseCurve for Linear {
    fn domain(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }
    fn position(&self, t: f64) -> Vec2 {
        self.start + self.velocity * (t - self.t0)
    }
    fn velocity(&self, _t: f64) -> Vec2 {
        self.velocity
    }
}

/// Uniform circular motion `center + r·(cos(ωt+φ), sin(ωt+φ))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Vec2,
    pub radius: f64,
    pub omega: f64,
    pub phase: f64,
    pub t0: f64,
    pub t1: f64,
}

impl BaseCurve for Circle {
    fn domain(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }
    fn position(&self, t: f64) -> Vec2 {
        self.center + Vec2::from_polar(self.radius, self.omega * t + self.phase)
    }
    fn velocity(&self, t: f64) -> Vec2 {
        rot90(Vec2::from_polar(self.radius, self.omega * t + self.phase)) * self.omega
    }
}

/// Natural cubic spline through `(knot_i, point_i)`.
///
/// Evaluation clamps the parameter to the knot range.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    knots: Vec<f64>,
    points: Vec<Vec2>,
    /// Second derivatives at the knots.
    second: Vec<Vec2>,
}

impl CubicSpline {
    pub fn natural(knots: Vec<f64>, points: Vec<Vec2>) -> Result<Self> {
        let n = knots.len();
        if n < 2 || points.len() != n {
            return Err(Error::InvalidPath("spline needs at least two matching knots and points".into()));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) || knots.iter().any(|k| !k.is_finite()) {
            return Err(Error::InvalidPath("spline knots must be strictly increasing".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidPath("non-finite waypoint".into()));
        }
        let mut second = vec![Vec2::ZERO; n];
        if n > 2 {
            // Thomas algorithm on the interior equations; natural ends M_0 = M_{n-1} = 0.
            let m = n - 2;
            let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
            let mut diag = vec![0.0; m];
            let mut rhs = vec![Vec2::ZERO; m];
            let mut upper = vec![0.0; m];
            for i in 0..m {
                let (h0, h1) = (h[i], h[i + 1]);
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = ((points[i + 2] - points[i + 1]) * (1.0 / h1)
                    - (points[i + 1] - points[i]) * (1.0 / h0))
                    * 6.0;
            }
            for i in 1..m {
                let w = h[i] / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] = rhs[i] - rhs[i - 1] * w;
            }
            second[m] = rhs[m - 1] * (1.0 / diag[m - 1]);
            for i in (0..m - 1).rev() {
                second[i + 1] = (rhs[i] - second[i + 2] * upper[i]) * (1.0 / diag[i]);
            }
        }
        Ok(Self {
            knots,
            points,
            second,
        })
    }

    /// Spline through `points` at uniformly spaced times on `[t0, t1]`.
    pub fn through(points: Vec<Vec2>, t0: f64, t1: f64) -> Result<Self> {
        let n = points.len();
        if n < 2 {
            return Err(Error::InvalidPath("spline needs at least two points".into()));
        }
        let knots = crate::path::uniform_grid(t0, t1, n - 1);
        Self::natural(knots, points)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    fn segment(&self, u: f64) -> (usize, f64) {
        let n = self.knots.len();
        let u = u.clamp(self.knots[0], self.knots[n - 1]);
        let i = match self.knots.binary_search_by(|k| k.partial_cmp(&u).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(j) => j - 1,
        };
        (i, u)
    }

    pub fn eval(&self, u: f64) -> Vec2 {
        let (i, u) = self.segment(u);
        let h = self.knots[i + 1] - self.knots[i];
        let a = (self.knots[i + 1] - u) / h;
        let b = (u - self.knots[i]) / h;
        self.points[i] * a
            + self.points[i + 1] * b
            + (self.second[i] * (a * a * a - a) + self.second[i + 1] * (b * b * b - b)) * (h * h / 6.0)
    }

    pub fn derivative(&self, u: f64) -> Vec2 {
        let (i, u) = self.segment(u);
        let h = self.knots[i + 1] - self.knots[i];
        let a = (self.knots[i + 1] - u) / h;
        let b = (u - self.knots[i]) / h;
        (self.points[i + 1] - self.points[i]) * (1.0 / h)
            + (self.second[i + 1] * (3.0 * b * b - 1.0) - self.second[i] * (3.0 * a * a - 1.0)) * (h / 6.0)
    }
}

impl BaseCurve for CubicSpline {
    fn domain(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }
    fn position(&self, t: f64) -> Vec2 {
        self.eval(t)
    }
    fn velocity(&self, t: f64) -> Vec2 {
        let (t0, t1) = self.domain();
        if t < t0 || t > t1 {
            return Vec2::ZERO;
        }
        self.derivative(t)
    }
}

const GAUSS_5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_08),
    (0.906_179_845_938_664, 0.236_926_885_056_189_08),
];

/// A waypoint spline traversed at constant speed, then parked at its end.
///
/// The spline is parametrized by cumulative chord length; the time law is the
/// inverse of its numerically integrated arc length.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantSpeedSpline {
    spline: CubicSpline,
    speed: f64,
    duration: f64,
    /// Parameter at each quadrature cell boundary (`CELLS` per spline segment).
    cells: Vec<f64>,
    /// Arc length at each cell boundary.
    arc: Vec<f64>,
}

const CELLS: usize = 16;

impl ConstantSpeedSpline {
    pub fn new(waypoints: Vec<Vec2>, speed: f64, duration: f64) -> Result<Self> {
        if !(speed > 0.0 && speed.is_finite()) {
            return Err(Error::InvalidParameters(format!("speed must be positive, got {speed}")));
        }
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::InvalidParameters(format!("duration must be positive, got {duration}")));
        }
        let mut knots = Vec::with_capacity(waypoints.len());
        let mut acc = 0.0;
        for (i, w) in waypoints.iter().enumerate() {
            if i > 0 {
                acc += (*w - waypoints[i - 1]).norm();
            }
            knots.push(acc);
        }
        let spline = CubicSpline::natural(knots, waypoints)?;
        let mut cells = vec![spline.knots[0]];
        let mut arc = vec![0.0];
        for w in spline.knots.windows(2) {
            let h = (w[1] - w[0]) / CELLS as f64;
            for k in 1..=CELLS {
                let hi = if k == CELLS { w[1] } else { w[0] + k as f64 * h };
                let lo = *cells.last().unwrap();
                arc.push(arc.last().unwrap() + Self::gauss_arc(&spline, lo, hi));
                cells.push(hi);
            }
        }
        let length = *arc.last().unwrap();
        if !(length.is_finite() && arc.iter().all(|a| a.is_finite())) {
            return Err(Error::InvalidPath("spline arc length is not finite".into()));
        }
        Ok(Self {
            spline,
            speed,
            duration,
            cells,
            arc,
        })
    }

    /// Five-point Gauss–Legendre arc length over `[a, b]`.
    fn gauss_arc(spline: &CubicSpline, a: f64, b: f64) -> f64 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        GAUSS_5
            .iter()
            .map(|(x, w)| w * spline.derivative(mid + half * x).norm())
            .sum::<f64>()
            * half
    }

    pub fn length(&self) -> f64 {
        *self.arc.last().unwrap()
    }

    /// Spline parameter at arc length `s`.
    fn parameter_at(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, self.length());
        let i = match self.arc.binary_search_by(|a| a.partial_cmp(&s).unwrap()) {
            Ok(i) => return self.cells[i],
            Err(j) => j - 1,
        };
        let (lo, hi) = (self.cells[i], self.cells[i + 1]);
        let target = s - self.arc[i];
        let mut a = lo;
        let mut b = hi;
        let mut u = lo + (hi - lo) * target / (self.arc[i + 1] - self.arc[i]);
        for _ in 0..100 {
            let f = Self::gauss_arc(&self.spline, lo, u) - target;
            if f.abs() <= 1e-14 * (1.0 + target) {
                break;
            }
            if f > 0.0 {
                b = u;
            } else {
                a = u;
            }
            let d = self.spline.derivative(u).norm();
            let next = u - f / d;
            u = if d > 0.0 && next > a && next < b { next } else { 0.5 * (a + b) };
            if b - a <= 1e-15 * (1.0 + b.abs()) {
                break;
            }
        }
        u
    }
}

impl BaseCurve for ConstantSpeedSpline {
    fn domain(&self) -> (f64, f64) {
        (0.0, self.duration)
    }

    fn position(&self, t: f64) -> Vec2 {
        self.spline.eval(self.parameter_at(self.speed * t))
    }

    fn velocity(&self, t: f64) -> Vec2 {
        let s = self.speed * t;
        if s >= self.length() || t < 0.0 {
            return Vec2::ZERO;
        }
        self.spline
            .derivative(self.parameter_at(s))
            .normalized()
            .map(|d| d * self.speed)
            .unwrap_or(Vec2::ZERO)
    }
}
