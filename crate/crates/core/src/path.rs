//! Time-parametrized curves in the base and total space.

use crate::bundle::Config;
use crate::error::{Error, Result};
use crate::geometry::Vec2;

/// States that can be stored in a [`SampledPath`].
pub trait PathState: Copy {
    fn lerp(&self, other: &Self, s: f64) -> Self;
    fn is_finite(&self) -> bool;
}

impl PathState for Vec2 {
    fn lerp(&self, other: &Self, s: f64) -> Self {
        Vec2::lerp(*self, *other, s)
    }

    fn is_finite(&self) -> bool {
        Vec2::is_finite(*self)
    }
}

impl PathState for Config {
    fn lerp(&self, other: &Self, s: f64) -> Self {
        Config::new(self.cm.lerp(other.cm, s), self.cn.lerp(other.cn, s))
    }

    fn is_finite(&self) -> bool {
        Config::is_finite(self)
    }
}

/// A curve in the base `B = ℝ²` with a velocity rule.
///
/// Lifting integrates against `velocity`; implementations with an analytic
/// derivative should supply it instead of relying on finite differences.
pub trait BaseCurve: Send + Sync {
    fn domain(&self) -> (f64, f64);
    fn position(&self, t: f64) -> Vec2;
    fn velocity(&self, t: f64) -> Vec2;
}

impl<C: BaseCurve + ?Sized> BaseCurve for &C {
    fn domain(&self) -> (f64, f64) {
        (**self).domain()
    }
    fn position(&self, t: f64) -> Vec2 {
        (**self).position(t)
    }
    fn velocity(&self, t: f64) -> Vec2 {
        (**self).velocity(t)
    }
}

/// Samples on a strictly increasing time grid, linearly interpolated.
///
/// Grids built with [`SampledPath::uniform`] are uniform; a lift that stops at
/// a collision appends one extra sample at the collision time.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath<S> {
    times: Vec<f64>,
    points: Vec<S>,
}

impl<S: PathState> SampledPath<S> {
    pub fn uniform(t0: f64, t1: f64, points: Vec<S>) -> Result<Self> {
        let n = points.len();
        if n < 2 {
            return Err(Error::InvalidPath("need at least two samples".into()));
        }
        if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
            return Err(Error::InvalidPath(format!("bad time interval [{t0}, {t1}]")));
        }
        let times = uniform_grid(t0, t1, n - 1);
        Self::from_parts(times, points)
    }

    pub fn from_parts(times: Vec<f64>, points: Vec<S>) -> Result<Self> {
        if times.len() != points.len() {
            return Err(Error::InvalidPath("times and points differ in length".into()));
        }
        if times.len() < 2 {
            return Err(Error::InvalidPath("need at least two samples".into()));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPath("grid must be finite and strictly increasing".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidPath("non-finite sample".into()));
        }
        Ok(Self { times, points })
    }

    /// Samples `f` on a uniform grid of `segments + 1` nodes.
    pub fn sample(t0: f64, t1: f64, segments: usize, f: impl Fn(f64) -> S) -> Result<Self> {
        let points = uniform_grid(t0, t1, segments.max(1)).into_iter().map(f).collect();
        Self::uniform(t0, t1, points)
    }

    pub fn t0(&self) -> f64 {
        self.times[0]
    }

    pub fn t1(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn points(&self) -> &[S] {
        &self.points
    }

    pub fn first(&self) -> &S {
        &self.points[0]
    }

    pub fn last(&self) -> &S {
        self.points.last().unwrap()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &S)> {
        self.times.iter().copied().zip(self.points.iter())
    }

    /// Interpolated state; clamps outside the domain and returns node values
    /// exactly when `t` hits a node.
    pub fn at(&self, t: f64) -> S {
        let (i, s) = self.locate(t);
        if s == 0.0 {
            self.points[i]
        } else {
            self.points[i].lerp(&self.points[i + 1], s)
        }
    }

    /// Segment index and fractional position within it.
    fn locate(&self, t: f64) -> (usize, f64) {
        let n = self.times.len();
        if !(t > self.times[0]) {
            return (0, 0.0);
        }
        if t >= self.times[n - 1] {
            return (n - 1, 0.0);
        }
        match self.times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => (i, 0.0),
            Err(j) => {
                let i = j - 1;
                (i, (t - self.times[i]) / (self.times[i + 1] - self.times[i]))
            }
        }
    }

    pub fn map<T: PathState>(&self, f: impl Fn(&S) -> T) -> SampledPath<T> {
        SampledPath {
            times: self.times.clone(),
            points: self.points.iter().map(f).collect(),
        }
    }

    pub fn reversed(&self) -> Self {
        let t0 = self.t0();
        let t1 = self.t1();
        SampledPath {
            times: self.times.iter().rev().map(|t| t0 + t1 - t).collect(),
            points: self.points.iter().rev().copied().collect(),
        }
    }
}

impl SampledPath<Vec2> {
    /// Central difference at interior nodes, one-sided at the ends.
    pub fn node_velocity(&self, k: usize) -> Vec2 {
        let n = self.len();
        let (a, b) = match k {
            0 => (0, 1),
            k if k + 1 >= n => (n - 2, n - 1),
            k => (k - 1, k + 1),
        };
        (self.points[b] - self.points[a]) * (1.0 / (self.times[b] - self.times[a]))
    }
}

impl BaseCurve for SampledPath<Vec2> {
    fn domain(&self) -> (f64, f64) {
        (self.t0(), self.t1())
    }

    fn position(&self, t: f64) -> Vec2 {
        self.at(t)
    }

    fn velocity(&self, t: f64) -> Vec2 {
        let (i, s) = self.locate(t);
        if s == 0.0 {
            self.node_velocity(i)
        } else {
            self.node_velocity(i).lerp(self.node_velocity(i + 1), s)
        }
    }
}

/// `segments + 1` nodes from `t0` to exactly `t1`.
pub fn uniform_grid(t0: f64, t1: f64, segments: usize) -> Vec<f64> {
    let h = (t1 - t0) / segments as f64;
    (0..=segments)
        .map(|k| if k == segments { t1 } else { t0 + k as f64 * h })
        .collect()
}
