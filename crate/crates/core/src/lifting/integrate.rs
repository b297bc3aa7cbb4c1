//! Path lifting: solving `dγ̃/dt = 𝓛(γ̃, dγ/dt)`, `γ̃(t0) = e` with classical
//! fixed-step RK4.
//!
//! Only the ego center is integrated. The obstacle center of every stored
//! state is read off the base curve, so `p∘γ̃ = γ` holds exactly at the grid
//! nodes. When a step ends with the disks overlapping by more than
//! [`ADMISSIBILITY_TOL`], the step is bisected in time until the boundary
//! distance lies within [`COLLISION_BAND`] and the lift stops there.

use super::ReactionMechanism;
use crate::bundle::{boundary_distance, Config, ADMISSIBILITY_TOL};
use crate::error::{Error, Result};
use crate::path::{uniform_grid, BaseCurve, SampledPath};

/// Target accuracy of the boundary distance at a reported collision.
pub const COLLISION_BAND: f64 = 1e-9;

const BASE_POINT_TOL: f64 = 1e-9;
const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct LiftOutcome {
    /// Lifted path; ends at the collision state if one occurred.
    pub path: SampledPath<Config>,
    pub completed: bool,
    pub collision_time: Option<f64>,
}

impl LiftOutcome {
    pub fn end(&self) -> &Config {
        self.path.last()
    }
}

/// One RK4 step of the ego center from `t` to `t_next`.
pub fn rk4_step<M, C>(mech: &M, gamma: &C, e: &Config, t: f64, t_next: f64) -> Config
where
    M: ReactionMechanism + ?Sized,
    C: BaseCurve + ?Sized,
{
    let h = t_next - t;
    let half = t + 0.5 * h;
    let rhs = |cm, s: f64| mech.fiber_velocity(&Config::new(cm, gamma.position(s)), gamma.velocity(s));
    let k1 = rhs(e.cm, t);
    let k2 = rhs(e.cm + k1 * (0.5 * h), half);
    let k3 = rhs(e.cm + k2 * (0.5 * h), half);
    let k4 = rhs(e.cm + k3 * h, t_next);
    let cm = e.cm + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);
    Config::new(cm, gamma.position(t_next))
}

/// Lifts `gamma` over its whole domain starting from `e0`.
///
/// The grid has `ceil((t1 − t0)/step)` equal steps ending exactly at `t1`, so
/// the effective step never exceeds `step`.
pub fn integrate_lift<M, C>(mech: &M, e0: &Config, gamma: &C, step: f64) -> Result<LiftOutcome>
where
    M: ReactionMechanism + ?Sized,
    C: BaseCurve + ?Sized,
{
    let grid = lift_grid(gamma.domain(), step)?;
    integrate_on_grid(mech, e0, gamma, &grid)
}

/// Time grid used by [`integrate_lift`].
pub fn lift_grid((t0, t1): (f64, f64), step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParameters(format!("step must be positive, got {step}")));
    }
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(Error::InvalidPath(format!("bad time interval [{t0}, {t1}]")));
    }
    let segments = ((t1 - t0) / step - 1e-9).ceil().max(1.0) as usize;
    Ok(uniform_grid(t0, t1, segments))
}

/// Lifts along an explicit grid of at least two nodes.
pub fn integrate_on_grid<M, C>(mech: &M, e0: &Config, gamma: &C, grid: &[f64]) -> Result<LiftOutcome>
where
    M: ReactionMechanism + ?Sized,
    C: BaseCurve + ?Sized,
{
    if grid.len() < 2 {
        return Err(Error::InvalidPath("lift grid needs at least two nodes".into()));
    }
    let mut times = Vec::with_capacity(grid.len());
    let mut states = Vec::with_capacity(grid.len());
    let collision_time = run(mech, e0, gamma, grid, |t, e| {
        times.push(t);
        states.push(*e);
    })?;
    Ok(LiftOutcome {
        path: SampledPath::from_parts(times, states)?,
        completed: collision_time.is_none(),
        collision_time,
    })
}

/// Final state of the lift along `grid` (a single node is allowed), plus the
/// collision time if the lift stopped early.
pub fn lift_endpoint<M, C>(mech: &M, e0: &Config, gamma: &C, grid: &[f64]) -> Result<(Config, Option<f64>)>
where
    M: ReactionMechanism + ?Sized,
    C: BaseCurve + ?Sized,
{
    let mut last = None;
    let collision = run(mech, e0, gamma, grid, |_, e| last = Some(*e))?;
    let last = last.ok_or_else(|| Error::InvalidPath("empty lift grid".into()))?;
    Ok((last, collision))
}

fn run<M, C>(mech: &M, e0: &Config, gamma: &C, grid: &[f64], mut emit: impl FnMut(f64, &Config)) -> Result<Option<f64>>
where
    M: ReactionMechanism + ?Sized,
    C: BaseCurve + ?Sized,
{
    let Some(&t0) = grid.first() else {
        return Err(Error::InvalidPath("empty lift grid".into()));
    };
    let base0 = gamma.position(t0);
    let offset = (e0.cn - base0).norm();
    if !(offset <= BASE_POINT_TOL) {
        return Err(Error::BasePointMismatch { offset });
    }
    e0.check_admissible()?;
    let mut e = Config::new(e0.cm, base0);
    emit(t0, &e);
    for w in grid.windows(2) {
        let (t, t_next) = (w[0], w[1]);
        let next = rk4_step(mech, gamma, &e, t, t_next);
        if !next.is_finite() {
            return Err(Error::NonFiniteState { t: t_next });
        }
        if boundary_distance(&next) < -ADMISSIBILITY_TOL {
            let (tc, hit) = bisect_contact(mech, gamma, &e, t, t_next);
            emit(tc, &hit);
            return Ok(Some(tc));
        }
        e = next;
        emit(t_next, &e);
    }
    Ok(None)
}

/// Shrinks the step from `start` until the boundary distance is within the
/// collision band. The returned state never overlaps by more than the band.
fn bisect_contact<M, C>(mech: &M, gamma: &C, start: &Config, t: f64, t_next: f64) -> (f64, Config)
where
    M: ReactionMechanism + ?Sized,
    C: BaseCurve + ?Sized,
{
    let mut lo = t;
    let mut hi = t_next;
    let mut best = *start;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let e = rk4_step(mech, gamma, start, t, mid);
        let g = boundary_distance(&e);
        if g < -COLLISION_BAND {
            hi = mid;
        } else {
            lo = mid;
            best = e;
            if g <= COLLISION_BAND {
                break;
            }
        }
    }
    (lo, best)
}
