//! Parametrized motion planning in the two-disk fiber and its extensions to
//! a moving environment.
//!
//! [`fiber_plan`] is the section: for two configurations over the same
//! obstacle position it returns the shortest ego path avoiding the open
//! contact disk. [`extended_plan`] composes it with a lifting function when
//! the obstacle motion is known in advance, and [`moving_target_plan`] steers
//! towards a target that itself moves along a known path.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::bundle::{Config, CONTACT_DISTANCE};
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::lifting::{integrate_on_grid, lift_endpoint, lift_grid, ReactionMechanism};
use crate::path::{BaseCurve, SampledPath};

const FIBER_TOL: f64 = 1e-9;
const TIE_TOL: f64 = 1e-9;

/// Domain of continuity the planner used for a pair of configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Piece {
    Straight,
    DetourCcw,
    DetourCw,
    /// Both detours have equal length; the counter-clockwise one is taken.
    Degenerate,
}

impl Piece {
    pub const ALL: [Piece; 4] = [Piece::Straight, Piece::DetourCcw, Piece::DetourCw, Piece::Degenerate];

    pub fn as_str(&self) -> &'static str {
        match self {
            Piece::Straight => "straight",
            Piece::DetourCcw => "detour_ccw",
            Piece::DetourCw => "detour_cw",
            Piece::Degenerate => "degenerate",
        }
    }
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Piece {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Piece::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown piece {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Route {
    Segment,
    Detour {
        depart: Vec2,
        depart_angle: f64,
        /// Signed; positive is counter-clockwise.
        sweep: f64,
        arrive: Vec2,
        lead: f64,
        arc: f64,
    },
}

/// A path inside one fiber, traversed at constant speed over `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberPlan {
    pub center: Vec2,
    pub start: Vec2,
    pub goal: Vec2,
    pub piece: Piece,
    pub length: f64,
    route: Route,
}

impl FiberPlan {
    /// Ego position at normalized time `s`; exactly `start` at 0 and `goal` at 1.
    pub fn point_at(&self, s: f64) -> Vec2 {
        if !(s > 0.0) {
            return self.start;
        }
        if s >= 1.0 {
            return self.goal;
        }
        let d = s * self.length;
        match self.route {
            Route::Segment => self.start.lerp(self.goal, s),
            Route::Detour {
                depart,
                depart_angle,
                sweep,
                arrive,
                lead,
                arc,
            } => {
                if d < lead {
                    self.start.lerp(depart, d / lead)
                } else if d < lead + arc {
                    let frac = (d - lead) / arc;
                    self.center + Vec2::from_polar(CONTACT_DISTANCE, depart_angle + sweep * frac)
                } else {
                    let tail = self.length - lead - arc;
                    if tail <= 0.0 {
                        arrive
                    } else {
                        arrive.lerp(self.goal, ((d - lead - arc) / tail).min(1.0))
                    }
                }
            }
        }
    }

    pub fn config_at(&self, s: f64) -> Config {
        Config::new(self.point_at(s), self.center)
    }

    /// The plan sampled on `segments + 1` uniform nodes of `[0, 1]`.
    pub fn path(&self, segments: usize) -> SampledPath<Config> {
        SampledPath::sample(0.0, 1.0, segments, |s| self.config_at(s)).expect("unit interval is a valid domain")
    }
}

/// Shortest ego path from `e` to `e_prime` avoiding the open contact disk
/// around their common obstacle position.
pub fn fiber_plan(e: &Config, e_prime: &Config) -> Result<FiberPlan> {
    let offset = (e.cn - e_prime.cn).norm();
    if !(offset <= FIBER_TOL) {
        return Err(Error::FiberMismatch { offset });
    }
    e.check_admissible()?;
    e_prime.check_admissible()?;
    let center = e.cn;
    let (start, goal) = (e.cm, e_prime.cm);
    let straight = Ok(FiberPlan {
        center,
        start,
        goal,
        piece: Piece::Straight,
        length: (goal - start).norm(),
        route: Route::Segment,
    });
    if segment_clearance(start, goal, center) >= CONTACT_DISTANCE * (1.0 - 1e-12) {
        return straight;
    }

    let (p, q) = (start - center, goal - center);
    let (dp, dq) = (p.norm().max(CONTACT_DISTANCE), q.norm().max(CONTACT_DISTANCE));
    let (tp, tq) = (tangent_length(dp), tangent_length(dq));
    let (delta_p, delta_q) = ((CONTACT_DISTANCE / dp).acos(), (CONTACT_DISTANCE / dq).acos());
    let (ap, aq) = (p.angle(), q.angle());

    let ccw_depart = ap + delta_p;
    let ccw_sweep = (aq - delta_q - ccw_depart).rem_euclid(TAU);
    let cw_depart = ap - delta_p;
    let cw_sweep = (cw_depart - (aq + delta_q)).rem_euclid(TAU);
    let ccw_len = tp + tq + CONTACT_DISTANCE * ccw_sweep;
    let cw_len = tp + tq + CONTACT_DISTANCE * cw_sweep;

    let (piece, depart_angle, sweep, length) = if (ccw_len - cw_len).abs() <= TIE_TOL * ccw_len.max(1.0) {
        (Piece::Degenerate, ccw_depart, ccw_sweep, ccw_len)
    } else if ccw_len < cw_len {
        (Piece::DetourCcw, ccw_depart, ccw_sweep, ccw_len)
    } else {
        (Piece::DetourCw, cw_depart, -cw_sweep, cw_len)
    };
    if length <= 0.0 {
        return straight;
    }
    let arrive_angle = depart_angle + sweep;
    Ok(FiberPlan {
        center,
        start,
        goal,
        piece,
        length,
        route: Route::Detour {
            depart: center + Vec2::from_polar(CONTACT_DISTANCE, depart_angle),
            depart_angle,
            sweep,
            arrive: center + Vec2::from_polar(CONTACT_DISTANCE, arrive_angle),
            lead: tp,
            arc: CONTACT_DISTANCE * sweep.abs(),
        },
    })
}

fn tangent_length(d: f64) -> f64 {
    (d * d - CONTACT_DISTANCE * CONTACT_DISTANCE).max(0.0).sqrt()
}

/// Distance from `c` to the segment `[a, b]`.
fn segment_clearance(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (c - a).norm();
    }
    let s = ((c - a).dot(ab) / len2).clamp(0.0, 1.0);
    (a + ab * s - c).norm()
}

/// Monotone time change `φ` of `[0, 1]` with `φ(0) = 0`, `φ(1) = 1`.
#[derive(Clone, Default)]
pub enum Reparam {
    #[default]
    Identity,
    Smoothstep,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Reparam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reparam::Identity => f.write_str("Identity"),
            Reparam::Smoothstep => f.write_str("Smoothstep"),
            Reparam::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl Reparam {
    /// Accepts `rule` after checking the endpoints and monotonicity on a grid.
    pub fn custom(rule: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        if rule(0.0) != 0.0 || rule(1.0) != 1.0 {
            return Err(Error::InvalidParameters("reparametrization must fix 0 and 1".into()));
        }
        let samples: Vec<f64> = (0..=1000).map(|k| rule(k as f64 / 1000.0)).collect();
        if samples.iter().any(|v| !v.is_finite()) || samples.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameters("reparametrization must be monotone".into()));
        }
        Ok(Reparam::Custom(Arc::new(rule)))
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        match self {
            Reparam::Identity => t,
            Reparam::Smoothstep => t * t * (3.0 - 2.0 * t),
            Reparam::Custom(f) => f(t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanOptions {
    /// Integration step, also the spacing of the output grid.
    pub step: f64,
    /// Evaluate only every `stride`-th node of the grid (the last node is
    /// always kept).
    pub stride: usize,
}

impl Default for PlanOptions {
    fn default() -> Self {
        Self {
            step: 1e-3,
            stride: 1,
        }
    }
}

/// A lift that failed while building a composed plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanCollision {
    /// Output node whose lift stopped early.
    pub node_time: f64,
    pub collision_time: f64,
    pub state: Config,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanOutcome {
    pub times: Vec<f64>,
    pub states: Vec<Config>,
    /// Planner branch used at each output node.
    pub pieces: Vec<Piece>,
    pub collision: Option<PlanCollision>,
}

impl PlanOutcome {
    pub fn completed(&self) -> bool {
        self.collision.is_none()
    }

    pub fn path(&self) -> Result<SampledPath<Config>> {
        SampledPath::from_parts(self.times.clone(), self.states.clone())
    }

    pub fn first(&self) -> Option<&Config> {
        self.states.first()
    }

    pub fn last(&self) -> Option<&Config> {
        self.states.last()
    }
}

fn strided_nodes(len: usize, stride: usize) -> Vec<usize> {
    let stride = stride.max(1);
    let mut nodes: Vec<usize> = (0..len).step_by(stride).collect();
    if nodes.last() != Some(&(len - 1)) {
        nodes.push(len - 1);
    }
    nodes
}

/// Plan from `e` to `e_prime` while the obstacle follows `gamma`.
///
/// At node `t` the stationary plan is read at `φ(t)` and the resulting
/// configuration is carried along `gamma|[t0, t]` by the lifting function of
/// `mech`. The output starts at `e` and ends at the lift of `e_prime` along
/// the whole of `gamma`. Node lifts run in parallel; results do not depend on
/// scheduling.
pub fn extended_plan<M, C>(
    gamma: &C,
    e: &Config,
    e_prime: &Config,
    mech: &M,
    phi: &Reparam,
    opts: PlanOptions,
) -> Result<PlanOutcome>
where
    M: ReactionMechanism + ?Sized,
    C: BaseCurve + ?Sized,
{
    let plan = fiber_plan(e, e_prime)?;
    let (t0, t1) = gamma.domain();
    let offset = (gamma.position(t0) - e.cn).norm();
    if !(offset <= FIBER_TOL) {
        return Err(Error::BasePointMismatch { offset });
    }
    let grid = lift_grid((t0, t1), opts.step)?;
    let nodes = strided_nodes(grid.len(), opts.stride);
    let lifted: Vec<Result<(Config, Option<f64>)>> = nodes
        .par_iter()
        .map(|&k| {
            let tau = (grid[k] - t0) / (t1 - t0);
            let a = plan.config_at(phi.eval(tau));
            lift_endpoint(mech, &a, gamma, &grid[..=k])
        })
        .collect();

    let mut out = PlanOutcome {
        times: Vec::with_capacity(nodes.len()),
        states: Vec::with_capacity(nodes.len()),
        pieces: Vec::with_capacity(nodes.len()),
        collision: None,
    };
    for (&k, res) in nodes.iter().zip(lifted) {
        let (state, collision) = res?;
        if let Some(tc) = collision {
            out.collision = Some(PlanCollision {
                node_time: grid[k],
                collision_time: tc,
                state,
            });
            break;
        }
        out.times.push(grid[k]);
        out.states.push(state);
        out.pieces.push(plan.piece);
    }
    Ok(out)
}

/// Plan from `e` to a target moving along `nu`.
///
/// At node `t` the ego state is the lift of `e` along the obstacle motion
/// `p∘ν` up to `t`, and the output is the stationary plan from there to
/// `ν(t)`, read at normalized time `t`.
pub fn moving_target_plan<M>(e: &Config, nu: &SampledPath<Config>, mech: &M) -> Result<PlanOutcome>
where
    M: ReactionMechanism + ?Sized,
{
    let base = nu.map(|c| c.cn);
    let lift = integrate_on_grid(mech, e, &base, nu.times())?;
    let (t0, t1) = (nu.t0(), nu.t1());
    let mut out = PlanOutcome {
        times: Vec::with_capacity(nu.len()),
        states: Vec::with_capacity(nu.len()),
        pieces: Vec::with_capacity(nu.len()),
        collision: None,
    };
    let reached = if lift.completed { nu.len() } else { lift.path.len() - 1 };
    for k in 0..reached {
        let t = nu.times()[k];
        let plan = fiber_plan(&lift.path.points()[k], &nu.points()[k])?;
        out.times.push(t);
        out.states.push(plan.config_at((t - t0) / (t1 - t0)));
        out.pieces.push(plan.piece);
    }
    if let Some(tc) = lift.collision_time {
        out.collision = Some(PlanCollision {
            node_time: nu.times()[reached],
            collision_time: tc,
            state: *lift.path.last(),
        });
    }
    Ok(out)
}

/// Number of planning pairs handled by each branch of [`fiber_plan`].
pub fn continuity_pieces(pairs: &[(Config, Config)]) -> Result<BTreeMap<Piece, usize>> {
    let mut hist: BTreeMap<Piece, usize> = Piece::ALL.iter().map(|p| (*p, 0)).collect();
    for (e, e_prime) in pairs {
        *hist.entry(fiber_plan(e, e_prime)?.piece).or_default() += 1;
    }
    Ok(hist)
}
