//! Reaction mechanisms (infinitesimal lifting functions) on the two-disk
//! bundle and their algebra.
//!
//! A mechanism maps a configuration `e` and an obstacle velocity `X` to a
//! velocity of the whole system whose obstacle part is `X`. Implementations
//! only produce the ego velocity `vM`; [`ReactionMechanism::evaluate`] copies
//! `X` into `vN`, so the projection contract holds bitwise for every
//! mechanism, built-in or not.
//!
//! Mechanisms must be locally Lipschitz for [`integrate_lift`] to have a
//! unique solution; all built-in ones are.

mod integrate;

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bundle::{BaseTangent, Config, TotalTangent, CONTACT_DISTANCE};
use crate::error::{Error, Result};
use crate::geometry::{conformal, rot90, Mat2, Vec2};

pub use integrate::{
    integrate_lift, integrate_on_grid, lift_endpoint, lift_grid, rk4_step, LiftOutcome, COLLISION_BAND,
};

pub trait ReactionMechanism: Send + Sync + fmt::Debug {
    /// Ego velocity produced in response to obstacle velocity `x` at `e`.
    fn fiber_velocity(&self, e: &Config, x: Vec2) -> Vec2;

    /// Declared linearity in `x`. Linear mechanisms are Ehresmann connections.
    fn is_linear(&self) -> bool;

    fn evaluate(&self, e: &Config, x: &BaseTangent) -> TotalTangent {
        TotalTangent {
            at: *e,
            vm: self.fiber_velocity(e, x.v),
            vn: x.v,
        }
    }
}

/// A vertical correction term `ℓ(e, X)`; it never moves the obstacle.
pub trait ReactionForm: Send + Sync + fmt::Debug {
    fn fiber_velocity(&self, e: &Config, x: Vec2) -> Vec2;

    fn is_linear(&self) -> bool;

    fn evaluate(&self, e: &Config, x: &BaseTangent) -> TotalTangent {
        TotalTangent {
            at: *e,
            vm: self.fiber_velocity(e, x.v),
            vn: Vec2::ZERO,
        }
    }
}

pub type Mechanism = Arc<dyn ReactionMechanism>;
pub type Form = Arc<dyn ReactionForm>;
/// Blending weight for [`affine_combine`]; should be continuous in `e`.
pub type Weight = Arc<dyn Fn(&Config) -> f64 + Send + Sync>;

/// Cutoff `ψ(r)`: 1 up to `r_on`, 0 from `r_off`, smoothstep in between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuationFunction {
    pub r_on: f64,
    pub r_off: f64,
}

impl ActuationFunction {
    pub fn eval(&self, r: f64) -> f64 {
        if r <= self.r_on {
            return 1.0;
        }
        if r >= self.r_off {
            return 0.0;
        }
        let u = (r - self.r_on) / (self.r_off - self.r_on);
        1.0 - u * u * (3.0 - 2.0 * u)
    }
}

/// The cutoff active on `[0, 2]` with support in `[0, 3]`.
pub fn smoothstep_actuation() -> ActuationFunction {
    ActuationFunction {
        r_on: CONTACT_DISTANCE,
        r_off: CONTACT_DISTANCE + 1.0,
    }
}

/// `vM = vN`: the ego copies the obstacle and the offset is frozen.
#[derive(Debug, Clone, Copy)]
pub struct Follow;

impl ReactionMechanism for Follow {
    fn fiber_velocity(&self, _e: &Config, x: Vec2) -> Vec2 {
        x
    }
    fn is_linear(&self) -> bool {
        true
    }
}

/// `vM = ψ(|cM − cN|)·vN`: copy near contact, ignore the obstacle far away.
#[derive(Debug, Clone, Copy)]
pub struct Damped {
    pub psi: ActuationFunction,
}

impl ReactionMechanism for Damped {
    fn fiber_velocity(&self, e: &Config, x: Vec2) -> Vec2 {
        x * self.psi.eval(e.distance())
    }
    fn is_linear(&self) -> bool {
        true
    }
}

/// `vM = vN + λ(cM − cN)`: the offset scales as `e^{λt}`.
#[derive(Debug, Clone, Copy)]
pub struct Radial {
    pub lambda: f64,
}

impl ReactionMechanism for Radial {
    fn fiber_velocity(&self, e: &Config, x: Vec2) -> Vec2 {
        x + e.offset() * self.lambda
    }
    fn is_linear(&self) -> bool {
        false
    }
}

/// `vM = vN + μ·(cM − cN)^⊥`: the ego orbits the obstacle at rate μ.
#[derive(Debug, Clone, Copy)]
pub struct Orbit {
    pub mu: f64,
}

impl ReactionMechanism for Orbit {
    fn fiber_velocity(&self, e: &Config, x: Vec2) -> Vec2 {
        x + rot90(e.offset()) * self.mu
    }
    fn is_linear(&self) -> bool {
        false
    }
}

/// `vM = α·vN + β·vN^⊥`.
#[derive(Debug, Clone, Copy)]
pub struct LinearConst {
    pub alpha: f64,
    pub beta: f64,
    matrix: Mat2,
}

impl LinearConst {
    pub fn matrix(&self) -> Mat2 {
        self.matrix
    }
}

impl ReactionMechanism for LinearConst {
    fn fiber_velocity(&self, _e: &Config, x: Vec2) -> Vec2 {
        self.matrix.apply(x)
    }
    fn is_linear(&self) -> bool {
        true
    }
}

pub struct AffineCombination {
    theta: Weight,
    first: Mechanism,
    second: Mechanism,
}

impl fmt::Debug for AffineCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AffineCombination")
            .field("first", &self.first)
            .field("second", &self.second)
            .finish_non_exhaustive()
    }
}

impl ReactionMechanism for AffineCombination {
    fn fiber_velocity(&self, e: &Config, x: Vec2) -> Vec2 {
        let th = (self.theta)(e);
        self.first.fiber_velocity(e, x) * th + self.second.fiber_velocity(e, x) * (1.0 - th)
    }
    fn is_linear(&self) -> bool {
        self.first.is_linear() && self.second.is_linear()
    }
}

#[derive(Debug)]
pub struct WithForms {
    base: Mechanism,
    forms: Vec<Form>,
}

impl ReactionMechanism for WithForms {
    fn fiber_velocity(&self, e: &Config, x: Vec2) -> Vec2 {
        self.forms
            .iter()
            .fold(self.base.fiber_velocity(e, x), |acc, f| acc + f.fiber_velocity(e, x))
    }
    fn is_linear(&self) -> bool {
        self.base.is_linear() && self.forms.iter().all(|f| f.is_linear())
    }
}

/// `ℓ(e, X) = ψ(|cM − cN|)·|X|·N(e)` with `N` the unit normal away from the
/// obstacle. Positively homogeneous in `X`, not linear.
#[derive(Debug, Clone, Copy)]
pub struct PushingForm {
    pub psi: ActuationFunction,
}

impl ReactionForm for PushingForm {
    fn fiber_velocity(&self, e: &Config, x: Vec2) -> Vec2 {
        let offset = e.offset();
        let d = offset.norm();
        if d == 0.0 {
            return Vec2::ZERO;
        }
        offset * (self.psi.eval(d) * x.norm() / d)
    }
    fn is_linear(&self) -> bool {
        false
    }
}

pub fn mech_copy() -> Mechanism {
    Arc::new(Follow)
}

pub fn mech_damped(psi: ActuationFunction) -> Mechanism {
    Arc::new(Damped { psi })
}

pub fn mech_radial(lambda: f64) -> Mechanism {
    Arc::new(Radial { lambda })
}

pub fn mech_orbit(mu: f64) -> Mechanism {
    Arc::new(Orbit { mu })
}

pub fn linear_const(alpha: f64, beta: f64) -> Result<LinearConst> {
    if alpha == 0.0 && beta == 0.0 {
        return Err(Error::InvalidParameters("alpha and beta must not both vanish".into()));
    }
    if !(alpha.is_finite() && beta.is_finite()) {
        return Err(Error::InvalidParameters("alpha and beta must be finite".into()));
    }
    Ok(LinearConst {
        alpha,
        beta,
        matrix: conformal(alpha, beta),
    })
}

pub fn mech_linear_const(alpha: f64, beta: f64) -> Result<Mechanism> {
    Ok(Arc::new(linear_const(alpha, beta)?))
}

/// `θ(e)·L1 + (1 − θ(e))·L2`.
pub fn affine_combine(theta: Weight, first: Mechanism, second: Mechanism) -> Mechanism {
    Arc::new(AffineCombination {
        theta,
        first,
        second,
    })
}

/// Constant blending weight.
pub fn constant_weight(value: f64) -> Weight {
    Arc::new(move |_| value)
}

pub fn pushing_form(psi: ActuationFunction) -> Form {
    Arc::new(PushingForm { psi })
}

/// `L + ℓ1 + … + ℓN`.
pub fn add_form(base: Mechanism, forms: Vec<Form>) -> Mechanism {
    if forms.is_empty() {
        return base;
    }
    Arc::new(WithForms { base, forms })
}

const LINEARITY_TOL: f64 = 1e-10;
const LINEARITY_SEED: u64 = 0x6c69_6e65_6172;

/// Randomized check of additivity and homogeneity in `X` at `samples`
/// random configurations, including the scale factor −1 at each sample.
pub fn verify_linearity(mech: &dyn ReactionMechanism, samples: usize) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(LINEARITY_SEED);
    let close = |a: Vec2, b: Vec2| (a - b).norm() <= LINEARITY_TOL * (1.0 + a.norm().max(b.norm()));
    (0..samples.max(1)).all(|_| {
        let cn = Vec2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let r = if rng.gen_bool(0.25) {
            CONTACT_DISTANCE
        } else {
            rng.gen_range(CONTACT_DISTANCE..6.0)
        };
        let e = Config::new(cn + Vec2::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU)), cn);
        let mut draw = || Vec2::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let (x1, x2) = (draw(), draw());
        let scale = rng.gen_range(-3.0..3.0);
        let f = |x: Vec2| mech.fiber_velocity(&e, x);
        close(f(x1 + x2), f(x1) + f(x2))
            && close(f(x1 * scale), f(x1) * scale)
            && close(f(-x1), -f(x1))
    })
}
