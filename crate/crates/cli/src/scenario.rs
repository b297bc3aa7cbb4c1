//! Scenario files: JSON with an explicit `version` and no unknown fields.
//!
//! ```json
//! {
//!   "version": 1,
//!   "mechanism": { "kind": "radial", "lambda": -0.5 },
//!   "initial": { "cM": [4.0, 0.0], "cN": [0.0, 0.0] },
//!   "obstacle": { "kind": "constant" },
//!   "duration": 2.0,
//!   "step": 0.001,
//!   "seed": 7
//! }
//! ```

use std::f64::consts::TAU;

use fibersim_core::analysis::{adversary_path, collision_geometry};
use fibersim_core::bundle::Config;
use fibersim_core::curves::{ConstantSpeedSpline, Stationary};
use fibersim_core::lifting::{
    add_form, affine_combine, constant_weight, mech_copy, mech_damped, mech_linear_const, mech_orbit,
    mech_radial, pushing_form, smoothstep_actuation, Form, Mechanism, Weight,
};
use fibersim_core::path::BaseCurve;
use fibersim_core::Vec2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCENARIO_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    pub mechanism: MechanismSpec,
    pub initial: Initial,
    pub obstacle: ObstacleSpec,
    pub duration: f64,
    pub step: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    #[serde(rename = "cM")]
    pub cm: [f64; 2],
    #[serde(rename = "cN")]
    pub cn: [f64; 2],
}

impl Initial {
    pub fn config(&self) -> Config {
        Config::new(vec2(self.cm), vec2(self.cn))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MechanismSpec {
    Copy,
    Damped,
    Radial {
        lambda: f64,
    },
    Orbit {
        mu: f64,
    },
    LinearConst {
        alpha: f64,
        beta: f64,
    },
    /// `base + Σ forms`, optionally blended `θ·(…) + (1 − θ)·blend.other`.
    Composite {
        base: Box<MechanismSpec>,
        #[serde(default)]
        forms: Vec<FormSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta: Option<BlendSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FormSpec {
    Pushing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlendSpec {
    pub other: Box<MechanismSpec>,
    pub weight: WeightSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Constant { value: f64 },
    /// `θ(e) = ψ(|cM − cN|)`.
    Actuation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObstacleSpec {
    Constant,
    /// Natural cubic spline through the waypoints at constant speed; the
    /// first waypoint must be the initial obstacle center.
    Spline { waypoints: Vec<[f64; 2]>, speed: f64 },
    /// Spline through `waypoints` random points drawn from the seed, each
    /// within `radius` of the previous one.
    RandomSpline { waypoints: usize, radius: f64, speed: f64 },
    /// Straight run into the sure-collision disk of a `linear_const` mechanism.
    Adversary { speed: f64 },
}

/// Depth limit for nested composite mechanisms.
const MAX_NESTING: usize = 16;
const MAX_WAYPOINTS: usize = 10_000;

impl MechanismSpec {
    pub fn build(&self) -> Result<Mechanism, CliError> {
        self.build_nested(0)
    }

    fn build_nested(&self, depth: usize) -> Result<Mechanism, CliError> {
        if depth > MAX_NESTING {
            return Err(CliError::invalid("mechanism", "composite nesting too deep"));
        }
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(CliError::invalid(&format!("mechanism.{name}"), "must be finite"))
            }
        };
        Ok(match self {
            MechanismSpec::Copy => mech_copy(),
            MechanismSpec::Damped => mech_damped(smoothstep_actuation()),
            MechanismSpec::Radial { lambda } => mech_radial(finite("lambda", *lambda)?),
            MechanismSpec::Orbit { mu } => mech_orbit(finite("mu", *mu)?),
            MechanismSpec::LinearConst { alpha, beta } => mech_linear_const(*alpha, *beta)
                .map_err(|e| CliError::invalid("mechanism", &e.to_string()))?,
            MechanismSpec::Composite { base, forms, theta } => {
                let forms: Vec<Form> = forms
                    .iter()
                    .map(|f| match f {
                        FormSpec::Pushing => pushing_form(smoothstep_actuation()),
                    })
                    .collect();
                let mech = add_form(base.build_nested(depth + 1)?, forms);
                match theta {
                    None => mech,
                    Some(blend) => {
                        let weight: Weight = match blend.weight {
                            WeightSpec::Constant { value } => constant_weight(finite("theta.weight.value", value)?),
                            WeightSpec::Actuation => {
                                let psi = smoothstep_actuation();
                                std::sync::Arc::new(move |e: &Config| psi.eval(e.distance()))
                            }
                        };
                        affine_combine(weight, mech, blend.other.build_nested(depth + 1)?)
                    }
                }
            }
        })
    }

    /// `(α, β)` for constant-coefficient linear mechanisms.
    pub fn linear_coefficients(&self) -> Option<(f64, f64)> {
        match self {
            MechanismSpec::Copy => Some((1.0, 0.0)),
            MechanismSpec::LinearConst { alpha, beta } => Some((*alpha, *beta)),
            _ => None,
        }
    }
}

pub fn vec2(v: [f64; 2]) -> Vec2 {
    Vec2::new(v[0], v[1])
}

/// Holds a curve at its final point (with zero velocity) past its domain.
#[derive(Debug)]
pub struct Parked<C> {
    inner: C,
    t1: f64,
}

impl<C: BaseCurve> BaseCurve for Parked<C> {
    fn domain(&self) -> (f64, f64) {
        (self.inner.domain().0, self.t1)
    }
    fn position(&self, t: f64) -> Vec2 {
        self.inner.position(t.min(self.inner.domain().1))
    }
    fn velocity(&self, t: f64) -> Vec2 {
        if t > self.inner.domain().1 {
            Vec2::ZERO
        } else {
            self.inner.velocity(t)
        }
    }
}

pub type ObstacleCurve = Box<dyn BaseCurve>;

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            CliError::Scenario {
                line: inner.line(),
                column: inner.column(),
                field: path,
                msg: inner.to_string(),
            }
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.version != SCENARIO_VERSION {
            return Err(CliError::invalid(
                "version",
                &format!("unsupported version {}, expected {SCENARIO_VERSION}", self.version),
            ));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(CliError::invalid("step", "must be positive"));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(CliError::invalid("duration", "must be positive"));
        }
        if self.duration / self.step > 1e8 {
            return Err(CliError::invalid("step", "too many steps for the duration"));
        }
        self.initial
            .config()
            .check_admissible()
            .map_err(|e| CliError::invalid("initial", &e.to_string()))?;
        self.mechanism.build()?;
        match &self.obstacle {
            ObstacleSpec::Constant => {}
            ObstacleSpec::Spline { waypoints, speed } => {
                positive("obstacle.speed", *speed)?;
                if waypoints.len() < 2 || waypoints.len() > MAX_WAYPOINTS {
                    return Err(CliError::invalid("obstacle.waypoints", "need between 2 and 10000 waypoints"));
                }
                if (vec2(waypoints[0]) - vec2(self.initial.cn)).norm() > 1e-9 {
                    return Err(CliError::invalid(
                        "obstacle.waypoints",
                        "first waypoint must equal the initial obstacle center",
                    ));
                }
            }
            ObstacleSpec::RandomSpline {
                waypoints,
                radius,
                speed,
            } => {
                positive("obstacle.speed", *speed)?;
                positive("obstacle.radius", *radius)?;
                if *waypoints < 1 || *waypoints > MAX_WAYPOINTS {
                    return Err(CliError::invalid("obstacle.waypoints", "need between 1 and 10000 waypoints"));
                }
            }
            ObstacleSpec::Adversary { speed } => {
                positive("obstacle.speed", *speed)?;
                if !matches!(self.mechanism, MechanismSpec::LinearConst { .. }) {
                    return Err(CliError::invalid(
                        "obstacle",
                        "adversary obstacles need a linear_const mechanism",
                    ));
                }
            }
        }
        Ok(())
    }

    /// The obstacle motion over `[0, duration]`.
    pub fn obstacle_curve(&self) -> Result<ObstacleCurve, CliError> {
        let cn0 = vec2(self.initial.cn);
        let duration = self.duration;
        let core = |e: fibersim_core::Error| CliError::invalid("obstacle", &e.to_string());
        Ok(match &self.obstacle {
            ObstacleSpec::Constant => Box::new(Stationary::new(cn0, 0.0, duration)),
            ObstacleSpec::Spline { waypoints, speed } => {
                let pts = waypoints.iter().copied().map(vec2).collect();
                Box::new(ConstantSpeedSpline::new(pts, *speed, duration).map_err(core)?)
            }
            ObstacleSpec::RandomSpline {
                waypoints,
                radius,
                speed,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let mut pts = vec![cn0];
                for _ in 0..*waypoints {
                    let last = *pts.last().unwrap();
                    let r = rng.gen_range(0.2 * radius..=*radius);
                    pts.push(last + Vec2::from_polar(r, rng.gen_range(0.0..TAU)));
                }
                Box::new(ConstantSpeedSpline::new(pts, *speed, duration).map_err(core)?)
            }
            ObstacleSpec::Adversary { speed } => {
                let (alpha, beta) = self.mechanism.linear_coefficients().expect("validated");
                let geom = collision_geometry(alpha, beta, vec2(self.initial.cm), cn0).map_err(core)?;
                let path = adversary_path(&geom, cn0, *speed).map_err(core)?;
                Box::new(Parked { inner: path, t1: duration })
            }
        })
    }
}

fn positive(field: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::invalid(field, "must be positive"))
    }
}
