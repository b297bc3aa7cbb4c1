//! The batch subcommands. Each returns a [`RunStatus`]; errors map to exit 1.

use std::fs;
use std::path::Path;

use fibersim_core::bundle::project;
use fibersim_core::lifting::integrate_lift;
use fibersim_core::planner::{extended_plan, moving_target_plan, PlanOptions, PlanOutcome, Reparam};
use fibersim_core::{Config, Vec2};
use serde::Serialize;

use crate::error::CliError;
use crate::report::AnalysisReport;
use crate::scenario::{vec2, MechanismSpec, Scenario};
use crate::trajectory::{Row, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Completed,
    Collision,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Completed => 0,
            RunStatus::Collision => 2,
        }
    }
}

pub const EXIT_ERROR: i32 = 1;

/// Parses `"x,y"`.
pub fn parse_vec2(s: &str) -> Result<Vec2, CliError> {
    let bad = || CliError::Argument(format!("expected `x,y`, got `{s}`"));
    let (x, y) = s.split_once(',').ok_or_else(bad)?;
    let x: f64 = x.trim().parse().map_err(|_| bad())?;
    let y: f64 = y.trim().parse().map_err(|_| bad())?;
    if x.is_finite() && y.is_finite() {
        Ok(Vec2::new(x, y))
    } else {
        Err(bad())
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    Scenario::from_json(&fs::read_to_string(path)?)
}

/// Lifts the scenario's obstacle motion from the initial configuration.
pub fn simulate(scenario: &Scenario) -> Result<(Trajectory, RunStatus), CliError> {
    let mech = scenario.mechanism.build()?;
    let gamma = scenario.obstacle_curve()?;
    let lift = integrate_lift(&*mech, &scenario.initial.config(), &*gamma, scenario.step)?;
    let last = lift.path.len() - 1;
    let rows = lift
        .path
        .iter()
        .enumerate()
        .map(|(k, (t, e))| Row::new(t, *e, k == last && !lift.completed))
        .collect();
    let status = if lift.completed {
        RunStatus::Completed
    } else {
        RunStatus::Collision
    };
    Ok((
        Trajectory {
            rows,
            collision_time: lift.collision_time,
            with_piece: false,
        },
        status,
    ))
}

pub fn run_simulate(scenario: &Path, out: &Path) -> Result<RunStatus, CliError> {
    let scenario = load_scenario(scenario)?;
    let (traj, status) = simulate(&scenario)?;
    traj.write_to(fs::File::create(out)?)?;
    if let Some(tc) = traj.collision_time {
        log::info!("collision at t={tc}");
    }
    Ok(status)
}

pub fn run_analyze(alpha: f64, beta: f64, cm0: Vec2, cn0: Vec2) -> Result<AnalysisReport, CliError> {
    AnalysisReport::compute(alpha, beta, cm0, cn0)
}

#[derive(Debug, Clone, Default)]
pub struct PlanArgs {
    pub stride: usize,
    /// Plan toward a goal that itself moves by this mechanism along the
    /// obstacle motion, instead of toward a goal fixed in the initial fiber.
    pub target_mechanism: Option<MechanismSpec>,
}

/// Endpoint residuals of a plan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PlanResiduals {
    /// `|output(0) − start|`.
    pub start: f64,
    /// `max_t |p(output(t)) − γ(t)|`.
    pub projection: f64,
    /// `|output(1) − target(1)|`, where the target is the lift of the goal
    /// (or the moving target's end).
    pub goal: f64,
}

#[derive(Debug, Clone)]
pub struct PlanResult {
    pub trajectory: Trajectory,
    pub status: RunStatus,
    /// `None` when the plan stopped at a collision.
    pub residuals: Option<PlanResiduals>,
}

pub fn plan(scenario: &Scenario, start: Vec2, goal: Vec2, args: &PlanArgs) -> Result<PlanResult, CliError> {
    let cn0 = vec2(scenario.initial.cn);
    let e = Config::new(start, cn0);
    let e_goal = Config::new(goal, cn0);
    e.check_admissible().map_err(|err| CliError::invalid("start", &err.to_string()))?;
    e_goal.check_admissible().map_err(|err| CliError::invalid("goal", &err.to_string()))?;

    let mech = scenario.mechanism.build()?;
    let gamma = scenario.obstacle_curve()?;
    let (t0, _) = gamma.domain();
    let offset = (gamma.position(t0) - cn0).norm();
    if offset > 1e-9 {
        return Err(fibersim_core::Error::FiberMismatch { offset }.into());
    }
    let opts = PlanOptions {
        step: scenario.step,
        stride: args.stride.max(1),
    };

    let (outcome, target_end): (PlanOutcome, Option<Config>) = match &args.target_mechanism {
        None => {
            let outcome = extended_plan(&*gamma, &e, &e_goal, &*mech, &Reparam::Identity, opts)?;
            let target = integrate_lift(&*mech, &e_goal, &*gamma, scenario.step)?;
            let end = target.completed.then(|| *target.end());
            (outcome, end)
        }
        Some(spec) => {
            let target = integrate_lift(&*spec.build()?, &e_goal, &*gamma, scenario.step)?;
            if !target.completed {
                return Err(CliError::invalid(
                    "target-mechanism",
                    &format!("the target collides at t={}", target.collision_time.unwrap_or(f64::NAN)),
                ));
            }
            let outcome = moving_target_plan(&e, &target.path, &*mech)?;
            (outcome, Some(*target.end()))
        }
    };

    let rows: Vec<Row> = outcome
        .times
        .iter()
        .zip(&outcome.states)
        .zip(&outcome.pieces)
        .map(|((&t, &state), &piece)| Row {
            t,
            state,
            collided: false,
            piece: Some(piece),
        })
        .collect();
    let collision_time = outcome.collision.map(|c| c.collision_time);

    let residuals = match (outcome.completed(), target_end) {
        (true, Some(target)) => {
            let first = outcome.first().expect("plan has nodes");
            let last = outcome.last().expect("plan has nodes");
            let projection = outcome
                .times
                .iter()
                .zip(&outcome.states)
                .map(|(&t, s)| (project(s) - gamma.position(t)).norm())
                .fold(0.0, f64::max);
            Some(PlanResiduals {
                start: config_gap(first, &e),
                projection,
                goal: config_gap(last, &target),
            })
        }
        _ => None,
    };
    Ok(PlanResult {
        trajectory: Trajectory {
            rows,
            collision_time,
            with_piece: true,
        },
        status: if outcome.completed() {
            RunStatus::Completed
        } else {
            RunStatus::Collision
        },
        residuals,
    })
}

fn config_gap(a: &Config, b: &Config) -> f64 {
    (a.cm - b.cm).norm().max((a.cn - b.cn).norm())
}

pub fn run_plan(scenario: &Path, start: Vec2, goal: Vec2, out: &Path, args: &PlanArgs) -> Result<PlanResult, CliError> {
    let scenario = load_scenario(scenario)?;
    let result = plan(&scenario, start, goal, args)?;
    result.trajectory.write_to(fs::File::create(out)?)?;
    Ok(result)
}
