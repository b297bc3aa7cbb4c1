//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Every reference value is computed here independently of
//! the library code under test.

#[path = "../../core/tests/oracle/mod.rs"]
mod oracle;

use std::f64::consts::{PI, TAU};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use fibersim_core::analysis::{
    adversary_path, classify_obstacle_position, collision_geometry, exact_collision, ObstacleClass,
};
use fibersim_core::curves::{ConstantSpeedSpline, CubicSpline, Stationary};
use fibersim_core::lifting::{
    add_form, affine_combine, constant_weight, integrate_lift, mech_copy, mech_damped, mech_linear_const,
    mech_orbit, mech_radial, pushing_form, smoothstep_actuation, verify_linearity, Mechanism,
};
use fibersim_core::path::BaseCurve;
use fibersim_core::planner::{extended_plan, fiber_plan, moving_target_plan, PlanOptions, Reparam};
use fibersim_core::{Config, SampledPath, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STEP: f64 = 1e-3;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit(angle: f64) -> Vec2 {
    Vec2::new(angle.cos(), angle.sin())
}

/// Waypoints of a random walk from `start` whose heading turns by less than
/// 90° per step. This keeps splines through them free of near-cusps, where a
/// constant-speed parametrization would reverse direction almost instantly.
fn random_walk(r: &mut ChaCha8Rng, start: Vec2) -> Vec<Vec2> {
    let mut pts = vec![start];
    let mut heading = r.gen_range(0.0..TAU);
    for _ in 0..r.gen_range(2..6) {
        let last = *pts.last().unwrap();
        heading += r.gen_range(-0.49 * PI..0.49 * PI);
        pts.push(last + unit(heading) * r.gen_range(0.5..2.0));
    }
    pts
}

/// A constant-speed spline over `[0, 1]`. The speed is capped so the end is
/// never reached: a parked obstacle has a velocity jump.
fn random_spline(r: &mut ChaCha8Rng, start: Vec2) -> ConstantSpeedSpline {
    let pts = random_walk(r, start);
    let length = ConstantSpeedSpline::new(pts.clone(), 1.0, 1.0).unwrap().length();
    let speed = r.gen_range(0.5..3.0f64).min(0.95 * length);
    ConstantSpeedSpline::new(pts, speed, 1.0).unwrap()
}

/// A natural spline through a random walk, knots uniform in time over `[0, 1]`.
fn random_time_spline(r: &mut ChaCha8Rng, start: Vec2) -> CubicSpline {
    CubicSpline::through(random_walk(r, start), 0.0, 1.0).unwrap()
}

fn random_base(r: &mut ChaCha8Rng, k: usize) -> Box<dyn BaseCurve> {
    let start = Vec2::new(r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0));
    if k % 2 == 0 {
        Box::new(random_spline(r, start))
    } else {
        Box::new(random_time_spline(r, start))
    }
}

fn offset_start(r: &mut ChaCha8Rng, cn: Vec2, d: (f64, f64)) -> Config {
    Config::new(cn + unit(r.gen_range(0.0..TAU)) * r.gen_range(d.0..d.1), cn)
}

/// `[[α, −β], [β, α]]·v`.
fn conformal_apply(alpha: f64, beta: f64, v: Vec2) -> Vec2 {
    Vec2::new(alpha * v.x - beta * v.y, beta * v.x + alpha * v.y)
}

// 1 ─────────────────────────────────────────────────────────────────────────

fn exponential_law() -> Outcome {
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    for lambda in [-0.5, 0.5, 1.0] {
        let d0 = 4.0;
        let e0 = Config::new(Vec2::new(d0, 0.0), Vec2::ZERO);
        let lift = integrate_lift(&*mech_radial(lambda), &e0, &Stationary::new(Vec2::ZERO, 0.0, 1.0), STEP).unwrap();
        if !lift.completed {
            return check(false, format!("λ={lambda}: unexpected collision"));
        }
        let expected = (lambda as f64).exp() * d0;
        worst = worst.max((lift.end().distance() - expected).abs() / expected);
    }
    let elapsed = started.elapsed();
    check(
        worst <= 1e-6 && elapsed < Duration::from_secs(1),
        format!("max relative error {worst:.2e} (≤ 1e-6), {:.3} s (< 1 s)", elapsed.as_secs_f64()),
    )
}

// 2 ─────────────────────────────────────────────────────────────────────────

fn direction_constancy() -> Outcome {
    let started = Instant::now();
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let gamma = random_base(&mut r, k);
        let lambda = r.gen_range(-0.3..1.0);
        let e0 = offset_start(&mut r, gamma.position(0.0), (3.0, 6.0));
        let lift = integrate_lift(&*mech_radial(lambda), &e0, &*gamma, STEP).unwrap();
        if !lift.completed {
            return check(false, format!("path {k}: unexpected collision"));
        }
        let c0 = e0.offset();
        for (_, e) in lift.path.iter() {
            let c = e.offset();
            worst = worst.max(c0.cross(c).abs() / (c0.norm() * c.norm()));
        }
    }
    let elapsed = started.elapsed();
    check(
        worst <= 1e-8 && elapsed < Duration::from_secs(30),
        format!("max normalized cross product {worst:.2e} (≤ 1e-8), {:.2} s (< 30 s)", elapsed.as_secs_f64()),
    )
}

// 3 ─────────────────────────────────────────────────────────────────────────

fn orbit_law() -> Outcome {
    let mut r = rng(3);
    let (mut worst_d, mut worst_angle): (f64, f64) = (0.0, 0.0);
    for k in 0..50 {
        let gamma = random_base(&mut r, k);
        let mu = r.gen_range(-2.0..2.0);
        let e0 = offset_start(&mut r, gamma.position(0.0), (2.5, 6.0));
        let lift = integrate_lift(&*mech_orbit(mu), &e0, &*gamma, STEP).unwrap();
        if !lift.completed {
            return check(false, format!("path {k}: unexpected collision"));
        }
        let d0 = e0.distance();
        let mut swept = 0.0;
        let mut prev = e0.offset();
        for (_, e) in lift.path.iter() {
            let c = e.offset();
            worst_d = worst_d.max((c.norm() - d0).abs());
            swept += prev.cross(c).atan2(prev.dot(c));
            prev = c;
        }
        worst_angle = worst_angle.max((swept - mu * 1.0).abs());
    }
    check(
        worst_d <= 1e-8 && worst_angle <= 1e-6,
        format!("max |d − d0| {worst_d:.2e} (≤ 1e-8), max angle error at t=1 {worst_angle:.2e} (≤ 1e-6)"),
    )
}

// 4 ─────────────────────────────────────────────────────────────────────────

fn closed_form_vs_integrator() -> Outcome {
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    let mut collided = 0;
    for _ in 0..100 {
        let (alpha, beta) = loop {
            let (a, b): (f64, f64) = (r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
            if a.hypot(b) > 0.1 {
                break (a, b);
            }
        };
        let cn0 = Vec2::new(r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0));
        let gamma = random_spline(&mut r, cn0);
        let e0 = offset_start(&mut r, cn0, (2.5, 6.0));
        let lift = integrate_lift(&*mech_linear_const(alpha, beta).unwrap(), &e0, &gamma, STEP).unwrap();
        collided += usize::from(!lift.completed);
        let c0 = conformal_apply(alpha, beta, cn0) - e0.cm;
        for (t, e) in lift.path.iter() {
            let expected = conformal_apply(alpha, beta, gamma.position(t)) - c0;
            worst = worst.max((e.cm - expected).norm());
        }
    }
    check(
        worst <= 1e-6,
        format!("max node discrepancy {worst:.2e} (≤ 1e-6); {collided}/100 runs stopped at a collision"),
    )
}

// 5 ─────────────────────────────────────────────────────────────────────────

fn soundness() -> Outcome {
    let started = Instant::now();
    let mut r = rng(5);
    let (mut misclassified, mut nesting, mut ambiguous) = (0usize, 0usize, 0usize);
    let mut counts = [0usize; 3];
    let random_geometry = |r: &mut ChaCha8Rng| loop {
        let (a, b): (f64, f64) = (r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0));
        if (a - 1.0).hypot(b) < 1e-3 || a.hypot(b) < 1e-3 {
            continue;
        }
        let cn0 = Vec2::new(r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0));
        let cm0 = cn0 + unit(r.gen_range(0.0..TAU)) * r.gen_range(2.0..8.0);
        return (a, b, cm0, cn0, collision_geometry(a, b, cm0, cn0).unwrap());
    };
    for _ in 0..1000 {
        let (alpha, beta, cm0, cn0, geom) = random_geometry(&mut r);
        let disks = geom.disks.unwrap();
        let c0 = conformal_apply(alpha, beta, cn0) - cm0;
        for _ in 0..100 {
            let cn = disks.c_tilde0 + unit(r.gen_range(0.0..TAU)) * (2.0 * disks.r_d_prime * r.gen::<f64>().sqrt());
            // independent truth: the ego center from the closed-form law
            let d = (conformal_apply(alpha, beta, cn) - c0 - cn).norm();
            if (d - 2.0).abs() <= 1e-9 {
                ambiguous += 1;
                continue;
            }
            let truth = d < 2.0;
            let class = classify_obstacle_position(&geom, cn).unwrap();
            counts[class as usize] += 1;
            let exact = exact_collision(&geom, cn).unwrap();
            let wrong = exact != truth
                || (class == ObstacleClass::Collision && !truth)
                || (class == ObstacleClass::Admissible && truth);
            misclassified += usize::from(wrong);
            let rad = (cn - disks.c_tilde0).norm();
            nesting += usize::from((rad < disks.r_d && !truth) || (truth && rad >= disks.r_d_prime));
        }
    }
    // boundary layers of D and D′
    let mut boundary_failures = 0;
    for k in 0..20_000 {
        let (alpha, beta, cm0, cn0, geom) = random_geometry(&mut r);
        let disks = geom.disks.unwrap();
        let c0 = conformal_apply(alpha, beta, cn0) - cm0;
        let dir = unit(r.gen_range(0.0..TAU));
        let (cn, inside) = if k % 2 == 0 {
            (disks.c_tilde0 + dir * (disks.r_d * (1.0 - 1e-9)), true)
        } else {
            (disks.c_tilde0 + dir * (disks.r_d_prime * (1.0 + 1e-9)), false)
        };
        let truth = (conformal_apply(alpha, beta, cn) - c0 - cn).norm() < 2.0;
        let class = classify_obstacle_position(&geom, cn).unwrap();
        let expected = if inside { ObstacleClass::Collision } else { ObstacleClass::Admissible };
        boundary_failures += usize::from(truth != inside || class != expected);
    }
    let elapsed = started.elapsed();
    check(
        misclassified == 0 && nesting == 0 && boundary_failures == 0 && elapsed < Duration::from_secs(10),
        format!(
            "1e5 samples (collision {}, admissible {}, shell {}, within 1e-9 of contact {}): {misclassified} misclassified, \
             {nesting} nesting violations; 2×1e4 boundary samples: {boundary_failures} failures; {:.2} s (< 10 s)",
            counts[0],
            counts[1],
            counts[2],
            ambiguous,
            elapsed.as_secs_f64()
        ),
    )
}

// 6 ─────────────────────────────────────────────────────────────────────────

fn forced_collision() -> Outcome {
    let mut r = rng(6);
    let mut forced = 0;
    let mut worst_contact: f64 = 0.0;
    for _ in 0..50 {
        let (alpha, beta) = loop {
            let (a, b): (f64, f64) = (r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0));
            if (a - 1.0).hypot(b) > 0.1 && a.hypot(b) > 0.1 {
                break (a, b);
            }
        };
        let cn0 = Vec2::new(r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0));
        let e0 = offset_start(&mut r, cn0, (2.5, 6.0));
        let geom = collision_geometry(alpha, beta, e0.cm, cn0).unwrap();
        let path = adversary_path(&geom, cn0, r.gen_range(0.5..3.0)).unwrap();
        let lift = integrate_lift(&*mech_linear_const(alpha, beta).unwrap(), &e0, &path, STEP).unwrap();
        if let Some(_) = lift.collision_time {
            forced += 1;
            worst_contact = worst_contact.max((lift.end().distance() - 2.0).abs());
        }
    }

    let mut worst_drift: f64 = 0.0;
    let degenerate_rejected = {
        let g = collision_geometry(1.0, 0.0, Vec2::new(3.0, 0.0), Vec2::ZERO).unwrap();
        adversary_path(&g, Vec2::ZERO, 1.0).is_err()
    };
    for k in 0..100 {
        let cn0 = Vec2::new(r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0));
        let e0 = offset_start(&mut r, cn0, (2.5, 6.0));
        let lift = if k % 2 == 0 {
            // charge straight through the ego's starting position
            let speed = r.gen_range(0.5..5.0);
            let dir = e0.offset().normalized().unwrap();
            let path = SampledPath::sample(0.0, 2.0, 2000, |t| cn0 + dir * (speed * t)).unwrap();
            integrate_lift(&*mech_copy(), &e0, &path, STEP).unwrap()
        } else {
            integrate_lift(&*mech_copy(), &e0, &random_spline(&mut r, cn0), STEP).unwrap()
        };
        if !lift.completed {
            worst_drift = f64::INFINITY;
        }
        for (_, e) in lift.path.iter() {
            worst_drift = worst_drift.max((e.distance() - e0.distance()).abs());
        }
    }
    check(
        forced == 50 && worst_contact <= 1e-8 && worst_drift <= 1e-9 && degenerate_rejected,
        format!(
            "{forced}/50 adversaries forced contact (|d − 2| ≤ {worst_contact:.1e}); (1,0): max |Δd| {worst_drift:.2e} \
             over 100 adversaries (≤ 1e-9), adversary construction refused: {degenerate_rejected}"
        ),
    )
}

// 7 ─────────────────────────────────────────────────────────────────────────

fn boundary_tangency() -> Outcome {
    let mut r = rng(7);
    let psi = smoothstep_actuation();
    let linear: Vec<(&str, Mechanism)> = vec![
        ("copy", mech_copy()),
        ("damped", mech_damped(psi)),
        ("linear_const(1,0)", mech_linear_const(1.0, 0.0).unwrap()),
        ("blend(0.3; copy, damped)", affine_combine(constant_weight(0.3), mech_copy(), mech_damped(psi))),
        (
            "blend(ψ; damped, copy)",
            affine_combine(Arc::new(move |e: &Config| psi.eval(e.distance())), mech_damped(psi), mech_copy()),
        ),
    ];
    let pushing = add_form(mech_copy(), vec![pushing_form(psi)]);
    let mut worst: f64 = 0.0;
    let mut min_push = f64::INFINITY;
    let mut not_linear = Vec::new();
    for (name, m) in &linear {
        if !m.is_linear() || !verify_linearity(&**m, 200) {
            not_linear.push(*name);
        }
    }
    for _ in 0..1000 {
        let cn = Vec2::new(r.gen_range(-10.0..10.0), r.gen_range(-10.0..10.0));
        let e = Config::new(cn + unit(r.gen_range(0.0..TAU)) * 2.0, cn);
        let x = unit(r.gen_range(0.0..TAU)) * r.gen_range(0.01..5.0);
        for (_, m) in &linear {
            worst = worst.max((m.fiber_velocity(&e, x) - x).dot(e.offset()).abs());
        }
        min_push = min_push.min((pushing.fiber_velocity(&e, x) - x).dot(e.offset()));
    }
    let push_linear = verify_linearity(&*pushing, 200);
    check(
        worst <= 1e-10 && min_push > 0.0 && !push_linear && not_linear.is_empty(),
        format!(
            "{} linear mechanisms × 1000 boundary configs: max |⟨vM−vN, cM−cN⟩| {worst:.2e} (≤ 1e-10); \
             pushing composite: min {min_push:.3e} (> 0), verify_linearity={push_linear}",
            linear.len()
        ),
    )
}

// 8 ─────────────────────────────────────────────────────────────────────────

fn plan_contracts() -> Outcome {
    let mut r = rng(8);
    let (mut start_res, mut proj_res, mut goal_res): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let (mut mt_start, mut mt_goal): (f64, f64) = (0.0, 0.0);
    let mut collisions = 0;
    let gap = |a: &Config, b: &Config| (a.cm - b.cm).norm().max((a.cn - b.cn).norm());
    for k in 0..200 {
        let cn0 = Vec2::new(r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0));
        let gamma = random_spline(&mut r, cn0);
        let e = offset_start(&mut r, cn0, (2.0, 6.0));
        let e_goal = offset_start(&mut r, cn0, (2.0, 6.0));

        let mech = match k % 3 {
            0 => mech_copy(),
            1 => mech_radial(r.gen_range(0.0..1.0)),
            _ => mech_orbit(r.gen_range(-2.0..2.0)),
        };
        let opts = PlanOptions { step: STEP, stride: 25 };
        let plan = extended_plan(&gamma, &e, &e_goal, &*mech, &Reparam::Identity, opts).unwrap();
        if !plan.completed() {
            collisions += 1;
            continue;
        }
        let target = integrate_lift(&*mech, &e_goal, &gamma, STEP).unwrap();
        start_res = start_res.max(gap(plan.first().unwrap(), &e));
        goal_res = goal_res.max(gap(plan.last().unwrap(), target.end()));
        for (t, s) in plan.times.iter().zip(&plan.states) {
            proj_res = proj_res.max((s.cn - gamma.position(*t)).norm());
        }

        // moving target: a goal carried along by its own mechanism
        let linear = match k % 3 {
            0 => mech_copy(),
            1 => mech_damped(smoothstep_actuation()),
            _ => affine_combine(constant_weight(r.gen_range(0.0..1.0)), mech_copy(), mech_damped(smoothstep_actuation())),
        };
        let nu = integrate_lift(&*mech_radial(0.5), &e_goal, &gamma, STEP).unwrap().path;
        let mt = moving_target_plan(&e, &nu, &*linear).unwrap();
        if !mt.completed() {
            collisions += 1;
            continue;
        }
        mt_start = mt_start.max(gap(mt.first().unwrap(), &e));
        mt_goal = mt_goal.max(gap(mt.last().unwrap(), nu.last()));
    }
    check(
        collisions == 0 && start_res <= 1e-9 && proj_res <= 1e-9 && goal_res <= 1e-6 && mt_start <= 1e-9 && mt_goal <= 1e-9,
        format!(
            "200 scenarios: extended plan start {start_res:.1e}, projection {proj_res:.1e} (≤ 1e-9), lifted goal \
             {goal_res:.1e} (≤ 1e-6); moving target start {mt_start:.1e}, end {mt_goal:.1e} (≤ 1e-9); \
             {collisions} aborted by collisions"
        ),
    )
}

// 9 ─────────────────────────────────────────────────────────────────────────

fn planner_vs_brute_force() -> Outcome {
    let mut r = rng(9);
    let mut worst: f64 = 0.0;
    let mut min_clearance = f64::INFINITY;
    for k in 0..200 {
        let cn = Vec2::new(r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0));
        let e = offset_start(&mut r, cn, (2.0, 7.0));
        // every fourth pair is close to antipodal to exercise the detours
        let e_goal = if k % 4 == 0 {
            let back = -e.offset().normalized().unwrap();
            Config::new(cn + Vec2::new(back.x, back.y) * r.gen_range(2.0..7.0) + unit(r.gen_range(0.0..TAU)) * 0.05, cn)
        } else {
            offset_start(&mut r, cn, (2.0, 7.0))
        };
        if e_goal.distance() < 2.0 {
            continue;
        }
        let plan = fiber_plan(&e, &e_goal).unwrap();
        let brute = oracle::shortest_path_length(e.cm, e_goal.cm, cn, 2.0);
        worst = worst.max((plan.length - brute).abs());
        for i in 0..=1000 {
            min_clearance = min_clearance.min((plan.point_at(i as f64 / 1000.0) - cn).norm());
        }
    }
    check(
        worst <= 1e-3 && min_clearance >= 2.0 - 1e-6,
        format!("max |length − oracle| {worst:.2e} (≤ 1e-3); min clearance {min_clearance:.12} (≥ 2 − 1e-6)"),
    )
}

// 10 ────────────────────────────────────────────────────────────────────────

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("scenario.json");
    std::fs::write(
        &scenario,
        r#"{
  "version": 1,
  "mechanism": {"kind": "composite", "base": {"kind": "damped"}, "forms": [{"kind": "pushing"}]},
  "initial": {"cM": [3.0, 0.5], "cN": [0.0, 0.0]},
  "obstacle": {"kind": "random_spline", "waypoints": 5, "radius": 2.0, "speed": 1.5},
  "duration": 3.0,
  "step": 0.001,
  "seed": 20240611
}"#,
    )
    .unwrap();
    let run = |cmd: &[&str], out: &str| {
        let out = dir.path().join(out);
        let status = Command::new(env!("CARGO_BIN_EXE_fibersim"))
            .args(cmd)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        (status.code(), std::fs::read(out).unwrap_or_default())
    };
    let sc = scenario.to_str().unwrap();
    let sim = ["simulate", "--scenario", sc];
    let plan = ["plan", "--scenario", sc, "--start", "3,0.5", "--goal", "-2.5,-1", "--stride", "50"];
    let (c1, a) = run(&sim, "a.csv");
    let (c2, b) = run(&sim, "b.csv");
    let (c3, p) = run(&plan, "p.csv");
    let (c4, q) = run(&plan, "q.csv");
    let sim_ok = c1 == c2 && matches!(c1, Some(0 | 2)) && !a.is_empty() && a == b;
    let plan_ok = c3 == c4 && matches!(c3, Some(0 | 2)) && !p.is_empty() && p == q;
    check(
        sim_ok && plan_ok,
        format!(
            "simulate: {} bytes, identical={}; plan: {} bytes, identical={}",
            a.len(),
            a == b,
            p.len(),
            p == q
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("exponential law", exponential_law),
        ("direction constancy", direction_constancy),
        ("orbit law", orbit_law),
        ("closed form vs integrator", closed_form_vs_integrator),
        ("collision disk soundness", soundness),
        ("forced collision", forced_collision),
        ("boundary tangency", boundary_tangency),
        ("plan endpoint contracts", plan_contracts),
        ("planner vs brute force", planner_vs_brute_force),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = run();
        failed += usize::from(!outcome.pass);
        println!(
            "criterion {:>2} {:<27} {}  {} [{:.2} s]",
            k + 1,
            name,
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail,
            started.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
