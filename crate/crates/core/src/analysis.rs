//! Closed-form collision calculus for constant-coefficient linear mechanisms
//! `vM = α·vN + β·vN^⊥`.
//!
//! With `A = αI + βJ` the mechanism integrates to `cM(t) = A·cN(t) − c0`.
//! Away from `(α, β) = (1, 0)` the matrix `B = A − I` is invertible and
//!
//! ```text
//! cM(t) − cN(t) = B·(cN(t) − c̃0),   c̃0 = (I + B⁻¹)·cN(0) − B⁻¹·cM(0)
//! ```
//!
//! so collisions are decided by where the obstacle sits relative to `c̃0`:
//! inside the disk `D` (radius `2/|B|`) they are certain, outside `D′`
//! (radius `2·|B⁻¹|`) impossible, and exactly inside `B⁻¹(2-disk) + c̃0`.

use crate::bundle::{Config, CONTACT_DISTANCE};
use crate::error::{Error, Result};
use crate::geometry::{conformal, inverse, operator_norm, Mat2, Vec2};
use crate::path::SampledPath;

/// Below this operator norm of `B` the disks are not reported.
pub const NEAR_DEGENERATE_NORM: f64 = 1e-6;

/// Time spacing of the sampled adversary path.
pub const ADVERSARY_SAMPLE_DT: f64 = 1e-3;
/// The charge is a straight line, so a coarser grid loses nothing.
const ADVERSARY_MAX_SEGMENTS: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionDisks {
    pub c_tilde0: Vec2,
    pub b_inv: Mat2,
    /// Radius of `D`.
    pub r_d: f64,
    /// Radius of `D′`.
    pub r_d_prime: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionGeometry {
    pub alpha: f64,
    pub beta: f64,
    pub a: Mat2,
    pub b: Mat2,
    /// `cM(t) = A·cN(t) − c0`.
    pub c0: Vec2,
    /// `(α, β) = (1, 0)` exactly: the offset `cM − cN` is conserved.
    pub degenerate: bool,
    /// `0 < |B| <` [`NEAR_DEGENERATE_NORM`]: disks would be huge and are
    /// withheld.
    pub near_degenerate: bool,
    pub disks: Option<CollisionDisks>,
}

impl CollisionGeometry {
    fn disks(&self) -> Result<&CollisionDisks> {
        self.disks.as_ref().ok_or(Error::DegenerateGeometry)
    }

    /// `|c0|`, the conserved distance in the degenerate case.
    pub fn offset_norm(&self) -> f64 {
        self.c0.norm()
    }
}

pub fn collision_geometry(alpha: f64, beta: f64, cm0: Vec2, cn0: Vec2) -> Result<CollisionGeometry> {
    if alpha == 0.0 && beta == 0.0 {
        return Err(Error::InvalidParameters("alpha and beta must not both vanish".into()));
    }
    if !(alpha.is_finite() && beta.is_finite()) {
        return Err(Error::InvalidParameters("alpha and beta must be finite".into()));
    }
    Config::admissible(cm0, cn0)?;
    let a = conformal(alpha, beta);
    let b = a.sub_mat(&Mat2::IDENTITY);
    let c0 = a.apply(cn0) - cm0;
    let degenerate = alpha == 1.0 && beta == 0.0;
    let b_norm = operator_norm(&b);
    let near_degenerate = !degenerate && b_norm < NEAR_DEGENERATE_NORM;
    let disks = if degenerate || near_degenerate {
        None
    } else {
        let b_inv = inverse(&b)?;
        let c_tilde0 = cn0 + b_inv.apply(cn0) - b_inv.apply(cm0);
        let r_d = CONTACT_DISTANCE / b_norm;
        // equal for conformal B; keep D ⊆ D′ under rounding
        let r_d_prime = (CONTACT_DISTANCE * operator_norm(&b_inv)).max(r_d);
        Some(CollisionDisks {
            c_tilde0,
            b_inv,
            r_d,
            r_d_prime,
        })
    };
    Ok(CollisionGeometry {
        alpha,
        beta,
        a,
        b,
        c0,
        degenerate,
        near_degenerate,
        disks,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObstacleClass {
    /// Inside `D`: the disks overlap.
    Collision,
    /// Outside `D′`: the configuration is admissible.
    Admissible,
    /// In the shell `D′ − D`; decided only by [`exact_collision`].
    Indeterminate,
}

pub fn classify_obstacle_position(geom: &CollisionGeometry, cn: Vec2) -> Result<ObstacleClass> {
    let d = geom.disks()?;
    let r = (cn - d.c_tilde0).norm();
    Ok(if r < d.r_d {
        ObstacleClass::Collision
    } else if r >= d.r_d_prime {
        ObstacleClass::Admissible
    } else {
        ObstacleClass::Indeterminate
    })
}

/// Strict overlap `|B(cN − c̃0)| < 2`; touching is admissible.
pub fn exact_collision(geom: &CollisionGeometry, cn: Vec2) -> Result<bool> {
    let d = geom.disks()?;
    Ok(geom.b.apply(cn - d.c_tilde0).norm() < CONTACT_DISTANCE)
}

pub fn closed_form_cm(geom: &CollisionGeometry, cn_t: Vec2) -> Vec2 {
    geom.a.apply(cn_t) - geom.c0
}

/// Straight constant-speed obstacle path from `cn0` towards `c̃0`, stopping
/// at depth `rD/2` inside `D`, sampled every [`ADVERSARY_SAMPLE_DT`].
pub fn adversary_path(geom: &CollisionGeometry, cn0: Vec2, speed: f64) -> Result<SampledPath<Vec2>> {
    let d = geom.disks()?;
    if !(speed > 0.0 && speed.is_finite()) {
        return Err(Error::InvalidParameters(format!("speed must be positive, got {speed}")));
    }
    let to_center = d.c_tilde0 - cn0;
    let dist = to_center.norm();
    let travel = dist - 0.5 * d.r_d;
    let dir = to_center
        .normalized()
        .ok_or_else(|| Error::InvalidParameters("obstacle already at the collision center".into()))?;
    if !(travel > 0.0) {
        return Err(Error::InvalidParameters("obstacle starts inside the collision disk".into()));
    }
    let duration = travel / speed;
    if !duration.is_finite() {
        return Err(Error::InvalidParameters(format!("charge duration is not finite: {duration}")));
    }
    let segments = (duration / ADVERSARY_SAMPLE_DT).ceil().clamp(1.0, ADVERSARY_MAX_SEGMENTS) as usize;
    SampledPath::sample(0.0, duration, segments, |t| cn0 + dir * (speed * t))
}

const COLLINEAR_TOL: f64 = 1e-10;

/// For `β = 0`: `c̃0` lies on the line through `cM(0)` and `cN(0)` with
/// `|c̃0 − cM(0)| = α·|c̃0 − cN(0)|`.
pub fn collinearity_check(alpha: f64, cm0: Vec2, cn0: Vec2) -> bool {
    if !(alpha > 0.0) || alpha == 1.0 {
        return false;
    }
    let c_tilde0 = cn0 * (alpha / (alpha - 1.0)) - cm0 * (1.0 / (alpha - 1.0));
    let scale = 1.0 + c_tilde0.norm().max(cm0.norm()).max(cn0.norm());
    let cross = (c_tilde0 - cm0).cross(cn0 - cm0);
    let ratio = (c_tilde0 - cm0).norm() - alpha * (c_tilde0 - cn0).norm();
    cross.abs() <= COLLINEAR_TOL * scale * scale && ratio.abs() <= COLLINEAR_TOL * scale * alpha.max(1.0)
}
