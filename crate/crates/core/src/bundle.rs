//! The fibration `p: E → B` of configuration spaces.
//!
//! [`BundleModel`] presents a total space by a single scalar constraint
//! `g(e) ≥ 0`, together with the projection to the base and its differential.
//! [`TwoDisk`] is the canonical instance: two unit-radius vehicles in the
//! plane, the ego `M` (fiber coordinate) and the obstacle `N` (base
//! coordinate), whose interiors must stay disjoint.

use crate::error::{Error, Result};
use crate::geometry::Vec2;

/// Width of the band around the constraint boundary inside which floating
/// arithmetic is forgiven.
pub const ADMISSIBILITY_TOL: f64 = 1e-9;

/// Minimum center distance of two unit disks with disjoint interiors.
pub const CONTACT_DISTANCE: f64 = 2.0;

/// A point of the total space: centers of the ego and obstacle disks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    pub cm: Vec2,
    pub cn: Vec2,
}

impl Config {
    /// Builds a configuration without checking admissibility.
    pub const fn new(cm: Vec2, cn: Vec2) -> Self {
        Self { cm, cn }
    }

    /// Builds a configuration, rejecting non-finite or overlapping disks.
    pub fn admissible(cm: Vec2, cn: Vec2) -> Result<Self> {
        let e = Self { cm, cn };
        e.check_admissible()?;
        Ok(e)
    }

    pub fn check_admissible(&self) -> Result<()> {
        let g = boundary_distance(self);
        if !self.is_finite() || g < -ADMISSIBILITY_TOL {
            return Err(Error::InadmissibleConfig {
                boundary_distance: g,
            });
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.cm.is_finite() && self.cn.is_finite()
    }

    /// `cM − cN`.
    pub fn offset(&self) -> Vec2 {
        self.cm - self.cn
    }

    pub fn distance(&self) -> f64 {
        self.offset().norm()
    }
}

/// A tangent vector to the total space at `at`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TotalTangent {
    pub at: Config,
    pub vm: Vec2,
    pub vn: Vec2,
}

impl TotalTangent {
    pub fn is_vertical(&self) -> bool {
        self.vn == Vec2::ZERO
    }
}

/// A tangent vector to the base at the point `at`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseTangent {
    pub at: Vec2,
    pub v: Vec2,
}

impl BaseTangent {
    pub fn new(at: Vec2, v: Vec2) -> Self {
        Self { at, v }
    }
}

/// A fibration presented by one scalar constraint on the total space.
pub trait BundleModel {
    type Point;
    type Base;

    fn total_dim(&self) -> usize;
    fn base_dim(&self) -> usize;
    /// Non-negative exactly on the total space; zero on its boundary.
    fn constraint(&self, e: &Self::Point) -> f64;
    fn project(&self, e: &Self::Point) -> Self::Base;

    fn is_admissible(&self, e: &Self::Point) -> bool {
        self.constraint(e) >= -ADMISSIBILITY_TOL
    }

    fn on_boundary(&self, e: &Self::Point) -> bool {
        self.constraint(e).abs() <= ADMISSIBILITY_TOL
    }
}

/// Two disks of radius 1 in the plane, projected onto the obstacle center.
#[derive(Debug, Clone, Copy, Default)]
pub struct TwoDisk;

impl BundleModel for TwoDisk {
    type Point = Config;
    type Base = Vec2;

    fn total_dim(&self) -> usize {
        4
    }

    fn base_dim(&self) -> usize {
        2
    }

    fn constraint(&self, e: &Config) -> f64 {
        boundary_distance(e)
    }

    fn project(&self, e: &Config) -> Vec2 {
        project(e)
    }
}

pub fn project(e: &Config) -> Vec2 {
    e.cn
}

pub fn differential_project(y: &TotalTangent) -> BaseTangent {
    BaseTangent {
        at: y.at.cn,
        v: y.vn,
    }
}

/// `|cM − cN| − 2`: non-negative iff admissible, zero on the boundary.
pub fn boundary_distance(e: &Config) -> f64 {
    e.distance() - CONTACT_DISTANCE
}

/// Whether `y` keeps the configuration inside the total space to first order.
///
/// Interior configurations admit every velocity. Inside the tolerance band
/// around the boundary the center distance must not decrease infinitesimally,
/// i.e. `⟨vM − vN, cM − cN⟩ ≥ 0` (up to the band).
pub fn is_admissible_velocity(y: &TotalTangent) -> Result<bool> {
    y.at.check_admissible()?;
    if boundary_distance(&y.at) > ADMISSIBILITY_TOL {
        return Ok(true);
    }
    Ok((y.vm - y.vn).dot(y.at.offset()) >= -ADMISSIBILITY_TOL)
}

/// Unit vertical field pointing away from the obstacle.
pub fn inward_normal_field(e: &Config) -> TotalTangent {
    let vm = e.offset().normalized().unwrap_or(Vec2::ZERO);
    TotalTangent {
        at: *e,
        vm,
        vn: Vec2::ZERO,
    }
}
