//! Machine-readable record printed by `analyze`.

use fibersim_core::analysis::{collision_geometry, CollisionGeometry};
use fibersim_core::{Mat2, Vec2};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct AnalysisReport {
    pub alpha: f64,
    pub beta: f64,
    /// Row-major `[[a11, a12], [a21, a22]]`.
    #[serde(rename = "A")]
    pub a: [[f64; 2]; 2],
    #[serde(rename = "B")]
    pub b: [[f64; 2]; 2],
    pub c0: [f64; 2],
    pub c_tilde0: Option<[f64; 2]>,
    #[serde(rename = "rD")]
    pub r_d: Option<f64>,
    #[serde(rename = "rDPrime")]
    pub r_d_prime: Option<f64>,
    pub degenerate: bool,
    pub near_degenerate: bool,
    /// `|cM − A·cN|`; conserved distance when `degenerate`.
    pub offset_norm: f64,
    /// Set when `α < 0`, a regime the closed forms cover but which has no
    /// worked discussion behind it.
    pub negative_alpha: bool,
}

fn mat(m: &Mat2) -> [[f64; 2]; 2] {
    [[m.a11, m.a12], [m.a21, m.a22]]
}

fn arr(v: Vec2) -> [f64; 2] {
    [v.x, v.y]
}

impl From<&CollisionGeometry> for AnalysisReport {
    fn from(g: &CollisionGeometry) -> Self {
        Self {
            alpha: g.alpha,
            beta: g.beta,
            a: mat(&g.a),
            b: mat(&g.b),
            c0: arr(g.c0),
            c_tilde0: g.disks.map(|d| arr(d.c_tilde0)),
            r_d: g.disks.map(|d| d.r_d),
            r_d_prime: g.disks.map(|d| d.r_d_prime),
            degenerate: g.degenerate,
            near_degenerate: g.near_degenerate,
            offset_norm: g.offset_norm(),
            negative_alpha: g.alpha < 0.0,
        }
    }
}

impl AnalysisReport {
    pub fn compute(alpha: f64, beta: f64, cm0: Vec2, cn0: Vec2) -> Result<Self, CliError> {
        Ok(Self::from(&collision_geometry(alpha, beta, cm0, cn0)?))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
