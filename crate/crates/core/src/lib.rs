//! Reaction mechanisms on fibrations of configuration spaces.
//!
//! The crate models a controlled system moving under external conditions as
//! a bundle `p: E → B` ([`bundle`]), reactions to the motion of the external
//! conditions as infinitesimal lifting functions ([`lifting`]), parametrized
//! planners built on top of them ([`planner`]), and the closed-form collision
//! calculus of constant-coefficient linear mechanisms ([`analysis`]).

pub mod analysis;
pub mod bundle;
pub mod curves;
pub mod error;
pub mod geometry;
pub mod lifting;
pub mod path;
pub mod planner;

pub use bundle::{BaseTangent, Config, TotalTangent, ADMISSIBILITY_TOL};
pub use error::{Error, Result};
pub use geometry::{Mat2, Vec2};
pub use path::{BaseCurve, SampledPath};
