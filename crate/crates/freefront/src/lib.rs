//! Numerical solver and verification harness for a 1-D free boundary problem
//! with partially degenerate diffusion: a non-diffusing species `u` coupled to
//! a diffusing species `v` on a moving interval `[g(t), h(t)]` whose endpoints
//! obey Stefan conditions `g' = -mu v_x(t, g)`, `h' = -beta v_x(t, h)`.
//!
//! Two independent schemes are provided: a Picard (contraction) outer
//! iteration that alternates a front-fixed parabolic solve for `(v, g, h)`
//! with a method-of-characteristics integration for `u` ([`fixedpoint`]), and
//! a monolithic operator-splitting stepper ([`direct`]) used as a
//! cross-validation oracle. The [`bounds`] module audits computed
//! trajectories against a priori comparison-principle caps and front-speed
//! bounds.

pub mod bounds;
pub mod config;
pub mod direct;
pub mod error;
pub mod fixedpoint;
pub mod grid;
pub mod interp;
pub mod model;
pub mod parabolic;
pub mod runner;
pub mod trajectory;
pub mod transport;

pub use error::Error;
pub use grid::{FrontState, ReferenceGrid};
pub use model::{InitialData, ProblemSpec, ReactionPair};
pub use parabolic::{FieldPair, StepParams};
pub use trajectory::Trajectory;
