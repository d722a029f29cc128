//! Simulation laboratory for complaint-driven fairness resolution.
//!
//! Criteria are vertices of an incompatibility graph; a state fixes an
//! independent set of them. Losses arrive either stochastically, from a
//! correlation-set model whose means depend on local configurations, or
//! adversarially, as an arbitrary complaint sequence.
//!
//! - [`model`]: graph, states, actions and the transition rule.
//! - [`environment`]: correlation sets, loss sampling, synthetic instances.
//! - [`cover`]: covers and exact mean reconstruction from cover states.
//! - [`oracle`]: best-state solvers (enumeration, vertex-cover LP, local search).
//! - [`stochastic`]: explore-then-exploit and episodic UCB learners, pseudo-regret.
//! - [`adversarial`]: the barrier algorithm, ski-rental baseline and offline optimum.

pub mod adversarial;
pub mod cover;
pub mod environment;
pub mod error;
pub mod model;
pub mod oracle;
pub mod stochastic;

pub use error::{Error, Result};
pub use model::{Action, CriteriaState, IncompatibilityGraph};
