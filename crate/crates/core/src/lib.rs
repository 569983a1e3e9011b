//! Dynamic Bayesian early-warning engine.
//!
//! The engine turns a scenario (a crisis network, a raster state space, signal
//! likelihoods and a cost model) into filtered beliefs, first-passage
//! projections and an alert recommendation for every period of an analyst
//! session.
//!
//! Module map:
//! - [`network`]: discrete Bayesian networks, exact inference and d-separation.
//! - [`graph`]: raster graphs, trapping sets, hop distances and lattices.
//! - [`transition`]: per-realization transition matrices.
//! - [`projection`]: first-passage distributions and their marginals.
//! - [`inference`]: exact joint filtering over (D, R, X).
//! - [`alert`]: present values, certain equivalents and alert timing.
//! - [`scenario`], [`session`], [`store`]: scenario files, sessions, replay and persistence.

pub mod alert;
pub mod csvout;
pub mod error;
pub mod graph;
pub mod inference;
pub mod network;
pub mod projection;
pub mod scenario;
pub mod session;
pub mod store;
pub mod transition;

pub use alert::{
    certain_equivalent, present_value, recommend_alert, recommend_from_passages, AlertRecommendation,
    AlertType, CertainEquivalent, CostModel, Disutility, FailureWindow,
};
pub use error::{Error, Result};
pub use graph::{generate_lattice, load_raster_graph, shortest_hops, GraphData, LatticeSpec, RasterGraph, RasterId};
pub use inference::{
    advance_belief, advance_belief_joint, init_belief, BeliefState, Observation, RSpace, SignalModel,
    SignalRegistry, SourceModel,
};
pub use network::{build_network, ConditionalTable, CrisisNetwork, Dag, DiscreteVariable, Evidence, VariableKind};
pub use projection::{first_passage, marginal_attack_distribution, AttackDistribution, FirstPassageDistribution, StateDistribution};
pub use scenario::{load_scenario, load_scenario_str, Scenario, ScenarioDoc};
pub use session::{
    evaluate, export_session, replay, run_replay, session_outputs, step_session, what_if, Overrides, ReplayData, Session, StepOutput,
};
pub use store::Store;
pub use transition::{build_transition_matrix, DRealization, TransitionModel};

#[cfg(test)]
#[path = "../tests/support/oracles.rs"]
pub(crate) mod oracles;
