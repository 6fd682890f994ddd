//! Discrete-time simulator of queue-aware user association in dense
//! small-cell networks.
//!
//! A set of small cells serves mobile users under a macro umbrella. Each
//! decision interval the simulator estimates per-cell traffic statistics,
//! derives G/G/1 congestion descriptors, builds dimensionless service-cost
//! indicators for every user–cell pair, and lets an association policy pick a
//! serving cell per user. Policies range from plain strongest-signal selection
//! to a hybrid controller that solves a capacity-constrained assignment via
//! Lagrangian relaxation and trains an LVQ prototype classifier to mimic the
//! solver at a fraction of the cost.
//!
//! The crate is organized along that pipeline:
//!
//! - [`queue`] — Kingman G/G/1 approximation and traffic-statistics estimation
//! - [`indicators`] — delay / packet-degradation / energy cost indicators
//! - [`optim`] — Lagrangian assignment solver plus a brute-force oracle
//! - [`lvq`] — prototype classifier, feature construction, gap metrics
//! - [`policy`] — baseline policies and the hybrid controller
//! - [`sim`] — topology, mobility, radio, traffic, packet queues, main loop
//! - [`config`], [`batch`], [`metrics`], [`output`] — harness layer
//!
//! Everything is deterministic for a fixed seed: one run is a single logical
//! thread over shared-nothing state, and batch seeds are derived from a master
//! seed so paired comparisons across policies share topology, mobility and
//! traffic realizations.

pub mod batch;
pub mod config;
pub mod error;
pub mod indicators;
pub mod lvq;
pub mod metrics;
pub mod optim;
pub mod output;
pub mod policy;
pub mod queue;
pub mod rng;
pub mod sim;

pub use config::ScenarioConfig;
pub use error::{Error, Result};
pub use metrics::{BatchReport, RunReport};
pub use policy::PolicyKind;
