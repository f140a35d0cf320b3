//! Toolkit for building and evaluating redundant-watchdog dependability
//! policies.
//!
//! The pipeline has three legs that share one vocabulary:
//!
//! - [`ariel`] compiles a small recovery/configuration language (task and
//!   watchdog declarations, logical groups, guarded recovery actions) into
//!   an interpretable instruction list (r-code) plus a deployment
//!   configuration.
//! - [`sim`] is a deterministic discrete-event simulator of the runtime:
//!   nodes, heartbeats, watchdog countdowns, a Backbone entity-state
//!   database that runs the r-code interpreter on error notifications, and
//!   fault injection with dependability metrics.
//! - [`gspn`] + [`rwd`] analyze the same policies analytically: a
//!   generalized stochastic Petri net engine (reachability, vanishing
//!   marking elimination, CTMC steady state, throughputs, P-invariants)
//!   and builders for the redundant-watchdog models under OR / AND /
//!   k-out-of-n voting.
//!
//! The [`cli`] module wires everything into the `arielwd` binary.

pub mod ariel;
pub mod cli;
pub mod gspn;
pub mod policy;
pub mod rwd;
pub mod sim;

pub use policy::VotingPolicy;
