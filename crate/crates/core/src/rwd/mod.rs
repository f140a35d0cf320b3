//! Stochastic models of the redundant watchdog under the three voting
//! policies, plus throughput sweeps and Monte Carlo cross-validation.

mod model;
mod monte_carlo;
mod sweep;

pub use model::{build, RoleMap, RwdModel, RwdParams};
pub use monte_carlo::{monte_carlo, McEstimate};
pub use sweep::{sweep, write_sweep_csv, write_sweep_gnuplot, SweepRow, SweepThroughputs};
