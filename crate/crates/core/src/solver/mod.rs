mod config;
mod linear;
mod momentum;
mod state;
mod stepping;
mod transport;

pub use config::{ForcingMode, SolverConfig};
pub use linear::{norm1, residual_inf, SparseLu};
pub use momentum::{coupling_block, momentum_residual, momentum_rhs, momentum_solve, saddle_system, velocity_block, MomentumInputs};
pub use state::{Forcing, Problem, TimeState, VectorFn};
pub use stepping::{advance_timestep, run_from, run_simulation, DiagnosticsSink, MemorySink, StepReport, Trajectory};
pub use transport::{transport_matrix, transport_solve};
