//! Spatial operators of the MAC scheme, matrix-free and assembled.

mod convection;
mod diffusion;
mod divgrad;
mod flux;
mod gradient;
mod viscosity;

pub use convection::*;
pub use diffusion::*;
pub use divgrad::*;
pub use flux::*;
pub use gradient::*;
pub use viscosity::*;
