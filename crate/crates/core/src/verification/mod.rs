//! Executable checks of the discrete identities and estimates.

mod audit;
mod identities;
mod inequalities;
mod report;

pub use audit::*;
pub use identities::{
    check_dualities, check_dualities_with, OperatorSuite, StandardOperators, CONVECTION, DIFFUSION, DIV_GRAD, DUAL_MASS,
    TRILINEAR,
};
pub use inequalities::*;
pub use report::{CheckResult, SuiteReport, REPORT_CSV_HEADER};
