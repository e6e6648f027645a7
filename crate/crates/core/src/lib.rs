//! Solver toolkit for the static aircraft landing problem.
//!
//! * [`instance`]: problem data, the `airland` text format, feasibility checks.
//! * [`scheduler`]: exact landing times for a fixed single-runway sequence.
//! * [`runway`]: splitting a global sequence over several runways.
//! * [`anneal`]: ensemble simulated annealing over landing sequences.
//! * [`oracle`]: dynamic-programming and exhaustive references.
//! * [`report`]: benchmark reference values, gaps and CSV rows.

pub mod anneal;
pub mod error;
pub mod instance;
pub mod oracle;
pub mod report;
pub mod runway;
pub mod scheduler;

pub use error::{AlpError, Result};
pub use instance::{
    feasibility_check, generate_random_instance, parse_airland, validate_instance, write_airland,
    Aircraft, Cost, FeasibilityReport, GeneratorConfig, Instance, InstanceViolation,
    SeparationMode, Time, Violation,
};
pub use scheduler::{optimize_sequence, DerivedState, GammaSet, Schedule};
