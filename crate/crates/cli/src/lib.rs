//! Scenario runner: reads versioned JSON scenarios, dispatches them to the
//! calculus and lattice libraries, and reports residuals with verdicts.

pub mod catalogue;
pub mod error;
pub mod report;
pub mod scenario;
pub mod tasks;

pub use error::CliError;
pub use report::{run_scenario, RunReport};
pub use scenario::{Overrides, Scenario, Settings, Task};
