//! Scenario-driven sweeps and the pieces behind the `onoma` command line.

pub mod plot;
pub mod report;
pub mod scenario;
pub mod sweep;
pub mod table;
pub mod validate;

pub use report::{compare_report, Report};
pub use scenario::{Engine, OmegaConvention, Scenario};
pub use sweep::{run_sweep, SweepRow};
pub use table::{emit_csv, load_csv};
pub use validate::{validate, ValidationReport};
