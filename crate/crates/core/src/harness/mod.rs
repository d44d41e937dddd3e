//! In-process scenario runner and timing benchmark wiring all parties
//! together.

mod bench;
mod scenario;

pub use bench::{bench, BenchConfig, BenchReport, BenchRow, ScalingCheck};
pub use scenario::{
    run_scenario, vocabulary, QueryOutcome, ScenarioConfig, ScenarioReport, TamperOutcome, Transcript, BASE_TIME,
};
