//! Fixtures shared by the criterion benches in `benches/`.

use std::path::PathBuf;

use sentinel_core::{load_scenario, Observation, Scenario};

/// Path of a scenario shipped in the repository's `scenarios/` directory.
pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

pub fn pearl_harbor() -> Scenario {
    load_scenario(&scenario_path("pearl_harbor.json")).expect("shipped scenario loads")
}

/// The two simultaneous silence reports used in the scripted replay.
pub fn silence(period: u32) -> Vec<Observation> {
    vec![Observation {
        period,
        signal: "RADIO".into(),
        value: "SILENCE".into(),
        sources: vec!["COM14".into(), "COM16".into()],
    }]
}
