//! Regenerates the bundled data files under `data/` at the workspace root.
//! The generator is pure arithmetic, so the files only change when the
//! synthetic-world formulas do; run after editing those to refresh the
//! checked-in copies.

use std::path::{Path, PathBuf};

use scc_core::io::{meta_to_csv, write_text};
use scc_core::scenario::{history_to_csv, scenario_to_csv, sidecar_path, sidecar_to_toml, Scenario};
use scc_core::synthetic::{
    synthetic_history, synthetic_meta, synthetic_world, synthetic_world_variant, toy_world,
    GrowthVariant,
};

fn write_scenario(dir: &Path, scenario: &Scenario) {
    let csv_path = dir.join(format!("{}.csv", scenario.id()));
    write_text(&csv_path, &scenario_to_csv(scenario)).unwrap();
    write_text(&sidecar_path(&csv_path), &sidecar_to_toml(scenario)).unwrap();
    println!("wrote {}", csv_path.display());
}

fn main() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..");
    let data = root.join("data");

    let scenarios = data.join("scenarios");
    write_scenario(&scenarios, &synthetic_world());
    write_scenario(&scenarios, &synthetic_world_variant(GrowthVariant::High));
    write_scenario(&scenarios, &synthetic_world_variant(GrowthVariant::Low));
    write_scenario(&scenarios, &toy_world());

    let history = synthetic_history().unwrap();
    let history_path = data.join("history/emissions_1960_2015.csv");
    write_text(&history_path, &history_to_csv(&history)).unwrap();
    println!("wrote {}", history_path.display());

    let meta_path = data.join("meta/impact_observations.csv");
    write_text(&meta_path, &meta_to_csv(&synthetic_meta())).unwrap();
    println!("wrote {}", meta_path.display());
}
