//! Bundled models and scenarios used by the test suites and the CLI examples.
//!
//! Three ready-made models ship with the crate: a 2-in 2-out feed-forward
//! example network, a scalar NARMA benchmark, and a magnetic-levitation
//! position model trained from measurement data. The scenario files pair the
//! NARMA models with their standard initial sets, input ranges, horizons,
//! and (for the benchmark) the safety constraint `x <= 16`.

use crate::network::{self, NarmaModel, Network, Scenario};
use std::path::PathBuf;

const EXAMPLE1_MLP: &str = include_str!("../fixtures/example1_mlp.json");
const EXAMPLE2_NARMA: &str = include_str!("../fixtures/example2_narma.json");
const MAGLEV_NARMA: &str = include_str!("../fixtures/maglev_narma.json");
const EXAMPLE2_SCENARIO: &str = include_str!("../fixtures/example2_scenario.json");
const MAGLEV_SCENARIO: &str = include_str!("../fixtures/maglev_scenario.json");

/// 2 inputs, one tanh hidden layer of 5 neurons, 2 linear outputs.
pub fn example1_mlp() -> Network {
    network::parse_network_str(EXAMPLE1_MLP, "fixtures/example1_mlp.json")
        .expect("bundled fixture is valid")
}

/// Scalar NARMA benchmark model, d_x = d_u = 0, tanh hidden layer of 5.
pub fn example2_narma() -> NarmaModel {
    network::parse_narma_str(EXAMPLE2_NARMA, "fixtures/example2_narma.json")
        .expect("bundled fixture is valid")
}

/// Magnetic-levitation position model, d_x = d_u = 0, tanh hidden layer of 8.
/// State is the magnet position, input is the coil current.
pub fn maglev_narma() -> NarmaModel {
    network::parse_narma_str(MAGLEV_NARMA, "fixtures/maglev_narma.json")
        .expect("bundled fixture is valid")
}

/// X0 = [-0.2, 0.2], U = [0.8, 1.2], horizon 50, counts (10, 10), hull mode,
/// safety x <= 16.
pub fn example2_scenario(model: &NarmaModel) -> Scenario {
    network::parse_scenario_str(EXAMPLE2_SCENARIO, "fixtures/example2_scenario.json", model)
        .expect("bundled fixture is valid")
}

/// X0 = [4, 5], U = [0.1, 1.1], horizon 50, counts (5, 5), hull mode.
pub fn maglev_scenario(model: &NarmaModel) -> Scenario {
    network::parse_scenario_str(MAGLEV_SCENARIO, "fixtures/maglev_scenario.json", model)
        .expect("bundled fixture is valid")
}

/// On-disk location of a bundled fixture file, for tests and CLI examples.
/// `name` is the bare file name, e.g. `"example1_mlp.json"`.
pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}
