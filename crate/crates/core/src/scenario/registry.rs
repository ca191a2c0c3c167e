//! Scenario files shipped with the library.

use super::{ScenarioConfig, ScenarioError};

const FILES: &[(&str, &str)] = &[
    (
        "dissipative_uniqueness",
        include_str!("../../scenarios/dissipative_uniqueness.toml"),
    ),
    (
        "entanglement_duration",
        include_str!("../../scenarios/entanglement_duration.toml"),
    ),
    ("fock_oracle", include_str!("../../scenarios/fock_oracle.toml")),
    ("hybrid_grid", include_str!("../../scenarios/hybrid_grid.toml")),
    (
        "magnetometry_assisted",
        include_str!("../../scenarios/magnetometry_assisted.toml"),
    ),
    (
        "magnetometry_pn",
        include_str!("../../scenarios/magnetometry_pn.toml"),
    ),
    ("map_check", include_str!("../../scenarios/map_check.toml")),
    (
        "memory_kappa1",
        include_str!("../../scenarios/memory_kappa1.toml"),
    ),
    (
        "squeezing_scan",
        include_str!("../../scenarios/squeezing_scan.toml"),
    ),
    (
        "steady_state_z2.5",
        include_str!("../../scenarios/steady_state_z2.5.toml"),
    ),
    ("z_cs_d2", include_str!("../../scenarios/z_cs_d2.toml")),
];

#[derive(Debug, Clone)]
pub struct ShippedScenario {
    pub id: &'static str,
    pub source: &'static str,
}

impl ShippedScenario {
    pub fn config(&self) -> Result<ScenarioConfig, ScenarioError> {
        ScenarioConfig::from_toml_str(self.source)
    }
}

/// All shipped scenarios, sorted by id.
pub fn shipped() -> Vec<ShippedScenario> {
    FILES
        .iter()
        .map(|&(id, source)| ShippedScenario { id, source })
        .collect()
}

pub fn shipped_by_id(id: &str) -> Option<ShippedScenario> {
    shipped().into_iter().find(|s| s.id == id)
}
