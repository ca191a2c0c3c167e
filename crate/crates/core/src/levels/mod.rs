//! Interaction asymmetry `Z` from the atomic level structure.

mod angular;
mod cesium;
mod scheme;

pub use angular::{
    clebsch_gordan, clebsch_gordan_twice, hyperfine_strength, wigner_6j, wigner_6j_twice, HalfInt,
};
pub use cesium::{cesium_d2_tables, cs_d2_data, CsD2Data, DrivePolarization};
pub use scheme::{
    path_rate, z_from_rates, z_from_scheme, BranchingResult, DipolePath, ExcitedLevel, GroundLevel,
    LevelScheme, Regime,
};
