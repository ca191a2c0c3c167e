//! End-to-end protocols built from the maps, measurements and dynamics.

pub mod magnetometry;
pub mod memory;
pub mod optomech;
pub mod squeezing;

pub use magnetometry::{
    entanglement_assisted_snr, magnetometry_run, MagnetometryConfig, MagnetometryResult, SnrPoint,
};
pub use memory::{
    memory_closed_form, memory_fidelity_report, memory_store, InputSet, InputState, MemoryConfig,
    MemoryReport,
};
pub use optomech::{
    hybrid_closed_form, hybrid_epr, hybrid_epr_protocol, optomech_kappa, HybridEpr, OptomechParams,
};
pub use squeezing::{
    analytic_eta_star, heisenberg_scan, optimize_eta, spin_squeezing_xi, EtaOptimum, HeisenbergScan, ScanRow,
    SqueezingBudget,
};
