//! Model presets, the exact-diagonalization oracle, experiment configs and
//! the scaling driver behind the `fast` binary.
//!
//! Sign convention: `χ_ij(t) = −iθ(t)·tr(ρ[A_i(t), B_j])` and
//! `G^R_ab(t) = −iθ(t)·tr(ρ{c_a(t), c_b†})` with `θ(0) = 1`.

mod experiment;
mod model;
mod oracle;
mod scaling;

pub use experiment::{
    csv_string, execute, exit_code, run_experiment, run_oracle, Comparison, ExperimentConfig, ExperimentOutput, OutputFiles,
    Report, RunLog, ShotsSetting, TargetPreset,
};
pub use model::{build_hamiltonian, Boundary, CustomTerm, ModelName, ModelSpec};
pub use oracle::{exact_correlations, oracle_correlations, OracleEntry, OracleResult, MAX_ORACLE_MODES};
pub use scaling::{
    expected_circuit_exponent, fit_log_slope, scaling_study, ScalingKind, ScalingReport, ScalingRow, SweepConfig,
};
