//! Correlation functions `tr(ρ[A(t),B])` and `tr(ρ{A(t),B})` from simulated
//! measurements.
//!
//! Each Pauli component `B` of the right-hand operator gets three state
//! preparations. The commutator uses `ρ₁` (rotated by `exp(iπ/4·B)` and
//! evolved), `ρ₂` (evolved) and `ρ₃` (conjugated by `B`, evolved). The
//! anticommutator replaces `ρ₁` by the ancilla-heralded `ρ₊` or `ρ₋`, picked
//! by majority vote over the ancilla bits. Every `A` component is estimated on
//! each state by the strategy of the `(regime, mapping)` cell, and the results
//! are recombined linearly.

mod counts;
mod engine;
mod plan;
mod targets;

pub use counts::{
    brute_force_commutator_circuits, circuits_per_state, closed_form_circuits, one_body_partition,
    standard_family_colors,
};
pub use plan::{reformulate_anticommutator, reformulate_commutator, PlanState, PlanTerm, ThreeTermPlan};
pub use targets::{Target, TargetSet};

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FastError, Result};
use crate::mapping::{FermionOperator, MajoranaBasis, MappingKind};
use crate::sim::{EvolutionCache, Hamiltonian, StateVector};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationKind {
    Commutator,
    Anticommutator,
    General,
}

impl fmt::Display for CorrelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorrelationKind::Commutator => "commutator",
            CorrelationKind::Anticommutator => "anticommutator",
            CorrelationKind::General => "general",
        })
    }
}

/// One `(A, B, t)` correlation to estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationRequest {
    pub kind: CorrelationKind,
    pub a: FermionOperator,
    pub b: FermionOperator,
    pub t: f64,
    pub eps: f64,
    pub delta: f64,
}

impl CorrelationRequest {
    pub fn new(
        kind: CorrelationKind,
        a: FermionOperator,
        b: FermionOperator,
        t: f64,
        eps: f64,
        delta: f64,
    ) -> Result<CorrelationRequest> {
        validate_precision(eps, delta)?;
        if a.modes() != b.modes() {
            return Err(FastError::Domain(format!(
                "A acts on {} modes and B on {}",
                a.modes(),
                b.modes()
            )));
        }
        Ok(CorrelationRequest {
            kind,
            a,
            b,
            t,
            eps,
            delta,
        })
    }
}

pub(crate) fn validate_precision(eps: f64, delta: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(FastError::Config(format!("eps must be positive, got {eps}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(FastError::Config(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    SmallN,
    LargeN,
}

impl Regime {
    /// `small_n` iff `n ≤ 1/ε²`, ties included. The comparison allows a
    /// relative rounding slack so that `n = 100, ε = 0.1` counts as a tie.
    pub fn for_size(modes: usize, eps: f64) -> Regime {
        if modes as f64 * eps * eps <= 1.0 + 1e-12 {
            Regime::SmallN
        } else {
            Regime::LargeN
        }
    }
}

/// Measurement strategy applied to each prepared state.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Commuting groups from greedy coloring, one circuit per group.
    Mmc,
    /// Random single-qubit Pauli bases (classical shadows), one circuit.
    Dc,
    /// One circuit per fermionic observable: Majorana singletons, or the
    /// commuting Pauli components of each one-body observable.
    Nm,
    /// Bell thresholding, then commuting groups of the survivors.
    BellMmc,
    /// Bell thresholding, then one circuit per survivor.
    BellNm,
    /// Bell thresholding, then anchor and chain circuits for the signs.
    BellChained,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Mmc => "mmc",
            Strategy::Dc => "dc",
            Strategy::Nm => "nm",
            Strategy::BellMmc => "bell_mmc",
            Strategy::BellNm => "bell_nm",
            Strategy::BellChained => "bell_chained",
        })
    }
}

impl FromStr for Strategy {
    type Err = FastError;

    fn from_str(s: &str) -> Result<Strategy> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "mmc" => Strategy::Mmc,
            "dc" => Strategy::Dc,
            "nm" => Strategy::Nm,
            "bell_mmc" => Strategy::BellMmc,
            "bell_nm" => Strategy::BellNm,
            "bell_chained" => Strategy::BellChained,
            other => return Err(FastError::Parse(format!("unknown strategy {other:?}"))),
        })
    }
}

impl Strategy {
    pub fn uses_bell(self) -> bool {
        matches!(self, Strategy::BellMmc | Strategy::BellNm | Strategy::BellChained)
    }

    /// Default cell of the strategy table.
    pub fn default_for(kind: CorrelationKind, regime: Regime, mapping: MappingKind) -> Strategy {
        use MappingKind::*;
        match (kind, regime, mapping) {
            (CorrelationKind::Anticommutator, Regime::SmallN, Jw | Bk) => Strategy::Nm,
            (CorrelationKind::Anticommutator, Regime::LargeN, Jw) => Strategy::BellChained,
            (CorrelationKind::Anticommutator, Regime::LargeN, _) => Strategy::BellNm,
            (_, Regime::SmallN, Tt) => Strategy::Dc,
            (_, Regime::SmallN, _) => Strategy::Mmc,
            (_, Regime::LargeN, _) => Strategy::BellMmc,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeChoice {
    pub regime: Regime,
    pub strategy: Strategy,
}

impl RegimeChoice {
    pub fn select(
        kind: CorrelationKind,
        modes: usize,
        eps: f64,
        mapping: MappingKind,
        options: &FastOptions,
    ) -> RegimeChoice {
        let regime = options.regime.unwrap_or_else(|| Regime::for_size(modes, eps));
        let strategy = options
            .strategy
            .unwrap_or_else(|| Strategy::default_for(kind, regime, mapping));
        RegimeChoice { regime, strategy }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn bit(self) -> u8 {
        match self {
            Branch::Plus => 0,
            Branch::Minus => 1,
        }
    }
}

/// Majority vote over ancilla bits.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchSelection {
    pub n_plus: usize,
    pub n_minus: usize,
    pub chosen: Branch,
    pub c_plus_sq_hat: f64,
    pub c_minus_sq_hat: f64,
}

impl BranchSelection {
    pub fn from_counts(n_plus: usize, n_minus: usize) -> Result<BranchSelection> {
        let total = n_plus + n_minus;
        if total == 0 {
            return Err(FastError::Domain("majority vote over zero ancilla bits".into()));
        }
        let c_plus = n_plus as f64 / total as f64;
        Ok(BranchSelection {
            n_plus,
            n_minus,
            chosen: if n_plus >= n_minus { Branch::Plus } else { Branch::Minus },
            c_plus_sq_hat: c_plus,
            c_minus_sq_hat: 1.0 - c_plus,
        })
    }

    /// Exact branch weights with no sampled bits.
    pub fn analytic(c_plus_sq: f64) -> BranchSelection {
        let c_plus = c_plus_sq.clamp(0.0, 1.0);
        BranchSelection {
            n_plus: 0,
            n_minus: 0,
            chosen: if c_plus >= 1.0 - c_plus { Branch::Plus } else { Branch::Minus },
            c_plus_sq_hat: c_plus,
            c_minus_sq_hat: 1.0 - c_plus,
        }
    }

    pub fn total(&self) -> usize {
        self.n_plus + self.n_minus
    }

    pub fn chosen_count(&self) -> usize {
        match self.chosen {
            Branch::Plus => self.n_plus,
            Branch::Minus => self.n_minus,
        }
    }

    /// Estimated weight of the chosen branch.
    pub fn chosen_weight(&self) -> f64 {
        match self.chosen {
            Branch::Plus => self.c_plus_sq_hat,
            Branch::Minus => self.c_minus_sq_hat,
        }
    }

    /// Binomial variance of the weight estimate; 0 when exact.
    pub fn weight_variance(&self) -> f64 {
        let n = self.total();
        if n == 0 {
            0.0
        } else {
            self.c_plus_sq_hat * self.c_minus_sq_hat / n as f64
        }
    }
}

/// Counts bit 0 as plus and bit 1 as minus; ties go to plus.
pub fn majority_select(bits: &[u8]) -> Result<BranchSelection> {
    let n_plus = bits.iter().filter(|&&b| b == 0).count();
    BranchSelection::from_counts(n_plus, bits.len() - n_plus)
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimationMode {
    /// Shot sampling from the simulated circuits.
    #[default]
    Sampled,
    /// Exact expectations on the prepared states; circuits are still counted.
    Analytic,
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShotPolicy {
    #[default]
    Auto,
    Fixed(usize),
}

/// Fewest shots accepted for any single circuit.
pub const MIN_SHOTS: usize = 10;

/// Shots per circuit type for one run.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotPlan {
    pub direct: usize,
    pub shadow: usize,
    pub bell: usize,
    pub chain: usize,
    pub anchor: usize,
    pub majority: usize,
}

fn ceil_shots(x: f64) -> usize {
    x.ceil().max(1.0) as usize
}

impl ShotPlan {
    /// Frozen constants: direct `2 ln(2m/δ)/ε²`, shadows `2·3^w ln(2m/δ)/ε²`,
    /// Bell `32 ln(2m/δ)/ε⁴`, chain `128 ln(2m/δ)/ε⁴`, anchor `32 ln(2/δ)/ε²`,
    /// majority `ln(2/δ)/(2ε²)`.
    pub fn auto(eps: f64, delta: f64, observables: usize, max_weight: usize) -> ShotPlan {
        let m = observables.max(1) as f64;
        let log_m = (2.0 * m / delta).ln();
        let log_1 = (2.0 / delta).ln();
        let e2 = eps * eps;
        ShotPlan {
            direct: ceil_shots(2.0 * log_m / e2),
            shadow: ceil_shots(2.0 * 3f64.powi(max_weight as i32) * log_m / e2),
            bell: ceil_shots(32.0 * log_m / (e2 * e2)),
            chain: ceil_shots(128.0 * log_m / (e2 * e2)),
            anchor: ceil_shots(32.0 * log_1 / e2),
            majority: ceil_shots(log_1 / (2.0 * e2)),
        }
    }

    pub fn fixed(shots: usize) -> Result<ShotPlan> {
        if shots < MIN_SHOTS {
            return Err(FastError::Config(format!(
                "{shots} shots per circuit is below the floor of {MIN_SHOTS}"
            )));
        }
        Ok(ShotPlan {
            direct: shots,
            shadow: shots,
            bell: shots,
            chain: shots,
            anchor: shots,
            majority: shots,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FastOptions {
    pub mode: EstimationMode,
    pub shots: ShotPolicy,
    pub regime: Option<Regime>,
    pub strategy: Option<Strategy>,
    pub seed: u64,
}

impl Default for FastOptions {
    fn default() -> FastOptions {
        FastOptions {
            mode: EstimationMode::Sampled,
            shots: ShotPolicy::Auto,
            regime: None,
            strategy: None,
            seed: 0,
        }
    }
}

impl FastOptions {
    pub fn analytic() -> FastOptions {
        FastOptions {
            mode: EstimationMode::Analytic,
            ..FastOptions::default()
        }
    }

    pub fn sampled(seed: u64, shots: ShotPolicy) -> FastOptions {
        FastOptions {
            seed,
            shots,
            ..FastOptions::default()
        }
    }
}

/// Prepared input: Majorana basis, evolution cache and initial state.
#[derive(Clone, Debug)]
pub struct System {
    pub basis: MajoranaBasis,
    pub cache: EvolutionCache,
    pub state: StateVector,
}

impl System {
    pub fn new(basis: MajoranaBasis, hamiltonian: &Hamiltonian, state: StateVector) -> Result<System> {
        crate::error::check_qubits(basis.qubits(), hamiltonian.qubits())?;
        crate::error::check_qubits(basis.qubits(), state.qubits())?;
        Ok(System {
            basis,
            cache: EvolutionCache::new(hamiltonian)?,
            state,
        })
    }

    /// Uses the lowest eigenvector of `hamiltonian` as the state.
    pub fn ground(basis: MajoranaBasis, hamiltonian: &Hamiltonian) -> Result<System> {
        crate::error::check_qubits(basis.qubits(), hamiltonian.qubits())?;
        let cache = EvolutionCache::new(hamiltonian)?;
        let degeneracy = cache.ground_degeneracy(1e-9);
        if degeneracy > 1 {
            log::warn!("ground space is {degeneracy}-fold degenerate; using the lowest-index eigenvector");
        }
        let state = cache.eigenvector(0);
        Ok(System { basis, cache, state })
    }

    pub fn modes(&self) -> usize {
        self.basis.modes()
    }
}

/// Step function with `θ(0) = 1`.
pub fn theta(t: f64) -> f64 {
    if t >= 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Estimate for one `(A_i, B_j, t)` entry.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationEstimate {
    pub kind: CorrelationKind,
    pub a_index: usize,
    pub b_index: usize,
    pub a_label: String,
    pub b_label: String,
    pub t: f64,
    pub eps: f64,
    pub delta: f64,
    pub value: Complex64,
    pub stderr: f64,
    pub shots_total: usize,
    pub circuits_total: usize,
    pub strategy: String,
    pub branch: Option<Vec<BranchSelection>>,
}

impl CorrelationEstimate {
    /// `−iθ(t)·value`: χ for commutators, `G^R` for anticommutators.
    pub fn response(&self) -> Complex64 {
        Complex64::new(0.0, -theta(self.t)) * self.value
    }
}

/// `tr(ρA(t)B) = ½(anticommutator + commutator)`.
pub fn general_correlation(
    commutator: &CorrelationEstimate,
    anticommutator: &CorrelationEstimate,
) -> Result<CorrelationEstimate> {
    if commutator.kind != CorrelationKind::Commutator || anticommutator.kind != CorrelationKind::Anticommutator {
        return Err(FastError::Domain("general correlation needs one commutator and one anticommutator".into()));
    }
    if commutator.a_label != anticommutator.a_label
        || commutator.b_label != anticommutator.b_label
        || commutator.t != anticommutator.t
    {
        return Err(FastError::Domain(format!(
            "mismatched inputs: ({}, {}, t={}) vs ({}, {}, t={})",
            commutator.a_label,
            commutator.b_label,
            commutator.t,
            anticommutator.a_label,
            anticommutator.b_label,
            anticommutator.t
        )));
    }
    Ok(CorrelationEstimate {
        kind: CorrelationKind::General,
        a_index: commutator.a_index,
        b_index: commutator.b_index,
        a_label: commutator.a_label.clone(),
        b_label: commutator.b_label.clone(),
        t: commutator.t,
        eps: commutator.eps.min(anticommutator.eps),
        delta: commutator.delta.max(anticommutator.delta),
        value: (commutator.value + anticommutator.value) * 0.5,
        stderr: commutator.stderr.hypot(anticommutator.stderr) / 2.0,
        shots_total: commutator.shots_total + anticommutator.shots_total,
        circuits_total: commutator.circuits_total + anticommutator.circuits_total,
        strategy: format!("{}+{}", commutator.strategy, anticommutator.strategy),
        branch: anticommutator.branch.clone(),
    })
}

/// All entries of one run, row-major over `(A_i, B_j)`.
#[derive(Clone, Debug, Serialize)]
pub struct FastRun {
    pub kind: CorrelationKind,
    pub mapping: MappingKind,
    pub modes: usize,
    pub choice: RegimeChoice,
    pub t: f64,
    pub eps: f64,
    pub delta: f64,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<CorrelationEstimate>,
    pub circuits_total: usize,
    pub shots_total: usize,
    /// Fermionic `B` operators requested.
    pub b_pairs: usize,
    /// Distinct Pauli components of those operators that need circuits.
    pub b_components: usize,
    /// Observables estimated on every prepared state.
    pub family_size: usize,
    pub shots: ShotPlan,
}

impl FastRun {
    pub fn entry(&self, a: usize, b: usize) -> &CorrelationEstimate {
        &self.entries[a * self.cols + b]
    }
}

/// Commutator run over every `(A_i, B_j)` pair of `targets`.
pub fn fast1(
    system: &System,
    targets: &TargetSet,
    t: f64,
    eps: f64,
    delta: f64,
    options: &FastOptions,
) -> Result<FastRun> {
    engine::run(system, targets, CorrelationKind::Commutator, t, eps, delta, options)
}

/// Anticommutator run over every `(A_i, B_j)` pair of `targets`.
pub fn fast2(
    system: &System,
    targets: &TargetSet,
    t: f64,
    eps: f64,
    delta: f64,
    options: &FastOptions,
) -> Result<FastRun> {
    engine::run(system, targets, CorrelationKind::Anticommutator, t, eps, delta, options)
}

/// Both runs, combined entry by entry into `tr(ρA_i(t)B_j)`.
pub fn general(
    system: &System,
    targets: &TargetSet,
    t: f64,
    eps: f64,
    delta: f64,
    options: &FastOptions,
) -> Result<(FastRun, FastRun, Vec<CorrelationEstimate>)> {
    let comm = fast1(system, targets, t, eps, delta, options)?;
    let anti = fast2(system, targets, t, eps, delta, options)?;
    let combined = comm
        .entries
        .iter()
        .zip(&anti.entries)
        .map(|(c, a)| general_correlation(c, a))
        .collect::<Result<Vec<_>>>()?;
    Ok((comm, anti, combined))
}

/// Single-request convenience wrapper.
pub fn estimate(system: &System, request: &CorrelationRequest, options: &FastOptions) -> Result<CorrelationEstimate> {
    let targets = TargetSet::single(request.a.clone(), request.b.clone());
    let (t, eps, delta) = (request.t, request.eps, request.delta);
    Ok(match request.kind {
        CorrelationKind::Commutator => fast1(system, &targets, t, eps, delta, options)?.entries.remove(0),
        CorrelationKind::Anticommutator => fast2(system, &targets, t, eps, delta, options)?.entries.remove(0),
        CorrelationKind::General => general(system, &targets, t, eps, delta, options)?.2.remove(0),
    })
}
