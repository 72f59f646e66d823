use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{build_hamiltonian, ModelSpec};
use crate::error::{FastError, Result};
use crate::fast::{
    closed_form_circuits, fast1, fast2, CorrelationKind, FastOptions, ShotPolicy, Strategy, System, TargetSet,
};
use crate::mapping::{majorana_basis, MappingKind};

/// Which count to sweep.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingKind {
    /// Commutators over every `c_k†c_l`.
    Fast1,
    /// Anticommutators over every `c_b†`.
    Fast2,
    /// Commutators with one circuit per fermionic one-body observable.
    BruteForce,
}

fn default_tolerance() -> f64 {
    0.3
}

fn default_delta() -> f64 {
    0.05
}

fn default_time() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub kind: ScalingKind,
    pub mapping: MappingKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<Strategy>,
    pub ns: Vec<usize>,
    pub eps: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_time")]
    pub t: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_exponent: Option<f64>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
}

impl SweepConfig {
    pub fn new(kind: ScalingKind, mapping: MappingKind, ns: Vec<usize>, eps: f64) -> SweepConfig {
        SweepConfig {
            kind,
            mapping,
            strategy: None,
            ns,
            eps,
            delta: default_delta(),
            t: default_time(),
            expected_exponent: None,
            tolerance: default_tolerance(),
            output_path: None,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<SweepConfig> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    fn strategy_override(&self) -> Option<Strategy> {
        match self.kind {
            ScalingKind::BruteForce => Some(Strategy::Nm),
            _ => self.strategy,
        }
    }
}

/// Growth order of the circuit count for the standard target sets.
pub fn expected_circuit_exponent(kind: CorrelationKind, strategy: Strategy) -> Option<f64> {
    match (kind, strategy) {
        (CorrelationKind::Commutator, Strategy::Dc) => Some(2.0),
        (CorrelationKind::Commutator, Strategy::Mmc) => Some(3.0),
        (CorrelationKind::Commutator, Strategy::Nm) => Some(4.0),
        (CorrelationKind::Anticommutator, Strategy::Dc) => Some(1.0),
        (CorrelationKind::Anticommutator, Strategy::Nm | Strategy::Mmc) => Some(2.0),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub strategy: Strategy,
    pub circuits_total: usize,
    pub closed_form: Option<usize>,
    pub shots_total: usize,
    pub b_pairs: usize,
    pub b_components: usize,
    pub family_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingReport {
    pub kind: ScalingKind,
    pub mapping: MappingKind,
    pub rows: Vec<ScalingRow>,
    pub circuit_slope: f64,
    pub shot_slope: f64,
    pub expected_exponent: Option<f64>,
    pub tolerance: f64,
    /// Every run's circuit total equals its closed form.
    pub counts_match: bool,
    pub slope_within_tolerance: Option<bool>,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_log_slope(points: &[(f64, f64)]) -> Result<f64> {
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 3 {
        return Err(FastError::Domain(format!(
            "a slope fit needs at least 3 distinct sizes, got {}",
            xs.len()
        )));
    }
    if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(FastError::Domain("log-log fit needs positive values".into()));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}

/// Runs the estimator in analytic mode on the tight-binding chain ground
/// state for every `n`, logging its circuit and shot totals.
pub fn scaling_study(sweep: &SweepConfig) -> Result<ScalingReport> {
    let mut ns = sweep.ns.clone();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 3 {
        return Err(FastError::Domain(format!(
            "scaling needs at least 3 distinct sizes, got {}",
            ns.len()
        )));
    }
    let kind = match sweep.kind {
        ScalingKind::Fast2 => CorrelationKind::Anticommutator,
        _ => CorrelationKind::Commutator,
    };
    let options = FastOptions {
        strategy: sweep.strategy_override(),
        shots: ShotPolicy::Auto,
        ..FastOptions::analytic()
    };
    let mut rows = Vec::with_capacity(ns.len());
    for &n in &ns {
        let basis = majorana_basis(n, sweep.mapping)?;
        let h = build_hamiltonian(&ModelSpec::tight_binding_chain(n, 1.0), sweep.mapping)?;
        let system = System::ground(basis, &h)?;
        let run = match kind {
            CorrelationKind::Commutator => fast1(&system, &TargetSet::hopping(n)?, sweep.t, sweep.eps, sweep.delta, &options)?,
            _ => fast2(&system, &TargetSet::green(n)?, sweep.t, sweep.eps, sweep.delta, &options)?,
        };
        rows.push(ScalingRow {
            n,
            strategy: run.choice.strategy,
            circuits_total: run.circuits_total,
            closed_form: closed_form_circuits(kind, run.choice.strategy, &system.basis),
            shots_total: run.shots_total,
            b_pairs: run.b_pairs,
            b_components: run.b_components,
            family_size: run.family_size,
        });
    }
    let circuit_slope = fit_log_slope(&rows.iter().map(|r| (r.n as f64, r.circuits_total as f64)).collect::<Vec<_>>())?;
    let shot_slope = fit_log_slope(&rows.iter().map(|r| (r.n as f64, r.shots_total as f64)).collect::<Vec<_>>())?;
    let strategies: Vec<Strategy> = rows.iter().map(|r| r.strategy).collect();
    let expected_exponent = sweep.expected_exponent.or_else(|| {
        if strategies.windows(2).all(|w| w[0] == w[1]) {
            expected_circuit_exponent(kind, strategies[0])
        } else {
            None
        }
    });
    let report = ScalingReport {
        kind: sweep.kind,
        mapping: sweep.mapping,
        counts_match: rows.iter().all(|r| r.closed_form.is_none_or(|c| c == r.circuits_total)),
        slope_within_tolerance: expected_exponent.map(|e| (circuit_slope - e).abs() <= sweep.tolerance),
        rows,
        circuit_slope,
        shot_slope,
        expected_exponent,
        tolerance: sweep.tolerance,
    };
    if let Some(stem) = &sweep.output_path {
        let path = Path::new(stem).with_extension("json");
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, serde_json::to_string_pretty(&report)?)?;
    }
    Ok(report)
}
