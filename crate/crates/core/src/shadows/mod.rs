//! Estimators for families of Pauli expectations.
//!
//! Four strategies are provided: random-Pauli classical shadows, joint
//! measurement of commuting groups found by graph coloring, two-copy Bell
//! magnitudes, and chained sign recovery for anticommuting families.

mod chain;

pub use chain::{b_x_family, chained_signs, ChainShots, SignChain};
pub(crate) use chain::run_chain;

use rand::Rng;
use serde::Serialize;

use crate::error::{check_qubits, FastError, Result};
use crate::pauli::{greedy_color, CommutationGraph, PauliString};
use crate::sim::{JointDistribution, ShadowSampler, StateVector};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShadowEstimate {
    pub observable: PauliString,
    pub mean: f64,
    pub stderr: f64,
    pub shots_used: usize,
}

impl ShadowEstimate {
    /// Exact value with zero error, used by analytic runs.
    pub fn exact(observable: PauliString, mean: f64) -> ShadowEstimate {
        ShadowEstimate {
            observable,
            mean,
            stderr: 0.0,
            shots_used: 0,
        }
    }
}

fn check_family(state: &StateVector, obs: &[PauliString]) -> Result<()> {
    for p in obs {
        check_qubits(state.qubits(), p.qubits())?;
        if !p.is_hermitian() {
            return Err(FastError::NotHermitian(p.to_string()));
        }
    }
    Ok(())
}

fn summarize(observable: PauliString, sum: f64, sum_sq: f64, shots: usize) -> ShadowEstimate {
    let n = shots as f64;
    let mean = if shots > 0 { sum / n } else { 0.0 };
    let stderr = if shots > 1 {
        ((sum_sq - n * mean * mean).max(0.0) / (n - 1.0) / n).sqrt()
    } else {
        f64::INFINITY
    };
    ShadowEstimate {
        observable,
        mean,
        stderr,
        shots_used: shots,
    }
}

/// Classical shadows from uniformly random single-qubit Pauli bases. Each
/// shot contributes `±3^w` when the bases match the observable's support and
/// 0 otherwise.
pub fn estimate_by_shadows<R: Rng + ?Sized>(
    state: &StateVector,
    obs: &[PauliString],
    shots: usize,
    rng: &mut R,
) -> Result<Vec<ShadowEstimate>> {
    check_family(state, obs)?;
    let mut sampler = ShadowSampler::new(state);
    let mut sums = vec![0.0; obs.len()];
    let mut squares = vec![0.0; obs.len()];
    for _ in 0..shots {
        let shot = sampler.shot(rng);
        for (k, p) in obs.iter().enumerate() {
            let v = shot.estimate(p);
            sums[k] += v;
            squares[k] += v * v;
        }
    }
    Ok(obs
        .iter()
        .enumerate()
        .map(|(k, p)| summarize(p.clone(), sums[k], squares[k], shots))
        .collect())
}

/// Commuting groups of a fixed family, computed once and reused across states.
#[derive(Clone, Debug)]
pub struct GroupPlan {
    observables: Vec<PauliString>,
    classes: Vec<Vec<usize>>,
}

impl GroupPlan {
    pub fn new(obs: &[PauliString]) -> Result<GroupPlan> {
        let graph = CommutationGraph::build(obs)?;
        let coloring = greedy_color(&graph);
        Ok(GroupPlan {
            observables: obs.to_vec(),
            classes: coloring.classes(),
        })
    }

    pub fn observables(&self) -> &[PauliString] {
        &self.observables
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// Circuits per state: one per color class.
    pub fn circuits(&self) -> usize {
        self.classes.len()
    }

    pub fn estimate<R: Rng + ?Sized>(
        &self,
        state: &StateVector,
        shots_per_group: usize,
        rng: &mut R,
    ) -> Result<Vec<ShadowEstimate>> {
        check_family(state, &self.observables)?;
        let mut out: Vec<Option<ShadowEstimate>> = vec![None; self.observables.len()];
        for class in &self.classes {
            let members: Vec<PauliString> = class.iter().map(|&k| self.observables[k].clone()).collect();
            let record = JointDistribution::new(state, &members)?.sample(shots_per_group, rng);
            for (slot, &k) in class.iter().enumerate() {
                out[k] = Some(ShadowEstimate {
                    observable: self.observables[k].clone(),
                    mean: record.mean(slot),
                    stderr: record.stderr(slot),
                    shots_used: shots_per_group,
                });
            }
        }
        Ok(out.into_iter().map(|e| e.expect("every node has a color")).collect())
    }
}

/// Greedy-colors the commutation graph and measures each class jointly.
/// Returns the estimates and the number of circuits (color classes).
pub fn estimate_by_groups<R: Rng + ?Sized>(
    state: &StateVector,
    obs: &[PauliString],
    shots_per_group: usize,
    rng: &mut R,
) -> Result<(Vec<ShadowEstimate>, usize)> {
    let plan = GroupPlan::new(obs)?;
    let estimates = plan.estimate(state, shots_per_group, rng)?;
    Ok((estimates, plan.circuits()))
}

/// Each observable measured in its own circuit.
pub fn estimate_individually<R: Rng + ?Sized>(
    state: &StateVector,
    obs: &[PauliString],
    shots: usize,
    rng: &mut R,
) -> Result<Vec<ShadowEstimate>> {
    check_family(state, obs)?;
    obs.iter()
        .map(|p| {
            let record = JointDistribution::new(state, std::slice::from_ref(p))?.sample(shots, rng);
            Ok(ShadowEstimate {
                observable: p.clone(),
                mean: record.mean(0),
                stderr: record.stderr(0),
                shots_used: shots,
            })
        })
        .collect()
}

/// Estimated `|⟨P⟩|` per observable from two-copy measurements.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MagnitudeTable {
    pub observables: Vec<PauliString>,
    pub entries: Vec<f64>,
    /// Raw means of `P ⊗ P`, which estimate `⟨P⟩²` and may be negative.
    pub squared: Vec<f64>,
    pub threshold: f64,
    pub shots: usize,
}

impl MagnitudeTable {
    /// Sets the cut at `3ε/4`.
    pub fn with_eps(mut self, eps: f64) -> MagnitudeTable {
        self.threshold = 0.75 * eps;
        self
    }

    pub fn get(&self, p: &PauliString) -> Option<f64> {
        self.observables.iter().position(|q| q == p).map(|k| self.entries[k])
    }

    pub fn survives(&self, k: usize) -> bool {
        self.entries[k] > self.threshold
    }

    /// Indices strictly above the threshold, ascending.
    pub fn survivors(&self) -> Vec<usize> {
        (0..self.entries.len()).filter(|&k| self.survives(k)).collect()
    }
}

/// Measures `{P ⊗ P}` jointly on `ψ ⊗ ψ` in one circuit and reports
/// `sqrt(max(0, mean))` per observable. The threshold starts at 0.
pub fn bell_magnitudes<R: Rng + ?Sized>(
    state: &StateVector,
    obs: &[PauliString],
    shots: usize,
    rng: &mut R,
) -> Result<MagnitudeTable> {
    if shots == 0 {
        return Err(FastError::Domain("Bell sampling needs at least one shot".into()));
    }
    check_family(state, obs)?;
    let doubled_obs = obs.iter().map(|p| p.tensor(p)).collect::<Result<Vec<_>>>()?;
    let doubled = state.doubled()?;
    let record = JointDistribution::new(&doubled, &doubled_obs)?.sample(shots, rng);
    let squared = record.means();
    Ok(MagnitudeTable {
        observables: obs.to_vec(),
        entries: squared.iter().map(|&m| m.max(0.0).sqrt()).collect(),
        squared,
        threshold: 0.0,
        shots,
    })
}

/// Outcome of Bell thresholding followed by grouped measurement of survivors.
#[derive(Clone, Debug)]
pub struct ThresholdedEstimate {
    pub estimates: Vec<ShadowEstimate>,
    pub table: MagnitudeTable,
    pub circuits: usize,
    /// Largest color class count allowed by the `4/ε²` clique bound, plus one.
    pub clique_bound: f64,
}

/// Bell-thresholds the family at `3ε/4`, then group-measures the survivors.
/// Discarded observables are reported as 0 with zero shots.
pub fn threshold_and_group<R: Rng + ?Sized>(
    state: &StateVector,
    obs: &[PauliString],
    eps: f64,
    bell_shots: usize,
    shots_per_group: usize,
    rng: &mut R,
) -> Result<ThresholdedEstimate> {
    let table = bell_magnitudes(state, obs, bell_shots, rng)?.with_eps(eps);
    let survivors = table.survivors();
    let kept: Vec<PauliString> = survivors.iter().map(|&k| obs[k].clone()).collect();
    let plan = GroupPlan::new(&kept)?;
    let grouped = plan.estimate(state, shots_per_group, rng)?;
    let clique_bound = 4.0 / (eps * eps) + 1.0;
    if plan.circuits() as f64 > clique_bound {
        log::warn!(
            "{} color classes after thresholding exceed the 4/eps^2 + 1 = {clique_bound:.1} clique bound",
            plan.circuits()
        );
    }
    let mut estimates: Vec<ShadowEstimate> = obs
        .iter()
        .map(|p| ShadowEstimate {
            observable: p.clone(),
            mean: 0.0,
            stderr: 0.0,
            shots_used: 0,
        })
        .collect();
    for (est, &k) in grouped.into_iter().zip(&survivors) {
        estimates[k] = est;
    }
    Ok(ThresholdedEstimate {
        estimates,
        table,
        circuits: 1 + plan.circuits(),
        clique_bound,
    })
}
