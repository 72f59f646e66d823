use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::counts::one_body_partition;
use super::plan::{reformulate_anticommutator, reformulate_commutator, PlanState};
use super::targets::TargetSet;
use super::{
    validate_precision, Branch, BranchSelection, CorrelationEstimate, CorrelationKind, EstimationMode, FastOptions,
    FastRun, RegimeChoice, ShotPlan, ShotPolicy, Strategy, System,
};
use crate::error::{FastError, Result};
use crate::pauli::{greedy_color, CommutationGraph, Pauli, PauliString};
use crate::shadows::{bell_magnitudes, estimate_by_shadows, run_chain, ChainShots};
use crate::sim::{task_rng, AncillaCircuit, JointDistribution, StateVector, MAX_SIM_QUBITS};

/// Observables estimated on every prepared state.
pub(crate) struct Family {
    obs: Vec<PauliString>,
    index: HashMap<(u64, u64), usize>,
    /// One circuit per part for the brute-force strategy.
    partition: Vec<Vec<usize>>,
    /// Greedy color classes.
    classes: Vec<Vec<usize>>,
    max_weight: usize,
}

impl Family {
    fn new(base: Vec<PauliString>, mut partition: Vec<Vec<usize>>, extras: Vec<PauliString>) -> Result<Family> {
        let mut obs = Vec::with_capacity(base.len() + extras.len());
        let mut index = HashMap::new();
        for p in base {
            let bare = p.split_phase().1;
            index.insert(bare.key(), obs.len());
            obs.push(bare);
        }
        for p in extras {
            let bare = p.split_phase().1;
            if bare.is_identity_up_to_phase() || index.contains_key(&bare.key()) {
                continue;
            }
            index.insert(bare.key(), obs.len());
            partition.push(vec![obs.len()]);
            obs.push(bare);
        }
        let classes = greedy_color(&CommutationGraph::build(&obs)?).classes();
        let max_weight = obs.iter().map(PauliString::weight).max().unwrap_or(0);
        Ok(Family {
            obs,
            index,
            partition,
            classes,
            max_weight,
        })
    }

    /// Family slot of a phase-free string; `None` for the identity.
    fn slot(&self, p: &PauliString) -> Option<usize> {
        if p.is_identity_up_to_phase() {
            None
        } else {
            Some(self.index[&p.key()])
        }
    }
}

#[derive(Copy, Clone, Debug)]
struct Est {
    mean: f64,
    var: f64,
}

impl Est {
    fn exact(mean: f64) -> Est {
        Est { mean, var: 0.0 }
    }
}

struct StateResult {
    est: Vec<Est>,
    circuits: usize,
    shots: usize,
    selection: Option<BranchSelection>,
}

enum Source<'a> {
    Pure(StateVector),
    Branched(&'a AncillaCircuit),
}

struct Ctx<'a> {
    family: &'a Family,
    strategy: Strategy,
    plan: ShotPlan,
    eps: f64,
    mode: EstimationMode,
}

fn bernoulli_count<R: Rng + ?Sized>(shots: usize, p: f64, rng: &mut R) -> usize {
    (0..shots).filter(|_| rng.random::<f64>() < p).count()
}

fn joint_estimates<R: Rng + ?Sized>(
    state: &StateVector,
    family: &Family,
    members: &[usize],
    shots: usize,
    rng: &mut R,
    out: &mut [Est],
) -> Result<()> {
    if shots == 0 {
        for &k in members {
            out[k] = Est { mean: 0.0, var: 1.0 };
        }
        return Ok(());
    }
    let obs: Vec<PauliString> = members.iter().map(|&k| family.obs[k].clone()).collect();
    let record = JointDistribution::new(state, &obs)?.sample(shots, rng);
    for (slot, &k) in members.iter().enumerate() {
        let s = record.stderr(slot);
        out[k] = Est {
            mean: record.mean(slot),
            var: s * s,
        };
    }
    Ok(())
}

/// Splits Majorana-like strings by the letter on their highest occupied qubit.
fn chain_lists(family: &Family, survivors: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &k in survivors {
        let p = &family.obs[k];
        let top = 63 - p.support().leading_zeros() as usize;
        match p.get(top) {
            Pauli::X => xs.push(k),
            Pauli::Y => ys.push(k),
            _ => {
                return Err(FastError::Config(format!(
                    "chained sign recovery needs strings ending in X or Y, got {p}"
                )))
            }
        }
    }
    for list in [&xs, &ys] {
        for (i, &a) in list.iter().enumerate() {
            for &b in &list[i + 1..] {
                if family.obs[a].commutes_unchecked(&family.obs[b]) {
                    return Err(FastError::Config(format!(
                        "chained sign recovery needs anticommuting strings; {} and {} commute",
                        family.obs[a], family.obs[b]
                    )));
                }
            }
        }
    }
    Ok((xs, ys))
}

impl Ctx<'_> {
    fn single_shots(&self, base: usize, branched: bool) -> usize {
        if branched {
            (2 * base).max(self.plan.majority)
        } else {
            base
        }
    }

    fn double_shots(&self, base: usize, branched: bool) -> usize {
        if branched {
            4 * base
        } else {
            base
        }
    }

    /// Non-adaptive circuits: member lists, or `None` for one shadow circuit.
    fn plain_circuits(&self) -> Vec<Option<&[usize]>> {
        match self.strategy {
            Strategy::Mmc => self.family.classes.iter().map(|c| Some(c.as_slice())).collect(),
            Strategy::Nm => self.family.partition.iter().map(|c| Some(c.as_slice())).collect(),
            Strategy::Dc => vec![None],
            _ => unreachable!("Bell strategies are adaptive"),
        }
    }

    fn circuit_shots(&self, circuit: Option<&[usize]>, branched: bool) -> usize {
        match circuit {
            Some(_) => self.single_shots(self.plan.direct, branched),
            None => self.single_shots(self.plan.shadow, branched),
        }
    }

    fn run_state(&self, source: Source<'_>, rng: &mut ChaCha8Rng) -> Result<StateResult> {
        match (self.mode, self.strategy.uses_bell()) {
            (EstimationMode::Analytic, _) => self.analytic(source),
            (EstimationMode::Sampled, false) => self.sampled_plain(source, rng),
            (EstimationMode::Sampled, true) => self.sampled_bell(source, rng),
        }
    }

    fn analytic(&self, source: Source<'_>) -> Result<StateResult> {
        let branched = matches!(source, Source::Branched(_));
        let (state, selection) = match source {
            Source::Pure(s) => (s, None),
            Source::Branched(c) => {
                let sel = BranchSelection::analytic(c.branch_probabilities().0);
                (c.post_state(sel.chosen.bit())?.clone(), Some(sel))
            }
        };
        let exact = self
            .family
            .obs
            .iter()
            .map(|p| state.expectation(p))
            .collect::<Result<Vec<_>>>()?;
        if !self.strategy.uses_bell() {
            let circuits = self.plain_circuits();
            let shots = circuits.iter().map(|&c| self.circuit_shots(c, branched)).sum();
            return Ok(StateResult {
                est: exact.into_iter().map(Est::exact).collect(),
                circuits: circuits.len(),
                shots,
                selection,
            });
        }
        let cut = 0.75 * self.eps;
        let survivors: Vec<usize> = (0..exact.len()).filter(|&k| exact[k].abs() > cut).collect();
        let est = (0..exact.len())
            .map(|k| {
                if exact[k].abs() > cut {
                    Est::exact(exact[k])
                } else {
                    Est { mean: 0.0, var: cut * cut }
                }
            })
            .collect();
        let (circuits, shots) = self.bell_followups(&survivors, branched)?;
        Ok(StateResult {
            est,
            circuits: 1 + circuits,
            shots: self.double_shots(self.plan.bell, branched) + shots,
            selection,
        })
    }

    /// Circuits and planned shots after the Bell circuit.
    fn bell_followups(&self, survivors: &[usize], branched: bool) -> Result<(usize, usize)> {
        let direct = self.single_shots(self.plan.direct, branched);
        Ok(match self.strategy {
            Strategy::BellMmc => {
                let colors = self.survivor_classes(survivors)?.len();
                (colors, colors * direct)
            }
            Strategy::BellNm => (survivors.len(), survivors.len() * direct),
            Strategy::BellChained => {
                let (xs, ys) = chain_lists(self.family, survivors)?;
                let anchors = [&xs, &ys].iter().filter(|l| !l.is_empty()).count();
                let chains = [&xs, &ys].iter().filter(|l| l.len() > 1).count();
                (
                    anchors + chains,
                    anchors * self.single_shots(self.plan.anchor, branched)
                        + chains * self.double_shots(self.plan.chain, branched),
                )
            }
            _ => unreachable!(),
        })
    }

    fn survivor_classes(&self, survivors: &[usize]) -> Result<Vec<Vec<usize>>> {
        let obs: Vec<PauliString> = survivors.iter().map(|&k| self.family.obs[k].clone()).collect();
        let classes = greedy_color(&CommutationGraph::build(&obs)?).classes();
        Ok(classes
            .into_iter()
            .map(|c| c.into_iter().map(|i| survivors[i]).collect())
            .collect())
    }

    fn sampled_plain(&self, source: Source<'_>, rng: &mut ChaCha8Rng) -> Result<StateResult> {
        let branched = matches!(source, Source::Branched(_));
        let circuits = self.plain_circuits();
        let planned: Vec<usize> = circuits.iter().map(|&c| self.circuit_shots(c, branched)).collect();
        let (state, selection, kept) = match source {
            Source::Pure(s) => (s, None, planned.clone()),
            Source::Branched(c) => {
                let p = c.branch_probabilities().0;
                let zeros: Vec<usize> = planned.iter().map(|&s| bernoulli_count(s, p, rng)).collect();
                let n_plus: usize = zeros.iter().sum();
                let total: usize = planned.iter().sum();
                let sel = BranchSelection::from_counts(n_plus, total - n_plus)?;
                let kept = zeros
                    .iter()
                    .zip(&planned)
                    .map(|(&z, &s)| if sel.chosen.bit() == 0 { z } else { s - z })
                    .collect();
                (c.post_state(sel.chosen.bit())?.clone(), Some(sel), kept)
            }
        };
        let mut est = vec![Est::exact(0.0); self.family.obs.len()];
        for (circuit, &k) in circuits.iter().zip(&kept) {
            match circuit {
                Some(members) => joint_estimates(&state, self.family, members, k, rng, &mut est)?,
                None => {
                    let shadow = estimate_by_shadows(&state, &self.family.obs, k, rng)?;
                    for (slot, e) in est.iter_mut().zip(shadow) {
                        *slot = if k > 1 {
                            Est {
                                mean: e.mean,
                                var: e.stderr * e.stderr,
                            }
                        } else {
                            Est {
                                mean: 0.0,
                                var: 9f64.powi(e.observable.weight() as i32),
                            }
                        };
                    }
                }
            }
        }
        Ok(StateResult {
            est,
            circuits: circuits.len(),
            shots: planned.iter().sum(),
            selection,
        })
    }

    fn sampled_bell(&self, source: Source<'_>, rng: &mut ChaCha8Rng) -> Result<StateResult> {
        let branched = matches!(source, Source::Branched(_));
        let bell_shots = self.double_shots(self.plan.bell, branched);
        let (state, selection, kept_bell, p_keep) = match source {
            Source::Pure(s) => (s, None, bell_shots, 1.0),
            Source::Branched(c) => {
                let p = c.branch_probabilities().0;
                let (mut zeros, mut both0, mut both1) = (0, 0, 0);
                for _ in 0..bell_shots {
                    let a = rng.random::<f64>() < p;
                    let b = rng.random::<f64>() < p;
                    zeros += a as usize + b as usize;
                    both0 += (a && b) as usize;
                    both1 += (!a && !b) as usize;
                }
                let sel = BranchSelection::from_counts(zeros, 2 * bell_shots - zeros)?;
                let (kept, p_keep) = if sel.chosen.bit() == 0 { (both0, p) } else { (both1, 1.0 - p) };
                (c.post_state(sel.chosen.bit())?.clone(), Some(sel), kept, p_keep)
            }
        };
        let keep_single = |s: usize, rng: &mut ChaCha8Rng| if branched { bernoulli_count(s, p_keep, rng) } else { s };
        let keep_double = |s: usize, rng: &mut ChaCha8Rng| {
            if branched {
                (0..s)
                    .filter(|_| rng.random::<f64>() < p_keep && rng.random::<f64>() < p_keep)
                    .count()
            } else {
                s
            }
        };

        let cut = 0.75 * self.eps;
        let m = self.family.obs.len();
        let table = if kept_bell > 0 {
            Some(bell_magnitudes(&state, &self.family.obs, kept_bell, rng)?.with_eps(self.eps))
        } else {
            None
        };
        let survivors = table.as_ref().map(|t| t.survivors()).unwrap_or_default();
        let mut est = vec![Est { mean: 0.0, var: cut * cut }; m];
        let direct = self.single_shots(self.plan.direct, branched);
        let mut circuits = 1;
        let mut shots = bell_shots;
        match self.strategy {
            Strategy::BellMmc | Strategy::BellNm => {
                let groups = if self.strategy == Strategy::BellMmc {
                    self.survivor_classes(&survivors)?
                } else {
                    survivors.iter().map(|&k| vec![k]).collect()
                };
                for g in &groups {
                    let k = keep_single(direct, rng);
                    joint_estimates(&state, self.family, g, k, rng, &mut est)?;
                }
                circuits += groups.len();
                shots += groups.len() * direct;
            }
            Strategy::BellChained => {
                let table = table.as_ref().expect("survivors imply a table");
                let (xs, ys) = chain_lists(self.family, &survivors)?;
                let doubled = state.doubled()?;
                for (label, list) in [("X", &xs), ("Y", &ys)] {
                    if list.is_empty() {
                        continue;
                    }
                    let anchor = self.single_shots(self.plan.anchor, branched);
                    let chain = self.double_shots(self.plan.chain, branched);
                    let kept = ChainShots {
                        anchor: keep_single(anchor, rng),
                        chain: if list.len() > 1 { keep_double(chain, rng) } else { 0 },
                    };
                    let strings: Vec<PauliString> = list.iter().map(|&k| self.family.obs[k].clone()).collect();
                    let signs = run_chain(label, &state, &doubled, &strings, self.eps, kept, rng)?;
                    circuits += signs.circuits;
                    shots += anchor + if list.len() > 1 { chain } else { 0 };
                    for (&k, &sign) in list.iter().zip(&signs.recovered_signs) {
                        let magnitude = table.entries[k];
                        let sq = table.squared[k].clamp(-1.0, 1.0);
                        let var_sq = (1.0 - sq * sq) / table.shots as f64;
                        est[k] = Est {
                            mean: sign as f64 * magnitude,
                            var: var_sq / (4.0 * magnitude * magnitude),
                        };
                    }
                }
            }
            _ => unreachable!(),
        }
        Ok(StateResult {
            est,
            circuits,
            shots,
            selection,
        })
    }
}

/// Contribution of one `B` component to every family observable.
struct ComponentResult {
    values: Vec<Complex64>,
    vars: Vec<f64>,
    identity_value: Complex64,
    /// Derivative of each value with respect to the chosen branch weight.
    weight_slopes: Vec<f64>,
    identity_slope: f64,
    weight_var: f64,
    circuits: usize,
    shots: usize,
    selection: Option<BranchSelection>,
}

fn component_task(
    system: &System,
    ctx: &Ctx<'_>,
    kind: CorrelationKind,
    b: &PauliString,
    t: f64,
    rng: &mut ChaCha8Rng,
) -> Result<ComponentResult> {
    let psi = &system.state;
    let cache = &system.cache;
    let identity = PauliString::identity(b.qubits());
    let m = ctx.family.obs.len();
    match kind {
        CorrelationKind::Commutator => {
            let plan = reformulate_commutator(&identity, b, t)?;
            let mut results = Vec::with_capacity(3);
            for term in &plan.terms {
                let state = term.state.prepare(psi, b, cache, t)?;
                results.push(ctx.run_state(Source::Pure(state), rng)?);
            }
            let w: Vec<Complex64> = plan.terms.iter().map(|term| term.weight).collect();
            let values = (0..m)
                .map(|k| (0..3).map(|s| w[s] * results[s].est[k].mean).sum())
                .collect();
            let vars = (0..m)
                .map(|k| (0..3).map(|s| w[s].norm_sqr() * results[s].est[k].var).sum())
                .collect();
            Ok(ComponentResult {
                values,
                vars,
                identity_value: w.iter().sum(),
                weight_slopes: vec![0.0; m],
                identity_slope: 0.0,
                weight_var: 0.0,
                circuits: results.iter().map(|r| r.circuits).sum(),
                shots: results.iter().map(|r| r.shots).sum(),
                selection: None,
            })
        }
        CorrelationKind::Anticommutator => {
            let circuit = AncillaCircuit::new(psi, b, cache, t)?;
            let branched = ctx.run_state(Source::Branched(&circuit), rng)?;
            let sel = branched.selection.expect("branched runs report a selection");
            let c_sq = sel.chosen_weight();
            let plan = reformulate_anticommutator(&identity, b, t, sel.chosen, c_sq)?;
            let evolved = ctx.run_state(Source::Pure(PlanState::Evolved.prepare(psi, b, cache, t)?), rng)?;
            let conjugated = ctx.run_state(Source::Pure(PlanState::Conjugated.prepare(psi, b, cache, t)?), rng)?;
            let w: Vec<f64> = plan.terms.iter().map(|term| term.weight.re).collect();
            // lead weight is ±4·c_sq
            let slope = match sel.chosen {
                Branch::Plus => 4.0,
                Branch::Minus => -4.0,
            };
            let results = [&branched, &evolved, &conjugated];
            let values = (0..m)
                .map(|k| Complex64::new((0..3).map(|s| w[s] * results[s].est[k].mean).sum(), 0.0))
                .collect();
            let vars = (0..m)
                .map(|k| (0..3).map(|s| w[s] * w[s] * results[s].est[k].var).sum())
                .collect();
            let weight_slopes = (0..m).map(|k| slope * branched.est[k].mean).collect();
            Ok(ComponentResult {
                values,
                vars,
                identity_value: Complex64::new(w.iter().sum(), 0.0),
                weight_slopes,
                identity_slope: slope,
                weight_var: sel.weight_variance(),
                circuits: results.iter().map(|r| r.circuits).sum(),
                shots: results.iter().map(|r| r.shots).sum(),
                selection: Some(sel),
            })
        }
        CorrelationKind::General => unreachable!("general runs are split into two kinds"),
    }
}

pub(crate) fn run(
    system: &System,
    targets: &TargetSet,
    kind: CorrelationKind,
    t: f64,
    eps: f64,
    delta: f64,
    options: &FastOptions,
) -> Result<FastRun> {
    validate_precision(eps, delta)?;
    let basis = &system.basis;
    let n = basis.modes();
    if targets.modes() != n {
        return Err(FastError::Dimension {
            expected: n,
            found: targets.modes(),
        });
    }
    let a_terms = targets
        .a
        .iter()
        .map(|tg| basis.encode(&tg.op))
        .collect::<Result<Vec<_>>>()?;
    let b_terms = targets
        .b
        .iter()
        .map(|tg| basis.encode(&tg.op))
        .collect::<Result<Vec<_>>>()?;

    let extras: Vec<PauliString> = a_terms.iter().flatten().map(|(_, p)| p.clone()).collect();
    let family = match kind {
        CorrelationKind::Commutator => Family::new(basis.one_body_observables(), one_body_partition(basis), extras)?,
        CorrelationKind::Anticommutator => {
            let singles = (0..2 * n).map(|k| vec![k]).collect();
            Family::new(basis.gammas().to_vec(), singles, extras)?
        }
        CorrelationKind::General => {
            return Err(FastError::Config("general correlations combine a fast1 and a fast2 run".into()))
        }
    };

    let choice = RegimeChoice::select(kind, n, eps, basis.mapping(), options);
    if choice.strategy.uses_bell() && 2 * basis.qubits() > MAX_SIM_QUBITS {
        return Err(FastError::Capacity(format!(
            "two-copy circuits on {} qubits exceed the {MAX_SIM_QUBITS}-qubit limit",
            2 * basis.qubits()
        )));
    }
    let plan = match options.shots {
        ShotPolicy::Auto => ShotPlan::auto(eps, delta, family.obs.len(), family.max_weight),
        ShotPolicy::Fixed(shots) => ShotPlan::fixed(shots)?,
    };
    let ctx = Ctx {
        family: &family,
        strategy: choice.strategy,
        plan,
        eps,
        mode: options.mode,
    };

    // distinct B components in order of first appearance
    let mut components: Vec<PauliString> = Vec::new();
    let mut component_of: HashMap<(u64, u64), usize> = HashMap::new();
    for (_, p) in b_terms.iter().flatten() {
        if kind == CorrelationKind::Commutator && p.is_identity_up_to_phase() {
            continue;
        }
        component_of.entry(p.key()).or_insert_with(|| {
            components.push(p.clone());
            components.len() - 1
        });
    }

    let kind_tag = match kind {
        CorrelationKind::Commutator => 1,
        _ => 2,
    };
    let results = components
        .par_iter()
        .enumerate()
        .map(|(idx, b)| {
            let mut rng = task_rng(options.seed, &[kind_tag, idx as u64]);
            component_task(system, &ctx, kind, b, t, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;

    let strategy = choice.strategy.to_string();
    let mut entries = Vec::with_capacity(targets.a.len() * targets.b.len());
    for (i, a_comp) in a_terms.iter().enumerate() {
        for (j, b_comp) in b_terms.iter().enumerate() {
            let mut value = Complex64::new(0.0, 0.0);
            let mut var = 0.0;
            let mut used: Vec<usize> = Vec::new();
            for (cb, q) in b_comp {
                let Some(&c_idx) = component_of.get(&q.key()) else {
                    continue;
                };
                used.push(c_idx);
                let r = &results[c_idx];
                let mut slope = Complex64::new(0.0, 0.0);
                for (ca, p) in a_comp {
                    let coef = ca * cb;
                    match family.slot(p) {
                        Some(k) => {
                            value += coef * r.values[k];
                            var += coef.norm_sqr() * r.vars[k];
                            slope += coef * r.weight_slopes[k];
                        }
                        None => {
                            value += coef * r.identity_value;
                            slope += coef * r.identity_slope;
                        }
                    }
                }
                var += slope.norm_sqr() * r.weight_var;
            }
            used.sort_unstable();
            used.dedup();
            let branch: Vec<BranchSelection> = used.iter().filter_map(|&c| results[c].selection).collect();
            entries.push(CorrelationEstimate {
                kind,
                a_index: i,
                b_index: j,
                a_label: targets.a[i].label.clone(),
                b_label: targets.b[j].label.clone(),
                t,
                eps,
                delta,
                value,
                stderr: var.sqrt(),
                shots_total: used.iter().map(|&c| results[c].shots).sum(),
                circuits_total: used.iter().map(|&c| results[c].circuits).sum(),
                strategy: strategy.clone(),
                branch: (!branch.is_empty()).then_some(branch),
            });
        }
    }

    Ok(FastRun {
        kind,
        mapping: basis.mapping(),
        modes: n,
        choice,
        t,
        eps,
        delta,
        rows: targets.a.len(),
        cols: targets.b.len(),
        entries,
        circuits_total: results.iter().map(|r| r.circuits).sum(),
        shots_total: results.iter().map(|r| r.shots).sum(),
        b_pairs: targets.b.len(),
        b_components: components.len(),
        family_size: family.obs.len(),
        shots: plan,
    })
}
