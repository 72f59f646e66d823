use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::model::{build_hamiltonian, ModelSpec};
use super::oracle::{exact_correlations, oracle_correlations, OracleEntry, OracleResult, MAX_ORACLE_MODES};
use crate::error::{FastError, Result};
use crate::fast::{
    fast1, fast2, general_correlation, validate_precision, CorrelationEstimate, CorrelationKind, EstimationMode,
    FastOptions, FastRun, Regime, ShotPlan, ShotPolicy, Strategy, System, TargetSet,
};
use crate::mapping::{majorana_basis, MappingKind};

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetPreset {
    /// `A_i = n_i`, `B_j = n_j`
    #[default]
    Density,
    /// `A_a = c_a`, `B_b = c_b†`
    Green,
    /// every `c_k†c_l`
    Hopping,
    /// bond currents
    Current,
}

impl TargetPreset {
    pub fn build(self, modes: usize) -> Result<TargetSet> {
        match self {
            TargetPreset::Density => TargetSet::density(modes),
            TargetPreset::Green => TargetSet::green(modes),
            TargetPreset::Hopping => TargetSet::hopping(modes),
            TargetPreset::Current => TargetSet::current(modes, 1.0),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum AutoTag {
    Auto,
}

/// `"auto"` or a fixed per-circuit shot count.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ShotsSetting {
    Fixed(usize),
    #[default]
    #[serde(with = "auto_tag")]
    Auto,
}

mod auto_tag {
    use super::AutoTag;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        AutoTag::Auto.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        AutoTag::deserialize(d).map(|_| ())
    }
}

impl ShotsSetting {
    pub fn policy(self) -> ShotPolicy {
        match self {
            ShotsSetting::Auto => ShotPolicy::Auto,
            ShotsSetting::Fixed(n) => ShotPolicy::Fixed(n),
        }
    }
}

fn default_delta() -> f64 {
    0.05
}

fn default_check_fraction() -> f64 {
    1.0
}

fn default_output() -> String {
    "fast_output".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub mapping: MappingKind,
    pub kind: CorrelationKind,
    #[serde(default)]
    pub targets: TargetPreset,
    pub times: Vec<f64>,
    pub eps: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    pub seed: u64,
    #[serde(default)]
    pub shots: ShotsSetting,
    #[serde(default)]
    pub mode: EstimationMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<Regime>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<Strategy>,
    /// Output stem: `<stem>.csv`, `<stem>.json`, `<stem>.report.json` and
    /// `<stem>.runlog.json`. Left out of the result JSON so outputs written
    /// to different places stay byte-identical.
    #[serde(default = "default_output", skip_serializing)]
    pub output_path: String,
    /// Fraction of entries within `eps` of the oracle needed to pass `--check`.
    #[serde(default = "default_check_fraction")]
    pub check_fraction: f64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<ExperimentConfig> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
        ExperimentConfig::from_json(&fs::read_to_string(path)?)
    }

    /// Checks everything that can fail before simulation starts.
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        validate_precision(self.eps, self.delta)?;
        if self.times.is_empty() {
            return Err(FastError::Config("times must be nonempty".into()));
        }
        if self.times.iter().any(|t| !t.is_finite()) {
            return Err(FastError::Config("times must be finite".into()));
        }
        if let ShotsSetting::Fixed(n) = self.shots {
            ShotPlan::fixed(n)?;
        }
        if !(0.0..=1.0).contains(&self.check_fraction) {
            return Err(FastError::Config("check_fraction must lie in [0, 1]".into()));
        }
        Ok(())
    }

    pub fn options(&self) -> FastOptions {
        FastOptions {
            mode: self.mode,
            shots: self.shots.policy(),
            regime: self.regime,
            strategy: self.strategy,
            seed: self.seed,
        }
    }

    pub fn output_files(&self) -> OutputFiles {
        OutputFiles::new(&self.output_path)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OutputFiles {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub report: PathBuf,
    pub runlog: PathBuf,
}

impl OutputFiles {
    pub fn new(stem: &str) -> OutputFiles {
        let stem = stem.strip_suffix(".csv").unwrap_or(stem);
        OutputFiles {
            csv: PathBuf::from(format!("{stem}.csv")),
            json: PathBuf::from(format!("{stem}.json")),
            report: PathBuf::from(format!("{stem}.report.json")),
            runlog: PathBuf::from(format!("{stem}.runlog.json")),
        }
    }
}

/// Estimate against the oracle for one entry.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub kind: CorrelationKind,
    pub a_label: String,
    pub b_label: String,
    pub t: f64,
    pub estimate: Complex64,
    pub oracle: Complex64,
    pub abs_error: f64,
    pub stderr: f64,
    pub within_eps: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub eps: f64,
    pub entries: usize,
    pub within_eps: usize,
    pub fraction_within_eps: f64,
    pub max_abs_error: f64,
    pub check_fraction: f64,
    pub pass: bool,
    pub comparisons: Vec<Comparison>,
}

impl Report {
    fn new(eps: f64, check_fraction: f64, comparisons: Vec<Comparison>) -> Report {
        let entries = comparisons.len();
        let within_eps = comparisons.iter().filter(|c| c.within_eps).count();
        let fraction_within_eps = if entries == 0 {
            1.0
        } else {
            within_eps as f64 / entries as f64
        };
        Report {
            eps,
            entries,
            within_eps,
            fraction_within_eps,
            max_abs_error: comparisons.iter().map(|c| c.abs_error).fold(0.0, f64::max),
            check_fraction,
            pass: fraction_within_eps >= check_fraction,
            comparisons,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentOutput {
    pub config: ExperimentConfig,
    pub ground_energy: f64,
    pub runs: Vec<FastRun>,
    pub general: Vec<CorrelationEstimate>,
    /// `None` above the oracle's mode limit.
    pub report: Option<Report>,
}

impl ExperimentOutput {
    /// Every estimate in output order: runs first, then general entries.
    pub fn estimates(&self) -> impl Iterator<Item = &CorrelationEstimate> {
        self.runs.iter().flat_map(|r| &r.entries).chain(&self.general)
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    kind: CorrelationKind,
    a: usize,
    b: usize,
    a_label: &'a str,
    b_label: &'a str,
    t: f64,
    re: f64,
    im: f64,
    stderr: f64,
    shots: usize,
    circuits: usize,
    strategy: &'a str,
}

pub fn csv_string(estimates: impl IntoIterator<Item = impl std::borrow::Borrow<CorrelationEstimate>>) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for e in estimates {
        let e = e.borrow();
        writer
            .serialize(CsvRow {
                kind: e.kind,
                a: e.a_index,
                b: e.b_index,
                a_label: &e.a_label,
                b_label: &e.b_label,
                t: e.t,
                re: e.value.re,
                im: e.value.im,
                stderr: e.stderr,
                shots: e.shots_total,
                circuits: e.circuits_total,
                strategy: &e.strategy,
            })
            .map_err(|err| FastError::Io(std::io::Error::other(err)))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|err| FastError::Io(std::io::Error::other(err.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn compare(estimate: &CorrelationEstimate, oracle: &OracleEntry, eps: f64) -> Comparison {
    let exact = oracle.value(estimate.kind);
    let abs_error = (estimate.value - exact).norm();
    Comparison {
        kind: estimate.kind,
        a_label: estimate.a_label.clone(),
        b_label: estimate.b_label.clone(),
        t: estimate.t,
        estimate: estimate.value,
        oracle: exact,
        abs_error,
        stderr: estimate.stderr,
        within_eps: abs_error <= eps,
    }
}

/// Runs the configured estimators at every time and compares them with the
/// dense oracle on the same ground state. Nothing is written to disk.
pub fn execute(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let n = config.model.n;
    let basis = majorana_basis(n, config.mapping)?;
    let h = build_hamiltonian(&config.model, config.mapping)?;
    let system = System::ground(basis, &h)?;
    let targets = config.targets.build(n)?;
    let options = config.options();

    let mut runs = Vec::new();
    let mut general = Vec::new();
    for &t in &config.times {
        let comm = matches!(config.kind, CorrelationKind::Commutator | CorrelationKind::General)
            .then(|| fast1(&system, &targets, t, config.eps, config.delta, &options))
            .transpose()?;
        let anti = matches!(config.kind, CorrelationKind::Anticommutator | CorrelationKind::General)
            .then(|| fast2(&system, &targets, t, config.eps, config.delta, &options))
            .transpose()?;
        if let (Some(c), Some(a)) = (&comm, &anti) {
            for (x, y) in c.entries.iter().zip(&a.entries) {
                general.push(general_correlation(x, y)?);
            }
        }
        runs.extend(comm);
        runs.extend(anti);
    }

    let report = if n <= MAX_ORACLE_MODES {
        let oracle = exact_correlations(&system.basis, &system.cache, &system.state, &targets, &config.times)?;
        let per_time = targets.a.len() * targets.b.len();
        let comparisons = runs
            .iter()
            .flat_map(|r| &r.entries)
            .chain(&general)
            .map(|e| {
                let ti = config.times.iter().position(|&t| t == e.t).expect("estimate times come from the config");
                compare(e, &oracle[ti * per_time + e.a_index * targets.b.len() + e.b_index], config.eps)
            })
            .collect();
        Some(Report::new(config.eps, config.check_fraction, comparisons))
    } else {
        None
    };

    Ok(ExperimentOutput {
        config: config.clone(),
        ground_energy: system.cache.eigenvalues()[0],
        runs,
        general,
        report,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RunLog {
    pub wall_time_s: f64,
    pub threads: usize,
    pub circuits_total: usize,
    pub shots_total: usize,
    pub files: OutputFiles,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

/// [`execute`] plus the CSV, JSON and report files. Timing goes to the
/// separate run log so the other three are byte-reproducible.
pub fn run_experiment(config: &ExperimentConfig) -> Result<(ExperimentOutput, RunLog)> {
    let start = Instant::now();
    let output = execute(config)?;
    let files = config.output_files();
    write_file(&files.csv, &csv_string(output.estimates())?)?;
    write_file(&files.json, &serde_json::to_string_pretty(&output)?)?;
    write_file(&files.report, &serde_json::to_string_pretty(&output.report)?)?;
    let log = RunLog {
        wall_time_s: start.elapsed().as_secs_f64(),
        threads: rayon::current_num_threads(),
        circuits_total: output.runs.iter().map(|r| r.circuits_total).sum(),
        shots_total: output.runs.iter().map(|r| r.shots_total).sum(),
        files,
    };
    write_file(&log.files.runlog, &serde_json::to_string_pretty(&log)?)?;
    Ok((output, log))
}

/// Dense-oracle values for the configured model, targets and times, written
/// to `<stem>.oracle.json` and `<stem>.oracle.csv`.
pub fn run_oracle(config: &ExperimentConfig) -> Result<(OracleResult, PathBuf, PathBuf)> {
    config.validate()?;
    let targets = config.targets.build(config.model.n)?;
    let oracle = oracle_correlations(&config.model, config.mapping, &targets, &config.times)?;
    let stem = config.output_path.strip_suffix(".csv").unwrap_or(&config.output_path);
    let json = PathBuf::from(format!("{stem}.oracle.json"));
    let csv_path = PathBuf::from(format!("{stem}.oracle.csv"));
    write_file(&json, &serde_json::to_string_pretty(&oracle)?)?;
    write_file(&csv_path, &oracle_csv(&oracle)?)?;
    Ok((oracle, json, csv_path))
}

#[derive(Serialize)]
struct OracleRow<'a> {
    a: usize,
    b: usize,
    a_label: &'a str,
    b_label: &'a str,
    t: f64,
    comm_re: f64,
    comm_im: f64,
    anti_re: f64,
    anti_im: f64,
}

fn oracle_csv(oracle: &OracleResult) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for e in &oracle.entries {
        writer
            .serialize(OracleRow {
                a: e.a_index,
                b: e.b_index,
                a_label: &e.a_label,
                b_label: &e.b_label,
                t: e.t,
                comm_re: e.commutator.re,
                comm_im: e.commutator.im,
                anti_re: e.anticommutator.re,
                anti_im: e.anticommutator.im,
            })
            .map_err(|err| FastError::Io(std::io::Error::other(err)))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|err| FastError::Io(std::io::Error::other(err.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Process exit status for an error: 2 for capacity, 1 otherwise.
pub fn exit_code(err: &FastError) -> i32 {
    match err {
        FastError::Capacity(_) => 2,
        _ => 1,
    }
}
