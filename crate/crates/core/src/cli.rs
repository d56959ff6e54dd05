//! Command-line front end: configuration parsing and validation, the
//! subcommands, and the mapping from errors to exit codes.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bracket::{bracket, diamond, jacobi_residuals, BracketValue};
use crate::error::{Error, Result};
use crate::flows::{integrate_flow, FlowOptions, FlowState};
use crate::function::InvariantFunction;
use crate::homology::{build_complex, ComplexSummary};
use crate::lie::{GroupKind, InvariantForm, LieGroupSpec};
use crate::linalg::{CMat, Mat};
use crate::persistence::{cohomology_csv, scan_csv, write_atomic, Envelope, PayloadKind};
use crate::rep::{orbit_type, parse_central, sample_hom_xi, RepresentationData, StratumLabel};
use crate::strata::{default_family, kummer_census, mcg_pullback_check, rank_scan, CensusCounts, MappingClass};

/// Environment variable consulted for the seed when `--seed` is absent.
pub const SEED_ENV: &str = "POISSON_SEED";

#[derive(Debug, Parser)]
#[command(name = "surface-poisson", version, about = "Poisson brackets and flows on surface-group representation spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Base seed; overrides the POISSON_SEED variable and the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for reports.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample points of the relator-constrained locus.
    Sample(CommonArgs),
    /// Betti numbers and spectra of the twisted complex at sampled points.
    Cohomology(CommonArgs),
    /// Brackets of every pair of configured functions.
    Bracket(CommonArgs),
    /// Jacobi residuals of every triple of configured functions.
    Jacobi(CommonArgs),
    /// Orbit type and bracket rank at sampled points.
    RankScan(CommonArgs),
    /// Rank census over the strata of the SU(2) genus-2 locus.
    Kummer(CommonArgs),
    /// Mapping-class pullback residuals.
    Mcg(CommonArgs),
    /// Integrate the flow of the first configured function.
    Flow(CommonArgs),
}

impl Command {
    fn args(&self) -> &CommonArgs {
        match self {
            Command::Sample(a)
            | Command::Cohomology(a)
            | Command::Bracket(a)
            | Command::Jacobi(a)
            | Command::RankScan(a)
            | Command::Kummer(a)
            | Command::Mcg(a)
            | Command::Flow(a) => a,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Sample(_) => "sample",
            Command::Cohomology(_) => "cohomology",
            Command::Bracket(_) => "bracket",
            Command::Jacobi(_) => "jacobi",
            Command::RankScan(_) => "rank-scan",
            Command::Kummer(_) => "kummer",
            Command::Mcg(_) => "mcg",
            Command::Flow(_) => "flow",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum FormConfig {
    /// `⟨X,Y⟩ = −Re tr(XY)`.
    #[default]
    Reference,
    /// Diagonal in the orthonormal basis of the algebra.
    Diag { entries: Vec<f64> },
    /// Full symmetric Gram matrix in the orthonormal basis.
    Gram { matrix: Vec<Vec<f64>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MappingClassConfig {
    /// `y_k ↦ y_k x_k`.
    Twist { handle: usize },
    /// Orientation-reversing handle swap.
    Reflection,
    /// Explicit generator images as word strings.
    Images { images: Vec<String> },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
}

fn default_t_end() -> f64 {
    1.0
}

fn default_dt() -> f64 {
    1e-3
}

fn default_central() -> String {
    "I".to_string()
}

fn default_samples() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub group: String,
    pub genus: usize,
    #[serde(default = "default_central")]
    pub central: String,
    #[serde(default)]
    pub form: FormConfig,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub functions: Vec<String>,
    #[serde(default)]
    pub family_size: Option<usize>,
    #[serde(default)]
    pub flow: Option<FlowConfig>,
    #[serde(default)]
    pub mapping_class: Option<MappingClassConfig>,
    #[serde(default)]
    pub census: Option<CensusCounts>,
}

/// A configuration checked and converted into library types.
pub struct Validated {
    pub raw: RunConfig,
    pub spec: Arc<LieGroupSpec>,
    pub central: CMat,
    pub form: InvariantForm,
    pub functions: Vec<InvariantFunction>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            let field = msg
                .split('`')
                .nth(1)
                .filter(|_| msg.contains("field"))
                .unwrap_or("config")
                .to_string();
            Error::config(field, msg)
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<Validated> {
        let kind = GroupKind::parse(&self.group)
            .ok_or_else(|| Error::config("group", format!("unknown group `{}`", self.group)))?;
        let spec = Arc::new(LieGroupSpec::new(kind));
        if self.genus == 0 {
            return Err(Error::config("genus", "genus must be at least 1"));
        }
        if self.samples == 0 {
            return Err(Error::config("samples", "at least one sample is required"));
        }
        let central = parse_central(&spec, &self.central)?;
        let form = match &self.form {
            FormConfig::Reference => InvariantForm::reference(&spec),
            FormConfig::Diag { entries } => {
                if entries.len() != spec.dim() {
                    return Err(Error::config(
                        "form",
                        format!("{} needs {} diagonal entries, got {}", spec.kind(), spec.dim(), entries.len()),
                    ));
                }
                InvariantForm::diagonal(&spec, entries).map_err(|e| Error::config("form", e.to_string()))?
            }
            FormConfig::Gram { matrix } => {
                let n = spec.dim();
                if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
                    return Err(Error::config("form", format!("Gram matrix must be {n}x{n}")));
                }
                let gram = Mat::from_fn(n, n, |i, j| matrix[i][j]);
                InvariantForm::from_gram(&spec, gram).map_err(|e| Error::config("form", e.to_string()))?
            }
        };
        let functions = self
            .functions
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let f = InvariantFunction::parse(s).map_err(|e| Error::config(format!("functions[{i}]"), e.to_string()))?;
                if let Some(g) = f.max_generator() {
                    if g >= 2 * self.genus {
                        return Err(Error::config(
                            format!("functions[{i}]"),
                            format!("uses generator {} but genus {} has {}", g + 1, self.genus, 2 * self.genus),
                        ));
                    }
                }
                Ok(f)
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(flow) = &self.flow {
            if !(flow.dt > 0.0 && flow.dt.is_finite()) {
                return Err(Error::config("flow.dt", "step must be positive and finite"));
            }
            if !(flow.t_end >= 0.0 && flow.t_end.is_finite()) {
                return Err(Error::config("flow.t_end", "end time must be non-negative and finite"));
            }
        }
        if self.family_size == Some(0) {
            return Err(Error::config("family_size", "family must not be empty"));
        }
        Ok(Validated {
            raw: self.clone(),
            spec,
            central,
            form,
            functions,
        })
    }
}

impl Validated {
    fn require_functions(&self, count: usize) -> Result<()> {
        if self.functions.len() < count {
            return Err(Error::config(
                "functions",
                format!("this command needs at least {count} functions, got {}", self.functions.len()),
            ));
        }
        Ok(())
    }

    fn family(&self, seed: u64) -> Vec<InvariantFunction> {
        match self.raw.family_size {
            Some(size) => crate::bracket::probe_family(self.raw.genus, size, seed),
            None => default_family(self.raw.genus, seed),
        }
    }

    fn mapping_class(&self) -> Result<MappingClass> {
        let genus = self.raw.genus;
        let cfg = self
            .raw
            .mapping_class
            .as_ref()
            .ok_or_else(|| Error::config("mapping_class", "missing mapping class"))?;
        let built = match cfg {
            MappingClassConfig::Twist { handle } => MappingClass::dehn_twist(genus, *handle),
            MappingClassConfig::Reflection => MappingClass::reflection(genus),
            MappingClassConfig::Images { images } => MappingClass::from_strings("custom", genus, images),
        };
        built.map_err(|e| Error::config("mapping_class", e.to_string()))
    }
}

/// `--seed`, then the environment variable, then the config, then 0.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>, config: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(text) = env {
        return text
            .trim()
            .parse()
            .map_err(|_| Error::config("seed", format!("{SEED_ENV}={text:?} is not an unsigned integer")));
    }
    Ok(config.unwrap_or(0))
}

/// 1 for invalid input of any kind, 2 for sampling and numerical guard failures.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SamplingFailed { .. }
        | Error::NotMember { .. }
        | Error::SingularPairing { .. }
        | Error::StratumBoundary { .. }
        | Error::NotACycle { .. }
        | Error::NotACocycle { .. } => 2,
        _ => 1,
    }
}

#[derive(Serialize)]
struct SampleRecord {
    seed: u64,
    relator_residual: f64,
    orbit_type: StratumLabel,
    h0: usize,
    representation: RepresentationData,
}

#[derive(Serialize)]
struct CohomologyRecord {
    seed: u64,
    #[serde(flatten)]
    summary: ComplexSummary,
    euler_characteristic: i64,
}

#[derive(Serialize)]
struct BracketRecord {
    seed: u64,
    f: String,
    h: String,
    #[serde(flatten)]
    value: BracketValue,
    chain_value: f64,
}

#[derive(Serialize)]
struct JacobiRecord {
    seed: u64,
    triple: [String; 3],
    residual: f64,
}

#[derive(Serialize)]
struct McgRecord {
    seed: u64,
    f: String,
    h: String,
    residual: f64,
}

#[derive(Serialize)]
struct FlowReport {
    seed: u64,
    function: String,
    completed: bool,
    aborted: Option<String>,
    value_drift: f64,
    max_relator_residual: f64,
    states: Vec<FlowState>,
    endpoint: RepresentationData,
}

/// What a command produced: files written and a status line.
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
    pub exit_code: i32,
}

struct Run<'a> {
    cfg: &'a Validated,
    seed: u64,
    out: &'a Path,
    echo: Value,
    files: Vec<PathBuf>,
}

impl Run<'_> {
    fn seeds(&self) -> Vec<u64> {
        (0..self.cfg.raw.samples as u64).map(|k| self.seed.wrapping_add(k)).collect()
    }

    fn sample(&self, seed: u64) -> Result<crate::rep::Representation> {
        sample_hom_xi(&self.cfg.spec, self.cfg.raw.genus, &self.cfg.central, seed)
    }

    fn envelope<T: Serialize>(&mut self, name: &str, kind: PayloadKind, payload: &T) -> Result<()> {
        let path = self.out.join(name);
        Envelope::wrap(kind, payload, &self.echo)?.save(&path)?;
        self.files.push(path);
        Ok(())
    }

    fn raw_file(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.out.join(name);
        write_atomic(&path, bytes)?;
        self.files.push(path);
        Ok(())
    }
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Runs one subcommand with an explicit environment seed (for tests).
pub fn execute(command: &Command, env_seed: Option<&str>) -> Result<Outcome> {
    let args = command.args();
    let raw = RunConfig::load(&args.config)?;
    let cfg = raw.validate()?;
    let seed = resolve_seed(args.seed, env_seed, raw.seed)?;
    if let Some(threads) = args.threads {
        if threads == 0 {
            return Err(Error::config("threads", "thread count must be positive"));
        }
        // a second build in the same process fails harmlessly and keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let echo = json!({
        "command": command.name(),
        "seed": seed,
        "config": serde_json::to_value(&raw)?,
    });
    let mut run = Run {
        cfg: &cfg,
        seed,
        out: &args.out,
        echo,
        files: Vec::new(),
    };
    let (summary, exit_code) = match command {
        Command::Sample(_) => cmd_sample(&mut run)?,
        Command::Cohomology(_) => cmd_cohomology(&mut run)?,
        Command::Bracket(_) => cmd_bracket(&mut run)?,
        Command::Jacobi(_) => cmd_jacobi(&mut run)?,
        Command::RankScan(_) => cmd_rank_scan(&mut run)?,
        Command::Kummer(_) => cmd_kummer(&mut run)?,
        Command::Mcg(_) => cmd_mcg(&mut run)?,
        Command::Flow(_) => cmd_flow(&mut run)?,
    };
    Ok(Outcome {
        files: run.files,
        summary,
        exit_code,
    })
}

fn cmd_sample(run: &mut Run) -> Result<(String, i32)> {
    let mut records = Vec::new();
    for seed in run.seeds() {
        let phi = run.sample(seed)?;
        let ot = orbit_type(&phi);
        records.push(SampleRecord {
            seed,
            relator_residual: phi.relator_residual(),
            orbit_type: ot.label,
            h0: ot.h0,
            representation: phi.to_data(),
        });
    }
    let worst = records.iter().map(|r| r.relator_residual).fold(0.0, f64::max);
    run.envelope("samples.json", PayloadKind::Representations, &records)?;
    Ok((format!("sampled {} points, max relator residual {worst:.3e}", records.len()), 0))
}

fn cmd_cohomology(run: &mut Run) -> Result<(String, i32)> {
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for seed in run.seeds() {
        let data = build_complex(&run.sample(seed)?);
        let summary = data.summary();
        records.push(CohomologyRecord {
            seed,
            summary: summary.clone(),
            euler_characteristic: data.euler_characteristic(),
        });
        rows.push((seed, summary));
    }
    run.raw_file("cohomology.csv", &cohomology_csv(&rows)?)?;
    run.envelope("cohomology.json", PayloadKind::Cohomology, &records)?;
    let first = &records[0].summary;
    Ok((
        format!("{} points; first point h0={} h1={} h2={}", records.len(), first.h0, first.h1, first.h2),
        0,
    ))
}

fn cmd_bracket(run: &mut Run) -> Result<(String, i32)> {
    let cfg = run.cfg;
    cfg.require_functions(2)?;
    let mut records = Vec::new();
    for seed in run.seeds() {
        let phi = run.sample(seed)?;
        for (i, j) in pairs(cfg.functions.len()) {
            let (f, h) = (&cfg.functions[i], &cfg.functions[j]);
            records.push(BracketRecord {
                seed,
                f: f.to_string(),
                h: h.to_string(),
                value: bracket(f, h, &phi, &cfg.form)?,
                chain_value: diamond(f, h, &phi, &cfg.form)?,
            });
        }
    }
    run.envelope("bracket.json", PayloadKind::Bracket, &records)?;
    let r = &records[0];
    Ok((format!("{{{}, {}}} = {:.12e} at seed {}", r.f, r.h, r.value.value, r.seed), 0))
}

fn cmd_jacobi(run: &mut Run) -> Result<(String, i32)> {
    let cfg = run.cfg;
    cfg.require_functions(3)?;
    let n = cfg.functions.len();
    let triples: Vec<[usize; 3]> = (0..n)
        .flat_map(|a| (a + 1..n).flat_map(move |b| (b + 1..n).map(move |c| [a, b, c])))
        .collect();
    let mut records = Vec::new();
    for seed in run.seeds() {
        let phi = run.sample(seed)?;
        let residuals = jacobi_residuals(&cfg.functions, &triples, &phi, &cfg.form)?;
        for (t, residual) in triples.iter().zip(residuals) {
            records.push(JacobiRecord {
                seed,
                triple: t.map(|k| cfg.functions[k].to_string()),
                residual,
            });
        }
    }
    let worst = records.iter().map(|r| r.residual).fold(0.0, f64::max);
    run.envelope("jacobi.json", PayloadKind::Jacobi, &records)?;
    Ok((format!("{} Jacobi sums, max residual {worst:.3e}", records.len()), 0))
}

fn cmd_rank_scan(run: &mut Run) -> Result<(String, i32)> {
    let cfg = run.cfg;
    let family = cfg.family(run.seed);
    let records = rank_scan(&cfg.spec, cfg.raw.genus, &cfg.central, &cfg.form, &run.seeds(), &family)?;
    run.raw_file("scan.csv", &scan_csv(&records)?)?;
    run.envelope("scan.json", PayloadKind::RankScan, &records)?;
    let ranks: Vec<String> = records.iter().map(|r| r.rank.to_string()).collect();
    Ok((format!("ranks: {}", ranks.join(" ")), 0))
}

fn cmd_kummer(run: &mut Run) -> Result<(String, i32)> {
    let cfg = run.cfg;
    if *cfg.spec.kind() != GroupKind::SU2 || cfg.raw.genus != 2 {
        return Err(Error::config("group", "the census is defined for SU2 in genus 2"));
    }
    if !cfg.spec.is_central_element(&cfg.central) || (&cfg.central - cfg.spec.identity()).norm() > 0.0 {
        return Err(Error::config("central", "the census uses central target I"));
    }
    let report = kummer_census(run.seed, cfg.raw.census.unwrap_or_default(), &cfg.family(run.seed))?;
    run.raw_file("kummer.csv", &scan_csv(&report.records)?)?;
    run.envelope("kummer.json", PayloadKind::Kummer, &report)?;
    for v in &report.violations {
        eprintln!("violation: {v}");
    }
    Ok((
        format!(
            "{} records, {} violations, min gap {:.3e}",
            report.records.len(),
            report.violations.len(),
            report.min_gap
        ),
        0,
    ))
}

fn cmd_mcg(run: &mut Run) -> Result<(String, i32)> {
    let cfg = run.cfg;
    cfg.require_functions(2)?;
    let beta = cfg.mapping_class()?;
    let mut records: Vec<McgRecord> = Vec::new();
    for seed in run.seeds() {
        let phi = run.sample(seed)?;
        for (i, j) in pairs(cfg.functions.len()) {
            let (f, h) = (&cfg.functions[i], &cfg.functions[j]);
            records.push(McgRecord {
                seed,
                f: f.to_string(),
                h: h.to_string(),
                residual: mcg_pullback_check(&beta, f, h, &phi, &cfg.form)?,
            });
        }
    }
    let worst = records.iter().map(|r| r.residual).fold(0.0, f64::max);
    let payload = json!({
        "mapping_class": beta.name(),
        "images": beta.images().iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        "orientation": beta.orientation(),
        "exact": beta.is_exact(),
        "records": serde_json::to_value(&records)?,
    });
    run.envelope("mcg.json", PayloadKind::Mcg, &payload)?;
    Ok((format!("{} pullback checks, max residual {worst:.3e}", records.len()), 0))
}

fn cmd_flow(run: &mut Run) -> Result<(String, i32)> {
    let cfg = run.cfg;
    cfg.require_functions(1)?;
    let flow = cfg.raw.flow.unwrap_or(FlowConfig {
        t_end: default_t_end(),
        dt: default_dt(),
    });
    let opts = FlowOptions {
        t_end: flow.t_end,
        dt: flow.dt,
        project: true,
    };
    let f = &cfg.functions[0];
    let phi = run.sample(run.seed)?;
    let traj = integrate_flow(f, &phi, &cfg.form, opts)?;
    let mut csv = Vec::new();
    traj.write_csv(&mut csv)?;
    run.raw_file("trajectory.csv", &csv)?;
    let report = FlowReport {
        seed: run.seed,
        function: f.to_string(),
        completed: traj.completed(),
        aborted: traj.aborted.clone(),
        value_drift: traj.value_drift(),
        max_relator_residual: traj.max_relator_residual(),
        states: traj.states.clone(),
        endpoint: traj.endpoint.to_data(),
    };
    run.envelope("flow.json", PayloadKind::Flow, &report)?;
    match &traj.aborted {
        Some(reason) => Ok((format!("flow aborted: {reason}"), 2)),
        None => Ok((
            format!(
                "{} steps, drift {:.3e}, max relator residual {:.3e}",
                traj.states.len() - 1,
                report.value_drift,
                report.max_relator_residual
            ),
            0,
        )),
    }
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let env_seed = std::env::var(SEED_ENV).ok();
    match execute(&cli.command, env_seed.as_deref()) {
        Ok(outcome) => {
            if outcome.exit_code == 0 {
                println!("{}", outcome.summary);
            } else {
                eprintln!("{}", outcome.summary);
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_config(dir: &Path, value: Value) -> PathBuf {
        let path = dir.join("config.json");
        std::fs::write(&path, value.to_string()).unwrap();
        path
    }

    fn common(config: PathBuf, out: PathBuf, seed: Option<u64>) -> CommonArgs {
        CommonArgs {
            config,
            seed,
            out,
            threads: None,
        }
    }

    #[test]
    fn seed_precedence() {
        assert_eq!(resolve_seed(Some(3), Some("9"), Some(5)).unwrap(), 3);
        assert_eq!(resolve_seed(None, Some("9"), Some(5)).unwrap(), 9);
        assert_eq!(resolve_seed(None, None, Some(5)).unwrap(), 5);
        assert_eq!(resolve_seed(None, None, None).unwrap(), 0);
        assert!(matches!(resolve_seed(None, Some("x"), None), Err(Error::Config { .. })));
    }

    #[test]
    fn validation_names_the_field() {
        let base = json!({"group": "SU2", "genus": 2, "central": "-I", "form": {"type": "diag", "entries": [1.0, 1.0, 1.0]}});
        assert!(RunConfig::from_json(&base.to_string()).unwrap().validate().is_ok());
        let cases = [
            (json!({"group": "SO3", "genus": 2, "central": "-I"}), "central"),
            (json!({"group": "SU7", "genus": 2}), "group"),
            (json!({"group": "SU2", "genus": 0}), "genus"),
            (json!({"group": "SU2", "genus": 2, "form": {"type": "diag", "entries": [1.0]}}), "form"),
            (json!({"group": "SU2", "genus": 2, "form": {"type": "gram", "matrix": [[1.0, 0.5, 0.0], [0.5, 1.0, 0.0], [0.0, 0.0, 1.0]]}}), "form"),
            (json!({"group": "SU2", "genus": 1, "functions": ["tr(x2)"]}), "functions[0]"),
            (json!({"group": "SU2", "genus": 1, "functions": ["tr(x1"]}), "functions[0]"),
            (json!({"group": "SU2", "genus": 1, "flow": {"dt": -1.0}}), "flow.dt"),
            (json!({"group": "SU2", "genus": 1, "bogus": 1}), "bogus"),
        ];
        for (cfg, field) in cases {
            let err = RunConfig::from_json(&cfg.to_string()).and_then(|c| c.validate().map(|_| ()));
            match err {
                Err(Error::Config { field: f, .. }) => assert_eq!(f, field, "{cfg}"),
                other => panic!("{cfg}: {:?}", other.err()),
            }
        }
    }

    #[test]
    fn sample_u1_genus_three_has_zero_residual() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(dir.path(), json!({"group": "U1", "genus": 3, "samples": 3}));
        let out = dir.path().join("out");
        let outcome = execute(&Command::Sample(common(cfg, out.clone(), Some(1))), None).unwrap();
        assert_eq!(outcome.exit_code, 0);
        let env = Envelope::load(&out.join("samples.json")).unwrap();
        for r in env.payload.as_array().unwrap() {
            assert_eq!(r["relator_residual"].as_f64().unwrap(), 0.0);
        }
        assert_eq!(env.config["config"]["group"], "U1");
        assert_eq!(env.tool_version, crate::persistence::TOOL_VERSION);
    }

    #[test]
    fn jacobi_with_a_constant_function_is_tiny() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(
            dir.path(),
            json!({"group": "SU2", "genus": 2, "functions": ["tr(x1)", "2.5", "tr(y1*x2)"]}),
        );
        let out = dir.path().join("out");
        execute(&Command::Jacobi(common(cfg, out.clone(), Some(4))), None).unwrap();
        let env = Envelope::load(&out.join("jacobi.json")).unwrap();
        for r in env.payload.as_array().unwrap() {
            assert!(r["residual"].as_f64().unwrap() <= 1e-9);
        }
    }

    #[test]
    fn scan_reports_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(dir.path(), json!({"group": "SU2", "genus": 2, "samples": 4}));
        let mut bodies = Vec::new();
        for k in 0..2 {
            let out = dir.path().join(format!("out{k}"));
            execute(&Command::RankScan(common(cfg.clone(), out.clone(), Some(11))), None).unwrap();
            bodies.push((
                std::fs::read(out.join("scan.csv")).unwrap(),
                std::fs::read(out.join("scan.json")).unwrap(),
            ));
        }
        assert_eq!(bodies[0], bodies[1]);
        let text = String::from_utf8(bodies[0].0.clone()).unwrap();
        assert!(text.starts_with("seed,orbit_type,h0,h1,rank,sv_gap\n11,irreducible,0,6,6,"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::config("central", "bad")), 1);
        assert_eq!(exit_code(&Error::SamplingFailed { restarts: 20, residual: 1.0 }), 2);
        assert_eq!(exit_code(&Error::NotMember { residual: 1.0 }), 2);
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(dir.path(), json!({"group": "SO3", "genus": 2, "central": "-I"}));
        let code = main_with_args(["surface-poisson", "sample", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
        assert_eq!(code, 1);
    }
}
