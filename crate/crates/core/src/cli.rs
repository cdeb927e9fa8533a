//! Command-line front end: `validate | report | sweep | export | read`.
//!
//! Settings come from an optional TOML file and are overridden by flags.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::charfn::{magnitude_csv, tabulate_csv, validate_identities, ClockModel};
use crate::clock::ClockState;
use crate::error::{Error, Result};
use crate::models::{CyclicClockSpec, ModelConfig, ModelKind};
use crate::numerics::{uniform_samples, QuadratureRule, Window};
use crate::operators::{build_hamiltonian, build_pc_for, build_tc_with, variance, OperatorMatrix};
use crate::output::{fmt17, num17, to_json_text};
use crate::theorems::{default_probes, render_table, Status, Suite, TheoremReport, DEFAULT_SEED, DEFAULT_T_SAMPLES};
use crate::tolerance::Tolerances;

/// Exit code for a failed check on an exact model.
pub const EXIT_CHECK_FAILED: i32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericsConfig {
    pub nodes_per_panel: usize,
    pub panels: usize,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self { nodes_per_panel: QuadratureRule::DEFAULT_NODES, panels: QuadratureRule::DEFAULT_PANELS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CharfnConfig {
    /// Points of the `u` window used by `validate` and the tables.
    pub samples: usize,
}

impl Default for CharfnConfig {
    fn default() -> Self {
        Self { samples: 33 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OperatorsConfig {
    pub symmetrize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TheoremConfig {
    /// Evolution times in units of tau.
    pub t_samples: Vec<f64>,
    pub seed: u64,
}

impl Default for TheoremConfig {
    fn default() -> Self {
        Self { t_samples: DEFAULT_T_SAMPLES.to_vec(), seed: DEFAULT_SEED }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), formats: vec![Format::Json, Format::Csv] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub d_values: Vec<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { d_values: vec![32, 64, 128] }
    }
}

/// Full run configuration, one section per module.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub numerics: NumericsConfig,
    pub charfn: CharfnConfig,
    pub operators: OperatorsConfig,
    pub theorem_suite: TheoremConfig,
    pub tolerances: Tolerances,
    pub output: OutputConfig,
    pub sweep: SweepConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn quadrature(&self) -> Result<QuadratureRule> {
        QuadratureRule::clock(self.model.tau, self.numerics.nodes_per_panel, self.numerics.panels)
            .map_err(|e| Error::Config(e.to_string()))
    }

    /// Checks everything that can be checked without numerical work.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.model.tau > 0.0 && self.model.tau.is_finite()) {
            return bad(format!("tau must be positive, got {}", self.model.tau));
        }
        if self.numerics.nodes_per_panel < 2 {
            return bad("numerics.nodes_per_panel must be at least 2".into());
        }
        if self.charfn.samples < 3 {
            return bad("charfn.samples must be at least 3".into());
        }
        if self.theorem_suite.t_samples.iter().any(|t| !t.is_finite()) {
            return bad("theorem_suite.t_samples must be finite".into());
        }
        if self.output.formats.is_empty() {
            return bad("output.formats must not be empty".into());
        }
        self.quadrature()?;
        self.model.grid()?;
        Ok(())
    }

    fn wants(&self, f: Format) -> bool {
        self.output.formats.contains(&f)
    }
}

#[derive(Debug, Parser)]
#[command(name = "iqc", version, about = "Ideal quantum clock checks")]
pub struct Cli {
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub model: Option<String>,
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    /// Cycle dimension of the cyclic model.
    #[arg(long = "D", global = true)]
    pub dimension: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub index_min: Option<i64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub index_max: Option<i64>,
    #[arg(long, global = true)]
    pub nodes: Option<usize>,
    #[arg(long, global = true)]
    pub panels: Option<usize>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub format: Option<Vec<Format>>,
    #[arg(long, global = true)]
    pub symmetrize: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    #[value(name = "H")]
    H,
    #[value(name = "PC")]
    Pc,
    #[value(name = "TC")]
    Tc,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the characteristic-function identities.
    Validate,
    /// Run the lemma and theorem checks and emit plot-ready tables.
    Report,
    /// Theorem checks of the cyclic clock over several dimensions.
    Sweep {
        #[arg(long, value_delimiter = ',')]
        d_values: Option<Vec<usize>>,
    },
    /// Write an operator matrix as CSV plus a JSON envelope.
    Export {
        #[arg(long, value_enum)]
        which: Which,
    },
    /// Clock reading `<phi_C(t)|T_C|phi_C(t)>` at one time.
    Read {
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
    },
}

impl Overrides {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(m) = &self.model {
            let kind: ModelKind = m.parse()?;
            if kind != cfg.model.model {
                cfg.model = ModelConfig { model: kind, tau: cfg.model.tau, ..ModelConfig::default() };
            }
        }
        if let Some(t) = self.tau {
            cfg.model.tau = t;
        }
        if self.dimension.is_some() {
            cfg.model.dimension = self.dimension;
        }
        if self.index_min.is_some() {
            cfg.model.index_min = self.index_min;
        }
        if self.index_max.is_some() {
            cfg.model.index_max = self.index_max;
        }
        if let Some(n) = self.nodes {
            cfg.numerics.nodes_per_panel = n;
        }
        if let Some(p) = self.panels {
            cfg.numerics.panels = p;
        }
        if let Some(s) = self.samples {
            cfg.charfn.samples = s;
        }
        if let Some(s) = self.seed {
            cfg.theorem_suite.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.output.dir = o.clone();
        }
        if let Some(f) = &self.format {
            cfg.output.formats = f.clone();
        }
        cfg.operators.symmetrize |= self.symmetrize;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

fn build_model(cfg: &RunConfig) -> Result<Arc<dyn ClockModel>> {
    cfg.model.build().map_err(|e| match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    })
}

/// Parse-free entry point: runs `cli` and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("iqc: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let cfg = cli.overrides.resolve()?;
    match &cli.command {
        Command::Validate => cmd_validate(&cfg),
        Command::Report => cmd_report(&cfg),
        Command::Sweep { d_values } => {
            let mut cfg = cfg;
            if let Some(d) = d_values {
                cfg.sweep.d_values = d.clone();
            }
            cmd_sweep(&cfg)
        }
        Command::Export { which } => cmd_export(&cfg, *which),
        Command::Read { t } => cmd_read(&cfg, *t),
    }
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<i32> {
    let model = build_model(cfg)?;
    let report = validate_identities(model.as_ref(), cfg.charfn.samples)?;
    let dir = &cfg.output.dir;
    if cfg.wants(Format::Json) {
        write(dir, "identity.json", &to_json_text(&serde_json::to_value(&report)?)?)?;
    }
    if cfg.wants(Format::Csv) {
        write(dir, "charfn.csv", &tabulate_csv(model.as_ref(), cfg.charfn.samples))?;
    }
    println!(
        "{}: orthonormality {:.3e}, unitarity {:.3e}, orthogonality {:.3e}, symmetry {:.3e}",
        report.model,
        report.max_orthonormality_defect,
        report.max_unitarity_defect,
        report.max_orthogonality_defect,
        report.max_symmetry_defect
    );
    if model.is_exact() && report.max_defect() > cfg.tolerances.charfn_identity {
        println!("exact-model identity defect above {:.1e}", cfg.tolerances.charfn_identity);
        return Ok(EXIT_CHECK_FAILED);
    }
    Ok(0)
}

fn suite(cfg: &RunConfig, model: Arc<dyn ClockModel>) -> Result<Suite> {
    let tau = model.grid().tau();
    let times = cfg.theorem_suite.t_samples.iter().map(|s| s * tau).collect();
    Suite::new(model, &cfg.quadrature()?, cfg.tolerances, times)
}

/// Reading times for `reading.csv`: up to `[-10 tau, 10 tau]`, kept two clicks inside the grid.
fn reading_times(model: &dyn ClockModel) -> Vec<f64> {
    let g = model.grid();
    let tau = g.tau();
    let (lo, hi) = if model.cycle().is_some() {
        (-10.0 * tau, 10.0 * tau)
    } else {
        (((g.index_min() + 2) as f64 * tau).max(-10.0 * tau), ((g.index_max() - 2) as f64 * tau).min(10.0 * tau))
    };
    if lo > hi {
        return vec![0.0];
    }
    uniform_samples(Window { lo, hi }, 41)
}

/// Headline numbers of a report for the clock state `phi_C(0)`.
pub fn summary(suite: &Suite) -> Result<Value> {
    let model = suite.model();
    let tau = model.grid().tau();
    let click = ClockState::click(*model.grid(), 0)?;
    let sigma_t = variance(suite.time_operator(), &click)?.sqrt();
    let sigma_h = variance(suite.hamiltonian(), &click)?.sqrt();
    let comm = crate::operators::commutator_expectation(suite.time_operator(), suite.hamiltonian(), &click)?;
    let bound = std::f64::consts::FRAC_1_SQRT_2 * tau;
    let verdict = if sigma_t < bound { "pass" } else { "fail" };
    Ok(json!({
        "sigma_T": num17(sigma_t),
        "sigma_H": num17(sigma_h),
        "uncertainty_product": num17(sigma_t * sigma_h),
        "reading_0": num17(suite.reading(0.0)?),
        "commutator": {"re": num17(comm.re), "im": num17(comm.im)},
        "commutator_error": num17((comm - num_complex::Complex64::i()).norm()),
        "consistency_defect": num17(suite.consistency_defect()),
        "bound_check": format!("< 0.71·τ: {verdict}"),
    }))
}

/// Runs every check and writes the report files; returns the reports and the summary.
pub fn write_report(cfg: &RunConfig) -> Result<(Vec<TheoremReport>, Value)> {
    let model = build_model(cfg)?;
    let suite = suite(cfg, model.clone())?;
    let probes = default_probes(*model.grid(), cfg.theorem_suite.seed)?;
    let reports = suite.run(&probes)?;
    let summary = summary(&suite)?;
    let dir = &cfg.output.dir;

    if cfg.wants(Format::Json) {
        let mut echo = serde_json::to_value(cfg)?;
        if let Some(out) = echo.get_mut("output").and_then(Value::as_object_mut) {
            out.remove("dir");
        }
        let doc = json!({
            "model": model.name(),
            "config": echo,
            "summary": summary,
            "reports": serde_json::to_value(&reports)?,
        });
        write(dir, "report.json", &to_json_text(&doc)?)?;
        let stamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        write(dir, "run_meta.json", &to_json_text(&json!({ "generated_unix_seconds": stamp }))?)?;
    }
    write(dir, "report.txt", &render_table(&reports))?;
    if cfg.wants(Format::Csv) {
        let mut csv = String::from("t,reading,error\n");
        for t in reading_times(model.as_ref()) {
            let r = suite.reading(t)?;
            csv.push_str(&format!("{},{},{}\n", fmt17(t), fmt17(r), fmt17(r - t)));
        }
        write(dir, "reading.csv", &csv)?;
        write(dir, "charfn.csv", &magnitude_csv(model.as_ref(), cfg.charfn.samples))?;
    }

    Ok((reports, summary))
}

pub fn cmd_report(cfg: &RunConfig) -> Result<i32> {
    let (reports, summary) = write_report(cfg)?;
    print!("{}", render_table(&reports));
    println!("summary: {summary}");
    Ok(exit_for(&reports))
}

fn exit_for(reports: &[TheoremReport]) -> i32 {
    if reports.iter().any(|r| r.status == Status::Fail) {
        EXIT_CHECK_FAILED
    } else {
        0
    }
}

/// One row of a dimension sweep of the cyclic clock, probe `phi_C(0)`.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub dimension: usize,
    #[serde(serialize_with = "crate::output::ser17")]
    pub commutator_error: f64,
    #[serde(serialize_with = "crate::output::ser17")]
    pub lemma2_error: f64,
    #[serde(serialize_with = "crate::output::ser17")]
    pub shift_law_error: f64,
    #[serde(serialize_with = "crate::output::ser17")]
    pub uncertainty_product: f64,
}

pub fn sweep_rows(cfg: &RunConfig) -> Result<Vec<SweepRow>> {
    if cfg.model.model != ModelKind::Cyclic {
        return Err(Error::Config("sweep runs over D and needs --model cyclic".into()));
    }
    if cfg.sweep.d_values.is_empty() {
        return Err(Error::Config("sweep needs at least one D value".into()));
    }
    let mut rows = Vec::new();
    for &d in &cfg.sweep.d_values {
        let spec = CyclicClockSpec {
            dimension: d,
            tau: cfg.model.tau,
            frequencies: cfg.model.frequencies.unwrap_or_default(),
        };
        let grid = spec.full_grid()?;
        let model: Arc<dyn ClockModel> =
            Arc::new(crate::models::make_cyclic(spec, grid).map_err(|e| Error::Config(e.to_string()))?);
        let s = suite(cfg, model)?;
        let probes = default_probes(grid, cfg.theorem_suite.seed)?;
        let click = &probes[..1];
        let theorem = s.check_theorem(click)?;
        let pick = |name: &str| theorem.iter().find(|r| r.check == name).map(|r| r.measured);
        rows.push(SweepRow {
            dimension: d,
            commutator_error: theorem
                .iter()
                .find(|r| r.check == "theorem.b.commutator")
                .map_or(f64::NAN, |r| r.abs_error),
            lemma2_error: s.check_lemma2(&probes[0])?.abs_error,
            shift_law_error: pick("theorem.c.shift_law").map_or(f64::NAN, |m| m.re()),
            uncertainty_product: pick("theorem.d.uncertainty").map_or(f64::NAN, |m| m.re()),
        });
    }
    Ok(rows)
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<i32> {
    let rows = sweep_rows(cfg)?;
    let dir = &cfg.output.dir;
    if cfg.wants(Format::Json) {
        write(dir, "sweep.json", &to_json_text(&serde_json::to_value(&rows)?)?)?;
    }
    if cfg.wants(Format::Csv) {
        let mut csv = String::from("D,commutator_error,lemma2_error,shift_law_error,uncertainty_product\n");
        for r in &rows {
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                r.dimension,
                fmt17(r.commutator_error),
                fmt17(r.lemma2_error),
                fmt17(r.shift_law_error),
                fmt17(r.uncertainty_product)
            ));
        }
        write(dir, "sweep.csv", &csv)?;
    }
    for r in &rows {
        println!("D = {:>4}: |<[T_C,H]> - i| = {:.6e}", r.dimension, r.commutator_error);
    }
    Ok(0)
}

pub fn export_matrix(cfg: &RunConfig, which: Which) -> Result<OperatorMatrix> {
    let model = build_model(cfg)?;
    let op = match which {
        Which::H => build_hamiltonian(model.as_ref()),
        Which::Pc => build_pc_for(model.as_ref()),
        Which::Tc => build_tc_with(model.as_ref(), &cfg.quadrature()?, &cfg.tolerances)?,
    };
    Ok(if cfg.operators.symmetrize { op.symmetrized() } else { op })
}

pub fn cmd_export(cfg: &RunConfig, which: Which) -> Result<i32> {
    let op = export_matrix(cfg, which)?;
    let stem = match which {
        Which::H => "H",
        Which::Pc => "PC",
        Which::Tc => "TC",
    };
    let csv_name = format!("{stem}.csv");
    let dir = &cfg.output.dir;
    write(dir, &csv_name, &op.to_csv())?;
    if cfg.wants(Format::Json) {
        let model = build_model(cfg)?;
        write(dir, &format!("{stem}.json"), &to_json_text(&op.envelope(model.name(), &csv_name))?)?;
    }
    println!("{stem}: {} x {}, hermitian defect {:.3e}", op.grid().len(), op.grid().len(), op.hermitian_defect());
    Ok(0)
}

pub fn cmd_read(cfg: &RunConfig, t: f64) -> Result<i32> {
    let model = build_model(cfg)?;
    let suite = suite(cfg, model)?;
    let r = suite.reading(t)?;
    println!("{}", json!({ "t": num17(t), "reading": num17(r), "error": num17(r - t) }));
    Ok(0)
}
