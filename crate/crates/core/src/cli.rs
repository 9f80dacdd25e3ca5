//! Batch experiment driver behind the `musynth` binary.
//!
//! Every subcommand resolves its flags into one [`ExperimentConfig`], writes
//! it into `manifest.json` next to its outputs, and can be re-run from that
//! manifest with `--manifest`. Exit codes: 0 ok, 1 internal error or a missed
//! `--check` target, 2 bad input, 3 infeasible or unstable input.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::baseline::{self, DoyleObjective, DoylePoint, DOYLE_START};
use crate::error::{Error, Result};
use crate::hinf::{self, PowerIterConfig, SimulationOperator};
use crate::lti;
use crate::musyn::{
    self, default_init, doyle_plant, io, AugmentedPolicy, ChannelDims, CostMode, PartitionedPlant, PolicyObjective,
    RegularizationConfig,
};
use crate::nds::{run_nds, NdsConfig, NdsTermination};
use crate::objective::{CountingObjective, Objective};
use crate::zosm::{run_zo, ZoConfig};

pub const MANIFEST_FORMAT: &str = "musynth/manifest-v1";
/// Caps the size of the worker pool.
pub const THREADS_ENV: &str = "MUSYNTH_THREADS";

/// ZO settings used for the Doyle study unless overridden.
pub const DOYLE_ZO_ETA: f64 = 0.12;
pub const DOYLE_ZO_DELTA: f64 = 1e-2;
pub const DOYLE_ZO_BUDGET: u64 = 50_000;
pub const DOYLE_NDS_BUDGET: u64 = 100_000;
pub const DOYLE_ZO_TARGET: f64 = 1.05;
pub const DOYLE_NDS_TARGET: f64 = 1.10;

#[derive(Debug, Parser)]
#[command(name = "musynth", version, about = "Model-free mu-synthesis by derivative-free policy search")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Doyle's static example: ZO and NDS from (Q, d) = (72, 85) next to the DK baseline.
    Doyle(CommonArgs),
    /// Synthesize a controller and D-scale for a plant file or a seeded random plant.
    Synth(CommonArgs),
    /// H-infinity norm of a plant file by the frequency sweep and by power iteration.
    Hinf(CommonArgs),
    /// Write a seeded random stable plant.
    Randgen(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Plant JSON file.
    #[arg(long)]
    pub plant: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub algo: Option<Algo>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Seed for the optimizer and, for generated plants, the plant itself.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Exit nonzero when a declared target is missed.
    #[arg(long)]
    pub check: bool,
    /// Contour grid resolution for `doyle`.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Plant dimensions `n_x,n_w,n_u,n_d,n_v,n_e,n_y` for generated plants.
    #[arg(long)]
    pub dims: Option<String>,
    /// Override any configuration entry, e.g. `zo.eta=0.05`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Re-run from a manifest written by an earlier run.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Algo {
    Nds,
    Zo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    ModelFree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HinfMethod {
    Oracle,
    Power,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomPlantSpec {
    pub n_x: usize,
    pub dims: ChannelDims,
    pub rho_target: f64,
    pub seed: u64,
}

impl Default for RandomPlantSpec {
    fn default() -> Self {
        Self { n_x: 10, dims: ChannelDims::siso(), rho_target: 0.9, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DoyleSettings {
    pub start: DoylePoint,
    pub run_nds: bool,
    pub dk_rounds: usize,
    pub grid: usize,
    pub q_range: (f64, f64),
    pub d_range: (f64, f64),
}

impl Default for DoyleSettings {
    fn default() -> Self {
        Self { start: DOYLE_START, run_nds: true, dk_rounds: 10, grid: 100, q_range: (-10.0, 90.0), d_range: (0.05, 95.0) }
    }
}

/// Everything a run depends on. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: String,
    pub plant: Option<PathBuf>,
    pub random_plant: RandomPlantSpec,
    pub algo: Algo,
    pub mode: Mode,
    /// Controller order.
    pub n_k: usize,
    /// D-scale order.
    pub n_dscale: usize,
    pub nds: NdsConfig,
    pub zo: ZoConfig,
    pub regularization: RegularizationConfig,
    pub power: PowerIterConfig,
    pub hinf_method: HinfMethod,
    pub doyle: DoyleSettings,
    pub check: bool,
}

impl ExperimentConfig {
    pub fn defaults_for(command: &str) -> Self {
        let doyle = command == "doyle";
        let zo = if doyle {
            ZoConfig {
                eta: DOYLE_ZO_ETA,
                delta: DOYLE_ZO_DELTA,
                n_iters: DOYLE_ZO_BUDGET as usize,
                max_evals: Some(DOYLE_ZO_BUDGET),
                ..ZoConfig::default()
            }
        } else {
            ZoConfig { eta: 1e-3, delta: 1e-3, n_iters: 1000, ..ZoConfig::default() }
        };
        let nds = if doyle {
            NdsConfig { max_iters: 100_000, max_evals: Some(DOYLE_NDS_BUDGET), ..NdsConfig::for_start(&DOYLE_START.to_vec()) }
        } else {
            NdsConfig { max_iters: 200, ..NdsConfig::default() }
        };
        Self {
            command: command.to_string(),
            plant: None,
            random_plant: RandomPlantSpec::default(),
            algo: if doyle { Algo::Zo } else { Algo::Nds },
            mode: Mode::Exact,
            n_k: 0,
            n_dscale: 1,
            nds,
            zo,
            regularization: RegularizationConfig::default(),
            power: PowerIterConfig::default(),
            hinf_method: HinfMethod::Both,
            doyle: DoyleSettings::default(),
            check: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !["doyle", "synth", "hinf", "randgen"].contains(&self.command.as_str()) {
            return Err(Error::Config(format!("unknown command {:?}", self.command)));
        }
        self.nds.validate()?;
        self.zo.validate()?;
        self.regularization.validate()?;
        self.power.validate()?;
        if self.doyle.grid < 2 {
            return Err(Error::Config("doyle.grid must be at least 2".into()));
        }
        Ok(())
    }

    /// Applies `key=value` with a dotted key; the value is read as JSON,
    /// falling back to a plain string.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (key, raw) =
            spec.split_once('=').ok_or_else(|| Error::Config(format!("override {spec:?} is not key=value")))?;
        let value: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut root = serde_json::to_value(&*self)?;
        let mut slot = &mut root;
        for part in key.split('.') {
            slot = slot
                .as_object_mut()
                .and_then(|m| m.get_mut(part))
                .ok_or_else(|| Error::Config(format!("unknown configuration key {key:?}")))?;
        }
        *slot = value;
        *self = serde_json::from_value(root).map_err(|e| Error::Config(format!("override {spec:?}: {e}")))?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub format: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let m: Manifest = serde_json::from_str(&fs::read_to_string(path)?)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if m.format != MANIFEST_FORMAT {
            return Err(Error::Format(format!("unsupported manifest format {:?}", m.format)));
        }
        Ok(m)
    }
}

/// Parses `n_x,n_w,n_u,n_d,n_v,n_e,n_y`.
pub fn parse_dims(text: &str) -> Result<(usize, ChannelDims)> {
    let v: Vec<usize> = text
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Config(format!("bad --dims {text:?}: {e}")))?;
    let [n_x, n_w, n_u, n_d, n_v, n_e, n_y] = v[..] else {
        return Err(Error::Config(format!("--dims needs 7 entries n_x,n_w,n_u,n_d,n_v,n_e,n_y, got {text:?}")));
    };
    Ok((n_x, ChannelDims { n_w, n_d, n_u, n_v, n_e, n_y }))
}

/// Maps an error to the process exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Io(_) | Error::Format(_) | Error::Dimension(_) | Error::Domain(_) => 2,
        Error::Unstable { .. }
        | Error::NeedsStabilizingInit { .. }
        | Error::InfeasibleStart
        | Error::IllPosed { .. }
        | Error::SingularScale { .. }
        | Error::Divergence { .. } => 3,
        _ => 1,
    }
}

fn resolve(name: &str, args: &CommonArgs) -> Result<(ExperimentConfig, Option<PathBuf>)> {
    let mut cfg = match &args.manifest {
        Some(path) => {
            let m = Manifest::load(path)?;
            if m.config.command != name {
                return Err(Error::Config(format!("manifest is for {:?}, not {name:?}", m.config.command)));
            }
            m.config
        }
        None => ExperimentConfig::defaults_for(name),
    };
    if let Some(p) = &args.plant {
        cfg.plant = Some(p.clone());
    }
    if let Some(a) = args.algo {
        cfg.algo = a;
    }
    if let Some(m) = args.mode {
        cfg.mode = m;
    }
    if let Some(s) = args.seed {
        cfg.nds.rng_seed = s;
        cfg.zo.rng_seed = s;
        cfg.random_plant.seed = s;
    }
    if let Some(g) = args.grid {
        cfg.doyle.grid = g;
    }
    if let Some(d) = &args.dims {
        let (n_x, dims) = parse_dims(d)?;
        cfg.random_plant.n_x = n_x;
        cfg.random_plant.dims = dims;
    }
    if args.check {
        cfg.check = true;
    }
    for o in &args.overrides {
        cfg.apply_override(o)?;
    }
    cfg.validate()?;
    Ok((cfg, args.out.clone()))
}

/// Parses the process arguments, runs, and returns the exit code.
pub fn main_from_env() -> i32 {
    let cli = Cli::parse();
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // Only fails if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match run(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("musynth: {e}");
            exit_code(&e)
        }
    }
}

/// Runs one subcommand; `Ok` carries 0, or 1 when a `--check` target was missed.
pub fn run(command: &Command) -> Result<i32> {
    let (name, args) = match command {
        Command::Doyle(a) => ("doyle", a),
        Command::Synth(a) => ("synth", a),
        Command::Hinf(a) => ("hinf", a),
        Command::Randgen(a) => ("randgen", a),
    };
    let (cfg, out) = resolve(name, args)?;
    run_config(&cfg, out.as_deref())
}

/// Runs a resolved configuration, writing outputs under `out` when given.
pub fn run_config(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<i32> {
    cfg.validate()?;
    let mut sink = Outputs::new(out)?;
    let code = match cfg.command.as_str() {
        "doyle" => cmd_doyle(cfg, &mut sink)?,
        "synth" => cmd_synth(cfg, &mut sink)?,
        "hinf" => cmd_hinf(cfg, &mut sink)?,
        "randgen" => cmd_randgen(cfg, &mut sink)?,
        other => return Err(Error::Config(format!("unknown command {other:?}"))),
    };
    sink.finish(cfg)?;
    Ok(code)
}

/// Collects output files and writes the manifest last.
struct Outputs {
    dir: Option<PathBuf>,
    written: Vec<String>,
}

impl Outputs {
    fn new(dir: Option<&Path>) -> Result<Self> {
        if let Some(d) = dir {
            fs::create_dir_all(d)?;
        }
        Ok(Self { dir: dir.map(Path::to_path_buf), written: Vec::new() })
    }

    fn file(&mut self, name: &str) -> Result<Option<BufWriter<File>>> {
        match &self.dir {
            Some(d) => {
                self.written.push(name.to_string());
                Ok(Some(BufWriter::new(File::create(d.join(name))?)))
            }
            None => Ok(None),
        }
    }

    fn text(&mut self, name: &str, body: &str) -> Result<()> {
        if let Some(d) = &self.dir {
            fs::write(d.join(name), format!("{body}\n"))?;
            self.written.push(name.to_string());
        }
        Ok(())
    }

    fn finish(self, cfg: &ExperimentConfig) -> Result<()> {
        if let Some(d) = &self.dir {
            let m = Manifest {
                format: MANIFEST_FORMAT.into(),
                version: env!("CARGO_PKG_VERSION").into(),
                config: cfg.clone(),
                outputs: self.written,
            };
            fs::write(d.join("manifest.json"), serde_json::to_string_pretty(&m)? + "\n")?;
        }
        Ok(())
    }
}

fn print_json(v: &Value) -> Result<String> {
    let s = serde_json::to_string_pretty(v)?;
    println!("{s}");
    Ok(s)
}

fn cmd_doyle(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<i32> {
    let start = DoylePoint::new(cfg.doyle.start.q, cfg.doyle.start.d)?;
    let x0 = start.to_vec();
    let exact = DoyleObjective;
    let model_free;
    let f: &dyn Objective = match cfg.mode {
        Mode::Exact => &exact,
        Mode::ModelFree => {
            let plant = doyle_plant();
            model_free = PolicyObjective::new(
                &plant,
                plant.dims().layout(0, 0),
                CostMode::ModelFree(cfg.power.clone()),
            )?
            .with_positive_scale();
            &model_free
        }
    };

    let zo = run_zo(&f, &x0, &cfg.zo)?;
    let zo_best = zo.iterates[zo.best_index].clone();
    let zo_best_exact = exact.value(&zo_best);
    if let Some(w) = out.file("zo_trace.csv")? {
        zo.write_csv(w)?;
    }

    let nds = if cfg.doyle.run_nds { Some(run_nds(&f, &x0, &cfg.nds)?) } else { None };
    if let (Some(tr), Some(w)) = (&nds, out.file("nds_trace.csv")?) {
        tr.write_csv(w)?;
    }

    let dk = baseline::run_dk_doyle(start, cfg.doyle.dk_rounds)?;
    if let Some(w) = out.file("dk_trace.csv")? {
        dk.write_csv(w)?;
    }

    if let Some(w) = out.file("contour.csv")? {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["q", "d", "objective"])?;
        for row in baseline::contour_grid(cfg.doyle.grid, cfg.doyle.q_range, cfg.doyle.d_range)? {
            csv.write_record(row.iter().map(|v| io::format_f64(*v)))?;
        }
        csv.flush()?;
    }
    if let Some(w) = out.file("zo_iterates.csv")? {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["iter", "q", "d"])?;
        for (n, x) in zo.iterates.iter().enumerate() {
            csv.write_record([n.to_string(), io::format_f64(x[0]), io::format_f64(x[1])])?;
        }
        csv.flush()?;
    }

    let dk_value = dk.final_objective();
    let nds_final = nds.as_ref().map(|t| exact.value(&t.final_x));
    let mut misses = Vec::new();
    if !(zo_best_exact <= DOYLE_ZO_TARGET) || zo.oracle_calls() > DOYLE_ZO_BUDGET {
        misses.push(format!("zo best {zo_best_exact} > {DOYLE_ZO_TARGET} or over budget"));
    }
    if (dk_value - 73f64.sqrt()).abs() > 1e-9 {
        misses.push(format!("dk stall {dk_value} differs from sqrt(73)"));
    }
    if let Some(tr) = &nds {
        let v = nds_final.unwrap_or(f64::NAN);
        if !(v <= DOYLE_NDS_TARGET) || tr.oracle_calls() > DOYLE_NDS_BUDGET {
            misses.push(format!("nds final {v} > {DOYLE_NDS_TARGET} or over budget"));
        }
    }

    let summary = serde_json::json!({
        "zo": {
            "best_cost": zo.best_cost(),
            "best_exact": zo_best_exact,
            "best_point": {"q": zo_best[0], "d": zo_best[1]},
            "uniform_index": zo.uniform_index,
            "uniform_cost": zo.records[zo.uniform_index].cost,
            "oracle_calls": zo.oracle_calls(),
        },
        "nds": nds.as_ref().map(|t| serde_json::json!({
            "final_cost": t.final_cost(),
            "final_exact": nds_final,
            "final_point": {"q": t.final_x[0], "d": t.final_x[1]},
            "oracle_calls": t.oracle_calls(),
            "termination": t.termination,
        })),
        "dk": {
            "final_point": dk.final_point(),
            "final_objective": dk_value,
        },
        "check_failures": misses,
    });
    let s = print_json(&summary)?;
    out.text("result.json", &s)?;
    report_check(cfg.check, &misses)
}

fn report_check(check: bool, misses: &[String]) -> Result<i32> {
    if check && !misses.is_empty() {
        for m in misses {
            eprintln!("musynth: check failed: {m}");
        }
        return Ok(1);
    }
    Ok(0)
}

/// Loads the configured plant file, or generates the configured random plant.
pub fn load_or_generate(cfg: &ExperimentConfig) -> Result<PartitionedPlant> {
    match &cfg.plant {
        Some(p) => io::load_plant(p).map_err(|e| match e {
            Error::Io(m) => Error::Io(format!("{}: {m}", p.display())),
            other => other,
        }),
        None => {
            let r = &cfg.random_plant;
            musyn::random_plant(r.n_x, r.dims, r.rho_target, r.seed)
        }
    }
}

/// Result of one synthesis run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthOutcome {
    pub algo: Algo,
    pub mode: Mode,
    /// Cost seen by the optimizer at the start and at the returned policy.
    pub initial_cost: f64,
    pub final_cost: f64,
    /// Regularized cost of the returned policy recomputed with the model.
    pub initial_exact_jc: f64,
    pub final_exact_jc: f64,
    pub final_exact_j: f64,
    pub final_spectral_radius: f64,
    pub final_stable: bool,
    pub oracle_calls: u64,
    pub iterations: usize,
    /// Why NDS stopped; ZO always runs its full iteration count.
    pub termination: Option<NdsTermination>,
    /// Per-iteration costs seen by the optimizer.
    #[serde(skip)]
    pub cost_trace: Vec<f64>,
    #[serde(skip)]
    pub final_policy: Option<AugmentedPolicy>,
    #[serde(skip)]
    pub trace_csv: Vec<u8>,
}

/// Runs the configured algorithm on `plant` from the default initial policy.
pub fn synthesize(plant: &PartitionedPlant, cfg: &ExperimentConfig) -> Result<SynthOutcome> {
    let init = default_init(plant, cfg.n_k, cfg.n_dscale)?;
    let layout = init.layout();
    let mode = match cfg.mode {
        Mode::Exact => CostMode::Exact,
        Mode::ModelFree => CostMode::ModelFree(cfg.power.clone()),
    };
    let f = CountingObjective::new(PolicyObjective::new(plant, layout, mode)?.regularized(cfg.regularization.clone()));
    let exact = PolicyObjective::new(plant, layout, CostMode::Exact)?.regularized(cfg.regularization.clone());
    let x0 = init.flatten();

    let mut csv = Vec::new();
    let mut termination = None;
    let (x, costs) = match cfg.algo {
        Algo::Nds => {
            let tr = run_nds(&f, &x0, &cfg.nds)?;
            tr.write_csv(&mut csv)?;
            termination = Some(tr.termination);
            (tr.final_x.clone(), tr.records.iter().map(|r| r.cost).collect::<Vec<_>>())
        }
        Algo::Zo => {
            let tr = run_zo(&f, &x0, &cfg.zo)?;
            tr.write_csv(&mut csv)?;
            (tr.output().to_vec(), tr.records.iter().map(|r| r.cost).collect())
        }
    };
    let policy = AugmentedPolicy::unflatten(&layout, &x)?;
    let cl = musyn::build_augmented_plant(plant)?.closed_loop(&policy)?;
    let rho = lti::spectral_radius(&cl)?;
    Ok(SynthOutcome {
        algo: cfg.algo,
        mode: cfg.mode,
        initial_cost: costs[0],
        final_cost: f.inner().value(&x),
        initial_exact_jc: exact.value(&x0),
        final_exact_jc: exact.value(&x),
        final_exact_j: musyn::cost_j(plant, &policy, CostMode::Exact),
        final_spectral_radius: rho,
        final_stable: rho < 1.0,
        oracle_calls: f.calls(),
        iterations: costs.len() - 1,
        termination,
        cost_trace: costs,
        final_policy: Some(policy),
        trace_csv: csv,
    })
}

fn cmd_synth(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<i32> {
    let plant = load_or_generate(cfg)?;
    let res = synthesize(&plant, cfg)?;
    if let Some(mut w) = out.file("trace.csv")? {
        std::io::Write::write_all(&mut w, &res.trace_csv)?;
    }
    if let Some(p) = &res.final_policy {
        out.text("policy.json", &io::policy_to_json(p)?)?;
    }
    let s = print_json(&serde_json::to_value(&res)?)?;
    out.text("result.json", &s)?;
    let mut misses = Vec::new();
    if !res.final_stable {
        misses.push("final closed loop is not stable".to_string());
    }
    if !(res.final_exact_jc <= res.initial_exact_jc) {
        misses.push(format!("final cost {} above initial {}", res.final_exact_jc, res.initial_exact_jc));
    }
    report_check(cfg.check, &misses)
}

fn cmd_hinf(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<i32> {
    let path = cfg.plant.as_ref().ok_or_else(|| Error::Config("hinf needs --plant".into()))?;
    let sys = &io::load_system(path).map_err(|e| match e {
        Error::Io(m) => Error::Io(format!("{}: {m}", path.display())),
        other => other,
    })?;
    let oracle = match cfg.hinf_method {
        HinfMethod::Oracle | HinfMethod::Both => Some(hinf::hinf_norm(sys)?),
        HinfMethod::Power => None,
    };
    let power = match cfg.hinf_method {
        HinfMethod::Power | HinfMethod::Both => {
            let op = SimulationOperator::new(sys.clone(), crate::harness::DEFAULT_GUARD);
            Some(hinf::l2gain_power_iteration(&op, &cfg.power)?)
        }
        HinfMethod::Oracle => None,
    };
    let s = print_json(&serde_json::json!({
        "plant": path,
        "oracle": oracle,
        "power_iteration": power,
    }))?;
    out.text("result.json", &s)?;
    Ok(0)
}

fn cmd_randgen(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<i32> {
    let r = &cfg.random_plant;
    let plant = musyn::random_plant(r.n_x, r.dims, r.rho_target, r.seed)?;
    let json = io::plant_to_json(&plant, true)?;
    if out.dir.is_some() {
        out.text("plant.json", &json)?;
    } else {
        println!("{json}");
    }
    Ok(0)
}
