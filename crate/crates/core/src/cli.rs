//! Command-line front end: `run`, `heuristics`, `certify` and `compare`.
//!
//! Settings are layered: profile defaults, then the `--config` file, then
//! flags.

use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::heuristics::{self, HeuristicPoint, KappaMode, KappaOptions, Slacks};
use crate::independence::{self, CertifyOptions, DEFAULT_EXACT_THRESHOLD};
use crate::monitors::{self, MonitorMode, MonitorReport};
use crate::nibble::{self, Trajectory};
use crate::pairgraph::{Layer, TriState};
use crate::params::{ProcessParams, Profile};
use crate::rng::{tag, StreamKey};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_REFUSED: i32 = 4;

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => EXIT_IO,
        Error::TriangleFound { .. } | Error::IndependentSetTooLarge { .. } => EXIT_REFUSED,
        _ => EXIT_CONFIG,
    }
}

#[derive(Debug, Parser)]
#[command(name = "tfn", version, about = "Seeded, regularized triangle-free nibble: runs, monitors, certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the process and write trajectory, monitors, final graph and a certificate attempt.
    Run(RunArgs),
    /// Print the heuristic constraint table and optimizer results.
    Heuristics(HeuristicsArgs),
    /// Certify an edge-list graph as an R(3,k) witness.
    Certify(CertifyArgs),
    /// Paired runs of the seeded process against the plain one.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct ProcessFlags {
    /// Flat `key = value` config file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub profile: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub alpha0: Option<f64>,
    #[arg(long)]
    pub alpha1: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of steps T; `none` runs until the process halts.
    #[arg(long)]
    pub steps: Option<String>,
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Halt once p_{i+1} exceeds this value.
    #[arg(long)]
    pub halt_p: Option<f64>,
    /// Override for the large-degree threshold n^{2β}.
    #[arg(long)]
    pub l_threshold: Option<String>,
    #[arg(long)]
    pub repeats: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub exact_threshold: Option<usize>,
    /// `full` or `sampled`; defaults to full up to n = 4000.
    #[arg(long)]
    pub monitor_mode: Option<String>,
    /// Local-search iterations for the heuristic independence number.
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub flags: ProcessFlags,
}

#[derive(Debug, Args)]
pub struct HeuristicsArgs {
    /// `full` or `drop_2_8`; both are reported when omitted.
    #[arg(long)]
    pub mode: Option<String>,
    /// Extra points `alpha0,alpha1,kappa` to tabulate.
    #[arg(long = "point", value_name = "A0,A1,KAPPA")]
    pub points: Vec<String>,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    /// Right side of the density constraint used by the optimizer.
    #[arg(long, default_value_t = 0.5)]
    pub density_rhs: f64,
    /// Drop the constraint κ ≥ α₀+α₁ from the optimizer.
    #[arg(long)]
    pub no_neighbourhoods: bool,
    /// Write one JSON record per point to this file.
    #[arg(long)]
    pub records: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    pub graph: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_EXACT_THRESHOLD)]
    pub exact_threshold: usize,
    #[arg(long, default_value_t = 20_000)]
    pub budget: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the certificate here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub flags: ProcessFlags,
    /// Number of paired runs.
    #[arg(long, default_value_t = 10)]
    pub pairs: usize,
}

/// Resolved settings of one experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub params: ProcessParams,
    pub repeats: usize,
    pub out_dir: PathBuf,
    pub monitor_mode: MonitorMode,
    pub exact_threshold: usize,
    pub budget: u64,
    /// Config file text, echoed into outputs.
    pub config_text: String,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: no + 1, msg: format!("expected `key = value`, got `{raw}`") })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn flag_pairs(f: &ProcessFlags) -> Vec<(String, String)> {
    let mut v: Vec<(String, String)> = Vec::new();
    let mut push = |k: &str, val: Option<String>| {
        if let Some(val) = val {
            v.push((k.to_string(), val));
        }
    };
    push("profile", f.profile.clone());
    push("n", f.n.map(|x| x.to_string()));
    push("alpha0", f.alpha0.map(|x| x.to_string()));
    push("alpha1", f.alpha1.map(|x| x.to_string()));
    push("gamma", f.gamma.map(|x| x.to_string()));
    push("r", f.r.map(|x| x.to_string()));
    push("delta", f.delta.map(|x| x.to_string()));
    push("beta", f.beta.map(|x| x.to_string()));
    push("kappa", f.kappa.map(|x| x.to_string()));
    push("rng_seed", f.seed.map(|x| x.to_string()));
    push("steps", f.steps.clone());
    push("max_steps", f.max_steps.map(|x| x.to_string()));
    push("halt_p", f.halt_p.map(|x| x.to_string()));
    push("l_threshold", f.l_threshold.clone());
    push("repeats", f.repeats.map(|x| x.to_string()));
    push("out_dir", f.out_dir.as_ref().map(|p| p.display().to_string()));
    push("exact_threshold", f.exact_threshold.map(|x| x.to_string()));
    push("monitor_mode", f.monitor_mode.clone());
    push("budget", f.budget.map(|x| x.to_string()));
    v
}

fn num<T: std::str::FromStr>(key: &'static str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| Error::param(key, format!("`{v}`: {e}")))
}

/// Resolves profile defaults, the config file and flags, in that order.
pub fn resolve(flags: &ProcessFlags) -> Result<ExperimentConfig> {
    let config_text = match &flags.config {
        Some(p) => fs::read_to_string(p).map_err(|e| Error::io(p, e))?,
        None => String::new(),
    };
    let mut pairs = parse_config(&config_text)?;
    pairs.extend(flag_pairs(flags));
    let last = |key: &str| pairs.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str());

    let profile: Profile = last("profile").unwrap_or("desk").parse()?;
    let n: usize = last("n").map(|v| num("n", v)).transpose()?.unwrap_or(1000);
    let seed: u64 = last("rng_seed").or(last("seed")).map(|v| num("rng_seed", v)).transpose()?.unwrap_or(0);
    let mut params = match profile {
        Profile::Desk => ProcessParams::desk(n, 0.35, 0.35, seed),
        Profile::PaperAsymptotic => {
            let delta: f64 = last("delta").map(|v| num("delta", v)).transpose()?.unwrap_or(0.01);
            let a = heuristics::paper_alpha(delta);
            ProcessParams::paper(n, delta, a, a, seed)
        }
    };
    let mut cfg = ExperimentConfig {
        params: params.clone(),
        repeats: 1,
        out_dir: PathBuf::from("tfn-out"),
        monitor_mode: MonitorMode::auto(n),
        exact_threshold: DEFAULT_EXACT_THRESHOLD,
        budget: 20_000,
        config_text,
    };
    for (k, v) in &pairs {
        match k.as_str() {
            "profile" | "n" => {}
            "repeats" => cfg.repeats = num("repeats", v)?,
            "out_dir" => cfg.out_dir = PathBuf::from(v),
            "monitor_mode" => cfg.monitor_mode = v.parse()?,
            "exact_threshold" => cfg.exact_threshold = num("exact_threshold", v)?,
            "budget" => cfg.budget = num("budget", v)?,
            _ => params.set(k, v)?,
        }
    }
    if cfg.repeats == 0 {
        return Err(Error::param("repeats", "must be at least 1"));
    }
    params.validate()?;
    cfg.params = params;
    Ok(cfg)
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    fs::File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn io_at<T>(path: &Path, r: std::io::Result<T>) -> Result<T> {
    r.map_err(|e| Error::io(path, e))
}

/// One row of the per-run summary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub repeat: usize,
    pub seed: u64,
    pub n: usize,
    pub steps: usize,
    pub tau: Option<usize>,
    pub gprime_edges: usize,
    pub gkept_edges: usize,
    pub theta_final: f64,
    pub alpha_lower: usize,
    pub alpha_upper: usize,
    pub k: usize,
    pub certified: bool,
    pub monitor_pass_rate: f64,
}

impl RunSummary {
    pub const CSV_HEADER: &'static str =
        "repeat,seed,n,steps,tau,gprime_edges,gkept_edges,theta_final,alpha_lower,alpha_upper,k,certified,monitor_pass_rate";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.repeat,
            self.seed,
            self.n,
            self.steps,
            self.tau.map_or(String::new(), |t| t.to_string()),
            self.gprime_edges,
            self.gkept_edges,
            self.theta_final,
            self.alpha_lower,
            self.alpha_upper,
            self.k,
            self.certified,
            self.monitor_pass_rate
        )
    }
}

/// Output of a single run with monitors.
pub struct RunOutput {
    pub state: TriState,
    pub trajectory: Trajectory,
    pub reports: Vec<MonitorReport>,
}

/// Runs the process, evaluating every event check along the way.
pub fn run_monitored(params: &ProcessParams, mode: MonitorMode) -> Result<RunOutput> {
    let (_, seed_stats) = crate::seed::build_seed(params)?;
    let mut reports = Vec::new();
    let (state, trajectory) = nibble::run_with(params, |st, prev| {
        reports.push(monitors::check_event_a(st, prev, &seed_stats, params, mode));
    })?;
    Ok(RunOutput { state, trajectory, reports })
}

fn pass_rate(reports: &[MonitorReport]) -> f64 {
    let total: usize = reports.iter().map(|r| r.checks.len()).sum();
    let pass: usize = reports.iter().map(|r| r.checks.iter().filter(|c| c.pass).count()).sum();
    if total == 0 {
        1.0
    } else {
        pass as f64 / total as f64
    }
}

fn run_one(cfg: &ExperimentConfig, repeat: usize, dir: &Path) -> Result<RunSummary> {
    let mut params = cfg.params.clone();
    params.rng_seed = cfg.params.rng_seed.wrapping_add(repeat as u64);
    let out = run_monitored(&params, cfg.monitor_mode)?;
    io_at(dir, fs::create_dir_all(dir))?;

    let p = dir.join("trajectory.jsonl");
    let mut w = create(&p)?;
    io_at(&p, out.trajectory.write_jsonl(&mut w).and_then(|_| w.flush()))?;

    let p = dir.join("monitors.jsonl");
    let mut w = create(&p)?;
    for r in &out.reports {
        io_at(&p, r.write_jsonl(&mut w))?;
    }
    io_at(&p, w.flush())?;

    for (name, layer) in [("final_graph.txt", Layer::GKept), ("gprime.txt", Layer::GPrime)] {
        let p = dir.join(name);
        let mut w = create(&p)?;
        io_at(&p, out.state.write_layer(layer, &mut w).and_then(|_| w.flush()))?;
    }

    let k = params.k().ceil() as usize;
    let opts = CertifyOptions { exact_threshold: cfg.exact_threshold, budget: cfg.budget, seed: params.rng_seed };
    let g = out.state.gkept();
    let mut rng = StreamKey::root(params.rng_seed).child(tag::INDEPENDENCE).chacha();
    let alpha = if g.n() <= cfg.exact_threshold {
        independence::exact_mis(g, cfg.exact_threshold)?
    } else {
        independence::heuristic_alpha(g, &mut rng, cfg.budget)
    };
    let cert_path = dir.join("certificate.json");
    let (text, certified) = match independence::certify_ramsey_witness(g, k, &opts) {
        Ok(c) => (c.to_json(), true),
        Err(e) => {
            let v = serde_json::json!({ "n": g.n(), "k": k, "refused": e.to_string(), "digest": format!("{:016x}", g.digest()) });
            (serde_json::to_string_pretty(&v).expect("json"), false)
        }
    };
    io_at(&cert_path, fs::write(&cert_path, text + "\n"))?;

    Ok(RunSummary {
        repeat,
        seed: params.rng_seed,
        n: out.state.n(),
        steps: out.trajectory.steps.len(),
        tau: out.trajectory.tau,
        gprime_edges: out.state.gprime().edge_count(),
        gkept_edges: g.edge_count(),
        theta_final: out.state.theta(),
        alpha_lower: alpha.lower,
        alpha_upper: alpha.upper,
        k,
        certified,
        monitor_pass_rate: pass_rate(&out.reports),
    })
}

/// Executes all repeats and writes their artifacts plus `summary.csv`.
pub fn cmd_run(cfg: &ExperimentConfig) -> Result<Vec<RunSummary>> {
    io_at(&cfg.out_dir, fs::create_dir_all(&cfg.out_dir))?;
    let dirs: Vec<PathBuf> = (0..cfg.repeats)
        .map(|r| if cfg.repeats == 1 { cfg.out_dir.clone() } else { cfg.out_dir.join(format!("run-{r:03}")) })
        .collect();
    let rows: Vec<RunSummary> =
        (0..cfg.repeats).into_par_iter().map(|r| run_one(cfg, r, &dirs[r])).collect::<Result<_>>()?;
    let p = cfg.out_dir.join("summary.csv");
    let mut text = String::from(RunSummary::CSV_HEADER);
    text.push('\n');
    for row in &rows {
        text.push_str(&row.csv_row());
        text.push('\n');
    }
    io_at(&p, fs::write(&p, text))?;
    Ok(rows)
}

#[derive(Serialize)]
struct PointRecord<'a> {
    label: &'a str,
    alpha0: f64,
    alpha1: f64,
    kappa: f64,
    slacks: Slacks,
    satisfied: bool,
}

fn parse_point(s: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::param("point", format!("expected a0,a1,kappa, got `{s}`")));
    }
    Ok((num("point", parts[0])?, num("point", parts[1])?, num("point", parts[2])?))
}

/// Builds the constraint table; returns (text, JSON records).
pub fn cmd_heuristics(args: &HeuristicsArgs) -> Result<(String, Vec<String>)> {
    let modes: Vec<KappaMode> = match &args.mode {
        Some(m) => vec![m.parse()?],
        None => vec![KappaMode::Full, KappaMode::DropPeakAtK],
    };
    let mut rows: Vec<(String, HeuristicPoint)> = Vec::new();
    for mode in modes {
        let opts = KappaOptions { mode, density_rhs: args.density_rhs, neighbourhoods: !args.no_neighbourhoods };
        let o = heuristics::optimize_kappa(&opts);
        let label = match mode {
            KappaMode::Full => "optimum full",
            KappaMode::DropPeakAtK => "optimum drop_2_8",
        };
        rows.push((label.to_string(), HeuristicPoint::new(o.alpha0, o.alpha1, o.kappa, args.delta)));
    }
    let a = 1.0 / 6f64.sqrt();
    rows.push(("1/sqrt6, sqrt(3/2)".to_string(), HeuristicPoint::new(a, a, 1.5f64.sqrt(), args.delta)));
    for p in &args.points {
        let (a0, a1, k) = parse_point(p)?;
        rows.push((format!("point {p}"), HeuristicPoint::new(a0, a1, k, args.delta)));
    }

    let mut text = format!(
        "{:<22} {:>12} {:>12} {:>14} | {:>12} {:>12} {:>12} {:>14} {:>19} | {}\n",
        "label", "alpha0", "alpha1", "kappa", Slacks::NAMES[0], Slacks::NAMES[1], Slacks::NAMES[2], Slacks::NAMES[3], Slacks::NAMES[4], "verdict"
    );
    let mut records = Vec::new();
    for (label, pt) in &rows {
        let s = pt.slacks.as_array();
        let ok = s.iter().all(|&v| v >= -1e-9);
        text.push_str(&format!(
            "{:<22} {:>12.9} {:>12.9} {:>14.12} | {:>12.3e} {:>12.3e} {:>12.3e} {:>14.3e} {:>19.3e} | {}\n",
            label,
            pt.alpha0,
            pt.alpha1,
            pt.kappa,
            s[0],
            s[1],
            s[2],
            s[3],
            s[4],
            if ok { "ok" } else { "violated" }
        ));
        let rec = PointRecord {
            label,
            alpha0: pt.alpha0,
            alpha1: pt.alpha1,
            kappa: pt.kappa,
            slacks: pt.slacks,
            satisfied: ok,
        };
        records.push(serde_json::to_string(&rec).expect("json"));
    }
    Ok((text, records))
}

/// Reads the graph, certifies it, and returns the certificate JSON.
pub fn cmd_certify(args: &CertifyArgs) -> Result<String> {
    let f = fs::File::open(&args.graph).map_err(|e| Error::io(&args.graph, e))?;
    let g = Graph::read_edge_list(BufReader::new(f))?;
    let opts = CertifyOptions { exact_threshold: args.exact_threshold, budget: args.budget, seed: args.seed };
    let cert = independence::certify_ramsey_witness(&g, args.k, &opts)?;
    Ok(cert.to_json())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparePair {
    pub pair: usize,
    pub seed: u64,
    pub seeded_edges: usize,
    pub plain_edges: usize,
    pub seeded_alpha: usize,
    pub plain_alpha: usize,
}

/// The plain comparator: no seed graph and no blow-up.
pub fn plain_params(seeded: &ProcessParams) -> ProcessParams {
    ProcessParams { alpha0: 0.0, r: 1, ..seeded.clone() }
}

/// Paired seeded and plain runs sharing a seed.
pub fn cmd_compare(cfg: &ExperimentConfig, pairs: usize) -> Result<Vec<ComparePair>> {
    (0..pairs)
        .into_par_iter()
        .map(|j| {
            let mut seeded = cfg.params.clone();
            seeded.rng_seed = cfg.params.rng_seed.wrapping_add(j as u64);
            let plain = plain_params(&seeded);
            let alpha = |p: &ProcessParams| -> Result<(usize, usize)> {
                let (st, _) = nibble::run(p)?;
                let mut rng = StreamKey::root(p.rng_seed).child(tag::INDEPENDENCE).chacha();
                let a = independence::heuristic_alpha(st.gkept(), &mut rng, cfg.budget);
                Ok((st.gkept().edge_count(), a.lower))
            };
            let (se, sa) = alpha(&seeded)?;
            let (pe, pa) = alpha(&plain)?;
            Ok(ComparePair {
                pair: j,
                seed: seeded.rng_seed,
                seeded_edges: se,
                plain_edges: pe,
                seeded_alpha: sa,
                plain_alpha: pa,
            })
        })
        .collect()
}

pub fn compare_table(rows: &[ComparePair]) -> String {
    let mut t = format!(
        "{:>4} {:>20} {:>12} {:>12} {:>12} {:>12}\n",
        "pair", "seed", "seeded_e", "plain_e", "seeded_a", "plain_a"
    );
    for r in rows {
        t.push_str(&format!(
            "{:>4} {:>20} {:>12} {:>12} {:>12} {:>12}\n",
            r.pair, r.seed, r.seeded_edges, r.plain_edges, r.seeded_alpha, r.plain_alpha
        ));
    }
    let more = rows.iter().filter(|r| r.seeded_edges > r.plain_edges).count();
    let alpha_ok = rows.iter().filter(|r| r.seeded_alpha as f64 <= 1.1 * r.plain_alpha as f64).count();
    t.push_str(&format!(
        "seeded has more edges in {more}/{n}; seeded alpha <= 1.1 x plain alpha in {alpha_ok}/{n}\n",
        n = rows.len()
    ));
    t
}

/// Sets the global worker pool from `TFN_THREADS`, if present.
pub fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("TFN_THREADS") {
        let t: usize = num("TFN_THREADS", v.trim())?;
        // a pool that already exists keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
    Ok(())
}

/// Runs a parsed command line and returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    let result = (|| -> Result<()> {
        init_threads()?;
        match cli.command {
            Command::Run(a) => {
                let cfg = resolve(&a.flags)?;
                let rows = cmd_run(&cfg)?;
                for r in rows {
                    println!(
                        "run {}: steps {} kept edges {} alpha >= {} (k = {}) certified {}",
                        r.repeat, r.steps, r.gkept_edges, r.alpha_lower, r.k, r.certified
                    );
                }
            }
            Command::Heuristics(a) => {
                let (text, records) = cmd_heuristics(&a)?;
                print!("{text}");
                match &a.records {
                    Some(p) => io_at(p, fs::write(p, records.join("\n") + "\n"))?,
                    None => {
                        println!();
                        for r in records {
                            println!("{r}");
                        }
                    }
                }
            }
            Command::Certify(a) => {
                let json = cmd_certify(&a)?;
                match &a.out {
                    Some(p) => io_at(p, fs::write(p, json + "\n"))?,
                    None => println!("{json}"),
                }
            }
            Command::Compare(a) => {
                let cfg = resolve(&a.flags)?;
                let rows = cmd_compare(&cfg, a.pairs)?;
                print!("{}", compare_table(&rows));
            }
        }
        Ok(())
    })();
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("tfn: {e}");
            exit_code(&e)
        }
    }
}
