//! Event checks on process states, predicted trajectories, and a Monte Carlo
//! check of the small-subgraph survival bound.
//!
//! Monitors never abort anything: they measure and record.

use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::and_count;
use crate::nibble::{self, StepOutcome, StepStats};
use crate::pairgraph::{PairRef, TriState};
use crate::params::ProcessParams;
use crate::rng::{tag, StreamKey};
use crate::seed::SeedStats;

/// Number of random pairs examined per codegree check in sampled mode.
pub const SAMPLED_PAIRS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MonitorMode {
    Full,
    Sampled,
}

impl MonitorMode {
    /// Full scans up to n = 4000, sampled pairs above.
    pub fn auto(n: usize) -> Self {
        if n > 4000 {
            MonitorMode::Sampled
        } else {
            MonitorMode::Full
        }
    }
}

impl FromStr for MonitorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(MonitorMode::Full),
            "sampled" => Ok(MonitorMode::Sampled),
            other => Err(Error::param("monitor_mode", format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub bound: f64,
    pub observed: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &str, bound: f64, observed: f64) -> Self {
        Check { name: name.to_string(), bound, observed, pass: observed <= bound }
    }

    /// `bound − observed`; nonnegative exactly when the check passes.
    pub fn margin(&self) -> f64 {
        self.bound - self.observed
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorReport {
    pub i: usize,
    pub checks: Vec<Check>,
    /// Lower bound on `θ_i` predicted from `θ₀`.
    pub theta_pred_lb: f64,
    /// Lower bound on `s_{i+1}`.
    pub s_pred_lb: f64,
}

#[derive(Serialize)]
struct Record<'a> {
    i: usize,
    name: &'a str,
    bound: f64,
    observed: f64,
    pass: bool,
}

impl MonitorReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// One `{i, name, bound, observed, pass}` line per check.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for c in &self.checks {
            let rec = Record { i: self.i, name: &c.name, bound: c.bound, observed: c.observed, pass: c.pass };
            serde_json::to_writer(&mut w, &rec)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

pub mod names {
    pub const THETA_CONCENTRATION: &str = "theta_concentration";
    pub const OPEN_DEGREE: &str = "open_degree";
    pub const OPEN_CODEGREE: &str = "open_codegree";
    pub const BATCH_DEGREE: &str = "batch_degree";
    pub const GPRIME_DEGREE: &str = "gprime_degree";
    pub const GPRIME_CROSS_CODEGREE: &str = "gprime_cross_codegree";
    pub const CROSS_DEGREE: &str = "cross_degree";
    pub const X_BOUND: &str = "x_bound";
    pub const Y_BOUND: &str = "y_bound";
}

/// `s_{i+1} ≥ (1−ε_i) exp(−(2i+1)γ² − 2γα₀√log n)`.
pub fn predicted_s_lb(i: usize, params: &ProcessParams) -> f64 {
    let g = params.gamma;
    let ln_n = (params.effective_n() as f64).ln();
    (1.0 - params.eps(i)) * (-(2.0 * i as f64 + 1.0) * g * g - 2.0 * g * params.alpha0 * ln_n.sqrt()).exp()
}

/// Lower bound on `θ_{i+1}`:
/// `(1−(i+1)ε_i) exp(−γ²(i+1)² − 2γ(i+1)α₀√log n) θ₀`; `i = −1` gives `θ₀`.
pub fn predicted_theta_lb(i: i64, params: &ProcessParams, theta0: f64) -> f64 {
    if i < 0 {
        return theta0;
    }
    let g = params.gamma;
    let j = i as f64 + 1.0;
    let ln_n = (params.effective_n() as f64).ln();
    let lead = 1.0 - j * params.eps(i as usize);
    lead * (-g * g * j * j - 2.0 * g * j * params.alpha0 * ln_n.sqrt()).exp() * theta0
}

/// Thresholds under which the asymptotic analysis is meaningful.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SanityThresholds {
    /// `p_{i+1} ≤ n^{−δ}`.
    pub p_max: f64,
    /// `θ_i ≥ n^{−1/2+δ}`.
    pub theta_min: f64,
}

pub fn sanity_thresholds(params: &ProcessParams) -> SanityThresholds {
    let n = params.effective_n() as f64;
    SanityThresholds { p_max: n.powf(-params.delta), theta_min: n.powf(-0.5 + params.delta) }
}

#[derive(Clone, Copy, Default)]
struct PairMaxima {
    open_codegree: usize,
    gprime_cross_codegree: usize,
    cross_degree: usize,
}

impl PairMaxima {
    fn merge(self, o: PairMaxima) -> PairMaxima {
        PairMaxima {
            open_codegree: self.open_codegree.max(o.open_codegree),
            gprime_cross_codegree: self.gprime_cross_codegree.max(o.gprime_cross_codegree),
            cross_degree: self.cross_degree.max(o.cross_degree),
        }
    }

    fn visit(&mut self, state: &TriState, x: usize, y: usize) {
        let (ox, oy) = (state.open.row(x), state.open.row(y));
        let (gx, gy) = (state.gprime.row(x), state.gprime.row(y));
        self.open_codegree = self.open_codegree.max(and_count(ox, oy) as usize);
        if state.partition.part_of(x) != state.partition.part_of(y) {
            self.gprime_cross_codegree = self.gprime_cross_codegree.max(and_count(gx, gy) as usize);
        }
        let c = and_count(gx, oy).max(and_count(gy, ox)) as usize;
        self.cross_degree = self.cross_degree.max(c);
    }
}

fn pair_maxima(state: &TriState, mode: MonitorMode, key: StreamKey) -> PairMaxima {
    let n = state.n();
    match mode {
        MonitorMode::Full => (0..n)
            .into_par_iter()
            .map(|x| {
                let mut m = PairMaxima::default();
                for y in x + 1..n {
                    m.visit(state, x, y);
                }
                m
            })
            .reduce(PairMaxima::default, PairMaxima::merge),
        MonitorMode::Sampled => {
            let mut rng = key.stream();
            let mut m = PairMaxima::default();
            for _ in 0..SAMPLED_PAIRS {
                let x = rng.gen_range(0..n);
                let mut y = rng.gen_range(0..n - 1);
                if y >= x {
                    y += 1;
                }
                m.visit(state, x, y);
            }
            m
        }
    }
}

/// Extremal `X` and `Y` over the open layer, evaluated against
/// `X ≤ (1+ε_i)θ_i²n` and `Y ≤ (1+ε_i)2θ_iψ_in`.
pub fn xy_bounds_check(state: &TriState, params: &ProcessParams) -> (Check, Check) {
    let i = state.step;
    let n = state.n();
    let (mx, my) = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut best = (0usize, 0usize);
            for y in crate::graph::iter_bits(state.open.row(x)).filter(|&y| y > x) {
                let e = PairRef::of(x, y);
                best.0 = best.0.max(state.xi_unchecked(e));
                best.1 = best.1.max(state.yi_unchecked(e));
            }
            best
        })
        .reduce(|| (0, 0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    let theta = state.theta();
    let nf = n as f64;
    let e = 1.0 + params.eps(i);
    (
        Check::new(names::X_BOUND, e * theta * theta * nf, mx as f64),
        Check::new(names::Y_BOUND, e * 2.0 * theta * params.psi(i) * nf, my as f64),
    )
}

/// Every event inequality at the current step of `state`.
///
/// `prev` is the record of the step that produced `state` (`None` at the
/// seed); it supplies `E_i θ_i = s_i θ_{i−1}`. At the seed the concentration
/// check compares `θ₀` with `s_* r^{−2}`.
pub fn check_event_a(
    state: &TriState,
    prev: Option<&StepStats>,
    seed: &SeedStats,
    params: &ProcessParams,
    mode: MonitorMode,
) -> MonitorReport {
    let i = state.step;
    let n = state.n() as f64;
    let ln_n = n.ln();
    let theta = state.theta();
    let eps = params.eps(i);
    let psi = params.psi(i);
    let mut checks = Vec::new();

    let expected = match prev {
        Some(s) => s.s_next * s.theta,
        None => seed.s_star / (state.partition.r() as f64).powi(2),
    };
    checks.push(Check::new(
        names::THETA_CONCENTRATION,
        params.gamma.powi(4) * expected,
        (theta - expected).abs(),
    ));

    let pm = pair_maxima(state, mode, StreamKey::root(params.rng_seed).child(tag::MONITOR).child(i as u64));
    checks.push(Check::new(names::OPEN_DEGREE, (1.0 + eps) * theta * n, state.open.max_degree() as f64));
    checks.push(Check::new(names::OPEN_CODEGREE, (1.0 + eps) * theta * theta * n, pm.open_codegree as f64));
    if i >= 1 {
        let mut deg = vec![0usize; state.n()];
        for e in &state.last_batch {
            deg[e.x()] += 1;
            deg[e.y()] += 1;
        }
        let max = deg.into_iter().max().unwrap_or(0);
        checks.push(Check::new(names::BATCH_DEGREE, (1.0 + eps) * params.gamma * n.sqrt(), max as f64));
    }
    checks.push(Check::new(names::GPRIME_DEGREE, (1.0 + eps) * psi * n, state.gprime.max_degree() as f64));
    checks.push(Check::new(
        names::GPRIME_CROSS_CODEGREE,
        ln_n.powi(4) + i as f64 * ln_n.powi(2),
        pm.gprime_cross_codegree as f64,
    ));
    checks.push(Check::new(names::CROSS_DEGREE, (1.0 + eps) * theta * psi * n, pm.cross_degree as f64));
    let (cx, cy) = xy_bounds_check(state, params);
    checks.push(cx);
    checks.push(cy);

    MonitorReport {
        i,
        checks,
        theta_pred_lb: predicted_theta_lb(i as i64 - 1, params, seed.theta0),
        s_pred_lb: predicted_s_lb(i, params),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalEstimate {
    pub empirical: f64,
    pub bound: f64,
    pub std_err: f64,
    pub reps: usize,
    pub s: f64,
    pub p: f64,
}

/// Runs `reps` independent single steps from `state` and reports the
/// frequency of `H ⊆ O_{i+1} ∧ K ⊆ G'_{i+1}` with the bound
/// `(1+n^{−δ/4})^{e(H)} s^{e(H)} p^{e(K)}`.
pub fn subgraph_survival_mc(
    state: &TriState,
    h: &[PairRef],
    k: &[PairRef],
    reps: usize,
    params: &ProcessParams,
    key: StreamKey,
) -> Result<SurvivalEstimate> {
    for e in h {
        if k.contains(e) {
            return Err(Error::OverlappingPairSets { x: e.x(), y: e.y() });
        }
    }
    for &e in h.iter().chain(k) {
        if e.y() >= state.n() {
            return Err(Error::VertexOutOfRange { v: e.y(), n: state.n() });
        }
        if !state.is_open(e) {
            return Err(Error::NotOpen { x: e.x(), y: e.y() });
        }
    }
    let (_, p) = nibble::next_p(state, params).map_err(|h| match h {
        nibble::HaltReason::PTooLarge { p } => Error::BadProbability(p),
        nibble::HaltReason::EmptyOpen => Error::EmptyOpenLayer,
    })?;
    let s = nibble::q_values(state, p)?.s;
    let hits: usize = (0..reps)
        .into_par_iter()
        .map(|rep| -> Result<usize> {
            let mut st = state.clone();
            match nibble::step(&mut st, params, key.child(rep as u64))? {
                StepOutcome::Advanced(_) => {}
                StepOutcome::Halted(_) => return Err(Error::InconsistentState("step halted".into())),
            }
            let batch = &st.last_batch;
            let ok = h.iter().all(|&e| st.is_open(e)) && k.iter().all(|e| batch.binary_search(e).is_ok());
            Ok(ok as usize)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    let empirical = if reps == 0 { 1.0 } else { hits as f64 / reps as f64 };
    let n = state.n() as f64;
    let bound = (1.0 + n.powf(-params.delta / 4.0)).powi(h.len() as i32) * s.powi(h.len() as i32)
        * p.powi(k.len() as i32);
    let std_err = if reps == 0 { 0.0 } else { (empirical * (1.0 - empirical) / reps as f64).sqrt() };
    Ok(SurvivalEstimate { empirical, bound, std_err, reps, s, p })
}
