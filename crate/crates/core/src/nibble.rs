//! One nibble step (sample, clean, regularize) and the run loop.

use std::io::Write;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{and_count, iter_bits};
use crate::pairgraph::{PairRef, TriState};
use crate::params::ProcessParams;
use crate::rng::{tag, StreamKey};
use crate::seed::{build_seed, SeedStats};

/// Per-step record. Field order is the export order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub i: usize,
    pub theta: f64,
    pub p_next: f64,
    pub s_next: f64,
    #[serde(rename = "max_X")]
    pub max_x: usize,
    #[serde(rename = "max_Y")]
    pub max_y: usize,
    pub min_q: f64,
    pub sampled_edges: usize,
    pub kept_edges: usize,
    pub closed_pairs: usize,
    pub psi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum HaltReason {
    EmptyOpen,
    PTooLarge { p: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum StepOutcome {
    Advanced(StepStats),
    Halted(HaltReason),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinalSummary {
    pub steps_run: usize,
    pub gprime_edges: usize,
    pub gkept_edges: usize,
    pub open_pairs: usize,
    pub theta: f64,
    pub kept_density: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub params: ProcessParams,
    pub seed: SeedStats,
    pub steps: Vec<StepStats>,
    pub tau: Option<usize>,
    pub halt: Option<HaltReason>,
    pub summary: FinalSummary,
}

#[derive(Serialize)]
struct Header<'a> {
    config: &'a str,
    seed: &'a SeedStats,
}

impl Trajectory {
    /// Line-delimited JSON: one header line echoing the config, then one
    /// record per step.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let config = self.params.to_config_string();
        serde_json::to_writer(&mut w, &Header { config: &config, seed: &self.seed })?;
        w.write_all(b"\n")?;
        for s in &self.steps {
            serde_json::to_writer(&mut w, s)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("json is utf-8")
    }

    /// `θ_{i+1} / (s_{i+1}···s_1 θ₀)` after each recorded step.
    pub fn theta_product_ratios(&self) -> Vec<f64> {
        let mut log_prod = self.seed.theta0.ln();
        let mut out = Vec::with_capacity(self.steps.len());
        for (j, s) in self.steps.iter().enumerate() {
            log_prod += s.s_next.ln();
            let next = self.steps.get(j + 1).map(|t| t.theta).unwrap_or(self.summary.theta);
            out.push((next.ln() - log_prod).exp());
        }
        out
    }
}

/// `(1−p²)^X (1−p)^Y` in the log domain.
pub fn survival_probability(x: usize, y: usize, p: f64) -> Result<f64> {
    Ok(log_survival(x, y, check_p(p)?).exp())
}

fn check_p(p: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::BadProbability(p));
    }
    Ok(p)
}

#[derive(Clone, Copy)]
struct LogRates {
    a: f64,
    b: f64,
}

impl LogRates {
    fn new(p: f64) -> Self {
        LogRates { a: (-p * p).ln_1p(), b: (-p).ln_1p() }
    }

    #[inline]
    fn eval(self, x: usize, y: usize) -> f64 {
        // 0 · a is exactly 0, so X = Y = 0 gives ln P = 0 exactly
        x as f64 * self.a + y as f64 * self.b
    }
}

fn log_survival(x: usize, y: usize, p: f64) -> f64 {
    LogRates::new(p).eval(x, y)
}

/// Full table of `X`, `Y`, `q` for every open pair in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct QTable {
    pub p: f64,
    pub s: f64,
    pub pairs: Vec<PairRef>,
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub q: Vec<f64>,
}

impl QTable {
    pub fn get(&self, e: PairRef) -> Option<f64> {
        self.pairs.binary_search(&e).ok().map(|k| self.q[k])
    }

    pub fn max_x(&self) -> usize {
        self.x.iter().copied().max().unwrap_or(0)
    }

    pub fn max_y(&self) -> usize {
        self.y.iter().copied().max().unwrap_or(0)
    }

    pub fn min_q(&self) -> f64 {
        self.q.iter().copied().fold(1.0, f64::min)
    }
}

/// Open pairs `(x, y)` with `y > x` in row `x`, with their `X` and `Y`.
fn row_pairs(state: &TriState, x: usize) -> impl Iterator<Item = (PairRef, usize, usize)> + '_ {
    let o = state.open.row(x);
    let g = state.gprime.row(x);
    iter_bits(o).filter(move |&y| y > x).map(move |y| {
        let oy = state.open.row(y);
        let xi = and_count(o, oy) as usize;
        let yi = (and_count(o, state.gprime.row(y)) + and_count(oy, g) + 1) as usize;
        (PairRef::of(x, y), xi, yi)
    })
}

/// `q_e = s / P(e)` for every open pair, with `s = min P`.
pub fn q_values(state: &TriState, p: f64) -> Result<QTable> {
    let p = check_p(p)?;
    if state.open_pairs() == 0 {
        return Err(Error::EmptyOpenLayer);
    }
    let rates = LogRates::new(p);
    let rows: Vec<Vec<(PairRef, usize, usize)>> =
        (0..state.n()).into_par_iter().map(|x| row_pairs(state, x).collect()).collect();
    let mut t = QTable { p, s: 1.0, pairs: Vec::new(), x: Vec::new(), y: Vec::new(), q: Vec::new() };
    for (e, xi, yi) in rows.into_iter().flatten() {
        t.pairs.push(e);
        t.x.push(xi);
        t.y.push(yi);
    }
    let logs: Vec<f64> = t.x.iter().zip(&t.y).map(|(&a, &b)| rates.eval(a, b)).collect();
    let log_s = logs.iter().copied().fold(f64::INFINITY, f64::min);
    t.s = log_s.exp();
    t.q = logs.iter().map(|&l| (log_s - l).exp()).collect();
    Ok(t)
}

#[derive(Clone, Copy)]
struct Extremes {
    max_x: usize,
    max_y: usize,
    min_log: f64,
    max_log: f64,
}

impl Extremes {
    const EMPTY: Extremes = Extremes { max_x: 0, max_y: 0, min_log: f64::INFINITY, max_log: f64::NEG_INFINITY };

    fn merge(self, o: Extremes) -> Extremes {
        Extremes {
            max_x: self.max_x.max(o.max_x),
            max_y: self.max_y.max(o.max_y),
            min_log: self.min_log.min(o.min_log),
            max_log: self.max_log.max(o.max_log),
        }
    }
}

/// The step quantities `θ_i` and `p_{i+1}`, or the reason to halt.
pub fn next_p(state: &TriState, params: &ProcessParams) -> std::result::Result<(f64, f64), HaltReason> {
    let theta = state.theta();
    if state.open_pairs() == 0 {
        return Err(HaltReason::EmptyOpen);
    }
    let p = params.gamma / (theta * (state.n() as f64).sqrt());
    if !(p <= params.halt_p) || p >= 1.0 {
        return Err(HaltReason::PTooLarge { p });
    }
    Ok((theta, p))
}

/// Advances `state` by one step. Randomness is drawn from substreams of
/// `root` keyed by phase and step index, and per-pair draws by pair index,
/// so the outcome does not depend on the thread count.
pub fn step(state: &mut TriState, params: &ProcessParams, root: StreamKey) -> Result<StepOutcome> {
    let i = state.step;
    let n = state.n();
    let (theta, p) = match next_p(state, params) {
        Ok(v) => v,
        Err(h) => return Ok(StepOutcome::Halted(h)),
    };
    let rates = LogRates::new(p);
    let sample_key = root.child(tag::SAMPLE).child(i as u64);
    let reg_key = root.child(tag::REGULARIZE).child(i as u64);

    // phase 1: X, Y and s over the frozen state
    let ext = (0..n)
        .into_par_iter()
        .map(|x| {
            row_pairs(state, x).fold(Extremes::EMPTY, |acc, (_, xi, yi)| {
                let l = rates.eval(xi, yi);
                acc.merge(Extremes { max_x: xi, max_y: yi, min_log: l, max_log: l })
            })
        })
        .reduce(|| Extremes::EMPTY, Extremes::merge);
    let log_s = ext.min_log;

    // phases 2 and 4 draw independently per pair; Q is decided against the
    // pre-step q_e and applied after closure
    let per_row: Vec<(Vec<PairRef>, Vec<PairRef>)> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut sampled = Vec::new();
            let mut rejected = Vec::new();
            for (e, xi, yi) in row_pairs(state, x) {
                let idx = e.index(n);
                if sample_key.uniform(idx) < p {
                    sampled.push(e);
                }
                let q = (log_s - rates.eval(xi, yi)).exp();
                if reg_key.uniform(idx) >= q {
                    rejected.push(e);
                }
            }
            (sampled, rejected)
        })
        .collect();
    let mut batch = Vec::new();
    let mut not_in_q = Vec::new();
    for (s, r) in per_row {
        batch.extend(s);
        not_in_q.extend(r);
    }

    // phase 3: greedy cleaning in uniformly random order
    let mut order = batch.clone();
    order.shuffle(&mut root.child(tag::CLEAN).child(i as u64).chacha());
    let mut kept = 0;
    for e in order {
        if and_count(state.gkept.row(e.x()), state.gkept.row(e.y())) == 0 {
            state.gkept.add_edge(e.x(), e.y());
            kept += 1;
        }
    }

    let before = state.open_pairs();
    state.add_batch_and_close(&batch)?;
    for e in not_in_q {
        state.open.remove_edge(e.x(), e.y());
    }
    let closed = before - state.open_pairs();

    let stats = StepStats {
        i,
        theta,
        p_next: p,
        s_next: log_s.exp(),
        max_x: ext.max_x,
        max_y: ext.max_y,
        min_q: (log_s - ext.max_log).exp(),
        sampled_edges: batch.len(),
        kept_edges: kept,
        closed_pairs: closed,
        psi: params.psi(i),
    };
    state.step = i + 1;
    state.last_batch = batch;
    Ok(StepOutcome::Advanced(stats))
}

fn summarize(state: &TriState, steps_run: usize) -> FinalSummary {
    let n = state.n() as f64;
    let pairs = n * (n - 1.0) / 2.0;
    FinalSummary {
        steps_run,
        gprime_edges: state.gprime.edge_count(),
        gkept_edges: state.gkept.edge_count(),
        open_pairs: state.open_pairs(),
        theta: state.theta(),
        kept_density: if pairs > 0.0 { state.gkept.edge_count() as f64 / pairs } else { 0.0 },
    }
}

/// Builds the seed and steps until the budget is spent or the process halts.
pub fn run(params: &ProcessParams) -> Result<(TriState, Trajectory)> {
    run_with(params, |_, _| {})
}

/// As [`run`], calling `observe` on the seed state and after every step.
pub fn run_with<F>(params: &ProcessParams, mut observe: F) -> Result<(TriState, Trajectory)>
where
    F: FnMut(&TriState, Option<&StepStats>),
{
    let (mut state, seed) = build_seed(params)?;
    let root = StreamKey::root(params.rng_seed);
    observe(&state, None);
    let mut steps = Vec::new();
    let mut tau = None;
    let mut halt = None;
    let budget = params.step_budget();
    while state.step < budget {
        match step(&mut state, params, root)? {
            StepOutcome::Advanced(s) => {
                observe(&state, Some(&s));
                steps.push(s);
            }
            StepOutcome::Halted(h) => {
                tau = Some(state.step);
                halt = Some(h);
                break;
            }
        }
    }
    let summary = summarize(&state, steps.len());
    Ok((state, Trajectory { params: params.clone(), seed, steps, tau, halt, summary }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::pairgraph::Partition;

    fn open_state(n: usize, open: &[(usize, usize)], gp: &[(usize, usize)]) -> TriState {
        TriState::from_layers(
            Partition::new(n, 1).unwrap(),
            Graph::from_edges(n, gp).unwrap(),
            Graph::new(n),
            Graph::from_edges(n, open).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn survival_small_cases() {
        assert_eq!(survival_probability(0, 0, 0.3).unwrap(), 1.0);
        assert!((survival_probability(0, 1, 0.3).unwrap() - 0.7).abs() < 1e-15);
        let direct = 0.9999f64.powi(3) * 0.99f64.powi(5);
        let got = survival_probability(3, 5, 0.01).unwrap();
        assert!((got - direct).abs() / direct < 1e-14);
        assert!(survival_probability(1, 1, 1.0).is_err());
        assert!(survival_probability(1, 1, -0.1).is_err());
    }

    #[test]
    fn q_hand_example() {
        // xy: X=0, Y=1; zw: X=0, Y=2 via w-v open and z-v in G'
        let s = open_state(6, &[(0, 1), (2, 3), (3, 4)], &[(2, 4)]);
        let p = 0.2;
        let t = q_values(&s, p).unwrap();
        let e01 = PairRef::of(0, 1);
        let e23 = PairRef::of(2, 3);
        assert_eq!(s.yi(e01).unwrap(), 1);
        assert_eq!(s.yi(e23).unwrap(), 2);
        assert!((t.get(e01).unwrap() - (1.0 - p)).abs() < 1e-15);
        assert_eq!(t.get(e23).unwrap(), 1.0);
        assert!((t.s - (1.0 - p) * (1.0 - p)).abs() < 1e-15);
    }

    #[test]
    fn q_is_one_when_all_pairs_look_alike() {
        let s = open_state(6, &[(0, 1), (2, 3), (4, 5)], &[]);
        let t = q_values(&s, 0.1).unwrap();
        assert!(t.q.iter().all(|&q| q == 1.0));
        assert!(q_values(&open_state(4, &[], &[]), 0.1).is_err());
    }

    #[test]
    fn empty_open_layer_halts_at_zero() {
        let mut s = open_state(5, &[], &[]);
        let p = ProcessParams::desk(5, 0.0, 0.3, 1);
        let out = step(&mut s, &p, StreamKey::root(1)).unwrap();
        assert_eq!(out, StepOutcome::Halted(HaltReason::EmptyOpen));
    }

    #[test]
    fn run_with_zero_steps_is_the_seed() {
        let mut p = ProcessParams::desk(80, 0.5, 0.3, 3);
        p.steps = Some(0);
        let (s, t) = run(&p).unwrap();
        let (seed, _) = build_seed(&p).unwrap();
        assert_eq!(s, seed);
        assert!(t.steps.is_empty());
        assert_eq!(t.tau, None);
    }

    #[test]
    fn plain_run_is_consistent_after_every_step() {
        let p = ProcessParams::desk(150, 0.0, 0.3, 9);
        let mut prev: Option<TriState> = None;
        let (s, t) = run_with(&p, |st, _| {
            assert!(st.verify_consistency().is_empty());
            if let Some(old) = &prev {
                for (x, y) in st.open().edges() {
                    assert!(old.open().has_edge(x, y));
                }
                for (x, y) in old.gkept().edges() {
                    assert!(st.gkept().has_edge(x, y));
                }
                for (x, y) in old.gprime().edges() {
                    assert!(st.gprime().has_edge(x, y));
                }
            }
            prev = Some(st.clone());
        })
        .unwrap();
        assert!(s.gkept().edge_count() > 0);
        assert!(s.gkept().is_triangle_free());
        assert!(t.tau.is_some());
        for (j, st) in t.steps.iter().enumerate() {
            assert_eq!(st.i, j);
            assert!(st.kept_edges <= st.sampled_edges);
            assert!(st.min_q > 0.0 && st.min_q <= 1.0);
            assert!(st.s_next > 0.0 && st.s_next <= 1.0);
        }
    }

    #[test]
    fn trajectory_records_have_the_export_fields_in_order() {
        let mut p = ProcessParams::desk(60, 0.0, 0.3, 4);
        p.steps = Some(2);
        let (_, t) = run(&p).unwrap();
        let text = t.to_jsonl_string();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("{\"config\":"));
        let rec = lines.next().unwrap();
        let keys = [
            "i", "theta", "p_next", "s_next", "max_X", "max_Y", "min_q", "sampled_edges", "kept_edges",
            "closed_pairs", "psi",
        ];
        let mut at = 0;
        for k in keys {
            let pos = rec[at..].find(&format!("\"{k}\":")).expect(k) + at;
            at = pos;
        }
        let v: serde_json::Value = serde_json::from_str(rec).unwrap();
        assert_eq!(v.as_object().unwrap().len(), keys.len());
    }
}
