//! Independent oracles built on plain adjacency sets.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use tfn_core::nibble::survival_probability;
use tfn_core::{Graph, PairRef, ProcessParams, StreamKey, TriState};

pub fn adjacency(g: &Graph) -> Vec<HashSet<usize>> {
    let mut adj = vec![HashSet::new(); g.n()];
    for (u, v) in g.edge_vec() {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    adj
}

pub fn pair_set(g: &Graph) -> BTreeSet<(usize, usize)> {
    g.edge_vec().into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect()
}

/// Every triangle `a < b < c`, by enumerating an edge and a common neighbour.
pub fn triangles(g: &Graph) -> Vec<(usize, usize, usize)> {
    let adj = adjacency(g);
    let mut out = Vec::new();
    for (u, v) in pair_set(g) {
        for &w in &adj[u] {
            if w > v && adj[v].contains(&w) {
                out.push((u, v, w));
            }
        }
    }
    out
}

pub fn common_neighbours(adj: &[HashSet<usize>], x: usize, y: usize) -> usize {
    let (a, b) = if adj[x].len() < adj[y].len() { (x, y) } else { (y, x) };
    adj[a].iter().filter(|w| adj[b].contains(w)).count()
}

/// Open pairs that survive a batch: not in `G'` and without a common
/// `G'` neighbour, given the layers after the batch was inserted.
pub fn scratch_open(before_open: &Graph, gprime_after: &Graph) -> BTreeSet<(usize, usize)> {
    let adj = adjacency(gprime_after);
    pair_set(before_open)
        .into_iter()
        .filter(|&(x, y)| !adj[x].contains(&y) && common_neighbours(&adj, x, y) == 0)
        .collect()
}

/// `(X, Y)` of an open pair by direct enumeration over all third vertices.
pub fn xy_by_enumeration(open: &[HashSet<usize>], gp: &[HashSet<usize>], x: usize, y: usize) -> (usize, usize) {
    let n = open.len();
    let mut xs = 0;
    let mut ys = 1;
    for w in 0..n {
        if w == x || w == y {
            continue;
        }
        if open[x].contains(&w) && open[y].contains(&w) {
            xs += 1;
        }
        if open[x].contains(&w) && gp[y].contains(&w) {
            ys += 1;
        }
        if open[y].contains(&w) && gp[x].contains(&w) {
            ys += 1;
        }
    }
    (xs, ys)
}

/// From-scratch prediction of one step: the batch and the next open layer.
pub struct StepPrediction {
    pub batch: BTreeSet<(usize, usize)>,
    pub open_after: BTreeSet<(usize, usize)>,
}

/// Rebuilds a step outside the library: draws the batch and the
/// regularization coins from the documented keyed streams, inserts the
/// batch and filters the open layer by scanning for triangles.
pub fn predict_step(state: &TriState, params: &ProcessParams, root: StreamKey) -> StepPrediction {
    let n = state.n();
    let i = state.step_index() as u64;
    let theta = state.theta();
    let p = params.gamma / (theta * (n as f64).sqrt());
    let open_adj = adjacency(state.open());
    let gp_adj = adjacency(state.gprime());
    let pairs = pair_set(state.open());
    let sample_key = root.child(tfn_core::rng::tag::SAMPLE).child(i);
    let reg_key = root.child(tfn_core::rng::tag::REGULARIZE).child(i);

    let lp2 = (-p * p).ln_1p();
    let lp = (-p).ln_1p();
    let logp: Vec<f64> = pairs
        .iter()
        .map(|&(x, y)| {
            let (xs, ys) = xy_by_enumeration(&open_adj, &gp_adj, x, y);
            xs as f64 * lp2 + ys as f64 * lp
        })
        .collect();
    let log_s = logp.iter().cloned().fold(f64::INFINITY, f64::min);

    let mut batch = BTreeSet::new();
    let mut in_q = BTreeSet::new();
    for (&(x, y), &l) in pairs.iter().zip(&logp) {
        let idx = PairRef::new(x, y).unwrap().index(n);
        if sample_key.uniform(idx) < p {
            batch.insert((x, y));
        }
        if reg_key.uniform(idx) < (log_s - l).exp() {
            in_q.insert((x, y));
        }
    }
    let mut gp_after = state.gprime().clone();
    for &(x, y) in &batch {
        gp_after.add_edge(x, y);
    }
    let open_after = scratch_open(state.open(), &gp_after).intersection(&in_q).cloned().collect();
    StepPrediction { batch, open_after }
}

/// Survival probability of an open pair straight from the product form.
pub fn product_survival(x: usize, y: usize, p: f64) -> f64 {
    let direct = (1.0 - p * p).powi(x as i32) * (1.0 - p).powi(y as i32);
    debug_assert!((direct - survival_probability(x, y, p).unwrap()).abs() < 1e-9);
    direct
}

/// Independence number by enumerating every subset (n ≤ 20).
pub fn brute_alpha(g: &Graph) -> usize {
    let n = g.n();
    assert!(n <= 20);
    let masks: Vec<u32> = (0..n)
        .map(|u| (0..n).filter(|&v| g.has_edge(u, v)).fold(0u32, |m, v| m | (1 << v)))
        .collect();
    let mut best = 0;
    for s in 0u32..(1u32 << n) {
        if (s.count_ones() as usize) <= best {
            continue;
        }
        if (0..n).all(|u| s & (1 << u) == 0 || masks[u] & s == 0) {
            best = s.count_ones() as usize;
        }
    }
    best
}

pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let key = StreamKey::root(seed);
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if key.uniform((u * n + v) as u64) < p {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Desk parameters at vertex count `n`.
pub fn desk(n: usize, alpha: f64, seed: u64) -> ProcessParams {
    ProcessParams::desk(n, alpha, alpha, seed)
}
