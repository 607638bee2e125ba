//! Seed construction: sample `G'_* ~ G(n/r, p₀)`, clean it to a maximal
//! triangle-free `G_*`, blow both up by `r`, and keep one open pair per
//! part-pair.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{and_count, Graph};
use crate::monitors::{self, MonitorReport};
use crate::pairgraph::{PairRef, Partition, TriState};
use crate::params::ProcessParams;
use crate::rng::{tag, StreamKey};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedStats {
    pub theta0: f64,
    pub s_star: f64,
    pub effective_n: usize,
    pub gstar_prime_edges: usize,
    pub gstar_edges: usize,
    pub g0_prime_edges: usize,
    pub g0_edges: usize,
    pub o0_prime_pairs: usize,
    pub o0_pairs: usize,
}

/// `G(m, p)` by geometric skipping over the `m(m−1)/2` canonical pair
/// indices; expected time is linear in the number of edges.
pub fn sample_gnp<R: Rng + ?Sized>(m: usize, p: f64, rng: &mut R) -> Graph {
    let mut g = Graph::new(m);
    if m < 2 || p <= 0.0 {
        return g;
    }
    if p >= 1.0 {
        return crate::graph::named::complete(m);
    }
    let total = (m as u64) * (m as u64 - 1) / 2;
    let log_q = (-p).ln_1p();
    let mut idx: u64 = 0;
    loop {
        // number of failures before the next success
        let u: f64 = rng.gen();
        let skip = ((1.0 - u).ln() / log_q).floor();
        if !skip.is_finite() || skip >= (total - idx) as f64 {
            break;
        }
        idx += skip as u64;
        let e = PairRef::from_index(idx, m);
        g.add_edge(e.x(), e.y());
        idx += 1;
        if idx >= total {
            break;
        }
    }
    g
}

/// Greedy maximal triangle-free subgraph: scan the edges in uniformly random
/// order and keep each one that closes no triangle with those kept so far.
pub fn max_triangle_free_subgraph<R: Rng + ?Sized>(graph: &Graph, rng: &mut R) -> Graph {
    let mut edges = graph.edge_vec();
    edges.shuffle(rng);
    let mut kept = Graph::new(graph.n());
    for (u, v) in edges {
        if and_count(kept.row(u), kept.row(v)) == 0 {
            kept.add_edge(u, v);
        }
    }
    kept
}

fn blow_up(g: &Graph, partition: &Partition) -> Graph {
    let mut out = Graph::new(partition.n());
    for (a, b) in g.edges() {
        for x in partition.members(a) {
            for y in partition.members(b) {
                out.add_edge(x, y);
            }
        }
    }
    out
}

/// Builds `(G₀, G'₀, O₀)` and the seed statistics.
pub fn build_seed(params: &ProcessParams) -> Result<(TriState, SeedStats)> {
    params.validate()?;
    let partition = crate::pairgraph::Partition::new(params.n, params.r)?;
    let root = StreamKey::root(params.rng_seed);
    let m = partition.parts();
    let r = partition.r();

    let gstar_prime = sample_gnp(m, params.p0(), &mut root.child(tag::SEED_GRAPH).stream());
    let gstar = max_triangle_free_subgraph(&gstar_prime, &mut root.child(tag::SEED_CLEAN).chacha());

    let mut state = TriState::empty(partition.clone());
    state.gprime = blow_up(&gstar_prime, &partition);
    state.gkept = blow_up(&gstar, &partition);

    // O'_0 is the blow-up of O_*: between parts a, b it is either all r² pairs
    // or empty, so a uniform pick is a uniform index into V_a × V_b.
    let open_key = root.child(tag::SEED_OPEN);
    let mut o_star = 0usize;
    for a in 0..m {
        for b in a + 1..m {
            if gstar_prime.has_edge(a, b) || gstar_prime.codegree(a, b) > 0 {
                continue;
            }
            o_star += 1;
            let mut s = open_key.child(a as u64).child(b as u64).stream();
            let pick = s.gen_range(0..r * r);
            let x = a * r + pick / r;
            let y = b * r + pick % r;
            state.open.add_edge(x, y);
        }
    }
    let isolated_parts = (0..m).filter(|&a| gstar_prime.degree(a) == 0).count();
    let o0_prime_pairs = o_star * r * r + isolated_parts * r * (r - 1) / 2;

    let stats = SeedStats {
        theta0: state.theta(),
        s_star: params.s_star(),
        effective_n: partition.n(),
        gstar_prime_edges: gstar_prime.edge_count(),
        gstar_edges: gstar.edge_count(),
        g0_prime_edges: state.gprime.edge_count(),
        g0_edges: state.gkept.edge_count(),
        o0_prime_pairs,
        o0_pairs: state.open.edge_count(),
    };
    Ok((state, stats))
}

/// Event checks on a freshly built seed: degree and cross-part codegree of
/// `G'₀`, degree and codegree of `O₀`, and θ₀ against `s_* r^{-2}`.
pub fn seed_monitor(state: &TriState, stats: &SeedStats, params: &ProcessParams) -> MonitorReport {
    monitors::check_event_a(state, None, stats, params, monitors::MonitorMode::Full)
}
