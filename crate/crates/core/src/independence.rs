//! Independence numbers (exact and heuristic), the Shearer reference, the
//! large-degree set and core diagnostics, dense near-regular extraction, and
//! Ramsey witness certificates.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{and3_count, and_count, iter_bits, Graph, VertexSet};
use crate::pairgraph::TriState;
use crate::params::ProcessParams;

pub const DEFAULT_EXACT_THRESHOLD: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Greedy,
    LocalSearch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndependenceReport {
    /// Size of the best independent set found.
    pub lower: usize,
    /// Proven upper bound on α.
    pub upper: usize,
    /// A verified independent set of size `lower`.
    pub witness: Vec<usize>,
    pub method: Method,
    /// `n log d / d` at the average degree, when `d > 1`.
    pub shearer_ref: Option<f64>,
    /// Δ(G) when the graph is triangle-free: a neighbourhood is independent.
    pub degree_floor: Option<usize>,
}

/// `n log d / d`.
pub fn shearer_bound(n: f64, d: f64) -> Result<f64> {
    if !(d > 1.0) {
        return Err(Error::DegreeTooSmall(d));
    }
    Ok(n * d.ln() / d)
}

fn shearer_ref(g: &Graph) -> Option<f64> {
    shearer_bound(g.n() as f64, g.average_degree()).ok()
}

/// Largest neighbourhood, which is independent when `g` is triangle-free.
fn neighbourhood_floor(g: &Graph) -> Option<Vec<usize>> {
    if !g.is_triangle_free() {
        return None;
    }
    let v = (0..g.n()).max_by_key(|&v| (g.degree(v), std::cmp::Reverse(v)))?;
    Some(g.neighbors(v).collect())
}

fn verified(g: &Graph, mut set: Vec<usize>) -> Vec<usize> {
    set.sort_unstable();
    assert!(g.is_independent(&set), "internal error: reported set is not independent");
    set
}

fn first_bit(words: &[u64]) -> Option<usize> {
    words.iter().position(|&w| w != 0).map(|i| i * 64 + words[i].trailing_zeros() as usize)
}

struct Exact<'a> {
    g: &'a Graph,
    cur: Vec<usize>,
    best: Vec<usize>,
}

impl Exact<'_> {
    fn take(&mut self, v: usize, cand: &mut [u64]) {
        self.cur.push(v);
        cand[v / 64] &= !(1 << (v % 64));
        for (c, r) in cand.iter_mut().zip(self.g.row(v)) {
            *c &= !r;
        }
    }

    /// Number of cliques in a greedy clique cover of `cand`.
    fn clique_cover(&self, cand: &[u64]) -> usize {
        let mut left = cand.to_vec();
        let mut count = 0;
        while let Some(v) = first_bit(&left) {
            count += 1;
            left[v / 64] &= !(1 << (v % 64));
            let mut common: Vec<u64> = left.iter().zip(self.g.row(v)).map(|(a, b)| a & b).collect();
            while let Some(u) = first_bit(&common) {
                left[u / 64] &= !(1 << (u % 64));
                common[u / 64] &= !(1 << (u % 64));
                for (c, r) in common.iter_mut().zip(self.g.row(u)) {
                    *c &= r;
                }
            }
        }
        count
    }

    fn search(&mut self, mut cand: Vec<u64>) {
        let depth = self.cur.len();
        // a vertex of degree ≤ 1 in the candidate graph is in some maximum set
        loop {
            let low = iter_bits(&cand).find(|&v| and_count(self.g.row(v), &cand) <= 1);
            match low {
                Some(v) => self.take(v, &mut cand),
                None => break,
            }
        }
        if cand.iter().all(|&w| w == 0) {
            if self.cur.len() > self.best.len() {
                self.best = self.cur.clone();
            }
        } else if self.cur.len() + self.clique_cover(&cand) > self.best.len() {
            let v = iter_bits(&cand)
                .max_by_key(|&v| (and_count(self.g.row(v), &cand), std::cmp::Reverse(v)))
                .expect("nonempty");
            let mut with = cand.clone();
            self.take(v, &mut with);
            self.search(with);
            self.cur.pop();
            cand[v / 64] &= !(1 << (v % 64));
            self.search(cand);
        }
        self.cur.truncate(depth);
    }
}

/// Maximum independent set by branch and bound. Refuses graphs with more
/// than `limit` vertices.
pub fn exact_mis(g: &Graph, limit: usize) -> Result<IndependenceReport> {
    if g.n() > limit {
        return Err(Error::TooLargeForExact { n: g.n(), limit });
    }
    let mut ex = Exact { g, cur: Vec::new(), best: Vec::new() };
    let all = VertexSet::full(g.n());
    ex.search(all.words().to_vec());
    let witness = verified(g, ex.best);
    Ok(IndependenceReport {
        lower: witness.len(),
        upper: witness.len(),
        witness,
        method: Method::Exact,
        shearer_ref: shearer_ref(g),
        degree_floor: neighbourhood_floor(g).map(|s| s.len()),
    })
}

fn adjacency(g: &Graph) -> Vec<Vec<u32>> {
    (0..g.n()).map(|v| g.neighbors(v).map(|u| u as u32).collect()).collect()
}

/// Repeatedly takes a vertex of minimum remaining degree.
fn greedy_min_degree(adj: &[Vec<u32>]) -> Vec<usize> {
    let n = adj.len();
    let mut deg: Vec<usize> = adj.iter().map(|a| a.len()).collect();
    let mut alive = vec![true; n];
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|v| (deg[v], v)).collect();
    let mut out = Vec::new();
    while let Some((_, v)) = queue.pop_first() {
        out.push(v);
        alive[v] = false;
        let mut dead = Vec::new();
        for &u in &adj[v] {
            let u = u as usize;
            if alive[u] {
                alive[u] = false;
                queue.remove(&(deg[u], u));
                dead.push(u);
            }
        }
        for u in dead {
            for &w in &adj[u] {
                let w = w as usize;
                if alive[w] {
                    queue.remove(&(deg[w], w));
                    deg[w] -= 1;
                    queue.insert((deg[w], w));
                }
            }
        }
    }
    out
}

fn greedy_in_order(adj: &[Vec<u32>], order: &[usize]) -> Vec<usize> {
    let mut blocked = vec![false; adj.len()];
    let mut out = Vec::new();
    for &v in order {
        if !blocked[v] {
            out.push(v);
            blocked[v] = true;
            for &u in &adj[v] {
                blocked[u as usize] = true;
            }
        }
    }
    out
}

/// Iterated local search with (1,2)-swaps and forced insertions.
struct Local<'a> {
    g: &'a Graph,
    adj: &'a [Vec<u32>],
    in_s: Vec<bool>,
    tight: Vec<u32>,
    size: usize,
}

impl<'a> Local<'a> {
    fn new(g: &'a Graph, adj: &'a [Vec<u32>], set: &[usize]) -> Self {
        let mut l = Local { g, adj, in_s: vec![false; adj.len()], tight: vec![0; adj.len()], size: 0 };
        for &v in set {
            l.add(v);
        }
        l
    }

    fn add(&mut self, v: usize) {
        debug_assert!(!self.in_s[v] && self.tight[v] == 0);
        self.in_s[v] = true;
        self.size += 1;
        for &u in &self.adj[v] {
            self.tight[u as usize] += 1;
        }
    }

    fn remove(&mut self, v: usize) {
        self.in_s[v] = false;
        self.size -= 1;
        for &u in &self.adj[v] {
            self.tight[u as usize] -= 1;
        }
    }

    fn add_free_among(&mut self, vs: &[usize]) {
        for &v in vs {
            if !self.in_s[v] && self.tight[v] == 0 {
                self.add(v);
            }
        }
    }

    /// Replaces `v` by two non-adjacent vertices whose only solution
    /// neighbour is `v`.
    fn two_improve(&mut self, v: usize) -> bool {
        if !self.in_s[v] {
            return false;
        }
        let cands: Vec<usize> =
            self.adj[v].iter().map(|&u| u as usize).filter(|&u| self.tight[u] == 1).collect();
        for (a, &u) in cands.iter().enumerate() {
            for &w in &cands[a + 1..] {
                if !self.g.has_edge(u, w) {
                    self.remove(v);
                    self.add(u);
                    self.add(w);
                    let around: Vec<usize> = self.adj[v].iter().map(|&x| x as usize).collect();
                    self.add_free_among(&around);
                    return true;
                }
            }
        }
        false
    }

    fn improve(&mut self, mut queue: Vec<usize>) {
        while let Some(v) = queue.pop() {
            if self.two_improve(v) {
                for &u in &self.adj[v] {
                    let u = u as usize;
                    if self.in_s[u] {
                        queue.push(u);
                        for &w in &self.adj[u] {
                            for &x in &self.adj[w as usize] {
                                if self.in_s[x as usize] {
                                    queue.push(x as usize);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    fn solution(&self) -> Vec<usize> {
        (0..self.in_s.len()).filter(|&v| self.in_s[v]).collect()
    }

    fn run<R: Rng + ?Sized>(&mut self, budget: u64, rng: &mut R) -> Vec<usize> {
        let n = self.in_s.len();
        let all: Vec<usize> = (0..n).collect();
        self.add_free_among(&all);
        self.improve(self.solution());
        let mut best = self.solution();
        if n == 0 || self.size == n {
            return best;
        }
        for _ in 0..budget {
            // force in the least tight of a few random outsiders
            let mut u = usize::MAX;
            for _ in 0..4 {
                let c = rng.gen_range(0..n);
                if !self.in_s[c] && (u == usize::MAX || self.tight[c] < self.tight[u]) {
                    u = c;
                }
            }
            if u == usize::MAX {
                continue;
            }
            let evicted: Vec<usize> =
                self.adj[u].iter().map(|&x| x as usize).filter(|&x| self.in_s[x]).collect();
            for &x in &evicted {
                self.remove(x);
            }
            self.add(u);
            let mut touched: Vec<usize> = Vec::new();
            for &x in &evicted {
                touched.extend(self.adj[x].iter().map(|&y| y as usize));
            }
            touched.shuffle(rng);
            self.add_free_among(&touched);
            let mut queue: Vec<usize> = touched.iter().copied().filter(|&y| self.in_s[y]).collect();
            queue.push(u);
            self.improve(queue);
            if self.size > best.len() {
                best = self.solution();
            } else if self.size + 2 <= best.len() {
                *self = Local::new(self.g, self.adj, &best);
            }
        }
        best
    }
}

/// Size of a greedy maximal matching; `n − |M|` bounds α from above.
fn greedy_matching(g: &Graph) -> usize {
    let mut used = vec![false; g.n()];
    let mut m = 0;
    for (u, v) in g.edges() {
        if !used[u] && !used[v] {
            used[u] = true;
            used[v] = true;
            m += 1;
        }
    }
    m
}

/// Best of greedy orders followed by `budget` local-search iterations, and
/// never below the neighbourhood floor of a triangle-free graph.
pub fn heuristic_alpha<R: Rng + ?Sized>(g: &Graph, rng: &mut R, budget: u64) -> IndependenceReport {
    let adj = adjacency(g);
    let mut best = greedy_min_degree(&adj);
    let mut order: Vec<usize> = (0..g.n()).collect();
    for _ in 0..3 {
        order.shuffle(rng);
        let s = greedy_in_order(&adj, &order);
        if s.len() > best.len() {
            best = s;
        }
    }
    let mut method = Method::Greedy;
    if budget > 0 {
        let s = Local::new(g, &adj, &best).run(budget, rng);
        if s.len() >= best.len() {
            best = s;
        }
        method = Method::LocalSearch;
    }
    let floor = neighbourhood_floor(g);
    if let Some(f) = &floor {
        if f.len() > best.len() {
            best = f.clone();
        }
    }
    let witness = verified(g, best);
    IndependenceReport {
        lower: witness.len(),
        upper: g.n() - greedy_matching(g),
        witness,
        method,
        shearer_ref: shearer_ref(g),
        degree_floor: floor.map(|f| f.len()),
    }
}

/// `L(I) = {x : |I ∩ N'(x)| ≥ threshold}` with the threshold from `params`.
pub fn large_degree_set(state: &TriState, set: &[usize], params: &ProcessParams) -> Vec<usize> {
    large_degree_set_with(state, set, params.large_degree_threshold())
}

pub fn large_degree_set_with(state: &TriState, set: &[usize], threshold: usize) -> Vec<usize> {
    let n = state.n();
    let i_bits = VertexSet::from_iter(n, set.iter().copied());
    (0..n).filter(|&x| and_count(state.gprime().row(x), i_bits.words()) as usize >= threshold).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoreDiagnostic {
    pub set: Vec<usize>,
    pub large: Vec<usize>,
    pub threshold: usize,
    pub core_size: usize,
    pub open_in_core: usize,
    /// `|C ∩ O_i| ≥ (1−ε_i)θ_i|C|`.
    pub b_event: bool,
    /// `|C| ≤ γ²k²`.
    pub d_event: bool,
}

/// Pairs of `I` not inside `N'(x)` for any `x ∈ L(I)`, and how many are open.
pub fn core_diagnostic(state: &TriState, set: &[usize], params: &ProcessParams) -> CoreDiagnostic {
    let threshold = params.large_degree_threshold();
    let large = large_degree_set_with(state, set, threshold);
    let n = state.n();
    let l_bits = VertexSet::from_iter(n, large.iter().copied());
    let gp = state.gprime();
    let mut core_size = 0;
    let mut open_in_core = 0;
    for (a, &u) in set.iter().enumerate() {
        for &v in &set[a + 1..] {
            if u == v || and3_count(gp.row(u), gp.row(v), l_bits.words()) > 0 {
                continue;
            }
            core_size += 1;
            if state.open().has_edge(u, v) {
                open_in_core += 1;
            }
        }
    }
    let i = state.step_index();
    let k = set.len() as f64;
    let b_event = open_in_core as f64 >= (1.0 - params.eps(i)) * state.theta() * core_size as f64;
    let d_event = core_size as f64 <= params.gamma * params.gamma * k * k;
    CoreDiagnostic { set: set.to_vec(), large, threshold, core_size, open_in_core, b_event, d_event }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseOptions {
    /// Minimum average degree accepted.
    pub floor: f64,
    pub retries: usize,
    /// Constant in the average-degree guarantee.
    pub c: f64,
}

impl Default for DenseOptions {
    fn default() -> Self {
        DenseOptions { floor: 4.0, retries: 20, c: 1.0 / 32.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseExtraction {
    /// Vertices of the induced subgraph, in the input's labels.
    pub vertices: Vec<usize>,
    pub average_degree: f64,
    pub max_degree: usize,
    /// `(c log d / log n)·d`.
    pub required_average: f64,
    /// `2d^{3/2}`.
    pub allowed_max: f64,
    pub conforming: bool,
    pub attempts: usize,
}

fn avg_degree_of(g: &Graph, vs: &[usize]) -> (f64, usize) {
    if vs.is_empty() {
        return (0.0, 0);
    }
    let bits = VertexSet::from_iter(g.n(), vs.iter().copied());
    let degs: Vec<usize> = vs.iter().map(|&v| and_count(g.row(v), bits.words()) as usize).collect();
    (degs.iter().sum::<usize>() as f64 / vs.len() as f64, degs.into_iter().max().unwrap_or(0))
}

/// Peels minimum-degree vertices while the average degree stays ≥ `target`.
fn peel_to_average(g: &Graph, target: f64) -> Vec<usize> {
    let adj = adjacency(g);
    let n = g.n();
    let mut deg: Vec<usize> = adj.iter().map(|a| a.len()).collect();
    let mut alive = vec![true; n];
    let mut edges = g.edge_count();
    let mut count = n;
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|v| (deg[v], v)).collect();
    while count > 1 {
        let &(d, v) = queue.first().expect("nonempty");
        let after = 2.0 * (edges - d) as f64 / (count - 1) as f64;
        if after < target {
            break;
        }
        queue.pop_first();
        alive[v] = false;
        edges -= d;
        count -= 1;
        for &u in &adj[v] {
            let u = u as usize;
            if alive[u] {
                queue.remove(&(deg[u], u));
                deg[u] -= 1;
                queue.insert((deg[u], u));
            }
        }
    }
    (0..n).filter(|&v| alive[v]).collect()
}

fn extract_once<R: Rng + ?Sized>(g: &Graph, d: f64, rng: &mut R) -> Vec<usize> {
    let n = g.n() as f64;
    let base = peel_to_average(g, d / 2.0);
    let base_bits = VertexSet::from_iter(g.n(), base.iter().copied());
    let deg_in = |x: usize, set: &VertexSet| and_count(g.row(x), set.words()) as usize;
    let big_d = avg_degree_of(g, &base).0;
    let r = big_d.powf(0.25).max(1.0 + 1e-9);
    let ell = (n.ln() / r.ln()).ceil().max(1.0) as usize;

    // degree classes inside the peeled graph
    let class_of = |x: usize| -> usize {
        let dx = deg_in(x, &base_bits) as f64;
        if dx <= r * big_d {
            return 0;
        }
        let c = ((dx / big_d).ln() / r.ln()).ceil() as usize - 1;
        c.clamp(1, ell)
    };
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); ell + 1];
    for &x in &base {
        classes[class_of(x)].push(x);
    }
    let class_bits: Vec<VertexSet> =
        classes.iter().map(|c| VertexSet::from_iter(g.n(), c.iter().copied())).collect();

    // j maximizing e(V_{<j}, V_j) + e(G[V_j])
    let mut below = VertexSet::new(g.n());
    let mut best_j = 0;
    let mut best_mass = -1.0;
    for j in 0..=ell {
        let cross: usize = classes[j].iter().map(|&x| deg_in(x, &below)).sum();
        let inner: usize = classes[j].iter().map(|&x| deg_in(x, &class_bits[j])).sum::<usize>() / 2;
        let mass = (cross + inner) as f64;
        if mass > best_mass {
            best_mass = mass;
            best_j = j;
        }
        for &x in &classes[j] {
            below.insert(x);
        }
    }
    if best_j == 0 {
        return classes[0].clone();
    }
    let j = best_j;
    let vj: Vec<usize> = classes[j]
        .iter()
        .copied()
        .filter(|&x| deg_in(x, &class_bits[j]) as f64 <= r * r * big_d)
        .collect();
    let p = r.powi(-(j as i32));
    let mut union: Vec<usize> = classes[..j].iter().flatten().copied().filter(|_| rng.gen::<f64>() < p).collect();
    union.extend(&vj);
    let union_bits = VertexSet::from_iter(g.n(), union.iter().copied());
    let cap = 2.0 * r * r * big_d;
    let mut s: Vec<usize> = union.into_iter().filter(|&x| (deg_in(x, &union_bits) as f64) < cap).collect();
    s.sort_unstable();
    s
}

/// Induced subgraph of average degree ≥ `(c log d / log n)·d` and maximum
/// degree ≤ `2d^{3/2}`, following the peel, degree-class and sampling
/// construction. The construction works in expectation, so it retries with
/// fresh randomness and returns the best attempt, flagged if it does not
/// conform.
pub fn dense_regular_subgraph<R: Rng + ?Sized>(
    g: &Graph,
    rng: &mut R,
    opts: &DenseOptions,
) -> Result<DenseExtraction> {
    let d = g.average_degree();
    if !(d >= opts.floor) {
        return Err(Error::BelowDegreeFloor { avg: d, floor: opts.floor });
    }
    let n = g.n() as f64;
    let required = opts.c * d.ln() / n.ln() * d;
    let allowed = 2.0 * d.powf(1.5);
    let mut best: Option<DenseExtraction> = None;
    for attempt in 1..=opts.retries.max(1) {
        let vs = extract_once(g, d, rng);
        let (avg, max) = avg_degree_of(g, &vs);
        let conforming = !vs.is_empty() && avg >= required && max as f64 <= allowed;
        let cand = DenseExtraction {
            vertices: vs,
            average_degree: avg,
            max_degree: max,
            required_average: required,
            allowed_max: allowed,
            conforming,
            attempts: attempt,
        };
        let better = match &best {
            None => true,
            Some(b) => (cand.conforming, cand.average_degree) > (b.conforming, b.average_degree),
        };
        if better {
            best = Some(cand);
        }
        if conforming {
            break;
        }
    }
    let mut out = best.expect("at least one attempt");
    out.attempts = out.attempts.max(1);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum TriangleVerdict {
    TriangleFree,
    Triangle { a: usize, b: usize, c: usize },
}

/// Exhaustive row-AND scan; reports the first triangle in lexicographic order.
pub fn verify_triangle_free(g: &Graph) -> TriangleVerdict {
    match g.find_triangle() {
        None => TriangleVerdict::TriangleFree,
        Some((a, b, c)) => TriangleVerdict::Triangle { a, b, c },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaEvidence {
    pub method: Method,
    /// Exact α, or the largest independent set found.
    pub value: usize,
    pub witness: Vec<usize>,
    /// Local-search iterations spent; absent for exact evidence.
    pub budget: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub n: usize,
    pub k: usize,
    /// True when α was computed exactly.
    pub rigorous: bool,
    pub claim: String,
    pub alpha: AlphaEvidence,
    pub triangle: TriangleVerdict,
    /// FNV-1a 64 over the sorted `u v\n` edge lines, as 16 hex digits.
    pub digest: String,
    pub edges: Vec<(usize, usize)>,
}

impl WitnessCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub exact_threshold: usize,
    pub budget: u64,
    pub seed: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { exact_threshold: DEFAULT_EXACT_THRESHOLD, budget: 20_000, seed: 0 }
    }
}

/// Certifies `R(3,k) > n` from a triangle-free graph with `α < k`. Above
/// the exact threshold the claim rests on a heuristic search and is marked
/// non-rigorous.
pub fn certify_ramsey_witness(g: &Graph, k: usize, opts: &CertifyOptions) -> Result<WitnessCertificate> {
    let triangle = verify_triangle_free(g);
    if let TriangleVerdict::Triangle { a, b, c } = triangle {
        return Err(Error::TriangleFound { a, b, c });
    }
    let (alpha, rigorous) = if g.n() <= opts.exact_threshold {
        let r = exact_mis(g, opts.exact_threshold)?;
        (AlphaEvidence { method: Method::Exact, value: r.lower, witness: r.witness, budget: None }, true)
    } else {
        let mut rng = crate::rng::StreamKey::root(opts.seed).child(crate::rng::tag::INDEPENDENCE).chacha();
        let r = heuristic_alpha(g, &mut rng, opts.budget);
        let ev = AlphaEvidence { method: r.method, value: r.lower, witness: r.witness, budget: Some(opts.budget) };
        (ev, false)
    };
    if alpha.value >= k {
        return Err(Error::IndependentSetTooLarge { size: alpha.value, k });
    }
    let claim = if rigorous {
        format!("triangle-free on {} vertices with independence number {} < {}, so R(3,{}) > {}", g.n(), alpha.value, k, k, g.n())
    } else {
        format!(
            "triangle-free on {} vertices; heuristically unrefuted: best independent set found has size {} < {} after budget {}",
            g.n(),
            alpha.value,
            k,
            opts.budget
        )
    };
    Ok(WitnessCertificate {
        n: g.n(),
        k,
        rigorous,
        claim,
        alpha,
        triangle,
        digest: format!("{:016x}", g.digest()),
        edges: g.edge_vec(),
    })
}
