//! Three-layer pair state: attempted edges `G'_{≤i}`, kept edges `G_{≤i}`
//! and open pairs `O_i`, plus the blow-up partition.
//!
//! Each layer is a word-packed bit matrix, so the codegree-style queries
//! that drive the nibble (`X_i(e)`, `Y_i(e)`) are row ANDs with popcount.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{and_count, iter_and_bits, Graph};

/// Blow-up partition of `[n]` into consecutive blocks of `r` vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    n: usize,
    r: usize,
}

impl Partition {
    /// Partition of the largest multiple of `r` not exceeding `n`.
    pub fn new(n: usize, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::param("r", "part size must be at least 1"));
        }
        Ok(Partition { n: n / r * r, r })
    }

    /// Effective vertex count (a multiple of `r`).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn parts(&self) -> usize {
        self.n / self.r
    }

    /// π(x): index of the part containing `x`.
    #[inline]
    pub fn part_of(&self, x: usize) -> usize {
        x / self.r
    }

    /// Vertices of part `j`.
    pub fn members(&self, j: usize) -> std::ops::Range<usize> {
        j * self.r..(j + 1) * self.r
    }
}

/// An unordered pair `{x, y}` stored with `x < y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PairRef {
    x: u32,
    y: u32,
}

impl PairRef {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == b {
            return Err(Error::SelfPair(a));
        }
        let (x, y) = if a < b { (a, b) } else { (b, a) };
        Ok(PairRef { x: x as u32, y: y as u32 })
    }

    /// Unchecked constructor for callers that already know `a != b`.
    #[inline]
    pub(crate) fn of(a: usize, b: usize) -> Self {
        debug_assert!(a != b);
        let (x, y) = if a < b { (a, b) } else { (b, a) };
        PairRef { x: x as u32, y: y as u32 }
    }

    #[inline]
    pub fn x(self) -> usize {
        self.x as usize
    }

    #[inline]
    pub fn y(self) -> usize {
        self.y as usize
    }

    /// Canonical index in `[0, n(n−1)/2)`, row-major over `x < y`.
    #[inline]
    pub fn index(self, n: usize) -> u64 {
        let (x, y, n) = (self.x as u64, self.y as u64, n as u64);
        x * n - x * (x + 1) / 2 + (y - x - 1)
    }

    /// Inverse of [`PairRef::index`].
    pub fn from_index(index: u64, n: usize) -> Self {
        let n64 = n as u64;
        let total = n64 * (n64 - 1) / 2;
        debug_assert!(index < total);
        // row x starts at x*n - x(x+1)/2; solve with floating point, then fix up.
        let nf = n as f64;
        let disc = (2.0 * nf - 1.0).powi(2) - 8.0 * index as f64;
        let mut x = (((2.0 * nf - 1.0) - disc.max(0.0).sqrt()) / 2.0).floor() as u64;
        let start = |x: u64| x * n64 - x * (x + 1) / 2;
        while x > 0 && start(x) > index {
            x -= 1;
        }
        while x + 1 < n64 && start(x + 1) <= index {
            x += 1;
        }
        let y = index - start(x) + x + 1;
        PairRef { x: x as u32, y: y as u32 }
    }
}

/// Which layer of the state to read or export.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    GPrime,
    GKept,
    Open,
}

impl std::str::FromStr for Layer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gprime" => Ok(Layer::GPrime),
            "gkept" => Ok(Layer::GKept),
            "open" => Ok(Layer::Open),
            other => Err(Error::param("layer", format!("unknown layer `{other}`"))),
        }
    }
}

/// The mutable state of the process at step `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct TriState {
    pub(crate) partition: Partition,
    pub(crate) step: usize,
    pub(crate) gprime: Graph,
    pub(crate) gkept: Graph,
    pub(crate) open: Graph,
    /// Pairs of the most recent batch `G'_i` (empty at step 0).
    pub(crate) last_batch: Vec<PairRef>,
}

/// One invariant violation found by [`TriState::verify_consistency`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    KeptNotInGPrime(PairRef),
    KeptTriangle(usize, usize, usize),
    OpenInGPrime(PairRef),
    OpenClosesTriangle { pair: PairRef, via: usize },
    OpenInsidePart(PairRef),
    MultipleOpenBetweenParts { a: usize, b: usize, count: usize },
}

impl TriState {
    /// Empty state on the given partition.
    pub fn empty(partition: Partition) -> Self {
        let n = partition.n();
        TriState {
            partition,
            step: 0,
            gprime: Graph::new(n),
            gkept: Graph::new(n),
            open: Graph::new(n),
            last_batch: Vec::new(),
        }
    }

    /// Assembles a state from explicit layers. No invariants are checked;
    /// run [`TriState::verify_consistency`] when the layers are untrusted.
    pub fn from_layers(partition: Partition, gprime: Graph, gkept: Graph, open: Graph) -> Result<Self> {
        let n = partition.n();
        for (name, g) in [("gprime", &gprime), ("gkept", &gkept), ("open", &open)] {
            if g.n() != n {
                return Err(Error::InconsistentState(format!(
                    "layer {name} has {} vertices, partition has {n}",
                    g.n()
                )));
            }
        }
        Ok(TriState { partition, step: 0, gprime, gkept, open, last_batch: Vec::new() })
    }

    pub fn n(&self) -> usize {
        self.partition.n()
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn gprime(&self) -> &Graph {
        &self.gprime
    }

    pub fn gkept(&self) -> &Graph {
        &self.gkept
    }

    pub fn open(&self) -> &Graph {
        &self.open
    }

    pub fn layer(&self, layer: Layer) -> &Graph {
        match layer {
            Layer::GPrime => &self.gprime,
            Layer::GKept => &self.gkept,
            Layer::Open => &self.open,
        }
    }

    /// The latest batch `G'_i` as a graph.
    pub fn last_batch(&self) -> &[PairRef] {
        &self.last_batch
    }

    pub fn open_pairs(&self) -> usize {
        self.open.edge_count()
    }

    /// θ_i: e(O_i) / C(n, 2).
    pub fn theta(&self) -> f64 {
        let n = self.n() as f64;
        let total = n * (n - 1.0) / 2.0;
        if total == 0.0 {
            0.0
        } else {
            self.open.edge_count() as f64 / total
        }
    }

    pub fn is_open(&self, e: PairRef) -> bool {
        self.open.has_edge(e.x(), e.y())
    }

    pub fn open_degree(&self, x: usize) -> usize {
        self.open.degree(x)
    }

    /// `|N°(x) ∩ N°(y)|` over the open layer.
    pub fn open_codegree(&self, x: usize, y: usize) -> usize {
        and_count(self.open.row(x), self.open.row(y)) as usize
    }

    fn require_open(&self, e: PairRef) -> Result<()> {
        if e.y() >= self.n() {
            return Err(Error::VertexOutOfRange { v: e.y(), n: self.n() });
        }
        if !self.is_open(e) {
            return Err(Error::NotOpen { x: e.x(), y: e.y() });
        }
        Ok(())
    }

    /// X_i(e): number of open triangles through `e`.
    pub fn xi(&self, e: PairRef) -> Result<usize> {
        self.require_open(e)?;
        Ok(self.xi_unchecked(e))
    }

    #[inline]
    pub(crate) fn xi_unchecked(&self, e: PairRef) -> usize {
        self.open_codegree(e.x(), e.y())
    }

    /// Y_i(e) = |N°(x) ∩ N'(y)| + |N°(y) ∩ N'(x)| + 1.
    pub fn yi(&self, e: PairRef) -> Result<usize> {
        self.require_open(e)?;
        Ok(self.yi_unchecked(e))
    }

    #[inline]
    pub(crate) fn yi_unchecked(&self, e: PairRef) -> usize {
        let (x, y) = (e.x(), e.y());
        let a = and_count(self.open.row(x), self.gprime.row(y));
        let b = and_count(self.open.row(y), self.gprime.row(x));
        (a + b + 1) as usize
    }

    /// `|N'(x) ∩ N°(y)|`.
    pub fn cross_degree(&self, x: usize, y: usize) -> usize {
        and_count(self.gprime.row(x), self.open.row(y)) as usize
    }

    /// Closes every open pair that forms a triangle with `G'` through the
    /// freshly added edge `f`, and `f` itself. Returns the closed pairs.
    ///
    /// Callers insert a whole batch into `G'` first and then call this once
    /// per batch edge; the result is the from-scratch open set regardless of
    /// the order of calls.
    pub fn close_pairs_for_new_edge(&mut self, f: PairRef) -> Result<Vec<PairRef>> {
        let (u, v) = (f.x(), f.y());
        if v >= self.n() {
            return Err(Error::VertexOutOfRange { v, n: self.n() });
        }
        if !self.gprime.has_edge(u, v) {
            return Err(Error::NotInGPrime { x: u, y: v });
        }
        let mut closed = Vec::new();
        if self.open.remove_edge(u, v) {
            closed.push(f);
        }
        // w with uw ∈ G' and vw open: the pair vw now spans u-v-w.
        for (a, b) in [(u, v), (v, u)] {
            let hits: Vec<usize> = iter_and_bits(self.gprime.row(a), self.open.row(b)).collect();
            for w in hits {
                if self.open.remove_edge(b, w) {
                    closed.push(PairRef::of(b, w));
                }
            }
        }
        Ok(closed)
    }

    /// Adds a batch to `G'` and closes everything it closes.
    pub fn add_batch_and_close(&mut self, batch: &[PairRef]) -> Result<usize> {
        for &f in batch {
            self.gprime.add_edge(f.x(), f.y());
        }
        let mut closed = 0;
        for &f in batch {
            closed += self.close_pairs_for_new_edge(f)?.len();
        }
        Ok(closed)
    }

    /// Exhaustive check of every state invariant. O(n³/64); for tests and
    /// diagnostics.
    pub fn verify_consistency(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.n();
        for (x, y) in self.gkept.edges() {
            if !self.gprime.has_edge(x, y) {
                out.push(Violation::KeptNotInGPrime(PairRef::of(x, y)));
            }
        }
        if let Some((a, b, c)) = self.gkept.find_triangle() {
            out.push(Violation::KeptTriangle(a, b, c));
        }
        let parts = self.partition.parts();
        let mut between = std::collections::HashMap::<(usize, usize), usize>::new();
        for (x, y) in self.open.edges() {
            let e = PairRef::of(x, y);
            if self.gprime.has_edge(x, y) {
                out.push(Violation::OpenInGPrime(e));
            }
            if let Some(w) = iter_and_bits(self.gprime.row(x), self.gprime.row(y)).next() {
                out.push(Violation::OpenClosesTriangle { pair: e, via: w });
            }
            let (a, b) = (self.partition.part_of(x), self.partition.part_of(y));
            if a == b {
                out.push(Violation::OpenInsidePart(e));
            } else if self.partition.r() > 1 {
                *between.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        debug_assert!(parts * self.partition.r() == n);
        let mut multi: Vec<_> = between.into_iter().filter(|&(_, c)| c > 1).collect();
        multi.sort_unstable();
        for ((a, b), count) in multi {
            out.push(Violation::MultipleOpenBetweenParts { a, b, count });
        }
        out
    }

    /// Writes one layer in the edge-list format.
    pub fn write_layer<W: Write>(&self, layer: Layer, w: W) -> std::io::Result<()> {
        self.layer(layer).write_edge_list(w)
    }
}
