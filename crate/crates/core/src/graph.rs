//! Word-packed simple graphs.
//!
//! Adjacency is stored as one bit-row per vertex, so neighbourhood
//! intersections are a word-AND plus popcount. Every layer of the process
//! state and every graph handed to the independence tools uses this type.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

#[inline]
pub fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// `|a ∩ b|` for two bit-rows of equal length.
#[inline]
pub fn and_count(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

/// `|a ∩ b ∩ c|`.
#[inline]
pub fn and3_count(a: &[u64], b: &[u64], c: &[u64]) -> u32 {
    a.iter()
        .zip(b)
        .zip(c)
        .map(|((x, y), z)| (x & y & z).count_ones())
        .sum()
}

#[inline]
pub fn row_count(a: &[u64]) -> u32 {
    a.iter().map(|w| w.count_ones()).sum()
}

/// Iterates the set bits of a row in increasing order.
pub fn iter_bits(row: &[u64]) -> impl Iterator<Item = usize> + '_ {
    row.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            }
        })
    })
}

/// Iterates the set bits of `a & b`.
pub fn iter_and_bits<'a>(a: &'a [u64], b: &'a [u64]) -> impl Iterator<Item = usize> + 'a {
    a.iter().zip(b).enumerate().flat_map(|(wi, (&x, &y))| {
        let mut w = x & y;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            }
        })
    })
}

/// A bit-set over `0..n`, used for vertex subsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSet {
    n: usize,
    words: Vec<u64>,
}

impl VertexSet {
    pub fn new(n: usize) -> Self {
        VertexSet { n, words: vec![0; words_for(n)] }
    }

    pub fn from_iter(n: usize, vs: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::new(n);
        for v in vs {
            s.insert(v);
        }
        s
    }

    pub fn full(n: usize) -> Self {
        Self::from_iter(n, 0..n)
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        self.words[v / 64] |= 1 << (v % 64);
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        self.words[v / 64] &= !(1 << (v % 64));
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < self.n && self.words[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        row_count(&self.words) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        iter_bits(&self.words)
    }

    pub fn universe(&self) -> usize {
        self.n
    }
}

/// Undirected simple graph on `0..n` with bit-row adjacency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    edges: usize,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        let words = words_for(n);
        Graph { n, words, rows: vec![0; n * words], edges: 0 }
    }

    /// Builds a graph from an edge list, rejecting self-loops and
    /// out-of-range endpoints. Repeated edges are merged.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.check_pair(u, v)?;
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub(crate) fn check_pair(&self, u: usize, v: usize) -> Result<()> {
        for w in [u, v] {
            if w >= self.n {
                return Err(Error::VertexOutOfRange { v: w, n: self.n });
            }
        }
        if u == v {
            return Err(Error::SelfPair(u));
        }
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[u64] {
        &self.rows[u * self.words..(u + 1) * self.words]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    #[inline]
    fn set_bit(&mut self, u: usize, v: usize) {
        self.rows[u * self.words + v / 64] |= 1 << (v % 64);
    }

    #[inline]
    fn clear_bit(&mut self, u: usize, v: usize) {
        self.rows[u * self.words + v / 64] &= !(1 << (v % 64));
    }

    /// Adds `uv`; returns false if it was already present.
    #[inline]
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        debug_assert!(u != v && u < self.n && v < self.n);
        if self.has_edge(u, v) {
            return false;
        }
        self.set_bit(u, v);
        self.set_bit(v, u);
        self.edges += 1;
        true
    }

    /// Removes `uv`; returns false if it was absent.
    #[inline]
    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if !self.has_edge(u, v) {
            return false;
        }
        self.clear_bit(u, v);
        self.clear_bit(v, u);
        self.edges -= 1;
        true
    }

    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        row_count(self.row(u)) as usize
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|u| self.degree(u)).max().unwrap_or(0)
    }

    pub fn average_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            2.0 * self.edges as f64 / self.n as f64
        }
    }

    /// `|N(u) ∩ N(v)|`.
    #[inline]
    pub fn codegree(&self, u: usize, v: usize) -> usize {
        and_count(self.row(u), self.row(v)) as usize
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        iter_bits(self.row(u))
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            iter_bits(self.row(u))
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn edge_vec(&self) -> Vec<(usize, usize)> {
        self.edges().collect()
    }

    /// Graph induced on `vertices`, relabelled `0..len` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut g = Graph::new(vertices.len());
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// First triangle `(a, b, c)` with `a < b < c` in lexicographic order,
    /// found by scanning each edge's row intersection.
    pub fn find_triangle(&self) -> Option<(usize, usize, usize)> {
        for u in 0..self.n {
            for v in iter_bits(self.row(u)).filter(|&v| v > u) {
                if let Some(w) = iter_and_bits(self.row(u), self.row(v)).find(|&w| w > v) {
                    return Some((u, v, w));
                }
            }
        }
        None
    }

    pub fn is_triangle_free(&self) -> bool {
        self.find_triangle().is_none()
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter().enumerate().all(|(i, &u)| {
            set[i + 1..].iter().all(|&v| u != v && !self.has_edge(u, v))
        })
    }

    /// Writes the edge-list format: `n <count>` then one sorted `u v` per line.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n {}", self.n)?;
        for (u, v) in self.edges() {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut s = format!("n {}\n", self.n);
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    /// Parses the edge-list format. Blank lines and `#` comments are
    /// skipped; endpoints may appear in either order.
    pub fn read_edge_list<R: BufRead>(r: R) -> Result<Graph> {
        let mut g: Option<Graph> = None;
        for (i, line) in r.lines().enumerate() {
            let line_no = i + 1;
            let line = line.map_err(|e| Error::Parse { line: line_no, msg: e.to_string() })?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let mut it = t.split_whitespace();
            match g.as_mut() {
                None => {
                    let (Some("n"), Some(count), None) = (it.next(), it.next(), it.next()) else {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!("expected header `n <count>`, found `{t}`"),
                        });
                    };
                    let n = count.parse::<usize>().map_err(|e| Error::Parse {
                        line: line_no,
                        msg: format!("bad vertex count `{count}`: {e}"),
                    })?;
                    g = Some(Graph::new(n));
                }
                Some(g) => {
                    let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!("expected `u v`, found `{t}`"),
                        });
                    };
                    let parse = |s: &str| {
                        s.parse::<usize>().map_err(|e| Error::Parse {
                            line: line_no,
                            msg: format!("bad vertex `{s}`: {e}"),
                        })
                    };
                    let (u, v) = (parse(a)?, parse(b)?);
                    g.check_pair(u, v).map_err(|e| Error::Parse {
                        line: line_no,
                        msg: e.to_string(),
                    })?;
                    g.add_edge(u, v);
                }
            }
        }
        g.ok_or(Error::Parse { line: 0, msg: "missing `n <count>` header".into() })
    }

    /// 64-bit FNV-1a over the canonical edge lines (`"u v\n"`, sorted).
    pub fn digest(&self) -> u64 {
        let mut h = Fnv1a::new();
        let mut buf = String::new();
        for (u, v) in self.edges() {
            buf.clear();
            let _ = writeln!(buf, "{u} {v}");
            h.update(buf.as_bytes());
        }
        h.finish()
    }
}

/// 64-bit FNV-1a.
#[derive(Clone, Copy, Debug)]
pub struct Fnv1a(u64);

impl Fnv1a {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;

    pub fn new() -> Self {
        Fnv1a(Self::OFFSET)
    }

    pub fn update(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(Self::PRIME);
        }
    }

    pub fn finish(self) -> u64 {
        self.0
    }
}

impl Default for Fnv1a {
    fn default() -> Self {
        Self::new()
    }
}

/// Small named graphs used by tests, examples and the CLI.
pub mod named {
    use super::Graph;

    pub fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).expect("cycle")
    }

    pub fn complete(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn star(leaves: usize) -> Graph {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        Graph::from_edges(leaves + 1, &edges).expect("star")
    }

    pub fn petersen() -> Graph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edges(10, &edges).expect("petersen")
    }

    /// Circulant graph on `n` vertices: `i ~ j` iff `j - i ≡ ±s (mod n)` for
    /// some `s` in `connection`.
    pub fn circulant(n: usize, connection: &[usize]) -> Graph {
        let mut g = Graph::new(n);
        for i in 0..n {
            for &s in connection {
                let j = (i + s) % n;
                if j != i {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv1a_reference_vectors() {
        let h = |s: &str| {
            let mut f = Fnv1a::new();
            f.update(s.as_bytes());
            f.finish()
        };
        assert_eq!(h(""), 0xcbf29ce484222325);
        assert_eq!(h("a"), 0xaf63dc4c8601ec8c);
        assert_eq!(h("foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn digest_depends_only_on_edge_set() {
        let a = Graph::from_edges(5, &[(0, 1), (3, 2), (1, 4)]).unwrap();
        let b = Graph::from_edges(5, &[(4, 1), (2, 3), (1, 0)]).unwrap();
        assert_eq!(a.digest(), b.digest());
        let mut f = Fnv1a::new();
        f.update(b"0 1\n1 4\n2 3\n");
        assert_eq!(a.digest(), f.finish());
    }

    #[test]
    fn edge_list_round_trip_is_sorted() {
        let g = Graph::from_edges(6, &[(5, 0), (2, 1), (0, 3)]).unwrap();
        let s = g.to_edge_list_string();
        assert_eq!(s, "n 6\n0 3\n0 5\n1 2\n");
        let h = Graph::read_edge_list(s.as_bytes()).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = Graph::read_edge_list("n 4\n0 1\n2 x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = Graph::read_edge_list("n 4\n0 1\n\n3 3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");
        let err = Graph::read_edge_list("0 1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        let err = Graph::read_edge_list("n 3\n0 7\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn triangles() {
        assert_eq!(named::complete(3).find_triangle(), Some((0, 1, 2)));
        assert!(named::cycle(5).is_triangle_free());
        assert!(named::petersen().is_triangle_free());
        assert!(named::circulant(13, &[1, 5]).is_triangle_free());
        assert_eq!(named::circulant(13, &[1, 5]).max_degree(), 4);
    }

    #[test]
    fn bit_iteration_crosses_word_boundaries() {
        let mut g = Graph::new(130);
        for v in [1, 63, 64, 65, 127, 128, 129] {
            g.add_edge(0, v);
        }
        let got: Vec<_> = g.neighbors(0).collect();
        assert_eq!(got, vec![1, 63, 64, 65, 127, 128, 129]);
        assert_eq!(g.degree(0), 7);
        assert!(g.remove_edge(64, 0));
        assert!(!g.remove_edge(64, 0));
        assert_eq!(g.edge_count(), 6);
    }
}
