use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};

const KEY_BITS: u32 = 21;

/// A 3-uniform hypergraph on vertices `0..n`.
///
/// Triples are stored sorted and deduplicated, with a hash set of packed keys
/// for constant-time membership.
#[derive(Clone, Debug)]
pub struct Hypergraph3 {
    n: usize,
    edges: Vec<[u32; 3]>,
    keys: HashSet<u64>,
}

impl PartialEq for Hypergraph3 {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl Eq for Hypergraph3 {}

#[inline]
fn sort3(a: u32, b: u32, c: u32) -> [u32; 3] {
    let mut t = [a, b, c];
    t.sort_unstable();
    t
}

#[inline]
fn key(t: [u32; 3]) -> u64 {
    ((t[0] as u64) << (2 * KEY_BITS)) | ((t[1] as u64) << KEY_BITS) | t[2] as u64
}

impl Hypergraph3 {
    pub fn empty(n: usize) -> Self {
        Hypergraph3 { n, edges: Vec::new(), keys: HashSet::new() }
    }

    /// Builds a hypergraph from arbitrary-order triples, rejecting repeated
    /// vertices and out-of-range indices. Duplicate triples collapse.
    pub fn from_triples<I>(n: usize, triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32, u32)>,
    {
        if n >= 1 << KEY_BITS {
            return Err(Error::TooLarge(format!("n = {n} exceeds {}", 1u64 << KEY_BITS)));
        }
        let mut edges = Vec::new();
        for (a, b, c) in triples {
            for v in [a, b, c] {
                if v as usize >= n {
                    return Err(Error::VertexOutOfRange { vertex: v as u64, n });
                }
            }
            if a == b || b == c || a == c {
                return Err(Error::NonDistinctTriple(a, b, c));
            }
            edges.push(sort3(a, b, c));
        }
        edges.sort_unstable();
        edges.dedup();
        let keys = edges.iter().map(|&t| key(t)).collect();
        Ok(Hypergraph3 { n, edges, keys })
    }

    /// The complete 3-graph on `n` vertices.
    pub fn complete(n: usize) -> Self {
        let mut t = Vec::new();
        for a in 0..n as u32 {
            for b in a + 1..n as u32 {
                for c in b + 1..n as u32 {
                    t.push((a, b, c));
                }
            }
        }
        Self::from_triples(n, t).expect("complete triples are valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[[u32; 3]] {
        &self.edges
    }

    #[inline]
    pub fn contains(&self, a: u32, b: u32, c: u32) -> bool {
        if a == b || b == c || a == c {
            return false;
        }
        self.keys.contains(&key(sort3(a, b, c)))
    }

    /// Parses the text format: a header `n=<int>` followed by one triple per
    /// line. `;` also separates records and `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut triples = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            for record in line.split(';') {
                let record = record.trim();
                if record.is_empty() {
                    continue;
                }
                let err = |message: String| Error::Parse { line: lineno + 1, message };
                if let Some(rest) = record.strip_prefix("n=").or_else(|| record.strip_prefix("n =")) {
                    if n.is_some() {
                        return Err(err("duplicate header".into()));
                    }
                    n = Some(rest.trim().parse().map_err(|_| err(format!("bad vertex count {rest:?}")))?);
                    continue;
                }
                if n.is_none() {
                    return Err(err("missing header `n=<int>` before triples".into()));
                }
                let fields: Vec<&str> = record.split_whitespace().collect();
                if fields.len() != 3 {
                    return Err(err(format!("expected 3 integers, found {:?}", record)));
                }
                let mut v = [0u64; 3];
                for (slot, f) in v.iter_mut().zip(&fields) {
                    *slot = f.parse().map_err(|_| err(format!("bad integer {f:?}")))?;
                }
                let nn = n.unwrap();
                for &x in &v {
                    if x as usize >= nn {
                        return Err(Error::VertexOutOfRange { vertex: x, n: nn });
                    }
                }
                triples.push((v[0] as u32, v[1] as u32, v[2] as u32));
            }
        }
        let n = n.ok_or(Error::Parse { line: 0, message: "missing header `n=<int>`".into() })?;
        Self::from_triples(n, triples)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(16 + self.edges.len() * 12);
        let _ = writeln!(s, "n={}", self.n);
        for t in &self.edges {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_inline_records() {
        let h = Hypergraph3::parse("n=4; 0 1 2; 0 1 3").unwrap();
        assert_eq!(h.edge_count(), 2);
        assert!(h.contains(2, 0, 1));
        assert!(!h.contains(1, 2, 3));
    }

    #[test]
    fn rejects_bad_documents() {
        assert_eq!(
            Hypergraph3::parse("n=3; 0 0 1").unwrap_err(),
            Error::NonDistinctTriple(0, 0, 1)
        );
        assert!(matches!(Hypergraph3::parse("n=3\n0 1 3"), Err(Error::VertexOutOfRange { .. })));
        assert!(matches!(Hypergraph3::parse("0 1 2"), Err(Error::Parse { .. })));
        assert!(matches!(Hypergraph3::parse("n=5\n0 1"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(Hypergraph3::parse("n=x"), Err(Error::Parse { .. })));
    }

    #[test]
    fn dedups_and_sorts() {
        let h = Hypergraph3::from_triples(5, [(3, 1, 2), (1, 2, 3), (0, 4, 1)]).unwrap();
        assert_eq!(h.edges(), &[[0, 1, 4], [1, 2, 3]]);
        assert_eq!(Hypergraph3::parse(&h.to_text()).unwrap(), h);
    }

    #[test]
    fn small_n_is_edgeless() {
        let h = Hypergraph3::parse("n=2\n").unwrap();
        assert_eq!(h.edge_count(), 0);
        assert_eq!(Hypergraph3::complete(2).edge_count(), 0);
        assert_eq!(Hypergraph3::complete(6).edge_count(), 20);
    }
}
