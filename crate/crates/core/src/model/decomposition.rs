use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::bipartite::BipartiteGraph;
use super::bitset::BitSet;
use super::hypergraph::Hypergraph3;
use super::triad::{TriadAddress, TriadView};
use crate::error::{Error, Result};

/// A `(t, ℓ)`-decomposition: vertex parts `V_1..V_t` and, for every class
/// pair `i < j`, a list of pair parts `P_ij^α` partitioning `K2[V_i, V_j]`.
///
/// Pairs inside a part are stored as `(x, y)` with `x ∈ V_i`, `y ∈ V_j`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Decomposition {
    pub vertex_parts: Vec<Vec<u32>>,
    pub pair_parts: BTreeMap<(usize, usize), Vec<Vec<(u32, u32)>>>,
}

#[derive(Serialize, Deserialize)]
struct DecompositionDoc {
    vertex_parts: Vec<Vec<u32>>,
    pair_parts: BTreeMap<String, Vec<Vec<[u32; 2]>>>,
}

impl Decomposition {
    pub fn t(&self) -> usize {
        self.vertex_parts.len()
    }

    /// Nominal ℓ: the largest number of pair parts over all class pairs.
    pub fn ell(&self) -> usize {
        self.pair_parts.values().map(Vec::len).max().unwrap_or(0)
    }

    pub fn ell_of(&self, i: usize, j: usize) -> usize {
        self.pair_parts.get(&(i, j)).map_or(0, Vec::len)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_parts.iter().map(Vec::len).sum()
    }

    /// Builds pair parts from row-major label tables: for class pair `(i, j)`,
    /// `labels[a * |V_j| + b]` is the part of `(V_i[a], V_j[b])`.
    pub fn from_labels(
        vertex_parts: Vec<Vec<u32>>,
        labels: &BTreeMap<(usize, usize), (usize, Vec<u32>)>,
    ) -> Result<Self> {
        let mut pair_parts = BTreeMap::new();
        for (&(i, j), (ell, table)) in labels {
            let (vi, vj) = (&vertex_parts[i], &vertex_parts[j]);
            if table.len() != vi.len() * vj.len() {
                return Err(Error::InvalidDecomposition(format!("label table for ({i},{j}) has wrong size")));
            }
            let mut parts = vec![Vec::new(); *ell];
            for (k, &lab) in table.iter().enumerate() {
                let part = parts
                    .get_mut(lab as usize)
                    .ok_or_else(|| Error::InvalidDecomposition(format!("label {lab} >= ℓ_{{{i},{j}}} = {ell}")))?;
                part.push((vi[k / vj.len()], vj[k % vj.len()]));
            }
            pair_parts.insert((i, j), parts);
        }
        Ok(Decomposition { vertex_parts, pair_parts })
    }

    /// The canonical JSON document (sorted keys, class pairs keyed `"i,j"`).
    pub fn to_json(&self) -> String {
        let doc = DecompositionDoc {
            vertex_parts: self.vertex_parts.clone(),
            pair_parts: self
                .pair_parts
                .iter()
                .map(|(&(i, j), parts)| {
                    (format!("{i},{j}"), parts.iter().map(|p| p.iter().map(|&(x, y)| [x, y]).collect()).collect())
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("decomposition serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DecompositionDoc = serde_json::from_str(text)?;
        let mut pair_parts = BTreeMap::new();
        for (key, parts) in doc.pair_parts {
            let bad = || Error::InvalidDecomposition(format!("bad class-pair key {key:?}, expected \"i,j\""));
            let (a, b) = key.split_once(',').ok_or_else(bad)?;
            let i: usize = a.trim().parse().map_err(|_| bad())?;
            let j: usize = b.trim().parse().map_err(|_| bad())?;
            let parts = parts.into_iter().map(|p| p.into_iter().map(|[x, y]| (x, y)).collect()).collect();
            if pair_parts.insert((i, j), parts).is_some() {
                return Err(Error::InvalidDecomposition(format!("duplicate class pair {key:?}")));
            }
        }
        Ok(Decomposition { vertex_parts: doc.vertex_parts, pair_parts })
    }

    /// Structural validation against a vertex set `0..n`.
    pub fn validate(&self, n: usize) -> ValidationReport {
        let mut rep = ValidationReport::default();
        let t = self.t();
        let mut part_of = vec![u32::MAX; n];
        for (p, part) in self.vertex_parts.iter().enumerate() {
            if part.is_empty() {
                rep.warn(ViolationKind::EmptyPart, format!("V_{p}"), "vertex part is empty".into());
            }
            for &v in part {
                if v as usize >= n {
                    rep.violate(ViolationKind::VertexOutOfRange, format!("V_{p}"), format!("vertex {v} >= n = {n}"));
                } else if part_of[v as usize] != u32::MAX {
                    rep.violate(
                        ViolationKind::VertexOverlap,
                        format!("V_{p}"),
                        format!("vertex {v} already in V_{}", part_of[v as usize]),
                    );
                } else {
                    part_of[v as usize] = p as u32;
                }
            }
        }
        for (v, &p) in part_of.iter().enumerate() {
            if p == u32::MAX {
                rep.violate(ViolationKind::VertexUncovered, format!("vertex {v}"), "vertex is in no part".into());
            }
        }
        for &(i, j) in self.pair_parts.keys() {
            if !(i < j && j < t) {
                rep.violate(
                    ViolationKind::BadClassPair,
                    format!("({i},{j})"),
                    format!("class pair must satisfy i < j < t = {t}"),
                );
            }
        }
        for i in 0..t {
            for j in i + 1..t {
                let Some(parts) = self.pair_parts.get(&(i, j)) else {
                    rep.violate(ViolationKind::MissingClassPair, format!("({i},{j})"), "no pair parts given".into());
                    continue;
                };
                self.validate_class(i, j, parts, &part_of, &mut rep);
            }
        }
        rep.ok = rep.violations.is_empty();
        rep
    }

    fn validate_class(
        &self,
        i: usize,
        j: usize,
        parts: &[Vec<(u32, u32)>],
        part_of: &[u32],
        rep: &mut ValidationReport,
    ) {
        let loc = format!("({i},{j})");
        let mut seen: HashSet<(u32, u32)> = HashSet::new();
        let mut overlaps = 0usize;
        let mut first_overlap = None;
        let mut foreign = 0usize;
        let mut first_foreign = None;
        for (alpha, part) in parts.iter().enumerate() {
            if part.is_empty() {
                rep.warn(ViolationKind::EmptyPart, format!("P_{i},{j}^{alpha}"), "pair part is empty".into());
            }
            for &(x, y) in part {
                let ok = part_of.get(x as usize) == Some(&(i as u32)) && part_of.get(y as usize) == Some(&(j as u32));
                if !ok {
                    foreign += 1;
                    first_foreign.get_or_insert((alpha, x, y));
                    continue;
                }
                if !seen.insert((x, y)) {
                    overlaps += 1;
                    first_overlap.get_or_insert((alpha, x, y));
                }
            }
        }
        if let Some((alpha, x, y)) = first_foreign {
            rep.violate(
                ViolationKind::ForeignPair,
                loc.clone(),
                format!("{foreign} pair(s) not in K2[V_{i},V_{j}], first ({x},{y}) in part {alpha}"),
            );
        }
        if let Some((alpha, x, y)) = first_overlap {
            rep.violate(
                ViolationKind::Overlap,
                loc.clone(),
                format!("overlap at ({i},{j}): {overlaps} repeated pair(s), first ({x},{y}) in part {alpha}"),
            );
        }
        let full = self.vertex_parts[i].len() * self.vertex_parts[j].len();
        if seen.len() < full {
            rep.violate(
                ViolationKind::Uncovered,
                loc,
                format!("{} of {full} pairs of K2[V_{i},V_{j}] are in no part", full - seen.len()),
            );
        }
    }

    /// Whether vertex part sizes differ by at most one.
    pub fn is_equipartition(&self) -> bool {
        let sizes = self.vertex_parts.iter().map(Vec::len);
        match (sizes.clone().min(), sizes.max()) {
            (Some(lo), Some(hi)) => hi - lo <= 1,
            _ => true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    VertexOutOfRange,
    VertexOverlap,
    VertexUncovered,
    BadClassPair,
    MissingClassPair,
    ForeignPair,
    Overlap,
    Uncovered,
    EmptyPart,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub location: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
    pub warnings: Vec<Violation>,
}

impl ValidationReport {
    fn violate(&mut self, kind: ViolationKind, location: String, detail: String) {
        self.violations.push(Violation { kind, location, detail });
    }

    fn warn(&mut self, kind: ViolationKind, location: String, detail: String) {
        self.warnings.push(Violation { kind, location, detail });
    }
}

pub fn validate_decomposition(h: &Hypergraph3, p: &Decomposition) -> ValidationReport {
    p.validate(h.n())
}

/// Positional index of one class pair `(i, j)`: the part label of every cross
/// pair and each part as a bipartite graph on `(V_i, V_j)`.
#[derive(Clone, Debug)]
pub struct PairClass {
    pub i: usize,
    pub j: usize,
    pub rows: usize,
    pub cols: usize,
    pub labels: Vec<u32>,
    pub graphs: Vec<BipartiteGraph>,
}

impl PairClass {
    pub fn ell(&self) -> usize {
        self.graphs.len()
    }

    #[inline]
    pub fn label(&self, a: usize, b: usize) -> u32 {
        self.labels[a * self.cols + b]
    }
}

/// Lookup structure over a validated decomposition.
#[derive(Clone, Debug)]
pub struct DecompositionIndex {
    t: usize,
    parts: Vec<Vec<u32>>,
    part_of: Vec<u32>,
    pos: Vec<u32>,
    classes: Vec<Option<PairClass>>,
}

impl DecompositionIndex {
    pub fn new(p: &Decomposition, n: usize) -> Result<Self> {
        let rep = p.validate(n);
        if !rep.ok {
            let first = &rep.violations[0];
            return Err(Error::InvalidDecomposition(format!(
                "{} violation(s); first at {}: {}",
                rep.violations.len(),
                first.location,
                first.detail
            )));
        }
        let t = p.t();
        let mut part_of = vec![0u32; n];
        let mut pos = vec![0u32; n];
        for (pi, part) in p.vertex_parts.iter().enumerate() {
            for (k, &v) in part.iter().enumerate() {
                part_of[v as usize] = pi as u32;
                pos[v as usize] = k as u32;
            }
        }
        let mut classes = vec![None; t * t];
        for (&(i, j), parts) in &p.pair_parts {
            let rows = p.vertex_parts[i].len();
            let cols = p.vertex_parts[j].len();
            let mut labels = vec![0u32; rows * cols];
            let mut bits = vec![vec![BitSet::new(cols); rows]; parts.len()];
            for (alpha, part) in parts.iter().enumerate() {
                for &(x, y) in part {
                    let (a, b) = (pos[x as usize] as usize, pos[y as usize] as usize);
                    labels[a * cols + b] = alpha as u32;
                    bits[alpha][a].insert(b);
                }
            }
            let graphs = bits
                .into_iter()
                .map(|rows| {
                    BipartiteGraph::from_rows_unchecked(p.vertex_parts[i].clone(), p.vertex_parts[j].clone(), rows)
                })
                .collect();
            classes[i * t + j] = Some(PairClass { i, j, rows, cols, labels, graphs });
        }
        Ok(DecompositionIndex { t, parts: p.vertex_parts.clone(), part_of, pos, classes })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn n(&self) -> usize {
        self.part_of.len()
    }

    pub fn parts(&self) -> &[Vec<u32>] {
        &self.parts
    }

    pub fn part_of(&self, v: u32) -> usize {
        self.part_of[v as usize] as usize
    }

    pub fn position(&self, v: u32) -> usize {
        self.pos[v as usize] as usize
    }

    /// The class pair `(i, j)` with `i < j`.
    pub fn class(&self, i: usize, j: usize) -> &PairClass {
        debug_assert!(i < j);
        self.classes[i * self.t + j].as_ref().expect("validated decomposition covers every class pair")
    }

    pub fn ell_of(&self, i: usize, j: usize) -> usize {
        self.class(i, j).ell()
    }

    /// Part label of the cross pair `{x, y}` and its class pair, or `None`
    /// when both lie in one part.
    pub fn pair_label(&self, x: u32, y: u32) -> Option<((usize, usize), u32)> {
        let (px, py) = (self.part_of(x), self.part_of(y));
        if px == py {
            return None;
        }
        let (i, j, a, b) = if px < py { (px, py, x, y) } else { (py, px, y, x) };
        let c = self.class(i, j);
        Some(((i, j), c.label(self.position(a), self.position(b))))
    }

    /// The triad `G^{ijs}_{αβγ}` with `i < j < s`, `α` indexing `P_ij`, `β`
    /// indexing `P_is` and `γ` indexing `P_js`.
    pub fn triad(&self, addr: TriadAddress) -> TriadView<'_> {
        let TriadAddress { i, j, s, alpha, beta, gamma } = addr;
        TriadView {
            parts: [&self.parts[i], &self.parts[j], &self.parts[s]],
            g01: &self.class(i, j).graphs[alpha],
            g02: &self.class(i, s).graphs[beta],
            g12: &self.class(j, s).graphs[gamma],
        }
    }

    /// All triad addresses in lexicographic order.
    pub fn triad_addresses(&self) -> Vec<TriadAddress> {
        let mut out = Vec::new();
        let t = self.t;
        for i in 0..t {
            for j in i + 1..t {
                for s in j + 1..t {
                    for alpha in 0..self.ell_of(i, j) {
                        for beta in 0..self.ell_of(i, s) {
                            for gamma in 0..self.ell_of(j, s) {
                                out.push(TriadAddress { i, j, s, alpha, beta, gamma });
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Number of vertex triples meeting three distinct parts.
    pub fn cross_triples(&self) -> u128 {
        let sizes: Vec<u128> = self.parts.iter().map(|p| p.len() as u128).collect();
        let mut total = 0u128;
        for i in 0..self.t {
            for j in i + 1..self.t {
                for s in j + 1..self.t {
                    total += sizes[i] * sizes[j] * sizes[s];
                }
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full(t: usize, size: usize) -> Decomposition {
        let vertex_parts: Vec<Vec<u32>> =
            (0..t).map(|p| ((p * size) as u32..((p + 1) * size) as u32).collect()).collect();
        let mut pair_parts = BTreeMap::new();
        for i in 0..t {
            for j in i + 1..t {
                let mut all = Vec::new();
                for &x in &vertex_parts[i] {
                    for &y in &vertex_parts[j] {
                        all.push((x, y));
                    }
                }
                pair_parts.insert((i, j), vec![all]);
            }
        }
        Decomposition { vertex_parts, pair_parts }
    }

    #[test]
    fn trivial_decomposition_validates() {
        let p = full(2, 3);
        let rep = p.validate(6);
        assert!(rep.ok, "{rep:?}");
        assert_eq!(p.ell(), 1);
    }

    #[test]
    fn overlap_is_reported() {
        let mut p = full(2, 2);
        let parts = p.pair_parts.get_mut(&(0, 1)).unwrap();
        let dup = parts[0][0];
        parts.push(vec![dup]);
        let rep = p.validate(4);
        assert!(!rep.ok);
        assert_eq!(rep.violations.len(), 1);
        assert_eq!(rep.violations[0].kind, ViolationKind::Overlap);
        assert!(rep.violations[0].detail.starts_with("overlap at (0,1)"));
    }

    #[test]
    fn missing_and_foreign_pairs() {
        let mut p = full(3, 2);
        p.pair_parts.get_mut(&(0, 1)).unwrap()[0].pop();
        p.pair_parts.get_mut(&(0, 2)).unwrap()[0].push((0, 1));
        p.vertex_parts[2].push(99);
        let rep = p.validate(6);
        let kinds: Vec<_> = rep.violations.iter().map(|v| v.kind).collect();
        assert!(kinds.contains(&ViolationKind::Uncovered));
        assert!(kinds.contains(&ViolationKind::ForeignPair));
        assert!(kinds.contains(&ViolationKind::VertexOutOfRange));
    }

    #[test]
    fn json_round_trip() {
        let p = full(3, 2);
        let back = Decomposition::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
        assert!(Decomposition::from_json("{\"vertex_parts\": [[0]], \"pair_parts\": {\"x\": []}}").is_err());
    }

    #[test]
    fn index_addresses_triads() {
        let p = full(4, 2);
        let idx = DecompositionIndex::new(&p, 8).unwrap();
        assert_eq!(idx.triad_addresses().len(), 4);
        assert_eq!(idx.cross_triples(), 32);
        assert_eq!(idx.pair_label(7, 0), Some(((0, 3), 0)));
        assert_eq!(idx.pair_label(0, 1), None);
    }
}
