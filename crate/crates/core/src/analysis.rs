//! Decomposition-level measurements: equitability, triad classification into
//! F₀/F₁/F_err, the per-pair auxiliary edge-colored graphs `H_ij`, the bad
//! pair set Ψ, troublesome part triples and homogeneity reports.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::exact::{int, ratio, Rational};
use crate::model::{
    Color, Decomposition, DecompositionIndex, EdgeColoredBipartiteGraph, EdgeColoredTripartite3Graph, Hypergraph3,
    TriadAddress,
};
use crate::quasirandom::dev23::dev23_with_pairs;
use crate::quasirandom::{dev2, Dev23Result, Dev2Result, EvalMode};

/// `"i,j"`, the key used for class pairs in serialized maps.
pub fn pair_key(i: usize, j: usize) -> String {
    format!("{i},{j}")
}

/// dev₂ statistics of every pair part, keyed by class pair.
pub type PartTable = BTreeMap<(usize, usize), Vec<Dev2Result>>;

pub fn pair_part_stats(idx: &DecompositionIndex) -> Result<PartTable> {
    let t = idx.t();
    let jobs: Vec<(usize, usize, usize)> = (0..t)
        .flat_map(|i| (i + 1..t).flat_map(move |j| (0..idx.ell_of(i, j)).map(move |a| (i, j, a))))
        .collect();
    let stats: Vec<Dev2Result> =
        jobs.par_iter().map(|&(i, j, a)| dev2(&idx.class(i, j).graphs[a], EvalMode::Fast)).collect::<Result<_>>()?;
    let mut out: PartTable = BTreeMap::new();
    for (&(i, j, _), s) in jobs.iter().zip(stats) {
        out.entry((i, j)).or_default().push(s);
    }
    Ok(out)
}

/// Quasirandomness flag of every pair part: dev₂(ε₂, 1/ℓ) with `ℓ` the
/// nominal part count.
pub fn quasirandom_parts(parts: &PartTable, eps2: &Rational, ell: usize) -> BTreeMap<(usize, usize), Vec<bool>> {
    let d = ratio(1, ell.max(1) as u64);
    parts.iter().map(|(&k, v)| (k, v.iter().map(|r| r.satisfies(eps2, &d)).collect())).collect()
}

/// Per-part row of an equitability report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartRow {
    pub i: usize,
    pub j: usize,
    pub alpha: usize,
    pub pairs: u64,
    #[serde(with = "crate::model::exact::serde_rational")]
    pub density: Rational,
    #[serde(with = "crate::model::exact::serde_rational")]
    pub normalized: Rational,
    pub quasirandom: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquitabilityReport {
    pub t: usize,
    pub ell: usize,
    #[serde(with = "crate::model::exact::serde_rational")]
    pub eps1: Rational,
    #[serde(with = "crate::model::exact::serde_rational")]
    pub eps2: Rational,
    pub equipartition: bool,
    pub min_part: usize,
    pub max_part: usize,
    /// Pairs lying in a quasirandom pair part.
    pub good_pairs: u64,
    pub cross_pairs: u64,
    /// `n choose 2`.
    pub all_pairs: u64,
    /// `good_pairs / all_pairs`.
    #[serde(with = "crate::model::exact::serde_rational")]
    pub good_fraction: Rational,
    /// The (t, ℓ, ε₁, ε₂)-decomposition predicate, over all `n choose 2` pairs.
    pub predicate: bool,
    /// The same predicate with the cross pairs as denominator.
    pub predicate_cross: bool,
    pub parts: Vec<PartRow>,
}

pub fn equitability_check(p: &Decomposition, n: usize, eps1: &Rational, eps2: &Rational) -> Result<EquitabilityReport> {
    let idx = DecompositionIndex::new(p, n)?;
    let parts = pair_part_stats(&idx)?;
    Ok(equitability_from_stats(&idx, &parts, eps1, eps2))
}

pub fn equitability_from_stats(
    idx: &DecompositionIndex,
    parts: &PartTable,
    eps1: &Rational,
    eps2: &Rational,
) -> EquitabilityReport {
    let ell = parts.values().map(Vec::len).max().unwrap_or(0);
    let qr = quasirandom_parts(parts, eps2, ell);
    let sizes: Vec<usize> = idx.parts().iter().map(Vec::len).collect();
    let (min_part, max_part) = (sizes.iter().copied().min().unwrap_or(0), sizes.iter().copied().max().unwrap_or(0));
    let mut rows = Vec::new();
    let mut good = 0u64;
    let mut cross = 0u64;
    for (&(i, j), stats) in parts {
        for (alpha, s) in stats.iter().enumerate() {
            let ok = qr[&(i, j)][alpha];
            cross += s.edges;
            if ok {
                good += s.edges;
            }
            rows.push(PartRow {
                i,
                j,
                alpha,
                pairs: s.edges,
                density: s.density.clone(),
                normalized: s.normalized.clone(),
                quasirandom: ok,
            });
        }
    }
    let n = idx.n() as u64;
    let all_pairs = n * n.saturating_sub(1) / 2;
    let good_fraction = if all_pairs == 0 { int(1) } else { ratio(good, all_pairs) };
    let equipartition = max_part - min_part <= 1;
    let predicate = equipartition && int(good) >= (int(1) - eps1) * int(all_pairs);
    let predicate_cross = equipartition && int(good) >= (int(1) - eps1) * int(cross);
    EquitabilityReport {
        t: idx.t(),
        ell,
        eps1: eps1.clone(),
        eps2: eps2.clone(),
        equipartition,
        min_part,
        max_part,
        good_pairs: good,
        cross_pairs: cross,
        all_pairs,
        good_fraction,
        predicate,
        predicate_cross,
        parts: rows,
    }
}

/// Per-triad dev₂,₃ measurements, computed once and shared by the reports.
#[derive(Clone, Debug)]
pub struct TriadMetrics {
    pub parts: PartTable,
    pub addresses: Vec<TriadAddress>,
    pub triads: Vec<Dev23Result>,
    pub t: usize,
    pub ell: usize,
    pub n: usize,
}

pub fn measure_triads(h: &Hypergraph3, idx: &DecompositionIndex) -> Result<TriadMetrics> {
    let parts = pair_part_stats(idx)?;
    let addresses = idx.triad_addresses();
    let triads: Vec<Dev23Result> = addresses
        .par_iter()
        .map(|&a| {
            let pairs = [
                parts[&(a.i, a.j)][a.alpha].clone(),
                parts[&(a.i, a.s)][a.beta].clone(),
                parts[&(a.j, a.s)][a.gamma].clone(),
            ];
            dev23_with_pairs(h, &idx.triad(a), EvalMode::Fast, Some(pairs))
        })
        .collect();
    let ell = parts.values().map(Vec::len).max().unwrap_or(0);
    Ok(TriadMetrics { parts, addresses, triads, t: idx.t(), ell, n: idx.n() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TriadLabel {
    F0,
    F1,
    Ferr,
}

impl TriadLabel {
    /// Color of the label in the auxiliary graphs: F₁ → 1, F₀ → 0, F_err → 2.
    pub fn color(self) -> Color {
        match self {
            TriadLabel::F0 => Color::Zero,
            TriadLabel::F1 => Color::One,
            TriadLabel::Ferr => Color::Two,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifiedTriad {
    pub address: TriadAddress,
    pub label: TriadLabel,
    #[serde(with = "crate::model::exact::serde_rational")]
    pub density: Rational,
    pub regular: bool,
    pub triangles: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCounts {
    pub f0: usize,
    pub f1: usize,
    pub ferr: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriadClassification {
    pub t: usize,
    pub ell: usize,
    #[serde(with = "crate::model::exact::serde_rational")]
    pub eps1: Rational,
    #[serde(with = "crate::model::exact::serde_rational")]
    pub eps2: Rational,
    #[serde(with = "crate::model::exact::serde_rational")]
    pub f_val: Rational,
    pub counts: LabelCounts,
    /// Regular triads whose density lies strictly between `f_val` and `1 - f_val`.
    pub mid_density_regular: usize,
    pub triads: Vec<ClassifiedTriad>,
    #[serde(skip)]
    lookup: HashMap<TriadAddress, usize>,
}

impl TriadClassification {
    pub fn get(&self, a: &TriadAddress) -> Option<&ClassifiedTriad> {
        self.lookup.get(a).map(|&k| &self.triads[k])
    }

    pub fn label(&self, a: &TriadAddress) -> Option<TriadLabel> {
        self.get(a).map(|c| c.label)
    }

    fn reindex(&mut self) {
        self.lookup = self.triads.iter().enumerate().map(|(k, c)| (c.address, k)).collect();
    }
}

pub fn classify_triads(
    h: &Hypergraph3,
    p: &Decomposition,
    eps1: &Rational,
    eps2: &Rational,
    f_val: &Rational,
) -> Result<TriadClassification> {
    let idx = DecompositionIndex::new(p, h.n())?;
    let m = measure_triads(h, &idx)?;
    Ok(classify_from_metrics(&m, eps1, eps2, f_val))
}

/// F_err unless the triad has dev₂,₃(ε₁, ε₂); otherwise F₁ when the density
/// is at least `1 - f_val`, F₀ when at most `f_val`, and F_err (counted as
/// mid-density) in between.
pub fn classify_from_metrics(m: &TriadMetrics, eps1: &Rational, eps2: &Rational, f_val: &Rational) -> TriadClassification {
    let hi = int(1) - f_val;
    let triads: Vec<(ClassifiedTriad, bool)> = m
        .addresses
        .par_iter()
        .zip(m.triads.par_iter())
        .map(|(&address, r)| {
            let regular = r.is_regular(eps1, eps2, None);
            let (label, mid) = if !regular {
                (TriadLabel::Ferr, false)
            } else if r.d3 >= hi {
                (TriadLabel::F1, false)
            } else if r.d3 <= *f_val {
                (TriadLabel::F0, false)
            } else {
                (TriadLabel::Ferr, true)
            };
            (ClassifiedTriad { address, label, density: r.d3.clone(), regular, triangles: r.triangles }, mid)
        })
        .collect();
    let mut counts = LabelCounts::default();
    let mut mid_density_regular = 0;
    for (c, mid) in &triads {
        match c.label {
            TriadLabel::F0 => counts.f0 += 1,
            TriadLabel::F1 => counts.f1 += 1,
            TriadLabel::Ferr => counts.ferr += 1,
        }
        mid_density_regular += usize::from(*mid);
    }
    let mut out = TriadClassification {
        t: m.t,
        ell: m.ell,
        eps1: eps1.clone(),
        eps2: eps2.clone(),
        f_val: f_val.clone(),
        counts,
        mid_density_regular,
        triads: triads.into_iter().map(|(c, _)| c).collect(),
        lookup: HashMap::new(),
    };
    out.reindex();
    out
}

/// Address of the triad on classes `{i, j, s}` using part `pij` of the pair
/// `{i, j}`, `pis` of `{i, s}` and `pjs` of `{j, s}`, for distinct classes in
/// any order.
pub fn triad_address_of(i: usize, j: usize, s: usize, pij: usize, pis: usize, pjs: usize) -> TriadAddress {
    let mut v = [(i, 0usize), (j, 1), (s, 2)];
    v.sort_unstable();
    // Part of the pair formed by two of the original roles.
    let part = |a: usize, b: usize| match (a.min(b), a.max(b)) {
        (0, 1) => pij,
        (0, 2) => pis,
        _ => pjs,
    };
    TriadAddress {
        i: v[0].0,
        j: v[1].0,
        s: v[2].0,
        alpha: part(v[0].1, v[1].1),
        beta: part(v[0].1, v[2].1),
        gamma: part(v[1].1, v[2].1),
    }
}

/// A corner `P_is^β P_js^γ` on the right side of `H_ij`. `beta` indexes the
/// parts of the class pair `{i, s}` and `gamma` those of `{j, s}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Corner {
    pub s: usize,
    pub beta: usize,
    pub gamma: usize,
}

/// The edge-colored graph `H_ij`: left vertices are the quasirandom parts
/// `W_ij`, right vertices the corners `U_ij` with both parts quasirandom,
/// colored by the label of the triad they span.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxGraph {
    pub i: usize,
    pub j: usize,
    pub graph: EdgeColoredBipartiteGraph,
    /// Part index of each left vertex.
    pub left_parts: Vec<usize>,
    pub corners: Vec<Corner>,
    /// Parts of `{i, j}` that are not quasirandom, in index order.
    pub excluded_parts: Vec<usize>,
}

impl AuxGraph {
    pub fn address(&self, left: usize, right: usize) -> TriadAddress {
        let c = self.corners[right];
        triad_address_of(self.i, self.j, c.s, self.left_parts[left], c.beta, c.gamma)
    }
}

fn qr_of(qr: &BTreeMap<(usize, usize), Vec<bool>>, a: usize, b: usize) -> Result<&Vec<bool>> {
    qr.get(&(a.min(b), a.max(b)))
        .ok_or_else(|| Error::InvalidDecomposition(format!("no pair parts for class pair ({},{})", a.min(b), a.max(b))))
}

/// Builds `H_ij`. Left vertices are the quasirandom parts in index order (a
/// stable sort on the pass flag puts them first); every other part is listed
/// in `excluded_parts`.
pub fn build_aux_graph(
    classification: &TriadClassification,
    qr: &BTreeMap<(usize, usize), Vec<bool>>,
    i: usize,
    j: usize,
) -> Result<AuxGraph> {
    let (i, j) = (i.min(j), i.max(j));
    let flags = qr_of(qr, i, j)?;
    if flags.is_empty() {
        return Err(Error::InvalidDecomposition(format!("class pair ({i},{j}) has no pair parts")));
    }
    let left_parts: Vec<usize> = (0..flags.len()).filter(|&a| flags[a]).collect();
    let excluded_parts: Vec<usize> = (0..flags.len()).filter(|&a| !flags[a]).collect();
    let mut corners = Vec::new();
    for s in (0..classification.t).filter(|&s| s != i && s != j) {
        let (fis, fjs) = (qr_of(qr, i, s)?, qr_of(qr, j, s)?);
        for beta in (0..fis.len()).filter(|&b| fis[b]) {
            for gamma in (0..fjs.len()).filter(|&c| fjs[c]) {
                corners.push(Corner { s, beta, gamma });
            }
        }
    }
    let mut graph = EdgeColoredBipartiteGraph::new(
        left_parts.iter().map(|&a| a as u32).collect(),
        (0..corners.len() as u32).collect(),
    );
    for (l, &alpha) in left_parts.iter().enumerate() {
        for (r, c) in corners.iter().enumerate() {
            let addr = triad_address_of(i, j, c.s, alpha, c.beta, c.gamma);
            let label = classification
                .label(&addr)
                .ok_or_else(|| Error::InvalidDecomposition(format!("triad {addr:?} missing from classification")))?;
            graph.set(l, r, label.color());
        }
    }
    Ok(AuxGraph { i, j, graph, left_parts, corners, excluded_parts })
}

/// The bad pair set Ψ with the F_err count of every class pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiReport {
    pub pairs: Vec<(usize, usize)>,
    pub ferr_counts: BTreeMap<String, usize>,
    #[serde(with = "crate::model::exact::serde_rational")]
    pub threshold: Rational,
}

impl PsiReport {
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.pairs.binary_search(&(i.min(j), i.max(j))).is_ok()
    }
}

/// Ψ: class pairs contained in at least `coeff · ℓ³ · t` F_err triads.
pub fn bad_pairs_psi(classification: &TriadClassification, coeff: &Rational) -> PsiReport {
    let t = classification.t;
    let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for i in 0..t {
        for j in i + 1..t {
            counts.insert((i, j), 0);
        }
    }
    for c in classification.triads.iter().filter(|c| c.label == TriadLabel::Ferr) {
        let TriadAddress { i, j, s, .. } = c.address;
        for key in [(i, j), (i, s), (j, s)] {
            *counts.entry(key).or_default() += 1;
        }
    }
    let ell = classification.ell as u64;
    let threshold = coeff * int(ell * ell * ell * t as u64);
    let pairs = counts.iter().filter(|(_, &c)| int(c as u64) >= threshold).map(|(&k, _)| k).collect();
    PsiReport { pairs, ferr_counts: counts.into_iter().map(|((i, j), c)| (pair_key(i, j), c)).collect(), threshold }
}

/// Cluster assignment of the parts along one coordinate of a part-triple
/// coloring: `assignment[α]` is the cluster of part `α` (`None` for parts in
/// no cluster) and `representatives[u]` the part standing for cluster `u`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinateClusters {
    pub assignment: Vec<Option<usize>>,
    pub representatives: Vec<usize>,
}

impl CoordinateClusters {
    /// Every part is its own cluster.
    pub fn identity(n: usize) -> Self {
        CoordinateClusters { assignment: (0..n).map(Some).collect(), representatives: (0..n).collect() }
    }

    fn rep(&self, a: usize) -> Result<Option<usize>> {
        match self.assignment.get(a) {
            None => Err(Error::Precondition(format!("part {a} has no cluster assignment"))),
            Some(None) => Ok(None),
            Some(Some(u)) => self
                .representatives
                .get(*u)
                .copied()
                .map(Some)
                .ok_or_else(|| Error::Precondition(format!("cluster {u} has no representative"))),
        }
    }
}

/// Troublesome triples of one class triple: positions `(α, β, γ)` whose color
/// changes when some clustered coordinate is replaced by the representative
/// of its cluster.
pub fn troublesome_triples(
    r: &EdgeColoredTripartite3Graph,
    clusters: [&CoordinateClusters; 3],
) -> Result<Vec<(usize, usize, usize)>> {
    let [na, nb, nc] = r.sizes();
    for (k, n) in [na, nb, nc].into_iter().enumerate() {
        if clusters[k].assignment.len() != n {
            return Err(Error::Precondition(format!(
                "coordinate {k} has {} cluster assignments for {n} parts",
                clusters[k].assignment.len()
            )));
        }
    }
    let reps: Vec<Vec<Option<usize>>> = (0..3)
        .map(|k| (0..[na, nb, nc][k]).map(|a| clusters[k].rep(a)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for a in 0..na {
        for b in 0..nb {
            for c in 0..nc {
                let col = r.color(a, b, c);
                let flip = reps[0][a].is_some_and(|x| r.color(x, b, c) != col)
                    || reps[1][b].is_some_and(|x| r.color(a, x, c) != col)
                    || reps[2][c].is_some_and(|x| r.color(a, b, x) != col);
                if flip {
                    out.push((a, b, c));
                }
            }
        }
    }
    Ok(out)
}

/// The part-triple coloring `R` of one class triple `i < j < s`, with
/// coordinates indexing the parts of `{i,j}`, `{i,s}` and `{j,s}`.
pub fn part_triple_coloring(
    classification: &TriadClassification,
    ells: [usize; 3],
    i: usize,
    j: usize,
    s: usize,
) -> Result<EdgeColoredTripartite3Graph> {
    let parts = ells.map(|l| (0..l as u32).collect::<Vec<_>>());
    let mut r = EdgeColoredTripartite3Graph::new(parts, Color::Zero);
    for alpha in 0..ells[0] {
        for beta in 0..ells[1] {
            for gamma in 0..ells[2] {
                let addr = TriadAddress { i, j, s, alpha, beta, gamma };
                let label = classification
                    .label(&addr)
                    .ok_or_else(|| Error::InvalidDecomposition(format!("triad {addr:?} missing from classification")))?;
                r.set(alpha, beta, gamma, label.color());
            }
        }
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogeneityRow {
    pub address: TriadAddress,
    #[serde(with = "crate::model::exact::serde_rational")]
    pub density: Rational,
    pub triangles: u64,
    pub homogeneous: bool,
    pub regular: bool,
}

/// Triple-weighted homogeneity and regularity of a decomposition.
///
/// A triad is μ-homogeneous when its relative density is at most μ or at
/// least `1 - μ`. Fractions use the cross triples as denominator; the
/// `*_all` variants divide by `n choose 3`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogeneityReport {
    #[serde(with = "crate::model::exact::serde_rational")]
    pub mu: Rational,
    #[serde(with = "crate::model::exact::serde_rational")]
    pub eps1: Rational,
    #[serde(with = "crate::model::exact::serde_rational")]
    pub eps2: Rational,
    pub cross_triples: u64,
    pub all_triples: u64,
    pub good_triples: u64,
    pub regular_triples: u64,
    #[serde(with = "crate::model::exact::serde_rational")]
    pub good_triple_fraction: Rational,
    #[serde(with = "crate::model::exact::serde_rational")]
    pub good_fraction_all: Rational,
    #[serde(with = "crate::model::exact::serde_rational")]
    pub regular_triple_fraction: Rational,
    /// At least `(1 - μ) (n choose 3)` triples lie in μ-homogeneous triads.
    pub homogeneous: bool,
    /// At most `ε₁ n³` triples lie outside dev₂,₃(ε₁, ε₂) triads.
    pub regular: bool,
    pub triads: Vec<HomogeneityRow>,
}

/// [`HomogeneityReport`] without the per-triad table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogeneitySummary {
    #[serde(with = "crate::model::exact::serde_rational")]
    pub mu: Rational,
    pub cross_triples: u64,
    pub all_triples: u64,
    pub good_triples: u64,
    pub regular_triples: u64,
    #[serde(with = "crate::model::exact::serde_rational")]
    pub good_triple_fraction: Rational,
    #[serde(with = "crate::model::exact::serde_rational")]
    pub good_fraction_all: Rational,
    #[serde(with = "crate::model::exact::serde_rational")]
    pub regular_triple_fraction: Rational,
    pub homogeneous: bool,
    pub regular: bool,
    pub triads: usize,
}

impl HomogeneityReport {
    pub fn summary(&self) -> HomogeneitySummary {
        HomogeneitySummary {
            mu: self.mu.clone(),
            cross_triples: self.cross_triples,
            all_triples: self.all_triples,
            good_triples: self.good_triples,
            regular_triples: self.regular_triples,
            good_triple_fraction: self.good_triple_fraction.clone(),
            good_fraction_all: self.good_fraction_all.clone(),
            regular_triple_fraction: self.regular_triple_fraction.clone(),
            homogeneous: self.homogeneous,
            regular: self.regular,
            triads: self.triads.len(),
        }
    }
}

pub fn homogeneity_report(
    h: &Hypergraph3,
    p: &Decomposition,
    mu: &Rational,
    eps1: &Rational,
    eps2: &Rational,
) -> Result<HomogeneityReport> {
    let idx = DecompositionIndex::new(p, h.n())?;
    let m = measure_triads(h, &idx)?;
    Ok(homogeneity_from_metrics(&m, mu, eps1, eps2))
}

pub fn homogeneity_from_metrics(m: &TriadMetrics, mu: &Rational, eps1: &Rational, eps2: &Rational) -> HomogeneityReport {
    let hi = int(1) - mu;
    let rows: Vec<HomogeneityRow> = m
        .addresses
        .par_iter()
        .zip(m.triads.par_iter())
        .map(|(&address, r)| HomogeneityRow {
            address,
            density: r.d3.clone(),
            triangles: r.triangles,
            homogeneous: r.d3 <= *mu || r.d3 >= hi,
            regular: r.is_regular(eps1, eps2, None),
        })
        .collect();
    let cross: u64 = rows.iter().map(|r| r.triangles).sum();
    let good: u64 = rows.iter().filter(|r| r.homogeneous).map(|r| r.triangles).sum();
    let regular: u64 = rows.iter().filter(|r| r.regular).map(|r| r.triangles).sum();
    let n = m.n as u64;
    let all = if n < 3 { 0 } else { n * (n - 1) * (n - 2) / 6 };
    let frac = |x: u64, d: u64| if d == 0 { int(1) } else { ratio(x, d) };
    let irregular = all - regular;
    HomogeneityReport {
        mu: mu.clone(),
        eps1: eps1.clone(),
        eps2: eps2.clone(),
        cross_triples: cross,
        all_triples: all,
        good_triples: good,
        regular_triples: regular,
        good_triple_fraction: frac(good, cross),
        good_fraction_all: frac(good, all),
        regular_triple_fraction: frac(regular, cross),
        homogeneous: int(good) >= (int(1) - mu) * int(all),
        regular: int(irregular) <= eps1 * int(n * n * n),
        triads: rows,
    }
}
