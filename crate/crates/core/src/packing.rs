//! Greedy δ-separated families and the clustering of left vertices of an
//! edge-colored bipartite graph by their color neighborhoods.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::exact::{int, Rational};
use crate::model::{BitSet, Color, EdgeColoredBipartiteGraph};
use crate::vc::find_e0e1_uk_copy;

/// Indices of a maximal subfamily with pairwise `|X Δ X′| > delta_abs`,
/// chosen greedily in input order.
pub fn delta_separated_greedy(sets: &[BitSet], delta_abs: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for (i, s) in sets.iter().enumerate() {
        if chosen.iter().all(|&c| sets[c].xor_count(s) > delta_abs) {
            chosen.push(i);
        }
    }
    chosen
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PackingDiagnostic {
    /// A clustered vertex differs from its representative by more than `δ|B|`
    /// in some color class.
    NotSimilar { vertex: usize, representative: usize, color: Color, symdiff: usize },
    /// `|E₂| > ε|A||B|`.
    ColorTwoMass { count: usize },
}

/// Outcome of [`packing_cluster`]. Vertices are left positions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingResult {
    /// Left vertices with `|N_{E₂}(a)| ≥ √ε |B|`.
    pub exceptions: Vec<usize>,
    pub representatives: Vec<usize>,
    /// Representative index of each left vertex; `None` exactly on exceptions.
    pub clusters: Vec<Option<usize>>,
    pub m: usize,
    #[serde(with = "crate::model::exact::serde_rational")]
    pub delta: Rational,
    #[serde(with = "crate::model::exact::serde_rational")]
    pub eps: Rational,
    pub diagnostics: Vec<PackingDiagnostic>,
}

impl PackingResult {
    /// Members of each cluster, in input order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.m];
        for (a, c) in self.clusters.iter().enumerate() {
            if let Some(c) = c {
                out[*c].push(a);
            }
        }
        out
    }
}

/// `deg² ≥ eps · |B|²`, i.e. `deg ≥ √eps |B|`.
fn is_exception(deg2: usize, nb: usize, eps: &Rational) -> bool {
    int((deg2 * deg2) as u64) >= eps * int((nb * nb) as u64)
}

/// `2 Δ ≤ δ |B|`.
fn within_half(sym: usize, nb: usize, delta: &Rational) -> bool {
    int(2 * sym as u64) <= delta * int(nb as u64)
}

/// Clusters the left side of `g`. Representatives are taken greedily in input
/// order among non-exceptional vertices so that their E₁-neighborhoods are
/// pairwise more than `δ|B|/2` apart; each vertex joins the first
/// representative within `δ|B|/2`. The full `∼_δ` condition is then checked
/// and any failure is recorded as a diagnostic.
pub fn packing_cluster(g: &EdgeColoredBipartiteGraph, delta: &Rational, eps: &Rational) -> PackingResult {
    let (na, nb) = (g.left_len(), g.right_len());
    let exc: Vec<bool> = (0..na).map(|a| is_exception(g.degree(a, Color::Two), nb, eps)).collect();
    let mut reps: Vec<usize> = Vec::new();
    let mut clusters = vec![None; na];
    for a in 0..na {
        if exc[a] {
            continue;
        }
        let row = g.ones_row(a);
        match reps.iter().position(|&x| within_half(g.ones_row(x).xor_count(row), nb, delta)) {
            Some(r) => clusters[a] = Some(r),
            None => {
                clusters[a] = Some(reps.len());
                reps.push(a);
            }
        }
    }
    // A later representative may sit closer to an earlier vertex than the
    // one it joined; the first-match rule makes the assignment canonical.
    for a in 0..na {
        if clusters[a].is_some() {
            let row = g.ones_row(a);
            clusters[a] = reps.iter().position(|&x| within_half(g.ones_row(x).xor_count(row), nb, delta));
        }
    }
    let lim = delta * int(nb as u64);
    let mut diagnostics: Vec<PackingDiagnostic> = (0..na)
        .into_par_iter()
        .flat_map_iter(|a| {
            let mut out = Vec::new();
            if let Some(r) = clusters[a] {
                let x = reps[r];
                for c in Color::ALL {
                    let s = g.symdiff(a, x, c);
                    if int(s as u64) > lim {
                        out.push(PackingDiagnostic::NotSimilar { vertex: a, representative: x, color: c, symdiff: s });
                    }
                }
            }
            out
        })
        .collect();
    let twos = g.color_count(Color::Two);
    if int(twos as u64) > eps * int((na * nb) as u64) {
        diagnostics.push(PackingDiagnostic::ColorTwoMass { count: twos });
    }
    PackingResult {
        exceptions: (0..na).filter(|&a| exc[a]).collect(),
        m: reps.len(),
        representatives: reps,
        clusters,
        delta: delta.clone(),
        eps: eps.clone(),
        diagnostics,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingAudit {
    pub m: usize,
    /// `|U| ≤ √ε |A|`.
    pub exceptions_ok: bool,
    /// Representatives pairwise more than `δ|B|/2` apart in E₁.
    pub separated: bool,
    /// Every non-exception is within `δ|B|/2` of its representative and of
    /// no earlier one, and exceptions are exactly the high color-2 vertices.
    pub assignment_ok: bool,
    /// Every clustered vertex is `∼_δ` its representative.
    pub similar: bool,
    pub color_two_count: usize,
    /// `|E₂| ≤ ε|A||B|`.
    pub color_two_ok: bool,
    /// `Some(true)` when no E₀/E₁-copy of U(k) exists, if `k` was given.
    pub uk_free: Option<bool>,
}

/// Recomputes every invariant of a [`PackingResult`] from the graph.
pub fn verify_packing_bound(g: &EdgeColoredBipartiteGraph, r: &PackingResult, k: Option<usize>) -> PackingAudit {
    let (na, nb) = (g.left_len(), g.right_len());
    let exc = &r.exceptions;
    let exceptions_ok = int((exc.len() * exc.len()) as u64) <= &r.eps * int((na * na) as u64);
    let reps = &r.representatives;
    let mut separated = true;
    for (x, &a) in reps.iter().enumerate() {
        for &b in &reps[x + 1..] {
            if within_half(g.ones_row(a).xor_count(g.ones_row(b)), nb, &r.delta) {
                separated = false;
            }
        }
    }
    let mut assignment_ok = r.clusters.len() == na;
    let mut similar = true;
    let lim = &r.delta * int(nb as u64);
    for a in 0..na.min(r.clusters.len()) {
        let should_exc = is_exception(g.degree(a, Color::Two), nb, &r.eps);
        match r.clusters[a] {
            None => assignment_ok &= should_exc && exc.binary_search(&a).is_ok(),
            Some(c) => {
                let first = reps
                    .iter()
                    .position(|&x| within_half(g.ones_row(x).xor_count(g.ones_row(a)), nb, &r.delta));
                assignment_ok &= !should_exc && first == Some(c);
                if c < reps.len() {
                    similar &= Color::ALL.iter().all(|&col| int(g.symdiff(a, reps[c], col) as u64) <= lim);
                }
            }
        }
    }
    let color_two_count = g.color_count(Color::Two);
    let color_two_ok = int(color_two_count as u64) <= &r.eps * int((na * nb) as u64);
    PackingAudit {
        m: r.m,
        exceptions_ok,
        separated,
        assignment_ok,
        similar,
        color_two_count,
        color_two_ok,
        uk_free: k.map(|k| find_e0e1_uk_copy(g, k).is_none()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::exact::ratio;

    #[test]
    fn singletons_are_separated() {
        let sets: Vec<BitSet> = (0..10)
            .map(|i| {
                let mut b = BitSet::new(10);
                b.insert(i);
                b
            })
            .collect();
        assert_eq!(delta_separated_greedy(&sets, 1).len(), 10);
        assert_eq!(delta_separated_greedy(&sets, 10).len(), 1);
    }

    #[test]
    fn identical_rows_form_one_cluster() {
        let mut g = EdgeColoredBipartiteGraph::with_sizes(5, 8);
        for a in 0..5 {
            for b in 0..4 {
                g.set(a, b, Color::One);
            }
        }
        let r = packing_cluster(&g, &ratio(1, 5), &ratio(1, 100));
        assert_eq!(r.m, 1);
        assert!(r.exceptions.is_empty() && r.diagnostics.is_empty());
        let audit = verify_packing_bound(&g, &r, Some(1));
        assert!(audit.exceptions_ok && audit.separated && audit.assignment_ok && audit.similar);
    }

    #[test]
    fn full_color_two_row_is_exception() {
        let mut g = EdgeColoredBipartiteGraph::with_sizes(4, 10);
        for b in 0..10 {
            g.set(2, b, Color::Two);
        }
        let r = packing_cluster(&g, &ratio(1, 5), &ratio(1, 25));
        assert_eq!(r.exceptions, vec![2]);
        assert_eq!(r.clusters[2], None);
    }
}
