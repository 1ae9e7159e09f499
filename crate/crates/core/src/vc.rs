//! Shattering, VC and VC₂ dimension, the power-set graph U(k), and search for
//! E₀/E₁-copies of U(k) in edge-colored bipartite graphs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BipartiteGraph, BitSet, Color, EdgeColoredBipartiteGraph, Hypergraph3};

/// Largest ground set accepted by [`vc_dim`].
pub const VC_GROUND_LIMIT: usize = 24;

/// A family of subsets of `0..ground`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSystem {
    pub ground: usize,
    pub sets: Vec<Vec<usize>>,
}

impl SetSystem {
    pub fn new(ground: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        for s in &sets {
            if let Some(&x) = s.iter().find(|&&x| x >= ground) {
                return Err(Error::InvalidParameter(format!("element {x} outside ground set of size {ground}")));
            }
        }
        Ok(SetSystem { ground, sets })
    }

    /// Right-side neighborhoods of `b`, as subsets of the left positions.
    pub fn neighborhoods(b: &BipartiteGraph) -> Self {
        let t = b.transpose();
        let sets = (0..t.left_len()).map(|j| t.row(j).iter().collect()).collect();
        SetSystem { ground: b.left_len(), sets }
    }

    pub fn as_bitsets(&self) -> Vec<BitSet> {
        self.sets
            .iter()
            .map(|s| {
                let mut b = BitSet::new(self.ground);
                for &x in s {
                    b.insert(x);
                }
                b
            })
            .collect()
    }

    /// Whether the positions in `x` are shattered.
    pub fn shatters(&self, x: &[usize]) -> bool {
        let masks = self.masks();
        shattered(&masks, x)
    }

    fn masks(&self) -> Vec<u32> {
        self.sets.iter().map(|s| s.iter().fold(0u32, |m, &x| m | (1 << x))).collect()
    }
}

fn shattered(masks: &[u32], x: &[usize]) -> bool {
    let need = 1usize << x.len();
    if masks.len() < need {
        return false;
    }
    let mut seen = vec![false; need];
    let mut count = 0;
    for &m in masks {
        let mut t = 0usize;
        for (i, &e) in x.iter().enumerate() {
            if m >> e & 1 == 1 {
                t |= 1 << i;
            }
        }
        if !seen[t] {
            seen[t] = true;
            count += 1;
            if count == need {
                return true;
            }
        }
    }
    false
}

/// Calls `f` on each `k`-subset of `0..n` in lexicographic order until it returns true.
fn any_combination(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if k > n {
        return false;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if f(&idx) {
            return true;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// VC-dimension by exhaustive search. The empty set is always shattered
/// once the family is nonempty; an empty family has dimension 0.
pub fn vc_dim(s: &SetSystem) -> Result<usize> {
    if s.ground > VC_GROUND_LIMIT {
        return Err(Error::TooLarge(format!("ground set {} exceeds {VC_GROUND_LIMIT}", s.ground)));
    }
    let masks = s.masks();
    let mut d = 0;
    // Shattered sets are closed under subsets, so the first failing size ends the search.
    for k in 1..=s.ground {
        if !any_combination(s.ground, k, |x| shattered(&masks, x)) {
            break;
        }
        d = k;
    }
    Ok(d)
}

/// The bipartite graph U(k): `a_1..a_k`, `c_S` for every `S ⊆ [k]`, and
/// `a_i c_S` an edge iff `i ∈ S`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UkGraph {
    pub k: usize,
    pub a_vertices: Vec<u32>,
    /// `c_vertices[S]` for `S` read as a bitmask over `0..k`.
    pub c_vertices: Vec<u32>,
    pub edges: Vec<(u32, u32)>,
}

impl UkGraph {
    pub fn to_bipartite(&self) -> BipartiteGraph {
        BipartiteGraph::from_edges(self.a_vertices.clone(), self.c_vertices.clone(), self.edges.iter().copied())
            .expect("U(k) labels are disjoint")
    }
}

pub fn build_uk(k: usize) -> Result<UkGraph> {
    if !(1..=16).contains(&k) {
        return Err(Error::InvalidParameter(format!("U(k) needs 1 <= k <= 16, got {k}")));
    }
    let a_vertices: Vec<u32> = (0..k as u32).collect();
    let c_vertices: Vec<u32> = (0..1u32 << k).map(|s| k as u32 + s).collect();
    let mut edges = Vec::with_capacity(k << (k - 1));
    for s in 0..1u32 << k {
        for i in 0..k {
            if s >> i & 1 == 1 {
                edges.push((a_vertices[i], c_vertices[s as usize]));
            }
        }
    }
    Ok(UkGraph { k, a_vertices, c_vertices, edges })
}

/// A VC₂ witness: `a_i b_j c_S ∈ E` iff `(i, j) ∈ S`, with `S` read as a
/// bitmask whose bit `i·k + j` stands for `(i, j)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vc2Witness {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub c: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vc2Result {
    /// Largest `k ≤ k_max` with a witness found; a lower bound when `incomplete`.
    pub dim: usize,
    pub witness: Option<Vc2Witness>,
    /// The search stopped at the evaluation budget before deciding `dim + 1`.
    pub incomplete: bool,
    pub evaluations: u64,
}

/// Default evaluation budget for [`vc2_dim`].
pub const VC2_DEFAULT_BUDGET: u64 = 2_000_000_000;

/// VC₂-dimension up to `k_max` with pairwise-distinct witnesses.
pub fn vc2_dim(h: &Hypergraph3, k_max: usize) -> Vc2Result {
    vc2_dim_budgeted(h, k_max, VC2_DEFAULT_BUDGET)
}

pub fn vc2_dim_budgeted(h: &Hypergraph3, k_max: usize, budget: u64) -> Vc2Result {
    let mut res = Vc2Result { dim: 0, witness: None, incomplete: false, evaluations: 0 };
    for k in 1..=k_max {
        if k * k > 20 {
            res.incomplete = true;
            break;
        }
        let patterns = 1usize << (k * k);
        if h.n() < 2 * k + patterns {
            break;
        }
        let (found, evals, exhausted) = vc2_search(h, k, budget.saturating_sub(res.evaluations));
        res.evaluations += evals;
        match found {
            Some(w) => {
                res.dim = k;
                res.witness = Some(w);
            }
            None => {
                res.incomplete = exhausted;
                break;
            }
        }
    }
    res
}

/// Searches for a size-`k` witness. Returns the witness, the number of
/// triple evaluations, and whether the budget ran out.
fn vc2_search(h: &Hypergraph3, k: usize, budget: u64) -> (Option<Vc2Witness>, u64, bool) {
    use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
    let n = h.n();
    let evals = AtomicU64::new(0);
    let exhausted = AtomicBool::new(false);
    let patterns = 1usize << (k * k);
    let mut a_sets: Vec<Vec<usize>> = Vec::new();
    any_combination(n, k, |x| {
        a_sets.push(x.to_vec());
        false
    });
    let per_b = (n.saturating_sub(2 * k) * k * k) as u64;
    let found = a_sets.par_iter().find_map_first(|a| {
        let rest: Vec<usize> = (0..n).filter(|v| !a.contains(v)).collect();
        let mut hit = None;
        any_combination(rest.len(), k, |bi| {
            let b: Vec<usize> = bi.iter().map(|&i| rest[i]).collect();
            if evals.fetch_add(per_b, Ordering::Relaxed) + per_b > budget {
                exhausted.store(true, Ordering::Relaxed);
                return true;
            }
            let mut c = vec![u32::MAX; patterns];
            let mut covered = 0;
            for v in 0..n {
                if a.contains(&v) || b.contains(&v) {
                    continue;
                }
                let mut sig = 0usize;
                for (i, &ai) in a.iter().enumerate() {
                    for (j, &bj) in b.iter().enumerate() {
                        if h.contains(ai as u32, bj as u32, v as u32) {
                            sig |= 1 << (i * k + j);
                        }
                    }
                }
                if c[sig] == u32::MAX {
                    c[sig] = v as u32;
                    covered += 1;
                    if covered == patterns {
                        hit = Some(Vc2Witness {
                            a: a.iter().map(|&x| x as u32).collect(),
                            b: b.iter().map(|&x| x as u32).collect(),
                            c,
                        });
                        return true;
                    }
                }
            }
            false
        });
        hit
    });
    let done = exhausted.load(Ordering::Relaxed);
    (found, evals.load(Ordering::Relaxed), done)
}

/// An E₀/E₁-copy of U(k): left positions `v_1..v_k` and, for every mask `S`,
/// a right position `w[S]` with `v_i w[S]` colored 1 iff `i ∈ S` and 0 otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UkCopy {
    pub v: Vec<usize>,
    pub w: Vec<usize>,
}

/// Lexicographically least E₀/E₁-copy of U(k) over left positions.
pub fn find_e0e1_uk_copy(g: &EdgeColoredBipartiteGraph, k: usize) -> Option<UkCopy> {
    let (na, nb) = (g.left().len(), g.right().len());
    if k == 0 || k > 16 || nb < 1 << k || na < k {
        return None;
    }
    let all: Vec<usize> = (0..nb).filter(|&j| (0..na).any(|i| g.color(i, j) != Color::Two)).collect();
    (0..na).into_par_iter().find_map_first(|first| {
        let usable: Vec<usize> = all.iter().copied().filter(|&j| g.color(first, j) != Color::Two).collect();
        let sig: Vec<usize> = usable.iter().map(|&j| (g.color(first, j) == Color::One) as usize).collect();
        let mut chosen = vec![first];
        extend_copy(g, k, &mut chosen, &usable, &sig)
    })
}

/// Depth-first extension of a partial copy: every prefix of a copy is itself
/// a copy, so a prefix whose right signatures miss a pattern is abandoned.
fn extend_copy(
    g: &EdgeColoredBipartiteGraph,
    k: usize,
    chosen: &mut Vec<usize>,
    usable: &[usize],
    sig: &[usize],
) -> Option<UkCopy> {
    let depth = chosen.len();
    let mut seen = vec![usize::MAX; 1 << depth];
    let mut covered = 0;
    for (idx, &s) in sig.iter().enumerate() {
        if seen[s] == usize::MAX {
            seen[s] = idx;
            covered += 1;
        }
    }
    if covered < 1 << depth {
        return None;
    }
    if depth == k {
        return Some(UkCopy { v: chosen.clone(), w: seen.iter().map(|&i| usable[i]).collect() });
    }
    let last = *chosen.last().unwrap();
    for next in last + 1..g.left().len() {
        let mut u2 = Vec::with_capacity(usable.len());
        let mut s2 = Vec::with_capacity(usable.len());
        for (idx, &j) in usable.iter().enumerate() {
            match g.color(next, j) {
                Color::Two => {}
                c => {
                    u2.push(j);
                    s2.push(sig[idx] | ((c == Color::One) as usize) << depth);
                }
            }
        }
        if u2.len() < 1 << (depth + 1) {
            continue;
        }
        chosen.push(next);
        if let Some(w) = extend_copy(g, k, chosen, &u2, &s2) {
            return Some(w);
        }
        chosen.pop();
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singletons_and_power_set() {
        let s = SetSystem::new(5, (0..5).map(|i| vec![i]).collect()).unwrap();
        assert_eq!(vc_dim(&s).unwrap(), 1);
        let p = SetSystem::new(4, (0..16usize).map(|m| (0..4).filter(|i| m >> i & 1 == 1).collect()).collect()).unwrap();
        assert_eq!(vc_dim(&p).unwrap(), 4);
        assert_eq!(vc_dim(&SetSystem::new(3, vec![]).unwrap()).unwrap(), 0);
        assert_eq!(vc_dim(&SetSystem::new(3, vec![vec![]]).unwrap()).unwrap(), 0);
    }

    #[test]
    fn uk_shape() {
        let u1 = build_uk(1).unwrap();
        assert_eq!(u1.c_vertices.len(), 2);
        assert_eq!(u1.edges, vec![(0, 2)]);
        assert_eq!(build_uk(2).unwrap().edges.len(), 4);
        assert!(build_uk(0).is_err() && build_uk(17).is_err());
    }

    #[test]
    fn uk_neighborhoods_have_dimension_k() {
        for k in 1..=4 {
            let g = build_uk(k).unwrap().to_bipartite();
            assert_eq!(vc_dim(&SetSystem::neighborhoods(&g)).unwrap(), k);
        }
    }

    #[test]
    fn planted_copy_found() {
        let u = build_uk(2).unwrap();
        let b = u.to_bipartite();
        let mut table = Vec::new();
        for i in 0..b.left_len() {
            for j in 0..b.right_len() {
                table.push(if b.has_edge_at(i, j) { Color::One } else { Color::Zero });
            }
        }
        let g = EdgeColoredBipartiteGraph::from_table(b.left().to_vec(), b.right().to_vec(), &table).unwrap();
        let w = find_e0e1_uk_copy(&g, 2).unwrap();
        assert_eq!(w.v, vec![0, 1]);
        for (s, &j) in w.w.iter().enumerate() {
            for (i, &v) in w.v.iter().enumerate() {
                assert_eq!(g.color(v, j) == Color::One, s >> i & 1 == 1);
            }
        }
        let twos = EdgeColoredBipartiteGraph::from_table(
            b.left().to_vec(),
            b.right().to_vec(),
            &vec![Color::Two; table.len()],
        )
        .unwrap();
        assert!(find_e0e1_uk_copy(&twos, 1).is_none());
    }
}
