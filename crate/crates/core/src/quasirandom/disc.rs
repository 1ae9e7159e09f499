use num_bigint::BigInt;
use num_traits::Signed;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dev2::{dev2, EvalMode};
use crate::error::{Error, Result};
use crate::model::exact::{pow, ratio, Rational};
use crate::model::{BipartiteGraph, BitSet};
use crate::rng;

/// Largest `|U| + |W|` accepted by exact subset enumeration.
pub const DISC_EXACT_LIMIT: usize = 28;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscMode {
    Exact,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disc2Result {
    pub density: Rational,
    /// `max |e(U′,W′) - d|U′||W′|| / (|U||W|)` over the examined pairs.
    pub defect: Rational,
    pub mode: DiscMode,
    /// Maximising `(U′, W′)` as vertex labels, in exact mode.
    pub witness: Option<(Vec<u32>, Vec<u32>)>,
}

/// disc₂ defect at `d = d_B`.
pub fn disc2(b: &BipartiteGraph, mode: DiscMode, trials: usize, seed: u64) -> Result<Disc2Result> {
    let density = b.density()?;
    match mode {
        DiscMode::Exact => {
            let (defect, witness) = exact_defect(b, &density)?;
            Ok(Disc2Result { density, defect, mode, witness: Some(witness) })
        }
        DiscMode::Sampled => {
            let defect = sampled_defect(b, &density, trials, seed);
            Ok(Disc2Result { density, defect, mode, witness: None })
        }
    }
}

/// Exact `max_{U′,W′} |e(U′,W′) - d|U′||W′|| / (|U||W|)` for an arbitrary `d`.
///
/// Subsets of the smaller side are walked in Gray-code order while keeping
/// `c_w = |N(w) ∩ U′|`; for a fixed `U′` the best `W′` collects either all
/// positive or all negative terms `c_w - d|U′|`.
pub fn disc2_exact_at(b: &BipartiteGraph, d: &Rational) -> Result<(Rational, (Vec<u32>, Vec<u32>))> {
    b.density()?;
    exact_defect(b, d)
}

fn exact_defect(b: &BipartiteGraph, d: &Rational) -> Result<(Rational, (Vec<u32>, Vec<u32>))> {
    let (nu, nw) = (b.left_len(), b.right_len());
    if nu + nw > DISC_EXACT_LIMIT {
        return Err(Error::TooLarge(format!("exact disc2 needs |U|+|W| <= {DISC_EXACT_LIMIT}, got {}", nu + nw)));
    }
    let swapped = nu > nw;
    let g = if swapped { b.transpose() } else { b.clone() };
    let (s, o) = (g.left_len(), g.right_len());
    // d = p/q; terms are scaled by q.
    let p: i64 = i64::try_from(d.numer()).map_err(|_| Error::Overflow("density numerator".into()))?;
    let q: i64 = i64::try_from(d.denom()).map_err(|_| Error::Overflow("density denominator".into()))?;
    let cols: Vec<u32> = (0..o)
        .map(|w| (0..s).filter(|&u| g.has_edge_at(u, w)).fold(0u32, |m, u| m | 1 << u))
        .collect();
    let mut c = vec![0i64; o];
    let mut mask = 0u32;
    let mut size = 0i64;
    let mut best: (i128, u32, bool) = (0, 0, true);
    let mut consider = |mask: u32, size: i64, c: &[i64]| {
        let (mut pos, mut neg) = (0i128, 0i128);
        for &cw in c {
            let v = q as i128 * cw as i128 - p as i128 * size as i128;
            if v > 0 {
                pos += v;
            } else {
                neg -= v;
            }
        }
        if pos > best.0 {
            best = (pos, mask, true);
        }
        if neg > best.0 {
            best = (neg, mask, false);
        }
    };
    consider(0, 0, &c);
    for k in 1u64..(1u64 << s) {
        let bit = k.trailing_zeros();
        mask ^= 1 << bit;
        let added = mask >> bit & 1 == 1;
        size += if added { 1 } else { -1 };
        for (w, cw) in c.iter_mut().enumerate() {
            if cols[w] >> bit & 1 == 1 {
                *cw += if added { 1 } else { -1 };
            }
        }
        consider(mask, size, &c);
    }
    let (value, best_mask, positive) = best;
    let us: Vec<usize> = (0..s).filter(|&u| best_mask >> u & 1 == 1).collect();
    let ws: Vec<usize> = (0..o)
        .filter(|&w| {
            let cw = (cols[w] & best_mask).count_ones() as i128;
            let v = q as i128 * cw - p as i128 * us.len() as i128;
            if positive {
                v > 0
            } else {
                v < 0
            }
        })
        .collect();
    let lab_s: Vec<u32> = us.iter().map(|&u| g.left()[u]).collect();
    let lab_o: Vec<u32> = ws.iter().map(|&w| g.right()[w]).collect();
    let witness = if swapped { (lab_o, lab_s) } else { (lab_s, lab_o) };
    let defect = Rational::new(BigInt::from(value), BigInt::from(q as i128 * (nu * nw) as i128));
    Ok((defect, witness))
}

fn sampled_defect(b: &BipartiteGraph, d: &Rational, trials: usize, seed: u64) -> Rational {
    let (nu, nw) = (b.left_len(), b.right_len());
    let mut rng = rng::stream(seed, "disc2-sampled", &[nu as u64, nw as u64]);
    let mut best = Rational::from_integer(0.into());
    let n = ratio((nu * nw) as u64, 1);
    for _ in 0..trials {
        let mut ws = BitSet::new(nw);
        let mut wc = 0u64;
        for w in 0..nw {
            if rng.gen::<bool>() {
                ws.insert(w);
                wc += 1;
            }
        }
        let mut uc = 0u64;
        let mut e = 0u64;
        for u in 0..nu {
            if rng.gen::<bool>() {
                uc += 1;
                e += b.row(u).and_count(&ws) as u64;
            }
        }
        let dev = (Rational::from_integer(e.into()) - d * Rational::from_integer((uc * wc).into())).abs() / &n;
        if dev > best {
            best = dev;
        }
    }
    best
}

/// Result of comparing dev₂ and disc₂ parameters on one graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equivalence {
    pub dev_eps: Rational,
    pub disc_eps: Rational,
    pub ok: bool,
}

/// `dev_eps = max(normalized, |d_B - d|)`; `disc_eps = max(|d_B - d|, exact
/// defect at d)`; `ok` iff `disc_eps ≤ dev_eps^(1/4)`.
pub fn check_equivalence(b: &BipartiteGraph, d: &Rational) -> Result<Equivalence> {
    let r = dev2(b, EvalMode::Fast)?;
    let dev_eps = r.certified_eps(d);
    let (defect, _) = exact_defect(b, d)?;
    let gap = (&r.density - d).abs();
    let disc_eps = if gap > defect { gap } else { defect };
    let ok = pow(&disc_eps, 4) <= dev_eps;
    Ok(Equivalence { dev_eps, disc_eps, ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn half_graph(n: usize) -> BipartiteGraph {
        let mut g = BipartiteGraph::with_sizes(n, n);
        for i in 0..n {
            for j in i..n {
                g.add_edge_at(i, j);
            }
        }
        g
    }

    /// Maximum over every subset pair, evaluated directly.
    fn brute_defect(b: &BipartiteGraph, d: &Rational) -> Rational {
        let (nu, nw) = (b.left_len(), b.right_len());
        let mut best = Rational::zero();
        for um in 0u32..1 << nu {
            for wm in 0u32..1 << nw {
                let mut e = 0i64;
                for u in 0..nu {
                    for w in 0..nw {
                        if um >> u & 1 == 1 && wm >> w & 1 == 1 && b.has_edge_at(u, w) {
                            e += 1;
                        }
                    }
                }
                let sz = (um.count_ones() * wm.count_ones()) as i64;
                let v = (Rational::from_integer(e.into()) - d * Rational::from_integer(sz.into())).abs();
                if v > best {
                    best = v;
                }
            }
        }
        best / Rational::from_integer(((nu * nw) as i64).into())
    }

    #[test]
    fn half_graph_matches_enumeration() {
        let g = half_graph(6);
        let r = disc2(&g, DiscMode::Exact, 0, 0).unwrap();
        assert_eq!(r.defect, brute_defect(&g, &r.density));
        let (us, ws) = r.witness.unwrap();
        let sub = BipartiteGraph::from_edges(
            us.clone(),
            ws.clone(),
            g.edges().filter(|(u, w)| us.contains(u) && ws.contains(w)),
        )
        .unwrap();
        let v = (Rational::from_integer((sub.edge_count() as i64).into())
            - &r.density * Rational::from_integer(((us.len() * ws.len()) as i64).into()))
        .abs()
            / Rational::from_integer(36.into());
        assert_eq!(v, r.defect);
    }

    #[test]
    fn complete_graph_has_no_defect() {
        let mut g = BipartiteGraph::with_sizes(3, 4);
        for i in 0..3 {
            for j in 0..4 {
                g.add_edge_at(i, j);
            }
        }
        assert!(disc2(&g, DiscMode::Exact, 0, 0).unwrap().defect.is_zero());
        assert!(disc2(&g, DiscMode::Sampled, 50, 1).unwrap().defect.is_zero());
        let eq = check_equivalence(&g, &ratio(1, 1)).unwrap();
        assert!(eq.dev_eps.is_zero() && eq.disc_eps.is_zero() && eq.ok);
    }

    #[test]
    fn single_edge_equivalence() {
        let mut g = BipartiteGraph::with_sizes(2, 2);
        g.add_edge_at(0, 0);
        let eq = check_equivalence(&g, &ratio(1, 4)).unwrap();
        assert_eq!(eq.dev_eps, ratio(7, 256));
        assert_eq!(eq.disc_eps, ratio(3, 16));
        assert!(eq.ok);
    }

    #[test]
    fn oversized_exact_is_rejected() {
        let g = BipartiteGraph::with_sizes(15, 14);
        assert!(matches!(disc2(&g, DiscMode::Exact, 0, 0), Err(Error::TooLarge(_))));
        assert!(disc2(&g, DiscMode::Sampled, 10, 0).is_ok());
    }
}
