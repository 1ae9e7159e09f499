use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::exact::{ratio, Rational, WideSum};
use crate::model::BipartiteGraph;

/// Evaluation strategy for statistics that have a brute-force definition and
/// an algebraically equivalent fast path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    Brute,
    Fast,
}

/// dev₂ statistics of a bipartite graph.
///
/// `raw_sum` is `Σ_{u0,u1∈U} Σ_{w0,w1∈W} Π g(u_i, w_j)` with
/// `g = 1 - d_B` on edges and `-d_B` off edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dev2Result {
    pub density: Rational,
    pub raw_sum: Rational,
    pub normalized: Rational,
    pub edges: u64,
    pub left: usize,
    pub right: usize,
}

impl Dev2Result {
    /// The smallest ε for which the dev₂(ε, d) inequalities hold with `≤`
    /// (the density condition is strict, so dev₂(ε′, d) holds for all ε′ > ε).
    pub fn certified_eps(&self, d: &Rational) -> Rational {
        let gap = (&self.density - d).abs();
        if gap > self.normalized {
            gap
        } else {
            self.normalized.clone()
        }
    }

    /// `|d_B - d| < eps` and `normalized ≤ eps`.
    pub fn satisfies(&self, eps: &Rational, d: &Rational) -> bool {
        (&self.density - d).abs() < *eps && self.normalized <= *eps
    }
}

pub fn dev2(b: &BipartiteGraph, mode: EvalMode) -> Result<Dev2Result> {
    let (nu, nw) = (b.left_len(), b.right_len());
    if nu == 0 || nw == 0 {
        return Err(Error::EmptySide);
    }
    let n = (nu * nw) as i128;
    let e = b.edge_count() as i128;
    let raw_sum = match mode {
        EvalMode::Fast => fast_raw(b, n, e)?,
        EvalMode::Brute => brute_raw(b, n, e),
    };
    let nn = BigInt::from(n);
    let normalized = &raw_sum / Rational::from_integer(&nn * &nn);
    Ok(Dev2Result {
        density: ratio(e, n),
        raw_sum,
        normalized,
        edges: e as u64,
        left: nu,
        right: nw,
    })
}

/// `Σ_{u0,u1} (Σ_w g(u0,w) g(u1,w))²` with `g` scaled to integers
/// `(N - e, -e) / gcd(N, e)`. The inner sum depends only on the four
/// co-degree counts of `(u0, u1)`.
fn fast_raw(b: &BipartiteGraph, n: i128, e: i128) -> Result<Rational> {
    let g = n.gcd(&e);
    let a = (n - e) / g;
    let c = -e / g;
    let den = n / g;
    let nu = b.left_len();
    let nw = b.right_len() as i128;
    let deg: Vec<i128> = (0..nu).map(|i| b.degree(i) as i128).collect();
    let aa = a * a;
    let ac = a * c;
    let cc = c * c;
    let rows: Vec<Result<BigInt>> = (0..nu)
        .into_par_iter()
        .map(|u0| {
            let mut acc = WideSum::default();
            for u1 in u0..nu {
                let c11 = b.row(u0).and_count(b.row(u1)) as i128;
                let c10 = deg[u0] - c11;
                let c01 = deg[u1] - c11;
                let c00 = nw - deg[u0] - deg[u1] + c11;
                let inner = c11
                    .checked_mul(aa)
                    .and_then(|x| x.checked_add((c10 + c01).checked_mul(ac)?))
                    .and_then(|x| x.checked_add(c00.checked_mul(cc)?))
                    .ok_or_else(|| Error::Overflow("dev2 inner product".into()))?;
                acc.add_square(inner, if u1 == u0 { 1 } else { 2 });
            }
            Ok(acc.total())
        })
        .collect();
    let mut total = BigInt::zero();
    for r in rows {
        total += r?;
    }
    let d2 = BigInt::from(den) * BigInt::from(den);
    Ok(Rational::new(total, &d2 * &d2))
}

/// Direct quadruple enumeration with `g` scaled by `N`.
fn brute_raw(b: &BipartiteGraph, n: i128, e: i128) -> Rational {
    let (nu, nw) = (b.left_len(), b.right_len());
    let g = |u: usize, w: usize| -> i128 {
        if b.has_edge_at(u, w) {
            n - e
        } else {
            -e
        }
    };
    let mut acc = WideSum::default();
    for u0 in 0..nu {
        for u1 in 0..nu {
            for w0 in 0..nw {
                for w1 in 0..nw {
                    let factors = [g(u0, w0), g(u0, w1), g(u1, w0), g(u1, w1)];
                    match factors.iter().try_fold(1i128, |p, &f| p.checked_mul(f)) {
                        Some(p) => acc.add(p),
                        None => {
                            let p: BigInt = factors.iter().map(|&f| BigInt::from(f)).product();
                            acc.add_big(&p);
                        }
                    }
                }
            }
        }
    }
    let n4 = num_traits::pow(BigInt::from(n), 4);
    Rational::new(acc.total(), n4)
}

/// `has dev₂(eps, d)`: `|d_B - d| < eps` and normalized sum `≤ eps`. Graphs
/// with an empty side never qualify.
pub fn has_dev2(b: &BipartiteGraph, eps: &Rational, d: &Rational) -> bool {
    match dev2(b, EvalMode::Fast) {
        Ok(r) => r.satisfies(eps, d),
        Err(_) => false,
    }
}

/// Floating-point dev₂, for sides too large for exact evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dev2Float {
    pub density: f64,
    pub normalized: f64,
}

pub fn dev2_float(b: &BipartiteGraph) -> Result<Dev2Float> {
    let (nu, nw) = (b.left_len(), b.right_len());
    if nu == 0 || nw == 0 {
        return Err(Error::EmptySide);
    }
    let d = b.edge_count() as f64 / (nu * nw) as f64;
    let (a, c) = (1.0 - d, -d);
    let deg: Vec<f64> = (0..nu).map(|i| b.degree(i) as f64).collect();
    let total: f64 = (0..nu)
        .into_par_iter()
        .map(|u0| {
            let mut s = 0.0;
            for u1 in u0..nu {
                let c11 = b.row(u0).and_count(b.row(u1)) as f64;
                let c10 = deg[u0] - c11;
                let c01 = deg[u1] - c11;
                let c00 = nw as f64 - deg[u0] - deg[u1] + c11;
                let inner = c11 * a * a + (c10 + c01) * a * c + c00 * c * c;
                s += if u1 == u0 { inner * inner } else { 2.0 * inner * inner };
            }
            s
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let n = (nu * nw) as f64;
    Ok(Dev2Float { density: d, normalized: total / (n * n) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::exact::int;

    fn graph(nu: usize, nw: usize, edges: &[(usize, usize)]) -> BipartiteGraph {
        let mut g = BipartiteGraph::with_sizes(nu, nw);
        for &(i, j) in edges {
            g.add_edge_at(i, j);
        }
        g
    }

    #[test]
    fn single_edge_two_by_two() {
        let g = graph(2, 2, &[(0, 0)]);
        for mode in [EvalMode::Brute, EvalMode::Fast] {
            let r = dev2(&g, mode).unwrap();
            assert_eq!(r.density, ratio(1, 4));
            assert_eq!(r.raw_sum, ratio(7, 16));
            assert_eq!(r.normalized, ratio(7, 256));
        }
    }

    #[test]
    fn complete_and_empty_are_zero() {
        let mut full = BipartiteGraph::with_sizes(3, 5);
        for i in 0..3 {
            for j in 0..5 {
                full.add_edge_at(i, j);
            }
        }
        let r = dev2(&full, EvalMode::Fast).unwrap();
        assert_eq!(r.density, int(1));
        assert!(r.raw_sum.is_zero());
        let r = dev2(&BipartiteGraph::with_sizes(4, 2), EvalMode::Brute).unwrap();
        assert!(r.raw_sum.is_zero());
        assert!(has_dev2(&full, &ratio(1, 10), &int(1)));
        assert!(!has_dev2(&full, &ratio(1, 10), &ratio(1, 2)));
    }

    #[test]
    fn empty_side_is_an_error() {
        assert_eq!(dev2(&BipartiteGraph::with_sizes(0, 2), EvalMode::Fast), Err(Error::EmptySide));
    }

    #[test]
    fn float_path_tracks_exact() {
        let g = graph(5, 4, &[(0, 0), (1, 2), (2, 2), (3, 1), (4, 3), (0, 3)]);
        let exact = dev2(&g, EvalMode::Fast).unwrap();
        let fl = dev2_float(&g).unwrap();
        let want = crate::model::exact::to_f64(&exact.normalized);
        assert!((fl.normalized - want).abs() < 1e-12);
    }
}
