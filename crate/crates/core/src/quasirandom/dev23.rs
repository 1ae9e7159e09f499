use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::dev2::{dev2, Dev2Result, EvalMode};
use super::octahedral::{octahedral_brute, SparseCube};
use crate::error::Result;
use crate::model::exact::{int, ratio, Rational};
use crate::model::{Hypergraph3, TriadView};

/// dev₂,₃ statistics of `(H|G, G)` for a triad `G`.
///
/// With `d3 = |H ∩ K₃(G)| / |K₃(G)|`, `h = 1 - d3` on triangles in `H`,
/// `-d3` on other triangles and `0` off triangles. `raw_sum` is the sum over
/// `(u0,u1,w0,w1,z0,z1)` of the product of `h` over the eight corners.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dev23Result {
    pub d3: Rational,
    pub d2_per_pair: [Rational; 3],
    pub raw_sum: Rational,
    /// `raw_sum / (|U|²|W|²|Z|²)`.
    pub normalized_bound_lhs: Rational,
    pub pair_dev2: Option<[Dev2Result; 3]>,
    pub triangles: u64,
    pub edges_on_triangles: u64,
    pub sizes: [usize; 3],
}

impl Dev23Result {
    pub fn mean_d2(&self) -> Rational {
        (&self.d2_per_pair[0] + &self.d2_per_pair[1] + &self.d2_per_pair[2]) / int(3)
    }

    /// The dev₂,₃(ε₁, ε₂) predicate at `d2` (the mean pair density when `None`).
    pub fn is_regular(&self, eps1: &Rational, eps2: &Rational, d2: Option<&Rational>) -> bool {
        let d2 = d2.cloned().unwrap_or_else(|| self.mean_d2());
        let Some(pairs) = &self.pair_dev2 else { return false };
        if !pairs.iter().all(|p| p.satisfies(eps2, &d2)) {
            return false;
        }
        let bound = eps1 * crate::model::exact::pow(&d2, 12);
        self.normalized_bound_lhs <= bound
    }
}

/// Positions `(u, w, z)` of every triangle of the triad, in lexicographic order.
pub fn triangle_set(g: &TriadView<'_>) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    g.for_each_triangle(|u, w, z| out.push((u, w, z)));
    out
}

pub fn dev23(h: &Hypergraph3, g: &TriadView<'_>, mode: EvalMode) -> Result<Dev23Result> {
    let [a, b, c] = g.sizes();
    let graphs = g.pair_graphs();
    let pair_dev2 = if a > 0 && b > 0 && c > 0 {
        Some([dev2(graphs[0], mode)?, dev2(graphs[1], mode)?, dev2(graphs[2], mode)?])
    } else {
        None
    };
    Ok(dev23_with_pairs(h, g, mode, pair_dev2))
}

/// [`dev23`] with the pair statistics supplied by the caller.
pub(crate) fn dev23_with_pairs(
    h: &Hypergraph3,
    g: &TriadView<'_>,
    mode: EvalMode,
    pair_dev2: Option<[Dev2Result; 3]>,
) -> Dev23Result {
    let [a, b, c] = g.sizes();
    let graphs = g.pair_graphs();
    let d2_per_pair = [0, 1, 2].map(|k| {
        let (l, r) = (graphs[k].left_len(), graphs[k].right_len());
        if l == 0 || r == 0 {
            Rational::zero()
        } else {
            ratio(graphs[k].edge_count() as u64, (l * r) as u64)
        }
    });

    let mut tri = Vec::new();
    g.for_each_triangle(|u, w, z| {
        let (x, y, t) = g.labels(u, w, z);
        tri.push((u, w, z, h.contains(x, y, t)));
    });
    let total = tri.len() as u64;
    let on = tri.iter().filter(|t| t.3).count() as u64;
    let d3 = if total == 0 { Rational::zero() } else { ratio(on, total) };

    let raw_sum = if on == 0 || on == total {
        Rational::zero()
    } else {
        match mode {
            EvalMode::Fast => {
                let gg = total.gcd(&on);
                let (pos, neg) = (((total - on) / gg) as i64, -((on / gg) as i64));
                let mut cube = SparseCube::new(b, c);
                for &(u, w, z, inh) in &tri {
                    cube.push(u, w, z, if inh { pos } else { neg });
                }
                let den = num_traits::pow(BigInt::from(total / gg), 8);
                Rational::new(cube.octahedral_sum(), den)
            }
            EvalMode::Brute => {
                let mut dense = vec![0i64; a * b * c];
                for &(u, w, z, inh) in &tri {
                    dense[(u * b + w) * c + z] = if inh { (total - on) as i64 } else { -(on as i64) };
                }
                let den = num_traits::pow(BigInt::from(total), 8);
                Rational::new(octahedral_brute(&dense, a, b, c), den)
            }
        }
    };
    let n2 = BigInt::from((a * b * c) as u64).pow(2);
    let normalized_bound_lhs = if n2.is_zero() { Rational::zero() } else { &raw_sum / Rational::from_integer(n2) };
    Dev23Result {
        d3,
        d2_per_pair,
        raw_sum,
        normalized_bound_lhs,
        pair_dev2,
        triangles: total,
        edges_on_triangles: on,
        sizes: [a, b, c],
    }
}

/// `(H|G, G)` has dev₂,₃(ε₁, ε₂): every pair graph has dev₂(ε₂, d₂) and
/// `raw_sum ≤ ε₁ d₂¹² |U|²|W|²|Z|²`. `d2` defaults to the mean pair density.
pub fn has_dev23(
    h: &Hypergraph3,
    g: &TriadView<'_>,
    eps1: &Rational,
    eps2: &Rational,
    d2: Option<&Rational>,
) -> Result<bool> {
    Ok(dev23(h, g, EvalMode::Fast)?.is_regular(eps1, eps2, d2))
}

/// Number of ordered 6-tuples `(u0,u1,w0,w1,z0,z1)` whose eight corners are
/// all triangles of the triad.
pub fn k222_count(g: &TriadView<'_>) -> BigInt {
    indicator_octahedra(g, |_, _, _| true)
}

/// Octahedra all of whose corners are triangles accepted by `keep`.
pub(crate) fn indicator_octahedra(g: &TriadView<'_>, mut keep: impl FnMut(usize, usize, usize) -> bool) -> BigInt {
    let [_, b, c] = g.sizes();
    let mut cube = SparseCube::new(b, c);
    g.for_each_triangle(|u, w, z| {
        if keep(u, w, z) {
            cube.push(u, w, z, 1);
        }
    });
    cube.octahedral_sum()
}

/// Number of `(u1, w1, z1)` such that all eight corners of the box spanned
/// with the triangle at positions `(u, w, z)` are triangles.
pub fn k222_link(g: &TriadView<'_>, u: usize, w: usize, z: usize) -> Result<u64> {
    let [a, b, c] = g.sizes();
    if u >= a || w >= b || z >= c || !g.is_triangle(u, w, z) {
        return Err(crate::Error::Precondition(format!("corner ({u},{w},{z}) is not a triangle")));
    }
    let mut count = 0u64;
    for u1 in 0..a {
        if !g.is_triangle(u1, w, z) {
            continue;
        }
        for w1 in 0..b {
            if !(g.is_triangle(u, w1, z) && g.is_triangle(u1, w1, z)) {
                continue;
            }
            for z1 in 0..c {
                if g.is_triangle(u, w, z1)
                    && g.is_triangle(u1, w, z1)
                    && g.is_triangle(u, w1, z1)
                    && g.is_triangle(u1, w1, z1)
                {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

/// Floating-point dev₂,₃ for triads whose parts are too large for exact
/// evaluation. Returns `(d3, normalized_bound_lhs)`.
pub fn dev23_float(h: &Hypergraph3, g: &TriadView<'_>) -> (f64, f64) {
    let [a, b, c] = g.sizes();
    let mut tri = Vec::new();
    g.for_each_triangle(|u, w, z| {
        let (x, y, t) = g.labels(u, w, z);
        tri.push((u, w, z, h.contains(x, y, t)));
    });
    if tri.is_empty() {
        return (0.0, 0.0);
    }
    let d3 = tri.iter().filter(|t| t.3).count() as f64 / tri.len() as f64;
    let mut per_z: Vec<Vec<(usize, f64)>> = vec![Vec::new(); c];
    for &(u, w, z, inh) in &tri {
        per_z[z].push((u * b + w, if inh { 1.0 - d3 } else { -d3 }));
    }
    let mut p = vec![0.0f64; b * b];
    let mut total = 0.0;
    for z0 in 0..c {
        for z1 in z0..c {
            p.iter_mut().for_each(|x| *x = 0.0);
            let mut row: Vec<(usize, f64)> = Vec::new();
            let mut cur = usize::MAX;
            let flush = |row: &mut Vec<(usize, f64)>, p: &mut Vec<f64>| {
                for &(w0, m0) in row.iter() {
                    for &(w1, m1) in row.iter() {
                        p[w0 * b + w1] += m0 * m1;
                    }
                }
                row.clear();
            };
            let (x, y) = (&per_z[z0], &per_z[z1]);
            let (mut i, mut j) = (0, 0);
            while i < x.len() && j < y.len() {
                if x[i].0 < y[j].0 {
                    i += 1;
                } else if y[j].0 < x[i].0 {
                    j += 1;
                } else {
                    let u = x[i].0 / b;
                    if u != cur {
                        flush(&mut row, &mut p);
                        cur = u;
                    }
                    row.push((x[i].0 % b, x[i].1 * y[j].1));
                    i += 1;
                    j += 1;
                }
            }
            flush(&mut row, &mut p);
            let s: f64 = p.iter().map(|v| v * v).sum();
            total += if z0 == z1 { s } else { 2.0 * s };
        }
    }
    let n = (a * b * c) as f64;
    (d3, total / (n * n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Triad;

    fn full_triad(a: usize, b: usize, c: usize) -> Triad {
        let mut t = Triad::from_sizes(a, b, c);
        for g in t.pair_graphs.iter_mut() {
            for i in 0..g.left_len() {
                for j in 0..g.right_len() {
                    g.add_edge_at(i, j);
                }
            }
        }
        t
    }

    #[test]
    fn complete_triad_counts() {
        let t = full_triad(2, 3, 4);
        assert_eq!(triangle_set(&t.view()).len(), 24);
        assert_eq!(k222_count(&t.view()), BigInt::from(4 * 9 * 16));
        assert_eq!(k222_link(&t.view(), 0, 0, 0).unwrap(), 24);
    }

    #[test]
    fn h_containing_all_triangles_is_flat() {
        let t = full_triad(3, 3, 3);
        let v = t.view();
        let triples = triangle_set(&v).into_iter().map(|(u, w, z)| v.labels(u, w, z));
        let h = Hypergraph3::from_triples(9, triples).unwrap();
        let r = dev23(&h, &t.view(), EvalMode::Fast).unwrap();
        assert_eq!(r.d3, int(1));
        assert!(r.raw_sum.is_zero());
        let empty = Hypergraph3::empty(9);
        let r = dev23(&empty, &t.view(), EvalMode::Brute).unwrap();
        assert!(r.d3.is_zero() && r.raw_sum.is_zero());
    }

    #[test]
    fn single_triple_matches_closed_form() {
        // One H-edge among 8 triangles of a 2×2×2 complete triad: d3 = 1/8.
        let t = full_triad(2, 2, 2);
        let h = Hypergraph3::from_triples(6, [(0, 2, 4)]).unwrap();
        let fast = dev23(&h, &t.view(), EvalMode::Fast).unwrap();
        let brute = dev23(&h, &t.view(), EvalMode::Brute).unwrap();
        assert_eq!(fast, brute);
        assert_eq!(fast.d3, ratio(1, 8));
    }
}
