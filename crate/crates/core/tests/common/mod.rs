//! Independent oracles and instance builders shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;
use vc2reg::generators::gen_random_triad;
use vc2reg::model::exact::{int, ratio, Rational};
use vc2reg::pipeline::PipelineReport;
use vc2reg::{rng, BipartiteGraph, Decomposition, DecompositionIndex, Hypergraph3, Triad, TriadAddress, TriadView};

/// dev₂ raw sum and normalized sum straight from the definition.
pub fn dev2_oracle(b: &BipartiteGraph) -> (Rational, Rational) {
    let (nu, nw) = (b.left_len(), b.right_len());
    let n = (nu * nw) as i128;
    let e = b.edge_count() as i128;
    // g·n = n - e on edges, -e off edges.
    let g = |u: usize, w: usize| if b.has_edge_at(u, w) { n - e } else { -e };
    let mut s: i128 = 0;
    for u0 in 0..nu {
        for u1 in 0..nu {
            for w0 in 0..nw {
                for w1 in 0..nw {
                    s += g(u0, w0) * g(u0, w1) * g(u1, w0) * g(u1, w1);
                }
            }
        }
    }
    let raw = Rational::new(s.into(), num_traits::pow(num_bigint::BigInt::from(n), 4));
    let norm = &raw / int((nu * nu * nw * nw) as u64);
    (raw, norm)
}

/// dev₂,₃ raw sum, normalized sum and relative density from the definition.
pub fn dev23_oracle(h: &Hypergraph3, g: &TriadView<'_>) -> (Rational, Rational, Rational) {
    let [a, b, c] = g.sizes();
    let mut total: i128 = 0;
    let mut on: i128 = 0;
    let mut cell = vec![None; a * b * c];
    for u in 0..a {
        for w in 0..b {
            for z in 0..c {
                if g.g01.has_edge_at(u, w) && g.g02.has_edge_at(u, z) && g.g12.has_edge_at(w, z) {
                    let (x, y, t) = g.labels(u, w, z);
                    let inh = h.contains(x, y, t);
                    total += 1;
                    on += i128::from(inh);
                    cell[(u * b + w) * c + z] = Some(inh);
                }
            }
        }
    }
    let d3 = if total == 0 { int(0) } else { ratio(on as u64, total as u64) };
    // h·total = total - on on H-triangles, -on on other triangles, 0 elsewhere.
    let hv = |u: usize, w: usize, z: usize| match cell[(u * b + w) * c + z] {
        Some(true) => total - on,
        Some(false) => -on,
        None => 0,
    };
    let mut s: i128 = 0;
    for u0 in 0..a {
        for u1 in 0..a {
            for w0 in 0..b {
                for w1 in 0..b {
                    for z0 in 0..c {
                        for z1 in 0..c {
                            let mut p = 1i128;
                            for (u, w, z) in [
                                (u0, w0, z0),
                                (u0, w0, z1),
                                (u0, w1, z0),
                                (u0, w1, z1),
                                (u1, w0, z0),
                                (u1, w0, z1),
                                (u1, w1, z0),
                                (u1, w1, z1),
                            ] {
                                p *= hv(u, w, z);
                                if p == 0 {
                                    break;
                                }
                            }
                            s += p;
                        }
                    }
                }
            }
        }
    }
    let raw = if total == 0 {
        int(0)
    } else {
        Rational::new(s.into(), num_traits::pow(num_bigint::BigInt::from(total), 8))
    };
    let norm = &raw / num_traits::pow(int((a * b * c) as u64), 2);
    (raw, norm, d3)
}

/// Random bipartite graph with sides in `1..=max_side` and random density.
pub fn random_bipartite(seed: u64, max_side: usize) -> BipartiteGraph {
    let mut r = rng::stream(seed, "test-bipartite", &[max_side as u64]);
    let (nu, nw) = (r.gen_range(1..=max_side), r.gen_range(1..=max_side));
    let p = r.gen_range(0.0..=1.0);
    let mut g = BipartiteGraph::with_sizes(nu, nw);
    for u in 0..nu {
        for w in 0..nw {
            if r.gen_bool(p) {
                g.add_edge_at(u, w);
            }
        }
    }
    g
}

/// Random triad with sides in `1..=max_side` and a random 3-graph on its
/// triangles, each triangle kept with probability `q`.
pub fn random_triad_with_h(seed: u64, max_side: usize, q: Option<f64>) -> (Triad, Hypergraph3) {
    let mut r = rng::stream(seed, "test-triad", &[max_side as u64]);
    let (a, b, c) = (r.gen_range(1..=max_side), r.gen_range(1..=max_side), r.gen_range(1..=max_side));
    let p = [ratio(1, 4), ratio(1, 2), ratio(3, 4), int(1)][r.gen_range(0..4)].clone();
    let t = gen_random_triad(a, b, c, &p, seed).unwrap();
    let q = q.unwrap_or_else(|| r.gen_range(0.0..=1.0));
    let h = h_on_triangles(&t.view(), a + b + c, q, &mut r);
    (t, h)
}

pub fn h_on_triangles(v: &TriadView<'_>, n: usize, q: f64, r: &mut impl Rng) -> Hypergraph3 {
    let mut edges = Vec::new();
    v.for_each_triangle(|u, w, z| {
        if r.gen_bool(q) {
            edges.push(v.labels(u, w, z));
        }
    });
    Hypergraph3::from_triples(n, edges).unwrap()
}

/// Triangles of every triad, recounted by bucketing each cross triple by the
/// labels of its three pairs; checked against the triad views and against
/// the number of cross triples.
pub fn triple_partition_recount(p: &Decomposition, n: usize) -> Result<(), String> {
    let idx = DecompositionIndex::new(p, n).map_err(|e| e.to_string())?;
    let mut buckets: BTreeMap<TriadAddress, u64> = BTreeMap::new();
    let mut cross = 0u64;
    for x in 0..n as u32 {
        for y in x + 1..n as u32 {
            for z in y + 1..n as u32 {
                let mut v = [(idx.part_of(x), x), (idx.part_of(y), y), (idx.part_of(z), z)];
                v.sort();
                if v[0].0 == v[1].0 || v[1].0 == v[2].0 {
                    continue;
                }
                cross += 1;
                let (i, j, s) = (v[0].0, v[1].0, v[2].0);
                let lab = |a: u32, b: u32| idx.pair_label(a, b).expect("cross pair has a label").1 as usize;
                let addr =
                    TriadAddress { i, j, s, alpha: lab(v[0].1, v[1].1), beta: lab(v[0].1, v[2].1), gamma: lab(v[1].1, v[2].1) };
                *buckets.entry(addr).or_default() += 1;
            }
        }
    }
    if idx.cross_triples() != cross as u128 {
        return Err(format!("cross triples {} != recount {cross}", idx.cross_triples()));
    }
    let mut sum = 0u64;
    for addr in idx.triad_addresses() {
        let t = idx.triad(addr).triangle_count();
        sum += t;
        if t != buckets.get(&addr).copied().unwrap_or(0) {
            return Err(format!("triad {addr:?}: {t} triangles, recount {:?}", buckets.get(&addr)));
        }
    }
    if sum != cross {
        return Err(format!("sum over triads {sum} != cross triples {cross}"));
    }
    Ok(())
}

/// Recounts the report's cardinalities from the input decomposition, the
/// clusters and the splits.
pub fn pipeline_recount(p: &Decomposition, q: &Decomposition, n: usize, r: &PipelineReport) -> Result<(), String> {
    let v = q.validate(n);
    if !v.ok {
        return Err(format!("Q does not validate: {:?}", v.violations.first()));
    }
    if q.pair_parts.values().any(|parts| parts.len() != r.ell1) {
        return Err("Q has a class without exactly ell1 parts".into());
    }
    triple_partition_recount(p, n)?;
    triple_partition_recount(q, n)?;

    let clusters: BTreeMap<(usize, usize), &vc2reg::pipeline::PairClusters> =
        r.clusters.iter().map(|c| ((c.i, c.j), c)).collect();
    let mut y = [0u64; 4];
    let mut counts = [0usize; 4];
    for c in &r.cells {
        let size = (clusters[&(c.i, c.j)].clusters[c.u].members.len()
            * clusters[&(c.i, c.s)].clusters[c.v].members.len()
            * clusters[&(c.j, c.s)].clusters[c.w].members.len()) as u64;
        if size != c.size {
            return Err(format!("cell size {} != recount {size}", c.size));
        }
        for k in 0..=c.stage as usize {
            y[k] += size;
            counts[k] += 1;
        }
    }
    let o = &r.omega;
    if [o.omega, o.omega1, o.omega2, o.omega3] != counts || [o.y0, o.y1, o.y2, o.y3] != y {
        return Err(format!("omega counts {o:?} != recount {counts:?} {y:?}"));
    }
    if !o.monotone() {
        return Err(format!("omega filtering is not monotone: {o:?}"));
    }

    let idx = DecompositionIndex::new(p, n).map_err(|e| e.to_string())?;
    let s_of: BTreeMap<(usize, usize, usize), usize> = r.splits.iter().map(|s| ((s.i, s.j, s.u), s.s)).collect();
    for c in &r.cells {
        let Some(sg) = &c.sigma else { continue };
        let ss = [s_of[&(c.i, c.j, c.u)], s_of[&(c.i, c.s, c.v)], s_of[&(c.j, c.s, c.w)]];
        let sigma0 = (ss[0] + 1) * (ss[1] + 1) * (ss[2] + 1);
        if sg.sigma0 != sigma0 || sg.sigma1 + sg.sigma2 != sg.sigma0 || sg.sigma3 + sg.sigma4 != sg.sigma2 {
            return Err(format!("sigma counts {sg:?} inconsistent with s = {ss:?}"));
        }
        let mem = |i: usize, j: usize, u: usize| clusters[&(i, j)].clusters[u].members.clone();
        let (mu, mv, mw) = (mem(c.i, c.j, c.u), mem(c.i, c.s, c.v), mem(c.j, c.s, c.w));
        let mut tri = 0u64;
        for &x in &idx.parts()[c.i] {
            for &y in &idx.parts()[c.j] {
                let a = idx.pair_label(x, y).unwrap().1 as usize;
                if !mu.contains(&a) {
                    continue;
                }
                for &z in &idx.parts()[c.s] {
                    let b = idx.pair_label(x, z).unwrap().1 as usize;
                    let g = idx.pair_label(y, z).unwrap().1 as usize;
                    tri += u64::from(mv.contains(&b) && mw.contains(&g));
                }
            }
        }
        if tri != sg.triangles {
            return Err(format!("merged triad triangles {} != recount {tri}", sg.triangles));
        }
    }
    Ok(())
}
