//! Seeded instance generators.
//!
//! Every generator reads from [`rng::stream`] sub-streams labelled by the
//! generator name and its size parameters, in a fixed documented order, so an
//! instance is a pure function of its parameters and seed.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::exact::{int, ratio, Rational};
use crate::model::{BipartiteGraph, Color, Decomposition, EdgeColoredBipartiteGraph, Hypergraph3, Triad, TriadAddress};
use crate::rng;
use crate::vc::Vc2Witness;

/// `(num, den)` of a probability in `[0, 1]` with both fitting in `u64`.
fn prob(p: &Rational) -> Result<(u64, u64)> {
    if *p < int(0) || *p > int(1) {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    match (p.numer().to_u64(), p.denom().to_u64()) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::Overflow(format!("probability {p} does not fit in 64 bits"))),
    }
}

#[inline]
fn coin(r: &mut ChaCha8Rng, (num, den): (u64, u64)) -> bool {
    r.gen_range(0..den) < num
}

/// Each of the `nu · nw` pairs, in row-major order, is an edge with probability `p`.
pub fn gen_random_bipartite(nu: usize, nw: usize, p: &Rational, seed: u64) -> Result<BipartiteGraph> {
    let pr = prob(p)?;
    let mut r = rng::stream(seed, "random-bipartite", &[nu as u64, nw as u64]);
    let mut g = BipartiteGraph::with_sizes(nu, nw);
    for i in 0..nu {
        for j in 0..nw {
            if coin(&mut r, pr) {
                g.add_edge_at(i, j);
            }
        }
    }
    Ok(g)
}

/// A triad on parts of sizes `(a, b, c)` whose three pair graphs are
/// independent random bipartite graphs of density `p`.
pub fn gen_random_triad(a: usize, b: usize, c: usize, p: &Rational, seed: u64) -> Result<Triad> {
    let pr = prob(p)?;
    let mut r = rng::stream(seed, "random-triad", &[a as u64, b as u64, c as u64]);
    let mut t = Triad::from_sizes(a, b, c);
    for g in t.pair_graphs.iter_mut() {
        for i in 0..g.left_len() {
            for j in 0..g.right_len() {
                if coin(&mut r, pr) {
                    g.add_edge_at(i, j);
                }
            }
        }
    }
    Ok(t)
}

/// Each triple of `0..n`, in lexicographic order, is an edge with probability `p`.
pub fn gen_random_hypergraph(n: usize, p: &Rational, seed: u64) -> Result<Hypergraph3> {
    let pr = prob(p)?;
    let mut r = rng::stream(seed, "random-hypergraph", &[n as u64]);
    let mut edges = Vec::new();
    for x in 0..n as u32 {
        for y in x + 1..n as u32 {
            for z in y + 1..n as u32 {
                if coin(&mut r, pr) {
                    edges.push((x, y, z));
                }
            }
        }
    }
    Hypergraph3::from_triples(n, edges)
}

/// Which group triples are dense.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "kind", content = "dense")]
pub enum DensityProfile {
    AllHi,
    AllLo,
    /// Each `(i, j, s, g_ij, g_is, g_js)` independently with probability 1/2.
    Random,
    /// Dense iff `g_ij + g_is + g_js` is even.
    #[default]
    Parity,
    /// Dense exactly on the listed `[g_ij, g_is, g_js]`, for every part triple.
    Explicit(Vec<[usize; 3]>),
}

/// Parameters of [`gen_planted_decomposition`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantedParams {
    pub n: usize,
    pub t: usize,
    pub ell: usize,
    #[serde(default = "one")]
    pub groups_per_pair: usize,
    #[serde(default)]
    pub profile: DensityProfile,
    #[serde(with = "crate::model::exact::serde_rational", default = "default_hi")]
    pub hi: Rational,
    #[serde(with = "crate::model::exact::serde_rational", default = "default_lo")]
    pub lo: Rational,
    /// Fraction of triads whose density is set to 1/2 instead of the profile.
    #[serde(with = "crate::model::exact::serde_rational", default = "zero")]
    pub noise: Rational,
}

fn one() -> usize {
    1
}
fn default_hi() -> Rational {
    ratio(19, 20)
}
fn default_lo() -> Rational {
    ratio(1, 20)
}
fn zero() -> Rational {
    int(0)
}

impl PlantedParams {
    pub fn new(n: usize, t: usize, ell: usize, groups_per_pair: usize) -> Self {
        PlantedParams {
            n,
            t,
            ell,
            groups_per_pair,
            profile: DensityProfile::Parity,
            hi: default_hi(),
            lo: default_lo(),
            noise: zero(),
        }
    }
}

/// Planted densities of one triad.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedTriad {
    pub address: TriadAddress,
    #[serde(with = "crate::model::exact::serde_rational")]
    pub density: Rational,
    pub noisy: bool,
    pub triangles: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedTruth {
    pub triads: Vec<PlantedTriad>,
    /// Behavior group of each pair part, keyed `"i,j"`.
    pub part_groups: BTreeMap<String, Vec<usize>>,
    /// Share of cross triples lying in triads that were not made noisy.
    #[serde(with = "crate::model::exact::serde_rational")]
    pub homogeneous_fraction: Rational,
    pub noisy_triads: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlantedInstance {
    pub hypergraph: Hypergraph3,
    pub decomposition: Decomposition,
    pub truth: PlantedTruth,
    pub params: PlantedParams,
    pub seed: u64,
}

/// Equipartition of `0..n` into `t` contiguous blocks, larger blocks first.
pub fn equipartition(n: usize, t: usize) -> Vec<Vec<u32>> {
    let (q, r) = (n / t, n % t);
    let mut out = Vec::with_capacity(t);
    let mut next = 0u32;
    for k in 0..t {
        let size = q + usize::from(k < r);
        out.push((next..next + size as u32).collect());
        next += size as u32;
    }
    out
}

/// A `(t, ℓ)`-decomposition with uniformly random pair-part labels, pair
/// parts grouped into behavior groups, and a 3-graph whose density on each
/// triad is `hi` or `lo` by the profile of its group triple.
///
/// Streams, in order of use: `planted-labels` (one label per cross pair,
/// class pairs in lexicographic order, row-major), `planted-groups` (one
/// shuffle per class pair), `planted-profile`, `planted-noise` (one draw per
/// triad address in lexicographic order) and `planted-triples` (one draw
/// per cross triple, by part triple then lexicographically).
pub fn gen_planted_decomposition(params: &PlantedParams, seed: u64) -> Result<PlantedInstance> {
    let PlantedParams { n, t, ell, groups_per_pair: groups, .. } = *params;
    if t < 3 || ell == 0 || groups == 0 || groups > ell || n < t {
        return Err(Error::InvalidParameter(format!(
            "planted decomposition needs t >= 3, n >= t and 1 <= groups <= ell (n={n}, t={t}, ell={ell}, groups={groups})"
        )));
    }
    let hi = prob(&params.hi)?;
    let lo = prob(&params.lo)?;
    let noise = prob(&params.noise)?;
    let mid = (1u64, 2u64);
    let parts = equipartition(n, t);
    let sz = [n as u64, t as u64, ell as u64, groups as u64];

    let mut r = rng::stream(seed, "planted-labels", &sz);
    let mut labels: BTreeMap<(usize, usize), (usize, Vec<u32>)> = BTreeMap::new();
    for i in 0..t {
        for j in i + 1..t {
            let table = (0..parts[i].len() * parts[j].len()).map(|_| r.gen_range(0..ell as u32)).collect();
            labels.insert((i, j), (ell, table));
        }
    }
    let mut r = rng::stream(seed, "planted-groups", &sz);
    let mut part_group: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for &key in labels.keys() {
        let mut g: Vec<usize> = (0..ell).map(|a| a % groups).collect();
        g.shuffle(&mut r);
        part_group.insert(key, g);
    }

    let mut r = rng::stream(seed, "planted-profile", &sz);
    let triples: Vec<(usize, usize, usize)> =
        (0..t).flat_map(|i| (i + 1..t).flat_map(move |j| (j + 1..t).map(move |s| (i, j, s)))).collect();
    let g3 = groups * groups * groups;
    let mut dense = vec![false; triples.len() * g3];
    for (k, _) in triples.iter().enumerate() {
        for code in 0..g3 {
            let (gu, gv, gw) = (code / (groups * groups), code / groups % groups, code % groups);
            dense[k * g3 + code] = match &params.profile {
                DensityProfile::AllHi => true,
                DensityProfile::AllLo => false,
                DensityProfile::Random => r.gen_bool(0.5),
                DensityProfile::Parity => (gu + gv + gw) % 2 == 0,
                DensityProfile::Explicit(list) => list.contains(&[gu, gv, gw]),
            };
        }
    }

    let mut r = rng::stream(seed, "planted-noise", &sz);
    let per = ell * ell * ell;
    let mut triad_prob = vec![(0u64, 1u64); triples.len() * per];
    let mut triad_noisy = vec![false; triples.len() * per];
    let mut triad_density = vec![int(0); triples.len() * per];
    for (k, &(i, j, s)) in triples.iter().enumerate() {
        for code in 0..per {
            let (a, b, c) = (code / (ell * ell), code / ell % ell, code % ell);
            let g = (part_group[&(i, j)][a], part_group[&(i, s)][b], part_group[&(j, s)][c]);
            let gc = (g.0 * groups + g.1) * groups + g.2;
            let noisy = coin(&mut r, noise);
            let idx = k * per + code;
            triad_noisy[idx] = noisy;
            let (p, d) = if noisy {
                (mid, ratio(1, 2))
            } else if dense[k * g3 + gc] {
                (hi, params.hi.clone())
            } else {
                (lo, params.lo.clone())
            };
            triad_prob[idx] = p;
            triad_density[idx] = d;
        }
    }

    let mut r = rng::stream(seed, "planted-triples", &sz);
    let mut edges = Vec::new();
    let mut tri_count = vec![0u64; triples.len() * per];
    for (k, &(i, j, s)) in triples.iter().enumerate() {
        let (lij, lis, ljs) = (&labels[&(i, j)].1, &labels[&(i, s)].1, &labels[&(j, s)].1);
        let (nj, ns) = (parts[j].len(), parts[s].len());
        for (a, &x) in parts[i].iter().enumerate() {
            for (b, &y) in parts[j].iter().enumerate() {
                let alpha = lij[a * nj + b] as usize;
                for (c, &z) in parts[s].iter().enumerate() {
                    let beta = lis[a * ns + c] as usize;
                    let gamma = ljs[b * ns + c] as usize;
                    let idx = k * per + (alpha * ell + beta) * ell + gamma;
                    tri_count[idx] += 1;
                    if coin(&mut r, triad_prob[idx]) {
                        edges.push((x, y, z));
                    }
                }
            }
        }
    }
    let hypergraph = Hypergraph3::from_triples(n, edges)?;
    let decomposition = Decomposition::from_labels(parts, &labels)?;

    let mut planted = Vec::with_capacity(triad_prob.len());
    let (mut good, mut total) = (0u64, 0u64);
    for (k, &(i, j, s)) in triples.iter().enumerate() {
        for code in 0..per {
            let idx = k * per + code;
            let address =
                TriadAddress { i, j, s, alpha: code / (ell * ell), beta: code / ell % ell, gamma: code % ell };
            total += tri_count[idx];
            if !triad_noisy[idx] {
                good += tri_count[idx];
            }
            planted.push(PlantedTriad {
                address,
                density: triad_density[idx].clone(),
                noisy: triad_noisy[idx],
                triangles: tri_count[idx],
            });
        }
    }
    let truth = PlantedTruth {
        noisy_triads: triad_noisy.iter().filter(|&&b| b).count(),
        triads: planted,
        part_groups: part_group.into_iter().map(|((i, j), g)| (format!("{i},{j}"), g)).collect(),
        homogeneous_fraction: if total == 0 { int(1) } else { ratio(good, total) },
    };
    Ok(PlantedInstance { hypergraph, decomposition, truth, params: params.clone(), seed })
}

/// Parameters of [`gen_clustered_colored`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusteredParams {
    pub a: usize,
    pub b: usize,
    pub clusters: usize,
    #[serde(with = "crate::model::exact::serde_rational")]
    pub sep: Rational,
    #[serde(with = "crate::model::exact::serde_rational")]
    pub eps2_mass: Rational,
    /// Per-vertex flip fraction; `sep / 32` when absent.
    #[serde(with = "crate::model::exact::serde_rational_opt", default)]
    pub noise: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusteredInstance {
    pub graph: EdgeColoredBipartiteGraph,
    /// Planted cluster of each left vertex.
    pub labels: Vec<usize>,
    pub prototypes: Vec<Vec<bool>>,
}

/// Prototype 0/1 rows on `B` at pairwise Hamming distance at least `sep·b`,
/// left vertices assigned to prototypes in a balanced random order, each
/// copying its prototype with exactly `round(noise·b)` flipped entries, and
/// then `⌊eps2_mass·a·b⌋` distinct pairs recolored 2.
///
/// Streams: `clustered-prototypes`, `clustered-labels`, `clustered-flips`,
/// `clustered-twos`.
pub fn gen_clustered_colored(params: &ClusteredParams, seed: u64) -> Result<ClusteredInstance> {
    let ClusteredParams { a, b, clusters, .. } = *params;
    let sep = &params.sep;
    if clusters == 0 || clusters > a.max(1) || b == 0 {
        return Err(Error::InvalidParameter(format!("need 1 <= clusters <= a and b >= 1 (a={a}, b={b}, clusters={clusters})")));
    }
    if *sep <= int(0) || *sep >= int(1) || (clusters > 1 && *sep > ratio(1, 2)) {
        return Err(Error::InvalidParameter(format!(
            "separation {sep} is infeasible for {clusters} random prototypes (need 0 < sep <= 1/2)"
        )));
    }
    prob(&params.eps2_mass)?;
    let noise = params.noise.clone().unwrap_or_else(|| sep / int(32));
    prob(&noise)?;
    let sz = [a as u64, b as u64, clusters as u64];
    let min_dist = (sep * int(b as u64)).ceil().to_integer().to_usize().unwrap_or(usize::MAX);

    let mut r = rng::stream(seed, "clustered-prototypes", &sz);
    let mut prototypes: Vec<Vec<bool>> = Vec::new();
    let mut tries = 0usize;
    while prototypes.len() < clusters {
        tries += 1;
        if tries > 10_000 * clusters {
            return Err(Error::InvalidParameter(format!("could not place {clusters} prototypes at separation {sep}")));
        }
        let cand: Vec<bool> = (0..b).map(|_| r.gen_bool(0.5)).collect();
        if prototypes.iter().all(|p| p.iter().zip(&cand).filter(|(x, y)| x != y).count() >= min_dist) {
            prototypes.push(cand);
        }
    }

    let mut r = rng::stream(seed, "clustered-labels", &sz);
    let mut labels: Vec<usize> = (0..a).map(|i| i % clusters).collect();
    labels.shuffle(&mut r);

    let flips = (&noise * int(b as u64)).round().to_integer().to_usize().unwrap_or(0).min(b);
    let mut r = rng::stream(seed, "clustered-flips", &sz);
    let mut graph = EdgeColoredBipartiteGraph::with_sizes(a, b);
    for (i, &lab) in labels.iter().enumerate() {
        let mut row = prototypes[lab].clone();
        for j in rand::seq::index::sample(&mut r, b, flips).into_iter() {
            row[j] = !row[j];
        }
        for (j, &bit) in row.iter().enumerate() {
            if bit {
                graph.set(i, j, Color::One);
            }
        }
    }

    let count = (&params.eps2_mass * int((a * b) as u64)).floor().to_integer().to_usize().unwrap_or(0).min(a * b);
    let mut r = rng::stream(seed, "clustered-twos", &sz);
    let mut picks = rand::seq::index::sample(&mut r, a * b, count).into_vec();
    picks.sort_unstable();
    for k in picks {
        graph.set(k / b, k % b, Color::Two);
    }
    Ok(ClusteredInstance { graph, labels, prototypes })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ip2Instance {
    pub hypergraph: Hypergraph3,
    pub witness: Vc2Witness,
}

/// Explicit VC₂ witness of order `k`: vertices `a_i`, `b_j` and `c_S` for
/// every `S ⊆ [k]²`, with `a_i b_j c_S` an edge iff bit `i·k + j` of `S` is
/// set, plus `n_extra` isolated vertices. Labels are a random permutation
/// drawn from stream `ip2-labels`.
pub fn gen_ip2_hypergraph(k: usize, n_extra: usize, seed: u64) -> Result<Ip2Instance> {
    if !(1..=3).contains(&k) {
        return Err(Error::InvalidParameter(format!("planted VC2 witness needs 1 <= k <= 3, got {k}")));
    }
    let pats = 1usize << (k * k);
    let n = 2 * k + pats + n_extra;
    let mut perm: Vec<u32> = (0..n as u32).collect();
    perm.shuffle(&mut rng::stream(seed, "ip2-labels", &[k as u64, n_extra as u64]));
    let a: Vec<u32> = (0..k).map(|i| perm[i]).collect();
    let b: Vec<u32> = (0..k).map(|j| perm[k + j]).collect();
    let c: Vec<u32> = (0..pats).map(|s| perm[2 * k + s]).collect();
    let mut edges = Vec::new();
    for (s, &cs) in c.iter().enumerate() {
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                if s >> (i * k + j) & 1 == 1 {
                    edges.push((ai, bj, cs));
                }
            }
        }
    }
    Ok(Ip2Instance { hypergraph: Hypergraph3::from_triples(n, edges)?, witness: Vc2Witness { a, b, c } })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ip2_sizes() {
        let one = gen_ip2_hypergraph(1, 0, 0).unwrap();
        assert_eq!((one.hypergraph.n(), one.hypergraph.edge_count()), (4, 1));
        let two = gen_ip2_hypergraph(2, 0, 5).unwrap();
        assert_eq!((two.hypergraph.n(), two.hypergraph.edge_count()), (20, 32));
        assert!(gen_ip2_hypergraph(4, 0, 0).is_err());
    }

    #[test]
    fn all_hi_noise_free_covers_cross_triples() {
        let mut p = PlantedParams::new(12, 3, 2, 1);
        p.profile = DensityProfile::AllHi;
        p.hi = int(1);
        let inst = gen_planted_decomposition(&p, 3).unwrap();
        assert_eq!(inst.hypergraph.edge_count(), 64);
        assert_eq!(inst.truth.homogeneous_fraction, int(1));
        assert!(inst.decomposition.validate(12).ok);
    }

    #[test]
    fn clustered_extremes() {
        let params = ClusteredParams { a: 10, b: 20, clusters: 1, sep: ratio(1, 4), eps2_mass: int(1), noise: None };
        let inst = gen_clustered_colored(&params, 1).unwrap();
        assert_eq!(inst.graph.color_count(Color::Two), 200);
        let bad = ClusteredParams { clusters: 2, sep: ratio(3, 5), ..params };
        assert!(gen_clustered_colored(&bad, 1).is_err());
    }

    #[test]
    fn seeded_determinism() {
        let p = ratio(1, 3);
        assert_eq!(gen_random_bipartite(9, 7, &p, 4).unwrap(), gen_random_bipartite(9, 7, &p, 4).unwrap());
        assert_ne!(gen_random_bipartite(9, 7, &p, 4).unwrap(), gen_random_bipartite(9, 7, &p, 5).unwrap());
    }
}
