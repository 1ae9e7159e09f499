//! The decomposition-compression pipeline: from a 3-graph `H` and a regular,
//! homogeneous decomposition `P`, build a decomposition `Q` with `ℓ₁` pair
//! parts per class by clustering pair parts on their behaviour in the
//! auxiliary graphs, merging clusters and re-splitting them into quasirandom
//! parts of density `1/ℓ₁`.
//!
//! Every intermediate set of the construction is recorded in the
//! [`PipelineReport`]; the bookkeeping sets (Ψ, Ω, Tr, Σ) are computed, never
//! assumed.

pub mod schedule;
pub mod symbolic;

use std::collections::BTreeMap;

use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use schedule::{
    derive_paper_schedule, ChainCheck, DeskSchedule, Eps2Fn, PaperInputs, PaperSchedule, ScheduleFile, TuningSchedule,
};

use crate::analysis::{
    build_aux_graph, bad_pairs_psi, classify_from_metrics, equitability_from_stats, homogeneity_from_metrics,
    measure_triads, part_triple_coloring, quasirandom_parts, troublesome_triples, CoordinateClusters,
    EquitabilityReport, HomogeneitySummary, LabelCounts, PsiReport, TriadMetrics,
};
use crate::error::{Error, Result};
use crate::model::exact::{int, ratio, Rational};
use crate::model::{
    BipartiteGraph, Color, Decomposition, DecompositionIndex, EdgeColoredTripartite3Graph, Hypergraph3, TriadView,
    ValidationReport,
};
use crate::packing::{packing_cluster, verify_packing_bound};
use crate::rng;
use crate::splitting::{merge_parts, split_by_probability, split_quasirandom, SplitSummary};

/// Outcome of [`claim_hom_check`] on one cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimResult {
    /// The color `σ ∈ {0, 1}` holding the required share, if any.
    pub sigma: Option<u8>,
    #[serde(with = "crate::model::exact::serde_rational")]
    pub fraction: Rational,
    /// Part triples of the cell by color.
    pub counts: [u64; 3],
}

/// The larger of the shares of colors 0 and 1 among the part triples of
/// `K₃[groups]`, and the color reaching `threshold`.
pub fn claim_hom_check(
    r: &EdgeColoredTripartite3Graph,
    groups: [&[usize]; 3],
    threshold: &Rational,
) -> Result<ClaimResult> {
    if groups.iter().any(|g| g.is_empty()) {
        return Err(Error::Precondition("claim check on an empty cell".into()));
    }
    let c = r.count_in_box(groups[0], groups[1], groups[2]);
    let total = (c[0] + c[1] + c[2]) as u64;
    let (best, color) = if c[1] >= c[0] { (c[1], 1u8) } else { (c[0], 0u8) };
    let fraction = ratio(best as u64, total);
    let sigma = (fraction >= *threshold).then_some(color);
    Ok(ClaimResult { sigma, fraction, counts: [c[0] as u64, c[1] as u64, c[2] as u64] })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClusterSummary {
    pub index: usize,
    /// Part index of the representative.
    pub representative: usize,
    /// Part indices of the members.
    pub members: Vec<usize>,
    pub nontrivial: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairClusters {
    pub i: usize,
    pub j: usize,
    pub quasirandom_parts: usize,
    pub excluded_parts: Vec<usize>,
    pub corners: usize,
    pub m: usize,
    /// Part indices of the exceptional parts `W⁰_ij`.
    pub exceptions: Vec<usize>,
    pub clusters: Vec<ClusterSummary>,
    pub diagnostics: usize,
    /// No E₀/E₁-copy of `U(k)` in `H_ij`, when `k` is scheduled.
    pub uk_free: Option<bool>,
}

impl PairClusters {
    fn coordinates(&self, ell: usize) -> CoordinateClusters {
        let mut assignment = vec![None; ell];
        for c in &self.clusters {
            for &a in &c.members {
                assignment[a] = Some(c.index);
            }
        }
        CoordinateClusters { assignment, representatives: self.clusters.iter().map(|c| c.representative).collect() }
    }
}

/// Σ-filter counts of one cell `(ijs, uvw)` whose claim succeeded.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaCounts {
    pub sigma0: usize,
    pub sigma1: usize,
    pub sigma2: usize,
    pub sigma3: usize,
    pub sigma4: usize,
    /// Triangles of the merged triad `𝐆^{uvw}_{ijs}`.
    pub triangles: u64,
    /// Triangles of the Σ₄ triads.
    pub triangles_sigma4: u64,
}

/// One cluster triple `W^u_ij W^v_is W^w_js` of a class triple in Ω₀.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellRecord {
    pub i: usize,
    pub j: usize,
    pub s: usize,
    pub u: usize,
    pub v: usize,
    pub w: usize,
    /// `|W^u||W^v||W^w|`.
    pub size: u64,
    /// Part triples colored 2.
    pub r2: u64,
    pub troublesome: u64,
    /// Deepest filter passed: 0 for Ω, up to 3 for Ω₃.
    pub stage: u8,
    pub claim: Option<ClaimResult>,
    pub sigma: Option<SigmaCounts>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OmegaCounts {
    /// Class triples with no pair in Ψ.
    pub omega0: usize,
    pub omega: usize,
    pub omega1: usize,
    pub omega2: usize,
    pub omega3: usize,
    pub y0: u64,
    pub y1: u64,
    pub y2: u64,
    pub y3: u64,
    pub troublesome: u64,
}

impl OmegaCounts {
    /// `Ω ⊇ Ω₁ ⊇ Ω₂ ⊇ Ω₃` and the matching masses.
    pub fn monotone(&self) -> bool {
        self.omega >= self.omega1
            && self.omega1 >= self.omega2
            && self.omega2 >= self.omega3
            && self.y0 >= self.y1
            && self.y1 >= self.y2
            && self.y2 >= self.y3
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClaimTotals {
    pub checked: usize,
    pub succeeded: usize,
    pub failed: usize,
}

/// Merge and split of one nontrivial cluster.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupSplit {
    pub i: usize,
    pub j: usize,
    pub u: usize,
    /// `ρ_ij(u)`, the density of the merged graph `𝐖^u_ij`.
    #[serde(with = "crate::model::exact::serde_rational")]
    pub rho: Rational,
    /// `p_ij(u) = 1/(ρ ℓ₁)`.
    #[serde(with = "crate::model::exact::serde_rational_opt")]
    pub p: Option<Rational>,
    /// `s_ij(u)`, the number of output parts taken from this cluster.
    pub s: usize,
    /// `ρ ℓ₁` was within `δ` of the integer `s`, so the split has no remainder.
    pub integer_case: bool,
    /// `s` was lowered to keep `s_ij ≤ ℓ₁`.
    pub capped: bool,
    pub merge_bound_holds: bool,
    pub split: Option<SplitSummary>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairOutput {
    pub i: usize,
    pub j: usize,
    pub in_psi: bool,
    /// `s_ij`.
    pub s_total: usize,
    /// Pairs outside the cluster parts `X¹..X^{s_ij}`.
    pub leftover_pairs: u64,
    /// `ℓ₁ - s_ij`.
    pub leftover_slots: usize,
    /// Leftover pairs placed into cluster parts because no slot remained.
    pub folded: u64,
    pub split: Option<SplitSummary>,
}

/// Checks on an output decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub validation: ValidationReport,
    pub ell: usize,
    pub parts_per_class_equal: bool,
    pub equitability: EquitabilityReport,
    pub homogeneity: HomogeneitySummary,
    /// Cross pairs outside quasirandom parts.
    pub nonquasirandom_pairs: u64,
    /// `nonquasirandom_pairs / (n choose 2)`.
    #[serde(with = "crate::model::exact::serde_rational")]
    pub nonquasirandom_fraction: Rational,
    /// `nonquasirandom_fraction ≤ ε₁`.
    pub gamma_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InputSection {
    pub n: usize,
    pub t: usize,
    pub ell: usize,
    pub equitability: EquitabilityReport,
    pub homogeneity: HomogeneitySummary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationSummary {
    pub counts: LabelCounts,
    pub mid_density_regular: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PipelineReport {
    pub seed: u64,
    pub schedule: DeskSchedule,
    pub input: InputSection,
    pub classification: ClassificationSummary,
    pub psi: PsiReport,
    pub clusters: Vec<PairClusters>,
    pub m_max: usize,
    pub ell1: usize,
    pub omega: OmegaCounts,
    pub claims: ClaimTotals,
    pub cells: Vec<CellRecord>,
    pub splits: Vec<GroupSplit>,
    pub pairs: Vec<PairOutput>,
    /// `|Γ|`: pairs of non-Ψ classes in the leftover parts `X^{s_ij+1}..X^{ℓ₁}`.
    pub gamma_pairs: u64,
    #[serde(with = "crate::model::exact::serde_rational")]
    pub gamma_fraction: Rational,
    pub output: AuditReport,
    /// No class pair survived Ψ; `Q` is a plain re-split.
    pub degenerate: bool,
    pub warnings: Vec<String>,
}

fn sub_seed(seed: u64, label: &str, params: &[u64]) -> u64 {
    rng::stream(seed, label, params).gen()
}

fn triad_counts(h: &Hypergraph3, v: &TriadView<'_>) -> (u64, u64) {
    let (mut tri, mut on) = (0u64, 0u64);
    v.for_each_triangle(|u, w, z| {
        tri += 1;
        let (x, y, t) = v.labels(u, w, z);
        if h.contains(x, y, t) {
            on += 1;
        }
    });
    (tri, on)
}

/// Output parts of one class pair. `groups[u]` holds `𝐖^u(0), 𝐖^u(1), ..`
/// for nontrivial clusters, taken before leftover folding so that they
/// partition the merged cluster graph.
struct PairBuild {
    labels: Vec<u32>,
    splits: Vec<GroupSplit>,
    out: PairOutput,
    groups: BTreeMap<usize, Vec<BipartiteGraph>>,
    warnings: Vec<String>,
}

fn complete_graph(left: &[u32], right: &[u32]) -> BipartiteGraph {
    BipartiteGraph::unchecked(left.to_vec(), right.to_vec()).complement()
}

fn write_labels(labels: &mut [u32], cols: usize, g: &BipartiteGraph, label: u32) {
    for (a, b) in g.edge_positions() {
        labels[a * cols + b] = label;
    }
}

#[allow(clippy::too_many_arguments)]
fn build_pair(
    idx: &DecompositionIndex,
    clusters: Option<&PairClusters>,
    i: usize,
    j: usize,
    ell1: usize,
    desk: &DeskSchedule,
    seed: u64,
) -> Result<PairBuild> {
    let (vi, vj) = (&idx.parts()[i], &idx.parts()[j]);
    let cols = vj.len();
    let mut labels = vec![u32::MAX; vi.len() * cols];
    let split_delta = desk.split_delta();
    let mut warnings = Vec::new();
    let Some(pc) = clusters else {
        let full = complete_graph(vi, vj);
        let sp = split_quasirandom(&full, ell1, &split_delta, sub_seed(seed, "pipeline-psi", &[i as u64, j as u64]), desk.max_attempts)?;
        for (x, g) in sp.parts.iter().enumerate() {
            write_labels(&mut labels, cols, g, x as u32);
        }
        if !sp.met {
            warnings.push(format!("split of Ψ pair ({i},{j}) missed its targets"));
        }
        let out = PairOutput {
            i,
            j,
            in_psi: true,
            s_total: 0,
            leftover_pairs: 0,
            leftover_slots: ell1,
            folded: 0,
            split: Some((&sp).into()),
        };
        return Ok(PairBuild { labels, splits: Vec::new(), out, groups: BTreeMap::new(), warnings });
    };

    let class = idx.class(i, j);
    let one = int(1);
    let ell1_r = int(ell1 as u64);
    // s_ij(u) for every nontrivial cluster, before any split.
    let mut plan: Vec<(usize, BipartiteGraph, Rational, bool, usize, bool)> = Vec::new();
    for c in pc.clusters.iter().filter(|c| c.nontrivial) {
        let graphs: Vec<BipartiteGraph> = c.members.iter().map(|&a| class.graphs[a].clone()).collect();
        let merged = merge_parts(&graphs)?;
        let rho = merged.stats.density.clone();
        let x = &rho * &ell1_r;
        let nearest = (&x + ratio(1, 2)).floor();
        let integer_case = nearest >= one && num_traits::Signed::abs(&(&x - &nearest)) <= &desk.delta * &nearest;
        let s = if integer_case { nearest } else { x.floor() };
        let s = s.to_integer().to_usize().unwrap_or(0);
        plan.push((c.index, merged.graph, rho, integer_case, s, merged.bound_holds));
    }
    let mut total: usize = plan.iter().map(|p| p.4).sum();
    let mut capped = vec![false; plan.len()];
    for k in (0..plan.len()).rev() {
        while total > ell1 && plan[k].4 > 0 {
            plan[k].4 -= 1;
            total -= 1;
            capped[k] = true;
        }
    }

    let mut next = 0u32;
    let mut splits = Vec::new();
    let mut groups = BTreeMap::new();
    for (k, (u, graph, rho, integer_case, s, bound)) in plan.into_iter().enumerate() {
        let gseed = sub_seed(seed, "pipeline-split", &[i as u64, j as u64, u as u64]);
        let p = if rho.is_zero() { None } else { Some(one.clone() / (&rho * &ell1_r)) };
        let mut parts_of_group = Vec::new();
        let summary = if s == 0 {
            parts_of_group.push(graph.clone());
            None
        } else {
            let sp = if integer_case && !capped[k] {
                split_quasirandom(&graph, s, &split_delta, gseed, desk.max_attempts)?
            } else {
                let p = p.clone().expect("s > 0 implies rho > 0");
                split_by_probability(&graph, &p, &split_delta, gseed, desk.max_attempts)?
            };
            let mut remainder = sp.remainder.clone();
            for (x, part) in sp.parts.iter().enumerate() {
                if x >= s {
                    remainder = remainder.union(part)?;
                }
            }
            parts_of_group.push(remainder);
            for part in sp.parts.iter().take(s) {
                write_labels(&mut labels, cols, part, next);
                next += 1;
                parts_of_group.push(part.clone());
            }
            if !sp.met {
                warnings.push(format!("split of cluster {u} of ({i},{j}) missed its targets"));
            }
            Some((&sp).into())
        };
        groups.insert(u, parts_of_group);
        splits.push(GroupSplit {
            i,
            j,
            u,
            rho,
            p,
            s,
            integer_case,
            capped: capped[k],
            merge_bound_holds: bound,
            split: summary,
        });
    }

    let s_total = next as usize;
    let mut leftover = BipartiteGraph::unchecked(vi.clone(), vj.clone());
    for a in 0..vi.len() {
        for b in 0..cols {
            if labels[a * cols + b] == u32::MAX {
                leftover.add_edge_at(a, b);
            }
        }
    }
    let leftover_pairs = leftover.edge_count() as u64;
    let slots = ell1 - s_total;
    let mut folded = 0;
    let mut split = None;
    if slots > 0 {
        let sp = split_quasirandom(
            &leftover,
            slots,
            &split_delta,
            sub_seed(seed, "pipeline-leftover", &[i as u64, j as u64]),
            desk.max_attempts,
        )?;
        for (x, g) in sp.parts.iter().enumerate() {
            write_labels(&mut labels, cols, g, (s_total + x) as u32);
        }
        split = Some((&sp).into());
    } else if leftover_pairs > 0 {
        let mut r = rng::stream(seed, "pipeline-fold", &[i as u64, j as u64]);
        for (a, b) in leftover.edge_positions() {
            labels[a * cols + b] = r.gen_range(0..s_total as u32);
            folded += 1;
        }
        warnings.push(format!("{folded} leftover pair(s) of ({i},{j}) folded into cluster parts"));
    }
    let out = PairOutput { i, j, in_psi: false, s_total, leftover_pairs, leftover_slots: slots, folded, split };
    Ok(PairBuild { labels, splits, out, groups, warnings })
}

fn cluster_pair(
    classification: &crate::analysis::TriadClassification,
    qr: &BTreeMap<(usize, usize), Vec<bool>>,
    ell: usize,
    desk: &DeskSchedule,
    i: usize,
    j: usize,
) -> Result<PairClusters> {
    let aux = build_aux_graph(classification, qr, i, j)?;
    let pack = packing_cluster(&aux.graph, &desk.delta, &desk.packing_eps);
    let uk_free = desk.k.map(|k| verify_packing_bound(&aux.graph, &pack, Some(k)).uk_free.unwrap_or(true));
    let m = pack.m;
    let min_size = &desk.nontrivial_coeff * ratio(ell as u64, m.max(1) as u64);
    let clusters = pack
        .members()
        .into_iter()
        .enumerate()
        .map(|(u, mem)| {
            let members: Vec<usize> = mem.iter().map(|&l| aux.left_parts[l]).collect();
            ClusterSummary {
                index: u,
                representative: aux.left_parts[pack.representatives[u]],
                nontrivial: int(members.len() as u64) >= min_size,
                members,
            }
        })
        .collect();
    Ok(PairClusters {
        i,
        j,
        quasirandom_parts: aux.left_parts.len(),
        excluded_parts: aux.excluded_parts.clone(),
        corners: aux.corners.len(),
        m,
        exceptions: pack.exceptions.iter().map(|&l| aux.left_parts[l]).collect(),
        clusters,
        diagnostics: pack.diagnostics.len(),
        uk_free,
    })
}

/// Audit of an output decomposition using precomputed triad metrics.
fn audit_from_metrics(idx: &DecompositionIndex, q: &Decomposition, m: &TriadMetrics, desk: &DeskSchedule) -> Result<AuditReport> {
    let ell = q.ell();
    let eps2 = desk.eps2.at(ell)?;
    let equitability = equitability_from_stats(idx, &m.parts, &desk.eps1, &eps2);
    let homogeneity = homogeneity_from_metrics(m, &desk.mu(), &desk.eps1_dblprime, &eps2).summary();
    let nonqr = equitability.cross_pairs - equitability.good_pairs;
    let all = equitability.all_pairs;
    let frac = if all == 0 { int(0) } else { ratio(nonqr, all) };
    Ok(AuditReport {
        validation: q.validate(idx.n()),
        ell,
        parts_per_class_equal: q.pair_parts.values().all(|v| v.len() == ell),
        gamma_ok: frac <= desk.eps1,
        nonquasirandom_pairs: nonqr,
        nonquasirandom_fraction: frac,
        equitability,
        homogeneity,
    })
}

/// Equitability and homogeneity of `Q` with the schedule's output
/// thresholds, and the share of pairs outside its quasirandom parts.
pub fn audit_output(h: &Hypergraph3, q: &Decomposition, schedule: &TuningSchedule) -> Result<AuditReport> {
    let desk = schedule.desk()?;
    let idx = DecompositionIndex::new(q, h.n())?;
    let m = measure_triads(h, &idx)?;
    audit_from_metrics(&idx, q, &m, desk)
}

/// Runs the pipeline; see the module documentation. Requires a desk schedule.
pub fn compress_decomposition(
    h: &Hypergraph3,
    p: &Decomposition,
    schedule: &TuningSchedule,
    seed: u64,
) -> Result<(Decomposition, PipelineReport)> {
    let desk = schedule.desk()?;
    desk.validate()?;
    let n = h.n();
    let idx = DecompositionIndex::new(p, n)?;
    let t = idx.t();
    let mut warnings = Vec::new();

    // F-sets.
    let metrics = measure_triads(h, &idx)?;
    let ell = metrics.ell;
    let eps2_in = &desk.eps2_dblprime;
    let classification = classify_from_metrics(&metrics, &desk.eps1_dblprime, eps2_in, &desk.f_val);
    let input = InputSection {
        n,
        t,
        ell,
        equitability: equitability_from_stats(&idx, &metrics.parts, &desk.eps1, eps2_in),
        homogeneity: homogeneity_from_metrics(&metrics, &desk.mu(), &desk.eps1_dblprime, eps2_in).summary(),
    };
    if classification.mid_density_regular > 0 {
        warnings.push(format!("{} regular triad(s) of middle density classified F_err", classification.mid_density_regular));
    }

    // Ψ and the clusterings of the remaining class pairs.
    let psi = bad_pairs_psi(&classification, &desk.psi_coeff);
    let qr = quasirandom_parts(&metrics.parts, eps2_in, ell);
    let pairs: Vec<(usize, usize)> = (0..t).flat_map(|i| (i + 1..t).map(move |j| (i, j))).collect();
    let good: Vec<(usize, usize)> = pairs.iter().copied().filter(|&(i, j)| !psi.contains(i, j)).collect();
    let clusters: Vec<PairClusters> = good
        .par_iter()
        .map(|&(i, j)| cluster_pair(&classification, &qr, ell, desk, i, j))
        .collect::<Result<_>>()?;
    let by_pair: BTreeMap<(usize, usize), &PairClusters> = clusters.iter().map(|c| ((c.i, c.j), c)).collect();
    let m_max = clusters.iter().map(|c| c.m).max().unwrap_or(0);
    if let Some(cap) = desk.m_cap {
        if m_max > cap {
            warnings.push(format!("m_max = {m_max} exceeds m_cap = {cap}"));
        }
    }
    let ell1 = desk.ell1.unwrap_or(if m_max > 0 { m_max * m_max } else { ell.max(1) });
    let degenerate = good.is_empty();

    // Output parts.
    let builds: Vec<PairBuild> = pairs
        .par_iter()
        .map(|&(i, j)| build_pair(&idx, by_pair.get(&(i, j)).copied(), i, j, ell1, desk, seed))
        .collect::<Result<_>>()?;
    let mut labels = BTreeMap::new();
    let mut splits = Vec::new();
    let mut outs = Vec::new();
    let mut groups: BTreeMap<(usize, usize), BTreeMap<usize, Vec<BipartiteGraph>>> = BTreeMap::new();
    for ((i, j), b) in pairs.iter().copied().zip(builds) {
        if b.labels.contains(&u32::MAX) {
            return Err(Error::InvalidDecomposition(format!("pairs of ({i},{j}) left without a part")));
        }
        labels.insert((i, j), (ell1, b.labels));
        splits.extend(b.splits);
        outs.push(b.out);
        groups.insert((i, j), b.groups);
        warnings.extend(b.warnings);
    }
    let q = Decomposition::from_labels(idx.parts().to_vec(), &labels)?;
    let gamma_pairs: u64 = outs.iter().filter(|o| !o.in_psi).map(|o| o.leftover_pairs).sum();
    let all_pairs = (n as u64) * (n as u64).saturating_sub(1) / 2;
    let gamma_fraction = if all_pairs == 0 { int(0) } else { ratio(gamma_pairs, all_pairs) };

    // Ω filters, Tr, claims and Σ filters over class triples in Ω₀.
    let triples: Vec<(usize, usize, usize)> = (0..t)
        .flat_map(|i| (i + 1..t).flat_map(move |j| (j + 1..t).map(move |s| (i, j, s))))
        .filter(|&(i, j, s)| !psi.contains(i, j) && !psi.contains(i, s) && !psi.contains(j, s))
        .collect();
    let hom_threshold = desk.hom_threshold();
    let sigma_threshold = desk.sigma_threshold();
    let per_triple: Vec<(u64, Vec<CellRecord>)> = triples
        .par_iter()
        .map(|&(i, j, s)| {
            let ells = [idx.ell_of(i, j), idx.ell_of(i, s), idx.ell_of(j, s)];
            let r = part_triple_coloring(&classification, ells, i, j, s)?;
            let pcs = [by_pair[&(i, j)], by_pair[&(i, s)], by_pair[&(j, s)]];
            let coords = [pcs[0].coordinates(ells[0]), pcs[1].coordinates(ells[1]), pcs[2].coordinates(ells[2])];
            let tr = troublesome_triples(&r, [&coords[0], &coords[1], &coords[2]])?;
            let mut is_tr = vec![false; ells[0] * ells[1] * ells[2]];
            for &(a, b, c) in &tr {
                is_tr[(a * ells[1] + b) * ells[2] + c] = true;
            }
            let mut cells = Vec::new();
            for cu in &pcs[0].clusters {
                for cv in &pcs[1].clusters {
                    for cw in &pcs[2].clusters {
                        let size = (cu.members.len() * cv.members.len() * cw.members.len()) as u64;
                        let counts = r.count_in_box(&cu.members, &cv.members, &cw.members);
                        let r2 = counts[Color::Two.index()] as u64;
                        let mut trc = 0u64;
                        for &a in &cu.members {
                            for &b in &cv.members {
                                for &c in &cw.members {
                                    trc += u64::from(is_tr[(a * ells[1] + b) * ells[2] + c]);
                                }
                            }
                        }
                        let size_r = int(size);
                        let mut stage = 0u8;
                        if cu.nontrivial && cv.nontrivial && cw.nontrivial {
                            stage = 1;
                            if int(r2) <= &desk.omega2_coeff * &size_r {
                                stage = 2;
                                if int(trc) <= &desk.omega3_coeff * &size_r {
                                    stage = 3;
                                }
                            }
                        }
                        let mut claim = None;
                        let mut sigma = None;
                        if stage == 3 {
                            let c = claim_hom_check(&r, [&cu.members, &cv.members, &cw.members], &hom_threshold)?;
                            if let Some(sg) = c.sigma {
                                sigma = Some(sigma_counts(
                                    h,
                                    &idx,
                                    (i, j, s),
                                    [
                                        &groups[&(i, j)][&cu.index],
                                        &groups[&(i, s)][&cv.index],
                                        &groups[&(j, s)][&cw.index],
                                    ],
                                    sg,
                                    &sigma_threshold,
                                ));
                            }
                            claim = Some(c);
                        }
                        cells.push(CellRecord {
                            i,
                            j,
                            s,
                            u: cu.index,
                            v: cv.index,
                            w: cw.index,
                            size,
                            r2,
                            troublesome: trc,
                            stage,
                            claim,
                            sigma,
                        });
                    }
                }
            }
            Ok((tr.len() as u64, cells))
        })
        .collect::<Result<_>>()?;
    let mut omega = OmegaCounts { omega0: triples.len(), ..Default::default() };
    let mut cells = Vec::new();
    let mut claims = ClaimTotals::default();
    for (tr, cs) in per_triple {
        omega.troublesome += tr;
        for c in cs {
            omega.omega += 1;
            omega.y0 += c.size;
            if c.stage >= 1 {
                omega.omega1 += 1;
                omega.y1 += c.size;
            }
            if c.stage >= 2 {
                omega.omega2 += 1;
                omega.y2 += c.size;
            }
            if c.stage >= 3 {
                omega.omega3 += 1;
                omega.y3 += c.size;
            }
            if let Some(cl) = &c.claim {
                claims.checked += 1;
                if cl.sigma.is_some() {
                    claims.succeeded += 1;
                } else {
                    claims.failed += 1;
                }
            }
            cells.push(c);
        }
    }
    if claims.failed > 0 {
        warnings.push(format!("{} cell(s) failed the homogeneity claim and were left out of the Σ accounting", claims.failed));
    }

    let qidx = DecompositionIndex::new(&q, n)?;
    let qm = measure_triads(h, &qidx)?;
    let output = audit_from_metrics(&qidx, &q, &qm, desk)?;
    let report = PipelineReport {
        seed,
        schedule: desk.clone(),
        input,
        classification: ClassificationSummary {
            counts: classification.counts,
            mid_density_regular: classification.mid_density_regular,
        },
        psi,
        clusters,
        m_max,
        ell1,
        omega,
        claims,
        cells,
        splits,
        pairs: outs,
        gamma_pairs,
        gamma_fraction,
        output,
        degenerate,
        warnings,
    };
    Ok((q, report))
}

/// Σ₀..Σ₄ of one cell: index triples `(x, y, z)` over `0..=s` of each merged
/// group, where index 0 is the split remainder.
fn sigma_counts(
    h: &Hypergraph3,
    idx: &DecompositionIndex,
    (i, j, s): (usize, usize, usize),
    groups: [&Vec<BipartiteGraph>; 3],
    sigma: u8,
    threshold: &Rational,
) -> SigmaCounts {
    let parts = [&idx.parts()[i][..], &idx.parts()[j][..], &idx.parts()[s][..]];
    let mut out = SigmaCounts { sigma0: 0, sigma1: 0, sigma2: 0, sigma3: 0, sigma4: 0, triangles: 0, triangles_sigma4: 0 };
    for (x, gx) in groups[0].iter().enumerate() {
        for (y, gy) in groups[1].iter().enumerate() {
            for (z, gz) in groups[2].iter().enumerate() {
                let view = TriadView { parts, g01: gx, g02: gy, g12: gz };
                let (tri, on) = triad_counts(h, &view);
                out.sigma0 += 1;
                out.triangles += tri;
                if x == 0 || y == 0 || z == 0 {
                    out.sigma1 += 1;
                    continue;
                }
                out.sigma2 += 1;
                let hit = if sigma == 1 { on } else { tri - on };
                if tri > 0 && ratio(hit, tri) < *threshold {
                    out.sigma3 += 1;
                } else {
                    out.sigma4 += 1;
                    out.triangles_sigma4 += tri;
                }
            }
        }
    }
    out
}
