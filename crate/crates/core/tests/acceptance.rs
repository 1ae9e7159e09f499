//! The acceptance suite. Prints one PASS/FAIL line per criterion and fails if
//! any criterion fails. Run with `cargo test --test acceptance -- --nocapture`
//! to see the lines.

mod common;

use std::time::{Duration, Instant};

use rand::Rng;
use vc2reg::generators::{
    gen_clustered_colored, gen_ip2_hypergraph, gen_planted_decomposition, gen_random_bipartite, gen_random_triad,
    ClusteredParams, PlantedParams,
};
use vc2reg::model::exact::{int, ratio, to_f64, Rational};
use vc2reg::packing::packing_cluster;
use vc2reg::pipeline::{compress_decomposition, derive_paper_schedule, DeskSchedule, PaperInputs, TuningSchedule};
use vc2reg::quasirandom::{
    check_equivalence, counting_lemma_check, dev2, dev23, hom_implies_random_check, union_dev2_check, EvalMode,
};
use vc2reg::splitting::{merge_parts, split_quasirandom};
use vc2reg::vc::vc2_dim;
use vc2reg::{rng, BipartiteGraph, Hypergraph3};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(limit: Duration, start: Instant, mut o: Outcome) -> Outcome {
    let t = start.elapsed();
    o.detail = format!("{}; {:.1}s (limit {}s)", o.detail, t.as_secs_f64(), limit.as_secs());
    o.pass &= t < limit;
    o
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    let n = 250;
    for seed in 0..n {
        let g = common::random_bipartite(seed, 8);
        let fast = dev2(&g, EvalMode::Fast).unwrap();
        let brute = dev2(&g, EvalMode::Brute).unwrap();
        let (raw, norm) = common::dev2_oracle(&g);
        if fast != brute || fast.raw_sum != raw || fast.normalized != norm {
            bad.push(format!("dev2 seed {seed}"));
        }
        let (t, h) = common::random_triad_with_h(seed, 8, None);
        let fast = dev23(&h, &t.view(), EvalMode::Fast).unwrap();
        let brute = dev23(&h, &t.view(), EvalMode::Brute).unwrap();
        let (raw, norm, d3) = common::dev23_oracle(&h, &t.view());
        if fast != brute || fast.raw_sum != raw || fast.normalized_bound_lhs != norm || fast.d3 != d3 {
            bad.push(format!("dev23 seed {seed}"));
        }
    }
    within(
        Duration::from_secs(60),
        start,
        outcome(bad.is_empty(), format!("{n} dev2 + {n} dev23 instances, mismatches {bad:?}")),
    )
}

fn theorem_checks() -> Outcome {
    let start = Instant::now();
    let half = ratio(1, 2);
    let mut fails = [0usize; 4];
    let n = 50u64;
    for seed in 0..n {
        let t = gen_random_triad(40, 40, 40, &half, seed).unwrap();
        if !counting_lemma_check(&t.view(), &half).unwrap().ok {
            fails[0] += 1;
        }

        let g = gen_random_bipartite(40, 40, &half, seed).unwrap();
        let mut r = rng::stream(seed, "acceptance-union", &[]);
        let (mut b1, mut b2) = (BipartiteGraph::with_sizes(40, 40), BipartiteGraph::with_sizes(40, 40));
        for (u, w) in g.edge_positions() {
            if r.gen_bool(0.5) {
                b1.add_edge_at(u, w);
            } else {
                b2.add_edge_at(u, w);
            }
        }
        if !union_dev2_check(&b1, &b2).unwrap().ok {
            fails[1] += 1;
        }

        let mut r = rng::stream(seed, "acceptance-equivalence", &[]);
        let p = ratio(r.gen_range(1..8u64), 8);
        let b = gen_random_bipartite(14, 14, &p, seed).unwrap();
        let d = b.density().unwrap();
        if !check_equivalence(&b, &d).unwrap().ok {
            fails[2] += 1;
        }

        let t = gen_random_triad(30, 30, 30, &half, seed).unwrap();
        let mut r = rng::stream(seed, "acceptance-hom", &[]);
        let h = common::h_on_triangles(&t.view(), 90, 0.03, &mut r);
        let delta = t
            .pair_graphs
            .iter()
            .map(|g| dev2(g, EvalMode::Fast).unwrap().certified_eps(&half))
            .max()
            .unwrap();
        match hom_implies_random_check(&h, &t.view(), &ratio(1, 20), &delta, &half) {
            Ok(c) if c.ok => {}
            _ => fails[3] += 1,
        }
    }
    within(
        Duration::from_secs(300),
        start,
        outcome(
            fails.iter().all(|&f| f == 0),
            format!("{n} instances each; failures counting {} union {} equivalence {} hom {}", fails[0], fails[1], fails[2], fails[3]),
        ),
    )
}

/// Fraction of left vertices whose cluster maps to their planted label under
/// the majority matching, or 0 when that matching is not a bijection.
fn assignment_accuracy(clusters: &[Option<usize>], labels: &[usize], m: usize, k: usize) -> f64 {
    let mut votes = vec![vec![0usize; k]; m];
    for (c, &l) in clusters.iter().zip(labels) {
        if let Some(c) = c {
            votes[*c][l] += 1;
        }
    }
    let map: Vec<usize> =
        votes.iter().map(|v| (0..k).max_by_key(|&l| (v[l], std::cmp::Reverse(l))).unwrap()).collect();
    let mut seen = map.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != m {
        return 0.0;
    }
    let correct = clusters.iter().zip(labels).filter(|(c, &l)| c.is_some_and(|c| map[c] == l)).count();
    correct as f64 / labels.len() as f64
}

fn packing_recovery() -> Outcome {
    let start = Instant::now();
    let params = ClusteredParams {
        a: 200,
        b: 200,
        clusters: 3,
        sep: ratio(2, 5),
        eps2_mass: ratio(1, 100),
        noise: None,
    };
    let (delta, eps) = (ratio(1, 5), ratio(1, 100));
    let mut worst = 1.0f64;
    let mut wrong_m = Vec::new();
    let mut max_exc = 0usize;
    let mut exc_ok = true;
    for seed in 0..20 {
        let inst = gen_clustered_colored(&params, seed).unwrap();
        let r = packing_cluster(&inst.graph, &delta, &eps);
        if r.m != 3 {
            wrong_m.push((seed, r.m));
            continue;
        }
        worst = worst.min(assignment_accuracy(&r.clusters, &inst.labels, r.m, 3));
        let u = r.exceptions.len();
        max_exc = max_exc.max(u);
        exc_ok &= int((u * u) as u64) <= &eps * int(200 * 200);
    }
    let pass = wrong_m.is_empty() && worst >= 0.98 && exc_ok;
    within(
        Duration::from_secs(120),
        start,
        outcome(
            pass,
            format!("20 seeds; m != 3 on {wrong_m:?}; worst accuracy {worst:.4}; max |U| {max_exc} (bound 20)"),
        ),
    )
}

fn vc2_exactness() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for k in 1..=2usize {
        for seed in 0..5 {
            let inst = gen_ip2_hypergraph(k, 0, seed).unwrap();
            let d = vc2_dim(&inst.hypergraph, k).dim;
            if d != k {
                bad.push(format!("ip2 k={k} seed={seed} gave {d}"));
            }
        }
    }
    for n in 3..=10usize {
        for (name, h) in [("complete", Hypergraph3::complete(n)), ("empty", Hypergraph3::empty(n))] {
            let d = vc2_dim(&h, 2).dim;
            if d != 0 {
                bad.push(format!("{name} n={n} gave {d}"));
            }
        }
    }
    within(Duration::from_secs(120), start, outcome(bad.is_empty(), format!("mismatches {bad:?}")))
}

fn splitting() -> Outcome {
    let start = Instant::now();
    let half = ratio(1, 2);
    let delta = ratio(1, 10);
    let (lo, hi) = (ratio(1, 8) - ratio(1, 80), ratio(1, 8) + ratio(1, 80));
    let mut good = 0;
    let mut e0_nonempty = 0;
    let mut roundtrip_fail = 0;
    for seed in 0..100u64 {
        let b = gen_random_bipartite(200, 200, &half, seed).unwrap();
        let s = split_quasirandom(&b, 4, &delta, seed, 1).unwrap();
        let four = &s.input.normalized * int(4);
        if s.achieved.iter().all(|a| a.density >= lo && a.density <= hi && a.normalized <= four) {
            good += 1;
        }
        if s.remainder.edge_count() != 0 {
            e0_nonempty += 1;
        }
        let mut all = s.parts.clone();
        all.push(s.remainder.clone());
        if merge_parts(&all).unwrap().graph != b {
            roundtrip_fail += 1;
        }
    }
    within(
        Duration::from_secs(300),
        start,
        outcome(
            good >= 90 && e0_nonempty == 0 && roundtrip_fail == 0,
            format!("{good}/100 seeds within targets; E0 nonempty {e0_nonempty}; round-trip failures {roundtrip_fail}"),
        ),
    )
}

fn pipeline_end_to_end() -> Outcome {
    let params = PlantedParams::new(360, 6, 8, 2);
    let inst = gen_planted_decomposition(&params, 1).unwrap();
    let schedule = TuningSchedule::Desk(DeskSchedule::default());
    let start = Instant::now();
    let (q, r) = compress_decomposition(&inst.hypergraph, &inst.decomposition, &schedule, 7).unwrap();
    let elapsed = start.elapsed();
    let (q2, r2) = compress_decomposition(&inst.hypergraph, &inst.decomposition, &schedule, 7).unwrap();
    let identical = q.to_json() == q2.to_json()
        && serde_json::to_string(&r).unwrap() == serde_json::to_string(&r2).unwrap();
    let per_class = q.pair_parts.values().all(|p| p.len() == r.ell1);
    let hom_p = r.input.homogeneity.good_triple_fraction.clone();
    let hom_q = r.output.homogeneity.good_triple_fraction.clone();
    let hom_ok = hom_q >= &hom_p - ratio(1, 20);
    let claims_ok = r.claims.failed == 0 && r.claims.checked > 0 && r.claims.checked == r.omega.omega3;
    let pass = r.output.validation.ok
        && per_class
        && hom_ok
        && r.psi.pairs.is_empty()
        && claims_ok
        && elapsed < Duration::from_secs(60)
        && identical;
    outcome(
        pass,
        format!(
            "valid {} ell1 {} per-class {} hom(P) {:.4} hom(Q) {:.4} |Psi| {} claims {}/{} identical reruns {}; {:.1}s (limit 60s)",
            r.output.validation.ok,
            r.ell1,
            per_class,
            to_f64(&hom_p),
            to_f64(&hom_q),
            r.psi.pairs.len(),
            r.claims.succeeded,
            r.claims.checked,
            identical,
            elapsed.as_secs_f64()
        ),
    )
}

fn schedule_fidelity() -> Outcome {
    let start = Instant::now();
    let mut r = rng::stream(0, "acceptance-schedule", &[]);
    let mut bad = Vec::new();
    for _ in 0..20 {
        let q = r.gen_range(2..=64u64);
        let inputs = PaperInputs {
            eps1: ratio(r.gen_range(1..q), q),
            k: r.gen_range(1..=3),
            d: r.gen_range(1..=3),
            c1: ratio(r.gen_range(1..=100u64), r.gen_range(1..=20u64)),
            eps2: vc2reg::pipeline::Eps2Fn { coeff: int(1), exp: int(1) },
            t0: None,
        };
        let s = derive_paper_schedule(&inputs).unwrap();
        if !s.chain_holds() {
            bad.push(format!("{:?}: {:?}", (&inputs.eps1, inputs.k, inputs.d, &inputs.c1), s.checks));
        }
    }
    within(Duration::from_secs(300), start, outcome(bad.is_empty(), format!("20 tuples; failures {bad:?}")))
}

fn structural_invariants() -> Outcome {
    let start = Instant::now();
    let configs = [(48usize, 4usize, 4usize, 2usize), (60, 5, 3, 1), (45, 3, 6, 2), (60, 4, 6, 3)];
    let mut runs = 0;
    let mut bad = Vec::new();
    let schedule = TuningSchedule::Desk(DeskSchedule::default());
    for &(n, t, ell, groups) in &configs {
        for seed in 0..3u64 {
            let inst = gen_planted_decomposition(&PlantedParams::new(n, t, ell, groups), seed).unwrap();
            let (q, r) = compress_decomposition(&inst.hypergraph, &inst.decomposition, &schedule, seed).unwrap();
            runs += 1;
            if let Err(e) = common::pipeline_recount(&inst.decomposition, &q, n, &r) {
                bad.push(format!("n={n} t={t} ell={ell} groups={groups} seed={seed}: {e}"));
            }
        }
    }
    // A run where every triad is noisy and every pair lands in Ψ.
    let mut params = PlantedParams::new(36, 4, 2, 1);
    params.noise = int(1);
    let inst = gen_planted_decomposition(&params, 0).unwrap();
    let mut desk = DeskSchedule::default();
    desk.psi_coeff = Rational::from_integer(0.into());
    let (q, r) = compress_decomposition(&inst.hypergraph, &inst.decomposition, &TuningSchedule::Desk(desk), 0).unwrap();
    runs += 1;
    if let Err(e) = common::pipeline_recount(&inst.decomposition, &q, 36, &r) {
        bad.push(format!("degenerate run: {e}"));
    }
    if !r.degenerate {
        bad.push("all-Ψ run not flagged degenerate".into());
    }
    within(
        Duration::from_secs(300),
        start,
        outcome(bad.is_empty(), format!("{runs} pipeline runs at n <= 60; failures {bad:?}")),
    )
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("theorem-backed checks", theorem_checks),
        ("packing recovery", packing_recovery),
        ("VC2 exactness", vc2_exactness),
        ("splitting", splitting),
        ("pipeline end-to-end", pipeline_end_to_end),
        ("schedule fidelity", schedule_fidelity),
        ("structural invariants", structural_invariants),
    ];
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!("{} [{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, k + 1, o.detail);
        if !o.pass {
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
