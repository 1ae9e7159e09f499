use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;
use vc2reg::analysis::{equitability_from_stats, homogeneity_from_metrics, measure_triads};
use vc2reg::generators::{gen_ip2_hypergraph, gen_planted_decomposition, gen_random_hypergraph, PlantedParams};
use vc2reg::model::exact::{format_rational, parse_rational, Rational};
use vc2reg::pipeline::{compress_decomposition, PipelineReport, ScheduleFile, TuningSchedule};
use vc2reg::vc::{vc2_dim_budgeted, VC2_DEFAULT_BUDGET};
use vc2reg::{Decomposition, DecompositionIndex, Hypergraph3};

use crate::document::{canonical, rational_value, Format, ReportDocument, Table};
use crate::Common;

/// Parameter file of `generate`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum GenerateParams {
    Planted(PlantedParams),
    Random(RandomParams),
    Ip2(Ip2Params),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomParams {
    n: usize,
    #[serde(with = "vc2reg::model::exact::serde_rational")]
    p: Rational,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Ip2Params {
    k: usize,
    #[serde(default)]
    n_extra: usize,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_hypergraph(path: &Path) -> Result<Hypergraph3> {
    Hypergraph3::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_decomposition(path: &Path) -> Result<Decomposition> {
    Decomposition::from_json(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn out_dir(common: &Common) -> Result<PathBuf> {
    let Some(dir) = &common.out else { bail!("--out <directory> is required for this command") };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir.clone())
}

/// Writes a report to `--out` or stdout.
fn emit(common: &Common, doc: &ReportDocument) -> Result<()> {
    let bytes = doc.render(common.format)?;
    match &common.out {
        Some(p) => write(p, &bytes),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes).context("writing stdout")
        }
    }
}

pub fn generate(common: &Common, params_path: &Path) -> Result<Vec<String>> {
    let params: GenerateParams = parse_json(params_path)?;
    let dir = out_dir(common)?;
    let start = Instant::now();
    let mut files = Vec::new();
    let mut doc = ReportDocument::new("generate", serde_json::to_value(&params)?, Some(common.seed));
    let (h, sidecar) = match &params {
        GenerateParams::Planted(p) => {
            let inst = gen_planted_decomposition(p, common.seed)?;
            let path = dir.join("decomposition.json");
            write(&path, inst.decomposition.to_json().as_bytes())?;
            files.push(path);
            (inst.hypergraph, serde_json::to_value(&inst.truth)?)
        }
        GenerateParams::Random(r) => {
            (gen_random_hypergraph(r.n, &r.p, common.seed)?, json!({ "n": r.n, "p": rational_value(&r.p) }))
        }
        GenerateParams::Ip2(p) => {
            let inst = gen_ip2_hypergraph(p.k, p.n_extra, common.seed)?;
            (inst.hypergraph, json!({ "k": p.k, "witness": inst.witness }))
        }
    };
    let hpath = dir.join("hypergraph.txt");
    write(&hpath, h.to_text().as_bytes())?;
    files.push(hpath);
    let tpath = dir.join("truth.json");
    write(&tpath, &crate::document::canonical_json(&sidecar))?;
    files.push(tpath);
    doc.result("n", &h.n())?;
    doc.result("edges", &h.edge_count())?;
    let mut names: Vec<String> = files.iter().map(|f| f.file_name().unwrap().to_string_lossy().into_owned()).collect();
    names.sort();
    doc.result("files", &names)?;
    if common.timing {
        doc.timing = Some(start.elapsed().as_secs_f64());
    }
    let bytes = doc.render(common.format)?;
    use std::io::Write;
    std::io::stdout().write_all(&bytes)?;
    Ok(doc.warnings)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Dev2,
    Dev23,
    Homogeneity,
    Equitability,
    Vc2,
}

fn rational_arg(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    hypergraph: PathBuf,
    decomposition: Option<PathBuf>,
    /// Metrics to compute (default: all but vc2 with a decomposition, vc2 without).
    #[arg(long, value_enum, value_delimiter = ',')]
    metric: Vec<Metric>,
    /// Equitability ε₁ and regularity mass bound.
    #[arg(long, default_value = "1/10", value_parser = rational_arg)]
    eps1: Rational,
    /// dev₂ ε₂ of pair parts.
    #[arg(long, default_value = "1/10", value_parser = rational_arg)]
    eps2: Rational,
    /// dev₂,₃ threshold: a triad is regular when its octahedral sum is at most this times d₂¹².
    #[arg(long, default_value = "128", value_parser = rational_arg)]
    eps1_dev23: Rational,
    /// Homogeneity margin μ.
    #[arg(long, default_value = "1/10", value_parser = rational_arg)]
    mu: Rational,
    #[arg(long, default_value_t = 3)]
    vc_kmax: usize,
    /// Evaluation budget of the VC₂ search.
    #[arg(long, default_value_t = VC2_DEFAULT_BUDGET)]
    vc_budget: u64,
}

pub fn analyze(common: &Common, a: &AnalyzeArgs) -> Result<Vec<String>> {
    let start = Instant::now();
    let h = load_hypergraph(&a.hypergraph)?;
    let p = a.decomposition.as_deref().map(load_decomposition).transpose()?;
    let mut metrics = a.metric.clone();
    if metrics.is_empty() {
        metrics = if p.is_some() {
            vec![Metric::Dev2, Metric::Dev23, Metric::Homogeneity, Metric::Equitability]
        } else {
            vec![Metric::Vc2]
        };
    }
    metrics.sort();
    metrics.dedup();
    let params = json!({
        "hypergraph": a.hypergraph.display().to_string(),
        "decomposition": a.decomposition.as_ref().map(|p| p.display().to_string()),
        "metrics": metrics,
        "eps1": rational_value(&a.eps1),
        "eps2": rational_value(&a.eps2),
        "eps1_dev23": rational_value(&a.eps1_dev23),
        "mu": rational_value(&a.mu),
        "vc_kmax": a.vc_kmax,
        "vc_budget": a.vc_budget,
    });
    let mut doc = ReportDocument::new("analyze", params, None);
    doc.result("hypergraph", &json!({ "n": h.n(), "edges": h.edge_count() }))?;

    let needs_p = metrics.iter().any(|m| *m != Metric::Vc2);
    if needs_p {
        let Some(p) = &p else { bail!("metrics {metrics:?} need a decomposition file") };
        let validation = p.validate(h.n());
        doc.result("validation", &validation)?;
        if !validation.ok {
            bail!("decomposition does not validate: {:?}", validation.violations.first());
        }
        let idx = DecompositionIndex::new(p, h.n())?;
        let m = measure_triads(&h, &idx)?;
        let eq = equitability_from_stats(&idx, &m.parts, &a.eps1, &a.eps2);
        let hom = homogeneity_from_metrics(&m, &a.mu, &a.eps1_dev23, &a.eps2);
        if metrics.contains(&Metric::Dev2) {
            let mut t = Table::new(
                "dev2",
                &["i", "j", "alpha", "left", "right", "edges", "density", "normalized", "quasirandom"],
            );
            for row in &eq.parts {
                let r = &m.parts[&(row.i, row.j)][row.alpha];
                t.push(vec![
                    row.i.into(),
                    row.j.into(),
                    row.alpha.into(),
                    r.left.into(),
                    r.right.into(),
                    r.edges.into(),
                    (&r.density).into(),
                    (&r.normalized).into(),
                    row.quasirandom.into(),
                ]);
            }
            doc.tables.push(t);
        }
        if metrics.contains(&Metric::Dev23) {
            let mut t = Table::new(
                "dev23",
                &[
                    "i", "j", "s", "alpha", "beta", "gamma", "triangles", "edges", "d3", "d2", "normalized", "regular",
                    "homogeneous",
                ],
            );
            for ((addr, r), row) in m.addresses.iter().zip(&m.triads).zip(&hom.triads) {
                t.push(vec![
                    addr.i.into(),
                    addr.j.into(),
                    addr.s.into(),
                    addr.alpha.into(),
                    addr.beta.into(),
                    addr.gamma.into(),
                    r.triangles.into(),
                    r.edges_on_triangles.into(),
                    (&r.d3).into(),
                    (&r.mean_d2()).into(),
                    (&r.normalized_bound_lhs).into(),
                    row.regular.into(),
                    row.homogeneous.into(),
                ]);
            }
            doc.tables.push(t);
        }
        if metrics.contains(&Metric::Homogeneity) {
            doc.result("homogeneity", &hom.summary())?;
        }
        if metrics.contains(&Metric::Equitability) {
            let mut eq = eq.clone();
            eq.parts.clear();
            doc.result("equitability", &eq)?;
        }
    }
    if metrics.contains(&Metric::Vc2) {
        let r = vc2_dim_budgeted(&h, a.vc_kmax, a.vc_budget);
        if r.incomplete {
            doc.warnings.push(format!("vc2 search stopped early; dimension {} is a lower bound", r.dim));
        }
        doc.result("vc2", &r)?;
    }
    if common.timing {
        doc.timing = Some(start.elapsed().as_secs_f64());
    }
    emit(common, &doc)?;
    Ok(doc.warnings)
}

fn load_schedule(path: &Path) -> Result<TuningSchedule> {
    let file: ScheduleFile = parse_json(path)?;
    TuningSchedule::from_file(file).with_context(|| format!("schedule {}", path.display()))
}

pub fn compress(common: &Common, h_path: &Path, p_path: &Path, s_path: &Path) -> Result<Vec<String>> {
    let start = Instant::now();
    let h = load_hypergraph(h_path)?;
    let p = load_decomposition(p_path)?;
    let schedule = load_schedule(s_path)?;
    let dir = out_dir(common)?;
    let params = json!({
        "hypergraph": h_path.display().to_string(),
        "decomposition": p_path.display().to_string(),
        "schedule": serde_json::to_value(&schedule)?,
    });
    let mut doc = ReportDocument::new("compress", params, Some(common.seed));
    if let TuningSchedule::Paper(ps) = &schedule {
        doc.warnings.push("paper-mode schedule: constants are symbolic, pipeline not run".into());
        doc.result("schedule", ps)?;
        write(&dir.join("schedule.json"), &canonical(&doc.to_value())?)?;
        return Ok(doc.warnings);
    }
    let validation = p.validate(h.n());
    if !validation.ok {
        bail!("decomposition does not validate: {:?}", validation.violations.first());
    }
    let (q, report) = compress_decomposition(&h, &p, &schedule, common.seed)?;
    write(&dir.join("q.json"), q.to_json().as_bytes())?;
    doc.warnings.extend(report.warnings.iter().cloned());
    doc.tables = report_tables(&report);
    doc.result("pipeline", &report)?;
    if common.timing {
        doc.timing = Some(start.elapsed().as_secs_f64());
    }
    let name = match common.format {
        Format::Json => "report.json",
        Format::Csv => "report.csv",
    };
    write(&dir.join(name), &doc.render(common.format)?)?;
    Ok(doc.warnings)
}

fn report_tables(r: &PipelineReport) -> Vec<Table> {
    let mut clusters = Table::new("clusters", &["i", "j", "u", "representative", "size", "nontrivial", "m"]);
    for pc in &r.clusters {
        for c in &pc.clusters {
            clusters.push(vec![
                pc.i.into(),
                pc.j.into(),
                c.index.into(),
                c.representative.into(),
                c.members.len().into(),
                c.nontrivial.into(),
                pc.m.into(),
            ]);
        }
    }
    let mut cells = Table::new(
        "cells",
        &["i", "j", "s", "u", "v", "w", "size", "r2", "troublesome", "stage", "sigma", "fraction", "sigma4"],
    );
    for c in &r.cells {
        cells.push(vec![
            c.i.into(),
            c.j.into(),
            c.s.into(),
            c.u.into(),
            c.v.into(),
            c.w.into(),
            c.size.into(),
            c.r2.into(),
            c.troublesome.into(),
            c.stage.into(),
            c.claim.as_ref().and_then(|x| x.sigma).into(),
            c.claim.as_ref().map(|x| &x.fraction).into(),
            c.sigma.as_ref().map(|x| x.sigma4).into(),
        ]);
    }
    let mut splits = Table::new("splits", &["i", "j", "u", "rho", "p", "s", "integer_case", "capped", "met"]);
    for s in &r.splits {
        splits.push(vec![
            s.i.into(),
            s.j.into(),
            s.u.into(),
            (&s.rho).into(),
            s.p.as_ref().into(),
            s.s.into(),
            s.integer_case.into(),
            s.capped.into(),
            s.split.as_ref().map(|x| x.met).into(),
        ]);
    }
    let mut pairs = Table::new("pairs", &["i", "j", "in_psi", "s_total", "leftover_pairs", "leftover_slots", "folded"]);
    for o in &r.pairs {
        pairs.push(vec![
            o.i.into(),
            o.j.into(),
            o.in_psi.into(),
            o.s_total.into(),
            o.leftover_pairs.into(),
            o.leftover_slots.into(),
            o.folded.into(),
        ]);
    }
    vec![clusters, cells, splits, pairs]
}

pub fn schedule_dump(common: &Common, path: &Path) -> Result<Vec<String>> {
    let schedule = load_schedule(path)?;
    let mut doc = ReportDocument::new("schedule-dump", json!({ "schedule": path.display().to_string() }), None);
    if let TuningSchedule::Paper(ps) = &schedule {
        if !ps.chain_holds() {
            doc.warnings.push("the constant chain could not be verified".into());
        }
    }
    doc.result("schedule", &schedule)?;
    doc.result("mode", &match schedule {
        TuningSchedule::Desk(_) => "desk",
        TuningSchedule::Paper(_) => "paper",
    })?;
    if let TuningSchedule::Desk(d) = &schedule {
        doc.result("eps2_at_ell1", &d.ell1.map(|l| d.eps2.at(l).map(|v| format_rational(&v))).transpose()?)?;
    }
    emit(common, &doc)?;
    Ok(doc.warnings)
}
