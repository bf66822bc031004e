//! The four subcommands. Each returns its stdout text and the files it would
//! write; the caller decides where they go.

use std::collections::{BTreeMap, BTreeSet};

use gridiv::attack::{diversity_report, propagate, AttackResult, AttackScenario, ColoredGraph};
use gridiv::coloring::{diversity_dot, Algorithm, ColoringReport, VertexReport};
use gridiv::grid_model::SubstationId;
use gridiv::impact::{ImpactClass, ImpactFormat};
use serde::Serialize;

use crate::config::{Inputs, RunArgs};
use crate::error::{CliError, CliResult};
use crate::model::{load_impact, Model};
use crate::runs::{execute, RunRecord, RunStatus};

#[derive(Debug, Default)]
pub struct Output {
    pub text: String,
    /// (file name, contents), in write order.
    pub files: Vec<(String, Vec<u8>)>,
}

impl Output {
    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
        bytes.push(b'\n');
        self.files.push((name.to_string(), bytes));
        Ok(())
    }

    fn csv<R: Serialize>(&mut self, name: &str, rows: &[R]) -> CliResult<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r).map_err(|e| CliError::Internal(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
        self.files.push((name.to_string(), bytes));
        Ok(())
    }
}

/// Config hash and seed stamped into every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct Stamp {
    pub config_hash: String,
    pub seed: u64,
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>, sep: &str) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

/// Left-aligned text table.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = line(header.to_vec());
    out.push('\n');
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}

// ---- impact ----

#[derive(Serialize)]
struct ImpactRow {
    substation_id: SubstationId,
    p_lol_mw: f64,
    l_star: Option<f64>,
    gamma: f64,
    class: ImpactClass,
    config_hash: String,
    seed: u64,
}

#[derive(Serialize)]
struct ImpactJson<'a> {
    #[serde(flatten)]
    stamp: &'a Stamp,
    threshold: f64,
    p_total_mw: Option<f64>,
    format: &'static str,
    his: Vec<SubstationId>,
    substations: &'a [gridiv::impact::SubstationProfile],
}

pub fn cmd_impact(args: &RunArgs, inputs: &Inputs, stamp: &Stamp) -> CliResult<Output> {
    let t = load_impact(inputs, args.threshold, args.p_total)?;
    let mut out = Output::default();
    let rows: Vec<Vec<String>> = t
        .profiles
        .iter()
        .map(|p| {
            vec![
                p.substation_id.to_string(),
                format!("{}", p.p_lol_mw),
                p.l_star.map_or("-".into(), |l| l.to_string()),
                format!("{:.6}", p.gamma),
                p.impact_class.to_string(),
            ]
        })
        .collect();
    out.text = table(&["substation", "p_lol_mw", "l_star", "gamma", "class"], &rows);
    out.text.push_str(&format!("HIS: {}\n", join(t.his(), ", ")));

    out.json(
        "impact.json",
        &ImpactJson {
            stamp,
            threshold: t.threshold,
            p_total_mw: t.p_total_mw,
            format: match t.format {
                ImpactFormat::LoadingLevel => "loading_level",
                ImpactFormat::GivenGamma => "gamma",
            },
            his: t.his(),
            substations: &t.profiles,
        },
    )?;
    let csv_rows: Vec<ImpactRow> = t
        .profiles
        .iter()
        .map(|p| ImpactRow {
            substation_id: p.substation_id,
            p_lol_mw: p.p_lol_mw,
            l_star: p.l_star,
            gamma: p.gamma,
            class: p.impact_class,
            config_hash: stamp.config_hash.clone(),
            seed: stamp.seed,
        })
        .collect();
    out.csv("impact.csv", &csv_rows)?;
    Ok(out)
}

// ---- color ----

#[derive(Serialize)]
struct ColorRow {
    algorithm: Algorithm,
    run: usize,
    seed: u64,
    status: RunStatus,
    nash: bool,
    sigma: f64,
    colors_used: usize,
    rounds: usize,
    config_hash: String,
}

#[derive(Serialize)]
struct ColoringJson<'a> {
    config_hash: &'a str,
    seed: u64,
    algorithm: Algorithm,
    run: usize,
    status: RunStatus,
    nash: bool,
    sigma: f64,
    rounds: usize,
    colors_used: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<&'a str>,
    vertices: BTreeMap<String, VertexReport>,
}

fn run_all(model: &Model, args: &RunArgs) -> CliResult<Vec<RunRecord>> {
    execute(model, &args.algos, args.seed, args.repeat as usize, args.jobs)
}

fn file_stem(r: &RunRecord) -> String {
    format!("{}_{:03}", r.algorithm, r.run)
}

pub fn cmd_color(args: &RunArgs, model: &Model, stamp: &Stamp) -> CliResult<Output> {
    let runs = run_all(model, args)?;
    let mut out = Output::default();
    let mut rows = Vec::new();
    let mut text_rows = Vec::new();
    for r in &runs {
        let vertices = r
            .coloring
            .as_ref()
            .map(|c| ColoringReport::new(c, &model.psi, &model.g).vertices)
            .unwrap_or_default();
        out.json(
            &format!("coloring_{}.json", file_stem(r)),
            &ColoringJson {
                config_hash: &stamp.config_hash,
                seed: r.seed,
                algorithm: r.algorithm,
                run: r.run,
                status: r.status,
                nash: r.nash,
                sigma: r.sigma,
                rounds: r.rounds(),
                colors_used: r.colors_used(),
                message: r.message.as_deref(),
                vertices,
            },
        )?;
        if args.dot {
            if let Some(c) = &r.coloring {
                let mut dot = format!("// config_hash={} seed={}\n", stamp.config_hash, r.seed);
                dot.push_str(&diversity_dot(&model.g, Some(c)));
                out.files.push((format!("coloring_{}.dot", file_stem(r)), dot.into_bytes()));
            }
        }
        rows.push(ColorRow {
            algorithm: r.algorithm,
            run: r.run,
            seed: r.seed,
            status: r.status,
            nash: r.nash,
            sigma: r.sigma,
            colors_used: r.colors_used(),
            rounds: r.rounds(),
            config_hash: stamp.config_hash.clone(),
        });
        text_rows.push(vec![
            r.algorithm.to_string(),
            r.run.to_string(),
            r.seed.to_string(),
            serde_json::to_value(r.status).unwrap().as_str().unwrap().to_string(),
            r.nash.to_string(),
            format!("{:.4}", r.sigma),
            r.colors_used().to_string(),
            r.rounds().to_string(),
        ]);
    }
    if args.dot {
        let mut dot = format!("// config_hash={} seed={}\n", stamp.config_hash, stamp.seed);
        dot.push_str(&model.m.to_dot());
        out.files.push(("security_graph.dot".into(), dot.into_bytes()));
    }
    out.csv("color_summary.csv", &rows)?;
    out.text = table(&["algorithm", "run", "seed", "status", "nash", "sigma", "colors", "rounds"], &text_rows);
    Ok(out)
}

// ---- attack ----

#[derive(Serialize)]
struct AttackRow {
    algorithm: Algorithm,
    run: usize,
    seed: u64,
    accessed_sms: String,
    prerequisites: String,
    propagation: String,
    compromised_substations: String,
    entry_compromise_fraction: f64,
    total_p_lol_mw: f64,
    config_hash: String,
}

#[derive(Serialize)]
struct AttackEntry<'a> {
    algorithm: Algorithm,
    run: usize,
    seed: u64,
    status: RunStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<&'a AttackResult>,
    entry_compromise_fraction: f64,
}

#[derive(Serialize)]
struct AttackJson<'a> {
    #[serde(flatten)]
    stamp: &'a Stamp,
    scenario: &'a AttackScenario,
    runs: Vec<AttackEntry<'a>>,
}

/// Compromised entry-point mechanisms over all entry-point mechanisms.
fn entry_fraction(model: &Model, r: &AttackResult) -> f64 {
    let entries: Vec<_> = model.g.nodes().iter().filter(|n| n.is_entry_point).collect();
    if entries.is_empty() {
        return 0.0;
    }
    entries.iter().filter(|n| r.compromised_sms.contains(&n.id)).count() as f64 / entries.len() as f64
}

/// Attack results for every successful run, in run order.
pub fn attack_runs(model: &Model, runs: &[RunRecord], scenario: &AttackScenario) -> CliResult<Vec<Option<AttackResult>>> {
    runs.iter()
        .map(|r| {
            r.coloring
                .as_ref()
                .map(|c| {
                    let cg = ColoredGraph::new(&model.m, &model.g, c, &model.vertex_of)?;
                    propagate(&cg, &model.impact.profiles, scenario)
                })
                .transpose()
                .map_err(CliError::from)
        })
        .collect()
}

pub fn cmd_attack(args: &RunArgs, model: &Model, stamp: &Stamp) -> CliResult<Output> {
    let scenario = model
        .scenario
        .as_ref()
        .ok_or_else(|| CliError::Input("attack needs a scenario (use --scenario or --data-dir)".into()))?;
    let runs = run_all(model, args)?;
    let results = attack_runs(model, &runs, scenario)?;
    let mut out = Output::default();
    let mut rows = Vec::new();
    let mut text_rows = Vec::new();
    let mut entries = Vec::new();
    for (r, res) in runs.iter().zip(&results) {
        let frac = res.as_ref().map_or(0.0, |a| entry_fraction(model, a));
        entries.push(AttackEntry {
            algorithm: r.algorithm,
            run: r.run,
            seed: r.seed,
            status: r.status,
            result: res.as_ref(),
            entry_compromise_fraction: frac,
        });
        let Some(a) = res else { continue };
        rows.push(AttackRow {
            algorithm: r.algorithm,
            run: r.run,
            seed: r.seed,
            accessed_sms: join(&a.compromised_sms, ";"),
            prerequisites: join(&a.prerequisites, ";"),
            propagation: join(&a.propagation, ";"),
            compromised_substations: join(&a.compromised_substations, ";"),
            entry_compromise_fraction: frac,
            total_p_lol_mw: a.total_p_lol_mw,
            config_hash: stamp.config_hash.clone(),
        });
        let dash = |s: &BTreeSet<SubstationId>| if s.is_empty() { "-".to_string() } else { join(s, ", ") };
        text_rows.push(vec![
            r.algorithm.to_string(),
            r.run.to_string(),
            a.compromised_sms.len().to_string(),
            dash(&a.prerequisites),
            dash(&a.propagation),
            format!("{:.0}%", frac * 100.0),
            format!("{:.2}", a.total_p_lol_mw),
        ]);
    }
    out.json("attack.json", &AttackJson { stamp, scenario, runs: entries })?;
    out.csv("attack.csv", &rows)?;
    let mode = match scenario.mode {
        gridiv::attack::AttackMode::Capability => "capability",
        gridiv::attack::AttackMode::Budget => "budget",
    };
    out.text = format!(
        "scenario: {mode} k={} targets={}\n",
        scenario.k,
        join(&scenario.target_substations, ",")
    );
    out.text.push_str(&table(
        &["algorithm", "run", "accessed_sms", "attack_start_from", "attack_propagate", "entry_hit", "total_p_lol_mw"],
        &text_rows,
    ));
    Ok(out)
}

// ---- compare ----

#[derive(Debug, Clone, Serialize)]
pub struct CompareEntry {
    pub algorithm: Algorithm,
    pub runs: usize,
    pub failed: usize,
    pub colors_used: usize,
    pub color_names: Vec<String>,
    /// Budget -> fraction of entry-point mechanisms exposed, from the representative run.
    pub entry_compromise_fraction: BTreeMap<usize, f64>,
    pub sigma_mean: f64,
    pub sigma_std: f64,
    pub top: Vec<String>,
}

#[derive(Serialize)]
struct CompareJson<'a> {
    #[serde(flatten)]
    stamp: &'a Stamp,
    algorithms: &'a [CompareEntry],
}

pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn compare_entries(model: &Model, runs: &[RunRecord], top_n: usize) -> Vec<CompareEntry> {
    let algos: Vec<Algorithm> = runs.iter().map(|r| r.algorithm).fold(Vec::new(), |mut v, a| {
        if !v.contains(&a) {
            v.push(a);
        }
        v
    });
    algos
        .into_iter()
        .map(|a| {
            let mine: Vec<&RunRecord> = runs.iter().filter(|r| r.algorithm == a).collect();
            let ok: Vec<&RunRecord> = mine.iter().copied().filter(|r| r.coloring.is_some()).collect();
            let (sigma_mean, sigma_std) = mean_std(&ok.iter().map(|r| r.sigma).collect::<Vec<_>>());
            let rep = ok.first().and_then(|r| r.coloring.as_ref());
            let report = rep.map(|c| diversity_report(&model.g, c, &model.psi, top_n));
            CompareEntry {
                algorithm: a,
                runs: mine.len(),
                failed: mine.len() - ok.len(),
                colors_used: report.as_ref().map_or(0, |r| r.colors_used),
                color_names: report.as_ref().map_or_else(Vec::new, |r| r.color_names.clone()),
                entry_compromise_fraction: report.as_ref().map_or_else(BTreeMap::new, |r| r.entry_compromise_fraction.clone()),
                sigma_mean,
                sigma_std,
                top: report.map_or_else(Vec::new, |r| r.top.into_iter().map(|v| v.id).collect()),
            }
        })
        .collect()
}

pub fn cmd_compare(args: &RunArgs, model: &Model, stamp: &Stamp) -> CliResult<Output> {
    let runs = run_all(model, args)?;
    let entries = compare_entries(model, &runs, args.top);
    let budgets = entries.iter().map(|e| e.entry_compromise_fraction.len()).max().unwrap_or(0);
    let fraction = |e: &CompareEntry, k: usize| -> f64 {
        e.entry_compromise_fraction
            .range(..=k)
            .next_back()
            .map_or(0.0, |(_, f)| *f)
    };

    let mut out = Output::default();
    out.json("compare.json", &CompareJson { stamp, algorithms: &entries })?;

    let mut header: Vec<String> = ["algorithm", "runs", "failed", "colors_used", "color_names", "sigma_mean", "sigma_std"]
        .map(String::from)
        .to_vec();
    header.extend((1..=budgets).map(|k| format!("k{k}")));
    header.extend(["top".to_string(), "config_hash".to_string(), "seed".to_string()]);
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Internal(e.to_string());
    w.write_record(&header).map_err(csv_err)?;
    let mut text_rows = Vec::new();
    for e in &entries {
        let mut rec = vec![
            e.algorithm.to_string(),
            e.runs.to_string(),
            e.failed.to_string(),
            e.colors_used.to_string(),
            e.color_names.join(";"),
            e.sigma_mean.to_string(),
            e.sigma_std.to_string(),
        ];
        rec.extend((1..=budgets).map(|k| fraction(e, k).to_string()));
        rec.extend([e.top.join(";"), stamp.config_hash.clone(), stamp.seed.to_string()]);
        w.write_record(&rec).map_err(csv_err)?;

        let sigma = if e.algorithm.is_stochastic() {
            format!("{:.4} ± {:.4}", e.sigma_mean, e.sigma_std)
        } else {
            format!("{:.4}", e.sigma_mean)
        };
        text_rows.push(vec![
            e.algorithm.to_string(),
            format!("{} ({})", e.colors_used, e.color_names.join(", ")),
            sigma,
            (1..=budgets.min(5)).map(|k| format!("{:.0}%", fraction(e, k) * 100.0)).collect::<Vec<_>>().join(" "),
            e.top.iter().take(3).cloned().collect::<Vec<_>>().join(", "),
        ]);
    }
    out.files.push(("compare.csv".into(), w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?));
    out.text = table(&["algorithm", "colors", "sigma", "entry_hit_k1..5", "top_3"], &text_rows);
    Ok(out)
}
