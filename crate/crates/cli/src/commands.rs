//! The six subcommands.

use std::collections::BTreeMap;
use std::fs;

use serde::Serialize;
use serde_json::json;

use pagesim::analysis::interval::{rat_f64, rat_string};
use pagesim::analysis::search::SearchError;
use pagesim::analysis::{
    analytic_interval, diff_ratio_curve, exhaustive_minmax, k_phases, per_phase_faults,
    AnalysisError, CycleFaultModel, SearchBudget,
};
use pagesim::engine::{self, Algorithm, CacheConfig, SimulationTrace};
use pagesim::families::{FamilyId, FamilySpec};
use pagesim::graph::{AccessGraph, PageId, RequestSequence};

use crate::common::{graph_label, render_table, CliError, GraphArg, Output};
use crate::{
    parse_family, BoundsArgs, CurveArgs, FamiliesArgs, IntervalArgs, SimulateArgs, ValidateArgs,
};

fn resolve_graph_arg(
    graph: &Option<GraphArg>,
    graph_file: &Option<std::path::PathBuf>,
) -> Result<Option<AccessGraph>, CliError> {
    match (graph, graph_file) {
        (Some(g), _) => g.resolve().map(Some),
        (None, Some(path)) => GraphArg::File(path.clone()).resolve().map(Some),
        (None, None) => Ok(None),
    }
}

/// Builds a family spec from CLI parameters, taking the vertex count from an
/// explicit graph when one is given.
fn family_spec(
    id: FamilyId,
    k: usize,
    n: usize,
    r: Option<u32>,
    graph: &Option<AccessGraph>,
) -> Result<FamilySpec, CliError> {
    let mut spec = FamilySpec::new(id, k, n);
    if let Some(r) = r {
        spec = spec.with_r(r);
    }
    if let Some(g) = graph {
        if g.class() != id.graph_class() {
            return Err(CliError::usage(format!(
                "family {id} lives on {} graphs, got {}",
                id.graph_class(),
                g.class()
            )));
        }
        spec = spec.with_n_vertices(g.n_vertices());
    }
    Ok(spec)
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct RunSummary {
    algorithm: Algorithm,
    k: usize,
    graph: String,
    faults: usize,
    length: usize,
}

#[derive(Serialize)]
struct RunReport {
    summary: RunSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    per_phase_faults: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<SimulationTrace>,
}

pub fn simulate(args: SimulateArgs, seed: Option<u64>) -> Result<(), CliError> {
    if args.k < 1 {
        return Err(CliError::usage("cache size --k must be at least 1"));
    }
    let explicit_graph = resolve_graph_arg(&args.graph, &args.graph_file)?;

    let (graph, sequence, family_desc) = if let Some(name) = &args.family {
        let id = parse_family(name)?;
        let spec = family_spec(id, args.k, args.n, args.r, &explicit_graph)?;
        let inst = spec.expand().map_err(|e| CliError::usage(e.to_string()))?;
        (inst.graph, inst.sequence, Some(format!("{id}")))
    } else {
        let graph = explicit_graph
            .ok_or_else(|| CliError::usage("need --graph or --graph-file for raw sequences"))?;
        let sequence = if let Some(inline) = &args.seq {
            RequestSequence::parse_csv(inline)
                .map_err(|e| CliError::usage(format!("bad --seq: {e}")))?
        } else if let Some(path) = &args.seq_file {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(|l| l.parse::<u32>().map(PageId))
                .collect::<Result<Vec<_>, _>>()
                .map(RequestSequence::new)
                .map_err(|e| CliError::usage(format!("bad sequence file: {e}")))?
        } else {
            return Err(CliError::usage("need one of --family, --seq, --seq-file"));
        };
        (graph, sequence, None)
    };

    if !args.no_validate {
        graph
            .check_respects(&sequence)
            .map_err(|e| CliError::validation(format!("sequence violates the graph: {e}")))?;
    }

    let algs = args.algs.clone().unwrap_or_else(|| Algorithm::ALL.to_vec());
    let cfg = CacheConfig::new(args.k, &graph);
    let label = graph_label(&graph);
    let phases = k_phases(&sequence, args.k);

    let mut runs = Vec::new();
    for &alg in &algs {
        let trace = engine::simulate(alg, &sequence, &cfg)
            .map_err(|e| CliError::validation(e.to_string()))?;
        runs.push(RunReport {
            summary: RunSummary {
                algorithm: alg,
                k: args.k,
                graph: label.clone(),
                faults: trace.total_faults,
                length: trace.len(),
            },
            per_phase_faults: args.phases.then(|| per_phase_faults(&trace, &phases)),
            trace: args.trace.then_some(trace),
        });
    }

    let out = Output::new(args.output.json, args.output.csv, args.output.out.clone());
    match out.format {
        crate::common::OutputFormat::Json => {
            let config = json!({
                "command": "simulate", "k": args.k, "graph": label,
                "family": family_desc, "n": args.n, "algs": algs,
            });
            out.emit_json(config, seed, &runs)
        }
        crate::common::OutputFormat::Csv => {
            let mut text = String::from("algorithm,k,graph,faults,length\n");
            for r in &runs {
                text.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.summary.algorithm,
                    r.summary.k,
                    r.summary.graph,
                    r.summary.faults,
                    r.summary.length
                ));
            }
            out.emit(text)
        }
        crate::common::OutputFormat::Text => {
            let mut rows = Vec::new();
            for r in &runs {
                let mut row = vec![
                    r.summary.algorithm.to_string(),
                    r.summary.faults.to_string(),
                    r.summary.length.to_string(),
                ];
                if args.phases {
                    row.push(format!("{:?}", r.per_phase_faults.as_ref().unwrap()));
                }
                rows.push(row);
            }
            let header: &[&str] = if args.phases {
                &["algorithm", "faults", "length", "faults/phase"]
            } else {
                &["algorithm", "faults", "length"]
            };
            let mut text = format!("graph {label}, k={}", args.k);
            if let Some(f) = &family_desc {
                text.push_str(&format!(", family {f} (n={})", args.n));
            }
            text.push('\n');
            text.push_str(&render_table(header, &rows));
            if args.trace {
                for r in &runs {
                    text.push_str(&format!("# trace {}\n", r.summary.algorithm));
                    text.push_str(&r.trace.as_ref().unwrap().to_json_lines());
                }
            }
            out.emit(text)
        }
    }
}

// ---------------------------------------------------------------------------
// validate-families
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ValidationRow {
    family: FamilyId,
    k: usize,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<u32>,
    algorithm: Algorithm,
    predicted: u64,
    simulated: u64,
    ok: bool,
}

#[derive(Serialize)]
struct ValidationReport {
    rows: Vec<ValidationRow>,
    checks: usize,
    mismatches: usize,
    skipped: Vec<String>,
}

pub fn validate_families(args: ValidateArgs, seed: Option<u64>) -> Result<(), CliError> {
    let selected: Vec<FamilyId> = match &args.families {
        None => FamilyId::ALL.to_vec(),
        Some(list) => list
            .split(',')
            .map(|s| parse_family(s.trim()))
            .collect::<Result<_, _>>()?,
    };
    if args.k_min > args.k_max || args.n_min > args.n_max {
        return Err(CliError::usage("empty k or n range"));
    }

    let mut report = ValidationReport {
        rows: Vec::new(),
        checks: 0,
        mismatches: 0,
        skipped: Vec::new(),
    };

    for &id in &selected {
        for k in args.k_min..=args.k_max {
            for n in args.n_min.max(1)..=args.n_max {
                let specs: Vec<FamilySpec> = if id.takes_r() {
                    (1..k as u32)
                        .filter(|&r| k + r as usize <= 16)
                        .map(|r| FamilySpec::new(id, k, n).with_r(r))
                        .collect()
                } else {
                    vec![FamilySpec::new(id, k, n)]
                };
                for spec in specs {
                    let inst = match spec.expand() {
                        Ok(inst) => inst,
                        Err(e) => {
                            let msg = e.to_string();
                            if !report.skipped.contains(&msg) {
                                report.skipped.push(msg);
                            }
                            continue;
                        }
                    };
                    let cfg = CacheConfig::new(spec.k, &inst.graph);
                    for (&alg, &predicted) in &inst.prediction.predicted_faults {
                        let simulated =
                            pagesim::engine::fault_count(alg, &inst.sequence, &cfg).unwrap() as u64;
                        let ok = simulated == predicted;
                        report.checks += 1;
                        report.mismatches += !ok as usize;
                        report.rows.push(ValidationRow {
                            family: id,
                            k,
                            n,
                            r: spec.r,
                            algorithm: alg,
                            predicted,
                            simulated,
                            ok,
                        });
                    }
                }
            }
        }
    }

    let out = Output::new(args.output.json, args.output.csv, args.output.out.clone());
    match out.format {
        crate::common::OutputFormat::Json => {
            let config = json!({
                "command": "validate-families",
                "families": selected.iter().map(|f| f.as_str()).collect::<Vec<_>>(),
                "k": [args.k_min, args.k_max], "n": [args.n_min, args.n_max],
            });
            out.emit_json(config, seed, &report)?;
        }
        crate::common::OutputFormat::Csv => {
            let mut text = String::from("family,k,n,r,algorithm,predicted,simulated,match\n");
            for row in &report.rows {
                text.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    row.family,
                    row.k,
                    row.n,
                    row.r.map(|r| r.to_string()).unwrap_or_default(),
                    row.algorithm,
                    row.predicted,
                    row.simulated,
                    if row.ok { "OK" } else { "FAIL" }
                ));
            }
            out.emit(text)?;
        }
        crate::common::OutputFormat::Text => {
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|row| {
                    vec![
                        row.family.to_string(),
                        format!(
                            "k={} n={}{}",
                            row.k,
                            row.n,
                            row.r.map(|r| format!(" r={r}")).unwrap_or_default()
                        ),
                        row.algorithm.to_string(),
                        row.predicted.to_string(),
                        row.simulated.to_string(),
                        if row.ok { "OK" } else { "FAIL" }.to_string(),
                    ]
                })
                .collect();
            let mut text = render_table(
                &[
                    "family",
                    "params",
                    "algorithm",
                    "predicted",
                    "simulated",
                    "match",
                ],
                &rows,
            );
            for s in &report.skipped {
                text.push_str(&format!("skipped: {s}\n"));
            }
            text.push_str(&format!(
                "{} checks, {} mismatches\n",
                report.checks, report.mismatches
            ));
            out.emit(text)?;
        }
    }

    if report.mismatches > 0 {
        return Err(CliError::validation(format!(
            "{} of {} prediction checks failed",
            report.mismatches, report.checks
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// interval
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct EmpiricalReport {
    n: usize,
    min_diff: i64,
    max_diff: i64,
    min_witness: String,
    max_witness: String,
    sequences_examined: u64,
}

#[derive(Serialize)]
struct IntervalReport {
    pair: (Algorithm, Algorithm),
    graph: String,
    k: usize,
    analytic_inner: Option<pagesim::analysis::IntervalBounds>,
    analytic_outer: Option<pagesim::analysis::IntervalBounds>,
    #[serde(skip_serializing_if = "Option::is_none")]
    analytic_note: Option<String>,
    empirical: Option<EmpiricalReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    refusal: Option<String>,
}

pub fn interval(args: IntervalArgs, seed: Option<u64>) -> Result<(), CliError> {
    if args.k < 1 {
        return Err(CliError::usage("cache size --k must be at least 1"));
    }
    let graph = resolve_graph_arg(&args.graph, &args.graph_file)?
        .ok_or_else(|| CliError::usage("need --graph or --graph-file"))?;
    let (a, b) = args.pair;

    let analytic = analytic_interval(a, b, graph.class(), args.k, Some(graph.n_vertices()));
    let (inner, outer, note) = match &analytic {
        Ok(iv) => (iv.inner, iv.outer, None),
        Err(e @ AnalysisError::UnsupportedPair { .. }) => (None, None, Some(e.to_string())),
        Err(e) => return Err(CliError::usage(e.to_string())),
    };

    let mut refusal = None;
    let empirical = match args.n {
        None => None,
        Some(n) => match exhaustive_minmax(a, b, &graph, args.k, n, SearchBudget(args.budget)) {
            Ok(r) => Some(EmpiricalReport {
                n,
                min_diff: r.min_diff,
                max_diff: r.max_diff,
                min_witness: r.min_witness.to_string(),
                max_witness: r.max_witness.to_string(),
                sequences_examined: r.sequences_examined,
            }),
            Err(e @ SearchError::BudgetExceeded { .. }) => {
                refusal = Some(e.to_string());
                None
            }
            Err(e) => return Err(CliError::usage(e.to_string())),
        },
    };

    if inner.is_none() && outer.is_none() && empirical.is_none() && refusal.is_none() {
        return Err(CliError::usage(format!(
            "no analytic bounds for ({a}, {b}) on {} graphs and no --n for an empirical search",
            graph.class()
        )));
    }

    let report = IntervalReport {
        pair: (a, b),
        graph: graph_label(&graph),
        k: args.k,
        analytic_inner: inner,
        analytic_outer: outer,
        analytic_note: note,
        empirical,
        refusal: refusal.clone(),
    };

    let out = Output::new(args.output.json, args.output.csv, args.output.out.clone());
    match out.format {
        crate::common::OutputFormat::Json => {
            let config = json!({
                "command": "interval", "pair": [a, b], "graph": report.graph,
                "k": args.k, "n": args.n, "budget": args.budget,
            });
            out.emit_json(config, seed, &report)?;
        }
        _ => {
            let mut text = format!(
                "relative interval of ({a} - {b}) on {}, k={}\n",
                report.graph, args.k
            );
            match (report.analytic_inner, report.analytic_outer) {
                (Some(i), Some(o)) if i == o => text.push_str(&format!("analytic: {i} (exact)\n")),
                (i, o) => {
                    if let Some(i) = i {
                        text.push_str(&format!("analytic inner: {i}\n"));
                    }
                    if let Some(o) = o {
                        text.push_str(&format!("analytic outer: {o}\n"));
                    }
                }
            }
            if let Some(n) = &report.analytic_note {
                text.push_str(&format!("analytic: {n}\n"));
            }
            if let Some(e) = &report.empirical {
                text.push_str(&format!(
                    "empirical n={}: min {} (witness {}), max {} (witness {}), {} sequences\n",
                    e.n, e.min_diff, e.min_witness, e.max_diff, e.max_witness, e.sequences_examined
                ));
            }
            if let Some(r) = &report.refusal {
                text.push_str(&format!("empirical: refused: {r}\n"));
            }
            out.emit(text)?;
        }
    }

    match refusal {
        Some(msg) => Err(CliError::budget(msg)),
        None => Ok(()),
    }
}

// ---------------------------------------------------------------------------
// bounds-table
// ---------------------------------------------------------------------------

pub fn bounds_table(args: BoundsArgs, seed: Option<u64>) -> Result<(), CliError> {
    if args.k < 2 {
        return Err(CliError::usage("bounds need k >= 2"));
    }
    let cycle_n = args.k as u32 + args.r;
    let rows = pagesim::analysis::table_rows(args.k, Some(cycle_n));
    let model = CycleFaultModel::new(cycle_n, args.k).ok();

    let out = Output::new(args.output.json, args.output.csv, args.output.out.clone());
    match out.format {
        crate::common::OutputFormat::Json => {
            let config = json!({"command": "bounds-table", "k": args.k, "r": args.r});
            let payload = json!({"rows": rows, "cycle_model": model});
            out.emit_json(config, seed, &payload)?;
        }
        crate::common::OutputFormat::Csv => {
            let mut text = String::from(
                "graph,pair_a,pair_b,n_vertices,inner_lo,inner_hi,outer_lo,outer_hi\n",
            );
            for row in &rows {
                let cell =
                    |b: Option<pagesim::analysis::IntervalBounds>,
                     f: fn(&pagesim::analysis::IntervalBounds) -> String| {
                        b.as_ref().map(f).unwrap_or_default()
                    };
                text.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    row.graph_class,
                    row.pair.0,
                    row.pair.1,
                    row.n_vertices.map(|n| n.to_string()).unwrap_or_default(),
                    cell(row.interval.inner, |b| rat_string(b.lo)),
                    cell(row.interval.inner, |b| rat_string(b.hi)),
                    cell(row.interval.outer, |b| rat_string(b.lo)),
                    cell(row.interval.outer, |b| rat_string(b.hi)),
                ));
            }
            out.emit(text)?;
        }
        crate::common::OutputFormat::Text => {
            let fmt_bounds = |b: Option<pagesim::analysis::IntervalBounds>| match b {
                None => "-".to_string(),
                Some(b) => format!("{} ({:.4}, {:.4})", b, rat_f64(b.lo), rat_f64(b.hi)),
            };
            let table_rows: Vec<Vec<String>> = rows
                .iter()
                .map(|row| {
                    let relation = if row.interval.is_exact() { "=" } else { "⊆" };
                    vec![
                        row.graph_class.to_string(),
                        format!("({}, {})", row.pair.0, row.pair.1),
                        relation.to_string(),
                        fmt_bounds(row.interval.inner),
                        fmt_bounds(row.interval.outer),
                    ]
                })
                .collect();
            let mut text = format!("analytic interval bounds at k={}\n", args.k);
            text.push_str(&render_table(
                &["graph", "pair", "rel", "inner", "outer"],
                &table_rows,
            ));
            if let Some(m) = &model {
                text.push_str(&format!(
                    "cycle rows at N=k+r={}: X_r={} (x={}, y={}), turning x^={}, y^={} ({} faults/phase)\n",
                    m.n_vertices, m.x_r, m.x, m.y, m.x_hat, m.y_hat,
                    m.turning_phase_faults()
                ));
            }
            out.emit(text)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// curve
// ---------------------------------------------------------------------------

pub fn curve(args: CurveArgs, seed: Option<u64>) -> Result<(), CliError> {
    let id = parse_family(&args.family)?;
    let explicit_graph = match &args.graph {
        Some(g) => Some(g.resolve()?),
        None => None,
    };
    let spec = family_spec(id, args.k, 1, args.r, &explicit_graph)?;
    if args.n_list.is_empty() {
        return Err(CliError::usage("need --n-list"));
    }
    let pair = args.pair.unwrap_or_else(|| id.ratio_pair());
    let points =
        diff_ratio_curve(pair, &spec, &args.n_list).map_err(|e| CliError::usage(e.to_string()))?;
    let limit = spec.stated_limit(pair);

    // The vertex count actually used (families default to k+1).
    let n_vertices = spec
        .expand()
        .map(|inst| inst.graph.n_vertices())
        .map_err(|e| CliError::usage(e.to_string()))?;

    // CSV is this command's native format.
    let json = args.output.json;
    let out = Output::new(json, !json, args.output.out.clone());
    match out.format {
        crate::common::OutputFormat::Json => {
            let config = json!({
                "command": "curve", "family": id, "k": args.k, "r": spec.r,
                "pair": [pair.0, pair.1], "n_list": args.n_list,
            });
            let payload = json!({
                "family": id,
                "pair": [pair.0, pair.1],
                "n_vertices": n_vertices,
                "points": points,
                "stated_limit": limit.map(rat_string),
                "stated_limit_approx": limit.map(rat_f64),
            });
            out.emit_json(config, seed, &payload)?;
        }
        _ => {
            let mut text = String::from("family_id,k,N,n,len,faults_A,faults_B,diff,ratio\n");
            for p in &points {
                text.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    id, args.k, n_vertices, p.n, p.len, p.faults_a, p.faults_b, p.diff, p.ratio
                ));
            }
            if let Some(l) = limit {
                text.push_str(&format!(
                    "# stated limit {} = {}\n",
                    rat_string(l),
                    rat_f64(l)
                ));
            }
            out.emit(text)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// families
// ---------------------------------------------------------------------------

pub fn families(args: FamiliesArgs, seed: Option<u64>) -> Result<(), CliError> {
    let out = Output::new(true, false, args.output.out.clone());
    match &args.expand {
        Some(name) => {
            let id = parse_family(name)?;
            let k = args
                .k
                .ok_or_else(|| CliError::usage("--expand needs --k"))?;
            let explicit_graph = match &args.graph {
                Some(g) => Some(g.resolve()?),
                None => None,
            };
            let spec = family_spec(id, k, args.n, args.r, &explicit_graph)?;
            let inst = spec.expand().map_err(|e| CliError::usage(e.to_string()))?;
            let predictions: BTreeMap<String, u64> = inst
                .prediction
                .predicted_faults
                .iter()
                .map(|(a, &v)| (a.to_string(), v))
                .collect();
            let payload = json!({
                "family_id": id,
                "params": spec,
                "graph": inst.graph,
                "length": inst.sequence.len(),
                "prefix_len": inst.prefix_len,
                "sequence": inst.sequence,
                "predictions": predictions,
                "source": inst.prediction.source,
            });
            let config = json!({"command": "families", "expand": id, "k": k, "n": args.n});
            out.emit_json(config, seed, &payload)
        }
        None => {
            let text_out = Output::new(args.output.json, args.output.csv, args.output.out.clone());
            if text_out.format == crate::common::OutputFormat::Json {
                let list: Vec<_> = FamilyId::ALL
                    .iter()
                    .map(|f| {
                        json!({
                            "family_id": f.as_str(),
                            "graph_class": f.graph_class(),
                            "takes_r": f.takes_r(),
                            "default_pair": f.ratio_pair(),
                        })
                    })
                    .collect();
                return text_out.emit_json(json!({"command": "families"}), seed, &list);
            }
            let rows: Vec<Vec<String>> = FamilyId::ALL
                .iter()
                .map(|f| {
                    let params = if f.takes_r() {
                        "k, r, n"
                    } else if f.graph_class() == pagesim::graph::GraphClass::Cycle {
                        "k, n, N (via --graph)"
                    } else {
                        "k, n"
                    };
                    let (a, b) = f.ratio_pair();
                    vec![
                        f.to_string(),
                        f.graph_class().to_string(),
                        params.to_string(),
                        format!("{a} vs {b}"),
                    ]
                })
                .collect();
            text_out.emit(render_table(
                &["family", "graph", "params", "stretches"],
                &rows,
            ))
        }
    }
}
