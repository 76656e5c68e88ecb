//! One function per subcommand. Each returns the fully assembled output
//! text plus the exit code so `main` stays a thin dispatcher.

use serde_json::json;

use netbundle_core::comparison::{
    compare_with, Delta, OutcomeTriple, Scenario, Verdict, WitnessPoint, DEFAULT_DELTA_TOL,
};
use netbundle_core::continuous::{
    bundle_curve, bundle_thresholds, indep_curve, negcorr_curve, poscorr_curve, separate_curve,
    separate_thresholds, CopulaParams,
};
use netbundle_core::curve::AdoptionCurve;
use netbundle_core::discrete;
use netbundle_core::equilibrium::{find_equilibria, region_class, EquilibriumModel, Stability};
use netbundle_core::numerics::QuadratureConfig;
use netbundle_core::simulation::simulate_adoption;

use crate::config::{CliError, LoadedConfig, SimModeName};
use crate::output::{config_echo, fmt_f64, Format};

pub struct CmdOutput {
    pub text: String,
    pub exit: u8,
}

impl CmdOutput {
    fn ok(text: String) -> Self {
        CmdOutput { text, exit: 0 }
    }
}

fn delta_str(d: Delta) -> &'static str {
    match d {
        Delta::Win => "W",
        Delta::Lose => "L",
        Delta::Same => "S",
    }
}

fn mark_str(o: &OutcomeTriple) -> String {
    let m = o.mark();
    format!("{}{}", m[0] as char, m[1] as char)
}

fn stability_str(s: Stability) -> &'static str {
    match s {
        Stability::Stable => "stable",
        Stability::Unstable => "unstable",
    }
}

fn csv_text(records: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.write_record(r)
            .map_err(|e| CliError::Io(format!("csv: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Io(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn pretty_json(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serialization");
    s.push('\n');
    s
}

/// Adoption curve of one offering, for the equilibrium inventory.
/// General-correlation continuous bundles use quadrature and are the
/// one genuinely expensive path.
fn offering_curve(
    sc: &Scenario,
    c: f64,
    e: f64,
    is_bundle: bool,
    quad: &QuadratureConfig,
) -> Result<AdoptionCurve, CliError> {
    use netbundle_core::comparison::AffinityModel;
    let curve = match (sc.model, is_bundle) {
        (AffinityModel::Discrete, false) => AdoptionCurve::Step(discrete::separate_curve(c, e)),
        (AffinityModel::Discrete, true) => {
            AdoptionCurve::Step(discrete::bundle_curve(c, e, sc.rho))
        }
        (AffinityModel::Continuous, false) => separate_curve(c, e),
        (AffinityModel::Continuous, true) => {
            if sc.rho == 1.0 {
                poscorr_curve(c, e)
            } else if sc.rho == -1.0 {
                negcorr_curve(c, e)
            } else if sc.rho == 0.0 {
                indep_curve(c, e)
            } else {
                let params = CopulaParams::with_quad(sc.rho, *quad)?;
                bundle_curve(c, e, &params)?
            }
        }
    };
    Ok(curve)
}

fn offering_json(
    sc: &Scenario,
    c: f64,
    e: f64,
    is_bundle: bool,
    lseq: f64,
    tol: f64,
    quad: &QuadratureConfig,
) -> Result<serde_json::Value, CliError> {
    let curve = offering_curve(sc, c, e, is_bundle, quad)?;
    let report = find_equilibria(&curve, tol);
    let points: Vec<serde_json::Value> = report
        .equilibria
        .iter()
        .map(|eq| json!({ "x": eq.x_star, "stability": stability_str(eq.stability) }))
        .collect();
    let thresholds = if is_bundle {
        let (l, m, r) = bundle_thresholds(c, e);
        json!({ "l": l, "m": m, "r": r })
    } else {
        let (l, r) = separate_thresholds(c, e);
        json!({ "l": l, "r": r })
    };
    Ok(json!({
        "lseq": lseq,
        "equilibria": points,
        "thresholds": thresholds,
    }))
}

pub fn cmd_analyze(lc: &LoadedConfig, fmt: Format) -> Result<CmdOutput, CliError> {
    let sc = lc.cfg.scenario();
    let solver = lc.cfg.solver();
    let quad = lc.cfg.quad();
    solver.validate()?;
    let outcome = compare_with(&sc, DEFAULT_DELTA_TOL, &solver, &quad)?;
    match fmt {
        Format::Json => {
            let b = sc.bundle();
            let value = json!({
                "x1": outcome.x1,
                "x2": outcome.x2,
                "xb": outcome.xb,
                "delta1": delta_str(outcome.delta1),
                "delta2": delta_str(outcome.delta2),
                "equilibria": {
                    "service1": offering_json(&sc, sc.s1.c, sc.s1.e, false, outcome.x1, solver.tol, &quad)?,
                    "service2": offering_json(&sc, sc.s2.c, sc.s2.e, false, outcome.x2, solver.tol, &quad)?,
                    "bundle": offering_json(&sc, b.c, b.e, true, outcome.xb, solver.tol, &quad)?,
                },
            });
            Ok(CmdOutput::ok(pretty_json(&value)))
        }
        Format::Csv => {
            let records = vec![
                vec![
                    "x1".into(),
                    "x2".into(),
                    "xb".into(),
                    "delta1".into(),
                    "delta2".into(),
                ],
                vec![
                    fmt_f64(outcome.x1),
                    fmt_f64(outcome.x2),
                    fmt_f64(outcome.xb),
                    delta_str(outcome.delta1).into(),
                    delta_str(outcome.delta2).into(),
                ],
            ];
            let text = format!("{}{}", config_echo(&lc.raw), csv_text(&records)?);
            Ok(CmdOutput::ok(text))
        }
    }
}

pub fn cmd_sweep(
    lc: &LoadedConfig,
    fmt: Format,
    steps_override: Option<u32>,
) -> Result<CmdOutput, CliError> {
    let block = lc.cfg.sweep_block()?;
    let solver = lc.cfg.solver();
    let quad = lc.cfg.quad();
    solver.validate()?;
    let steps = steps_override.unwrap_or(block.steps);
    if steps < 2 {
        return Err(CliError::Config(format!(
            "sweep needs at least 2 steps, got {steps}"
        )));
    }
    if !(block.from.is_finite() && block.to.is_finite() && block.from < block.to) {
        return Err(CliError::Config(format!(
            "sweep range must be finite with from < to, got [{}, {}]",
            block.from, block.to
        )));
    }
    let base = lc.cfg.scenario();
    // grid endpoints must themselves be legal values for the swept variable
    for v in [block.from, block.to] {
        block.var.apply(&base, v).validate()?;
    }

    let mut rows: Vec<(f64, Option<OutcomeTriple>)> = Vec::with_capacity(steps as usize);
    let mut any_failed = false;
    for i in 0..steps {
        let v = block.from + (block.to - block.from) * f64::from(i) / f64::from(steps - 1);
        match compare_with(&block.var.apply(&base, v), DEFAULT_DELTA_TOL, &solver, &quad) {
            Ok(o) => rows.push((v, Some(o))),
            Err(_) => {
                any_failed = true;
                rows.push((v, None));
            }
        }
    }

    let exit = if any_failed { 3 } else { 0 };
    match fmt {
        Format::Csv => {
            let mut records = vec![vec![
                block.var.name().to_string(),
                "x1".into(),
                "x2".into(),
                "xb".into(),
                "delta1".into(),
                "delta2".into(),
            ]];
            for (v, row) in &rows {
                records.push(match row {
                    Some(o) => vec![
                        fmt_f64(*v),
                        fmt_f64(o.x1),
                        fmt_f64(o.x2),
                        fmt_f64(o.xb),
                        delta_str(o.delta1).into(),
                        delta_str(o.delta2).into(),
                    ],
                    None => vec![
                        fmt_f64(*v),
                        "NaN".into(),
                        "NaN".into(),
                        "NaN".into(),
                        "?".into(),
                        "?".into(),
                    ],
                });
            }
            let text = format!("{}{}", config_echo(&lc.raw), csv_text(&records)?);
            Ok(CmdOutput { text, exit })
        }
        Format::Json => {
            let json_rows: Vec<serde_json::Value> = rows
                .iter()
                .map(|(v, row)| match row {
                    Some(o) => json!({
                        "value": v,
                        "x1": o.x1,
                        "x2": o.x2,
                        "xb": o.xb,
                        "delta1": delta_str(o.delta1),
                        "delta2": delta_str(o.delta2),
                    }),
                    None => json!({
                        "value": v,
                        "x1": null,
                        "x2": null,
                        "xb": null,
                        "delta1": "?",
                        "delta2": "?",
                    }),
                })
                .collect();
            let value = json!({ "var": block.var.name(), "rows": json_rows });
            Ok(CmdOutput {
                text: pretty_json(&value),
                exit,
            })
        }
    }
}

pub fn cmd_region_map(lc: &LoadedConfig, fmt: Format) -> Result<CmdOutput, CliError> {
    let block = lc.cfg.region_map_block()?;
    let model = lc.cfg.region_model(block.model);
    if let EquilibriumModel::BundleDiscrete(rho) = model {
        if rho.is_nan() || !(-1.0..=1.0).contains(&rho) {
            return Err(CliError::Config(format!(
                "region map with bun_disc needs rho in [-1, 1], got {rho}"
            )));
        }
    }
    let res = block.resolution;
    if res < 2 {
        return Err(CliError::Config(format!(
            "region map resolution must be at least 2, got {res}"
        )));
    }
    for (axis, [lo, hi]) in [("c_range", block.c_range), ("e_range", block.e_range)] {
        if !(lo.is_finite() && hi.is_finite() && lo < hi && lo >= 0.0) {
            return Err(CliError::Config(format!(
                "{axis} must satisfy 0 <= lo < hi with finite bounds, got [{lo}, {hi}]"
            )));
        }
    }
    let with_roots = matches!(model, EquilibriumModel::BundleIndep);
    let grid = |lo: f64, hi: f64, i: u32| lo + (hi - lo) * f64::from(i) / f64::from(res - 1);

    let mut points = Vec::with_capacity((res as usize) * (res as usize));
    for i in 0..res {
        let c = grid(block.c_range[0], block.c_range[1], i);
        for j in 0..res {
            let e = grid(block.e_range[0], block.e_range[1], j);
            points.push((c, e, region_class(c, e, model)));
        }
    }

    match fmt {
        Format::Csv => {
            let mut header = vec![
                "c".to_string(),
                "e".into(),
                "lseq_class".into(),
                "lseq_value".into(),
            ];
            if with_roots {
                header.extend(
                    ["lower_minus", "lower_plus", "upper_minus", "upper_plus"]
                        .map(String::from),
                );
            }
            let mut records = vec![header];
            for (c, e, pt) in &points {
                let mut rec = vec![
                    fmt_f64(*c),
                    fmt_f64(*e),
                    pt.label.to_string(),
                    fmt_f64(pt.lseq),
                ];
                if with_roots {
                    let flags = pt.regions.expect("independent bundle reports root flags");
                    rec.extend(flags.map(|b| u8::from(b).to_string()));
                }
                records.push(rec);
            }
            let text = format!("{}{}", config_echo(&lc.raw), csv_text(&records)?);
            Ok(CmdOutput::ok(text))
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = points
                .iter()
                .map(|(c, e, pt)| {
                    json!({
                        "c": c,
                        "e": e,
                        "lseq_class": pt.label,
                        "lseq_value": pt.lseq,
                        "roots": pt.regions,
                    })
                })
                .collect();
            Ok(CmdOutput::ok(pretty_json(&json!({ "rows": rows }))))
        }
    }
}

pub fn cmd_montecarlo(lc: &LoadedConfig, fmt: Format, seed: u64) -> Result<CmdOutput, CliError> {
    let block = lc.cfg.montecarlo_block()?;
    let sc = lc.cfg.scenario();
    let solver = lc.cfg.solver();
    let quad = lc.cfg.quad();
    solver.validate()?;
    let mode = block.mode.to_mode();
    let traj = simulate_adoption(&sc, mode, block.n, seed, block.max_rounds)?;
    let outcome = compare_with(&sc, DEFAULT_DELTA_TOL, &solver, &quad)?;
    let analytic = match block.mode {
        SimModeName::Separate1 => outcome.x1,
        SimModeName::Separate2 => outcome.x2,
        SimModeName::Bundle => outcome.xb,
    };
    let final_level = traj.final_level();
    let summary = json!({
        "final": final_level,
        "analytic_lseq": analytic,
        "abs_error": (final_level - analytic).abs(),
        "converged": traj.converged,
    });
    match fmt {
        Format::Csv => {
            let mut records = vec![vec!["round".to_string(), "level".into()]];
            for (i, level) in traj.levels.iter().enumerate() {
                records.push(vec![i.to_string(), fmt_f64(*level)]);
            }
            let text = format!(
                "{}{}# summary {}\n",
                config_echo(&lc.raw),
                csv_text(&records)?,
                serde_json::to_string(&summary).expect("json serialization"),
            );
            Ok(CmdOutput::ok(text))
        }
        Format::Json => {
            let value = json!({
                "levels": traj.levels,
                "summary": summary,
            });
            Ok(CmdOutput::ok(pretty_json(&value)))
        }
    }
}

fn verdict_str(v: &Verdict) -> &'static str {
    match v {
        Verdict::ConfirmedTrue => "CONFIRMED-TRUE",
        Verdict::ConfirmedFalse => "CONFIRMED-FALSE",
        Verdict::Witnessed(_) => "WITNESSED",
        Verdict::NotFound => "NOT-FOUND",
        Verdict::Discrepancy(_) => "DISCREPANCY",
    }
}

fn verdict_witness(v: &Verdict) -> Option<&WitnessPoint> {
    match v {
        Verdict::Witnessed(wp) | Verdict::Discrepancy(Some(wp)) => Some(wp),
        _ => None,
    }
}

pub fn cmd_table(lc: &LoadedConfig, fmt: Format, seed: u64) -> Result<CmdOutput, CliError> {
    let block = lc.cfg.table_block()?;
    let model = lc.cfg.table_model(block.model);
    let table = netbundle_core::comparison::feasibility_table(model, block.samples_per_row, seed)?;
    let exit = if table.has_discrepancy() { 4 } else { 0 };
    let rows = model.row_labels();
    let cols = model.col_labels();

    match fmt {
        Format::Csv => {
            let mut records = vec![[
                "row", "col", "annotation", "verdict", "hits", "mark", "c1", "e1", "c2", "e2",
                "x1", "x2", "xb",
            ]
            .map(String::from)
            .to_vec()];
            for (ri, row_label) in rows.iter().enumerate() {
                for (ci, col_label) in cols.iter().enumerate() {
                    let cell = table.cell(ri, ci);
                    let annotation = match cell.annotation {
                        Some(true) => "True",
                        Some(false) => "False",
                        None => "",
                    };
                    let mut rec = vec![
                        row_label.to_string(),
                        col_label.to_string(),
                        annotation.into(),
                        verdict_str(&cell.verdict).into(),
                        cell.hits.to_string(),
                    ];
                    match verdict_witness(&cell.verdict) {
                        Some(wp) => rec.extend([
                            mark_str(&wp.outcome),
                            fmt_f64(wp.scenario.s1.c),
                            fmt_f64(wp.scenario.s1.e),
                            fmt_f64(wp.scenario.s2.c),
                            fmt_f64(wp.scenario.s2.e),
                            fmt_f64(wp.outcome.x1),
                            fmt_f64(wp.outcome.x2),
                            fmt_f64(wp.outcome.xb),
                        ]),
                        None => rec.extend(std::iter::repeat_n(String::new(), 8)),
                    }
                    records.push(rec);
                }
            }
            let text = format!("{}{}", config_echo(&lc.raw), csv_text(&records)?);
            Ok(CmdOutput { text, exit })
        }
        Format::Json => {
            let mut cells = Vec::new();
            for (ri, row_label) in rows.iter().enumerate() {
                for (ci, col_label) in cols.iter().enumerate() {
                    let cell = table.cell(ri, ci);
                    let witness = verdict_witness(&cell.verdict).map(|wp| {
                        json!({
                            "c1": wp.scenario.s1.c,
                            "e1": wp.scenario.s1.e,
                            "c2": wp.scenario.s2.c,
                            "e2": wp.scenario.s2.e,
                            "x1": wp.outcome.x1,
                            "x2": wp.outcome.x2,
                            "xb": wp.outcome.xb,
                            "mark": mark_str(&wp.outcome),
                        })
                    });
                    cells.push(json!({
                        "row": row_label,
                        "col": col_label,
                        "annotation": cell.annotation,
                        "verdict": verdict_str(&cell.verdict),
                        "hits": cell.hits,
                        "witness": witness,
                    }));
                }
            }
            let value = json!({
                "model": block.model.name(),
                "cells": cells,
                "discrepancy": table.has_discrepancy(),
            });
            Ok(CmdOutput {
                text: pretty_json(&value),
                exit,
            })
        }
    }
}
