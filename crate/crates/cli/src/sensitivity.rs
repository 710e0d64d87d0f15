//! `sensitivity` and `sweep`.

use fockforce_core::fock::tensor_len;
use fockforce_core::metrology::{analyze, Criterion, SensitivityReport};
use fockforce_core::states::StateFamily;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{AxisArg, CommonArgs, Format, SweepOnly};
use crate::config::RunConfig;
use crate::error::{exit, CliError, CliResult};
use crate::family::{family_from_args, param_columns, params_json, with_axis};
use crate::output::{csv_string, fmt_num, json_num, json_string};
use crate::Report;

pub const HEADER: [&str; 14] = [
    "family",
    "alpha",
    "r",
    "lambda",
    "K",
    "nu",
    "N",
    "n_total",
    "S_per_eps",
    "V",
    "snr_slope",
    "eps_min",
    "convention",
    "error",
];

/// Minimum detectable force of one configuration at the configured (or
/// default) truncation.
pub fn evaluate(family: &StateFamily, cfg: &RunConfig) -> CliResult<SensitivityReport> {
    let dim = match cfg.dim {
        Some(d) => d,
        None => family.default_dim()?,
    };
    tensor_len(&vec![dim; family.mode_count()], cfg.memory_cap)?;
    Ok(analyze(family, cfg.convention, dim)?)
}

fn convention_tag(r: &SensitivityReport) -> &'static str {
    match r.criterion {
        Criterion::SnrUnity => "snr_unity",
        Criterion::Bound(c) => c.tag(),
    }
}

fn csv_row(r: &SensitivityReport) -> Vec<String> {
    let mut row = vec![r.family.tag().to_string()];
    row.extend(param_columns(&r.family));
    row.extend([
        fmt_num(r.mean_photon_total),
        fmt_num(r.signal),
        fmt_num(r.variance),
        fmt_num(r.snr_slope),
        fmt_num(r.epsilon_min),
        convention_tag(r).to_string(),
        String::new(),
    ]);
    row
}

fn report_json(r: &SensitivityReport) -> Value {
    json!({
        "family": r.family.tag(),
        "params": params_json(&r.family),
        "signal": json_num(r.signal),
        "variance": json_num(r.variance),
        "snr_slope": json_num(r.snr_slope),
        "epsilon_min": json_num(r.epsilon_min),
        "mean_photon_total": json_num(r.mean_photon_total),
        "mode_count": r.mode_count,
        "convention": convention_tag(r),
        "linear": r.linear,
    })
}

pub fn run(common: &CommonArgs, cfg: &RunConfig) -> CliResult<Report> {
    let family = family_from_args(common)?;
    let r = evaluate(&family, cfg)?;
    let body = match cfg.output_format {
        Format::Csv => csv_string(&HEADER, &[csv_row(&r)]),
        Format::Json => json_string(&report_json(&r)),
    };
    let note = format!("{}: eps_min = {:.6} ({})\n", family.tag(), r.epsilon_min, convention_tag(&r));
    Ok(Report::new(body, note))
}

/// Grid of a sweep: explicit values or `count` points from `start` to `stop`.
pub fn grid(opts: &SweepOnly) -> CliResult<Vec<f64>> {
    let values = match (&opts.values, opts.start, opts.stop, opts.count) {
        (Some(v), None, None, None) => v.clone(),
        (None, Some(a), Some(b), Some(n)) => match n {
            0 => Vec::new(),
            1 => vec![a],
            _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
        },
        _ => return Err(CliError::input("sweep needs either --values or all of --start, --stop, --count")),
    };
    if values.is_empty() {
        return Err(CliError::input("sweep grid is empty"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(CliError::input("sweep values must be finite"));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::input("sweep values must be strictly increasing"));
    }
    Ok(values)
}

/// One grid point of a sweep.
pub struct SweepRow {
    pub value: f64,
    pub family: Option<StateFamily>,
    pub result: Result<SensitivityReport, String>,
}

fn axis_name(axis: AxisArg) -> &'static str {
    match axis {
        AxisArg::Alpha => "alpha",
        AxisArg::R => "r",
        AxisArg::Lambda => "lambda",
        AxisArg::N => "N",
        AxisArg::K => "K",
    }
}

fn sweep_point(base: &CommonArgs, axis: AxisArg, value: f64, cfg: &RunConfig) -> SweepRow {
    let family = with_axis(base, axis, value).and_then(|a| family_from_args(&a));
    match family {
        Ok(f) => SweepRow { value, family: Some(f), result: evaluate(&f, cfg).map_err(|e| e.message) },
        Err(e) => SweepRow { value, family: None, result: Err(e.message) },
    }
}

/// Evaluates every grid point, in index order whether or not the points
/// run on the thread pool.
pub fn evaluate_sweep(
    base: &CommonArgs,
    axis: AxisArg,
    values: &[f64],
    cfg: &RunConfig,
    parallel: bool,
) -> Vec<SweepRow> {
    if parallel {
        values.par_iter().map(|&v| sweep_point(base, axis, v, cfg)).collect()
    } else {
        values.iter().map(|&v| sweep_point(base, axis, v, cfg)).collect()
    }
}

fn error_row(base: &CommonArgs, axis: AxisArg, row: &SweepRow, msg: &str) -> Vec<String> {
    let mut cols = match &row.family {
        Some(f) => {
            let mut c = vec![f.tag().to_string()];
            c.extend(param_columns(f));
            c
        }
        None => {
            let mut c = vec![String::new(); 7];
            c[0] = base.family.clone().unwrap_or_else(|| "coherent".into());
            let slot = match axis {
                AxisArg::Alpha => 1,
                AxisArg::R => 2,
                AxisArg::Lambda => 3,
                AxisArg::K => 4,
                AxisArg::N => 6,
            };
            c[slot] = fmt_num(row.value);
            c
        }
    };
    cols.resize(HEADER.len() - 1, String::new());
    cols.push(msg.to_string());
    cols
}

/// Renders a sweep table in the configured format.
pub fn render_sweep(base: &CommonArgs, axis: AxisArg, rows: &[SweepRow], format: Format) -> String {
    match format {
        Format::Csv => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|row| match &row.result {
                    Ok(r) => csv_row(r),
                    Err(msg) => error_row(base, axis, row, msg),
                })
                .collect();
            csv_string(&HEADER, &table)
        }
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|row| match &row.result {
                    Ok(r) => {
                        let mut v = report_json(r);
                        v["value"] = json_num(row.value);
                        v
                    }
                    Err(msg) => json!({ "value": json_num(row.value), "error": msg }),
                })
                .collect();
            json_string(&json!({ "axis": axis_name(axis), "rows": items }))
        }
    }
}

pub fn run_sweep(common: &CommonArgs, opts: &SweepOnly, cfg: &RunConfig) -> CliResult<Report> {
    let axis = opts.axis.ok_or_else(|| CliError::input("sweep needs --axis"))?;
    let values = grid(opts)?;
    let rows = evaluate_sweep(common, axis, &values, cfg, opts.parallel);
    let ok = rows.iter().filter(|r| r.result.is_ok()).count();
    let body = render_sweep(common, axis, &rows, cfg.output_format);
    let mut report =
        Report::new(body, format!("sweep over {}: {ok}/{} points succeeded\n", axis_name(axis), rows.len()));
    if ok == 0 {
        report.code = exit::SWEEP_FAILED;
    }
    Ok(report)
}
