//! `sample`: Monte Carlo readout shots.

use fockforce_core::fock::FockVector;
use fockforce_core::metrology::{apply_weak_force, ForceParams};
use fockforce_core::sampling::{
    estimate_theta, homodyne_distribution, parity_outcome, sample_moments, HomodyneGrid, Outcomes, Scheme, ShotRecord,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{CommonArgs, Format, SampleOnly, SchemeArg};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::family::family_from_args;
use crate::output::{csv_string, fmt_num, json_num, json_string};
use crate::Report;

pub const HEADER: [&str; 5] = ["scheme", "seed", "params", "shot", "outcome"];
pub const DEFAULT_SHOTS: usize = 1000;

fn shots_indexed<T: Send>(shots: usize, parallel: bool, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    if parallel {
        (0..shots as u64).into_par_iter().map(f).collect()
    } else {
        (0..shots as u64).map(f).collect()
    }
}

fn parity_record(theta: f64, shots: usize, seed: u64, parallel: bool) -> ShotRecord {
    ShotRecord {
        scheme: Scheme::ParityReadout,
        shots,
        seed,
        params: vec![("theta", theta)],
        outcomes: Outcomes::Parity(shots_indexed(shots, parallel, |i| parity_outcome(theta, seed, i))),
    }
}

fn homodyne_probe(common: &CommonArgs, cfg: &RunConfig) -> CliResult<(FockVector, Vec<(&'static str, f64)>)> {
    let family = family_from_args(common)?;
    if family.mode_count() != 1 {
        return Err(CliError::input(format!("homodyne sampling needs a single-mode family, not `{}`", family.tag())));
    }
    let eps = common.eps.unwrap_or(0.0);
    if !eps.is_finite() {
        return Err(CliError::input("--eps must be finite"));
    }
    let dim = match cfg.dim {
        Some(d) => d,
        None => family.default_dim()?,
    };
    let mut state = family.build(dim)?;
    if eps != 0.0 {
        state = apply_weak_force(&state, ForceParams::momentum(eps))?;
    }
    let mut params = family.params();
    params.push(("eps", eps));
    Ok((FockVector::new(state.into_amps())?, params))
}

fn homodyne_grid(opts: &SampleOnly, probe: &FockVector) -> CliResult<HomodyneGrid> {
    Ok(match (opts.y_min, opts.y_max, opts.step) {
        (None, None, None) => HomodyneGrid::covering(probe)?,
        (Some(a), Some(b), Some(h)) => HomodyneGrid::new(a, b, h)?,
        _ => return Err(CliError::input("give all of --y-min, --y-max, --step or none")),
    })
}

fn params_string(params: &[(&str, f64)]) -> String {
    params.iter().map(|(k, v)| format!("{k}={}", fmt_num(*v))).collect::<Vec<_>>().join(";")
}

pub fn run(common: &CommonArgs, opts: &SampleOnly, cfg: &RunConfig) -> CliResult<Report> {
    let shots = common.shots.unwrap_or(DEFAULT_SHOTS);
    if shots == 0 {
        return Err(CliError::input("--shots must be at least 1"));
    }
    let seed = cfg.seed;
    let (record, summary) = match opts.scheme.ok_or_else(|| CliError::input("sample needs --scheme"))? {
        SchemeArg::Parity => {
            let theta = opts.theta.ok_or_else(|| CliError::input("parity sampling needs --theta"))?;
            if !theta.is_finite() {
                return Err(CliError::input("--theta must be finite"));
            }
            let record = parity_record(theta, shots, seed, opts.parallel);
            let est = estimate_theta(&record)?;
            let summary = json!({
                "theta_hat": json_num(est.theta_hat),
                "std_error": json_num(est.std_error),
                "shots": est.shots,
                "boundary": est.boundary,
            });
            (record, summary)
        }
        SchemeArg::Homodyne => {
            let (probe, mut params) = homodyne_probe(common, cfg)?;
            let grid = homodyne_grid(opts, &probe)?;
            let dist = homodyne_distribution(&probe, grid)?;
            let values = shots_indexed(shots, opts.parallel, |i| dist.sample(seed, i));
            let (mean, variance) = sample_moments(&values);
            params.extend([("y_min", grid.y_min), ("y_max", grid.y_max), ("step", grid.step)]);
            let summary = json!({
                "mean": json_num(mean),
                "variance": json_num(variance),
                "shots": shots,
                "grid_mass": json_num(dist.mass),
            });
            let record =
                ShotRecord { scheme: Scheme::Homodyne, shots, seed, params, outcomes: Outcomes::Homodyne(values) };
            (record, summary)
        }
    };
    let note = summary_line(&summary);
    let body = match cfg.output_format {
        Format::Csv => {
            let tag = record.scheme.tag();
            let params = params_string(&record.params);
            let outcome = |i: usize| match &record.outcomes {
                Outcomes::Parity(v) => if v[i] { "+" } else { "-" }.to_string(),
                Outcomes::Homodyne(v) => fmt_num(v[i]),
            };
            let rows: Vec<Vec<String>> = (0..record.shots)
                .map(|i| vec![tag.to_string(), seed.to_string(), params.clone(), i.to_string(), outcome(i)])
                .collect();
            csv_string(&HEADER, &rows)
        }
        Format::Json => {
            let outcomes: Vec<Value> = match &record.outcomes {
                Outcomes::Parity(v) => v.iter().map(|&b| json!(if b { "+" } else { "-" })).collect(),
                Outcomes::Homodyne(v) => v.iter().map(|&y| json_num(y)).collect(),
            };
            let params: serde_json::Map<String, Value> =
                record.params.iter().map(|(k, v)| (k.to_string(), json_num(*v))).collect();
            json_string(&json!({
                "scheme": record.scheme.tag(),
                "shots": record.shots,
                "seed": seed,
                "params": params,
                "outcomes": outcomes,
                "summary": summary,
            }))
        }
    };
    Ok(Report::new(body, note))
}

fn summary_line(summary: &Value) -> String {
    let fields = summary
        .as_object()
        .map(|m| m.iter().map(|(k, v)| format!("{k} = {v}")).collect::<Vec<_>>().join(", "))
        .unwrap_or_default();
    format!("{fields}\n")
}
