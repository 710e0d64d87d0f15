//! `state`: build a probe and report on it, or reload a saved document.

use std::path::Path;

use fockforce_core::fock::FockVector;
use fockforce_core::fock::{tensor_len, MultiModeState};
use fockforce_core::states::{support_residue, StateFamily};
use fockforce_core::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::args::{CommonArgs, Format};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::family::{family_from_args, params_json};
use crate::output::{csv_string, fmt_num, json_num, json_string};
use crate::Report;

/// Top levels of each mode counted as tail.
pub const TAIL_LEVELS: usize = 3;
const MAX_LEADING: usize = 10;

/// Serialized state, as written by `state --format json`.
#[derive(Debug, Deserialize)]
pub struct StateDocument {
    pub family: String,
    #[serde(default)]
    pub params: serde_json::Map<String, Value>,
    pub dims: Vec<usize>,
    pub amps: Vec<[f64; 2]>,
}

impl StateDocument {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::io(&format!("reading {}", path.display()), e))?;
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("state document {}: {e}", path.display())))
    }

    pub fn state(&self) -> CliResult<MultiModeState> {
        let amps = self.amps.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        Ok(MultiModeState::new(self.dims.clone(), amps)?)
    }

    /// The family recorded in the document, read back through the same
    /// parameter parser as the command line.
    pub fn family(&self) -> CliResult<StateFamily> {
        let num = |k: &str| self.params.get(k).and_then(Value::as_f64);
        let int = |k: &str| num(k).map(|x| x as usize);
        let mut a = CommonArgs {
            family: Some(self.family.clone()),
            alpha: num("alpha"),
            alpha_im: num("alpha_im"),
            n: int("N"),
            k: int("K"),
            nu: int("nu"),
            ..Default::default()
        };
        match self.family.as_str() {
            "squeezed" => a.r = num("r"),
            "tmsv" => a.lambda = num("lambda"),
            _ => {}
        }
        family_from_args(&a)
    }
}

pub fn run(common: &CommonArgs, from: Option<&Path>, cfg: &RunConfig) -> CliResult<Report> {
    let (family, state) = match from {
        Some(path) => {
            let doc = StateDocument::load(path)?;
            tensor_len(&doc.dims, cfg.memory_cap)?;
            (doc.family()?, doc.state()?)
        }
        None => {
            let family = family_from_args(common)?;
            let dim = match cfg.dim {
                Some(d) => d,
                None => family.default_dim()?,
            };
            tensor_len(&vec![dim; family.mode_count()], cfg.memory_cap)?;
            (family, family.build_with_cap(dim, cfg.memory_cap)?)
        }
    };
    Ok(render(&family, &state, cfg))
}

struct Leading {
    index: Vec<usize>,
    amp: Complex64,
}

fn leading(state: &MultiModeState, tol: f64) -> Vec<Leading> {
    let strides = state.strides();
    let mut found: Vec<(usize, Complex64)> =
        state.amps().iter().copied().enumerate().filter(|(_, z)| z.norm() > tol).collect();
    found.sort_by(|a, b| b.1.norm().total_cmp(&a.1.norm()).then(a.0.cmp(&b.0)));
    found
        .into_iter()
        .take(MAX_LEADING)
        .map(|(flat, amp)| Leading {
            index: strides.iter().zip(state.dims()).map(|(&s, &d)| (flat / s) % d).collect(),
            amp,
        })
        .collect()
}

fn residue(family: &StateFamily, state: &MultiModeState, tol: f64) -> Option<(usize, usize)> {
    let StateFamily::GeneralizedCat { k, .. } = *family else {
        return None;
    };
    if state.n_modes() != 1 {
        return None;
    }
    let single = FockVector::new(state.amps().to_vec()).ok()?;
    support_residue(&single, k, tol).map(|r| (r, k))
}

fn render(family: &StateFamily, state: &MultiModeState, cfg: &RunConfig) -> Report {
    let norm = state.norm();
    let means = state.mean_photon_numbers();
    let total: f64 = means.iter().sum();
    let tail = state.tail_mass(TAIL_LEVELS);
    let lead = leading(state, cfg.tol);
    let residue = residue(family, state, cfg.tol).map(|(r, k)| format!("n ≡ {r} (mod {k})"));

    let per_mode = means.iter().map(|m| format!("{m:.6}")).collect::<Vec<_>>().join(", ");
    let mut note = format!("{}: norm = {norm:.6}, n̄ = {per_mode} per mode, tail mass = {tail:.3e}", family.tag());
    if let Some(r) = &residue {
        note.push_str(&format!(", support {r}"));
    }
    note.push('\n');

    let body = match cfg.output_format {
        Format::Json => {
            let doc = json!({
                "family": family.tag(),
                "params": params_json(family),
                "dims": state.dims(),
                "amps": state.amps().iter().map(|z| json!([json_num(z.re), json_num(z.im)])).collect::<Vec<_>>(),
                "report": {
                    "norm": json_num(norm),
                    "mean_photon_numbers": means.iter().map(|&m| json_num(m)).collect::<Vec<_>>(),
                    "mean_photon_total": json_num(total),
                    "tail_mass": json_num(tail),
                    "leading_amplitudes": lead.iter().map(|l| json!({
                        "index": l.index,
                        "re": json_num(l.amp.re),
                        "im": json_num(l.amp.im),
                        "probability": json_num(l.amp.norm_sqr()),
                    })).collect::<Vec<_>>(),
                    "support_residue": residue,
                },
            });
            json_string(&doc)
        }
        Format::Csv => {
            let mut rows = vec![
                vec!["family".into(), family.tag().into()],
                vec!["dims".into(), state.dims().iter().map(usize::to_string).collect::<Vec<_>>().join("x")],
                vec!["norm".into(), fmt_num(norm)],
            ];
            for (i, m) in means.iter().enumerate() {
                rows.push(vec![format!("mean_photon_number[{i}]"), fmt_num(*m)]);
            }
            rows.push(vec!["mean_photon_total".into(), fmt_num(total)]);
            rows.push(vec!["tail_mass".into(), fmt_num(tail)]);
            rows.push(vec!["support_residue".into(), residue.clone().unwrap_or_default()]);
            for l in &lead {
                let idx = l.index.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
                rows.push(vec![format!("amp_re[{idx}]"), fmt_num(l.amp.re)]);
                rows.push(vec![format!("amp_im[{idx}]"), fmt_num(l.amp.im)]);
            }
            csv_string(&["quantity", "value"], &rows)
        }
    };
    Report::new(body, note)
}
