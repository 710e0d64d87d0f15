//! Mapping between command-line parameters and [`StateFamily`].

use fockforce_core::states::{squeezing_lambda, StateFamily};
use fockforce_core::Complex64;

use crate::args::{AxisArg, CommonArgs};
use crate::error::{CliError, CliResult};

/// Parses `--family` and its parameters.
pub fn family_from_args(a: &CommonArgs) -> CliResult<StateFamily> {
    let name = a.family.as_deref().unwrap_or("coherent");
    let alpha = a.alpha.unwrap_or(0.0);
    let alpha_c = Complex64::new(alpha, a.alpha_im.unwrap_or(0.0));
    let real_alpha = || -> CliResult<f64> {
        if a.alpha_im.unwrap_or(0.0) != 0.0 {
            return Err(CliError::input(format!("family `{name}` takes a real --alpha")));
        }
        a.alpha.ok_or_else(|| CliError::input(format!("family `{name}` needs --alpha")))
    };
    let family = match name {
        "coherent" => StateFamily::Coherent { alpha: alpha_c },
        "squeezed" | "squeezed_vacuum" => {
            let lambda = squeezing_lambda(a.r, a.lambda)?;
            StateFamily::SqueezedVacuum { r: a.r.unwrap_or_else(|| lambda.atanh()) }
        }
        "tmsv" | "two_mode_squeezed" => StateFamily::TwoModeSqueezed { lambda: squeezing_lambda(a.r, a.lambda)? },
        "circle" | "pair_coherent" => StateFamily::Circle { alpha: real_alpha()? },
        "even_cat" => StateFamily::EvenCat { alpha: alpha_c },
        "odd_cat" => StateFamily::OddCat { alpha: alpha_c },
        "cat" | "n_mode_cat" => StateFamily::NModeCat { alpha: real_alpha()?, n_modes: a.n.unwrap_or(1) },
        "gencat" | "generalized_cat" => StateFamily::GeneralizedCat {
            k: a.k.ok_or_else(|| CliError::input("family `gencat` needs --K"))?,
            nu: a.nu.unwrap_or(0),
            alpha: real_alpha()?,
        },
        other => {
            return Err(CliError::input(format!(
                "unknown family `{other}`; expected coherent, squeezed, tmsv, circle, even_cat, odd_cat, cat or gencat"
            )))
        }
    };
    family.validate()?;
    Ok(family)
}

/// The base parameters with `axis` replaced by `value`.
pub fn with_axis(base: &CommonArgs, axis: AxisArg, value: f64) -> CliResult<CommonArgs> {
    let mut a = base.clone();
    let integer = || -> CliResult<usize> {
        if value < 0.0 || value.fract() != 0.0 {
            return Err(CliError::input(format!("axis value {value} must be a non-negative integer")));
        }
        Ok(value as usize)
    };
    match axis {
        AxisArg::Alpha => a.alpha = Some(value),
        AxisArg::R => {
            a.r = Some(value);
            a.lambda = None;
        }
        AxisArg::Lambda => {
            a.lambda = Some(value);
            a.r = None;
        }
        AxisArg::N => a.n = Some(integer()?),
        AxisArg::K => a.k = Some(integer()?),
    }
    Ok(a)
}

/// Column values `alpha, r, lambda, K, nu, N` for a family (empty where
/// the family has no such parameter).
pub fn param_columns(f: &StateFamily) -> [String; 6] {
    use crate::output::fmt_num;
    let e = String::new;
    match *f {
        StateFamily::Coherent { alpha } | StateFamily::EvenCat { alpha } | StateFamily::OddCat { alpha } => {
            [fmt_num(alpha.re), e(), e(), e(), e(), "1".into()]
        }
        StateFamily::SqueezedVacuum { r } => [e(), fmt_num(r), fmt_num(r.tanh()), e(), e(), "1".into()],
        StateFamily::TwoModeSqueezed { lambda } => {
            [e(), fmt_num(lambda.atanh()), fmt_num(lambda), e(), e(), "2".into()]
        }
        StateFamily::Circle { alpha } => [fmt_num(alpha), e(), e(), e(), e(), "2".into()],
        StateFamily::NModeCat { alpha, n_modes } => [fmt_num(alpha), e(), e(), e(), e(), n_modes.to_string()],
        StateFamily::GeneralizedCat { k, nu, alpha } => {
            [fmt_num(alpha), e(), e(), k.to_string(), nu.to_string(), "1".into()]
        }
    }
}

/// `{name: value}` object of the family parameters, rounded for output.
pub fn params_json(f: &StateFamily) -> serde_json::Value {
    let map = f
        .params()
        .into_iter()
        .map(|(k, v)| (k.to_string(), crate::output::json_num(v)))
        .collect::<serde_json::Map<_, _>>();
    serde_json::Value::Object(map)
}
