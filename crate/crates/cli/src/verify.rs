//! `verify`: module invariants and acceptance checks as a JSON report.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

use fockforce_core::fock::{
    beam_splitter, beam_splitter_with_leakage, fidelity, required_dim, BeamSplitterConvention, FockVector,
    ModeOperator, MultiModeState,
};
use fockforce_core::metrology::{
    apply_weak_force, casimir_eigenvalue_check, cat_generator_variance, cat_sensitivity, circle_epsilon_min_analytic,
    collective_spin, correlated_pair_variance, generalized_cat_readout, min_detectable_force, quadrature_stats,
    quadrature_variance, ramsey_bounds, EstimationConvention, ForceParams, RamseyScheme,
};
use fockforce_core::numerics::{bessel_i, log_factorial, NumericsConfig};
use fockforce_core::sampling::{
    homodyne_distribution, replicate_parity, sample_homodyne, sample_moments, sample_parity_readout, HomodyneGrid,
    Outcomes,
};
use fockforce_core::states::{
    cat, coherent, generalized_cat, n_mode_cat, squeezed_vacuum, two_mode_squeezed, Parity, StateFamily,
};
use fockforce_core::{Complex64, Result as CoreResult};
use serde_json::{json, Value};

use crate::args::{AxisArg, CommonArgs, Format};
use crate::config::RunConfig;
use crate::error::{exit, CliResult};
use crate::family::family_from_args;
use crate::output::{json_num, json_string};
use crate::sensitivity::{evaluate_sweep, render_sweep};
use crate::Report;

/// One named check: passes when `|value − target| ≤ tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: String,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
    pub error: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.error.is_none() && (self.value - self.target).abs() <= self.tolerance
    }

    fn to_json(&self) -> Value {
        let mut v = json!({
            "id": self.id,
            "passed": self.passed(),
            "value": json_num(self.value),
            "target": json_num(self.target),
            "tolerance": json_num(self.tolerance),
        });
        if let Some(e) = &self.error {
            v["error"] = json!(e);
        }
        v
    }
}

struct Suite(Vec<Check>);

impl Suite {
    fn check(&mut self, id: &str, target: f64, tolerance: f64, value: CoreResult<f64>) {
        let (value, error) = match value {
            Ok(v) => (v, None),
            Err(e) => (f64::NAN, Some(crate::error::describe(&e))),
        };
        self.0.push(Check { id: id.to_string(), value, target, tolerance, error });
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn max_of(values: impl IntoIterator<Item = CoreResult<f64>>) -> CoreResult<f64> {
    values.into_iter().try_fold(0.0f64, |m, v| Ok(m.max(v?)))
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>()
}

fn eps_min(family: StateFamily, dim: Option<usize>) -> CoreResult<f64> {
    let d = match dim {
        Some(d) => d,
        None => family.default_dim()?,
    };
    Ok(min_detectable_force(&family, d)?.epsilon_min)
}

fn unitarity_defect(op: &ModeOperator) -> CoreResult<f64> {
    let m = op.matrix();
    let prod = m.adjoint().matmul(m)?;
    Ok(prod.sub(ModeOperator::identity(op.dim()).matrix())?.max_abs())
}

fn pair_identity_gap(s: &MultiModeState) -> CoreResult<f64> {
    let formula = correlated_pair_variance(s)?;
    let direct = quadrature_stats(&apply_weak_force(s, ForceParams::momentum(0.1))?)?.variance;
    Ok((formula - direct).abs())
}

/// First `d` levels of the squeezed vacuum, renormalized.
fn truncated_squeezed(r: f64, d: usize) -> CoreResult<FockVector> {
    let full = StateFamily::SqueezedVacuum { r }.default_dim()?.max(d);
    FockVector::new(squeezed_vacuum(r, full)?.amps()[..d].to_vec())
}

fn numerics_checks(s: &mut Suite) {
    s.check("numerics.log_factorial", 2_432_902_008_176_640_000f64.ln(), 1e-12, Ok(log_factorial(20)));
    s.check("numerics.bessel_i0", 2.279_585_302_336_067_3, 1e-12, bessel_i(0, 2.0, &NumericsConfig::default()));
    s.check(
        "numerics.expm_unitarity",
        0.0,
        1e-12,
        ModeOperator::displacement(Complex64::new(1.0, 0.5), 30).and_then(|d| unitarity_defect(&d)),
    );
}

fn fock_checks(s: &mut Suite) {
    let d = 20;
    s.check(
        "fock.commutator",
        0.0,
        1e-12,
        (|| {
            let a = ModeOperator::annihilation(d);
            let ad = ModeOperator::creation(d);
            let c = a.matmul(&ad)?.sub(&ad.matmul(&a)?)?;
            let m = c.matrix();
            let mut worst: f64 = 0.0;
            for i in 0..d - 1 {
                for (j, z) in m.row(i)[..d - 1].iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((z - want).norm());
                }
            }
            Ok(worst)
        })(),
    );
    s.check(
        "fock.displacement_coherent",
        1.0,
        1e-10,
        (|| {
            let beta = Complex64::new(1.2, 0.4);
            let disp = ModeOperator::displacement(beta, 40)?.apply_normalized(&FockVector::vacuum(40)?)?;
            Ok(disp.inner(&coherent(beta, 40)?)?.norm_sqr())
        })(),
    );
    let families = [
        StateFamily::Coherent { alpha: Complex64::new(1.0, -0.5) },
        StateFamily::SqueezedVacuum { r: 1.0 },
        StateFamily::TwoModeSqueezed { lambda: 0.5 },
        StateFamily::Circle { alpha: 0.85 },
        StateFamily::EvenCat { alpha: real(2.0) },
        StateFamily::OddCat { alpha: real(2.0) },
        StateFamily::NModeCat { alpha: 1.5, n_modes: 3 },
        StateFamily::GeneralizedCat { k: 4, nu: 1, alpha: 2.0 },
    ];
    s.check(
        "states.normalization",
        0.0,
        1e-10,
        max_of(families.iter().map(|f| Ok((f.build(f.default_dim()?)?.norm() - 1.0).abs()))),
    );
}

fn quadrature_checks(s: &mut Suite) {
    s.check("criterion1.sql", 0.5, 1e-6, eps_min(StateFamily::Coherent { alpha: real(0.0) }, Some(32)));
    for (r, tag) in [(0.5, "0.5"), (1.0, "1")] {
        let f = StateFamily::SqueezedVacuum { r };
        s.check(&format!("criterion2.squeezed_eps_min.r{tag}"), 0.5 * (-r).exp(), 1e-4, eps_min(f, Some(64)));
        s.check(&format!("criterion2.squeezed_variance.r{tag}"), (-2.0 * r).exp(), 1e-5, quadrature_variance(&f, 64));
    }
    let tmsv = StateFamily::TwoModeSqueezed { lambda: 1f64.tanh() };
    let tm = eps_min(tmsv, None);
    s.check("criterion3.tmsv_eps_min", 1.0 / (2.0 * 2f64.sqrt() * 1f64.exp()), 2e-4, tm.clone());
    s.check(
        "criterion3.tmsv_ratio",
        FRAC_1_SQRT_2,
        1e-4,
        tm.and_then(|t| Ok(t / eps_min(StateFamily::SqueezedVacuum { r: 1.0 }, Some(64))?)),
    );

    let circle = eps_min(StateFamily::Circle { alpha: 0.85 }, None);
    s.check("criterion4.circle_eps_min", 0.221108, 2e-4, circle.clone());
    s.check(
        "criterion4.circle_analytic",
        0.0,
        1e-8,
        circle.and_then(|c| Ok((c - circle_epsilon_min_analytic(0.85)?).abs())),
    );
    s.check("criterion4.circle_asymptote", 0.25, 0.006, eps_min(StateFamily::Circle { alpha: 6.0 }, None));

    let c = StateFamily::Circle { alpha: 0.85 };
    s.check(
        "criterion5.pair_identity_circle",
        0.0,
        1e-8,
        c.default_dim().and_then(|d| pair_identity_gap(&c.build(d)?)),
    );
    let tmsv_state = tmsv.default_dim().and_then(|d| tmsv.build(d));
    s.check("criterion5.pair_identity_tmsv", 0.0, 1e-8, tmsv_state.clone().and_then(|st| pair_identity_gap(&st)));
    s.check(
        "criterion5.pair_value_tmsv",
        2.0 * (-2.0f64).exp(),
        1e-5,
        tmsv_state.and_then(|st| correlated_pair_variance(&st)),
    );
}

/// Circle sweep over `linspace(0.1, 3, 30)`, sequential and parallel.
fn circle_sweep_checks(s: &mut Suite) {
    let base = CommonArgs { family: Some("circle".into()), ..Default::default() };
    let cfg = RunConfig::with_out_dir(&CommonArgs::default(), None).expect("default config is valid");
    let values: Vec<f64> = (0..30).map(|i| 0.1 + 2.9 * i as f64 / 29.0).collect();
    let seq = evaluate_sweep(&base, AxisArg::Alpha, &values, &cfg, false);
    let par = evaluate_sweep(&base, AxisArg::Alpha, &values, &cfg, true);
    let argmin = seq
        .iter()
        .filter_map(|r| r.result.as_ref().ok().map(|rep| (r.value, rep.epsilon_min)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|p| p.0)
        .unwrap_or(f64::NAN);
    // 0.85 falls midway between two grid points; either is nearest.
    s.check("criterion4.sweep_argmin", 0.85, 0.05 + 1e-12, Ok(argmin));
    let same = [Format::Csv, Format::Json]
        .iter()
        .all(|&f| render_sweep(&base, AxisArg::Alpha, &seq, f) == render_sweep(&base, AxisArg::Alpha, &par, f));
    s.check("criterion11.sweep_parallel_identical", 1.0, 0.0, Ok(if same { 1.0 } else { 0.0 }));
}

fn beam_splitter_checks(s: &mut Suite) {
    let bs = |st: &MultiModeState| beam_splitter(st, 0, 1, FRAC_PI_4, BeamSplitterConvention::Real);
    s.check(
        "criterion6.coherent_pair",
        1.0,
        1e-8,
        (|| {
            let a = 1.5;
            let d = required_dim(2f64.sqrt() * a);
            let input = MultiModeState::product(&[coherent(real(a), d)?, coherent(real(a), d)?])?;
            let target = MultiModeState::product(&[coherent(real(2f64.sqrt() * a), d)?, FockVector::vacuum(d)?])?;
            fidelity(&bs(&input)?, &target)
        })(),
    );
    s.check(
        "criterion6.two_mode_cat",
        1.0,
        1e-8,
        (|| {
            let a = 2.0;
            let d = required_dim(2f64.sqrt() * a);
            let target =
                MultiModeState::product(&[cat(real(2f64.sqrt() * a), Parity::Even, d)?, FockVector::vacuum(d)?])?;
            fidelity(&bs(&n_mode_cat(a, 2, d)?)?, &target)
        })(),
    );
    s.check(
        "criterion6.tmsv_split",
        1.0,
        1e-6,
        (|| {
            let d = 40;
            let out = beam_splitter_with_leakage(
                &two_mode_squeezed(1f64.tanh(), d)?,
                0,
                1,
                FRAC_PI_4,
                BeamSplitterConvention::Real,
            )?;
            let target = MultiModeState::product(&[truncated_squeezed(1.0, d)?, truncated_squeezed(-1.0, d)?])?;
            fidelity(&out.state, &target)
        })(),
    );
}

fn cat_checks(s: &mut Suite) {
    for n in 1..=3usize {
        let nn = (n * n) as f64;
        s.check(
            &format!("criterion7.variance.alpha2.N{n}"),
            1.0,
            0.01,
            cat_generator_variance(2.0, n, required_dim(2.0)).map(|v| v / nn),
        );
        s.check(
            &format!("criterion7.variance.alpha3.N{n}"),
            1.0,
            1e-6,
            cat_generator_variance(3.0, n, required_dim(3.0)).map(|v| v / nn),
        );
    }
    let points: CoreResult<Vec<(f64, f64)>> = (1..=4usize)
        .map(|n| {
            let f = StateFamily::NModeCat { alpha: 2.0, n_modes: n };
            let r = cat_sensitivity(&f, EstimationConvention::UncertaintyRelation, required_dim(2.0))?;
            Ok(((n as f64).ln(), r.epsilon_min.ln()))
        })
        .collect();
    s.check("criterion7.bound_slope", -1.0, 0.02, points.map(|p| slope(&p)));

    let residual = |k: usize, nu: usize| -> CoreResult<f64> {
        let alpha = 2.0;
        let v = generalized_cat(k, nu, alpha, required_dim(alpha))?;
        let eig = Complex64::from_polar(1.0, -2.0 * PI * nu as f64 / k as f64);
        let r2: f64 = v
            .amps()
            .iter()
            .enumerate()
            .map(|(n, z)| (z * (Complex64::from_polar(1.0, 2.0 * PI * n as f64 / k as f64) - eig)).norm_sqr())
            .sum();
        Ok(r2.sqrt())
    };
    s.check(
        "criterion8.gencat_eigenvector",
        0.0,
        1e-9,
        max_of([(2, 0), (2, 1), (4, 0), (4, 1), (4, 3)].map(|(k, nu)| residual(k, nu))),
    );
    let alpha = 3.0;
    let beta = Complex64::from_polar(0.01, 0.7);
    let readout = generalized_cat_readout(alpha, beta, required_dim(alpha + beta.norm()));
    s.check("criterion8.readout_theta", alpha * beta.im, 5e-3, readout.clone().map(|r| r.theta));
    s.check("criterion8.readout_phi", alpha * beta.re, 5e-3, readout.map(|r| r.phi));
}

fn spin_checks(s: &mut Suite) {
    let mut identity = Vec::new();
    let mut brute = Vec::new();
    for n in 1..=8usize {
        for (scheme, want) in [
            (RamseyScheme::Product, 1.0 / (n as f64).sqrt()),
            (RamseyScheme::Ghz, 1.0 / n as f64),
            (RamseyScheme::Pairwise, 1.0 / (2.0 * n as f64).sqrt()),
        ] {
            if scheme == RamseyScheme::Pairwise && n % 2 == 1 {
                continue;
            }
            let b = ramsey_bounds(n, scheme);
            identity.push(b.clone().map(|b| (b.delta_theta - want).abs()));
            brute.push(b.map(|b| (b.brute_force_variance.unwrap_or(f64::NAN) - b.variance).abs()));
        }
    }
    s.check("criterion9.ramsey_delta_theta", 0.0, 1e-12, max_of(identity));
    s.check("criterion9.ramsey_brute_force", 0.0, 1e-12, max_of(brute));
    s.check(
        "criterion9.casimir",
        0.0,
        1e-10,
        max_of((1..=6).map(|n| {
            let c = casimir_eigenvalue_check(&collective_spin(n)?)?;
            Ok(c.max_residual.max((c.eigenvalue - c.expected).abs()))
        })),
    );
}

fn sampling_checks(s: &mut Suite, seed: u64) {
    let shots = 10_000;
    s.check(
        "criterion10.parity_std",
        1.0,
        0.2,
        (|| {
            let runs = replicate_parity(0.3, shots, 200, seed)?;
            let thetas: Vec<f64> = runs.iter().map(|r| r.theta_hat).collect();
            let (_, var) = sample_moments(&thetas);
            Ok(var.sqrt() * 2.0 * (shots as f64).sqrt())
        })(),
    );
    let vacuum = FockVector::vacuum(required_dim(0.0));
    let homodyne = |seed: u64| -> CoreResult<Vec<f64>> {
        let v = vacuum.clone()?;
        match sample_homodyne(&v, 100_000, seed, HomodyneGrid::covering(&v)?)?.outcomes {
            Outcomes::Homodyne(y) => Ok(y),
            Outcomes::Parity(_) => unreachable!("homodyne sampler returns real outcomes"),
        }
    };
    let first = homodyne(seed);
    s.check("criterion10.homodyne_vacuum_variance", 1.0, 0.03, first.clone().map(|y| sample_moments(&y).1));
    s.check(
        "criterion10.reproducible",
        1.0,
        0.0,
        (|| {
            let y0 = first.clone()?;
            let y1 = homodyne(seed)?;
            let same_y = y0.iter().zip(&y1).all(|(a, b)| a.to_bits() == b.to_bits());
            let p0 = sample_parity_readout(0.3, shots, seed)?;
            let p1 = sample_parity_readout(0.3, shots, seed)?;
            Ok(if same_y && p0 == p1 { 1.0 } else { 0.0 })
        })(),
    );
    s.check(
        "sampling.grid_mass",
        1.0,
        1e-9,
        (|| {
            let v = vacuum.clone()?;
            Ok(homodyne_distribution(&v, HomodyneGrid::covering(&v)?)?.mass)
        })(),
    );
}

/// Runs every check. `precondition` adds a truncation check for the
/// requested family when `--dim` is set.
pub fn checks(seed: u64, precondition: Option<(StateFamily, usize)>) -> Vec<Check> {
    let mut s = Suite(Vec::new());
    if let Some((family, dim)) = precondition {
        s.check("precondition.truncation", dim as f64, 0.0, family.build(dim).map(|_| dim as f64));
    }
    numerics_checks(&mut s);
    fock_checks(&mut s);
    quadrature_checks(&mut s);
    circle_sweep_checks(&mut s);
    beam_splitter_checks(&mut s);
    cat_checks(&mut s);
    spin_checks(&mut s);
    sampling_checks(&mut s, seed);
    s.0
}

pub fn run(common: &CommonArgs, cfg: &RunConfig) -> CliResult<Report> {
    let precondition = match cfg.dim {
        Some(d) => Some((family_from_args(common)?, d)),
        None => None,
    };
    let results = checks(cfg.seed, precondition);
    let failed: Vec<&str> = results.iter().filter(|c| !c.passed()).map(|c| c.id.as_str()).collect();
    let doc = json!({
        "seed": cfg.seed,
        "checks": results.iter().map(Check::to_json).collect::<Vec<_>>(),
        "passed": failed.is_empty(),
        "failed": failed,
    });
    let note = if failed.is_empty() {
        format!("verify: all {} checks passed\n", results.len())
    } else {
        format!("verify: {} of {} checks failed: {}\n", failed.len(), results.len(), failed.join(", "))
    };
    let mut report = Report::new(json_string(&doc), note);
    if !failed.is_empty() {
        report.code = exit::VERIFY_FAILED;
    }
    Ok(report)
}
