//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion.
//!
//! Runs with `cargo test --test acceptance`; exits nonzero if any criterion
//! fails.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};
use std::process::Command;

use fockforce_core::fock::{
    beam_splitter, beam_splitter_with_leakage, fidelity, required_dim, BeamSplitterConvention, FockVector,
    MultiModeState,
};
use fockforce_core::metrology::{
    apply_weak_force, casimir_eigenvalue_check, cat_generator_variance, cat_sensitivity, circle_epsilon_min_analytic,
    collective_spin, correlated_pair_variance, generalized_cat_readout, min_detectable_force, quadrature_stats,
    quadrature_variance, ramsey_bounds, EstimationConvention, ForceParams, RamseyScheme,
};
use fockforce_core::sampling::{replicate_parity, sample_homodyne, sample_moments, HomodyneGrid, Outcomes};
use fockforce_core::states::{cat, coherent, generalized_cat, n_mode_cat, two_mode_squeezed, Parity, StateFamily};
use fockforce_core::{Complex64, Result};

type Line = (String, bool);
type Criterion = (&'static str, fn() -> Vec<Line>);

fn within(label: impl Into<String>, value: f64, target: f64, tol: f64) -> Line {
    let ok = (value - target).abs() <= tol;
    (format!("{}: {value:.9e} vs {target:.9e} (tol {tol:e})", label.into()), ok)
}

fn attempt(label: &str, f: impl FnOnce() -> Result<Vec<Line>>) -> Vec<Line> {
    f().unwrap_or_else(|e| vec![(format!("{label}: error: {e}"), false)])
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn eps(family: StateFamily, dim: usize) -> Result<f64> {
    Ok(min_detectable_force(&family, dim)?.epsilon_min)
}

fn default_eps(family: StateFamily) -> Result<f64> {
    eps(family, family.default_dim()?)
}

fn log_slope(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0.ln()).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1.ln()).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0.ln() - mx) * (p.1.ln() - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0.ln() - mx).powi(2)).sum();
    sxy / sxx
}

/// Squeezed vacuum truncated at `d` from `c_{2m+2}/c_{2m}`.
fn squeezed_recurrence(r: f64, d: usize) -> Result<FockVector> {
    let l = r.tanh();
    let mut amps = vec![real(0.0); d];
    let mut c = (1.0 - l * l).powf(0.25);
    for m in 0..d.div_ceil(2) {
        amps[2 * m] = real(c);
        c *= 0.5 * l * (((2 * m + 1) * (2 * m + 2)) as f64).sqrt() / (m + 1) as f64;
    }
    FockVector::new(amps)
}

fn sql() -> Vec<Line> {
    attempt("sql", || {
        Ok(vec![within("eps_min coherent, dim 32", eps(StateFamily::Coherent { alpha: real(0.0) }, 32)?, 0.5, 1e-6)])
    })
}

fn squeezed() -> Vec<Line> {
    attempt("squeezed", || {
        let mut out = Vec::new();
        for r in [0.5, 1.0] {
            let f = StateFamily::SqueezedVacuum { r };
            out.push(within(format!("eps_min r={r}"), eps(f, 64)?, 0.5 * (-r).exp(), 1e-4));
            out.push(within(format!("Var Y r={r}"), quadrature_variance(&f, 64)?, (-2.0 * r).exp(), 1e-5));
        }
        Ok(out)
    })
}

fn two_mode() -> Vec<Line> {
    attempt("tmsv", || {
        let tm = default_eps(StateFamily::TwoModeSqueezed { lambda: 1f64.tanh() })?;
        let sq = eps(StateFamily::SqueezedVacuum { r: 1.0 }, 64)?;
        Ok(vec![
            within("eps_min tmsv r=1", tm, 1.0 / (2.0 * 2f64.sqrt() * 1f64.exp()), 2e-4),
            within("ratio tmsv/squeezed", tm / sq, FRAC_1_SQRT_2, 1e-4),
        ])
    })
}

fn circle() -> Vec<Line> {
    attempt("circle", || {
        let e = default_eps(StateFamily::Circle { alpha: 0.85 })?;
        let analytic = circle_epsilon_min_analytic(0.85)?;
        let grid: Vec<f64> = (0..30).map(|i| 0.1 + 2.9 * i as f64 / 29.0).collect();
        let sweep = grid
            .iter()
            .map(|&alpha| default_eps(StateFamily::Circle { alpha }).map(|e| (alpha, e)))
            .collect::<Result<Vec<_>>>()?;
        let best = sweep.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap().0;
        let nearest = grid.iter().map(|g| (g - 0.85).abs()).fold(f64::INFINITY, f64::min);
        let asym = default_eps(StateFamily::Circle { alpha: 6.0 })?;
        Ok(vec![
            within("eps_min alpha=0.85", e, 0.221108, 2e-4),
            within("numeric vs analytic alpha=0.85", e, analytic, 1e-8),
            within("sweep argmin distance to 0.85", (best - 0.85).abs(), nearest, 1e-9),
            within("eps_min alpha=6", asym, 0.25, 0.006),
        ])
    })
}

fn pair_identity() -> Vec<Line> {
    attempt("pair variance", || {
        let mut out = Vec::new();
        for f in [StateFamily::Circle { alpha: 0.85 }, StateFamily::TwoModeSqueezed { lambda: 1f64.tanh() }] {
            let s = f.build(f.default_dim()?)?;
            let formula = correlated_pair_variance(&s)?;
            let direct = quadrature_stats(&apply_weak_force(&s, ForceParams::momentum(0.05))?)?.variance;
            out.push(within(format!("{} formula vs direct", f.tag()), formula, direct, 1e-8));
            if let StateFamily::TwoModeSqueezed { .. } = f {
                out.push(within("tmsv value", formula, 2.0 * (-2.0f64).exp(), 1e-5));
            }
        }
        Ok(out)
    })
}

fn beam_splitter_structure() -> Vec<Line> {
    attempt("beam splitter", || {
        let bs = |s: &MultiModeState| beam_splitter(s, 0, 1, FRAC_PI_4, BeamSplitterConvention::Real);
        let a = 1.2;
        let d = required_dim(2f64.sqrt() * a);
        let pair = MultiModeState::product(&[coherent(real(a), d)?, coherent(real(a), d)?])?;
        let pair_target = MultiModeState::product(&[coherent(real(2f64.sqrt() * a), d)?, FockVector::vacuum(d)?])?;

        let c = 2.0;
        let dc = required_dim(2f64.sqrt() * c);
        let cat_target =
            MultiModeState::product(&[cat(real(2f64.sqrt() * c), Parity::Even, dc)?, FockVector::vacuum(dc)?])?;

        let out = beam_splitter_with_leakage(
            &two_mode_squeezed(1f64.tanh(), 40)?,
            0,
            1,
            FRAC_PI_4,
            BeamSplitterConvention::Real,
        )?;
        let sq_target = MultiModeState::product(&[squeezed_recurrence(1.0, 40)?, squeezed_recurrence(-1.0, 40)?])?;
        Ok(vec![
            within("coherent pair fidelity", fidelity(&bs(&pair)?, &pair_target)?, 1.0, 1e-8),
            within("two-mode cat fidelity", fidelity(&bs(&n_mode_cat(c, 2, dc)?)?, &cat_target)?, 1.0, 1e-8),
            within("tmsv split fidelity, dim 40", fidelity(&out.state, &sq_target)?, 1.0, 1e-6),
        ])
    })
}

fn cat_variance() -> Vec<Line> {
    attempt("cat", || {
        let mut out = Vec::new();
        for n in 1..=3usize {
            let nn = (n * n) as f64;
            out.push(within(
                format!("Var/N^2 alpha=2 N={n}"),
                cat_generator_variance(2.0, n, required_dim(2.0))? / nn,
                1.0,
                0.01,
            ));
            out.push(within(
                format!("Var/N^2 alpha=3 N={n}"),
                cat_generator_variance(3.0, n, required_dim(3.0))? / nn,
                1.0,
                1e-6,
            ));
        }
        let pts = (1..=4usize)
            .map(|n| {
                let f = StateFamily::NModeCat { alpha: 2.0, n_modes: n };
                Ok((
                    n as f64,
                    cat_sensitivity(&f, EstimationConvention::UncertaintyRelation, required_dim(2.0))?.epsilon_min,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(within("bound log-log slope", log_slope(&pts), -1.0, 0.02));
        Ok(out)
    })
}

fn generalized() -> Vec<Line> {
    attempt("gencat", || {
        let mut out = Vec::new();
        for (k, nu) in [(2, 0), (2, 1), (4, 0), (4, 1), (4, 3)] {
            let v = generalized_cat(k, nu, 2.0, required_dim(2.0))?;
            let lambda = Complex64::from_polar(1.0, -2.0 * PI * nu as f64 / k as f64);
            let res: f64 = v
                .amps()
                .iter()
                .enumerate()
                .map(|(n, z)| (z * Complex64::from_polar(1.0, 2.0 * PI * n as f64 / k as f64) - z * lambda).norm_sqr())
                .sum::<f64>()
                .sqrt();
            out.push(within(format!("eigen residual K={k} nu={nu}"), res, 0.0, 1e-9));
        }
        let alpha = 3.0;
        for phase in [0.0, 0.4, 2.0, -2.5] {
            let beta = Complex64::from_polar(0.01, phase);
            let est = generalized_cat_readout(alpha, beta, required_dim(alpha + 0.01))?;
            out.push(within(format!("theta, arg beta={phase}"), est.theta, alpha * beta.im, 5e-3));
            out.push(within(format!("phi, arg beta={phase}"), est.phi, alpha * beta.re, 5e-3));
        }
        Ok(out)
    })
}

fn ramsey() -> Vec<Line> {
    attempt("ramsey", || {
        let mut out = Vec::new();
        let (mut id_err, mut bf_err) = (0.0f64, 0.0f64);
        for n in 1..=8usize {
            let nf = n as f64;
            let mut schemes = vec![(RamseyScheme::Product, 1.0 / nf.sqrt()), (RamseyScheme::Ghz, 1.0 / nf)];
            if n % 2 == 0 {
                schemes.push((RamseyScheme::Pairwise, 1.0 / (2.0 * nf).sqrt()));
            }
            for (scheme, want) in schemes {
                let b = ramsey_bounds(n, scheme)?;
                id_err = id_err.max((b.delta_theta - want).abs());
                bf_err = bf_err.max((b.brute_force_variance.unwrap_or(f64::NAN) - b.variance).abs());
            }
        }
        out.push(within("max |delta_theta - closed form|, N<=8", id_err, 0.0, 1e-12));
        out.push(within("max |brute force - variance|, N<=8", bf_err, 0.0, 1e-12));
        for n in 1..=6 {
            let c = casimir_eigenvalue_check(&collective_spin(n)?)?;
            out.push(within(format!("Casimir residual N={n}"), c.max_residual, 0.0, 1e-10));
        }
        Ok(out)
    })
}

fn monte_carlo() -> Vec<Line> {
    attempt("sampling", || {
        let shots = 10_000;
        let thetas: Vec<f64> = replicate_parity(0.3, shots, 200, 2024)?.iter().map(|r| r.theta_hat).collect();
        let sd = sample_moments(&thetas).1.sqrt();
        let vacuum = FockVector::vacuum(16)?;
        let grid = HomodyneGrid::covering(&vacuum)?;
        let draw = || -> Result<Vec<f64>> {
            match sample_homodyne(&vacuum, 100_000, 5, grid)?.outcomes {
                Outcomes::Homodyne(v) => Ok(v),
                Outcomes::Parity(_) => unreachable!(),
            }
        };
        let (a, b) = (draw()?, draw()?);
        let var = sample_moments(&a).1;
        let replay = replicate_parity(0.3, shots, 200, 2024)?;
        let identical = a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits())
            && replay.iter().zip(&thetas).all(|(r, t)| r.theta_hat.to_bits() == t.to_bits());
        Ok(vec![
            within("parity sd / (1/(2 sqrt M))", sd * 2.0 * (shots as f64).sqrt(), 1.0, 0.2),
            within("homodyne vacuum variance", var, 1.0, 0.03),
            (format!("reruns bit-identical: {identical}"), identical),
        ])
    })
}

fn determinism() -> Vec<Line> {
    let bin = env!("CARGO_BIN_EXE_fockforce");
    let run = |args: &[&str]| Command::new(bin).args(args).env_remove("FOCKFORCE_OUT_DIR").output();
    let mut out = Vec::new();
    match (run(&["verify", "--seed", "7"]), run(&["verify", "--seed", "7"])) {
        (Ok(a), Ok(b)) => {
            out.push((
                format!("verify --seed 7 exit codes {:?}, {:?}", a.status.code(), b.status.code()),
                a.status.success() && b.status.success(),
            ));
            out.push((
                format!("verify --seed 7 byte-identical ({} bytes)", a.stdout.len()),
                !a.stdout.is_empty() && a.stdout == b.stdout,
            ));
        }
        _ => out.push(("verify could not be run".into(), false)),
    }
    for fmt in ["csv", "json"] {
        let base = [
            "sweep", "--family", "circle", "--axis", "alpha", "--start", "0.1", "--stop", "3", "--count", "30",
            "--format", fmt,
        ];
        let mut par = base.to_vec();
        par.push("--parallel");
        match (run(&base), run(&par)) {
            (Ok(s), Ok(p)) => {
                out.push((format!("{fmt} sweep sequential == parallel"), s.status.success() && s.stdout == p.stdout))
            }
            _ => out.push(("sweep could not be run".into(), false)),
        }
    }
    out
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("standard quantum limit", sql),
        ("squeezed vacuum", squeezed),
        ("two-mode squeezed vacuum", two_mode),
        ("circle state", circle),
        ("correlated-pair variance identity", pair_identity),
        ("beam-splitter structure", beam_splitter_structure),
        ("cat generator variance", cat_variance),
        ("generalized cat", generalized),
        ("Ramsey bounds", ramsey),
        ("Monte Carlo", monte_carlo),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let lines = f();
        let ok = lines.iter().all(|l| l.1);
        println!("[{}] {:>2}. {name}", if ok { "PASS" } else { "FAIL" }, i + 1);
        for (text, pass) in &lines {
            println!("         {} {text}", if *pass { "ok " } else { "BAD" });
        }
        if !ok {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
