//! Constructors for the probe-state families.
//!
//! All amplitudes are computed in log space so coherent amplitudes up to
//! about 8 and truncations up to a few hundred levels stay finite. Every
//! constructor renormalizes after truncation.
//!
//! Truncation checks come in two flavours:
//!
//! * coherent-state families (`coherent`, the cats, the generalized cats)
//!   require `dim ≥ |α|² + 6|α| + 10`, see [`crate::fock::required_dim`];
//! * series families (squeezed vacuum, two-mode squeezed, circle) compute the
//!   probability the truncation discards from the exact untruncated series
//!   and reject anything above [`DISCARD_TOL`].
//!
//! Generalized cats `|K,ν⟩ = Σ_μ e^(2πiμν/K) |α e^(2πiμ/K)⟩` are supported
//! only on number states with `n ≡ −ν (mod K)`; that is the literal reading
//! of the phase factor, and it makes `|K,ν⟩` an eigenvector of
//! `exp(2πi n̂/K)` with eigenvalue `exp(−2πiν/K)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::fock::{check_truncation, required_dim, tensor_len, FockVector, MultiModeState, DEFAULT_MEMORY_CAP};
use crate::numerics::{bessel_i, log_factorial, NumericsConfig};
use crate::{Error, Result};

/// Largest probability a series-family constructor may discard.
pub const DISCARD_TOL: f64 = 1e-8;

/// Weight allowed on the top three levels of a default-dimension state.
pub const TAIL_TOL: f64 = 1e-10;

/// Floor on default truncations, large enough for a probe displacement of
/// 0.1 to satisfy the coherent truncation rule.
pub const MIN_DEFAULT_DIM: usize = 11;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Photon-number parity of a single-mode cat.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// A probe family with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateFamily {
    Coherent {
        alpha: Complex64,
    },
    /// Single-mode squeezed vacuum, squeezed along `Y` for `r > 0`.
    SqueezedVacuum {
        r: f64,
    },
    /// `√(1−λ²) Σ λⁿ |n,n⟩`.
    TwoModeSqueezed {
        lambda: f64,
    },
    /// Pair-coherent state `Σ αⁿ/(n! √I₀(2α)) |n,n⟩`.
    Circle {
        alpha: f64,
    },
    EvenCat {
        alpha: Complex64,
    },
    OddCat {
        alpha: Complex64,
    },
    /// `𝒩 (|α,…,α⟩ + |−α,…,−α⟩)` over `n_modes` modes.
    NModeCat {
        alpha: f64,
        n_modes: usize,
    },
    GeneralizedCat {
        k: usize,
        nu: usize,
        alpha: f64,
    },
}

/// Resolves a squeezing parameter given as `r`, `λ = tanh r`, or both.
pub fn squeezing_lambda(r: Option<f64>, lambda: Option<f64>) -> Result<f64> {
    match (r, lambda) {
        (Some(r), Some(l)) => {
            if (r.tanh() - l).abs() > 1e-12 {
                return Err(Error::InvalidParameter("lambda must equal tanh(r)"));
            }
            Ok(l)
        }
        (Some(r), None) => Ok(r.tanh()),
        (None, Some(l)) => Ok(l),
        (None, None) => Err(Error::InvalidParameter("squeezing needs r or lambda")),
    }
}

impl StateFamily {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Coherent { .. } => "coherent",
            Self::SqueezedVacuum { .. } => "squeezed",
            Self::TwoModeSqueezed { .. } => "tmsv",
            Self::Circle { .. } => "circle",
            Self::EvenCat { .. } => "even_cat",
            Self::OddCat { .. } => "odd_cat",
            Self::NModeCat { .. } => "cat",
            Self::GeneralizedCat { .. } => "gencat",
        }
    }

    /// Named real parameters, in a fixed order per family.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        fn complex(alpha: &Complex64) -> Vec<(&'static str, f64)> {
            if alpha.im == 0.0 {
                vec![("alpha", alpha.re)]
            } else {
                vec![("alpha", alpha.re), ("alpha_im", alpha.im)]
            }
        }
        match self {
            Self::Coherent { alpha } | Self::EvenCat { alpha } | Self::OddCat { alpha } => complex(alpha),
            Self::SqueezedVacuum { r } => vec![("r", *r), ("lambda", r.tanh())],
            Self::TwoModeSqueezed { lambda } => vec![("lambda", *lambda), ("r", lambda.atanh())],
            Self::Circle { alpha } => vec![("alpha", *alpha)],
            Self::NModeCat { alpha, n_modes } => vec![("alpha", *alpha), ("N", *n_modes as f64)],
            Self::GeneralizedCat { k, nu, alpha } => {
                vec![("K", *k as f64), ("nu", *nu as f64), ("alpha", *alpha)]
            }
        }
    }

    pub fn mode_count(&self) -> usize {
        match self {
            Self::TwoModeSqueezed { .. } | Self::Circle { .. } => 2,
            Self::NModeCat { n_modes, .. } => *n_modes,
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |x: f64| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter("parameters must be finite"))
            }
        };
        match *self {
            Self::Coherent { alpha } | Self::EvenCat { alpha } => finite(alpha.re + alpha.im),
            Self::OddCat { alpha } => {
                finite(alpha.re + alpha.im)?;
                if alpha.norm() == 0.0 {
                    return Err(Error::InvalidParameter("odd cat needs a nonzero amplitude"));
                }
                Ok(())
            }
            Self::SqueezedVacuum { r } => finite(r),
            Self::TwoModeSqueezed { lambda } => {
                if !(0.0..1.0).contains(&lambda) {
                    return Err(Error::InvalidParameter("lambda must lie in [0, 1)"));
                }
                Ok(())
            }
            Self::Circle { alpha } => {
                finite(alpha)?;
                if alpha < 0.0 {
                    return Err(Error::InvalidParameter("circle amplitude must be non-negative"));
                }
                Ok(())
            }
            Self::NModeCat { alpha, n_modes } => {
                finite(alpha)?;
                if n_modes == 0 {
                    return Err(Error::InvalidParameter("mode count must be at least 1"));
                }
                Ok(())
            }
            Self::GeneralizedCat { k, nu, alpha } => {
                finite(alpha)?;
                if k == 0 {
                    return Err(Error::InvalidParameter("modulus K must be at least 1"));
                }
                if nu >= k {
                    return Err(Error::InvalidParameter("residue nu must lie in [0, K)"));
                }
                Ok(())
            }
        }
    }

    /// Per-mode truncation chosen so the top three levels hold at most
    /// [`TAIL_TOL`] of the weight.
    pub fn default_dim(&self) -> Result<usize> {
        self.validate()?;
        Ok(match *self {
            Self::Coherent { alpha } | Self::EvenCat { alpha } | Self::OddCat { alpha } => required_dim(alpha.norm()),
            Self::NModeCat { alpha, .. } | Self::GeneralizedCat { alpha, .. } => required_dim(alpha),
            Self::SqueezedVacuum { r } => dim_for_discard(|n| squeezed_probability(r.tanh(), n), TAIL_TOL)? + 3,
            Self::TwoModeSqueezed { lambda } => dim_for_discard(|n| tmsv_probability(lambda, n), TAIL_TOL)? + 3,
            Self::Circle { alpha } => {
                let i0 = bessel_i(0, 2.0 * alpha, &NumericsConfig::default())?;
                dim_for_discard(|n| circle_probability(alpha, i0, n), TAIL_TOL)? + 3
            }
        }
        .max(MIN_DEFAULT_DIM))
    }

    /// Smallest truncation the constructor accepts.
    pub fn min_dim(&self) -> Result<usize> {
        self.validate()?;
        Ok(match *self {
            Self::SqueezedVacuum { r } => dim_for_discard(|n| squeezed_probability(r.tanh(), n), DISCARD_TOL)?,
            Self::TwoModeSqueezed { lambda } => dim_for_discard(|n| tmsv_probability(lambda, n), DISCARD_TOL)?,
            Self::Circle { alpha } => {
                let i0 = bessel_i(0, 2.0 * alpha, &NumericsConfig::default())?;
                dim_for_discard(|n| circle_probability(alpha, i0, n), DISCARD_TOL)?
            }
            _ => self.default_dim()?,
        }
        .max(2))
    }

    /// Total mean photon number of the untruncated state.
    pub fn mean_photon_total(&self) -> Result<f64> {
        self.validate()?;
        let cfg = NumericsConfig::default();
        Ok(match *self {
            Self::Coherent { alpha } => alpha.norm_sqr(),
            Self::SqueezedVacuum { r } => r.sinh().powi(2),
            Self::TwoModeSqueezed { lambda } => 2.0 * lambda * lambda / (1.0 - lambda * lambda),
            Self::Circle { alpha } => 2.0 * circle_mean_photon(alpha, &cfg)?,
            Self::EvenCat { alpha } => {
                let x = alpha.norm_sqr();
                x * x.tanh()
            }
            Self::OddCat { alpha } => {
                let x = alpha.norm_sqr();
                x / x.tanh()
            }
            Self::NModeCat { alpha, n_modes } => {
                let x = n_modes as f64 * alpha * alpha;
                x * x.tanh()
            }
            Self::GeneralizedCat { k, nu, alpha } => {
                let r = (k - nu) % k;
                let below = (r + k - 1) % k;
                let s_r = residue_series(k, r, alpha * alpha);
                if s_r <= 0.0 {
                    return Err(Error::VanishingNorm);
                }
                alpha * alpha * residue_series(k, below, alpha * alpha) / s_r
            }
        })
    }

    /// Builds the normalized state at per-mode truncation `dim`.
    pub fn build(&self, dim: usize) -> Result<MultiModeState> {
        self.build_with_cap(dim, DEFAULT_MEMORY_CAP)
    }

    pub fn build_with_cap(&self, dim: usize, cap: usize) -> Result<MultiModeState> {
        self.validate()?;
        Ok(match *self {
            Self::Coherent { alpha } => coherent(alpha, dim)?.into(),
            Self::SqueezedVacuum { r } => squeezed_vacuum(r, dim)?.into(),
            Self::TwoModeSqueezed { lambda } => two_mode_squeezed(lambda, dim)?,
            Self::Circle { alpha } => circle_state(alpha, dim)?,
            Self::EvenCat { alpha } => cat(alpha, Parity::Even, dim)?.into(),
            Self::OddCat { alpha } => cat(alpha, Parity::Odd, dim)?.into(),
            Self::NModeCat { alpha, n_modes } => n_mode_cat_with_cap(alpha, n_modes, dim, cap)?,
            Self::GeneralizedCat { k, nu, alpha } => generalized_cat(k, nu, alpha, dim)?.into(),
        })
    }
}

/// Smallest `d` with `1 − Σ_{n<d} p(n) ≤ tol`.
fn dim_for_discard(probability: impl Fn(usize) -> f64, tol: f64) -> Result<usize> {
    const MAX_SCAN: usize = 100_000;
    let mut kept = 0.0;
    for d in 1..=MAX_SCAN {
        kept += probability(d - 1);
        if 1.0 - kept <= tol {
            return Ok(d);
        }
    }
    Err(Error::InvalidParameter("state is too extended to truncate"))
}

fn check_discard(probability: impl Fn(usize) -> f64, dim: usize) -> Result<()> {
    let kept: f64 = (0..dim).map(&probability).sum();
    if 1.0 - kept > DISCARD_TOL {
        let required = dim_for_discard(probability, DISCARD_TOL)?;
        return Err(Error::TruncationTooSmall { dim, required });
    }
    Ok(())
}

/// `ln |⟨n|α⟩|` for the untruncated coherent state, `|α| > 0`.
fn coherent_log_magnitude(abs_alpha: f64, n: usize) -> f64 {
    -0.5 * abs_alpha * abs_alpha + n as f64 * abs_alpha.ln() - 0.5 * log_factorial(n as u64)
}

/// Untruncated coherent amplitudes `e^(−|α|²/2) αⁿ/√(n!)` for `n < dim`.
fn coherent_amplitudes(alpha: Complex64, dim: usize) -> Vec<Complex64> {
    let r = alpha.norm();
    if r == 0.0 {
        let mut v = vec![ZERO; dim];
        v[0] = Complex64::new(1.0, 0.0);
        return v;
    }
    let phase = alpha.arg();
    (0..dim).map(|n| Complex64::from_polar(coherent_log_magnitude(r, n).exp(), phase * n as f64)).collect()
}

/// Coherent state `|α⟩`.
pub fn coherent(alpha: Complex64, dim: usize) -> Result<FockVector> {
    check_truncation(alpha.norm(), dim)?;
    FockVector::new(coherent_amplitudes(alpha, dim))
}

fn squeezed_probability(lambda: f64, n: usize) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    if lambda == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let m = n / 2;
    let log_amp =
        0.25 * (1.0 - lambda * lambda).ln() + m as f64 * (lambda.abs() / 2.0).ln() + 0.5 * log_factorial(n as u64)
            - log_factorial(m as u64);
    (2.0 * log_amp).exp()
}

/// Squeezed vacuum with `λ = tanh r`:
/// `(1−λ²)^(1/4) Σ (λ/2)^m √((2m)!)/m! |2m⟩`.
///
/// For `r > 0` the `Y` quadrature is squeezed, `Var(Y) = e^(−2r)`, and the
/// mean photon number is `sinh² r = λ²/(1−λ²)`.
pub fn squeezed_vacuum(r: f64, dim: usize) -> Result<FockVector> {
    if !r.is_finite() {
        return Err(Error::InvalidParameter("squeezing must be finite"));
    }
    let lambda = r.tanh();
    check_discard(|n| squeezed_probability(lambda, n), dim)?;
    let amps = (0..dim)
        .map(|n| {
            let p = squeezed_probability(lambda, n);
            let sign = if lambda < 0.0 && (n / 2) % 2 == 1 { -1.0 } else { 1.0 };
            Complex64::new(sign * p.sqrt(), 0.0)
        })
        .collect();
    FockVector::new(amps)
}

fn tmsv_probability(lambda: f64, n: usize) -> f64 {
    (1.0 - lambda * lambda) * lambda.powi(2 * n as i32)
}

/// Two-mode squeezed vacuum `√(1−λ²) Σ λⁿ |n,n⟩`, `0 ≤ λ < 1`.
pub fn two_mode_squeezed(lambda: f64, dim: usize) -> Result<MultiModeState> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::InvalidParameter("lambda must lie in [0, 1)"));
    }
    check_discard(|n| tmsv_probability(lambda, n), dim)?;
    diagonal_pair_state(dim, |n| tmsv_probability(lambda, n).sqrt())
}

fn circle_probability(alpha: f64, i0: f64, n: usize) -> f64 {
    if alpha == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (2.0 * (n as f64 * alpha.ln() - log_factorial(n as u64))).exp() / i0
}

/// Per-mode mean photon number `α I₁(2α)/I₀(2α)` of the circle state.
pub fn circle_mean_photon(alpha: f64, cfg: &NumericsConfig) -> Result<f64> {
    if alpha == 0.0 {
        return Ok(0.0);
    }
    Ok(alpha * bessel_i(1, 2.0 * alpha, cfg)? / bessel_i(0, 2.0 * alpha, cfg)?)
}

/// Pair-coherent ("circle") state `Σ c_n |n,n⟩`, `c_n = αⁿ/(n! √I₀(2α))`.
pub fn circle_state(alpha: f64, dim: usize) -> Result<MultiModeState> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter("circle amplitude must be finite and non-negative"));
    }
    let i0 = bessel_i(0, 2.0 * alpha, &NumericsConfig::default())?;
    check_discard(|n| circle_probability(alpha, i0, n), dim)?;
    diagonal_pair_state(dim, |n| circle_probability(alpha, i0, n).sqrt())
}

fn diagonal_pair_state(dim: usize, coefficient: impl Fn(usize) -> f64) -> Result<MultiModeState> {
    let mut amps = vec![ZERO; dim * dim];
    for n in 0..dim {
        amps[n * dim + n] = Complex64::new(coefficient(n), 0.0);
    }
    MultiModeState::new(vec![dim, dim], amps)
}

/// Single-mode cat `(|α⟩ ± |−α⟩)/√(2 ± 2e^(−2|α|²))`.
pub fn cat(alpha: Complex64, parity: Parity, dim: usize) -> Result<FockVector> {
    check_truncation(alpha.norm(), dim)?;
    let keep = match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    let amps = coherent_amplitudes(alpha, dim)
        .into_iter()
        .enumerate()
        .map(|(n, z)| if n % 2 == keep { z * 2.0 } else { ZERO })
        .collect();
    FockVector::new(amps)
}

/// N-mode entangled cat `𝒩 (|α,…,α⟩ + |−α,…,−α⟩)`, `𝒩 = 1/√(2 + 2e^(−2Nα²))`.
pub fn n_mode_cat(alpha: f64, n_modes: usize, dim: usize) -> Result<MultiModeState> {
    n_mode_cat_with_cap(alpha, n_modes, dim, DEFAULT_MEMORY_CAP)
}

pub fn n_mode_cat_with_cap(alpha: f64, n_modes: usize, dim: usize, cap: usize) -> Result<MultiModeState> {
    if n_modes == 0 {
        return Err(Error::InvalidParameter("mode count must be at least 1"));
    }
    check_truncation(alpha, dim)?;
    let dims = vec![dim; n_modes];
    let len = tensor_len(&dims, cap)?;
    let single = coherent_amplitudes(Complex64::new(alpha, 0.0), dim);
    let norm = 1.0 / (2.0 + 2.0 * (-2.0 * n_modes as f64 * alpha * alpha).exp()).sqrt();
    // ⟨n|−α⟩ = (−1)ⁿ ⟨n|α⟩, so the two branches add on even total photon
    // number and cancel on odd.
    let mut amps = vec![ZERO; len];
    let mut digits = vec![0usize; n_modes];
    for slot in amps.iter_mut() {
        let total: usize = digits.iter().sum();
        if total % 2 == 0 {
            let mut prod = Complex64::new(2.0 * norm, 0.0);
            for &n in &digits {
                prod *= single[n];
            }
            *slot = prod;
        }
        for m in (0..n_modes).rev() {
            digits[m] += 1;
            if digits[m] < dim {
                break;
            }
            digits[m] = 0;
        }
    }
    MultiModeState::new(dims, amps)
}

/// Generalized cat `|K,ν⟩ = Σ_μ e^(2πiμν/K) |α e^(2πiμ/K)⟩`, normalized.
///
/// Summing the `K` coherent components leaves `K ⟨n|α⟩` on `n ≡ −ν (mod K)`
/// and zero elsewhere, which is what is built here directly.
pub fn generalized_cat(k: usize, nu: usize, alpha: f64, dim: usize) -> Result<FockVector> {
    if k == 0 || nu >= k {
        return Err(Error::InvalidParameter("need K ≥ 1 and 0 ≤ nu < K"));
    }
    check_truncation(alpha, dim)?;
    let residue = (k - nu) % k;
    let amps = coherent_amplitudes(Complex64::new(alpha, 0.0), dim)
        .into_iter()
        .enumerate()
        .map(|(n, z)| if n % k == residue { z * k as f64 } else { ZERO })
        .collect();
    FockVector::new(amps)
}

/// `Σ_{n ≡ r (mod K)} xⁿ/n!` via the roots-of-unity filter
/// `(1/K) Σ_μ ω^(−μr) exp(x ω^μ)`.
fn residue_series(k: usize, r: usize, x: f64) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for mu in 0..k {
        let w = Complex64::from_polar(1.0, 2.0 * PI * mu as f64 / k as f64);
        let phase = Complex64::from_polar(1.0, -2.0 * PI * (mu * r) as f64 / k as f64);
        acc += phase * (w * x).exp();
    }
    acc.re / k as f64
}

/// The residue `r` such that every amplitude above `threshold` sits on
/// `n ≡ r (mod k)`, if there is one.
pub fn support_residue(state: &FockVector, k: usize, threshold: f64) -> Option<usize> {
    if k == 0 {
        return None;
    }
    let mut found = None;
    for (n, z) in state.amps().iter().enumerate() {
        if z.norm() > threshold {
            match found {
                None => found = Some(n % k),
                Some(r) if r != n % k => return None,
                _ => {}
            }
        }
    }
    found
}
