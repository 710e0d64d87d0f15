//! Force-detection analysis: weak-force displacement, quadrature signal and
//! noise, minimum detectable force, and generator-variance bounds.
//!
//! Two readout pictures are covered.
//!
//! * Quadrature readout (coherent, squeezed, two-mode squeezed, circle):
//!   the force displaces every mode by `D(iε)`, the observable is `Σ Ŷᵢ`,
//!   and the minimum detectable force is the `ε` at which `S/√V = 1`.
//! * Generator readout (cats): the force rotates the probe inside the
//!   parity qubit(s) by `θ = εα`, and `δθ` follows from the variance of the
//!   rotation generator `Σ σ̂ₓ⁽ⁱ⁾`.
//!
//! The generator bound is published with two constants that disagree by a
//! factor of two, so [`EstimationConvention`] keeps both available.

pub mod spin;

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::fock::{apply_single_mode, inner_product, ModeOperator, MultiModeState};
use crate::numerics::NumericsConfig;
use crate::states::{cat, circle_mean_photon, coherent, generalized_cat, n_mode_cat, Parity, StateFamily};
use crate::{Error, Result};

pub use spin::{
    casimir_eigenvalue_check, collective_spin, dicke_state, ramsey_bounds, ramsey_state, CasimirCheck,
    CollectiveSpinOps, RamseyBound, RamseyScheme, MAX_SPIN_QUBITS,
};

/// Relative deviation tolerated by the two-point linearity check.
pub const LINEARITY_TOL: f64 = 1e-6;

/// Probe displacements used to measure the signal slope.
const PROBE_EPS: [f64; 3] = [0.0, 0.05, 0.1];

/// Bisection bracket for the nonlinear fallback.
const BRACKET: (f64, f64) = (1e-6, 10.0);

/// The weak force acting on the probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceParams {
    /// Momentum-quadrature displacement per mode.
    pub epsilon: f64,
    /// Full complex displacement applied by `D(β)`.
    pub beta: Complex64,
    /// Displace every mode (`true`) or only mode 0.
    pub per_mode: bool,
}

impl ForceParams {
    /// A force along the momentum quadrature, `β = iε`, on every mode.
    pub fn momentum(epsilon: f64) -> Self {
        Self { epsilon, beta: Complex64::new(0.0, epsilon), per_mode: true }
    }

    pub fn complex(beta: Complex64) -> Self {
        Self { epsilon: beta.im, beta, per_mode: true }
    }
}

/// Applies `D(β)` to every mode (or mode 0 only).
pub fn apply_weak_force(state: &MultiModeState, force: ForceParams) -> Result<MultiModeState> {
    if !(force.beta.re.is_finite() && force.beta.im.is_finite()) {
        return Err(Error::InvalidParameter("displacement must be finite"));
    }
    if force.beta == Complex64::new(0.0, 0.0) {
        return Ok(state.clone());
    }
    let modes = if force.per_mode { state.n_modes() } else { 1 };
    let mut cached: Option<ModeOperator> = None;
    let mut out = state.clone();
    for m in 0..modes {
        let d = out.dims()[m];
        let op = match cached.take() {
            Some(op) if op.dim() == d => op,
            _ => ModeOperator::displacement(force.beta, d)?,
        };
        out = apply_single_mode(&out, &op, m)?;
        cached = Some(op);
    }
    MultiModeState::new(out.dims().to_vec(), out.into_amps())
}

/// Mean and variance of `Σᵢ Ŷᵢ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureStats {
    pub signal: f64,
    pub variance: f64,
}

/// Exact `⟨ΣŶᵢ⟩` and `Var(ΣŶᵢ)` on `state`.
pub fn quadrature_stats(state: &MultiModeState) -> Result<QuadratureStats> {
    let (mean, second) = generator_moments(state, |d| Ok(ModeOperator::quadrature_y(d)))?;
    Ok(QuadratureStats { signal: mean, variance: second - mean * mean })
}

/// `⟨G⟩` and `⟨G²⟩` for `G = Σᵢ gᵢ` with a Hermitian single-mode `gᵢ`.
fn generator_moments(
    state: &MultiModeState,
    mut op_for_dim: impl FnMut(usize) -> Result<ModeOperator>,
) -> Result<(f64, f64)> {
    let mut phi = vec_zeros(state.len());
    let mut cached: Option<ModeOperator> = None;
    for m in 0..state.n_modes() {
        let d = state.dims()[m];
        let op = match cached.take() {
            Some(op) if op.dim() == d => op,
            _ => op_for_dim(d)?,
        };
        let term = apply_single_mode(state, &op, m)?;
        for (acc, z) in phi.iter_mut().zip(term.amps()) {
            *acc += z;
        }
        cached = Some(op);
    }
    let mean: Complex64 = state.amps().iter().zip(&phi).map(|(a, b)| a.conj() * b).sum();
    let second: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
    Ok((mean.re, second))
}

fn vec_zeros(n: usize) -> Vec<Complex64> {
    alloc::vec![Complex64::new(0.0, 0.0); n]
}

/// `2(1 + ⟨a†a + b†b⟩ − ⟨a†b† + ab⟩)` on a two-mode state.
///
/// This equals `Var(Ŷ₁+Ŷ₂)` whenever the state is number-correlated
/// (`⟨a²⟩ = ⟨ab†⟩ = 0`), which holds for the circle and two-mode squeezed
/// families, and it is unchanged by the weak-force displacement.
pub fn correlated_pair_variance(state: &MultiModeState) -> Result<f64> {
    if state.n_modes() != 2 {
        return Err(Error::InvalidParameter("correlated-pair variance needs two modes"));
    }
    let n = state.mean_photon_numbers();
    let a0 = ModeOperator::annihilation(state.dims()[0]);
    let a1 = ModeOperator::annihilation(state.dims()[1]);
    let ab = inner_product(state, &apply_single_mode(&apply_single_mode(state, &a1, 1)?, &a0, 0)?)?;
    // ⟨a†b†⟩ = ⟨ab⟩*, so the pair term is 2 Re⟨ab⟩.
    Ok(2.0 * (1.0 + n[0] + n[1] - 2.0 * ab.re))
}

/// Which constant multiplies the generator bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimationConvention {
    /// `δθ = 1/√Var`.
    UncertaintyRelation,
    /// `δθ = 1/(2√Var)`, the quantum Cramér–Rao bound for `e^(−iθG)`.
    CramerRao,
}

impl EstimationConvention {
    pub fn factor(self) -> f64 {
        match self {
            Self::UncertaintyRelation => 1.0,
            Self::CramerRao => 0.5,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Self::UncertaintyRelation => "uncertainty",
            Self::CramerRao => "cramer_rao",
        }
    }
}

/// Parameter-uncertainty bound from a generator variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationBound {
    pub generator_variance: f64,
    pub delta_theta: f64,
    pub convention_factor: f64,
    /// Conversion `θ/ε` from rotation angle to force amplitude.
    pub theta_per_epsilon: f64,
    pub convention: EstimationConvention,
}

impl EstimationBound {
    pub fn with_theta_per_epsilon(mut self, ratio: f64) -> Self {
        self.theta_per_epsilon = ratio;
        self
    }

    /// `δε = δθ / (θ/ε)`.
    pub fn delta_epsilon(&self) -> f64 {
        self.delta_theta / self.theta_per_epsilon
    }
}

/// `δθ = c/√Var` with `c` fixed by `convention`.
pub fn estimation_bound(generator_variance: f64, convention: EstimationConvention) -> Result<EstimationBound> {
    if !(generator_variance > 1e-14) {
        return Err(Error::DegenerateGenerator(generator_variance));
    }
    let c = convention.factor();
    Ok(EstimationBound {
        generator_variance,
        delta_theta: c / generator_variance.sqrt(),
        convention_factor: c,
        theta_per_epsilon: 1.0,
        convention,
    })
}

/// How `epsilon_min` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    /// Quadrature readout, `S/√V = 1`.
    SnrUnity,
    /// Generator-variance bound `δε`.
    Bound(EstimationConvention),
}

/// Sensitivity of one probe configuration.
///
/// For quadrature readout `signal` is `dS/dε` and `variance` is `Var(ΣŶᵢ)`.
/// For generator readout they are `θ/ε` and the generator variance, scaled
/// so that in both cases `epsilon_min = 1/snr_slope`.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    pub family: StateFamily,
    pub signal: f64,
    pub variance: f64,
    pub snr_slope: f64,
    pub epsilon_min: f64,
    pub mean_photon_total: f64,
    pub mode_count: usize,
    pub criterion: Criterion,
    /// The two-point linearity check passed (always true for bounds).
    pub linear: bool,
}

fn quadrature_family(family: &StateFamily) -> bool {
    matches!(
        family,
        StateFamily::Coherent { .. }
            | StateFamily::SqueezedVacuum { .. }
            | StateFamily::TwoModeSqueezed { .. }
            | StateFamily::Circle { .. }
    )
}

/// Minimum detectable force under quadrature readout.
///
/// The signal slope is measured from `ε ∈ {0, 0.05, 0.1}`. When the signal
/// is linear and the noise `ε`-independent (to [`LINEARITY_TOL`]), the
/// result is `√V / (dS/dε)`; otherwise `SNR(ε) = 1` is solved by bisection
/// on `[1e-6, 10]` and the report is flagged nonlinear.
pub fn min_detectable_force(family: &StateFamily, dim: usize) -> Result<SensitivityReport> {
    if !quadrature_family(family) {
        return Err(Error::UnsupportedFamily("quadrature readout needs a coherent, squeezed or circle probe"));
    }
    let state = family.build(dim)?;
    let stats = PROBE_EPS
        .iter()
        .map(|&e| quadrature_stats(&apply_weak_force(&state, ForceParams::momentum(e))?))
        .collect::<Result<Vec<_>>>()?;
    let base = stats[0];
    let s_half = stats[1].signal - base.signal;
    let s_full = stats[2].signal - base.signal;
    let slope = s_full / PROBE_EPS[2];
    let linear = (2.0 * s_half - s_full).abs() <= LINEARITY_TOL * s_full.abs()
        && (stats[2].variance - base.variance).abs() <= LINEARITY_TOL * base.variance;
    if !(base.variance > 0.0) || !(slope.abs() > 0.0) {
        return Err(Error::DegenerateGenerator(base.variance));
    }

    let mean_photon_total = state.mean_photon_numbers().iter().sum();
    let (epsilon_min, snr_slope) = if linear {
        let snr_slope = slope.abs() / base.variance.sqrt();
        (1.0 / snr_slope, snr_slope)
    } else {
        let snr = |e: f64| -> Result<f64> {
            let s = quadrature_stats(&apply_weak_force(&state, ForceParams::momentum(e))?)?;
            Ok((s.signal - base.signal).abs() / s.variance.sqrt())
        };
        let root = bisect(|e| Ok(snr(e)? - 1.0), BRACKET.0, BRACKET.1)?;
        (root, 1.0 / root)
    };
    Ok(SensitivityReport {
        family: *family,
        signal: slope.abs(),
        variance: base.variance,
        snr_slope,
        epsilon_min,
        mean_photon_total,
        mode_count: family.mode_count(),
        criterion: Criterion::SnrUnity,
        linear,
    })
}

fn bisect(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<f64> {
    let f_hi = f(hi)?;
    if f_hi < 0.0 {
        return Err(Error::NoRoot(f_hi + 1.0));
    }
    if f(lo)? >= 0.0 {
        return Ok(lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `½ √(½ + n̄ − α)` with `n̄ = α I₁(2α)/I₀(2α)`.
pub fn circle_epsilon_min_analytic(alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter("circle amplitude must be finite and non-negative"));
    }
    let nbar = circle_mean_photon(alpha, &NumericsConfig::default())?;
    Ok(0.5 * (0.5 + nbar - alpha).sqrt())
}

/// `σ̂ₓ = |+⟩⟨−| + |−⟩⟨+|` built from the exactly normalized truncated
/// parity cats of amplitude `α`.
pub fn parity_flip(alpha: f64, dim: usize) -> Result<ModeOperator> {
    let plus = cat(Complex64::new(alpha, 0.0), Parity::Even, dim)?;
    let minus = cat(Complex64::new(alpha, 0.0), Parity::Odd, dim)?;
    ModeOperator::outer(&plus, &minus)?.add(&ModeOperator::outer(&minus, &plus)?)
}

fn flip_variance(state: &MultiModeState, alpha: f64) -> Result<f64> {
    let (mean, second) = generator_moments(state, |d| parity_flip(alpha, d))?;
    Ok(second - mean * mean)
}

/// `Var(Σᵢ σ̂ₓ⁽ⁱ⁾)` on the N-mode cat of amplitude `α`.
pub fn cat_generator_variance(alpha: f64, n_modes: usize, dim: usize) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter("cat amplitude must be positive"));
    }
    flip_variance(&n_mode_cat(alpha, n_modes, dim)?, alpha)
}

/// Generator bound for a single- or N-mode cat probe.
pub fn cat_sensitivity(
    family: &StateFamily,
    convention: EstimationConvention,
    dim: usize,
) -> Result<SensitivityReport> {
    let (alpha, state): (f64, MultiModeState) = match *family {
        StateFamily::EvenCat { alpha } => {
            (alpha.norm(), cat(Complex64::new(alpha.norm(), 0.0), Parity::Even, dim)?.into())
        }
        StateFamily::OddCat { alpha } => {
            (alpha.norm(), cat(Complex64::new(alpha.norm(), 0.0), Parity::Odd, dim)?.into())
        }
        StateFamily::NModeCat { alpha, n_modes } => (alpha.abs(), n_mode_cat(alpha.abs(), n_modes, dim)?),
        _ => return Err(Error::UnsupportedFamily("generator readout needs a cat probe")),
    };
    if alpha == 0.0 {
        return Err(Error::InvalidParameter("cat amplitude must be positive"));
    }
    let bound = estimation_bound(flip_variance(&state, alpha)?, convention)?.with_theta_per_epsilon(alpha);
    let epsilon_min = bound.delta_epsilon();
    Ok(SensitivityReport {
        family: *family,
        signal: alpha,
        variance: bound.generator_variance,
        snr_slope: 1.0 / epsilon_min,
        epsilon_min,
        mean_photon_total: state.mean_photon_numbers().iter().sum(),
        mode_count: family.mode_count(),
        criterion: Criterion::Bound(convention),
        linear: true,
    })
}

/// Bound from `copies` independent single-mode even cats of amplitude `α`.
///
/// Variances of independent generators add, so this is the single-copy
/// bound divided by `√copies`.
pub fn independent_copies_bound(
    alpha: f64,
    copies: usize,
    convention: EstimationConvention,
    dim: usize,
) -> Result<EstimationBound> {
    if copies == 0 {
        return Err(Error::InvalidParameter("need at least one copy"));
    }
    let single = cat_generator_variance(alpha, 1, dim)?;
    Ok(estimation_bound(copies as f64 * single, convention)?.with_theta_per_epsilon(alpha))
}

/// Dispatches to quadrature or generator readout by family.
pub fn analyze(family: &StateFamily, convention: EstimationConvention, dim: usize) -> Result<SensitivityReport> {
    if quadrature_family(family) {
        min_detectable_force(family, dim)
    } else {
        cat_sensitivity(family, convention, dim)
    }
}

/// Rotation angles recovered by the K = 4 readout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutEstimate {
    pub theta: f64,
    pub phi: f64,
}

/// Displaces `|4,0⟩` by `D(β)` and reads `θ = α Im β`, `φ = α Re β` from
/// the coherent-component overlaps.
///
/// `D(β)|γ⟩ = e^(i Im(βγ*)) |γ+β⟩`, and the overlap `⟨γ|γ+β⟩` contributes
/// the same phase again, so `⟨±α|ψ⟩` carry `±2θ` and `⟨∓iα|ψ⟩` carry
/// `±2φ`. Each angle is a quarter of the phase difference of its pair.
pub fn generalized_cat_readout(alpha: f64, beta: Complex64, dim: usize) -> Result<ReadoutEstimate> {
    if !alpha.is_finite() || !(beta.re.is_finite() && beta.im.is_finite()) {
        return Err(Error::InvalidParameter("readout parameters must be finite"));
    }
    let overlap = (-2.0 * alpha * alpha).exp();
    if overlap > 1e-6 {
        return Err(Error::ComponentsNotResolvable(overlap));
    }
    if beta.norm() > 0.1 {
        return Err(Error::InvalidParameter("readout displacement must satisfy |beta| <= 0.1"));
    }
    let probe = generalized_cat(4, 0, alpha, dim)?;
    let out = ModeOperator::displacement(beta, dim)?.apply_normalized(&probe)?;
    let component = |g: Complex64| -> Result<Complex64> { coherent(g, dim)?.inner(&out) };
    let a = Complex64::new(alpha, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let theta = (component(a)? * component(-a)?.conj()).arg() / 4.0;
    let phi = (component(-i * a)? * component(i * a)?.conj()).arg() / 4.0;
    Ok(ReadoutEstimate { theta, phi })
}

/// Exact `Var(ΣŶᵢ)` for a family directly from its state, without force.
pub fn quadrature_variance(family: &StateFamily, dim: usize) -> Result<f64> {
    Ok(quadrature_stats(&family.build(dim)?)?.variance)
}
