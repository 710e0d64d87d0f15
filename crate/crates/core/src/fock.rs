//! Truncated Fock-space containers, mode operators and tensor products.
//!
//! A [`MultiModeState`] stores one flattened amplitude tensor, row-major with
//! mode 0 varying slowest. Single-mode operators are applied by strided
//! contraction, so an N-mode operator is never materialized.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::numerics::{matrix_exponential, CMatrix, NumericsConfig};
use crate::{Error, Result};

/// Default cap on the number of amplitudes in one multi-mode tensor.
pub const DEFAULT_MEMORY_CAP: usize = 1 << 22;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Smallest truncation that keeps a coherent amplitude `|β|` (or the
/// displacement it induces) away from the top of the space:
/// `d ≥ |β|² + 6|β| + 10`.
pub fn required_dim(amplitude: f64) -> usize {
    let a = amplitude.abs();
    (a * a + 6.0 * a + 10.0).ceil() as usize
}

pub(crate) fn check_truncation(amplitude: f64, dim: usize) -> Result<()> {
    let required = required_dim(amplitude);
    if dim < required {
        return Err(Error::TruncationTooSmall { dim, required });
    }
    Ok(())
}

fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|z| z.norm_sqr()).sum()
}

fn normalize_in_place(amps: &mut [Complex64]) -> Result<()> {
    let n = norm_sqr(amps).sqrt();
    if !(n > 1e-300) || !n.is_finite() {
        return Err(Error::VanishingNorm);
    }
    let inv = 1.0 / n;
    for z in amps.iter_mut() {
        *z *= inv;
    }
    Ok(())
}

/// One mode's pure state in the number basis, `amps[n] = ⟨n|ψ⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<Complex64>,
}

impl FockVector {
    /// Wraps and renormalizes the given amplitudes.
    pub fn new(mut amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::InvalidParameter("truncation dimension must be at least 2"));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite amplitude"));
        }
        normalize_in_place(&mut amps)?;
        Ok(Self { amps })
    }

    /// Number state `|n⟩`.
    pub fn basis(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::TruncationTooSmall { dim, required: n + 1 });
        }
        let mut amps = vec![ZERO; dim];
        amps[n] = ONE;
        Self::new(amps)
    }

    pub fn vacuum(dim: usize) -> Result<Self> {
        Self::basis(0, dim)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amps).sqrt()
    }

    /// Probability weight on the top `levels` number states.
    pub fn tail_mass(&self, levels: usize) -> f64 {
        let start = self.amps.len().saturating_sub(levels);
        norm_sqr(&self.amps[start..])
    }

    pub fn inner(&self, other: &FockVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `⟨ψ|op|ψ⟩`.
    pub fn expectation(&self, op: &ModeOperator) -> Result<Complex64> {
        let applied = op.apply(&self.amps)?;
        Ok(self.amps.iter().zip(&applied).map(|(a, b)| a.conj() * b).sum())
    }

    /// Mean photon number `Σ n |amps[n]|²`.
    pub fn mean_photon_number(&self) -> f64 {
        self.amps.iter().enumerate().map(|(n, z)| n as f64 * z.norm_sqr()).sum()
    }
}

/// Pure state of `N` modes with per-mode truncation dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiModeState {
    dims: Vec<usize>,
    amps: Vec<Complex64>,
}

/// Checks a dimension list and returns the tensor size.
pub fn tensor_len(dims: &[usize], cap: usize) -> Result<usize> {
    if dims.is_empty() {
        return Err(Error::InvalidParameter("a state needs at least one mode"));
    }
    let mut len = 1usize;
    for &d in dims {
        if d < 2 {
            return Err(Error::InvalidParameter("truncation dimension must be at least 2"));
        }
        len = len.checked_mul(d).ok_or(Error::MemoryCapExceeded { amplitudes: usize::MAX, cap })?;
    }
    if len > cap {
        return Err(Error::MemoryCapExceeded { amplitudes: len, cap });
    }
    Ok(len)
}

impl MultiModeState {
    /// Wraps and renormalizes a flattened amplitude tensor.
    pub fn new(dims: Vec<usize>, mut amps: Vec<Complex64>) -> Result<Self> {
        let len = tensor_len(&dims, usize::MAX)?;
        if amps.len() != len {
            return Err(Error::DimensionMismatch { expected: len, found: amps.len() });
        }
        normalize_in_place(&mut amps)?;
        Ok(Self { dims, amps })
    }

    pub(crate) fn from_parts_unnormalized(dims: Vec<usize>, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), amps.len());
        Self { dims, amps }
    }

    /// Tensor product `|ψ_0⟩ ⊗ … ⊗ |ψ_{N-1}⟩`.
    pub fn product(factors: &[FockVector]) -> Result<Self> {
        Self::product_with_cap(factors, DEFAULT_MEMORY_CAP)
    }

    pub fn product_with_cap(factors: &[FockVector], cap: usize) -> Result<Self> {
        let dims: Vec<usize> = factors.iter().map(FockVector::dim).collect();
        let len = tensor_len(&dims, cap)?;
        let mut amps = Vec::with_capacity(len);
        amps.push(ONE);
        for f in factors {
            let mut next = Vec::with_capacity(amps.len() * f.dim());
            for a in &amps {
                for b in f.amps() {
                    next.push(a * b);
                }
            }
            amps = next;
        }
        Self::new(dims, amps)
    }

    pub fn n_modes(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amps).sqrt()
    }

    pub fn normalized(mut self) -> Result<Self> {
        normalize_in_place(&mut self.amps)?;
        Ok(self)
    }

    /// Flat-index stride of each mode.
    pub fn strides(&self) -> Vec<usize> {
        strides(&self.dims)
    }

    /// Flat index of the number configuration `ns`.
    pub fn index_of(&self, ns: &[usize]) -> Result<usize> {
        if ns.len() != self.dims.len() {
            return Err(Error::DimensionMismatch { expected: self.dims.len(), found: ns.len() });
        }
        let mut idx = 0;
        for (&n, &d) in ns.iter().zip(&self.dims) {
            if n >= d {
                return Err(Error::TruncationTooSmall { dim: d, required: n + 1 });
            }
            idx = idx * d + n;
        }
        Ok(idx)
    }

    /// Mean photon number of every mode.
    pub fn mean_photon_numbers(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dims.len()];
        let strides = self.strides();
        for (flat, z) in self.amps.iter().enumerate() {
            let p = z.norm_sqr();
            if p == 0.0 {
                continue;
            }
            for (m, (&s, &d)) in strides.iter().zip(&self.dims).enumerate() {
                out[m] += ((flat / s) % d) as f64 * p;
            }
        }
        let total = norm_sqr(&self.amps);
        out.iter_mut().for_each(|x| *x /= total);
        out
    }

    /// Weight on configurations where any mode sits in its top `levels` states.
    pub fn tail_mass(&self, levels: usize) -> f64 {
        let strides = self.strides();
        self.amps
            .iter()
            .enumerate()
            .filter(|(flat, _)| strides.iter().zip(&self.dims).any(|(&s, &d)| (flat / s) % d + levels >= d))
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }
}

impl From<FockVector> for MultiModeState {
    fn from(v: FockVector) -> Self {
        let dims = vec![v.dim()];
        Self { dims, amps: v.into_amps() }
    }
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for m in (0..dims.len().saturating_sub(1)).rev() {
        s[m] = s[m + 1] * dims[m + 1];
    }
    s
}

/// Dense operator on one mode's truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeOperator {
    matrix: CMatrix,
}

impl ModeOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.rows(), found: matrix.cols() });
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidParameter("operator has non-finite entries"));
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: CMatrix::identity(dim) }
    }

    /// Lowering operator, `⟨n-1|a|n⟩ = √n`.
    ///
    /// # Panics
    /// If `dim < 2`.
    pub fn annihilation(dim: usize) -> Self {
        assert!(dim >= 2, "truncation dimension must be at least 2");
        let mut m = CMatrix::zeros(dim, dim);
        for n in 1..dim {
            m[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
        }
        Self { matrix: m }
    }

    pub fn creation(dim: usize) -> Self {
        Self::annihilation(dim).adjoint()
    }

    pub fn number(dim: usize) -> Self {
        assert!(dim >= 2, "truncation dimension must be at least 2");
        let mut m = CMatrix::zeros(dim, dim);
        for n in 0..dim {
            m[(n, n)] = Complex64::new(n as f64, 0.0);
        }
        Self { matrix: m }
    }

    /// `X = a + a†`.
    pub fn quadrature_x(dim: usize) -> Self {
        let a = Self::annihilation(dim);
        let ad = a.adjoint();
        Self { matrix: a.matrix.add(&ad.matrix).expect("same shape") }
    }

    /// `Y = -i(a - a†)`.
    pub fn quadrature_y(dim: usize) -> Self {
        let a = Self::annihilation(dim);
        let ad = a.adjoint();
        Self { matrix: a.matrix.sub(&ad.matrix).expect("same shape").scale(Complex64::new(0.0, -1.0)) }
    }

    /// `D(β) = exp(β a† − β* a)` by matrix exponential of the truncated
    /// generator. Requires `dim ≥ required_dim(|β|)`.
    pub fn displacement(beta: Complex64, dim: usize) -> Result<Self> {
        check_truncation(beta.norm(), dim)?;
        let a = Self::annihilation(dim);
        let generator = a.adjoint().matrix.scale(beta).sub(&a.matrix.scale(beta.conj()))?;
        let u = matrix_exponential(&generator, &NumericsConfig::default())?;
        Ok(Self { matrix: u })
    }

    /// Closed-form elements of the untruncated `D(β)`, restricted to the
    /// first `dim` number states:
    /// `⟨m|D(β)|n⟩ = √(n!/m!) β^(m-n) e^(-|β|²/2) L_n^(m-n)(|β|²)` for
    /// `m ≥ n`, and the mirrored form with `-β*` otherwise.
    ///
    /// This is an independent route to [`ModeOperator::displacement`]; the
    /// Laguerre recurrence loses accuracy for large `|β|` and `dim`.
    pub fn displacement_analytic(beta: Complex64, dim: usize) -> Self {
        let x = beta.norm_sqr();
        let gauss = (-0.5 * x).exp();
        let m = CMatrix::from_fn(dim, dim, |row, col| {
            let (hi, lo, base) = if row >= col { (row, col, beta) } else { (col, row, -beta.conj()) };
            let k = hi - lo;
            let lag = laguerre(lo, k as f64, x);
            let log_ratio =
                0.5 * (crate::numerics::log_factorial(lo as u64) - crate::numerics::log_factorial(hi as u64));
            base.powu(k as u32) * (gauss * log_ratio.exp() * lag)
        });
        Self { matrix: m }
    }

    /// `|ket⟩⟨bra|`.
    pub fn outer(ket: &FockVector, bra: &FockVector) -> Result<Self> {
        if ket.dim() != bra.dim() {
            return Err(Error::DimensionMismatch { expected: ket.dim(), found: bra.dim() });
        }
        let (k, b) = (ket.amps(), bra.amps());
        Ok(Self { matrix: CMatrix::from_fn(ket.dim(), ket.dim(), |i, j| k[i] * b[j].conj()) })
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint() }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        Ok(Self { matrix: self.matrix.matmul(&other.matrix)? })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self { matrix: self.matrix.add(&other.matrix)? })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self { matrix: self.matrix.sub(&other.matrix)? })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { matrix: self.matrix.scale(s) }
    }

    /// Matrix-vector product on raw amplitudes.
    pub fn apply(&self, amps: &[Complex64]) -> Result<Vec<Complex64>> {
        self.matrix.mul_vec(amps)
    }

    /// Applies the operator to a single-mode state and renormalizes. Fails
    /// with [`Error::VanishingNorm`] if the result is the zero vector.
    pub fn apply_normalized(&self, state: &FockVector) -> Result<FockVector> {
        FockVector::new(self.apply(state.amps())?)
    }

    /// `max |A - A†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.matrix.sub(&self.matrix.adjoint()).map(|d| d.max_abs()).unwrap_or(f64::INFINITY)
    }
}

/// Generalized Laguerre polynomial `L_n^(a)(x)` by upward recurrence.
fn laguerre(n: usize, a: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - x) * cur - (kf + a) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

fn check_mode(state: &MultiModeState, mode: usize) -> Result<()> {
    if mode >= state.n_modes() {
        return Err(Error::ModeOutOfRange { mode, n_modes: state.n_modes() });
    }
    Ok(())
}

/// `(I ⊗ … ⊗ op ⊗ … ⊗ I)|ψ⟩` with `op` on `mode`. The result is not
/// renormalized.
pub fn apply_single_mode(state: &MultiModeState, op: &ModeOperator, mode: usize) -> Result<MultiModeState> {
    check_mode(state, mode)?;
    let d = state.dims[mode];
    if op.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: op.dim() });
    }
    let inner: usize = state.dims[mode + 1..].iter().product();
    let outer: usize = state.dims[..mode].iter().product();
    let mut out = vec![ZERO; state.amps.len()];
    let m = op.matrix();
    for o in 0..outer {
        let block = o * d * inner;
        for row in 0..d {
            let dst = block + row * inner;
            for col in 0..d {
                let coeff = m[(row, col)];
                if coeff == ZERO {
                    continue;
                }
                let src = block + col * inner;
                for i in 0..inner {
                    out[dst + i] += coeff * state.amps[src + i];
                }
            }
        }
    }
    Ok(MultiModeState::from_parts_unnormalized(state.dims.clone(), out))
}

/// `⟨ψ|O_1 O_2 … O_k|ψ⟩` for single-mode operators `(O_i, mode_i)`; the
/// last operator in the list acts first.
pub fn expectation(state: &MultiModeState, ops: &[(&ModeOperator, usize)]) -> Result<Complex64> {
    let mut phi = state.clone();
    for (op, mode) in ops.iter().rev() {
        phi = apply_single_mode(&phi, op, *mode)?;
    }
    inner_product(state, &phi)
}

/// `⟨s1|s2⟩`.
pub fn inner_product(s1: &MultiModeState, s2: &MultiModeState) -> Result<Complex64> {
    if s1.dims != s2.dims {
        return Err(Error::DimensionMismatch { expected: s1.len(), found: s2.len() });
    }
    Ok(s1.amps.iter().zip(&s2.amps).map(|(a, b)| a.conj() * b).sum())
}

/// `|⟨s1|s2⟩|²`.
pub fn fidelity(s1: &MultiModeState, s2: &MultiModeState) -> Result<f64> {
    Ok(inner_product(s1, s2)?.norm_sqr())
}

/// Phase convention of the two-mode mixing generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeamSplitterConvention {
    /// `exp(−iθ(a_i† a_j + a_i a_j†))`.
    PhaseI,
    /// `exp(θ(a_i† a_j − a_i a_j†))`.
    Real,
}

/// Result of [`beam_splitter_with_leakage`].
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSplitterOutput {
    /// Output state, renormalized on the truncated space.
    pub state: MultiModeState,
    /// Weight the exact output places on number states beyond the
    /// truncation of mode `i` or `j`.
    pub leaked_mass: f64,
}

/// Mixes modes `i` and `j`. See [`beam_splitter_with_leakage`].
pub fn beam_splitter(
    state: &MultiModeState,
    i: usize,
    j: usize,
    theta: f64,
    convention: BeamSplitterConvention,
) -> Result<MultiModeState> {
    beam_splitter_with_leakage(state, i, j, theta, convention).map(|o| o.state)
}

/// Mixes modes `i` and `j` with the photon-number conserving unitary.
///
/// The generator only couples `|k, N−k⟩` configurations of equal total
/// `N`, so the untruncated unitary is exponentiated exactly on each
/// `(N+1)`-dimensional block. Output weight landing above the truncation of
/// either mode is dropped and reported as `leaked_mass`; the remaining state
/// is renormalized.
pub fn beam_splitter_with_leakage(
    state: &MultiModeState,
    i: usize,
    j: usize,
    theta: f64,
    convention: BeamSplitterConvention,
) -> Result<BeamSplitterOutput> {
    check_mode(state, i)?;
    check_mode(state, j)?;
    if i == j {
        return Err(Error::InvalidParameter("beam splitter needs two distinct modes"));
    }
    let d = state.dims[i];
    if state.dims[j] != d {
        return Err(Error::DimensionMismatch { expected: d, found: state.dims[j] });
    }
    if !theta.is_finite() {
        return Err(Error::InvalidParameter("mixing angle must be finite"));
    }
    if theta == 0.0 {
        return Ok(BeamSplitterOutput { state: state.clone(), leaked_mass: 0.0 });
    }

    let strides = state.strides();
    let (si, sj) = (strides[i], strides[j]);
    let bases: Vec<usize> = (0..state.len()).filter(|&f| (f / si) % d == 0 && (f / sj) % d == 0).collect();

    let cfg = NumericsConfig::default();
    let mut out = vec![ZERO; state.len()];
    let mut leaked = 0.0;
    let mut input = Vec::with_capacity(2 * d);
    for total in 0..=2 * (d - 1) {
        let occupied = |base: usize| {
            (0..=total)
                .filter(|&k| k < d && total - k < d)
                .any(|k| state.amps[base + k * si + (total - k) * sj] != ZERO)
        };
        if !bases.iter().any(|&b| occupied(b)) {
            continue;
        }
        let u = block_unitary(total, theta, convention, &cfg)?;
        for &base in &bases {
            input.clear();
            input.extend((0..=total).map(|k| {
                if k < d && total - k < d {
                    state.amps[base + k * si + (total - k) * sj]
                } else {
                    ZERO
                }
            }));
            if input.iter().all(|z| *z == ZERO) {
                continue;
            }
            let w = u.mul_vec(&input)?;
            for (k, z) in w.into_iter().enumerate() {
                if k < d && total - k < d {
                    out[base + k * si + (total - k) * sj] = z;
                } else {
                    leaked += z.norm_sqr();
                }
            }
        }
    }
    let total_in = norm_sqr(&state.amps);
    let state = MultiModeState::new(state.dims.clone(), out)?;
    Ok(BeamSplitterOutput { state, leaked_mass: leaked / total_in })
}

/// Exact mixing unitary on the block `{|k, N−k⟩ : k = 0..=N}`.
fn block_unitary(
    total: usize,
    theta: f64,
    convention: BeamSplitterConvention,
    cfg: &NumericsConfig,
) -> Result<CMatrix> {
    let size = total + 1;
    let mut g = CMatrix::zeros(size, size);
    for k in 0..size {
        // a_i† a_j |k, N−k⟩ = √((k+1)(N−k)) |k+1, N−k−1⟩
        if k + 1 < size {
            let up = (((k + 1) * (total - k)) as f64).sqrt();
            g[(k + 1, k)] = match convention {
                BeamSplitterConvention::Real => Complex64::new(theta * up, 0.0),
                BeamSplitterConvention::PhaseI => Complex64::new(0.0, -theta * up),
            };
        }
        // a_i a_j† |k, N−k⟩ = √(k(N−k+1)) |k−1, N−k+1⟩
        if k > 0 {
            let down = ((k * (total - k + 1)) as f64).sqrt();
            g[(k - 1, k)] = match convention {
                BeamSplitterConvention::Real => Complex64::new(-theta * down, 0.0),
                BeamSplitterConvention::PhaseI => Complex64::new(0.0, -theta * down),
            };
        }
    }
    matrix_exponential(&g, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use core::f64::consts::FRAC_PI_4;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn coherent(alpha: Complex64, dim: usize) -> FockVector {
        // Local closed form, independent of the `states` module.
        let mut amps = Vec::with_capacity(dim);
        let mut term = c((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        for n in 0..dim {
            amps.push(term);
            term = term * alpha / ((n + 1) as f64).sqrt();
        }
        FockVector::new(amps).unwrap()
    }

    /// Explicit Kronecker embedding `I ⊗ … ⊗ op ⊗ … ⊗ I`; only for tiny dims.
    fn kron_embed(op: &ModeOperator, mode: usize, dims: &[usize]) -> CMatrix {
        let mut acc = CMatrix::identity(1);
        for (m, &d) in dims.iter().enumerate() {
            let factor = if m == mode { op.matrix().clone() } else { CMatrix::identity(d) };
            let (r1, c1) = (acc.rows(), acc.cols());
            let (r2, c2) = (factor.rows(), factor.cols());
            acc = CMatrix::from_fn(r1 * r2, c1 * c2, |i, j| acc[(i / r2, j / c2)] * factor[(i % r2, j % c2)]);
        }
        acc
    }

    fn pseudo_random_op(dim: usize, seed: u64) -> ModeOperator {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        ModeOperator::new(CMatrix::from_fn(dim, dim, |_, _| c(next(), next()))).unwrap()
    }

    #[test]
    fn ladder_actions() {
        let a = ModeOperator::annihilation(8);
        let vac = FockVector::vacuum(8).unwrap();
        assert!(a.apply(vac.amps()).unwrap().iter().all(|z| *z == ZERO));
        let three = FockVector::basis(3, 8).unwrap();
        let out = a.apply(three.amps()).unwrap();
        for (n, z) in out.iter().enumerate() {
            let want = if n == 2 { 3f64.sqrt() } else { 0.0 };
            assert!((z - c(want, 0.0)).norm() < 1e-15);
        }
        let num = ModeOperator::number(8);
        let ada = ModeOperator::creation(8).matmul(&a).unwrap();
        assert!(num.matrix().sub(ada.matrix()).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn commutator_is_identity_below_the_top_level() {
        let d = 16;
        let a = ModeOperator::annihilation(d);
        let ad = ModeOperator::creation(d);
        let comm = a.matmul(&ad).unwrap().sub(&ad.matmul(&a).unwrap()).unwrap();
        for i in 0..d {
            for j in 0..d {
                let z = comm.matrix()[(i, j)];
                if i < d - 1 && j < d - 1 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((z - c(want, 0.0)).norm() <= 1e-13, "({i},{j})");
                }
            }
        }
        // The top corner carries the truncation artifact 1 − d.
        assert!((comm.matrix()[(d - 1, d - 1)] - c(1.0 - d as f64, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn quadratures_are_hermitian_with_unit_vacuum_variance() {
        let d = 12;
        let x = ModeOperator::quadrature_x(d);
        let y = ModeOperator::quadrature_y(d);
        assert!(x.hermiticity_defect() < 1e-14);
        assert!(y.hermiticity_defect() < 1e-14);
        let vac = FockVector::vacuum(d).unwrap();
        assert!(vac.expectation(&y).unwrap().norm() < 1e-15);
        assert_relative_eq!(vac.expectation(&y.matmul(&y).unwrap()).unwrap().re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn quadrature_means_on_coherent_states() {
        let d = 40;
        let x = ModeOperator::quadrature_x(d);
        let y = ModeOperator::quadrature_y(d);
        let real = coherent(c(1.5, 0.0), d);
        assert_relative_eq!(real.expectation(&x).unwrap().re, 3.0, epsilon = 1e-9);
        let eps = 0.2;
        let imag = coherent(c(0.0, eps), d);
        assert_relative_eq!(imag.expectation(&y).unwrap().re, 2.0 * eps, epsilon = 1e-12);
    }

    #[test]
    fn displacement_of_zero_is_identity() {
        let d = ModeOperator::displacement(c(0.0, 0.0), 12).unwrap();
        assert!(d.matrix().sub(&CMatrix::identity(12)).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn displacement_truncation_rule() {
        let beta = c(3.0, 0.0);
        assert_eq!(required_dim(3.0), 37);
        assert_eq!(ModeOperator::displacement(beta, 36), Err(Error::TruncationTooSmall { dim: 36, required: 37 }));
        assert!(ModeOperator::displacement(beta, 37).is_ok());
    }

    #[test]
    fn displacement_creates_coherent_states() {
        for &beta in &[c(0.7, 0.0), c(-0.4, 1.1), c(0.0, 2.0)] {
            let dim = required_dim(beta.norm());
            let d = ModeOperator::displacement(beta, dim).unwrap();
            let out = FockVector::new(d.apply(FockVector::vacuum(dim).unwrap().amps()).unwrap()).unwrap();
            let target = coherent(beta, dim);
            let f = out.inner(&target).unwrap().norm_sqr();
            assert!(f >= 1.0 - 1e-10, "beta={beta}: fidelity {f}");
        }
    }

    #[test]
    fn displacement_is_unitary_on_the_lower_half() {
        let beta = c(1.2, -0.8);
        let dim = required_dim(beta.norm());
        let d = ModeOperator::displacement(beta, dim).unwrap();
        let prod = d.adjoint().matmul(&d).unwrap();
        for i in 0..=dim / 2 {
            for j in 0..=dim / 2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((prod.matrix()[(i, j)] - c(want, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn displacement_routes_agree() {
        // Matrix exponential of the truncated generator vs closed-form
        // elements; they agree away from the truncation edge.
        let beta = c(0.6, 0.3);
        let dim = 30;
        let expm = ModeOperator::displacement(beta, dim).unwrap();
        let analytic = ModeOperator::displacement_analytic(beta, dim);
        for i in 0..dim / 2 {
            for j in 0..dim / 2 {
                let diff = (expm.matrix()[(i, j)] - analytic.matrix()[(i, j)]).norm();
                assert!(diff < 1e-10, "({i},{j}) diff {diff}");
            }
        }
    }

    #[test]
    fn displaced_coherent_state_carries_the_phase() {
        // D(iε)|α₀⟩ = e^{iεα₀}|α₀ + iε⟩ with α₀ real.
        let (alpha0, eps) = (1.3, 0.25);
        let dim = required_dim(alpha0 + eps) + 4;
        let d = ModeOperator::displacement(c(0.0, eps), dim).unwrap();
        let out = FockVector::new(d.apply(coherent(c(alpha0, 0.0), dim).amps()).unwrap()).unwrap();
        let target = coherent(c(alpha0, eps), dim);
        let overlap = target.inner(&out).unwrap();
        assert!((overlap - Complex64::from_polar(1.0, eps * alpha0)).norm() < 1e-10, "{overlap}");
    }

    #[test]
    fn coherent_overlap_is_gaussian() {
        let d = 30;
        let a = MultiModeState::from(coherent(c(0.0, 0.0), d));
        let b = MultiModeState::from(coherent(c(1.0, 0.0), d));
        assert_relative_eq!(inner_product(&a, &b).unwrap().re, (-0.5f64).exp(), epsilon = 1e-12);
        assert_relative_eq!(fidelity(&b, &b).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn annihilation_expectation_on_coherent_state() {
        let alpha = c(1.1, -0.6);
        let dim = required_dim(alpha.norm());
        let state = MultiModeState::from(coherent(alpha, dim));
        let a = ModeOperator::annihilation(dim);
        let got = expectation(&state, &[(&a, 0)]).unwrap();
        assert!((got - alpha).norm() < 1e-9);
    }

    #[test]
    fn apply_single_mode_basics() {
        let state =
            MultiModeState::product(&[FockVector::vacuum(3).unwrap(), FockVector::basis(1, 3).unwrap()]).unwrap();
        let same = apply_single_mode(&state, &ModeOperator::identity(3), 1).unwrap();
        assert_eq!(same, state);
        let lowered = apply_single_mode(&state, &ModeOperator::annihilation(3), 1).unwrap();
        let vac = MultiModeState::product(&[FockVector::vacuum(3).unwrap(), FockVector::vacuum(3).unwrap()]).unwrap();
        assert_eq!(lowered, vac);
        assert!(matches!(
            apply_single_mode(&state, &ModeOperator::identity(4), 0),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(apply_single_mode(&state, &ModeOperator::identity(3), 2), Err(Error::ModeOutOfRange { .. })));
    }

    #[test]
    fn apply_single_mode_matches_kronecker_oracle() {
        let dims = [4usize, 4];
        let amps: Vec<Complex64> = (0..16).map(|k| c((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos())).collect();
        let state = MultiModeState::new(dims.to_vec(), amps).unwrap();
        for mode in 0..2 {
            let op = pseudo_random_op(4, 17 + mode as u64);
            let fast = apply_single_mode(&state, &op, mode).unwrap();
            let slow = kron_embed(&op, mode, &dims).mul_vec(state.amps()).unwrap();
            let diff = fast.amps().iter().zip(&slow).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(diff <= 1e-12, "mode {mode}: {diff}");
        }
    }

    #[test]
    fn operators_on_distinct_modes_commute() {
        let dims = vec![3usize, 4, 2];
        let amps: Vec<Complex64> = (0..24).map(|k| c((k as f64).cos(), (k as f64 * 0.5).sin())).collect();
        let state = MultiModeState::new(dims, amps).unwrap();
        let a = pseudo_random_op(3, 1);
        let b = pseudo_random_op(2, 2);
        let ab = apply_single_mode(&apply_single_mode(&state, &b, 2).unwrap(), &a, 0).unwrap();
        let ba = apply_single_mode(&apply_single_mode(&state, &a, 0).unwrap(), &b, 2).unwrap();
        let diff = ab.amps().iter().zip(ba.amps()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(diff <= 1e-12);
    }

    #[test]
    fn beam_splitter_at_zero_angle_is_identity() {
        let s = MultiModeState::product(&[coherent(c(0.5, 0.0), 12), coherent(c(0.0, 0.3), 12)]).unwrap();
        for conv in [BeamSplitterConvention::Real, BeamSplitterConvention::PhaseI] {
            assert_eq!(beam_splitter(&s, 0, 1, 0.0, conv).unwrap(), s);
        }
    }

    #[test]
    fn beam_splitter_combines_equal_coherent_amplitudes() {
        let alpha = 1.0;
        let dim = required_dim(2f64.sqrt() * alpha);
        let input = MultiModeState::product(&[coherent(c(alpha, 0.0), dim), coherent(c(alpha, 0.0), dim)]).unwrap();
        let out = beam_splitter_with_leakage(&input, 0, 1, FRAC_PI_4, BeamSplitterConvention::Real).unwrap();
        let target =
            MultiModeState::product(&[coherent(c(2f64.sqrt() * alpha, 0.0), dim), FockVector::vacuum(dim).unwrap()])
                .unwrap();
        assert!(fidelity(&out.state, &target).unwrap() >= 1.0 - 1e-8);
        assert!(out.leaked_mass < 1e-10);
    }

    #[test]
    fn beam_splitter_conserves_norm_and_photon_number() {
        let dim = 20;
        let input = MultiModeState::product(&[coherent(c(0.8, 0.2), dim), coherent(c(-0.3, 0.9), dim)]).unwrap();
        let n_in: f64 = input.mean_photon_numbers().iter().sum();
        for conv in [BeamSplitterConvention::Real, BeamSplitterConvention::PhaseI] {
            for &theta in &[0.3, FRAC_PI_4, 1.2] {
                let out = beam_splitter_with_leakage(&input, 0, 1, theta, conv).unwrap();
                assert!(out.leaked_mass < 1e-10);
                assert!((out.state.norm() - 1.0).abs() < 1e-10);
                let n_out: f64 = out.state.mean_photon_numbers().iter().sum();
                assert!((n_out - n_in).abs() < 1e-9, "{conv:?} θ={theta}: {n_in} -> {n_out}");
            }
        }
    }

    #[test]
    fn beam_splitter_acts_on_the_named_modes_only() {
        let dim = 14;
        let spectator = coherent(c(0.0, 0.7), dim);
        let input =
            MultiModeState::product(&[coherent(c(0.6, 0.0), dim), spectator.clone(), coherent(c(0.6, 0.0), dim)])
                .unwrap();
        let out = beam_splitter(&input, 0, 2, FRAC_PI_4, BeamSplitterConvention::Real).unwrap();
        let target = MultiModeState::product(&[
            coherent(c(0.6 * 2f64.sqrt(), 0.0), dim),
            spectator,
            FockVector::vacuum(dim).unwrap(),
        ])
        .unwrap();
        assert!(fidelity(&out, &target).unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn beam_splitter_phase_convention_maps_amplitudes() {
        // exp(−iθ(a†b + ab†)): (α, 0) → (α cos θ, −iα sin θ).
        let (alpha, theta) = (0.9, 0.4);
        let dim = 20;
        let input = MultiModeState::product(&[coherent(c(alpha, 0.0), dim), FockVector::vacuum(dim).unwrap()]).unwrap();
        let out = beam_splitter(&input, 0, 1, theta, BeamSplitterConvention::PhaseI).unwrap();
        let target = MultiModeState::product(&[
            coherent(c(alpha * theta.cos(), 0.0), dim),
            coherent(c(0.0, -alpha * theta.sin()), dim),
        ])
        .unwrap();
        assert!(fidelity(&out, &target).unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn beam_splitter_rejects_bad_modes() {
        let s = MultiModeState::product(&[FockVector::vacuum(4).unwrap(), FockVector::vacuum(5).unwrap()]).unwrap();
        assert!(matches!(
            beam_splitter(&s, 0, 1, 0.1, BeamSplitterConvention::Real),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(beam_splitter(&s, 0, 0, 0.1, BeamSplitterConvention::Real).is_err());
    }

    #[test]
    fn memory_cap_is_enforced() {
        let v = FockVector::vacuum(10).unwrap();
        assert!(matches!(
            MultiModeState::product_with_cap(&[v.clone(), v.clone(), v], 999),
            Err(Error::MemoryCapExceeded { amplitudes: 1000, cap: 999 })
        ));
    }
}
