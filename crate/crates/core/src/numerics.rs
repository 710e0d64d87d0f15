//! Special functions and dense complex matrix kernels.
//!
//! Everything here is a pure function of its inputs. Matrices are small
//! (a single mode's truncated space, or one photon-number block of a
//! two-mode space), so a flat row-major `Vec` is all the structure needed.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Tolerances and caps for the series and matrix kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericsConfig {
    /// Absolute cutoff on the magnitude of the last power-series term.
    pub series_tol: f64,
    /// Truncation tolerance of the Taylor core in [`matrix_exponential`].
    pub expm_tol: f64,
    /// Safety cap on series terms.
    pub max_terms: usize,
    /// Largest square matrix [`matrix_exponential`] will accept.
    pub max_dim: usize,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self { series_tol: 1e-16, expm_tol: 1e-13, max_terms: 500, max_dim: 1024 }
    }
}

impl NumericsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.series_tol > 0.0) || !(self.expm_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive"));
        }
        if self.max_terms == 0 {
            return Err(Error::InvalidParameter("max_terms must be at least 1"));
        }
        Ok(())
    }
}

/// Natural log of `n!`.
///
/// Exact products up to `170!` (the largest factorial representable in
/// `f64`), Stirling's series beyond.
pub fn log_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= 170 {
        let mut p = 1.0_f64;
        for k in 2..=n {
            p *= k as f64;
        }
        return p.ln();
    }
    // ln Γ(x) with x = n + 1; the first omitted term is below 1e-22 here.
    let x = n as f64 + 1.0;
    let x2 = x * x;
    let series =
        1.0 / (12.0 * x) - 1.0 / (360.0 * x * x2) + 1.0 / (1260.0 * x * x2 * x2) - 1.0 / (1680.0 * x * x2 * x2 * x2);
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series
}

/// Modified Bessel function of the first kind, `I_0` or `I_1`, for `x >= 0`.
///
/// Direct power series `Σ (x/2)^(2k+order) / (k! (k+order)!)`, stopped once
/// the terms are decreasing and fall below `cfg.series_tol`.
pub fn bessel_i(order: u32, x: f64, cfg: &NumericsConfig) -> Result<f64> {
    if order > 1 {
        return Err(Error::InvalidParameter("bessel_i supports orders 0 and 1"));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::InvalidParameter("bessel_i needs a finite x >= 0"));
    }
    let half = 0.5 * x;
    let q = half * half;
    let mut term = if order == 0 { 1.0 } else { half };
    let mut sum = term;
    for k in 1..=cfg.max_terms {
        let kf = k as f64;
        term *= q / (kf * (kf + order as f64));
        sum += term;
        if term < cfg.series_tol && kf > half {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence { max_terms: cfg.max_terms })
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        Ok((0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect())
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm_one(&self) -> f64 {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.rows * self.cols, found: other.rows * other.cols });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `exp(A)` by scaling and squaring around a truncated Taylor series.
///
/// `A` is scaled by `2^-s` until its 1-norm is at most 1/2, the series is
/// summed until the last term's norm drops below `expm_tol` relative to the
/// partial sum, and the result is squared `s` times.
pub fn matrix_exponential(a: &CMatrix, cfg: &NumericsConfig) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
    }
    let n = a.rows();
    if n > cfg.max_dim {
        return Err(Error::DimensionCapExceeded { requested: n, cap: cfg.max_dim });
    }
    if !a.is_finite() {
        return Err(Error::InvalidParameter("matrix has non-finite entries"));
    }
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }

    let norm = a.norm_one();
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scaled = a.scale(Complex64::new(0.5_f64.powi(squarings as i32), 0.0));

    let mut result = CMatrix::identity(n);
    let mut term = CMatrix::identity(n);
    let mut converged = false;
    for k in 1..=cfg.max_terms {
        term = term.matmul(&scaled)?.scale(Complex64::new(1.0 / k as f64, 0.0));
        result = result.add(&term)?;
        if term.norm_one() <= cfg.expm_tol * result.norm_one() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence { max_terms: cfg.max_terms });
    }
    for _ in 0..squarings {
        result = result.matmul(&result)?;
    }
    Ok(result)
}

/// Normalized oscillator eigenfunction `⟨y|n⟩` up to the phase `(-i)^n`, in
/// the variable `y` of the quadrature `Y = -i(a - a†)`.
///
/// With `Y` the vacuum variance is 1, so the ground state is a Gaussian of
/// unit variance: `ψ_0(y) = (2π)^(-1/4) exp(-y²/4)`. The full momentum-space
/// amplitude of `|n⟩` is `(-i)^n ψ_n(y)`; [`crate::sampling`] applies that
/// phase.
pub fn hermite_wavefunction(n: usize, y: f64) -> f64 {
    let table = hermite_wavefunctions(n + 1, y);
    table[n]
}

/// Values `ψ_0(y), …, ψ_{count-1}(y)` via the three-term recurrence.
pub fn hermite_wavefunctions(count: usize, y: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    // Standard Hermite functions φ_n(u) with u = y/√2, rescaled by 2^(-1/4).
    let u = y / core::f64::consts::SQRT_2;
    let scale = 2.0_f64.powf(-0.25);
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * u * u).exp();
    out.push(scale * cur);
    for k in 0..count.saturating_sub(1) {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * u * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        out.push(scale * cur);
    }
    out
}
