//! Qubit-register comparison: Ramsey bounds and collective spin operators.
//!
//! Basis index bit `N−1−q` holds qubit `q` (qubit 0 is the most significant
//! bit). Single-qubit operators are `Ẑ = |1⟩⟨1| − |0⟩⟨0|`,
//! `X̂ = |0⟩⟨1| + |1⟩⟨0|` and `Ŷ = i|0⟩⟨1| − i|1⟩⟨0|`, a sign choice that
//! closes `[X̂, Ŷ] = 2iẐ`. Collective operators are `Ĵₖ = ½ Σᵢ k̂ᵢ`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::{estimation_bound, EstimationConvention};
use crate::numerics::{log_factorial, CMatrix};
use crate::{Error, Result};

/// Largest register for which dense collective operators are built.
pub const MAX_SPIN_QUBITS: usize = 10;

/// Largest register for which the Ramsey variance is brute-forced.
pub const MAX_BRUTE_FORCE_QUBITS: usize = 10;

/// Probe preparation for the Ramsey comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RamseyScheme {
    /// Every qubit in `(|0⟩ + |1⟩)/√2`.
    Product,
    /// `(|0…0⟩ + |1…1⟩)/√2`.
    Ghz,
    /// Bell pairs `(|00⟩ + |11⟩)/√2` on qubits `(2k, 2k+1)`.
    Pairwise,
}

impl RamseyScheme {
    fn check(self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidParameter("need at least one qubit"));
        }
        if self == Self::Pairwise && n % 2 == 1 {
            return Err(Error::OddPairCount(n));
        }
        Ok(())
    }

    /// `Var(Σ Ẑᵢ)` on the scheme's state.
    pub fn variance(self, n: usize) -> Result<f64> {
        self.check(n)?;
        let n = n as f64;
        Ok(match self {
            Self::Product => n,
            Self::Ghz => n * n,
            Self::Pairwise => 2.0 * n,
        })
    }
}

/// Ramsey phase bound for one scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamseyBound {
    pub n_qubits: usize,
    pub scheme: RamseyScheme,
    pub variance: f64,
    pub delta_theta: f64,
    /// `Var(ΣẐᵢ)` summed over all `2^N` amplitudes, when `N` is small
    /// enough to enumerate.
    pub brute_force_variance: Option<f64>,
}

/// Real amplitudes of the scheme's `N`-qubit state.
pub fn ramsey_state(n_qubits: usize, scheme: RamseyScheme) -> Result<Vec<f64>> {
    scheme.check(n_qubits)?;
    if n_qubits > MAX_BRUTE_FORCE_QUBITS {
        return Err(Error::DimensionCapExceeded { requested: n_qubits, cap: MAX_BRUTE_FORCE_QUBITS });
    }
    let len = 1usize << n_qubits;
    let h = core::f64::consts::FRAC_1_SQRT_2;
    Ok(match scheme {
        RamseyScheme::Product => vec![(len as f64).sqrt().recip(); len],
        RamseyScheme::Ghz => {
            let mut v = vec![0.0; len];
            v[0] = h;
            v[len - 1] = h;
            v
        }
        RamseyScheme::Pairwise => (0..len)
            .map(|s| {
                let paired = (0..n_qubits / 2).all(|k| {
                    let hi = (s >> (n_qubits - 1 - 2 * k)) & 1;
                    let lo = (s >> (n_qubits - 2 - 2 * k)) & 1;
                    hi == lo
                });
                if paired {
                    h.powi((n_qubits / 2) as i32)
                } else {
                    0.0
                }
            })
            .collect(),
    })
}

fn z_total(s: usize, n: usize) -> f64 {
    let ones = s.count_ones() as f64;
    2.0 * ones - n as f64
}

/// `Var(Σ Ẑᵢ)` by direct summation over a real register state.
pub fn z_variance(amps: &[f64], n_qubits: usize) -> f64 {
    let (mut m1, mut m2) = (0.0, 0.0);
    for (s, a) in amps.iter().enumerate() {
        let p = a * a;
        let z = z_total(s, n_qubits);
        m1 += p * z;
        m2 += p * z * z;
    }
    m2 - m1 * m1
}

/// `δθ = 1/√Var(ΣẐᵢ)` for the scheme, reproducing `1/√N`, `1/N` and
/// `1/√(2N)`; the variance is also brute-forced for `N ≤ 10`.
pub fn ramsey_bounds(n_qubits: usize, scheme: RamseyScheme) -> Result<RamseyBound> {
    let variance = scheme.variance(n_qubits)?;
    let bound = estimation_bound(variance, EstimationConvention::UncertaintyRelation)?;
    let brute_force_variance = if n_qubits <= MAX_BRUTE_FORCE_QUBITS {
        Some(z_variance(&ramsey_state(n_qubits, scheme)?, n_qubits))
    } else {
        None
    };
    Ok(RamseyBound { n_qubits, scheme, variance, delta_theta: bound.delta_theta, brute_force_variance })
}

/// Dense `Ĵx`, `Ĵy`, `Ĵz` on the `2^N` register.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveSpinOps {
    pub n_qubits: usize,
    pub jx: CMatrix,
    pub jy: CMatrix,
    pub jz: CMatrix,
}

pub fn collective_spin(n_qubits: usize) -> Result<CollectiveSpinOps> {
    if n_qubits == 0 {
        return Err(Error::InvalidParameter("need at least one qubit"));
    }
    if n_qubits > MAX_SPIN_QUBITS {
        return Err(Error::DimensionCapExceeded { requested: n_qubits, cap: MAX_SPIN_QUBITS });
    }
    let len = 1usize << n_qubits;
    let mut jx = CMatrix::zeros(len, len);
    let mut jy = CMatrix::zeros(len, len);
    let mut jz = CMatrix::zeros(len, len);
    for s in 0..len {
        jz[(s, s)] = Complex64::new(0.5 * z_total(s, n_qubits), 0.0);
        for q in 0..n_qubits {
            let bit = 1usize << (n_qubits - 1 - q);
            let t = s ^ bit;
            jx[(t, s)] += Complex64::new(0.5, 0.0);
            // Ŷ|0⟩ = −i|1⟩, Ŷ|1⟩ = i|0⟩.
            let sign = if s & bit == 0 { -0.5 } else { 0.5 };
            jy[(t, s)] += Complex64::new(0.0, sign);
        }
    }
    Ok(CollectiveSpinOps { n_qubits, jx, jy, jz })
}

/// Normalized Dicke state with `excitations` qubits in `|1⟩`.
pub fn dicke_state(n_qubits: usize, excitations: usize) -> Result<Vec<Complex64>> {
    if excitations > n_qubits {
        return Err(Error::InvalidParameter("excitations must not exceed the qubit count"));
    }
    if n_qubits > MAX_SPIN_QUBITS {
        return Err(Error::DimensionCapExceeded { requested: n_qubits, cap: MAX_SPIN_QUBITS });
    }
    let ln_binom = log_factorial(n_qubits as u64)
        - log_factorial(excitations as u64)
        - log_factorial((n_qubits - excitations) as u64);
    let amp = (-0.5 * ln_binom).exp();
    Ok((0..1usize << n_qubits)
        .map(
            |s| {
                if s.count_ones() as usize == excitations {
                    Complex64::new(amp, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            },
        )
        .collect())
}

/// Outcome of [`casimir_eigenvalue_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CasimirCheck {
    /// `(N/2)(N/2 + 1)`.
    pub expected: f64,
    /// `⟨D|Ĵ²|D⟩` on the first Dicke state.
    pub eigenvalue: f64,
    /// `max_k ‖Ĵ²|D_k⟩ − expected·|D_k⟩‖` over all `N+1` Dicke states.
    pub max_residual: f64,
}

/// Applies `Ĵ² = Ĵx² + Ĵy² + Ĵz²` to every Dicke state and measures its
/// departure from `(N/2)(N/2+1)`.
pub fn casimir_eigenvalue_check(ops: &CollectiveSpinOps) -> Result<CasimirCheck> {
    let n = ops.n_qubits;
    let half = n as f64 / 2.0;
    let expected = half * (half + 1.0);
    let casimir = |v: &[Complex64]| -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for j in [&ops.jx, &ops.jy, &ops.jz] {
            let w = j.mul_vec(&j.mul_vec(v)?)?;
            for (o, x) in out.iter_mut().zip(w) {
                *o += x;
            }
        }
        Ok(out)
    };
    let mut eigenvalue = f64::NAN;
    let mut max_residual: f64 = 0.0;
    for k in 0..=n {
        let d = dicke_state(n, k)?;
        let w = casimir(&d)?;
        if k == 0 {
            eigenvalue = d.iter().zip(&w).map(|(a, b)| a.conj() * b).sum::<Complex64>().re;
        }
        let residual = d.iter().zip(&w).map(|(a, b)| (b - a * expected).norm_sqr()).sum::<f64>().sqrt();
        max_residual = max_residual.max(residual);
    }
    Ok(CasimirCheck { expected, eigenvalue, max_residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
        a.matmul(b).unwrap().sub(&b.matmul(a).unwrap()).unwrap()
    }

    #[test]
    fn ramsey_examples() {
        assert_eq!(ramsey_bounds(4, RamseyScheme::Product).unwrap().delta_theta, 0.5);
        assert_eq!(ramsey_bounds(4, RamseyScheme::Ghz).unwrap().delta_theta, 0.25);
        let p = ramsey_bounds(4, RamseyScheme::Pairwise).unwrap();
        assert!((p.delta_theta - 8f64.sqrt().recip()).abs() < 1e-15);
        assert_eq!(ramsey_bounds(3, RamseyScheme::Pairwise), Err(Error::OddPairCount(3)));
        assert!(ramsey_bounds(20, RamseyScheme::Ghz).unwrap().brute_force_variance.is_none());
    }

    #[test]
    fn brute_force_matches_closed_forms() {
        for n in 1..=MAX_BRUTE_FORCE_QUBITS {
            for scheme in [RamseyScheme::Product, RamseyScheme::Ghz, RamseyScheme::Pairwise] {
                if scheme == RamseyScheme::Pairwise && n % 2 == 1 {
                    continue;
                }
                let b = ramsey_bounds(n, scheme).unwrap();
                let brute = b.brute_force_variance.unwrap();
                assert!((brute - b.variance).abs() <= 1e-12 * b.variance.max(1.0), "{scheme:?} N={n}");
                let norm: f64 = ramsey_state(n, scheme).unwrap().iter().map(|a| a * a).sum();
                assert!((norm - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_qubit_algebra() {
        let ops = collective_spin(1).unwrap();
        let two = |m: &CMatrix| m.scale(Complex64::new(2.0, 0.0));
        let (x, y, z) = (two(&ops.jx), two(&ops.jy), two(&ops.jz));
        assert_eq!(z[(1, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(z[(0, 0)], Complex64::new(-1.0, 0.0));
        assert_eq!(x[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(y[(0, 1)], Complex64::new(0.0, 1.0));
        let c = commutator(&x, &y).sub(&z.scale(Complex64::new(0.0, 2.0))).unwrap();
        assert!(c.max_abs() < 1e-15);
    }

    #[test]
    fn collective_operators_are_hermitian_and_close() {
        for n in 1..=4 {
            let ops = collective_spin(n).unwrap();
            for j in [&ops.jx, &ops.jy, &ops.jz] {
                assert!(j.sub(&j.adjoint()).unwrap().max_abs() < 1e-13);
            }
            let i = Complex64::new(0.0, 1.0);
            let pairs = [(&ops.jx, &ops.jy, &ops.jz), (&ops.jy, &ops.jz, &ops.jx), (&ops.jz, &ops.jx, &ops.jy)];
            for (a, b, c) in pairs {
                assert!(commutator(a, b).sub(&c.scale(i)).unwrap().max_abs() < 1e-12);
            }
        }
        assert!(matches!(collective_spin(11), Err(Error::DimensionCapExceeded { .. })));
    }

    #[test]
    fn casimir_on_dicke_states() {
        let expected = [0.75, 2.0, 3.75, 6.0, 8.75, 12.0];
        for (n, want) in (1..=6).zip(expected) {
            let check = casimir_eigenvalue_check(&collective_spin(n).unwrap()).unwrap();
            assert_eq!(check.expected, want);
            assert!((check.eigenvalue - want).abs() < 1e-10);
            assert!(check.max_residual < 1e-10, "N={n}: {}", check.max_residual);
        }
    }

    #[test]
    fn dicke_states_are_jz_eigenstates() {
        let ops = collective_spin(5).unwrap();
        for k in 0..=5 {
            let d = dicke_state(5, k).unwrap();
            let w = ops.jz.mul_vec(&d).unwrap();
            let m = k as f64 - 2.5;
            let r: f64 = d.iter().zip(&w).map(|(a, b)| (b - a * m).norm_sqr()).sum();
            assert!(r < 1e-24);
        }
    }
}
