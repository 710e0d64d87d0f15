//! Seeded Monte Carlo readout: parity-basis shots and homodyne samples of
//! the momentum quadrature.
//!
//! Every shot draws from its own ChaCha8 stream keyed by `(seed, shot
//! index)`, so outcome `i` depends on nothing but the seed and `i`. Shots
//! can be generated in any order or in parallel and still reproduce
//! bit-for-bit.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::fock::{FockVector, ModeOperator};
use crate::numerics::hermite_wavefunctions;
use crate::{Complex64, Error, Result};

/// Largest tolerated `|1 − ∫P(y)dy|` on a homodyne grid.
pub const GRID_MASS_TOL: f64 = 1e-9;

/// Uniform variate in `(0, 1)` for shot `index` under `seed`.
pub fn uniform(seed: u64, index: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Per-point seed used by sweeps and replication experiments.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    seed ^ index
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    ParityReadout,
    Homodyne,
}

impl Scheme {
    pub fn tag(self) -> &'static str {
        match self {
            Self::ParityReadout => "parity",
            Self::Homodyne => "homodyne",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcomes {
    /// `true` for the `+` result.
    Parity(Vec<bool>),
    Homodyne(Vec<f64>),
}

impl Outcomes {
    pub fn len(&self) -> usize {
        match self {
            Self::Parity(v) => v.len(),
            Self::Homodyne(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A reproducible run of `shots` measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotRecord {
    pub scheme: Scheme,
    pub shots: usize,
    pub seed: u64,
    pub params: Vec<(&'static str, f64)>,
    pub outcomes: Outcomes,
}

/// One parity-readout shot: `+` with probability `cos²θ`.
pub fn parity_outcome(theta: f64, seed: u64, index: u64) -> bool {
    uniform(seed, index) < theta.cos().powi(2)
}

pub fn sample_parity_readout(theta: f64, shots: usize, seed: u64) -> Result<ShotRecord> {
    if shots == 0 {
        return Err(Error::InvalidParameter("need at least one shot"));
    }
    if !theta.is_finite() {
        return Err(Error::InvalidParameter("theta must be finite"));
    }
    let outcomes = (0..shots as u64).map(|i| parity_outcome(theta, seed, i)).collect();
    Ok(ShotRecord {
        scheme: Scheme::ParityReadout,
        shots,
        seed,
        params: alloc::vec![("theta", theta)],
        outcomes: Outcomes::Parity(outcomes),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorResult {
    pub theta_hat: f64,
    pub std_error: f64,
    pub shots: usize,
    /// `k ∈ {0, M}`, where the inversion is degenerate.
    pub boundary: bool,
}

/// `θ̂ = arccos √(k/M)` with delta-method error `1/(2√M)`.
///
/// The error is independent of `θ` because `dθ/dp = −1/(2√(p(1−p)))`
/// cancels the binomial `√(p(1−p)/M)`.
pub fn theta_from_fraction(plus: usize, shots: usize) -> Result<EstimatorResult> {
    if shots == 0 || plus > shots {
        return Err(Error::InvalidParameter("need 0 <= k <= M and M >= 1"));
    }
    let p = plus as f64 / shots as f64;
    Ok(EstimatorResult {
        theta_hat: p.sqrt().min(1.0).acos(),
        std_error: 0.5 / (shots as f64).sqrt(),
        shots,
        boundary: plus == 0 || plus == shots,
    })
}

pub fn estimate_theta(record: &ShotRecord) -> Result<EstimatorResult> {
    match &record.outcomes {
        Outcomes::Parity(v) => theta_from_fraction(v.iter().filter(|&&b| b).count(), v.len()),
        Outcomes::Homodyne(_) => Err(Error::InvalidParameter("theta estimation needs parity outcomes")),
    }
}

/// `replications` independent parity runs, run `r` seeded with
/// `derive_seed(seed, r)`.
pub fn replicate_parity(theta: f64, shots: usize, replications: usize, seed: u64) -> Result<Vec<EstimatorResult>> {
    (0..replications as u64)
        .map(|r| estimate_theta(&sample_parity_readout(theta, shots, derive_seed(seed, r))?))
        .collect()
}

/// Evaluation grid for the homodyne density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneGrid {
    pub y_min: f64,
    pub y_max: f64,
    pub step: f64,
}

impl HomodyneGrid {
    pub fn new(y_min: f64, y_max: f64, step: f64) -> Result<Self> {
        if !(y_min.is_finite() && y_max.is_finite() && step.is_finite()) || !(y_max > y_min) || !(step > 0.0) {
            return Err(Error::InvalidParameter("grid needs y_min < y_max and step > 0"));
        }
        if (y_max - y_min) / step > 1e7 {
            return Err(Error::InvalidParameter("grid has too many points"));
        }
        Ok(Self { y_min, y_max, step })
    }

    /// A grid centred on `⟨Ŷ⟩` spanning `±(12σ + 2)`, fine enough to
    /// resolve fringes at the scale of the shortest feature the number
    /// basis can produce.
    pub fn covering(state: &FockVector) -> Result<Self> {
        let y = ModeOperator::quadrature_y(state.dim());
        let mean = state.expectation(&y)?.re;
        let second = state.expectation(&y.matmul(&y)?)?.re;
        let sigma = (second - mean * mean).max(0.0).sqrt();
        let half = 12.0 * sigma.max(1.0) + 2.0;
        let feature = sigma.min(1.0) / (state.dim() as f64).sqrt();
        Self::new(mean - half, mean + half, feature / 20.0)
    }

    pub fn points(&self) -> usize {
        ((self.y_max - self.y_min) / self.step).round() as usize + 1
    }

    pub fn y(&self, i: usize) -> f64 {
        self.y_min + i as f64 * self.step
    }
}

/// `P(y)` tabulated on a grid, with its trapezoid CDF.
#[derive(Debug, Clone, PartialEq)]
pub struct HomodyneDistribution {
    pub grid: HomodyneGrid,
    pub density: Vec<f64>,
    cumulative: Vec<f64>,
    /// `∫ P(y) dy` over the grid.
    pub mass: f64,
}

impl HomodyneDistribution {
    /// Exact probability of the cell between grid points `i` and `i+1`,
    /// normalized by the grid mass.
    pub fn cell_probability(&self, i: usize) -> f64 {
        (self.cumulative[i + 1] - self.cumulative[i]) / self.mass
    }

    /// CDF at `y`, normalized by the grid mass.
    pub fn cdf(&self, y: f64) -> f64 {
        let g = &self.grid;
        if y <= g.y_min {
            return 0.0;
        }
        let cells = self.density.len() - 1;
        let x = (y - g.y_min) / g.step;
        let i = (x.floor() as usize).min(cells);
        if i >= cells {
            return 1.0;
        }
        let t = (x - i as f64) * g.step;
        let (p0, p1) = (self.density[i], self.density[i + 1]);
        (self.cumulative[i] + p0 * t + (p1 - p0) * t * t / (2.0 * g.step)) / self.mass
    }

    /// Inverse CDF of the piecewise-linear density.
    pub fn quantile(&self, u: f64) -> f64 {
        let target = u * self.mass;
        let idx = self.cumulative.partition_point(|&c| c <= target);
        let i = idx.saturating_sub(1).min(self.density.len() - 2);
        let h = self.grid.step;
        let (p0, p1) = (self.density[i], self.density[i + 1]);
        let r = (target - self.cumulative[i]).max(0.0);
        let slope = (p1 - p0) / h;
        // Solve p0 t + slope t²/2 = r on [0, h].
        let t = if slope.abs() * h <= 1e-12 * p0.max(1e-300) {
            if p0 > 0.0 {
                r / p0
            } else {
                0.5 * h
            }
        } else {
            let disc = (p0 * p0 + 2.0 * slope * r).max(0.0);
            2.0 * r / (p0 + disc.sqrt()).max(1e-300)
        };
        self.grid.y(i) + t.clamp(0.0, h)
    }

    /// One homodyne shot.
    pub fn sample(&self, seed: u64, index: u64) -> f64 {
        self.quantile(uniform(seed, index))
    }
}

/// `P(y) = |Σₙ ⟨n|ψ⟩ ⟨y|n⟩|²` in the `Ŷ` eigenbasis, where
/// `⟨y|n⟩ = (−i)ⁿ 2^(−1/4) φₙ(y/√2)`.
pub fn homodyne_distribution(state: &FockVector, grid: HomodyneGrid) -> Result<HomodyneDistribution> {
    let n = grid.points();
    if n < 2 {
        return Err(Error::InvalidParameter("grid needs at least two points"));
    }
    let phases: Vec<Complex64> = state
        .amps()
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let p = match k % 4 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, -1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, 1.0),
            };
            a * p
        })
        .collect();
    let density: Vec<f64> = (0..n)
        .map(|i| {
            let h = hermite_wavefunctions(state.dim(), grid.y(i));
            phases.iter().zip(&h).map(|(c, w)| c * *w).sum::<Complex64>().norm_sqr()
        })
        .collect();
    let mut cumulative = Vec::with_capacity(n);
    cumulative.push(0.0);
    for i in 0..n - 1 {
        let last = cumulative[i];
        cumulative.push(last + 0.5 * grid.step * (density[i] + density[i + 1]));
    }
    let mass = cumulative[n - 1];
    if (1.0 - mass).abs() > GRID_MASS_TOL {
        return Err(Error::GridTooNarrow(1.0 - mass));
    }
    Ok(HomodyneDistribution { grid, density, cumulative, mass })
}

pub fn sample_homodyne(state: &FockVector, shots: usize, seed: u64, grid: HomodyneGrid) -> Result<ShotRecord> {
    if shots == 0 {
        return Err(Error::InvalidParameter("need at least one shot"));
    }
    let dist = homodyne_distribution(state, grid)?;
    let outcomes = (0..shots as u64).map(|i| dist.sample(seed, i)).collect();
    Ok(ShotRecord {
        scheme: Scheme::Homodyne,
        shots,
        seed,
        params: alloc::vec![("y_min", grid.y_min), ("y_max", grid.y_max), ("step", grid.step)],
        outcomes: Outcomes::Homodyne(outcomes),
    })
}

/// Sample mean and unbiased sample variance.
pub fn sample_moments(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{cat, coherent, Parity};

    #[test]
    fn uniforms_are_open_and_reproducible() {
        for i in 0..1000 {
            let u = uniform(42, i);
            assert!(u > 0.0 && u < 1.0);
            assert_eq!(u, uniform(42, i));
        }
        assert_ne!(uniform(1, 0), uniform(2, 0));
        assert_ne!(uniform(1, 0), uniform(1, 1));
    }

    #[test]
    fn parity_extremes() {
        let r = sample_parity_readout(0.0, 100, 0).unwrap();
        assert_eq!(r.outcomes, Outcomes::Parity(alloc::vec![true; 100]));
        let e = estimate_theta(&r).unwrap();
        assert_eq!(e.theta_hat, 0.0);
        assert!(e.boundary);
        let r = sample_parity_readout(core::f64::consts::FRAC_PI_2, 100, 0).unwrap();
        assert_eq!(r.outcomes, Outcomes::Parity(alloc::vec![false; 100]));
        assert!(estimate_theta(&r).unwrap().boundary);
    }

    #[test]
    fn parity_frequency_within_binomial_bound() {
        let m = 10_000;
        let r = sample_parity_readout(0.3, m, 0).unwrap();
        let Outcomes::Parity(v) = &r.outcomes else { unreachable!() };
        let f = v.iter().filter(|&&b| b).count() as f64 / m as f64;
        let p = 0.3f64.cos().powi(2);
        assert!((f - p).abs() <= 3.0 * (p * (1.0 - p) / m as f64).sqrt());
    }

    #[test]
    fn inversion_identity() {
        let m = 1usize << 20;
        let p = 0.3f64.cos().powi(2);
        let k = (p * m as f64).round() as usize;
        let e = theta_from_fraction(k, m).unwrap();
        assert!((e.theta_hat - 0.3).abs() < 1e-6);
        assert_eq!(e.std_error, 0.5 / (m as f64).sqrt());
        assert!(!e.boundary);
        assert!(theta_from_fraction(3, 2).is_err());
    }

    #[test]
    fn replication_spread_matches_shot_noise() {
        let m = 10_000;
        let reps = replicate_parity(0.3, m, 200, 0).unwrap();
        let thetas: Vec<f64> = reps.iter().map(|e| e.theta_hat).collect();
        let (mean, var) = sample_moments(&thetas);
        let sd = var.sqrt();
        let target = 0.5 / (m as f64).sqrt();
        assert!((sd / target - 1.0).abs() < 0.2, "sd {sd}");
        assert!((mean - 0.3).abs() <= 2.0 * sd / (200f64).sqrt(), "bias {}", mean - 0.3);
    }

    #[test]
    fn homodyne_vacuum_density_is_gaussian() {
        let vac = FockVector::vacuum(4).unwrap();
        let grid = HomodyneGrid::new(-10.0, 10.0, 0.01).unwrap();
        let d = homodyne_distribution(&vac, grid).unwrap();
        for i in (0..grid.points()).step_by(97) {
            let y = grid.y(i);
            let want = (-y * y / 2.0).exp() / (2.0 * core::f64::consts::PI).sqrt();
            assert!((d.density[i] - want).abs() < 1e-12);
        }
        assert!((d.cdf(0.0) - 0.5).abs() < 1e-9);
        assert!((d.quantile(0.5)).abs() < 1e-6);
    }

    #[test]
    fn homodyne_density_carries_displacement_sign() {
        // |iε⟩ has ⟨Ŷ⟩ = 2ε, so the density must peak at +2ε.
        let s = coherent(Complex64::new(0.0, 0.5), 16).unwrap();
        let grid = HomodyneGrid::covering(&s).unwrap();
        let d = homodyne_distribution(&s, grid).unwrap();
        let mean: f64 = (0..grid.points()).map(|i| grid.y(i) * d.density[i] * grid.step).sum();
        assert!((mean - 1.0).abs() < 1e-6);
    }

    #[test]
    fn narrow_grid_is_rejected() {
        let vac = FockVector::vacuum(4).unwrap();
        let grid = HomodyneGrid::new(-2.0, 2.0, 0.01).unwrap();
        assert!(matches!(homodyne_distribution(&vac, grid), Err(Error::GridTooNarrow(_))));
    }

    #[test]
    fn quantile_inverts_cdf() {
        let s = cat(Complex64::new(2.0, 0.0), Parity::Even, 26).unwrap();
        let d = homodyne_distribution(&s, HomodyneGrid::covering(&s).unwrap()).unwrap();
        for k in 1..100 {
            let u = k as f64 / 100.0;
            assert!((d.cdf(d.quantile(u)) - u).abs() < 1e-9, "u={u}");
        }
    }

    #[test]
    fn homodyne_moments_converge() {
        let vac = FockVector::vacuum(4).unwrap();
        let grid = HomodyneGrid::covering(&vac).unwrap();
        let r = sample_homodyne(&vac, 100_000, 0, grid).unwrap();
        let Outcomes::Homodyne(v) = &r.outcomes else { unreachable!() };
        let (mean, var) = sample_moments(v);
        assert!(mean.abs() < 3.0 / (1e5f64).sqrt());
        assert!((var - 1.0).abs() < 0.03);
    }
}
