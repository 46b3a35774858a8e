//! Classical-transport reference for quantum expectation values: sample
//! phase points from a Gaussian Wigner density, propagate each sample with
//! Störmer–Verlet, and average observables. Transporting samples along the
//! classical flow approximates the evolved expectations to O(hbar^2), and the
//! Monte Carlo error scales as 1/sqrt(N).
//!
//! Sampling is counter-based: sample `i` draws from an independent stream
//! keyed by `(seed, i)`, so ensembles regenerate bit-identically regardless
//! of traversal order.

use crate::dynamics::{PhasePoint, SimParams};
use crate::error::{CoreError, Result};
use crate::fmath;
use crate::geometry::SymElement;
use crate::integrators::{verlet_step, StepperConfig};
use crate::potentials::Potential;
use crate::rng::CounterRng;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

/// A Gaussian Wigner density with mean `z`, dimensionless symplectic
/// covariance parameter `Sigma` (positive definite), and `hbar > 0`. The
/// statistical covariance of the density is `(hbar/2) Sigma`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState {
    z: PhasePoint,
    sigma: SymElement,
    hbar: f64,
}

impl GaussianState {
    pub fn new(z: PhasePoint, sigma: SymElement, hbar: f64) -> Result<Self> {
        if sigma.dim() != 2 * z.dim() {
            return Err(CoreError::DimensionMismatch {
                expected: 2 * z.dim(),
                got: sigma.dim(),
            });
        }
        let min_eig = crate::linalg::min_eig_sym(sigma.matrix());
        if min_eig <= 0.0 {
            return Err(CoreError::NotPositiveDefinite {
                context: "GaussianState Sigma",
                min_eig,
            });
        }
        if !(hbar > 0.0) {
            return Err(CoreError::NotPositiveDefinite {
                context: "GaussianState hbar",
                min_eig: hbar,
            });
        }
        Ok(Self { z, sigma, hbar })
    }

    /// The pure state with covariance `sigma(C)` for a width matrix `C`.
    pub fn from_siegel(z: PhasePoint, c: &crate::geometry::SiegelPoint, hbar: f64) -> Result<Self> {
        let sigma = crate::geometry::sigma(c)?;
        Self::new(z, sigma, hbar)
    }

    pub fn mean(&self) -> &PhasePoint {
        &self.z
    }

    pub fn sigma(&self) -> &SymElement {
        &self.sigma
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn dim(&self) -> usize {
        self.z.dim()
    }

    /// `(hbar/2) Sigma`, the covariance in the statistical sense.
    pub fn statistical_covariance(&self) -> DMatrix<f64> {
        self.sigma.matrix() * (0.5 * self.hbar)
    }
}

/// `N` equally weighted phase-space samples with their generating seed.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    samples: Vec<PhasePoint>,
    seed: u64,
}

impl Ensemble {
    /// Wrap explicit samples (weights are uniform `1/N`).
    pub fn from_samples(samples: Vec<PhasePoint>, seed: u64) -> Result<Self> {
        if samples.is_empty() {
            return Err(CoreError::EmptyEnsemble);
        }
        let d = samples[0].dim();
        for s in &samples {
            if s.dim() != d {
                return Err(CoreError::DimensionMismatch {
                    expected: d,
                    got: s.dim(),
                });
            }
        }
        Ok(Self { samples, seed })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[PhasePoint] {
        &self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.samples[0].dim()
    }

    /// Sample mean of `zeta`.
    pub fn mean_z(&self) -> Result<PhasePoint> {
        if self.samples.is_empty() {
            return Err(CoreError::EmptyEnsemble);
        }
        let n2 = 2 * self.dim();
        let mut acc = DVector::zeros(n2);
        for s in &self.samples {
            acc += s.to_vector();
        }
        PhasePoint::from_vector(&(acc / self.samples.len() as f64))
    }

    /// Sample mean of `zeta zeta^T` (uncentered second moment).
    pub fn second_moment(&self) -> Result<DMatrix<f64>> {
        if self.samples.is_empty() {
            return Err(CoreError::EmptyEnsemble);
        }
        let n2 = 2 * self.dim();
        let mut acc = DMatrix::zeros(n2, n2);
        for s in &self.samples {
            let zeta = s.to_vector();
            acc += &zeta * zeta.transpose();
        }
        Ok(acc / self.samples.len() as f64)
    }
}

/// Evaluate the Gaussian Wigner density
/// `W(zeta) = exp[-(zeta - z)^T Sigma^-1 (zeta - z) / hbar] / ((pi hbar)^d sqrt(det Sigma))`.
pub fn wigner_density(state: &GaussianState, zeta: &PhasePoint) -> f64 {
    let chol = state
        .sigma
        .matrix()
        .clone()
        .cholesky()
        .expect("Sigma is positive definite by construction");
    let diff = zeta.to_vector() - state.z.to_vector();
    let quad = diff.dot(&chol.solve(&diff));
    let det = chol.determinant();
    let norm = fmath::powi(core::f64::consts::PI * state.hbar, state.dim() as u32)
        * fmath::sqrt(det);
    fmath::exp(-quad / state.hbar) / norm
}

/// Draw `n` samples `zeta_i = z + L g_i` with `L L^T = (hbar/2) Sigma` and
/// `g_i` standard normal from the stream keyed by `(seed, i)`.
pub fn sample(state: &GaussianState, n: usize, seed: u64) -> Result<Ensemble> {
    if n == 0 {
        return Err(CoreError::EmptyEnsemble);
    }
    let cov = state.statistical_covariance();
    let chol = cov.clone().cholesky().ok_or(CoreError::NotPositiveDefinite {
        context: "sample: (hbar/2) Sigma factorization",
        min_eig: crate::linalg::min_eig_sym(&cov),
    })?;
    let l = chol.l();
    let d = state.dim();
    let mean = state.z.to_vector();
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let mut stream = CounterRng::keyed(seed, i as u64);
        let mut g = DVector::zeros(2 * d);
        for k in 0..d {
            let (a, b) = stream.next_normal_pair();
            g[2 * k] = a;
            g[2 * k + 1] = b;
        }
        let zeta = &mean + &l * g;
        samples.push(PhasePoint::from_vector(&zeta)?);
    }
    Ok(Ensemble { samples, seed })
}

/// Advance every sample independently with Störmer–Verlet, invoking
/// `on_record(t, ensemble)` at `t = 0` and after every `record_stride`-th
/// step. Samples never interact.
pub fn propagate_ensemble_with(
    e: &Ensemble,
    params: &SimParams,
    pot: &dyn Potential,
    cfg: &StepperConfig,
    mut on_record: impl FnMut(f64, &Ensemble),
) {
    let mut current = e.clone();
    on_record(0.0, &current);
    let n_steps = cfg.n_steps();
    for step in 1..=n_steps {
        for s in current.samples.iter_mut() {
            *s = verlet_step(s, cfg.dt, params, pot);
        }
        if step % cfg.record_stride == 0 {
            on_record(step as f64 * cfg.dt, &current);
        }
    }
}

/// As [`propagate_ensemble_with`], collecting the recorded snapshots.
pub fn propagate_ensemble(
    e: &Ensemble,
    params: &SimParams,
    pot: &dyn Potential,
    cfg: &StepperConfig,
) -> Vec<(f64, Ensemble)> {
    let mut out = Vec::new();
    propagate_ensemble_with(e, params, pot, cfg, |t, ens| out.push((t, ens.clone())));
    out
}

/// Sample mean and standard error (`sample std / sqrt(N)`) of an observable.
/// The accumulation order is fixed, so results are deterministic.
pub fn expect(e: &Ensemble, obs: impl Fn(&PhasePoint) -> f64) -> Result<(f64, f64)> {
    if e.samples.is_empty() {
        return Err(CoreError::EmptyEnsemble);
    }
    let n = e.samples.len();
    let mut sum = 0.0;
    for s in &e.samples {
        sum += obs(s);
    }
    let mean = sum / n as f64;
    if n == 1 {
        return Ok((mean, 0.0));
    }
    let mut ss = 0.0;
    for s in &e.samples {
        let d = obs(s) - mean;
        ss += d * d;
    }
    let std_err = fmath::sqrt(ss / ((n - 1) as f64 * n as f64));
    Ok((mean, std_err))
}
