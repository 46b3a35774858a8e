//! Potential-energy surfaces.
//!
//! Besides value, gradient, and Hessian, each potential exposes
//! `hessian_contract_grad(M, q) = grad_q tr(M D2V(q))`, the only
//! third-derivative object the corrected forces need; the full rank-3 tensor
//! is never formed.

use crate::error::{CoreError, Result};
use crate::fmath;
use crate::linalg::symmetrize;
use alloc::vec;
use nalgebra::{DMatrix, DVector};

/// Base step for finite-difference gradients of wrapped potentials.
pub const FD_STEP_GRAD: f64 = 1e-5;
/// Base step for Hessian-level finite differences; second differences amplify
/// roundoff, so the step is larger.
pub const FD_STEP_HESS: f64 = 1e-4;
/// Base step for the third-difference contraction; one more derivative level
/// of roundoff amplification needs one more step decade.
pub const FD_STEP_THIRD: f64 = 2e-3;

/// A smooth potential on `R^d`. Implementations are immutable and reentrant.
pub trait Potential: Send + Sync {
    fn dim(&self) -> usize;

    /// `V(q)`.
    fn value(&self, q: &DVector<f64>) -> f64;

    /// `grad V(q)`.
    fn gradient(&self, q: &DVector<f64>) -> DVector<f64>;

    /// `D2V(q)`, symmetric.
    fn hessian(&self, q: &DVector<f64>) -> DMatrix<f64>;

    /// `grad_q tr(M D2V(q))` for symmetric `M`.
    fn hessian_contract_grad(&self, m: &DMatrix<f64>, q: &DVector<f64>) -> DVector<f64>;
}

/// The torsional potential `V(q) = 2 - cos q1 - cos q2` on `R^2`,
/// 2π-periodic in each coordinate.
#[derive(Clone, Copy, Debug, Default)]
pub struct Torsional;

impl Potential for Torsional {
    fn dim(&self) -> usize {
        2
    }

    fn value(&self, q: &DVector<f64>) -> f64 {
        assert_eq!(q.len(), 2, "torsional potential is two-dimensional");
        2.0 - fmath::cos(q[0]) - fmath::cos(q[1])
    }

    fn gradient(&self, q: &DVector<f64>) -> DVector<f64> {
        assert_eq!(q.len(), 2, "torsional potential is two-dimensional");
        DVector::from_vec(vec![fmath::sin(q[0]), fmath::sin(q[1])])
    }

    fn hessian(&self, q: &DVector<f64>) -> DMatrix<f64> {
        assert_eq!(q.len(), 2, "torsional potential is two-dimensional");
        DMatrix::from_diagonal(&DVector::from_vec(vec![fmath::cos(q[0]), fmath::cos(q[1])]))
    }

    fn hessian_contract_grad(&self, m: &DMatrix<f64>, q: &DVector<f64>) -> DVector<f64> {
        assert_eq!(q.len(), 2, "torsional potential is two-dimensional");
        assert_eq!(m.nrows(), 2, "weight matrix must be 2x2");
        DVector::from_vec(vec![
            -m[(0, 0)] * fmath::sin(q[0]),
            -m[(1, 1)] * fmath::sin(q[1]),
        ])
    }
}

/// Isotropic harmonic potential `V(q) = omega^2 |q|^2 / 2`.
#[derive(Clone, Copy, Debug)]
pub struct Harmonic {
    omega: f64,
    dim: usize,
}

impl Harmonic {
    pub fn new(omega: f64, dim: usize) -> Self {
        Self { omega, dim }
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

impl Potential for Harmonic {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, q: &DVector<f64>) -> f64 {
        assert_eq!(q.len(), self.dim);
        0.5 * self.omega * self.omega * q.norm_squared()
    }

    fn gradient(&self, q: &DVector<f64>) -> DVector<f64> {
        assert_eq!(q.len(), self.dim);
        q * (self.omega * self.omega)
    }

    fn hessian(&self, q: &DVector<f64>) -> DMatrix<f64> {
        assert_eq!(q.len(), self.dim);
        DMatrix::identity(self.dim, self.dim) * (self.omega * self.omega)
    }

    fn hessian_contract_grad(&self, _m: &DMatrix<f64>, q: &DVector<f64>) -> DVector<f64> {
        DVector::zeros(q.len())
    }
}

/// Quadratic potential `V(q) = q^T K q / 2 + c . q` with symmetric `K`.
#[derive(Clone, Debug)]
pub struct Quadratic {
    k: DMatrix<f64>,
    c: DVector<f64>,
}

impl Quadratic {
    pub fn new(k: DMatrix<f64>, c: DVector<f64>) -> Result<Self> {
        if k.nrows() != k.ncols() || k.nrows() != c.len() {
            return Err(CoreError::DimensionMismatch {
                expected: k.nrows(),
                got: c.len(),
            });
        }
        Ok(Self {
            k: symmetrize(&k),
            c,
        })
    }
}

impl Potential for Quadratic {
    fn dim(&self) -> usize {
        self.c.len()
    }

    fn value(&self, q: &DVector<f64>) -> f64 {
        assert_eq!(q.len(), self.dim());
        0.5 * (q.transpose() * &self.k * q)[(0, 0)] + self.c.dot(q)
    }

    fn gradient(&self, q: &DVector<f64>) -> DVector<f64> {
        assert_eq!(q.len(), self.dim());
        &self.k * q + &self.c
    }

    fn hessian(&self, q: &DVector<f64>) -> DMatrix<f64> {
        assert_eq!(q.len(), self.dim());
        self.k.clone()
    }

    fn hessian_contract_grad(&self, _m: &DMatrix<f64>, q: &DVector<f64>) -> DVector<f64> {
        DVector::zeros(q.len())
    }
}

/// Wraps a plain value function into a full [`Potential`] using central
/// finite differences. Satisfies the derivative-consistency contracts at a
/// relaxed 1e-4 tolerance.
pub struct FdPotential<F: Fn(&DVector<f64>) -> f64 + Send + Sync> {
    f: F,
    dim: usize,
}

impl<F: Fn(&DVector<f64>) -> f64 + Send + Sync> FdPotential<F> {
    pub fn new(f: F, dim: usize) -> Self {
        Self { f, dim }
    }

    fn step(base: f64, x: f64) -> f64 {
        base * fmath::abs(x).max(1.0)
    }
}

impl<F: Fn(&DVector<f64>) -> f64 + Send + Sync> Potential for FdPotential<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, q: &DVector<f64>) -> f64 {
        assert_eq!(q.len(), self.dim);
        (self.f)(q)
    }

    fn gradient(&self, q: &DVector<f64>) -> DVector<f64> {
        assert_eq!(q.len(), self.dim);
        let mut g = DVector::zeros(self.dim);
        let mut x = q.clone();
        for i in 0..self.dim {
            let h = Self::step(FD_STEP_GRAD, q[i]);
            x[i] = q[i] + h;
            let fp = (self.f)(&x);
            x[i] = q[i] - h;
            let fm = (self.f)(&x);
            x[i] = q[i];
            g[i] = (fp - fm) / (2.0 * h);
        }
        g
    }

    fn hessian(&self, q: &DVector<f64>) -> DMatrix<f64> {
        assert_eq!(q.len(), self.dim);
        let steps: alloc::vec::Vec<f64> = q.iter().map(|&x| Self::step(FD_STEP_HESS, x)).collect();
        self.hessian_with_steps(q, &steps)
    }

    fn hessian_contract_grad(&self, m: &DMatrix<f64>, q: &DVector<f64>) -> DVector<f64> {
        assert_eq!(q.len(), self.dim);
        // Inner Hessian steps are anchored at q so that the contracted trace
        // is a smooth function of the outer perturbation.
        let steps: alloc::vec::Vec<f64> = q.iter().map(|&x| Self::step(FD_STEP_HESS, x)).collect();
        let trace_m_hess = |x: &DVector<f64>| (m * self.hessian_with_steps(x, &steps)).trace();
        let mut g = DVector::zeros(self.dim);
        let mut x = q.clone();
        for i in 0..self.dim {
            let h = Self::step(FD_STEP_THIRD, q[i]);
            x[i] = q[i] + h;
            let fp = trace_m_hess(&x);
            x[i] = q[i] - h;
            let fm = trace_m_hess(&x);
            x[i] = q[i];
            g[i] = (fp - fm) / (2.0 * h);
        }
        g
    }
}

impl<F: Fn(&DVector<f64>) -> f64 + Send + Sync> FdPotential<F> {
    fn hessian_with_steps(&self, q: &DVector<f64>, steps: &[f64]) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(self.dim, self.dim);
        let mut x = q.clone();
        for i in 0..self.dim {
            for j in i..self.dim {
                let hi = steps[i];
                let hj = steps[j];
                if i == j {
                    let f0 = (self.f)(q);
                    x[i] = q[i] + hi;
                    let fp = (self.f)(&x);
                    x[i] = q[i] - hi;
                    let fm = (self.f)(&x);
                    x[i] = q[i];
                    h[(i, i)] = (fp - 2.0 * f0 + fm) / (hi * hi);
                } else {
                    x[i] = q[i] + hi;
                    x[j] = q[j] + hj;
                    let fpp = (self.f)(&x);
                    x[j] = q[j] - hj;
                    let fpm = (self.f)(&x);
                    x[i] = q[i] - hi;
                    x[j] = q[j] + hj;
                    let fmp = (self.f)(&x);
                    x[j] = q[j] - hj;
                    let fmm = (self.f)(&x);
                    x[i] = q[i];
                    x[j] = q[j];
                    let v = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
                    h[(i, j)] = v;
                    h[(j, i)] = v;
                }
            }
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use core::f64::consts::{FRAC_PI_2, PI};

    fn v2(a: f64, b: f64) -> DVector<f64> {
        DVector::from_vec(vec![a, b])
    }

    #[test]
    fn torsional_at_origin() {
        let pot = Torsional;
        let q = v2(0.0, 0.0);
        assert_eq!(pot.value(&q), 0.0);
        assert!(pot.gradient(&q).norm() < 1e-15);
        assert!(max_abs(&(pot.hessian(&q) - DMatrix::identity(2, 2))) < 1e-15);
    }

    #[test]
    fn torsional_contract_grad_frozen_case() {
        let pot = Torsional;
        let q = v2(FRAC_PI_2, 0.0);
        let g = pot.hessian_contract_grad(&DMatrix::identity(2, 2), &q);
        assert!((g[0] + 1.0).abs() < 1e-15);
        assert!(g[1].abs() < 1e-15);
    }

    #[test]
    fn torsional_is_periodic() {
        let pot = Torsional;
        let q = v2(0.3, -1.2);
        let shifted = v2(0.3 + 2.0 * PI, -1.2);
        assert!((pot.value(&q) - pot.value(&shifted)).abs() < 1e-12);
        let shifted = v2(0.3, -1.2 + 2.0 * PI);
        assert!((pot.value(&q) - pot.value(&shifted)).abs() < 1e-12);
    }

    #[test]
    fn quadratic_has_constant_hessian_and_zero_contract_grad() {
        let k = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]);
        let c = v2(0.1, -0.2);
        let pot = Quadratic::new(k.clone(), c.clone()).unwrap();
        let q = v2(0.7, -0.4);
        assert!(max_abs(&(pot.hessian(&q) - &k)) < 1e-15);
        assert!(
            pot.hessian_contract_grad(&DMatrix::identity(2, 2), &q)
                .norm()
                < 1e-15
        );
        assert!((pot.gradient(&q) - (&k * &q + &c)).norm() < 1e-15);
    }

    #[test]
    fn harmonic_ground_values() {
        let pot = Harmonic::new(1.0, 1);
        let q = DVector::from_vec(vec![1.0]);
        assert!((pot.value(&q) - 0.5).abs() < 1e-15);
    }

    /// Consistency chain value -> gradient -> hessian -> contract-grad by
    /// central differences for every shipped potential.
    #[test]
    fn derivative_consistency_chain() {
        let quad = Quadratic::new(
            DMatrix::from_row_slice(2, 2, &[2.0, 0.4, 0.4, 1.5]),
            v2(0.2, -0.1),
        )
        .unwrap();
        let harm = Harmonic::new(1.3, 2);
        let pots: [&dyn Potential; 3] = [&Torsional, &harm, &quad];
        let q = v2(0.37, -0.81);
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 0.7]);
        for pot in pots {
            let d = pot.dim();
            let mut x = q.clone();
            // gradient vs value
            for i in 0..d {
                let h = 1e-6 * q[i].abs().max(1.0);
                x[i] = q[i] + h;
                let fp = pot.value(&x);
                x[i] = q[i] - h;
                let fm = pot.value(&x);
                x[i] = q[i];
                assert!(((fp - fm) / (2.0 * h) - pot.gradient(&q)[i]).abs() < 1e-6);
            }
            // hessian vs gradient
            for i in 0..d {
                let h = 1e-6 * q[i].abs().max(1.0);
                x[i] = q[i] + h;
                let gp = pot.gradient(&x);
                x[i] = q[i] - h;
                let gm = pot.gradient(&x);
                x[i] = q[i];
                for j in 0..d {
                    assert!(((gp[j] - gm[j]) / (2.0 * h) - pot.hessian(&q)[(j, i)]).abs() < 1e-6);
                }
            }
            // contract-grad vs hessian
            for i in 0..d {
                let h = 1e-5 * q[i].abs().max(1.0);
                x[i] = q[i] + h;
                let tp = (&m * pot.hessian(&x)).trace();
                x[i] = q[i] - h;
                let tm = (&m * pot.hessian(&x)).trace();
                x[i] = q[i];
                assert!(
                    ((tp - tm) / (2.0 * h) - pot.hessian_contract_grad(&m, &q)[i]).abs() < 1e-5
                );
            }
        }
    }

    #[test]
    fn fd_fallback_matches_torsional_derivatives() {
        let pot = FdPotential::new(|q: &DVector<f64>| 2.0 - q[0].cos() - q[1].cos(), 2);
        let exact = Torsional;
        let q = v2(0.9, -0.3);
        assert!((pot.gradient(&q) - exact.gradient(&q)).norm() < 1e-6);
        assert!(max_abs(&(pot.hessian(&q) - exact.hessian(&q))) < 1e-5);
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 2.0]);
        assert!(
            (pot.hessian_contract_grad(&m, &q) - exact.hessian_contract_grad(&m, &q)).norm()
                < 1e-4
        );
    }

    #[test]
    fn fd_fallback_recovers_quadratic_hessian() {
        let k = DMatrix::from_row_slice(2, 2, &[2.0, 0.7, 0.7, 1.2]);
        let kc = k.clone();
        let pot = FdPotential::new(
            move |q: &DVector<f64>| 0.5 * (q.transpose() * &kc * q)[(0, 0)],
            2,
        );
        let q = v2(0.4, 0.6);
        assert!(max_abs(&(pot.hessian(&q) - &k)) < 1e-5);
        let m = DMatrix::identity(2, 2);
        assert!(pot.hessian_contract_grad(&m, &q).norm() < 1e-4);
    }
}
