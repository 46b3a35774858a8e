//! Structure-preserving time steppers.
//!
//! * [`verlet_step`] — Störmer–Verlet kick–drift–kick for the classical flow;
//!   symmetric, reversible, symplectic.
//! * [`splitting_step`] — Strang composition of the two *exact* subflows of
//!   the corrected wave-packet system: an affine potential kick (`q`, `B`
//!   frozen) and a kinetic drift whose width part is the closed-form matrix
//!   Riccati flow `C -> C (I + (dt/m) C)^-1`. Both factors act on widths as
//!   Möbius transformations, so the step is symplectic and second order.
//! * [`moment_splitting_step`] — the congruence image of the same splitting
//!   on `(z, Sigma)`; the factors are exactly the Möbius factors above, so
//!   `Sigma_n = sigma(C_n)` holds step for step and `Sigma J Sigma = J` is
//!   preserved to roundoff.
//! * [`cayley_step`] — midpoint Cayley propagator for the linearized frame
//!   flow `dS = J D2H_cl S`; the Cayley transform of a Hamiltonian matrix is
//!   exactly symplectic at any finite step.
//! * [`rk4_step`] — classical Runge–Kutta, kept as a non-structure-preserving
//!   cross-check only.

use crate::error::{CoreError, Result};
use crate::dynamics::{d2_h_classical, v_hbar_gradient, PhasePoint, SimParams};
use crate::geometry::{SiegelPoint, SymElement, SymplecticMatrix};
use crate::linalg::{block2x2, complex_right_divide, standard_j, symmetrize};
use crate::potentials::Potential;
use nalgebra::{DMatrix, DVector};

/// Time grid: step size, final time, and the recording stride.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepperConfig {
    pub dt: f64,
    pub t_final: f64,
    pub record_stride: usize,
}

impl StepperConfig {
    pub fn new(dt: f64, t_final: f64, record_stride: usize) -> Result<Self> {
        if !(dt > 0.0) || !(t_final >= 0.0) {
            return Err(CoreError::NotPositiveDefinite {
                context: "StepperConfig dt/t_final",
                min_eig: dt.min(t_final),
            });
        }
        if record_stride == 0 {
            return Err(CoreError::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        Ok(Self {
            dt,
            t_final,
            record_stride,
        })
    }

    /// Number of steps, rounding `t_final / dt` to the nearest integer.
    pub fn n_steps(&self) -> usize {
        libm::round(self.t_final / self.dt) as usize
    }
}

/// One Störmer–Verlet step (kick–drift–kick) of the classical system.
pub fn verlet_step(
    z: &PhasePoint,
    dt: f64,
    params: &SimParams,
    pot: &dyn Potential,
) -> PhasePoint {
    let p_half = &z.p - pot.gradient(&z.q) * (0.5 * dt);
    let q_new = &z.q + &p_half * (dt / params.mass);
    let p_new = p_half - pot.gradient(&q_new) * (0.5 * dt);
    PhasePoint { q: q_new, p: p_new }
}

/// Width part of the kinetic drift: the exact Riccati flow
/// `C -> C (I + (tau/m) C)^-1` on real/imaginary blocks. The denominator has
/// definite imaginary part for tau != 0, so it is singular only on tolerance
/// breach.
fn riccati_drift(c: &SiegelPoint, tau_over_m: f64) -> Result<SiegelPoint> {
    let d = c.dim();
    let dr = DMatrix::identity(d, d) + c.a() * tau_over_m;
    let di = c.b() * tau_over_m;
    let (ar, ai) = complex_right_divide(c.a(), c.b(), &dr, &di).ok_or(CoreError::StepTooLarge {
        context: "width Riccati drift",
    })?;
    SiegelPoint::new(ar, ai).map_err(|_| CoreError::StepTooLarge {
        context: "width Riccati drift",
    })
}

/// One Strang step of the corrected wave-packet system.
pub fn splitting_step(
    z: &PhasePoint,
    c: &SiegelPoint,
    dt: f64,
    params: &SimParams,
    pot: &dyn Potential,
) -> Result<(PhasePoint, SiegelPoint)> {
    let half = 0.5 * dt;

    // Half potential kick at (q0, B0): affine in (p, A), exact.
    let w = c.b_inverse();
    let p1 = &z.p - v_hbar_gradient(&z.q, &w, params, pot) * half;
    let a1 = c.a() - pot.hessian(&z.q) * half;
    let c1 = SiegelPoint::new(a1, c.b().clone())?;

    // Full kinetic drift: free flight for q, Riccati flow for C.
    let q1 = &z.q + &p1 * (dt / params.mass);
    let c2 = riccati_drift(&c1, dt / params.mass)?;

    // Half potential kick at the updated (q1, B2).
    let w2 = c2.b_inverse();
    let p2 = p1 - v_hbar_gradient(&q1, &w2, params, pot) * half;
    let a2 = c2.a() - pot.hessian(&q1) * half;
    let c3 = SiegelPoint::new(a2, c2.b().clone())?;

    Ok((PhasePoint { q: q1, p: p2 }, c3))
}

/// Potential congruence factor `S_V(tau) = [[I, 0], [-tau K, I]]`.
fn potential_factor(k: &DMatrix<f64>, tau: f64) -> DMatrix<f64> {
    let d = k.nrows();
    block2x2(
        &DMatrix::identity(d, d),
        &DMatrix::zeros(d, d),
        &(k * (-tau)),
        &DMatrix::identity(d, d),
    )
}

/// Kinetic congruence factor `S_T(tau) = [[I, (tau/m) I], [0, I]]`.
fn kinetic_factor(d: usize, tau_over_m: f64) -> DMatrix<f64> {
    block2x2(
        &DMatrix::identity(d, d),
        &(DMatrix::identity(d, d) * tau_over_m),
        &DMatrix::zeros(d, d),
        &DMatrix::identity(d, d),
    )
}

fn congruence(s: &DMatrix<f64>, sigma: &DMatrix<f64>) -> DMatrix<f64> {
    symmetrize(&(s * sigma * s.transpose()))
}

/// One Strang step of the covariance-moment system; the congruence factors
/// are the Möbius factors of [`splitting_step`], so starting from
/// `Sigma = sigma(C)` the two trajectories agree step for step.
pub fn moment_splitting_step(
    z: &PhasePoint,
    sigma: &SymElement,
    dt: f64,
    params: &SimParams,
    pot: &dyn Potential,
) -> Result<(PhasePoint, SymElement)> {
    let half = 0.5 * dt;
    let d = z.dim();

    // Half kick: the force weight Sigma11 equals B^-1, and S_V leaves
    // Sigma11 unchanged.
    let s11 = sigma.block(1, 1);
    let p1 = &z.p - v_hbar_gradient(&z.q, &s11, params, pot) * half;
    let sv = potential_factor(&pot.hessian(&z.q), half);
    let sig1 = congruence(&sv, sigma.matrix());

    // Full drift.
    let q1 = &z.q + &p1 * (dt / params.mass);
    let st = kinetic_factor(d, dt / params.mass);
    let sig2 = congruence(&st, &sig1);

    // Half kick at the drifted position with the updated width weight.
    let s11 = sig2.view((0, 0), (d, d)).into_owned();
    let p2 = p1 - v_hbar_gradient(&q1, &s11, params, pot) * half;
    let sv = potential_factor(&pot.hessian(&q1), half);
    let sig3 = congruence(&sv, &sig2);

    Ok((PhasePoint { q: q1, p: p2 }, SymElement::new(sig3)))
}

/// One Cayley midpoint step of the frame flow:
/// `S' = cay(dt J D2H_cl(z_mid)) S` with `cay(X) = (I - X/2)^-1 (I + X/2)`.
pub fn cayley_step(
    s: &SymplecticMatrix,
    z_mid: &PhasePoint,
    dt: f64,
    params: &SimParams,
    pot: &dyn Potential,
) -> Result<SymplecticMatrix> {
    let n = 2 * s.dim();
    let x = standard_j(s.dim()) * d2_h_classical(&z_mid.q, params, pot) * dt;
    let lhs = DMatrix::identity(n, n) - &x * 0.5;
    let rhs = (DMatrix::identity(n, n) + &x * 0.5) * s.matrix();
    let s_new = lhs.lu().solve(&rhs).ok_or(CoreError::StepTooLarge {
        context: "Cayley frame step",
    })?;
    SymplecticMatrix::new(s_new)
}

/// One classical fourth-order Runge–Kutta step on a flat state vector.
/// Reference integrator for cross-validation; not structure preserving.
pub fn rk4_step(
    rhs: impl Fn(&DVector<f64>) -> DVector<f64>,
    y: &DVector<f64>,
    dt: f64,
) -> DVector<f64> {
    let k1 = rhs(y);
    let k2 = rhs(&(y + &k1 * (0.5 * dt)));
    let k3 = rhs(&(y + &k2 * (0.5 * dt)));
    let k4 = rhs(&(y + &k3 * dt));
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
}
