//! Poisson-bracket evaluators and moment maps.
//!
//! Five bracket structures are evaluated here, by central finite differences
//! on scalar fields or in closed form when the caller supplies gradients:
//!
//! * the canonical bracket on `R^2d`;
//! * the width-space bracket on `H_d` in the chart `(A, W = B^-1)`:
//!   `{F, G} = -(dF/dW_jk dG/dA_jk - dG/dW_jk dF/dA_jk)`, all indices summed;
//! * the wave-packet bracket `{F, G}_R2d - (4/hbar) {F, G}_Hd`;
//! * the (±)-Lie–Poisson bracket `± tr(Sigma [dF/dSigma, dG/dSigma]_sym)` and
//!   the moment bracket `{F, G}_R2d - (4/hbar) tr(Sigma [...])`;
//! * the (−)-Lie–Poisson bracket of the semidirect-product algebra on
//!   `jac* = {(Pi, lambda, alpha)}`.
//!
//! Derivatives with respect to symmetric-matrix coordinates follow the
//! full-index summation convention: entries `(j, k)` and `(k, j)` are
//! perturbed together and the paired derivative is halved off the diagonal,
//! so the returned gradient `G` satisfies `df = tr(G dM)`.
//!
//! The module also hosts the second-moment map into `jac*` (closed form on
//! Gaussian states, sample means on ensembles), the untangling map that
//! centers the second moment, the isomorphism `iota` onto `(alpha, z, mu)`
//! coordinates, and the affine action of `(S, zshift)` on Gaussian states.
//! On any Gaussian state, `iota(untangle(moment_map(state)))` equals
//! `(1, z, (hbar/4) Sigma)` in closed form.

use crate::dynamics::PhasePoint;
use crate::egorov::{Ensemble, GaussianState};
use crate::error::{CoreError, Result};
use crate::fmath;
use crate::geometry::{
    bracket_sym, tilde, Sign, SiegelPoint, SymElement, SymplecticMatrix,
};
use crate::linalg::{standard_j, SpdFactor};
use nalgebra::{DMatrix, DVector};

/// Base finite-difference step; the per-coordinate step is
/// `FD_STEP * max(1, |x|)`.
pub const FD_STEP: f64 = 1e-5;

#[inline]
fn scaled(base: f64, x: f64) -> f64 {
    base * fmath::abs(x).max(1.0)
}

/// Central-difference gradient of a field on a vector space.
pub fn fd_grad_vec(f: impl Fn(&DVector<f64>) -> f64, x: &DVector<f64>, step: f64) -> DVector<f64> {
    let mut g = DVector::zeros(x.len());
    let mut y = x.clone();
    for i in 0..x.len() {
        let h = scaled(step, x[i]);
        y[i] = x[i] + h;
        let fp = f(&y);
        y[i] = x[i] - h;
        let fm = f(&y);
        y[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

/// Central-difference gradient of a field on symmetric matrices, in the
/// full-index convention: the result `G` is symmetric and `df = tr(G dM)`.
pub fn fd_grad_sym(
    f: impl Fn(&DMatrix<f64>) -> f64,
    m: &DMatrix<f64>,
    step: f64,
) -> DMatrix<f64> {
    let n = m.nrows();
    let mut g = DMatrix::zeros(n, n);
    let mut y = m.clone();
    for j in 0..n {
        for k in j..n {
            let h = scaled(step, m[(j, k)]);
            y[(j, k)] = m[(j, k)] + h;
            y[(k, j)] = m[(k, j)] + h;
            let fp = f(&y);
            y[(j, k)] = m[(j, k)] - h;
            y[(k, j)] = m[(k, j)] - h;
            let fm = f(&y);
            y[(j, k)] = m[(j, k)];
            y[(k, j)] = m[(k, j)];
            let deriv = (fp - fm) / (2.0 * h);
            if j == k {
                g[(j, j)] = deriv;
            } else {
                // Paired perturbation picks up both index orders.
                g[(j, k)] = 0.5 * deriv;
                g[(k, j)] = 0.5 * deriv;
            }
        }
    }
    g
}

/// Gradients of a width-space field in the chart `(A, W = B^-1)`:
/// returns `(dF/dA, dF/dW)`.
pub fn hd_gradients(
    f: impl Fn(&SiegelPoint) -> f64,
    c: &SiegelPoint,
    step: f64,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let w = c.b_inverse();
    let grad_a = fd_grad_sym(
        |a| {
            f(&SiegelPoint::new(a.clone(), c.b().clone())
                .expect("B untouched by A perturbation"))
        },
        c.a(),
        step,
    );
    let grad_w = fd_grad_sym(
        |wm| {
            let b = SpdFactor::new("hd_gradients: W", wm)
                .expect("perturbed W stays positive definite")
                .inverse();
            f(&SiegelPoint::new(c.a().clone(), b).expect("W^-1 is positive definite"))
        },
        &w,
        step,
    );
    (grad_a, grad_w)
}

/// Width-space bracket
/// `{F, G}_Hd = -(dF/dW : dG/dA - dG/dW : dF/dA)` at `C`.
pub fn bracket_hd(
    f: impl Fn(&SiegelPoint) -> f64,
    g: impl Fn(&SiegelPoint) -> f64,
    c: &SiegelPoint,
) -> f64 {
    let (fa, fw) = hd_gradients(f, c, FD_STEP);
    let (ga, gw) = hd_gradients(g, c, FD_STEP);
    -((fw.transpose() * ga).trace() - (gw.transpose() * fa).trace())
}

/// Canonical bracket on `R^2d`:
/// `{F, G} = dF/dq_i dG/dp_i - dG/dq_i dF/dp_i`.
pub fn bracket_canonical(
    f: impl Fn(&PhasePoint) -> f64,
    g: impl Fn(&PhasePoint) -> f64,
    z: &PhasePoint,
) -> f64 {
    let d = z.dim();
    let wrap = |field: &dyn Fn(&PhasePoint) -> f64, zeta: &DVector<f64>| {
        field(&PhasePoint::from_vector(zeta).expect("even length"))
    };
    let gf = fd_grad_vec(|zeta| wrap(&f, zeta), &z.to_vector(), FD_STEP);
    let gg = fd_grad_vec(|zeta| wrap(&g, zeta), &z.to_vector(), FD_STEP);
    (0..d).map(|i| gf[i] * gg[d + i] - gg[i] * gf[d + i]).sum()
}

/// Wave-packet bracket on `R^2d x H_d`:
/// `{F, G} = {F, G}_R2d - (4/hbar) {F, G}_Hd`.
pub fn bracket_gwp(
    f: impl Fn(&PhasePoint, &SiegelPoint) -> f64,
    g: impl Fn(&PhasePoint, &SiegelPoint) -> f64,
    z: &PhasePoint,
    c: &SiegelPoint,
    hbar: f64,
) -> f64 {
    let canonical = bracket_canonical(|zz| f(zz, c), |zz| g(zz, c), z);
    let width = bracket_hd(|cc| f(z, cc), |cc| g(z, cc), c);
    canonical - 4.0 / hbar * width
}

/// (±)-Lie–Poisson bracket on `sym(2d)` with finite-difference variational
/// derivatives: `± tr(Sigma [dF/dSigma, dG/dSigma]_sym)`.
pub fn bracket_lp_sym(
    f: impl Fn(&SymElement) -> f64,
    g: impl Fn(&SymElement) -> f64,
    sigma: &SymElement,
    sign: Sign,
) -> f64 {
    let df = SymElement::new(fd_grad_sym(
        |m| f(&SymElement::new(m.clone())),
        sigma.matrix(),
        FD_STEP,
    ));
    let dg = SymElement::new(fd_grad_sym(
        |m| g(&SymElement::new(m.clone())),
        sigma.matrix(),
        FD_STEP,
    ));
    bracket_lp_sym_with_grads(&df, &dg, sigma, sign)
}

/// (±)-Lie–Poisson bracket with caller-supplied variational derivatives;
/// exact for fields with known gradients (e.g. `tr(P Sigma)`).
pub fn bracket_lp_sym_with_grads(
    df: &SymElement,
    dg: &SymElement,
    sigma: &SymElement,
    sign: Sign,
) -> f64 {
    sign.factor() * (sigma.matrix() * bracket_sym(df, dg).matrix()).trace()
}

/// Moment bracket on `R^2d x sym(2d)`:
/// `{F, G}_R2d - (4/hbar) tr(Sigma [dF/dSigma, dG/dSigma]_sym)`.
pub fn bracket_moments(
    f: impl Fn(&PhasePoint, &SymElement) -> f64,
    g: impl Fn(&PhasePoint, &SymElement) -> f64,
    z: &PhasePoint,
    sigma: &SymElement,
    hbar: f64,
) -> f64 {
    let canonical = bracket_canonical(|zz| f(zz, sigma), |zz| g(zz, sigma), z);
    let lp = bracket_lp_sym(|s| f(z, s), |s| g(z, s), sigma, Sign::Plus);
    canonical - 4.0 / hbar * lp
}

/// The moment bracket with the normalization `alpha` kept as a variable:
/// `alpha {F, G}_R2d - (4/hbar) tr(Sigma [dF/dSigma, dG/dSigma]_sym)`.
/// At `alpha = 1` this coincides with [`bracket_moments`]; `alpha` itself is
/// a Casimir (no derivative with respect to it enters).
pub fn bracket_moments_alpha(
    f: impl Fn(f64, &PhasePoint, &SymElement) -> f64,
    g: impl Fn(f64, &PhasePoint, &SymElement) -> f64,
    alpha: f64,
    z: &PhasePoint,
    sigma: &SymElement,
    hbar: f64,
) -> f64 {
    let canonical = bracket_canonical(|zz| f(alpha, zz, sigma), |zz| g(alpha, zz, sigma), z);
    let lp = bracket_lp_sym(|s| f(alpha, z, s), |s| g(alpha, z, s), sigma, Sign::Plus);
    alpha * canonical - 4.0 / hbar * lp
}

/// A point of the dual of the semidirect-product algebra,
/// `jac* = {(Pi, lambda, alpha)}`. `Pi` is stored in the `sym(2d)`
/// representation of `sp*` (the tilde-map identification); [`JacDual::pi_sp`]
/// returns the Hamiltonian-matrix form `J^T Pi`.
#[derive(Clone, Debug, PartialEq)]
pub struct JacDual {
    pi: SymElement,
    lambda: DVector<f64>,
    alpha: f64,
}

impl JacDual {
    pub fn new(pi: SymElement, lambda: DVector<f64>, alpha: f64) -> Result<Self> {
        if pi.dim() != lambda.len() {
            return Err(CoreError::DimensionMismatch {
                expected: pi.dim(),
                got: lambda.len(),
            });
        }
        Ok(Self { pi, lambda, alpha })
    }

    /// `Pi` in the symmetric-matrix representation.
    pub fn pi(&self) -> &SymElement {
        &self.pi
    }

    /// `Pi` as an element of `sp(R^2d)`, i.e. `J^T Pi`.
    pub fn pi_sp(&self) -> DMatrix<f64> {
        tilde(&self.pi)
    }

    pub fn lambda(&self) -> &DVector<f64> {
        &self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn half_dim(&self) -> usize {
        self.pi.dim() / 2
    }
}

/// (−)-Lie–Poisson bracket on `jac*`:
///
/// ```text
/// {f, g} = alpha {f, g}_lambda
///          - lambda . (df/dPi dg/dlambda - dg/dPi df/dlambda)
///          - tr(Pi^T [df/dPi, dg/dPi]_sp)
/// ```
///
/// with the `sp`-valued derivatives taken through the tilde identification
/// (so the trace term becomes `-tr(Pi [df, dg]_sym)` in the symmetric
/// representation).
pub fn bracket_jac(
    f: impl Fn(&JacDual) -> f64,
    g: impl Fn(&JacDual) -> f64,
    m: &JacDual,
) -> f64 {
    let d = m.half_dim();
    let j = standard_j(d);

    let grad = |field: &dyn Fn(&JacDual) -> f64| {
        let dpi = SymElement::new(fd_grad_sym(
            |pm| {
                field(&JacDual {
                    pi: SymElement::new(pm.clone()),
                    lambda: m.lambda.clone(),
                    alpha: m.alpha,
                })
            },
            m.pi.matrix(),
            FD_STEP,
        ));
        let dlambda = fd_grad_vec(
            |lv| {
                field(&JacDual {
                    pi: m.pi.clone(),
                    lambda: lv.clone(),
                    alpha: m.alpha,
                })
            },
            &m.lambda,
            FD_STEP,
        );
        (dpi, dlambda)
    };
    let (fpi, flambda) = grad(&f);
    let (gpi, glambda) = grad(&g);

    let canonical = (flambda.transpose() * &j * &glambda)[(0, 0)];
    let coupling = m
        .lambda
        .dot(&(tilde(&fpi) * &glambda - tilde(&gpi) * &flambda));
    let sp_term = (m.pi.matrix() * bracket_sym(&fpi, &gpi).matrix()).trace();
    m.alpha * canonical - coupling - sp_term
}

/// Residual of the Poisson-map property of the covariance map on linear
/// fields `F = tr(P .)`, `G = tr(Q .)`:
/// `|{F∘sigma, G∘sigma}_Hd (C) - {F, G}+_sym (sigma(C))|`.
pub fn poisson_map_check(c: &SiegelPoint, p: &SymElement, q: &SymElement) -> f64 {
    let sig = crate::geometry::sigma(c).expect("valid Siegel point");
    let lhs = bracket_hd(
        |cc| {
            (p.matrix() * crate::geometry::sigma(cc).expect("valid").matrix()).trace()
        },
        |cc| {
            (q.matrix() * crate::geometry::sigma(cc).expect("valid").matrix()).trace()
        },
        c,
    );
    let rhs = bracket_lp_sym_with_grads(p, q, &sig, Sign::Plus);
    fmath::abs(lhs - rhs)
}

/// Second-moment map of a Gaussian state into `jac*`, in closed form:
/// the uncentered second moment is `<zeta zeta^T> = z z^T + (hbar/2) Sigma`,
/// and in the symmetric representation
/// `(Pi, lambda, alpha) = (<zeta zeta^T>/2, J^T z, 1)`.
pub fn moment_map_gaussian(state: &GaussianState) -> JacDual {
    let z = state.mean().to_vector();
    let second = &z * z.transpose() + state.sigma().matrix() * (0.5 * state.hbar());
    let j = standard_j(state.dim());
    JacDual {
        pi: SymElement::new(second * 0.5),
        lambda: j.transpose() * z,
        alpha: 1.0,
    }
}

/// Second-moment map with sample means in place of Gaussian moments.
pub fn moment_map_ensemble(e: &Ensemble) -> Result<JacDual> {
    let second = e.second_moment()?;
    let mean = e.mean_z()?.to_vector();
    let j = standard_j(e.dim());
    Ok(JacDual {
        pi: SymElement::new(second * 0.5),
        lambda: j.transpose() * mean,
        alpha: 1.0,
    })
}

/// Untangling map: subtracts the mean contribution from the second moment,
/// `Pi -> Pi - (1/(2 alpha)) (J lambda)(J lambda)^T` in the symmetric
/// representation (equivalently `Pi_sp - (alpha^-1/2)(lambda ⊗ lambda) J^T`).
/// Undefined at `alpha = 0`.
pub fn untangle(m: &JacDual) -> Result<JacDual> {
    if m.alpha == 0.0 {
        return Err(CoreError::SingularUntangle);
    }
    let j = standard_j(m.half_dim());
    let jl = &j * &m.lambda;
    let pi = m.pi.matrix() - &jl * jl.transpose() / (2.0 * m.alpha);
    Ok(JacDual {
        pi: SymElement::new(pi),
        lambda: m.lambda.clone(),
        alpha: m.alpha,
    })
}

/// Isomorphism onto moment coordinates:
/// `(Pi, lambda, alpha) -> (alpha, J lambda, J Pi_sp) = (alpha, J lambda, Pi)`
/// in the symmetric representation. Composed with [`untangle`] and
/// [`moment_map_gaussian`] it yields `(1, z, (hbar/4) Sigma)`.
pub fn iota(m: &JacDual) -> (f64, DVector<f64>, SymElement) {
    let j = standard_j(m.half_dim());
    (m.alpha, &j * &m.lambda, m.pi.clone())
}

/// Affine phase-space action on Gaussian states: substituting
/// `zeta -> S zeta + zshift` in the density maps
/// `mean -> S^-1 (mean - zshift)` and `Sigma -> S^-1 Sigma S^-T`.
/// The central extension acts trivially on densities and is ignored.
pub fn jacobi_action_gaussian(
    s: &SymplecticMatrix,
    zshift: &DVector<f64>,
    state: &GaussianState,
) -> Result<GaussianState> {
    if zshift.len() != 2 * state.dim() {
        return Err(CoreError::DimensionMismatch {
            expected: 2 * state.dim(),
            got: zshift.len(),
        });
    }
    let s_inv = s.inverse();
    let mean = s_inv.matrix() * (state.mean().to_vector() - zshift);
    let sigma = SymElement::new(
        s_inv.matrix() * state.sigma().matrix() * s_inv.matrix().transpose(),
    );
    GaussianState::new(PhasePoint::from_vector(&mean)?, sigma, state.hbar())
}
