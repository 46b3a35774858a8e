//! Hamiltonians and vector fields.
//!
//! Three coupled descriptions of the same semiclassical flow live here:
//!
//! * classical: `H_cl = p^2/2m + V(q)`;
//! * wave packet on `R^2d x H_d`:
//!   `H = H_cl + (hbar/4) tr[B^-1 ((A^2 + B^2)/m + D2V(q))]`, whose vector
//!   field carries an O(hbar) correction to the force and the width flow
//!   `dA = -(A^2 - B^2)/m - D2V`, `dB = -(AB + BA)/m`;
//! * covariance moments on `R^2d x sym(2d)`:
//!   `h = H_cl + (hbar/4) tr(Sigma22/m + Sigma11 D2V(q))` with the
//!   Lie–Poisson flow `dSigma = J D2H_cl Sigma - Sigma D2H_cl J`.
//!
//! The two corrected Hamiltonians agree through the covariance map
//! (`h(z, sigma(C)) = H(z, C)`), and the moment field is the pushforward of
//! the wave-packet field under `(z, C) -> (z, sigma(C))`. The linearized
//! flow `dS = J D2H_cl S` on symplectic frames recovers the covariance flow
//! through `Sigma = S S^T`.

use crate::error::{CoreError, Result};
use crate::geometry::{SiegelPoint, SymElement, SymplecticMatrix};
use crate::linalg::{block2x2, standard_j, symmetrize, SpdFactor};
use crate::potentials::Potential;
use nalgebra::{DMatrix, DVector};

/// A phase-space point `z = (q, p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint {
    pub q: DVector<f64>,
    pub p: DVector<f64>,
}

impl PhasePoint {
    pub fn new(q: DVector<f64>, p: DVector<f64>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(CoreError::DimensionMismatch {
                expected: q.len(),
                got: p.len(),
            });
        }
        Ok(Self { q, p })
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            q: DVector::zeros(d),
            p: DVector::zeros(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// Concatenated `(q, p)` as a `2d` vector.
    pub fn to_vector(&self) -> DVector<f64> {
        let d = self.dim();
        let mut z = DVector::zeros(2 * d);
        z.rows_mut(0, d).copy_from(&self.q);
        z.rows_mut(d, d).copy_from(&self.p);
        z
    }

    /// Split a `2d` vector back into `(q, p)`.
    pub fn from_vector(z: &DVector<f64>) -> Result<Self> {
        if z.len() % 2 != 0 {
            return Err(CoreError::DimensionMismatch {
                expected: z.len() + 1,
                got: z.len(),
            });
        }
        let d = z.len() / 2;
        Ok(Self {
            q: z.rows(0, d).into_owned(),
            p: z.rows(d, d).into_owned(),
        })
    }
}

/// Physical parameters `hbar > 0` and `mass > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimParams {
    pub hbar: f64,
    pub mass: f64,
}

impl SimParams {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar > 0.0) {
            return Err(CoreError::NotPositiveDefinite {
                context: "SimParams hbar",
                min_eig: hbar,
            });
        }
        if !(mass > 0.0) {
            return Err(CoreError::NotPositiveDefinite {
                context: "SimParams mass",
                min_eig: mass,
            });
        }
        Ok(Self { hbar, mass })
    }
}

/// Classical Hamiltonian `p^2/2m + V(q)`.
pub fn h_classical(z: &PhasePoint, params: &SimParams, pot: &dyn Potential) -> f64 {
    z.p.norm_squared() / (2.0 * params.mass) + pot.value(&z.q)
}

/// Wave-packet Hamiltonian
/// `H_cl + (hbar/4) tr[B^-1 ((A^2 + B^2)/m + D2V(q))]`.
pub fn h_gwp(z: &PhasePoint, c: &SiegelPoint, params: &SimParams, pot: &dyn Potential) -> f64 {
    let w = c.b_inverse();
    let a2b2 = c.a() * c.a() + c.b() * c.b();
    let inner = a2b2 / params.mass + pot.hessian(&z.q);
    h_classical(z, params, pot) + 0.25 * params.hbar * (w * inner).trace()
}

/// Moment Hamiltonian `H_cl + (hbar/4) tr(Sigma22/m + Sigma11 D2V(q))`;
/// satisfies `h_moment(z, sigma(C)) = h_gwp(z, C)`.
pub fn h_moment(
    z: &PhasePoint,
    sigma: &SymElement,
    params: &SimParams,
    pot: &dyn Potential,
) -> f64 {
    let s11 = sigma.block(1, 1);
    let s22 = sigma.block(2, 2);
    h_classical(z, params, pot)
        + 0.25 * params.hbar * (s22.trace() / params.mass + (s11 * pot.hessian(&z.q)).trace())
}

/// Lie–Poisson Hamiltonian on covariances,
/// `h_sym(Sigma) = -tr(Sigma D2H_cl) = -tr(Sigma22/m + Sigma11 D2V(q))`.
pub fn h_sym(sigma: &SymElement, pot: &dyn Potential, q: &DVector<f64>, params: &SimParams) -> f64 {
    -(sigma.block(2, 2).trace() / params.mass + (sigma.block(1, 1) * pot.hessian(q)).trace())
}

/// Width-space Hamiltonian `-tr[B^-1 ((A^2 + B^2)/m + D2V(q))]`, the
/// collective counterpart of [`h_sym`] through the covariance map.
pub fn h_hd(c: &SiegelPoint, pot: &dyn Potential, q: &DVector<f64>, params: &SimParams) -> f64 {
    let w = c.b_inverse();
    let inner = (c.a() * c.a() + c.b() * c.b()) / params.mass + pot.hessian(q);
    -(w * inner).trace()
}

/// Block Hessian of the classical Hamiltonian,
/// `D2H_cl = [[D2V(q), 0], [0, I/m]]`.
pub fn d2_h_classical(q: &DVector<f64>, params: &SimParams, pot: &dyn Potential) -> DMatrix<f64> {
    let d = q.len();
    block2x2(
        &pot.hessian(q),
        &DMatrix::zeros(d, d),
        &DMatrix::zeros(d, d),
        &(DMatrix::identity(d, d) / params.mass),
    )
}

/// Corrected potential `V(q) + (hbar/4) tr(W D2V(q))` with `W = B^-1` or
/// `W = Sigma11`.
pub fn v_hbar(
    q: &DVector<f64>,
    weight: &DMatrix<f64>,
    params: &SimParams,
    pot: &dyn Potential,
) -> f64 {
    pot.value(q) + 0.25 * params.hbar * (weight * pot.hessian(q)).trace()
}

/// Gradient of the corrected potential,
/// `grad V(q) + (hbar/4) grad_q tr(W D2V(q))`.
pub fn v_hbar_gradient(
    q: &DVector<f64>,
    weight: &DMatrix<f64>,
    params: &SimParams,
    pot: &dyn Potential,
) -> DVector<f64> {
    pot.gradient(q) + pot.hessian_contract_grad(weight, q) * (0.25 * params.hbar)
}

/// Classical vector field `(p/m, -grad V)`.
pub fn classical_rhs(z: &PhasePoint, params: &SimParams, pot: &dyn Potential) -> PhasePoint {
    PhasePoint {
        q: &z.p / params.mass,
        p: -pot.gradient(&z.q),
    }
}

/// Wave-packet vector field: corrected force on `(q, p)` plus the width flow
/// `dA = -(A^2 - B^2)/m - D2V`, `dB = -(AB + BA)/m`.
pub fn gwp_rhs(
    z: &PhasePoint,
    c: &SiegelPoint,
    params: &SimParams,
    pot: &dyn Potential,
) -> (PhasePoint, DMatrix<f64>, DMatrix<f64>) {
    let w = c.b_inverse();
    let zdot = PhasePoint {
        q: &z.p / params.mass,
        p: -v_hbar_gradient(&z.q, &w, params, pot),
    };
    let (a, b) = (c.a(), c.b());
    let adot = -(a * a - b * b) / params.mass - pot.hessian(&z.q);
    let bdot = -(a * b + b * a) / params.mass;
    (zdot, adot, bdot)
}

/// Moment vector field: corrected force with `Sigma11` as the width weight
/// plus `dSigma = J D2H_cl Sigma - Sigma D2H_cl J` (symmetric).
pub fn moment_rhs(
    z: &PhasePoint,
    sigma: &SymElement,
    params: &SimParams,
    pot: &dyn Potential,
) -> (PhasePoint, DMatrix<f64>) {
    let s11 = sigma.block(1, 1);
    let zdot = PhasePoint {
        q: &z.p / params.mass,
        p: -v_hbar_gradient(&z.q, &s11, params, pot),
    };
    let d2h = d2_h_classical(&z.q, params, pot);
    let j = standard_j(z.dim());
    let sdot = &j * &d2h * sigma.matrix() - sigma.matrix() * &d2h * &j;
    (zdot, symmetrize(&sdot))
}

/// Linearized flow on symplectic frames, `dS = J D2H_cl(z) S`; along it,
/// `d/dt (S S^T)` equals the moment field at `Sigma = S S^T`.
pub fn hagedorn_rhs(
    z: &PhasePoint,
    s: &SymplecticMatrix,
    params: &SimParams,
    pot: &dyn Potential,
) -> DMatrix<f64> {
    standard_j(z.dim()) * d2_h_classical(&z.q, params, pot) * s.matrix()
}

/// `B^-1` for a width matrix, with the ill-conditioned diagnostics of
/// [`SpdFactor`]; convenience for callers that hold raw matrices.
pub fn width_inverse(b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(SpdFactor::new("width inverse", b)?.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry;
    use crate::linalg::max_abs;
    use crate::potentials::{Harmonic, Quadratic, Torsional};

    fn v(vals: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(vals)
    }

    fn params(hbar: f64) -> SimParams {
        SimParams::new(hbar, 1.0).unwrap()
    }

    #[test]
    fn classical_hamiltonian_values() {
        let pot = Harmonic::new(1.0, 1);
        let z = PhasePoint::new(v(&[0.0]), v(&[1.0])).unwrap();
        assert!((h_classical(&z, &params(0.1), &pot) - 0.5).abs() < 1e-15);

        let pot = Torsional;
        let z0 = PhasePoint::zeros(2);
        assert!(h_classical(&z0, &params(0.1), &pot).abs() < 1e-15);
    }

    #[test]
    fn gwp_hamiltonian_ground_state_energy() {
        // Harmonic d=1, m=omega=1, A=0, B=1, z=0: H = hbar/2.
        let pot = Harmonic::new(1.0, 1);
        let c = SiegelPoint::upper_i(1);
        let z = PhasePoint::zeros(1);
        let hbar = 0.3;
        assert!((h_gwp(&z, &c, &params(hbar), &pot) - hbar / 2.0).abs() < 1e-15);
    }

    #[test]
    fn moment_hamiltonian_identity_case() {
        // Sigma = I4, harmonic d=2, m=omega=1, z=0: h = hbar.
        let pot = Harmonic::new(1.0, 2);
        let z = PhasePoint::zeros(2);
        let hbar = 0.25;
        let sigma = SymElement::identity(4);
        assert!((h_moment(&z, &sigma, &params(hbar), &pot) - hbar).abs() < 1e-15);
    }

    #[test]
    fn collective_identities() {
        // h_moment(z, sigma(C)) = h_gwp(z, C) and h_hd = h_sym o sigma.
        let pot = Torsional;
        let pr = params(0.1);
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]);
        let c = SiegelPoint::new(a.clone(), a).unwrap();
        let z = PhasePoint::new(v(&[1.0, 0.0]), v(&[-1.0, 1.0])).unwrap();
        let sig = geometry::sigma(&c).unwrap();
        assert!((h_moment(&z, &sig, &pr, &pot) - h_gwp(&z, &c, &pr, &pot)).abs() < 1e-12);
        assert!((h_sym(&sig, &pot, &z.q, &pr) - h_hd(&c, &pot, &z.q, &pr)).abs() < 1e-12);
    }

    #[test]
    fn h_sym_frozen_scalar_case() {
        // Sigma = I, D2V = I, m = 1, d = 1 -> -2.
        let pot = Harmonic::new(1.0, 1);
        let sigma = SymElement::identity(2);
        assert!((h_sym(&sigma, &pot, &v(&[0.0]), &params(0.1)) + 2.0).abs() < 1e-15);
    }

    #[test]
    fn classical_rhs_cases() {
        let pot = Torsional;
        let pr = params(0.1);
        let z = PhasePoint::new(v(&[core::f64::consts::FRAC_PI_2, 0.0]), v(&[0.3, -0.4])).unwrap();
        let rhs = classical_rhs(&z, &pr, &pot);
        assert!((rhs.p[0] + 1.0).abs() < 1e-15);
        assert!(rhs.p[1].abs() < 1e-15);
        assert!((rhs.q - &z.p).norm() < 1e-15);
    }

    #[test]
    fn gwp_width_fixed_point() {
        // Harmonic d=1 (m = omega = 1), A = 0, B = 1 is a width fixed point.
        let pot = Harmonic::new(1.0, 1);
        let pr = params(0.1);
        let c = SiegelPoint::upper_i(1);
        let z = PhasePoint::new(v(&[0.4]), v(&[-0.2])).unwrap();
        let (_, adot, bdot) = gwp_rhs(&z, &c, &pr, &pot);
        assert!(max_abs(&adot) < 1e-15);
        assert!(max_abs(&bdot) < 1e-15);
    }

    #[test]
    fn quadratic_force_has_no_correction() {
        let pot = Quadratic::new(
            DMatrix::from_row_slice(2, 2, &[1.5, 0.2, 0.2, 0.9]),
            DVector::zeros(2),
        )
        .unwrap();
        let pr = params(0.4);
        let a = DMatrix::from_row_slice(2, 2, &[0.3, 0.1, 0.1, 0.5]);
        let b = DMatrix::from_row_slice(2, 2, &[1.2, 0.0, 0.0, 0.8]);
        let c = SiegelPoint::new(a, b).unwrap();
        let z = PhasePoint::new(v(&[0.7, -0.1]), v(&[0.2, 0.6])).unwrap();
        let (zdot, _, _) = gwp_rhs(&z, &c, &pr, &pot);
        let cl = classical_rhs(&z, &pr, &pot);
        assert!((zdot.p - cl.p).norm() < 1e-15);
        assert!((zdot.q - cl.q).norm() < 1e-15);
    }

    #[test]
    fn moment_fixed_width_and_classical_limit() {
        // Harmonic d=2 (m = omega = 1): Sigma = I4 gives dSigma = 0.
        let pot = Harmonic::new(1.0, 2);
        let pr = params(0.1);
        let z = PhasePoint::new(v(&[0.3, 0.1]), v(&[0.0, -0.5])).unwrap();
        let (_, sdot) = moment_rhs(&z, &SymElement::identity(4), &pr, &pot);
        assert!(max_abs(&sdot) < 1e-15);

        // hbar -> 0: the (q, p) part tends to the classical field.
        let pot = Torsional;
        let tiny = params(1e-12);
        let sigma = SymElement::new(DMatrix::identity(4, 4) * 1.3);
        let (zdot, _) = moment_rhs(&z, &sigma, &tiny, &pot);
        let cl = classical_rhs(&z, &tiny, &pot);
        assert!((zdot.p - cl.p).norm() < 1e-11);
    }

    #[test]
    fn hagedorn_cases_and_product_rule() {
        let pot = Harmonic::new(1.0, 1);
        let pr = params(0.1);
        let z = PhasePoint::zeros(1);
        let s = SymplecticMatrix::identity(1);
        let sdot = hagedorn_rhs(&z, &s, &pr, &pot);
        assert!(max_abs(&(&sdot - standard_j(1))) < 1e-15);

        // d/dt (S S^T) = Sdot S^T + S Sdot^T equals the moment field at
        // Sigma = S S^T, exactly for any symplectic S.
        let pot = Torsional;
        let z = PhasePoint::new(v(&[0.9, -0.2]), v(&[0.1, 0.4])).unwrap();
        let mut rng = crate::rng::CounterRng::from_seed(7);
        for _ in 0..10 {
            let s = crate::sampling::random_symplectic(&mut rng, 2, 3);
            let sigma = geometry::jhat(&s);
            let sdot = hagedorn_rhs(&z, &s, &pr, &pot);
            let lhs = &sdot * s.matrix().transpose() + s.matrix() * sdot.transpose();
            let (_, rhs) = moment_rhs(&z, &sigma, &pr, &pot);
            assert!(max_abs(&(lhs - rhs)) < 1e-12);
        }
    }

    #[test]
    fn pushforward_identity_moment_vs_gwp() {
        // moment_rhs at (z, sigma(C)) is the image of gwp_rhs under the
        // differential of sigma, checked by central differences.
        let pot = Torsional;
        let pr = params(0.1);
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]);
        let c = SiegelPoint::new(a.clone(), a).unwrap();
        let z = PhasePoint::new(v(&[1.0, 0.0]), v(&[-1.0, 1.0])).unwrap();
        let (zdot_g, adot, bdot) = gwp_rhs(&z, &c, &pr, &pot);
        let (zdot_m, sdot) = moment_rhs(&z, &geometry::sigma(&c).unwrap(), &pr, &pot);
        assert!((zdot_g.q - &zdot_m.q).norm() < 1e-13);
        assert!((zdot_g.p - &zdot_m.p).norm() < 1e-13);

        let eps = 1e-6;
        let cp = SiegelPoint::new(c.a() + &adot * eps, c.b() + &bdot * eps).unwrap();
        let cm = SiegelPoint::new(c.a() - &adot * eps, c.b() - &bdot * eps).unwrap();
        let fd = (geometry::sigma(&cp).unwrap().matrix()
            - geometry::sigma(&cm).unwrap().matrix())
            / (2.0 * eps);
        assert!(max_abs(&(fd - sdot)) < 1e-6);
    }

    #[test]
    fn params_validation() {
        assert!(SimParams::new(0.0, 1.0).is_err());
        assert!(SimParams::new(0.1, -1.0).is_err());
        assert!(SimParams::new(0.1, 1.0).is_ok());
    }

    #[test]
    fn phase_point_vector_round_trip() {
        let z = PhasePoint::new(v(&[1.0, 2.0]), v(&[3.0, 4.0])).unwrap();
        let back = PhasePoint::from_vector(&z.to_vector()).unwrap();
        assert_eq!(z, back);
        assert!(PhasePoint::new(v(&[1.0]), v(&[1.0, 2.0])).is_err());
    }
}
