//! Random geometric test instances for the invariant-check suites.
//!
//! Everything is driven by a [`CounterRng`], so suites parameterized by a
//! seed are exactly reproducible. Random symplectic matrices are products of
//! at most a few exponentials `exp(t * tilde(xi))` with `|xi| <= 1`, which
//! guarantees group membership up to the accuracy of the matrix exponential;
//! random positive-definite matrices are exponentials of random symmetric
//! ones, keeping condition numbers moderate.

use crate::geometry::{tilde, SiegelPoint, SymElement, SymplecticMatrix, TangentHd};
use crate::linalg::expm;
use crate::rng::CounterRng;
use nalgebra::{DMatrix, DVector};

/// Random symmetric matrix with entries uniform in `[-scale, scale]`.
pub fn random_sym(rng: &mut CounterRng, n: usize, scale: f64) -> SymElement {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x = rng.next_in(-scale, scale);
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    SymElement::new(m)
}

/// Random vector with entries uniform in `[-scale, scale]`.
pub fn random_vec(rng: &mut CounterRng, n: usize, scale: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.next_in(-scale, scale))
}

/// Random symmetric positive-definite matrix `exp(S)` with `S` symmetric.
pub fn random_spd(rng: &mut CounterRng, n: usize, scale: f64) -> DMatrix<f64> {
    expm(random_sym(rng, n, scale).matrix())
}

/// Random point of the Siegel upper half space.
pub fn random_siegel(rng: &mut CounterRng, d: usize) -> SiegelPoint {
    let a = random_sym(rng, d, 1.0);
    let b = random_spd(rng, d, 0.7);
    SiegelPoint::new(a.matrix().clone(), b).expect("exp of symmetric is positive definite")
}

/// Random tangent vector to the Siegel upper half space.
pub fn random_tangent(rng: &mut CounterRng, d: usize) -> TangentHd {
    TangentHd::new(
        random_sym(rng, d, 1.0).matrix().clone(),
        random_sym(rng, d, 1.0).matrix().clone(),
    )
}

/// Random symplectic matrix: product of `factors` exponentials of random
/// algebra elements through the tilde map.
pub fn random_symplectic(rng: &mut CounterRng, d: usize, factors: usize) -> SymplecticMatrix {
    let mut s = DMatrix::identity(2 * d, 2 * d);
    for _ in 0..factors.max(1) {
        let xi = random_sym(rng, 2 * d, 1.0);
        let t = rng.next_in(-1.0, 1.0);
        s = expm(&(tilde(&xi) * t)) * s;
    }
    SymplecticMatrix::new(s).expect("exponentials of Hamiltonian matrices are symplectic")
}

/// Random element of the isotropy subgroup `Sp ∩ O(2d)`: the exponential of
/// `[[a, -b], [b, a]]` with `a` antisymmetric and `b` symmetric.
pub fn random_unitary_factor(rng: &mut CounterRng, d: usize) -> SymplecticMatrix {
    let mut a = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in (i + 1)..d {
            let x = rng.next_in(-1.0, 1.0);
            a[(i, j)] = x;
            a[(j, i)] = -x;
        }
    }
    let b = random_sym(rng, d, 1.0);
    let mut x = DMatrix::zeros(2 * d, 2 * d);
    x.view_mut((0, 0), (d, d)).copy_from(&a);
    x.view_mut((0, d), (d, d)).copy_from(&(-b.matrix()));
    x.view_mut((d, 0), (d, d)).copy_from(b.matrix());
    x.view_mut((d, d), (d, d)).copy_from(&a);
    SymplecticMatrix::new(expm(&x)).expect("exp of sp ∩ so element is symplectic orthogonal")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, min_eig_sym, symplectic_residual};

    #[test]
    fn generators_produce_valid_instances() {
        let mut rng = CounterRng::from_seed(11);
        for d in [1usize, 2, 3] {
            for _ in 0..20 {
                let c = random_siegel(&mut rng, d);
                assert!(min_eig_sym(c.b()) > 0.0);
                let s = random_symplectic(&mut rng, d, 3);
                assert!(symplectic_residual(s.matrix()) < 1e-12);
                let u = random_unitary_factor(&mut rng, d);
                assert!(symplectic_residual(u.matrix()) < 1e-12);
                let orth = u.matrix() * u.matrix().transpose()
                    - DMatrix::<f64>::identity(2 * d, 2 * d);
                assert!(max_abs(&orth) < 1e-12);
            }
        }
    }

    #[test]
    fn generation_is_seed_reproducible() {
        let mut a = CounterRng::from_seed(5);
        let mut b = CounterRng::from_seed(5);
        let sa = random_symplectic(&mut a, 2, 3);
        let sb = random_symplectic(&mut b, 2, 3);
        assert_eq!(sa.matrix(), sb.matrix());
    }
}
