//! The Siegel upper half space `H_d`, the symplectic group `Sp(R^2d)` with
//! its Möbius action on `H_d`, the Lie algebra `sym(2d)` with its bracket and
//! (co)adjoint structure, and the covariance map
//!
//! ```text
//! sigma(A + iB) = [[B^-1,   B^-1 A        ],
//!                  [A B^-1, A B^-1 A + B  ]]
//! ```
//!
//! which sends a width matrix to a symmetric, positive-definite, symplectic
//! covariance. `sigma` is the momentum map of the Möbius action: it is
//! equivariant (`sigma(S . C) = S sigma(C) S^T`), Poisson for the width-space
//! bracket and the (+)-Lie–Poisson bracket, and pulls the (+)-KKS form on
//! coadjoint orbits back to the symplectic form of `H_d`. The operations in
//! this module provide every ingredient needed to verify those statements
//! numerically: the quotient map `pi_u`, the factor `xi_factor` with
//! `jhat(Y) = Y Y^T`, infinitesimal generators, and the forms `omega_hd`,
//! `theta_hd`, and `kks_form`.
//!
//! Complex matrices never appear: points of `H_d` are stored as real pairs
//! `(A, B)` and complex arithmetic is carried out on real/imaginary blocks.

use crate::error::{CoreError, Result};
use crate::linalg::{
    self, block2x2, block_of, max_abs, standard_j, symmetrize, symplectic_residual, SpdFactor,
};
use nalgebra::DMatrix;

/// Default tolerance for symplectic-constraint checks.
pub const TOL_SP: f64 = 1e-10;

/// Sign selector for the two Kirillov–Kostant–Souriau forms and the
/// corresponding Lie–Poisson brackets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    #[inline]
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// A point `A + iB` of the Siegel upper half space: `A`, `B` are `d x d`
/// symmetric real matrices and `B` is positive definite. Both matrices are
/// symmetrized on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SiegelPoint {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
}

impl SiegelPoint {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(CoreError::DimensionMismatch {
                expected: a.nrows(),
                got: a.ncols(),
            });
        }
        if b.nrows() != a.nrows() || b.ncols() != a.nrows() {
            return Err(CoreError::DimensionMismatch {
                expected: a.nrows(),
                got: b.nrows(),
            });
        }
        let a = symmetrize(&a);
        let b = symmetrize(&b);
        let min_eig = linalg::min_eig_sym(&b);
        if min_eig <= 0.0 {
            return Err(CoreError::NotPositiveDefinite {
                context: "SiegelPoint imaginary part",
                min_eig,
            });
        }
        Ok(Self { a, b })
    }

    /// The base point `iI` (A = 0, B = I).
    pub fn upper_i(d: usize) -> Self {
        Self {
            a: DMatrix::zeros(d, d),
            b: DMatrix::identity(d, d),
        }
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// Real part `A`.
    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    /// Imaginary part `B` (positive definite).
    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    /// `B^-1`, via the positive-definite eigendecomposition.
    pub fn b_inverse(&self) -> DMatrix<f64> {
        SpdFactor::new("SiegelPoint B inverse", &self.b)
            .expect("B is positive definite by construction")
            .inverse()
    }
}

/// An element of `Sp(R^2d)`: a `2d x 2d` real matrix with
/// `S^T J S = J` to within [`TOL_SP`] (the equivalent block conditions are
/// checked as well).
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticMatrix {
    s: DMatrix<f64>,
}

impl SymplecticMatrix {
    pub fn new(s: DMatrix<f64>) -> Result<Self> {
        Self::with_tol(s, TOL_SP)
    }

    pub fn with_tol(s: DMatrix<f64>, tol: f64) -> Result<Self> {
        if s.nrows() != s.ncols() || s.nrows() % 2 != 0 || s.nrows() == 0 {
            return Err(CoreError::DimensionMismatch {
                expected: s.nrows(),
                got: s.ncols(),
            });
        }
        let residual = symplectic_residual(&s);
        // Block conditions: S11^T S21 and S12^T S22 symmetric,
        // S11^T S22 - S21^T S12 = I.
        let (s11, s12) = (block_of(&s, 0, 0), block_of(&s, 0, 1));
        let (s21, s22) = (block_of(&s, 1, 0), block_of(&s, 1, 1));
        let d = s11.nrows();
        let block_residual = linalg::asymmetry(&(s11.transpose() * &s21))
            .max(linalg::asymmetry(&(s12.transpose() * &s22)))
            .max(max_abs(
                &(s11.transpose() * &s22 - s21.transpose() * &s12 - DMatrix::identity(d, d)),
            ));
        let worst = residual.max(block_residual);
        if worst > tol {
            return Err(CoreError::NotSymplectic {
                residual: worst,
                tol,
            });
        }
        Ok(Self { s })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            s: DMatrix::identity(2 * d, 2 * d),
        }
    }

    /// The symplectic unit `J` itself, which is symplectic.
    pub fn standard_j(d: usize) -> Self {
        Self { s: standard_j(d) }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.s
    }

    /// Half dimension `d`.
    pub fn dim(&self) -> usize {
        self.s.nrows() / 2
    }

    /// Block `S_ij` with `i, j` in `{1, 2}`.
    pub fn block(&self, i: usize, j: usize) -> DMatrix<f64> {
        block_of(&self.s, i - 1, j - 1)
    }

    /// Group product `self * other`. Products of symplectic matrices are
    /// symplectic; the constraint is re-checked in debug builds only.
    pub fn compose(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        let s = &self.s * &other.s;
        debug_assert!(symplectic_residual(&s) <= TOL_SP);
        SymplecticMatrix { s }
    }

    /// Closed-form inverse `S^-1 = J^T S^T J`; exactly symplectic.
    pub fn inverse(&self) -> SymplecticMatrix {
        let j = standard_j(self.dim());
        SymplecticMatrix {
            s: j.transpose() * self.s.transpose() * j,
        }
    }
}

/// A symmetric real matrix, serving as a Lie-algebra element of `sym(2d)` or
/// (through the trace pairing) as a dual element such as a covariance matrix.
/// Symmetrized on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SymElement {
    m: DMatrix<f64>,
}

impl SymElement {
    pub fn new(m: DMatrix<f64>) -> Self {
        Self { m: symmetrize(&m) }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            m: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: DMatrix::identity(n, n),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    /// Block `(i, j)` with `i, j` in `{1, 2}` of a `2d x 2d` element.
    pub fn block(&self, i: usize, j: usize) -> DMatrix<f64> {
        block_of(&self.m, i - 1, j - 1)
    }
}

/// A tangent vector `(dA, dB)` to the Siegel upper half space; both parts are
/// symmetric and are symmetrized on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentHd {
    da: DMatrix<f64>,
    db: DMatrix<f64>,
}

impl TangentHd {
    pub fn new(da: DMatrix<f64>, db: DMatrix<f64>) -> Self {
        Self {
            da: symmetrize(&da),
            db: symmetrize(&db),
        }
    }

    pub fn da(&self) -> &DMatrix<f64> {
        &self.da
    }

    pub fn db(&self) -> &DMatrix<f64> {
        &self.db
    }
}

/// Covariance map `sigma(A + iB)`; symmetric, positive definite, symplectic,
/// with unit determinant.
pub fn sigma(c: &SiegelPoint) -> Result<SymElement> {
    let w = SpdFactor::new("sigma: B", c.b())?.inverse();
    let wa = &w * c.a();
    let awa_b = c.a() * &wa + c.b();
    Ok(SymElement::new(block2x2(&w, &wa, &wa.transpose(), &awa_b)))
}

/// Inverse of [`sigma`] on symplectic positive-definite covariances:
/// `B = Sigma11^-1`, `A = Sigma11^-1 Sigma12`.
pub fn sigma_inverse(cov: &SymElement) -> Result<SiegelPoint> {
    let n = cov.dim();
    if n % 2 != 0 || n == 0 {
        return Err(CoreError::DimensionMismatch {
            expected: n + (n % 2),
            got: n,
        });
    }
    let j = standard_j(n / 2);
    let residual = max_abs(&(cov.matrix() * &j * cov.matrix() - &j));
    if residual > TOL_SP {
        return Err(CoreError::NotPureState {
            residual,
            tol: TOL_SP,
        });
    }
    let s11_inv = SpdFactor::new("sigma_inverse: Sigma11", &cov.block(1, 1))?.inverse();
    let a = &s11_inv * cov.block(1, 2);
    SiegelPoint::new(a, s11_inv)
}

/// Möbius action `S . C = (S21 + S22 C)(S11 + S12 C)^-1`, evaluated on
/// real/imaginary blocks through one real linear solve.
pub fn moebius(s: &SymplecticMatrix, c: &SiegelPoint) -> Result<SiegelPoint> {
    let (s11, s12) = (s.block(1, 1), s.block(1, 2));
    let (s21, s22) = (s.block(2, 1), s.block(2, 2));
    let dr = &s11 + &s12 * c.a();
    let di = &s12 * c.b();
    let nr = &s21 + &s22 * c.a();
    let ni = &s22 * c.b();
    let (xr, xi) =
        linalg::complex_right_divide(&nr, &ni, &dr, &di).ok_or(CoreError::DegenerateAction)?;
    SiegelPoint::new(xr, xi).map_err(|_| CoreError::DegenerateAction)
}

/// The symplectic factor `Xi(C) = [[B^-1/2, 0], [A B^-1/2, B^1/2]]` with
/// `moebius(xi_factor(C), iI) = C`.
pub fn xi_factor(c: &SiegelPoint) -> Result<SymplecticMatrix> {
    let f = SpdFactor::new("xi_factor: B", c.b())?;
    let root = f.sqrt();
    let inv_root = f.inv_sqrt();
    let d = c.dim();
    let s = block2x2(&inv_root, &DMatrix::zeros(d, d), &(c.a() * &inv_root), &root);
    SymplecticMatrix::new(s)
}

/// Quotient map `Sp(R^2d) -> H_d`, `S -> (S21 + i S22)(S11 + i S12)^-1`;
/// invariant under right multiplication by `Sp ∩ O(2d)`.
pub fn pi_u(s: &SymplecticMatrix) -> Result<SiegelPoint> {
    moebius(s, &SiegelPoint::upper_i(s.dim()))
}

/// `jhat(S) = S S^T`, which satisfies `jhat(S) = sigma(pi_u(S))`.
pub fn jhat(s: &SymplecticMatrix) -> SymElement {
    SymElement::new(s.matrix() * s.matrix().transpose())
}

/// Tilde map `sym(2d) -> sp(R^2d)`, `xi -> J^T xi`; a Lie-algebra
/// isomorphism onto the Hamiltonian matrices.
pub fn tilde(xi: &SymElement) -> DMatrix<f64> {
    let d = xi.dim() / 2;
    standard_j(d).transpose() * xi.matrix()
}

/// Lie bracket on `sym(2d)`: `[xi, eta] = xi J^T eta - eta J^T xi`.
pub fn bracket_sym(xi: &SymElement, eta: &SymElement) -> SymElement {
    let d = xi.dim() / 2;
    let jt = standard_j(d).transpose();
    SymElement::new(xi.matrix() * &jt * eta.matrix() - eta.matrix() * &jt * xi.matrix())
}

/// Coadjoint operator `ad*_xi mu = J xi mu - mu xi J`, the trace-pairing
/// adjoint of `[xi, .]`.
pub fn ad_star(xi: &SymElement, mu: &SymElement) -> SymElement {
    let d = xi.dim() / 2;
    let j = standard_j(d);
    SymElement::new(&j * xi.matrix() * mu.matrix() - mu.matrix() * xi.matrix() * &j)
}

/// Coadjoint action `Ad*_{S^-1} mu = S mu S^T` on `sym(2d)`-valued duals.
pub fn ad_star_inv(s: &SymplecticMatrix, mu: &SymElement) -> SymElement {
    SymElement::new(s.matrix() * mu.matrix() * s.matrix().transpose())
}

/// Infinitesimal generator of the Möbius action for `xi` in `sym(2d)`:
///
/// ```text
/// dA = xi11 + xi12 A + A xi12^T + A xi22 A - B xi22 B
/// dB = B xi12^T + xi12 B + B xi22 A + A xi22 B
/// ```
pub fn infinitesimal_generator(xi: &SymElement, c: &SiegelPoint) -> TangentHd {
    let xi11 = xi.block(1, 1);
    let xi12 = xi.block(1, 2);
    let xi22 = xi.block(2, 2);
    let (a, b) = (c.a(), c.b());
    let da = &xi11 + &xi12 * a + a * xi12.transpose() + a * &xi22 * a - b * &xi22 * b;
    let db = b * xi12.transpose() + &xi12 * b + b * &xi22 * a + a * &xi22 * b;
    TangentHd::new(da, db)
}

/// Symplectic form of the Siegel upper half space evaluated on two tangents:
/// `tr(B^-1 dB1 B^-1 dA2) - tr(B^-1 dB2 B^-1 dA1)`.
pub fn omega_hd(c: &SiegelPoint, v1: &TangentHd, v2: &TangentHd) -> f64 {
    let w = c.b_inverse();
    (&w * v1.db() * &w * v2.da()).trace() - (&w * v2.db() * &w * v1.da()).trace()
}

/// Canonical one-form `theta = -tr(A d(B^-1))`, i.e.
/// `theta(v) = tr(A B^-1 dB B^-1)`; its exterior derivative is `-omega_hd`.
pub fn theta_hd(c: &SiegelPoint, v: &TangentHd) -> f64 {
    let w = c.b_inverse();
    (c.a() * &w * v.db() * &w).trace()
}

/// The (+)-Kirillov–Kostant–Souriau form `tr(mu [xi, eta]_sym)`. Its
/// pullback along [`sigma`] is [`omega_hd`].
pub fn kks_form(mu: &SymElement, xi: &SymElement, eta: &SymElement) -> f64 {
    kks_form_signed(mu, xi, eta, Sign::Plus)
}

/// Either KKS form, selected by sign.
pub fn kks_form_signed(mu: &SymElement, xi: &SymElement, eta: &SymElement, sign: Sign) -> f64 {
    sign.factor() * (mu.matrix() * bracket_sym(xi, eta).matrix()).trace()
}
