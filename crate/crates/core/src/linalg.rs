//! Small dense linear-algebra helpers shared across the crate: block
//! assembly, symmetric eigendecomposition-based matrix functions, the
//! complex right-division used by Möbius actions (done on real/imaginary
//! blocks), and a scaling-and-squaring matrix exponential.

use crate::error::{CoreError, Result};
use crate::fmath;
use nalgebra::{DMatrix, DVector};

/// Condition-number limit beyond which inverses and square roots are refused.
pub const COND_LIMIT: f64 = 1e12;

/// `(M + M^T) / 2`.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// `max_ij |M_ij - M_ji|`.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max(fmath::abs(m[(i, j)] - m[(j, i)]));
        }
    }
    worst
}

/// `max_ij |M_ij|`.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, &x| acc.max(fmath::abs(x)))
}

/// `max_i |v_i|`.
pub fn max_abs_vec(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0_f64, |acc, &x| acc.max(fmath::abs(x)))
}

/// The standard symplectic unit `J = [[0, I], [-I, 0]]` of size `2d`.
pub fn standard_j(d: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        j[(i, d + i)] = 1.0;
        j[(d + i, i)] = -1.0;
    }
    j
}

/// `max_ij |(S^T J S - J)_ij|` for a `2d x 2d` matrix.
pub fn symplectic_residual(s: &DMatrix<f64>) -> f64 {
    let d = s.nrows() / 2;
    let j = standard_j(d);
    max_abs(&(s.transpose() * &j * s - &j))
}

/// Assemble `[[m11, m12], [m21, m22]]` from four `d x d` blocks.
pub fn block2x2(
    m11: &DMatrix<f64>,
    m12: &DMatrix<f64>,
    m21: &DMatrix<f64>,
    m22: &DMatrix<f64>,
) -> DMatrix<f64> {
    let d = m11.nrows();
    let mut out = DMatrix::zeros(2 * d, 2 * d);
    out.view_mut((0, 0), (d, d)).copy_from(m11);
    out.view_mut((0, d), (d, d)).copy_from(m12);
    out.view_mut((d, 0), (d, d)).copy_from(m21);
    out.view_mut((d, d), (d, d)).copy_from(m22);
    out
}

/// Extract the `(i, j)` block of a `2d x 2d` matrix (`i, j` in `{0, 1}`).
pub fn block_of(m: &DMatrix<f64>, i: usize, j: usize) -> DMatrix<f64> {
    let d = m.nrows() / 2;
    m.view((i * d, j * d), (d, d)).into_owned()
}

/// Eigendecomposition of a symmetric positive-definite matrix, used to apply
/// matrix powers (`-1`, `1/2`, `-1/2`) with a single factorization.
pub struct SpdFactor {
    basis: DMatrix<f64>,
    eigs: DVector<f64>,
}

impl SpdFactor {
    /// Factor `m`; fails when `m` has a non-positive eigenvalue or its
    /// condition number exceeds [`COND_LIMIT`].
    pub fn new(context: &'static str, m: &DMatrix<f64>) -> Result<Self> {
        let se = symmetrize(m).symmetric_eigen();
        let mut min = f64::INFINITY;
        let mut max = 0.0_f64;
        for &l in se.eigenvalues.iter() {
            min = min.min(l);
            max = max.max(fmath::abs(l));
        }
        if min <= 0.0 {
            return Err(CoreError::NotPositiveDefinite {
                context,
                min_eig: min,
            });
        }
        let cond = max / min;
        if cond > COND_LIMIT {
            return Err(CoreError::IllConditioned {
                context,
                cond,
                limit: COND_LIMIT,
            });
        }
        Ok(Self {
            basis: se.eigenvectors,
            eigs: se.eigenvalues,
        })
    }

    fn apply(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let scaled = DMatrix::from_diagonal(&self.eigs.map(f));
        symmetrize(&(&self.basis * scaled * self.basis.transpose()))
    }

    pub fn inverse(&self) -> DMatrix<f64> {
        self.apply(|l| 1.0 / l)
    }

    pub fn sqrt(&self) -> DMatrix<f64> {
        self.apply(fmath::sqrt)
    }

    pub fn inv_sqrt(&self) -> DMatrix<f64> {
        self.apply(|l| 1.0 / fmath::sqrt(l))
    }
}

/// Inverse of a symmetric positive-definite matrix.
pub fn spd_inverse(context: &'static str, m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(SpdFactor::new(context, m)?.inverse())
}

/// The unique symmetric positive-definite square root.
pub fn spd_sqrt(context: &'static str, m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(SpdFactor::new(context, m)?.sqrt())
}

/// Smallest eigenvalue of a symmetric matrix (monitor; never fails).
pub fn min_eig_sym(m: &DMatrix<f64>) -> f64 {
    let se = symmetrize(m).symmetric_eigen();
    se.eigenvalues.iter().fold(f64::INFINITY, |a, &l| a.min(l))
}

/// Solve `A X = B` by LU with partial pivoting; `None` when `A` is singular.
pub fn solve(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    a.clone().lu().solve(b)
}

/// Complex right division `(Nr + i Ni) (Dr + i Di)^{-1}` carried out as one
/// real `2d x 2d` solve on the transposed system, returning `(Xr, Xi)`.
pub fn complex_right_divide(
    nr: &DMatrix<f64>,
    ni: &DMatrix<f64>,
    dr: &DMatrix<f64>,
    di: &DMatrix<f64>,
) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
    // X D = N transposes to D^T X^T = N^T; stack real and imaginary parts.
    let d = nr.nrows();
    let mut lhs = DMatrix::zeros(2 * d, 2 * d);
    lhs.view_mut((0, 0), (d, d)).copy_from(&dr.transpose());
    lhs.view_mut((0, d), (d, d)).copy_from(&(-di.transpose()));
    lhs.view_mut((d, 0), (d, d)).copy_from(&di.transpose());
    lhs.view_mut((d, d), (d, d)).copy_from(&dr.transpose());
    let mut rhs = DMatrix::zeros(2 * d, d);
    rhs.view_mut((0, 0), (d, d)).copy_from(&nr.transpose());
    rhs.view_mut((d, 0), (d, d)).copy_from(&ni.transpose());
    let sol = lhs.lu().solve(&rhs)?;
    let xr = sol.view((0, 0), (d, d)).transpose().into_owned();
    let xi = sol.view((d, 0), (d, d)).transpose().into_owned();
    Some((xr, xi))
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
/// The argument is scaled to infinity-norm below 1/4, where 16 terms reach
/// machine precision.
pub fn expm(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    let norm = (0..n).fold(0.0_f64, |acc, i| {
        acc.max((0..n).map(|j| fmath::abs(x[(i, j)])).sum())
    });
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let xs = x * scale;
    let mut term = DMatrix::identity(n, n);
    let mut acc = DMatrix::identity(n, n);
    for k in 1..=16 {
        term = &term * &xs / k as f64;
        acc += &term;
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j_squares_to_minus_identity() {
        let j = standard_j(3);
        assert_eq!(&j * &j, -DMatrix::<f64>::identity(6, 6));
        assert_eq!(j.transpose(), -&j);
    }

    #[test]
    fn spd_roots_and_inverses() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let f = SpdFactor::new("test", &m).unwrap();
        assert!(max_abs(&(f.sqrt() * f.sqrt() - &m)) < 1e-14);
        assert!(max_abs(&(f.inverse() * &m - DMatrix::identity(2, 2))) < 1e-14);
        assert!(max_abs(&(f.inv_sqrt() * f.sqrt() - DMatrix::identity(2, 2))) < 1e-14);
    }

    #[test]
    fn spd_rejects_indefinite() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(
            SpdFactor::new("test", &m),
            Err(CoreError::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn complex_division_against_hand_case() {
        // (1 + 2i) / (3 + 4i) = (11 + 2i) / 25 in the 1x1 case.
        let one = |x: f64| DMatrix::from_row_slice(1, 1, &[x]);
        let (xr, xi) = complex_right_divide(&one(1.0), &one(2.0), &one(3.0), &one(4.0)).unwrap();
        assert!((xr[(0, 0)] - 11.0 / 25.0).abs() < 1e-15);
        assert!((xi[(0, 0)] - 2.0 / 25.0).abs() < 1e-15);
    }

    #[test]
    fn expm_matches_rotation() {
        // exp(t J) in 2x2 is a rotation by t.
        let t = 0.7_f64;
        let x = standard_j(1) * t;
        let e = expm(&x);
        let expected = DMatrix::from_row_slice(2, 2, &[t.cos(), t.sin(), -t.sin(), t.cos()]);
        assert!(max_abs(&(e - expected)) < 1e-15);
    }

    #[test]
    fn expm_inverse_is_negative_argument() {
        let x = DMatrix::from_row_slice(2, 2, &[0.3, 1.1, -0.4, 0.2]);
        let prod = expm(&x) * expm(&(-&x));
        assert!(max_abs(&(prod - DMatrix::identity(2, 2))) < 1e-14);
    }
}
