//! Dense complex matrix kernels: SVD pseudoinverse, the orthogonal
//! projectors built from it, Frobenius geometry and tolerance-aware
//! structure predicates.
//!
//! Every routine is a pure function of its arguments.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row/column complex matrix used for every operand in the crate.
pub type ComplexMatrix = DMatrix<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Thresholds shared by rank decisions and structure checks.
///
/// `rank_cutoff` is relative: singular values below `rank_cutoff * sigma_max`
/// count as zero. `structure_atol` is the entrywise threshold used by the
/// predicates and, after scaling by the size of the inputs, by the
/// feasibility conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rank_cutoff: f64,
    pub structure_atol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rank_cutoff: 1e-10,
            structure_atol: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(rank_cutoff: f64, structure_atol: f64) -> Result<Self> {
        let tol = Tolerance {
            rank_cutoff,
            structure_atol,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank_cutoff", self.rank_cutoff),
            ("structure_atol", self.structure_atol),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Precondition(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        Ok(())
    }
}

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Builds a matrix from row slices. Panics on ragged input; meant for
/// literals in tests and reference data.
pub fn from_rows(rows: &[Vec<Complex64>]) -> ComplexMatrix {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
    DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j])
}

pub fn identity(n: usize) -> ComplexMatrix {
    DMatrix::identity(n, n)
}

pub fn diag(values: &[Complex64]) -> ComplexMatrix {
    DMatrix::from_diagonal(&DVector::from_column_slice(values))
}

pub fn ensure_finite(m: &ComplexMatrix, name: &str) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{name} has non-finite entries")))
    }
}

pub fn ensure_square(m: &ComplexMatrix, name: &str) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::Shape(format!(
            "{name} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )))
    }
}

/// Largest entry modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn fro_norm(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Full singular value decomposition `M = U diag(s) V*` with `s`
/// descending.
///
/// nalgebra's bidiagonal SVD occasionally returns factors that do not
/// reproduce a rank-deficient input, so factorizations go through faer.
pub(crate) struct Svd<T> {
    pub u: DMatrix<T>,
    pub s: Vec<f64>,
    pub v: DMatrix<T>,
}

fn no_convergence(m: (usize, usize)) -> Error {
    Error::Numerical(format!("SVD of a {}x{} matrix did not converge", m.0, m.1))
}

pub(crate) fn svd(m: &ComplexMatrix) -> Result<Svd<Complex64>> {
    let a = faer::Mat::<faer::c64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    let dec = a.svd().map_err(|_| no_convergence(m.shape()))?;
    let (u, v) = (dec.U(), dec.V());
    Ok(Svd {
        u: DMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)]),
        s: dec.S().column_vector().iter().map(|z| z.re).collect(),
        v: DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)]),
    })
}

pub(crate) fn real_svd(m: &DMatrix<f64>) -> Result<Svd<f64>> {
    let a = faer::Mat::<f64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    let dec = a.svd().map_err(|_| no_convergence(m.shape()))?;
    let (u, v) = (dec.U(), dec.V());
    Ok(Svd {
        u: DMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)]),
        s: dec.S().column_vector().iter().copied().collect(),
        v: DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)]),
    })
}

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if m.is_empty() {
        return Ok(Vec::new());
    }
    Ok(svd(m)?.s)
}

/// Moore–Penrose inverse with a relative cutoff `rank_cutoff * sigma_max`.
pub fn pinv(m: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    pinv_with_floor(m, tol, 0.0)
}

/// Pseudoinverse whose cutoff is `rank_cutoff * max(sigma_max, reference)`.
///
/// Blocks such as `X2 * Q_{X1}` are often exactly zero in exact arithmetic
/// and come out at roundoff level in floating point; a cutoff relative only
/// to the block itself would invert that noise. `reference` ties the cutoff
/// to the scale of the data the block was formed from.
pub fn pinv_with_floor(m: &ComplexMatrix, tol: Tolerance, reference: f64) -> Result<ComplexMatrix> {
    ensure_finite(m, "pinv argument")?;
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return Ok(DMatrix::zeros(c, r));
    }
    let dec = svd(m)?;
    let smax = dec.s.first().copied().unwrap_or(0.0);
    let cutoff = tol.rank_cutoff * smax.max(reference);

    let mut out = DMatrix::zeros(c, r);
    for (idx, &s) in dec.s.iter().enumerate() {
        if s > cutoff && s > 0.0 {
            out += (dec.v.column(idx) * dec.u.column(idx).adjoint()) * Complex64::from(1.0 / s);
        }
    }
    Ok(out)
}

/// `Q_M = I - M^+ M`, the orthogonal projector onto the null space of `M`.
pub fn proj_q(m: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    proj_q_with_floor(m, tol, 0.0)
}

/// `P_M = I - M M^+`, the orthogonal projector onto the complement of the
/// range of `M`.
pub fn proj_p(m: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    proj_p_with_floor(m, tol, 0.0)
}

pub fn proj_q_with_floor(m: &ComplexMatrix, tol: Tolerance, reference: f64) -> Result<ComplexMatrix> {
    let p = pinv_with_floor(m, tol, reference)?;
    Ok(identity(m.ncols()) - p * m)
}

pub fn proj_p_with_floor(m: &ComplexMatrix, tol: Tolerance, reference: f64) -> Result<ComplexMatrix> {
    let p = pinv_with_floor(m, tol, reference)?;
    Ok(identity(m.nrows()) - m * p)
}

/// `||M - M^*||_F`.
pub fn hermitian_residual(m: &ComplexMatrix) -> f64 {
    fro_norm(&(m - m.adjoint()))
}

/// `||M + M^*||_F`.
pub fn skew_hermitian_residual(m: &ComplexMatrix) -> f64 {
    fro_norm(&(m + m.adjoint()))
}

/// `||M M^* - M^* M||_F`.
pub fn normality_residual(m: &ComplexMatrix) -> f64 {
    let adj = m.adjoint();
    fro_norm(&(m * &adj - &adj * m))
}

// Entrywise comparisons are relative to the largest entry of the operand
// (or its square for the quadratic normality identity), floored at 1.
fn entrywise_ok(residual: &ComplexMatrix, scale: f64, tol: Tolerance) -> bool {
    max_abs(residual) <= tol.structure_atol * scale.max(1.0)
}

pub fn is_hermitian(m: &ComplexMatrix, tol: Tolerance) -> Result<bool> {
    ensure_square(m, "matrix")?;
    Ok(entrywise_ok(&(m - m.adjoint()), max_abs(m), tol))
}

pub fn is_skew_hermitian(m: &ComplexMatrix, tol: Tolerance) -> Result<bool> {
    ensure_square(m, "matrix")?;
    Ok(entrywise_ok(&(m + m.adjoint()), max_abs(m), tol))
}

pub fn is_normal(m: &ComplexMatrix, tol: Tolerance) -> Result<bool> {
    ensure_square(m, "matrix")?;
    let adj = m.adjoint();
    let scale = max_abs(m).powi(2) * m.nrows() as f64;
    Ok(entrywise_ok(&(m * &adj - &adj * m), scale, tol))
}

/// True when `P` is square, hermitian and idempotent to tolerance.
pub fn is_orthogonal_projector(p: &ComplexMatrix, tol: Tolerance) -> bool {
    p.is_square() && entrywise_ok(&(p - p.adjoint()), 1.0, tol) && entrywise_ok(&(p * p - p), 1.0, tol)
}

pub fn is_diagonal(m: &ComplexMatrix, tol: Tolerance) -> bool {
    let scale = max_abs(m).max(1.0);
    m.is_square()
        && m.iter().enumerate().all(|(idx, z)| {
            let (i, j) = (idx % m.nrows(), idx / m.nrows());
            i == j || z.norm() <= tol.structure_atol * scale
        })
}

/// `||B - P1 B P2||_F`, the minimum of `||B - P1 E P2||_F` over all `E`
/// when `P1`, `P2` are orthogonal projectors.
pub fn lemma1_min_norm(b: &ComplexMatrix, p1: &ComplexMatrix, p2: &ComplexMatrix, tol: Tolerance) -> Result<f64> {
    if p1.nrows() != b.nrows() || p2.ncols() != b.ncols() {
        return Err(Error::Shape(format!(
            "projectors {}x{} and {}x{} do not fit a {}x{} matrix",
            p1.nrows(),
            p1.ncols(),
            p2.nrows(),
            p2.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    if !is_orthogonal_projector(p1, tol) || !is_orthogonal_projector(p2, tol) {
        return Err(Error::Precondition("arguments must be hermitian idempotents".into()));
    }
    Ok(fro_norm(&(b - p1 * b * p2)))
}

/// Dense inverse through LU with partial pivoting.
///
/// Rejects matrices whose smallest singular value is below
/// `rel_cutoff * ||M||_F`.
pub fn inverse(m: &ComplexMatrix, rel_cutoff: f64) -> Result<ComplexMatrix> {
    ensure_square(m, "matrix")?;
    ensure_finite(m, "matrix")?;
    let sv = singular_values(m)?;
    let smin = sv.last().copied().unwrap_or(0.0);
    if smin <= rel_cutoff * fro_norm(m) {
        return Err(Error::Singular(format!(
            "smallest singular value {smin:.3e} is below {rel_cutoff:.0e} x norm"
        )));
    }
    m.clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Singular("LU factorization broke down".into()))
}

/// True when the smallest singular value of `X` exceeds
/// `rank_cutoff * sigma_max`.
pub fn has_full_column_rank(x: &ComplexMatrix, tol: Tolerance) -> Result<bool> {
    if x.ncols() == 0 {
        return Ok(true);
    }
    if x.ncols() > x.nrows() {
        return Ok(false);
    }
    let sv = singular_values(x)?;
    let smax = sv.first().copied().unwrap_or(0.0);
    let smin = sv.last().copied().unwrap_or(0.0);
    Ok(smax > 0.0 && smin > tol.rank_cutoff * smax)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, eps: f64) -> bool {
        a.shape() == b.shape() && max_abs(&(a - b)) <= eps
    }

    #[test]
    fn pinv_of_identity_and_zero() {
        assert!(close(&pinv(&identity(3), tol()).unwrap(), &identity(3), 1e-14));
        let z = ComplexMatrix::zeros(2, 3);
        let p = pinv(&z, tol()).unwrap();
        assert_eq!(p.shape(), (3, 2));
        assert_eq!(max_abs(&p), 0.0);
    }

    #[test]
    fn pinv_penrose_equations_on_rectangular_block() {
        let x2 = from_rows(&[
            vec![c64(1.0, -1.0), c64(1.0, 1.0), c64(0.0, 0.0)],
            vec![c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)],
        ]);
        let p = pinv(&x2, tol()).unwrap();
        assert!(close(&(&x2 * &p * &x2), &x2, 1e-12));
        assert!(close(&(&p * &x2 * &p), &p, 1e-12));
        let mp = &x2 * &p;
        let pm = &p * &x2;
        assert!(close(&mp.adjoint(), &mp, 1e-12));
        assert!(close(&pm.adjoint(), &pm, 1e-12));
    }

    #[test]
    fn projectors_of_trivial_arguments() {
        assert!(max_abs(&proj_q(&identity(4), tol()).unwrap()) < 1e-14);
        assert!(max_abs(&proj_p(&identity(4), tol()).unwrap()) < 1e-14);
        assert!(close(
            &proj_q(&ComplexMatrix::zeros(2, 3), tol()).unwrap(),
            &identity(3),
            0.0
        ));
    }

    #[test]
    fn projectors_of_first_block() {
        let z = c64(0.0, 0.0);
        let x1 = from_rows(&[vec![c64(1.0, 1.0), c64(1.0, -1.0), z], vec![z, z, z]]);
        let q = proj_q(&x1, tol()).unwrap();
        let expected = from_rows(&[
            vec![c64(0.5, 0.0), c64(0.0, 0.5), z],
            vec![c64(0.0, -0.5), c64(0.5, 0.0), z],
            vec![z, z, c64(1.0, 0.0)],
        ]);
        assert!(close(&q, &expected, 1e-14));
        let r = proj_p(&x1, tol()).unwrap();
        assert!(close(&r, &diag(&[z, c64(1.0, 0.0)]), 1e-14));
    }

    #[test]
    fn fro_norm_basics() {
        assert_eq!(fro_norm(&ComplexMatrix::zeros(3, 3)), 0.0);
        assert!((fro_norm(&identity(4)) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn structure_predicates() {
        let s3 = 3f64.sqrt();
        let m = from_rows(&[
            vec![c64(0.0, -2.0), c64(0.0, -2.0 * s3)],
            vec![c64(0.0, -2.0 * s3), c64(0.0, 2.0)],
        ]);
        assert!(is_skew_hermitian(&m, tol()).unwrap());
        assert!(!is_hermitian(&m, tol()).unwrap());
        let ii = identity(3) * I;
        assert!(!is_hermitian(&ii, tol()).unwrap());
        assert!(is_skew_hermitian(&ii, tol()).unwrap());
        assert!(is_normal(&ii, tol()).unwrap());
        let jordan = from_rows(&[vec![c64(1.0, 0.0), c64(1.0, 0.0)], vec![c64(0.0, 0.0), c64(1.0, 0.0)]]);
        assert!(!is_normal(&jordan, tol()).unwrap());
        assert!(matches!(
            is_normal(&ComplexMatrix::zeros(2, 3), tol()),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn lemma1_trivial_projectors() {
        let b = from_rows(&[vec![c64(1.0, 2.0), c64(-3.0, 0.5)], vec![c64(0.0, 1.0), c64(2.0, -1.0)]]);
        let id = identity(2);
        let zero = ComplexMatrix::zeros(2, 2);
        assert!(lemma1_min_norm(&b, &id, &id, tol()).unwrap() < 1e-15);
        let v = lemma1_min_norm(&b, &zero, &zero, tol()).unwrap();
        assert!((v - fro_norm(&b)).abs() < 1e-15);
        let not_proj = &id * c64(2.0, 0.0);
        assert!(matches!(
            lemma1_min_norm(&b, &not_proj, &id, tol()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn tolerance_bounds() {
        assert!(Tolerance::new(0.0, 1e-9).is_err());
        assert!(Tolerance::new(1e-10, 1.0).is_err());
        assert!(Tolerance::new(1e-10, 1e-9).is_ok());
    }

    #[test]
    fn inverse_rejects_singular() {
        let m = from_rows(&[vec![c64(1.0, 0.0), c64(2.0, 0.0)], vec![c64(2.0, 0.0), c64(4.0, 0.0)]]);
        assert!(matches!(inverse(&m, 1e-8), Err(Error::Singular(_))));
        let inv = inverse(&identity(3), 1e-8).unwrap();
        assert!(close(&inv, &identity(3), 1e-15));
    }
}
