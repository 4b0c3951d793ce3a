//! The structure matrix J, the unitary U with `U* J U = diag(iI, -iI)`,
//! and everything expressed in that basis: the partition of X, the blocks
//! of the target, the derived projectors, membership tests and spectral
//! symmetry checks.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{self, ensure_finite, ensure_square, fro_norm, identity, max_abs, ComplexMatrix, Tolerance, I};

/// Which structured set the unknown is restricted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureMode {
    Hamiltonian,
    SkewHamiltonian,
    Symplectic,
}

impl StructureMode {
    pub const ALL: [StructureMode; 3] = [
        StructureMode::Hamiltonian,
        StructureMode::SkewHamiltonian,
        StructureMode::Symplectic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StructureMode::Hamiltonian => "hamiltonian",
            StructureMode::SkewHamiltonian => "skew_hamiltonian",
            StructureMode::Symplectic => "symplectic",
        }
    }
}

impl fmt::Display for StructureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StructureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StructureMode::ALL.into_iter().find(|m| m.as_str() == s).ok_or_else(|| {
            Error::Precondition(format!(
                "unknown mode {s:?}; expected hamiltonian, skew_hamiltonian or symplectic"
            ))
        })
    }
}

/// A validated J together with a unitary U such that
/// `U* J U = diag(iI_k, -iI_k)`.
#[derive(Debug, Clone)]
pub struct JStructure {
    j: ComplexMatrix,
    u: ComplexMatrix,
    k: usize,
}

impl JStructure {
    /// Validates `J` and builds `U` deterministically.
    pub fn new(j: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        let k = validate_j(&j, tol)?;
        let n = 2 * k;
        let plus = (identity(n) - &j * I) * Complex64::from(0.5);
        let minus = (identity(n) + &j * I) * Complex64::from(0.5);
        let mut cols = Vec::with_capacity(n);
        for (proj, label) in [(&plus, "+i"), (&minus, "-i")] {
            let found = pivoted_basis(proj, k);
            if found.len() < k {
                return Err(Error::Structure(format!(
                    "the {label} eigenspace has dimension {} but {k} is required",
                    found.len()
                )));
            }
            cols.extend(found);
        }
        let u = ComplexMatrix::from_columns(&cols);
        Self::with_unitary(j, u, tol)
    }

    /// Accepts a caller-supplied diagonalizer after checking it.
    pub fn with_unitary(j: ComplexMatrix, u: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        let k = validate_j(&j, tol)?;
        let n = 2 * k;
        if u.shape() != (n, n) {
            return Err(Error::Shape(format!(
                "U must be {n}x{n}, got {}x{}",
                u.nrows(),
                u.ncols()
            )));
        }
        ensure_finite(&u, "U")?;
        let gram = u.adjoint() * &u - identity(n);
        if max_abs(&gram) > tol.structure_atol {
            return Err(Error::Structure(format!(
                "U is not unitary (max |U*U - I| = {:.3e})",
                max_abs(&gram)
            )));
        }
        let target = canonical_form(k);
        let off = u.adjoint() * &j * &u - target;
        if max_abs(&off) > tol.structure_atol * max_abs(&j).max(1.0) {
            return Err(Error::Structure(format!(
                "U* J U differs from diag(iI, -iI) by {:.3e}",
                max_abs(&off)
            )));
        }
        Ok(JStructure { j, u, k })
    }

    pub fn j(&self) -> &ComplexMatrix {
        &self.j
    }

    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        2 * self.k
    }

    /// `U [[B11, B12], [B21, B22]] U*`.
    pub fn assemble(
        &self,
        b11: &ComplexMatrix,
        b12: &ComplexMatrix,
        b21: &ComplexMatrix,
        b22: &ComplexMatrix,
    ) -> ComplexMatrix {
        let k = self.k;
        let mut inner = ComplexMatrix::zeros(2 * k, 2 * k);
        inner.view_mut((0, 0), (k, k)).copy_from(b11);
        inner.view_mut((0, k), (k, k)).copy_from(b12);
        inner.view_mut((k, 0), (k, k)).copy_from(b21);
        inner.view_mut((k, k), (k, k)).copy_from(b22);
        &self.u * inner * self.u.adjoint()
    }
}

/// `diag(iI_k, -iI_k)`.
pub fn canonical_form(k: usize) -> ComplexMatrix {
    let d: Vec<Complex64> = (0..2 * k).map(|i| if i < k { I } else { -I }).collect();
    matcore::diag(&d)
}

pub fn build_jstructure(j: ComplexMatrix, tol: Tolerance) -> Result<JStructure> {
    JStructure::new(j, tol)
}

fn validate_j(j: &ComplexMatrix, tol: Tolerance) -> Result<usize> {
    ensure_square(j, "J")?;
    ensure_finite(j, "J")?;
    let n = j.nrows();
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::Shape(format!("J must have positive even size, got {n}")));
    }
    let scale = max_abs(j).powi(2).max(1.0);
    let sq = j * j + identity(n);
    if max_abs(&sq) > tol.structure_atol * scale {
        return Err(Error::Structure(format!(
            "J^2 = -I fails (max deviation {:.3e})",
            max_abs(&sq)
        )));
    }
    if !matcore::is_normal(j, tol)? {
        return Err(Error::Structure("J J* = J* J fails".into()));
    }
    Ok(n / 2)
}

// Orthonormal basis of the range of an orthogonal projector by Gram-Schmidt
// on its columns, always taking the residual column of largest norm (lowest
// index on ties). Each vector is phase-normalized so its largest-magnitude
// entry is real positive.
fn pivoted_basis(proj: &ComplexMatrix, want: usize) -> Vec<DVector<Complex64>> {
    let mut basis: Vec<DVector<Complex64>> = Vec::with_capacity(want);
    let mut resid = proj.clone();
    for _ in 0..want {
        let norms: Vec<f64> = resid.column_iter().map(|c| c.norm()).collect();
        let best = norms.iter().copied().fold(0.0, f64::max);
        if best < 1e-6 {
            break;
        }
        let pick = norms
            .iter()
            .position(|&v| v >= best * (1.0 - 1e-12))
            .expect("maximum exists");
        let mut v: DVector<Complex64> = resid.column(pick).into_owned();
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&v);
                v -= b * c;
            }
        }
        v /= Complex64::from(v.norm());
        normalize_phase(&mut v);
        let coeffs = v.adjoint() * &resid;
        resid -= &v * coeffs;
        basis.push(v);
    }
    basis
}

fn normalize_phase(v: &mut DVector<Complex64>) {
    let top = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if top == 0.0 {
        return;
    }
    let lead = *v
        .iter()
        .find(|z| z.norm() >= top * (1.0 - 1e-12))
        .expect("maximum exists");
    let phase = lead.conj() / lead.norm();
    *v *= phase;
}

fn check_x_rows(js: &JStructure, x: &ComplexMatrix) -> Result<()> {
    if x.nrows() != js.n() {
        return Err(Error::Shape(format!("X must have {} rows, got {}", js.n(), x.nrows())));
    }
    ensure_finite(x, "X")
}

/// Full column rank test that skips columns which are zero relative to the
/// largest column; a zero eigenvector column imposes no constraint on A.
pub fn check_x_rank(x: &ComplexMatrix, tol: Tolerance) -> Result<()> {
    let norms: Vec<f64> = x.column_iter().map(|c| c.norm()).collect();
    let top = norms.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return Err(Error::Precondition("X not full column rank (X = 0)".into()));
    }
    let live: Vec<_> = x
        .column_iter()
        .zip(&norms)
        .filter(|(_, &nv)| nv > tol.rank_cutoff * top)
        .map(|(c, _)| c.into_owned())
        .collect();
    let reduced = ComplexMatrix::from_columns(&live);
    if !matcore::has_full_column_rank(&reduced, tol)? {
        return Err(Error::Precondition("X not full column rank".into()));
    }
    Ok(())
}

/// Top and bottom `k x m` blocks of `U* X`.
pub fn partition_x(js: &JStructure, x: &ComplexMatrix, tol: Tolerance) -> Result<(ComplexMatrix, ComplexMatrix)> {
    check_x_rows(js, x)?;
    check_x_rank(x, tol)?;
    let ux = js.u.adjoint() * x;
    let k = js.k;
    Ok((ux.rows(0, k).into_owned(), ux.rows(k, k).into_owned()))
}

/// The four `k x k` tiles of `U* At U`.
#[derive(Debug, Clone)]
pub struct TargetBlocks {
    pub a11: ComplexMatrix,
    pub a12: ComplexMatrix,
    pub a21: ComplexMatrix,
    pub a22: ComplexMatrix,
}

pub fn block_target(js: &JStructure, at: &ComplexMatrix) -> Result<TargetBlocks> {
    if at.shape() != (js.n(), js.n()) {
        return Err(Error::Shape(format!(
            "target must be {n}x{n}, got {}x{}",
            at.nrows(),
            at.ncols(),
            n = js.n()
        )));
    }
    ensure_finite(at, "target")?;
    let b = js.u.adjoint() * at * &js.u;
    let k = js.k;
    Ok(TargetBlocks {
        a11: b.view((0, 0), (k, k)).into_owned(),
        a12: b.view((0, k), (k, k)).into_owned(),
        a21: b.view((k, 0), (k, k)).into_owned(),
        a22: b.view((k, k), (k, k)).into_owned(),
    })
}

/// Partition of X and of the target in the U basis, with the projectors
/// used by the solver.
///
/// `p = Q_{X1}`, `t = Q_{X2}`, `l = Q_{X2 P}`, `q = P_{X2 P}`, `r = P_{X1}`,
/// `s = P_{X2}`.
#[derive(Debug, Clone)]
pub struct BlockData {
    pub js: JStructure,
    pub x1: ComplexMatrix,
    pub x2: ComplexMatrix,
    pub at: TargetBlocks,
    pub p: ComplexMatrix,
    pub t: ComplexMatrix,
    pub l: ComplexMatrix,
    pub q: ComplexMatrix,
    pub r: ComplexMatrix,
    pub s: ComplexMatrix,
    /// `||X||_F`; floors every pseudoinverse cutoff so roundoff-sized
    /// blocks count as zero.
    pub x_scale: f64,
    pub tol: Tolerance,
}

impl BlockData {
    pub fn new(js: &JStructure, x: &ComplexMatrix, at: &ComplexMatrix, tol: Tolerance) -> Result<Self> {
        let (x1, x2) = partition_x(js, x, tol)?;
        let at = block_target(js, at)?;
        let x_scale = fro_norm(x);
        let p = matcore::proj_q_with_floor(&x1, tol, x_scale)?;
        let t = matcore::proj_q_with_floor(&x2, tol, x_scale)?;
        let x2p = &x2 * &p;
        let l = matcore::proj_q_with_floor(&x2p, tol, x_scale)?;
        let q = matcore::proj_p_with_floor(&x2p, tol, x_scale)?;
        let r = matcore::proj_p_with_floor(&x1, tol, x_scale)?;
        let s = matcore::proj_p_with_floor(&x2, tol, x_scale)?;
        Ok(BlockData {
            js: js.clone(),
            x1,
            x2,
            at,
            p,
            t,
            l,
            q,
            r,
            s,
            x_scale,
            tol,
        })
    }

    /// Pseudoinverse with the cutoff tied to `||X||_F`.
    pub fn pinv(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        matcore::pinv_with_floor(m, self.tol, self.x_scale)
    }

    pub fn m(&self) -> usize {
        self.x1.ncols()
    }

    pub fn k(&self) -> usize {
        self.x1.nrows()
    }

    pub fn x2p(&self) -> ComplexMatrix {
        &self.x2 * &self.p
    }

    /// `U [[B11, B12], [B12*, B22]] U*`.
    pub fn assemble(&self, b11: &ComplexMatrix, b12: &ComplexMatrix, b22: &ComplexMatrix) -> ComplexMatrix {
        self.js.assemble(b11, b12, &b12.adjoint(), b22)
    }

    /// Same partition with the target blocks replaced.
    pub fn with_target(&self, at: TargetBlocks) -> Self {
        BlockData { at, ..self.clone() }
    }
}

/// Normality plus the mode's defining identity; for the symplectic mode
/// also `I + A` nonsingular.
pub fn is_member(a: &ComplexMatrix, js: &JStructure, mode: StructureMode, tol: Tolerance) -> Result<bool> {
    if a.shape() != (js.n(), js.n()) {
        return Err(Error::Shape(format!(
            "matrix must be {n}x{n}, got {}x{}",
            a.nrows(),
            a.ncols(),
            n = js.n()
        )));
    }
    if !a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Ok(false);
    }
    if !matcore::is_normal(a, tol)? {
        return Ok(false);
    }
    let aj = a * &js.j;
    Ok(match mode {
        StructureMode::Hamiltonian => matcore::is_hermitian(&aj, tol)?,
        StructureMode::SkewHamiltonian => matcore::is_skew_hermitian(&aj, tol)?,
        StructureMode::Symplectic => {
            let dev = a.adjoint() * &js.j * a - &js.j;
            let scale = (max_abs(a).powi(2) * js.n() as f64).max(1.0);
            let ipa = identity(js.n()) + a;
            let sv = matcore::singular_values(&ipa)?;
            let smin = sv.last().copied().unwrap_or(0.0);
            max_abs(&dev) <= tol.structure_atol * scale && smin > 1e-8 * fro_norm(&ipa)
        }
    })
}

/// Whether the diagonal of `D` is closed under the mode's spectral
/// symmetry, as multisets matched greedily within tolerance.
pub fn check_spectrum_symmetry(d: &ComplexMatrix, mode: StructureMode, tol: Tolerance) -> Result<bool> {
    if !matcore::is_diagonal(d, tol) {
        return Err(Error::Precondition("D must be diagonal".into()));
    }
    let vals: Vec<Complex64> = d.diagonal().iter().copied().collect();
    let ok = match mode {
        StructureMode::Hamiltonian => multiset_closed(&vals, |z| -z.conj(), tol),
        StructureMode::SkewHamiltonian => multiset_closed(&vals, |z| z.conj(), tol),
        StructureMode::Symplectic => {
            let bad = vals
                .iter()
                .any(|z| z.norm() <= tol.structure_atol || (z + 1.0).norm() <= tol.structure_atol);
            !bad && multiset_closed(&vals, |z| z.conj(), tol)
                && multiset_closed(&vals, |z| z.inv(), tol)
                && multiset_closed(&vals, |z| z.inv().conj(), tol)
        }
    };
    Ok(ok)
}

fn multiset_closed(vals: &[Complex64], map: impl Fn(Complex64) -> Complex64, tol: Tolerance) -> bool {
    let mut used = vec![false; vals.len()];
    vals.iter().all(|&z| {
        let target = map(z);
        let eps = tol.structure_atol * target.norm().max(1.0);
        match (0..vals.len()).find(|&i| !used[i] && (vals[i] - target).norm() <= eps) {
            Some(i) => {
                used[i] = true;
                true
            }
            None => false,
        }
    })
}
