//! Nearest normal skew-J-Hamiltonian matrix.
//!
//! `A` is normal skew-J-Hamiltonian with `AX = XD` exactly when `iA` is
//! normal J-Hamiltonian with `(iA)X = X(iD)`, and `||At - A|| = ||iAt - iA||`,
//! so the problem is solved on `(iD, iAt)` and rotated back.

use crate::error::{Error, Result};
use crate::ham::{self, FeasibilityReport, Flavor, SolveOutcome};
use crate::jspace::{BlockData, JStructure};
use crate::matcore::{self, fro_norm, ComplexMatrix, Tolerance, I};

pub fn solve(
    js: &JStructure,
    x: &ComplexMatrix,
    d: &ComplexMatrix,
    at: &ComplexMatrix,
    tol: Tolerance,
) -> Result<SolveOutcome> {
    ham::check_eigen_data(x, d, tol)?;
    let out = ham::solve(js, x, &(d * I), &(at * I), tol)?;
    Ok(match out {
        SolveOutcome::Solution(mut sol) => {
            let b_hat = std::mem::replace(&mut sol.a_hat, ComplexMatrix::zeros(0, 0));
            let a_hat = &b_hat * -I;
            sol.residual = fro_norm(&(at - &a_hat));
            sol.eigen_residual = fro_norm(&(&a_hat * x - x * d));
            sol.a_hat = a_hat;
            sol.reduced = Some(b_hat);
            SolveOutcome::Solution(sol)
        }
        infeasible => infeasible,
    })
}

/// Conditions on the untransformed data: hermitian diagonal blocks and
/// Gram matrix, coupling `(At12 + At21*) Q`.
pub fn check_feasibility(bd: &BlockData, d: &ComplexMatrix) -> Result<FeasibilityReport> {
    ham::check_feasibility(bd, d, Flavor::Hermitian)
}

/// Member of the skew-Hamiltonian solution set for hermitian `Y11`, `Y22`
/// and arbitrary `Y12`, obtained as `-i` times the Hamiltonian member for
/// `(iD, iY11, iY12, iY22)`.
pub fn general_solution(
    bd: &BlockData,
    d: &ComplexMatrix,
    y11: &ComplexMatrix,
    y12: &ComplexMatrix,
    y22: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    for (name, y) in [("Y11", y11), ("Y22", y22)] {
        if !y.is_square() || !matcore::is_hermitian(y, bd.tol)? {
            return Err(Error::Precondition(format!("{name} must be hermitian")));
        }
    }
    let b = ham::general_solution(bd, &(d * I), &(y11 * I), &(y12 * I), &(y22 * I))?;
    Ok(b * -I)
}
