//! Nearest normal J-symplectic matrix through the Cayley transform
//! `A^C = (I - A)(I + A)^-1`, which maps normal J-symplectic matrices
//! without eigenvalue -1 onto normal J-Hamiltonian ones.

use crate::error::{Error, Result};
use crate::ham::{self, SolveOutcome};
use crate::jspace::{BlockData, JStructure};
use crate::matcore::{self, fro_norm, identity, ComplexMatrix, Tolerance};

/// `I + A` is rejected when its smallest singular value is below this
/// multiple of its Frobenius norm.
pub const SINGULARITY_CUTOFF: f64 = 1e-8;

pub fn cayley(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    matcore::ensure_square(a, "matrix")?;
    let id = identity(a.nrows());
    let inv = matcore::inverse(&(&id + a), SINGULARITY_CUTOFF).map_err(|e| match e {
        Error::Singular(msg) => Error::Singular(format!("-1 is an eigenvalue to tolerance: {msg}")),
        other => other,
    })?;
    Ok((id - a) * inv)
}

pub fn solve(
    js: &JStructure,
    x: &ComplexMatrix,
    d: &ComplexMatrix,
    at: &ComplexMatrix,
    tol: Tolerance,
) -> Result<SolveOutcome> {
    ham::check_eigen_data(x, d, tol)?;
    let dc = cayley(d)?;
    let out = ham::solve(js, x, &dc, at, tol)?;
    Ok(match out {
        SolveOutcome::Solution(mut sol) => {
            let b_hat = std::mem::replace(&mut sol.a_hat, ComplexMatrix::zeros(0, 0));
            let a_hat = cayley(&b_hat)?;
            sol.residual = fro_norm(&(at - &a_hat));
            sol.eigen_residual = fro_norm(&(&a_hat * x - x * d));
            sol.a_hat = a_hat;
            sol.reduced = Some(b_hat);
            SolveOutcome::Solution(sol)
        }
        infeasible => infeasible,
    })
}

/// Cayley image of the Hamiltonian member for `(D^C, Y11, Y12, Y22)`.
pub fn general_solution(
    bd: &BlockData,
    d: &ComplexMatrix,
    y11: &ComplexMatrix,
    y12: &ComplexMatrix,
    y22: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let dc = cayley(d)?;
    cayley(&ham::general_solution(bd, &dc, y11, y12, y22)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jspace::{is_member, StructureMode};
    use crate::matcore::{c64, diag, max_abs};
    use crate::reference;

    #[test]
    fn cayley_basics() {
        let z = ComplexMatrix::zeros(3, 3);
        assert!(max_abs(&(cayley(&z).unwrap() - identity(3))) < 1e-15);
        let inst = reference::symplectic_example();
        let dc = cayley(&inst.d).unwrap();
        assert!(max_abs(&(dc - reference::symplectic_cayley_d())) < 1e-14);
        let bad = diag(&[c64(-1.0, 0.0), c64(2.0, 0.0)]);
        assert!(matches!(cayley(&bad), Err(Error::Singular(_))));
    }

    #[test]
    fn example_solution() {
        let inst = reference::symplectic_example();
        let js = inst.structure().unwrap();
        let out = solve(&js, &inst.x, &inst.d, &inst.a_tilde, inst.tol).unwrap();
        let sol = out.solution().expect("feasible");
        assert!(max_abs(&(&sol.a_hat - reference::symplectic_solution())) < 1e-12);
        let b = sol.reduced.as_ref().unwrap();
        assert!(max_abs(&(b - reference::symplectic_reduced())) < 1e-12);
        assert!(is_member(&sol.a_hat, &js, StructureMode::Symplectic, inst.tol).unwrap());
        assert!(sol.eigen_residual < 1e-12);
    }

    #[test]
    fn minus_one_in_d_is_singular() {
        let inst = reference::symplectic_example();
        let js = inst.structure().unwrap();
        let mut d = inst.d.clone();
        d[(0, 0)] = c64(-1.0, 0.0);
        assert!(matches!(
            solve(&js, &inst.x, &d, &inst.a_tilde, inst.tol),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn general_solution_members() {
        let inst = reference::symplectic_example();
        let js = inst.structure().unwrap();
        let bd = BlockData::new(&js, &inst.x, &inst.a_tilde, inst.tol).unwrap();
        let y11 = (&bd.at.a11 - bd.at.a11.adjoint()) * c64(0.5, 0.0);
        let y22 = (&bd.at.a22 - bd.at.a22.adjoint()) * c64(0.5, 0.0);
        let a = general_solution(&bd, &inst.d, &y11, &bd.at.a12, &y22).unwrap();
        assert!(is_member(&a, &js, StructureMode::Symplectic, inst.tol).unwrap());
        assert!(is_member(&cayley(&a).unwrap(), &js, StructureMode::Hamiltonian, inst.tol).unwrap());
        assert!(fro_norm(&(&a * &inst.x - &inst.x * &inst.d)) < 1e-12);
    }

    // Here X1 and X2 restricted to the nonzero columns are invertible, so
    // Y12 = 0 forces A11 = X1 D^C X1^-1, which is not skew-hermitian.
    #[test]
    fn zero_parameters_violate_skew_condition() {
        let inst = reference::symplectic_example();
        let js = inst.structure().unwrap();
        let bd = BlockData::new(&js, &inst.x, &inst.a_tilde, inst.tol).unwrap();
        let z = ComplexMatrix::zeros(2, 2);
        assert!(matches!(
            general_solution(&bd, &inst.d, &z, &z, &z),
            Err(Error::ConditionViolated { equation: "skew", .. })
        ));
    }
}
