//! A complete problem: structure matrix, eigenpairs, target, mode and
//! tolerances.

use crate::error::{Error, Result};
use crate::ham::{self, SolveOutcome};
use crate::jspace::{self, JStructure, StructureMode};
use crate::matcore::{ensure_finite, ComplexMatrix, Tolerance};
use crate::{skewham, symplectic};

#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub mode: StructureMode,
    pub j: ComplexMatrix,
    pub x: ComplexMatrix,
    pub d: ComplexMatrix,
    pub a_tilde: ComplexMatrix,
    pub tol: Tolerance,
    pub audit_samples: Option<usize>,
    pub seed: Option<u64>,
}

impl ProblemInstance {
    /// Checks dimensions, finiteness, the diagonal form of `D` and the rank
    /// of `X`.
    pub fn new(
        mode: StructureMode,
        j: ComplexMatrix,
        x: ComplexMatrix,
        d: ComplexMatrix,
        a_tilde: ComplexMatrix,
        tol: Tolerance,
    ) -> Result<Self> {
        let inst = ProblemInstance {
            mode,
            j,
            x,
            d,
            a_tilde,
            tol,
            audit_samples: None,
            seed: None,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        self.tol.validate()?;
        for (name, m) in [
            ("J", &self.j),
            ("X", &self.x),
            ("D", &self.d),
            ("A_tilde", &self.a_tilde),
        ] {
            ensure_finite(m, name)?;
        }
        let n = self.j.nrows();
        if self.j.ncols() != n || n == 0 || !n.is_multiple_of(2) {
            return Err(Error::Shape(format!(
                "J must be square of positive even size, got {}x{}",
                self.j.nrows(),
                self.j.ncols()
            )));
        }
        if self.x.nrows() != n {
            return Err(Error::Shape(format!("X must have {n} rows, got {}", self.x.nrows())));
        }
        if self.a_tilde.shape() != (n, n) {
            return Err(Error::Shape(format!(
                "A_tilde must be {n}x{n}, got {}x{}",
                self.a_tilde.nrows(),
                self.a_tilde.ncols()
            )));
        }
        ham::check_eigen_data(&self.x, &self.d, self.tol)?;
        jspace::check_x_rank(&self.x, self.tol)
    }

    pub fn n(&self) -> usize {
        self.j.nrows()
    }

    pub fn m(&self) -> usize {
        self.x.ncols()
    }

    pub fn k(&self) -> usize {
        self.n() / 2
    }

    pub fn structure(&self) -> Result<JStructure> {
        JStructure::new(self.j.clone(), self.tol)
    }

    pub fn solve(&self) -> Result<SolveOutcome> {
        let js = self.structure()?;
        self.solve_with(&js)
    }

    /// Solves with a caller-chosen diagonalizer of `J`.
    pub fn solve_with(&self, js: &JStructure) -> Result<SolveOutcome> {
        let (x, d, at, tol) = (&self.x, &self.d, &self.a_tilde, self.tol);
        match self.mode {
            StructureMode::Hamiltonian => ham::solve(js, x, d, at, tol),
            StructureMode::SkewHamiltonian => skewham::solve(js, x, d, at, tol),
            StructureMode::Symplectic => symplectic::solve(js, x, d, at, tol),
        }
    }

    /// Copy with a different target.
    pub fn with_target(&self, a_tilde: ComplexMatrix) -> Result<Self> {
        let mut out = self.clone();
        out.a_tilde = a_tilde;
        out.validate()?;
        Ok(out)
    }
}
