//! Nearest normal J-Hamiltonian matrix with prescribed eigenpairs.
//!
//! Everything here works in the basis where `U* J U = diag(iI, -iI)`, so a
//! normal J-Hamiltonian matrix is `U [[A11, A12], [A12*, A22]] U*` with
//! skew-hermitian diagonal blocks and `A11 A12 = A12 A22`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jspace::{BlockData, JStructure};
use crate::matcore::{self, fro_norm, is_diagonal, ComplexMatrix, Tolerance};

/// Structure required of the diagonal target blocks and the Gram matrix.
///
/// `SkewHermitian` is the Hamiltonian setting. `Hermitian` is the
/// skew-Hamiltonian setting expressed on the untransformed data; its
/// residuals coincide with the `SkewHermitian` ones evaluated on `(iD, iA)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    SkewHermitian,
    Hermitian,
}

impl Flavor {
    fn structure_residual(self, m: &ComplexMatrix) -> f64 {
        match self {
            Flavor::SkewHermitian => matcore::skew_hermitian_residual(m),
            Flavor::Hermitian => matcore::hermitian_residual(m),
        }
    }

    // Sign in front of the adjoint in the coupling and in N.
    fn sign(self) -> f64 {
        match self {
            Flavor::SkewHermitian => -1.0,
            Flavor::Hermitian => 1.0,
        }
    }
}

/// Residual norm of one condition and the threshold it is compared to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Condition {
    pub residual: f64,
    pub threshold: f64,
}

impl Condition {
    pub fn passed(&self) -> bool {
        self.residual <= self.threshold
    }
}

/// Keys of [`FeasibilityReport::entries`] with their algorithm step, in
/// evaluation order.
pub const CONDITION_KEYS: [(&str, &str); 9] = [
    ("skew_At11", "7"),
    ("skew_At22", "7"),
    ("skew_gram", "8"),
    ("coupling", "9"),
    ("cond1", "9"),
    ("cond22", "10"),
    ("cond33", "10"),
    ("skew_blocks", "15"),
    ("commute", "15"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    /// Structure of the (1,1) target block.
    pub skew_at11: Condition,
    pub skew_at22: Condition,
    /// Structure of `X1* X1 D - X2* X2 D`.
    pub skew_gram: Condition,
    /// `(At12 -+ At21*) Q`.
    pub coupling: Condition,
    /// `X1 D P L`.
    pub cond1: Condition,
    /// `M P`.
    pub cond22: Condition,
    /// `N T`.
    pub cond33: Condition,
    /// Skew-hermitian residual of the computed diagonal blocks; filled
    /// once the blocks exist.
    pub skew_blocks: Option<Condition>,
    /// `A11 A12 - A12 A22`; filled once the blocks exist.
    pub commute: Option<Condition>,
}

impl FeasibilityReport {
    pub fn entries(&self) -> [(&'static str, &'static str, Option<Condition>); 9] {
        let vals = [
            Some(self.skew_at11),
            Some(self.skew_at22),
            Some(self.skew_gram),
            Some(self.coupling),
            Some(self.cond1),
            Some(self.cond22),
            Some(self.cond33),
            self.skew_blocks,
            self.commute,
        ];
        let mut out = [("", "", None); 9];
        for (slot, ((key, step), v)) in out.iter_mut().zip(CONDITION_KEYS.iter().zip(vals)) {
            *slot = (*key, *step, v);
        }
        out
    }

    /// Step label of the first failing condition in algorithm order.
    pub fn first_failure(&self) -> Option<&'static str> {
        self.entries()
            .into_iter()
            .find(|(_, _, c)| c.is_some_and(|c| !c.passed()))
            .map(|(_, step, _)| step)
    }

    pub fn all_passed(&self) -> bool {
        self.commute.is_some() && self.skew_blocks.is_some() && self.first_failure().is_none()
    }

    pub fn get(&self, key: &str) -> Option<Condition> {
        self.entries()
            .into_iter()
            .find(|(k, _, _)| *k == key)
            .and_then(|(_, _, c)| c)
    }
}

/// The three independent blocks of the optimum in the U basis.
#[derive(Debug, Clone)]
pub struct HamBlocks {
    pub a11: ComplexMatrix,
    pub a12: ComplexMatrix,
    pub a22: ComplexMatrix,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub a_hat: ComplexMatrix,
    /// `||At - A_hat||_F`.
    pub residual: f64,
    /// `||A_hat X - X D||_F`.
    pub eigen_residual: f64,
    pub report: FeasibilityReport,
    /// Hamiltonian optimum of the transformed problem for the skew and
    /// symplectic modes.
    pub reduced: Option<ComplexMatrix>,
}

#[derive(Debug, Clone)]
pub enum SolveOutcome {
    Solution(Solution),
    Infeasible {
        report: FeasibilityReport,
        failed_step: &'static str,
    },
}

impl SolveOutcome {
    pub fn solution(&self) -> Option<&Solution> {
        match self {
            SolveOutcome::Solution(s) => Some(s),
            SolveOutcome::Infeasible { .. } => None,
        }
    }

    pub fn into_solution(self) -> Option<Solution> {
        match self {
            SolveOutcome::Solution(s) => Some(s),
            SolveOutcome::Infeasible { .. } => None,
        }
    }

    pub fn report(&self) -> &FeasibilityReport {
        match self {
            SolveOutcome::Solution(s) => &s.report,
            SolveOutcome::Infeasible { report, .. } => report,
        }
    }

    pub fn failed_step(&self) -> Option<&'static str> {
        match self {
            SolveOutcome::Solution(_) => None,
            SolveOutcome::Infeasible { failed_step, .. } => Some(failed_step),
        }
    }
}

pub(crate) fn check_eigen_data(x: &ComplexMatrix, d: &ComplexMatrix, tol: Tolerance) -> Result<()> {
    if d.shape() != (x.ncols(), x.ncols()) {
        return Err(Error::Shape(format!(
            "D must be {m}x{m}, got {}x{}",
            d.nrows(),
            d.ncols(),
            m = x.ncols()
        )));
    }
    matcore::ensure_finite(d, "D")?;
    if !is_diagonal(d, tol) {
        return Err(Error::Precondition("D must be diagonal".into()));
    }
    Ok(())
}

// Threshold scales: structure checks on the target grow with ||At||, the
// Gram check is quadratic in X, the block equations are linear in X.
struct Scales {
    atol: f64,
    x: f64,
    d: f64,
    a: f64,
}

impl Scales {
    fn new(bd: &BlockData, d: &ComplexMatrix, a: f64) -> Self {
        Scales {
            atol: bd.tol.structure_atol,
            x: bd.x_scale,
            d: fro_norm(d),
            a,
        }
    }

    fn target(&self, r: f64) -> Condition {
        Condition {
            residual: r,
            threshold: self.atol * (1.0 + self.a),
        }
    }

    fn gram(&self, r: f64) -> Condition {
        Condition {
            residual: r,
            threshold: self.atol * (1.0 + self.x).powi(2) * (1.0 + self.d),
        }
    }

    fn linear(&self, r: f64) -> Condition {
        Condition {
            residual: r,
            threshold: self.atol * (1.0 + self.x) * (1.0 + self.d + self.a),
        }
    }
}

fn skew_blocks_condition(blocks: &HamBlocks, atol: f64) -> Condition {
    let r = matcore::skew_hermitian_residual(&blocks.a11) + matcore::skew_hermitian_residual(&blocks.a22);
    Condition {
        residual: r,
        threshold: atol * (1.0 + fro_norm(&blocks.a11) + fro_norm(&blocks.a22)),
    }
}

fn commute_condition(blocks: &HamBlocks, atol: f64) -> Condition {
    let r = fro_norm(&(&blocks.a11 * &blocks.a12 - &blocks.a12 * &blocks.a22));
    let s = 1.0 + fro_norm(&blocks.a11) + fro_norm(&blocks.a12) + fro_norm(&blocks.a22);
    Condition {
        residual: r,
        threshold: atol * s * s,
    }
}

fn target_norm(bd: &BlockData) -> f64 {
    [&bd.at.a11, &bd.at.a12, &bd.at.a21, &bd.at.a22]
        .iter()
        .map(|m| fro_norm(m).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// `M` and `N` for a given `(1,2)` and `(2,1)` block pair.
fn m_and_n(
    bd: &BlockData,
    d: &ComplexMatrix,
    b12: &ComplexMatrix,
    b21: &ComplexMatrix,
    flavor: Flavor,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let x2p_pinv = bd.pinv(&bd.x2p())?;
    let x1d = &bd.x1 * d;
    let m = &x1d - &x1d * &bd.p * &x2p_pinv * &bd.x2 - b12 * &bd.q * &bd.x2;
    let px2s_pinv = bd.pinv(&(&bd.p * bd.x2.adjoint()))?;
    let middle = px2s_pinv * &bd.p * d.adjoint() * bd.x1.adjoint() * &bd.x1;
    let n = &bd.x2 * d + middle * Complex64::from(flavor.sign()) - &bd.q * b21 * &bd.x1;
    Ok((m, n))
}

/// `M = X1 D - X1 D P (X2 P)^+ X2 - At12 Q X2` and
/// `N = X2 D - (P X2*)^+ P D* X1* X1 - Q At21 X1`.
pub fn intermediates(bd: &BlockData, d: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    m_and_n(bd, d, &bd.at.a12, &bd.at.a21, Flavor::SkewHermitian)
}

/// Evaluates every condition that does not need the optimal blocks.
pub fn check_feasibility(bd: &BlockData, d: &ComplexMatrix, flavor: Flavor) -> Result<FeasibilityReport> {
    let sc = Scales::new(bd, d, target_norm(bd));
    let (m, n) = m_and_n(bd, d, &bd.at.a12, &bd.at.a21, flavor)?;
    let gram = bd.x1.adjoint() * &bd.x1 * d - bd.x2.adjoint() * &bd.x2 * d;
    let coupling = (&bd.at.a12 + bd.at.a21.adjoint() * Complex64::from(flavor.sign())) * &bd.q;
    Ok(FeasibilityReport {
        skew_at11: sc.target(flavor.structure_residual(&bd.at.a11)),
        skew_at22: sc.target(flavor.structure_residual(&bd.at.a22)),
        skew_gram: sc.gram(flavor.structure_residual(&gram)),
        coupling: sc.target(fro_norm(&coupling)),
        cond1: sc.linear(fro_norm(&(&bd.x1 * d * &bd.p * &bd.l))),
        cond22: sc.linear(fro_norm(&(&m * &bd.p))),
        cond33: sc.linear(fro_norm(&(&n * &bd.t))),
        skew_blocks: None,
        commute: None,
    })
}

// Optimal-form blocks for given (1,1), (1,2), (2,1), (2,2) inputs. The
// target path passes the target tiles; the general solution passes
// (Y11, Y12, Y12*, Y22).
fn blocks_with(
    bd: &BlockData,
    d: &ComplexMatrix,
    b11: &ComplexMatrix,
    b12: &ComplexMatrix,
    b21: &ComplexMatrix,
    b22: &ComplexMatrix,
) -> Result<(HamBlocks, ComplexMatrix, ComplexMatrix)> {
    let (m, n) = m_and_n(bd, d, b12, b21, Flavor::SkewHermitian)?;
    let x1_pinv = bd.pinv(&bd.x1)?;
    let x2_pinv = bd.pinv(&bd.x2)?;
    let x1dp_x2p = &bd.x1 * d * &bd.p * bd.pinv(&bd.x2p())?;
    let b12q = b12 * &bd.q;
    let x1s = bd.x1.adjoint();

    let a12 = &x1dp_x2p + &b12q;
    let a11 = &m * &x1_pinv + x1_pinv.adjoint() * bd.x2.adjoint() * &bd.q * b21 * &bd.r + &bd.r * b11 * &bd.r;
    let a22 = &n * &x2_pinv + x2_pinv.adjoint() * (&x1s * &x1dp_x2p - &x1s * &b12q) * &bd.s + &bd.s * b22 * &bd.s;
    Ok((HamBlocks { a11, a12, a22 }, m, n))
}

/// Optimal blocks built from the target; meaningful once
/// [`check_feasibility`] passes.
pub fn compute_blocks(bd: &BlockData, d: &ComplexMatrix) -> Result<HamBlocks> {
    let at = &bd.at;
    Ok(blocks_with(bd, d, &at.a11, &at.a12, &at.a21, &at.a22)?.0)
}

/// Full solve in the Hamiltonian setting.
pub fn solve(
    js: &JStructure,
    x: &ComplexMatrix,
    d: &ComplexMatrix,
    at: &ComplexMatrix,
    tol: Tolerance,
) -> Result<SolveOutcome> {
    check_eigen_data(x, d, tol)?;
    let bd = BlockData::new(js, x, at, tol)?;
    solve_blocks(&bd, x, d, at)
}

pub(crate) fn solve_blocks(
    bd: &BlockData,
    x: &ComplexMatrix,
    d: &ComplexMatrix,
    at: &ComplexMatrix,
) -> Result<SolveOutcome> {
    let mut report = check_feasibility(bd, d, Flavor::SkewHermitian)?;
    let blocks = compute_blocks(bd, d)?;
    report.skew_blocks = Some(skew_blocks_condition(&blocks, bd.tol.structure_atol));
    report.commute = Some(commute_condition(&blocks, bd.tol.structure_atol));
    if let Some(step) = report.first_failure() {
        return Ok(SolveOutcome::Infeasible {
            report,
            failed_step: step,
        });
    }
    let a_hat = bd.assemble(&blocks.a11, &blocks.a12, &blocks.a22);
    matcore::ensure_finite(&a_hat, "solution").map_err(|e| Error::Numerical(e.to_string()))?;
    Ok(SolveOutcome::Solution(Solution {
        residual: fro_norm(&(at - &a_hat)),
        eigen_residual: fro_norm(&(&a_hat * x - x * d)),
        a_hat,
        report,
        reduced: None,
    }))
}

/// Member of the solution set for given free parameters `Y11`, `Y22`
/// (skew-hermitian) and `Y12`, after checking every solvability condition.
pub fn general_solution(
    bd: &BlockData,
    d: &ComplexMatrix,
    y11: &ComplexMatrix,
    y12: &ComplexMatrix,
    y22: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let blocks = general_blocks(bd, d, y11, y12, y22)?;
    Ok(bd.assemble(&blocks.a11, &blocks.a12, &blocks.a22))
}

pub(crate) fn general_blocks(
    bd: &BlockData,
    d: &ComplexMatrix,
    y11: &ComplexMatrix,
    y12: &ComplexMatrix,
    y22: &ComplexMatrix,
) -> Result<HamBlocks> {
    let k = bd.k();
    for (name, y) in [("Y11", y11), ("Y12", y12), ("Y22", y22)] {
        if y.shape() != (k, k) {
            return Err(Error::Shape(format!(
                "{name} must be {k}x{k}, got {}x{}",
                y.nrows(),
                y.ncols()
            )));
        }
        matcore::ensure_finite(y, name)?;
    }
    for (name, y) in [("Y11", y11), ("Y22", y22)] {
        if !matcore::is_skew_hermitian(y, bd.tol)? {
            return Err(Error::Precondition(format!("{name} must be skew-hermitian")));
        }
    }
    check_eigen_data_m(bd, d)?;
    let ynorm = (fro_norm(y11).powi(2) + fro_norm(y12).powi(2) + fro_norm(y22).powi(2)).sqrt();
    let sc = Scales::new(bd, d, ynorm);
    let (blocks, m, n) = blocks_with(bd, d, y11, y12, &y12.adjoint(), y22)?;
    // The skew condition is checked in its A12-dependent form; the
    // Gram-only form is weaker when X2 Q_{X1} = 0.
    let first = bd.x1.adjoint() * (&bd.x1 * d - &blocks.a12 * &bd.x2);
    let second = bd.x2.adjoint() * (&bd.x2 * d - blocks.a12.adjoint() * &bd.x1);
    let skew = matcore::skew_hermitian_residual(&first) + matcore::skew_hermitian_residual(&second);
    let atol = bd.tol.structure_atol;
    let checks = [
        ("cond1", sc.linear(fro_norm(&(&bd.x1 * d * &bd.p * &bd.l)))),
        ("cond2", sc.linear(fro_norm(&(&m * &bd.p)))),
        ("cond3", sc.linear(fro_norm(&(&n * &bd.t)))),
        ("skew", sc.gram(skew)),
        ("skew_blocks", skew_blocks_condition(&blocks, atol)),
        ("commute", commute_condition(&blocks, atol)),
    ];
    for (equation, c) in checks {
        if !c.passed() {
            return Err(Error::ConditionViolated {
                equation,
                residual: c.residual,
            });
        }
    }
    Ok(blocks)
}

fn check_eigen_data_m(bd: &BlockData, d: &ComplexMatrix) -> Result<()> {
    let m = bd.m();
    if d.shape() != (m, m) {
        return Err(Error::Shape(format!(
            "D must be {m}x{m}, got {}x{}",
            d.nrows(),
            d.ncols()
        )));
    }
    if !is_diagonal(d, bd.tol) {
        return Err(Error::Precondition("D must be diagonal".into()));
    }
    Ok(())
}
