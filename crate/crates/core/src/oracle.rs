//! Independent members of the feasible set, drawn from the general
//! solution, for brute-force optimality checks.
//!
//! Sampling happens in the Hamiltonian frame of each mode: `(D, At)` for
//! Hamiltonian, `(iD, iAt)` for skew-Hamiltonian, `(D^C, At)` for
//! symplectic. Members are mapped back before they are checked.
//!
//! The free blocks `Y11`, `Y22` only enter the solution through
//! `R Y11 R` and `S Y22 S`, and `A11 A12 = A12 A22` is linear in them once
//! `Y12 Q` is fixed. Gaussian draws are therefore projected onto the null
//! space of that linear map before the exact membership filter runs; pure
//! rejection would accept almost nothing.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ham::{self, SolveOutcome};
use crate::jspace::{is_member, BlockData, JStructure, StructureMode};
use crate::matcore::{self, fro_norm, ComplexMatrix, I};
use crate::problem::ProblemInstance;
use crate::symplectic::cayley;
use crate::synth;

/// Largest admissible `||At - A_hat|| - ||At - A||` over samples.
pub const MARGIN_TOL: f64 = 1e-8;

/// Attempts allowed per requested sample.
pub const ATTEMPTS_PER_SAMPLE: usize = 100;

#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub mode: StructureMode,
    pub samples: Vec<ComplexMatrix>,
    pub seed: u64,
    /// RNG stream index that produced each sample; index 0 is the
    /// unperturbed draw.
    pub streams: Vec<u64>,
    pub attempts: usize,
    /// Dimension of the admissible `(Y11, Y22)` directions.
    pub free_dim: usize,
}

pub fn sample_feasible(instance: &ProblemInstance, count: usize, seed: u64) -> Result<SampleBatch> {
    let js = instance.structure()?;
    sample_feasible_with(instance, &js, count, seed)
}

pub fn sample_feasible_with(
    instance: &ProblemInstance,
    js: &JStructure,
    count: usize,
    seed: u64,
) -> Result<SampleBatch> {
    if let SolveOutcome::Infeasible { failed_step, .. } = instance.solve_with(js)? {
        return Err(Error::Sampling(format!("instance is infeasible (step {failed_step})")));
    }
    let sampler = Sampler::new(instance, js)?;
    let budget = ATTEMPTS_PER_SAMPLE * count.max(1);
    let mut batch = SampleBatch {
        mode: instance.mode,
        samples: Vec::with_capacity(count),
        seed,
        streams: Vec::with_capacity(count),
        attempts: 0,
        free_dim: sampler.null.ncols(),
    };
    for index in 0..budget as u64 {
        if batch.samples.len() >= count {
            break;
        }
        batch.attempts += 1;
        if let Some(a) = sampler.attempt(seed, index) {
            batch.samples.push(a);
            batch.streams.push(index);
        }
    }
    if batch.samples.is_empty() && count > 0 {
        return Err(Error::Sampling(format!(
            "no member accepted in {} attempts",
            batch.attempts
        )));
    }
    Ok(batch)
}

struct Sampler<'a> {
    inst: &'a ProblemInstance,
    js: &'a JStructure,
    bd: BlockData,
    d_frame: ComplexMatrix,
    y11: ComplexMatrix,
    y12: ComplexMatrix,
    y22: ComplexMatrix,
    basis: Vec<ComplexMatrix>,
    null: DMatrix<f64>,
    range_proj: ComplexMatrix,
    scale: f64,
}

impl<'a> Sampler<'a> {
    fn new(inst: &'a ProblemInstance, js: &'a JStructure) -> Result<Self> {
        let (d_frame, at_frame) = match inst.mode {
            StructureMode::Hamiltonian => (inst.d.clone(), inst.a_tilde.clone()),
            StructureMode::SkewHamiltonian => (&inst.d * I, &inst.a_tilde * I),
            StructureMode::Symplectic => (cayley(&inst.d)?, inst.a_tilde.clone()),
        };
        let bd = BlockData::new(js, &inst.x, &at_frame, inst.tol)?;
        let half = Complex64::from(0.5);
        let y11 = (&bd.at.a11 - bd.at.a11.adjoint()) * half;
        let y22 = (&bd.at.a22 - bd.at.a22.adjoint()) * half;
        let y12 = bd.at.a12.clone();
        let base = ham::general_blocks(&bd, &d_frame, &y11, &y12, &y22)
            .map_err(|e| Error::Sampling(format!("base parameters rejected: {e}")))?;

        let k = bd.k();
        let basis = skew_basis(k);
        let null = coupling_null_space(&bd, &base.a12, &basis)?;
        let g = bd.x2p();
        let range_proj = &g * bd.pinv(&g)?;
        let n = inst.n() as f64;
        let scale = match fro_norm(&inst.a_tilde) / n {
            s if s > 0.0 => s,
            _ => 1.0,
        };
        Ok(Sampler {
            inst,
            js,
            bd,
            d_frame,
            y11,
            y12,
            y22,
            basis,
            null,
            range_proj,
            scale,
        })
    }

    fn attempt(&self, seed: u64, index: u64) -> Option<ComplexMatrix> {
        let (mut y11, mut y12, mut y22) = (self.y11.clone(), self.y12.clone(), self.y22.clone());
        if index > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index);
            let z = nalgebra::DVector::from_fn(self.null.ncols(), |_, _| synth::gaussian(&mut rng));
            let coeff = &self.null * z * self.scale;
            let kk = self.basis.len();
            for (i, e) in self.basis.iter().enumerate() {
                y11 += e * Complex64::from(coeff[i]);
                y22 += e * Complex64::from(coeff[kk + i]);
            }
            let k = self.bd.k();
            let w = synth::complex_gaussian(k, k, &mut rng) * Complex64::from(self.scale);
            y12 += w * &self.range_proj;
        }
        let b = ham::general_solution(&self.bd, &self.d_frame, &y11, &y12, &y22).ok()?;
        let a = match self.inst.mode {
            StructureMode::Hamiltonian => b,
            StructureMode::SkewHamiltonian => b * -I,
            StructureMode::Symplectic => cayley(&b).ok()?,
        };
        self.accept(&a).then_some(a)
    }

    fn accept(&self, a: &ComplexMatrix) -> bool {
        let inst = self.inst;
        let member = is_member(a, self.js, inst.mode, inst.tol).unwrap_or(false);
        let eig = fro_norm(&(a * &inst.x - &inst.x * &inst.d));
        let limit = inst.n() as f64 * inst.tol.structure_atol * fro_norm(&inst.x).max(1.0) * (1.0 + fro_norm(&inst.d));
        member && eig <= limit
    }
}

/// Real basis of the `k x k` skew-hermitian matrices (`k^2` elements).
fn skew_basis(k: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(k * k);
    for i in 0..k {
        let mut e = ComplexMatrix::zeros(k, k);
        e[(i, i)] = I;
        out.push(e);
        for j in i + 1..k {
            let mut e = ComplexMatrix::zeros(k, k);
            e[(i, j)] = Complex64::from(1.0);
            e[(j, i)] = Complex64::from(-1.0);
            out.push(e);
            let mut e = ComplexMatrix::zeros(k, k);
            e[(i, j)] = I;
            e[(j, i)] = I;
            out.push(e);
        }
    }
    out
}

// Orthonormal basis (columns) of the null space of the real-linear map
// (delta, eps) -> R delta R A12 - A12 S eps S over skew-hermitian pairs.
fn coupling_null_space(bd: &BlockData, a12: &ComplexMatrix, basis: &[ComplexMatrix]) -> Result<DMatrix<f64>> {
    let kk = basis.len();
    let k = bd.k();
    let rows = 2 * k * k;
    let mut map = DMatrix::<f64>::zeros(rows, 2 * kk);
    for (c, e) in basis.iter().enumerate() {
        let left = &bd.r * e * &bd.r * a12;
        let right = -(a12 * &bd.s * e * &bd.s);
        for (col, img) in [(c, left), (kk + c, right)] {
            for (idx, z) in img.iter().enumerate() {
                map[(idx, col)] = z.re;
                map[(k * k + idx, col)] = z.im;
            }
        }
    }
    let dec = matcore::real_svd(&map)?;
    let smax = dec.s.first().copied().unwrap_or(0.0);
    let cutoff = 1e-10 * smax.max(1.0);
    // Columns of V past the singular values span the null space outright.
    let cols: Vec<_> = (0..dec.v.ncols())
        .filter(|&i| dec.s.get(i).is_none_or(|&s| s <= cutoff))
        .map(|i| dec.v.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        return Ok(DMatrix::zeros(2 * kk, 0));
    }
    Ok(DMatrix::from_columns(&cols))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub samples: usize,
    /// Largest `||At - A_hat|| - ||At - A||`; positive means a sample is
    /// closer to the target than the solver's answer.
    pub max_margin: f64,
    /// Samples within `MARGIN_TOL` of the optimal distance.
    pub near_optimal: usize,
    pub min_near_optimal_distance: f64,
    /// Largest `||A - A_hat||` among near-optimal samples; a uniqueness
    /// probe.
    pub max_near_optimal_distance: f64,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.max_margin <= MARGIN_TOL
    }
}

pub fn optimality_audit(instance: &ProblemInstance, a_hat: &ComplexMatrix, batch: &SampleBatch) -> AuditReport {
    let best = fro_norm(&(&instance.a_tilde - a_hat));
    let mut report = AuditReport {
        samples: batch.samples.len(),
        max_margin: f64::NEG_INFINITY,
        near_optimal: 0,
        min_near_optimal_distance: f64::INFINITY,
        max_near_optimal_distance: 0.0,
    };
    for a in &batch.samples {
        let dist = fro_norm(&(&instance.a_tilde - a));
        report.max_margin = report.max_margin.max(best - dist);
        if dist <= best + MARGIN_TOL {
            let gap = fro_norm(&(a - a_hat));
            report.near_optimal += 1;
            report.min_near_optimal_distance = report.min_near_optimal_distance.min(gap);
            report.max_near_optimal_distance = report.max_near_optimal_distance.max(gap);
        }
    }
    if report.samples == 0 {
        report.max_margin = 0.0;
    }
    if report.near_optimal == 0 {
        report.min_near_optimal_distance = 0.0;
    }
    report
}
