//! Random instances with a planted solution, for property tests and the
//! acceptance runner.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::ham::SolveOutcome;
use crate::jspace::{JStructure, StructureMode};
use crate::matcore::{diag, identity, ComplexMatrix, Tolerance, I};
use crate::problem::ProblemInstance;
use crate::symplectic::cayley;

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| Complex64::new(gaussian(rng), gaussian(rng)))
}

pub fn skew_hermitian<R: Rng + ?Sized>(k: usize, rng: &mut R) -> ComplexMatrix {
    let g = complex_gaussian(k, k, rng);
    (&g - g.adjoint()) * Complex64::from(0.5)
}

pub fn hermitian<R: Rng + ?Sized>(k: usize, rng: &mut R) -> ComplexMatrix {
    let g = complex_gaussian(k, k, rng);
    (&g + g.adjoint()) * Complex64::from(0.5)
}

pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
    g.qr().q()
}

pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    complex_gaussian(n, n, rng).qr().q()
}

/// Real `J = V blockdiag([[0, 1], [-1, 0]]) V^T` for a random orthogonal V.
pub fn random_j<R: Rng + ?Sized>(k: usize, rng: &mut R) -> ComplexMatrix {
    let n = 2 * k;
    let v = random_orthogonal(n, rng);
    let mut b = DMatrix::<f64>::zeros(n, n);
    for i in 0..k {
        b[(2 * i, 2 * i + 1)] = 1.0;
        b[(2 * i + 1, 2 * i)] = -1.0;
    }
    (&v * b * v.transpose()).map(Complex64::from)
}

/// Random matrix of rank at most `rank`.
pub fn low_rank<R: Rng + ?Sized>(rows: usize, cols: usize, rank: usize, rng: &mut R) -> ComplexMatrix {
    complex_gaussian(rows, rank, rng) * complex_gaussian(rank, cols, rng)
}

/// A normal J-Hamiltonian `a0` with `a0 x = x d`.
#[derive(Debug, Clone)]
pub struct Planted {
    pub js: JStructure,
    pub x: ComplexMatrix,
    pub d: ComplexMatrix,
    pub a0: ComplexMatrix,
}

/// Plants a normal J-Hamiltonian matrix of half-size `k` whose first `r`
/// coordinate pairs are coupled across the two eigenspaces, and picks `m`
/// of its eigenvectors (randomly scaled) as X.
pub fn planted_hamiltonian<R: Rng + ?Sized>(k: usize, m: usize, r: usize, rng: &mut R) -> Result<Planted> {
    assert!(k >= 1 && m <= 2 * k && r <= k);
    let n = 2 * k;
    let js = JStructure::new(random_j(k, rng), Tolerance::default())?;
    let v1 = random_unitary(k, rng);
    let v2 = random_unitary(k, rng);
    let alpha: Vec<f64> = (0..k).map(|_| gaussian(rng)).collect();
    let beta: Vec<f64> = (0..k).map(|i| if i < r { alpha[i] } else { gaussian(rng) }).collect();
    let c: Vec<Complex64> = (0..r).map(|_| Complex64::new(gaussian(rng), gaussian(rng))).collect();

    let mut mid = ComplexMatrix::zeros(n, n);
    for i in 0..k {
        mid[(i, i)] = I * alpha[i];
        mid[(k + i, k + i)] = I * beta[i];
        if i < r {
            mid[(i, k + i)] = c[i];
            mid[(k + i, i)] = c[i].conj();
        }
    }
    let mut w = ComplexMatrix::zeros(n, n);
    w.view_mut((0, 0), (k, k)).copy_from(&v1);
    w.view_mut((k, k), (k, k)).copy_from(&v2);
    let frame = js.u() * &w;
    let a0 = &frame * &mid * frame.adjoint();

    let mut vecs = Vec::with_capacity(n);
    let mut vals = Vec::with_capacity(n);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..k {
        if i < r {
            let phase = c[i].conj() / c[i].norm();
            for sign in [1.0, -1.0] {
                let mut v = nalgebra::DVector::<Complex64>::zeros(n);
                v[i] = Complex64::from(s);
                v[k + i] = phase * sign * s;
                vecs.push(v);
                vals.push(I * alpha[i] + c[i].norm() * sign);
            }
        } else {
            let mut v = nalgebra::DVector::<Complex64>::zeros(n);
            v[i] = Complex64::from(1.0);
            vecs.push(v);
            vals.push(I * alpha[i]);
            let mut v = nalgebra::DVector::<Complex64>::zeros(n);
            v[k + i] = Complex64::from(1.0);
            vecs.push(v);
            vals.push(I * beta[i]);
        }
    }
    let picked = sample(rng, n, m).into_vec();
    let cols: Vec<_> = picked
        .iter()
        .map(|&i| {
            let scale = Complex64::new(gaussian(rng), gaussian(rng));
            &frame * &vecs[i] * scale
        })
        .collect();
    let x = ComplexMatrix::from_columns(&cols);
    let d = diag(&picked.iter().map(|&i| vals[i]).collect::<Vec<_>>());
    Ok(Planted { js, x, d, a0 })
}

/// `U [[E11, F], [F*, E22]] U*` with skew-hermitian `E11`, `E22`.
pub fn hamiltonian_noise<R: Rng + ?Sized>(js: &JStructure, rng: &mut R) -> ComplexMatrix {
    let k = js.k();
    let e11 = skew_hermitian(k, rng);
    let e22 = skew_hermitian(k, rng);
    let f = complex_gaussian(k, k, rng);
    js.assemble(&e11, &f, &f.adjoint(), &e22)
}

/// Random problem of the given mode, with a perturbed target, that the
/// mode's solver reports feasible. Draws until one is found.
pub fn feasible_instance<R: Rng + ?Sized>(mode: StructureMode, rng: &mut R) -> Result<(ProblemInstance, JStructure)> {
    loop {
        let k = rng.random_range(1..=3usize);
        let m = rng.random_range(1..=2 * k);
        let r = rng.random_range(0..=k);
        let p = planted_hamiltonian(k, m, r, rng)?;
        let noise = hamiltonian_noise(&p.js, rng) * Complex64::from(0.5);
        let (d, at) = match mode {
            StructureMode::Hamiltonian => (p.d.clone(), &p.a0 + noise),
            StructureMode::SkewHamiltonian => (&p.d * -I, (&p.a0 + noise) * -I),
            StructureMode::Symplectic => {
                let near_minus_one = p.d.diagonal().iter().any(|z| (z + 1.0).norm() < 1e-2);
                if near_minus_one {
                    continue;
                }
                (cayley(&p.d)?, &p.a0 + noise)
            }
        };
        let inst = ProblemInstance::new(mode, p.js.j().clone(), p.x.clone(), d, at, Tolerance::default())?;
        match inst.solve_with(&p.js) {
            Ok(SolveOutcome::Solution(_)) => return Ok((inst, p.js)),
            Ok(SolveOutcome::Infeasible { .. }) | Err(_) => continue,
        }
    }
}

/// Random square matrix with `I + A` comfortably invertible.
pub fn cayley_safe<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        let a = complex_gaussian(n, n, rng) * Complex64::from(0.5);
        let sv = crate::matcore::singular_values(&(identity(n) + &a)).unwrap_or_default();
        if sv.last().is_some_and(|&s| s > 0.1) {
            return a;
        }
    }
}
