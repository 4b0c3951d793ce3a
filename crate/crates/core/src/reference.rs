//! Worked instances with known outcomes, used by tests, fixtures and the
//! acceptance runner.

use num_complex::Complex64;

use crate::jspace::StructureMode;
use crate::matcore::{c64, diag, from_rows, ComplexMatrix, Tolerance, I};
use crate::problem::ProblemInstance;

fn re(v: f64) -> Complex64 {
    c64(v, 0.0)
}

fn scaled(m: ComplexMatrix, f: f64) -> ComplexMatrix {
    m * re(f)
}

/// `[[0, -I], [I, 0]]` for `k = 2`.
pub fn j4() -> ComplexMatrix {
    let z = re(0.0);
    let o = re(1.0);
    from_rows(&[vec![z, z, -o, z], vec![z, z, z, -o], vec![o, z, z, z], vec![z, o, z, z]])
}

/// A diagonalizer of [`j4`] different from the one built by
/// [`JStructure::new`](crate::jspace::JStructure::new).
pub fn j4_unitary_a() -> ComplexMatrix {
    let z = re(0.0);
    let o = re(1.0);
    scaled(
        from_rows(&[vec![I, z, -I, z], vec![z, I, z, -I], vec![o, z, o, z], vec![z, o, z, o]]),
        std::f64::consts::FRAC_1_SQRT_2,
    )
}

/// A second diagonalizer of [`j4`], with the columns of each eigenspace
/// swapped relative to [`j4_unitary_a`].
pub fn j4_unitary_b() -> ComplexMatrix {
    let z = re(0.0);
    let o = re(1.0);
    scaled(
        from_rows(&[vec![z, I, -I, z], vec![I, z, z, -I], vec![z, o, o, z], vec![o, z, z, o]]),
        std::f64::consts::FRAC_1_SQRT_2,
    )
}

fn eigvec_x(a: f64) -> ComplexMatrix {
    let s2 = std::f64::consts::SQRT_2;
    let z = re(0.0);
    from_rows(&[
        vec![re(-s2), re(s2), z],
        vec![z, z, c64(0.0, -a / s2)],
        vec![re(s2), re(s2), z],
        vec![z, z, re(a / s2)],
    ])
}

// shift = 0 is the feasible target, shift = 1 the infeasible one.
fn target_a(shift: f64) -> ComplexMatrix {
    let s3 = 3f64.sqrt();
    let m = from_rows(&[
        vec![c64(0.0, 5.0), c64(0.0, -s3 + shift), re(9.0), re(3.0 * s3 + shift)],
        vec![
            c64(0.0, -s3 - shift),
            c64(-4.0 * shift, 7.0),
            re(3.0 * s3 + shift),
            re(3.0),
        ],
        vec![re(-9.0), re(-3.0 * s3 + shift), c64(0.0, 5.0), c64(0.0, -s3 - shift)],
        vec![
            re(-3.0 * s3 + shift),
            re(-3.0),
            c64(0.0, -s3 + shift),
            c64(4.0 * shift, 7.0),
        ],
    ]);
    scaled(m, 0.5)
}

/// Feasible Hamiltonian instance with `n = 4`, `m = 3`.
pub fn example1() -> ProblemInstance {
    ProblemInstance::new(
        StructureMode::Hamiltonian,
        j4(),
        eigvec_x(1.0),
        diag(&[c64(1.0, 1.0), c64(-1.0, 1.0), I]),
        target_a(0.0),
        Tolerance::default(),
    )
    .expect("valid instance")
}

/// Expected optimal matrix for [`example1`].
pub fn example1_solution() -> ComplexMatrix {
    let z = re(0.0);
    scaled(
        from_rows(&[
            vec![c64(0.0, 2.0), z, re(-2.0), z],
            vec![z, c64(0.0, 3.0), z, re(-1.0)],
            vec![re(-2.0), z, c64(0.0, 2.0), z],
            vec![z, re(1.0), z, c64(0.0, 3.0)],
        ]),
        0.5,
    )
}

fn example2_x() -> ComplexMatrix {
    let s2 = std::f64::consts::SQRT_2;
    let z = re(0.0);
    from_rows(&[
        vec![re(-s2), re(s2), z],
        vec![z, z, z],
        vec![re(s2), re(s2), z],
        vec![z, z, c64(0.0, s2)],
    ])
}

/// Infeasible Hamiltonian instance; fails at Step 10 with `||N T|| = 2`.
pub fn example2() -> ProblemInstance {
    ProblemInstance::new(
        StructureMode::Hamiltonian,
        j4(),
        example2_x(),
        diag(&[c64(1.0, 1.0), c64(-1.0, 1.0), c64(0.0, 2.0)]),
        target_a(1.0),
        Tolerance::default(),
    )
    .expect("valid instance")
}

/// Skew-Hamiltonian target with free parameter `h`.
pub fn example3_target(h: Complex64) -> ComplexMatrix {
    let m = from_rows(&[
        vec![
            -h * 2.0 + c64(7.0, -2.0),
            c64(1.0, -2.0),
            c64(-2.0, -3.0) - I * h * 2.0,
            c64(2.0, -1.0),
        ],
        vec![c64(-3.0, -2.0), re(-7.0), c64(-2.0, 3.0), -I],
        vec![
            c64(-2.0, 7.0) - I * h * 2.0,
            c64(2.0, 1.0),
            h * 2.0 + c64(11.0, 2.0),
            c64(1.0, 10.0),
        ],
        vec![c64(-2.0, 5.0), I, c64(5.0, -6.0), re(17.0)],
    ]);
    scaled(m, 0.25)
}

/// Feasible skew-Hamiltonian instance; the optimum does not depend on `h`.
pub fn example3(h: Complex64) -> ProblemInstance {
    ProblemInstance::new(
        StructureMode::SkewHamiltonian,
        j4(),
        eigvec_x(1.0),
        diag(&[c64(1.0, 1.0), c64(1.0, -1.0), re(1.0)]),
        example3_target(h),
        Tolerance::default(),
    )
    .expect("valid instance")
}

pub fn example3_solution() -> ComplexMatrix {
    let z = re(0.0);
    let o = re(1.0);
    from_rows(&[vec![o, z, -I, z], vec![z, o, z, z], vec![-I, z, o, z], vec![z, z, z, o]])
}

/// Infeasible skew-Hamiltonian instance; fails at Step 9 with coupling
/// residual `sqrt(40)`.
pub fn example4() -> ProblemInstance {
    ProblemInstance::new(
        StructureMode::SkewHamiltonian,
        j4(),
        example2_x(),
        diag(&[c64(1.0, 1.0), c64(1.0, -1.0), re(2.0)]),
        example3_target(re(1.0)),
        Tolerance::default(),
    )
    .expect("valid instance")
}

/// Feasible symplectic instance. Two columns of X are zero.
pub fn symplectic_example() -> ProblemInstance {
    let z = re(0.0);
    let o = re(1.0);
    let x = scaled(
        from_rows(&[vec![z, I, z, I], vec![z, I, z, -I], vec![z, -o, z, o], vec![z, o, z, o]]),
        std::f64::consts::FRAC_1_SQRT_2,
    );
    let d = diag(&[c64(1.0, -1.0), c64(1.0, 1.0), c64(0.5, -0.5), c64(0.5, 0.5)]);
    let f = c64(-0.2, -1.0);
    let g = c64(0.2, -1.0);
    let t = re(3.0);
    let three_i = c64(0.0, 3.0);
    let at = from_rows(&[
        vec![three_i, f, t, t],
        vec![f, three_i, t, t],
        vec![-t, -t, three_i, g],
        vec![-t, -t, g, three_i],
    ]);
    ProblemInstance::new(StructureMode::Symplectic, j4(), x, d, at, Tolerance::default()).expect("valid instance")
}

pub fn symplectic_solution() -> ComplexMatrix {
    let z = re(0.0);
    let a = c64(3.0, 3.0);
    let b = c64(1.0, 1.0);
    scaled(
        from_rows(&[vec![a, b, z, z], vec![b, a, z, z], vec![z, z, a, -b], vec![z, z, -b, a]]),
        0.25,
    )
}

/// Hamiltonian optimum of the Cayley-transformed symplectic example.
pub fn symplectic_reduced() -> ComplexMatrix {
    let z = re(0.0);
    let d = c64(0.0, -2.0);
    let m1 = re(-1.0);
    let o = re(1.0);
    scaled(
        from_rows(&[vec![d, m1, z, z], vec![m1, d, z, z], vec![z, z, d, o], vec![z, z, o, d]]),
        0.2,
    )
}

/// Cayley image of the symplectic example's D.
pub fn symplectic_cayley_d() -> ComplexMatrix {
    scaled(
        diag(&[c64(-1.0, 2.0), c64(-1.0, -2.0), c64(1.0, 2.0), c64(1.0, -2.0)]),
        0.2,
    )
}
