//! Truncated harmonic-oscillator operators on Fock states `|0⟩ … |N⟩`.

use crate::linalg::{OperatorMatrix, C64, CMatrix};

/// Annihilation operator, `a|n⟩ = √n |n−1⟩`.
pub fn annihilation(n_max: usize) -> OperatorMatrix {
    let d = n_max + 1;
    let mut a = CMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    OperatorMatrix::new(a, vec![d]).expect("square by construction")
}

pub fn creation(n_max: usize) -> OperatorMatrix {
    annihilation(n_max).adjoint()
}

pub fn number(n_max: usize) -> OperatorMatrix {
    let d = n_max + 1;
    let diag = CMatrix::from_fn(d, d, |i, j| if i == j { C64::new(i as f64, 0.0) } else { C64::new(0.0, 0.0) });
    OperatorMatrix::hermitian(diag, vec![d]).expect("diagonal")
}

/// `a + a†`.
pub fn quadrature_sum(n_max: usize) -> OperatorMatrix {
    let a = annihilation(n_max);
    let sum = a.entries() + a.entries().adjoint();
    OperatorMatrix::hermitian(sum, vec![n_max + 1]).expect("real symmetric")
}

/// Dimensionless position `(a + a†)/√2`.
pub fn position(n_max: usize) -> OperatorMatrix {
    quadrature_sum(n_max).scale(C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0))
}

/// Dimensionless momentum `i(a† − a)/√2`.
pub fn momentum(n_max: usize) -> OperatorMatrix {
    let a = annihilation(n_max);
    let p = (a.entries().adjoint() - a.entries()) * C64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
    OperatorMatrix::hermitian(p, vec![n_max + 1]).expect("Hermitian by construction")
}

/// Normalized Hermite functions `h_0(x) … h_{n_max}(x)` by the stable three-term recurrence.
pub fn hermite_functions(n_max: usize, x: f64, out: &mut [f64]) {
    debug_assert!(out.len() > n_max);
    out[0] = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    if n_max >= 1 {
        out[1] = std::f64::consts::SQRT_2 * x * out[0];
    }
    for n in 2..=n_max {
        let nf = n as f64;
        out[n] = (2.0 / nf).sqrt() * x * out[n - 1] - ((nf - 1.0) / nf).sqrt() * out[n - 2];
    }
}
