//! Closed-form ansatz for the degenerate E⊗ε ground pair.
//!
//! `Ψ(q, φ) ∝ A(q, φ)|↓⟩ − i B(q, φ)|↑⟩` with
//! `A, B = e^{−q²/2}(cosh κq ± e^{iφ} sinh κq)` and `κ = L/(2ω)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::entanglement::{von_neumann_entropy, EntropyValue};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, DensityMatrix, C64};
use crate::special::{erf, integrate};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnsatzParams {
    pub coupling: f64,
    pub omega: f64,
}

impl AnsatzParams {
    pub fn new(coupling: f64, omega: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
        }
        if !(coupling >= 0.0) || !coupling.is_finite() {
            return Err(Error::InvalidParameter(format!("coupling must be non-negative, got {coupling}")));
        }
        Ok(AnsatzParams { coupling, omega })
    }

    /// Parameters with `κ = L/(2ω)` at `ω = 1`.
    pub fn from_kappa(kappa: f64) -> Result<Self> {
        Self::new(2.0 * kappa, 1.0)
    }

    pub fn kappa(&self) -> f64 {
        self.coupling / (2.0 * self.omega)
    }

    /// Upper radial limit used by the quadratures.
    pub fn q_max(&self) -> f64 {
        10.0 + 6.0 * self.kappa()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuperpositionSpec {
    pub c1: f64,
    pub c2: f64,
    pub gamma: f64,
}

impl SuperpositionSpec {
    pub fn new(c1: f64, gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c1) {
            return Err(Error::InvalidParameter(format!("c1 must lie in [0, 1], got {c1}")));
        }
        Ok(SuperpositionSpec { c1, c2: (1.0 - c1 * c1).max(0.0).sqrt(), gamma })
    }

    pub fn equal(gamma: f64) -> Self {
        let c = std::f64::consts::FRAC_1_SQRT_2;
        SuperpositionSpec { c1: c, c2: c, gamma }
    }
}

pub fn amplitude_a(q: f64, phi: f64, p: &AnsatzParams) -> C64 {
    let k = p.kappa() * q;
    (C64::from(k.cosh()) + C64::from_polar(k.sinh(), phi)) * (-0.5 * q * q).exp()
}

pub fn amplitude_b(q: f64, phi: f64, p: &AnsatzParams) -> C64 {
    let k = p.kappa() * q;
    (C64::from(k.cosh()) - C64::from_polar(k.sinh(), phi)) * (-0.5 * q * q).exp()
}

/// `e^{α²} α √π Erf(α)`.
fn x_term(alpha: f64) -> f64 {
    if alpha == 0.0 {
        return 0.0;
    }
    (alpha * alpha).exp() * alpha * PI.sqrt() * erf(alpha)
}

/// `∫₀^∞ e^{−q²} cosh²(αq) q dq = (2 + e^{α²} α√π Erf α)/4`.
pub fn cosh_squared_integral(alpha: f64) -> f64 {
    (2.0 + x_term(alpha)) / 4.0
}

/// `∫₀^∞ e^{−q²} sinh²(αq) q dq = e^{α²} α√π Erf(α)/4`.
pub fn sinh_squared_integral(alpha: f64) -> f64 {
    x_term(alpha) / 4.0
}

/// `∫₀^∞ e^{−q²} cosh(αq) sinh(αq) q dq = e^{α²} α√π/4`.
pub fn cosh_sinh_integral(alpha: f64) -> f64 {
    (alpha * alpha).exp() * alpha * PI.sqrt() / 4.0
}

/// `N² = π e^{−2κ²}[1 + e^{κ²} κ√π Erf(κ)]`.
pub fn normalization(p: &AnsatzParams) -> f64 {
    let k = p.kappa();
    PI * (-2.0 * k * k).exp() * (1.0 + x_term(k))
}

/// `C = [1 + e^{κ²} κ√π Erf(κ)]^{−1}`.
pub fn coherence_factor(p: &AnsatzParams) -> f64 {
    1.0 / (1.0 + x_term(p.kappa()))
}

/// `Γ = 1 − c1²c2²(1+C)² − (c1²−c2²)²C²`; the density eigenvalues are `½(1 ± √(1−Γ))`.
pub fn gamma_value(s: &SuperpositionSpec, p: &AnsatzParams) -> f64 {
    let c = coherence_factor(p);
    let (a, b) = (s.c1 * s.c1, s.c2 * s.c2);
    1.0 - a * b * (1.0 + c).powi(2) - (a - b).powi(2) * c * c
}

/// `ρ^S = ½[[1, iC], [−iC, 1]]` in the `(|↓⟩, |↑⟩)` basis.
pub fn single_state_density(p: &AnsatzParams) -> Result<DensityMatrix> {
    let c = coherence_factor(p);
    let m = CMatrix::from_row_slice(2, 2, &[C64::from(0.5), C64::new(0.0, 0.5 * c), C64::new(0.0, -0.5 * c), C64::from(0.5)]);
    DensityMatrix::new(m, vec![2])
}

/// Qubit density of `c1|Ψ⟩ + c2 e^{iγ}|Ψ*⟩`.
pub fn superposition_density(s: &SuperpositionSpec, p: &AnsatzParams) -> Result<DensityMatrix> {
    let c = coherence_factor(p);
    let (c1, c2, g) = (s.c1, s.c2, s.gamma);
    let rho00 = 0.5 * (1.0 + c1 * c2 * g.cos() * (1.0 + c));
    let rho01 = C64::new(-0.5 * c1 * c2 * g.sin() * (1.0 + c), 0.5 * (c1 * c1 - c2 * c2) * c);
    let m = CMatrix::from_row_slice(2, 2, &[C64::from(rho00), rho01, rho01.conj(), C64::from(1.0 - rho00)]);
    DensityMatrix::new(m, vec![2])
}

pub fn single_state_entropy(p: &AnsatzParams) -> Result<EntropyValue> {
    von_neumann_entropy(&single_state_density(p)?)
}

pub fn superposition_entropy(s: &SuperpositionSpec, p: &AnsatzParams) -> Result<EntropyValue> {
    von_neumann_entropy(&superposition_density(s, p)?)
}

/// Fidelity of the spin ⊗ angular-qubit state of `Ψ` with the Bell state
/// `(|−⟩|0⟩_φ + |+⟩|1⟩_φ)/√2`, where `|±⟩ = (|↓⟩ ± i|↑⟩)/√2`.
///
/// Equals `½(1 + e^{κ²}κ√π / (1 + e^{κ²}κ√π Erf κ))`; ½ at κ = 0 and → 1 as κ grows.
pub fn bell_overlap(p: &AnsatzParams) -> f64 {
    let k = p.kappa();
    let y = if k == 0.0 { 0.0 } else { 4.0 * cosh_sinh_integral(k) };
    0.5 * (1.0 + y / (1.0 + x_term(k)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellReport {
    pub kappa: f64,
    pub overlap: f64,
    pub passed: bool,
}

pub const BELL_KAPPA_MIN: f64 = 3.0;
pub const BELL_OVERLAP_MIN: f64 = 0.99;

/// Checks the large-coupling Bell form; only defined for `κ ≥ 3`.
pub fn large_coupling_bell_check(p: &AnsatzParams) -> Result<BellReport> {
    let kappa = p.kappa();
    if kappa < BELL_KAPPA_MIN {
        return Err(Error::BelowThreshold { kappa, threshold: BELL_KAPPA_MIN });
    }
    let overlap = bell_overlap(p);
    Ok(BellReport { kappa, overlap, passed: overlap >= BELL_OVERLAP_MIN })
}

/// Numerical `∫₀^{q_max} f(q) q dq` at the module tolerance.
pub fn radial_integral<F: Fn(f64) -> f64>(f: F, p: &AnsatzParams) -> f64 {
    integrate(|q| f(q) * q, 0.0, p.q_max(), 1e-12)
}
