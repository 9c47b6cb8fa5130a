//! Entanglement measures: von Neumann entropy, two-qubit concurrence and the
//! tangle-to-entropy conversion.

use serde::Serialize;

use crate::ee::{self, EeParams};
use crate::error::{Error, Result};
use crate::linalg::{self, kron, pauli, CMatrix, DensityMatrix, PureState, C64};
use crate::special::binary_entropy;

/// Eigenvalues in `[−CLIP, 0)` are treated as exact zeros.
pub const CLIP: f64 = 1e-10;

/// Density eigenvalues below this (relative to the trace) count as zero in the concurrence.
const SPECTRAL_FLOOR: f64 = 1e-13;

/// Entropy in bits.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct EntropyValue(pub f64);

impl EntropyValue {
    pub fn bits(self) -> f64 {
        self.0
    }
}

/// `S = −Tr ρ log₂ ρ`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<EntropyValue> {
    entropy_of_spectrum(&rho.eigenvalues())
}

pub(crate) fn entropy_of_spectrum(eigs: &[f64]) -> Result<EntropyValue> {
    let mut s = 0.0;
    for &lambda in eigs {
        if lambda < -CLIP {
            return Err(Error::InvalidState(format!("density has eigenvalue {lambda:.3e}")));
        }
        if lambda > 0.0 {
            s -= lambda * lambda.log2();
        }
    }
    Ok(EntropyValue(s.max(0.0)))
}

fn spin_flip() -> CMatrix {
    kron(&pauli::sigma_y(), &pauli::sigma_y()).into_entries()
}

/// Wootters concurrence `max{0, λ₁−λ₂−λ₃−λ₄}` of a two-qubit density, with
/// `λᵢ` the decreasing square roots of the eigenvalues of `ρ ρ̃`,
/// `ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.factor_dims() != [2, 2] {
        return Err(Error::Dimension(format!("concurrence needs two qubits, got factors {:?}", rho.factor_dims())));
    }
    // With ρ = W W†, the λᵢ are the singular values of Wᵀ (σ_y⊗σ_y) W. Spectral
    // noise below the floor is dropped so pure states stay exactly rank one.
    let (vals, vecs) = linalg::eigh(rho.entries());
    let floor = SPECTRAL_FLOOR * rho.trace().abs().max(1.0);
    let w = CMatrix::from_fn(4, 4, |i, k| {
        let p = vals[k];
        if p > floor { vecs[(i, k)] * p.sqrt() } else { C64::from(0.0) }
    });
    let m = w.transpose() * spin_flip() * &w;
    let mut lambdas: Vec<f64> = m.singular_values().iter().copied().collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0))
}

/// Entanglement entropy of a pure two-qubit state with tangle `τ = C²`:
/// `H((1 + √(1−τ))/2)`.
pub fn tangle_to_entropy(tau: f64) -> Result<EntropyValue> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidParameter(format!("tangle must lie in [0, 1], got {tau}")));
    }
    Ok(EntropyValue(binary_entropy(0.5 * (1.0 + (1.0 - tau).sqrt()))))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapReport {
    /// Spin entropy against both oscillators.
    pub total: f64,
    /// Spin entropy against the angular qubit, via the tangle.
    pub angular: f64,
    /// `total − angular`.
    pub gap: f64,
    /// Weight of the state inside the angular-qubit subspace.
    pub weight: f64,
}

/// `ΔS = S(spin | oscillators) − S(spin | angular qubit)`.
pub fn entanglement_gap(s: &PureState, p: &EeParams) -> Result<GapReport> {
    let total = von_neumann_entropy(&s.reduced_density(&[0])?)?.bits();
    let reduction = ee::angular_qubit_reduction(s, p)?;
    let c = concurrence(&reduction.density)?;
    let angular = tangle_to_entropy((c * c).min(1.0))?.bits();
    Ok(GapReport { total, angular, gap: total - angular, weight: reduction.weight })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{CVector, ONE, ZERO};
    use nalgebra::Schur;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn density(m: CMatrix, dims: Vec<usize>) -> DensityMatrix {
        DensityMatrix::new(m, dims).unwrap()
    }

    fn random_pure(rng: &mut ChaCha8Rng, dims: Vec<usize>) -> PureState {
        let d = dims.iter().product();
        let v = CVector::from_fn(d, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        PureState::normalized(v, dims).unwrap()
    }

    fn bell() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(CVector::from_vec(vec![C64::from(s), ZERO, ZERO, C64::from(s)]), vec![2, 2]).unwrap()
    }

    /// Wootters recipe through the non-Hermitian product, eigenvalues from a complex Schur form.
    fn concurrence_oracle(rho: &CMatrix) -> f64 {
        let yy = spin_flip();
        let prod = rho * (&yy * rho.map(|z| z.conj()) * &yy);
        let (_, t) = Schur::new(prod).unpack();
        let mut l: Vec<f64> = (0..4).map(|i| t[(i, i)].re.max(0.0).sqrt()).collect();
        l.sort_by(|a, b| b.total_cmp(a));
        (l[0] - l[1] - l[2] - l[3]).max(0.0)
    }

    #[test]
    fn entropy_reference_values() {
        let pure = density(CMatrix::from_fn(2, 2, |i, j| if i == 0 && j == 0 { ONE } else { ZERO }), vec![2]);
        assert_eq!(von_neumann_entropy(&pure).unwrap().bits(), 0.0);
        let mixed = density(CMatrix::identity(2, 2) * C64::from(0.5), vec![2]);
        assert!((von_neumann_entropy(&mixed).unwrap().bits() - 1.0).abs() < 1e-15);
        let quarter = density(CMatrix::from_diagonal(&CVector::from_vec(vec![C64::from(0.25), C64::from(0.75)])), vec![2]);
        assert!((von_neumann_entropy(&quarter).unwrap().bits() - 0.811_278_124_459_132_8).abs() < 1e-12);
    }

    #[test]
    fn entropy_rejects_negative_spectrum() {
        assert!(entropy_of_spectrum(&[1.1, -0.1]).is_err());
        assert_eq!(entropy_of_spectrum(&[1.0, -1e-12]).unwrap().bits(), 0.0);
    }

    #[test]
    fn entropy_is_unitarily_invariant_and_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let s = random_pure(&mut rng, vec![3, 4]);
            let a = von_neumann_entropy(&s.reduced_density(&[0]).unwrap()).unwrap().bits();
            let b = von_neumann_entropy(&s.reduced_density(&[1]).unwrap()).unwrap().bits();
            assert!((a - b).abs() < 1e-10);
            let rho = s.reduced_density(&[1]).unwrap();
            let h = CMatrix::from_fn(4, 4, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let (_, u) = linalg::eigh(&(&h + h.adjoint()));
            let rotated = density(&u * rho.entries() * u.adjoint(), vec![4]);
            assert!((von_neumann_entropy(&rotated).unwrap().bits() - b).abs() < 1e-12);
        }
    }

    #[test]
    fn concurrence_endpoints() {
        assert!((concurrence(&bell().density()).unwrap() - 1.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let a = random_pure(&mut rng, vec![2]);
            let b = random_pure(&mut rng, vec![2]);
            let prod = PureState::new(a.amplitudes().kronecker(b.amplitudes()), vec![2, 2]).unwrap();
            assert!(concurrence(&prod.density()).unwrap() < 1e-7);
        }
        assert!(concurrence(&density(CMatrix::identity(2, 2) * C64::from(0.5), vec![2])).is_err());
    }

    #[test]
    fn werner_states_match_independent_recipe() {
        let phi = bell().density();
        for p in [0.2, 0.5, 0.9] {
            let m = phi.entries() * C64::from(p) + CMatrix::identity(4, 4) * C64::from((1.0 - p) / 4.0);
            let c = concurrence(&density(m.clone(), vec![2, 2])).unwrap();
            assert!((c - concurrence_oracle(&m)).abs() < 1e-8);
            assert!((c - ((3.0 * p - 1.0) / 2.0).max(0.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn concurrence_invariant_under_local_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let s = random_pure(&mut rng, vec![2, 2, 2]);
            let rho = s.reduced_density(&[0, 1]).unwrap();
            let c = concurrence(&rho).unwrap();
            let local = |rng: &mut ChaCha8Rng| {
                let h = CMatrix::from_fn(2, 2, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
                linalg::eigh(&(&h + h.adjoint())).1
            };
            let u = local(&mut rng).kronecker(&local(&mut rng));
            let rotated = density(&u * rho.entries() * u.adjoint(), vec![2, 2]);
            assert!((concurrence(&rotated).unwrap() - c).abs() < 1e-10);
            assert!((c - concurrence_oracle(rho.entries())).abs() < 1e-7);
        }
    }

    #[test]
    fn tangle_conversion() {
        assert_eq!(tangle_to_entropy(0.0).unwrap().bits(), 0.0);
        assert!((tangle_to_entropy(1.0).unwrap().bits() - 1.0).abs() < 1e-15);
        assert!(tangle_to_entropy(1.5).is_err());
        // Eigenvalues (¼, ¾) correspond to τ = 4·¼·¾.
        assert!((tangle_to_entropy(0.75).unwrap().bits() - 0.811_278_124_459_132_8).abs() < 1e-12);
    }

    #[test]
    fn pure_state_entropy_equals_tangle_entropy() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let s = random_pure(&mut rng, vec![2, 2]);
            let direct = von_neumann_entropy(&s.reduced_density(&[0]).unwrap()).unwrap().bits();
            let c = concurrence(&s.density()).unwrap();
            assert!((direct - tangle_to_entropy(c * c).unwrap().bits()).abs() < 1e-10);
        }
    }
}
