//! The E⊗β model: a qubit linearly coupled to a single oscillator.
//!
//! `H = Δσ_x + (L/√(2ω)) σ_z (a + a†) + ω a†a`, qubit factor first.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock;
use crate::linalg::{self, kron, pauli, CMatrix, CVector, DensityMatrix, OperatorMatrix, PureState, C64, ZERO};
use crate::special::{laguerre, ln_factorial};

/// Qubit index of `|↓⟩` and `|↑⟩` in the `(|↓⟩, |↑⟩)` basis.
const DOWN: usize = 0;
const UP: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EbParams {
    /// Coupling `L`.
    pub coupling: f64,
    pub omega: f64,
    /// Transverse field `Δ`.
    pub delta: f64,
    /// Fock truncation: states `0..=fock` are kept.
    pub fock: usize,
}

impl EbParams {
    pub fn new(coupling: f64, omega: f64, delta: f64, fock: usize) -> Result<Self> {
        let p = EbParams { coupling, omega, delta, fock };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(Error::InvalidParameter(format!("omega must be positive, got {}", self.omega)));
        }
        if !(self.coupling >= 0.0) || !self.coupling.is_finite() {
            return Err(Error::InvalidParameter(format!("coupling must be non-negative, got {}", self.coupling)));
        }
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return Err(Error::InvalidParameter(format!("delta must be non-negative, got {}", self.delta)));
        }
        if self.fock < 1 {
            return Err(Error::InvalidParameter("Fock truncation must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_fock(self, fock: usize) -> Self {
        EbParams { fock, ..self }
    }

    fn dims(&self) -> Vec<usize> {
        vec![2, self.fock + 1]
    }

    /// Dimensionless displacement `β₀ = (L/ω²)√(ω/2)` of each well.
    pub fn beta0(&self) -> f64 {
        self.coupling / (self.omega * self.omega) * (self.omega / 2.0).sqrt()
    }

    /// Position `L/ω²` of the right well minimum.
    pub fn well_position(&self) -> f64 {
        self.coupling / (self.omega * self.omega)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Branch {
    /// Spin ↑, centred at `q = −L/ω²`.
    Left,
    /// Spin ↓, centred at `q = +L/ω²`.
    Right,
}

impl Branch {
    fn spin(self) -> usize {
        match self {
            Branch::Left => UP,
            Branch::Right => DOWN,
        }
    }

    fn sign(self) -> f64 {
        match self {
            Branch::Left => -1.0,
            Branch::Right => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DisplacedBasisLabel {
    pub branch: Branch,
    pub n: usize,
}

/// `E_n = ωn − L²/(2ω²)`, the Δ=0 level of either branch.
pub fn energy_level(n: usize, p: &EbParams) -> f64 {
    p.omega * n as f64 - p.coupling * p.coupling / (2.0 * p.omega * p.omega)
}

pub fn build_hamiltonian_fock(p: &EbParams) -> Result<OperatorMatrix> {
    p.validate()?;
    let n = p.fock;
    let field = kron(&pauli::sigma_x(), &OperatorMatrix::identity(vec![n + 1])).scale(C64::from(p.delta));
    let coupling = kron(&pauli::sigma_z(), &fock::quadrature_sum(n)).scale(C64::from(p.coupling / (2.0 * p.omega).sqrt()));
    let osc = kron(&pauli::identity(), &fock::number(n)).scale(C64::from(p.omega));
    let h = field.add(&coupling)?.add(&osc)?;
    OperatorMatrix::hermitian(h.into_entries(), p.dims())
}

fn displacement_element_with(m: usize, n: usize, beta: C64, ln_fact: &[f64]) -> C64 {
    let x = beta.norm_sqr();
    if x == 0.0 {
        return if m == n { C64::from(1.0) } else { ZERO };
    }
    let (lo, hi) = (m.min(n), m.max(n));
    let k = hi - lo;
    // For m < n the element picks up (−β*)^{n−m} in place of β^{m−n}.
    let base = if m >= n { beta } else { -beta.conj() };
    let ln_mag = 0.5 * (ln_fact[lo] - ln_fact[hi]) + k as f64 * x.sqrt().ln() - 0.5 * x;
    let poly = laguerre(lo, k as f64, x);
    C64::from_polar(ln_mag.exp() * poly, k as f64 * base.arg())
}

/// `⟨m|D(β)|n⟩` with `D(β) = exp(βa† − β*a)`, in closed form via generalized
/// Laguerre polynomials.
pub fn displacement_matrix_element(m: usize, n: usize, beta: C64) -> C64 {
    let ln_fact: Vec<f64> = (0..=m.max(n)).map(ln_factorial).collect();
    displacement_element_with(m, n, beta, &ln_fact)
}

/// The `(n_max+1)²` table of `⟨m|D(β)|n⟩`.
pub fn displacement_table(n_max: usize, beta: C64) -> CMatrix {
    let mut ln_fact = vec![0.0; n_max + 1];
    for k in 1..=n_max {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    CMatrix::from_fn(n_max + 1, n_max + 1, |m, n| displacement_element_with(m, n, beta, &ln_fact))
}

fn displaced_column(n: usize, n_max: usize, beta: C64) -> CVector {
    let mut ln_fact = vec![0.0; n_max.max(n) + 1];
    for k in 1..ln_fact.len() {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    CVector::from_fn(n_max + 1, |m, _| displacement_element_with(m, n, beta, &ln_fact))
}

/// `|ψ_n^{L,R}⟩` expanded in the truncated qubit⊗Fock basis.
#[derive(Debug, Clone)]
pub struct ExactEigenstate {
    pub state: PureState,
    /// Norm lost to the truncation before renormalizing.
    pub leakage: f64,
}

impl ExactEigenstate {
    pub const LEAKAGE_WARNING: f64 = 1e-8;

    pub fn truncation_warning(&self) -> bool {
        self.leakage > Self::LEAKAGE_WARNING
    }
}

/// The Δ=0 eigenstate `|spin⟩ ⊗ D(∓β₀)|n⟩` of the given branch.
pub fn exact_eigenstate(label: DisplacedBasisLabel, p: &EbParams) -> Result<ExactEigenstate> {
    p.validate()?;
    if label.n > p.fock {
        return Err(Error::InvalidParameter(format!("Fock index {} exceeds truncation {}", label.n, p.fock)));
    }
    let osc = displaced_column(label.n, p.fock, C64::from(label.branch.sign() * p.beta0()));
    let norm_sqr = osc.norm_squared();
    let mut amps = CVector::zeros(2 * (p.fock + 1));
    let offset = label.branch.spin() * (p.fock + 1);
    amps.rows_mut(offset, p.fock + 1).copy_from(&osc);
    let state = PureState::normalized(amps, p.dims())?;
    Ok(ExactEigenstate { state, leakage: (1.0 - norm_sqr).max(0.0) })
}

/// Hamiltonian in the displaced-Fock basis: indices `0..=N` are `ψ_n^L`, the
/// next `N+1` are `ψ_n^R`.
pub fn build_hamiltonian_displaced(p: &EbParams) -> Result<OperatorMatrix> {
    p.validate()?;
    let d = p.fock + 1;
    let mut h = CMatrix::zeros(2 * d, 2 * d);
    for n in 0..d {
        let e = C64::from(energy_level(n, p));
        h[(n, n)] = e;
        h[(d + n, d + n)] = e;
    }
    if p.delta != 0.0 {
        let forward = displacement_table(p.fock, C64::from(2.0 * p.beta0()));
        let backward = displacement_table(p.fock, C64::from(-2.0 * p.beta0()));
        for m in 0..d {
            for n in 0..d {
                h[(m, d + n)] = forward[(m, n)] * p.delta;
                h[(d + m, n)] = backward[(m, n)] * p.delta;
            }
        }
    }
    OperatorMatrix::hermitian(h, vec![2, d])
}

fn check_c1(c1: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c1) {
        return Err(Error::InvalidParameter(format!("c1 must lie in [0, 1], got {c1}")));
    }
    Ok((1.0 - c1 * c1).max(0.0).sqrt())
}

/// `c1|ψ_0^L⟩ + c2 e^{iγ}|ψ_0^R⟩` from the closed-form branch states.
pub fn ground_superposition(c1: f64, gamma: f64, p: &EbParams) -> Result<PureState> {
    let c2 = check_c1(c1)?;
    let left = exact_eigenstate(DisplacedBasisLabel { branch: Branch::Left, n: 0 }, p)?.state;
    let right = exact_eigenstate(DisplacedBasisLabel { branch: Branch::Right, n: 0 }, p)?.state;
    superpose(&left, &right, c1, c2, gamma)
}

fn superpose(left: &PureState, right: &PureState, c1: f64, c2: f64, gamma: f64) -> Result<PureState> {
    let amps = left.amplitudes() * C64::from(c1) + right.amplitudes() * C64::from_polar(c2, gamma);
    PureState::normalized(amps, left.factor_dims().to_vec())
}

/// Overlap `S = ⟨χ_0^L|χ_0^R⟩ = ⟨0|D(2β₀)|0⟩` of the two displaced oscillator ground states.
pub fn wavefunction_overlap(p: &EbParams) -> f64 {
    displacement_matrix_element(0, 0, C64::from(2.0 * p.beta0())).re
}

/// Closed-form reduced qubit density of [`ground_superposition`].
pub fn reduced_qubit_density_delta0(c1: f64, gamma: f64, p: &EbParams) -> Result<DensityMatrix> {
    p.validate()?;
    let c2 = check_c1(c1)?;
    let s = wavefunction_overlap(p);
    let coherence = C64::from_polar(c1 * c2 * s, -gamma);
    let mut rho = CMatrix::zeros(2, 2);
    rho[(DOWN, DOWN)] = C64::from(c2 * c2);
    rho[(UP, UP)] = C64::from(c1 * c1);
    rho[(UP, DOWN)] = coherence;
    rho[(DOWN, UP)] = coherence.conj();
    DensityMatrix::new(rho, vec![2])
}

/// Numerically diagonalized Δ=0 ground pair, gauge-fixed to the branch states.
#[derive(Debug, Clone)]
pub struct GroundPair {
    pub left: PureState,
    pub right: PureState,
    /// Lowest two eigenvalues.
    pub energies: [f64; 2],
}

impl GroundPair {
    pub fn superposition(&self, c1: f64, gamma: f64) -> Result<PureState> {
        let c2 = check_c1(c1)?;
        superpose(&self.left, &self.right, c1, c2, gamma)
    }

    pub fn splitting(&self) -> f64 {
        self.energies[1] - self.energies[0]
    }
}

/// Diagonalizes the Fock Hamiltonian at Δ=0 and rotates the degenerate ground
/// eigenspace onto the closed-form `ψ_0^L`, `ψ_0^R` (Löwdin orthonormalized).
pub fn degenerate_ground_pair(p: &EbParams) -> Result<GroundPair> {
    if p.delta != 0.0 {
        return Err(Error::InvalidParameter("the degenerate ground pair exists only at delta = 0".into()));
    }
    let h = build_hamiltonian_fock(p)?;
    let (values, vectors) = linalg::eigh(h.entries());
    let span = vectors.columns(0, 2).into_owned();
    let project = |label| -> Result<CVector> {
        let exact = exact_eigenstate(label, p)?.state;
        Ok(&span * (span.adjoint() * exact.amplitudes()))
    };
    let l = project(DisplacedBasisLabel { branch: Branch::Left, n: 0 })?;
    let r = project(DisplacedBasisLabel { branch: Branch::Right, n: 0 })?;
    let (l, r) = lowdin(l, r)?;
    let dims = p.dims();
    Ok(GroundPair {
        left: PureState::new(l, dims.clone())?,
        right: PureState::new(r, dims)?,
        energies: [values[0], values[1]],
    })
}

/// Symmetric orthonormalization of two vectors.
pub(crate) fn lowdin(a: CVector, b: CVector) -> Result<(CVector, CVector)> {
    let m = CMatrix::from_columns(&[a, b]);
    let gram = m.adjoint() * &m;
    let (vals, vecs) = linalg::eigh(&gram);
    if vals[0] <= 1e-12 {
        return Err(Error::InvalidState("projected branch states are linearly dependent".into()));
    }
    let inv_sqrt = CMatrix::from_diagonal(&CVector::from_iterator(2, vals.iter().map(|v| C64::from(v.powf(-0.5)))));
    let ortho = m * (&vecs * inv_sqrt * vecs.adjoint());
    Ok((ortho.column(0).into_owned(), ortho.column(1).into_owned()))
}

/// Ground state for Δ > 0, obtained in a parity sector of the displaced basis.
#[derive(Debug, Clone)]
pub struct EbGroundState {
    pub energy: f64,
    /// Eigenvalue ±1 of `P = σ_x ⊗ (−1)^{a†a}`.
    pub parity: i8,
    /// Gap to the lowest level of the opposite parity.
    pub parity_gap: f64,
    /// Amplitudes on `ψ_n^L`.
    pub left: CVector,
    /// Amplitudes on `ψ_n^R`.
    pub right: CVector,
    pub qubit_density: DensityMatrix,
}

/// Hamiltonian restricted to the parity-`p` states `(ψ_n^L + p(−1)^n ψ_n^R)/√2`.
pub fn parity_sector_hamiltonian(parity: i8, p: &EbParams) -> Result<OperatorMatrix> {
    p.validate()?;
    if parity != 1 && parity != -1 {
        return Err(Error::InvalidParameter(format!("parity must be ±1, got {parity}")));
    }
    let d = p.fock + 1;
    let table = displacement_table(p.fock, C64::from(2.0 * p.beta0()));
    let sign = f64::from(parity) * p.delta;
    let h = CMatrix::from_fn(d, d, |m, n| {
        let alt = if n % 2 == 0 { 1.0 } else { -1.0 };
        let diag = if m == n { energy_level(n, p) } else { 0.0 };
        C64::from(diag) + table[(m, n)] * (sign * alt)
    });
    // Symmetrize away rounding so the Hermitian check is exact.
    let h = (&h + h.adjoint()) * C64::from(0.5);
    OperatorMatrix::hermitian(h, vec![d])
}

/// Qubit density of a state given by its displaced-basis amplitudes.
pub fn qubit_density_from_displaced(left: &CVector, right: &CVector, p: &EbParams) -> Result<DensityMatrix> {
    // ⟨n|D(−2β₀)|m⟩ overlaps the right-branch state n with the left-branch state m.
    let overlap = displacement_table(p.fock, C64::from(-2.0 * p.beta0()));
    let up = left.norm_squared();
    let down = right.norm_squared();
    let total = up + down;
    let coherence = right.adjoint() * &overlap * left;
    let c = coherence[(0, 0)] / total;
    let mut rho = CMatrix::zeros(2, 2);
    rho[(UP, UP)] = C64::from(up / total);
    rho[(DOWN, DOWN)] = C64::from(down / total);
    rho[(UP, DOWN)] = c;
    rho[(DOWN, UP)] = c.conj();
    DensityMatrix::new(rho, vec![2])
}

pub fn ground_state(p: &EbParams) -> Result<EbGroundState> {
    let solve = |parity: i8| -> Result<(f64, CVector)> {
        let h = parity_sector_hamiltonian(parity, p)?;
        let real = h.entries().map(|z| z.re);
        let eig = real.symmetric_eigen();
        let k = eig.eigenvalues.imin();
        Ok((eig.eigenvalues[k], eig.eigenvectors.column(k).map(C64::from)))
    };
    let (e_minus, v_minus) = solve(-1)?;
    let (e_plus, v_plus) = solve(1)?;
    let (parity, energy, v, gap) =
        if e_minus <= e_plus { (-1i8, e_minus, v_minus, e_plus - e_minus) } else { (1, e_plus, v_plus, e_minus - e_plus) };
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let left = v.map(|z| z * scale);
    let right = CVector::from_fn(v.len(), |n, _| {
        let alt = if n % 2 == 0 { 1.0 } else { -1.0 };
        v[n] * (scale * f64::from(parity) * alt)
    });
    let qubit_density = qubit_density_from_displaced(&left, &right, p)?;
    Ok(EbGroundState { energy, parity, parity_gap: gap, left, right, qubit_density })
}

/// Maps displaced-basis amplitudes to the plain qubit⊗Fock basis (truncated at `p.fock`).
pub fn displaced_to_fock(left: &CVector, right: &CVector, p: &EbParams) -> Result<PureState> {
    let d = p.fock + 1;
    let back = displacement_table(p.fock, C64::from(-p.beta0()));
    let fwd = displacement_table(p.fock, C64::from(p.beta0()));
    let mut amps = CVector::zeros(2 * d);
    amps.rows_mut(UP * d, d).copy_from(&(&back * left));
    amps.rows_mut(DOWN * d, d).copy_from(&(&fwd * right));
    PureState::normalized(amps, p.dims())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(l: f64, delta: f64, n: usize) -> EbParams {
        EbParams::new(l, 1.0, delta, n).unwrap()
    }

    fn expm(a: &CMatrix) -> CMatrix {
        // Scaling and squaring with a Taylor series.
        let norm = a.iter().map(|z| z.norm()).fold(0.0, f64::max) * a.nrows() as f64;
        let s = norm.log2().ceil().max(0.0) as i32 + 1;
        let b = a / C64::from(2f64.powi(s));
        let mut term = CMatrix::identity(a.nrows(), a.ncols());
        let mut sum = term.clone();
        for k in 1..40 {
            term = &term * &b / C64::from(k as f64);
            sum += &term;
        }
        for _ in 0..s {
            sum = &sum * &sum;
        }
        sum
    }

    #[test]
    fn decoupled_oscillator_spectrum() {
        let h = build_hamiltonian_fock(&params(0.0, 0.0, 10)).unwrap();
        let e = linalg::eigvalsh(h.entries());
        for k in 0..10 {
            assert!((e[2 * k] - k as f64).abs() < 1e-12);
            assert!((e[2 * k + 1] - k as f64).abs() < 1e-12);
        }
        let h = build_hamiltonian_fock(&params(0.0, 1.0, 10)).unwrap();
        assert!((linalg::eigvalsh(h.entries())[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn delta_zero_ground_energy() {
        let h = build_hamiltonian_fock(&params(1.0, 0.0, 60)).unwrap();
        let e = linalg::eigvalsh(h.entries());
        assert!((e[0] + 0.5).abs() < 1e-8);
        assert!(e[1] - e[0] < 1e-8);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(EbParams::new(1.0, 0.0, 0.0, 10).is_err());
        assert!(EbParams::new(-1.0, 1.0, 0.0, 10).is_err());
        assert!(EbParams::new(1.0, 1.0, 0.0, 0).is_err());
    }

    #[test]
    fn displacement_identity_and_vacuum() {
        assert_eq!(displacement_matrix_element(3, 3, ZERO), C64::from(1.0));
        assert_eq!(displacement_matrix_element(2, 3, ZERO), ZERO);
        let beta = C64::new(0.4, -0.3);
        let d00 = displacement_matrix_element(0, 0, beta);
        assert!((d00 - C64::from((-beta.norm_sqr() / 2.0).exp())).norm() < 1e-15);
    }

    #[test]
    fn displacement_table_matches_matrix_exponential() {
        let big = 80;
        for beta in [C64::from(0.7), C64::new(0.3, -0.5)] {
            let a = fock::annihilation(big);
            let gen = a.entries().adjoint() * beta - a.entries() * beta.conj();
            let oracle = expm(&gen);
            let table = displacement_table(25, beta);
            for m in 0..=25 {
                for n in 0..=25 {
                    assert!((table[(m, n)] - oracle[(m, n)]).norm() < 1e-9, "({m},{n})");
                }
            }
        }
    }

    #[test]
    fn zero_coupling_branch_state() {
        let s = exact_eigenstate(DisplacedBasisLabel { branch: Branch::Left, n: 0 }, &params(0.0, 0.0, 5)).unwrap();
        let expect = PureState::basis(UP * 6, vec![2, 6]).unwrap();
        assert_eq!(s.state, expect);
        assert_eq!(s.leakage, 0.0);
    }

    #[test]
    fn branch_state_is_an_eigenstate_at_its_well() {
        let p = params(1.0, 0.0, 60);
        let h = build_hamiltonian_fock(&p).unwrap();
        let r = exact_eigenstate(DisplacedBasisLabel { branch: Branch::Right, n: 0 }, &p).unwrap();
        assert!(!r.truncation_warning());
        let hv = h.apply(&r.state).unwrap();
        let resid = (hv - r.state.amplitudes() * C64::from(energy_level(0, &p))).norm();
        assert!(resid < 1e-7);
        let x = kron(&pauli::identity(), &fock::quadrature_sum(p.fock)).scale(C64::from(1.0 / (2.0 * p.omega).sqrt()));
        let q = x.expectation(&r.state).unwrap().re;
        assert!((q - p.well_position()).abs() < 1e-7);
        let l = exact_eigenstate(DisplacedBasisLabel { branch: Branch::Left, n: 3 }, &p).unwrap();
        assert_eq!(l.state.inner(&r.state), ZERO);
    }

    #[test]
    fn leakage_is_reported() {
        let s = exact_eigenstate(DisplacedBasisLabel { branch: Branch::Right, n: 0 }, &params(6.0, 0.0, 5)).unwrap();
        assert!(s.truncation_warning());
    }

    #[test]
    fn displaced_hamiltonian_structure() {
        let p = params(1.3, 0.0, 8);
        let h = build_hamiltonian_displaced(&p).unwrap();
        for i in 0..18 {
            for j in 0..18 {
                if i != j {
                    assert_eq!(h.entries()[(i, j)], ZERO);
                }
            }
            assert!((h.entries()[(i, i)].re - energy_level(i % 9, &p)).abs() < 1e-15);
        }
        let h = build_hamiltonian_displaced(&params(0.0, 0.7, 6)).unwrap();
        assert!((linalg::eigvalsh(h.entries())[0] + 0.7).abs() < 1e-14);
    }

    #[test]
    fn displaced_and_fock_bases_agree() {
        let hd = build_hamiltonian_displaced(&params(1.0, 0.5, 40)).unwrap();
        let hf = build_hamiltonian_fock(&params(1.0, 0.5, 80)).unwrap();
        let (ed, ef) = (linalg::eigvalsh(hd.entries()), linalg::eigvalsh(hf.entries()));
        assert!((ed[0] - ef[0]).abs() < 1e-7);
    }

    #[test]
    fn superposition_endpoints_and_energy() {
        let p = params(1.0, 0.0, 60);
        let left = exact_eigenstate(DisplacedBasisLabel { branch: Branch::Left, n: 0 }, &p).unwrap().state;
        let end = ground_superposition(1.0, 0.3, &p).unwrap();
        assert!((end.amplitudes() - left.amplitudes()).norm() < 1e-15);
        let s = ground_superposition(std::f64::consts::FRAC_1_SQRT_2, 0.0, &params(0.0, 0.0, 4)).unwrap();
        let rho = s.reduced_density(&[0]).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-14);
        let h = build_hamiltonian_fock(&p).unwrap();
        for c1 in [0.0, 0.3, 0.6, 0.9] {
            for gamma in [0.0, 1.0, 2.5] {
                let s = ground_superposition(c1, gamma, &p).unwrap();
                assert!((s.norm() - 1.0).abs() < 1e-12);
                assert!((h.expectation(&s).unwrap().re + 0.5).abs() < 1e-8);
            }
        }
        assert!(ground_superposition(1.2, 0.0, &p).is_err());
    }

    #[test]
    fn overlap_is_gaussian_in_coupling() {
        for (l, w) in [(1.0, 1.0), (0.5, 2.0), (2.0, 1.5)] {
            let p = EbParams::new(l, w, 0.0, 10).unwrap();
            let expect = (-(l * l) / (w * w * w)).exp();
            assert!((wavefunction_overlap(&p) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn closed_form_density_matches_partial_trace() {
        for i in 0..=10 {
            let c1 = i as f64 / 10.0;
            for j in 0..=10 {
                let l = 0.2 * j as f64;
                let p = params(l, 0.0, 60);
                let gamma = 0.7;
                let numeric = ground_superposition(c1, gamma, &p).unwrap().reduced_density(&[0]).unwrap();
                let closed = reduced_qubit_density_delta0(c1, gamma, &p).unwrap();
                let diff = (numeric.entries() - closed.entries()).iter().map(|z| z.norm()).fold(0.0, f64::max);
                assert!(diff < 1e-9, "c1={c1} L={l}: {diff}");
            }
        }
    }

    #[test]
    fn gauge_fixed_pair_matches_branches() {
        let p = params(1.5, 0.0, 60);
        let pair = degenerate_ground_pair(&p).unwrap();
        assert!(pair.splitting() < 1e-8);
        let exact = exact_eigenstate(DisplacedBasisLabel { branch: Branch::Left, n: 0 }, &p).unwrap().state;
        assert!((pair.left.inner(&exact).norm() - 1.0).abs() < 1e-10);
        assert!(pair.left.inner(&pair.right).norm() < 1e-12);
        let s = pair.superposition(0.6, 1.1).unwrap();
        let closed = reduced_qubit_density_delta0(0.6, 1.1, &p).unwrap();
        let diff = (s.reduced_density(&[0]).unwrap().entries() - closed.entries()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-9);
    }

    #[test]
    fn parity_sector_ground_matches_fock() {
        let p = params(1.0, 0.5, 60);
        let g = ground_state(&p).unwrap();
        assert_eq!(g.parity, -1);
        let hf = build_hamiltonian_fock(&p).unwrap();
        let pairs = linalg::hermitian_eig(&hf, 1).unwrap();
        assert!((g.energy - pairs[0].value).abs() < 1e-10);
        let fock_rho = pairs[0].vector.reduced_density(&[0]).unwrap();
        let diff = (fock_rho.entries() - g.qubit_density.entries()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-8);
        let back = displaced_to_fock(&g.left, &g.right, &p).unwrap();
        assert!((back.inner(&pairs[0].vector).norm() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn parity_operator_commutes() {
        let p = params(0.8, 0.6, 12);
        let h = build_hamiltonian_fock(&p).unwrap();
        let alt = CMatrix::from_fn(13, 13, |i, j| if i == j { C64::from(if i % 2 == 0 { 1.0 } else { -1.0 }) } else { ZERO });
        let parity = kron(&pauli::sigma_x(), &OperatorMatrix::new(alt, vec![13]).unwrap());
        assert!(parity.commutator(&h).unwrap().max_abs() < 1e-12);
    }
}
