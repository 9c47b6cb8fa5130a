//! Dense complex linear algebra over tensor-product Hilbert spaces.
//!
//! Every operator and state carries the list of tensor-factor dimensions it
//! lives on. The project-wide factor order is qubit first, then the
//! oscillator modes (θ before ε).

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Numerical tolerances used when validating operators and states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative bound on `max |A - A^H| / max |A|`.
    pub hermitian: f64,
    /// Absolute bound on `|Tr ρ - 1|`.
    pub trace: f64,
    /// Most negative eigenvalue tolerated in a density matrix.
    pub positivity: f64,
    /// Absolute bound on `| |ψ| - 1 |`.
    pub norm: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { hermitian: 1e-12, trace: 1e-10, positivity: 1e-10, norm: 1e-12 }
    }
}

fn check_dims(dim: usize, factor_dims: &[usize]) -> Result<()> {
    if factor_dims.is_empty() || factor_dims.contains(&0) {
        return Err(Error::Dimension(format!("factor dimensions {factor_dims:?} must be positive")));
    }
    let product: usize = factor_dims.iter().product();
    if product != dim {
        return Err(Error::Dimension(format!(
            "factor dimensions {factor_dims:?} multiply to {product}, expected {dim}"
        )));
    }
    Ok(())
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn max_asymmetry(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in j..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// A square complex matrix acting on a tensor-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: CMatrix,
    factor_dims: Vec<usize>,
    hermitian_hint: bool,
}

impl OperatorMatrix {
    pub fn new(entries: CMatrix, factor_dims: Vec<usize>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::Dimension(format!(
                "operator must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        check_dims(entries.nrows(), &factor_dims)?;
        Ok(OperatorMatrix { entries, factor_dims, hermitian_hint: false })
    }

    /// Builds an operator flagged Hermitian, verifying the flag.
    pub fn hermitian(entries: CMatrix, factor_dims: Vec<usize>) -> Result<Self> {
        Self::hermitian_with(entries, factor_dims, &Tolerances::default())
    }

    pub fn hermitian_with(entries: CMatrix, factor_dims: Vec<usize>, tol: &Tolerances) -> Result<Self> {
        let mut op = Self::new(entries, factor_dims)?;
        op.verify_hermitian(tol)?;
        op.hermitian_hint = true;
        Ok(op)
    }

    pub fn from_real(entries: &DMatrix<f64>, factor_dims: Vec<usize>) -> Result<Self> {
        Self::new(entries.map(|x| C64::new(x, 0.0)), factor_dims)
    }

    pub fn identity(factor_dims: Vec<usize>) -> Self {
        let n = factor_dims.iter().product();
        OperatorMatrix { entries: CMatrix::identity(n, n), factor_dims, hermitian_hint: true }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_hint
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.entries)
    }

    pub fn max_asymmetry(&self) -> f64 {
        max_asymmetry(&self.entries)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn verify_hermitian(&self, tol: &Tolerances) -> Result<()> {
        let scale = self.max_abs();
        let asym = self.max_asymmetry();
        if asym > tol.hermitian * scale.max(f64::MIN_POSITIVE) && asym > 0.0 {
            return Err(Error::NonHermitian { max_asymmetry: asym, scale });
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        OperatorMatrix {
            entries: self.entries.adjoint(),
            factor_dims: self.factor_dims.clone(),
            hermitian_hint: self.hermitian_hint,
        }
    }

    /// Matrix product `self · other`; the result carries no Hermitian flag.
    pub fn matmul(&self, other: &OperatorMatrix) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!("cannot multiply {} by {}", self.dim(), other.dim())));
        }
        Ok(OperatorMatrix {
            entries: &self.entries * &other.entries,
            factor_dims: self.factor_dims.clone(),
            hermitian_hint: false,
        })
    }

    pub fn scale(&self, s: C64) -> Self {
        OperatorMatrix {
            entries: &self.entries * s,
            factor_dims: self.factor_dims.clone(),
            hermitian_hint: self.hermitian_hint && s.im == 0.0,
        }
    }

    pub fn add(&self, other: &OperatorMatrix) -> Result<Self> {
        if self.factor_dims != other.factor_dims {
            return Err(Error::Dimension(format!(
                "cannot add operators on {:?} and {:?}",
                self.factor_dims, other.factor_dims
            )));
        }
        Ok(OperatorMatrix {
            entries: &self.entries + &other.entries,
            factor_dims: self.factor_dims.clone(),
            hermitian_hint: self.hermitian_hint && other.hermitian_hint,
        })
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &OperatorMatrix) -> Result<Self> {
        let ab = self.matmul(other)?;
        let ba = other.matmul(self)?;
        Ok(OperatorMatrix {
            entries: ab.entries - ba.entries,
            factor_dims: self.factor_dims.clone(),
            hermitian_hint: false,
        })
    }

    pub fn apply(&self, state: &PureState) -> Result<CVector> {
        if state.dim() != self.dim() {
            return Err(Error::Dimension(format!(
                "operator of dimension {} applied to state of dimension {}",
                self.dim(),
                state.dim()
            )));
        }
        Ok(&self.entries * &state.amplitudes)
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, state: &PureState) -> Result<C64> {
        let av = self.apply(state)?;
        Ok(state.amplitudes.dotc(&av))
    }

    /// Restricts the operator to the listed basis indices (rows and columns).
    pub fn submatrix(&self, indices: &[usize]) -> CMatrix {
        CMatrix::from_fn(indices.len(), indices.len(), |i, j| self.entries[(indices[i], indices[j])])
    }
}

/// Kronecker product `a ⊗ b`, with `(a⊗b)[iq+k, jq+l] = a[i,j]·b[k,l]`, `q = dim(b)`.
pub fn kron(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    let mut factor_dims = a.factor_dims.clone();
    factor_dims.extend_from_slice(&b.factor_dims);
    OperatorMatrix {
        entries: a.entries.kronecker(&b.entries),
        factor_dims,
        hermitian_hint: a.hermitian_hint && b.hermitian_hint,
    }
}

/// Full Hermitian eigendecomposition of a raw matrix, eigenvalues ascending.
///
/// Only the lower triangle is read.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut values: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: PureState,
}

/// Lowest `k` eigenpairs of a Hermitian operator (all of them if `k` exceeds the dimension).
pub fn hermitian_eig(a: &OperatorMatrix, k: usize) -> Result<Vec<Eigenpair>> {
    if !a.hermitian_hint {
        return Err(Error::NonHermitian { max_asymmetry: a.max_asymmetry(), scale: a.max_abs() });
    }
    a.verify_hermitian(&Tolerances::default())?;
    let (values, vectors) = eigh(&a.entries);
    Ok(values
        .into_iter()
        .take(k)
        .enumerate()
        .map(|(i, value)| Eigenpair {
            value,
            vector: PureState { amplitudes: vectors.column(i).into_owned(), factor_dims: a.factor_dims.clone() },
        })
        .collect())
}

/// Index bookkeeping that splits a flat tensor index into kept and traced parts.
struct FactorSplit {
    kept_dims: Vec<usize>,
    kept_dim: usize,
    traced_dim: usize,
    /// `full[t * kept_dim + k]` is the flat index with kept index `k` and traced index `t`.
    full: Vec<usize>,
}

impl FactorSplit {
    fn new(factor_dims: &[usize], keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::InvalidParameter("partial trace must keep at least one factor".into()));
        }
        for &k in keep {
            if k >= factor_dims.len() {
                return Err(Error::InvalidFactor { index: k, factors: factor_dims.len() });
            }
        }
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let kept_dims: Vec<usize> = keep.iter().map(|&k| factor_dims[k]).collect();
        let kept_dim: usize = kept_dims.iter().product();
        let dim: usize = factor_dims.iter().product();
        let traced_dim = dim / kept_dim;

        let mut full = vec![0; dim];
        let mut digits = vec![0usize; factor_dims.len()];
        for flat in 0..dim {
            let mut rem = flat;
            for f in (0..factor_dims.len()).rev() {
                digits[f] = rem % factor_dims[f];
                rem /= factor_dims[f];
            }
            let (mut k, mut t) = (0, 0);
            for (f, &d) in digits.iter().enumerate() {
                if keep.binary_search(&f).is_ok() {
                    k = k * factor_dims[f] + d;
                } else {
                    t = t * factor_dims[f] + d;
                }
            }
            full[t * kept_dim + k] = flat;
        }
        Ok(FactorSplit { kept_dims, kept_dim, traced_dim, full })
    }
}

/// A pure state vector on a tensor-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
    factor_dims: Vec<usize>,
}

impl PureState {
    /// Wraps amplitudes without normalizing them.
    pub fn new(amplitudes: CVector, factor_dims: Vec<usize>) -> Result<Self> {
        check_dims(amplitudes.len(), &factor_dims)?;
        Ok(PureState { amplitudes, factor_dims })
    }

    /// Wraps and normalizes amplitudes.
    pub fn normalized(amplitudes: CVector, factor_dims: Vec<usize>) -> Result<Self> {
        let mut s = Self::new(amplitudes, factor_dims)?;
        s.normalize()?;
        Ok(s)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(index: usize, factor_dims: Vec<usize>) -> Result<Self> {
        let dim: usize = factor_dims.iter().product();
        if index >= dim {
            return Err(Error::Dimension(format!("basis index {index} out of range {dim}")));
        }
        let mut amplitudes = CVector::zeros(dim);
        amplitudes[index] = ONE;
        Self::new(amplitudes, factor_dims)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidState(format!("cannot normalize a state of norm {n}")));
        }
        self.amplitudes.unscale_mut(n);
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn conj(&self) -> PureState {
        PureState { amplitudes: self.amplitudes.map(|z| z.conj()), factor_dims: self.factor_dims.clone() }
    }

    /// Multiplies by a global phase `e^{iθ}`.
    pub fn with_phase(&self, theta: f64) -> PureState {
        PureState { amplitudes: &self.amplitudes * C64::from_polar(1.0, theta), factor_dims: self.factor_dims.clone() }
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix { entries: &self.amplitudes * self.amplitudes.adjoint(), factor_dims: self.factor_dims.clone() }
    }

    /// Reduced density matrix on the factors in `keep`, computed directly from
    /// the amplitudes without forming the full projector.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let split = FactorSplit::new(&self.factor_dims, keep)?;
        let m = CMatrix::from_fn(split.kept_dim, split.traced_dim, |k, t| {
            self.amplitudes[split.full[t * split.kept_dim + k]]
        });
        let norm_sqr = self.amplitudes.norm_squared();
        Ok(DensityMatrix { entries: (&m * m.adjoint()) / C64::new(norm_sqr, 0.0), factor_dims: split.kept_dims })
    }
}

/// A density operator on a tensor-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
    factor_dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity with default tolerances.
    pub fn new(entries: CMatrix, factor_dims: Vec<usize>) -> Result<Self> {
        Self::with_tolerances(entries, factor_dims, &Tolerances::default())
    }

    pub fn with_tolerances(entries: CMatrix, factor_dims: Vec<usize>, tol: &Tolerances) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::Dimension("density matrix must be square".into()));
        }
        check_dims(entries.nrows(), &factor_dims)?;
        let rho = DensityMatrix { entries, factor_dims };
        rho.validate(tol)?;
        Ok(rho)
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let asym = max_asymmetry(&self.entries);
        if asym > tol.hermitian.max(1e-12) {
            return Err(Error::NonHermitian { max_asymmetry: asym, scale: max_abs(&self.entries) });
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > tol.trace {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = self.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -tol.positivity {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// Eigenvalues ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvalsh(&self.entries)
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        (&self.entries * &self.entries).trace().re
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        partial_trace(self, keep)
    }
}

/// Traces out every factor not listed in `keep`. Kept factors stay in ascending order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let split = FactorSplit::new(&rho.factor_dims, keep)?;
    let kd = split.kept_dim;
    let mut out = CMatrix::zeros(kd, kd);
    for t in 0..split.traced_dim {
        let row = &split.full[t * kd..(t + 1) * kd];
        for (c, &fc) in row.iter().enumerate() {
            for (r, &fr) in row.iter().enumerate() {
                out[(r, c)] += rho.entries[(fr, fc)];
            }
        }
    }
    Ok(DensityMatrix { entries: out, factor_dims: split.kept_dims })
}

pub mod pauli {
    //! Qubit matrices in the `(|↓⟩, |↑⟩)` basis, `|↓⟩ = (1, 0)ᵀ`.
    use super::*;

    fn op(m: [[C64; 2]; 2]) -> OperatorMatrix {
        let entries = CMatrix::from_fn(2, 2, |i, j| m[i][j]);
        OperatorMatrix { entries, factor_dims: vec![2], hermitian_hint: true }
    }

    pub fn identity() -> OperatorMatrix {
        OperatorMatrix::identity(vec![2])
    }

    /// `σ_x`, also written `σ_ε`.
    pub fn sigma_x() -> OperatorMatrix {
        op([[ZERO, ONE], [ONE, ZERO]])
    }

    /// Standard `σ_y = [[0, −i], [i, 0]]`.
    pub fn sigma_y() -> OperatorMatrix {
        op([[ZERO, -I], [I, ZERO]])
    }

    /// `σ_z = diag(−1, 1)`, also written `σ_θ`.
    pub fn sigma_z() -> OperatorMatrix {
        op([[-ONE, ZERO], [ZERO, ONE]])
    }

    /// `σ_ϖ = [[0, i], [−i, 0]]`, the axis perpendicular to both mode displacements.
    pub fn sigma_w() -> OperatorMatrix {
        op([[ZERO, I], [-I, ZERO]])
    }
}
