//! The E⊗ε model: a qubit coupled to two degenerate oscillator modes.
//!
//! `H = ω(a†a + b†b + 1) + (L/(2√2))[(a+a†)σ_θ + (b+b†)σ_ε] + Δσ_ϖ`, with the
//! qubit factor first, then mode θ (`a`), then mode ε (`b`).

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::hermite_functions;
use crate::linalg::{self, CMatrix, CVector, DensityMatrix, OperatorMatrix, PureState, C64, I, ZERO};
use crate::special::gauss_legendre;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EeParams {
    pub coupling: f64,
    pub omega: f64,
    /// Transverse field along ϖ.
    pub delta: f64,
    /// Per-mode truncation: occupations `0..=fock`.
    pub fock: usize,
}

impl EeParams {
    pub fn new(coupling: f64, omega: f64, delta: f64, fock: usize) -> Result<Self> {
        let p = EeParams { coupling, omega, delta, fock };
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
        EeParams { fock, ..self }
    }

    pub fn dims(&self) -> Vec<usize> {
        vec![2, self.fock + 1, self.fock + 1]
    }

    pub fn dim(&self) -> usize {
        2 * (self.fock + 1) * (self.fock + 1)
    }

    fn index(&self, spin: usize, i: usize, j: usize) -> usize {
        let d = self.fock + 1;
        (spin * d + i) * d + j
    }

    fn split(&self, idx: usize) -> (usize, usize, usize) {
        let d = self.fock + 1;
        (idx / (d * d), (idx / d) % d, idx % d)
    }

    /// Total occupation `i + j` of a basis index.
    fn occupation(&self, idx: usize) -> usize {
        let (_, i, j) = self.split(idx);
        i + j
    }

    /// Basis indices whose total occupation is at most `N − 2`.
    pub fn interior_mask(&self) -> Vec<bool> {
        (0..self.dim()).map(|k| self.occupation(k) + 2 <= self.fock).collect()
    }
}

/// Row-wise sparse complex matrix.
#[derive(Debug, Clone)]
pub(crate) struct Sparse {
    rows: Vec<Vec<(usize, C64)>>,
}

impl Sparse {
    fn zeros(dim: usize) -> Self {
        Sparse { rows: vec![Vec::new(); dim] }
    }

    fn push(&mut self, r: usize, c: usize, v: C64) {
        if v == ZERO {
            return;
        }
        match self.rows[r].iter_mut().find(|(cc, _)| *cc == c) {
            Some(entry) => entry.1 += v,
            None => self.rows[r].push((c, v)),
        }
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }

    fn from_dense(m: &CMatrix) -> Self {
        let mut s = Sparse::zeros(m.nrows());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)] != ZERO {
                    s.rows[r].push((c, m[(r, c)]));
                }
            }
        }
        s
    }

    fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                m[(r, c)] += v;
            }
        }
        m
    }

    fn entry(&self, r: usize, c: usize) -> C64 {
        self.rows[r].iter().filter(|(cc, _)| *cc == c).map(|(_, v)| *v).sum()
    }

    fn max_abs(&self) -> f64 {
        self.rows.iter().flatten().fold(0.0, |acc, (_, v)| acc.max(v.norm()))
    }

    /// Frobenius norm of `[self, other]` restricted to rows and columns in `mask`.
    fn masked_commutator_norm(&self, other: &Sparse, mask: &[bool]) -> f64 {
        let mut total = 0.0;
        let mut acc: Vec<C64> = vec![ZERO; self.dim()];
        let mut touched = Vec::new();
        for r in (0..self.dim()).filter(|&r| mask[r]) {
            for &(k, a) in &self.rows[r] {
                for &(c, b) in &other.rows[k] {
                    if acc[c] == ZERO {
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            for &(k, b) in &other.rows[r] {
                for &(c, a) in &self.rows[k] {
                    if acc[c] == ZERO {
                        touched.push(c);
                    }
                    acc[c] -= b * a;
                }
            }
            for &c in &touched {
                if mask[c] {
                    total += acc[c].norm_sqr();
                }
                acc[c] = ZERO;
            }
            touched.clear();
        }
        total.sqrt()
    }

    fn masked_frobenius(&self, mask: &[bool]) -> f64 {
        let mut total = 0.0;
        for (_, row) in self.rows.iter().enumerate().filter(|(r, _)| mask[*r]) {
            total += row.iter().filter(|(c, _)| mask[*c]).map(|(_, v)| v.norm_sqr()).sum::<f64>();
        }
        total.sqrt()
    }

    fn is_hermitian(&self) -> bool {
        let scale = self.max_abs();
        self.rows.iter().enumerate().all(|(r, row)| {
            row.iter().all(|&(c, v)| (v - self.entry(c, r).conj()).norm() <= 1e-12 * scale.max(f64::MIN_POSITIVE))
        })
    }
}

fn hamiltonian_sparse(p: &EeParams) -> Sparse {
    let d = p.fock + 1;
    let mut h = Sparse::zeros(p.dim());
    let g = p.coupling / (2.0 * std::f64::consts::SQRT_2);
    // σ_θ = diag(−1, 1), σ_ε = [[0,1],[1,0]], σ_ϖ = [[0,i],[−i,0]].
    let sigma_theta = [-1.0, 1.0];
    for s in 0..2 {
        for i in 0..d {
            for j in 0..d {
                let r = p.index(s, i, j);
                h.push(r, r, C64::from(p.omega * (i + j + 1) as f64));
                if p.coupling != 0.0 {
                    let st = sigma_theta[s];
                    if i + 1 < d {
                        h.push(r, p.index(s, i + 1, j), C64::from(g * st * ((i + 1) as f64).sqrt()));
                    }
                    if i > 0 {
                        h.push(r, p.index(s, i - 1, j), C64::from(g * st * (i as f64).sqrt()));
                    }
                    if j + 1 < d {
                        h.push(r, p.index(1 - s, i, j + 1), C64::from(g * ((j + 1) as f64).sqrt()));
                    }
                    if j > 0 {
                        h.push(r, p.index(1 - s, i, j - 1), C64::from(g * (j as f64).sqrt()));
                    }
                }
                if p.delta != 0.0 {
                    let w = if s == 0 { I } else { -I };
                    h.push(r, p.index(1 - s, i, j), w * p.delta);
                }
            }
        }
    }
    h
}

/// `i(a b† − a† b)` on the two-mode factor, embedded with the qubit identity.
fn angular_momentum_sparse(p: &EeParams) -> Sparse {
    let d = p.fock + 1;
    let mut l = Sparse::zeros(p.dim());
    for s in 0..2 {
        for i in 0..d {
            for j in 0..d {
                let c = p.index(s, i, j);
                // a b†|i,j⟩ = √i √(j+1) |i−1, j+1⟩
                if i > 0 && j + 1 < d {
                    let amp = ((i * (j + 1)) as f64).sqrt();
                    l.push(p.index(s, i - 1, j + 1), c, I * amp);
                }
                // a† b|i,j⟩ = √(i+1) √j |i+1, j−1⟩
                if j > 0 && i + 1 < d {
                    let amp = (((i + 1) * j) as f64).sqrt();
                    l.push(p.index(s, i + 1, j - 1), c, -I * amp);
                }
            }
        }
    }
    l
}

fn sigma_w_sparse(p: &EeParams, factor: f64) -> Sparse {
    let d = p.fock + 1;
    let mut m = Sparse::zeros(p.dim());
    for i in 0..d {
        for j in 0..d {
            m.push(p.index(0, i, j), p.index(1, i, j), I * factor);
            m.push(p.index(1, i, j), p.index(0, i, j), -I * factor);
        }
    }
    m
}

fn add_sparse(a: &Sparse, b: &Sparse) -> Sparse {
    let mut out = a.clone();
    for (r, row) in b.rows.iter().enumerate() {
        for &(c, v) in row {
            out.push(r, c, v);
        }
    }
    out
}

pub fn build_hamiltonian_two_mode(p: &EeParams) -> Result<OperatorMatrix> {
    p.validate()?;
    OperatorMatrix::hermitian(hamiltonian_sparse(p).to_dense(), p.dims())
}

/// `L_ϖ = q_θ p_ε − q_ε p_θ = i(a b† − a† b)`.
pub fn angular_momentum_w(p: &EeParams) -> Result<OperatorMatrix> {
    p.validate()?;
    OperatorMatrix::hermitian(angular_momentum_sparse(p).to_dense(), p.dims())
}

fn j_sparse(p: &EeParams, spin_factor: f64) -> Sparse {
    add_sparse(&angular_momentum_sparse(p), &sigma_w_sparse(p, spin_factor))
}

/// Candidate spin factors `s` in `J_ϖ = L_ϖ + s σ_ϖ`.
pub const SPIN_FACTORS: [f64; 2] = [1.0, 0.5];

/// Relative interior commutator bound.
pub const COMMUTATOR_BOUND: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct ConservedJ {
    pub operator: OperatorMatrix,
    pub spin_factor: f64,
    /// Relative interior residual `‖[J,H]‖/‖H‖` for `s = 1` and `s = ½`.
    pub residual_one: f64,
    pub residual_half: f64,
    /// Both factors commute at the requested point (decoupled limit).
    pub tie: bool,
}

fn relative_residual(h: &Sparse, j: &Sparse, mask: &[bool]) -> f64 {
    let scale = h.masked_frobenius(mask).max(f64::MIN_POSITIVE);
    h.masked_commutator_norm(j, mask) / scale
}

fn select_spin_factor(p: &EeParams) -> Result<(f64, f64, f64, bool)> {
    let residuals = |q: &EeParams| -> (f64, f64) {
        let h = hamiltonian_sparse(q);
        let mask = q.interior_mask();
        (relative_residual(&h, &j_sparse(q, 1.0), &mask), relative_residual(&h, &j_sparse(q, 0.5), &mask))
    };
    let (one, half) = residuals(p);
    let tie = one <= COMMUTATOR_BOUND && half <= COMMUTATOR_BOUND;
    // A tie is broken at a coupled reference point on the same truncation.
    let (ref_one, ref_half) = if tie { residuals(&EeParams { coupling: 1.0, ..*p }) } else { (one, half) };
    let factor = if ref_half <= ref_one { 0.5 } else { 1.0 };
    let best = ref_one.min(ref_half);
    if best > COMMUTATOR_BOUND {
        return Err(Error::SpinFactor { residual_one: one, residual_half: half });
    }
    Ok((factor, one, half, tie))
}

/// `J_ϖ = L_ϖ + s σ_ϖ` with `s` selected by the smallest interior commutator with `H`.
pub fn conserved_j_w(p: &EeParams) -> Result<ConservedJ> {
    p.validate()?;
    if p.fock < 3 {
        return Err(Error::InvalidParameter("the interior subspace needs a truncation of at least 3".into()));
    }
    let (spin_factor, residual_one, residual_half, tie) = select_spin_factor(p)?;
    let operator = OperatorMatrix::hermitian(j_sparse(p, spin_factor).to_dense(), p.dims())?;
    Ok(ConservedJ { operator, spin_factor, residual_one, residual_half, tie })
}

/// A sparse eigenvector of `J` supported on one connected sector.
#[derive(Debug, Clone)]
struct SectorVector {
    sector: usize,
    column: usize,
}

#[derive(Debug, Clone)]
struct Sector {
    indices: Vec<usize>,
    vectors: CMatrix,
}

/// Orthonormal eigenbasis of `J`, one sparse vector per basis state.
#[derive(Debug, Clone)]
pub struct JBasis {
    dim: usize,
    sectors: Vec<Sector>,
    vectors: Vec<SectorVector>,
    values: Vec<f64>,
}

impl JBasis {
    fn new(j: &Sparse) -> Result<Self> {
        let dim = j.dim();
        let mut parent: Vec<usize> = (0..dim).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut y = x;
            while parent[y] != r {
                let next = parent[y];
                parent[y] = r;
                y = next;
            }
            r
        }
        for (r, row) in j.rows.iter().enumerate() {
            for &(c, _) in row {
                let (a, b) = (find(&mut parent, r), find(&mut parent, c));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; dim];
        for k in 0..dim {
            let root = find(&mut parent, k);
            if slot[root] == usize::MAX {
                slot[root] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[root]].push(k);
        }
        let mut sectors = Vec::with_capacity(groups.len());
        let mut vectors = Vec::with_capacity(dim);
        let mut values = Vec::with_capacity(dim);
        for (s, indices) in groups.into_iter().enumerate() {
            let block = CMatrix::from_fn(indices.len(), indices.len(), |a, b| j.entry(indices[a], indices[b]));
            let (vals, vecs) = linalg::eigh(&block);
            for (column, v) in vals.into_iter().enumerate() {
                vectors.push(SectorVector { sector: s, column });
                values.push(v);
            }
            sectors.push(Sector { indices, vectors: vecs });
        }
        Ok(JBasis { dim, sectors, vectors, values })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn value(&self, k: usize) -> f64 {
        self.values[k]
    }

    /// Dense form of basis vector `k`.
    pub fn vector(&self, k: usize) -> CVector {
        let mut v = CVector::zeros(self.dim);
        self.accumulate(k, ONE_C, &mut v);
        v
    }

    fn accumulate(&self, k: usize, coeff: C64, out: &mut CVector) {
        let sv = &self.vectors[k];
        let sector = &self.sectors[sv.sector];
        for (a, &idx) in sector.indices.iter().enumerate() {
            out[idx] += coeff * sector.vectors[(a, sv.column)];
        }
    }
}

const ONE_C: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone)]
pub struct SymmetryBlock {
    pub j_value: f64,
    /// Indices into the `J` eigenbasis of the decomposition.
    pub indices: Vec<usize>,
    pub block: OperatorMatrix,
}

#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    pub basis: JBasis,
    pub blocks: Vec<SymmetryBlock>,
    /// Relative interior commutator `‖[J,H]‖/‖H‖`.
    pub interior_residual: f64,
    /// Largest norm of `H v` falling outside the block of `v` (truncation boundary only).
    pub boundary_leakage: f64,
}

impl BlockDecomposition {
    /// Eigenvalues of all blocks, ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.blocks.iter().flat_map(|b| linalg::eigvalsh(b.block.entries())).collect();
        all.sort_by(f64::total_cmp);
        all
    }

    /// Lowest eigenpair of block `b`, the vector expanded in the full basis.
    pub fn block_ground(&self, b: usize) -> (f64, CVector) {
        let block = &self.blocks[b];
        let (vals, vecs) = linalg::eigh(block.block.entries());
        let mut v = CVector::zeros(self.basis.dim);
        for (a, &k) in block.indices.iter().enumerate() {
            self.basis.accumulate(k, vecs[(a, 0)], &mut v);
        }
        (vals[0], v)
    }

    /// Lowest eigenvalue of every block.
    pub fn block_minima(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| linalg::eigvalsh(b.block.entries())[0]).collect()
    }

    pub fn largest_block(&self) -> usize {
        self.blocks.iter().map(|b| b.indices.len()).max().unwrap_or(0)
    }
}

/// Eigenvalue clustering tolerance for `J`.
pub const J_CLUSTER_TOL: f64 = 1e-9;

fn decompose_sparse(h: &Sparse, j: &Sparse, mask: &[bool]) -> Result<BlockDecomposition> {
    if h.dim() != j.dim() {
        return Err(Error::Dimension(format!("H has dimension {}, J has {}", h.dim(), j.dim())));
    }
    let interior_residual = relative_residual(h, j, mask);
    if interior_residual > COMMUTATOR_BOUND {
        return Err(Error::NonCommuting { residual: interior_residual, bound: COMMUTATOR_BOUND });
    }
    let basis = JBasis::new(j)?;
    let mut order: Vec<usize> = (0..basis.len()).collect();
    order.sort_by(|&a, &b| basis.values[a].total_cmp(&basis.values[b]).then(a.cmp(&b)));
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for k in order {
        let v = basis.values[k];
        if clusters.is_empty() || v - last > J_CLUSTER_TOL {
            clusters.push(Vec::new());
        }
        clusters.last_mut().expect("nonempty").push(k);
        last = v;
    }

    let dim = h.dim();
    let mut scratch = vec![ZERO; dim];
    let mut touched_idx = Vec::new();
    let mut touched_sector = vec![false; basis.sectors.len()];
    let mut sector_of = vec![0usize; dim];
    for (s, sec) in basis.sectors.iter().enumerate() {
        for &idx in &sec.indices {
            sector_of[idx] = s;
        }
    }
    let mut blocks = Vec::with_capacity(clusters.len());
    let mut leakage = 0.0f64;
    for members in clusters {
        let n = members.len();
        let mut block = CMatrix::zeros(n, n);
        for (l, &kl) in members.iter().enumerate() {
            let sv = &basis.vectors[kl];
            let sec = &basis.sectors[sv.sector];
            // (H v)_r = Σ_c conj(H[c, r]) v_c, using Hermiticity to walk rows.
            for (a, &c) in sec.indices.iter().enumerate() {
                let vc = sec.vectors[(a, sv.column)];
                if vc == ZERO {
                    continue;
                }
                for &(r, hcr) in &h.rows[c] {
                    if scratch[r] == ZERO {
                        touched_idx.push(r);
                        touched_sector[sector_of[r]] = true;
                    }
                    scratch[r] += hcr.conj() * vc;
                }
            }
            let image_norm: f64 = touched_idx.iter().map(|&r| scratch[r].norm_sqr()).sum();
            let mut captured = 0.0;
            for (k, &kk) in members.iter().enumerate() {
                let svk = &basis.vectors[kk];
                if !touched_sector[svk.sector] {
                    continue;
                }
                let seck = &basis.sectors[svk.sector];
                let mut dot = ZERO;
                for (a, &r) in seck.indices.iter().enumerate() {
                    dot += seck.vectors[(a, svk.column)].conj() * scratch[r];
                }
                block[(k, l)] = dot;
                captured += dot.norm_sqr();
            }
            leakage = leakage.max((image_norm - captured).max(0.0).sqrt());
            for &r in &touched_idx {
                scratch[r] = ZERO;
                touched_sector[sector_of[r]] = false;
            }
            touched_idx.clear();
        }
        let block = (&block + block.adjoint()) * C64::from(0.5);
        let j_value = members.iter().map(|&k| basis.values[k]).sum::<f64>() / n as f64;
        let size = block.nrows();
        blocks.push(SymmetryBlock { j_value, indices: members, block: OperatorMatrix::hermitian(block, vec![size])? });
    }
    Ok(BlockDecomposition { basis, blocks, interior_residual, boundary_leakage: leakage })
}

/// Splits `h` into the eigenspaces of the conserved `j`.
///
/// For operators on the `(2, N+1, N+1)` space the commutator is checked on the
/// interior subspace (total occupation ≤ N−2); otherwise on the whole space.
pub fn block_decompose(h: &OperatorMatrix, j: &OperatorMatrix) -> Result<BlockDecomposition> {
    if !h.is_hermitian() || !j.is_hermitian() {
        return Err(Error::NonHermitian { max_asymmetry: h.max_asymmetry().max(j.max_asymmetry()), scale: h.max_abs() });
    }
    let dims = h.factor_dims();
    let mask = match dims {
        [2, a, b] if a == b && *a >= 1 => EeParams { coupling: 0.0, omega: 1.0, delta: 0.0, fock: a - 1 }.interior_mask(),
        _ => vec![true; h.dim()],
    };
    decompose_sparse(&Sparse::from_dense(h.entries()), &Sparse::from_dense(j.entries()), &mask)
}

/// Block decomposition built directly from the sparse model operators.
pub fn decompose_model(p: &EeParams) -> Result<(BlockDecomposition, f64)> {
    p.validate()?;
    let (spin_factor, ..) = select_spin_factor(&p.with_fock(p.fock.max(3)))?;
    let h = hamiltonian_sparse(p);
    debug_assert!(h.is_hermitian());
    let j = j_sparse(p, spin_factor);
    Ok((decompose_sparse(&h, &j, &p.interior_mask())?, spin_factor))
}

/// Largest split tolerated between the two members of the Δ=0 ground pair.
pub const GROUND_SPLIT_TOL: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct GroundPair {
    /// The member with `J_ϖ = +½` (`|Ψ⟩`).
    pub psi: PureState,
    /// Its complex conjugate (`|Ψ*⟩`, `J_ϖ = −½`).
    pub psi_conj: PureState,
    pub energy: f64,
    /// Energy difference between the lowest two levels.
    pub gap: f64,
    pub j_values: [f64; 2],
    pub spin_factor: f64,
}

impl GroundPair {
    /// `c1|Ψ⟩ + c2 e^{iγ}|Ψ*⟩`.
    pub fn superposition(&self, c1: f64, gamma: f64) -> Result<PureState> {
        if !(0.0..=1.0).contains(&c1) {
            return Err(Error::InvalidParameter(format!("c1 must lie in [0, 1], got {c1}")));
        }
        let c2 = (1.0 - c1 * c1).max(0.0).sqrt();
        let amps = self.psi.amplitudes() * C64::from(c1) + self.psi_conj.amplitudes() * C64::from_polar(c2, gamma);
        PureState::normalized(amps, self.psi.factor_dims().to_vec())
    }
}

/// Fixes the global phase so the amplitude on `|↓⟩|0,0⟩` is real and positive
/// (the largest amplitude if that one vanishes).
fn fix_phase(v: &mut CVector) {
    let anchor = if v[0].norm() > 1e-12 {
        v[0]
    } else {
        v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap_or(ONE_C)
    };
    if anchor.norm() > 0.0 {
        *v *= anchor.conj() / anchor.norm();
    }
}

fn lowest_blocks(dec: &BlockDecomposition) -> Vec<(f64, usize)> {
    let mut minima: Vec<(f64, usize)> = dec.block_minima().into_iter().enumerate().map(|(b, e)| (e, b)).collect();
    minima.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    minima
}

/// Degenerate Δ=0 ground pair `|Ψ⟩`, `|Ψ*⟩` from the block solve.
pub fn ground_pair(p: &EeParams) -> Result<GroundPair> {
    if p.delta != 0.0 {
        return Err(Error::InvalidParameter("the degenerate ground pair exists only at delta = 0".into()));
    }
    let (dec, spin_factor) = decompose_model(p)?;
    let minima = lowest_blocks(&dec);
    let (e0, b0) = minima[0];
    let (e1, b1) = minima[1];
    let gap = e1 - e0;
    // Inside a block the lowest level could itself be degenerate; include it.
    let inner_gap = {
        let vals = linalg::eigvalsh(dec.blocks[b0].block.entries());
        vals.get(1).map(|v| v - vals[0]).unwrap_or(f64::INFINITY)
    };
    let gap = gap.min(inner_gap);
    if gap > GROUND_SPLIT_TOL {
        return Err(Error::GroundSplit { gap, tolerance: GROUND_SPLIT_TOL });
    }
    let (jb0, jb1) = (dec.blocks[b0].j_value, dec.blocks[b1].j_value);
    let chosen = if jb0 >= jb1 { b0 } else { b1 };
    let (energy, mut v) = dec.block_ground(chosen);
    fix_phase(&mut v);
    let psi = PureState::normalized(v, p.dims())?;
    let psi_conj = psi.conj();
    let j = dec.blocks[chosen].j_value;
    Ok(GroundPair { psi, psi_conj, energy, gap, j_values: [j, -j], spin_factor })
}

#[derive(Debug, Clone)]
pub struct EeGroundState {
    pub state: PureState,
    pub energy: f64,
    pub j_value: f64,
    /// Gap to the next level.
    pub gap: f64,
}

/// Lowest eigenstate; at Δ=0 this is the `|Ψ⟩` member of the ground pair.
pub fn ground_state(p: &EeParams) -> Result<EeGroundState> {
    if p.delta == 0.0 {
        let pair = ground_pair(p)?;
        return Ok(EeGroundState { energy: pair.energy, j_value: pair.j_values[0], gap: pair.gap, state: pair.psi });
    }
    let (dec, _) = decompose_model(p)?;
    let minima = lowest_blocks(&dec);
    let (energy, b) = minima[0];
    let vals = linalg::eigvalsh(dec.blocks[b].block.entries());
    let gap = vals.get(1).map(|v| v - energy).unwrap_or(f64::INFINITY).min(minima.get(1).map(|m| m.0 - energy).unwrap_or(f64::INFINITY));
    let (_, mut v) = dec.block_ground(b);
    fix_phase(&mut v);
    Ok(EeGroundState { state: PureState::normalized(v, p.dims())?, energy, j_value: dec.blocks[b].j_value, gap })
}

/// Spin ⊗ angular-qubit reduction of a two-mode state.
#[derive(Debug, Clone)]
pub struct AngularReduction {
    /// 4×4 density, spin first, angular qubit (m = 0, 1) second; renormalized.
    pub density: DensityMatrix,
    /// Norm of the state inside the m ∈ {0, 1} subspace.
    pub weight: f64,
    /// Weight in each angular-momentum sector `m`, for `|m| ≤ 3`.
    pub spectrum: Vec<(i32, f64)>,
}

/// Smallest angular-qubit weight accepted.
pub const ANGULAR_MIN_WEIGHT: f64 = 0.5;

/// Projects the oscillator part onto the `m = 0` and `m = 1` eigenspaces of
/// `L_ϖ` and integrates out the radial coordinate on a polar grid.
pub fn angular_qubit_reduction(s: &PureState, p: &EeParams) -> Result<AngularReduction> {
    p.validate()?;
    if s.factor_dims() != p.dims().as_slice() {
        return Err(Error::Dimension(format!("state factors {:?} do not match {:?}", s.factor_dims(), p.dims())));
    }
    let d = p.fock + 1;
    let m_values: Vec<i32> = (-3..=3).collect();
    let n_phi = 4 * p.fock + 8;
    let q_max = (2.0 * p.fock as f64).sqrt() + 8.0;
    let (nodes, weights) = gauss_legendre(200 + 2 * p.fock, 0.0, q_max);
    let amps = s.amplitudes();
    let coeff = |spin: usize| CMatrix::from_fn(d, d, |i, j| amps[p.index(spin, i, j)]);
    let c = [coeff(0), coeff(1)];

    let mut hx = vec![0.0; d];
    let mut hy = vec![0.0; d];
    let trig: Vec<(f64, f64)> = (0..n_phi).map(|k| (2.0 * PI * k as f64 / n_phi as f64).sin_cos()).collect();
    let dphi = 2.0 * PI / n_phi as f64;
    let norm = 1.0 / (2.0 * PI).sqrt();
    let mut weight_by_m = vec![0.0; m_values.len()];
    let mut rho = CMatrix::zeros(4, 4);
    for (&q, &w) in nodes.iter().zip(&weights) {
        // proj[spin][m] = ∫ ψ_spin(q, φ) e^{−imφ} dφ / √(2π)
        let mut proj = vec![[ZERO; 7]; 2];
        for &(sin, cos) in &trig {
            hermite_functions(p.fock, q * cos, &mut hx);
            hermite_functions(p.fock, q * sin, &mut hy);
            let hy_c = CVector::from_iterator(d, hy.iter().map(|&v| C64::from(v)));
            let phases: Vec<C64> = m_values.iter().map(|&m| C64::new(cos, -sin).powi(m) * (dphi * norm)).collect();
            for (spin, cm) in c.iter().enumerate() {
                let t = cm * &hy_c;
                let psi: C64 = hx.iter().zip(t.iter()).map(|(a, b)| b * *a).sum();
                for (slot, phase) in phases.iter().enumerate() {
                    proj[spin][slot] += psi * phase;
                }
            }
        }
        for (slot, wm) in weight_by_m.iter_mut().enumerate() {
            *wm += w * q * (proj[0][slot].norm_sqr() + proj[1][slot].norm_sqr());
        }
        // m = 0 sits in slot 3, m = 1 in slot 4.
        let local = [proj[0][3], proj[0][4], proj[1][3], proj[1][4]];
        for a in 0..4 {
            for b in 0..4 {
                rho[(a, b)] += local[a] * local[b].conj() * (w * q);
            }
        }
    }
    let total = s.norm().powi(2);
    let spectrum: Vec<(i32, f64)> = m_values.iter().copied().zip(weight_by_m.iter().map(|w| w / total)).collect();
    let weight = rho.trace().re / total;
    if weight < ANGULAR_MIN_WEIGHT {
        return Err(Error::AngularWeight { weight, spectrum });
    }
    let rho = &rho / C64::from(rho.trace().re);
    let rho = (&rho + rho.adjoint()) * C64::from(0.5);
    Ok(AngularReduction { density: DensityMatrix::new(rho, vec![2, 2])?, weight, spectrum })
}
