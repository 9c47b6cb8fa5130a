//! Classical analogues: a spinning top (unit vector `L`) coupled to one or two
//! oscillators. Fixed points, linear stability and bifurcation thresholds.
//!
//! E⊗β: `H = ΔL_x + L q L_z + (p² + ω²q²)/2`.
//! E⊗ε: `H = ω(p_θ² + q_θ² + p_ε² + q_ε²)/2 + (L/2)(q_θ L_θ + q_ε L_ε) + ΔL_ϖ`.
//! Spin brackets are `{L_i, L_j} = ε_ijk L_k`, giving `L̇ = B × L` with `B = ∂H/∂L`.

use nalgebra::{DMatrix, DVector, Schur};
use serde::Serialize;

use crate::eb::EbParams;
use crate::ee::EeParams;
use crate::error::{Error, Result};

/// Largest equation-of-motion residual accepted at a fixed point.
pub const FIXED_POINT_RESIDUAL: f64 = 1e-10;
/// Real-part threshold separating unstable from neutral directions.
pub const STABILITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalStateEb {
    pub q: f64,
    pub p: f64,
    pub l_x: f64,
    pub l_y: f64,
    pub l_z: f64,
}

impl ClassicalStateEb {
    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_vec(vec![self.q, self.p, self.l_x, self.l_y, self.l_z])
    }

    pub fn from_slice(x: &[f64]) -> Self {
        ClassicalStateEb { q: x[0], p: x[1], l_x: x[2], l_y: x[3], l_z: x[4] }
    }

    pub fn spin_norm(&self) -> f64 {
        (self.l_x * self.l_x + self.l_y * self.l_y + self.l_z * self.l_z).sqrt()
    }
}

/// Two-mode state; the spin components are ordered `(L_ε, L_ϖ, L_θ)` as a right-handed triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalStateEe {
    pub q_theta: f64,
    pub p_theta: f64,
    pub q_eps: f64,
    pub p_eps: f64,
    pub l_eps: f64,
    pub l_w: f64,
    pub l_theta: f64,
}

impl ClassicalStateEe {
    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_vec(vec![self.q_theta, self.p_theta, self.q_eps, self.p_eps, self.l_eps, self.l_w, self.l_theta])
    }

    pub fn from_slice(x: &[f64]) -> Self {
        ClassicalStateEe { q_theta: x[0], p_theta: x[1], q_eps: x[2], p_eps: x[3], l_eps: x[4], l_w: x[5], l_theta: x[6] }
    }

    pub fn spin_norm(&self) -> f64 {
        (self.l_eps * self.l_eps + self.l_w * self.l_w + self.l_theta * self.l_theta).sqrt()
    }
}

/// Parameters of a classical analogue, independent of any Fock truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalParams {
    pub coupling: f64,
    pub omega: f64,
    pub delta: f64,
}

impl From<&EbParams> for ClassicalParams {
    fn from(p: &EbParams) -> Self {
        ClassicalParams { coupling: p.coupling, omega: p.omega, delta: p.delta }
    }
}

impl From<&EeParams> for ClassicalParams {
    fn from(p: &EeParams) -> Self {
        ClassicalParams { coupling: p.coupling, omega: p.omega, delta: p.delta }
    }
}

impl ClassicalParams {
    pub fn new(coupling: f64, omega: f64, delta: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
        }
        if !coupling.is_finite() || !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::InvalidParameter(format!("invalid coupling {coupling} or delta {delta}")));
        }
        Ok(ClassicalParams { coupling, omega, delta })
    }

    fn with_coupling(self, coupling: f64) -> Self {
        ClassicalParams { coupling, ..self }
    }
}

/// A Hamiltonian phase space whose last three coordinates are the spin.
pub trait ClassicalSystem {
    fn dim(&self) -> usize;
    fn eom(&self, x: &DVector<f64>) -> DVector<f64>;
    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64>;
    fn energy(&self, x: &DVector<f64>) -> f64;

    fn spin_offset(&self) -> usize {
        self.dim() - 3
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EbSystem(pub ClassicalParams);

#[derive(Debug, Clone, Copy)]
pub struct EeSystem(pub ClassicalParams);

impl ClassicalSystem for EbSystem {
    fn dim(&self) -> usize {
        5
    }

    fn eom(&self, x: &DVector<f64>) -> DVector<f64> {
        let ClassicalParams { coupling: l, omega: w, delta: d } = self.0;
        let (q, p, lx, ly, lz) = (x[0], x[1], x[2], x[3], x[4]);
        DVector::from_vec(vec![p, -l * lz - w * w * q, -l * q * ly, -d * lz + l * q * lx, d * ly])
    }

    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let ClassicalParams { coupling: l, omega: w, delta: d } = self.0;
        let (q, lx, ly) = (x[0], x[2], x[3]);
        DMatrix::from_row_slice(
            5,
            5,
            &[
                0.0, 1.0, 0.0, 0.0, 0.0, //
                -w * w, 0.0, 0.0, 0.0, -l, //
                -l * ly, 0.0, 0.0, -l * q, 0.0, //
                l * lx, 0.0, l * q, 0.0, -d, //
                0.0, 0.0, 0.0, d, 0.0,
            ],
        )
    }

    fn energy(&self, x: &DVector<f64>) -> f64 {
        let ClassicalParams { coupling: l, omega: w, delta: d } = self.0;
        d * x[2] + l * x[0] * x[4] + 0.5 * (x[1] * x[1] + w * w * x[0] * x[0])
    }
}

impl ClassicalSystem for EeSystem {
    fn dim(&self) -> usize {
        7
    }

    fn eom(&self, x: &DVector<f64>) -> DVector<f64> {
        let ClassicalParams { coupling: l, omega: w, delta: d } = self.0;
        let (qt, pt, qe, pe) = (x[0], x[1], x[2], x[3]);
        let (le, lw, lt) = (x[4], x[5], x[6]);
        let b = [0.5 * l * qe, d, 0.5 * l * qt];
        DVector::from_vec(vec![
            w * pt,
            -w * qt - 0.5 * l * lt,
            w * pe,
            -w * qe - 0.5 * l * le,
            b[1] * lt - b[2] * lw,
            b[2] * le - b[0] * lt,
            b[0] * lw - b[1] * le,
        ])
    }

    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let ClassicalParams { coupling: l, omega: w, delta: d } = self.0;
        let (qt, qe) = (x[0], x[2]);
        let (le, lw, lt) = (x[4], x[5], x[6]);
        let h = 0.5 * l;
        DMatrix::from_row_slice(
            7,
            7,
            &[
                0.0, w, 0.0, 0.0, 0.0, 0.0, 0.0, //
                -w, 0.0, 0.0, 0.0, 0.0, 0.0, -h, //
                0.0, 0.0, 0.0, w, 0.0, 0.0, 0.0, //
                0.0, 0.0, -w, 0.0, -h, 0.0, 0.0, //
                -h * lw, 0.0, 0.0, 0.0, 0.0, -h * qt, d, //
                h * le, 0.0, -h * lt, 0.0, h * qt, 0.0, -h * qe, //
                0.0, 0.0, h * lw, 0.0, -d, h * qe, 0.0,
            ],
        )
    }

    fn energy(&self, x: &DVector<f64>) -> f64 {
        let ClassicalParams { coupling: l, omega: w, delta: d } = self.0;
        0.5 * w * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]) + 0.5 * l * (x[0] * x[6] + x[2] * x[4]) + d * x[5]
    }
}

pub fn eom_eb(s: &ClassicalStateEb, p: &ClassicalParams) -> ClassicalStateEb {
    ClassicalStateEb::from_slice(EbSystem(*p).eom(&s.to_vector()).as_slice())
}

pub fn energy_eb(s: &ClassicalStateEb, p: &ClassicalParams) -> f64 {
    EbSystem(*p).energy(&s.to_vector())
}

pub fn eom_ee(s: &ClassicalStateEe, p: &ClassicalParams) -> ClassicalStateEe {
    ClassicalStateEe::from_slice(EeSystem(*p).eom(&s.to_vector()).as_slice())
}

pub fn energy_ee(s: &ClassicalStateEe, p: &ClassicalParams) -> f64 {
    EeSystem(*p).energy(&s.to_vector())
}

/// One classical fourth-order Runge–Kutta step.
pub fn rk4_step<S: ClassicalSystem + ?Sized>(sys: &S, x: &DVector<f64>, dt: f64) -> DVector<f64> {
    let k1 = sys.eom(x);
    let k2 = sys.eom(&(x + &k1 * (0.5 * dt)));
    let k3 = sys.eom(&(x + &k2 * (0.5 * dt)));
    let k4 = sys.eom(&(x + &k3 * dt));
    x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
}

pub fn integrate<S: ClassicalSystem + ?Sized>(sys: &S, x0: &DVector<f64>, dt: f64, steps: usize) -> DVector<f64> {
    (0..steps).fold(x0.clone(), |x, _| rk4_step(sys, &x, dt))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
    /// No growing direction, but a zero mode remains (continuous family).
    Marginal,
}

impl Stability {
    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Marginal => "marginal",
        }
    }
}

/// Orthonormal basis of the tangent space of the spin sphere at `x`.
fn tangent_basis(x: &DVector<f64>, spin_offset: usize) -> DMatrix<f64> {
    let n = x.len();
    let mut normal = DVector::zeros(n);
    for k in 0..3 {
        normal[spin_offset + k] = x[spin_offset + k];
    }
    let norm = normal.norm();
    if norm > 0.0 {
        normal /= norm;
    }
    let projector = DMatrix::identity(n, n) - &normal * normal.transpose();
    let eig = projector.symmetric_eigen();
    let mut cols: Vec<usize> = (0..n).collect();
    cols.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    DMatrix::from_fn(n, n - 1, |r, c| eig.eigenvectors[(r, cols[c])])
}

/// Eigenvalues `(re, im)` of the Jacobian restricted to the constraint surface.
pub fn tangent_eigenvalues<S: ClassicalSystem + ?Sized>(sys: &S, x: &DVector<f64>) -> Vec<(f64, f64)> {
    let b = tangent_basis(x, sys.spin_offset());
    let reduced = b.transpose() * sys.jacobian(x) * &b;
    let mut eigs = real_matrix_eigenvalues(&reduced);
    eigs.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.total_cmp(&a.1)));
    eigs
}

fn real_matrix_eigenvalues(m: &DMatrix<f64>) -> Vec<(f64, f64)> {
    let n = m.nrows();
    let scale = m.amax().max(1.0);
    for shift in [0.0, 1e-12 * scale, 1e-9 * scale] {
        let shifted = m + DMatrix::identity(n, n) * shift;
        if let Some(schur) = Schur::try_new(shifted, 1e-15, 10_000) {
            return schur.complex_eigenvalues().iter().map(|z| (z.re - shift, z.im)).collect();
        }
    }
    vec![(f64::NAN, 0.0); n]
}

pub fn classify(eigs: &[(f64, f64)]) -> Stability {
    if eigs.iter().any(|e| e.0 > STABILITY_TOL || e.0.is_nan()) {
        Stability::Unstable
    } else if eigs.iter().any(|e| e.0.hypot(e.1) < STABILITY_TOL.sqrt()) {
        Stability::Marginal
    } else {
        Stability::Stable
    }
}

fn residual_norm<S: ClassicalSystem + ?Sized>(sys: &S, x: &DVector<f64>) -> f64 {
    let off = sys.spin_offset();
    let g = x.rows(off, 3).norm_squared() - 1.0;
    sys.eom(x).amax().max(g.abs())
}

/// Gauss–Newton solve of `eom(x) = 0` on the spin sphere, starting at `seed`.
pub fn refine_fixed_point<S: ClassicalSystem + ?Sized>(sys: &S, seed: &DVector<f64>) -> Option<DVector<f64>> {
    let n = sys.dim();
    let off = sys.spin_offset();
    let mut x = seed.clone();
    for _ in 0..200 {
        let f = sys.eom(&x);
        let g = x.rows(off, 3).norm_squared() - 1.0;
        let mut rhs = DVector::zeros(n + 1);
        rhs.rows_mut(0, n).copy_from(&f);
        rhs[n] = g;
        if rhs.amax() < 1e-14 {
            return Some(x);
        }
        let mut jac = DMatrix::zeros(n + 1, n);
        jac.view_mut((0, 0), (n, n)).copy_from(&sys.jacobian(&x));
        for k in 0..3 {
            jac[(n, off + k)] = 2.0 * x[off + k];
        }
        let step = jac.svd(true, true).solve(&rhs, 1e-13).ok()?;
        x -= step;
        if !x.iter().all(|v| v.is_finite()) {
            return None;
        }
    }
    (residual_norm(sys, &x) <= FIXED_POINT_RESIDUAL).then_some(x)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointRecord<S> {
    pub label: String,
    pub state: S,
    pub stability: Stability,
    /// Tangent-space Jacobian eigenvalues as `(re, im)`.
    pub jacobian_eigs: Vec<(f64, f64)>,
    pub residual: f64,
    pub energy: f64,
    /// Distance moved by Newton refinement from the closed-form seed.
    pub correction: f64,
}

fn record<S, T: ClassicalSystem>(sys: &T, label: &str, seed: &DVector<f64>, wrap: impl Fn(&[f64]) -> S) -> Result<FixedPointRecord<S>> {
    let (x, correction) = if residual_norm(sys, seed) <= FIXED_POINT_RESIDUAL {
        (seed.clone(), 0.0)
    } else {
        let x = refine_fixed_point(sys, seed)
            .ok_or_else(|| Error::InvalidState(format!("fixed point `{label}` failed to converge from its seed")))?;
        let c = (&x - seed).norm();
        (x, c)
    };
    let residual = residual_norm(sys, &x);
    if residual > FIXED_POINT_RESIDUAL {
        return Err(Error::InvalidState(format!("fixed point `{label}` has residual {residual:.3e}")));
    }
    let eigs = tangent_eigenvalues(sys, &x);
    Ok(FixedPointRecord {
        label: label.to_string(),
        state: wrap(x.as_slice()),
        stability: classify(&eigs),
        jacobian_eigs: eigs,
        residual,
        energy: sys.energy(&x),
        correction,
    })
}

/// Fixed points of the one-mode top: `L_x = ±1` always, plus the emergent pair
/// `L_x = −Δω²/L²`, `L_z = ±√(1 − L_x²)`, `q = −(L/ω²)L_z` when `L² > Δω²`.
pub fn fixed_points_eb(p: &ClassicalParams) -> Result<Vec<FixedPointRecord<ClassicalStateEb>>> {
    let sys = EbSystem(*p);
    let w2 = p.omega * p.omega;
    let wrap = ClassicalStateEb::from_slice;
    let mut out = vec![
        record(&sys, "origin_minus", &DVector::from_vec(vec![0.0, 0.0, -1.0, 0.0, 0.0]), wrap)?,
        record(&sys, "origin_plus", &DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0, 0.0]), wrap)?,
    ];
    let l2 = p.coupling * p.coupling;
    if l2 > p.delta * w2 {
        let lx = -p.delta * w2 / l2;
        let lz = (1.0 - lx * lx).sqrt();
        for (label, sign) in [("emergent_up", 1.0), ("emergent_down", -1.0)] {
            let seed = DVector::from_vec(vec![-p.coupling / w2 * sign * lz, 0.0, lx, 0.0, sign * lz]);
            out.push(record(&sys, label, &seed, wrap)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Threshold {
    /// Coupling at which the emergent branch ceases to exist, found by continuation and bisection.
    pub continuation: f64,
    /// Coupling at which the ground origin point changes stability.
    pub stability_flip: f64,
}

/// Bisection resolution on the coupling.
pub const THRESHOLD_RESOLUTION: f64 = 1e-10;

/// Follows an emergent branch downward in `L` from `l_hi` and bisects the
/// coupling at which it merges with the origin.
fn continue_branch<S, F>(make: F, seed: DVector<f64>, l_hi: f64, order: impl Fn(&DVector<f64>) -> f64) -> Result<f64>
where
    S: ClassicalSystem,
    F: Fn(f64) -> S,
{
    let alive = |x: &DVector<f64>| order(x) > 1e-7;
    let mut x = refine_fixed_point(&make(l_hi), &seed)
        .filter(|x| alive(x))
        .ok_or_else(|| Error::InvalidState(format!("no emergent branch at coupling {l_hi}")))?;
    let steps = 400;
    let h = l_hi / steps as f64;
    let (mut l_alive, mut l_dead) = (l_hi, 0.0);
    let mut trail = vec![(l_hi, x.clone())];
    for k in 1..=steps {
        let l = l_hi - h * k as f64;
        match refine_fixed_point(&make(l), &x).filter(|y| alive(y)) {
            Some(y) => {
                trail.push((l, y.clone()));
                x = y;
                l_alive = l;
            }
            None => {
                l_dead = l;
                break;
            }
        }
    }
    while l_alive - l_dead > THRESHOLD_RESOLUTION {
        let mid = 0.5 * (l_alive + l_dead);
        match refine_fixed_point(&make(mid), &x).filter(|y| alive(y)) {
            Some(y) => {
                trail.push((mid, y.clone()));
                x = y;
                l_alive = mid;
            }
            None => l_dead = mid,
        }
    }
    let bisected = 0.5 * (l_alive + l_dead);
    Ok(extrapolate_merger(&make, &trail, l_alive, &order).unwrap_or(bisected))
}

/// Sharpens a bisected merger point by inverse quadratic interpolation of the
/// squared order parameter, sampled at three couplings just above the bracket.
fn extrapolate_merger<S, F>(
    make: &F,
    trail: &[(f64, DVector<f64>)],
    l_alive: f64,
    order: &impl Fn(&DVector<f64>) -> f64,
) -> Option<f64>
where
    S: ClassicalSystem,
    F: Fn(f64) -> S,
{
    let step = 1e-4 * l_alive.max(1.0);
    let mut samples = Vec::with_capacity(3);
    for k in 1..=3 {
        let l = l_alive + step * k as f64;
        // Walk down from the closest branch point found above this coupling.
        let (lt, seed) = trail.iter().filter(|(lt, _)| *lt >= l).min_by(|a, b| a.0.total_cmp(&b.0))?;
        let substeps = ((lt - l) / step).ceil().max(1.0) as usize;
        let mut x = seed.clone();
        for j in 1..=substeps {
            let lj = lt + (l - lt) * j as f64 / substeps as f64;
            x = refine_fixed_point(&make(lj), &x)?;
        }
        let r = order(&x);
        if !(r > 1e-7) {
            return None;
        }
        samples.push((r * r, l));
    }
    // Neville's scheme for L(r²) evaluated at r² = 0.
    let (r, l): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
    let l01 = (r[1] * l[0] - r[0] * l[1]) / (r[1] - r[0]);
    let l12 = (r[2] * l[1] - r[1] * l[2]) / (r[2] - r[1]);
    let l012 = (r[2] * l01 - r[0] * l12) / (r[2] - r[0]);
    let bracket = (l_alive - 10.0 * step)..=(l_alive + step);
    (l012.is_finite() && bracket.contains(&l012)).then_some(l012)
}

fn stability_flip<S: ClassicalSystem, F: Fn(f64) -> S>(make: F, origin: &DVector<f64>, l_hi: f64) -> f64 {
    let unstable = |l: f64| classify(&tangent_eigenvalues(&make(l), origin)) == Stability::Unstable;
    if !unstable(l_hi) {
        return f64::NAN;
    }
    let (mut lo, mut hi) = (0.0, l_hi);
    if unstable(lo) {
        return 0.0;
    }
    while hi - lo > THRESHOLD_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if unstable(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn search_ceiling(p: &ClassicalParams) -> f64 {
    4.0 * (1.0 + p.omega) * (1.0 + p.delta)
}

/// Pitchfork threshold of the one-mode top (expected at `L = ω√Δ`).
pub fn bifurcation_threshold_eb(p: &ClassicalParams) -> Result<Threshold> {
    if p.delta == 0.0 {
        return Ok(Threshold { continuation: 0.0, stability_flip: 0.0 });
    }
    let l_hi = search_ceiling(p);
    let w2 = p.omega * p.omega;
    let make = |l: f64| EbSystem(p.with_coupling(l));
    // Seed from the field-free well and let Newton tilt it.
    let seed = DVector::from_vec(vec![-l_hi / w2, 0.0, 0.0, 0.0, 1.0]);
    let continuation = continue_branch(make, seed, l_hi, |x| x[4].abs())?;
    let origin = DVector::from_vec(vec![0.0, 0.0, -1.0, 0.0, 0.0]);
    Ok(Threshold { continuation, stability_flip: stability_flip(make, &origin, l_hi) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalCoupling {
    /// Located by continuation of the tilted ring down to its merger with `L_ϖ = −1`.
    pub continuation: f64,
    /// Onset of linear instability of the `L_ϖ = −1` origin point.
    pub stability_flip: f64,
    /// `L = 2√(ωΔ)`, i.e. `L² = 4ωΔ`.
    pub closed_form_existence: f64,
    /// `L = 4ωΔ`, i.e. the printed `L² = 16ω²Δ²`.
    pub printed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EeFixedPoints {
    pub points: Vec<FixedPointRecord<ClassicalStateEe>>,
    /// Samples of the continuous ring of fixed points (empty when it does not exist).
    pub ring: Vec<FixedPointRecord<ClassicalStateEe>>,
    pub critical: Option<CriticalCoupling>,
}

pub const RING_SAMPLES: usize = 16;

fn ee_ring_point(p: &ClassicalParams, l_w: f64, angle: f64) -> DVector<f64> {
    let r = (1.0 - l_w * l_w).max(0.0).sqrt();
    let (le, lt) = (r * angle.cos(), r * angle.sin());
    let k = -p.coupling / (2.0 * p.omega);
    DVector::from_vec(vec![k * lt, 0.0, k * le, 0.0, le, l_w, lt])
}

/// Fixed points of the two-mode top.
///
/// The origin points `L_ϖ = ±1` always exist. When `L² ≥ 4ωΔ` a ring with
/// `L_ϖ = −4ωΔ/L²` and `q = −(L/2ω)(L_θ, L_ε)` exists; it is sampled, and the
/// four points with `L_ε = 0` or `L_θ = 0` are reported individually.
pub fn fixed_points_ee(p: &ClassicalParams) -> Result<EeFixedPoints> {
    let sys = EeSystem(*p);
    let wrap = ClassicalStateEe::from_slice;
    let mut points = vec![
        record(&sys, "origin_minus", &DVector::from_vec(vec![0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0]), wrap)?,
        record(&sys, "origin_plus", &DVector::from_vec(vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]), wrap)?,
    ];
    let mut ring = Vec::new();
    let l2 = p.coupling * p.coupling;
    let exists = p.coupling > 0.0 && l2 > 4.0 * p.omega * p.delta;
    if exists {
        let l_w = -4.0 * p.omega * p.delta / l2;
        for k in 0..RING_SAMPLES {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / RING_SAMPLES as f64;
            ring.push(record(&sys, &format!("ring_{k}"), &ee_ring_point(p, l_w, angle), wrap)?);
        }
        if p.delta > 0.0 {
            let labels = [("eps_plus", 0.0), ("theta_plus", 0.5), ("eps_minus", 1.0), ("theta_minus", 1.5)];
            for (label, turns) in labels {
                let seed = ee_ring_point(p, l_w, turns * std::f64::consts::PI);
                points.push(record(&sys, label, &seed, wrap)?);
            }
        }
    }
    let critical = if p.delta > 0.0 { Some(critical_coupling_ee(p)?) } else { None };
    Ok(EeFixedPoints { points, ring, critical })
}

/// Critical coupling of the two-mode top under a transverse field.
pub fn critical_coupling_ee(p: &ClassicalParams) -> Result<CriticalCoupling> {
    let closed_form_existence = 2.0 * (p.omega * p.delta).sqrt();
    let printed = 4.0 * p.omega * p.delta;
    if p.delta == 0.0 {
        return Ok(CriticalCoupling { continuation: 0.0, stability_flip: 0.0, closed_form_existence, printed });
    }
    let l_hi = search_ceiling(p) * (1.0 + p.omega * p.delta).sqrt();
    let make = |l: f64| EeSystem(p.with_coupling(l));
    let seed = DVector::from_vec(vec![0.0, 0.0, -l_hi / (2.0 * p.omega), 0.0, 1.0, 0.0, 0.0]);
    let continuation = continue_branch(make, seed, l_hi, |x| x[4].hypot(x[6]))?;
    let origin = DVector::from_vec(vec![0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0]);
    Ok(CriticalCoupling { continuation, stability_flip: stability_flip(make, &origin, l_hi), closed_form_existence, printed })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagramRow {
    pub coupling: f64,
    pub branch: String,
    pub q: f64,
    pub l_x: f64,
    pub l_z: f64,
    pub energy: f64,
    pub stability: Stability,
}

/// Fixed-point branches of the one-mode top along a monotone coupling grid.
pub fn bifurcation_diagram(base: &ClassicalParams, couplings: &[f64]) -> Result<Vec<DiagramRow>> {
    if couplings.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("coupling grid must be strictly increasing".into()));
    }
    let mut rows = Vec::new();
    for &l in couplings {
        for fp in fixed_points_eb(&base.with_coupling(l))? {
            rows.push(DiagramRow {
                coupling: l,
                branch: fp.label,
                q: fp.state.q,
                l_x: fp.state.l_x,
                l_z: fp.state.l_z,
                energy: fp.energy,
                stability: fp.stability,
            });
        }
    }
    Ok(rows)
}

/// Location of the pitchfork on a diagram: the first grid coupling with a
/// stable emergent pair and an unstable ground origin, if any.
pub fn detect_pitchfork(rows: &[DiagramRow]) -> Option<f64> {
    let mut couplings: Vec<f64> = rows.iter().map(|r| r.coupling).collect();
    couplings.dedup();
    couplings.into_iter().find(|&l| {
        let at: Vec<&DiagramRow> = rows.iter().filter(|r| r.coupling == l).collect();
        let origin_unstable = at.iter().any(|r| r.branch == "origin_minus" && r.stability == Stability::Unstable);
        let emergent_stable = at.iter().filter(|r| r.branch.starts_with("emergent") && r.stability == Stability::Stable).count() == 2;
        origin_unstable && emergent_stable
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cp(l: f64, w: f64, d: f64) -> ClassicalParams {
        ClassicalParams::new(l, w, d).unwrap()
    }

    fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> DVector<f64> {
        let mut x = DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0));
        let n = x.rows(dim - 3, 3).norm();
        for k in dim - 3..dim {
            x[k] /= n;
        }
        x
    }

    fn finite_difference<S: ClassicalSystem>(sys: &S, x: &DVector<f64>) -> DMatrix<f64> {
        let n = sys.dim();
        let h = 1e-6;
        let mut jac = DMatrix::zeros(n, n);
        for c in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[c] += h;
            xm[c] -= h;
            jac.set_column(c, &((sys.eom(&xp) - sys.eom(&xm)) / (2.0 * h)));
        }
        jac
    }

    #[test]
    fn origin_is_a_fixed_point() {
        let s = ClassicalStateEb { q: 0.0, p: 0.0, l_x: 1.0, l_y: 0.0, l_z: 0.0 };
        let d = eom_eb(&s, &cp(0.7, 1.0, 1.0));
        assert_eq!(d.to_vector().amax(), 0.0);
    }

    #[test]
    fn spin_norm_is_conserved_by_the_flow() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let p = cp(rng.random_range(0.0..3.0), rng.random_range(0.5..2.0), rng.random_range(0.0..2.0));
            let x = random_state(&mut rng, 5);
            let f = EbSystem(p).eom(&x);
            assert!((x[2] * f[2] + x[3] * f[3] + x[4] * f[4]).abs() < 1e-14);
            let y = random_state(&mut rng, 7);
            let g = EeSystem(p).eom(&y);
            assert!((y[4] * g[4] + y[5] * g[5] + y[6] * g[6]).abs() < 1e-14);
        }
    }

    #[test]
    fn analytic_jacobians_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let p = cp(rng.random_range(0.0..3.0), rng.random_range(0.5..2.0), rng.random_range(0.0..2.0));
            let x = random_state(&mut rng, 5);
            let diff = EbSystem(p).jacobian(&x) - finite_difference(&EbSystem(p), &x);
            assert!(diff.amax() < 1e-5);
            let y = random_state(&mut rng, 7);
            let diff = EeSystem(p).jacobian(&y) - finite_difference(&EeSystem(p), &y);
            assert!(diff.amax() < 1e-5);
        }
    }

    #[test]
    fn rk4_conserves_energy_and_constraint() {
        let sys = EbSystem(cp(1.3, 1.0, 0.8));
        let x0 = DVector::from_vec(vec![0.3, -0.2, 0.6, 0.0, 0.8]);
        let e0 = sys.energy(&x0);
        let x = integrate(&sys, &x0, 1e-3, 100_000);
        assert!((sys.energy(&x) - e0).abs() < 1e-8);
        assert!((x.rows(2, 3).norm() - 1.0).abs() < 1e-10);
        let coarse = integrate(&sys, &x0, 1e-3, 10_000);
        let fine = integrate(&sys, &x0, 5e-4, 20_000);
        assert!((&fine - &coarse).amax() < 1e-9);
        let sys = EeSystem(cp(1.3, 1.0, 0.4));
        let y0 = DVector::from_vec(vec![0.3, -0.2, 0.1, 0.4, 0.6, 0.0, 0.8]);
        let y = integrate(&sys, &y0, 1e-3, 100_000);
        assert!((sys.energy(&y) - sys.energy(&y0)).abs() < 1e-8);
        assert!((y.rows(4, 3).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn below_threshold_two_points_one_stable() {
        let fps = fixed_points_eb(&cp(0.5, 1.0, 1.0)).unwrap();
        assert_eq!(fps.len(), 2);
        let minus = &fps[0];
        assert_eq!(minus.state.l_x, -1.0);
        assert_eq!(minus.stability, Stability::Stable);
        assert!(fps.iter().all(|f| f.residual <= FIXED_POINT_RESIDUAL));
    }

    #[test]
    fn above_threshold_pitchfork_points() {
        let fps = fixed_points_eb(&cp(2.0, 1.0, 1.0)).unwrap();
        assert_eq!(fps.len(), 4);
        let emergent: Vec<_> = fps.iter().filter(|f| f.label.starts_with("emergent")).collect();
        for f in &emergent {
            assert!((f.state.l_x + 0.25).abs() < 1e-12);
            assert!((f.state.l_z.abs() - (1.0f64 - 1.0 / 16.0).sqrt()).abs() < 1e-12);
            assert!((f.state.q + 2.0 * f.state.l_z).abs() < 1e-12);
            assert!((f.state.q.abs() - 1.9365).abs() < 1e-4);
            assert_eq!(f.stability, Stability::Stable);
            assert_eq!(f.correction, 0.0);
        }
        assert_eq!(fps[0].stability, Stability::Unstable);
    }

    #[test]
    fn mirrored_emergent_sign_is_not_a_fixed_point() {
        let sys = EbSystem(cp(2.0, 1.0, 1.0));
        let lz = (1.0f64 - 1.0 / 16.0).sqrt();
        let x = DVector::from_vec(vec![-2.0 * lz, 0.0, 0.25, 0.0, lz]);
        assert!(residual_norm(&sys, &x) > 0.1);
    }

    #[test]
    fn thresholds_match_sqrt_delta_omega() {
        for (d, w) in [(1.0, 1.0), (4.0, 1.0), (1.0, 2.0)] {
            let t = bifurcation_threshold_eb(&cp(0.0, w, d)).unwrap();
            let expect = d.sqrt() * w;
            assert!((t.continuation - expect).abs() < 1e-8, "{d},{w}: {}", t.continuation);
            assert!((t.stability_flip - expect).abs() < 1e-6, "{d},{w}: {}", t.stability_flip);
        }
        assert_eq!(bifurcation_threshold_eb(&cp(0.0, 1.0, 0.0)).unwrap().continuation, 0.0);
    }

    #[test]
    fn diagram_detects_pitchfork_and_branch_positions() {
        let grid: Vec<f64> = (1..=40).map(|k| 0.05 * k as f64).collect();
        let rows = bifurcation_diagram(&cp(0.0, 1.0, 1.0), &grid).unwrap();
        let at = detect_pitchfork(&rows).unwrap();
        assert!((at - 1.0).abs() <= 0.05 + 1e-12);
        for r in rows.iter().filter(|r| r.branch.starts_with("emergent")) {
            assert!((r.q + r.coupling * r.l_z).abs() < 1e-8);
        }
        let below: Vec<_> = rows.iter().filter(|r| r.coupling < 0.99).collect();
        for l in grid.iter().filter(|&&l| l < 0.99) {
            let stable = below.iter().filter(|r| r.coupling == *l && r.stability == Stability::Stable).count();
            assert_eq!(stable, 1);
        }
        let zero_field = bifurcation_diagram(&cp(0.0, 1.0, 0.0), &[0.1, 0.5]).unwrap();
        assert_eq!(zero_field.iter().filter(|r| r.branch.starts_with("emergent")).count(), 4);
        assert!(bifurcation_diagram(&cp(0.0, 1.0, 0.0), &[0.5, 0.1]).is_err());
    }

    #[test]
    fn origin_stability_flips_once() {
        let sys = |l: f64| EbSystem(cp(l, 1.0, 1.0));
        let origin = DVector::from_vec(vec![0.0, 0.0, -1.0, 0.0, 0.0]);
        let flags: Vec<bool> = (0..=60).map(|k| classify(&tangent_eigenvalues(&sys(0.05 * k as f64), &origin)) == Stability::Unstable).collect();
        assert_eq!(flags.windows(2).filter(|w| w[0] != w[1]).count(), 1);
    }

    #[test]
    fn decoupled_two_mode_top_has_only_origin_points() {
        let fps = fixed_points_ee(&cp(0.0, 1.0, 0.0)).unwrap();
        assert_eq!(fps.points.len(), 2);
        assert!(fps.ring.is_empty());
    }

    #[test]
    fn mexican_hat_ring() {
        let p = cp(1.0, 1.0, 0.0);
        let fps = fixed_points_ee(&p).unwrap();
        assert_eq!(fps.ring.len(), RING_SAMPLES);
        let origin_energy = fps.points.iter().map(|f| f.energy).fold(f64::INFINITY, f64::min);
        for r in &fps.ring {
            assert!(r.residual <= FIXED_POINT_RESIDUAL);
            assert!((r.state.l_eps.powi(2) + r.state.l_theta.powi(2) - 1.0).abs() < 1e-12);
            assert!((r.state.q_eps.hypot(r.state.q_theta) - 0.5).abs() < 1e-12);
            assert!((r.energy + 0.125).abs() < 1e-12);
            assert!(r.energy < origin_energy);
            assert_ne!(r.stability, Stability::Unstable);
        }
    }

    #[test]
    fn transverse_field_points_and_critical_coupling() {
        let p = cp(3.0, 1.0, 1.0);
        let fps = fixed_points_ee(&p).unwrap();
        let four: Vec<_> = fps.points.iter().filter(|f| !f.label.starts_with("origin")).collect();
        assert_eq!(four.len(), 4);
        for f in &four {
            assert!((f.state.l_w + 4.0 / 9.0).abs() < 1e-12);
            let transverse = (1.0f64 - 16.0 / 81.0).sqrt();
            assert!((f.state.l_eps.abs().max(f.state.l_theta.abs()) - transverse).abs() < 1e-12);
            assert!(f.residual <= FIXED_POINT_RESIDUAL);
        }
        let crit = fps.critical.unwrap();
        assert!((crit.continuation - 2.0).abs() < 1e-8, "{crit:?}");
        assert!((crit.closed_form_existence - 2.0).abs() < 1e-15);
        assert!((crit.printed - 4.0).abs() < 1e-15);
        // The origin stays spectrally stable past the ring's birth, until a pair of frequencies collide.
        assert!(crit.stability_flip > 2.15 && crit.stability_flip < 2.2, "{crit:?}");
        let origin = DVector::from_vec(vec![0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0]);
        let slowest = |l: f64| {
            let eigs = tangent_eigenvalues(&EeSystem(cp(l, 1.0, 1.0)), &origin);
            eigs.iter().map(|e| e.0.hypot(e.1)).fold(f64::INFINITY, f64::min)
        };
        assert!(slowest(2.0 + 1e-6) < 1e-2 && slowest(1.9) > 5e-2 && slowest(2.1) > 5e-2);
    }
}
