//! Parameter sweeps and the figure datasets built from them.
//!
//! A sweep produces a [`Table`]: named columns, rows in grid order, and
//! free-form metadata. Rows are computed through [`crate::par::map_ordered`].

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use crate::ansatz::{self, AnsatzParams, SuperpositionSpec};
use crate::classical::{self, ClassicalParams};
use crate::eb::{self, EbParams};
use crate::ee::{self, EeParams};
use crate::entanglement::{self, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::par;
use crate::truncation::{converge, TruncationPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Eb,
    Ee,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    Coupling,
    C1,
    Gamma,
    Delta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if count < 2 || !(min < max) || !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidParameter(format!("grid needs count >= 2 and min < max, got ({min}, {max}, {count})")));
        }
        Ok(Grid { min, max, count })
    }

    pub fn points(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count).map(|k| if k + 1 == self.count { self.max } else { self.min + step * k as f64 }).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub model: Model,
    pub variable: Variable,
    pub grid: Grid,
    pub coupling: f64,
    pub omega: f64,
    pub delta: f64,
    pub c1: f64,
    pub gamma: f64,
    /// Starting truncation; the model default when absent.
    pub fock: Option<usize>,
    /// Cap on truncation growth; the model default when absent.
    pub fock_max: Option<usize>,
    /// Compute exact-diagonalization columns (E⊗ε only).
    pub exact: bool,
    /// Compute the entanglement-gap column (E⊗ε, Δ=0 only).
    pub gap: bool,
}

impl SweepSpec {
    pub fn new(model: Model, variable: Variable, grid: Grid) -> Self {
        SweepSpec {
            model,
            variable,
            grid,
            coupling: 1.0,
            omega: 1.0,
            delta: 0.0,
            c1: 1.0,
            gamma: 0.0,
            fock: None,
            fock_max: None,
            exact: true,
            gap: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        Grid::new(self.grid.min, self.grid.max, self.grid.count)?;
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(Error::InvalidParameter(format!("omega must be positive, got {}", self.omega)));
        }
        for p in self.points() {
            if !(p.coupling >= 0.0) || !(p.delta >= 0.0) || !(0.0..=1.0).contains(&p.c1) || !p.gamma.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "grid point out of range: L={}, delta={}, c1={}, gamma={}",
                    p.coupling, p.delta, p.c1, p.gamma
                )));
            }
        }
        Ok(())
    }

    fn policy(&self) -> TruncationPolicy {
        let mut policy = match self.model {
            Model::Eb => TruncationPolicy::EB_DEFAULT,
            Model::Ee => TruncationPolicy::EE_DEFAULT,
        };
        if let Some(start) = self.fock {
            policy = policy.with_start(start);
        }
        if let Some(max) = self.fock_max {
            policy = policy.with_max(max);
        }
        policy
    }

    pub fn points(&self) -> Vec<Point> {
        self.grid
            .points()
            .into_iter()
            .map(|v| {
                let mut p = Point { coupling: self.coupling, delta: self.delta, c1: self.c1, gamma: self.gamma };
                match self.variable {
                    Variable::Coupling => p.coupling = v * self.omega,
                    Variable::C1 => p.c1 = v,
                    Variable::Gamma => p.gamma = v,
                    Variable::Delta => p.delta = v,
                }
                p
            })
            .collect()
    }
}

/// One grid point. When sweeping the coupling the grid value is `L/ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point {
    pub coupling: f64,
    pub delta: f64,
    pub c1: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Flag(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: BTreeMap<String, Cell>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), metadata: BTreeMap::new() }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of a column (non-numeric cells become NaN).
    pub fn numbers(&self, name: &str) -> Vec<f64> {
        let Some(k) = self.column(name) else { return Vec::new() };
        self.rows
            .iter()
            .map(|r| match &r[k] {
                Cell::Num(v) => *v,
                Cell::Int(v) => *v as f64,
                _ => f64::NAN,
            })
            .collect()
    }

    /// Number of rows whose `converged` column is false.
    pub fn flagged(&self) -> usize {
        let Some(k) = self.column("converged") else { return 0 };
        self.rows.iter().filter(|r| matches!(r[k], Cell::Flag(false))).count()
    }

    fn append(&mut self, other: Table) {
        debug_assert_eq!(self.columns, other.columns);
        self.rows.extend(other.rows);
        self.metadata.extend(other.metadata);
    }
}

pub const EB_COLUMNS: [&str; 9] =
    ["L_over_omega", "c1", "gamma", "delta", "entropy", "ground_energy", "N", "converged", "residual"];

pub const EE_COLUMNS: [&str; 13] = [
    "L_over_omega",
    "c1",
    "gamma",
    "delta",
    "entropy_ansatz",
    "entropy_exact",
    "entropy_diff",
    "delta_s",
    "angular_weight",
    "ground_energy",
    "N",
    "converged",
    "residual",
];

/// Distinct model parameters of a sweep; superposition parameters are applied afterwards.
fn model_points(points: &[Point]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for p in points {
        if !out.iter().any(|&(l, d)| l == p.coupling && d == p.delta) {
            out.push((p.coupling, p.delta));
        }
    }
    out
}

fn lookup<T: Clone>(keys: &[(f64, f64)], values: &[T], p: &Point) -> T {
    let k = keys.iter().position(|&(l, d)| l == p.coupling && d == p.delta).expect("point registered");
    values[k].clone()
}

#[derive(Debug, Clone)]
struct EbSolve {
    energy: f64,
    fock: usize,
    residual: f64,
    converged: bool,
    /// Entropy of the unique ground state (Δ > 0).
    entropy: f64,
    params: EbParams,
}

fn solve_eb(coupling: f64, delta: f64, omega: f64, policy: &TruncationPolicy) -> Result<EbSolve> {
    let base = EbParams::new(coupling, omega, delta, policy.start.max(1))?;
    let out = converge(policy, |n| {
        let p = base.with_fock(n);
        let g = eb::ground_state(&p)?;
        let s = if delta > 0.0 { von_neumann_entropy(&g.qubit_density)?.bits() } else { 0.0 };
        Ok(((g.energy, s, p), vec![g.energy, s]))
    })?;
    let (energy, entropy, params) = out.value;
    Ok(EbSolve { energy, fock: out.fock, residual: out.residual, converged: out.converged, entropy, params })
}

/// E⊗β sweep: qubit entropy and ground energy per grid point.
///
/// At Δ=0 the entropy is that of `c1|ψ_0^L⟩ + c2 e^{iγ}|ψ_0^R⟩`; for Δ>0 the
/// ground state is unique and `c1`, `γ` are carried through unused.
pub fn sweep_eb(spec: &SweepSpec) -> Result<Table> {
    spec.validate()?;
    let points = spec.points();
    let keys = model_points(&points);
    let policy = spec.policy();
    let solves = par::map_ordered(&keys, |&(l, d)| solve_eb(l, d, spec.omega, &policy));
    let solves: Vec<EbSolve> = solves.into_iter().collect::<Result<_>>()?;
    let mut table = Table::new(&EB_COLUMNS);
    for p in &points {
        let s = lookup(&keys, &solves, p);
        let entropy = if p.delta == 0.0 {
            von_neumann_entropy(&eb::reduced_qubit_density_delta0(p.c1, p.gamma, &s.params)?)?.bits()
        } else {
            s.entropy
        };
        table.rows.push(vec![
            (p.coupling / spec.omega).into(),
            p.c1.into(),
            p.gamma.into(),
            p.delta.into(),
            entropy.into(),
            s.energy.into(),
            s.fock.into(),
            s.converged.into(),
            s.residual.into(),
        ]);
    }
    Ok(table)
}

#[derive(Debug, Clone)]
enum EeExact {
    Pair(ee::GroundPair),
    Single(ee::EeGroundState),
}

#[derive(Debug, Clone)]
struct EeSolve {
    exact: Option<EeExact>,
    energy: f64,
    fock: usize,
    residual: f64,
    converged: bool,
    gap: Option<entanglement::GapReport>,
}

fn spin_entropy(s: &crate::linalg::PureState) -> Result<f64> {
    Ok(von_neumann_entropy(&s.reduced_density(&[0])?)?.bits())
}

fn solve_ee(coupling: f64, delta: f64, spec: &SweepSpec, policy: &TruncationPolicy) -> Result<EeSolve> {
    if !spec.exact {
        return Ok(EeSolve { exact: None, energy: f64::NAN, fock: 0, residual: 0.0, converged: true, gap: None });
    }
    let base = EeParams::new(coupling, spec.omega, delta, policy.start.max(3))?;
    let out = converge(policy, |n| {
        let p = base.with_fock(n);
        if delta == 0.0 {
            let pair = ee::ground_pair(&p)?;
            let s = spin_entropy(&pair.psi)?;
            let e = pair.energy;
            Ok(((EeExact::Pair(pair), p), vec![e, s]))
        } else {
            let g = ee::ground_state(&p)?;
            let s = spin_entropy(&g.state)?;
            let e = g.energy;
            Ok(((EeExact::Single(g), p), vec![e, s]))
        }
    })?;
    let (exact, params) = out.value;
    let energy = match &exact {
        EeExact::Pair(pair) => pair.energy,
        EeExact::Single(g) => g.energy,
    };
    let gap = match (&exact, spec.gap) {
        (EeExact::Pair(pair), true) => entanglement::entanglement_gap(&pair.psi, &params).ok(),
        _ => None,
    };
    Ok(EeSolve { exact: Some(exact), energy, fock: out.fock, residual: out.residual, converged: out.converged, gap })
}

/// E⊗ε sweep: ansatz and exact qubit entropies, their difference, and the entanglement gap.
///
/// At Δ=0 the state is `c1|Ψ⟩ + c2 e^{iγ}|Ψ*⟩`; for Δ>0 the ground state is
/// unique, the ansatz columns are empty and `c1`, `γ` are carried through unused.
/// Points whose exact solve fails (e.g. an unresolved ground pair) are emitted
/// with empty exact columns and flagged as not converged.
pub fn sweep_ee(spec: &SweepSpec) -> Result<Table> {
    spec.validate()?;
    let points = spec.points();
    let keys = model_points(&points);
    let policy = spec.policy();
    let solves = par::map_ordered(&keys, |&(l, d)| solve_ee(l, d, spec, &policy));
    let solves: Vec<EeSolve> = solves
        .into_iter()
        .map(|r| match r {
            Ok(s) => s,
            Err(_) => EeSolve { exact: None, energy: f64::NAN, fock: policy.max, residual: f64::NAN, converged: false, gap: None },
        })
        .collect();
    let mut table = Table::new(&EE_COLUMNS);
    for p in &points {
        let s = lookup(&keys, &solves, p);
        let ansatz_entropy = if p.delta == 0.0 {
            let sup = SuperpositionSpec::new(p.c1, p.gamma)?;
            ansatz::superposition_entropy(&sup, &AnsatzParams::new(p.coupling, spec.omega)?)?.bits()
        } else {
            f64::NAN
        };
        let exact_entropy = match &s.exact {
            Some(EeExact::Pair(pair)) => spin_entropy(&pair.superposition(p.c1, p.gamma)?)?,
            Some(EeExact::Single(g)) => spin_entropy(&g.state)?,
            None => f64::NAN,
        };
        let (delta_s, weight) = s.gap.map(|g| (g.gap, g.weight)).unwrap_or((f64::NAN, f64::NAN));
        table.rows.push(vec![
            (p.coupling / spec.omega).into(),
            p.c1.into(),
            p.gamma.into(),
            p.delta.into(),
            ansatz_entropy.into(),
            exact_entropy.into(),
            (exact_entropy - ansatz_entropy).abs().into(),
            delta_s.into(),
            weight.into(),
            s.energy.into(),
            s.fock.into(),
            s.converged.into(),
            s.residual.into(),
        ]);
    }
    Ok(table)
}

pub fn sweep(spec: &SweepSpec) -> Result<Table> {
    match spec.model {
        Model::Eb => sweep_eb(spec),
        Model::Ee => sweep_ee(spec),
    }
}

pub const EB_BIFURCATION_COLUMNS: [&str; 9] =
    ["L", "branch", "q", "l_x", "l_z", "energy", "stability", "threshold", "at_threshold"];

pub const EE_BIFURCATION_COLUMNS: [&str; 11] =
    ["L", "branch", "q_theta", "q_eps", "l_eps", "l_w", "l_theta", "energy", "stability", "correction", "critical"];

/// Fixed-point branches along a coupling grid, with the continuation threshold.
///
/// For E⊗β every row carries the threshold and `at_threshold` marks the first
/// grid coupling at or above it, within the threshold resolution. For E⊗ε ring samples are omitted from the rows;
/// the metadata records the continuation value and both closed-form readings.
pub fn bifurcation(model: Model, omega: f64, delta: f64, grid: &Grid) -> Result<Table> {
    let grid = Grid::new(grid.min, grid.max, grid.count)?;
    let base = ClassicalParams::new(0.0, omega, delta)?;
    let couplings = grid.points();
    if couplings.iter().any(|&l| l < 0.0) {
        return Err(Error::InvalidParameter("couplings must be non-negative".into()));
    }
    match model {
        Model::Eb => {
            let threshold = classical::bifurcation_threshold_eb(&base)?;
            let rows = classical::bifurcation_diagram(&base, &couplings)?;
            let pitchfork = classical::detect_pitchfork(&rows);
            let first_above = couplings.iter().copied().find(|&l| l >= threshold.continuation - classical::THRESHOLD_RESOLUTION);
            let mut table = Table::new(&EB_BIFURCATION_COLUMNS);
            for r in rows {
                table.rows.push(vec![
                    r.coupling.into(),
                    r.branch.as_str().into(),
                    r.q.into(),
                    r.l_x.into(),
                    r.l_z.into(),
                    r.energy.into(),
                    r.stability.as_str().into(),
                    threshold.continuation.into(),
                    (Some(r.coupling) == first_above).into(),
                ]);
            }
            table.metadata.insert("threshold_continuation".into(), threshold.continuation.into());
            table.metadata.insert("threshold_stability_flip".into(), threshold.stability_flip.into());
            table.metadata.insert("pitchfork_on_grid".into(), pitchfork.unwrap_or(f64::NAN).into());
            Ok(table)
        }
        Model::Ee => {
            let critical = classical::critical_coupling_ee(&base)?;
            let fps = par::map_ordered(&couplings, |&l| classical::fixed_points_ee(&ClassicalParams { coupling: l, ..base }));
            let mut table = Table::new(&EE_BIFURCATION_COLUMNS);
            for (l, fp) in couplings.iter().zip(fps) {
                let fp = fp?;
                let ring_energy = fp.ring.first().map(|r| r.energy);
                for r in &fp.points {
                    let s = r.state;
                    table.rows.push(vec![
                        (*l).into(),
                        r.label.as_str().into(),
                        s.q_theta.into(),
                        s.q_eps.into(),
                        s.l_eps.into(),
                        s.l_w.into(),
                        s.l_theta.into(),
                        r.energy.into(),
                        r.stability.as_str().into(),
                        r.correction.into(),
                        critical.continuation.into(),
                    ]);
                }
                if let (Some(e), true) = (ring_energy, fp.points.len() == 2) {
                    let r = &fp.ring[0];
                    let s = r.state;
                    table.rows.push(vec![
                        (*l).into(),
                        "ring".into(),
                        s.q_theta.into(),
                        s.q_eps.into(),
                        s.l_eps.into(),
                        s.l_w.into(),
                        s.l_theta.into(),
                        e.into(),
                        r.stability.as_str().into(),
                        r.correction.into(),
                        critical.continuation.into(),
                    ]);
                }
            }
            table.metadata.insert("critical_continuation".into(), critical.continuation.into());
            table.metadata.insert("critical_stability_flip".into(), critical.stability_flip.into());
            table.metadata.insert("critical_L2_eq_4_omega_delta".into(), critical.closed_form_existence.into());
            table.metadata.insert("critical_L2_eq_16_omega2_delta2".into(), critical.printed.into());
            Ok(table)
        }
    }
}

pub const FIGURES: [&str; 7] = ["qbosc", "entsosc", "cir", "compeval", "compent", "conc", "withd"];

/// Field strengths of the E⊗β crossover curves.
pub const ENTSOSC_DELTAS: [f64; 5] = [0.5, 1.0, 2.0, 4.0, 8.0];
/// Field strengths of the E⊗ε transverse-field curves.
pub const WITHD_DELTAS: [f64; 2] = [1.0, 4.0];

fn coupling_spec(model: Model, min: f64, max: f64, count: usize) -> Result<SweepSpec> {
    Ok(SweepSpec::new(model, Variable::Coupling, Grid::new(min, max, count)?))
}

/// Dataset behind a named figure. `fock_max` caps truncation growth.
pub fn figure(name: &str, fock_max: Option<usize>) -> Result<Table> {
    let cap = |mut s: SweepSpec| {
        s.fock_max = fock_max;
        s
    };
    let c1_values: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
    match name {
        "qbosc" => {
            let mut table = Table::new(&EB_COLUMNS);
            for &c1 in &c1_values {
                let mut s = cap(coupling_spec(Model::Eb, 0.0, 4.0, 17)?);
                s.c1 = c1;
                table.append(sweep_eb(&s)?);
            }
            Ok(table)
        }
        "entsosc" => {
            let mut table = Table::new(&EB_COLUMNS);
            table.columns.push("alpha".into());
            let alphas = Grid::new(0.0, 3.0, 61)?.points();
            for &delta in &ENTSOSC_DELTAS {
                let mut rows = Table::new(&EB_COLUMNS);
                for &alpha in &alphas {
                    // α = L²/(ω²Δ) at ω = 1.
                    let l = (alpha * delta).sqrt();
                    let mut s = cap(SweepSpec::new(Model::Eb, Variable::Coupling, Grid::new(l, l + 1.0, 2)?));
                    s.delta = delta;
                    let t = sweep_eb(&s)?;
                    let mut row = t.rows[0].clone();
                    row.push(alpha.into());
                    rows.rows.push(row);
                }
                table.rows.extend(rows.rows);
            }
            Ok(table)
        }
        "cir" => {
            let mut table = Table::new(&EE_COLUMNS);
            for &c1 in &c1_values {
                let mut s = coupling_spec(Model::Ee, 0.0, 4.0, 17)?;
                s.c1 = c1;
                s.exact = false;
                table.append(sweep_ee(&s)?);
            }
            Ok(table)
        }
        "compeval" | "compent" | "conc" => {
            let mut s = cap(coupling_spec(Model::Ee, 0.25, 4.0, 16)?);
            if name == "compent" {
                s.c1 = FRAC_1_SQRT_2;
            }
            s.gap = name == "conc";
            sweep_ee(&s)
        }
        "withd" => {
            let mut table = Table::new(&EE_COLUMNS);
            for &delta in &WITHD_DELTAS {
                let mut s = cap(coupling_spec(Model::Ee, 0.0, 6.0, 25)?);
                s.delta = delta;
                table.append(sweep_ee(&s)?);
            }
            Ok(table)
        }
        other => Err(Error::InvalidParameter(format!("unknown figure `{other}`; expected one of {FIGURES:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_are_exact() {
        let g = Grid::new(0.1, 0.7, 7).unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 7);
        assert_eq!(pts[0], 0.1);
        assert_eq!(pts[6], 0.7);
        assert!(Grid::new(1.0, 1.0, 3).is_err());
        assert!(Grid::new(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn eb_sweep_rows_follow_the_grid() {
        let mut s = SweepSpec::new(Model::Eb, Variable::C1, Grid::new(0.0, 1.0, 5).unwrap());
        s.coupling = 1.0;
        let t = sweep(&s).unwrap();
        assert_eq!(t.columns, EB_COLUMNS);
        assert_eq!(t.rows.len(), 5);
        let e = t.numbers("entropy");
        assert!(e[0] < 1e-12 && e[4] < 1e-12);
        // The maximum sits at c1 = 1/√2, nearest grid point 0.75.
        assert!(e[3] > e[2] && e[2] > e[1]);
        assert_eq!(t.flagged(), 0);
        for energy in t.numbers("ground_energy") {
            assert!((energy + 0.5).abs() < 1e-8);
        }
    }

    #[test]
    fn out_of_range_points_are_rejected() {
        let s = SweepSpec::new(Model::Eb, Variable::C1, Grid::new(0.0, 2.0, 3).unwrap());
        assert!(sweep(&s).is_err());
    }

    #[test]
    fn capped_truncation_is_flagged() {
        let mut s = SweepSpec::new(Model::Eb, Variable::Coupling, Grid::new(3.0, 4.0, 2).unwrap());
        s.delta = 1.0;
        s.fock = Some(4);
        s.fock_max = Some(4);
        let t = sweep(&s).unwrap();
        assert_eq!(t.flagged(), 2);
        assert!(t.numbers("N").iter().all(|&n| n == 4.0));
    }

    #[test]
    fn ansatz_only_sweep() {
        let mut s = SweepSpec::new(Model::Ee, Variable::Gamma, Grid::new(0.0, 3.0, 4).unwrap());
        s.coupling = 10.0;
        s.c1 = FRAC_1_SQRT_2;
        s.exact = false;
        let t = sweep(&s).unwrap();
        for v in t.numbers("entropy_ansatz") {
            assert!(v > 0.0);
        }
        assert!(t.numbers("entropy_exact").iter().all(|v| v.is_nan()));
    }

    #[test]
    fn eb_bifurcation_table_annotates_threshold() {
        let t = bifurcation(Model::Eb, 1.0, 1.0, &Grid::new(0.0, 2.0, 21).unwrap()).unwrap();
        let thr = t.numbers("threshold");
        assert!((thr[0] - 1.0).abs() < 1e-6);
        let k = t.column("at_threshold").unwrap();
        let marked: Vec<f64> =
            t.rows.iter().filter(|r| r[k] == Cell::Flag(true)).map(|r| if let Cell::Num(l) = r[0] { l } else { f64::NAN }).collect();
        assert!(!marked.is_empty() && marked.iter().all(|&l| (l - 1.0).abs() < 1e-9));
    }

    #[test]
    fn unknown_figure_is_an_error() {
        assert!(figure("nope", None).is_err());
    }
}
