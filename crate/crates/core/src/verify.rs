//! Self-check suites: conservation, degeneracy, basis equivalence and the
//! closed-form ansatz integrals. Each check reports its value against a bound.

use serde::Serialize;

use crate::ansatz::{self, AnsatzParams};
use crate::eb::{self, EbParams};
use crate::ee::{self, EeParams};
use crate::error::{Error, Result};
use crate::linalg;

pub const SUITES: [&str; 4] = ["conservation", "degeneracy", "basis-equivalence", "ansatz-integrals"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, bound, passed: value <= bound }
    }

    fn failed(name: impl Into<String>, bound: f64) -> Self {
        Check { name: name.into(), value: f64::NAN, bound, passed: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

const COUPLINGS: [f64; 3] = [0.5, 1.0, 2.0];

fn conservation() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for l in COUPLINGS {
        let p = EeParams::new(l, 1.0, 0.0, 20)?;
        let name = format!("commutator J_w,H L={l} N=20");
        match ee::conserved_j_w(&p) {
            Ok(j) => {
                let residual = if j.spin_factor == 0.5 { j.residual_half } else { j.residual_one };
                checks.push(Check::at_most(format!("{name} s={}", j.spin_factor), residual, ee::COMMUTATOR_BOUND));
            }
            Err(_) => checks.push(Check::failed(name, ee::COMMUTATOR_BOUND)),
        }
    }
    Ok(checks)
}

fn degeneracy() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for l in COUPLINGS {
        let p = EeParams::new(l, 1.0, 0.0, 25)?;
        let name = format!("E(e) ground pair gap L={l} N=25");
        match ee::ground_pair(&p) {
            Ok(pair) => checks.push(Check::at_most(name, pair.gap, ee::GROUND_SPLIT_TOL)),
            Err(_) => checks.push(Check::failed(name, ee::GROUND_SPLIT_TOL)),
        }
        let q = EbParams::new(l, 1.0, 0.0, 60)?;
        let pair = eb::degenerate_ground_pair(&q)?;
        checks.push(Check::at_most(format!("E(b) ground pair splitting L={l} N=60"), pair.splitting().abs(), 1e-8));
    }
    Ok(checks)
}

fn basis_equivalence() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let p = EbParams::new(1.0, 1.0, 0.5, 60)?;
    let displaced = linalg::eigvalsh(eb::build_hamiltonian_displaced(&p)?.entries());
    let fock = linalg::eigvalsh(eb::build_hamiltonian_fock(&p)?.entries());
    let worst = displaced.iter().zip(&fock).take(5).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    checks.push(Check::at_most("lowest 5 levels displaced vs Fock L=1 delta=0.5 N=60", worst, 1e-7));
    for l in COUPLINGS {
        let p = EbParams::new(l, 1.0, 0.0, 120)?;
        let e0 = linalg::eigvalsh(eb::build_hamiltonian_fock(&p)?.entries())[0];
        checks.push(Check::at_most(format!("Fock ground energy vs -L^2/2 L={l} N=120"), (e0 + l * l / 2.0).abs(), 1e-8));
    }
    Ok(checks)
}

fn ansatz_integrals() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for alpha in [0.0, 0.5, 1.0, 2.0, 3.0] {
        let p = AnsatzParams::new(2.0 * alpha, 1.0)?;
        let cases: [(&str, f64, Box<dyn Fn(f64) -> f64>); 3] = [
            ("cosh^2", ansatz::cosh_squared_integral(alpha), Box::new(move |q: f64| (alpha * q).cosh().powi(2))),
            ("sinh^2", ansatz::sinh_squared_integral(alpha), Box::new(move |q: f64| (alpha * q).sinh().powi(2))),
            ("cosh*sinh", ansatz::cosh_sinh_integral(alpha), Box::new(move |q: f64| (alpha * q).cosh() * (alpha * q).sinh())),
        ];
        for (name, closed, f) in cases {
            let numeric = ansatz::radial_integral(|q| (-q * q).exp() * f(q), &p);
            let err = (closed - numeric).abs() / closed.abs().max(1.0);
            checks.push(Check::at_most(format!("{name} integral alpha={alpha}"), err, 1e-10));
        }
    }
    Ok(checks)
}

pub fn run(suite: &str) -> Result<VerifyReport> {
    let checks = match suite {
        "conservation" => conservation()?,
        "degeneracy" => degeneracy()?,
        "basis-equivalence" => basis_equivalence()?,
        "ansatz-integrals" => ansatz_integrals()?,
        other => return Err(Error::UnknownSuite(other.to_string())),
    };
    Ok(VerifyReport { suite: suite.to_string(), passed: checks.iter().all(|c| c.passed), checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_rejected() {
        assert_eq!(run("nope").unwrap_err(), Error::UnknownSuite("nope".into()));
    }

    #[test]
    fn integral_suite_passes() {
        let r = run("ansatz-integrals").unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.checks.len(), 15);
    }

    #[test]
    fn conservation_suite_passes() {
        let r = run("conservation").unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.checks.iter().all(|c| c.name.ends_with("s=0.5")));
    }
}
