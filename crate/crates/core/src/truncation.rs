//! Fock-truncation convergence by repeated doubling.

use serde::Serialize;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationPolicy {
    pub start: usize,
    pub max: usize,
    /// Largest change in any tracked observable accepted between successive truncations.
    pub tolerance: f64,
}

impl TruncationPolicy {
    pub const EB_DEFAULT: TruncationPolicy = TruncationPolicy { start: 40, max: 640, tolerance: 1e-8 };
    pub const EE_DEFAULT: TruncationPolicy = TruncationPolicy { start: 30, max: 60, tolerance: 1e-8 };

    pub fn with_max(mut self, max: usize) -> Self {
        self.max = max.max(1);
        self.start = self.start.min(self.max);
        self
    }

    pub fn with_start(mut self, start: usize) -> Self {
        self.start = start.max(1);
        self.max = self.max.max(self.start);
        self
    }
}

/// A value computed at a converged (or capped) truncation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Converged<T> {
    pub value: T,
    /// Truncation actually used.
    pub fock: usize,
    /// Largest observable change between the last two truncations.
    pub residual: f64,
    pub converged: bool,
}

/// Evaluates `eval(N)` for `N = start, 2·start, …` (capped at `max`) until every
/// observable returned alongside the value changes by less than the tolerance.
pub fn converge<T, F>(policy: &TruncationPolicy, mut eval: F) -> Result<Converged<T>>
where
    F: FnMut(usize) -> Result<(T, Vec<f64>)>,
{
    let mut n = policy.start.max(1);
    let (mut value, mut observables) = eval(n)?;
    let mut last_residual = f64::INFINITY;
    loop {
        if n >= policy.max {
            return Ok(Converged { value, fock: n, residual: last_residual, converged: false });
        }
        let next = (2 * n).min(policy.max);
        let (next_value, next_obs) = eval(next)?;
        let residual = observables
            .iter()
            .zip(&next_obs)
            .map(|(a, b)| if a.is_nan() && b.is_nan() { 0.0 } else { (a - b).abs() })
            .fold(0.0, f64::max);
        n = next;
        value = next_value;
        observables = next_obs;
        last_residual = residual;
        if residual < policy.tolerance {
            return Ok(Converged { value, fock: n, residual, converged: true });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stops_once_observables_settle() {
        let policy = TruncationPolicy { start: 4, max: 1024, tolerance: 1e-6 };
        let out = converge(&policy, |n| Ok((n, vec![1.0 / (n as f64).powi(4)]))).unwrap();
        assert!(out.converged);
        assert_eq!(out.fock, 64);
        assert!(out.residual < 1e-6);
    }

    #[test]
    fn flags_capped_runs() {
        let policy = TruncationPolicy { start: 4, max: 16, tolerance: 1e-12 };
        let out = converge(&policy, |n| Ok((n, vec![1.0 / n as f64]))).unwrap();
        assert!(!out.converged);
        assert_eq!(out.fock, 16);
    }
}
