use super::SpectralReport;
use crate::error::{Error, Result};
use crate::scalar::Real;

const SLACK: f64 = 1e-9;

/// Bounds on μ_k and ν_k from the top-level values. `None` means the
/// denominator 1 - (n-1-k)·x is not positive and the bound is vacuous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentBound {
    pub mu: Option<f64>,
    pub nu: Option<f64>,
}

/// μ_{n-1}/(1 - (n-1-k) μ_{n-1}) and the same map applied to ν_{n-1}.
pub fn descent_bound(mu_top: f64, nu_top: f64, n: usize, k: usize) -> Result<DescentBound> {
    if n == 0 || k > n - 1 {
        return Err(Error::LevelOutOfRange { k: k as isize, min: 0, max: n as isize - 1 });
    }
    let steps = (n - 1 - k) as f64;
    let f = |x: f64| {
        let d = 1.0 - steps * x;
        (d > 0.0).then(|| x / d)
    };
    Ok(DescentBound { mu: f(mu_top), nu: f(nu_top) })
}

/// Largest μ_{n-1} that guarantees every μ_k ≤ λ: λ/(1 + (n-1)λ).
pub fn threshold_for_target(lambda: f64, n: usize) -> Result<f64> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidArgument(format!("lambda must lie in (0, 1], got {lambda}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    Ok(lambda / (1.0 + (n as f64 - 1.0) * lambda))
}

/// One inequality μ_k ≤ μ_{k+1}/(1-μ_{k+1}), or ν_k ≥ ν_{k+1}/(1-ν_{k+1}).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentStep {
    pub k: usize,
    pub measured: f64,
    pub from: f64,
    /// `None` when the check was skipped.
    pub bound: Option<f64>,
    /// bound - measured for μ, measured - bound for ν. Negative means violated.
    pub slack: Option<f64>,
}

impl DescentStep {
    pub fn ok(&self) -> bool {
        self.slack.is_none_or(|s| s >= -SLACK)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentReport {
    pub n: usize,
    pub mu_steps: Vec<DescentStep>,
    pub nu_steps: Vec<DescentStep>,
    /// μ_k against the bound chained down from μ_{n-1}, k = 0..n-1.
    pub mu_chain: Vec<DescentStep>,
}

impl DescentReport {
    pub fn passed(&self) -> bool {
        self.mu_steps.iter().chain(&self.nu_steps).chain(&self.mu_chain).all(DescentStep::ok)
    }

    pub fn skipped(&self) -> usize {
        self.mu_steps.iter().chain(&self.nu_steps).chain(&self.mu_chain).filter(|s| s.bound.is_none()).count()
    }
}

/// Checks the one-step descent inequalities for k ≤ n-2. The μ check is
/// skipped when μ_{k+1} < 0 or 1 - μ_{k+1} ≤ 0; the ν check when ν_{k+1} > 0.
pub fn verify_descent<T: Real>(report: &SpectralReport<T>) -> DescentReport {
    let n = report.n;
    let mu: Vec<f64> = report.mu.iter().map(|v| v.as_f64()).collect();
    let nu: Vec<f64> = report.nu.iter().map(|v| v.as_f64()).collect();
    let mut mu_steps = Vec::new();
    let mut nu_steps = Vec::new();
    for k in 0..n.saturating_sub(1) {
        let m = mu[k + 1];
        let bound = (m >= 0.0 && 1.0 - m > 0.0).then(|| m / (1.0 - m));
        mu_steps.push(DescentStep { k, measured: mu[k], from: m, bound, slack: bound.map(|b| b - mu[k]) });
        let v = nu[k + 1];
        let bound = (v <= 0.0).then(|| v / (1.0 - v));
        nu_steps.push(DescentStep { k, measured: nu[k], from: v, bound, slack: bound.map(|b| nu[k] - b) });
    }
    let top = mu[n - 1];
    let mu_chain = (0..n)
        .map(|k| {
            let bound = if top >= 0.0 {
                descent_bound(top, 0.0, n, k).ok().and_then(|b| b.mu)
            } else {
                None
            };
            DescentStep { k, measured: mu[k], from: top, bound, slack: bound.map(|b| b - mu[k]) }
        })
        .collect();
    DescentReport { n, mu_steps, nu_steps, mu_chain }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bound_formula() {
        assert_abs_diff_eq!(descent_bound(1.0 / 3.0, 0.0, 2, 0).unwrap().mu.unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(descent_bound(0.3, -0.2, 4, 3).unwrap(), DescentBound { mu: Some(0.3), nu: Some(-0.2) });
        assert_abs_diff_eq!(descent_bound(0.2, 0.0, 3, 0).unwrap().mu.unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(descent_bound(0.5, 0.0, 3, 0).unwrap().mu, None);
        assert!(descent_bound(0.1, 0.0, 2, 2).is_err());
    }

    #[test]
    fn threshold_formula() {
        assert_abs_diff_eq!(threshold_for_target(0.5, 2).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(threshold_for_target(0.7, 1).unwrap(), 0.7);
        assert_abs_diff_eq!(threshold_for_target(0.1, 3).unwrap(), 1.0 / 12.0, epsilon = 1e-15);
        assert!(threshold_for_target(0.0, 2).is_err());
        assert!(threshold_for_target(1.5, 2).is_err());
    }

    #[test]
    fn threshold_feeds_descent() {
        // μ_{n-1} at the threshold descends to exactly λ at k = 0
        for n in 1..6 {
            let lam = 0.3;
            let t = threshold_for_target(lam, n).unwrap();
            assert_abs_diff_eq!(descent_bound(t, 0.0, n, 0).unwrap().mu.unwrap(), lam, epsilon = 1e-14);
        }
    }
}
