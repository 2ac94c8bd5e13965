use serde::Serialize;

use super::Neumaier;
use crate::constraint::SequenceSpec;
use crate::error::{Error, Result};

pub(crate) const DEFAULT_HORIZON: u64 = 64;

/// Finite-horizon view of `σ = liminf log(s_1⋯s_n) / ((1+θ) log(s_1⋯s_n) + θ log s_{n+1})`.
#[derive(Clone, Debug, Serialize)]
pub struct SigmaReport {
    /// The analytic `1/((1+θ)+θτ)` when the sequence kind has a closed-form
    /// `τ`, otherwise `sigma_estimate`.
    pub sigma: f64,
    pub tau: f64,
    pub analytic: bool,
    /// Minimum of the quotient over the trailing window `[⌈h/2⌉, h]`.
    pub sigma_estimate: f64,
    /// Maximum of `log s_{n+1} / log(s_1⋯s_n)` over the same window.
    pub tau_estimate: f64,
    /// Minimum of the quotient over all `n ≤ h`.
    pub running_min: f64,
    pub theta: f64,
    pub eps: f64,
    /// `σ` with `θ` replaced by `θ + ε` and `max(θ - ε, 0)`, when `ε > 0`.
    pub sigma_eps: Option<(f64, f64)>,
    pub horizon: u64,
    /// Quotient for `n = 1..=h`; `None` where `log(s_1⋯s_n) = 0`.
    pub quotients: Vec<Option<f64>>,
    pub tau_values: Vec<Option<f64>>,
}

fn closed_form(theta: f64, tau: f64) -> f64 {
    1.0 / ((1.0 + theta) + theta * tau)
}

fn window_min(theta: f64, logs: &[(f64, f64)], from: usize) -> Option<f64> {
    logs[from..]
        .iter()
        .filter(|(l, _)| *l > 0.0)
        .map(|(l, next)| l / ((1.0 + theta) * l + theta * next))
        .reduce(f64::min)
}

pub fn sigma_from_sequence(
    theta: f64,
    s: &SequenceSpec,
    horizon: u64,
    eps: f64,
) -> Result<SigmaReport> {
    if horizon < 2 {
        return Err(Error::Domain(format!(
            "horizon must be >= 2, got {horizon}"
        )));
    }
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(Error::Domain(format!("theta must be >= 0, got {theta}")));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("eps must be >= 0, got {eps}")));
    }
    s.validate()?;

    // (log(s_1⋯s_n), log s_{n+1})
    let mut acc = Neumaier::default();
    let mut logs = Vec::with_capacity(horizon as usize);
    for n in 1..=horizon {
        acc.add(s.ln_s(n));
        logs.push((acc.total(), s.ln_s(n + 1)));
    }
    let quotients: Vec<Option<f64>> = logs
        .iter()
        .map(|&(l, next)| (l > 0.0).then(|| l / ((1.0 + theta) * l + theta * next)))
        .collect();
    let tau_values: Vec<Option<f64>> = logs
        .iter()
        .map(|&(l, next)| (l > 0.0).then(|| next / l))
        .collect();

    let from = (horizon as usize).div_ceil(2) - 1;
    let sigma_estimate = window_min(theta, &logs, from)
        .ok_or_else(|| Error::Domain("log(s_1...s_n) vanishes on the whole window".into()))?;
    let tau_estimate = tau_values[from..]
        .iter()
        .flatten()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let running_min = quotients
        .iter()
        .flatten()
        .copied()
        .fold(f64::INFINITY, f64::min);

    let analytic_tau = s.analytic_tau();
    let (sigma, tau) = match analytic_tau {
        Some(tau) => (closed_form(theta, tau), tau),
        None => (sigma_estimate, tau_estimate),
    };
    let sigma_eps = (eps > 0.0).then(|| {
        let shifted = |th: f64| match analytic_tau {
            Some(tau) => closed_form(th, tau),
            None => window_min(th, &logs, from).expect("window checked above"),
        };
        (shifted(theta + eps), shifted((theta - eps).max(0.0)))
    });

    Ok(SigmaReport {
        sigma,
        tau,
        analytic: analytic_tau.is_some(),
        sigma_estimate,
        tau_estimate,
        running_min,
        theta,
        eps,
        sigma_eps,
        horizon,
        quotients,
        tau_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_sequence() {
        let s = SequenceSpec::Geometric { base: 2 };
        let r = sigma_from_sequence(1.0, &s, 50, 0.0).unwrap();
        assert!((r.sigma - 0.5).abs() < 1e-2);
        assert!(r.tau.abs() < 1e-1);
        // quotient n/(2n+2) and τ_n = 2/n in closed form
        for n in 1..=50usize {
            let nf = n as f64;
            assert!((r.quotients[n - 1].unwrap() - nf / (2.0 * nf + 2.0)).abs() < 1e-14);
            assert!((r.tau_values[n - 1].unwrap() - 2.0 / nf).abs() < 1e-14);
        }
        assert!((r.sigma_estimate - 25.0 / 52.0).abs() < 1e-14);
        assert!((r.running_min - 0.25).abs() < 1e-14);
        assert!(r.sigma_eps.is_none());
    }

    #[test]
    fn doubly_exponential_sequence() {
        let s = SequenceSpec::DoublyExponential { base: 2 };
        let r = sigma_from_sequence(1.0, &s, 20, 0.0).unwrap();
        assert!((r.sigma - 1.0 / 3.0).abs() < 1e-3);
        assert!((r.sigma_estimate - 1.0 / 3.0).abs() < 1e-3);
        assert_eq!(r.tau, 1.0);
    }

    #[test]
    fn theta_zero_is_exactly_one() {
        for s in [
            SequenceSpec::Geometric { base: 3 },
            SequenceSpec::Polynomial { c: 0 },
            SequenceSpec::Custom {
                values: vec![5, 2, 9],
            },
        ] {
            let r = sigma_from_sequence(0.0, &s, 50, 0.0).unwrap();
            assert_eq!(r.sigma, 1.0);
            assert_eq!(r.sigma_estimate, 1.0);
        }
    }

    #[test]
    fn undefined_levels_are_guarded() {
        // s_1 = 1 makes log(s_1) = 0
        let s = SequenceSpec::Polynomial { c: 0 };
        let r = sigma_from_sequence(1.0, &s, 10, 0.0).unwrap();
        assert_eq!(r.quotients[0], None);
        assert!(r.quotients[1].is_some());
        let flat = SequenceSpec::Custom { values: vec![1] };
        assert!(sigma_from_sequence(1.0, &flat, 10, 0.0).is_err());
    }

    #[test]
    fn eps_variants_bracket_sigma() {
        let s = SequenceSpec::DoublyExponential { base: 3 };
        let r = sigma_from_sequence(1.0, &s, 20, 0.1).unwrap();
        let (lo, hi) = r.sigma_eps.unwrap();
        assert!(lo < r.sigma && r.sigma < hi);
        assert!((lo - 1.0 / 3.2).abs() < 1e-15);
        let c = SequenceSpec::Custom {
            values: vec![2, 4, 8, 16],
        };
        let r = sigma_from_sequence(1.0, &c, 30, 0.1).unwrap();
        assert!(!r.analytic);
        let (lo, hi) = r.sigma_eps.unwrap();
        assert!(lo < r.sigma && r.sigma < hi);
    }

    #[test]
    fn bad_arguments() {
        let s = SequenceSpec::Geometric { base: 2 };
        assert!(sigma_from_sequence(1.0, &s, 1, 0.0).is_err());
        assert!(sigma_from_sequence(-1.0, &s, 10, 0.0).is_err());
        assert!(sigma_from_sequence(1.0, &s, 10, -0.5).is_err());
    }
}
