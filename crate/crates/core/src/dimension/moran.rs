use serde::Serialize;

use super::cover::{CoverPlan, CoverSum, LevelFactor};
use super::sigma::{sigma_from_sequence, DEFAULT_HORIZON};
use crate::constraint::{ConstraintModel, ModelKind};
use crate::error::{Error, Result};
use crate::partition::Partition;

pub const DEFAULT_TOL: f64 = 1e-9;
const S_MIN: f64 = 1e-3;
const S_MAX: f64 = 1.0;
/// Slack for the monotonicity assertion, in units of ln(sum).
const MONOTONE_SLACK: f64 = 1e-12;

/// Dimension value predicted for a model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Theory {
    pub value: f64,
    /// Horizon-limited estimate (custom Jarník sequences).
    pub approximate: bool,
}

/// `1/(1+θ)` for the Good-type and envelope models, `σ` for Jarník models.
pub fn theoretical_dimension(model: &ConstraintModel, theta: f64) -> Result<Theory> {
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(Error::Domain(format!("theta must be >= 0, got {theta}")));
    }
    match model.kind() {
        ModelKind::Jarnik { s, .. } => {
            let r = sigma_from_sequence(theta, s, DEFAULT_HORIZON, 0.0)?;
            Ok(Theory {
                value: r.sigma,
                approximate: !r.analytic,
            })
        }
        _ => Ok(Theory {
            value: 1.0 / (1.0 + theta),
            approximate: false,
        }),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionEstimate {
    pub s_star: f64,
    pub bracket: (f64, f64),
    pub level: u64,
    pub tilde: bool,
    /// `ln` of the cover sum at `s_star`.
    pub ln_sum_at_root: f64,
    pub certified: bool,
    /// Largest exponent at which the cover sum was found to diverge.
    pub divergent_below: Option<f64>,
    pub evaluations: usize,
    pub factors: Vec<LevelFactor>,
    pub theory: Option<Theory>,
}

impl DimensionEstimate {
    pub fn gap(&self) -> Option<f64> {
        self.theory.map(|t| self.s_star - t.value)
    }
}

struct Search<'a> {
    plan: &'a CoverPlan,
    evaluations: usize,
    divergent_below: Option<f64>,
}

impl Search<'_> {
    /// `ln(sum)`, with divergence mapped to `+∞`.
    fn ln_sum(&mut self, s: f64) -> Result<(f64, Option<CoverSum>)> {
        self.evaluations += 1;
        match self.plan.eval(s) {
            Ok(c) => Ok((c.ln_value, Some(c))),
            Err(Error::Divergent { .. }) => {
                self.divergent_below = Some(self.divergent_below.map_or(s, |d| d.max(s)));
                Ok((f64::INFINITY, None))
            }
            Err(e) => Err(e),
        }
    }
}

/// Bisection for `Σ λ(C)^s = 1` over the admissible level-`k` cylinders
/// (tilde cylinders for Jarník models), on `(10^-3, 1]`.
pub fn moran_root(
    model: &ConstraintModel,
    p: &Partition,
    k: u64,
    tol: f64,
) -> Result<DimensionEstimate> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Domain(format!(
            "tolerance must lie in (0, 1), got {tol}"
        )));
    }
    let tilde = model.is_jarnik();
    let plan = CoverPlan::new(model, p, k, tilde)?;
    let mut search = Search {
        plan: &plan,
        evaluations: 0,
        divergent_below: None,
    };
    let (mut lo, mut hi) = (S_MIN, S_MAX);
    let (mut f_lo, _) = search.ln_sum(lo)?;
    let (mut f_hi, _) = search.ln_sum(hi)?;
    if f_lo < 0.0 || f_hi > 0.0 {
        return Err(Error::NoRoot {
            s_lo: lo,
            s_hi: hi,
            ln_sum_lo: f_lo,
            ln_sum_hi: f_hi,
        });
    }
    let mut converged: Option<CoverSum> = None;
    loop {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let (f_mid, sum) = search.ln_sum(mid)?;
        let slack = MONOTONE_SLACK * (1.0 + f_mid.abs());
        if f_mid > f_lo + slack || f_mid < f_hi - slack {
            return Err(Error::NonMonotone(format!(
                "ln sum {f_mid} at s = {mid} outside [{f_hi}, {f_lo}] of its bracket [{lo}, {hi}]"
            )));
        }
        // a tie moves the bracket down
        if f_mid > 0.0 {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
        if let Some(c) = sum {
            if hi - lo <= tol && c.ln_value.exp_m1().abs() <= tol {
                converged = Some(c);
                break;
            }
        }
    }
    // the converged midpoint is an endpoint of the final bracket
    let (s_star, at_root) = match converged {
        Some(c) => (c.s, c),
        None => {
            let s = lo + 0.5 * (hi - lo);
            (s, plan.eval(s)?)
        }
    };
    Ok(DimensionEstimate {
        s_star,
        bracket: (lo, hi),
        level: k,
        tilde,
        ln_sum_at_root: at_root.ln_value,
        certified: at_root.certified,
        divergent_below: search.divergent_below,
        evaluations: search.evaluations,
        factors: at_root.factors,
        theory: Some(theoretical_dimension(model, p.theta())?),
    })
}
