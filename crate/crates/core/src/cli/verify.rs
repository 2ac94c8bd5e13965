//! Seeded property suites behind `verify --suite`.

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;
use serde::Serialize;
use serde_json::{json, Value};

use crate::codec::{apply_map, decode, default_zero_tol, encode};
use crate::constraint::{ConstraintModel, EnvelopeF, ModelSpec, SequenceSpec};
use crate::cylinder::{ball_containment_check, cylinder_measure, ln_cylinder_measure};
use crate::dimension::{
    cover_sum, empirical_holder, frostman_measure, ln_frostman_measure, moran_root,
    sigma_from_sequence, MeasureKind, Neumaier, DEFAULT_TOL,
};
use crate::error::{Error, Result};
use crate::partition::Partition;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// decode(encode(x)) stays inside the depth-k cylinder of x.
    Roundtrip,
    /// Digits of L(x) are the digits of x shifted by one.
    Shift,
    /// Balls with radius in [λ(C_{k+1}), λ(C_k)) sit inside three neighbouring cylinders.
    LemmaInt,
    /// Normalisation, domination and Hölder exponent of a mass distribution.
    Frostman,
    /// Tilde cover sums straddle 1 around σ, and σ for s_n = 2^(2^n).
    JarnikBracket,
}

/// Optional overrides; `None` selects the suite's default.
#[derive(Clone, Debug, Default)]
pub struct SuiteParams {
    pub seed: u64,
    pub samples: Option<usize>,
    pub depth: Option<usize>,
    pub model: Option<ConstraintModel>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: Suite, seed: u64, checks: Vec<Check>) -> Self {
        SuiteReport {
            suite,
            seed,
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }
}

fn check(name: &str, passed: bool, detail: Value) -> Check {
    Check {
        name: name.to_string(),
        passed,
        detail,
    }
}

/// Most cylinders the exhaustive Frostman checks will enumerate per level.
const MAX_ENUMERATION: usize = 2_000_000;

pub fn run_suite(suite: Suite, p: &Partition, params: &SuiteParams) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Roundtrip => vec![roundtrip(p, params)?],
        Suite::Shift => vec![shift(p, params)?],
        Suite::LemmaInt => vec![lemma_int(p, params)?],
        Suite::Frostman => frostman(p, params)?,
        Suite::JarnikBracket => jarnik_bracket(p, params)?,
    };
    Ok(SuiteReport::new(suite, params.seed, checks))
}

/// Uniform draw from `(0, 1]`.
fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.gen::<f64>()
}

fn roundtrip(p: &Partition, params: &SuiteParams) -> Result<Check> {
    let samples = params.samples.unwrap_or(10_000);
    let depth = params.depth.unwrap_or(30);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let zero_tol = default_zero_tol(p);
    // relative slack 2^-(precision-10), as in the cylinder checks
    let slack_shift = p.precision() - 10;
    let mut failures = Vec::new();
    let mut max_err = 0.0f64;
    let mut max_ratio = 0.0f64;
    for i in 0..samples {
        let x = Float::with_val(p.precision(), uniform(&mut rng));
        let enc = encode(p, &x, depth, zero_tol)?;
        let back = decode(p, &enc.sequence)?;
        let err = Float::with_val(back.prec(), &back - &x).abs();
        // λ at the decode precision: points on the far endpoint sit at distance exactly λ
        let lambda = enc
            .sequence
            .digits()
            .iter()
            .fold(Float::with_val(back.prec(), 1), |acc, &d| {
                acc * p.atom_prec(d, back.prec())
            });
        let bound = Float::with_val(
            back.prec(),
            &lambda + Float::with_val(back.prec(), &lambda >> slack_shift),
        );
        let ok = err <= bound && err <= 1e-6;
        max_err = max_err.max(err.to_f64());
        if !lambda.is_zero() {
            max_ratio = max_ratio.max(Float::with_val(64, &err / &lambda).to_f64());
        }
        if !ok && failures.len() < 10 {
            failures.push(json!({ "sample": i, "x": x.to_f64(), "digits": enc.sequence.digits() }));
        }
    }
    Ok(check(
        "decode-encode",
        failures.is_empty(),
        json!({
            "samples": samples,
            "depth": depth,
            "max_abs_error": max_err,
            "max_error_over_measure": max_ratio,
            "failures": failures,
        }),
    ))
}

fn shift(p: &Partition, params: &SuiteParams) -> Result<Check> {
    let samples = params.samples.unwrap_or(1000);
    let depth = params.depth.unwrap_or(20);
    if depth < 2 {
        return Err(Error::Domain("shift suite needs depth >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let zero_tol = default_zero_tol(p);
    let mut failures = Vec::new();
    for i in 0..samples {
        let u = uniform(&mut rng);
        let x = Float::with_val(p.precision(), u);
        let full = encode(p, &x, depth, zero_tol)?;
        // the map must not lose the bits the deeper digits depend on
        let x_wide = Float::with_val(full.precision_used + 64, u);
        let y = apply_map(p, &x_wide)?;
        let shifted: Vec<u64> = if y.is_zero() {
            Vec::new()
        } else {
            encode(p, &y, depth - 1, zero_tol)?.sequence.into_digits()
        };
        if shifted.as_slice() != &full.sequence.digits()[1..] && failures.len() < 10 {
            failures.push(json!({ "sample": i, "x": u, "digits": full.sequence.digits(), "shifted": shifted }));
        }
    }
    Ok(check(
        "shift",
        failures.is_empty(),
        json!({ "samples": samples, "depth": depth, "failures": failures }),
    ))
}

fn lemma_int(p: &Partition, params: &SuiteParams) -> Result<Check> {
    let samples = params.samples.unwrap_or(500);
    let k_max = params.depth.unwrap_or(15);
    if k_max < 1 {
        return Err(Error::Domain("lemma-int suite needs depth >= 1".into()));
    }
    let model = match &params.model {
        Some(m) => m.clone(),
        None => ConstraintModel::envelope(EnvelopeF::Log2 { c: Some(8) }, 0.1, p)?,
    };
    if !model.monotone_coupling() {
        return Err(Error::InvalidModel(
            "lemma-int needs a monotone (envelope) model".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut k0_max = 0u64;
    let mut missing = Vec::new();
    let mut below = Vec::new();
    for i in 0..samples {
        let digits = model.sample_with(k_max + 1, &mut rng)?.into_digits();
        let mut passed = vec![false; k_max + 1];
        for k in 1..=k_max {
            let lam_next = cylinder_measure(p, &digits[..=k], None)?;
            let lam = cylinder_measure(p, &digits[..k], None)?;
            let shrink = Float::with_val(lam.prec(), -32f64).exp2();
            let r_hi = Float::with_val(lam.prec(), &lam - &lam * shrink);
            passed[k] = ball_containment_check(p, &digits[..=k], &lam_next)?
                && ball_containment_check(p, &digits[..=k], &r_hi)?;
        }
        // smallest k0 with every k in [k0, k_max] passing
        let mut k0 = k_max + 1;
        while k0 > 1 && passed[k0 - 1] {
            k0 -= 1;
        }
        if k0 > k_max {
            missing.push(json!({ "sample": i, "digits": digits }));
            continue;
        }
        k0_max = k0_max.max(k0 as u64);
        for (k, &ok) in passed.iter().enumerate().take(k0).skip(1) {
            if !ok {
                below.push(json!({ "sample": i, "k": k }));
            }
        }
    }
    Ok(check(
        "ball-containment",
        missing.is_empty(),
        json!({
            "samples": samples,
            "k_max": k_max,
            "largest_k0": k0_max,
            "failures_below_k0": below.len(),
            "failures_below_k0_first": below.iter().take(20).collect::<Vec<_>>(),
            "samples_without_k0": missing,
        }),
    ))
}

/// Every admissible digit string of length `k`.
pub(crate) fn admissible_strings(model: &ConstraintModel, k: usize) -> Result<Vec<Vec<u64>>> {
    let mut out: Vec<Vec<u64>> = vec![Vec::new()];
    for level in 1..=k as u64 {
        let range = model.admissible_range(level)?;
        let hi = range.hi.ok_or_else(|| {
            Error::Precondition("cannot enumerate an unbounded digit range".into())
        })?;
        let mut next = Vec::new();
        for prefix in &out {
            let lo = match prefix.last() {
                Some(&prev) if model.monotone_coupling() => range.lo.max(prev),
                _ => range.lo,
            };
            for d in lo..=hi {
                if next.len() >= MAX_ENUMERATION {
                    return Err(Error::Precondition(format!(
                        "more than {MAX_ENUMERATION} admissible strings at level {level}"
                    )));
                }
                let mut s = prefix.clone();
                s.push(d);
                next.push(s);
            }
        }
        out = next;
    }
    Ok(out)
}

fn frostman(p: &Partition, params: &SuiteParams) -> Result<Vec<Check>> {
    let model = match &params.model {
        Some(m) => m.clone(),
        None => ConstraintModel::good_band_minimal(10)?,
    };
    let kind = MeasureKind::for_model(&model)?;
    let max_level = 4;
    let power = 1.0 / (1.0 + p.theta() + 0.1);

    let mut sums = Vec::new();
    let mut norm_ok = true;
    let mut dom_ok = true;
    let mut worst_margin = f64::INFINITY;
    let mut worst_dom: Option<Vec<u64>> = None;
    for k in 1..=max_level {
        let mut acc = Neumaier::default();
        for digits in admissible_strings(&model, k)? {
            acc.add(frostman_measure(&model, &digits)?);
            // ν(C) ≤ λ(C)^power, in logs
            let margin = power * ln_cylinder_measure(p, &digits, None)?
                - ln_frostman_measure(&model, &digits)?;
            if margin < worst_margin {
                worst_margin = margin;
                worst_dom = Some(digits);
            }
        }
        let total = acc.total();
        norm_ok &= (total - 1.0).abs() <= 1e-10;
        sums.push(json!({ "k": k, "sum": total }));
    }
    dom_ok &= worst_margin >= 0.0;

    let samples = params.samples.unwrap_or(1000);
    let depth = params.depth.unwrap_or(12) as u64;
    let holder = empirical_holder(&model, p, kind, samples, depth, params.seed)?;
    let level = if model.is_level_homogeneous() {
        1
    } else {
        depth
    };
    let root = moran_root(&model, p, level, DEFAULT_TOL)?;
    let holder_ok = holder.exponent >= root.s_star - 0.05;

    Ok(vec![
        check(
            "normalisation",
            norm_ok,
            json!({ "model": model_value(&model), "sums": sums }),
        ),
        check(
            "domination",
            dom_ok,
            json!({ "power": power, "max_level": max_level, "min_log_margin": worst_margin, "worst": worst_dom }),
        ),
        check(
            "holder-exponent",
            holder_ok,
            json!({
                "exponent": holder.exponent,
                "mean": holder.mean,
                "samples": samples,
                "depth": depth,
                "k_min": holder.k_min,
                "moran_root": root.s_star,
                "moran_level": level,
            }),
        ),
    ])
}

fn jarnik_bracket(p: &Partition, params: &SuiteParams) -> Result<Vec<Check>> {
    let model = match &params.model {
        Some(m) => m.clone(),
        None => ConstraintModel::jarnik(SequenceSpec::Geometric { base: 2 }, 4)?,
    };
    let seq = match model.spec() {
        ModelSpec::Jarnik { s, .. } => s,
        _ => {
            return Err(Error::InvalidModel(
                "jarnik-bracket needs a Jarnik model".into(),
            ))
        }
    };
    let k = params.depth.unwrap_or(20) as u64;
    let sigma = sigma_from_sequence(p.theta(), &seq, 64, 0.0)?.sigma;
    let above = cover_sum(&model, p, k, sigma + 0.05, true)?;
    let below = cover_sum(&model, p, k, sigma - 0.05, true)?;
    let bracket_ok = above.ln_value < 1e-3f64.ln() && below.ln_value > 1e3f64.ln();

    let dexp = sigma_from_sequence(
        p.theta(),
        &SequenceSpec::DoublyExponential { base: 2 },
        20,
        0.0,
    )?;
    let target = 1.0 / ((1.0 + p.theta()) + p.theta());
    let dexp_ok =
        (dexp.sigma - target).abs() <= 1e-3 && (dexp.sigma_estimate - target).abs() <= 1e-3;

    Ok(vec![
        check(
            "tilde-bracket",
            bracket_ok,
            json!({
                "model": model_value(&model),
                "level": k,
                "sigma": sigma,
                "ln_sum_above": above.ln_value,
                "ln_sum_below": below.ln_value,
            }),
        ),
        check(
            "doubly-exponential-sigma",
            dexp_ok,
            json!({ "target": target, "sigma": dexp.sigma, "sigma_estimate": dexp.sigma_estimate, "horizon": 20 }),
        ),
    ])
}

fn model_value(model: &ConstraintModel) -> Value {
    serde_json::from_str(&model.to_json()).unwrap_or(Value::Null)
}
