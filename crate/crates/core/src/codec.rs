//! The α-Lüroth map and the digit codec.
//!
//! `encode` follows the orbit of `x` under `L_α(x) = (t_n - x)/a_n`; `decode`
//! sums the alternating series `t_{ℓ1} - a_{ℓ1} t_{ℓ2} + a_{ℓ1} a_{ℓ2} t_{ℓ3} - …`.
//! Every digit costs `log2(1/a_ℓ)` bits of precision, so `encode` tracks that
//! budget and re-runs at a higher internal precision when the orbit outgrows it.

use std::fmt;
use std::str::FromStr;

use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{Partition, INDEX_LIMIT, MAX_PRECISION};

/// `encode` refuses to emit more digits than this.
pub const MAX_DIGITS: usize = 10_000;

/// Bits kept in reserve when deciding which digits are trustworthy.
const BUDGET_GUARD: f64 = 24.0;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DigitSequence {
    digits: Vec<u64>,
    /// The orbit reached 0, so the expansion is finite.
    terminated: bool,
}

impl DigitSequence {
    pub fn new(digits: Vec<u64>, terminated: bool) -> Result<Self> {
        if let Some(bad) = digits.iter().find(|&&d| d == 0 || d > INDEX_LIMIT) {
            return Err(Error::Domain(format!(
                "digit {bad} outside 1..={INDEX_LIMIT}"
            )));
        }
        Ok(DigitSequence { digits, terminated })
    }

    /// A finite expansion `[ℓ_1, …, ℓ_k]_α`.
    pub fn finite(digits: Vec<u64>) -> Result<Self> {
        Self::new(digits, true)
    }

    /// A prefix of an infinite expansion.
    pub fn truncated(digits: Vec<u64>) -> Result<Self> {
        Self::new(digits, false)
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn into_digits(self) -> Vec<u64> {
        self.digits
    }

    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Finite expansions end in a digit ≥ 2, except the expansion `[1]` of `x = 1`.
    pub fn is_canonical(&self) -> bool {
        !self.terminated || self.digits.len() <= 1 || self.digits.last().is_some_and(|&d| d >= 2)
    }
}

impl fmt::Display for DigitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.digits.iter().map(u64::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Parses `2,2,3` (or `[2, 2, 3]`) as a finite sequence.
impl FromStr for DigitSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('[').trim_end_matches(']');
        let digits = body
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::Domain(format!("bad digit `{}`: {e}", p.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        DigitSequence::finite(digits)
    }
}

/// Result of [`encode`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Encoding {
    #[serde(flatten)]
    pub sequence: DigitSequence,
    /// Leading digits computed within the precision budget.
    pub trusted: usize,
    /// Internal precision the final pass ran at.
    pub precision_used: u32,
}

/// `2^{-(precision/2)}`.
pub fn default_zero_tol(p: &Partition) -> f64 {
    (-(p.precision() as f64) / 2.0).exp2()
}

pub fn apply_map(p: &Partition, x: &Float) -> Result<Float> {
    if x.is_nan() || *x < 0 || *x > 1 {
        return Err(Error::Domain(format!(
            "L_alpha is defined on [0, 1], got {}",
            x.to_f64()
        )));
    }
    if x.is_zero() {
        return Ok(Float::with_val(p.precision(), 0));
    }
    let prec = x.prec().max(p.precision());
    let n = p.locate_atom(x)?;
    Ok(map_branch(p, x, n, prec))
}

/// `(t_n - x)/a_n`, clamped into `[0, 1]` against rounding.
fn map_branch(p: &Partition, x: &Float, n: u64, prec: u32) -> Float {
    let mut y = p.tail_prec(n, prec) - x;
    y /= p.atom_prec(n, prec);
    if y.is_sign_negative() {
        y = Float::with_val(prec, 0);
    } else if y > 1 {
        y = Float::with_val(prec, 1);
    }
    y
}

fn digit_bits(p: &Partition, d: u64) -> f64 {
    -p.ln_atom_f64(d) / std::f64::consts::LN_2
}

pub fn encode(p: &Partition, x: &Float, k_max: usize, zero_tol: f64) -> Result<Encoding> {
    if x.is_nan() || *x <= 0 || *x > 1 {
        return Err(Error::Domain(format!(
            "encode needs 0 < x <= 1, got {}",
            x.to_f64()
        )));
    }
    if k_max == 0 || k_max > MAX_DIGITS {
        return Err(Error::Domain(format!(
            "k_max must lie in 1..={MAX_DIGITS}, got {k_max}"
        )));
    }
    let mut work = p.precision().max(x.prec());
    loop {
        let (digits, terminated, cut) = run_orbit(p, x, k_max, zero_tol, work)?;
        let budget = work as f64 - BUDGET_GUARD;
        let mut spent = 0.0;
        let mut trusted = 0;
        for &d in &digits {
            // resolving d needs its own bits on top of those already spent
            spent += digit_bits(p, d);
            if spent > budget {
                break;
            }
            trusted += 1;
        }
        if cut && work >= MAX_PRECISION {
            return Err(Error::IndexOverflow(format!(
                "orbit leaves the index range after {} digits at {MAX_PRECISION} bits",
                digits.len()
            )));
        }
        if (trusted == digits.len() && !cut) || work >= MAX_PRECISION {
            let mut sequence = DigitSequence { digits, terminated };
            if terminated {
                sequence = canonicalize(&sequence);
                trusted = trusted.min(sequence.len());
            }
            return Ok(Encoding {
                sequence,
                trusted,
                precision_used: work,
            });
        }
        let total: f64 = digits.iter().map(|&d| digit_bits(p, d)).sum();
        let needed = (total + BUDGET_GUARD + 32.0).ceil() as u32 + x.prec();
        work = needed.max(work * 2).min(MAX_PRECISION);
    }
}

/// Digits of the orbit, whether it hit zero, and whether it was cut short by an
/// out-of-range digit past the precision budget (noise, not a real digit).
fn run_orbit(
    p: &Partition,
    x: &Float,
    k_max: usize,
    zero_tol: f64,
    prec: u32,
) -> Result<(Vec<u64>, bool, bool)> {
    let mut y = Float::with_val(prec, x);
    let mut digits = Vec::with_capacity(k_max.min(64));
    let budget = prec as f64 - BUDGET_GUARD;
    let mut spent = 0.0;
    for _ in 0..k_max {
        let n = match p.locate_atom(&y) {
            Ok(n) => n,
            // an out-of-range digit would cost at least -log2(y) bits
            Err(Error::IndexOverflow(_)) if spent - y.clone().log2().to_f64() > budget => {
                return Ok((digits, false, true));
            }
            Err(e) => return Err(e),
        };
        spent += digit_bits(p, n);
        digits.push(n);
        y = map_branch(p, &y, n, prec);
        if y <= zero_tol {
            return Ok((digits, true, false));
        }
    }
    Ok((digits, false, false))
}

/// Bits of precision needed to resolve the cylinder of `digits` to `p.precision()` bits.
pub(crate) fn resolving_precision(p: &Partition, digits: &[u64]) -> u32 {
    let spent: f64 = digits.iter().map(|&d| digit_bits(p, d)).sum();
    let extra = (spent + (digits.len() as f64).log2() + 8.0).ceil() as u32;
    (p.precision() + extra).min(MAX_PRECISION)
}

/// `decode` at an explicit precision, nested as `t_{ℓ1} - a_{ℓ1}(t_{ℓ2} - a_{ℓ2}(…))`.
pub(crate) fn decode_prec(p: &Partition, digits: &[u64], prec: u32) -> Float {
    let mut it = digits.iter().rev();
    let last = *it.next().expect("nonempty digits");
    let mut v = p.tail_prec(last, prec);
    for &d in it {
        v *= p.atom_prec(d, prec);
        v = p.tail_prec(d, prec) - v;
    }
    v
}

/// Sum of the alternating series, at a precision that resolves the
/// cylinder of `d` (so the result is accurate relative to `∏ a_{ℓ_i}`).
pub fn decode(p: &Partition, d: &DigitSequence) -> Result<Float> {
    if d.is_empty() {
        return Err(Error::Domain(
            "cannot decode an empty digit sequence".into(),
        ));
    }
    let prec = resolving_precision(p, d.digits());
    Ok(decode_prec(p, d.digits(), prec))
}

/// Rewrites a trailing `[…, ℓ, 1]` to `[…, ℓ+1]` until the last digit is ≥ 2.
pub fn canonicalize(d: &DigitSequence) -> DigitSequence {
    let mut digits = d.digits.clone();
    if d.terminated {
        while digits.len() > 1 && digits.last() == Some(&1) {
            digits.pop();
            *digits.last_mut().expect("len > 1") += 1;
        }
    }
    DigitSequence {
        digits,
        terminated: d.terminated,
    }
}

fn require_exact(p: &Partition) -> Result<()> {
    if p.is_classical() {
        Ok(())
    } else {
        Err(Error::Domain(
            "exact rational mode needs the classical partition".into(),
        ))
    }
}

/// Exact decode for the classical partition.
pub fn decode_exact(p: &Partition, d: &DigitSequence) -> Result<Rational> {
    require_exact(p)?;
    let (&last, rest) = d
        .digits()
        .split_last()
        .ok_or_else(|| Error::Domain("cannot decode an empty digit sequence".into()))?;
    let mut v = Rational::from((1u64, last));
    for &n in rest.iter().rev() {
        v *= Rational::from((1u64, n)) - Rational::from((1u64, n + 1));
        v = Rational::from((1u64, n)) - v;
    }
    Ok(v)
}

/// Exact encode for the classical partition; terminates exactly when the orbit hits 0.
pub fn encode_exact(p: &Partition, x: &Rational, k_max: usize) -> Result<DigitSequence> {
    require_exact(p)?;
    if *x <= 0 || *x > 1 {
        return Err(Error::Domain("encode needs 0 < x <= 1".into()));
    }
    let mut y = x.clone();
    let mut digits = Vec::new();
    for _ in 0..k_max {
        // 1/(n+1) < y ≤ 1/n  ⇔  n = floor(1/y)
        let n = Rational::from(y.recip_ref())
            .floor()
            .numer()
            .to_u64()
            .ok_or_else(|| Error::IndexOverflow("digit does not fit in u64".into()))?;
        if n > INDEX_LIMIT {
            return Err(Error::IndexOverflow(format!(
                "digit {n} exceeds {INDEX_LIMIT}"
            )));
        }
        digits.push(n);
        y = (Rational::from((1u64, n)) - y) * Rational::from(n as u128 * (n as u128 + 1));
        if y == 0 {
            return DigitSequence::finite(digits);
        }
    }
    DigitSequence::truncated(digits)
}
