//! Interval partitions `{A_n}` of `(0, 1]` with power-law tails.
//!
//! Atoms are ordered right to left: `A_n = (t_{n+1}, t_n]`, `a_n = t_n - t_{n+1}`.
//! Every supported family is given by a closed form for the tail
//! `t_n = ψ(n) n^{-θ}` (normalised so that `t_1 = 1`), optionally preceded by
//! an explicit table of leading tails. Atoms are always differences of
//! closed forms, never cumulative sums.

use rug::ops::Pow;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: u32 = 128;
pub const MIN_PRECISION: u32 = 64;
pub const MAX_PRECISION: u32 = 1 << 16;

/// Largest digit the library will emit or evaluate.
pub const INDEX_LIMIT: u64 = 1_000_000_000_000_000_000;

/// Extra bits used when an atom is formed as a difference of two tails.
const GUARD_BITS: u32 = 64;

/// How far past the explicit table the eventual-decrease scan looks.
const DECREASE_SCAN: u64 = 100_000;

/// Log-power slowly varying factors whose tails only become monotone beyond
/// this index are rejected.
const MONOTONE_CHECK_LIMIT: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionKind {
    Power,
    /// `t_n = 1/n`, `a_n = 1/(n(n+1))`; the only kind with an exact rational mode.
    Classical,
    CustomTable,
}

/// Slowly varying factor `ψ` of the tail law.
///
/// The tails are normalised to `t_1 = 1`, so the constant `c` only has to be
/// positive; it cancels out of every tail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Psi {
    Constant {
        c: f64,
    },
    /// `(log(n+1))^β`
    LogPower {
        beta: f64,
    },
    /// `1/log(n+e)`
    ReciprocalLog,
}

impl Default for Psi {
    fn default() -> Self {
        Psi::Constant { c: 1.0 }
    }
}

impl Psi {
    fn ln_f64(&self, x: f64) -> f64 {
        match self {
            Psi::Constant { .. } => 0.0,
            Psi::LogPower { beta } => beta * x.ln_1p().ln(),
            Psi::ReciprocalLog => -(x + std::f64::consts::E).ln().ln(),
        }
    }

    /// `ln ψ(x+1) - ln ψ(x)` without cancellation.
    fn ln_step_f64(&self, x: f64) -> f64 {
        match self {
            Psi::Constant { .. } => 0.0,
            Psi::LogPower { beta } => {
                let l = x.ln_1p();
                beta * ((1.0 / (x + 1.0)).ln_1p() / l).ln_1p()
            }
            Psi::ReciprocalLog => {
                let y = x + std::f64::consts::E;
                -((1.0 / y).ln_1p() / y.ln()).ln_1p()
            }
        }
    }

    fn eval(&self, n: u64, prec: u32) -> Float {
        match self {
            Psi::Constant { .. } => Float::with_val(prec, 1),
            Psi::LogPower { beta } => {
                let l = Float::with_val(prec, n as u128 + 1).ln();
                l.pow(Float::with_val(prec, *beta))
            }
            Psi::ReciprocalLog => {
                let e = Float::with_val(prec, 1).exp();
                (Float::with_val(prec, n) + e).ln().recip()
            }
        }
    }

    /// Exponent `b` with `ψ(x) ≍ (ln x)^b`.
    pub(crate) fn log_exponent(&self) -> f64 {
        match self {
            Psi::Constant { .. } => 0.0,
            Psi::LogPower { beta } => *beta,
            Psi::ReciprocalLog => -1.0,
        }
    }

    fn is_constant(&self) -> bool {
        matches!(self, Psi::Constant { .. })
    }
}

fn default_theta() -> f64 {
    1.0
}

fn default_precision() -> u32 {
    DEFAULT_PRECISION
}

/// Serialised form: `{"kind":"power","theta":1.0,"psi":{"type":"constant","c":1.0},"precision_bits":128}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionSpec {
    pub kind: PartitionKind,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default)]
    pub psi: Psi,
    /// Leading tails `t_1, …, t_m` for `custom-table`; beyond `m` the tail
    /// continues as `t_m (m/n)^θ ψ(n)/ψ(m)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<f64>>,
    #[serde(default = "default_precision")]
    pub precision_bits: u32,
}

impl PartitionSpec {
    pub fn classical() -> Self {
        PartitionSpec {
            kind: PartitionKind::Classical,
            theta: 1.0,
            psi: Psi::default(),
            table: None,
            precision_bits: DEFAULT_PRECISION,
        }
    }

    pub fn power(theta: f64, psi: Psi) -> Self {
        PartitionSpec {
            kind: PartitionKind::Power,
            theta,
            psi,
            table: None,
            precision_bits: DEFAULT_PRECISION,
        }
    }

    pub fn custom_table(tails: Vec<f64>, theta: f64, psi: Psi) -> Self {
        PartitionSpec {
            kind: PartitionKind::CustomTable,
            theta,
            psi,
            table: Some(tails),
            precision_bits: DEFAULT_PRECISION,
        }
    }

    pub fn with_precision(mut self, bits: u32) -> Self {
        self.precision_bits = bits;
        self
    }
}

/// One row of [`AsymptoticReport`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticRow {
    pub n: u64,
    pub tail: f64,
    pub atom: f64,
    /// `n a_n / t_n`, tends to `θ` for power tails.
    pub tail_ratio: f64,
    /// `a_n / a_{n+1}`, tends to 1.
    pub atom_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticReport {
    pub rows: Vec<AsymptoticRow>,
}

/// An immutable partition with closed-form tails.
#[derive(Clone, Debug)]
pub struct Partition {
    spec: PartitionSpec,
    /// Explicit leading tails (empty for the power kinds).
    table: Vec<f64>,
    /// The closed-form law is anchored at `(index, tail)`.
    anchor: (u64, f64),
    n_dec: u64,
}

impl Partition {
    pub fn new(spec: PartitionSpec) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidPartition(msg));
        let theta = spec.theta;
        if !theta.is_finite() || theta < 0.0 {
            return bad(format!("theta must be finite and nonnegative, got {theta}"));
        }
        if !(MIN_PRECISION..=MAX_PRECISION).contains(&spec.precision_bits) {
            return bad(format!(
                "precision_bits must lie in {MIN_PRECISION}..={MAX_PRECISION}, got {}",
                spec.precision_bits
            ));
        }
        match spec.psi {
            Psi::Constant { c } if !(c.is_finite() && c > 0.0) => {
                return bad(format!("constant psi must be positive, got {c}"));
            }
            Psi::LogPower { beta } if !beta.is_finite() => {
                return bad("log-power exponent must be finite".into());
            }
            _ => {}
        }
        if theta == 0.0 && spec.psi != Psi::ReciprocalLog {
            return bad(
                "theta = 0 requires the reciprocal-log psi, otherwise tails do not vanish".into(),
            );
        }
        if spec.kind == PartitionKind::Classical && (theta != 1.0 || !spec.psi.is_constant()) {
            return bad("classical partition is theta = 1 with constant psi".into());
        }

        let table = match (spec.kind, &spec.table) {
            (PartitionKind::CustomTable, Some(t)) => {
                validate_table(t)?;
                t.clone()
            }
            (PartitionKind::CustomTable, None) => {
                return bad("custom-table requires `table`".into())
            }
            (_, Some(_)) => return bad("`table` is only allowed for custom-table".into()),
            (_, None) => Vec::new(),
        };
        let anchor = match table.last() {
            Some(&t) => (table.len() as u64, t),
            None => (1, 1.0),
        };
        check_law_monotone(theta, &spec.psi, anchor.0)?;

        let mut partition = Partition {
            spec,
            table,
            anchor,
            n_dec: 1,
        };
        partition.n_dec = partition.scan_eventual_decrease();
        Ok(partition)
    }

    pub fn classical() -> Self {
        Partition::new(PartitionSpec::classical()).expect("classical spec is valid")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Partition::new(serde_json::from_str(json)?)
    }

    pub fn spec(&self) -> &PartitionSpec {
        &self.spec
    }

    pub fn precision(&self) -> u32 {
        self.spec.precision_bits
    }

    pub fn theta(&self) -> f64 {
        self.spec.theta
    }

    pub fn psi(&self) -> &Psi {
        &self.spec.psi
    }

    /// `a_n < a_{n-1}` for every scanned `n > n_dec`.
    pub fn n_dec(&self) -> u64 {
        self.n_dec
    }

    /// True for `t_n = 1/n` (classical kind or the equivalent power spec).
    pub fn is_classical(&self) -> bool {
        self.table.is_empty() && self.spec.theta == 1.0 && self.spec.psi.is_constant()
    }

    /// Whether the tail law beyond the table has a constant slowly varying factor.
    pub fn has_constant_psi(&self) -> bool {
        self.spec.psi.is_constant()
    }

    /// Index where the closed-form law takes over from the explicit table.
    pub fn law_start(&self) -> u64 {
        self.anchor.0
    }

    pub fn check_index(n: u64) -> Result<()> {
        if n == 0 {
            return Err(Error::Domain("partition indices start at 1".into()));
        }
        if n > INDEX_LIMIT {
            return Err(Error::IndexOverflow(format!(
                "index {n} exceeds limit {INDEX_LIMIT}"
            )));
        }
        Ok(())
    }

    pub fn tail(&self, n: u64) -> Result<Float> {
        Self::check_index(n)?;
        Ok(self.tail_prec(n, self.precision()))
    }

    pub fn atom(&self, n: u64) -> Result<Float> {
        Self::check_index(n)?;
        Ok(self.atom_prec(n, self.precision()))
    }

    /// `(t_n, a_n)` at working precision.
    pub fn measures(&self, n: u64) -> Result<(Float, Float)> {
        Ok((self.tail(n)?, self.atom(n)?))
    }

    /// `t_n` rounded to `prec` bits. `n` must be at least 1.
    pub fn tail_prec(&self, n: u64, prec: u32) -> Float {
        debug_assert!(n >= 1);
        if (n as usize) <= self.table.len() {
            return Float::with_val(prec, self.table[n as usize - 1]);
        }
        if self.is_classical() {
            return Float::with_val(prec, n).recip();
        }
        let (a, ta) = self.anchor;
        let w = prec + 16;
        let theta = self.spec.theta;
        let mut t = if a == 1 && theta.fract() == 0.0 && theta <= 2.0 {
            // n^θ is exact in u128 for θ ∈ {1, 2} and n ≤ INDEX_LIMIT + 1
            let pow = (n as u128).pow(theta as u32);
            Float::with_val(w, pow).recip()
        } else {
            let ratio = Float::with_val(w, a) / Float::with_val(w, n);
            ratio.pow(Float::with_val(w, theta))
        };
        t *= ta;
        if !self.spec.psi.is_constant() {
            t *= self.spec.psi.eval(n, w);
            t /= self.spec.psi.eval(a, w);
        }
        Float::with_val(prec, t)
    }

    /// `a_n = t_n - t_{n+1}` rounded to `prec` bits.
    pub fn atom_prec(&self, n: u64, prec: u32) -> Float {
        debug_assert!(n >= 1);
        if self.is_classical() {
            let denom = n as u128 * (n as u128 + 1);
            return Float::with_val(prec, denom).recip();
        }
        let w = prec + GUARD_BITS;
        let diff = self.tail_prec(n, w) - self.tail_prec(n + 1, w);
        Float::with_val(prec, diff)
    }

    /// `ln t_n` in double precision.
    pub fn ln_tail_f64(&self, n: u64) -> f64 {
        if (n as usize) <= self.table.len() {
            return self.table[n as usize - 1].ln();
        }
        self.law_ln_tail(n as f64)
    }

    pub fn tail_f64(&self, n: u64) -> f64 {
        self.ln_tail_f64(n).exp()
    }

    /// `ln a_n` in double precision, computed as `ln t_n + ln(1 - t_{n+1}/t_n)`
    /// with the tail ratio formed in log space, so it stays accurate for huge `n`.
    pub fn ln_atom_f64(&self, n: u64) -> f64 {
        let m = self.table.len() as u64;
        if n < m {
            let i = n as usize - 1;
            return (self.table[i] - self.table[i + 1]).ln();
        }
        if self.is_classical() {
            let nf = n as f64;
            return -(nf.ln() + nf.ln_1p());
        }
        let x = n as f64;
        let step = -self.spec.theta * (1.0 / x).ln_1p() + self.spec.psi.ln_step_f64(x);
        self.law_ln_tail(x) + (-step.exp_m1()).ln()
    }

    pub fn atom_f64(&self, n: u64) -> f64 {
        self.ln_atom_f64(n).exp()
    }

    fn law_ln_tail(&self, x: f64) -> f64 {
        let (a, ta) = self.anchor;
        let a = a as f64;
        ta.ln() + self.spec.theta * (a.ln() - x.ln()) + self.spec.psi.ln_f64(x)
            - self.spec.psi.ln_f64(a)
    }

    /// Approximate index whose tail equals `exp(ln_x)`, by inverting the closed form.
    fn invert_tail(&self, ln_x: f64) -> u64 {
        let m = self.table.len();
        if m > 0 && ln_x >= self.table[m - 1].ln() {
            // inside the explicit table: t_n ≥ x for n ≤ idx
            let idx = self.table.partition_point(|t| t.ln() >= ln_x);
            return idx.max(1) as u64;
        }
        let (a, ta) = self.anchor;
        let af = a as f64;
        let theta = self.spec.theta;
        let ln_limit = (INDEX_LIMIT as f64).ln();
        let ln_n = if theta > 0.0 {
            let base = ta.ln() + theta * af.ln() - self.spec.psi.ln_f64(af) - ln_x;
            let mut ln_n = base / theta;
            for _ in 0..4 {
                let x = ln_n.min(ln_limit + 1.0).exp();
                ln_n = (base + self.spec.psi.ln_f64(x)) / theta;
            }
            ln_n
        } else {
            // reciprocal-log with θ = 0: t_n = t_a ln(a+e) / ln(n+e)
            let c = ta * (af + std::f64::consts::E).ln();
            let y = c / ln_x.exp();
            if y > ln_limit + 1.0 {
                ln_limit + 1.0
            } else {
                (y.exp() - std::f64::consts::E).max(1.0).ln()
            }
        };
        if !ln_n.is_finite() || ln_n > ln_limit {
            return INDEX_LIMIT;
        }
        (ln_n.exp().floor() as u64).clamp(1, INDEX_LIMIT)
    }

    /// Largest `n` with `pred(n)` true, given that `pred` is true exactly on an
    /// initial segment `1..=n*` and `pred(1)` holds. Gallops from `guess`.
    fn last_true(&self, guess: u64, pred: impl Fn(u64) -> bool) -> Result<u64> {
        let overflow = || Error::IndexOverflow(format!("atom index exceeds limit {INDEX_LIMIT}"));
        let (mut lo, mut hi);
        if pred(guess) {
            lo = guess;
            let mut step = 1u64;
            loop {
                let next = lo.checked_add(step).ok_or_else(overflow)?;
                if next > INDEX_LIMIT + 1 {
                    if pred(INDEX_LIMIT + 1) {
                        return Err(overflow());
                    }
                    hi = INDEX_LIMIT + 1;
                    break;
                }
                if pred(next) {
                    lo = next;
                    step *= 2;
                } else {
                    hi = next;
                    break;
                }
            }
        } else {
            hi = guess;
            let mut step = 1u64;
            loop {
                let next = hi.saturating_sub(step).max(1);
                if pred(next) {
                    lo = next;
                    break;
                }
                hi = next;
                step *= 2;
            }
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if pred(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    /// The unique `n` with `t_{n+1} < x ≤ t_n`.
    pub fn locate_atom(&self, x: &Float) -> Result<u64> {
        if x.is_nan() || *x <= 0 || *x > 1 {
            return Err(Error::Domain(format!(
                "locate_atom needs 0 < x <= 1, got {}",
                x.to_f64()
            )));
        }
        // Same precision as the partition's own tails, so `locate_atom(t_n) == n`.
        let prec = x.prec().max(self.precision());
        let guess = self.invert_tail(x.clone().ln().to_f64());
        self.last_true(guess, |n| *x <= self.tail_prec(n, prec))
    }

    /// Double-precision variant of [`locate_atom`](Self::locate_atom).
    pub fn locate_atom_f64(&self, x: f64) -> Result<u64> {
        if !(x > 0.0 && x <= 1.0) {
            return Err(Error::Domain(format!(
                "locate_atom needs 0 < x <= 1, got {x}"
            )));
        }
        let ln_x = x.ln();
        let guess = self.invert_tail(ln_x);
        self.last_true(guess, |n| ln_x <= self.ln_tail_f64(n))
    }

    pub fn asymptotic_report(&self, indices: &[u64]) -> Result<AsymptoticReport> {
        if indices.is_empty() {
            return Err(Error::Domain(
                "asymptotic_report needs at least one index".into(),
            ));
        }
        let prec = self.precision();
        let rows = indices
            .iter()
            .map(|&n| {
                Self::check_index(n)?;
                let t = self.tail_prec(n, prec);
                let a = self.atom_prec(n, prec);
                let a_next = self.atom_prec(n + 1, prec);
                let tail_ratio = Float::with_val(prec, &a * n) / &t;
                let atom_ratio = Float::with_val(prec, &a / &a_next);
                Ok(AsymptoticRow {
                    n,
                    tail: t.to_f64(),
                    atom: a.to_f64(),
                    tail_ratio: tail_ratio.to_f64(),
                    atom_ratio: atom_ratio.to_f64(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AsymptoticReport { rows })
    }

    /// Exact `t_n` when the partition is classical.
    pub fn exact_tail(&self, n: u64) -> Option<Rational> {
        (self.is_classical() && n >= 1).then(|| Rational::from((1u64, n)))
    }

    /// Exact `a_n` when the partition is classical.
    pub fn exact_atom(&self, n: u64) -> Option<Rational> {
        (self.is_classical() && n >= 1)
            .then(|| Rational::from((1u64, n)) - Rational::from((1u64, n + 1)))
    }

    fn scan_eventual_decrease(&self) -> u64 {
        if self.table.is_empty() && self.spec.psi.is_constant() {
            // n^{-θ} is convex
            return 1;
        }
        let end = self.table.len() as u64 + DECREASE_SCAN;
        let mut n_dec = 1;
        let mut prev = self.ln_atom_f64(1);
        for n in 2..=end {
            let cur = self.ln_atom_f64(n);
            if cur >= prev {
                n_dec = n;
            }
            prev = cur;
        }
        n_dec
    }
}

fn validate_table(t: &[f64]) -> Result<()> {
    let bad = |msg: &str| Err(Error::InvalidPartition(msg.into()));
    if t.is_empty() {
        return bad("custom table is empty");
    }
    if t[0] != 1.0 {
        return bad("custom table must start at t_1 = 1");
    }
    if t.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return bad("custom table entries must be finite and positive");
    }
    if t.windows(2).any(|w| w[1] >= w[0]) {
        return bad("custom table tails must be strictly decreasing");
    }
    Ok(())
}

/// Rejects tail laws that are not strictly decreasing from `start` on.
fn check_law_monotone(theta: f64, psi: &Psi, start: u64) -> Result<()> {
    let beta = match psi {
        Psi::LogPower { beta } if *beta > 0.0 => *beta,
        _ => return Ok(()),
    };
    // d/dx ln t(x) < 0  ⇔  β x < θ (x+1) ln(x+1); the right side over x is increasing.
    let h = |x: f64| (x + 1.0) * x.ln_1p() / x;
    let mut x = 1.0f64;
    while theta * h(x) <= beta {
        x *= 2.0;
        if x > MONOTONE_CHECK_LIMIT as f64 {
            return Err(Error::InvalidPartition(format!(
                "log-power tails with beta = {beta}, theta = {theta} are not decreasing below {MONOTONE_CHECK_LIMIT}"
            )));
        }
    }
    for n in start..=(x as u64).max(start) {
        let nf = n as f64;
        let step = -theta * (1.0 / nf).ln_1p() + psi.ln_step_f64(nf);
        if step >= 0.0 {
            return Err(Error::InvalidPartition(format!(
                "tails are not strictly decreasing at n = {n} (atom would be nonpositive)"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(x: f64) -> Float {
        Float::with_val(128, x)
    }

    #[test]
    fn classical_measures() {
        let p = Partition::classical();
        let (t, a) = p.measures(1).unwrap();
        assert_eq!(t, 1);
        assert_eq!(a, 0.5);
        let (t, a) = p.measures(2).unwrap();
        assert_eq!(t, 0.5);
        let sixth = Float::with_val(128, 6).recip();
        assert_eq!(a, sixth);
    }

    #[test]
    fn power_half_first_atom() {
        let p = Partition::new(PartitionSpec::power(0.5, Psi::default())).unwrap();
        let a1 = p.atom(1).unwrap();
        let expected = Float::with_val(128, 1) - Float::with_val(128, 2).sqrt().recip();
        let err = Float::with_val(128, &a1 - &expected).abs();
        assert!(err < Float::with_val(128, -120f64).exp2());
    }

    #[test]
    fn theta_two_tenth_index() {
        let p = Partition::new(PartitionSpec::power(2.0, Psi::default())).unwrap();
        let (t, a) = p.measures(10).unwrap();
        assert_eq!(t, Float::with_val(128, 100).recip());
        let expected = Float::with_val(128, 100).recip() - Float::with_val(128, 121).recip();
        let err = Float::with_val(128, &a - &expected).abs();
        assert!(err <= Float::with_val(128, a.get_exp().unwrap() - 126).exp2());
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(Partition::new(PartitionSpec::power(0.0, Psi::default())).is_err());
        assert!(Partition::new(PartitionSpec::power(-1.0, Psi::default())).is_err());
        assert!(Partition::new(PartitionSpec::custom_table(
            vec![1.0, 0.5, 0.6],
            1.0,
            Psi::default()
        ))
        .is_err());
        assert!(Partition::new(PartitionSpec::custom_table(
            vec![0.9, 0.5],
            1.0,
            Psi::default()
        ))
        .is_err());
        assert!(Partition::new(PartitionSpec::power(0.5, Psi::LogPower { beta: 50.0 })).is_err());
        assert!(Partition::new(PartitionSpec::classical().with_precision(8)).is_err());
        let mut s = PartitionSpec::classical();
        s.theta = 2.0;
        assert!(Partition::new(s).is_err());
    }

    #[test]
    fn theta_zero_needs_reciprocal_log() {
        let p = Partition::new(PartitionSpec::power(0.0, Psi::ReciprocalLog)).unwrap();
        assert_eq!(p.tail(1).unwrap(), 1);
        assert!(p.atom(1).unwrap() > 0);
        assert!(p.tail(1_000_000).unwrap() < p.tail(1000).unwrap());
    }

    #[test]
    fn index_domain() {
        let p = Partition::classical();
        assert!(matches!(p.tail(0), Err(Error::Domain(_))));
        assert!(matches!(
            p.atom(INDEX_LIMIT + 1),
            Err(Error::IndexOverflow(_))
        ));
        assert!(p.tail(1_000_000_000).is_ok());
    }

    #[test]
    fn locate_examples() {
        let p = Partition::classical();
        assert_eq!(p.locate_atom(&f(0.5)).unwrap(), 2);
        assert_eq!(p.locate_atom(&f(1.0)).unwrap(), 1);
        assert_eq!(p.locate_atom(&f(0.26)).unwrap(), 3);
        assert!(p.locate_atom(&f(0.0)).is_err());
        assert!(p.locate_atom(&f(1.5)).is_err());
        assert_eq!(p.locate_atom_f64(0.26).unwrap(), 3);
        assert_eq!(p.locate_atom(&f(1e-12)).unwrap(), 1_000_000_000_000);
    }

    #[test]
    fn locate_boundaries_are_right_closed() {
        let p = Partition::classical();
        let eps = Float::with_val(128, -100f64).exp2();
        for n in 2..1000u64 {
            let t = p.tail(n).unwrap();
            assert_eq!(p.locate_atom(&t).unwrap(), n);
            let above = Float::with_val(128, &t + &eps);
            assert_eq!(p.locate_atom(&above).unwrap(), n - 1);
        }
    }

    #[test]
    fn locate_other_families() {
        let specs = [
            PartitionSpec::power(0.5, Psi::default()),
            PartitionSpec::power(2.0, Psi::LogPower { beta: 1.5 }),
            PartitionSpec::power(0.0, Psi::ReciprocalLog),
            PartitionSpec::custom_table(vec![1.0, 0.7, 0.6, 0.3], 1.0, Psi::default()),
        ];
        for spec in specs {
            let p = Partition::new(spec).unwrap();
            for n in [1u64, 2, 3, 4, 5, 17, 1000, 123_456] {
                let t = p.tail(n).unwrap();
                let t_next = p.tail(n + 1).unwrap();
                let mid = Float::with_val(128, &t + &t_next) / 2;
                assert_eq!(p.locate_atom(&mid).unwrap(), n, "{:?} n={n}", p.spec());
                assert_eq!(p.locate_atom(&t).unwrap(), n);
            }
        }
    }

    #[test]
    fn table_continuation_is_power_law() {
        let p = Partition::new(PartitionSpec::custom_table(
            vec![1.0, 0.7, 0.6, 0.3],
            1.0,
            Psi::default(),
        ))
        .unwrap();
        assert_eq!(p.tail(3).unwrap(), 0.6);
        // t_8 = t_4 * 4/8
        let t8 = p.tail(8).unwrap().to_f64();
        assert!((t8 - 0.15).abs() < 1e-15);
        assert!((p.atom_f64(2) - 0.1).abs() < 1e-15);
        assert!((p.atom_f64(4) - (0.3 - 0.24)).abs() < 1e-15);
    }

    #[test]
    fn f64_atoms_agree_with_high_precision() {
        let specs = [
            PartitionSpec::classical(),
            PartitionSpec::power(0.5, Psi::default()),
            PartitionSpec::power(1.0, Psi::LogPower { beta: 1.0 }),
            PartitionSpec::power(0.0, Psi::ReciprocalLog),
        ];
        for spec in specs {
            let p = Partition::new(spec).unwrap();
            for n in [1u64, 2, 10, 999, 1_000_000, 1_000_000_000_000] {
                let hp = p.atom(n).unwrap().to_f64();
                let lo = p.atom_f64(n);
                assert!(
                    ((hp - lo) / hp).abs() < 1e-12,
                    "{:?} n={n}: {hp} vs {lo}",
                    p.spec()
                );
            }
        }
    }

    #[test]
    fn exact_mode_is_classical_only() {
        let p = Partition::classical();
        assert_eq!(p.exact_atom(2).unwrap(), Rational::from((1, 6)));
        assert_eq!(p.exact_tail(3).unwrap(), Rational::from((1, 3)));
        let q = Partition::new(PartitionSpec::power(2.0, Psi::default())).unwrap();
        assert!(q.exact_tail(2).is_none());
    }

    #[test]
    fn spec_json_shape() {
        let json = r#"{"kind":"power","theta":1.0,"psi":{"type":"constant","c":1.0},"precision_bits":128}"#;
        let spec: PartitionSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec, PartitionSpec::power(1.0, Psi::default()));
        assert_eq!(serde_json::to_string(&spec).unwrap(), json);
        let p = Partition::from_json(
            r#"{"kind":"power","theta":0.5,"psi":{"type":"log-power","beta":0.5}}"#,
        )
        .unwrap();
        assert_eq!(p.precision(), DEFAULT_PRECISION);
    }

    #[test]
    fn asymptotic_examples() {
        let p = Partition::classical();
        let r = p.asymptotic_report(&[10, 10_000]).unwrap();
        assert!((r.rows[0].tail_ratio - 10.0 / 11.0).abs() < 1e-15);
        assert!((r.rows[1].tail_ratio - 1.0).abs() < 1e-3);
        let q = Partition::new(PartitionSpec::power(2.0, Psi::default())).unwrap();
        let r = q.asymptotic_report(&[10_000]).unwrap();
        assert!((r.rows[0].tail_ratio - 2.0).abs() < 1e-3);
        assert!(p.asymptotic_report(&[]).is_err());
    }

    #[test]
    fn eventual_decrease_reported() {
        assert_eq!(Partition::classical().n_dec(), 1);
        let p = Partition::new(PartitionSpec::custom_table(
            vec![1.0, 0.9, 0.5, 0.45],
            1.0,
            Psi::default(),
        ))
        .unwrap();
        // a_1 = 0.1 < a_2 = 0.4 breaks monotonicity at n = 2
        assert!(p.n_dec() >= 2);
        for n in p.n_dec() + 1..p.n_dec() + 1000 {
            assert!(p.atom_f64(n) < p.atom_f64(n - 1));
        }
    }
}
