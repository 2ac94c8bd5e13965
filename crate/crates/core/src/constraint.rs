//! Digit-constraint models: per-level admissible digit ranges, membership and
//! seeded sampling for the Good, band, envelope and Jarník families.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::codec::DigitSequence;
use crate::error::{Error, Result};
use crate::partition::{Partition, INDEX_LIMIT};

/// `s_n` for the Jarník model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SequenceSpec {
    /// `s_n = b^n`
    Geometric { base: u64 },
    /// `s_n = b^(2^n)`
    DoublyExponential { base: u64 },
    /// `s_n = n + c`
    Polynomial {
        #[serde(default)]
        c: u64,
    },
    /// Explicit `s_1, s_2, …`. Levels past the end of the list continue
    /// geometrically with the ratio of the last two entries (floored at each
    /// step); a single entry repeats forever.
    Custom { values: Vec<u64> },
}

impl SequenceSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            SequenceSpec::Geometric { base } | SequenceSpec::DoublyExponential { base }
                if *base < 2 =>
            {
                Err(Error::InvalidModel(format!(
                    "sequence base must be >= 2, got {base}"
                )))
            }
            SequenceSpec::Custom { values } if values.is_empty() => {
                Err(Error::InvalidModel("custom sequence is empty".into()))
            }
            SequenceSpec::Custom { values } if values.contains(&0) => Err(Error::InvalidModel(
                "custom sequence entries must be >= 1".into(),
            )),
            _ => Ok(()),
        }
    }

    /// `ln s_n`, finite even when `s_n` itself overflows `u64`.
    pub fn ln_s(&self, n: u64) -> f64 {
        match self {
            SequenceSpec::Geometric { base } => n as f64 * (*base as f64).ln(),
            SequenceSpec::DoublyExponential { base } => (n as f64).exp2() * (*base as f64).ln(),
            SequenceSpec::Polynomial { c } => ((n + c) as f64).ln(),
            SequenceSpec::Custom { values } => {
                let len = values.len() as u64;
                if n <= len {
                    return (values[n as usize - 1] as f64).ln();
                }
                match self.value(n) {
                    Ok(v) => (v as f64).ln(),
                    Err(_) => {
                        let last = values[values.len() - 1] as f64;
                        let prev = if len > 1 {
                            values[values.len() - 2] as f64
                        } else {
                            last
                        };
                        last.ln() + (n - len) as f64 * (last / prev).ln()
                    }
                }
            }
        }
    }

    /// `s_n` as an integer; `IndexOverflow` past the supported index limit.
    pub fn value(&self, n: u64) -> Result<u64> {
        if n == 0 {
            return Err(Error::Domain("sequence levels start at 1".into()));
        }
        let overflow = || Error::IndexOverflow(format!("s_{n} exceeds {INDEX_LIMIT}"));
        let v = match self {
            SequenceSpec::Geometric { base } => {
                let e = u32::try_from(n).map_err(|_| overflow())?;
                base.checked_pow(e).ok_or_else(overflow)?
            }
            SequenceSpec::DoublyExponential { base } => {
                if n >= 64 {
                    return Err(overflow());
                }
                let e = u32::try_from(1u64 << n).map_err(|_| overflow())?;
                base.checked_pow(e).ok_or_else(overflow)?
            }
            SequenceSpec::Polynomial { c } => n.checked_add(*c).ok_or_else(overflow)?,
            SequenceSpec::Custom { values } => {
                let len = values.len() as u64;
                if n <= len {
                    values[n as usize - 1]
                } else {
                    let last = values[values.len() - 1] as u128;
                    let prev = if len > 1 {
                        values[values.len() - 2] as u128
                    } else {
                        last
                    };
                    let mut v = last;
                    for _ in len..n {
                        v = v * last / prev;
                        if v > INDEX_LIMIT as u128 {
                            return Err(overflow());
                        }
                    }
                    v as u64
                }
            }
        };
        if v > INDEX_LIMIT {
            return Err(overflow());
        }
        Ok(v)
    }

    /// `τ = limsup log s_{n+1} / log(s_1⋯s_n)` when it has a closed form.
    pub fn analytic_tau(&self) -> Option<f64> {
        match self {
            SequenceSpec::Geometric { .. } | SequenceSpec::Polynomial { .. } => Some(0.0),
            SequenceSpec::DoublyExponential { .. } => Some(1.0),
            SequenceSpec::Custom { .. } => None,
        }
    }
}

/// Lower envelope `f` of the envelope model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EnvelopeF {
    /// `f(n) = c + floor(log2(n + 1))`; `c` is chosen per partition when omitted.
    Log2 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<u64>,
    },
    /// `f(n) = values[n-1]`, constant past the end.
    Table { values: Vec<u64> },
}

impl Default for EnvelopeF {
    fn default() -> Self {
        EnvelopeF::Log2 { c: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandRule {
    Minimal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BandUpper {
    Value(u64),
    Rule(BandRule),
}

fn default_n_factor() -> u64 {
    4
}

fn default_eps() -> f64 {
    0.1
}

/// JSON form of a model, e.g. `{"kind":"goodband","N":100,"M":"minimal"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    Goodset {
        #[serde(rename = "N")]
        n: u64,
        /// Levels `1..=free_prefix` are unconstrained (the `G_{N,n_0}` supersets).
        #[serde(default)]
        free_prefix: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sample_cap: Option<u64>,
    },
    Goodband {
        #[serde(rename = "N")]
        n: u64,
        #[serde(rename = "M")]
        m: BandUpper,
    },
    Envelope {
        #[serde(default)]
        f: EnvelopeF,
        #[serde(default = "default_eps")]
        eps: f64,
    },
    Jarnik {
        s: SequenceSpec,
        #[serde(rename = "N", default = "default_n_factor")]
        n_factor: u64,
    },
}

/// Closed digit range `lo..=hi`; `hi = None` is unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DigitRange {
    pub lo: u64,
    pub hi: Option<u64>,
}

impl DigitRange {
    pub fn contains(&self, d: u64) -> bool {
        d >= self.lo && self.hi.is_none_or(|h| d <= h)
    }

    pub fn count(&self) -> Option<u64> {
        self.hi.map(|h| h - self.lo + 1)
    }
}

impl fmt::Display for DigitRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hi {
            Some(h) => write!(f, "[{}, {}]", self.lo, h),
            None => write!(f, "[{}, inf)", self.lo),
        }
    }
}

/// `Σ_{i=a}^{b} 1/i` in `f64`.
pub fn harmonic_segment(a: u64, b: u64) -> f64 {
    if b < a {
        return 0.0;
    }
    if b - a < 100_000 {
        // small terms first
        return (a..=b).rev().map(|i| 1.0 / i as f64).sum();
    }
    // H(m) - ln m - γ by its asymptotic series
    let corr = |m: f64| 1.0 / (2.0 * m) - 1.0 / (12.0 * m * m) + 1.0 / (120.0 * m.powi(4));
    let am = (a - 1) as f64;
    ((b - a + 1) as f64 / am).ln_1p() + corr(b as f64) - corr(am)
}

const EXACT_HARMONIC_LIMIT: u64 = 3000;

/// Least `M ≥ N` with `Σ_{i=N}^{M} 1/i > 1`.
pub fn minimal_band_upper(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidModel("band lower end must be >= 1".into()));
    }
    if n <= EXACT_HARMONIC_LIMIT {
        let mut sum = Rational::new();
        let mut m = n;
        loop {
            sum += Rational::from((1u64, m));
            if sum > 1 {
                return Ok(m);
            }
            m += 1;
        }
    }
    let guess = ((n - 1) as f64 * std::f64::consts::E).floor();
    if guess.is_nan() || guess >= (INDEX_LIMIT - 10) as f64 {
        return Err(Error::IndexOverflow(format!(
            "minimal M for N = {n} exceeds {INDEX_LIMIT}"
        )));
    }
    let mut m = (guess as u64).saturating_sub(4).max(n);
    while harmonic_segment(n, m) <= 1.0 {
        m += 1;
    }
    while m > n && harmonic_segment(n, m - 1) > 1.0 {
        m -= 1;
    }
    Ok(m)
}

/// Per-level window of the envelope model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnvelopeLevel {
    pub f: u64,
    pub g: u64,
    /// `S_n = Σ_{i=f(n)}^{g(n)} 1/i`
    pub s: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    GoodSet {
        n: u64,
        free_prefix: u64,
        sample_cap: Option<u64>,
    },
    GoodBand {
        n: u64,
        m: u64,
        s: f64,
    },
    Envelope {
        f: EnvelopeF,
        c: Option<u64>,
        eps: f64,
    },
    Jarnik {
        s: SequenceSpec,
        n_factor: u64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintModel {
    kind: ModelKind,
    /// Envelope levels `1..=len`, precomputed.
    envelope_cache: Vec<EnvelopeLevel>,
}

const ENVELOPE_CACHE: u64 = 64;
const ENVELOPE_C_MIN: u64 = 8;

impl ConstraintModel {
    pub fn good_set(n: u64) -> Result<Self> {
        Self::build(
            ModelSpec::Goodset {
                n,
                free_prefix: 0,
                sample_cap: None,
            },
            None,
        )
    }

    pub fn good_band(n: u64, m: u64) -> Result<Self> {
        Self::build(
            ModelSpec::Goodband {
                n,
                m: BandUpper::Value(m),
            },
            None,
        )
    }

    pub fn good_band_minimal(n: u64) -> Result<Self> {
        Self::build(
            ModelSpec::Goodband {
                n,
                m: BandUpper::Rule(BandRule::Minimal),
            },
            None,
        )
    }

    pub fn jarnik(s: SequenceSpec, n_factor: u64) -> Result<Self> {
        Self::build(ModelSpec::Jarnik { s, n_factor }, None)
    }

    /// Envelope model; `c` of a `Log2` envelope is fitted to `p` when not given.
    pub fn envelope(f: EnvelopeF, eps: f64, p: &Partition) -> Result<Self> {
        Self::build(ModelSpec::Envelope { f, eps }, Some(p))
    }

    pub fn from_json(json: &str, p: &Partition) -> Result<Self> {
        let spec: ModelSpec = serde_json::from_str(json)
            .map_err(|e| Error::InvalidModel(format!("bad model JSON: {e}")))?;
        Self::build(spec, Some(p))
    }

    /// Validates `spec`; the partition is only consulted to fit the envelope constant.
    pub fn build(spec: ModelSpec, p: Option<&Partition>) -> Result<Self> {
        let kind = match spec {
            ModelSpec::Goodset {
                n,
                free_prefix,
                sample_cap,
            } => {
                if n == 0 || n >= INDEX_LIMIT {
                    return Err(Error::InvalidModel(format!(
                        "GoodSet needs 1 <= N < {INDEX_LIMIT}"
                    )));
                }
                if let Some(cap) = sample_cap {
                    if cap <= n || cap > INDEX_LIMIT {
                        return Err(Error::InvalidModel(format!(
                            "sample_cap {cap} must exceed N = {n}"
                        )));
                    }
                }
                ModelKind::GoodSet {
                    n,
                    free_prefix,
                    sample_cap,
                }
            }
            ModelSpec::Goodband { n, m } => {
                if n == 0 {
                    return Err(Error::InvalidModel("GoodBand needs N >= 1".into()));
                }
                let m = match m {
                    BandUpper::Value(m) => m,
                    BandUpper::Rule(BandRule::Minimal) => minimal_band_upper(n)?,
                };
                if m < n || m > INDEX_LIMIT {
                    return Err(Error::InvalidModel(format!(
                        "GoodBand needs N <= M <= {INDEX_LIMIT}, got ({n}, {m})"
                    )));
                }
                ModelKind::GoodBand {
                    n,
                    m,
                    s: harmonic_segment(n, m),
                }
            }
            ModelSpec::Envelope { f, eps } => {
                if !(eps.is_finite() && eps > 0.0) {
                    return Err(Error::InvalidModel(format!(
                        "envelope eps must be > 0, got {eps}"
                    )));
                }
                let c = match &f {
                    EnvelopeF::Log2 { c: Some(c) } => {
                        if *c == 0 {
                            return Err(Error::InvalidModel(
                                "envelope constant must be >= 1".into(),
                            ));
                        }
                        Some(*c)
                    }
                    EnvelopeF::Log2 { c: None } => {
                        let p = p.ok_or_else(|| {
                            Error::InvalidModel(
                                "fitting the envelope constant needs a partition".into(),
                            )
                        })?;
                        Some(fit_envelope_c(p, eps)?)
                    }
                    EnvelopeF::Table { values } => {
                        if values.is_empty() || values.contains(&0) {
                            return Err(Error::InvalidModel(
                                "envelope table needs entries >= 1".into(),
                            ));
                        }
                        if values.windows(2).any(|w| w[1] < w[0]) {
                            return Err(Error::InvalidModel(
                                "envelope f must be nondecreasing".into(),
                            ));
                        }
                        None
                    }
                };
                ModelKind::Envelope { f, c, eps }
            }
            ModelSpec::Jarnik { s, n_factor } => {
                s.validate()?;
                if n_factor <= 3 {
                    return Err(Error::InvalidModel(format!(
                        "Jarnik needs N > 3, got {n_factor}"
                    )));
                }
                ModelKind::Jarnik { s, n_factor }
            }
        };
        let mut model = ConstraintModel {
            kind,
            envelope_cache: Vec::new(),
        };
        if matches!(model.kind, ModelKind::Envelope { .. }) {
            model.envelope_cache = (1..=ENVELOPE_CACHE)
                .map(|n| model.compute_envelope_level(n))
                .collect::<Result<_>>()?;
        }
        Ok(model)
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    /// The model as JSON-ready spec, with derived parameters (M, c) resolved.
    pub fn spec(&self) -> ModelSpec {
        match &self.kind {
            ModelKind::GoodSet {
                n,
                free_prefix,
                sample_cap,
            } => ModelSpec::Goodset {
                n: *n,
                free_prefix: *free_prefix,
                sample_cap: *sample_cap,
            },
            ModelKind::GoodBand { n, m, .. } => ModelSpec::Goodband {
                n: *n,
                m: BandUpper::Value(*m),
            },
            ModelKind::Envelope { f, c, eps } => ModelSpec::Envelope {
                f: match f {
                    EnvelopeF::Log2 { .. } => EnvelopeF::Log2 { c: *c },
                    t => t.clone(),
                },
                eps: *eps,
            },
            ModelKind::Jarnik { s, n_factor } => ModelSpec::Jarnik {
                s: s.clone(),
                n_factor: *n_factor,
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.spec()).expect("model spec serializes")
    }

    /// Digits must be nondecreasing (only the envelope model).
    pub fn monotone_coupling(&self) -> bool {
        matches!(self.kind, ModelKind::Envelope { .. })
    }

    /// Every level has the same range, so cover sums factor as a power.
    pub fn is_level_homogeneous(&self) -> bool {
        match self.kind {
            ModelKind::GoodSet { free_prefix, .. } => free_prefix == 0,
            ModelKind::GoodBand { .. } => true,
            _ => false,
        }
    }

    pub fn is_jarnik(&self) -> bool {
        matches!(self.kind, ModelKind::Jarnik { .. })
    }

    /// `S = Σ_{i=N}^{M} 1/i` for the band model.
    pub fn band_sum(&self) -> Option<f64> {
        match self.kind {
            ModelKind::GoodBand { s, .. } => Some(s),
            _ => None,
        }
    }

    fn envelope_f(&self, n: u64) -> u64 {
        match &self.kind {
            ModelKind::Envelope {
                f: EnvelopeF::Table { values },
                ..
            } => values[(n.min(values.len() as u64) - 1) as usize],
            ModelKind::Envelope { c, .. } => {
                c.expect("log2 envelope has c") + (n + 1).ilog2() as u64
            }
            _ => unreachable!("not an envelope model"),
        }
    }

    fn compute_envelope_level(&self, n: u64) -> Result<EnvelopeLevel> {
        let f = self.envelope_f(n);
        let g = minimal_band_upper(f)?;
        Ok(EnvelopeLevel {
            f,
            g,
            s: harmonic_segment(f, g),
        })
    }

    /// `(f(n), g(n), S_n)` of the envelope model.
    pub fn envelope_level(&self, n: u64) -> Result<EnvelopeLevel> {
        if !matches!(self.kind, ModelKind::Envelope { .. }) {
            return Err(Error::InvalidModel("not an envelope model".into()));
        }
        if n == 0 {
            return Err(Error::Domain("levels start at 1".into()));
        }
        match self.envelope_cache.get(n as usize - 1) {
            Some(l) => Ok(*l),
            None => self.compute_envelope_level(n),
        }
    }

    /// Admissible digits at `level` (1-based).
    pub fn admissible_range(&self, level: u64) -> Result<DigitRange> {
        if level == 0 {
            return Err(Error::Domain("levels start at 1".into()));
        }
        Ok(match &self.kind {
            ModelKind::GoodSet { n, free_prefix, .. } => DigitRange {
                lo: if level <= *free_prefix { 1 } else { n + 1 },
                hi: None,
            },
            ModelKind::GoodBand { n, m, .. } => DigitRange {
                lo: *n,
                hi: Some(*m),
            },
            ModelKind::Envelope { .. } => {
                let l = self.envelope_level(level)?;
                DigitRange {
                    lo: l.f,
                    hi: Some(l.g),
                }
            }
            ModelKind::Jarnik { s, n_factor } => {
                let lo = s.value(level)?;
                let hi = lo
                    .checked_mul(*n_factor)
                    .filter(|h| *h <= INDEX_LIMIT + 1)
                    .ok_or_else(|| {
                        Error::IndexOverflow(format!("N s_{level} exceeds {INDEX_LIMIT}"))
                    })?;
                DigitRange {
                    lo,
                    hi: Some(hi - 1),
                }
            }
        })
    }

    /// `s_{k+1}` for the Jarník tilde cover at level `k`.
    pub fn tilde_next(&self, k: u64) -> Result<Option<u64>> {
        match &self.kind {
            ModelKind::Jarnik { s, .. } => s.value(k + 1).map(Some),
            _ => Ok(None),
        }
    }

    pub fn contains(&self, digits: &[u64]) -> bool {
        if digits.is_empty() {
            return false;
        }
        if self.monotone_coupling() && digits.windows(2).any(|w| w[1] < w[0]) {
            return false;
        }
        digits.iter().enumerate().all(|(i, &d)| {
            self.admissible_range(i as u64 + 1)
                .map(|r| r.contains(d))
                .unwrap_or(false)
        })
    }

    /// Seeded draw of an admissible prefix of length `depth`.
    pub fn sample_digits(&self, depth: usize, seed: u64) -> Result<DigitSequence> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(depth, &mut rng)
    }

    pub fn sample_with<R: Rng>(&self, depth: usize, rng: &mut R) -> Result<DigitSequence> {
        if depth == 0 {
            return Err(Error::Sampling("depth must be >= 1".into()));
        }
        let mut digits = Vec::with_capacity(depth);
        for level in 1..=depth as u64 {
            let r = self.admissible_range(level)?;
            let mut lo = r.lo;
            if self.monotone_coupling() {
                if let Some(&prev) = digits.last() {
                    lo = lo.max(prev);
                }
            }
            let hi = match (r.hi, &self.kind) {
                (Some(h), _) => h,
                (
                    None,
                    ModelKind::GoodSet {
                        sample_cap: Some(cap),
                        ..
                    },
                ) => *cap,
                (None, _) => {
                    return Err(Error::Sampling(
                        "unbounded digit range needs a sample_cap".into(),
                    ));
                }
            };
            if lo > hi {
                return Err(Error::Sampling(format!(
                    "empty admissible range [{lo}, {hi}] at level {level}"
                )));
            }
            digits.push(rng.gen_range(lo..=hi));
        }
        DigitSequence::truncated(digits)
    }
}

/// Least `c >= 8` with `a_l >= l^{-(1+θ+ε)}` for all `l >= c + 1`, checked
/// densely near the start and on a geometric grid up to `10^15`.
fn fit_envelope_c(p: &Partition, eps: f64) -> Result<u64> {
    let expo = 1.0 + p.theta() + eps;
    let ok = |l: u64| p.ln_atom_f64(l) + expo * (l as f64).ln() >= 0.0;
    let mut last_bad: Option<u64> = None;
    let dense_end = 100_000u64;
    for l in 1..=dense_end {
        if !ok(l) {
            last_bad = Some(l);
        }
    }
    let mut l = dense_end as f64;
    let mut grid_end_bad = false;
    while l < 1e15 {
        let li = l as u64;
        if !ok(li) {
            last_bad = Some(li);
            grid_end_bad = l * 1.01 >= 1e15;
        }
        l *= 1.01;
    }
    if grid_end_bad {
        return Err(Error::InvalidModel(format!(
            "no envelope constant makes a_l >= l^-{expo} eventually (eps = {eps})"
        )));
    }
    // a grid failure only bounds the last bad index from below; step past it
    Ok(last_bad.map_or(ENVELOPE_C_MIN, |b| {
        if b > dense_end {
            (b as f64 * 1.01).ceil() as u64
        } else {
            b
        }
        .max(ENVELOPE_C_MIN)
    }))
}
