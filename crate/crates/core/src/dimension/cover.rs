use serde::Serialize;
use statrs::function::gamma::checked_gamma_ui;

use super::Neumaier;
use crate::constraint::{ConstraintModel, DigitRange};
use crate::error::{Error, Result};
use crate::partition::{Partition, INDEX_LIMIT};

/// Terms summed one by one before switching to blocks.
pub const DIRECT_TERMS: u64 = 4096;
/// Blocks past the direct part span about `ℓ/BLOCK_DIVISOR` indices.
const BLOCK_DIVISOR: u64 = 256;
const TAIL_CUTOFF_MIN: u64 = 1_000_000;

/// Per-level factor `Σ_{ℓ ∈ range} a_ℓ^s`, in log space.
#[derive(Clone, Debug, Serialize)]
pub struct LevelFactor {
    pub level: u64,
    pub lo: u64,
    pub hi: Option<u64>,
    pub ln_value: f64,
    pub ln_lower: f64,
    pub ln_upper: f64,
    /// False when an uncertified tail estimate entered the bounds.
    pub certified: bool,
}

/// `Σ λ(C)^s` over the admissible level-`k` cylinders.
#[derive(Clone, Debug, Serialize)]
pub struct CoverSum {
    pub s: f64,
    pub k: u64,
    pub tilde: bool,
    pub ln_value: f64,
    pub ln_lower: f64,
    pub ln_upper: f64,
    pub certified: bool,
    pub factors: Vec<LevelFactor>,
}

impl CoverSum {
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }
}

/// Simpson-weighted run of `count = 2·half + 1` consecutive indices.
#[derive(Clone, Debug)]
struct Block {
    count: f64,
    half: f64,
    /// `ln a` at the first, middle and last index.
    ln_a: [f64; 3],
}

/// Data for the infinite remainder `Σ_{ℓ > cutoff} a_ℓ^s`.
#[derive(Clone, Debug)]
struct TailLaw {
    cutoff: u64,
    ln_t_next: f64,
    ln_t_cut: f64,
    ln_a_cut: f64,
    theta: f64,
    log_exponent: f64,
    constant_psi: bool,
}

#[derive(Clone, Debug)]
struct LevelTable {
    range: DigitRange,
    direct: Vec<f64>,
    blocks: Vec<Block>,
    tail: Option<TailLaw>,
    ln_max: f64,
}

struct Factor {
    ln_value: f64,
    ln_lower: f64,
    ln_upper: f64,
    certified: bool,
}

impl LevelTable {
    fn new(p: &Partition, range: DigitRange) -> Result<Self> {
        let lo = range.lo;
        let (end, tail) = match range.hi {
            Some(h) => (h, None),
            None => {
                let cutoff = TAIL_CUTOFF_MIN
                    .max((lo - 1).saturating_mul(100))
                    .max(p.law_start())
                    .max(lo.saturating_add(DIRECT_TERMS));
                if cutoff >= INDEX_LIMIT {
                    return Err(Error::IndexOverflow(format!(
                        "tail cutoff for digits >= {lo} exceeds {INDEX_LIMIT}"
                    )));
                }
                let law = TailLaw {
                    cutoff,
                    ln_t_next: p.ln_tail_f64(cutoff + 1),
                    ln_t_cut: p.ln_tail_f64(cutoff),
                    ln_a_cut: p.ln_atom_f64(cutoff),
                    theta: p.theta(),
                    log_exponent: p.psi().log_exponent(),
                    constant_psi: p.has_constant_psi(),
                };
                (cutoff, Some(law))
            }
        };
        // blocks rely on a_ℓ decreasing, which holds from n_dec on
        let direct_end = end.min(lo.saturating_add(DIRECT_TERMS - 1).max(p.n_dec()));
        let direct: Vec<f64> = (lo..=direct_end).map(|l| p.ln_atom_f64(l)).collect();
        let ln_max = direct.iter().copied().fold(f64::NEG_INFINITY, f64::max);

        let mut blocks = Vec::new();
        let mut a = direct_end + 1;
        while a <= end {
            let mut count = (a / BLOCK_DIVISOR).max(3).min(end - a + 1);
            if count.is_multiple_of(2) {
                count -= 1;
            }
            let half = (count - 1) / 2;
            let b = a + count - 1;
            blocks.push(Block {
                count: count as f64,
                half: half as f64,
                ln_a: [p.ln_atom_f64(a), p.ln_atom_f64(a + half), p.ln_atom_f64(b)],
            });
            a = b + 1;
        }
        Ok(LevelTable {
            range,
            direct,
            blocks,
            tail,
            ln_max,
        })
    }

    fn eval(&self, s: f64) -> Result<Factor> {
        let shift = s * self.ln_max;
        let mut est = Neumaier::default();
        let mut lower = Neumaier::default();
        let mut upper = Neumaier::default();
        for &la in &self.direct {
            let v = (s * la - shift).exp();
            est.add(v);
            lower.add(v);
            upper.add(v);
        }
        for b in &self.blocks {
            let [f0, f1, f2] = b.ln_a.map(|la| (s * la - shift).exp());
            if b.half == 0.0 {
                est.add(f0);
                lower.add(f0);
                upper.add(f0);
                continue;
            }
            // exact for quadratics in the index
            est.add(b.count * (f1 + (f0 + f2 - 2.0 * f1) * (b.half + 1.0) / (6.0 * b.half)));
            lower.add(b.count * f2);
            upper.add(b.count * f0);
        }
        let mut certified = true;
        if let Some(law) = &self.tail {
            let t = law.eval(s)?;
            est.add((t.ln_value - shift).exp());
            lower.add((t.ln_lower - shift).exp());
            upper.add((t.ln_upper - shift).exp());
            certified = t.certified;
        }
        Ok(Factor {
            ln_value: shift + est.total().ln(),
            ln_lower: shift + lower.total().ln(),
            ln_upper: shift + upper.total().ln(),
            certified,
        })
    }
}

impl TailLaw {
    fn eval(&self, s: f64) -> Result<Factor> {
        if s == 1.0 {
            // telescoping: Σ_{ℓ > L} a_ℓ = t_{L+1}
            return Ok(Factor {
                ln_value: self.ln_t_next,
                ln_lower: self.ln_t_next,
                ln_upper: self.ln_t_next,
                certified: true,
            });
        }
        let l = self.cutoff as f64;
        let q = (1.0 + self.theta) * s;
        if self.constant_psi {
            if q <= 1.0 {
                return Err(Error::Divergent { s });
            }
            // t_ℓ = K ℓ^{-θ} and θ K (ℓ+1)^{-θ-1} ≤ a_ℓ ≤ θ K ℓ^{-θ-1}
            let ln_k = self.ln_t_cut + self.theta * l.ln();
            let base = s * (ln_k + self.theta.ln()) - (q - 1.0).ln();
            return Ok(Factor {
                ln_value: base + (1.0 - q) * (l + 1.0).ln(),
                ln_lower: base + (1.0 - q) * (l + 2.0).ln(),
                ln_upper: base + (1.0 - q) * l.ln(),
                certified: true,
            });
        }
        // a_ℓ ≈ a_L (ℓ/L)^{-(1+θ)} (ln ℓ / ln L)^b, integrated past L + 1/2
        let b = s * self.log_exponent;
        let c = q - 1.0;
        if c < 0.0 || (c == 0.0 && b >= -1.0) {
            return Err(Error::Divergent { s });
        }
        let ln_l = l.ln();
        let pre = s * self.ln_a_cut + q * ln_l - b * ln_l.ln();
        let u = (l + 0.5).ln();
        let ln_int = if c == 0.0 {
            (b + 1.0) * u.ln() - (-(b + 1.0)).ln()
        } else {
            -(b + 1.0) * c.ln() + upper_gamma(b + 1.0, c * u)?.ln()
        };
        let v = pre + ln_int;
        Ok(Factor {
            ln_value: v,
            ln_lower: v,
            ln_upper: v,
            certified: false,
        })
    }
}

/// `Γ(a, x)` for any real `a`, by upward recurrence when `a ≤ 0`.
fn upper_gamma(a: f64, x: f64) -> Result<f64> {
    if a > 0.0 {
        return checked_gamma_ui(a, x).map_err(|e| Error::Domain(format!("incomplete gamma: {e}")));
    }
    let a = if a.fract() == 0.0 { a + 1e-10 } else { a };
    Ok((upper_gamma(a + 1.0, x)? - x.powf(a) * (-x).exp()) / a)
}

/// Factor tables for the levels of a cover, reusable across exponents.
#[derive(Clone, Debug)]
pub struct CoverPlan {
    k: u64,
    tables: Vec<LevelTable>,
    level_table: Vec<usize>,
    ln_tilde_tail: Option<f64>,
}

impl CoverPlan {
    pub fn new(model: &ConstraintModel, p: &Partition, k: u64, tilde: bool) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("cover level must be >= 1".into()));
        }
        if tilde && !model.is_jarnik() {
            return Err(Error::InvalidModel(
                "tilde covers need a Jarnik model".into(),
            ));
        }
        let mut tables: Vec<LevelTable> = Vec::new();
        let mut level_table = Vec::with_capacity(k as usize);
        for level in 1..=k {
            let range = model.admissible_range(level)?;
            let idx = match tables.iter().position(|t| t.range == range) {
                Some(i) => i,
                None => {
                    tables.push(LevelTable::new(p, range)?);
                    tables.len() - 1
                }
            };
            level_table.push(idx);
        }
        let ln_tilde_tail = if tilde {
            let next = model.tilde_next(k)?.expect("jarnik model has s_{k+1}");
            Partition::check_index(next)?;
            Some(p.ln_tail_f64(next))
        } else {
            None
        };
        Ok(CoverPlan {
            k,
            tables,
            level_table,
            ln_tilde_tail,
        })
    }

    pub fn level(&self) -> u64 {
        self.k
    }

    pub fn eval(&self, s: f64) -> Result<CoverSum> {
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::Domain(format!(
                "cover exponent must lie in (0, 1], got {s}"
            )));
        }
        let per_table = self
            .tables
            .iter()
            .map(|t| t.eval(s))
            .collect::<Result<Vec<_>>>()?;
        let mut ln_value = Neumaier::default();
        let mut ln_lower = Neumaier::default();
        let mut ln_upper = Neumaier::default();
        let mut certified = true;
        let mut factors = Vec::with_capacity(self.level_table.len());
        for (i, &t) in self.level_table.iter().enumerate() {
            let f = &per_table[t];
            ln_value.add(f.ln_value);
            ln_lower.add(f.ln_lower);
            ln_upper.add(f.ln_upper);
            certified &= f.certified;
            factors.push(LevelFactor {
                level: i as u64 + 1,
                lo: self.tables[t].range.lo,
                hi: self.tables[t].range.hi,
                ln_value: f.ln_value,
                ln_lower: f.ln_lower,
                ln_upper: f.ln_upper,
                certified: f.certified,
            });
        }
        if let Some(lt) = self.ln_tilde_tail {
            ln_value.add(s * lt);
            ln_lower.add(s * lt);
            ln_upper.add(s * lt);
        }
        Ok(CoverSum {
            s,
            k: self.k,
            tilde: self.ln_tilde_tail.is_some(),
            ln_value: ln_value.total(),
            ln_lower: ln_lower.total(),
            ln_upper: ln_upper.total(),
            certified,
            factors,
        })
    }
}

/// Level-`k` cover sum; envelope models are summed over their non-monotone
/// superset, so the result is an upper bound there.
pub fn cover_sum(
    model: &ConstraintModel,
    p: &Partition,
    k: u64,
    s: f64,
    tilde: bool,
) -> Result<CoverSum> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::Domain(format!(
            "cover exponent must lie in (0, 1], got {s}"
        )));
    }
    CoverPlan::new(model, p, k, tilde)?.eval(s)
}
