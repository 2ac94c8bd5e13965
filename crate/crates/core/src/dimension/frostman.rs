use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Neumaier;
use crate::constraint::{ConstraintModel, ModelKind};
use crate::error::{Error, Result};
use crate::partition::Partition;

/// Mass distributions supported by the models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureKind {
    /// `1/(S^k ℓ_1⋯ℓ_k)` on a band model.
    Band,
    /// `1/(S_1⋯S_k ℓ_1⋯ℓ_k)` on an envelope model.
    Envelope,
    /// `1/(ℓ_1⋯ℓ_k)` on a Jarník model.
    Jarnik,
}

impl MeasureKind {
    pub fn for_model(model: &ConstraintModel) -> Result<Self> {
        match model.kind() {
            ModelKind::GoodBand { .. } => Ok(MeasureKind::Band),
            ModelKind::Envelope { .. } => Ok(MeasureKind::Envelope),
            ModelKind::Jarnik { .. } => Ok(MeasureKind::Jarnik),
            ModelKind::GoodSet { .. } => Err(Error::InvalidModel(
                "GoodSet carries no mass distribution".into(),
            )),
        }
    }

    fn check(self, model: &ConstraintModel) -> Result<()> {
        let own = MeasureKind::for_model(model)?;
        if own != self {
            return Err(Error::InvalidModel(format!(
                "measure {self:?} does not live on a {own:?} model"
            )));
        }
        Ok(())
    }
}

/// `ln` of the mass one digit at `level` contributes.
fn ln_weight(model: &ConstraintModel, level: u64, d: u64) -> Result<f64> {
    Ok(match model.kind() {
        ModelKind::GoodBand { s, .. } => -(s * d as f64).ln(),
        ModelKind::Envelope { .. } => -(model.envelope_level(level)?.s * d as f64).ln(),
        ModelKind::Jarnik { .. } => -(d as f64).ln(),
        ModelKind::GoodSet { .. } => {
            return Err(Error::InvalidModel(
                "GoodSet carries no mass distribution".into(),
            ));
        }
    })
}

/// `ln ν(C(digits))` for the model's mass distribution.
pub fn ln_frostman_measure(model: &ConstraintModel, digits: &[u64]) -> Result<f64> {
    MeasureKind::for_model(model)?;
    if !model.contains(digits) {
        return Err(Error::Domain(format!(
            "digits {digits:?} are not admissible for the model"
        )));
    }
    let mut acc = Neumaier::default();
    for (i, &d) in digits.iter().enumerate() {
        acc.add(ln_weight(model, i as u64 + 1, d)?);
    }
    Ok(acc.total())
}

pub fn frostman_measure(model: &ConstraintModel, digits: &[u64]) -> Result<f64> {
    ln_frostman_measure(model, digits).map(f64::exp)
}

#[derive(Clone, Debug, Serialize)]
pub struct HolderReport {
    /// Minimum of `log μ(B(x,r)) / log r` over all samples and radii.
    pub exponent: f64,
    pub mean: f64,
    pub n_samples: usize,
    pub depth: u64,
    /// Radii are `λ(C_k(x))` for `k` in `k_min..=depth`.
    pub k_min: u64,
    pub worst_sample: usize,
    pub worst_k: u64,
    /// Minimum exponent per `k`.
    pub per_level_min: Vec<(u64, f64)>,
}

/// Finest resolution the `f64` ball descent accepts, in ancestor coordinates.
const MIN_LOCAL_RADIUS: f64 = 1e-12;
const MAX_CHILDREN: u64 = 1_000_000;
/// Extra levels resolved below a partly covered level-k cylinder.
const REFINE: u64 = 4;

struct Descent<'a> {
    model: &'a ConstraintModel,
    p: &'a Partition,
    /// Cylinders at this level count in full even when only partly covered.
    target: u64,
}

impl Descent<'_> {
    /// Mass (relative to the level-`j` cylinder) of the admissible level-`target`
    /// cylinders meeting `[lo, hi]`, given in level-`j` coordinates.
    fn mass(&self, j: u64, lo: f64, hi: f64, prev: Option<u64>) -> Result<f64> {
        if j == self.target {
            return Ok(1.0);
        }
        let level = j + 1;
        let range = self.model.admissible_range(level)?;
        let mut d_lo = range.lo;
        if self.model.monotone_coupling() {
            d_lo = d_lo.max(prev.unwrap_or(1));
        }
        let d_hi = range
            .hi
            .ok_or_else(|| Error::Sampling("ball descent needs bounded digit ranges".into()))?;
        // larger digits sit closer to 0
        let m_min = self.p.locate_atom_f64(hi.max(f64::MIN_POSITIVE))?.max(d_lo);
        let m_max = if lo <= 0.0 {
            d_hi
        } else {
            self.p.locate_atom_f64(lo)?.min(d_hi)
        };
        if m_min > m_max {
            return Ok(0.0);
        }
        if m_max - m_min > MAX_CHILDREN {
            return Err(Error::Precondition(format!(
                "ball meets more than {MAX_CHILDREN} cylinders"
            )));
        }
        let mut acc = Neumaier::default();
        for m in m_min..=m_max {
            let t = self.p.tail_f64(m);
            let a = self.p.atom_f64(m);
            let c_lo = ((t - hi) / a).max(0.0);
            let c_hi = ((t - lo) / a).min(1.0);
            if c_lo > c_hi {
                continue;
            }
            let w = ln_weight(self.model, level, m)?.exp();
            if c_lo == 0.0 && c_hi == 1.0 {
                // covered cylinder: its own mass
                acc.add(w);
            } else {
                acc.add(w * self.mass(level, c_lo, c_hi, Some(m))?);
            }
        }
        Ok(acc.total())
    }
}

/// Minimum of `log μ(B(x, r)) / log r` over seeded sample points `x` and radii
/// `r = λ(C_k(x))`, `k ∈ [⌈depth/2⌉, depth]`.
///
/// `μ(B)` adds the mass of every admissible level-`k` cylinder inside the ball;
/// partly covered ones are resolved `REFINE` levels further and then counted in
/// full, so the result bounds the true ball mass from above. Coarse radii are
/// skipped because there the constant of `μ(B) ≤ c r^s` dominates the ratio.
pub fn empirical_holder(
    model: &ConstraintModel,
    p: &Partition,
    kind: MeasureKind,
    n_samples: usize,
    depth: u64,
    seed: u64,
) -> Result<HolderReport> {
    holder_with(
        model,
        p,
        kind,
        n_samples,
        depth,
        seed,
        depth.div_ceil(2),
        REFINE,
    )
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn holder_with(
    model: &ConstraintModel,
    p: &Partition,
    kind: MeasureKind,
    n_samples: usize,
    depth: u64,
    seed: u64,
    k_min: u64,
    refine: u64,
) -> Result<HolderReport> {
    kind.check(model)?;
    if n_samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    if depth < 2 {
        return Err(Error::Domain(format!("depth must be >= 2, got {depth}")));
    }
    let full = (depth + REFINE) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut per_level = vec![f64::INFINITY; (depth - k_min + 1) as usize];
    let mut worst = (f64::INFINITY, 0usize, 0u64);
    let mut mean = Neumaier::default();
    let mut count = 0usize;

    for sample in 0..n_samples {
        let digits = model.sample_with(full, &mut rng)?.into_digits();
        // y[j] = L^j(x), with x the midpoint of its level depth+REFINE cylinder
        let mut y = vec![0.5; full + 1];
        for j in (0..full).rev() {
            y[j] = p.tail_f64(digits[j]) - p.atom_f64(digits[j]) * y[j + 1];
        }
        let mut ln_lam = vec![0.0; full + 1];
        let mut ln_nu = vec![0.0; full + 1];
        for j in 0..full {
            ln_lam[j + 1] = ln_lam[j] + p.ln_atom_f64(digits[j]);
            ln_nu[j + 1] = ln_nu[j] + ln_weight(model, j as u64 + 1, digits[j])?;
        }
        for k in k_min..=depth {
            let ku = k as usize;
            // deepest ancestor containing the ball; the unit interval clips
            let mut anc = 0usize;
            for j in (1..ku).rev() {
                let rho = (ln_lam[ku] - ln_lam[j]).exp();
                if y[j] - rho >= 0.0 && y[j] + rho <= 1.0 {
                    anc = j;
                    break;
                }
            }
            let rho = (ln_lam[ku] - ln_lam[anc]).exp();
            if rho < MIN_LOCAL_RADIUS {
                return Err(Error::Precondition(format!(
                    "ball at level {k} straddles a level-{} boundary below f64 resolution",
                    anc + 1
                )));
            }
            let descent = Descent {
                model,
                p,
                target: k + refine,
            };
            let prev = anc.checked_sub(1).map(|i| digits[i]);
            let lo = (y[anc] - rho).max(0.0);
            let hi = (y[anc] + rho).min(1.0);
            let rel = descent.mass(anc as u64, lo, hi, prev)?;
            let ln_mu = ln_nu[anc] + rel.ln();
            let mut e = ln_mu / ln_lam[ku];
            if e == 0.0 {
                e = 0.0;
            }
            let slot = &mut per_level[(k - k_min) as usize];
            *slot = slot.min(e);
            if e < worst.0 {
                worst = (e, sample, k);
            }
            mean.add(e);
            count += 1;
        }
    }
    Ok(HolderReport {
        exponent: worst.0,
        mean: mean.total() / count as f64,
        n_samples,
        depth,
        k_min,
        worst_sample: worst.1,
        worst_k: worst.2,
        per_level_min: (k_min..=depth).zip(per_level).collect(),
    })
}
