//! Cylinder intervals, tilde-cylinders and the three-neighbour ball covering.

use rug::Float;
use serde::Serialize;

use crate::codec::{decode_prec, resolving_precision};
use crate::error::{Error, Result};
use crate::partition::{Partition, INDEX_LIMIT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of_len(k: usize) -> Self {
        if k % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

/// The closed interval `C_α(ℓ_1, …, ℓ_k)`.
#[derive(Clone, Debug)]
pub struct Cylinder {
    pub digits: Vec<u64>,
    pub lo: Float,
    pub hi: Float,
    pub parity: Parity,
    /// `∏ a_{ℓ_i}`
    pub measure: Float,
}

impl Cylinder {
    pub fn contains(&self, x: &Float) -> bool {
        *x >= self.lo && *x <= self.hi
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }
}

fn check_digits(digits: &[u64]) -> Result<()> {
    if digits.is_empty() {
        return Err(Error::Domain("cylinder needs at least one digit".into()));
    }
    for &d in digits {
        Partition::check_index(d)?;
    }
    Ok(())
}

pub(crate) fn interval_prec(p: &Partition, digits: &[u64], prec: u32) -> Result<(Float, Float)> {
    let mut next = digits.to_vec();
    let last = next.last_mut().expect("nonempty digits");
    if *last >= INDEX_LIMIT {
        return Err(Error::IndexOverflow(format!(
            "digit {} has no right neighbour",
            *last
        )));
    }
    *last += 1;
    let a = decode_prec(p, digits, prec);
    let b = decode_prec(p, &next, prec);
    Ok(if digits.len() % 2 == 1 {
        (b, a)
    } else {
        (a, b)
    })
}

fn product_prec(p: &Partition, digits: &[u64], prec: u32) -> Float {
    digits.iter().fold(Float::with_val(prec, 1), |acc, &d| {
        acc * p.atom_prec(d, prec)
    })
}

pub fn cylinder_interval(p: &Partition, digits: &[u64]) -> Result<Cylinder> {
    check_digits(digits)?;
    let prec = resolving_precision(p, digits);
    let (lo, hi) = interval_prec(p, digits, prec)?;
    Ok(Cylinder {
        digits: digits.to_vec(),
        lo,
        hi,
        parity: Parity::of_len(digits.len()),
        measure: product_prec(p, digits, p.precision()),
    })
}

/// `∏ a_{ℓ_i}`, times `t_{s_{k+1}}` for the tilde-cylinder when `tilde_next` is given.
pub fn cylinder_measure(p: &Partition, digits: &[u64], tilde_next: Option<u64>) -> Result<Float> {
    check_digits(digits)?;
    let mut m = product_prec(p, digits, p.precision());
    if let Some(s) = tilde_next {
        m *= p.tail(s)?;
    }
    Ok(m)
}

/// Natural log of [`cylinder_measure`], without underflow.
pub fn ln_cylinder_measure(p: &Partition, digits: &[u64], tilde_next: Option<u64>) -> Result<f64> {
    check_digits(digits)?;
    let mut ln = digits.iter().map(|&d| p.ln_atom_f64(d)).sum::<f64>();
    if let Some(s) = tilde_next {
        Partition::check_index(s)?;
        ln += p.ln_tail_f64(s);
    }
    Ok(ln)
}

/// Checks `B(x, r) ⊂ ⋃_{i=-1}^{1} C_α(ℓ_1, …, ℓ_k + i)` for `x = decode(digits)`,
/// where `digits` has length `k + 1` and `r` lies in `[λ(C_{k+1}), λ(C_k))`.
///
/// The ball is clipped to `[0, 1]`; a missing neighbour `ℓ_k - 1 = 0` leaves the
/// union ending at the parent boundary. Comparisons allow a slack of
/// `2^{-(precision-10)} λ(C_k)`.
pub fn ball_containment_check(p: &Partition, digits: &[u64], r: &Float) -> Result<bool> {
    check_digits(digits)?;
    let k = digits.len() - 1;
    if k == 0 {
        return Err(Error::Precondition(
            "need at least two digits (k >= 1)".into(),
        ));
    }
    if digits.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Precondition("digits must be nondecreasing".into()));
    }
    let prec = resolving_precision(p, digits) + 16;
    let lam_k = product_prec(p, &digits[..k], prec);
    let lam_k1 = Float::with_val(prec, &lam_k * p.atom_prec(digits[k], prec));
    let rel = Float::with_val(prec, -((p.precision() as i32) - 10)).exp2();
    // the window ends are exact values that the caller can only round to
    let floor = Float::with_val(prec, &lam_k1 * Float::with_val(prec, 1 - &rel));
    if *r < floor || *r >= lam_k {
        return Err(Error::Precondition(format!(
            "radius {:e} outside [{:e}, {:e})",
            r.to_f64(),
            lam_k1.to_f64(),
            lam_k.to_f64()
        )));
    }

    let x = decode_prec(p, digits, prec);
    let mut ball_lo = Float::with_val(prec, &x - r);
    let mut ball_hi = Float::with_val(prec, &x + r);
    if ball_lo < 0 {
        ball_lo = Float::with_val(prec, 0);
    }
    if ball_hi > 1 {
        ball_hi = Float::with_val(prec, 1);
    }

    let mut sibling = digits[..k].to_vec();
    let lk = digits[k - 1];
    let mut union_lo: Option<Float> = None;
    let mut union_hi: Option<Float> = None;
    for cand in [lk - 1, lk, lk + 1] {
        if cand == 0 {
            continue;
        }
        sibling[k - 1] = cand;
        let (lo, hi) = interval_prec(p, &sibling, prec)?;
        union_lo = Some(match union_lo {
            Some(u) if u <= lo => u,
            _ => lo,
        });
        union_hi = Some(match union_hi {
            Some(u) if u >= hi => u,
            _ => hi,
        });
    }
    let (union_lo, union_hi) = (union_lo.expect("sibling"), union_hi.expect("sibling"));
    let slack = lam_k * rel;
    Ok(ball_lo >= Float::with_val(prec, &union_lo - &slack) && ball_hi <= union_hi + slack)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rug::ops::Pow;
    use rug::Rational;

    fn q(n: u64, d: u64) -> Float {
        Float::with_val(256, Rational::from((n, d)))
    }

    fn near(a: &Float, b: &Float) -> bool {
        Float::with_val(256, a - b).abs() < 1e-35
    }

    #[test]
    fn interval_examples() {
        let p = Partition::classical();
        let c = cylinder_interval(&p, &[2]).unwrap();
        assert!(near(&c.lo, &q(1, 3)) && near(&c.hi, &q(1, 2)) && near(&c.measure, &q(1, 6)));
        assert_eq!(c.parity, Parity::Odd);
        let c = cylinder_interval(&p, &[1, 1]).unwrap();
        assert!(near(&c.lo, &q(1, 2)) && near(&c.hi, &q(3, 4)) && near(&c.measure, &q(1, 4)));
        assert_eq!(c.parity, Parity::Even);
        let c = cylinder_interval(&p, &[1]).unwrap();
        assert!(near(&c.lo, &q(1, 2)) && near(&c.hi, &q(1, 1)));
        assert!(cylinder_interval(&p, &[]).is_err());
        assert!(cylinder_interval(&p, &[2, 0]).is_err());
    }

    #[test]
    fn measure_examples() {
        let p = Partition::classical();
        assert!(near(
            &cylinder_measure(&p, &[2, 3], None).unwrap(),
            &q(1, 72)
        ));
        assert!(near(
            &cylinder_measure(&p, &[2], Some(3)).unwrap(),
            &q(1, 18)
        ));
        assert!(near(
            &cylinder_measure(&p, &[2], Some(1)).unwrap(),
            &q(1, 6)
        ));
        assert!(cylinder_measure(&p, &[], None).is_err());
        let ln = ln_cylinder_measure(&p, &[2, 3], Some(3)).unwrap();
        assert!((ln - (1.0f64 / 216.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn ball_examples() {
        let p = Partition::classical();
        let r = q(1, 12).pow(7u32);
        assert!(ball_containment_check(&p, &[3; 7], &r).unwrap());
        let r = q(1, 6).pow(9u32);
        assert!(ball_containment_check(&p, &[2; 9], &r).unwrap());
        assert!(matches!(
            ball_containment_check(&p, &[2, 2], &q(1, 1)),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            ball_containment_check(&p, &[3, 2, 4], &q(1, 100_000)),
            Err(Error::Precondition(_))
        ));
        // radius just below the level-k measure
        let top = q(1, 6).pow(8u32) * (1.0 - 1e-9);
        ball_containment_check(&p, &[2; 9], &Float::with_val(256, top)).unwrap();
    }

    #[test]
    fn ball_with_missing_left_neighbour() {
        let p = Partition::classical();
        // ℓ_k = 1 has no ℓ_k - 1 sibling
        let lam = q(1, 2) * q(1, 2);
        assert!(ball_containment_check(&p, &[1, 1], &Float::with_val(256, lam)).is_ok());
    }

    #[test]
    fn tilde_measure_is_sum_of_children() {
        let p = Partition::new(crate::PartitionSpec::power(1.5, Default::default())).unwrap();
        let prefix = [2u64, 5];
        for s in [1u64, 3, 10] {
            let tilde = cylinder_measure(&p, &prefix, Some(s)).unwrap();
            let m_max = 200u64;
            let mut sum = Float::with_val(256, 0);
            for m in s..=m_max {
                let mut d = prefix.to_vec();
                d.push(m);
                sum += cylinder_measure(&p, &d, None).unwrap();
            }
            sum += cylinder_measure(&p, &prefix, Some(m_max + 1)).unwrap();
            let rel = Float::with_val(256, Float::with_val(256, &sum - &tilde) / &tilde).abs();
            assert!(rel < 1e-30, "s = {s}");
        }
    }

    #[test]
    fn children_tile_parent() {
        let p = Partition::classical();
        for prefix in [vec![3u64], vec![3, 7]] {
            let parent = cylinder_interval(&p, &prefix).unwrap();
            let big_m = 12u64;
            let mut covered = Float::with_val(256, 0);
            let mut prev: Option<Cylinder> = None;
            for m in 1..=big_m {
                let mut d = prefix.clone();
                d.push(m);
                let c = cylinder_interval(&p, &d).unwrap();
                if let Some(pc) = &prev {
                    // adjacent children share an endpoint
                    assert!(near(&pc.lo, &c.hi) || near(&pc.hi, &c.lo));
                }
                covered += &c.measure;
                prev = Some(c);
            }
            let expect = Float::with_val(256, &parent.measure * (1 - p.tail(big_m + 1).unwrap()));
            assert!(near(&covered, &expect));
        }
    }

    proptest! {
        #[test]
        fn decode_is_parity_endpoint(digits in prop::collection::vec(1u64..50, 1..12)) {
            let p = Partition::classical();
            let c = cylinder_interval(&p, &digits).unwrap();
            let x = crate::codec::decode(&p, &crate::DigitSequence::finite(digits.clone()).unwrap()).unwrap();
            let end = if digits.len() % 2 == 1 { &c.hi } else { &c.lo };
            let diff = Float::with_val(2048, &x - end).abs();
            prop_assert!(diff <= Float::with_val(64, &c.measure) * 1e-30);
            let width = Float::with_val(2048, &c.hi - &c.lo);
            let rel = Float::with_val(2048, Float::with_val(2048, &width - &c.measure) / &c.measure).abs();
            prop_assert!(rel < 1e-30);
        }

        #[test]
        fn children_nest(digits in prop::collection::vec(1u64..30, 1..8), m in 1u64..1000) {
            let p = Partition::classical();
            let parent = cylinder_interval(&p, &digits).unwrap();
            let mut child = digits.clone();
            child.push(m);
            let c = cylinder_interval(&p, &child).unwrap();
            prop_assert!(c.lo >= parent.lo && c.hi <= parent.hi);
        }
    }
}
