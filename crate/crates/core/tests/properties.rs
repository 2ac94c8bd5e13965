use alpha_lueroth::codec::{
    apply_map, canonicalize, decode, decode_exact, default_zero_tol, encode, DigitSequence,
};
use alpha_lueroth::cylinder::cylinder_interval;
use alpha_lueroth::{Partition, PartitionSpec, Psi};
use proptest::prelude::*;
use rug::{Float, Rational};

fn partitions() -> Vec<Partition> {
    vec![
        Partition::classical(),
        Partition::new(PartitionSpec::power(0.5, Psi::default())).unwrap(),
        Partition::new(PartitionSpec::power(2.0, Psi::default())).unwrap(),
        Partition::new(PartitionSpec::power(1.0, Psi::LogPower { beta: 0.5 })).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn encoded_point_lies_in_its_cylinder(u in 1e-9f64..=1.0, depth in 1usize..25, which in 0usize..4) {
        let p = &partitions()[which];
        let x = Float::with_val(p.precision(), u);
        let enc = encode(p, &x, depth, default_zero_tol(p)).unwrap();
        let c = cylinder_interval(p, enc.sequence.digits()).unwrap();
        let back = decode(p, &enc.sequence).unwrap();
        let err = Float::with_val(back.prec(), &back - &x).abs();
        let slack = Float::with_val(back.prec(), &c.measure >> (p.precision() - 10));
        prop_assert!(err <= Float::with_val(back.prec(), &c.measure + &slack));
        // x is in the closed cylinder up to the same slack
        prop_assert!(Float::with_val(back.prec(), &c.lo - &slack) <= x);
        prop_assert!(x <= Float::with_val(back.prec(), &c.hi + &slack));
    }

    #[test]
    fn map_shifts_digits(u in 1e-6f64..=1.0, depth in 2usize..20) {
        let p = Partition::classical();
        let x = Float::with_val(p.precision(), u);
        let full = encode(&p, &x, depth, default_zero_tol(&p)).unwrap();
        let y = apply_map(&p, &Float::with_val(full.precision_used + 64, u)).unwrap();
        let tail: Vec<u64> = if y.is_zero() {
            Vec::new()
        } else {
            encode(&p, &y, depth - 1, default_zero_tol(&p)).unwrap().sequence.into_digits()
        };
        prop_assert_eq!(tail.as_slice(), &full.sequence.digits()[1..]);
    }

    #[test]
    fn canonicalize_is_idempotent(digits in prop::collection::vec(1u64..6, 1..12), terminated in any::<bool>()) {
        let d = DigitSequence::new(digits, terminated).unwrap();
        let c = canonicalize(&d);
        prop_assert_eq!(&canonicalize(&c), &c);
        prop_assert!(c.is_canonical());
        // a trailing `ℓ, 1` names the same point as `ℓ + 1`
        let p = Partition::classical();
        prop_assert_eq!(decode_exact(&p, &d).unwrap(), decode_exact(&p, &c).unwrap());
    }

    #[test]
    fn float_decode_matches_exact(digits in prop::collection::vec(1u64..1000, 1..15)) {
        let p = Partition::classical();
        let d = DigitSequence::finite(digits).unwrap();
        let exact = decode_exact(&p, &d).unwrap();
        let approx = decode(&p, &d).unwrap();
        let diff = Float::with_val(approx.prec(), &approx - &exact).abs();
        // accurate relative to the cylinder measure, not just to 1
        let lambda = d.digits().iter().fold(Rational::from(1), |acc, &l| acc * p.exact_atom(l).unwrap());
        let bound = Float::with_val(approx.prec(), &lambda) >> 100u32;
        prop_assert!(diff <= bound);
    }
}
