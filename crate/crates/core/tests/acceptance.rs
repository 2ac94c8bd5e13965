//! Acceptance criteria; prints one PASS/FAIL line each and exits non-zero on any failure.

use std::time::Instant;

use alpha_lueroth::codec::{apply_map, decode, default_zero_tol, encode};
use alpha_lueroth::constraint::EnvelopeF;
use alpha_lueroth::cylinder::{ball_containment_check, cylinder_measure, ln_cylinder_measure};
use alpha_lueroth::dimension::{ln_frostman_measure, MeasureKind};
use alpha_lueroth::{
    cover_sum, empirical_holder, moran_root, sigma_from_sequence, ConstraintModel, Error,
    Partition, PartitionSpec, Psi, SequenceSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

type Outcome = Result<(bool, String), Error>;
type Criterion = (&'static str, fn() -> Outcome);

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.gen::<f64>()
}

fn codec_round_trip() -> Outcome {
    let p = Partition::classical();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_901);
    let start = Instant::now();
    let mut bad = 0;
    let mut worst_ratio = 0.0f64;
    let mut worst_err = 0.0f64;
    for _ in 0..10_000 {
        let x = Float::with_val(p.precision(), uniform(&mut rng));
        let enc = encode(&p, &x, 30, default_zero_tol(&p))?;
        let back = decode(&p, &enc.sequence)?;
        let prec = back.prec();
        let err = Float::with_val(prec, &back - &x).abs();
        let lambda = enc
            .sequence
            .digits()
            .iter()
            .fold(Float::with_val(prec, 1), |acc, &d| {
                acc * p.atom_prec(d, prec)
            });
        // boundary points sit at distance exactly λ; allow the codec's relative slack
        let bound = Float::with_val(
            prec,
            &lambda + Float::with_val(prec, &lambda >> (p.precision() - 10)),
        );
        if !(err <= bound && err <= 1e-6) {
            bad += 1;
        }
        worst_err = worst_err.max(err.to_f64());
        worst_ratio = worst_ratio.max(Float::with_val(64, &err / &lambda).to_f64());
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        bad == 0 && secs < 5.0,
        format!("10000 samples depth 30: {bad} failures, max |err| {worst_err:.3e}, max |err|/prod a {worst_ratio:.6}, {secs:.2} s"),
    ))
}

fn shift_property() -> Outcome {
    let p = Partition::classical();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut bad = 0;
    for _ in 0..1000 {
        let u = uniform(&mut rng);
        let full = encode(
            &p,
            &Float::with_val(p.precision(), u),
            20,
            default_zero_tol(&p),
        )?;
        let y = apply_map(&p, &Float::with_val(full.precision_used + 64, u))?;
        let tail = if y.is_zero() {
            Vec::new()
        } else {
            encode(&p, &y, 19, default_zero_tol(&p))?
                .sequence
                .into_digits()
        };
        if tail.as_slice() != &full.sequence.digits()[1..] {
            bad += 1;
        }
    }
    Ok((bad == 0, format!("1000 samples: {bad} digit mismatches")))
}

fn tail_ratio() -> Outcome {
    let n = 10_000u64;
    let mut ok = true;
    let mut parts = Vec::new();
    for theta in [0.5, 1.0, 2.0] {
        let p = Partition::new(PartitionSpec::power(theta, Psi::default()))?;
        let r = p.asymptotic_report(&[n])?.rows[0].tail_ratio;
        ok &= (r - theta).abs() <= 2.0 * theta / n as f64;
        if theta == 1.0 {
            ok &= (r - n as f64 / (n as f64 + 1.0)).abs() <= 1e-15;
        }
        parts.push(format!("theta {theta}: n a_n/t_n = {r:.12}"));
    }
    Ok((ok, parts.join(", ")))
}

fn band_roots() -> Outcome {
    let p = Partition::classical();
    let start = Instant::now();
    let mut roots = Vec::new();
    for n in [10, 100, 1000] {
        let m = ConstraintModel::good_band_minimal(n)?;
        roots.push(moran_root(&m, &p, 1, 1e-9)?.s_star);
    }
    let secs = start.elapsed().as_secs_f64();
    let increasing = roots.windows(2).all(|w| w[0] < w[1]);
    let near = (roots[2] - 0.5).abs() <= 0.01;
    Ok((
        increasing && near && secs < 10.0,
        format!(
            "s*(10, 100, 1000) = {:.9}, {:.9}, {:.9}; {secs:.2} s",
            roots[0], roots[1], roots[2]
        ),
    ))
}

fn good_set_contraction() -> Outcome {
    let p = Partition::classical();
    let m = ConstraintModel::good_set(10_000)?;
    let c = cover_sum(&m, &p, 1, 0.6, false)?;
    let f = &c.factors[0];
    Ok((
        f.certified && f.ln_upper < 0.0,
        format!(
            "level-1 factor at s=0.6: {:.6e}, certified upper {:.6e}, certified={}",
            f.ln_value.exp(),
            f.ln_upper.exp(),
            f.certified
        ),
    ))
}

fn jarnik_bracket() -> Outcome {
    let p = Partition::classical();
    let seq = SequenceSpec::Geometric { base: 2 };
    let m = ConstraintModel::jarnik(seq.clone(), 4)?;
    let sigma = sigma_from_sequence(1.0, &seq, 64, 0.0)?.sigma;
    let above = cover_sum(&m, &p, 20, sigma + 0.05, true)?.ln_value;
    let below = cover_sum(&m, &p, 20, sigma - 0.05, true)?.ln_value;
    let dexp = sigma_from_sequence(1.0, &SequenceSpec::DoublyExponential { base: 2 }, 20, 0.0)?;
    let third = 1.0 / 3.0;
    let ok = sigma == 0.5
        && above < 1e-3f64.ln()
        && below > 1e3f64.ln()
        && (dexp.sigma - third).abs() <= 1e-3
        && (dexp.sigma_estimate - third).abs() <= 1e-3;
    Ok((
        ok,
        format!(
            "sigma {sigma}; sum(0.55) = {:.3e}, sum(0.45) = {:.3e}; doubly-exponential sigma {:.6} (window estimate {:.6})",
            above.exp(),
            below.exp(),
            dexp.sigma,
            dexp.sigma_estimate
        ),
    ))
}

fn ball_containment() -> Outcome {
    let p = Partition::classical();
    let m = ConstraintModel::envelope(EnvelopeF::Log2 { c: Some(8) }, 0.1, &p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let k_max = 15;
    let mut without_k0 = 0;
    let mut below_k0 = 0;
    let mut largest_k0 = 0;
    for _ in 0..500 {
        let d = m.sample_with(k_max + 1, &mut rng)?.into_digits();
        let mut pass = vec![false; k_max + 1];
        for k in 1..=k_max {
            let lo = cylinder_measure(&p, &d[..=k], None)?;
            let lam = cylinder_measure(&p, &d[..k], None)?;
            let hi = Float::with_val(
                lam.prec(),
                &lam - Float::with_val(lam.prec(), &lam >> 32u32),
            );
            pass[k] = ball_containment_check(&p, &d[..=k], &lo)?
                && ball_containment_check(&p, &d[..=k], &hi)?;
        }
        let mut k0 = k_max + 1;
        while k0 > 1 && pass[k0 - 1] {
            k0 -= 1;
        }
        if k0 > k_max {
            without_k0 += 1;
            continue;
        }
        largest_k0 = largest_k0.max(k0);
        below_k0 += pass[1..k0].iter().filter(|ok| !**ok).count();
    }
    Ok((
        without_k0 == 0,
        format!("500 strings, k <= 15, both window ends: largest k0 {largest_k0}, {below_k0} failures below k0, {without_k0} strings without k0"),
    ))
}

fn band_strings(n: u64, m: u64, k: usize) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|s: Vec<u64>| {
                (n..=m).map(move |d| {
                    let mut t = s.clone();
                    t.push(d);
                    t
                })
            })
            .collect();
    }
    out
}

fn frostman_one(m_upper: Option<u64>) -> Outcome {
    let p = Partition::classical();
    let model = match m_upper {
        Some(m) => ConstraintModel::good_band(10, m)?,
        None => ConstraintModel::good_band_minimal(10)?,
    };
    let (n, m) = match model.spec() {
        alpha_lueroth::ModelSpec::Goodband {
            n,
            m: alpha_lueroth::constraint::BandUpper::Value(m),
        } => (n, m),
        other => panic!("unexpected spec {other:?}"),
    };
    let mut worst_norm = 0.0f64;
    let mut worst_margin = f64::INFINITY;
    for k in 1..=4 {
        let mut total = 0.0;
        let mut comp = 0.0;
        for s in band_strings(n, m, k) {
            let ln_nu = ln_frostman_measure(&model, &s)?;
            // Kahan-compensated total
            let y = ln_nu.exp() - comp;
            let t = total + y;
            comp = (t - total) - y;
            total = t;
            worst_margin = worst_margin.min(ln_cylinder_measure(&p, &s, None)? / 2.1 - ln_nu);
        }
        worst_norm = worst_norm.max((total - 1.0).abs());
    }
    let holder = empirical_holder(&model, &p, MeasureKind::Band, 1000, 12, 8)?.exponent;
    let root = moran_root(&model, &p, 1, 1e-9)?.s_star;
    let ok = worst_norm <= 1e-10 && worst_margin >= 0.0 && holder >= root - 0.05;
    Ok((
        ok,
        format!(
            "(10,{m}): max |sum nu - 1| {worst_norm:.1e}, min ln(lambda^(1/2.1)/nu) {worst_margin:.4}, holder {holder:.4} vs moran {root:.4}"
        ),
    ))
}

fn frostman() -> Outcome {
    let (a, da) = frostman_one(None)?;
    let (b, db) = frostman_one(Some(27))?;
    Ok((a && b, format!("{da}; {db}")))
}

fn degenerate() -> Outcome {
    let mut ok = true;
    for s in [
        SequenceSpec::Geometric { base: 2 },
        SequenceSpec::DoublyExponential { base: 2 },
        SequenceSpec::Custom {
            values: vec![3, 7, 20],
        },
    ] {
        ok &= sigma_from_sequence(0.0, &s, 30, 0.0)?.sigma == 1.0;
    }
    let p = Partition::classical();
    let single = ConstraintModel::good_band(3, 3)?;
    let no_root = matches!(moran_root(&single, &p, 1, 1e-9), Err(Error::NoRoot { .. }));
    let holder = empirical_holder(&single, &p, MeasureKind::Band, 100, 12, 1)?.exponent;
    ok &= no_root && holder == 0.0;
    Ok((
        ok,
        format!(
            "theta 0 sigma exactly 1; GoodBand(3,3): NoRoot={no_root}, holder exponent {holder}"
        ),
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("codec round trip", codec_round_trip),
        ("shift property", shift_property),
        ("tail ratio n a_n / t_n", tail_ratio),
        ("minimal band Moran roots", band_roots),
        ("GoodSet level-1 contraction", good_set_contraction),
        ("Jarnik tilde bracket and sigma", jarnik_bracket),
        ("ball containment window", ball_containment),
        ("mass distribution checks", frostman),
        ("degenerate sigma and singleton band", degenerate),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (ok, detail) = match run() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} [{}] {name}: {detail}",
            if ok { "PASS" } else { "FAIL" },
            i + 1
        );
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
