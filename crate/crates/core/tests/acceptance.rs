//! Acceptance checks, one line per criterion.
//!
//! Runs without the libtest harness so every line is printed; exits with a
//! failure status when any criterion fails.

use std::f64::consts::PI;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use cantor_moran::analysis::{export_to_string, gallery_config, parse_config, ExportKind};
use cantor_moran::fourier::{golden_samples, orthogonality_check, q_partial, TruncationPlan};
use cantor_moran::intpoly::IntPolynomial;
use cantor_moran::moran::{
    check_rbc, decide_spectrality, find_hadamard_l, shifted_top_digits, Formula, MoranSequence, Outcome, RbcStatus,
    Stage, Tail,
};
use cantor_moran::residue::{
    character_polynomial, mask_is_zero_at_fraction, satisfies_udz, Angle, DigitSet, ZeroAngle,
};
use cantor_moran::spectrum::{canonical_spectrum, sequence_triples, PqEvaluator, SpectrumTruncation};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ds(b: &[i64], m: u64) -> DigitSet {
    DigitSet::from_i64(b, m).unwrap()
}

fn st(n: u64, b: &[i64]) -> Stage {
    Stage::from_i64(n, b).unwrap()
}

fn consecutive(m: u64) -> Vec<i64> {
    (0..m as i64).collect()
}

/// `(1 / #B) sum_b exp(-2 pi i b x)` by direct summation.
fn mask(b: &[i64], x: f64) -> Complex64 {
    let s: Complex64 = b.iter().map(|&d| Complex64::cis(-2.0 * PI * d as f64 * x)).sum();
    s / b.len() as f64
}

/// `|sum_b exp(-2 pi i b j / n)| / #B` with the exponent reduced exactly.
fn mask_at_fraction(b: &[i64], j: i64, n: i64) -> f64 {
    let s: Complex64 = b
        .iter()
        .map(|&d| Complex64::cis(-2.0 * PI * (d * j).rem_euclid(n) as f64 / n as f64))
        .sum();
    s.norm() / b.len() as f64
}

fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    while out.len() > 1 && *out.last().unwrap() == 0 {
        out.pop();
    }
    out
}

fn indicator(b: &[i64]) -> Vec<i64> {
    let lo = *b.iter().min().unwrap();
    let hi = *b.iter().max().unwrap();
    let mut out = vec![0; (hi - lo + 1) as usize];
    for d in b {
        out[(d - lo) as usize] = 1;
    }
    out
}

fn int_coeffs(p: &IntPolynomial) -> Vec<i64> {
    p.coeffs().iter().map(|c| c.to_i64().unwrap()).collect()
}

/// All complex roots by simultaneous (Weierstrass) iteration.
fn durand_kerner(coeffs: &[i64]) -> Vec<Complex64> {
    let d = coeffs.len() - 1;
    let lead = *coeffs.last().unwrap() as f64;
    let monic: Vec<f64> = coeffs.iter().map(|&c| c as f64 / lead).collect();
    let eval = |z: Complex64| monic.iter().rev().fold(Complex64::zero(), |acc, &c| acc * z + c);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..d).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for i in 0..d {
            let denom: Complex64 = (0..d).filter(|&j| j != i).map(|j| roots[i] - roots[j]).product();
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    roots
}

/// Angles `x` in `[0, 1)` with `f(exp(-2 pi i x)) = 0`, from numerically
/// located roots on the unit circle.
fn unit_circle_angles(f: &[i64]) -> Vec<f64> {
    if f.len() < 2 {
        return Vec::new();
    }
    durand_kerner(f)
        .into_iter()
        .filter(|z| (z.norm() - 1.0).abs() < 1e-6)
        .map(|z| (-z.arg() / (2.0 * PI)).rem_euclid(1.0))
        .collect()
}

/// Uniform zero check by root location: every unimodular zero sits at
/// `j / M` with `M` not dividing `j`.
fn udz_oracle(f: &[i64], m: u64) -> bool {
    unit_circle_angles(f).iter().all(|&x| {
        let j = x * m as f64;
        let r = j.round();
        (j - r).abs() < 1e-6 && (r as i64).rem_euclid(m as i64) != 0
    })
}

fn character_polynomial_fixture() -> Check {
    let expected = IntPolynomial::from_i64(&[1, -1, 1]);
    let f1 = character_polynomial(&ds(&[0, 2, 4], 3)).map_err(|e| e.to_string())?;
    let f2 = character_polynomial(&ds(&[0, 2, 3, 4, 5, 7], 6)).map_err(|e| e.to_string())?;
    ensure(f1 == expected, || format!("{{0,2,4}} gave {f1}"))?;
    ensure(f2 == expected, || format!("{{0,2,3,4,5,7}} gave {f2}"))?;
    // The quotient times the geometric sum restores each digit polynomial.
    ensure(poly_mul(&int_coeffs(&f1), &[1; 3]) == indicator(&[0, 2, 4]), || {
        "product check, M = 3".into()
    })?;
    ensure(
        poly_mul(&int_coeffs(&f2), &[1; 6]) == indicator(&[0, 2, 3, 4, 5, 7]),
        || "product check, M = 6".into(),
    )?;
    Ok(format!("both equal {expected}"))
}

fn uniform_zero_fixture() -> Check {
    let b1 = ds(&[0, 2, 4], 3);
    let b2 = ds(&[0, 2, 3, 4, 5, 7], 6);
    let r1 = satisfies_udz(&b1).map_err(|e| e.to_string())?;
    let r2 = satisfies_udz(&b2).map_err(|e| e.to_string())?;
    ensure(!r1.holds, || "{0,2,4} reported as satisfying".into())?;
    ensure(r1.witness == Some(ZeroAngle::Rational(Angle::new(1, 6))), || {
        format!("witness {:?}, expected 1/6", r1.witness)
    })?;
    ensure(r2.holds && r2.witness.is_none(), || {
        format!("{{0,2,3,4,5,7}} gave {r2:?}")
    })?;
    // The witness is a zero of the mask, and the root locator agrees.
    ensure(mask(&[0, 2, 4], 1.0 / 6.0).norm() < 1e-12, || {
        "mask does not vanish at 1/6".into()
    })?;
    ensure(!udz_oracle(&[1, -1, 1], 3), || "root oracle accepts {0,2,4}".into())?;
    ensure(udz_oracle(&[1, -1, 1], 6), || {
        "root oracle rejects {0,2,3,4,5,7}".into()
    })?;
    Ok("(false, 1/6) and (true, none)".into())
}

fn random_consecutive_stage(rng: &mut StdRng, divisible: bool) -> (u64, u64) {
    let m = rng.random_range(2..=6u64);
    let n = if divisible {
        m * rng.random_range(1..=4u64)
    } else {
        rng.random_range(m..=3 * m)
    };
    (n, m)
}

fn consecutive_verdicts() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    let mut spectral = 0;
    for case in 0..50 {
        let bias = rng.random_bool(0.6);
        let prefix_len = rng.random_range(0..=5usize);
        let period_len = rng.random_range(1..=3usize);
        let draw = |rng: &mut StdRng| {
            let divisible = bias || rng.random_bool(0.5);
            random_consecutive_stage(rng, divisible)
        };
        let prefix: Vec<(u64, u64)> = (0..prefix_len).map(|_| draw(&mut rng)).collect();
        let period: Vec<(u64, u64)> = (0..period_len).map(|_| draw(&mut rng)).collect();
        let build = |p: &[(u64, u64)]| p.iter().map(|&(n, m)| st(n, &consecutive(m))).collect::<Vec<_>>();
        let seq = MoranSequence::new(build(&prefix), Tail::Periodic(build(&period))).unwrap();
        // Positions 2, 3, ... cover the prefix after its head and, since the
        // period recurs, every period stage.
        let expected = prefix.iter().skip(1).chain(&period).all(|&(n, m)| n % m == 0);
        let v = decide_spectrality(&seq);
        let want = if expected {
            Outcome::Spectral
        } else {
            Outcome::NotSpectral
        };
        ensure(v.outcome == want, || {
            format!("case {case}: {seq} gave {}, expected {want}", v.outcome)
        })?;
        let m1 = prefix.first().or(period.first()).unwrap().1;
        let n1 = rng.random_range(m1..=m1 * 7 + 3);
        let rescaled = seq.with_first_scale(n1).unwrap();
        let w = decide_spectrality(&rescaled);
        ensure(w.outcome == v.outcome, || {
            format!("case {case}: first scale {n1} changed {} to {}", v.outcome, w.outcome)
        })?;
        spectral += usize::from(expected);
    }
    Ok(format!(
        "50 sequences ({spectral} spectral), verdicts unchanged under first-scale replacement"
    ))
}

fn noncompact_family(scale: &str) -> MoranSequence {
    MoranSequence::new(
        Vec::new(),
        Tail::ShiftedTop {
            size: Formula::parse("(2k+1)^2").unwrap(),
            multiplier: Formula::parse("1 + P").unwrap(),
            scale: Formula::parse(scale).unwrap(),
        },
    )
    .unwrap()
}

fn noncompact_family_verdicts() -> Check {
    let seq = noncompact_family("(2k+1)^2");
    let rbc = check_rbc(&seq, 20).map_err(|e| e.to_string())?;
    ensure(rbc.status == RbcStatus::Holds, || {
        format!("remainder bound {}", rbc.status)
    })?;
    let oracle = (1..=20i64).fold(BigRational::zero(), |acc, k| {
        acc + BigRational::new(BigInt::from(1), BigInt::from((2 * k + 1) * (2 * k + 1)))
    });
    ensure(rbc.partial_sum == oracle, || {
        format!("partial sum {} != {oracle}", rbc.partial_sum)
    })?;
    let v = decide_spectrality(&seq);
    ensure(v.outcome == Outcome::Spectral, || format!("verdict {}", v.outcome))?;
    let offset = decide_spectrality(&noncompact_family("(2k+1)^2 + 1"));
    ensure(offset.outcome == Outcome::NotSpectral, || {
        format!("offset verdict {}", offset.outcome)
    })?;
    let rule = offset.rule.map(|r| r.to_string()).unwrap_or_default();
    let divisibility_noted = offset.notes.iter().any(|n| n.contains("divid") || n.contains('|'));
    ensure(divisibility_noted, || {
        format!("offset verdict notes lack the divisibility failure: {:?}", offset.notes)
    })?;
    Ok(format!("partial sum {oracle}; spectral, offset not spectral by {rule}"))
}

fn frequency_set_search() -> Check {
    let triple = find_hadamard_l(4, &ds(&[0, 2], 2)).ok_or("no frequency set found")?;
    ensure(triple.frequencies == vec![0, 1], || {
        format!("found {:?}", triple.frequencies)
    })?;
    let defect = triple.unitarity_defect();
    ensure(defect < 1e-12, || format!("unitarity defect {defect:e}"))?;
    let mut rng = StdRng::seed_from_u64(0x5eed_0005);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let xi: f64 = rng.random_range(-50.0..50.0);
        let s: f64 = triple
            .frequencies
            .iter()
            .map(|&l| mask(&[0, 2], (xi + l as f64) / 4.0).norm_sqr())
            .sum();
        worst = worst.max((s - 1.0).abs());
    }
    ensure(worst < 1e-10, || format!("Gram identity off by {worst:e}"))?;
    Ok(format!("L = {{0, 1}}, defect {defect:.1e}, Gram residual {worst:.1e}"))
}

fn quarter() -> MoranSequence {
    MoranSequence::periodic(vec![st(4, &[0, 2])]).unwrap()
}

fn quarter_spectrum(depth: usize) -> SpectrumTruncation {
    let (triples, exact) = sequence_triples(&quarter(), depth, false).unwrap();
    assert!(exact);
    canonical_spectrum(&triples, depth).unwrap()
}

/// `prod_{k <= depth} cos(2 pi xi / 4^k)^2`, the squared truncated transform.
fn quarter_power(xi: f64, depth: u32) -> f64 {
    (1..=depth)
        .map(|k| (2.0 * PI * xi / 4f64.powi(k as i32)).cos().powi(2))
        .product()
}

fn completeness_probe() -> Check {
    let plan = TruncationPlan::new(12, 1.0).map_err(|e| e.to_string())?;
    let xs = golden_samples(64, 0.0, 1.0);
    let mut means = Vec::new();
    for depth in 2..=4 {
        let lambda = quarter_spectrum(depth);
        let q = q_partial(&quarter(), &plan, lambda.elements(), &xs).map_err(|e| e.to_string())?;
        means.push(q.mean());
        if depth < 4 {
            continue;
        }
        ensure(lambda.len() == 16, || format!("{} elements", lambda.len()))?;
        let orth = orthogonality_check(&quarter(), &plan, lambda.elements()).map_err(|e| e.to_string())?;
        ensure(orth.pairs == 120 && orth.all_certified(), || {
            format!("{}/{} pairs certified", orth.certified_pairs, orth.pairs)
        })?;
        ensure(q.max() <= 1.0 + 1e-9, || format!("Q reaches {}", q.max()))?;
        ensure(q.mean() >= 0.95, || format!("mean Q {}", q.mean()))?;
        for (x, got) in xs.iter().zip(&q.q_values) {
            let want: f64 = lambda
                .elements()
                .iter()
                .map(|l| quarter_power(x + l.to_f64().unwrap(), 12))
                .sum();
            ensure((got - want).abs() < 1e-12, || {
                format!("Q({x}) = {got}, direct sum {want}")
            })?;
        }
    }
    ensure(means.windows(2).all(|w| w[0] < w[1]), || {
        format!("means not increasing: {means:?}")
    })?;
    Ok(format!("120/120 pairs certified, mean Q by depth {means:.6?}"))
}

fn random_crs(rng: &mut StdRng) -> Vec<i64> {
    let m = rng.random_range(2..=8i64);
    (0..m)
        .map(|r| {
            let top = (40 - r) / m;
            r + m * rng.random_range(0..=top)
        })
        .collect()
}

fn mask_zero_oracle() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed_0007);
    let mut checks = 0usize;
    let mut zeros = 0usize;
    for case in 0..200 {
        let b = random_crs(&mut rng);
        let set = ds(&b, b.len() as u64);
        for n in 1..=48i64 {
            for j in 0..n {
                let exact = mask_is_zero_at_fraction(&set, j, n as u64);
                let numeric = mask_at_fraction(&b, j, n) < 1e-9;
                ensure(exact == numeric, || {
                    format!("case {case}: B = {b:?} at {j}/{n}: exact {exact}, summation {numeric}")
                })?;
                checks += 1;
                zeros += usize::from(exact);
            }
        }
    }
    Ok(format!(
        "200 digit sets, {checks} fractions, {zeros} zeros, no disagreement"
    ))
}

fn regrouping_identity() -> Check {
    let plan = TruncationPlan::new(10, 1.0).map_err(|e| e.to_string())?;
    let lambda = quarter_spectrum(3);
    let xs = golden_samples(32, 0.0, 1.0);
    let q = q_partial(&quarter(), &plan, lambda.elements(), &xs).map_err(|e| e.to_string())?;
    let pq = PqEvaluator::new(&quarter(), &plan).map_err(|e| e.to_string())?;
    let regrouped = pq.regrouped_q_many(&lambda, &xs);
    let mut worst: f64 = 0.0;
    for ((x, a), b) in xs.iter().zip(&q.q_values).zip(&regrouped) {
        worst = worst.max((a - b).abs());
        ensure((a - b).abs() < 1e-9, || format!("at {x}: Q {a}, regrouped {b}"))?;
    }
    Ok(format!("32 samples, largest difference {worst:.1e}"))
}

/// Transform of `(1/3) 1_[0,2] + (1/3) 1_[1/2,3/2]`.
fn uneven_density_transform(xi: f64) -> Complex64 {
    if xi == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let interval = |a: f64, b: f64| {
        (Complex64::cis(-2.0 * PI * xi * a) - Complex64::cis(-2.0 * PI * xi * b)) / Complex64::new(0.0, 2.0 * PI * xi)
    };
    (interval(0.0, 2.0) + interval(0.5, 1.5)) / 3.0
}

fn uneven_density() -> Check {
    let config = parse_config(gallery_config("uneven_density").ok_or("fixture missing")?).map_err(|e| e.to_string())?;
    let expected_seq = MoranSequence::new(vec![st(2, &[0, 1])], Tail::Periodic(vec![st(2, &[0, 3])])).unwrap();
    ensure(config.sequence == expected_seq, || {
        format!("fixture is {}", config.sequence)
    })?;
    ensure(config.numeric.depth == 14, || {
        format!("fixture depth {}", config.numeric.depth)
    })?;
    let v = decide_spectrality(&config.sequence);
    ensure(v.outcome == Outcome::Unknown, || format!("verdict {}", v.outcome))?;
    ensure(!v.notes.is_empty(), || "unknown verdict without notes".into())?;
    let mut config = config;
    config.numeric.samples = 32;
    let csv = export_to_string(&config, ExportKind::MuHat, None).map_err(|e| e.to_string())?;
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    let headers = reader.headers().map_err(|e| e.to_string())?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or(format!("no {name} column"))
    };
    let (xi_col, abs_col) = (col("xi")?, col("abs")?);
    let mut rows = 0;
    let mut worst: f64 = 0.0;
    for record in reader.records() {
        let record = record.map_err(|e| e.to_string())?;
        let xi: f64 = record[xi_col].parse().map_err(|_| "bad xi")?;
        let got: f64 = record[abs_col].parse().map_err(|_| "bad abs")?;
        let want = uneven_density_transform(xi).norm();
        worst = worst.max((got - want).abs());
        ensure((got - want).abs() < 2e-3, || {
            format!("|mu_hat({xi})| = {got}, closed form {want}")
        })?;
        rows += 1;
    }
    ensure(rows == 32, || format!("{rows} rows exported"))?;
    Ok(format!(
        "unknown ({} notes); 32 points within {worst:.1e} of the closed form",
        v.notes.len()
    ))
}

fn shifted_top_uniform_zeros() -> Check {
    let mut cases = Vec::new();
    for m in [3u64, 5, 7, 9] {
        for n in 1..=3i64 {
            let b = shifted_top_digits(m, &BigInt::from(n));
            let r = satisfies_udz(&b).map_err(|e| e.to_string())?;
            ensure(r.holds, || format!("M = {m}, n = {n}: witness {:?}", r.witness))?;
            let digits: Vec<i64> = b.elements().iter().map(|d| d.to_i64().unwrap()).collect();
            let f = int_coeffs(&character_polynomial(&b).map_err(|e| e.to_string())?);
            ensure(poly_mul(&f, &vec![1; m as usize]) == indicator(&digits), || {
                format!("M = {m}, n = {n}: quotient check")
            })?;
            ensure(udz_oracle(&f, m), || format!("M = {m}, n = {n}: root oracle disagrees"))?;
            cases.push((m, n));
        }
    }
    Ok(format!("{} digit sets satisfy the condition", cases.len()))
}

struct Criterion {
    title: &'static str,
    limit: Option<Duration>,
    run: fn() -> Check,
}

fn main() -> ExitCode {
    let ms = Duration::from_millis;
    let criteria = [
        Criterion {
            title: "character polynomial fixture",
            limit: Some(ms(1)),
            run: character_polynomial_fixture,
        },
        Criterion {
            title: "uniform zero fixture",
            limit: None,
            run: uniform_zero_fixture,
        },
        Criterion {
            title: "consecutive-digit verdicts",
            limit: Some(ms(1000)),
            run: consecutive_verdicts,
        },
        Criterion {
            title: "noncompact family verdicts",
            limit: Some(ms(1000)),
            run: noncompact_family_verdicts,
        },
        Criterion {
            title: "frequency set search",
            limit: None,
            run: frequency_set_search,
        },
        Criterion {
            title: "completeness probe",
            limit: Some(ms(10_000)),
            run: completeness_probe,
        },
        Criterion {
            title: "mask zero oracle",
            limit: Some(ms(30_000)),
            run: mask_zero_oracle,
        },
        Criterion {
            title: "regrouping identity",
            limit: None,
            run: regrouping_identity,
        },
        Criterion {
            title: "uneven density transform",
            limit: None,
            run: uneven_density,
        },
        Criterion {
            title: "shifted-top uniform zeros",
            limit: Some(ms(1000)),
            run: shifted_top_uniform_zeros,
        },
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(format!("panic: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!("took {elapsed:.2?}, limit {limit:.2?}")),
            (o, _) => o,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag} {} [{elapsed:.2?}]: {detail}", i + 1, c.title);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
