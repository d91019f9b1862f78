//! Acceptance suite. Runs every criterion in sequence so the timings are not
//! distorted by parallel tests, prints one PASS/FAIL line per criterion and
//! fails at the end if any criterion failed.
//!
//! `cargo test -p ternrec-cli --test acceptance -- --nocapture`

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use serde_json::Value;
use ternrec_core::arith::primes_up_to;
use ternrec_core::experiments::{
    beukers_random, counterexample_density, divisor_interval_count, lemma5_sweep, multiplier_sweep,
    shifted_prime_count, smooth_count, upper_density_trend, z_density,
};
use ternrec_core::recurrence::{fibonacci, term_iter};
use ternrec_core::representation::{qr_obstruction, represent_with, RepresentConfig, Representation};
use ternrec_core::{classify_prime, solve_exponents, ExperimentReport, Preset};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn passed(r: &ExperimentReport) -> Result<(), String> {
    ensure(r.pass, || format!("{} violations: {:?}", r.name, r.violations))
}

fn ternrec(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ternrec"))
        .args(args)
        .env_remove("TERNARY_THREADS")
        .output()
        .expect("spawn ternrec")
}

fn c1_conditions() -> Outcome {
    // (preset, expected cond_i, cond_ii, cond_iii, required failure reasons)
    let cases: [(&str, bool, bool, bool, &[(&str, &str)]); 5] = [
        ("tribonacci", true, true, true, &[]),
        ("pow2-plus-fib", true, true, true, &[]),
        (
            "pow2-plus-n",
            false,
            false,
            false,
            &[("cond_i", "repeated root"), ("cond_iii", "repeated root")],
        ),
        ("square-pow", false, false, true, &[("cond_i", "factors completely")]),
        ("five-fib-sq-minus-4", true, false, true, &[("cond_ii", "integer root a = -1")]),
    ];
    for (name, i, ii, iii, reasons) in cases {
        let o = ternrec(&["analyze", "--preset", name]);
        let v: Value = serde_json::from_slice(&o.stdout).map_err(|e| format!("{name}: {e}"))?;
        let want_exit = if i && ii && iii { 0 } else { 2 };
        ensure(o.status.code() == Some(want_exit), || format!("{name}: exit {:?}", o.status.code()))?;
        for (key, want) in [("cond_i", i), ("cond_ii", ii), ("cond_iii", iii)] {
            ensure(v[key]["holds"] == want, || format!("{name}: {key} = {}", v[key]))?;
        }
        for (key, fragment) in reasons {
            let reason = v[key]["reason"].as_str().unwrap_or("");
            ensure(reason.contains(fragment), || format!("{name}: {key} reason {reason:?}"))?;
        }
    }
    Ok("tribonacci, pow2-plus-fib hold; pow2-plus-n fails i,iii; square-pow fails i; five-fib fails ii (a = -1)".into())
}

fn c2_constants() -> Outcome {
    let e = solve_exponents().map_err(|e| e.to_string())?;
    let kd = e.kappa * e.delta;
    ensure((e.delta - 0.086071).abs() <= 1e-6, || format!("delta {}", e.delta))?;
    ensure((e.kappa - 0.600541).abs() <= 1e-4, || format!("kappa {}", e.kappa))?;
    ensure((kd - 0.0516894).abs() <= 2e-6, || format!("kappa*delta {kd}"))?;
    let dev = (e.lambda - e.lambda_published).abs();
    ensure(dev <= 5e-4, || format!("lambda {} deviates by {dev}", e.lambda))?;
    Ok(format!(
        "delta={:.7} kappa={:.7} kappa*delta={:.8} lambda={:.7} (|lambda-0.07452|={dev:.1e})",
        e.delta, e.kappa, kd, e.lambda
    ))
}

fn c3_density() -> Outcome {
    let mut out = Vec::new();
    for p in [Preset::Tribonacci, Preset::Pow2PlusFib] {
        let r = z_density(&p.spec(), 1_000_000).map_err(|e| e.to_string())?;
        let ratio = r.observation("ratio").unwrap();
        ensure((0.45..=0.55).contains(&ratio), || format!("{}: ratio {ratio}", p.name()))?;
        out.push(format!("{} {ratio:.4}", p.name()));
    }
    Ok(format!("#Z(1e6)/pi(1e6): {}", out.join(", ")))
}

fn c4_lemma5() -> Outcome {
    let mut out = Vec::new();
    for p in [Preset::Tribonacci, Preset::Pow2PlusFib] {
        let r = lemma5_sweep(&p.spec(), 101, 99_999).map_err(|e| e.to_string())?;
        passed(&r)?;
        out.push(format!("{} {} primes", p.name(), r.observation("primes_checked").unwrap()));
    }
    Ok(format!("0 violations: {}", out.join(", ")))
}

fn c5_multipliers() -> Outcome {
    let mut out = Vec::new();
    for p in [Preset::Tribonacci, Preset::Pow2PlusFib] {
        let r = multiplier_sweep(&p.spec(), 3, 9_999).map_err(|e| e.to_string())?;
        passed(&r)?;
        let max = r.observation("max_mult_order").unwrap();
        ensure(max <= 6.0, || format!("{}: max mult_order {max}", p.name()))?;
        out.push(format!("{} max {max}", p.name()));
    }
    let seven = classify_prime(&Preset::Tribonacci.spec(), 7).map_err(|e| e.to_string())?;
    ensure(seven.mult_order == Some(3), || format!("tribonacci p=7: {:?}", seven.mult_order))?;
    Ok(format!("{}; tribonacci p=7 -> 3", out.join(", ")))
}

fn brute_min_v(big: u64, n: u64) -> Option<u64> {
    let mut v = 0;
    while n * v * v <= big {
        let r = big - n * v * v;
        let s = (r as f64).sqrt() as u64;
        if (s.saturating_sub(1)..=s + 1).any(|u| u * u == r) {
            return Some(v);
        }
        v += 1;
    }
    None
}

fn c6_representation() -> Outcome {
    let tiers = [
        RepresentConfig::default(),
        RepresentConfig {
            enumeration_limit: 0,
            ..Default::default()
        },
    ];
    let mut checked = 0u64;
    for n in 1..=50u64 {
        for big in 0..=10_000u64 {
            let want = brute_min_v(big, n);
            for cfg in &tiers {
                let got = represent_with(&BigUint::from(big), n, cfg).map_err(|e| e.to_string())?.result;
                let ok = match (&got, want) {
                    (Representation::Member { u, v }, Some(wv)) => {
                        *v == BigUint::from(wv) && u * u + BigUint::from(n) * v * v == BigUint::from(big)
                    }
                    (Representation::NonMember, None) => true,
                    _ => false,
                };
                ensure(ok, || format!("N={big} n={n}: got {got:?}, exhaustive {want:?}"))?;
                checked += 1;
            }
        }
    }
    let mut fib = 0;
    for p in primes_up_to(101).into_iter().filter(|p| p % 4 == 1) {
        let f = fibonacci(p).to_biguint().unwrap();
        for cfg in &tiers {
            match represent_with(&f, p, cfg).map_err(|e| e.to_string())?.result {
                Representation::Member { u, v } => {
                    ensure(&u * &u + BigUint::from(p) * &v * &v == f, || format!("F_{p}: bad witness"))?;
                    if p == 13 {
                        ensure(f == BigUint::from(233u32) && u == BigUint::from(5u32) && v == BigUint::from(4u32), || {
                            format!("F_13 = {u}^2 + 13*{v}^2")
                        })?;
                    }
                }
                other => return Err(format!("F_{p}: {other:?}")),
            }
        }
        fib += 1;
    }
    Ok(format!(
        "{checked} (N, n, tier) cases agree with exhaustive search; {fib} primes p = 1 mod 4 give F_p = u^2 + p v^2, F_13 = 5^2 + 13*4^2"
    ))
}

fn isqrt_u128(r: u128) -> u128 {
    let mut s = (r as f64).sqrt() as u128;
    while s * s > r {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= r {
        s += 1;
    }
    s
}

fn c7_obstruction() -> Outcome {
    let spec = Preset::Tribonacci.spec();
    let terms: Vec<u128> = term_iter(&spec, 60)
        .map_err(|e| e.to_string())?
        .map(|t| u128::try_from(t.to_biguint().unwrap()).unwrap())
        .collect();
    let mut flagged = Vec::new();
    for n in 1..=60u64 {
        if let Some(p) = qr_obstruction(&spec, n) {
            let big = terms[n as usize];
            let nn = n as u128;
            let mut v = 0u128;
            while nn * v * v <= big {
                let r = big - nn * v * v;
                let s = isqrt_u128(r);
                ensure(s * s != r, || format!("n={n} flagged by p={p} but U_n = {s}^2 + {n}*{v}^2"))?;
                v += 1;
            }
            flagged.push((n, p));
        }
    }
    ensure(flagged.contains(&(7, 7)), || format!("n=7 not flagged by 7: {flagged:?}"))?;
    Ok(format!("{} obstructed n <= 60 all confirmed non-members; n=7 flagged by p=7", flagged.len()))
}

fn c8_counterexamples() -> Outcome {
    let mut out = Vec::new();
    for p in [Preset::SquarePow, Preset::Pow2PlusN, Preset::FiveFibSqMinus4] {
        let r = counterexample_density(p, 1000).map_err(|e| e.to_string())?;
        passed(&r)?;
        let d = r.observation("class_density").unwrap();
        ensure(d == 1.0, || format!("{}: class density {d}", p.name()))?;
        out.push(format!("{} {}", p.name(), d));
    }
    let all = counterexample_density(Preset::SquarePow, 1000).unwrap();
    ensure(all.observation("member_density") == Some(1.0), || "square-pow member density".into())?;
    Ok(format!("member density on class (all, even, odd n <= 1000): {}", out.join(", ")))
}

// Regression values from the first run: certified non-members among n <= x.
const PINNED_NON_MEMBERS: [(u64, u64); 3] = [(1_000, 570), (10_000, 6_043), (100_000, 64_919)];

fn c9_theorem_shape() -> Outcome {
    let xs: Vec<u64> = PINNED_NON_MEMBERS.iter().map(|&(x, _)| x).collect();
    let r = upper_density_trend(&Preset::Tribonacci.spec(), &xs, 120, 0.6).map_err(|e| e.to_string())?;
    passed(&r)?;
    let mut ds = Vec::new();
    for (x, non) in PINNED_NON_MEMBERS {
        let d = r.observation(&format!("upper_density_{x}")).unwrap();
        let pinned = (x - non) as f64 / x as f64;
        ensure((d - pinned).abs() < 1e-12, || format!("x={x}: density {d}, pinned {pinned}"))?;
        ds.push(d);
    }
    ensure(ds.windows(2).all(|w| w[1] < w[0]) && ds[2] < 0.6, || format!("{ds:?}"))?;
    Ok(format!("upper densities {ds:?} strictly decreasing, last < 0.6"))
}

fn c10_beukers() -> Outcome {
    let r = beukers_random(1000, 5, 500, 1).map_err(|e| e.to_string())?;
    passed(&r)?;
    let max = r.observation("max_zero_count").unwrap();
    ensure(max <= 6.0, || format!("max zero count {max}"))?;
    Ok(format!("1000 nondegenerate specs, max zero count {max} <= 6"))
}

fn c11_counts() -> Outcome {
    let s = |e: ternrec_core::Error| e.to_string();
    let got = [
        smooth_count(10, 2).map_err(s)?,
        smooth_count(100, 5).map_err(s)?,
        divisor_interval_count(20, 2.0, 4.0).map_err(s)?,
        shifted_prime_count(50, 2.0, 4.0, -1).map_err(s)?,
    ];
    ensure(got == [4, 34, 6, 6], || format!("{got:?}"))?;
    Ok("Psi(10,2)=4, Psi(100,5)=34, H(20,2,4)=6, P(50,2,4,-1)=6".into())
}

fn c12_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = Vec::new();
    for threads in ["1", "8"] {
        let path = dir.path().join(format!("t{threads}.csv"));
        let o = ternrec(&[
            "--threads",
            threads,
            "count",
            "--preset",
            "tribonacci",
            "--x",
            "10000",
            "--out",
            path.to_str().unwrap(),
            "--summary",
            dir.path().join("s.json").to_str().unwrap(),
        ]);
        ensure(o.status.success(), || format!("threads {threads}: exit {:?}", o.status.code()))?;
        files.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    ensure(files[0] == files[1], || "CSV differs between 1 and 8 threads".into())?;
    Ok(format!("{} bytes identical for --threads 1 and 8", files[0].len()))
}

#[test]
fn acceptance() {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 12] = [
        (1, "condition classification", Duration::from_secs(1), c1_conditions),
        (2, "exponent constants", Duration::from_millis(100), c2_constants),
        (3, "root-count density", Duration::from_secs(120), c3_density),
        (4, "order divisibility sweep", Duration::from_secs(300), c4_lemma5),
        (5, "multiplier bound", Duration::from_secs(60), c5_multipliers),
        (6, "representation oracle", Duration::from_secs(120), c6_representation),
        (7, "obstruction soundness", Duration::from_secs(10), c7_obstruction),
        (8, "counterexample densities", Duration::from_secs(30), c8_counterexamples),
        (9, "upper-density trend", Duration::from_secs(600), c9_theorem_shape),
        (10, "zero-count bound", Duration::from_secs(120), c10_beukers),
        (11, "brute-force counts", Duration::from_secs(1), c11_counts),
        (12, "thread determinism", Duration::from_secs(60), c12_determinism),
    ];
    let mut failures = 0;
    println!();
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|d| {
            if elapsed <= limit {
                Ok(d)
            } else {
                Err(format!("took {elapsed:.2?}, limit {limit:?}: {d}"))
            }
        });
        match outcome {
            Ok(detail) => println!("PASS {id:>2} {name} [{elapsed:.2?} / {limit:?}]: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL {id:>2} {name} [{elapsed:.2?} / {limit:?}]: {detail}");
            }
        }
    }
    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}
