//! Desk-scale checks of the structural statements: density of Z, order
//! divisibilities, multiplier groups, zero counts, character sums, sieve
//! counts and membership densities.

pub mod counts;

use std::collections::BTreeMap;

use num_bigint::{BigInt, Sign};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::factor::factor_u64;
use crate::arith::sieve::{prime_count, primes_up_to};
use crate::charpoly::is_degenerate;
use crate::error::{Error, Result};
use crate::modular::{classify_prime, is_z_prime, z_primes_in, PrimeContext, PrimeProfile, DEFAULT_SCAN_BUDGET};
use crate::recurrence::{term_iter, Preset, RecurrenceSpec};
use crate::representation::{count_range_with, witness_formula, MembershipStatus, RepresentConfig};

pub use counts::{divisor_interval_count, shifted_prime_count, smooth_count, COUNT_BUDGET};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observation {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub parameters: BTreeMap<String, Value>,
    pub observations: Vec<Observation>,
    pub violations: Vec<Value>,
    pub pass: bool,
}

impl ExperimentReport {
    fn new(name: &str) -> Self {
        ExperimentReport {
            name: name.to_string(),
            parameters: BTreeMap::new(),
            observations: Vec::new(),
            violations: Vec::new(),
            pass: false,
        }
    }

    fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    fn observe(&mut self, label: impl Into<String>, value: f64) {
        self.observations.push(Observation {
            label: label.into(),
            value,
        });
    }

    pub fn observation(&self, label: &str) -> Option<f64> {
        self.observations.iter().find(|o| o.label == label).map(|o| o.value)
    }

    /// One-line human-readable summary.
    pub fn summary(&self) -> String {
        let obs: Vec<String> = self
            .observations
            .iter()
            .map(|o| format!("{}={}", o.label, o.value))
            .collect();
        format!(
            "{} {}: {} ({} violations)",
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            obs.join(", "),
            self.violations.len()
        )
    }
}

fn spec_param(spec: &RecurrenceSpec) -> Value {
    serde_json::to_value(spec).expect("spec serializes")
}

fn z_primes_between(spec: &RecurrenceSpec, lo: u64, hi: u64) -> Result<Vec<u64>> {
    Ok(z_primes_in(spec, lo, hi)?.collect())
}

/// Profiles of the primes of Z in `[lo, hi]`, computed in parallel and
/// returned in increasing order of `p`.
fn profiles(spec: &RecurrenceSpec, lo: u64, hi: u64) -> Result<Vec<PrimeProfile>> {
    z_primes_between(spec, lo, hi)?
        .into_par_iter()
        .map(|p| classify_prime(spec, p))
        .collect()
}

pub const DEFAULT_DENSITY_TOLERANCE: f64 = 0.05;

/// `#Z(x) / pi(x)` against the limiting value 1/2.
pub fn z_density(spec: &RecurrenceSpec, x: u64) -> Result<ExperimentReport> {
    z_density_with(spec, x, DEFAULT_DENSITY_TOLERANCE)
}

pub fn z_density_with(spec: &RecurrenceSpec, x: u64, tolerance: f64) -> Result<ExperimentReport> {
    if x < 3 {
        return Err(Error::invalid("x must be at least 3"));
    }
    spec.ensure_ternary()?;
    let primes = primes_up_to(x);
    let z = primes.par_iter().filter(|&&p| is_z_prime(spec, p)).count() as u64;
    let pi = prime_count(x);
    let ratio = z as f64 / pi as f64;
    let mut r = ExperimentReport::new("z_density")
        .param("spec", spec_param(spec))
        .param("x", x)
        .param("tolerance", tolerance)
        .param("target", 0.5);
    r.observe("z_count", z as f64);
    r.observe("pi_x", pi as f64);
    r.observe("ratio", ratio);
    r.pass = (ratio - 0.5).abs() <= tolerance;
    Ok(r)
}

fn check_range(p_min: u64, p_max: u64) -> Result<()> {
    if p_min < 3 || p_min >= p_max {
        return Err(Error::invalid(format!("need 3 <= p_min < p_max, got {p_min}, {p_max}")));
    }
    Ok(())
}

/// `ord(alpha) | p - 1`, `ord(beta/gamma) | p + 1`, and when `t_p = k_p` the
/// chain `ord(alpha) ord(beta/gamma) | 2 t_p | 8 ord(alpha) ord(beta/gamma)
/// | 8 (p-1)(p+1)`.
pub fn lemma5_sweep(spec: &RecurrenceSpec, p_min: u64, p_max: u64) -> Result<ExperimentReport> {
    check_range(p_min, p_max)?;
    let all = profiles(spec, p_min, p_max)?;
    let mut r = ExperimentReport::new("lemma5")
        .param("spec", spec_param(spec))
        .param("p_min", p_min)
        .param("p_max", p_max);
    let mut chain_checked = 0u64;
    for pr in &all {
        let p = pr.p as u128;
        let (oa, or, t, k) = (
            pr.ord_alpha.unwrap() as u128,
            pr.ord_ratio.unwrap() as u128,
            pr.t_p.unwrap() as u128,
            pr.k_p.unwrap() as u128,
        );
        let mut fail = |check: &str| {
            r.violations.push(json!({
                "p": pr.p, "check": check, "ord_alpha": oa as u64, "ord_ratio": or as u64,
                "t_p": t as u64, "k_p": k as u64,
            }))
        };
        if (p - 1) % oa != 0 {
            fail("ord_alpha | p-1");
        }
        if (p + 1) % or != 0 {
            fail("ord_ratio | p+1");
        }
        if k % t != 0 {
            fail("t_p | k_p");
        }
        if t == k {
            chain_checked += 1;
            let prod = oa * or;
            if (2 * t) % prod != 0 {
                fail("ord_alpha*ord_ratio | 2t_p");
            }
            if (8 * prod) % (2 * t) != 0 {
                fail("2t_p | 8*ord_alpha*ord_ratio");
            }
            if (8 * (p - 1) * (p + 1)) % (8 * prod) != 0 {
                fail("8*ord_alpha*ord_ratio | 8(p-1)(p+1)");
            }
        }
    }
    r.observe("primes_checked", all.len() as f64);
    r.observe("chain_checked", chain_checked as f64);
    r.observe(
        "t_equals_k_fraction",
        if all.is_empty() { 0.0 } else { chain_checked as f64 / all.len() as f64 },
    );
    r.pass = r.violations.is_empty();
    Ok(r)
}

/// `mult_order <= 6` and `mult_order | k_p` for every profiled prime.
pub fn multiplier_sweep(spec: &RecurrenceSpec, p_min: u64, p_max: u64) -> Result<ExperimentReport> {
    check_range(p_min, p_max)?;
    let all = profiles(spec, p_min, p_max)?;
    let mut r = ExperimentReport::new("multipliers")
        .param("spec", spec_param(spec))
        .param("p_min", p_min)
        .param("p_max", p_max);
    let mut histogram = BTreeMap::<u64, u64>::new();
    for pr in &all {
        let (m, k) = (pr.mult_order.unwrap(), pr.k_p.unwrap());
        *histogram.entry(m).or_default() += 1;
        if m > 6 || k % m != 0 {
            r.violations.push(json!({"p": pr.p, "mult_order": m, "k_p": k}));
        }
    }
    r.observe("primes_checked", all.len() as f64);
    r.observe("max_mult_order", histogram.keys().last().copied().unwrap_or(0) as f64);
    for (m, c) in histogram {
        r.observe(format!("mult_order_{m}"), c as f64);
    }
    r.pass = r.violations.is_empty();
    Ok(r)
}

/// Zeros of `U_n` for `n <= n_max`; at most 6 for nondegenerate sequences.
pub fn beukers_zero_count(spec: &RecurrenceSpec, n_max: u64) -> Result<ExperimentReport> {
    spec.ensure_nonzero()?;
    if is_degenerate(spec).degenerate {
        return Err(Error::invalid(format!("{spec} is degenerate")));
    }
    let zeros: Vec<u64> = term_iter(spec, n_max)?
        .enumerate()
        .filter(|(_, t)| t.is_zero())
        .map(|(n, _)| n as u64)
        .collect();
    let mut r = ExperimentReport::new("beukers")
        .param("spec", spec_param(spec))
        .param("n_max", n_max)
        .param("zeros", zeros.clone());
    r.observe("zero_count", zeros.len() as f64);
    if zeros.len() > 6 {
        r.violations.push(json!({"spec": spec_param(spec), "zeros": zeros}));
    }
    r.pass = r.violations.is_empty();
    Ok(r)
}

/// `beukers_zero_count` on `samples` random nondegenerate specs with all
/// six entries in `[-bound, bound]`, drawn from a seeded generator.
pub fn beukers_random(samples: usize, bound: i64, n_max: u64, seed: u64) -> Result<ExperimentReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut specs = Vec::with_capacity(samples);
    let mut rejected = 0u64;
    while specs.len() < samples {
        let mut c = || rng.gen_range(-bound..=bound);
        let s = RecurrenceSpec::new(c(), c(), c(), c(), c(), c());
        if s.a3 == 0 || s.is_zero_sequence() || is_degenerate(&s).degenerate {
            rejected += 1;
            continue;
        }
        specs.push(s);
    }
    let results: Vec<ExperimentReport> = specs
        .par_iter()
        .map(|s| beukers_zero_count(s, n_max))
        .collect::<Result<_>>()?;
    let mut r = ExperimentReport::new("beukers_random")
        .param("samples", samples)
        .param("bound", bound)
        .param("n_max", n_max)
        .param("seed", seed);
    let max = results.iter().map(|x| x.observation("zero_count").unwrap()).fold(0.0, f64::max);
    let with_zero = results.iter().filter(|x| x.observation("zero_count").unwrap() > 0.0).count();
    r.observe("max_zero_count", max);
    r.observe("specs_with_zeros", with_zero as f64);
    r.observe("rejected_draws", rejected as f64);
    r.violations = results.into_iter().flat_map(|x| x.violations).collect();
    r.pass = r.violations.is_empty();
    Ok(r)
}

/// `max |S| / p` over `p` in Z up to `p_max` and `c < d <= 3`, where `S` is
/// the Legendre sum of `V_{c + d k}` over one period. Passing means the
/// maximum is at most 6.
pub fn char_sum_sweep(spec: &RecurrenceSpec, p_max: u64) -> Result<ExperimentReport> {
    char_sum_sweep_with(spec, p_max, DEFAULT_SCAN_BUDGET)
}

/// As [`char_sum_sweep`], skipping progressions whose scan exceeds `budget` states.
pub fn char_sum_sweep_with(spec: &RecurrenceSpec, p_max: u64, budget: u64) -> Result<ExperimentReport> {
    if p_max < 10 {
        return Err(Error::invalid("p_max must be at least 10"));
    }
    let primes = z_primes_between(spec, 3, p_max)?;
    let rows: Vec<(u64, u64, u64, i64, u64)> = primes
        .par_iter()
        .map(|&p| -> Result<Vec<(u64, u64, u64, i64, u64)>> {
            let ctx = PrimeContext::new(spec, p)?.with_budget(budget);
            let mut out = Vec::new();
            for d in 1..=3u64 {
                for c in 0..d {
                    match ctx.char_sum(c, d) {
                        Ok(s) => out.push((p, c, d, s.sum, s.t_cdp)),
                        Err(Error::Budget { .. }) => {}
                        Err(e) => return Err(e),
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut r = ExperimentReport::new("char_sums")
        .param("spec", spec_param(spec))
        .param("p_max", p_max)
        .param("bound", 6);
    let mut worst = (0.0f64, json!(null));
    for &(p, c, d, s, t) in &rows {
        let ratio = s.unsigned_abs() as f64 / p as f64;
        if ratio > worst.0 {
            worst = (ratio, json!({"p": p, "c": c, "d": d, "sum": s, "t_cdp": t}));
        }
        if ratio > 6.0 {
            r.violations.push(json!({"p": p, "c": c, "d": d, "sum": s, "t_cdp": t}));
        }
    }
    r.observe("sums_computed", rows.len() as f64);
    r.observe("primes", primes.len() as f64);
    r.observe("max_abs_sum_over_p", worst.0);
    r.parameters.insert("worst_case".into(), worst.1);
    r.pass = r.violations.is_empty();
    Ok(r)
}

/// Distinct primes `p | n` with `z3 < p < y2` and `p` in Z.
pub fn omega_iz(spec: &RecurrenceSpec, n: u64, z3: f64, y2: f64) -> Result<u64> {
    if z3 >= y2 {
        return Err(Error::invalid("need z3 < y2"));
    }
    spec.ensure_ternary()?;
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    Ok(factor_u64(n)
        .into_iter()
        .filter(|&(p, _)| (p as f64) > z3 && (p as f64) < y2 && is_z_prime(spec, p))
        .count() as u64)
}

/// Checks the closed-form witnesses of a counterexample preset for every
/// `n <= x` they cover, against exact terms.
pub fn counterexample_density(preset: Preset, x: u64) -> Result<ExperimentReport> {
    let class = match preset {
        Preset::Pow2PlusN => "even",
        Preset::SquarePow => "all",
        Preset::FiveFibSqMinus4 => "odd",
        other => return Err(Error::invalid(format!("{other} has no witness formula"))),
    };
    if x < 10 {
        return Err(Error::invalid("x must be at least 10"));
    }
    let spec = preset.spec();
    let terms: Vec<BigInt> = term_iter(&spec, x)?.collect();
    let in_class = |n: u64| match class {
        "even" => n % 2 == 0,
        "odd" => n % 2 == 1,
        _ => true,
    };
    let mut r = ExperimentReport::new("counterexample")
        .param("preset", preset.name())
        .param("x", x)
        .param("class", class);
    let (mut members, mut class_size, mut class_members) = (0u64, 0u64, 0u64);
    for n in 1..=x {
        let inside = in_class(n);
        class_size += inside as u64;
        let verified = witness_formula(&spec, n).is_some_and(|(u, v)| {
            let lhs = BigInt::from_biguint(Sign::Plus, &u * &u + num_bigint::BigUint::from(n) * &v * &v);
            lhs == terms[n as usize]
        });
        members += verified as u64;
        class_members += (verified && inside) as u64;
        if inside && !verified {
            r.violations.push(json!({"n": n}));
        }
    }
    r.observe("member_density", members as f64 / x as f64);
    r.observe("class_density", class_members as f64 / class_size as f64);
    r.observe("class_size", class_size as f64);
    r.pass = r.violations.is_empty();
    Ok(r)
}

/// Upper-bound densities `(x - #certified non-members) / x` at each `x`,
/// from one classification of `[1, max x]`. Passing means they strictly
/// decrease and the last is below `threshold`.
pub fn upper_density_trend(
    spec: &RecurrenceSpec,
    xs: &[u64],
    n_exact: u64,
    threshold: f64,
) -> Result<ExperimentReport> {
    let x_max = *xs.iter().max().ok_or_else(|| Error::invalid("no x values"))?;
    let report = count_range_with(spec, x_max, n_exact, &RepresentConfig::default())?;
    let mut r = ExperimentReport::new("theorem_shape")
        .param("spec", spec_param(spec))
        .param("xs", xs.to_vec())
        .param("n_exact", n_exact)
        .param("threshold", threshold);
    let mut certified = 0u64;
    let mut obstructed = 0u64;
    let mut densities = Vec::new();
    let mut next = xs.to_vec();
    next.sort_unstable();
    let mut idx = 0;
    for rec in &report.records {
        if rec.status.is_certified_non_member() {
            certified += 1;
        }
        if matches!(rec.status, MembershipStatus::Obstructed { .. }) {
            obstructed += 1;
        }
        while idx < next.len() && next[idx] == rec.n {
            let x = rec.n as f64;
            let d = (x - certified as f64) / x;
            r.observe(format!("upper_density_{}", rec.n), d);
            r.observe(format!("obstructed_density_{}", rec.n), obstructed as f64 / x);
            densities.push(d);
            idx += 1;
        }
    }
    let decreasing = densities.windows(2).all(|w| w[1] < w[0]);
    let last = *densities.last().unwrap();
    if !decreasing {
        r.violations.push(json!({"check": "strictly decreasing", "densities": densities}));
    }
    if last >= threshold {
        r.violations.push(json!({"check": "below threshold", "density": last}));
    }
    r.pass = r.violations.is_empty();
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_density_is_informational() {
        let r = z_density(&Preset::Tribonacci.spec(), 13).unwrap();
        assert_eq!(r.observation("z_count"), Some(2.0));
        assert_eq!(r.observation("pi_x"), Some(6.0));
    }

    #[test]
    fn sweeps_at_seven() {
        let t = Preset::Tribonacci.spec();
        let l = lemma5_sweep(&t, 3, 10).unwrap();
        assert!(l.pass);
        assert_eq!(l.observation("primes_checked"), Some(1.0));
        let m = multiplier_sweep(&t, 3, 10).unwrap();
        assert_eq!(m.observation("max_mult_order"), Some(3.0));
    }

    #[test]
    fn beukers_examples() {
        let r = beukers_zero_count(&Preset::Tribonacci.spec(), 500).unwrap();
        assert_eq!(r.observation("zero_count"), Some(2.0));
        let r = beukers_zero_count(&Preset::Pow2PlusFib.spec(), 500).unwrap();
        assert_eq!(r.observation("zero_count"), Some(0.0));
        let r = beukers_zero_count(&RecurrenceSpec::new(1, 1, 1, 1, -1, 0), 500).unwrap();
        assert!(r.pass);
        assert!(beukers_zero_count(&Preset::Pow2PlusN.spec(), 50).is_err());
    }

    #[test]
    fn omega_examples() {
        let t = Preset::Tribonacci.spec();
        assert_eq!(omega_iz(&t, 91, 2.0, 100.0).unwrap(), 2);
        assert_eq!(omega_iz(&t, 8, 2.0, 100.0).unwrap(), 0);
        assert_eq!(omega_iz(&t, 7 * 13 * 3, 2.0, 100.0).unwrap(), 2);
    }

    #[test]
    fn witnesses() {
        let r = counterexample_density(Preset::Pow2PlusN, 10).unwrap();
        assert!(r.pass);
        assert!(r.observation("member_density").unwrap() >= 0.5);
        assert!(counterexample_density(Preset::Tribonacci, 10).is_err());
    }
}
