//! Per-prime invariants: root count, membership in Z, periods and orders.

use num_integer::Integer;
use serde::Serialize;

use crate::arith::factor::{factor_u64, is_prime_u64, Factorization};
use crate::arith::modp::{inv_mod, order_from_multiple, pow_mod};
use crate::error::{Error, Result};
use crate::recurrence::RecurrenceSpec;

use super::fp2::Fp2;
use super::mat3::{initial_state, reduced_coefficients, step, Mat3};
use super::roots::{count_roots_mod_p, quadratic_cofactor, single_root, RootCount};

/// Primes up to this bound get their period from a direct state scan.
pub const DIRECT_PERIOD_LIMIT: u64 = 1_000;
/// Largest prime accepted by the period and order routines.
pub const MAX_PERIOD_PRIME: u64 = u32::MAX as u64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeProfile {
    pub p: u64,
    pub root_count: RootCount,
    #[serde(rename = "in_Z")]
    pub in_z: bool,
    pub alpha: Option<u64>,
    pub t_p: Option<u64>,
    pub k_p: Option<u64>,
    pub ord_alpha: Option<u64>,
    pub ord_ratio: Option<u64>,
    pub mult_order: Option<u64>,
    /// Least `n` with every ratio of two roots an `n`-th root of unity.
    #[serde(skip)]
    pub n0: Option<u64>,
}

impl PrimeProfile {
    fn reduced(p: u64, root_count: RootCount, t_p: Option<u64>) -> Self {
        PrimeProfile {
            p,
            root_count,
            in_z: false,
            alpha: None,
            t_p,
            k_p: None,
            ord_alpha: None,
            ord_ratio: None,
            mult_order: None,
            n0: None,
        }
    }
}

/// Sum of exponents: the factorization of a product.
pub fn mul_factors(a: &Factorization<u64>, b: &Factorization<u64>) -> Factorization<u64> {
    merge(a, b, |x, y| x + y)
}

/// Max of exponents: the factorization of an lcm.
pub fn lcm_factors(a: &Factorization<u64>, b: &Factorization<u64>) -> Factorization<u64> {
    merge(a, b, u32::max)
}

fn merge(a: &Factorization<u64>, b: &Factorization<u64>, f: impl Fn(u32, u32) -> u32) -> Factorization<u64> {
    let mut out: Factorization<u64> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&(q, e)), Some(&(r, g))) if q == r => {
                i += 1;
                j += 1;
                (q, f(e, g))
            }
            (Some(&(q, e)), Some(&(r, _))) if q < r => {
                i += 1;
                (q, f(e, 0))
            }
            (Some(_), Some(&(r, g))) | (None, Some(&(r, g))) => {
                j += 1;
                (r, f(0, g))
            }
            (Some(&(q, e)), None) => {
                i += 1;
                (q, f(e, 0))
            }
            (None, None) => unreachable!(),
        };
        out.push(next);
    }
    out
}

fn product(f: &Factorization<u64>) -> u128 {
    f.iter().map(|&(q, e)| (q as u128).pow(e)).product()
}

fn check_period_prime(spec: &RecurrenceSpec, p: u64) -> Result<()> {
    spec.ensure_ternary()?;
    if !is_prime_u64(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    if p > MAX_PERIOD_PRIME {
        return Err(Error::invalid(format!("prime {p} exceeds {MAX_PERIOD_PRIME}")));
    }
    if spec.a3.rem_euclid(p as i64) == 0 {
        return Err(Error::invalid(format!("p = {p} divides a3 = {}", spec.a3)));
    }
    Ok(())
}

/// Least period of `U mod p` for any prime `p` not dividing `a3`, found as the
/// least divisor of `lcm(p-1, p^2-1, p^3-1) * p` (times 4 when `p = 2`) that
/// returns the initial state to itself. That multiple kills every
/// eigenvalue and every unipotent part of the companion matrix.
pub fn generic_period(spec: &RecurrenceSpec, p: u64) -> Result<u128> {
    check_period_prime(spec, p)?;
    let pm1 = factor_u64(p - 1);
    let pp1 = factor_u64(p + 1);
    let cyc = factor_u64(p * p + p + 1);
    let mut e = lcm_factors(&mul_factors(&pm1, &pp1), &mul_factors(&pm1, &cyc));
    e = mul_factors(&e, &vec![(p, if p == 2 { 2 } else { 1 })]);
    let m = Mat3::companion(spec, p);
    let s0 = initial_state(spec, p);
    Ok(order_from_multiple(product(&e), &e, |k| m.pow(k).apply(&s0) == s0))
}

/// Period by stepping the state until it returns; `None` past `limit` steps.
pub fn direct_period(spec: &RecurrenceSpec, p: u64, limit: u64) -> Option<u64> {
    let coeffs = reduced_coefficients(spec, p);
    let s0 = initial_state(spec, p);
    let mut s = s0;
    for k in 1..=limit {
        s = step(&coeffs, &s, p);
        if s == s0 {
            return Some(k);
        }
    }
    None
}

/// Full profile of an odd prime not dividing `a3`. Primes outside Z get a
/// reduced profile with only the root count and the period.
pub fn classify_prime(spec: &RecurrenceSpec, p: u64) -> Result<PrimeProfile> {
    if p == 2 {
        return Err(Error::invalid("p = 2 is excluded"));
    }
    check_period_prime(spec, p)?;
    let root_count = count_roots_mod_p(spec, p);
    if root_count != RootCount::One {
        let t = u64::try_from(generic_period(spec, p)?).ok();
        return Ok(PrimeProfile::reduced(p, root_count, t));
    }
    let alpha = single_root(spec, p).expect("one root");
    let (qb, qc) = quadratic_cofactor(spec, alpha, p);
    let f = Fp2::new(p, qb, qc);
    let beta = f.theta();
    let one = f.one();

    let pm1 = factor_u64(p - 1);
    let pp1 = factor_u64(p + 1);
    let psq = mul_factors(&pm1, &pp1);
    let big = (p as u128) * (p as u128) - 1;

    let ord_alpha = order_from_multiple((p - 1) as u128, &pm1, |e| pow_mod(alpha, e as u64, p) == 1) as u64;
    let ord_beta = order_from_multiple(big, &psq, |e| f.pow(beta, e) == one) as u64;
    // beta * gamma = qc, nonzero because alpha * qc = a3
    let qc_inv = inv_mod(qc, p).expect("p does not divide a3");
    // beta / gamma = beta^2 / qc
    let ratio = f.scale(f.mul(beta, beta), qc_inv);
    let ord_ratio = order_from_multiple((p + 1) as u128, &pp1, |e| f.pow(ratio, e) == one) as u64;
    // alpha / beta = alpha * gamma / qc
    let alpha_over_beta = f.scale(f.mul(f.from_base(alpha), f.conj(beta)), qc_inv);
    let ord_ab = order_from_multiple(big, &psq, |e| f.pow(alpha_over_beta, e) == one) as u64;

    let k_p = ord_alpha.lcm(&ord_beta);
    let n0 = ord_ab.lcm(&ord_ratio);
    let t_p = if p <= DIRECT_PERIOD_LIMIT {
        direct_period(spec, p, k_p).expect("the period divides k_p")
    } else {
        let m = Mat3::companion(spec, p);
        let s0 = initial_state(spec, p);
        order_from_multiple(k_p as u128, &factor_u64(k_p), |k| m.pow(k).apply(&s0) == s0) as u64
    };
    Ok(PrimeProfile {
        p,
        root_count,
        in_z: true,
        alpha: Some(alpha),
        t_p: Some(t_p),
        k_p: Some(k_p),
        ord_alpha: Some(ord_alpha),
        ord_ratio: Some(ord_ratio),
        mult_order: Some(k_p / n0),
        n0: Some(n0),
    })
}

/// Profile of any prime: `classify_prime` where it applies, otherwise the
/// root count with the period when it is defined (`p` not dividing `a3`).
pub fn profile_any(spec: &RecurrenceSpec, p: u64) -> Result<PrimeProfile> {
    spec.ensure_ternary()?;
    if !is_prime_u64(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    if p != 2 && spec.a3.rem_euclid(p as i64) != 0 {
        return classify_prime(spec, p);
    }
    let root_count = count_roots_mod_p(spec, p);
    let t_p = if spec.a3.rem_euclid(p as i64) == 0 {
        None
    } else {
        u64::try_from(generic_period(spec, p)?).ok()
    };
    Ok(PrimeProfile::reduced(p, root_count, t_p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::Preset;

    #[test]
    fn merge_factorizations() {
        let a = vec![(2, 1), (3, 2)];
        let b = vec![(2, 3), (5, 1)];
        assert_eq!(mul_factors(&a, &b), vec![(2, 4), (3, 2), (5, 1)]);
        assert_eq!(lcm_factors(&a, &b), vec![(2, 3), (3, 2), (5, 1)]);
    }

    #[test]
    fn tribonacci_seven() {
        let pr = classify_prime(&Preset::Tribonacci.spec(), 7).unwrap();
        assert!(pr.in_z);
        assert_eq!(pr.alpha, Some(3));
        assert_eq!(pr.ord_alpha, Some(6));
        assert_eq!(pr.ord_ratio, Some(8));
        assert_eq!(pr.k_p, Some(48));
        assert_eq!(pr.t_p, Some(48));
        assert_eq!(pr.mult_order, Some(3));
        assert_eq!(pr.n0, Some(16));
    }

    #[test]
    fn reduced_profiles() {
        let t = Preset::Tribonacci.spec();
        let three = classify_prime(&t, 3).unwrap();
        assert!(!three.in_z);
        assert_eq!(three.root_count, RootCount::Zero);
        assert_eq!(three.t_p, direct_period(&t, 3, 1000));
        assert!(classify_prime(&t, 2).is_err());
        assert!(classify_prime(&Preset::Pow2PlusFib.spec(), 2).is_err());
        let eleven = classify_prime(&t, 11).unwrap();
        assert_eq!(eleven.root_count, RootCount::Ramified);
        assert_eq!(eleven.t_p, direct_period(&t, 11, 100_000));
        let two = profile_any(&t, 2).unwrap();
        assert_eq!(two.t_p, Some(4));
    }

    #[test]
    fn generic_period_matches_scan() {
        let specs = [
            Preset::Tribonacci.spec(),
            Preset::Pow2PlusFib.spec(),
            Preset::Pow2PlusN.spec(),
            Preset::SquarePow.spec(),
            Preset::FiveFibSqMinus4.spec(),
            RecurrenceSpec::new(0, 0, 1, 1, 0, 0),
            RecurrenceSpec::new(3, -3, 1, 0, 0, 1),
        ];
        for s in specs {
            for p in crate::arith::primes_up_to(60) {
                if s.a3 % p as i64 == 0 {
                    continue;
                }
                let g = generic_period(&s, p).unwrap() as u64;
                assert_eq!(Some(g), direct_period(&s, p, 1_000_000), "{s} mod {p}");
            }
        }
    }

    #[test]
    fn divisor_route_matches_scan_above_limit() {
        let t = Preset::Tribonacci.spec();
        for p in [1_009u64, 1_033, 1_201, 2_003] {
            if let Ok(pr) = classify_prime(&t, p) {
                if let Some(k) = pr.k_p {
                    assert_eq!(pr.t_p, direct_period(&t, p, k), "p = {p}");
                }
            }
        }
    }
}
