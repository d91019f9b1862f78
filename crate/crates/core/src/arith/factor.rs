//! Integer factorization: trial division by the primes below 10^6, then
//! Pollard-Brent rho, with Miller-Rabin primality testing.
//!
//! Word-sized inputs use a deterministic Miller-Rabin base set. Big inputs
//! use 64 Miller-Rabin rounds with bases drawn from a fixed-seed generator,
//! and the rho stage runs under an iteration budget so that results do not
//! depend on machine speed or load.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::modp::{mul_mod, pow_mod};
use super::sieve::small_primes;
use crate::error::{Error, Result};

const MR_BASES_U64: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
const MR_ROUNDS_BIG: usize = 64;
const MR_SEED: u64 = 0x7465_726e_7265_6321;
const TRIAL_LIMIT: u64 = 1_000_000;

/// Prime factorization as sorted `(prime, exponent)` pairs.
pub type Factorization<T> = Vec<(T, u32)>;

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES_U64 {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &MR_BASES_U64 {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn push_factor<T: PartialEq>(out: &mut Factorization<T>, p: T, e: u32) {
    if let Some(slot) = out.iter_mut().find(|(q, _)| *q == p) {
        slot.1 += e;
    } else {
        out.push((p, e));
    }
}

/// Brent's variant of Pollard rho on a composite `n`; returns a proper factor.
fn rho_u64(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
        let (mut g, mut x, mut ys) = (1u64, 0u64, 0u64);
        const M: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..M.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += M;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

fn split_u64(n: u64, out: &mut Factorization<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        push_factor(out, n, 1);
        return;
    }
    let d = rho_u64(n);
    split_u64(d, out);
    split_u64(n / d, out);
}

/// Complete factorization of a 64-bit integer. `factor_u64(1)` is empty.
pub fn factor_u64(mut n: u64) -> Factorization<u64> {
    assert!(n > 0, "cannot factor zero");
    let mut out = Vec::new();
    for &p in small_primes() {
        if p * p > n {
            break;
        }
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if n > 1 {
        if n < TRIAL_LIMIT * TRIAL_LIMIT || is_prime_u64(n) {
            // no factor below 10^6 and n < 10^12 means n is prime
            push_factor(&mut out, n, 1);
        } else {
            split_u64(n, &mut out);
        }
    }
    out.sort_unstable();
    out
}

/// Distinct prime divisors of `n`.
pub fn prime_divisors(n: u64) -> Vec<u64> {
    factor_u64(n).into_iter().map(|(p, _)| p).collect()
}

pub fn is_prime_big(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &small_primes()[..64] {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    let two = BigUint::from(2u32);
    let mut rng = ChaCha8Rng::seed_from_u64(MR_SEED);
    'rounds: for _ in 0..MR_ROUNDS_BIG {
        let a = rng.gen_biguint_range(&two, &nm1);
        let mut x = a.modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == nm1 {
                continue 'rounds;
            }
        }
        return false;
    }
    true
}

/// Pollard-Brent on a big composite; `budget` counts iterations of the
/// polynomial map and is shared across recursive calls.
fn rho_big(n: &BigUint, budget: &mut u64) -> Option<BigUint> {
    let one = BigUint::one();
    for c in 1u32..=16 {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut q = one.clone();
        let mut g = one.clone();
        let mut r: u64 = 1;
        const M: u64 = 64;
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                let steps = M.min(r - k);
                if *budget < steps {
                    return None;
                }
                *budget -= steps;
                for _ in 0..steps {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = q * diff % n;
                }
                g = q.gcd(n);
                k += M;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if g > one {
                    break;
                }
            }
        }
        if &g != n {
            return Some(g);
        }
    }
    None
}

fn split_big(n: BigUint, budget: &mut u64, out: &mut Factorization<BigUint>) -> Result<()> {
    if n.is_one() {
        return Ok(());
    }
    if let Some(small) = n.to_u64() {
        for (p, e) in factor_u64(small) {
            push_factor(out, BigUint::from(p), e);
        }
        return Ok(());
    }
    if is_prime_big(&n) {
        push_factor(out, n, 1);
        return Ok(());
    }
    let d = rho_big(&n, budget).ok_or(Error::Budget {
        what: "pollard-rho iterations",
        needed: u64::MAX,
        limit: 0,
    })?;
    let rest = &n / &d;
    split_big(d, budget, out)?;
    split_big(rest, budget, out)
}

/// Complete factorization of a big integer, or a budget error when the rho
/// stage would need more than `rho_budget` iterations in total.
pub fn factor_big(n: &BigUint, rho_budget: u64) -> Result<Factorization<BigUint>> {
    if n.is_zero() {
        return Err(Error::invalid("cannot factor zero"));
    }
    if let Some(small) = n.to_u64() {
        return Ok(factor_u64(small)
            .into_iter()
            .map(|(p, e)| (BigUint::from(p), e))
            .collect());
    }
    let mut n = n.clone();
    let mut out: Factorization<BigUint> = Vec::new();
    for &p in small_primes() {
        if (&n % p).is_zero() {
            let mut e = 0;
            while (&n % p).is_zero() {
                n /= p;
                e += 1;
            }
            out.push((BigUint::from(p), e));
        }
        if BigUint::from(p * p) > n {
            break;
        }
    }
    if !n.is_one() {
        if n < BigUint::from(TRIAL_LIMIT * TRIAL_LIMIT) {
            push_factor(&mut out, n, 1);
        } else {
            let mut budget = rho_budget;
            split_big(n, &mut budget, &mut out).map_err(|_| Error::Budget {
                what: "pollard-rho iterations",
                needed: rho_budget.saturating_add(1),
                limit: rho_budget,
            })?;
        }
    }
    out.sort_unstable();
    Ok(out)
}
