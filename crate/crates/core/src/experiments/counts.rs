//! Exact counting sieves: smooth numbers, integers with a divisor in an
//! interval, and shifted primes with a divisor in an interval.

use crate::arith::sieve::{primes_up_to, SegmentedPrimes};
use crate::error::{Error, Result};

/// Largest `x` the counting sieves accept.
pub const COUNT_BUDGET: u64 = 100_000_000;
const SEGMENT: u64 = 1 << 18;

fn check_budget(x: u64) -> Result<()> {
    if x > COUNT_BUDGET {
        return Err(Error::Budget {
            what: "sieve length",
            needed: x,
            limit: COUNT_BUDGET,
        });
    }
    Ok(())
}

/// `#{1 <= n <= x : every prime factor of n is <= y}`, counting `n = 1`.
pub fn smooth_count(x: u64, y: u64) -> Result<u64> {
    if y < 2 || x < y {
        return Err(Error::invalid(format!("need x >= y >= 2, got x = {x}, y = {y}")));
    }
    check_budget(x)?;
    let primes = primes_up_to(y);
    let mut count = 0;
    let mut rem: Vec<u64> = Vec::with_capacity(SEGMENT as usize);
    let mut lo = 1;
    while lo <= x {
        let hi = (lo + SEGMENT - 1).min(x);
        rem.clear();
        rem.extend(lo..=hi);
        for &q in &primes {
            let mut qk = q;
            loop {
                // multiples of q^k in [lo, hi]
                let mut m = lo.div_ceil(qk) * qk;
                if m > hi {
                    break;
                }
                while m <= hi {
                    rem[(m - lo) as usize] /= q;
                    m += qk;
                }
                match qk.checked_mul(q) {
                    Some(next) if next <= hi => qk = next,
                    _ => break,
                }
            }
        }
        count += rem.iter().filter(|&&r| r == 1).count() as u64;
        lo = hi + 1;
    }
    Ok(count)
}

/// Integers `d` with `y < d < z`.
fn open_interval(y: f64, z: f64) -> std::ops::RangeInclusive<u64> {
    let first = y.floor() as u64 + 1;
    let last = if z.fract() == 0.0 { z as u64 - 1 } else { z.floor() as u64 };
    first..=last
}

fn check_interval(x: u64, y: f64, z: f64) -> Result<()> {
    if !(y >= 2.0 && y < z && z <= x as f64) {
        return Err(Error::invalid(format!("need 2 <= y < z <= x, got x = {x}, y = {y}, z = {z}")));
    }
    check_budget(x)
}

/// Bitset over `0..=limit` marking the multiples of every integer in `(y, z)`.
fn marked_multiples(limit: u64, y: f64, z: f64) -> Vec<u64> {
    let mut bits = vec![0u64; (limit / 64 + 1) as usize];
    for d in open_interval(y, z) {
        let mut m = d;
        while m <= limit {
            bits[(m / 64) as usize] |= 1 << (m % 64);
            m += d;
        }
    }
    bits
}

fn is_marked(bits: &[u64], m: u64) -> bool {
    bits[(m / 64) as usize] >> (m % 64) & 1 == 1
}

/// `H(x, y, z) = #{n <= x : d | n for some integer d in (y, z)}`.
pub fn divisor_interval_count(x: u64, y: f64, z: f64) -> Result<u64> {
    check_interval(x, y, z)?;
    let bits = marked_multiples(x, y, z);
    Ok((1..=x).filter(|&n| is_marked(&bits, n)).count() as u64)
}

/// `P(x, y, z; lam) = #{p <= x prime : d | p + lam for some d in (y, z)}`.
pub fn shifted_prime_count(x: u64, y: f64, z: f64, lam: i8) -> Result<u64> {
    if lam != 1 && lam != -1 {
        return Err(Error::invalid("lam must be +1 or -1"));
    }
    check_interval(x, y, z)?;
    let bits = marked_multiples(x + 1, y, z);
    Ok(SegmentedPrimes::new(2, x)
        .filter(|&p| is_marked(&bits, (p as i64 + lam as i64) as u64))
        .count() as u64)
}
