//! Solving `x^2 + n y^2 = N` from the factorization of `N`: square roots of
//! `-n` modulo prime powers, CRT, and Cornacchia's descent.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::factor::Factorization;

/// A square root of `a` modulo an odd prime `q` (Tonelli-Shanks), if any.
pub fn sqrt_mod_big_prime(a: &BigUint, q: &BigUint) -> Option<BigUint> {
    let a = a % q;
    if a.is_zero() {
        return Some(BigUint::zero());
    }
    let one = BigUint::one();
    let qm1 = q - &one;
    if a.modpow(&(&qm1 >> 1), q) != one {
        return None;
    }
    let s = qm1.trailing_zeros().expect("q > 1");
    let odd = &qm1 >> s;
    let mut z = BigUint::from(2u32);
    while z.modpow(&(&qm1 >> 1), q) == one {
        z += 1u32;
    }
    let mut m = s;
    let mut c = z.modpow(&odd, q);
    let mut t = a.modpow(&odd, q);
    let mut r = a.modpow(&((&odd + &one) >> 1), q);
    while !t.is_one() {
        let mut i = 0;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = &t2 * &t2 % q;
            i += 1;
        }
        let b = c.modpow(&(BigUint::one() << (m - i - 1)), q);
        m = i;
        c = &b * &b % q;
        t = t * &c % q;
        r = r * b % q;
    }
    Some(r)
}

/// All `x` in `[0, q^e)` with `x^2 = -n (mod q^e)`.
pub fn neg_sqrt_prime_power(n: u64, q: &BigUint, e: u32) -> Vec<BigUint> {
    let two_n = BigUint::from(n) * 2u32;
    let modulus = q.pow(e);
    let nb = BigUint::from(n);
    if (&two_n % q).is_zero() {
        // q divides 2n, so q is small: lift every root one digit at a time
        let qs = q.to_u64().expect("q divides 2n");
        let mut roots: Vec<BigUint> = (0..qs)
            .map(BigUint::from)
            .filter(|x| ((x * x) + &nb).is_multiple_of(q))
            .collect();
        let mut qk = q.clone();
        for _ in 1..e {
            let next = &qk * q;
            let mut lifted = Vec::new();
            for r in &roots {
                for t in 0..qs {
                    let x = r + &qk * t;
                    if ((&x * &x) + &nb).is_multiple_of(&next) {
                        lifted.push(x);
                    }
                }
            }
            roots = lifted;
            qk = next;
        }
        roots.sort();
        return roots;
    }
    let neg = (q - (&nb % q)) % q;
    let Some(r0) = sqrt_mod_big_prime(&neg, q) else {
        return Vec::new();
    };
    // Hensel: r <- r - (r^2 + n) / (2r) mod q^k
    let mut r = r0;
    let mut qk = q.clone();
    for _ in 1..e {
        qk = &qk * q;
        let f = (&r * &r + &nb) % &qk;
        let inv = ((&r * 2u32) % &qk).modinv(&qk).expect("2r is a unit");
        let corr = f * inv % &qk;
        r = (&r + &qk - corr) % &qk;
    }
    let other = (&modulus - &r) % &modulus;
    let mut roots = vec![r, other];
    roots.sort();
    roots.dedup();
    roots
}

/// All square roots of `-n` modulo `m`, given the factorization of `m`.
pub fn neg_sqrt_mod(n: u64, factors: &Factorization<BigUint>) -> Vec<BigUint> {
    let mut acc = vec![BigUint::zero()];
    let mut modulus = BigUint::one();
    for (q, e) in factors.iter().filter(|(_, e)| *e > 0) {
        let local = neg_sqrt_prime_power(n, q, *e);
        if local.is_empty() {
            return Vec::new();
        }
        let qe = q.pow(*e);
        let inv = (&modulus % &qe).modinv(&qe).unwrap_or_else(BigUint::zero);
        let mut next = Vec::with_capacity(acc.len() * local.len());
        for a in &acc {
            for b in &local {
                // x = a (mod modulus), x = b (mod qe)
                let diff = (b + &qe - (a % &qe)) % &qe;
                let k = diff * &inv % &qe;
                next.push(a + &modulus * k);
            }
        }
        modulus *= qe;
        acc = next;
    }
    acc.sort();
    acc
}

/// Cornacchia's descent: from a root `r` of `-n` mod `m`, the primitive
/// solution of `x^2 + n y^2 = m` with `x = r y (mod m)`, if there is one.
pub fn cornacchia(m: &BigUint, n: u64, r: &BigUint) -> Option<(BigUint, BigUint)> {
    if m.is_one() {
        return Some((BigUint::one(), BigUint::zero()));
    }
    if r.is_zero() {
        return (*m == BigUint::from(n)).then(|| (BigUint::zero(), BigUint::one()));
    }
    let limit = m.sqrt();
    let (mut a, mut b) = (m.clone(), r.clone());
    while b > limit {
        let rem = &a % &b;
        a = b;
        b = rem;
    }
    let rest = m - &b * &b;
    let (y2, rem) = rest.div_rem(&BigUint::from(n));
    if !rem.is_zero() {
        return None;
    }
    let y = y2.sqrt();
    (&y * &y == y2).then_some((b, y))
}
