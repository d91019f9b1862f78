//! Roots of the characteristic polynomial modulo a prime.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::arith::modp::{add_mod, inv_mod, mul_mod, pow_mod, sub_mod};
use crate::charpoly::discriminant;
use crate::recurrence::RecurrenceSpec;

use super::mat3::reduced_coefficients;

/// Below this bound roots are found by scanning all residues.
pub const SCAN_LIMIT: u64 = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RootCount {
    Zero,
    One,
    Three,
    /// `p` divides the discriminant.
    Ramified,
}

impl RootCount {
    pub fn as_str(self) -> &'static str {
        match self {
            RootCount::Zero => "0",
            RootCount::One => "1",
            RootCount::Three => "3",
            RootCount::Ramified => "ramified",
        }
    }
}

impl fmt::Display for RootCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for RootCount {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            RootCount::Ramified => s.serialize_str("ramified"),
            RootCount::Zero => s.serialize_u8(0),
            RootCount::One => s.serialize_u8(1),
            RootCount::Three => s.serialize_u8(3),
        }
    }
}

/// `Psi mod p` as low-to-high coefficients `[-a3, -a2, -a1, 1]`.
fn psi_mod(spec: &RecurrenceSpec, p: u64) -> [u64; 4] {
    let [a1, a2, a3] = reduced_coefficients(spec, p);
    [sub_mod(0, a3, p), sub_mod(0, a2, p), sub_mod(0, a1, p), 1 % p]
}

pub fn eval_psi(spec: &RecurrenceSpec, x: u64, p: u64) -> u64 {
    let c = psi_mod(spec, p);
    let mut acc = 0;
    for &k in c.iter().rev() {
        acc = add_mod(mul_mod(acc, x, p), k, p);
    }
    acc
}

pub fn discriminant_mod(spec: &RecurrenceSpec, p: u64) -> u64 {
    let d = discriminant(spec) % BigInt::from(p);
    let d = if d < BigInt::zero() { d + p } else { d };
    d.to_u64().expect("residue fits")
}

/// Multiplies two residues of degree < 3 modulo the monic cubic `m`.
fn mulmod_cubic(x: &[u64; 3], y: &[u64; 3], m: &[u64; 4], p: u64) -> [u64; 3] {
    let mut prod = [0u64; 5];
    for i in 0..3 {
        for j in 0..3 {
            prod[i + j] = add_mod(prod[i + j], mul_mod(x[i], y[j], p), p);
        }
    }
    for d in (3..5).rev() {
        let lead = prod[d];
        if lead == 0 {
            continue;
        }
        prod[d] = 0;
        for k in 0..3 {
            prod[d - 3 + k] = sub_mod(prod[d - 3 + k], mul_mod(lead, m[k], p), p);
        }
    }
    [prod[0], prod[1], prod[2]]
}

fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let inv_lead = inv_mod(b[db], p).expect("nonzero leading coefficient");
    while r.len() > db {
        let lead = mul_mod(*r.last().unwrap(), inv_lead, p);
        let shift = r.len() - 1 - db;
        for (k, &bk) in b.iter().enumerate() {
            r[shift + k] = sub_mod(r[shift + k], mul_mod(lead, bk, p), p);
        }
        r = trim(r);
    }
    trim(r)
}

fn poly_gcd(a: Vec<u64>, b: Vec<u64>, p: u64) -> Vec<u64> {
    let (mut a, mut b) = (trim(a), trim(b));
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// `gcd(X^p - X, Psi)` mod `p`, the product of the distinct linear factors.
fn linear_part(spec: &RecurrenceSpec, p: u64) -> Vec<u64> {
    let m = psi_mod(spec, p);
    let x = [0, 1 % p, 0];
    let mut acc = [1 % p, 0, 0];
    let mut base = x;
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod_cubic(&acc, &base, &m, p);
        }
        base = mulmod_cubic(&base, &base, &m, p);
        e >>= 1;
    }
    let xp_minus_x = vec![acc[0], sub_mod(acc[1], 1 % p, p), acc[2]];
    poly_gcd(m.to_vec(), xp_minus_x, p)
}

/// Distinct roots in `[0, p)` found by scanning; only for small `p`.
pub fn roots_by_scan(spec: &RecurrenceSpec, p: u64) -> Vec<u64> {
    (0..p).filter(|&x| eval_psi(spec, x, p) == 0).collect()
}

/// Number of roots of `Psi` mod `p`, or `Ramified` when `p | disc`.
pub fn count_roots_mod_p(spec: &RecurrenceSpec, p: u64) -> RootCount {
    if discriminant_mod(spec, p) == 0 {
        return RootCount::Ramified;
    }
    let n = if p < SCAN_LIMIT {
        roots_by_scan(spec, p).len()
    } else {
        linear_part(spec, p).len().saturating_sub(1)
    };
    match n {
        0 => RootCount::Zero,
        1 => RootCount::One,
        3 => RootCount::Three,
        // a squarefree cubic cannot have exactly two roots
        _ => unreachable!("{n} distinct roots of an unramified cubic mod {p}"),
    }
}

/// The unique root when `Psi` mod `p` has exactly one; `None` otherwise.
pub fn single_root(spec: &RecurrenceSpec, p: u64) -> Option<u64> {
    if p < SCAN_LIMIT {
        let r = roots_by_scan(spec, p);
        return (r.len() == 1).then(|| r[0]);
    }
    let g = linear_part(spec, p);
    if g.len() != 2 {
        return None;
    }
    let inv = inv_mod(g[1], p)?;
    Some(mul_mod(sub_mod(0, g[0], p), inv, p))
}

/// `(b, c)` with `Psi = (X - alpha)(X^2 + b X + c)` mod `p`.
pub fn quadratic_cofactor(spec: &RecurrenceSpec, alpha: u64, p: u64) -> (u64, u64) {
    let [a1, a2, _] = reduced_coefficients(spec, p);
    let b = sub_mod(alpha, a1, p);
    let c = sub_mod(mul_mod(alpha, b, p), a2, p);
    (b, c)
}

/// Whether `x^2 + b x + c` has no root mod odd `p`.
pub fn quadratic_is_irreducible(b: u64, c: u64, p: u64) -> bool {
    let d = sub_mod(mul_mod(b, b, p), mul_mod(4, c, p), p);
    d != 0 && pow_mod(d, (p - 1) / 2, p) == p - 1
}
