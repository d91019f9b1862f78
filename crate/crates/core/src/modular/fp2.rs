//! The field with `p^2` elements, built on an irreducible monic quadratic
//! `theta^2 + b theta + c` over Z/pZ.

use serde::Serialize;

use crate::arith::modp::{add_mod, inv_mod, mul_mod, sub_mod};

/// `a + b theta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Fp2Element {
    pub a: u64,
    pub b: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fp2 {
    pub p: u64,
    /// Linear coefficient of the defining quadratic.
    pub qb: u64,
    /// Constant coefficient of the defining quadratic.
    pub qc: u64,
}

impl Fp2 {
    pub fn new(p: u64, qb: u64, qc: u64) -> Self {
        Fp2 { p, qb: qb % p, qc: qc % p }
    }

    pub fn one(&self) -> Fp2Element {
        Fp2Element { a: 1 % self.p, b: 0 }
    }

    pub fn theta(&self) -> Fp2Element {
        Fp2Element { a: 0, b: 1 % self.p }
    }

    pub fn from_base(&self, a: u64) -> Fp2Element {
        Fp2Element { a: a % self.p, b: 0 }
    }

    pub fn mul(&self, x: Fp2Element, y: Fp2Element) -> Fp2Element {
        let p = self.p;
        let bb = mul_mod(x.b, y.b, p);
        // theta^2 = -qb theta - qc
        let a = sub_mod(mul_mod(x.a, y.a, p), mul_mod(self.qc, bb, p), p);
        let cross = add_mod(mul_mod(x.a, y.b, p), mul_mod(x.b, y.a, p), p);
        let b = sub_mod(cross, mul_mod(self.qb, bb, p), p);
        Fp2Element { a, b }
    }

    pub fn pow(&self, x: Fp2Element, mut e: u128) -> Fp2Element {
        let mut base = x;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// The other root of the quadratic replaces `theta`: `-qb - theta`.
    pub fn conj(&self, x: Fp2Element) -> Fp2Element {
        let p = self.p;
        Fp2Element {
            a: sub_mod(x.a, mul_mod(x.b, self.qb, p), p),
            b: sub_mod(0, x.b, p),
        }
    }

    /// `x * conj(x)`, an element of the prime field.
    pub fn norm(&self, x: Fp2Element) -> u64 {
        let n = self.mul(x, self.conj(x));
        debug_assert_eq!(n.b, 0);
        n.a
    }

    pub fn inv(&self, x: Fp2Element) -> Option<Fp2Element> {
        let ninv = inv_mod(self.norm(x), self.p)?;
        let c = self.conj(x);
        Some(Fp2Element {
            a: mul_mod(c.a, ninv, self.p),
            b: mul_mod(c.b, ninv, self.p),
        })
    }

    pub fn scale(&self, x: Fp2Element, k: u64) -> Fp2Element {
        Fp2Element {
            a: mul_mod(x.a, k, self.p),
            b: mul_mod(x.b, k, self.p),
        }
    }
}
