//! 3x3 matrices over Z/pZ acting on state triples `(U_n, U_{n+1}, U_{n+2})`.

use crate::arith::modp::{add_mod, mul_mod, reduce_i64};
use crate::recurrence::RecurrenceSpec;

pub type State = [u64; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mat3 {
    pub m: [[u64; 3]; 3],
    pub p: u64,
}

impl Mat3 {
    pub fn identity(p: u64) -> Self {
        let mut m = [[0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1 % p;
        }
        Mat3 { m, p }
    }

    /// Sends `(U_n, U_{n+1}, U_{n+2})` to `(U_{n+1}, U_{n+2}, U_{n+3})`.
    pub fn companion(spec: &RecurrenceSpec, p: u64) -> Self {
        let r = |x| reduce_i64(x, p);
        Mat3 {
            m: [
                [0, 1 % p, 0],
                [0, 0, 1 % p],
                [r(spec.a3), r(spec.a2), r(spec.a1)],
            ],
            p,
        }
    }

    pub fn mul(&self, other: &Mat3) -> Mat3 {
        let p = self.p;
        let mut m = [[0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut acc = 0;
                for k in 0..3 {
                    acc = add_mod(acc, mul_mod(self.m[i][k], other.m[k][j], p), p);
                }
                *cell = acc;
            }
        }
        Mat3 { m, p }
    }

    pub fn pow(&self, mut e: u128) -> Mat3 {
        let mut base = *self;
        let mut acc = Mat3::identity(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn apply(&self, v: &State) -> State {
        let p = self.p;
        let mut out = [0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0;
            for k in 0..3 {
                acc = add_mod(acc, mul_mod(self.m[i][k], v[k], p), p);
            }
            *o = acc;
        }
        out
    }
}

pub fn initial_state(spec: &RecurrenceSpec, p: u64) -> State {
    spec.initial_terms().map(|u| reduce_i64(u, p))
}

/// One step of the recurrence on a state triple; cheaper than `apply`.
#[inline]
pub fn step(coeffs: &[u64; 3], s: &State, p: u64) -> State {
    let next = ((coeffs[0] as u128 * s[2] as u128
        + coeffs[1] as u128 * s[1] as u128
        + coeffs[2] as u128 * s[0] as u128)
        % p as u128) as u64;
    [s[1], s[2], next]
}

/// `[a1, a2, a3] mod p`.
pub fn reduced_coefficients(spec: &RecurrenceSpec, p: u64) -> [u64; 3] {
    spec.coefficients().map(|a| reduce_i64(a, p))
}
