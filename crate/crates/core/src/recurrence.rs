//! Ternary recurrences `U_{n+3} = a1 U_{n+2} + a2 U_{n+1} + a3 U_n`, exact
//! big-integer terms, and the named preset sequences.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::charpoly;
use crate::error::{Error, Result};

/// Default cap on the decimal size of an exactly computed term.
pub const DEFAULT_TERM_DIGITS: u64 = 1_000_000;

/// Below this index terms are computed by plain iteration, above it by
/// companion-matrix powering.
const ITERATE_BELOW: u64 = 1_000;

/// Coefficients and initial terms of a third-order recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RecurrenceSpec {
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
    pub u0: i64,
    pub u1: i64,
    pub u2: i64,
}

impl RecurrenceSpec {
    pub const fn new(a1: i64, a2: i64, a3: i64, u0: i64, u1: i64, u2: i64) -> Self {
        RecurrenceSpec {
            a1,
            a2,
            a3,
            u0,
            u1,
            u2,
        }
    }

    pub fn coefficients(&self) -> [i64; 3] {
        [self.a1, self.a2, self.a3]
    }

    pub fn initial_terms(&self) -> [i64; 3] {
        [self.u0, self.u1, self.u2]
    }

    pub fn is_zero_sequence(&self) -> bool {
        self.u0 == 0 && self.u1 == 0 && self.u2 == 0
    }

    /// Rejects `a3 = 0`, which would make the recurrence of lower order.
    pub fn ensure_ternary(&self) -> Result<()> {
        if self.a3 == 0 {
            return Err(Error::invalid(
                "a3 = 0: the characteristic polynomial is not a genuine cubic",
            ));
        }
        Ok(())
    }

    pub fn ensure_nonzero(&self) -> Result<()> {
        if self.is_zero_sequence() {
            return Err(Error::invalid("the sequence is identically zero"));
        }
        Ok(())
    }
}

impl fmt::Display for RecurrenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match Preset::identify(self) {
            Some(p) => write!(f, "{}", p.name()),
            None => write!(
                f,
                "({},{},{};{},{},{})",
                self.a1, self.a2, self.a3, self.u0, self.u1, self.u2
            ),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SpecRepr {
    Named(String),
    Explicit {
        a1: i64,
        a2: i64,
        a3: i64,
        u0: i64,
        u1: i64,
        u2: i64,
    },
}

impl<'de> Deserialize<'de> for RecurrenceSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match SpecRepr::deserialize(d)? {
            SpecRepr::Named(name) => Preset::from_str(&name)
                .map(|p| p.spec())
                .map_err(serde::de::Error::custom),
            SpecRepr::Explicit {
                a1,
                a2,
                a3,
                u0,
                u1,
                u2,
            } => Ok(RecurrenceSpec::new(a1, a2, a3, u0, u1, u2)),
        }
    }
}

impl FromStr for RecurrenceSpec {
    type Err = Error;

    /// Accepts a preset name or a JSON object / JSON string.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        if let Ok(p) = Preset::from_str(trimmed) {
            return Ok(p.spec());
        }
        serde_json::from_str(trimmed).map_err(|e| Error::invalid(format!("bad spec {s:?}: {e}")))
    }
}

/// Named sequences with known closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// `T_0 = T_1 = 0`, `T_2 = 1`, `T_{n+3} = T_{n+2} + T_{n+1} + T_n`.
    Tribonacci,
    /// `2^n + F_n`, characteristic polynomial `(X-2)(X^2-X-1)`.
    Pow2PlusFib,
    /// `2^n + n`, characteristic polynomial `(X-2)(X-1)^2`.
    Pow2PlusN,
    /// `4^n + 2^{n+1} + 1 = (2^n+1)^2`, polynomial `(X-4)(X-2)(X-1)`.
    SquarePow,
    /// `5 F_n^2 + 4(-1)^n = L_n^2`, which is `5 F_n^2 - 4` at odd `n`;
    /// polynomial `(X+1)(X^2-3X+1)`.
    FiveFibSqMinus4,
    /// Fibonacci numbers as a degenerate spec with `a3 = 0`; usable for
    /// terms but rejected wherever a genuine cubic is required.
    Fibonacci,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Tribonacci,
        Preset::Pow2PlusFib,
        Preset::Pow2PlusN,
        Preset::SquarePow,
        Preset::FiveFibSqMinus4,
        Preset::Fibonacci,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Tribonacci => "tribonacci",
            Preset::Pow2PlusFib => "pow2-plus-fib",
            Preset::Pow2PlusN => "pow2-plus-n",
            Preset::SquarePow => "square-pow",
            Preset::FiveFibSqMinus4 => "five-fib-sq-minus-4",
            Preset::Fibonacci => "fibonacci",
        }
    }

    pub fn spec(self) -> RecurrenceSpec {
        match self {
            Preset::Tribonacci => RecurrenceSpec::new(1, 1, 1, 0, 0, 1),
            Preset::Pow2PlusFib => RecurrenceSpec::new(3, -1, -2, 1, 3, 5),
            Preset::Pow2PlusN => RecurrenceSpec::new(4, -5, 2, 1, 3, 6),
            Preset::SquarePow => RecurrenceSpec::new(7, -14, 8, 4, 9, 25),
            Preset::FiveFibSqMinus4 => RecurrenceSpec::new(2, 2, -1, 4, 1, 9),
            Preset::Fibonacci => RecurrenceSpec::new(1, 1, 0, 0, 1, 1),
        }
    }

    pub fn identify(spec: &RecurrenceSpec) -> Option<Preset> {
        Preset::ALL.into_iter().find(|p| p.spec() == *spec)
    }

    /// The `n`-th term evaluated from the closed form, independently of the
    /// recurrence.
    pub fn closed_form(self, n: u64) -> BigInt {
        let pow2 = || BigInt::one() << n;
        match self {
            Preset::Tribonacci => tribonacci_by_window(n),
            Preset::Pow2PlusFib => pow2() + fibonacci(n),
            Preset::Pow2PlusN => pow2() + BigInt::from(n),
            Preset::SquarePow => {
                let s = pow2() + 1;
                &s * &s
            }
            // 5 F_n^2 + 4 (-1)^n, which is 5 F_n^2 - 4 at odd n
            Preset::FiveFibSqMinus4 => {
                let f = fibonacci(n);
                let sign = if n % 2 == 0 { 4 } else { -4 };
                f.clone() * f * 5 + sign
            }
            Preset::Fibonacci => fibonacci(n),
        }
    }

    /// Checks the stored coefficient tuple against 20 closed-form terms.
    pub fn validate(self) -> Result<()> {
        let spec = self.spec();
        for (n, t) in term_iter(&spec, 19)?.enumerate() {
            let expected = self.closed_form(n as u64);
            if t != expected {
                return Err(Error::invalid(format!(
                    "preset {} disagrees with its closed form at n = {n}: {t} vs {expected}",
                    self.name()
                )));
            }
        }
        Ok(())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .trim()
            .to_ascii_lowercase()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect();
        Preset::ALL
            .into_iter()
            .find(|p| p.name().replace('-', "") == key)
            .ok_or_else(|| Error::invalid(format!("unknown preset {s:?}")))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Validates every preset; run once at program start.
pub fn validate_presets() -> Result<()> {
    Preset::ALL.into_iter().try_for_each(Preset::validate)
}

fn tribonacci_by_window(n: u64) -> BigInt {
    let (mut a, mut b, mut c) = (BigInt::zero(), BigInt::zero(), BigInt::one());
    for _ in 0..n {
        let next = &a + &b + &c;
        a = std::mem::replace(&mut b, std::mem::replace(&mut c, next));
    }
    a
}

/// `F_n` by fast doubling.
pub fn fibonacci(n: u64) -> BigInt {
    fib_pair(n).0
}

/// Lucas numbers `L_0 = 2, L_1 = 1`.
pub fn lucas(n: u64) -> BigInt {
    let (f, f1) = fib_pair(n);
    // L_n = 2 F_{n+1} - F_n
    f1 * 2 - f
}

fn fib_pair(n: u64) -> (BigInt, BigInt) {
    if n == 0 {
        return (BigInt::zero(), BigInt::one());
    }
    let (a, b) = fib_pair(n / 2);
    let c = &a * (&b * 2 - &a);
    let d = &a * &a + &b * &b;
    if n % 2 == 0 {
        (c, d)
    } else {
        let e = &c + &d;
        (d, e)
    }
}

/// Rough decimal size of `U_n`, used for budget checks.
pub fn estimated_digits(spec: &RecurrenceSpec, n: u64) -> f64 {
    let gamma = charpoly::dominant_root_modulus(spec).max(1.0);
    let init = spec
        .initial_terms()
        .iter()
        .map(|u| u.unsigned_abs())
        .max()
        .unwrap_or(0) as f64;
    (1.0 + init).log10() + n as f64 * gamma.log10() + 2.0 * ((n + 1) as f64).log10()
}

fn check_budget(spec: &RecurrenceSpec, n: u64, max_digits: u64) -> Result<()> {
    let digits = estimated_digits(spec, n);
    if digits > max_digits as f64 {
        return Err(Error::Budget {
            what: "term digits",
            needed: digits.ceil() as u64,
            limit: max_digits,
        });
    }
    Ok(())
}

/// `U_n` exactly, under the default digit budget.
pub fn term(spec: &RecurrenceSpec, n: u64) -> Result<BigInt> {
    term_with_budget(spec, n, DEFAULT_TERM_DIGITS)
}

pub fn term_with_budget(spec: &RecurrenceSpec, n: u64, max_digits: u64) -> Result<BigInt> {
    check_budget(spec, n, max_digits)?;
    if n < ITERATE_BELOW {
        return Ok(TermIter::new(spec, n).last().expect("at least one term"));
    }
    Ok(companion_power_term(spec, n))
}

type BigMat = [[BigInt; 3]; 3];

fn mat_mul(x: &BigMat, y: &BigMat) -> BigMat {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..3).map(|k| &x[i][k] * &y[k][j]).sum::<BigInt>())
    })
}

fn companion_power_term(spec: &RecurrenceSpec, n: u64) -> BigInt {
    let z = BigInt::zero;
    let o = BigInt::one;
    let mut base: BigMat = [
        [z(), o(), z()],
        [z(), z(), o()],
        [spec.a3.into(), spec.a2.into(), spec.a1.into()],
    ];
    let mut acc: BigMat = [[o(), z(), z()], [z(), o(), z()], [z(), z(), o()]];
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc = mat_mul(&acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mat_mul(&base, &base);
        }
    }
    let init = spec.initial_terms();
    (0..3).map(|k| &acc[0][k] * init[k]).sum()
}

/// Streams `U_0, ..., U_{n_max}` with constant big-integer state.
pub struct TermIter {
    coeffs: [BigInt; 3],
    window: [BigInt; 3],
    next_index: u64,
    last_index: u64,
}

impl TermIter {
    fn new(spec: &RecurrenceSpec, n_max: u64) -> Self {
        TermIter {
            coeffs: spec.coefficients().map(BigInt::from),
            window: spec.initial_terms().map(BigInt::from),
            next_index: 0,
            last_index: n_max,
        }
    }
}

impl Iterator for TermIter {
    type Item = BigInt;

    fn next(&mut self) -> Option<BigInt> {
        if self.next_index > self.last_index {
            return None;
        }
        self.next_index += 1;
        let [a1, a2, a3] = &self.coeffs;
        let [w0, w1, w2] = &self.window;
        let next = a1 * w2 + a2 * w1 + a3 * w0;
        let [w0, w1, w2] = std::mem::take(&mut self.window);
        self.window = [w1, w2, next];
        Some(w0)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.last_index + 1).saturating_sub(self.next_index) as usize;
        (left, Some(left))
    }
}

/// Terms `U_0..=U_{n_max}` under the default digit budget.
pub fn term_iter(spec: &RecurrenceSpec, n_max: u64) -> Result<TermIter> {
    term_iter_with_budget(spec, n_max, DEFAULT_TERM_DIGITS)
}

pub fn term_iter_with_budget(spec: &RecurrenceSpec, n_max: u64, max_digits: u64) -> Result<TermIter> {
    check_budget(spec, n_max, max_digits)?;
    Ok(TermIter::new(spec, n_max))
}
