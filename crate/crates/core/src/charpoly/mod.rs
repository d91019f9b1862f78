//! The characteristic polynomial `X^3 - a1 X^2 - a2 X - a3`: discriminant,
//! factorization over the rationals, the three structural conditions, and
//! the dominant-root modulus.

pub mod exponents;
pub mod roots;
pub mod zpoly;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::arith::factor::factor_u64;
use crate::error::Result;
use crate::recurrence::RecurrenceSpec;
use zpoly::{cyclotomic, ZPoly};

pub use exponents::{solve_exponents, Exponents};

/// Orders `n` with `phi(n) <= 6`: every root of unity of degree at most 6
/// over the rationals is a primitive `n`-th root for one of these.
pub const CYCLOTOMIC_ORDERS: [u32; 13] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 14, 18];

/// `a1^2 a2^2 + 4 a2^3 - 4 a1^3 a3 - 18 a1 a2 a3 - 27 a3^2`.
pub fn discriminant(spec: &RecurrenceSpec) -> BigInt {
    let [a1, a2, a3] = spec.coefficients().map(BigInt::from);
    let a1sq = &a1 * &a1;
    let a2sq = &a2 * &a2;
    &a1sq * &a2sq + 4 * &a2sq * &a2 - 4 * &a1sq * &a1 * &a3 - 18 * &a1 * &a2 * &a3 - 27 * &a3 * &a3
}

/// Factorization of the monic cubic over the rationals. Rational roots of a
/// monic integer polynomial are integers, so all roots here are integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Factorization {
    Irreducible,
    /// `(X - a)(X^2 + b X + c)` with the quadratic irreducible over Q.
    LinearTimesIrreducibleQuadratic { a: i64, b: i64, c: i64 },
    /// Three distinct integer roots, ascending.
    ThreeLinear { roots: [i64; 3] },
    /// Integer roots with a repetition, ascending.
    RepeatedRoot { roots: [i64; 3] },
}

fn eval_big(spec: &RecurrenceSpec, x: i64) -> BigInt {
    let x = BigInt::from(x);
    ((&x - spec.a1) * &x - spec.a2) * &x - spec.a3
}

fn divisors_of(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factor_u64(n) {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// Integer roots of the cubic among the divisors of `a3` (or `0` when
/// `a3 = 0`), ascending.
fn integer_roots(spec: &RecurrenceSpec) -> Vec<i64> {
    if spec.a3 == 0 {
        let mut roots = vec![0];
        // X (X^2 - a1 X - a2)
        let d = spec.a1 as i128 * spec.a1 as i128 + 4 * spec.a2 as i128;
        if d >= 0 {
            let s = (d as u128).sqrt() as i128;
            if s * s == d {
                for num in [spec.a1 as i128 - s, spec.a1 as i128 + s] {
                    if num % 2 == 0 {
                        roots.push((num / 2) as i64);
                    }
                }
            }
        }
        roots.sort_unstable();
        roots.dedup();
        return roots;
    }
    let mut roots = Vec::new();
    for d in divisors_of(spec.a3.unsigned_abs()) {
        for cand in [d as i128, -(d as i128)] {
            let Ok(c) = i64::try_from(cand) else { continue };
            if eval_big(spec, c).is_zero() {
                roots.push(c);
            }
        }
    }
    roots.sort_unstable();
    roots
}

/// Exact factorization over the rationals by the rational-root test and
/// synthetic division.
pub fn factorize(spec: &RecurrenceSpec) -> Factorization {
    let roots = integer_roots(spec);
    let Some(&a) = roots.first() else {
        return Factorization::Irreducible;
    };
    // X^3 - a1 X^2 - a2 X - a3 = (X - a)(X^2 + b X + c)
    let b = a as i128 - spec.a1 as i128;
    let c = a as i128 * b - spec.a2 as i128;
    let disc = b * b - 4 * c;
    let quad_roots = if disc >= 0 {
        let s = (disc as u128).sqrt() as i128;
        (s * s == disc).then(|| [(-b - s) / 2, (-b + s) / 2])
    } else {
        None
    };
    match quad_roots {
        None => Factorization::LinearTimesIrreducibleQuadratic {
            a,
            b: b as i64,
            c: c as i64,
        },
        Some([r1, r2]) => {
            let mut all = [a, r1 as i64, r2 as i64];
            all.sort_unstable();
            if all[0] == all[1] || all[1] == all[2] {
                Factorization::RepeatedRoot { roots: all }
            } else {
                Factorization::ThreeLinear { roots: all }
            }
        }
    }
}

impl Factorization {
    /// Coefficients `[a1, a2, a3]` of the product of the factors.
    pub fn expand(&self, fallback: &RecurrenceSpec) -> [i128; 3] {
        match *self {
            Factorization::Irreducible => fallback.coefficients().map(i128::from),
            Factorization::LinearTimesIrreducibleQuadratic { a, b, c } => {
                let (a, b, c) = (a as i128, b as i128, c as i128);
                // (X - a)(X^2 + bX + c) = X^3 + (b - a) X^2 + (c - ab) X - ac
                [a - b, a * b - c, a * c]
            }
            Factorization::ThreeLinear { roots } | Factorization::RepeatedRoot { roots } => {
                let [r, s, t] = roots.map(i128::from);
                [r + s + t, -(r * s + r * t + s * t), r * s * t]
            }
        }
    }
}

/// Why a recurrence is degenerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DegeneracyWitness {
    RepeatedRoot,
    /// Some ratio of distinct roots is a primitive root of unity of this order.
    RootOfUnityRatio(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Degeneracy {
    pub degenerate: bool,
    pub witness: Option<DegeneracyWitness>,
}

/// `prod_{i,j} (x alpha_j - alpha_i)`, the degree-9 polynomial whose roots
/// are all ratios of roots, as the norm of `Psi(x theta)` from
/// `Z[x][theta] / Psi(theta)`.
pub fn ratio_polynomial(spec: &RecurrenceSpec) -> ZPoly {
    let [a1, a2, a3] = spec.coefficients();
    // Psi(x theta) reduced with theta^3 = a1 theta^2 + a2 theta + a3:
    // a3 (x^3 - 1) + a2 (x^3 - x) theta + a1 (x^3 - x^2) theta^2
    let c0 = ZPoly::from_i64(&[-a3, 0, 0, a3]);
    let c1 = ZPoly::from_i64(&[0, -a2, 0, a2]);
    let c2 = ZPoly::from_i64(&[0, 0, -a1, a1]);
    let k = |v: i64| ZPoly::from_i64(&[v]);
    // element times theta: (e0, e1, e2) -> (a3 e2, e0 + a2 e2, e1 + a1 e2)
    let times_theta = |e: &[ZPoly; 3]| -> [ZPoly; 3] {
        [
            e[2].mul(&k(a3)),
            e[0].add(&e[2].mul(&k(a2))),
            e[1].add(&e[2].mul(&k(a1))),
        ]
    };
    let col0 = [c0, c1, c2];
    let col1 = times_theta(&col0);
    let col2 = times_theta(&col1);
    // determinant of the matrix with columns col0, col1, col2
    let m = |r: usize, c: usize| match c {
        0 => &col0[r],
        1 => &col1[r],
        _ => &col2[r],
    };
    let minor = |r1: usize, r2: usize, c1: usize, c2: usize| {
        m(r1, c1).mul(m(r2, c2)).sub(&m(r1, c2).mul(m(r2, c1)))
    };
    m(0, 0)
        .mul(&minor(1, 2, 1, 2))
        .sub(&m(0, 1).mul(&minor(1, 2, 0, 2)))
        .add(&m(0, 2).mul(&minor(1, 2, 0, 1)))
}

/// Whether some ratio of two distinct roots is a root of unity. Exact:
/// strips the `(x - 1)^3` factor from the ratio polynomial (the diagonal
/// ratios) and tests divisibility by each cyclotomic polynomial of degree
/// at most 6.
pub fn is_degenerate(spec: &RecurrenceSpec) -> Degeneracy {
    if discriminant(spec).is_zero() {
        return Degeneracy {
            degenerate: true,
            witness: Some(DegeneracyWitness::RepeatedRoot),
        };
    }
    let mut r = ratio_polynomial(spec);
    let x_minus_one = ZPoly::from_i64(&[-1, 1]);
    for _ in 0..3 {
        let (q, rem) = r.divrem_monic(&x_minus_one);
        debug_assert!(rem.is_zero(), "diagonal ratios must contribute (x-1)^3");
        r = q;
    }
    for n in CYCLOTOMIC_ORDERS {
        let (_, rem) = r.divrem_monic(&cyclotomic(n));
        if rem.is_zero() {
            return Degeneracy {
                degenerate: true,
                witness: Some(DegeneracyWitness::RootOfUnityRatio(n)),
            };
        }
    }
    Degeneracy {
        degenerate: false,
        witness: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GaloisLabel {
    S3,
    C3,
    C2,
    #[serde(rename = "Trivial-split")]
    TrivialSplit,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl Condition {
    fn pass() -> Self {
        Condition {
            holds: true,
            reason: None,
        }
    }

    fn fail(reason: impl Into<String>) -> Self {
        Condition {
            holds: false,
            reason: Some(reason.into()),
        }
    }
}

fn serialize_bigint<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v.to_i64() {
        Some(small) => s.serialize_i64(small),
        None => s.serialize_str(&v.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyAnalysis {
    pub spec: RecurrenceSpec,
    #[serde(serialize_with = "serialize_bigint")]
    pub discriminant: BigInt,
    pub factorization: Factorization,
    pub cond_i: Condition,
    pub cond_ii: Condition,
    pub cond_iii: Condition,
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degeneracy_witness: Option<DegeneracyWitness>,
    pub gamma: f64,
    pub galois_label: GaloisLabel,
}

impl PolyAnalysis {
    pub fn all_conditions_hold(&self) -> bool {
        self.cond_i.holds && self.cond_ii.holds && self.cond_iii.holds
    }

    /// Failure reasons tagged with the condition they belong to.
    pub fn failures(&self) -> Vec<String> {
        [("i", &self.cond_i), ("ii", &self.cond_ii), ("iii", &self.cond_iii)]
            .into_iter()
            .filter_map(|(tag, c)| c.reason.as_ref().map(|r| format!("({tag}) {r}")))
            .collect()
    }
}

fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// Runs every structural check on the characteristic polynomial.
pub fn check_conditions(spec: &RecurrenceSpec) -> Result<PolyAnalysis> {
    spec.ensure_ternary()?;
    let disc = discriminant(spec);
    let factorization = factorize(spec);
    let degeneracy = is_degenerate(spec);
    const SPLIT: &str = "characteristic polynomial factors completely over Q";
    const REPEATED: &str = "characteristic polynomial has a repeated root";

    let (galois_label, cond_i) = match factorization {
        Factorization::Irreducible if is_perfect_square(&disc) => (
            GaloisLabel::C3,
            Condition::fail(format!(
                "Galois group is C3: discriminant {disc} is a perfect square"
            )),
        ),
        Factorization::Irreducible => (GaloisLabel::S3, Condition::pass()),
        Factorization::LinearTimesIrreducibleQuadratic { .. } => {
            (GaloisLabel::C2, Condition::pass())
        }
        Factorization::ThreeLinear { .. } => (GaloisLabel::TrivialSplit, Condition::fail(SPLIT)),
        Factorization::RepeatedRoot { .. } => (GaloisLabel::Degenerate, Condition::fail(REPEATED)),
    };

    let cond_ii = match factorization {
        Factorization::Irreducible if spec.a3.abs() == 1 => Condition::pass(),
        Factorization::Irreducible => Condition::fail(format!(
            "irreducible but a3 = {} is not +1 or -1",
            spec.a3
        )),
        Factorization::LinearTimesIrreducibleQuadratic { a, c, .. } => {
            let mut reasons = Vec::new();
            if a.abs() == 1 {
                reasons.push(format!("integer root a = {a}"));
            }
            if c.abs() != 1 {
                reasons.push(format!("quadratic factor has constant term c = {c}, not +1 or -1"));
            }
            if reasons.is_empty() {
                Condition::pass()
            } else {
                Condition::fail(reasons.join("; "))
            }
        }
        Factorization::ThreeLinear { .. } => Condition::fail(SPLIT),
        Factorization::RepeatedRoot { .. } => Condition::fail(REPEATED),
    };

    let cond_iii = match degeneracy.witness {
        None => Condition::pass(),
        Some(DegeneracyWitness::RepeatedRoot) => Condition::fail(REPEATED),
        Some(DegeneracyWitness::RootOfUnityRatio(n)) => Condition::fail(format!(
            "a ratio of two roots is a primitive {n}-th root of unity"
        )),
    };

    Ok(PolyAnalysis {
        spec: *spec,
        discriminant: disc,
        factorization,
        cond_i,
        cond_ii,
        cond_iii,
        degenerate: degeneracy.degenerate,
        degeneracy_witness: degeneracy.witness,
        gamma: dominant_root_modulus(spec),
        galois_label,
    })
}

/// `max(|alpha|, |beta|, |gamma|)` computed in floating point.
pub fn dominant_root_modulus(spec: &RecurrenceSpec) -> f64 {
    roots::dominant_modulus(spec.coefficients().map(|c| c as f64))
}

/// Whether `x` is a root of the characteristic polynomial; exact.
pub fn is_root(spec: &RecurrenceSpec, x: i64) -> bool {
    eval_big(spec, x).is_zero()
}
