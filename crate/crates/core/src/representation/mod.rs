//! Deciding `N = u^2 + n v^2` and membership of `n` in the set of indices
//! with `U_n = u^2 + n v^2`.

pub mod cornacchia;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Roots;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::arith::factor::{factor_big, factor_u64, Factorization};
use crate::arith::modp::legendre;
use crate::error::{Error, Result};
use crate::modular::term_mod;
use crate::recurrence::{lucas, term_iter_with_budget, term_with_budget, Preset, RecurrenceSpec, DEFAULT_TERM_DIGITS};

use cornacchia::{cornacchia, neg_sqrt_mod};

pub const DEFAULT_ENUMERATION_LIMIT: u64 = 1_000_000;
/// Total Pollard-rho iterations allowed per factorization.
pub const DEFAULT_RHO_BUDGET: u64 = 20_000_000;
pub const DEFAULT_N_EXACT: u64 = 120;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepresentConfig {
    /// Tier A runs when `floor(sqrt(N / n))` is at most this.
    pub enumeration_limit: u64,
    pub rho_budget: u64,
    /// Size cap, in decimal digits, for exact terms `U_n`.
    pub term_digits: u64,
}

impl Default for RepresentConfig {
    fn default() -> Self {
        RepresentConfig {
            enumeration_limit: DEFAULT_ENUMERATION_LIMIT,
            rho_budget: DEFAULT_RHO_BUDGET,
            term_digits: DEFAULT_TERM_DIGITS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Enumeration,
    Cornacchia,
    QrSieve,
    WitnessFormula,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Enumeration => "enumeration",
            Method::Cornacchia => "cornacchia",
            Method::QrSieve => "qr_sieve",
            Method::WitnessFormula => "witness_formula",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Representation {
    /// The solution with the least `v`.
    Member { u: BigUint, v: BigUint },
    NonMember,
    Unknown(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub result: Representation,
    pub method: Method,
}

/// `(floor(sqrt(N)), N is a perfect square)`.
pub fn integer_sqrt(n: &BigUint) -> (BigUint, bool) {
    let r = n.sqrt();
    let exact = &r * &r == *n;
    (r, exact)
}

pub fn represent(big_n: &BigUint, n: u64) -> Result<Representation> {
    Ok(represent_with(big_n, n, &RepresentConfig::default())?.result)
}

/// Decides `N = u^2 + n v^2` over nonnegative integers.
pub fn represent_with(big_n: &BigUint, n: u64, cfg: &RepresentConfig) -> Result<Decision> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    let v_max = (big_n / n).sqrt();
    if v_max <= BigUint::from(cfg.enumeration_limit) {
        let v_max = v_max.to_u64().expect("bounded by the limit");
        return Ok(Decision {
            result: enumerate(big_n, n, v_max),
            method: Method::Enumeration,
        });
    }
    let result = match factor_big(big_n, cfg.rho_budget) {
        Ok(f) => by_cornacchia(big_n, n, &f),
        Err(e @ Error::Budget { .. }) => Representation::Unknown(e.to_string()),
        Err(e) => return Err(e),
    };
    Ok(Decision {
        result,
        method: Method::Cornacchia,
    })
}

/// Tier A: scan `v = 0, 1, ...` and test `N - n v^2` for squareness.
pub fn enumerate(big_n: &BigUint, n: u64, v_max: u64) -> Representation {
    if let Some(small) = big_n.to_u128() {
        for v in 0..=v_max {
            let rest = small - n as u128 * v as u128 * v as u128;
            let u = rest.sqrt();
            if u * u == rest {
                return Representation::Member {
                    u: BigUint::from(u),
                    v: BigUint::from(v),
                };
            }
        }
        return Representation::NonMember;
    }
    for v in 0..=v_max {
        let rest = big_n - BigUint::from(n) * v * v;
        let (u, exact) = integer_sqrt(&rest);
        if exact {
            return Representation::Member { u, v: BigUint::from(v) };
        }
    }
    Representation::NonMember
}

/// Tier B: every solution is `g` times a primitive solution of
/// `x^2 + n y^2 = N / g^2`, and each primitive solution comes from one
/// square root of `-n` modulo `N / g^2`.
pub fn by_cornacchia(big_n: &BigUint, n: u64, factors: &Factorization<BigUint>) -> Representation {
    if big_n.is_zero() {
        return Representation::Member {
            u: BigUint::zero(),
            v: BigUint::zero(),
        };
    }
    let (root, exact) = integer_sqrt(big_n);
    if exact {
        return Representation::Member { u: root, v: BigUint::zero() };
    }
    let mut best: Option<(BigUint, BigUint)> = None;
    let halves: Vec<u32> = factors.iter().map(|(_, e)| e / 2).collect();
    let mut f = vec![0u32; factors.len()];
    loop {
        let g: BigUint = factors
            .iter()
            .zip(&f)
            .map(|((q, _), &k)| q.pow(k))
            .product();
        let m_factors: Factorization<BigUint> = factors
            .iter()
            .zip(&f)
            .map(|((q, e), &k)| (q.clone(), e - 2 * k))
            .collect();
        let m: BigUint = big_n / (&g * &g);
        for r in neg_sqrt_mod(n, &m_factors) {
            if let Some((x, y)) = cornacchia(&m, n, &r) {
                let (u, v) = (&x * &g, &y * &g);
                if best.as_ref().is_none_or(|(_, bv)| v < *bv) {
                    best = Some((u, v));
                }
            }
        }
        // next exponent vector for g
        let mut i = 0;
        while i < f.len() && f[i] == halves[i] {
            f[i] = 0;
            i += 1;
        }
        if i == f.len() {
            break;
        }
        f[i] += 1;
    }
    match best {
        Some((u, v)) => {
            debug_assert_eq!(&u * &u + BigUint::from(n) * &v * &v, *big_n);
            Representation::Member { u, v }
        }
        None => Representation::NonMember,
    }
}

/// Least odd prime `p | n` with `(U_n / p) = -1`. Such a `p` rules out
/// `U_n = u^2 + n v^2`, since that forces `U_n = u^2 (mod p)`.
pub fn qr_obstruction(spec: &RecurrenceSpec, n: u64) -> Option<u64> {
    if n < 2 {
        return None;
    }
    factor_u64(n)
        .into_iter()
        .map(|(p, _)| p)
        .filter(|&p| p != 2)
        .find(|&p| {
            let r = term_mod(spec, n, p);
            r != 0 && legendre(r, p) == -1
        })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MembershipStatus {
    Member { u: BigUint, v: BigUint },
    NonMember,
    Obstructed { p: u64 },
    Unknown,
}

impl MembershipStatus {
    pub fn label(&self) -> &'static str {
        match self {
            MembershipStatus::Member { .. } => "member",
            MembershipStatus::NonMember => "non_member",
            MembershipStatus::Obstructed { .. } => "obstructed",
            MembershipStatus::Unknown => "unknown",
        }
    }

    pub fn is_certified_non_member(&self) -> bool {
        matches!(self, MembershipStatus::NonMember | MembershipStatus::Obstructed { .. })
    }
}

fn serialize_opt_big<S: Serializer>(v: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_str(&x.to_string()),
        None => s.serialize_none(),
    }
}

/// Flat row for CSV output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MembershipRow {
    pub n: u64,
    pub status: &'static str,
    #[serde(serialize_with = "serialize_opt_big")]
    pub u: Option<BigUint>,
    #[serde(serialize_with = "serialize_opt_big")]
    pub v: Option<BigUint>,
    pub obstruction_p: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipRecord {
    pub n: u64,
    pub status: MembershipStatus,
    /// `None` for `Unknown` records that were never attempted.
    pub method: Option<Method>,
}

impl MembershipRecord {
    /// A member record; checks `u^2 + n v^2 = U_n` exactly.
    pub fn member(n: u64, u: BigUint, v: BigUint, u_n: &BigInt, method: Method) -> Result<Self> {
        let lhs = BigInt::from_biguint(Sign::Plus, &u * &u + BigUint::from(n) * &v * &v);
        if lhs != *u_n {
            return Err(Error::invalid(format!("{u}^2 + {n}*{v}^2 != U_{n} = {u_n}")));
        }
        Ok(MembershipRecord {
            n,
            status: MembershipStatus::Member { u, v },
            method: Some(method),
        })
    }

    /// An obstruction record; checks the Legendre condition.
    pub fn obstructed(spec: &RecurrenceSpec, n: u64, p: u64) -> Result<Self> {
        let r = term_mod(spec, n, p);
        if p == 2 || n % p != 0 || r == 0 || legendre(r, p) != -1 {
            return Err(Error::invalid(format!("p = {p} does not obstruct n = {n}")));
        }
        Ok(MembershipRecord {
            n,
            status: MembershipStatus::Obstructed { p },
            method: Some(Method::QrSieve),
        })
    }

    pub fn row(&self) -> MembershipRow {
        let (u, v, p) = match &self.status {
            MembershipStatus::Member { u, v } => (Some(u.clone()), Some(v.clone()), None),
            MembershipStatus::Obstructed { p } => (None, None, Some(*p)),
            _ => (None, None, None),
        };
        MembershipRow {
            n: self.n,
            status: self.status.label(),
            u,
            v,
            obstruction_p: p,
        }
    }
}

/// Closed-form witness `(u, v)` for the counterexample presets.
pub fn witness_formula(spec: &RecurrenceSpec, n: u64) -> Option<(BigUint, BigUint)> {
    match Preset::identify(spec)? {
        Preset::Pow2PlusN if n % 2 == 0 => Some((BigUint::one() << (n / 2), BigUint::one())),
        Preset::SquarePow => Some(((BigUint::one() << n) + 1u32, BigUint::zero())),
        Preset::FiveFibSqMinus4 if n % 2 == 1 => Some((lucas(n).magnitude().clone(), BigUint::zero())),
        _ => None,
    }
}

fn decide_exact(n: u64, u_n: &BigInt, cfg: &RepresentConfig) -> Result<MembershipRecord> {
    let Some(big_n) = u_n.to_biguint() else {
        return Ok(MembershipRecord {
            n,
            status: MembershipStatus::NonMember,
            method: Some(Method::Enumeration),
        });
    };
    let d = represent_with(&big_n, n, cfg)?;
    match d.result {
        Representation::Member { u, v } => MembershipRecord::member(n, u, v, u_n, d.method),
        Representation::NonMember => Ok(MembershipRecord {
            n,
            status: MembershipStatus::NonMember,
            method: Some(d.method),
        }),
        Representation::Unknown(_) => Ok(MembershipRecord {
            n,
            status: MembershipStatus::Unknown,
            method: Some(d.method),
        }),
    }
}

fn classify(spec: &RecurrenceSpec, n: u64, exact: Option<&BigInt>, cfg: &RepresentConfig) -> Result<MembershipRecord> {
    if let Some((u, v)) = witness_formula(spec, n) {
        let owned;
        let u_n = match exact {
            Some(t) => t,
            None => {
                owned = term_with_budget(spec, n, cfg.term_digits)?;
                &owned
            }
        };
        return MembershipRecord::member(n, u, v, u_n, Method::WitnessFormula);
    }
    if let Some(p) = qr_obstruction(spec, n) {
        return MembershipRecord::obstructed(spec, n, p);
    }
    match exact {
        Some(u_n) => decide_exact(n, u_n, cfg),
        None => Ok(MembershipRecord {
            n,
            status: MembershipStatus::Unknown,
            method: None,
        }),
    }
}

/// Classifies one `n`: witness formula, then QR obstruction, then an
/// exact decision when `n <= n_exact`.
pub fn membership(spec: &RecurrenceSpec, n: u64, n_exact: u64) -> Result<MembershipRecord> {
    membership_with(spec, n, n_exact, &RepresentConfig::default())
}

pub fn membership_with(spec: &RecurrenceSpec, n: u64, n_exact: u64, cfg: &RepresentConfig) -> Result<MembershipRecord> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    spec.ensure_ternary()?;
    let exact = if n <= n_exact {
        Some(term_with_budget(spec, n, cfg.term_digits)?)
    } else {
        None
    };
    classify(spec, n, exact.as_ref(), cfg)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct StatusCounts {
    pub member: u64,
    pub non_member: u64,
    pub obstructed: u64,
    pub unknown: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MethodCounts {
    pub enumeration: u64,
    pub cornacchia: u64,
    pub qr_sieve: u64,
    pub witness_formula: u64,
    pub none: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountReport {
    pub spec: RecurrenceSpec,
    pub x: u64,
    pub n_exact: u64,
    pub counts: StatusCounts,
    pub methods: MethodCounts,
    /// `#Member`, a certified lower bound on `#M_U(x)`.
    pub lower_bound: u64,
    /// `x - #NonMember - #Obstructed`, a certified upper bound.
    pub upper_bound: u64,
    pub lower_density: f64,
    pub upper_density: f64,
    /// Squarefree `n <= x`; the rest have a nontrivial squarefull part.
    pub squarefree: u64,
    #[serde(skip)]
    pub records: Vec<MembershipRecord>,
}

pub fn count_range(spec: &RecurrenceSpec, x: u64, n_exact: u64) -> Result<CountReport> {
    count_range_with(spec, x, n_exact, &RepresentConfig::default())
}

/// Classifies every `1 <= n <= x`. Work is spread over the current rayon
/// pool; records come back in order of `n`, so the report does not depend
/// on the thread count.
pub fn count_range_with(spec: &RecurrenceSpec, x: u64, n_exact: u64, cfg: &RepresentConfig) -> Result<CountReport> {
    if x == 0 {
        return Err(Error::invalid("x must be at least 1"));
    }
    spec.ensure_ternary()?;
    let exact_upto = n_exact.min(x);
    let terms: Vec<BigInt> = term_iter_with_budget(spec, exact_upto, cfg.term_digits)?.collect();
    let records: Vec<MembershipRecord> = (1..=x)
        .into_par_iter()
        .map(|n| classify(spec, n, terms.get(n as usize), cfg))
        .collect::<Result<_>>()?;

    let mut counts = StatusCounts::default();
    let mut methods = MethodCounts::default();
    for r in &records {
        match r.status {
            MembershipStatus::Member { .. } => counts.member += 1,
            MembershipStatus::NonMember => counts.non_member += 1,
            MembershipStatus::Obstructed { .. } => counts.obstructed += 1,
            MembershipStatus::Unknown => counts.unknown += 1,
        }
        match r.method {
            Some(Method::Enumeration) => methods.enumeration += 1,
            Some(Method::Cornacchia) => methods.cornacchia += 1,
            Some(Method::QrSieve) => methods.qr_sieve += 1,
            Some(Method::WitnessFormula) => methods.witness_formula += 1,
            None => methods.none += 1,
        }
    }
    let lower_bound = counts.member;
    let squarefree = squarefree_count(x);
    let upper_bound = x - counts.non_member - counts.obstructed;
    Ok(CountReport {
        spec: *spec,
        x,
        n_exact,
        lower_density: lower_bound as f64 / x as f64,
        upper_density: upper_bound as f64 / x as f64,
        counts,
        methods,
        lower_bound,
        upper_bound,
        squarefree,
        records,
    })
}

/// Number of squarefree integers in `[1, x]`.
pub fn squarefree_count(x: u64) -> u64 {
    let mut square_free = vec![true; x as usize + 1];
    let mut q = 2u64;
    while q * q <= x {
        let mut m = q * q;
        while m <= x {
            square_free[m as usize] = false;
            m += q * q;
        }
        q += 1;
    }
    square_free[1..].iter().filter(|&&b| b).count() as u64
}
