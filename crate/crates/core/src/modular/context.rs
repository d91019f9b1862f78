//! Computations attached to one prime: the sequence `V_m = U_{pm} mod p`,
//! its periods along progressions, Legendre character sums, and the sets
//! `K_y`, `L_y` and `P_{f,U}`.

use std::collections::VecDeque;

use num_integer::Integer;
use serde::Serialize;

use crate::arith::modp::legendre;
use crate::error::{Error, Result};
use crate::recurrence::RecurrenceSpec;

use super::mat3::{reduced_coefficients, step, Mat3, State};
use super::profile::{classify_prime, generic_period, PrimeProfile};
use super::term_mod;

/// Default cap on the number of states a scan may visit.
pub const DEFAULT_SCAN_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CharSum {
    pub t_cdp: u64,
    pub sum: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProgressionPeriod {
    pub t_cdp: u64,
    pub matches_formula: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PfuResult {
    pub member: bool,
    pub witness: Option<[u64; 7]>,
}

/// Triple `(V_0, V_1, V_2)`. `V` satisfies the same recurrence mod `p`
/// because Frobenius permutes the roots of `Psi`.
fn v_initial(spec: &RecurrenceSpec, p: u64) -> State {
    [0, p, 2 * p].map(|n| term_mod(spec, n, p))
}

/// Prime in Z together with its profile.
#[derive(Debug, Clone)]
pub struct PrimeContext {
    spec: RecurrenceSpec,
    profile: PrimeProfile,
    t_p: u64,
    budget: u64,
}

impl PrimeContext {
    pub fn new(spec: &RecurrenceSpec, p: u64) -> Result<Self> {
        let profile = classify_prime(spec, p)?;
        if !profile.in_z {
            return Err(Error::invalid(format!("p = {p} is not in Z ({} roots)", profile.root_count)));
        }
        let t_p = profile.t_p.expect("period of a prime in Z");
        Ok(PrimeContext {
            spec: *spec,
            profile,
            t_p,
            budget: DEFAULT_SCAN_BUDGET,
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn p(&self) -> u64 {
        self.profile.p
    }

    pub fn profile(&self) -> &PrimeProfile {
        &self.profile
    }

    pub fn v_mod(&self, m: u64) -> u64 {
        let p = self.p();
        let n = (p as u128 * m as u128 % self.t_p as u128) as u64;
        term_mod(&self.spec, n, p)
    }

    pub fn char_sum(&self, c: u64, d: u64) -> Result<CharSum> {
        progression_scan(&self.spec, self.p(), self.t_p, c, d, self.budget)
    }

    pub fn period_in_progression(&self, c: u64, d: u64) -> Result<ProgressionPeriod> {
        let t_cdp = self.char_sum(c, d)?.t_cdp;
        Ok(ProgressionPeriod {
            t_cdp,
            matches_formula: t_cdp == self.t_p / d.gcd(&self.t_p),
        })
    }

    pub fn in_k_y(&self, y: f64) -> bool {
        self.profile.ord_alpha.expect("in Z") as f64 <= y
    }

    pub fn in_l_y(&self, y: f64) -> bool {
        self.profile.ord_ratio.expect("in Z") as f64 <= y
    }
}

/// Period of `W_k = V_{c + d k}` by matching full state triples of `W`,
/// and the sum of `(W_k / p)` over one period.
fn progression_scan(spec: &RecurrenceSpec, p: u64, t_p: u64, c: u64, d: u64, budget: u64) -> Result<CharSum> {
    if d == 0 || c >= d {
        return Err(Error::invalid(format!("need 0 <= c < d, got c = {c}, d = {d}")));
    }
    // W has period at most t_p, and the scan reads two terms past it
    let needed = t_p.saturating_add(3);
    if needed > budget {
        return Err(Error::Budget {
            what: "progression scan states",
            needed,
            limit: budget,
        });
    }
    let m = Mat3::companion(spec, p);
    let md = m.pow(d as u128);
    let mut s = m.pow(c as u128).apply(&v_initial(spec, p));
    let mut first = [0u64; 3];
    let mut window = [0u64; 3];
    let mut legs = [0i64; 3];
    let mut sum = 0i64;
    for k in 0..needed {
        let w = s[0];
        if k < 3 {
            first[k as usize] = w;
        }
        window = [window[1], window[2], w];
        let leg = if k == 0 { 0 } else { legendre(w, p) as i64 };
        legs = [legs[1], legs[2], leg];
        sum += leg;
        if k >= 3 && window == first {
            let t = k - 2;
            return Ok(CharSum {
                t_cdp: t,
                sum: sum - legs[1] - legs[2],
            });
        }
        s = md.apply(&s);
    }
    unreachable!("W is periodic with period dividing t_p = {t_p}")
}

fn period_for(spec: &RecurrenceSpec, p: u64) -> Result<u64> {
    if p == 2 {
        return Err(Error::invalid("p = 2 is excluded"));
    }
    let t = generic_period(spec, p)?;
    u64::try_from(t).map_err(|_| Error::Budget {
        what: "period states",
        needed: u64::MAX,
        limit: DEFAULT_SCAN_BUDGET,
    })
}

/// `V_m = U_{pm} mod p` for a prime in Z.
pub fn v_mod(spec: &RecurrenceSpec, p: u64, m: u64) -> Result<u64> {
    Ok(PrimeContext::new(spec, p)?.v_mod(m))
}

pub fn char_sum(spec: &RecurrenceSpec, p: u64, c: u64, d: u64) -> Result<CharSum> {
    PrimeContext::new(spec, p)?.char_sum(c, d)
}

/// Period of `V_{c + d k}` and whether it equals `t_p / gcd(d, t_p)`. Any odd
/// prime not dividing `a3` is accepted.
pub fn period_in_progression(spec: &RecurrenceSpec, p: u64, c: u64, d: u64) -> Result<ProgressionPeriod> {
    let t_p = period_for(spec, p)?;
    let t_cdp = progression_scan(spec, p, t_p, c, d, DEFAULT_SCAN_BUDGET)?.t_cdp;
    Ok(ProgressionPeriod {
        t_cdp,
        matches_formula: t_cdp == t_p / d.gcd(&t_p),
    })
}

pub fn in_k_y(spec: &RecurrenceSpec, p: u64, y: f64) -> Result<bool> {
    Ok(PrimeContext::new(spec, p)?.in_k_y(y))
}

pub fn in_l_y(spec: &RecurrenceSpec, p: u64, y: f64) -> Result<bool> {
    Ok(PrimeContext::new(spec, p)?.in_l_y(y))
}

/// Whether seven indices `m_1 < ... < m_7` with `m_7 - m_1 <= f_p` have
/// `U_{p m_i} = 0 mod p`. Scanning `m` in `[1, t_p + f_p]` covers every
/// window by periodicity.
pub fn in_p_fu(spec: &RecurrenceSpec, p: u64, f_p: u64, budget: u64) -> Result<PfuResult> {
    if f_p == 0 {
        return Err(Error::invalid("f_p must be positive"));
    }
    let t_p = period_for(spec, p)?;
    let needed = t_p.saturating_add(f_p);
    if needed > budget {
        return Err(Error::Budget {
            what: "zero scan states",
            needed,
            limit: budget,
        });
    }
    let coeffs = reduced_coefficients(spec, p);
    let mut s = v_initial(spec, p);
    let mut zeros: VecDeque<u64> = VecDeque::with_capacity(8);
    for m in 1..=needed {
        s = step(&coeffs, &s, p);
        // s now holds (V_m, V_{m+1}, V_{m+2})
        if s[0] != 0 {
            continue;
        }
        zeros.push_back(m);
        while m - zeros[0] > f_p {
            zeros.pop_front();
        }
        if zeros.len() == 7 {
            let mut w = [0; 7];
            for (slot, &z) in w.iter_mut().zip(&zeros) {
                *slot = z;
            }
            return Ok(PfuResult {
                member: true,
                witness: Some(w),
            });
        }
    }
    Ok(PfuResult {
        member: false,
        witness: None,
    })
}
