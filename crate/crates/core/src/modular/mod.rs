//! Arithmetic of the recurrence modulo primes.

pub mod context;
pub mod fp2;
pub mod mat3;
pub mod profile;
pub mod roots;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::arith::sieve::SegmentedPrimes;
use crate::charpoly::discriminant;
use crate::error::Result;
use crate::recurrence::RecurrenceSpec;

pub use context::{
    char_sum, in_k_y, in_l_y, in_p_fu, period_in_progression, v_mod, CharSum, PfuResult, PrimeContext,
    ProgressionPeriod, DEFAULT_SCAN_BUDGET,
};
pub use fp2::{Fp2, Fp2Element};
pub use mat3::Mat3;
pub use profile::{classify_prime, direct_period, generic_period, profile_any, PrimeProfile};
pub use roots::{count_roots_mod_p, RootCount};

/// `U_n mod p` by companion-matrix exponentiation.
pub fn term_mod(spec: &RecurrenceSpec, n: u64, p: u64) -> u64 {
    let s0 = mat3::initial_state(spec, p);
    if n < 3 {
        return s0[n as usize];
    }
    Mat3::companion(spec, p).pow(n as u128).apply(&s0)[0]
}

/// The primes of Z up to `x` in increasing order: odd primes not dividing
/// `a3 * disc` at which `Psi` has exactly one root.
pub struct ZPrimes {
    spec: RecurrenceSpec,
    disc: BigInt,
    primes: SegmentedPrimes,
}

impl Iterator for ZPrimes {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        for p in self.primes.by_ref() {
            if is_z_prime_with(&self.spec, &self.disc, p) {
                return Some(p);
            }
        }
        None
    }
}

fn is_z_prime_with(spec: &RecurrenceSpec, disc: &BigInt, p: u64) -> bool {
    if p == 2 || spec.a3.rem_euclid(p as i64) == 0 {
        return false;
    }
    let d = (disc % p).to_i64().unwrap_or(1);
    d != 0 && count_roots_mod_p(spec, p) == RootCount::One
}

pub fn is_z_prime(spec: &RecurrenceSpec, p: u64) -> bool {
    is_z_prime_with(spec, &discriminant(spec), p)
}

pub fn z_primes(spec: &RecurrenceSpec, x: u64) -> Result<ZPrimes> {
    z_primes_in(spec, 2, x)
}

/// The primes of Z in `[lo, hi]`.
pub fn z_primes_in(spec: &RecurrenceSpec, lo: u64, hi: u64) -> Result<ZPrimes> {
    spec.ensure_ternary()?;
    Ok(ZPrimes {
        spec: *spec,
        disc: discriminant(spec),
        primes: SegmentedPrimes::new(lo, hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::{term, Preset};

    #[test]
    fn term_mod_examples() {
        let t = Preset::Tribonacci.spec();
        assert_eq!(term_mod(&t, 7, 7), 6);
        let table: Vec<u64> = (0..48).map(|n| term_mod(&t, n, 7)).collect();
        assert_eq!(term_mod(&t, 1_000_000_000, 7), table[(1_000_000_000 % 48) as usize]);
        assert_eq!(term_mod(&Preset::Pow2PlusFib.spec(), 0, 5), 1);
        assert_eq!(term_mod(&t, u64::MAX, 7), table[(u64::MAX % 48) as usize]);
    }

    #[test]
    fn term_mod_matches_exact_terms() {
        use num_integer::Integer;
        for preset in [Preset::Tribonacci, Preset::Pow2PlusFib, Preset::FiveFibSqMinus4] {
            let s = preset.spec();
            let exact: Vec<BigInt> = crate::recurrence::term_iter(&s, 300).unwrap().collect();
            for p in [2u64, 3, 7, 13, 101, 997, 1_000_003] {
                for (n, u) in exact.iter().enumerate() {
                    let want = u.mod_floor(&BigInt::from(p)).to_u64().unwrap();
                    assert_eq!(term_mod(&s, n as u64, p), want, "{preset} n={n} p={p}");
                }
            }
            let big = term(&s, 5000).unwrap().mod_floor(&BigInt::from(1_000_003));
            assert_eq!(BigInt::from(term_mod(&s, 5000, 1_000_003)), big);
        }
    }

    #[test]
    fn z_prime_examples() {
        let t = Preset::Tribonacci.spec();
        assert_eq!(z_primes(&t, 13).unwrap().collect::<Vec<_>>(), vec![7, 13]);
        assert!(z_primes(&t, 6).unwrap().next().is_none());
        let f = Preset::Pow2PlusFib.spec();
        assert_eq!(z_primes(&f, 30).unwrap().collect::<Vec<_>>(), vec![3, 7, 13, 17, 23]);
        assert_eq!(
            z_primes(&t, 101).unwrap().collect::<Vec<_>>(),
            vec![7, 13, 17, 19, 29, 41, 43, 61, 73, 79, 83, 101]
        );
    }
}
