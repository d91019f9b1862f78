use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;

use ternrec_core::arith::primes_up_to;
use ternrec_core::recurrence::{fibonacci, term_iter, Preset};
use ternrec_core::representation::{
    count_range, membership, qr_obstruction, represent_with, MembershipStatus, Method, RepresentConfig, Representation,
};

const N_MAX: u64 = 10_000;

fn tier_b() -> RepresentConfig {
    RepresentConfig {
        enumeration_limit: 0,
        ..Default::default()
    }
}

/// Least v with N - n v^2 a square, by scanning all (u, v).
fn brute_min_v(table: &[Option<u64>], big: u64) -> Option<u64> {
    table[big as usize]
}

fn brute_table(n: u64) -> Vec<Option<u64>> {
    let mut t = vec![None; (N_MAX + 1) as usize];
    let mut v = 0;
    while n * v * v <= N_MAX {
        let mut u = 0;
        while u * u + n * v * v <= N_MAX {
            let slot = &mut t[(u * u + n * v * v) as usize];
            if slot.is_none() {
                *slot = Some(v);
            }
            u += 1;
        }
        v += 1;
    }
    t
}

fn check(res: &Representation, big: u64, n: u64, want: Option<u64>) {
    match (res, want) {
        (Representation::Member { u, v }, Some(wv)) => {
            assert_eq!(*v, BigUint::from(wv), "N={big} n={n}");
            assert_eq!(u * u + BigUint::from(n) * v * v, BigUint::from(big));
        }
        (Representation::NonMember, None) => {}
        other => panic!("N={big} n={n}: got {other:?}, brute force says {want:?}"),
    }
}

#[test]
fn both_tiers_match_exhaustive_search() {
    let a = RepresentConfig::default();
    let b = tier_b();
    for n in 1..=50u64 {
        let table = brute_table(n);
        for big in 0..=N_MAX {
            let want = brute_min_v(&table, big);
            let bu = BigUint::from(big);
            let ra = represent_with(&bu, n, &a).unwrap();
            assert_eq!(ra.method, Method::Enumeration);
            check(&ra.result, big, n, want);
            check(&represent_with(&bu, n, &b).unwrap().result, big, n, want);
        }
    }
}

#[test]
fn fibonacci_primes_one_mod_four() {
    for p in primes_up_to(101).into_iter().filter(|p| p % 4 == 1) {
        let f = fibonacci(p).to_biguint().unwrap();
        for cfg in [RepresentConfig::default(), tier_b()] {
            match represent_with(&f, p, &cfg).unwrap().result {
                Representation::Member { u, v } => {
                    assert_eq!(&u * &u + BigUint::from(p) * &v * &v, f);
                    if p == 13 {
                        assert_eq!((u, v), (BigUint::from(5u32), BigUint::from(4u32)));
                    }
                }
                other => panic!("F_{p}: {other:?}"),
            }
        }
    }
}

#[test]
fn obstructions_are_non_members() {
    let t = Preset::Tribonacci.spec();
    let terms: Vec<BigInt> = term_iter(&t, 60).unwrap().collect();
    assert_eq!(qr_obstruction(&t, 7), Some(7));
    for n in 1..=60u64 {
        let u_n = terms[n as usize].to_biguint().unwrap();
        let exhaustive = (0..=(&u_n / n).sqrt().try_into().unwrap())
            .any(|v: u64| {
                let rest = &u_n - BigUint::from(n) * v * v;
                let r = rest.sqrt();
                &r * &r == rest
            });
        let rec = membership(&t, n, 120).unwrap();
        match rec.status {
            MembershipStatus::Obstructed { .. } => assert!(!exhaustive, "n={n}"),
            MembershipStatus::Member { .. } => assert!(exhaustive, "n={n}"),
            MembershipStatus::NonMember => assert!(!exhaustive, "n={n}"),
            MembershipStatus::Unknown => panic!("n={n} undecided"),
        }
    }
}

#[test]
fn tribonacci_count_to_ten_matches_brute_force() {
    let t = Preset::Tribonacci.spec();
    let terms: Vec<BigInt> = term_iter(&t, 10).unwrap().collect();
    let rep = count_range(&t, 10, 120).unwrap();
    for rec in &rep.records {
        let n = rec.n;
        let big: u64 = terms[n as usize].clone().try_into().unwrap();
        let member = brute_table(n)[big as usize].is_some();
        assert_eq!(matches!(rec.status, MembershipStatus::Member { .. }), member, "n={n}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn cornacchia_matches_enumeration(big in 0u64..=1_000_000_000_000, n in 1u64..=1000) {
        let bu = BigUint::from(big);
        let a = represent_with(&bu, n, &RepresentConfig { enumeration_limit: u64::MAX, ..Default::default() }).unwrap();
        let b = represent_with(&bu, n, &tier_b()).unwrap();
        prop_assert_eq!(a.method, Method::Enumeration);
        prop_assert_eq!(a.result, b.result);
    }

    #[test]
    fn cornacchia_finds_constructed_members(u in 0u64..1_000_000, v in 0u64..30_000, n in 1u64..=1000) {
        let big = BigUint::from(u) * u + BigUint::from(n) * v * v;
        let b = represent_with(&big, n, &tier_b()).unwrap();
        let is_member = matches!(b.result, Representation::Member { .. });
        prop_assert!(is_member);
    }
}
