use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use proptest::prelude::*;

use ternrec_core::arith::primes_up_to;
use ternrec_core::charpoly::{factorize, Factorization};
use ternrec_core::modular::profile::direct_period;
use ternrec_core::modular::roots::{quadratic_cofactor, single_root};
use ternrec_core::modular::{classify_prime, count_roots_mod_p, term_mod, z_primes, Fp2, Fp2Element, PrimeContext, RootCount};
use ternrec_core::recurrence::{term_iter, Preset, RecurrenceSpec};

fn good_presets() -> [RecurrenceSpec; 2] {
    [Preset::Tribonacci.spec(), Preset::Pow2PlusFib.spec()]
}

#[test]
fn lemma5_divisibilities_for_good_presets() {
    for spec in good_presets() {
        for p in z_primes(&spec, 20_000).unwrap() {
            let pr = classify_prime(&spec, p).unwrap();
            let (oa, or, t, k) = (
                pr.ord_alpha.unwrap(),
                pr.ord_ratio.unwrap(),
                pr.t_p.unwrap(),
                pr.k_p.unwrap(),
            );
            assert_eq!((p - 1) % oa, 0, "{spec} p={p}");
            assert_eq!((p + 1) % or, 0, "{spec} p={p}");
            assert_eq!(k % t, 0);
            if t == k {
                let prod = oa * or;
                assert_eq!((2 * t) % prod, 0, "{spec} p={p}");
                assert_eq!((8 * prod) % (2 * t), 0, "{spec} p={p}");
                assert_eq!((8 * (p - 1) * (p + 1)) % (8 * prod), 0);
            }
            if p > 100 {
                assert_eq!(t, k, "{spec} p={p}");
            }
            let mult = pr.mult_order.unwrap();
            assert!(mult <= 6);
        }
    }
}

#[test]
fn multiplier_orders_divide_six_or_four() {
    for p in z_primes(&Preset::Tribonacci.spec(), 20_000).unwrap() {
        let m = classify_prime(&Preset::Tribonacci.spec(), p).unwrap().mult_order.unwrap();
        assert_eq!(6 % m, 0, "p={p}");
    }
    for p in z_primes(&Preset::Pow2PlusFib.spec(), 20_000).unwrap() {
        let m = classify_prime(&Preset::Pow2PlusFib.spec(), p).unwrap().mult_order.unwrap();
        assert_eq!(4 % m, 0, "p={p}");
    }
}

#[test]
fn v_mod_matches_exact_terms() {
    for spec in good_presets() {
        let exact: Vec<BigInt> = term_iter(&spec, 3_000).unwrap().collect();
        for p in z_primes(&spec, 200).unwrap() {
            let ctx = PrimeContext::new(&spec, p).unwrap();
            for m in 0..=(3_000 / p) {
                let want = exact[(p * m) as usize].mod_floor(&BigInt::from(p)).to_u64().unwrap();
                assert_eq!(ctx.v_mod(m), want, "{spec} p={p} m={m}");
            }
        }
    }
}

#[test]
fn term_mod_oracle_up_to_1000() {
    for spec in good_presets() {
        let exact: Vec<BigInt> = term_iter(&spec, 1_000).unwrap().collect();
        for p in primes_up_to(1_000) {
            let bp = BigInt::from(p);
            for (n, u) in exact.iter().enumerate().step_by(7) {
                assert_eq!(BigInt::from(term_mod(&spec, n as u64, p)), u.mod_floor(&bp));
            }
        }
    }
}

fn coeff() -> impl Strategy<Value = i64> {
    -30i64..=30
}

fn unit_spec() -> impl Strategy<Value = RecurrenceSpec> {
    (coeff(), coeff(), prop_oneof![Just(1i64), Just(-1i64)], coeff(), coeff(), coeff())
        .prop_map(|(a1, a2, a3, u0, u1, u2)| RecurrenceSpec::new(a1, a2, a3, u0, u1, u2))
        .prop_filter("irreducible", |s| factorize(s) == Factorization::Irreducible)
}

fn small_odd_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(primes_up_to(3_000).into_iter().skip(1).collect::<Vec<_>>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn profile_invariants(spec in unit_spec(), p in small_odd_prime()) {
        let pr = classify_prime(&spec, p).unwrap();
        prop_assert_eq!(pr.in_z, pr.root_count == RootCount::One);
        match direct_period(&spec, p, 2_000_000) {
            Some(d) => prop_assert_eq!(pr.t_p, Some(d)),
            None => prop_assert!(pr.t_p.unwrap() > 2_000_000),
        }
        if pr.in_z {
            let (oa, or, k, t) = (pr.ord_alpha.unwrap(), pr.ord_ratio.unwrap(), pr.k_p.unwrap(), pr.t_p.unwrap());
            prop_assert_eq!((p - 1) % oa, 0);
            prop_assert_eq!((p + 1) % or, 0);
            prop_assert_eq!(k % t, 0);
            prop_assert_eq!(k % pr.n0.unwrap(), 0);
            // a3 = +-1 makes every multiplier a cube root of +-1
            prop_assert_eq!(6 % pr.mult_order.unwrap(), 0);
        }
    }

    #[test]
    fn frobenius_swaps_conjugates(spec in unit_spec(), p in small_odd_prime(), a in 0u64..3000, b in 1u64..3000) {
        prop_assume!(count_roots_mod_p(&spec, p) == RootCount::One);
        let alpha = single_root(&spec, p).unwrap();
        let (qb, qc) = quadratic_cofactor(&spec, alpha, p);
        let f = Fp2::new(p, qb, qc);
        prop_assert_eq!(f.pow(f.theta(), p as u128), f.conj(f.theta()));
        let x = Fp2Element { a: a % p, b: b % p };
        prop_assume!(x != Fp2Element { a: 0, b: 0 });
        prop_assert_eq!(f.pow(x, (p as u128) * (p as u128) - 1), f.one());
        prop_assert_eq!(f.pow(x, p as u128), f.conj(x));
    }

    #[test]
    fn quadratic_case_multipliers_divide_four(
        a in prop_oneof![-9i64..=-2, 2i64..=9],
        b in -9i64..=9,
        c in prop_oneof![Just(1i64), Just(-1i64)],
        p in small_odd_prime(),
    ) {
        prop_assume!(b * b - 4 * c < 0 || ((b * b - 4 * c) as f64).sqrt().fract() != 0.0);
        // (X - a)(X^2 + bX + c)
        let spec = RecurrenceSpec::new(a - b, a * b - c, a * c, 0, 0, 1);
        prop_assume!(spec.a3 % p as i64 != 0);
        let pr = classify_prime(&spec, p).unwrap();
        if let Some(m) = pr.mult_order {
            prop_assert_eq!(4 % m, 0, "p={} a={} b={} c={}", p, a, b, c);
        }
    }
}
