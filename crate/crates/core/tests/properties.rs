use proptest::prelude::*;

use sparse_sieve::arith::{factorize, gcd, mod_inv, quad_cong_roots};
use sparse_sieve::bounds::sieve_lhs;
use sparse_sieve::counting::{count_window_ap, dirichlet_approx, k_delta, p_alpha, WindowQuery};
use sparse_sieve::moduli::{derive_subset, enumerate_farey, ModuliSet};
use sparse_sieve::oracle;
use sparse_sieve::report::fmt_g17;
use sparse_sieve::sequence::{make_sequence, ModulusEvaluator, SequenceKind};

fn seq_kind() -> impl Strategy<Value = SequenceKind> {
    prop_oneof![
        Just(SequenceKind::Ones),
        any::<u64>().prop_map(SequenceKind::RandomSigns),
        any::<u64>().prop_map(SequenceKind::RandomPhases),
        (0.0f64..1.0).prop_map(SequenceKind::Focused),
    ]
}

fn moduli(max: u64) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::btree_set(1..=max, 1..12).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #[test]
    fn factorize_multiplies_back(n in 1u64..10_000_000) {
        let f = factorize(n);
        let prod: u64 = f.prime_powers().iter().map(|&(p, e)| p.pow(e)).product();
        prop_assert_eq!(prod, n);
    }

    #[test]
    fn inverse_is_inverse(a in 1u64..100_000, m in 2u64..100_000) {
        match mod_inv(a as i64, m) {
            Ok(x) => prop_assert_eq!((a as u128 * x as u128 % m as u128) as u64, 1),
            Err(_) => prop_assert!(gcd(a, m) != 1),
        }
    }

    #[test]
    fn quad_roots_match_scan(k in 1u64..3000, g in 1u64..3000, l in 0i64..3000) {
        let g = g % k;
        prop_assume!(gcd(g, k) == 1 && gcd(l as u64 % k, k) == 1);
        let fast = quad_cong_roots(g, l, k);
        prop_assert_eq!(fast.roots, oracle::quad_roots_scan(g, l, k));
        prop_assert!(fast.count <= 2u64 << factorize(k).omega());
    }

    #[test]
    fn parseval(kind in seq_kind(), n in 1usize..200, extra in 0u64..50) {
        let seq = make_sequence(&kind, n).unwrap();
        let q = n as u64 + extra;
        let e = ModulusEvaluator::new(&seq, q).energy(false);
        let want = q as f64 * seq.energy();
        prop_assert!((e - want).abs() <= 1e-9 * want.max(1.0));
    }

    #[test]
    fn classical_sieve_holds(kind in seq_kind(), n in 1usize..120, el in moduli(60)) {
        let seq = make_sequence(&kind, n).unwrap();
        let q = *el.last().unwrap();
        let set = ModuliSet::explicit(el).unwrap();
        let lhs = sieve_lhs(&seq, &set).unwrap();
        let naive = oracle::sieve_lhs_naive(&seq, &set);
        prop_assert!((lhs - naive).abs() <= 1e-9 * naive.max(1.0));
        prop_assert!(lhs <= (n as f64 + (q * q) as f64) * seq.energy() * (1.0 + 1e-9));
    }

    #[test]
    fn window_matches_scan(
        el in moduli(400), t in 1u64..6, k in 1u64..30, l in 0i64..30, u in 0.0f64..400.0,
    ) {
        prop_assume!(gcd(l as u64 % k, k) == 1);
        let l = l % k as i64;
        let set = ModuliSet::explicit(el).unwrap();
        let sub = derive_subset(&set, t);
        let q = WindowQuery::new(u, k, l, t).unwrap();
        let fast = count_window_ap(&sub, &q, set.offset(), set.span());
        let slow = oracle::window_count_scan(
            &sub, u, k, l, set.offset() / t as f64, (set.offset() + set.span()) / t as f64,
        );
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn k_delta_and_p_alpha_match_scan(el in moduli(40), delta in 1e-4f64..0.5, alpha in -0.2f64..1.2) {
        let farey = enumerate_farey(&ModuliSet::explicit(el).unwrap()).unwrap();
        prop_assert_eq!(k_delta(&farey, delta).unwrap(), oracle::k_delta_scan(&farey, delta));
        prop_assert_eq!(p_alpha(&farey, alpha, delta), oracle::p_alpha_scan(&farey, alpha, delta));
    }

    #[test]
    fn dirichlet_postconditions(alpha in 0.0f64..1.0, tau in 1.0f64..1e5) {
        let a = dirichlet_approx(alpha, tau).unwrap();
        prop_assert!(a.r >= 1 && a.r as f64 <= tau);
        prop_assert_eq!(gcd(a.b.unsigned_abs(), a.r), 1);
        prop_assert!(a.z.abs() <= 1.0 / (a.r as f64 * tau));
    }

    #[test]
    fn g17_round_trips(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
    }
}
