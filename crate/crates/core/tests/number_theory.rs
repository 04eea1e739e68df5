use jacpair::number_theory::{
    find_nonresidue_prime, is_nonresidue_tuple, is_prime, jacobi, nonresidue_tuple, split_prime, two_group_tuple,
    verify_q_range, ResidueFilter,
};
use proptest::prelude::*;

fn trial_division(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn is_square_mod(a: u64, p: u64) -> bool {
    (1..p).any(|x| x * x % p == a % p)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 512, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn primality_matches_trial_division(n in 1u64..50_000_000) {
        prop_assert_eq!(is_prime(n), trial_division(n));
    }

    #[test]
    fn split_identity(qi in 0usize..60, k in 1i128..1_000_000) {
        let q = (3u64..).filter(|&q| trial_division(q)).nth(qi).unwrap();
        match split_prime(q, k) {
            Ok(a) => {
                prop_assert!(0 < a && a < q);
                prop_assert_eq!((a as i128 * (q - a) as i128 - k).rem_euclid(q as i128), 0);
                // Smallest such a.
                for b in 1..a {
                    prop_assert_ne!((b as i128 * (q - b) as i128 - k).rem_euclid(q as i128), 0);
                }
            }
            Err(_) => {
                let solvable = (1..q).any(|a| (a as i128 * (q - a) as i128 - k).rem_euclid(q as i128) == 0);
                prop_assert!(!solvable);
            }
        }
    }
}

#[test]
fn nonresidue_tuples_below_2000() {
    let mut count = 0;
    for p in (3..2000u64).filter(|&p| trial_division(p)) {
        for r in 1..=3u32 {
            let Ok(pr) = u64::try_from(p as u128 * (p as u128).pow(r - 1)) else {
                continue;
            };
            let Ok(s) = nonresidue_tuple(p, r, 1) else {
                continue;
            };
            let parts = s.parts();
            let tau: u128 = (0..parts.len())
                .map(|i| {
                    parts
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, &x)| x as u128)
                        .product::<u128>()
                })
                .sum();
            assert_eq!(tau, pr as u128, "p = {p}, r = {r}, s = {s}");
            assert!(parts.iter().all(|x| x % p != 0));
            let prod = parts.iter().fold(1u64, |acc, &x| (acc as u128 * (x % p) as u128 % p as u128) as u64);
            assert!(!is_square_mod(prod, p), "p = {p}, r = {r}, s = {s}");
            assert!(is_nonresidue_tuple(&s, p, r));
            assert!(parts.windows(2).all(|w| w[0] <= w[1]));
            count += 1;
        }
    }
    assert!(count > 900, "{count}");
}

#[test]
fn certificates_are_valid() {
    for p in (3..3000u64).filter(|&p| trial_division(p)) {
        for r in 1..=2u32 {
            let pr = p.pow(r);
            let Some(q) = find_nonresidue_prime(p, r, 1).unwrap() else {
                continue;
            };
            assert!(trial_division(q));
            assert_eq!(q % 4, if r % 2 == 1 { 3 } else { 1 });
            assert!(!is_square_mod(q, p), "p = {p}, q = {q}");
            assert!((q as u128).pow(2) < 4 * pr as u128);
            // Smallest with these properties.
            for smaller in (3..q).filter(|&x| x % 4 == q % 4 && trial_division(x)) {
                assert!(is_square_mod(smaller, p) || smaller % p == 0);
            }
            // The split exists by reciprocity when p = 1 (mod 4).
            if r == 1 && p % 4 == 1 {
                let a = split_prime(q, pr as i128).unwrap();
                assert_eq!(a as u128 * (q - a) as u128 % q as u128, pr as u128 % q as u128);
            }
        }
    }
}

#[test]
fn jacobi_matches_squares() {
    for p in (3..200u64).filter(|&p| trial_division(p)) {
        for a in 0..p {
            let want = if a == 0 {
                0
            } else if is_square_mod(a, p) {
                1
            } else {
                -1
            };
            assert_eq!(jacobi(a as i128, p).unwrap(), want);
        }
    }
}

#[test]
fn explicit_tuples() {
    assert_eq!(nonresidue_tuple(7, 1, 1).unwrap().parts(), [1, 6]);
    assert_eq!(nonresidue_tuple(5, 1, 1).unwrap().parts(), [1, 1, 2]);
    assert_eq!(nonresidue_tuple(13, 1, 1).unwrap().parts(), [1, 1, 6]);
    assert_eq!(two_group_tuple(3).unwrap().parts(), [1, 2, 2]);
    assert_eq!(two_group_tuple(4).unwrap().parts(), [1, 1, 1, 5]);
    assert!(two_group_tuple(2).is_err());
}

#[test]
fn q_search_report() {
    let filtered = verify_q_range(100_000, ResidueFilter::OneMod24, 1, true);
    assert!(filtered.failures.is_empty());
    for row in &filtered.rows {
        let q = row.q.unwrap();
        assert_eq!(row.p % 24, 1);
        assert!(!is_square_mod(q, row.p));
    }
    assert_eq!(filtered, verify_q_range(100_000, ResidueFilter::OneMod24, 3, true));
    assert_eq!(verify_q_range(2, ResidueFilter::All, 1, false).checked, 0);
}
