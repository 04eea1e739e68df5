use jacpair::classify::{Block, Letter, PairingDecomposition};
use jacpair::divisor::Divisor;
use jacpair::graph::{banana, cycle, wedge, Multigraph};
use jacpair::jacobian::{jacobian, monodromy_pairing};
use jacpair::number_theory::is_prime;
use jacpair::realize::{realize, verify_realization, RealizationSpec};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

fn spec(blocks: Vec<Block>) -> RealizationSpec {
    RealizationSpec::new(PairingDecomposition::new(blocks))
}

#[test]
fn odd_cyclic_round_trip_below_500() {
    for p in (3..500u64).filter(|&p| is_prime(p)) {
        for r in 1..=2 {
            for residue in [true, false] {
                let s = spec(vec![Block::Odd { p, r, residue }]);
                let got = realize(&s).unwrap_or_else(|e| panic!("{s}: {e}"));
                assert!(verify_realization(&got.graph, &s).is_match(), "{s}");
            }
        }
    }
}

#[test]
fn two_group_letters_round_trip() {
    for r in 1..=6 {
        for letter in Letter::ALL {
            if r < letter.min_exponent() {
                continue;
            }
            let s = spec(vec![Block::Two { r, letter }]);
            let got = realize(&s).unwrap_or_else(|e| panic!("{s}: {e}"));
            assert_eq!(got.constructions.len(), 1);
        }
    }
}

fn block_strategy() -> impl Strategy<Value = Block> {
    prop_oneof![
        (prop::sample::select(vec![3u64, 5, 7, 11, 13, 17, 73, 97]), 1u32..=2, any::<bool>())
            .prop_map(|(p, r, residue)| Block::Odd { p, r, residue }),
        (1u32..=6, 0usize..4).prop_map(|(r, l)| {
            let letter = Letter::ALL[l];
            Block::Two {
                r: r.max(letter.min_exponent()),
                letter,
            }
        }),
        Just(Block::F { r: 2 }),
    ]
}

fn order(d: &PairingDecomposition) -> BigInt {
    d.form().order()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn mixed_specs_round_trip(blocks in prop::collection::vec(block_strategy(), 1..=4)) {
        let d = PairingDecomposition::new(blocks);
        prop_assume!(order(&d) <= BigInt::from(1_000_000));
        let s = RealizationSpec::new(d);
        let got = realize(&s).map_err(|e| TestCaseError::fail(format!("{s}: {e}")))?;
        prop_assert!(verify_realization(&got.graph, &s).is_match());
    }
}

/// Moves a divisor on a wedge summand into the wedge, where `offset` is the
/// index of the summand's vertex 1 and its vertex 0 is glued to 0.
fn embed(d: &Divisor, n: usize, offset: usize) -> Divisor {
    let mut v = vec![BigInt::zero(); n];
    for (i, x) in d.values().iter().enumerate() {
        let at = if i == 0 { 0 } else { offset + i - 1 };
        v[at] += x;
    }
    Divisor::new(v)
}

#[test]
fn wedge_summands_are_orthogonal() {
    let pieces: Vec<Multigraph> = vec![banana(3).unwrap(), cycle(4).unwrap(), banana(6).unwrap()];
    let mut g = Multigraph::empty(1);
    let mut offsets = Vec::new();
    for p in &pieces {
        offsets.push(g.vertex_count());
        g = wedge(&g, p, 0, 0).unwrap();
    }
    let n = g.vertex_count();
    let gens: Vec<Vec<Divisor>> = pieces
        .iter()
        .zip(&offsets)
        .map(|(p, &off)| {
            jacobian(p, 0)
                .unwrap()
                .generators()
                .iter()
                .map(|d| embed(d, n, off))
                .collect()
        })
        .collect();
    for (i, gi) in gens.iter().enumerate() {
        for (j, gj) in gens.iter().enumerate() {
            for a in gi {
                for b in gj {
                    let x = monodromy_pairing(&g, a, b).unwrap();
                    if i != j {
                        assert!(x.is_zero(), "summands {i} and {j}");
                    } else {
                        let piece = &pieces[i];
                        let local = |d: &Divisor| {
                            let mut v = vec![d.values()[0].clone()];
                            v.extend_from_slice(&d.values()[offsets[i]..offsets[i] + piece.vertex_count() - 1]);
                            Divisor::new(v)
                        };
                        assert_eq!(x, monodromy_pairing(piece, &local(a), &local(b)).unwrap());
                    }
                }
            }
        }
    }
}

#[test]
fn realized_multi_block_graph_is_block_diagonal() {
    let s: RealizationSpec = "2^3:C + 3^1:nonres + 5^1:res".parse().unwrap();
    let got = realize(&s).unwrap();
    let jac = jacobian(&got.graph, 0).unwrap();
    assert_eq!(jac.order(), BigInt::from(120));
    assert!(verify_realization(&got.graph, &s).is_match());
}
