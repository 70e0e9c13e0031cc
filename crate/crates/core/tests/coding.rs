use mv2b::coding::{closed_form_markers, marker_positions, neighbourhood_for_level};
use mv2b::{CodeKind, Coding, SupportMap};
use proptest::prelude::*;

fn bits(p: u32, width: usize) -> Vec<bool> {
    (0..width)
        .map(|j| (p >> (width - 1 - j)) & 1 == 1)
        .collect()
}

/// Reference decoders written from the code definitions.
fn oracle(kind: CodeKind, max_level: u32, profile: &[bool]) -> Option<u32> {
    let ones = profile.iter().filter(|&&b| b).count() as u32;
    match kind {
        CodeKind::Summing => Some(ones),
        CodeKind::VanHam => {
            let prefix = profile.iter().take_while(|&&b| b).count() as u32;
            (prefix == ones).then_some(ones)
        }
        CodeKind::Gray => {
            let mut binary = 0u32;
            let mut acc = false;
            for &b in profile {
                acc ^= b;
                binary = (binary << 1) | acc as u32;
            }
            (binary <= max_level).then_some(binary)
        }
    }
}

#[test]
fn decode_tables_match_reference_decoders() {
    for kind in CodeKind::ALL {
        let c = Coding::new(kind);
        for l in 1..=7 {
            let w = c.support_size(l);
            for (p, got) in c.decode_table(l).into_iter().enumerate() {
                assert_eq!(
                    got,
                    oracle(kind, l, &bits(p as u32, w)),
                    "{kind} L={l} p={p:b}"
                );
            }
        }
    }
}

#[test]
fn gray_three_levels_table() {
    let t = Coding::gray().decode_table(3);
    assert_eq!(t, [Some(0), Some(1), Some(3), Some(2)]);
}

#[test]
fn base_codes_have_zero_property_and_are_neighbourhood_preserving() {
    for kind in [CodeKind::Summing, CodeKind::VanHam] {
        for l in 1..=6 {
            let c = Coding::new(kind);
            assert!(c.zero_property(l));
            assert!(neighbourhood_for_level(&c, l).preserving, "{kind} L={l}");
        }
    }
}

#[test]
fn gray_satisfies_forward_clause_only() {
    let r = neighbourhood_for_level(&Coding::gray(), 3);
    assert!(r.forward_clause && r.every_code_adjacent);
    assert!(!r.reverse_clause);
}

#[test]
fn swapping_two_gray_levels_breaks_neighbourhood() {
    let c = Coding::permuted(CodeKind::Gray, vec![0, 2, 1, 3]).unwrap();
    let r = neighbourhood_for_level(&c, 3);
    assert!(!r.preserving);
    assert!(r.counterexample.is_some());
}

#[test]
fn markers_match_closed_forms_for_unary_codes() {
    for kind in [CodeKind::Summing, CodeKind::VanHam] {
        for l in 1..=6u32 {
            let c = Coding::new(kind);
            let supports =
                SupportMap::with_sizes(&["y".to_string()], &[c.support_size(l)]).unwrap();
            let closed: Vec<usize> = closed_form_markers(kind, &supports).into_iter().collect();
            assert_eq!(marker_positions(&c, l), closed, "{kind} L={l}");
        }
    }
}

#[test]
fn markers_match_reference_monotonicity() {
    for kind in CodeKind::ALL {
        for l in 1..=6u32 {
            let w = Coding::new(kind).support_size(l);
            let expected: Vec<usize> = (0..w)
                .filter(|&k| {
                    (0u32..1 << w).all(|p| {
                        let q = p | 1 << (w - 1 - k);
                        match (oracle(kind, l, &bits(p, w)), oracle(kind, l, &bits(q, w))) {
                            (Some(a), Some(b)) => a <= b,
                            _ => true,
                        }
                    })
                })
                .collect();
            assert_eq!(
                marker_positions(&Coding::new(kind), l),
                expected,
                "{kind} L={l}"
            );
            assert!(expected.contains(&0));
        }
    }
}

proptest! {
    #[test]
    fn preimages_partition_the_domain(kind in prop::sample::select(CodeKind::ALL.to_vec()), l in 1u32..=7) {
        let c = Coding::new(kind);
        let w = c.support_size(l);
        let mut seen = vec![0usize; 1 << w];
        for level in 0..=l {
            let pre = c.preimage_bits(l, level);
            prop_assert!(!pre.is_empty());
            for p in pre {
                prop_assert_eq!(c.decode_bits(l, p), Some(level));
                seen[p as usize] += 1;
            }
        }
        for (p, n) in seen.iter().enumerate() {
            prop_assert_eq!(*n, usize::from(c.decode_bits(l, p as u32).is_some()));
        }
    }

    #[test]
    fn permutations_are_bijective_on_levels(l in 1u32..=5, seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut pi: Vec<u32> = (0..=l).collect();
        pi.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        for kind in CodeKind::ALL {
            let c = Coding::permuted(kind, pi.clone()).unwrap();
            let mut levels: Vec<u32> = (0..=l).map(|v| {
                let pre = c.preimage_bits(l, v);
                c.decode_bits(l, pre[0]).unwrap()
            }).collect();
            levels.sort_unstable();
            prop_assert_eq!(levels, (0..=l).collect::<Vec<_>>());
            prop_assert_eq!(c.zero_property(l), c.preimage_bits(l, 0).contains(&0));
        }
    }
}
