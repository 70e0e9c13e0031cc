use mv2b::dynamics::{bool_step, mv_step};
use mv2b::fixtures::{FIG1, FIG3, FIG3_RIGHT_BNET, FIG4_BNET};
use mv2b::model::{is_unitary_stepwise, local_step};
use mv2b::sample::{random_unitary_networks, SampleParams};
use mv2b::{
    build_sts, parse_bnet, parse_mvnet, AttractorKind, BState, Modality, Mode, MvState, DEFAULT_CAP,
};
use proptest::prelude::*;

fn attractor_sets(ts: &mv2b::TransitionSystem) -> Vec<(AttractorKind, Vec<String>)> {
    let mut out: Vec<(AttractorKind, Vec<String>)> = ts
        .attractors()
        .into_iter()
        .map(|a| {
            (
                a.kind,
                a.states.iter().map(|&s| ts.state_label(s)).collect(),
            )
        })
        .collect();
    out.sort_by(|a, b| a.1.cmp(&b.1));
    out
}

#[test]
fn running_example_stable_states() {
    let net = parse_mvnet(FIG1).unwrap();
    let ts = build_sts(&net, &Mode::asynchronous(2), None, DEFAULT_CAP).unwrap();
    let a = attractor_sets(&ts.reflexive_reduction());
    assert_eq!(
        a,
        [
            (AttractorKind::StableState, vec!["00".to_string()]),
            (AttractorKind::StableState, vec!["13".to_string()])
        ]
    );
}

#[test]
fn single_variable_stable_state() {
    let net = parse_mvnet(FIG3).unwrap();
    let ts = build_sts(&net, &Mode::asynchronous(1), None, DEFAULT_CAP).unwrap();
    let stable: Vec<_> = attractor_sets(&ts.reflexive_reduction());
    assert_eq!(
        stable,
        [
            (AttractorKind::StableState, vec!["2".to_string()]),
            (AttractorKind::StableState, vec!["3".to_string()])
        ]
    );
}

#[test]
fn synchronous_cycle_over_three_profiles() {
    let bn = parse_bnet(FIG3_RIGHT_BNET).unwrap();
    let ts = build_sts(&bn, &Mode::synchronous(3), None, DEFAULT_CAP).unwrap();
    let a = attractor_sets(&ts.reflexive_reduction());
    assert!(a.contains(&(AttractorKind::StableState, vec!["111".to_string()])));
    let cycle = a.iter().find(|(k, _)| *k == AttractorKind::Cyclic).unwrap();
    let mut states = cycle.1.clone();
    states.sort();
    assert_eq!(states, ["011", "101", "110"]);
}

#[test]
fn steps_follow_rules() {
    let net = parse_mvnet(FIG1).unwrap();
    let s = MvState(vec![1, 0]);
    assert_eq!(
        mv_step(&net, &s, &Modality::single(1)).unwrap(),
        MvState(vec![1, 1])
    );
    assert_eq!(
        mv_step(&net, &s, &Modality::single(0)).unwrap(),
        MvState(vec![0, 0])
    );
    assert!(mv_step(&net, &MvState(vec![1]), &Modality::single(0)).is_err());
    let bn = parse_bnet(FIG4_BNET).unwrap();
    let w = BState::from_bits("1000").unwrap();
    let all = Modality::new(0..4).unwrap();
    assert_eq!(
        bool_step(&bn, &w, &all).unwrap(),
        BState::from_bits("0111").unwrap()
    );
}

#[test]
fn rule_order_decides_overlapping_guards() {
    let a = parse_mvnet("var x : 0..2; rules x: 2 <- x >= 1; rules x: 1 <- x >= 0;").unwrap();
    let b = parse_mvnet("var x : 0..2; rules x: 1 <- x >= 0; rules x: 2 <- x >= 1;").unwrap();
    let s = MvState(vec![1]);
    assert_eq!(local_step(&a, 0, &s).unwrap(), 2);
    assert_eq!(local_step(&b, 0, &s).unwrap(), 1);
}

#[test]
fn jumps_are_reported() {
    let net = parse_mvnet("var x : 0..2; rules x: 2 <- x = 0;").unwrap();
    let r = is_unitary_stepwise(&net, DEFAULT_CAP).unwrap();
    assert!(!r.unitary);
    assert_eq!(r.violations.len(), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn local_steps_stay_in_range_and_move_by_one(seed in any::<u64>()) {
        let net = random_unitary_networks(seed, 1, &SampleParams::default()).unwrap().remove(0);
        let space = net.state_space(DEFAULT_CAP).unwrap();
        let max = net.max_levels();
        for idx in 0..space.len() {
            let s = MvState(space.state(idx));
            for i in 0..net.len() {
                let next = local_step(&net, i, &s).unwrap();
                prop_assert!(next <= max[i]);
                prop_assert!(next.abs_diff(s.0[i]) <= 1);
            }
        }
    }

    #[test]
    fn reflexive_reduction_drops_only_self_loops(seed in any::<u64>()) {
        let net = random_unitary_networks(seed, 1, &SampleParams::default()).unwrap().remove(0);
        let ts = build_sts(&net, &Mode::asynchronous(net.len()), None, DEFAULT_CAP).unwrap();
        let red = ts.reflexive_reduction();
        let moving = ts.transitions().filter(|&(s, _, t)| s != t).count();
        prop_assert_eq!(red.transition_count(), moving);
        prop_assert!(red.transitions().all(|(s, _, t)| s != t));
        let stable: Vec<usize> = red.attractors().into_iter()
            .filter(|a| a.kind == AttractorKind::StableState)
            .map(|a| a.states[0]).collect();
        for s in stable {
            prop_assert!(red.successors(s).is_empty());
        }
    }
}
