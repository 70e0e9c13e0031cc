//! Checks relating a Boolean network to a multi-valued network through a
//! coding: functional bisimulation, the local evolution property,
//! admissibility of modalities and modes, stability preservation and
//! absorption into the admissible region.
//!
//! Counterexamples are always the first violation in state-index order,
//! then modality order.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::coding::{hamming, Codec};
use crate::dynamics::{apply_modality, build_sts, TransitionSystem};
use crate::error::{Error, Result};
use crate::model::{BooleanNetwork, Level, Modality, Mode, MvNetwork, StateSpace};

/// A transition `src --label--> dst` rendered with state labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub src: String,
    pub label: String,
    pub dst: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BisimReport {
    pub verdict: bool,
    pub reduced: bool,
    /// Boolean transition inside the domain with no matching integer transition.
    pub forward_counterexample: Option<Step>,
    /// Integer transition and a code of its source with no matching Boolean
    /// transition; `dst` is the integer target.
    pub backward_counterexample: Option<BackwardCounterexample>,
    pub mode_map: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BackwardCounterexample {
    pub transition: Step,
    pub code: String,
}

/// Default modality map: a modality inside the support of `y` is sent to
/// the integer modality `{y}`.
pub fn support_quotient_map(codec: &Codec, bool_mode: &Mode, mv_mode: &Mode) -> Result<Vec<usize>> {
    let supports = codec.supports();
    bool_mode
        .modalities()
        .iter()
        .map(|m| {
            let owner = supports.owner(m.vars()[0]);
            if m.vars().iter().any(|&b| supports.owner(b) != owner) {
                return Err(Error::spec(format!(
                    "modality {{{}}} spans several supports: no modality map",
                    m.label(supports.bool_names())
                )));
            }
            mv_mode
                .modalities()
                .iter()
                .position(|n| n.vars() == [owner])
                .ok_or_else(|| {
                    Error::spec(format!(
                        "integer mode has no modality {{{}}}",
                        supports.mv_names()[owner]
                    ))
                })
        })
        .collect()
}

/// Checks both simulation clauses. The forward clause ranges over Boolean
/// transitions with both ends in the domain, the backward clause over every
/// integer transition and every code of its source. With `reduce`, both
/// systems are reflexively reduced first.
pub fn check_bisimulation(
    b_ts: &TransitionSystem,
    n_ts: &TransitionSystem,
    codec: &Codec,
    mu: &[usize],
    reduce: bool,
) -> Result<BisimReport> {
    if mu.len() != b_ts.modalities().len() {
        return Err(Error::spec("modality map is not total on the Boolean mode"));
    }
    if let Some(&bad) = mu.iter().find(|&&n| n >= n_ts.modalities().len()) {
        return Err(Error::spec(format!(
            "modality map targets unknown integer modality #{bad}"
        )));
    }
    let (b_ts, n_ts) = if reduce {
        (b_ts.reflexive_reduction(), n_ts.reflexive_reduction())
    } else {
        (b_ts.clone(), n_ts.clone())
    };
    let bspace = b_ts.space();
    let nspace = n_ts.space();
    let decode = |w: usize| codec.decode(&bspace.state(w)).map(|s| nspace.index_of(&s));
    let images: Vec<Option<usize>> = (0..b_ts.len()).map(decode).collect();

    let mut forward = None;
    'fwd: for w in 0..b_ts.len() {
        let Some(s) = images[w] else { continue };
        for (m, &n) in mu.iter().enumerate() {
            if !b_ts.has_transition(w, m) {
                continue;
            }
            let w2 = b_ts.successor(w, m);
            let Some(s2) = images[w2] else { continue };
            let ok = n_ts.has_transition(s, n) && n_ts.successor(s, n) == s2;
            if !ok {
                forward = Some(Step {
                    src: b_ts.state_label(w),
                    label: b_ts.labels()[m].clone(),
                    dst: b_ts.state_label(w2),
                });
                break 'fwd;
            }
        }
    }

    let mut backward = None;
    'bwd: for w in 0..b_ts.len() {
        let Some(s) = images[w] else { continue };
        for n in 0..n_ts.modalities().len() {
            if !n_ts.has_transition(s, n) {
                continue;
            }
            let s2 = n_ts.successor(s, n);
            let matched = mu.iter().enumerate().any(|(m, &mm)| {
                mm == n && b_ts.has_transition(w, m) && images[b_ts.successor(w, m)] == Some(s2)
            });
            if !matched {
                backward = Some(BackwardCounterexample {
                    transition: Step {
                        src: n_ts.state_label(s),
                        label: n_ts.labels()[n].clone(),
                        dst: n_ts.state_label(s2),
                    },
                    code: b_ts.state_label(w),
                });
                break 'bwd;
            }
        }
    }

    // Integer states without codes cannot be simulated at all.
    if backward.is_none() {
        let mut covered = vec![false; n_ts.len()];
        images.iter().flatten().for_each(|&s| covered[s] = true);
        if let Some(s) = covered.iter().position(|c| !c) {
            backward = Some(BackwardCounterexample {
                transition: Step {
                    src: n_ts.state_label(s),
                    label: String::new(),
                    dst: n_ts.state_label(s),
                },
                code: String::new(),
            });
        }
    }

    let mode_map = mu
        .iter()
        .enumerate()
        .map(|(m, &n)| (b_ts.labels()[m].clone(), n_ts.labels()[n].clone()))
        .collect();
    Ok(BisimReport {
        verdict: forward.is_none() && backward.is_none(),
        reduced: reduce,
        forward_counterexample: forward,
        backward_counterexample: backward,
        mode_map,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalEvolutionReport {
    pub variable: String,
    pub holds: bool,
    pub skip_self_loops: bool,
    pub counterexample: Option<LocalEvolutionCounterexample>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalEvolutionCounterexample {
    pub state: String,
    pub modality: String,
    pub decoded: Option<Level>,
    pub expected: Level,
}

/// Checks that updating any modality of `mode` inside the support of `var`
/// from an in-domain state decodes to the integer update of `var`. With
/// `skip_self_loops`, updates that leave the state unchanged are ignored.
pub fn check_local_evolution(
    bn: &BooleanNetwork,
    net: &MvNetwork,
    codec: &Codec,
    var: usize,
    mode: &Mode,
    skip_self_loops: bool,
    cap: usize,
) -> Result<LocalEvolutionReport> {
    let support = codec.supports().support(var).to_vec();
    let local: Vec<&Modality> = mode
        .modalities()
        .iter()
        .filter(|m| m.is_subset_of(&support))
        .collect();
    let space = bn.state_space(cap)?;
    let mut state = vec![0; bn.len()];
    let mut counterexample = None;
    'outer: for w in 0..space.len() {
        space.decode_into(w, &mut state);
        let Some(s) = codec.decode(&state) else {
            continue;
        };
        let expected = net.step_level(var, &s);
        for m in &local {
            let next = apply_modality(bn, &state, m);
            if skip_self_loops && next == state {
                continue;
            }
            let decoded = codec.decode_var(var, &next);
            if decoded != Some(expected) {
                counterexample = Some(LocalEvolutionCounterexample {
                    state: space.label(w),
                    modality: m.label(bn.names()),
                    decoded,
                    expected,
                });
                break 'outer;
            }
        }
    }
    Ok(LocalEvolutionReport {
        variable: codec.supports().mv_names()[var].clone(),
        holds: counterexample.is_none(),
        skip_self_loops,
        counterexample,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    /// Verdict over the admissible region.
    pub on_domain: bool,
    /// Same equality over states outside the admissible region, with
    /// undefined decodings compared as equal values.
    pub off_domain: bool,
    pub counterexample: Option<String>,
}

/// Whether `m` and `m0` lead every in-domain state to states with the same
/// decoding.
pub fn check_modality_admissible(
    bn: &BooleanNetwork,
    codec: &Codec,
    m: &Modality,
    m0: &Modality,
    cap: usize,
) -> Result<AdmissibilityReport> {
    let space = bn.state_space(cap)?;
    let mut state = vec![0; bn.len()];
    let mut on = true;
    let mut off = true;
    let mut counterexample = None;
    for w in 0..space.len() {
        space.decode_into(w, &mut state);
        let a = codec.decode(&apply_modality(bn, &state, m0));
        let b = codec.decode(&apply_modality(bn, &state, m));
        if a != b {
            if codec.in_domain(&state) {
                on = false;
                if counterexample.is_none() {
                    counterexample = Some(space.label(w));
                }
            } else {
                off = false;
            }
        }
    }
    Ok(AdmissibilityReport {
        on_domain: on,
        off_domain: off,
        counterexample,
    })
}

/// Precomputed modality admissibility over the admissible region.
pub struct AdmissibilityOracle<'a> {
    bn: &'a BooleanNetwork,
    codec: &'a Codec,
    domain: Vec<Vec<Level>>,
}

impl<'a> AdmissibilityOracle<'a> {
    pub fn new(bn: &'a BooleanNetwork, codec: &'a Codec, cap: usize) -> Result<Self> {
        let space = bn.state_space(cap)?;
        let domain = (0..space.len())
            .map(|w| space.state(w))
            .filter(|s| codec.in_domain(s))
            .collect();
        Ok(AdmissibilityOracle { bn, codec, domain })
    }

    /// Decoded successor of every in-domain state under `m`.
    fn images(&self, m: &Modality) -> Vec<Option<Vec<Level>>> {
        self.domain
            .iter()
            .map(|s| self.codec.decode(&apply_modality(self.bn, s, m)))
            .collect()
    }

    pub fn modality(&self, m: &Modality, m0: &Modality) -> bool {
        self.images(m) == self.images(m0)
    }

    /// Both clauses: every modality of each mode has an admissible partner
    /// in the other.
    pub fn mode(&self, mode: &Mode, mode0: &Mode) -> bool {
        let a: Vec<_> = mode.modalities().iter().map(|m| self.images(m)).collect();
        let b: Vec<_> = mode0.modalities().iter().map(|m| self.images(m)).collect();
        let clause1 = b.iter().all(|y| a.iter().any(|x| x == y));
        let clause2 = a.iter().all(|x| b.iter().any(|y| x == y));
        clause1 && clause2
    }
}

pub fn check_mode_admissible(
    bn: &BooleanNetwork,
    codec: &Codec,
    mode: &Mode,
    mode0: &Mode,
    cap: usize,
) -> Result<bool> {
    Ok(AdmissibilityOracle::new(bn, codec, cap)?.mode(mode, mode0))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    /// No transition from an in-domain state changes the state while
    /// keeping its decoding.
    pub stability_holds: bool,
    pub stability_violation: Option<Step>,
    /// Distinct codes of a level are farther apart than the largest modality.
    pub distance_condition: bool,
    pub min_code_distance: Option<u32>,
    pub max_modality: usize,
    /// Informational: every attractor whose image is a single integer state
    /// is a stable state.
    pub stable_images_are_stable: bool,
}

pub fn check_stability_preservation(
    bn: &BooleanNetwork,
    codec: &Codec,
    mode: &Mode,
    cap: usize,
) -> Result<StabilityReport> {
    let ts = build_sts(bn, mode, None, cap)?;
    let space = ts.space();
    let mut violation = None;
    'outer: for w in 0..ts.len() {
        let state = space.state(w);
        let Some(s) = codec.decode(&state) else {
            continue;
        };
        for m in 0..ts.modalities().len() {
            let w2 = ts.successor(w, m);
            if w2 != w && codec.decode(&space.state(w2)).as_ref() == Some(&s) {
                violation = Some(Step {
                    src: ts.state_label(w),
                    label: ts.labels()[m].clone(),
                    dst: ts.state_label(w2),
                });
                break 'outer;
            }
        }
    }

    let mut min_distance: Option<u32> = None;
    for i in 0..codec.supports().num_mv() {
        for codes in &codec.var(i).preimages {
            for (a_i, &a) in codes.iter().enumerate() {
                for &b in &codes[a_i + 1..] {
                    let d = hamming(a, b);
                    min_distance = Some(min_distance.map_or(d, |m| m.min(d)));
                }
            }
        }
    }
    let max_modality = mode.max_modality_size();
    let distance_condition = min_distance.is_none_or(|d| d as usize > max_modality);

    let stable_images_are_stable = ts.attractors().iter().all(|a| {
        let images: BTreeSet<Option<Vec<Level>>> = a
            .states
            .iter()
            .map(|&w| codec.decode(&space.state(w)))
            .collect();
        !(images.len() == 1 && images.iter().next().unwrap().is_some() && a.states.len() > 1)
    });

    Ok(StabilityReport {
        stability_holds: violation.is_none(),
        stability_violation: violation,
        distance_condition,
        min_code_distance: min_distance,
        max_modality,
        stable_images_are_stable,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbsorptionReport {
    pub holds: bool,
    pub off_domain_states: usize,
    pub stranded: Option<String>,
}

/// Every state outside the admissible region reaches it.
pub fn check_absorption(
    bn: &BooleanNetwork,
    codec: &Codec,
    mode: &Mode,
    cap: usize,
) -> Result<AbsorptionReport> {
    let ts = build_sts(bn, mode, Some(&|s: &[Level]| codec.in_domain(s)), cap)?;
    let reach = ts.can_reach(|s| ts.in_domain(s));
    let stranded = (0..ts.len()).find(|&s| !reach[s]);
    Ok(AbsorptionReport {
        holds: stranded.is_none(),
        off_domain_states: (0..ts.len()).filter(|&s| !ts.in_domain(s)).count(),
        stranded: stranded.map(|s| ts.state_label(s)),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NullityReport {
    pub holds: bool,
    pub counterexample: Option<(String, String)>,
}

/// Each formula is 0 wherever its own support, or the support of a variable
/// it references, holds a profile outside the domain.
pub fn check_off_domain_nullity(
    bn: &BooleanNetwork,
    codec: &Codec,
    cap: usize,
) -> Result<NullityReport> {
    let supports = codec.supports();
    let space = bn.state_space(cap)?;
    let relevant: Vec<BTreeSet<usize>> = (0..bn.len())
        .map(|b| {
            let mut s: BTreeSet<usize> = bn
                .formula(b)
                .vars()
                .into_iter()
                .map(|v| supports.owner(v))
                .collect();
            s.insert(supports.owner(b));
            s
        })
        .collect();
    let mut state = vec![0; bn.len()];
    for w in 0..space.len() {
        space.decode_into(w, &mut state);
        let off: Vec<bool> = (0..supports.num_mv())
            .map(|i| codec.decode_var(i, &state).is_none())
            .collect();
        if !off.iter().any(|&o| o) {
            continue;
        }
        for b in 0..bn.len() {
            if relevant[b].iter().any(|&i| off[i]) && bn.formula(b).eval_with(&|v| state[v] != 0) {
                return Ok(NullityReport {
                    holds: false,
                    counterexample: Some((bn.names()[b].clone(), space.label(w))),
                });
            }
        }
    }
    Ok(NullityReport {
        holds: true,
        counterexample: None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AttractorComparison {
    pub coincide: bool,
    /// Integer attractors as lists of state labels.
    pub integer: Vec<Vec<String>>,
    /// Decoded images of the Boolean attractors; `None` marks attractors
    /// touching states outside the domain.
    pub boolean_images: Vec<Option<Vec<String>>>,
}

/// Compares the decoded Boolean attractors with the integer attractors.
pub fn compare_attractors(
    b_ts: &TransitionSystem,
    n_ts: &TransitionSystem,
    codec: &Codec,
) -> AttractorComparison {
    let nspace: &StateSpace = n_ts.space();
    let integer: BTreeSet<Vec<usize>> = n_ts.attractors().into_iter().map(|a| a.states).collect();
    let mut images = Vec::new();
    let mut image_sets = BTreeSet::new();
    let mut coincide = true;
    for a in b_ts.attractors() {
        let decoded: Option<BTreeSet<usize>> = a
            .states
            .iter()
            .map(|&w| {
                codec
                    .decode(&b_ts.space().state(w))
                    .map(|s| nspace.index_of(&s))
            })
            .collect();
        match decoded {
            Some(set) => {
                let v: Vec<usize> = set.into_iter().collect();
                coincide &= integer.contains(&v);
                images.push(Some(v.iter().map(|&s| nspace.label(s)).collect()));
                image_sets.insert(v);
            }
            None => {
                coincide = false;
                images.push(None);
            }
        }
    }
    coincide &= image_sets == integer;
    AttractorComparison {
        coincide,
        integer: integer
            .iter()
            .map(|a| a.iter().map(|&s| nspace.label(s)).collect())
            .collect(),
        boolean_images: images,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub verdict: bool,
    pub bisimulation: BisimReport,
    pub local_evolution: Vec<LocalEvolutionReport>,
    pub stability: StabilityReport,
    pub absorption: AbsorptionReport,
    pub off_domain_nullity: NullityReport,
    pub attractors: AttractorComparison,
}

/// Full suite against the asynchronous integer dynamics: reduced
/// bisimulation, the local evolution property on non-self-loop updates,
/// absorption, off-domain nullity and attractor correspondence. The
/// stability analysis is reported but does not enter the verdict.
pub fn verify_conversion(
    net: &MvNetwork,
    bn: &BooleanNetwork,
    codec: &Codec,
    cap: usize,
) -> Result<VerificationReport> {
    let mv_mode = Mode::asynchronous(net.len());
    let n_ts = build_sts(net, &mv_mode, None, cap)?;
    let b_ts = build_sts(bn, bn.mode(), Some(&|s: &[Level]| codec.in_domain(s)), cap)?;
    let mu = support_quotient_map(codec, bn.mode(), &mv_mode)?;
    let bisimulation = check_bisimulation(&b_ts, &n_ts, codec, &mu, true)?;
    let local_evolution = (0..net.len())
        .map(|i| check_local_evolution(bn, net, codec, i, bn.mode(), true, cap))
        .collect::<Result<Vec<_>>>()?;
    let stability = check_stability_preservation(bn, codec, bn.mode(), cap)?;
    let absorption = check_absorption(bn, codec, bn.mode(), cap)?;
    let off_domain_nullity = check_off_domain_nullity(bn, codec, cap)?;
    let attractors = compare_attractors(&b_ts, &n_ts, codec);
    let verdict = bisimulation.verdict
        && local_evolution.iter().all(|p| p.holds)
        && absorption.holds
        && off_domain_nullity.holds
        && attractors.coincide;
    Ok(VerificationReport {
        verdict,
        bisimulation,
        local_evolution,
        stability,
        absorption,
        off_domain_nullity,
        attractors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::Coding;
    use crate::conversion::{convert, ModeChoice};
    use crate::fixtures;
    use crate::io::{parse_bnet, parse_mvnet};
    use crate::model::DEFAULT_CAP;

    #[test]
    fn reflexive_admissibility() {
        let net = parse_mvnet(fixtures::FIG1).unwrap();
        let conv = convert(
            &net,
            &Coding::summing(),
            &ModeChoice::Asynchronous,
            &Default::default(),
        )
        .unwrap();
        for m in conv.network.mode().modalities() {
            let r =
                check_modality_admissible(&conv.network, &conv.codec, m, m, DEFAULT_CAP).unwrap();
            assert!(r.on_domain && r.off_domain);
        }
        let mode = conv.network.mode().clone();
        assert!(
            check_mode_admissible(&conv.network, &conv.codec, &mode, &mode, DEFAULT_CAP).unwrap()
        );
    }

    #[test]
    fn constant_network_modalities_are_admissible() {
        let bn = parse_bnet("a_1, 1\nb_1, 0\n").unwrap();
        let codec =
            Codec::with_supports(&Coding::summing(), bn.supports().clone(), &[1, 1]).unwrap();
        let r = check_modality_admissible(
            &bn,
            &codec,
            &Modality::single(0),
            &Modality::single(0),
            DEFAULT_CAP,
        )
        .unwrap();
        assert!(r.on_domain);
    }

    #[test]
    fn gray_has_no_off_domain_states() {
        let net = parse_mvnet(fixtures::FIG1).unwrap();
        let conv = convert(
            &net,
            &Coding::gray(),
            &ModeChoice::Asynchronous,
            &Default::default(),
        )
        .unwrap();
        let r =
            check_absorption(&conv.network, &conv.codec, conv.network.mode(), DEFAULT_CAP).unwrap();
        assert!(r.holds);
        assert_eq!(r.off_domain_states, 0);
    }

    #[test]
    fn frozen_off_domain_state_is_stranded() {
        // Identity formulas freeze every state, including 01 (outside the
        // Van Ham domain for L = 2).
        let bn = parse_bnet("y_1, y_1\ny_2, y_2\n").unwrap();
        let codec = Codec::with_supports(&Coding::van_ham(), bn.supports().clone(), &[2]).unwrap();
        let r = check_absorption(&bn, &codec, bn.mode(), DEFAULT_CAP).unwrap();
        assert!(!r.holds);
        assert_eq!(r.stranded.as_deref(), Some("01"));
    }

    #[test]
    fn identity_network_satisfies_local_evolution() {
        let net = parse_mvnet("var a : 0..1; rules a: 1 <- a = 1;").unwrap();
        let bn = parse_bnet("a_1, a_1\n").unwrap();
        let codec = Codec::for_network(&Coding::summing(), &net).unwrap();
        let r = check_local_evolution(&bn, &net, &codec, 0, bn.mode(), false, DEFAULT_CAP).unwrap();
        assert!(r.holds);
    }
}
