//! Conversion of a multi-valued network into a Boolean network.
//!
//! For every support variable `y_k` of an integer variable `y`, the formula
//! is the disjunction over target levels `l` of the Boolean guard of `l`
//! (the codes of the regulator states whose effective level is `l`) and the
//! admissibility condition of `l` for bit `k` (the codes of `y` from which a
//! transition towards a code of `l` leaves bit `k` at 1). Level 0 has no
//! disjunct: the all-zero formula value encodes it.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::coding::{is_neighbourhood_preserving, CodeKind, Codec, Coding, VarCode};
use crate::error::{Error, Hypothesis, Result};
use crate::formula::{BoolExpr, Dnf};
use crate::minimize::{minimize_on_set, Minimized};
use crate::model::{
    is_unitary_stepwise, BooleanNetwork, Level, Modality, Mode, MvNetwork, StateSpace, VarId,
};

/// Variables occurring in the guards of `var`.
pub fn regulators(net: &MvNetwork, var: VarId) -> BTreeSet<VarId> {
    let mut out = BTreeSet::new();
    for rule in net.rules(var) {
        rule.guard.collect_vars(&mut out);
    }
    out
}

/// Effective (first-match) level of `var` for every state of its regulators,
/// enumerated in mixed-radix order over `regs`.
fn effective_levels(net: &MvNetwork, var: VarId, regs: &[VarId]) -> Vec<Level> {
    let radices: Vec<u32> = regs
        .iter()
        .map(|&r| net.variables()[r].max_level + 1)
        .collect();
    let space = StateSpace::new(radices, usize::MAX).expect("regulator space fits in memory");
    let mut state = vec![0; net.len()];
    let mut local = vec![0; regs.len()];
    (0..space.len())
        .map(|idx| {
            space.decode_into(idx, &mut local);
            for (&r, &v) in regs.iter().zip(&local) {
                state[r] = v;
            }
            net.step_level(var, &state)
        })
        .collect()
}

/// Boolean guard of level `level` for `var`: a disjunction, over regulator
/// states whose effective level is `level`, of the conjunction over
/// regulators of the disjunction of the minterms of their codes.
pub fn boolean_guard(net: &MvNetwork, codec: &Codec, var: VarId, level: Level) -> Result<BoolExpr> {
    let max = net.variables()[var].max_level;
    if level == 0 || level > max {
        return Err(Error::spec(format!(
            "target level {level} out of range 1..{max}"
        )));
    }
    let regs: Vec<VarId> = regulators(net, var).into_iter().collect();
    let levels = effective_levels(net, var, &regs);
    let radices: Vec<u32> = regs
        .iter()
        .map(|&r| net.variables()[r].max_level + 1)
        .collect();
    let space = StateSpace::new(radices, usize::MAX)?;
    let supports = codec.supports();
    let mut disjuncts = Vec::new();
    for (idx, &l) in levels.iter().enumerate() {
        if l != level {
            continue;
        }
        let local = space.state(idx);
        let conj = regs
            .iter()
            .zip(&local)
            .map(|(&r, &v)| {
                let bits = supports.support(r);
                BoolExpr::or(
                    codec.var(r).preimages[v as usize]
                        .iter()
                        .map(|&p| BoolExpr::minterm(bits, &crate::coding::unpack(p, bits.len())))
                        .collect(),
                )
            })
            .collect();
        disjuncts.push(BoolExpr::and(conj));
    }
    Ok(BoolExpr::or(disjuncts))
}

/// Profile sets of one support for a target level and a support position.
/// Profiles are integers with position 0 as the most significant bit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PsiSets {
    pub target: Level,
    pub position: usize,
    pub zero_to_one: BTreeSet<u32>,
    pub one_to_zero: BTreeSet<u32>,
    pub one_to_one: BTreeSet<u32>,
    pub star_to_one: BTreeSet<u32>,
}

fn psi_from_table(vc: &VarCode, target: Level, position: usize) -> PsiSets {
    let w = vc.width;
    let bit = 1u32 << (w - 1 - position);
    let lo = target.saturating_sub(1);
    let hi = (target + 1).min(vc.max_level);
    let near = |p: u32| vc.decode(p).is_some_and(|l| (lo..=hi).contains(&l));
    let target_has_one = vc.preimages[target as usize].iter().any(|&c| c & bit != 0);
    let mut sets = PsiSets {
        target,
        position,
        zero_to_one: BTreeSet::new(),
        one_to_zero: BTreeSet::new(),
        one_to_one: BTreeSet::new(),
        star_to_one: BTreeSet::new(),
    };
    for p in 0u32..1 << w {
        if !near(p) {
            continue;
        }
        if p & bit == 0 {
            if vc.decode(p | bit) == Some(target) {
                sets.zero_to_one.insert(p);
            }
        } else {
            if vc.decode(p & !bit) == Some(target) {
                sets.one_to_zero.insert(p);
            }
            if target_has_one {
                sets.one_to_one.insert(p);
            }
        }
    }
    sets.star_to_one = sets
        .zero_to_one
        .iter()
        .chain(sets.one_to_one.difference(&sets.one_to_zero))
        .copied()
        .collect();
    sets
}

/// Profile sets for a coding of levels `0..=max_level`.
pub fn psi_sets(
    coding: &Coding,
    max_level: Level,
    target: Level,
    position: usize,
) -> Result<PsiSets> {
    if target == 0 || target > max_level {
        return Err(Error::spec(format!(
            "target level {target} out of range 1..{max_level}"
        )));
    }
    let width = coding.support_size(max_level);
    if position >= width {
        return Err(Error::spec(format!(
            "support position {position} out of range 0..{width}"
        )));
    }
    let codec = Codec::new(coding, &["y".to_string()], &[max_level])?;
    Ok(psi_from_table(codec.var(0), target, position))
}

/// Disjunction of the minterms of the admissible codes over the support bits.
pub fn admissibility_formula(entry: &PsiSets, support: &[VarId]) -> BoolExpr {
    BoolExpr::or(
        entry
            .star_to_one
            .iter()
            .map(|&p| BoolExpr::minterm(support, &crate::coding::unpack(p, support.len())))
            .collect(),
    )
}

/// Result of inferring the formula of one support variable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InferredFormula {
    pub bit: VarId,
    pub formula: Dnf,
    pub exact: bool,
    /// Number of Boolean variables the truth table ranged over.
    pub inputs: usize,
}

/// Formula of the support variable at `position` of `var`, minimized
/// exactly. Points where a relevant support lies outside the domain are
/// part of the off-set.
pub fn infer_formula(
    net: &MvNetwork,
    codec: &Codec,
    var: VarId,
    position: usize,
) -> Result<InferredFormula> {
    let supports = codec.supports();
    let own = supports.support(var);
    if position >= own.len() {
        return Err(Error::spec(format!(
            "support position {position} out of range"
        )));
    }
    let regs: Vec<VarId> = regulators(net, var).into_iter().collect();
    let levels = effective_levels(net, var, &regs);
    let reg_radices: Vec<usize> = regs
        .iter()
        .map(|&r| net.variables()[r].max_level as usize + 1)
        .collect();

    // Inputs: regulator supports, then the own support if not a regulator.
    let mut groups: Vec<VarId> = regs.clone();
    if !groups.contains(&var) {
        groups.push(var);
    }
    groups.sort_unstable();
    let mut inputs: Vec<VarId> = Vec::new();
    let mut offsets = Vec::new();
    for &g in &groups {
        offsets.push(inputs.len());
        inputs.extend_from_slice(supports.support(g));
    }
    let n = inputs.len();
    let own_vc = codec.var(var);
    let admissible: Vec<BTreeSet<u32>> = (0..=own_vc.max_level)
        .map(|l| {
            if l == 0 {
                BTreeSet::new()
            } else {
                psi_from_table(own_vc, l, position).star_to_one
            }
        })
        .collect();

    let eval = |m: u64| -> bool {
        let mut decoded = Vec::with_capacity(groups.len());
        for (gi, &g) in groups.iter().enumerate() {
            let w = supports.support(g).len();
            let shift = n - offsets[gi] - w;
            let profile = ((m >> shift) & ((1u64 << w) - 1)) as u32;
            match codec.var(g).decode(profile) {
                Some(l) => decoded.push((g, profile, l)),
                None => return false,
            }
        }
        let idx = regs
            .iter()
            .zip(&reg_radices)
            .fold(0usize, |acc, (r, &rad)| {
                let l = decoded.iter().find(|(g, _, _)| g == r).unwrap().2;
                acc * rad + l as usize
            });
        let level = levels[idx];
        if level == 0 {
            return false;
        }
        let own_profile = decoded.iter().find(|(g, _, _)| *g == var).unwrap().1;
        admissible[level as usize].contains(&own_profile)
    };

    let bit = own[position];
    if n > 24 {
        return Err(Error::spec(format!(
            "formula of `{}` ranges over {n} Boolean inputs",
            supports.bool_names()[bit]
        )));
    }
    let ones: Vec<u32> = (0u64..1 << n)
        .filter(|&m| eval(m))
        .map(|m| m as u32)
        .collect();
    let Minimized { dnf, exact } = minimize_on_set(&inputs, &ones);
    Ok(InferredFormula {
        bit,
        formula: dnf,
        exact,
        inputs: n,
    })
}

/// Requested update mode of the converted network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModeChoice {
    Asynchronous,
    /// One modality per support.
    ParallelSupport,
    /// Explicit modalities over Boolean variable names.
    Custom(Vec<Vec<String>>),
}

impl ModeChoice {
    pub fn name(&self) -> &'static str {
        match self {
            ModeChoice::Asynchronous => "asynchronous",
            ModeChoice::ParallelSupport => "parallel-support",
            ModeChoice::Custom(_) => "custom",
        }
    }
}

impl fmt::Display for ModeChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModeChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "async" | "asynchronous" => Ok(ModeChoice::Asynchronous),
            "parallel-support" | "parallel" => Ok(ModeChoice::ParallelSupport),
            other => Err(Error::spec(format!(
                "unknown mode `{other}` (expected asynchronous or parallel-support)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisCheck {
    pub hypothesis: Hypothesis,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormulaStats {
    pub variable: String,
    pub formula: String,
    pub terms: usize,
    pub literals: usize,
    pub inputs: usize,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timings {
    pub hypotheses_ms: f64,
    pub inference_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConversionReport {
    pub network: String,
    pub coding: String,
    pub effective_coding: String,
    pub mode: String,
    pub modalities: Vec<String>,
    pub hypotheses: Vec<HypothesisCheck>,
    pub formulas: Vec<FormulaStats>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

#[derive(Clone, Debug)]
pub struct Conversion {
    pub network: BooleanNetwork,
    pub codec: Codec,
    pub report: ConversionReport,
}

#[derive(Clone, Debug, Default)]
pub struct ConvertOptions {
    /// Record wall-clock timings in the report.
    pub timings: bool,
    pub cap: Option<usize>,
}

/// Checks the conversion hypotheses. Returns the individual results; the
/// first failing one is turned into a refusal by [`convert`].
pub fn check_hypotheses(
    net: &MvNetwork,
    coding: &Coding,
    cap: usize,
) -> Result<Vec<HypothesisCheck>> {
    let unitary = is_unitary_stepwise(net, cap)?;
    let detail = if unitary.unitary {
        "every update changes a level by at most 1".to_string()
    } else {
        unitary
            .violations
            .iter()
            .map(|v| {
                format!(
                    "{} steps to {} from ({})",
                    v.variable,
                    v.next_level,
                    v.state
                        .0
                        .iter()
                        .map(|l| l.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                )
            })
            .collect::<Vec<_>>()
            .join("; ")
    };
    let mut out = vec![HypothesisCheck {
        hypothesis: Hypothesis::UnitaryStepwise,
        holds: unitary.unitary,
        detail,
    }];

    let zero_bad: Vec<&str> = net
        .variables()
        .iter()
        .filter(|v| !coding.zero_property(v.max_level))
        .map(|v| v.name.as_str())
        .collect();
    out.push(HypothesisCheck {
        hypothesis: Hypothesis::ZeroCodedByZeroProfile,
        holds: zero_bad.is_empty(),
        detail: if zero_bad.is_empty() {
            "decode(0...0) = 0 for every support".into()
        } else {
            format!("violated for {}", zero_bad.join(", "))
        },
    });

    let nb = is_neighbourhood_preserving(coding, net);
    out.push(HypothesisCheck {
        hypothesis: Hypothesis::NeighbourhoodPreserving,
        holds: nb.preserving,
        detail: match (&nb.counterexample, nb.preserving) {
            (Some(c), false) => format!(
                "{}: levels {} and {} have codes {} and {} at distance {}",
                c.variable, c.levels.0, c.levels.1, c.profiles.0, c.profiles.1, c.distance
            ),
            _ => "adjacent levels have adjacent codes".into(),
        },
    });
    Ok(out)
}

/// Converts `net` under `coding`. The result is bisimilar to the network on
/// reflexive reductions when the hypotheses hold; otherwise the conversion
/// is refused with the failing hypothesis.
pub fn convert(
    net: &MvNetwork,
    coding: &Coding,
    mode: &ModeChoice,
    opts: &ConvertOptions,
) -> Result<Conversion> {
    let cap = opts.cap.unwrap_or(crate::model::DEFAULT_CAP);
    let t0 = Instant::now();
    let hypotheses = check_hypotheses(net, coding, cap)?;
    if let Some(h) = hypotheses.iter().find(|h| !h.holds) {
        return Err(Error::Refused {
            hypothesis: h.hypothesis,
            detail: h.detail.clone(),
        });
    }
    let hyp_ms = t0.elapsed().as_secs_f64() * 1e3;

    let mut notes = Vec::new();
    let effective = match (mode, coding.kind) {
        (ModeChoice::ParallelSupport, CodeKind::Summing) => {
            notes.push(
                "joint updates of a whole support reach a single code per level: \
                 the Summing code is reduced to the Van Ham code"
                    .to_string(),
            );
            Coding {
                kind: CodeKind::VanHam,
                permutation: coding.permutation.clone(),
            }
        }
        _ => coding.clone(),
    };
    if matches!(mode, ModeChoice::Custom(_)) {
        notes.push("custom modes are experimental: rely on the bisimulation check".to_string());
    }

    let codec = Codec::for_network(&effective, net)?;
    let t1 = Instant::now();
    let jobs: Vec<(VarId, usize)> = (0..net.len())
        .flat_map(|i| (0..codec.supports().support(i).len()).map(move |k| (i, k)))
        .collect();
    let inferred: Vec<InferredFormula> = jobs
        .par_iter()
        .map(|&(i, k)| infer_formula(net, &codec, i, k))
        .collect::<Result<_>>()?;
    let inf_ms = t1.elapsed().as_secs_f64() * 1e3;

    let supports = codec.supports().clone();
    let mut formulas = vec![Dnf::falsum(); supports.num_bool()];
    for f in &inferred {
        formulas[f.bit] = f.formula.clone();
    }
    let bool_mode = match mode {
        ModeChoice::Asynchronous => Mode::asynchronous(supports.num_bool()),
        ModeChoice::ParallelSupport => Mode::parallel_support(&supports),
        ModeChoice::Custom(groups) => {
            let modalities = groups
                .iter()
                .map(|g| {
                    Modality::new(
                        g.iter()
                            .map(|name| {
                                supports
                                    .bool_names()
                                    .iter()
                                    .position(|n| n == name)
                                    .ok_or_else(|| {
                                        Error::spec(format!("unknown Boolean variable `{name}`"))
                                    })
                            })
                            .collect::<Result<Vec<_>>>()?,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let m = Mode::new(supports.num_bool(), modalities)?;
            if !m.is_local_to(&supports) {
                return Err(Error::spec("custom mode is not local to the supports"));
            }
            m
        }
    };
    if inferred.iter().any(|f| !f.exact) {
        notes.push(
            "some formulas exceed the exact minimization bound and are not minimal".to_string(),
        );
    }
    let names = supports.bool_names().to_vec();
    let stats = inferred
        .iter()
        .map(|f| FormulaStats {
            variable: names[f.bit].clone(),
            formula: f.formula.render(&names),
            terms: f.formula.term_count(),
            literals: f.formula.literal_count(),
            inputs: f.inputs,
            exact: f.exact,
        })
        .collect();
    let report = ConversionReport {
        network: net.name().to_string(),
        coding: coding.label(),
        effective_coding: effective.label(),
        mode: mode.name().to_string(),
        modalities: bool_mode.labels(&names),
        hypotheses,
        formulas: stats,
        notes,
        timings: opts.timings.then_some(Timings {
            hypotheses_ms: hyp_ms,
            inference_ms: inf_ms,
        }),
    };
    let network = BooleanNetwork::new(supports, formulas, bool_mode)?;
    Ok(Conversion {
        network,
        codec,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::formula::equivalent;
    use crate::io::parse_mvnet;

    fn fig1() -> MvNetwork {
        parse_mvnet(fixtures::FIG1).unwrap()
    }

    #[test]
    fn regulator_sets() {
        let net = fig1();
        assert_eq!(regulators(&net, 1), BTreeSet::from([0, 1]));
        assert_eq!(regulators(&net, 0), BTreeSet::from([1]));
        let free = parse_mvnet("var a : 0..1;").unwrap();
        assert!(regulators(&free, 0).is_empty());
    }

    #[test]
    fn psi_examples() {
        let gray = psi_sets(&Coding::gray(), 3, 1, 1).unwrap();
        assert!(gray.zero_to_one.contains(&0b00));
        let s = psi_sets(&Coding::summing(), 3, 2, 0).unwrap();
        assert_eq!(
            s.star_to_one,
            BTreeSet::from([0b001, 0b010, 0b100, 0b101, 0b110])
        );
        assert!(psi_sets(&Coding::summing(), 3, 0, 0).is_err());
    }

    #[test]
    fn boolean_guard_of_level_three() {
        let net = fig1();
        let codec = Codec::for_network(&Coding::summing(), &net).unwrap();
        let g = boolean_guard(&net, &codec, 1, 3).unwrap().to_dnf();
        // x_1 with y in {2, 3}
        for w in 0u32..16 {
            let bits: Vec<bool> = (0..4).map(|j| (w >> (3 - j)) & 1 == 1).collect();
            let y = bits[1..].iter().filter(|&&b| b).count();
            assert_eq!(g.eval(&bits), bits[0] && y >= 2, "{w:04b}");
        }
    }

    #[test]
    fn unsatisfiable_level_gives_false() {
        let net =
            parse_mvnet("var a : 0..2; rules a: 2 <- a = 1 & a = 2; rules a: 1 <- a = 0;").unwrap();
        let codec = Codec::for_network(&Coding::summing(), &net).unwrap();
        assert!(boolean_guard(&net, &codec, 0, 2)
            .unwrap()
            .to_dnf()
            .is_false());
    }

    #[test]
    fn rule_free_variable_gives_false_formulas() {
        let net = parse_mvnet("var a : 0..1; var b : 0..1; rules a: 1 <- b >= 1;").unwrap();
        let conv = convert(
            &net,
            &Coding::summing(),
            &ModeChoice::Asynchronous,
            &Default::default(),
        )
        .unwrap();
        for &bit in conv.codec.supports().support(1) {
            assert!(conv.network.formula(bit).is_false());
        }
    }

    #[test]
    fn non_unitary_network_is_refused() {
        let net = parse_mvnet("var y : 0..2; rules y: 2 <- y = 0;").unwrap();
        let err = convert(
            &net,
            &Coding::summing(),
            &ModeChoice::Asynchronous,
            &Default::default(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::Refused {
                hypothesis: Hypothesis::UnitaryStepwise,
                ..
            }
        ));
        assert!(err.to_string().contains("not unitary stepwise"));
    }

    #[test]
    fn permuted_code_without_zero_property_is_refused() {
        let c = Coding::permuted(CodeKind::Gray, vec![3, 1, 2, 0]).unwrap();
        let err = convert(&fig1(), &c, &ModeChoice::Asynchronous, &Default::default()).unwrap_err();
        assert!(matches!(
            err,
            Error::Refused {
                hypothesis: Hypothesis::ZeroCodedByZeroProfile,
                ..
            }
        ));
    }

    #[test]
    fn summing_formulas() {
        let conv = convert(
            &fig1(),
            &Coding::summing(),
            &ModeChoice::Asynchronous,
            &Default::default(),
        )
        .unwrap();
        let names = conv.network.names().to_vec();
        let rendered: Vec<String> = conv
            .network
            .formulas()
            .iter()
            .map(|f| f.render(&names))
            .collect();
        assert_eq!(rendered, vec!["y_1 | y_2 | y_3", "x_1", "x_1", "x_1"]);
        assert!(conv.report.timings.is_none());
    }

    #[test]
    fn gray_formulas() {
        let conv = convert(
            &fig1(),
            &Coding::gray(),
            &ModeChoice::Asynchronous,
            &Default::default(),
        )
        .unwrap();
        let bn = &conv.network;
        let expected = crate::io::parse_bnet(fixtures::FIG5_BNET).unwrap();
        for (a, b) in bn.formulas().iter().zip(expected.formulas()) {
            assert!(equivalent(a, b));
        }
    }

    #[test]
    fn parallel_support_with_summing_notes_the_reduction() {
        let conv = convert(
            &fig1(),
            &Coding::summing(),
            &ModeChoice::ParallelSupport,
            &Default::default(),
        )
        .unwrap();
        assert_eq!(conv.report.effective_coding, "vanham");
        assert_eq!(conv.network.mode().len(), 2);
        assert!(conv.report.notes[0].contains("Van Ham"));
    }
}
