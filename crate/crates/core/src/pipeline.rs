//! End-to-end runs behind the command-line subcommands. Each run returns
//! the text artefacts it produces so callers decide where they go.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::coding::{
    closed_form_markers, marker_positions, markers, neighbourhood_for_level, Codec, Coding,
    NeighbourhoodReport,
};
use crate::conversion::{convert, Conversion, ConversionReport, ConvertOptions, ModeChoice};
use crate::dynamics::{build_sts, AttractorKind, Dynamics};
use crate::error::{Error, Result};
use crate::graphs::{compare_migs_sig, interaction_graph, recover_migs, sig, IsomorphismReport};
use crate::io::{align_to, emit_boolnet, emit_graph_dot, emit_sts_dot, emit_unsigned_graph_dot};
use crate::model::{BooleanNetwork, Level, Mode, MvNetwork, SupportMap, DEFAULT_CAP};
use crate::verification::{verify_conversion, AdmissibilityOracle, VerificationReport};

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub coding: Coding,
    pub mode: ModeChoice,
    /// Bound on enumerated states; at least 1.
    pub cap: usize,
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            coding: Coding::summing(),
            mode: ModeChoice::Asynchronous,
            cap: DEFAULT_CAP,
            timings: false,
        }
    }
}

impl RunConfig {
    fn options(&self) -> ConvertOptions {
        ConvertOptions {
            timings: self.timings,
            cap: Some(self.cap),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.cap == 0 {
            return Err(Error::spec("the enumeration cap must be at least 1"));
        }
        Ok(())
    }
}

pub struct ConvertOutput {
    pub conversion: Conversion,
    /// `targets, factors` text.
    pub bnet: String,
}

impl ConvertOutput {
    pub fn report(&self) -> &ConversionReport {
        &self.conversion.report
    }
}

pub fn run_convert(net: &MvNetwork, cfg: &RunConfig) -> Result<ConvertOutput> {
    cfg.validate()?;
    let conversion = convert(net, &cfg.coding, &cfg.mode, &cfg.options())?;
    let bnet = emit_boolnet(&conversion.network);
    Ok(ConvertOutput { conversion, bnet })
}

/// Verifies a Boolean network against `net`. Without `bn`, the network is
/// first converted with the configured coding and mode; a supplied network
/// is matched to the supports of the coding by variable name.
pub fn run_verify(
    net: &MvNetwork,
    bn: Option<&BooleanNetwork>,
    cfg: &RunConfig,
) -> Result<VerificationReport> {
    cfg.validate()?;
    let (bn, codec) = match bn {
        Some(bn) => {
            let codec = Codec::for_network(&cfg.coding, net)?;
            let aligned = align_to(bn, codec.supports())?;
            let mode = match &cfg.mode {
                ModeChoice::Asynchronous => Mode::asynchronous(aligned.len()),
                ModeChoice::ParallelSupport => Mode::parallel_support(codec.supports()),
                ModeChoice::Custom(_) => {
                    return Err(Error::spec(
                        "custom modes can only be verified on converted networks",
                    ))
                }
            };
            (aligned.with_mode(mode)?, codec)
        }
        None => {
            let c = convert(net, &cfg.coding, &cfg.mode, &cfg.options())?;
            (c.network, c.codec)
        }
    };
    verify_conversion(net, &bn, &codec, cfg.cap)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AttractorSummary {
    pub kind: AttractorKind,
    pub states: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub network: String,
    pub attractors: Vec<AttractorSummary>,
    pub stable_states: Vec<String>,
    pub interaction_graph: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boolean_interaction_graph: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support_quotient: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub markers: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recovered_graph: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recovery_error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub isomorphism: Option<IsomorphismReport>,
}

pub struct AnalysisOutput {
    pub report: AnalysisReport,
    /// Named DOT documents, e.g. `("stg.dot", ...)`.
    pub files: Vec<(String, String)>,
}

fn attractor_summaries<D: Dynamics>(
    d: &D,
    mode: &Mode,
    cap: usize,
) -> Result<(Vec<AttractorSummary>, String)> {
    let ts = build_sts(d, mode, None, cap)?.reflexive_reduction();
    let attractors = ts
        .attractors()
        .into_iter()
        .map(|a| AttractorSummary {
            kind: a.kind,
            states: a.states.iter().map(|&s| ts.state_label(s)).collect(),
        })
        .collect();
    Ok((attractors, emit_sts_dot(&ts, "stg")))
}

fn stable(attractors: &[AttractorSummary]) -> Vec<String> {
    attractors
        .iter()
        .filter(|a| a.kind == AttractorKind::StableState)
        .map(|a| a.states[0].clone())
        .collect()
}

/// Attractors and interaction graphs of an integer network, together with
/// its conversion, the Boolean interaction graph and the graph recovered
/// from it through markers.
pub fn run_analyze_mv(net: &MvNetwork, cfg: &RunConfig) -> Result<AnalysisOutput> {
    cfg.validate()?;
    let (attractors, stg) = attractor_summaries(net, &Mode::asynchronous(net.len()), cfg.cap)?;
    let migs = interaction_graph(net, cfg.cap)?;
    let mut files = vec![
        ("stg.dot".to_string(), stg),
        ("migs.dot".to_string(), emit_graph_dot(&migs, "migs")),
    ];
    let conversion = convert(net, &cfg.coding, &cfg.mode, &cfg.options())?;
    let bn = &conversion.network;
    let supports = bn.supports();
    let bigs = interaction_graph(bn, cfg.cap)?;
    let quotient = sig(&bigs, supports)?;
    files.push(("bigs.dot".to_string(), emit_graph_dot(&bigs, "bigs")));
    files.push((
        "sig.dot".to_string(),
        emit_unsigned_graph_dot(&quotient, "sig"),
    ));
    let marker_set = markers(conversion.codec.coding(), supports, &net.max_levels());
    let (recovered, recovery_error) = match marker_set
        .as_ref()
        .map_err(|e| e.to_string())
        .and_then(|m| recover_migs(&bigs, supports, m).map_err(|e| e.to_string()))
    {
        Ok(g) => {
            files.push((
                "recovered-migs.dot".to_string(),
                emit_graph_dot(&g, "recovered_migs"),
            ));
            (Some(g.arc_labels()), None)
        }
        Err(e) => (None, Some(e)),
    };
    let report = AnalysisReport {
        network: net.name().to_string(),
        stable_states: stable(&attractors),
        attractors,
        interaction_graph: migs.arc_labels(),
        boolean_interaction_graph: Some(bigs.arc_labels()),
        support_quotient: Some(quotient.arc_labels()),
        markers: marker_set.ok().map(|m| {
            m.iter()
                .map(|&b| supports.bool_names()[b].clone())
                .collect()
        }),
        recovered_graph: recovered,
        recovery_error,
        isomorphism: Some(compare_migs_sig(&migs, &quotient)),
    };
    Ok(AnalysisOutput { report, files })
}

/// Attractors and interaction graphs of a Boolean network under its own
/// mode.
pub fn run_analyze_bool(bn: &BooleanNetwork, cfg: &RunConfig) -> Result<AnalysisOutput> {
    cfg.validate()?;
    let (attractors, stg) = attractor_summaries(bn, bn.mode(), cfg.cap)?;
    let bigs = interaction_graph(bn, cfg.cap)?;
    let quotient = sig(&bigs, bn.supports())?;
    let report = AnalysisReport {
        network: "boolean".to_string(),
        stable_states: stable(&attractors),
        attractors,
        interaction_graph: bigs.arc_labels(),
        boolean_interaction_graph: None,
        support_quotient: Some(quotient.arc_labels()),
        markers: None,
        recovered_graph: None,
        recovery_error: None,
        isomorphism: None,
    };
    Ok(AnalysisOutput {
        report,
        files: vec![
            ("stg.dot".to_string(), stg),
            ("bigs.dot".to_string(), emit_graph_dot(&bigs, "bigs")),
            (
                "sig.dot".to_string(),
                emit_unsigned_graph_dot(&quotient, "sig"),
            ),
        ],
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProfileRow {
    pub profile: String,
    pub level: Option<Level>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CodesReport {
    pub coding: String,
    pub max_level: Level,
    pub support_size: usize,
    pub zero_property: bool,
    pub table: Vec<ProfileRow>,
    pub preimages: Vec<Vec<String>>,
    /// Support positions counted from 1.
    pub markers: Vec<usize>,
    pub closed_form_markers: Option<Vec<usize>>,
    pub neighbourhood: NeighbourhoodReport,
}

/// Decode table, preimages, markers and neighbourhood analysis of a coding
/// on levels `0..=max_level`.
pub fn run_codes(coding: &Coding, max_level: Level) -> Result<CodesReport> {
    if max_level == 0 {
        return Err(Error::spec("the maximal level must be at least 1"));
    }
    let width = coding.support_size(max_level);
    let bits = |p: u32| -> String {
        (0..width)
            .map(|k| {
                if p >> (width - 1 - k) & 1 == 1 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect()
    };
    let table: Vec<ProfileRow> = coding
        .decode_table(max_level)
        .into_iter()
        .enumerate()
        .map(|(p, level)| ProfileRow {
            profile: bits(p as u32),
            level,
        })
        .collect();
    let preimages = (0..=max_level)
        .map(|l| {
            coding
                .preimage_bits(max_level, l)
                .into_iter()
                .map(bits)
                .collect()
        })
        .collect();
    let supports = SupportMap::with_sizes(&["y".to_string()], &[width])?;
    let closed = coding.permutation.is_none().then(|| {
        closed_form_markers(coding.kind, &supports)
            .into_iter()
            .map(|b| b + 1)
            .collect()
    });
    Ok(CodesReport {
        coding: coding.label(),
        max_level,
        support_size: width,
        zero_property: coding.zero_property(max_level),
        table,
        preimages,
        markers: marker_positions(coding, max_level)
            .into_iter()
            .map(|k| k + 1)
            .collect(),
        closed_form_markers: closed,
        neighbourhood: neighbourhood_for_level(coding, max_level),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModeAdmissibility {
    pub mode: String,
    pub reference: String,
    pub admissible: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    pub coding: String,
    pub modes: Vec<(String, Vec<String>)>,
    pub pairs: Vec<ModeAdmissibility>,
}

/// Converts `net` asynchronously and checks pairwise admissibility of the
/// asynchronous, parallel-support and synchronous Boolean modes.
pub fn run_admissibility(net: &MvNetwork, cfg: &RunConfig) -> Result<AdmissibilityReport> {
    cfg.validate()?;
    let c = convert(net, &cfg.coding, &ModeChoice::Asynchronous, &cfg.options())?;
    let bn = &c.network;
    let names = bn.names();
    let modes = [
        ("asynchronous", Mode::asynchronous(bn.len())),
        ("parallel-support", Mode::parallel_support(bn.supports())),
        ("synchronous", Mode::synchronous(bn.len())),
    ];
    let oracle = AdmissibilityOracle::new(bn, &c.codec, cfg.cap)?;
    let mut pairs = Vec::new();
    for (a, ma) in &modes {
        for (b, mb) in &modes {
            pairs.push(ModeAdmissibility {
                mode: a.to_string(),
                reference: b.to_string(),
                admissible: oracle.mode(ma, mb),
            });
        }
    }
    Ok(AdmissibilityReport {
        coding: c.codec.coding().label(),
        modes: modes
            .iter()
            .map(|(n, m)| (n.to_string(), m.labels(names)))
            .collect(),
        pairs,
    })
}

/// Boolean variable names of a marker set.
pub fn marker_names(supports: &SupportMap, set: &BTreeSet<usize>) -> Vec<String> {
    set.iter()
        .map(|&b| supports.bool_names()[b].clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{FIG1, FIG4_BNET, FIG5_BNET};
    use crate::io::{parse_bnet, parse_mvnet};

    #[test]
    fn running_example_analysis() {
        let net = parse_mvnet(FIG1).unwrap();
        let out = run_analyze_mv(
            &net,
            &RunConfig {
                coding: Coding::gray(),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(out.report.stable_states, ["00", "13"]);
        assert_eq!(
            out.report.recovered_graph.as_deref().unwrap(),
            ["x->y:+", "y->x:+", "y->y:+"]
        );
        let names: Vec<&str> = out.files.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(
            names,
            [
                "stg.dot",
                "migs.dot",
                "bigs.dot",
                "sig.dot",
                "recovered-migs.dot"
            ]
        );
    }

    #[test]
    fn boolean_analyses() {
        let fig4 =
            run_analyze_bool(&parse_bnet(FIG4_BNET).unwrap(), &RunConfig::default()).unwrap();
        assert_eq!(fig4.report.stable_states, ["0000", "1111"]);
        let fig5 =
            run_analyze_bool(&parse_bnet(FIG5_BNET).unwrap(), &RunConfig::default()).unwrap();
        assert_eq!(fig5.report.stable_states, ["000", "110"]);
    }

    #[test]
    fn verify_supplied_network() {
        let net = parse_mvnet(FIG1).unwrap();
        let cfg = RunConfig {
            coding: Coding::gray(),
            ..Default::default()
        };
        let bn = parse_bnet(FIG5_BNET).unwrap();
        assert!(run_verify(&net, Some(&bn), &cfg).unwrap().verdict);
        let wrong = RunConfig::default();
        assert!(run_verify(&net, Some(&bn), &wrong).is_err());
    }

    #[test]
    fn codes_report() {
        let r = run_codes(&Coding::gray(), 3).unwrap();
        assert_eq!(r.support_size, 2);
        assert_eq!(r.markers, [1]);
        assert_eq!(r.closed_form_markers, Some(vec![1]));
        assert_eq!(r.preimages[3], ["10"]);
    }

    #[test]
    fn zero_cap_is_rejected() {
        let net = parse_mvnet(FIG1).unwrap();
        let cfg = RunConfig {
            cap: 0,
            ..Default::default()
        };
        assert!(run_convert(&net, &cfg).is_err());
    }
}
