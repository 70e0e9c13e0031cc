//! Integer-to-Boolean codings.
//!
//! A coding decodes the Boolean profile of one support into a level. Bit
//! index 1 (position 0 here) is the leftmost bit of a profile; for Gray it is
//! the most significant bit. Profiles are handled as integers whose most
//! significant bit is position 0 of the support.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Level, MvNetwork, SupportMap, VarId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeKind {
    Summing,
    VanHam,
    Gray,
}

impl CodeKind {
    pub const ALL: [CodeKind; 3] = [CodeKind::Summing, CodeKind::VanHam, CodeKind::Gray];

    pub fn name(self) -> &'static str {
        match self {
            CodeKind::Summing => "summing",
            CodeKind::VanHam => "vanham",
            CodeKind::Gray => "gray",
        }
    }
}

impl fmt::Display for CodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CodeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "summing" => Ok(CodeKind::Summing),
            "vanham" | "van-ham" => Ok(CodeKind::VanHam),
            "gray" => Ok(CodeKind::Gray),
            other => Err(Error::spec(format!(
                "unknown coding `{other}` (expected summing, vanham or gray)"
            ))),
        }
    }
}

/// A base code, optionally composed with a permutation of the levels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coding {
    pub kind: CodeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<Level>>,
}

impl Coding {
    pub fn new(kind: CodeKind) -> Self {
        Coding {
            kind,
            permutation: None,
        }
    }

    pub fn summing() -> Self {
        Coding::new(CodeKind::Summing)
    }

    pub fn van_ham() -> Self {
        Coding::new(CodeKind::VanHam)
    }

    pub fn gray() -> Self {
        Coding::new(CodeKind::Gray)
    }

    /// Composes the base code with `pi`, a permutation of `0..pi.len()`.
    pub fn permuted(kind: CodeKind, pi: Vec<Level>) -> Result<Self> {
        let mut sorted = pi.clone();
        sorted.sort_unstable();
        if sorted.iter().enumerate().any(|(i, &v)| v as usize != i) {
            return Err(Error::spec(format!(
                "{pi:?} is not a permutation of the levels"
            )));
        }
        Ok(Coding {
            kind,
            permutation: Some(pi),
        })
    }

    pub fn label(&self) -> String {
        match &self.permutation {
            None => self.kind.name().to_string(),
            Some(pi) => format!(
                "{}∘[{}]",
                self.kind.name(),
                pi.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
        }
    }

    /// Number of Boolean variables coding levels `0..=max_level`.
    pub fn support_size(&self, max_level: Level) -> usize {
        match self.kind {
            CodeKind::Summing | CodeKind::VanHam => max_level as usize,
            CodeKind::Gray => bits_for(max_level),
        }
    }

    fn permutation_for(&self, max_level: Level) -> Option<&[Level]> {
        self.permutation
            .as_deref()
            .filter(|pi| pi.len() == max_level as usize + 1)
    }

    /// Decodes a profile given as an integer (position 0 is the MSB).
    pub fn decode_bits(&self, max_level: Level, profile: u32) -> Option<Level> {
        let width = self.support_size(max_level);
        let base = match self.kind {
            CodeKind::Summing => profile.count_ones(),
            CodeKind::VanHam => {
                let l = profile.count_ones();
                (profile == ones_prefix(width, l)).then_some(l)?
            }
            CodeKind::Gray => gray_to_binary(profile),
        };
        if base > max_level {
            return None;
        }
        Some(match self.permutation_for(max_level) {
            Some(pi) => pi[base as usize],
            None => base,
        })
    }

    pub fn decode(&self, max_level: Level, profile: &[bool]) -> Result<Option<Level>> {
        let width = self.support_size(max_level);
        if profile.len() != width {
            return Err(Error::spec(format!(
                "profile of {} bits for a support of {width}",
                profile.len()
            )));
        }
        Ok(self.decode_bits(max_level, pack(profile)))
    }

    /// All profiles decoding to `level`, in increasing integer order.
    pub fn preimage_bits(&self, max_level: Level, level: Level) -> Vec<u32> {
        let width = self.support_size(max_level);
        (0u32..1 << width)
            .filter(|&p| self.decode_bits(max_level, p) == Some(level))
            .collect()
    }

    pub fn preimage(&self, max_level: Level, level: Level) -> Result<Vec<Vec<bool>>> {
        if level > max_level {
            return Err(Error::spec(format!(
                "level {level} out of range 0..{max_level}"
            )));
        }
        let width = self.support_size(max_level);
        Ok(self
            .preimage_bits(max_level, level)
            .into_iter()
            .map(|p| unpack(p, width))
            .collect())
    }

    pub fn in_domain(&self, max_level: Level, profile: &[bool]) -> bool {
        self.decode(max_level, profile).ok().flatten().is_some()
    }

    /// Level 0 is coded by the all-zero profile.
    pub fn zero_property(&self, max_level: Level) -> bool {
        self.decode_bits(max_level, 0) == Some(0)
    }

    pub fn decode_table(&self, max_level: Level) -> Vec<Option<Level>> {
        let width = self.support_size(max_level);
        (0u32..1 << width)
            .map(|p| self.decode_bits(max_level, p))
            .collect()
    }
}

impl Default for Coding {
    fn default() -> Self {
        Coding::summing()
    }
}

pub(crate) fn bits_for(max_level: Level) -> usize {
    (32 - max_level.leading_zeros()) as usize
}

fn ones_prefix(width: usize, l: u32) -> u32 {
    let full = if width == 0 { 0 } else { (1u32 << width) - 1 };
    full & !((1u32 << (width - l as usize)) - 1)
}

fn gray_to_binary(mut g: u32) -> u32 {
    let mut b = 0;
    while g != 0 {
        b ^= g;
        g >>= 1;
    }
    b
}

pub(crate) fn pack(bits: &[bool]) -> u32 {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as u32)
}

pub(crate) fn unpack(p: u32, width: usize) -> Vec<bool> {
    (0..width)
        .map(|j| (p >> (width - 1 - j)) & 1 == 1)
        .collect()
}

pub(crate) fn hamming(a: u32, b: u32) -> u32 {
    (a ^ b).count_ones()
}

/// Per-variable decode tables for a whole network.
#[derive(Clone, Debug)]
pub struct VarCode {
    pub max_level: Level,
    pub width: usize,
    pub table: Vec<Option<Level>>,
    pub preimages: Vec<Vec<u32>>,
}

impl VarCode {
    fn new(coding: &Coding, max_level: Level) -> Self {
        let width = coding.support_size(max_level);
        let table = coding.decode_table(max_level);
        let preimages = (0..=max_level)
            .map(|l| {
                (0..table.len() as u32)
                    .filter(|&p| table[p as usize] == Some(l))
                    .collect()
            })
            .collect();
        VarCode {
            max_level,
            width,
            table,
            preimages,
        }
    }

    pub fn decode(&self, profile: u32) -> Option<Level> {
        self.table[profile as usize]
    }
}

/// A coding instantiated on the variables of one network.
#[derive(Clone, Debug)]
pub struct Codec {
    coding: Coding,
    supports: SupportMap,
    vars: Vec<VarCode>,
}

impl Codec {
    pub fn new(coding: &Coding, mv_names: &[String], max_levels: &[Level]) -> Result<Self> {
        let sizes: Vec<usize> = max_levels.iter().map(|&l| coding.support_size(l)).collect();
        let supports = SupportMap::with_sizes(mv_names, &sizes)?;
        Codec::with_supports(coding, supports, max_levels)
    }

    pub fn for_network(coding: &Coding, net: &MvNetwork) -> Result<Self> {
        Codec::new(coding, &net.names(), &net.max_levels())
    }

    pub fn with_supports(
        coding: &Coding,
        supports: SupportMap,
        max_levels: &[Level],
    ) -> Result<Self> {
        if max_levels.len() != supports.num_mv() {
            return Err(Error::spec("one maximal level is required per support"));
        }
        if let Some(pi) = &coding.permutation {
            if !max_levels.iter().any(|&l| l as usize + 1 == pi.len()) {
                return Err(Error::spec(format!(
                    "permutation of {} levels matches no variable",
                    pi.len()
                )));
            }
        }
        let vars: Vec<VarCode> = max_levels
            .iter()
            .map(|&l| VarCode::new(coding, l))
            .collect();
        for (i, vc) in vars.iter().enumerate() {
            if supports.support(i).len() != vc.width {
                return Err(Error::spec(format!(
                    "support of `{}` has {} variables, {} coding needs {}",
                    supports.mv_names()[i],
                    supports.support(i).len(),
                    coding.label(),
                    vc.width
                )));
            }
        }
        Ok(Codec {
            coding: coding.clone(),
            supports,
            vars,
        })
    }

    pub fn coding(&self) -> &Coding {
        &self.coding
    }

    pub fn supports(&self) -> &SupportMap {
        &self.supports
    }

    pub fn var(&self, i: VarId) -> &VarCode {
        &self.vars[i]
    }

    pub fn max_levels(&self) -> Vec<Level> {
        self.vars.iter().map(|v| v.max_level).collect()
    }

    pub fn num_bool(&self) -> usize {
        self.supports.num_bool()
    }

    /// Profile of support `i` in a Boolean state given as levels (0/1).
    pub fn profile(&self, i: VarId, bstate: &[Level]) -> u32 {
        self.supports
            .support(i)
            .iter()
            .fold(0, |acc, &b| (acc << 1) | (bstate[b] != 0) as u32)
    }

    pub fn decode_var(&self, i: VarId, bstate: &[Level]) -> Option<Level> {
        self.vars[i].decode(self.profile(i, bstate))
    }

    pub fn decode(&self, bstate: &[Level]) -> Option<Vec<Level>> {
        (0..self.vars.len())
            .map(|i| self.decode_var(i, bstate))
            .collect()
    }

    pub fn in_domain(&self, bstate: &[Level]) -> bool {
        (0..self.vars.len()).all(|i| self.decode_var(i, bstate).is_some())
    }

    /// Writes profile `p` of support `i` into a Boolean state.
    pub fn write_profile(&self, i: VarId, p: u32, bstate: &mut [Level]) {
        let support = self.supports.support(i);
        let w = support.len();
        for (j, &b) in support.iter().enumerate() {
            bstate[b] = (p >> (w - 1 - j)) & 1;
        }
    }

    /// All Boolean states decoding to `state`, in increasing state-index order.
    pub fn preimage_states(&self, state: &[Level]) -> Vec<Vec<Level>> {
        let mut out = vec![vec![0; self.num_bool()]];
        for (i, &l) in state.iter().enumerate() {
            let mut next = Vec::new();
            for partial in &out {
                for &p in &self.vars[i].preimages[l as usize] {
                    let mut s = partial.clone();
                    self.write_profile(i, p, &mut s);
                    next.push(s);
                }
            }
            out = next;
        }
        out
    }
}

/// Outcome of the neighbourhood-preservation analysis of a coding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NeighbourhoodReport {
    /// Verdict used as a conversion hypothesis: the first clause together
    /// with `every_code_adjacent`.
    pub preserving: bool,
    /// Consecutive levels have codes at Hamming distance 1.
    pub forward_clause: bool,
    /// Distance-1 in-domain profiles decode to levels at distance 1.
    pub reverse_clause: bool,
    /// Every code of a level has a distance-1 neighbour among the codes of
    /// each adjacent level.
    pub every_code_adjacent: bool,
    pub counterexample: Option<NeighbourhoodCounterexample>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NeighbourhoodCounterexample {
    pub variable: String,
    pub clause: String,
    pub levels: (Level, Level),
    pub profiles: (String, String),
    pub distance: u32,
}

fn bit_string(p: u32, width: usize) -> String {
    unpack(p, width)
        .iter()
        .map(|&b| if b { '1' } else { '0' })
        .collect()
}

fn neighbourhood_for(coding: &Coding, max_level: Level, variable: &str) -> NeighbourhoodReport {
    let vc = VarCode::new(coding, max_level);
    let w = vc.width;
    let mut report = NeighbourhoodReport {
        preserving: true,
        forward_clause: true,
        reverse_clause: true,
        every_code_adjacent: true,
        counterexample: None,
    };
    let note =
        |report: &mut NeighbourhoodReport, clause: &str, levels: (Level, Level), a: u32, b: u32| {
            if report.counterexample.is_none() {
                report.counterexample = Some(NeighbourhoodCounterexample {
                    variable: variable.to_string(),
                    clause: clause.to_string(),
                    levels,
                    profiles: (bit_string(a, w), bit_string(b, w)),
                    distance: hamming(a, b),
                });
            }
        };
    for l in 0..max_level {
        let (lo, hi) = (&vc.preimages[l as usize], &vc.preimages[l as usize + 1]);
        let closest = lo
            .iter()
            .flat_map(|&a| hi.iter().map(move |&b| (a, b)))
            .min_by_key(|&(a, b)| (hamming(a, b), a, b));
        if let Some((a, b)) = closest {
            if hamming(a, b) != 1 {
                report.forward_clause = false;
                note(&mut report, "forward", (l, l + 1), a, b);
            }
        }
    }
    for (l, codes) in vc.preimages.iter().enumerate() {
        let l = l as Level;
        for &a in codes {
            for other in [l.checked_sub(1), (l < max_level).then_some(l + 1)]
                .into_iter()
                .flatten()
            {
                let adjacent = vc.preimages[other as usize]
                    .iter()
                    .any(|&b| hamming(a, b) == 1);
                if !adjacent {
                    report.every_code_adjacent = false;
                    let b = vc.preimages[other as usize][0];
                    note(&mut report, "adjacency", (l, other), a, b);
                }
            }
        }
    }
    for a in 0u32..1 << w {
        for bit in 0..w {
            let b = a ^ (1 << bit);
            if b < a {
                continue;
            }
            if let (Some(la), Some(lb)) = (vc.decode(a), vc.decode(b)) {
                if la.abs_diff(lb) != 1 {
                    report.reverse_clause = false;
                    note(&mut report, "reverse", (la, lb), a, b);
                }
            }
        }
    }
    report.preserving = report.forward_clause && report.every_code_adjacent;
    report
}

/// Exhaustive neighbourhood-preservation check. Distances between integer
/// states are sums of level differences and decompose per variable, so each
/// variable is analysed on its own support.
pub fn is_neighbourhood_preserving(coding: &Coding, net: &MvNetwork) -> NeighbourhoodReport {
    let mut combined = NeighbourhoodReport {
        preserving: true,
        forward_clause: true,
        reverse_clause: true,
        every_code_adjacent: true,
        counterexample: None,
    };
    for v in net.variables() {
        let r = neighbourhood_for(coding, v.max_level, &v.name);
        combined.forward_clause &= r.forward_clause;
        combined.reverse_clause &= r.reverse_clause;
        combined.every_code_adjacent &= r.every_code_adjacent;
        if combined.counterexample.is_none() {
            combined.counterexample = r.counterexample;
        }
    }
    combined.preserving = combined.forward_clause && combined.every_code_adjacent;
    combined
}

/// Neighbourhood check for a single level range.
pub fn neighbourhood_for_level(coding: &Coding, max_level: Level) -> NeighbourhoodReport {
    neighbourhood_for(coding, max_level, "y")
}

/// Support positions (0-based) satisfying the monotonicity condition
/// `ψ(w) ≤ ψ(w[k ↦ 1])` for every in-domain `w`. Flips whose target lies
/// outside the domain impose no constraint.
pub fn marker_positions(coding: &Coding, max_level: Level) -> Vec<usize> {
    let vc = VarCode::new(coding, max_level);
    let w = vc.width;
    (0..w)
        .filter(|&k| {
            let bit = 1u32 << (w - 1 - k);
            (0u32..1 << w).all(|p| match (vc.decode(p), vc.decode(p | bit)) {
                (Some(a), Some(b)) => a <= b,
                _ => true,
            })
        })
        .collect()
}

/// Markers of sign obtained by enumerating the monotonicity condition.
pub fn markers(
    coding: &Coding,
    supports: &SupportMap,
    max_levels: &[Level],
) -> Result<BTreeSet<VarId>> {
    let mut out = BTreeSet::new();
    for (i, &l) in max_levels.iter().enumerate() {
        let positions = marker_positions(coding, l);
        if positions.is_empty() {
            return Err(Error::MarkerCoverage(supports.mv_names()[i].clone()));
        }
        out.extend(positions.into_iter().map(|k| supports.support(i)[k]));
    }
    Ok(out)
}

/// Closed-form marker sets of the base codes: the whole support for Summing
/// and Van Ham, the most significant bit for Gray.
pub fn closed_form_markers(kind: CodeKind, supports: &SupportMap) -> BTreeSet<VarId> {
    supports
        .supports()
        .iter()
        .flat_map(|s| match kind {
            CodeKind::Summing | CodeKind::VanHam => s.clone(),
            CodeKind::Gray => s.iter().take(1).copied().collect(),
        })
        .collect()
}

/// Whether the given set satisfies the monotonicity condition and covers
/// every support.
pub fn satisfies_marker_condition(
    coding: &Coding,
    supports: &SupportMap,
    max_levels: &[Level],
    set: &BTreeSet<VarId>,
) -> bool {
    let covered = supports
        .supports()
        .iter()
        .all(|s| s.iter().any(|b| set.contains(b)));
    covered
        && set.iter().all(|&b| {
            let i = supports.owner(b);
            marker_positions(coding, max_levels[i]).contains(&supports.position(b))
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn decode_examples() {
        assert_eq!(Coding::summing().decode(3, &bits("101")).unwrap(), Some(2));
        assert_eq!(Coding::gray().decode(3, &bits("11")).unwrap(), Some(2));
        assert_eq!(Coding::gray().decode(3, &bits("10")).unwrap(), Some(3));
        assert_eq!(Coding::van_ham().decode(3, &bits("010")).unwrap(), None);
        assert!(Coding::summing().decode(3, &bits("10")).is_err());
    }

    #[test]
    fn preimage_examples() {
        let p = Coding::summing().preimage(3, 1).unwrap();
        assert_eq!(p, vec![bits("001"), bits("010"), bits("100")]);
        assert_eq!(Coding::summing().preimage(3, 3).unwrap(), vec![bits("111")]);
        assert_eq!(Coding::gray().preimage(3, 0).unwrap(), vec![bits("00")]);
        assert!(Coding::gray().preimage(3, 4).is_err());
    }

    #[test]
    fn domains() {
        assert!(Coding::summing().in_domain(3, &bits("010")));
        assert!(!Coding::van_ham().in_domain(3, &bits("101")));
        assert!(!Coding::gray().in_domain(2, &bits("10")));
        assert!(Coding::gray().in_domain(3, &bits("10")));
    }

    #[test]
    fn support_sizes() {
        assert_eq!(Coding::gray().support_size(1), 1);
        assert_eq!(Coding::gray().support_size(3), 2);
        assert_eq!(Coding::gray().support_size(4), 3);
        assert_eq!(Coding::summing().support_size(4), 4);
    }

    #[test]
    fn permutation_breaks_zero_property() {
        let c = Coding::permuted(CodeKind::Gray, vec![3, 1, 2, 0]).unwrap();
        assert!(!c.zero_property(3));
        assert!(c.zero_property(2));
        assert!(Coding::permuted(CodeKind::Gray, vec![0, 0, 1]).is_err());
    }

    #[test]
    fn neighbourhood_of_base_codes() {
        for kind in CodeKind::ALL {
            for l in 1..=6 {
                let r = neighbourhood_for_level(&Coding::new(kind), l);
                assert!(r.preserving, "{kind} L={l}");
            }
        }
        let r = neighbourhood_for_level(&Coding::gray(), 3);
        assert!(!r.reverse_clause);
        let c = r.counterexample.unwrap();
        assert_eq!(c.clause, "reverse");
        assert_eq!(c.profiles, ("00".to_string(), "10".to_string()));
    }

    #[test]
    fn swapped_gray_is_not_neighbourhood_preserving() {
        let c = Coding::permuted(CodeKind::Gray, vec![3, 1, 2, 0]).unwrap();
        let r = neighbourhood_for_level(&c, 3);
        assert!(!r.preserving);
        let cex = r.counterexample.unwrap();
        assert_eq!(cex.clause, "forward");
        assert_eq!(cex.levels, (0, 1));
        assert_eq!(cex.distance, 2);
    }

    #[test]
    fn marker_positions_of_base_codes() {
        assert_eq!(marker_positions(&Coding::summing(), 3), vec![0, 1, 2]);
        assert_eq!(marker_positions(&Coding::van_ham(), 3), vec![0, 1, 2]);
        assert_eq!(marker_positions(&Coding::gray(), 3), vec![0]);
        assert_eq!(marker_positions(&Coding::gray(), 1), vec![0]);
    }
}
