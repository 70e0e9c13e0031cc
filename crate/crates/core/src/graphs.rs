//! Signed interaction graphs, their support quotient and sign recovery
//! through markers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::dynamics::Dynamics;
use crate::error::{Error, Result};
use crate::model::{StateSpace, SupportMap, VarId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Positive,
    Negative,
    Both,
}

impl Sign {
    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Positive => "+",
            Sign::Negative => "-",
            Sign::Both => "±",
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Arc {
    pub src: String,
    pub dst: String,
    pub sign: Sign,
}

/// Directed graph with at most one signed arc per ordered vertex pair.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SignedInteractionGraph {
    vertices: Vec<String>,
    arcs: BTreeMap<(VarId, VarId), Sign>,
}

impl SignedInteractionGraph {
    pub fn new(vertices: Vec<String>) -> Self {
        SignedInteractionGraph {
            vertices,
            arcs: BTreeMap::new(),
        }
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn insert(&mut self, src: VarId, dst: VarId, sign: Sign) {
        self.arcs.insert((src, dst), sign);
    }

    pub fn sign(&self, src: VarId, dst: VarId) -> Option<Sign> {
        self.arcs.get(&(src, dst)).copied()
    }

    /// Arcs ordered by (source, target) index.
    pub fn arcs(&self) -> impl Iterator<Item = (VarId, VarId, Sign)> + '_ {
        self.arcs.iter().map(|(&(a, b), &s)| (a, b, s))
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Arcs as `src->dst:sign` strings, e.g. `x->y:+`.
    pub fn arc_labels(&self) -> Vec<String> {
        self.arcs()
            .map(|(a, b, s)| format!("{}->{}:{}", self.vertices[a], self.vertices[b], s))
            .collect()
    }

    pub fn unsigned(&self) -> InteractionGraph {
        InteractionGraph {
            vertices: self.vertices.clone(),
            arcs: self.arcs.keys().copied().collect(),
        }
    }
}

impl Serialize for SignedInteractionGraph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            vertices: &'a [String],
            arcs: Vec<Arc>,
        }
        Repr {
            vertices: &self.vertices,
            arcs: self
                .arcs()
                .map(|(a, b, sign)| Arc {
                    src: self.vertices[a].clone(),
                    dst: self.vertices[b].clone(),
                    sign,
                })
                .collect(),
        }
        .serialize(s)
    }
}

/// Unsigned directed graph.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct InteractionGraph {
    pub vertices: Vec<String>,
    pub arcs: BTreeSet<(VarId, VarId)>,
}

impl InteractionGraph {
    pub fn arc_labels(&self) -> Vec<String> {
        self.arcs
            .iter()
            .map(|&(a, b)| format!("{}->{}", self.vertices[a], self.vertices[b]))
            .collect()
    }
}

/// Interaction graph of a network. There is an arc `i -> j` when raising
/// `i` by one step changes the update of `j` in some state; it is `+` when
/// no such step lowers the update, `-` when none raises it, `±` otherwise.
pub fn interaction_graph<D: Dynamics + ?Sized>(
    d: &D,
    cap: usize,
) -> Result<SignedInteractionGraph> {
    let radices = d.radices();
    let space = StateSpace::new(radices.clone(), cap)?;
    let n = radices.len();
    let mut g = SignedInteractionGraph::new(d.var_names());
    let rows: Vec<Vec<(bool, bool)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut flags = vec![(false, false); n];
            let mut state = vec![0; n];
            for idx in 0..space.len() {
                space.decode_into(idx, &mut state);
                if state[i] + 1 >= radices[i] {
                    continue;
                }
                let mut up = state.clone();
                up[i] += 1;
                for (j, flag) in flags.iter_mut().enumerate() {
                    let (a, b) = (d.update(j, &state), d.update(j, &up));
                    flag.0 |= a < b;
                    flag.1 |= a > b;
                }
            }
            flags
        })
        .collect();
    for (i, row) in rows.iter().enumerate() {
        for (j, &(inc, dec)) in row.iter().enumerate() {
            let sign = match (inc, dec) {
                (false, false) => continue,
                (true, false) => Sign::Positive,
                (false, true) => Sign::Negative,
                (true, true) => Sign::Both,
            };
            g.insert(i, j, sign);
        }
    }
    Ok(g)
}

/// Quotient of a Boolean interaction graph by the supports: `y_i -> y_j`
/// whenever some variable of the support of `y_i` acts on some variable of
/// the support of `y_j`.
pub fn sig(bigs: &SignedInteractionGraph, supports: &SupportMap) -> Result<InteractionGraph> {
    if bigs.vertices().len() != supports.num_bool() {
        return Err(Error::spec(format!(
            "graph has {} vertices, the supports cover {}",
            bigs.vertices().len(),
            supports.num_bool()
        )));
    }
    Ok(InteractionGraph {
        vertices: supports.mv_names().to_vec(),
        arcs: bigs
            .arcs()
            .map(|(a, b, _)| (supports.owner(a), supports.owner(b)))
            .collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsomorphismReport {
    pub isomorphic: bool,
    /// Arcs of the integer graph absent from the quotient.
    pub missing: Vec<String>,
    /// Arcs of the quotient absent from the integer graph.
    pub extra: Vec<String>,
}

/// Compares the unsigned integer interaction graph with the support
/// quotient under the map sending each support to its integer variable.
pub fn compare_migs_sig(
    migs: &SignedInteractionGraph,
    sig: &InteractionGraph,
) -> IsomorphismReport {
    let m = migs.unsigned();
    let label = |&(a, b): &(VarId, VarId)| format!("{}->{}", m.vertices[a], m.vertices[b]);
    let missing: Vec<String> = m.arcs.difference(&sig.arcs).map(label).collect();
    let extra: Vec<String> = sig.arcs.difference(&m.arcs).map(label).collect();
    IsomorphismReport {
        isomorphic: missing.is_empty() && extra.is_empty() && m.vertices == sig.vertices,
        missing,
        extra,
    }
}

pub fn check_migs_sig_isomorphic<N, B>(
    net: &N,
    bn: &B,
    supports: &SupportMap,
    cap: usize,
) -> Result<IsomorphismReport>
where
    N: Dynamics + ?Sized,
    B: Dynamics + ?Sized,
{
    let migs = interaction_graph(net, cap)?;
    let bigs = interaction_graph(bn, cap)?;
    Ok(compare_migs_sig(&migs, &sig(&bigs, supports)?))
}

/// Recovers the signed integer interaction graph from a Boolean one. Arcs
/// come from the support quotient; the sign of `y_i -> y_j` is the common
/// sign of the arcs between markers of the two supports.
pub fn recover_migs(
    bigs: &SignedInteractionGraph,
    supports: &SupportMap,
    markers: &BTreeSet<VarId>,
) -> Result<SignedInteractionGraph> {
    let quotient = sig(bigs, supports)?;
    let marked: Vec<Vec<VarId>> = supports
        .supports()
        .iter()
        .map(|s| s.iter().copied().filter(|b| markers.contains(b)).collect())
        .collect();
    if let Some(i) = marked.iter().position(|m| m.is_empty()) {
        return Err(Error::MarkerCoverage(supports.mv_names()[i].clone()));
    }
    let names = supports.mv_names();
    let mut out = SignedInteractionGraph::new(names.to_vec());
    for &(i, j) in &quotient.arcs {
        let signs: BTreeSet<Sign> = marked[i]
            .iter()
            .flat_map(|&a| marked[j].iter().filter_map(move |&b| bigs.sign(a, b)))
            .collect();
        let mut it = signs.iter();
        match (it.next(), it.next()) {
            (None, _) => return Err(Error::SignUnrecoverable(names[i].clone(), names[j].clone())),
            (Some(&s), None) => out.insert(i, j, s),
            (Some(_), Some(_)) => {
                return Err(Error::ConflictingSigns(names[i].clone(), names[j].clone()))
            }
        }
    }
    Ok(out)
}
