//! Explicit labelled transition systems, attractors and reachability.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    BState, BooleanNetwork, Level, Modality, Mode, MvNetwork, MvState, StateSpace, VarId,
};

/// Deterministic per-variable update functions over a finite state space.
pub trait Dynamics: Sync {
    /// Number of values of each variable.
    fn radices(&self) -> Vec<u32>;
    fn var_names(&self) -> Vec<String>;
    /// Next value of `var` from a total state.
    fn update(&self, var: VarId, state: &[Level]) -> Level;
}

impl Dynamics for MvNetwork {
    fn radices(&self) -> Vec<u32> {
        self.variables().iter().map(|v| v.max_level + 1).collect()
    }

    fn var_names(&self) -> Vec<String> {
        self.names()
    }

    fn update(&self, var: VarId, state: &[Level]) -> Level {
        self.step_level(var, state)
    }
}

impl Dynamics for BooleanNetwork {
    fn radices(&self) -> Vec<u32> {
        vec![2; self.len()]
    }

    fn var_names(&self) -> Vec<String> {
        self.names().to_vec()
    }

    fn update(&self, var: VarId, state: &[Level]) -> Level {
        self.formula(var).eval_with(&|v| state[v] != 0) as Level
    }
}

/// Applies one modality: variables in `m` take their updated value, the
/// others keep theirs.
pub fn apply_modality<D: Dynamics + ?Sized>(d: &D, state: &[Level], m: &Modality) -> Vec<Level> {
    let mut next = state.to_vec();
    for &v in m.vars() {
        next[v] = d.update(v, state);
    }
    next
}

pub fn mv_step(net: &MvNetwork, s: &MvState, m: &Modality) -> Result<MvState> {
    check_step_args(net.len(), s.0.len(), m)?;
    Ok(MvState(apply_modality(net, &s.0, m)))
}

pub fn bool_step(bn: &BooleanNetwork, w: &BState, m: &Modality) -> Result<BState> {
    check_step_args(bn.len(), w.0.len(), m)?;
    Ok(BState::from_levels(&apply_modality(bn, &w.to_levels(), m)))
}

fn check_step_args(n: usize, len: usize, m: &Modality) -> Result<()> {
    if len != n {
        return Err(Error::spec(format!(
            "state has {len} values for {n} variables"
        )));
    }
    if let Some(&v) = m.vars().iter().find(|&&v| v >= n) {
        return Err(Error::spec(format!(
            "modality references unknown variable #{v}"
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttractorKind {
    StableState,
    Cyclic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Attractor {
    /// State indices in increasing order.
    pub states: Vec<usize>,
    pub kind: AttractorKind,
}

/// Labelled transition system over an enumerated state space, with exactly
/// one successor per (state, modality).
#[derive(Clone, Debug)]
pub struct TransitionSystem {
    space: StateSpace,
    var_names: Vec<String>,
    modalities: Vec<Modality>,
    labels: Vec<String>,
    succ: Vec<u32>,
    reduced: bool,
    in_domain: Option<Vec<bool>>,
}

/// Enumerates every state and its successor under each modality. When
/// `restrict` is given, every state is still built and the predicate is
/// only recorded as a flag.
pub fn build_sts<D: Dynamics + ?Sized>(
    d: &D,
    mode: &Mode,
    restrict: Option<&(dyn Fn(&[Level]) -> bool + Sync)>,
    cap: usize,
) -> Result<TransitionSystem> {
    let space = StateSpace::new(d.radices(), cap)?;
    let names = d.var_names();
    let modalities = mode.modalities().to_vec();
    if let Some(m) = modalities
        .iter()
        .find(|m| m.vars().iter().any(|&v| v >= names.len()))
    {
        return Err(Error::spec(format!(
            "modality {:?} references unknown variables",
            m.vars()
        )));
    }
    let k = modalities.len();
    let rows: Vec<(Vec<u32>, bool)> = (0..space.len())
        .into_par_iter()
        .map_init(
            || vec![0; space.dims()],
            |state, idx| {
                space.decode_into(idx, state);
                let row = modalities
                    .iter()
                    .map(|m| space.index_of(&apply_modality(d, state, m)) as u32)
                    .collect();
                let flag = restrict.is_none_or(|p| p(state));
                (row, flag)
            },
        )
        .collect();
    let mut succ = Vec::with_capacity(space.len() * k);
    let mut flags = Vec::with_capacity(space.len());
    for (row, flag) in rows {
        succ.extend(row);
        flags.push(flag);
    }
    Ok(TransitionSystem {
        labels: modalities.iter().map(|m| m.label(&names)).collect(),
        var_names: names,
        modalities,
        space,
        succ,
        reduced: false,
        in_domain: restrict.map(|_| flags),
    })
}

impl TransitionSystem {
    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn modalities(&self) -> &[Modality] {
        &self.modalities
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn in_domain(&self, s: usize) -> bool {
        self.in_domain.as_ref().is_none_or(|f| f[s])
    }

    pub fn has_domain(&self) -> bool {
        self.in_domain.is_some()
    }

    pub fn state_label(&self, s: usize) -> String {
        self.space.label(s)
    }

    /// Target of the `m`-transition from `s`, including self-loops.
    pub fn successor(&self, s: usize, m: usize) -> usize {
        self.succ[s * self.modalities.len() + m] as usize
    }

    /// Whether the transition `(s, m)` is part of this view.
    pub fn has_transition(&self, s: usize, m: usize) -> bool {
        !self.reduced || self.successor(s, m) != s
    }

    /// Transitions `(src, modality, dst)` in state-index then modality order.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let k = self.modalities.len();
        (0..self.len()).flat_map(move |s| {
            (0..k).filter_map(move |m| {
                let t = self.successor(s, m);
                (!self.reduced || t != s).then_some((s, m, t))
            })
        })
    }

    pub fn transition_count(&self) -> usize {
        self.transitions().count()
    }

    /// Distinct successors of `s` in this view.
    pub fn successors(&self, s: usize) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.modalities.len())
            .filter(|&m| self.has_transition(s, m))
            .map(|m| self.successor(s, m))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// View without self-loops; the states are unchanged.
    pub fn reflexive_reduction(&self) -> TransitionSystem {
        let mut out = self.clone();
        out.reduced = true;
        out
    }

    pub fn attractors(&self) -> Vec<Attractor> {
        let sccs = tarjan(self);
        let mut comp = vec![usize::MAX; self.len()];
        for (c, members) in sccs.iter().enumerate() {
            for &s in members {
                comp[s] = c;
            }
        }
        let mut out: Vec<Attractor> = sccs
            .iter()
            .enumerate()
            .filter(|(c, members)| {
                members
                    .iter()
                    .all(|&s| (0..self.modalities.len()).all(|m| comp[self.successor(s, m)] == *c))
            })
            .map(|(_, members)| {
                let mut states = members.clone();
                states.sort_unstable();
                Attractor {
                    kind: if states.len() == 1 {
                        AttractorKind::StableState
                    } else {
                        AttractorKind::Cyclic
                    },
                    states,
                }
            })
            .collect();
        out.sort_by_key(|a| a.states[0]);
        out
    }

    /// States from which some state satisfying `target` is reachable.
    pub fn can_reach(&self, target: impl Fn(usize) -> bool) -> Vec<bool> {
        let n = self.len();
        let mut preds: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (s, _, t) in self.transitions() {
            if s != t {
                preds[t].push(s as u32);
            }
        }
        let mut seen = vec![false; n];
        let mut queue: VecDeque<usize> = (0..n).filter(|&s| target(s)).collect();
        for &s in &queue {
            seen[s] = true;
        }
        while let Some(t) = queue.pop_front() {
            for &p in &preds[t] {
                let p = p as usize;
                if !seen[p] {
                    seen[p] = true;
                    queue.push_back(p);
                }
            }
        }
        seen
    }

    /// States reachable from `start`.
    pub fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(s) = queue.pop_front() {
            for t in self.successors(s) {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        seen
    }
}

/// Iterative Tarjan; components are returned in completion order.
fn tarjan(ts: &TransitionSystem) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = ts.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut next = 0;
    let adj: Vec<Vec<usize>> = (0..n).map(|s| ts.successors(s)).collect();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    out.push(comp);
                }
            }
        }
    }
    out
}

pub fn attractors(ts: &TransitionSystem) -> Vec<Attractor> {
    ts.attractors()
}

pub fn reflexive_reduction(ts: &TransitionSystem) -> TransitionSystem {
    ts.reflexive_reduction()
}
