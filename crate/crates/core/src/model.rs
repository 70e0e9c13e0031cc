//! Domain types shared by every stage of the pipeline: multi-valued
//! variables and their guarded rules, states, modes, supports and Boolean
//! networks.
//!
//! Variables are referred to by their index in the owning network
//! ([`VarId`]). States are dense vectors indexed the same way, so a state of
//! a network with `n` variables is always a slice of length `n`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::Dnf;

pub type Level = u32;
pub type VarId = usize;

/// Default bound on the number of explicitly enumerated states.
pub const DEFAULT_CAP: usize = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    /// Levels range over `0..=max_level`.
    pub max_level: Level,
}

impl Variable {
    pub fn new(name: impl Into<String>, max_level: Level) -> Self {
        Variable {
            name: name.into(),
            max_level,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn apply(self, lhs: Level, rhs: Level) -> bool {
        match self {
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

/// Guard of a rule: comparisons between a variable and a constant, closed
/// under conjunction, disjunction and negation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Guard {
    Const(bool),
    Atom { var: VarId, op: CmpOp, value: Level },
    Not(Box<Guard>),
    And(Vec<Guard>),
    Or(Vec<Guard>),
}

impl Guard {
    pub fn atom(var: VarId, op: CmpOp, value: Level) -> Self {
        Guard::Atom { var, op, value }
    }

    /// Conjunction; a single operand is returned unchanged.
    pub fn all(mut parts: Vec<Guard>) -> Self {
        match parts.len() {
            0 => Guard::Const(true),
            1 => parts.pop().unwrap(),
            _ => Guard::And(parts),
        }
    }

    /// Disjunction; a single operand is returned unchanged.
    pub fn any(mut parts: Vec<Guard>) -> Self {
        match parts.len() {
            0 => Guard::Const(false),
            1 => parts.pop().unwrap(),
            _ => Guard::Or(parts),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Guard) -> Self {
        Guard::Not(Box::new(inner))
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<VarId>) {
        match self {
            Guard::Const(_) => {}
            Guard::Atom { var, .. } => {
                out.insert(*var);
            }
            Guard::Not(inner) => inner.collect_vars(out),
            Guard::And(parts) | Guard::Or(parts) => {
                parts.iter().for_each(|p| p.collect_vars(out));
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    /// Evaluates the guard, reporting atoms over variables missing from `state`.
    pub fn eval(&self, state: &[Level]) -> Result<bool> {
        Ok(match self {
            Guard::Const(b) => *b,
            Guard::Atom { var, op, value } => {
                let current = state.get(*var).ok_or_else(|| {
                    Error::spec(format!("guard references unbound variable #{var}"))
                })?;
                op.apply(*current, *value)
            }
            Guard::Not(inner) => !inner.eval(state)?,
            Guard::And(parts) => {
                for p in parts {
                    if !p.eval(state)? {
                        return Ok(false);
                    }
                }
                true
            }
            Guard::Or(parts) => {
                for p in parts {
                    if p.eval(state)? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }

    /// Evaluation for states already known to be total. Panics otherwise.
    pub(crate) fn holds(&self, state: &[Level]) -> bool {
        match self {
            Guard::Const(b) => *b,
            Guard::Atom { var, op, value } => op.apply(state[*var], *value),
            Guard::Not(inner) => !inner.holds(state),
            Guard::And(parts) => parts.iter().all(|p| p.holds(state)),
            Guard::Or(parts) => parts.iter().any(|p| p.holds(state)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub target: Level,
    pub guard: Guard,
}

impl Rule {
    pub fn new(target: Level, guard: Guard) -> Self {
        Rule { target, guard }
    }
}

/// A total integer state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MvState(pub Vec<Level>);

/// A total Boolean state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BState(pub Vec<bool>);

impl BState {
    /// Parses a bit string such as `"0111"`.
    pub fn from_bits(bits: &str) -> Result<Self> {
        bits.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::spec(format!("invalid bit `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BState)
    }

    pub fn to_levels(&self) -> Vec<Level> {
        self.0.iter().map(|&b| b as Level).collect()
    }

    pub fn from_levels(levels: &[Level]) -> Self {
        BState(levels.iter().map(|&l| l != 0).collect())
    }
}

impl fmt::Display for BState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Multi-valued network: each variable is updated to the target level of
/// its first rule (in declaration order) whose guard holds, or to 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MvNetwork {
    name: String,
    variables: Vec<Variable>,
    rules: Vec<Vec<Rule>>,
}

impl MvNetwork {
    pub fn new(
        name: impl Into<String>,
        variables: Vec<Variable>,
        rules: Vec<Vec<Rule>>,
    ) -> Result<Self> {
        if rules.len() != variables.len() {
            return Err(Error::spec(format!(
                "{} rule lists for {} variables",
                rules.len(),
                variables.len()
            )));
        }
        let mut seen = HashSet::new();
        for v in &variables {
            if v.max_level < 1 {
                return Err(Error::spec(format!(
                    "variable `{}` must have a maximal level of at least 1",
                    v.name
                )));
            }
            if !seen.insert(v.name.as_str()) {
                return Err(Error::spec(format!("duplicate variable `{}`", v.name)));
            }
        }
        for (owner, list) in variables.iter().zip(&rules) {
            for rule in list {
                if rule.target == 0 {
                    return Err(Error::spec(format!(
                        "level-0 rule head for `{}` (level 0 is the implicit default)",
                        owner.name
                    )));
                }
                if rule.target > owner.max_level {
                    return Err(Error::spec(format!(
                        "rule target {} exceeds the maximal level {} of `{}`",
                        rule.target, owner.max_level, owner.name
                    )));
                }
                check_guard(&rule.guard, &variables)?;
            }
        }
        Ok(MvNetwork {
            name: name.into(),
            variables,
            rules,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn rules(&self, var: VarId) -> &[Rule] {
        &self.rules[var]
    }

    pub fn var_index(&self, name: &str) -> Option<VarId> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn names(&self) -> Vec<String> {
        self.variables.iter().map(|v| v.name.clone()).collect()
    }

    pub fn max_levels(&self) -> Vec<Level> {
        self.variables.iter().map(|v| v.max_level).collect()
    }

    /// Next level of `var` from a state known to be total.
    pub(crate) fn step_level(&self, var: VarId, state: &[Level]) -> Level {
        self.rules[var]
            .iter()
            .find(|r| r.guard.holds(state))
            .map_or(0, |r| r.target)
    }

    pub fn state_space(&self, cap: usize) -> Result<StateSpace> {
        StateSpace::new(
            self.variables.iter().map(|v| v.max_level + 1).collect(),
            cap,
        )
    }
}

fn check_guard(guard: &Guard, variables: &[Variable]) -> Result<()> {
    match guard {
        Guard::Const(_) => Ok(()),
        Guard::Atom { var, value, .. } => {
            let v = variables.get(*var).ok_or_else(|| {
                Error::spec(format!("guard references undeclared variable #{var}"))
            })?;
            if *value > v.max_level {
                return Err(Error::spec(format!(
                    "constant {value} out of range 0..{} of `{}`",
                    v.max_level, v.name
                )));
            }
            Ok(())
        }
        Guard::Not(inner) => check_guard(inner, variables),
        Guard::And(parts) | Guard::Or(parts) => {
            parts.iter().try_for_each(|p| check_guard(p, variables))
        }
    }
}

pub fn eval_guard(guard: &Guard, state: &MvState) -> Result<bool> {
    guard.eval(&state.0)
}

/// Level reached by `var` when updated from `state`.
pub fn local_step(net: &MvNetwork, var: VarId, state: &MvState) -> Result<Level> {
    if var >= net.len() {
        return Err(Error::spec(format!("unknown variable #{var}")));
    }
    if state.0.len() != net.len() {
        return Err(Error::spec(format!(
            "state has {} values for {} variables",
            state.0.len(),
            net.len()
        )));
    }
    for rule in net.rules(var) {
        if rule.guard.eval(&state.0)? {
            return Ok(rule.target);
        }
    }
    Ok(0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepViolation {
    pub variable: String,
    pub state: MvState,
    pub next_level: Level,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnitaryReport {
    pub unitary: bool,
    pub violations: Vec<StepViolation>,
}

/// Checks that no update moves a variable by more than one level. All
/// violations are reported, in state-index order.
pub fn is_unitary_stepwise(net: &MvNetwork, cap: usize) -> Result<UnitaryReport> {
    let space = net.state_space(cap)?;
    let mut state = vec![0; net.len()];
    let mut violations = Vec::new();
    for idx in 0..space.len() {
        space.decode_into(idx, &mut state);
        for var in 0..net.len() {
            let next = net.step_level(var, &state);
            if next.abs_diff(state[var]) > 1 {
                violations.push(StepViolation {
                    variable: net.variables[var].name.clone(),
                    state: MvState(state.clone()),
                    next_level: next,
                });
            }
        }
    }
    Ok(UnitaryReport {
        unitary: violations.is_empty(),
        violations,
    })
}

/// Mixed-radix enumeration of a finite state space; the first variable is
/// the most significant digit, so indices follow lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSpace {
    radices: Vec<u32>,
    len: usize,
}

impl StateSpace {
    pub fn new(radices: Vec<u32>, cap: usize) -> Result<Self> {
        let total = radices
            .iter()
            .try_fold(1u128, |acc, &r| acc.checked_mul(r as u128));
        let within = matches!(total, Some(t) if t <= cap as u128 && t <= u32::MAX as u128);
        if !within {
            let product = if radices.is_empty() {
                "1".to_string()
            } else {
                radices
                    .iter()
                    .map(|r| r.to_string())
                    .collect::<Vec<_>>()
                    .join(" x ")
            };
            return Err(Error::Capacity {
                product,
                states: total.unwrap_or(u128::MAX),
                cap,
            });
        }
        Ok(StateSpace {
            radices,
            len: total.unwrap() as usize,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn radices(&self) -> &[u32] {
        &self.radices
    }

    pub fn dims(&self) -> usize {
        self.radices.len()
    }

    pub fn index_of(&self, state: &[Level]) -> usize {
        state
            .iter()
            .zip(&self.radices)
            .fold(0usize, |acc, (&v, &r)| acc * r as usize + v as usize)
    }

    pub fn decode_into(&self, mut idx: usize, out: &mut [Level]) {
        for (slot, &r) in out.iter_mut().zip(&self.radices).rev() {
            *slot = (idx % r as usize) as Level;
            idx /= r as usize;
        }
    }

    pub fn state(&self, idx: usize) -> Vec<Level> {
        let mut out = vec![0; self.radices.len()];
        self.decode_into(idx, &mut out);
        out
    }

    /// Compact label: concatenated digits, comma separated when a digit may
    /// need more than one character.
    pub fn label(&self, idx: usize) -> String {
        let state = self.state(idx);
        if self.radices.iter().any(|&r| r > 10) {
            state
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",")
        } else {
            state.iter().map(|v| v.to_string()).collect()
        }
    }
}

/// A set of variables updated jointly in one transition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Modality(Vec<VarId>);

impl Modality {
    pub fn new(vars: impl IntoIterator<Item = VarId>) -> Result<Self> {
        let set: BTreeSet<VarId> = vars.into_iter().collect();
        if set.is_empty() {
            return Err(Error::spec("empty modality"));
        }
        Ok(Modality(set.into_iter().collect()))
    }

    pub fn single(var: VarId) -> Self {
        Modality(vec![var])
    }

    pub fn vars(&self) -> &[VarId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, var: VarId) -> bool {
        self.0.binary_search(&var).is_ok()
    }

    pub fn is_subset_of(&self, other: &[VarId]) -> bool {
        self.0.iter().all(|v| other.contains(v))
    }

    pub fn label(&self, names: &[String]) -> String {
        self.0
            .iter()
            .map(|&v| names[v].as_str())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Organisation of joint updates: a list of modalities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mode {
    modalities: Vec<Modality>,
}

impl Mode {
    pub fn new(num_vars: usize, modalities: Vec<Modality>) -> Result<Self> {
        let mut seen = HashSet::new();
        for m in &modalities {
            if m.is_empty() {
                return Err(Error::spec("empty modality"));
            }
            if let Some(&v) = m.vars().iter().find(|&&v| v >= num_vars) {
                return Err(Error::spec(format!(
                    "modality references unknown variable #{v}"
                )));
            }
            if !seen.insert(m.clone()) {
                return Err(Error::spec("duplicate modality in mode"));
            }
        }
        Ok(Mode { modalities })
    }

    pub fn asynchronous(num_vars: usize) -> Self {
        Mode {
            modalities: (0..num_vars).map(Modality::single).collect(),
        }
    }

    pub fn synchronous(num_vars: usize) -> Self {
        Mode {
            modalities: if num_vars == 0 {
                Vec::new()
            } else {
                vec![Modality((0..num_vars).collect())]
            },
        }
    }

    /// One modality per support.
    pub fn parallel_support(supports: &SupportMap) -> Self {
        Mode {
            modalities: supports
                .supports()
                .iter()
                .filter(|s| !s.is_empty())
                .map(|s| Modality(s.clone()))
                .collect(),
        }
    }

    pub fn modalities(&self) -> &[Modality] {
        &self.modalities
    }

    pub fn len(&self) -> usize {
        self.modalities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modalities.is_empty()
    }

    pub fn max_modality_size(&self) -> usize {
        self.modalities.iter().map(Modality::len).max().unwrap_or(0)
    }

    /// Every modality lies inside a single support.
    pub fn is_local_to(&self, supports: &SupportMap) -> bool {
        self.modalities.iter().all(|m| {
            let owner = supports.owner(m.vars()[0]);
            m.vars().iter().all(|&v| supports.owner(v) == owner)
        })
    }

    pub fn labels(&self, names: &[String]) -> Vec<String> {
        self.modalities.iter().map(|m| m.label(names)).collect()
    }
}

/// Partition of the Boolean variables into the supports of the integer
/// variables. Within a support, bit `k` (0-based here, `k + 1` in names) is
/// ordered from the most significant position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportMap {
    mv_names: Vec<String>,
    bool_names: Vec<String>,
    supports: Vec<Vec<VarId>>,
    owner: Vec<(VarId, usize)>,
}

impl SupportMap {
    pub fn new(
        mv_names: Vec<String>,
        bool_names: Vec<String>,
        supports: Vec<Vec<VarId>>,
    ) -> Result<Self> {
        if mv_names.len() != supports.len() {
            return Err(Error::spec("one support is required per integer variable"));
        }
        let mut owner = vec![None; bool_names.len()];
        for (i, support) in supports.iter().enumerate() {
            if support.is_empty() {
                return Err(Error::spec(format!(
                    "variable `{}` has an empty support",
                    mv_names[i]
                )));
            }
            for (k, &b) in support.iter().enumerate() {
                let slot = owner.get_mut(b).ok_or_else(|| {
                    Error::spec(format!(
                        "support of `{}` references unknown bit #{b}",
                        mv_names[i]
                    ))
                })?;
                if slot.is_some() {
                    return Err(Error::spec(format!(
                        "Boolean variable `{}` belongs to two supports",
                        bool_names[b]
                    )));
                }
                *slot = Some((i, k));
            }
        }
        let owner = owner
            .into_iter()
            .enumerate()
            .map(|(b, o)| {
                o.ok_or_else(|| {
                    Error::spec(format!(
                        "Boolean variable `{}` belongs to no support",
                        bool_names[b]
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut unique = HashSet::new();
        if let Some(dup) = bool_names.iter().find(|n| !unique.insert(n.as_str())) {
            return Err(Error::spec(format!("duplicate Boolean variable `{dup}`")));
        }
        Ok(SupportMap {
            mv_names,
            bool_names,
            supports,
            owner,
        })
    }

    /// Contiguous supports named `<var>_<k>`, `k` counted from 1.
    pub fn with_sizes(mv_names: &[String], sizes: &[usize]) -> Result<Self> {
        let mut bool_names = Vec::new();
        let mut supports = Vec::new();
        for (name, &size) in mv_names.iter().zip(sizes) {
            let start = bool_names.len();
            bool_names.extend((1..=size).map(|k| support_var_name(name, k)));
            supports.push((start..start + size).collect());
        }
        SupportMap::new(mv_names.to_vec(), bool_names, supports)
    }

    /// Matches Boolean variable names against the `<var>_<k>` convention for
    /// the given integer variables and support sizes.
    pub fn resolve(mv_names: &[String], sizes: &[usize], bool_names: &[String]) -> Result<Self> {
        let index: BTreeMap<&str, VarId> = bool_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let mut supports = Vec::new();
        for (name, &size) in mv_names.iter().zip(sizes) {
            let support = (1..=size)
                .map(|k| {
                    let expected = support_var_name(name, k);
                    index.get(expected.as_str()).copied().ok_or_else(|| {
                        Error::spec(format!("missing Boolean variable `{expected}`"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            supports.push(support);
        }
        SupportMap::new(mv_names.to_vec(), bool_names.to_vec(), supports)
    }

    /// Groups Boolean variables by stripping a trailing `_<k>`; names without
    /// such a suffix form singleton supports.
    pub fn infer(bool_names: &[String]) -> Result<Self> {
        let mut groups: Vec<(String, Vec<(usize, VarId)>)> = Vec::new();
        for (b, name) in bool_names.iter().enumerate() {
            let (base, k) = match name.rsplit_once('_') {
                Some((base, k)) if !base.is_empty() && k.parse::<usize>().is_ok_and(|k| k >= 1) => {
                    (base.to_string(), k.parse::<usize>().unwrap())
                }
                _ => (name.clone(), 1),
            };
            match groups.iter_mut().find(|(g, _)| *g == base) {
                Some((_, members)) => members.push((k, b)),
                None => groups.push((base, vec![(k, b)])),
            }
        }
        let mut mv_names = Vec::new();
        let mut supports = Vec::new();
        for (base, mut members) in groups {
            members.sort();
            mv_names.push(base);
            supports.push(members.into_iter().map(|(_, b)| b).collect());
        }
        SupportMap::new(mv_names, bool_names.to_vec(), supports)
    }

    pub fn mv_names(&self) -> &[String] {
        &self.mv_names
    }

    pub fn bool_names(&self) -> &[String] {
        &self.bool_names
    }

    pub fn supports(&self) -> &[Vec<VarId>] {
        &self.supports
    }

    pub fn support(&self, var: VarId) -> &[VarId] {
        &self.supports[var]
    }

    pub fn num_bool(&self) -> usize {
        self.bool_names.len()
    }

    pub fn num_mv(&self) -> usize {
        self.mv_names.len()
    }

    /// Integer variable owning a Boolean variable.
    pub fn owner(&self, bit: VarId) -> VarId {
        self.owner[bit].0
    }

    /// Position of a Boolean variable inside its support (0-based).
    pub fn position(&self, bit: VarId) -> usize {
        self.owner[bit].1
    }
}

pub fn support_var_name(var: &str, k: usize) -> String {
    format!("{var}_{k}")
}

/// Boolean network over the supports of integer variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BooleanNetwork {
    supports: SupportMap,
    formulas: Vec<Dnf>,
    mode: Mode,
}

impl BooleanNetwork {
    pub fn new(supports: SupportMap, formulas: Vec<Dnf>, mode: Mode) -> Result<Self> {
        let n = supports.num_bool();
        if formulas.len() != n {
            return Err(Error::spec(format!(
                "{} formulas for {} Boolean variables",
                formulas.len(),
                n
            )));
        }
        for (name, f) in supports.bool_names().iter().zip(&formulas) {
            if let Some(v) = f.vars().into_iter().find(|&v| v >= n) {
                return Err(Error::spec(format!(
                    "formula of `{name}` references undeclared variable #{v}"
                )));
            }
        }
        Mode::new(n, mode.modalities().to_vec())?;
        Ok(BooleanNetwork {
            supports,
            formulas,
            mode,
        })
    }

    pub fn supports(&self) -> &SupportMap {
        &self.supports
    }

    pub fn formulas(&self) -> &[Dnf] {
        &self.formulas
    }

    pub fn formula(&self, bit: VarId) -> &Dnf {
        &self.formulas[bit]
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    pub fn names(&self) -> &[String] {
        self.supports.bool_names()
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn var_index(&self, name: &str) -> Option<VarId> {
        self.names().iter().position(|n| n == name)
    }

    pub fn with_mode(&self, mode: Mode) -> Result<Self> {
        BooleanNetwork::new(self.supports.clone(), self.formulas.clone(), mode)
    }

    pub fn with_formula(&self, bit: VarId, formula: Dnf) -> Result<Self> {
        let mut formulas = self.formulas.clone();
        formulas[bit] = formula;
        BooleanNetwork::new(self.supports.clone(), formulas, self.mode.clone())
    }

    pub fn state_space(&self, cap: usize) -> Result<StateSpace> {
        StateSpace::new(vec![2; self.len()], cap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::FIG1;
    use crate::io::parse_mvnet;

    fn state(net: &MvNetwork, pairs: &[(&str, Level)]) -> MvState {
        let mut s = vec![0; net.len()];
        for (name, v) in pairs {
            s[net.var_index(name).unwrap()] = *v;
        }
        MvState(s)
    }

    #[test]
    fn guard_evaluation() {
        let net = parse_mvnet(FIG1).unwrap();
        let x = net.var_index("x").unwrap();
        let y = net.var_index("y").unwrap();
        let g = Guard::all(vec![
            Guard::atom(x, CmpOp::Eq, 1),
            Guard::atom(y, CmpOp::Ge, 2),
        ]);
        assert!(eval_guard(&g, &state(&net, &[("x", 1), ("y", 2)])).unwrap());
        assert!(eval_guard(&Guard::Const(true), &state(&net, &[("y", 3)])).unwrap());
        let g = Guard::all(vec![
            Guard::atom(x, CmpOp::Eq, 0),
            Guard::atom(y, CmpOp::Eq, 3),
        ]);
        assert!(!eval_guard(&g, &state(&net, &[("x", 1), ("y", 3)])).unwrap());
    }

    #[test]
    fn unbound_variable_is_reported() {
        let g = Guard::atom(4, CmpOp::Eq, 0);
        assert!(matches!(
            eval_guard(&g, &MvState(vec![0, 0])),
            Err(Error::Spec(_))
        ));
    }

    #[test]
    fn first_matching_rule_wins() {
        let net = parse_mvnet(FIG1).unwrap();
        let y = net.var_index("y").unwrap();
        let x = net.var_index("x").unwrap();
        assert_eq!(
            local_step(&net, y, &state(&net, &[("x", 1), ("y", 0)])).unwrap(),
            1
        );
        assert_eq!(
            local_step(&net, y, &state(&net, &[("x", 0), ("y", 0)])).unwrap(),
            0
        );
        assert_eq!(
            local_step(&net, x, &state(&net, &[("x", 0), ("y", 3)])).unwrap(),
            1
        );
    }

    #[test]
    fn overlapping_rule_order_matters() {
        let vars = vec![Variable::new("a", 2)];
        let first = Rule::new(2, Guard::atom(0, CmpOp::Ge, 1));
        let second = Rule::new(1, Guard::atom(0, CmpOp::Le, 1));
        let ab =
            MvNetwork::new("n", vars.clone(), vec![vec![first.clone(), second.clone()]]).unwrap();
        let ba = MvNetwork::new("n", vars, vec![vec![second, first]]).unwrap();
        let s = MvState(vec![1]);
        assert_eq!(local_step(&ab, 0, &s).unwrap(), 2);
        assert_eq!(local_step(&ba, 0, &s).unwrap(), 1);
    }

    #[test]
    fn unitary_stepwise_examples() {
        let net = parse_mvnet(FIG1).unwrap();
        assert!(is_unitary_stepwise(&net, DEFAULT_CAP).unwrap().unitary);

        let jump = parse_mvnet("var y : 0..2; rules y: 2 <- y = 0;").unwrap();
        let report = is_unitary_stepwise(&jump, DEFAULT_CAP).unwrap();
        assert!(!report.unitary);
        assert_eq!(report.violations[0].state, MvState(vec![0]));
        assert_eq!(report.violations[0].variable, "y");

        let free = parse_mvnet("var y : 0..1;").unwrap();
        assert!(is_unitary_stepwise(&free, DEFAULT_CAP).unwrap().unitary);

        let free3 = parse_mvnet("var y : 0..3;").unwrap();
        let report = is_unitary_stepwise(&free3, DEFAULT_CAP).unwrap();
        assert!(!report.unitary);
        let states: Vec<_> = report.violations.iter().map(|v| v.state.clone()).collect();
        assert_eq!(states, vec![MvState(vec![2]), MvState(vec![3])]);
    }

    #[test]
    fn network_invariants_are_enforced() {
        let err = MvNetwork::new("n", vec![Variable::new("a", 0)], vec![vec![]]);
        assert!(err.is_err());
        let err = MvNetwork::new(
            "n",
            vec![Variable::new("a", 1)],
            vec![vec![Rule::new(0, Guard::Const(true))]],
        );
        assert!(err.is_err());
        let err = MvNetwork::new(
            "n",
            vec![Variable::new("a", 1)],
            vec![vec![Rule::new(1, Guard::atom(0, CmpOp::Eq, 2))]],
        );
        assert!(err.is_err());
    }

    #[test]
    fn state_space_order_is_lexicographic() {
        let space = StateSpace::new(vec![2, 4], DEFAULT_CAP).unwrap();
        assert_eq!(space.len(), 8);
        assert_eq!(space.state(5), vec![1, 1]);
        assert_eq!(space.index_of(&[1, 3]), 7);
        assert_eq!(space.label(3), "03");
        let err = StateSpace::new(vec![4; 20], 1000).unwrap_err();
        assert!(err.to_string().contains("4 x 4"));
    }

    #[test]
    fn modes_reject_empty_modalities() {
        assert!(Modality::new(Vec::<VarId>::new()).is_err());
        assert!(Mode::new(2, vec![Modality::single(3)]).is_err());
        assert_eq!(Mode::asynchronous(3).len(), 3);
        assert_eq!(Mode::synchronous(3).max_modality_size(), 3);
    }

    #[test]
    fn supports_partition_the_boolean_variables() {
        let names = vec!["x".to_string(), "y".to_string()];
        let map = SupportMap::with_sizes(&names, &[1, 3]).unwrap();
        assert_eq!(map.bool_names(), &["x_1", "y_1", "y_2", "y_3"]);
        assert_eq!(map.owner(2), 1);
        assert_eq!(map.position(3), 2);
        assert!(SupportMap::new(names.clone(), vec!["a".into()], vec![vec![0], vec![0]]).is_err());
        assert!(
            SupportMap::new(names, vec!["a".into(), "b".into()], vec![vec![0], vec![]]).is_err()
        );

        let inferred = SupportMap::infer(&["y_2".into(), "x_1".into(), "y_1".into()]).unwrap();
        assert_eq!(inferred.mv_names(), &["y", "x"]);
        assert_eq!(inferred.support(0), &[2, 0]);
    }
}
