//! Propositional formulas over Boolean variables: a general AST and a
//! canonical disjunctive normal form.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::VarId;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoolExpr {
    Const(bool),
    Var(VarId),
    Not(Box<BoolExpr>),
    And(Vec<BoolExpr>),
    Or(Vec<BoolExpr>),
}

impl BoolExpr {
    pub fn var(v: VarId) -> Self {
        BoolExpr::Var(v)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: BoolExpr) -> Self {
        BoolExpr::Not(Box::new(e))
    }

    pub fn and(mut parts: Vec<BoolExpr>) -> Self {
        match parts.len() {
            0 => BoolExpr::Const(true),
            1 => parts.pop().unwrap(),
            _ => BoolExpr::And(parts),
        }
    }

    pub fn or(mut parts: Vec<BoolExpr>) -> Self {
        match parts.len() {
            0 => BoolExpr::Const(false),
            1 => parts.pop().unwrap(),
            _ => BoolExpr::Or(parts),
        }
    }

    /// Conjunction of literals whose only model over `vars` is `values`.
    pub fn minterm(vars: &[VarId], values: &[bool]) -> Self {
        BoolExpr::and(
            vars.iter()
                .zip(values)
                .map(|(&v, &b)| {
                    if b {
                        BoolExpr::Var(v)
                    } else {
                        BoolExpr::not(BoolExpr::Var(v))
                    }
                })
                .collect(),
        )
    }

    pub fn eval_with(&self, value: &impl Fn(VarId) -> bool) -> bool {
        match self {
            BoolExpr::Const(b) => *b,
            BoolExpr::Var(v) => value(*v),
            BoolExpr::Not(e) => !e.eval_with(value),
            BoolExpr::And(parts) => parts.iter().all(|p| p.eval_with(value)),
            BoolExpr::Or(parts) => parts.iter().any(|p| p.eval_with(value)),
        }
    }

    pub fn eval(&self, state: &[bool]) -> bool {
        self.eval_with(&|v| state[v])
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        fn walk(e: &BoolExpr, out: &mut BTreeSet<VarId>) {
            match e {
                BoolExpr::Const(_) => {}
                BoolExpr::Var(v) => {
                    out.insert(*v);
                }
                BoolExpr::Not(inner) => walk(inner, out),
                BoolExpr::And(parts) | BoolExpr::Or(parts) => {
                    parts.iter().for_each(|p| walk(p, out))
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut out);
        out
    }

    pub fn to_dnf(&self) -> Dnf {
        Dnf::from_expr(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub var: VarId,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: VarId) -> Self {
        Literal {
            var,
            positive: true,
        }
    }

    pub fn neg(var: VarId) -> Self {
        Literal {
            var,
            positive: false,
        }
    }

    pub fn negated(self) -> Self {
        Literal {
            var: self.var,
            positive: !self.positive,
        }
    }

    fn key(&self) -> (VarId, bool) {
        (self.var, !self.positive)
    }
}

impl Ord for Literal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Literal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Product term: literals sorted by variable, at most one per variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Term(Vec<Literal>);

impl Term {
    /// Builds a term, returning `None` when it contains complementary literals.
    pub fn new(literals: impl IntoIterator<Item = Literal>) -> Option<Self> {
        let mut lits: Vec<Literal> = literals.into_iter().collect();
        lits.sort();
        lits.dedup();
        if lits.windows(2).any(|w| w[0].var == w[1].var) {
            return None;
        }
        Some(Term(lits))
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval_with(&self, value: &impl Fn(VarId) -> bool) -> bool {
        self.0.iter().all(|l| value(l.var) == l.positive)
    }

    fn conjoin(&self, other: &Term) -> Option<Term> {
        Term::new(self.0.iter().chain(&other.0).copied())
    }
}

/// Canonical DNF. The empty disjunction is false; a single empty term is true.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Dnf {
    terms: Vec<Term>,
}

impl Dnf {
    pub fn new(terms: impl IntoIterator<Item = Term>) -> Self {
        let mut terms: Vec<Term> = terms.into_iter().collect();
        terms.sort();
        terms.dedup();
        if terms.iter().any(Term::is_empty) {
            terms = vec![Term(Vec::new())];
        }
        Dnf { terms }
    }

    pub fn falsum() -> Self {
        Dnf { terms: Vec::new() }
    }

    pub fn verum() -> Self {
        Dnf {
            terms: vec![Term(Vec::new())],
        }
    }

    pub fn literal(lit: Literal) -> Self {
        Dnf {
            terms: vec![Term(vec![lit])],
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_false(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_true(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn literal_count(&self) -> usize {
        self.terms.iter().map(Term::len).sum()
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        self.terms
            .iter()
            .flat_map(|t| t.0.iter().map(|l| l.var))
            .collect()
    }

    pub fn eval_with(&self, value: &impl Fn(VarId) -> bool) -> bool {
        self.terms.iter().any(|t| t.eval_with(value))
    }

    pub fn eval(&self, state: &[bool]) -> bool {
        self.eval_with(&|v| state[v])
    }

    /// One minterm per assignment; `vars[0]` is the most significant bit of
    /// each assignment index.
    pub fn from_minterms(vars: &[VarId], minterms: impl IntoIterator<Item = u32>) -> Self {
        let n = vars.len();
        Dnf::new(minterms.into_iter().map(|m| {
            Term(
                vars.iter()
                    .enumerate()
                    .map(|(j, &v)| Literal {
                        var: v,
                        positive: (m >> (n - 1 - j)) & 1 == 1,
                    })
                    .collect(),
            )
        }))
    }

    pub fn from_expr(expr: &BoolExpr) -> Self {
        fn pos(e: &BoolExpr) -> Vec<Term> {
            match e {
                BoolExpr::Const(true) => vec![Term(Vec::new())],
                BoolExpr::Const(false) => Vec::new(),
                BoolExpr::Var(v) => vec![Term(vec![Literal::pos(*v)])],
                BoolExpr::Not(inner) => neg(inner),
                BoolExpr::Or(parts) => parts.iter().flat_map(pos).collect(),
                BoolExpr::And(parts) => product(parts.iter().map(pos)),
            }
        }
        fn neg(e: &BoolExpr) -> Vec<Term> {
            match e {
                BoolExpr::Const(b) => pos(&BoolExpr::Const(!b)),
                BoolExpr::Var(v) => vec![Term(vec![Literal::neg(*v)])],
                BoolExpr::Not(inner) => pos(inner),
                BoolExpr::And(parts) => parts.iter().flat_map(neg).collect(),
                BoolExpr::Or(parts) => product(parts.iter().map(neg)),
            }
        }
        fn product(factors: impl Iterator<Item = Vec<Term>>) -> Vec<Term> {
            let mut acc = vec![Term(Vec::new())];
            for factor in factors {
                let mut next = Vec::new();
                for a in &acc {
                    for b in &factor {
                        if let Some(t) = a.conjoin(b) {
                            next.push(t);
                        }
                    }
                }
                next.sort();
                next.dedup();
                acc = next;
                if acc.is_empty() {
                    break;
                }
            }
            acc
        }
        Dnf::new(pos(expr))
    }

    pub fn to_expr(&self) -> BoolExpr {
        BoolExpr::or(
            self.terms
                .iter()
                .map(|t| {
                    BoolExpr::and(
                        t.0.iter()
                            .map(|l| {
                                if l.positive {
                                    BoolExpr::Var(l.var)
                                } else {
                                    BoolExpr::not(BoolExpr::Var(l.var))
                                }
                            })
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    /// Copy with the literal at (`term`, `literal`) complemented.
    pub fn with_literal_negated(&self, term: usize, literal: usize) -> Self {
        let mut terms = self.terms.clone();
        let lit = &mut terms[term].0[literal];
        *lit = lit.negated();
        Dnf::new(terms.into_iter().filter_map(|t| Term::new(t.0)))
    }

    /// Text form with `&`, `|`, `!`; multi-literal terms are parenthesised
    /// when there is more than one term. Constants are `0` and `1`.
    pub fn render(&self, names: &[String]) -> String {
        if self.is_false() {
            return "0".into();
        }
        if self.is_true() {
            return "1".into();
        }
        let many = self.terms.len() > 1;
        self.terms
            .iter()
            .map(|t| {
                let body =
                    t.0.iter()
                        .map(|l| {
                            if l.positive {
                                names[l.var].clone()
                            } else {
                                format!("!{}", names[l.var])
                            }
                        })
                        .collect::<Vec<_>>()
                        .join(" & ");
                if many && t.len() > 1 {
                    format!("({body})")
                } else {
                    body
                }
            })
            .collect::<Vec<_>>()
            .join(" | ")
    }
}

/// True when both formulas agree on every assignment of their joint variables.
pub fn equivalent(a: &Dnf, b: &Dnf) -> bool {
    let vars: Vec<VarId> = a.vars().union(&b.vars()).copied().collect();
    assert!(
        vars.len() <= 24,
        "equivalence check over too many variables"
    );
    let n = vars.len();
    (0u32..1 << n).all(|m| {
        let value = |v: VarId| {
            let j = vars.iter().position(|&x| x == v).unwrap();
            (m >> (n - 1 - j)) & 1 == 1
        };
        a.eval_with(&value) == b.eval_with(&value)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("v{i}")).collect()
    }

    #[test]
    fn constants_render_as_digits() {
        assert_eq!(Dnf::falsum().render(&[]), "0");
        assert_eq!(Dnf::verum().render(&[]), "1");
        assert!(Dnf::from_expr(&BoolExpr::Const(true)).is_true());
    }

    #[test]
    fn literal_order_is_positive_first() {
        let t = Term::new([Literal::neg(1), Literal::pos(0)]).unwrap();
        assert_eq!(t.literals(), &[Literal::pos(0), Literal::neg(1)]);
        assert!(Term::new([Literal::pos(2), Literal::neg(2)]).is_none());
        let d = Dnf::new([
            Term::new([Literal::neg(0), Literal::pos(1)]).unwrap(),
            Term::new([Literal::pos(0), Literal::neg(1)]).unwrap(),
        ]);
        assert_eq!(d.render(&names(2)), "(v0 & !v1) | (!v0 & v1)");
    }

    #[test]
    fn distribution_preserves_meaning() {
        let e = BoolExpr::and(vec![
            BoolExpr::or(vec![BoolExpr::var(0), BoolExpr::var(1)]),
            BoolExpr::not(BoolExpr::and(vec![BoolExpr::var(1), BoolExpr::var(2)])),
        ]);
        let d = e.to_dnf();
        for m in 0..8u32 {
            let s = [m & 4 != 0, m & 2 != 0, m & 1 != 0];
            assert_eq!(e.eval(&s), d.eval(&s));
        }
    }

    #[test]
    fn minterms_follow_variable_order() {
        let d = Dnf::from_minterms(&[3, 5], [0b10]);
        assert_eq!(d.terms()[0].literals(), &[Literal::pos(3), Literal::neg(5)]);
    }

    #[test]
    fn negating_a_literal_changes_the_function() {
        let d = Dnf::new([
            Term::new([Literal::pos(0)]).unwrap(),
            Term::new([Literal::pos(1)]).unwrap(),
        ]);
        let m = d.with_literal_negated(0, 0);
        assert!(!equivalent(&d, &m));
        assert_eq!(m.render(&names(2)), "!v0 | v1");
    }
}
