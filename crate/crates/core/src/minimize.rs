//! Exact two-level minimization (Quine-McCluskey prime generation followed
//! by a branch-and-bound cover search).
//!
//! Among all minimum covers the result is the least by term count, then
//! literal count, then the sorted term list, so outputs are reproducible.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::formula::{Dnf, Literal, Term};
use crate::model::VarId;

/// Largest variable count handled exactly.
pub const EXACT_VAR_LIMIT: usize = 16;

const SEARCH_BUDGET: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Minimized {
    pub dnf: Dnf,
    /// False when the bound or the search budget was exceeded.
    pub exact: bool,
}

/// Cube over `n` variables: bits set in `mask` are free.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Cube {
    value: u32,
    mask: u32,
}

impl Cube {
    fn covers(&self, m: u32) -> bool {
        m & !self.mask == self.value
    }

    fn literals(&self, n: usize) -> usize {
        n - self.mask.count_ones() as usize
    }

    fn to_term(self, vars: &[VarId]) -> Term {
        let n = vars.len();
        Term::new(vars.iter().enumerate().filter_map(|(j, &v)| {
            let bit = 1 << (n - 1 - j);
            (self.mask & bit == 0).then(|| Literal {
                var: v,
                positive: self.value & bit != 0,
            })
        }))
        .expect("cube terms are consistent")
    }
}

/// Minimizes the function over `vars` whose on-set is `ones` (assignment
/// indices with `vars[0]` as the most significant bit). Every other point
/// is part of the off-set.
pub fn minimize_on_set(vars: &[VarId], ones: &[u32]) -> Minimized {
    let n = vars.len();
    let mut ones: Vec<u32> = ones.to_vec();
    ones.sort_unstable();
    ones.dedup();
    if ones.is_empty() {
        return Minimized {
            dnf: Dnf::falsum(),
            exact: true,
        };
    }
    if n > EXACT_VAR_LIMIT {
        return Minimized {
            dnf: Dnf::from_minterms(vars, ones),
            exact: false,
        };
    }
    if ones.len() == 1usize << n {
        return Minimized {
            dnf: Dnf::verum(),
            exact: true,
        };
    }
    let primes = prime_implicants(n, &ones);
    let terms: Vec<Term> = primes.iter().map(|c| c.to_term(vars)).collect();
    let (chosen, exact) = select_cover(n, &ones, &primes, &terms);
    Minimized {
        dnf: Dnf::new(chosen.into_iter().map(|i| terms[i].clone())),
        exact,
    }
}

/// Minimizes a DNF over its own variables.
pub fn minimize(f: &Dnf) -> Minimized {
    let vars: Vec<VarId> = f.vars().into_iter().collect();
    let n = vars.len();
    if n > EXACT_VAR_LIMIT {
        return Minimized {
            dnf: f.clone(),
            exact: false,
        };
    }
    let ones: Vec<u32> = (0u32..1 << n)
        .filter(|&m| {
            f.eval_with(&|v| {
                let j = vars.binary_search(&v).unwrap();
                (m >> (n - 1 - j)) & 1 == 1
            })
        })
        .collect();
    minimize_on_set(&vars, &ones)
}

fn prime_implicants(n: usize, ones: &[u32]) -> Vec<Cube> {
    let mut current: Vec<Cube> = ones.iter().map(|&m| Cube { value: m, mask: 0 }).collect();
    let mut primes = Vec::new();
    while !current.is_empty() {
        let mut merged = vec![false; current.len()];
        let mut next: BTreeSet<(u32, u32)> = BTreeSet::new();
        // Cubes sharing a mask can only merge with each other.
        let mut by_mask: HashMap<u32, Vec<usize>> = HashMap::new();
        for (i, c) in current.iter().enumerate() {
            by_mask.entry(c.mask).or_default().push(i);
        }
        for group in by_mask.values() {
            let index: HashMap<u32, usize> = group.iter().map(|&i| (current[i].value, i)).collect();
            for &i in group {
                let c = current[i];
                for bit in 0..n {
                    let b = 1u32 << bit;
                    if c.mask & b != 0 || c.value & b != 0 {
                        continue;
                    }
                    if let Some(&j) = index.get(&(c.value | b)) {
                        merged[i] = true;
                        merged[j] = true;
                        next.insert((c.value, c.mask | b));
                    }
                }
            }
        }
        primes.extend(
            current
                .iter()
                .zip(&merged)
                .filter(|(_, &m)| !m)
                .map(|(c, _)| *c),
        );
        current = next
            .into_iter()
            .map(|(value, mask)| Cube { value, mask })
            .collect();
    }
    primes
}

struct Search<'a> {
    n: usize,
    primes: &'a [Cube],
    /// Position of each prime in the term order.
    rank: Vec<usize>,
    covering: Vec<Vec<usize>>,
    members: Vec<Vec<usize>>,
    /// Minterms by increasing number of candidate primes.
    order: Vec<usize>,
    min_lits: Vec<usize>,
    stamp: Vec<u64>,
    generation: u64,
    best: Option<(usize, usize, Vec<usize>)>,
    nodes: usize,
    exhausted: bool,
}

impl Search<'_> {
    fn sorted_ranks(&self, chosen: &[usize]) -> Vec<usize> {
        let mut ts: Vec<usize> = chosen.iter().map(|&p| self.rank[p]).collect();
        ts.sort_unstable();
        ts
    }

    fn offer(&mut self, chosen: &[usize], lits: usize) {
        let better = match &self.best {
            None => true,
            Some((bt, bl, best)) => match (chosen.len(), lits).cmp(&(*bt, *bl)) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Greater => false,
                std::cmp::Ordering::Equal => self.sorted_ranks(chosen) < *best,
            },
        };
        if better {
            self.best = Some((chosen.len(), lits, self.sorted_ranks(chosen)));
        }
    }

    /// Lower bound on the terms and literals still needed: uncovered
    /// minterms with pairwise disjoint candidate sets each need their own
    /// prime.
    fn lower_bound(&mut self, covered: &[u32]) -> (usize, usize) {
        self.generation += 1;
        let g = self.generation;
        let mut terms = 0;
        let mut lits = 0;
        for &m in &self.order {
            if covered[m] != 0 || self.covering[m].iter().any(|&p| self.stamp[p] == g) {
                continue;
            }
            self.covering[m].iter().for_each(|&p| self.stamp[p] = g);
            terms += 1;
            lits += self.min_lits[m];
        }
        (terms, lits)
    }

    fn run(&mut self, covered: &mut Vec<u32>, chosen: &mut Vec<usize>, lits: usize) {
        self.nodes += 1;
        if self.nodes > SEARCH_BUDGET {
            self.exhausted = true;
            return;
        }
        // Pick the uncovered minterm with the fewest candidate primes.
        let target = (0..self.covering.len())
            .filter(|&m| covered[m] == 0)
            .min_by_key(|&m| self.covering[m].len());
        let Some(target) = target else {
            self.offer(chosen, lits);
            return;
        };
        if let Some((bt, bl, _)) = self.best {
            let (lt, ll) = self.lower_bound(covered);
            if (chosen.len() + lt, lits + ll) > (bt, bl) {
                return;
            }
        }
        let mut candidates = self.covering[target].clone();
        candidates.retain(|p| !chosen.contains(p));
        candidates.sort_by_key(|&p| {
            let gain = self.members[p].iter().filter(|&&m| covered[m] == 0).count();
            (std::cmp::Reverse(gain), self.primes[p].literals(self.n), p)
        });
        for p in candidates {
            let members = std::mem::take(&mut self.members[p]);
            members.iter().for_each(|&m| covered[m] += 1);
            chosen.push(p);
            self.run(covered, chosen, lits + self.primes[p].literals(self.n));
            chosen.pop();
            members.iter().for_each(|&m| covered[m] -= 1);
            self.members[p] = members;
            if self.exhausted {
                return;
            }
        }
    }
}

fn select_cover(n: usize, ones: &[u32], primes: &[Cube], terms: &[Term]) -> (Vec<usize>, bool) {
    let covering: Vec<Vec<usize>> = ones
        .iter()
        .map(|&m| (0..primes.len()).filter(|&p| primes[p].covers(m)).collect())
        .collect();
    let mut members = vec![Vec::new(); primes.len()];
    for (m, cands) in covering.iter().enumerate() {
        cands.iter().for_each(|&p| members[p].push(m));
    }

    // Essential primes belong to every cover.
    let mut chosen: Vec<usize> = covering
        .iter()
        .filter(|c| c.len() == 1)
        .map(|c| c[0])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut covered = vec![0u32; ones.len()];
    for (m, cands) in covering.iter().enumerate() {
        covered[m] = cands.iter().filter(|p| chosen.contains(p)).count() as u32;
    }
    let lits = chosen.iter().map(|&p| primes[p].literals(n)).sum();

    let mut order: Vec<usize> = (0..covering.len()).collect();
    order.sort_by_key(|&m| covering[m].len());
    let min_lits = covering
        .iter()
        .map(|c| c.iter().map(|&p| primes[p].literals(n)).min().unwrap_or(0))
        .collect();
    let mut by_term: Vec<usize> = (0..primes.len()).collect();
    by_term.sort_by(|&a, &b| terms[a].cmp(&terms[b]));
    let mut rank = vec![0; primes.len()];
    by_term.iter().enumerate().for_each(|(r, &p)| rank[p] = r);
    let mut search = Search {
        n,
        primes,
        rank,
        covering,
        members,
        order,
        min_lits,
        stamp: vec![0; primes.len()],
        generation: 0,
        best: None,
        nodes: 0,
        exhausted: false,
    };
    let initial = greedy(&search.covering, &covered, &chosen, primes, n);
    let initial_lits = initial.iter().map(|&p| primes[p].literals(n)).sum();
    search.offer(&initial, initial_lits);
    search.run(&mut covered, &mut chosen, lits);
    let exact = !search.exhausted;
    let best = search.best.unwrap().2;
    (best.into_iter().map(|r| by_term[r]).collect(), exact)
}

fn greedy(
    covering: &[Vec<usize>],
    covered: &[u32],
    chosen: &[usize],
    primes: &[Cube],
    n: usize,
) -> Vec<usize> {
    let mut chosen = chosen.to_vec();
    let mut covered: Vec<bool> = covered.iter().map(|&c| c > 0).collect();
    while let Some(m) = covered.iter().position(|c| !c) {
        let best = covering[m]
            .iter()
            .copied()
            .max_by_key(|&p| {
                let gain = covering
                    .iter()
                    .zip(&covered)
                    .filter(|(c, done)| !**done && c.contains(&p))
                    .count();
                (
                    gain,
                    std::cmp::Reverse(primes[p].literals(n)),
                    std::cmp::Reverse(p),
                )
            })
            .unwrap();
        for (c, done) in covering.iter().zip(covered.iter_mut()) {
            if c.contains(&best) {
                *done = true;
            }
        }
        chosen.push(best);
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::equivalent;

    fn names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("y{i}")).collect()
    }

    #[test]
    fn seven_minterms_collapse_to_three_literals() {
        let m = minimize_on_set(&[0, 1, 2], &[1, 2, 3, 4, 5, 6, 7]);
        assert!(m.exact);
        assert_eq!(m.dnf.render(&names(3)), "y1 | y2 | y3");
    }

    #[test]
    fn constants() {
        assert!(minimize_on_set(&[0, 1], &[]).dnf.is_false());
        assert!(minimize_on_set(&[0, 1], &[0, 1, 2, 3]).dnf.is_true());
        assert!(minimize_on_set(&[], &[0]).dnf.is_true());
    }

    #[test]
    fn cyclic_cover_uses_lexicographic_tie_break() {
        // On-set {001, 010, 100, 101, 110}: two minimum covers exist.
        let m = minimize_on_set(&[0, 1, 2], &[1, 2, 4, 5, 6]);
        assert_eq!(
            m.dnf.render(&names(3)),
            "(y1 & !y2) | (y2 & !y3) | (!y2 & y3)"
        );
    }

    #[test]
    fn xor_has_no_smaller_form() {
        let m = minimize_on_set(&[0, 1], &[1, 2]);
        assert_eq!(m.dnf.render(&names(2)), "(y1 & !y2) | (!y1 & y2)");
    }

    #[test]
    fn minimization_is_sound_on_all_three_variable_functions() {
        for f in 0u32..256 {
            let ones: Vec<u32> = (0..8).filter(|m| f >> m & 1 == 1).collect();
            let m = minimize_on_set(&[0, 1, 2], &ones);
            let raw = Dnf::from_minterms(&[0, 1, 2], ones.iter().copied());
            assert!(equivalent(&m.dnf, &raw), "function {f:#010b}");
            assert!(m.dnf.term_count() <= raw.term_count().max(1));
        }
    }

    #[test]
    fn over_the_bound_is_flagged() {
        let vars: Vec<VarId> = (0..17).collect();
        let m = minimize_on_set(&vars, &[3]);
        assert!(!m.exact);
        assert_eq!(m.dnf.term_count(), 1);
    }
}
