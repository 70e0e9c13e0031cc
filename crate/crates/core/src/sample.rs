//! Seeded generation of small random unitary stepwise networks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::model::{CmpOp, Guard, Level, MvNetwork, Rule, StateSpace, Variable};

#[derive(Clone, Copy, Debug)]
pub struct SampleParams {
    pub max_vars: usize,
    pub max_level: Level,
    /// Probability that another variable regulates a given variable.
    pub edge_probability: f64,
}

impl Default for SampleParams {
    fn default() -> Self {
        SampleParams {
            max_vars: 3,
            max_level: 3,
            edge_probability: 0.5,
        }
    }
}

/// Draws a unitary stepwise network. Each variable reads a random set of
/// regulators (always itself when its maximal level is at least 2) and
/// moves by at most one level in every state; its rules are the disjoint
/// level sets of that table.
pub fn random_unitary_network(rng: &mut impl Rng, params: &SampleParams) -> Result<MvNetwork> {
    let n = rng.gen_range(1..=params.max_vars);
    let names = ["a", "b", "c", "d", "e", "f"];
    let variables: Vec<Variable> = (0..n)
        .map(|i| {
            let name = names
                .get(i)
                .map_or_else(|| format!("v{i}"), |s| s.to_string());
            Variable::new(name, rng.gen_range(1..=params.max_level))
        })
        .collect();
    let mut rules = Vec::with_capacity(n);
    for i in 0..n {
        let max = variables[i].max_level;
        let mut regs: Vec<usize> = (0..n)
            .filter(|&j| j != i && rng.gen_bool(params.edge_probability))
            .collect();
        if max >= 2 || rng.gen_bool(params.edge_probability) {
            regs.push(i);
        }
        regs.sort_unstable();
        let radices: Vec<u32> = regs.iter().map(|&j| variables[j].max_level + 1).collect();
        let table = StateSpace::new(radices, usize::MAX)?;
        let self_pos = regs.iter().position(|&j| j == i);
        let mut by_level: Vec<Vec<Vec<Level>>> = vec![Vec::new(); max as usize + 1];
        for idx in 0..table.len() {
            let values = table.state(idx);
            let choices: Vec<Level> = match self_pos {
                Some(p) => {
                    let cur = values[p];
                    (cur.saturating_sub(1)..=(cur + 1).min(max)).collect()
                }
                None => (0..=max).collect(),
            };
            let target = *choices.choose(rng).unwrap();
            by_level[target as usize].push(values);
        }
        let mut list = Vec::new();
        for level in (1..=max).rev() {
            let cases = &by_level[level as usize];
            if cases.is_empty() {
                continue;
            }
            let guard = Guard::any(
                cases
                    .iter()
                    .map(|values| {
                        Guard::all(
                            regs.iter()
                                .zip(values)
                                .map(|(&j, &v)| Guard::atom(j, CmpOp::Eq, v))
                                .collect(),
                        )
                    })
                    .collect(),
            );
            list.push(Rule::new(level, guard));
        }
        rules.push(list);
    }
    MvNetwork::new("random", variables, rules)
}

/// `count` networks from a fixed seed.
pub fn random_unitary_networks(
    seed: u64,
    count: usize,
    params: &SampleParams,
) -> Result<Vec<MvNetwork>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_unitary_network(&mut rng, params))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{parse_mvnet, print_mvnet};
    use crate::model::is_unitary_stepwise;

    #[test]
    fn samples_are_unitary_and_reproducible() {
        let a = random_unitary_networks(7, 50, &SampleParams::default()).unwrap();
        let b = random_unitary_networks(7, 50, &SampleParams::default()).unwrap();
        assert_eq!(a, b);
        for net in &a {
            assert!(net.len() <= 3 && net.max_levels().iter().all(|&l| (1..=3).contains(&l)));
            assert!(is_unitary_stepwise(net, 1 << 10).unwrap().unitary);
            assert_eq!(&parse_mvnet(&print_mvnet(net)).unwrap(), net);
        }
    }
}
