//! Ordinary lumpability: the coarsest observation-respecting partition whose
//! blocks receive block-constant aggregate rates.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{check_homomorphism, probe_times, Generator, HomomorphismReport, LabelledModel};
use crate::error::Result;
use crate::findist::Dist;
use crate::numeric::Rational;

#[derive(Clone, Debug)]
pub struct Lumping {
    /// Blocks of state indices, ordered by smallest member.
    pub blocks: Vec<Vec<usize>>,
    /// `block_of[x]` is the index of the block containing `x`.
    pub block_of: Vec<usize>,
    pub quotient: LabelledModel,
    /// The quotient map checked against both models at the probe times.
    pub report: HomomorphismReport,
    /// Number of refinement rounds until the partition stabilised.
    pub rounds: usize,
}

impl Lumping {
    pub fn same_block(&self, x: usize, y: usize) -> bool {
        self.block_of[x] == self.block_of[y]
    }
}

/// Renumbers keys so block ids follow the smallest member.
fn canonical<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut ids: BTreeMap<K, usize> = BTreeMap::new();
    let mut out = Vec::with_capacity(keys.len());
    for k in keys {
        let next = ids.len();
        out.push(*ids.entry(k.clone()).or_insert(next));
    }
    out
}

/// Refines `initial` (block id per state) until every block has constant
/// aggregate rate into every block. Returns the stable partition and the
/// number of rounds.
pub fn refine_partition(g: &Generator, initial: &[usize]) -> (Vec<usize>, usize) {
    let n = g.dim();
    let mut block_of = canonical(initial);
    let mut rounds = 0;
    loop {
        rounds += 1;
        let count = block_of.iter().max().map_or(0, |m| m + 1);
        let keys: Vec<(usize, Vec<Rational>)> = (0..n)
            .map(|j| {
                let mut sig = vec![Rational::zero(); count];
                for k in 0..n {
                    sig[block_of[k]] += g.rate(k, j);
                }
                (block_of[j], sig)
            })
            .collect();
        let next = canonical(&keys);
        let next_count = next.iter().max().map_or(0, |m| m + 1);
        block_of = next;
        if next_count == count {
            return (block_of, rounds);
        }
    }
}

fn block_name(m: &LabelledModel, block: &[usize]) -> String {
    if block.len() == 1 {
        m.states()[block[0]].clone()
    } else {
        let names: Vec<&str> = block.iter().map(|&x| m.states()[x].as_str()).collect();
        format!("[{}]", names.join(","))
    }
}

/// The lumping quotient of `m`, starting from observation equality.
pub fn lumpability_quotient(m: &LabelledModel) -> Result<Lumping> {
    let obs_keys: Vec<&Dist<usize, Rational>> = (0..m.n_states()).map(|x| m.obs(x)).collect();
    let (block_of, rounds) = refine_partition(m.generator(), &canonical(&obs_keys));
    let count = block_of.iter().max().map_or(0, |b| b + 1);
    let mut blocks = vec![Vec::new(); count];
    for (x, &b) in block_of.iter().enumerate() {
        blocks[b].push(x);
    }
    let g = m.generator();
    let rates: Vec<Vec<Rational>> = (0..count)
        .map(|to| {
            (0..count)
                .map(|from| {
                    let rep = blocks[from][0];
                    blocks[to].iter().fold(Rational::zero(), |acc, &k| acc + g.rate(k, rep))
                })
                .collect()
        })
        .collect();
    let names = blocks.iter().map(|b| block_name(m, b)).collect();
    let generator = if g.is_partial() { Generator::new_partial(names, rates)? } else { Generator::new(names, rates)? };
    let obs = blocks.iter().map(|b| m.obs(b[0]).clone()).collect();
    let quotient = LabelledModel::new(generator, m.labels().to_vec(), obs)?;
    let report = check_homomorphism(&block_of, m, &quotient, &probe_times(), 1e-8)?;
    Ok(Lumping { blocks, block_of, quotient, report, rounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctmc::repairable_4state;
    use crate::numeric::{int, ratio};

    #[test]
    fn distinct_obs_give_discrete_partition() {
        let m = repairable_4state(&int(1), &int(2)).unwrap();
        let obs = vec![
            Dist::dirac(1),
            Dist::full([(0, ratio(1, 3)), (1, ratio(2, 3))]).unwrap(),
            Dist::full([(0, ratio(2, 3)), (1, ratio(1, 3))]).unwrap(),
            Dist::dirac(0),
        ];
        let m = LabelledModel::new(m.generator().clone(), m.labels().to_vec(), obs).unwrap();
        let l = lumpability_quotient(&m).unwrap();
        assert_eq!(l.blocks, vec![vec![0], vec![1], vec![2], vec![3]]);
        assert!(l.report.passed());
    }

    #[test]
    fn rates_split_equal_observations() {
        // all states look alike, but only `b` and `c` have matching outflow
        let g = Generator::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![int(-2), int(1), int(1)],
                vec![int(1), int(-1), int(0)],
                vec![int(1), int(0), int(-1)],
            ],
        )
        .unwrap();
        let m = LabelledModel::new(g, vec!["o".into()], vec![Dist::dirac(0); 3]).unwrap();
        let l = lumpability_quotient(&m).unwrap();
        assert_eq!(l.blocks, vec![vec![0, 1, 2]]);
        assert_eq!(l.quotient.states(), ["[a,b,c]"]);

        let (p, _) = refine_partition(m.generator(), &[0, 1, 1]);
        assert_eq!(p, vec![0, 1, 1]);
        let (p, _) = refine_partition(m.generator(), &[0, 0, 1]);
        assert_eq!(p, vec![0, 1, 2]);
    }
}
