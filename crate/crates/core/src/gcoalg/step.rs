//! `N`-graded coalgebras: iterates of a one-step kernel, and the graded
//! semantics obtained from a powerset coalgebra through uniform choice.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::findist::{Atom, Dist};
use crate::numeric::{ratio, Rational};

/// A finite carrier with a one-step distribution per element.
#[derive(Clone, Debug)]
pub struct GradedStepCoalgebra<A: Atom> {
    step: BTreeMap<A, Dist<A, Rational>>,
}

impl<A: Atom> GradedStepCoalgebra<A> {
    pub fn new(step: BTreeMap<A, Dist<A, Rational>>) -> Result<Self> {
        for (x, d) in &step {
            if !d.is_full() {
                return Err(Error::invalid(format!("step at {x:?} is not a full distribution")));
            }
            if let Some(y) = d.support().find(|y| !step.contains_key(y)) {
                return Err(Error::invalid(format!("step at {x:?} leaves the carrier via {y:?}")));
            }
        }
        Ok(GradedStepCoalgebra { step })
    }

    pub fn carrier(&self) -> impl Iterator<Item = &A> {
        self.step.keys()
    }

    pub fn step(&self, x: &A) -> Result<&Dist<A, Rational>> {
        self.step.get(x).ok_or_else(|| Error::UnknownState(format!("{x:?}")))
    }

    /// `γ_n(x)`: `γ_0 = dirac`, `γ_{n+1} = γ_n` followed by one step.
    pub fn iterate(&self, n: usize, x: &A) -> Result<Dist<A, Rational>> {
        self.step(x)?;
        let mut d = Dist::dirac(x.clone());
        for _ in 0..n {
            d = d.bind(|y| self.step[y].clone());
        }
        Ok(d)
    }
}

/// Fair ±1 walk on `-radius..=radius`; at the walls the blocked move stays put.
pub fn random_walk(radius: i64) -> Result<GradedStepCoalgebra<i64>> {
    if radius < 1 {
        return Err(Error::invalid("random walk radius must be at least 1"));
    }
    let half = ratio(1, 2);
    let step = (-radius..=radius)
        .map(|x| {
            let d = Dist::from_weights([((x - 1).max(-radius), half.clone()), ((x + 1).min(radius), half.clone())]);
            (x, d)
        })
        .collect();
    GradedStepCoalgebra::new(step)
}

/// An element of `P^n X`: a leaf at depth zero, otherwise a set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum NestedSet<A: Atom> {
    Leaf(A),
    Set(BTreeSet<NestedSet<A>>),
}

/// A finitely-branching transition system `X -> P X`.
#[derive(Clone, Debug)]
pub struct PowersetCoalgebra<A: Atom> {
    succ: BTreeMap<A, BTreeSet<A>>,
}

impl<A: Atom> PowersetCoalgebra<A> {
    pub fn new(succ: BTreeMap<A, BTreeSet<A>>) -> Result<Self> {
        for (x, s) in &succ {
            if let Some(y) = s.iter().find(|y| !succ.contains_key(y)) {
                return Err(Error::invalid(format!("successor {y:?} of {x:?} is not in the carrier")));
            }
        }
        Ok(PowersetCoalgebra { succ })
    }

    /// `γ_n(x) ∈ P^n X`, obtained by expanding every leaf `n` times.
    pub fn nested(&self, n: usize, x: &A) -> Result<NestedSet<A>> {
        if !self.succ.contains_key(x) {
            return Err(Error::UnknownState(format!("{x:?}")));
        }
        let mut s = NestedSet::Leaf(x.clone());
        for _ in 0..n {
            s = self.expand(&s);
        }
        Ok(s)
    }

    fn expand(&self, s: &NestedSet<A>) -> NestedSet<A> {
        match s {
            NestedSet::Leaf(y) => NestedSet::Set(self.succ[y].iter().cloned().map(NestedSet::Leaf).collect()),
            NestedSet::Set(items) => NestedSet::Set(items.iter().map(|t| self.expand(t)).collect()),
        }
    }
}

/// `α^n : P^n X -> D X` with `α^0 = dirac` and `α^{n+1}(S) = Σ_{s∈S} α^n(s) / |S|`.
pub fn uniform_alpha<A: Atom>(s: &NestedSet<A>) -> Result<Dist<A, Rational>> {
    match s {
        NestedSet::Leaf(x) => Ok(Dist::dirac(x.clone())),
        NestedSet::Set(items) => {
            if items.is_empty() {
                return Err(Error::invalid("uniform choice over an empty set is undefined"));
            }
            let parts: Result<Vec<Dist<A, Rational>>> = items.iter().map(uniform_alpha).collect();
            let parts = parts?;
            let w = ratio(1, items.len() as i64);
            Ok(Dist::from_weights(parts.iter().flat_map(|d| d.iter().map(|(a, p)| (a.clone(), p * &w)))))
        }
    }
}

/// The graded `D`-coalgebra induced by uniform choice, at grade `n` and state `x`.
pub fn extend_graded_semantics<A: Atom>(c: &PowersetCoalgebra<A>, n: usize, x: &A) -> Result<Dist<A, Rational>> {
    uniform_alpha(&c.nested(n, x)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn walk_two_steps() {
        let w = random_walk(5).unwrap();
        assert_eq!(w.iterate(0, &0).unwrap(), Dist::dirac(0));
        let d = w.iterate(2, &0).unwrap();
        let expected = Dist::full([(-2, ratio(1, 4)), (0, ratio(1, 2)), (2, ratio(1, 4))]).unwrap();
        assert_eq!(d, expected);
        assert!(w.iterate(1, &9).is_err());
    }

    #[test]
    fn walk_boundary_holds_mass() {
        let w = random_walk(1).unwrap();
        let d = w.iterate(1, &1).unwrap();
        assert_eq!(d, Dist::full([(0, ratio(1, 2)), (1, ratio(1, 2))]).unwrap());
    }

    #[test]
    fn uniform_semantics() {
        let succ = BTreeMap::from([('a', BTreeSet::from(['a', 'b'])), ('b', BTreeSet::from(['b']))]);
        let c = PowersetCoalgebra::new(succ).unwrap();
        assert_eq!(extend_graded_semantics(&c, 0, &'a').unwrap(), Dist::dirac('a'));
        let one = extend_graded_semantics(&c, 1, &'a').unwrap();
        assert_eq!(one, Dist::full([('a', ratio(1, 2)), ('b', ratio(1, 2))]).unwrap());
        let two = extend_graded_semantics(&c, 2, &'a').unwrap();
        assert_eq!(two, Dist::full([('a', ratio(1, 4)), ('b', ratio(3, 4))]).unwrap());
    }

    #[test]
    fn deadlock_is_rejected() {
        let succ = BTreeMap::from([('a', BTreeSet::new())]);
        let c = PowersetCoalgebra::new(succ).unwrap();
        assert!(extend_graded_semantics(&c, 0, &'a').is_ok());
        assert!(matches!(extend_graded_semantics(&c, 1, &'a'), Err(Error::InvalidInput(_))));
    }
}
