//! The repairable two-component system and its three-state reduction.
//!
//! Two components fail independently at rate `λ` and are repaired at rate
//! `μ`. A test reports `yes` when the system is operational: always in
//! state `2` (both up), never in `0`, and with probability one half when
//! exactly one component is up.

use num_traits::Signed;

use super::{Generator, LabelledModel};
use crate::error::{Error, Result};
use crate::findist::Dist;
use crate::numeric::{format_rational, int, ratio, Rational};

fn check_rates(lambda: &Rational, mu: &Rational) -> Result<()> {
    for (name, r) in [("lambda", lambda), ("mu", mu)] {
        if !r.is_positive() {
            return Err(Error::invalid(format!("{name} must be positive, got {}", format_rational(r))));
        }
    }
    Ok(())
}

fn labels() -> Vec<String> {
    vec!["yes".to_string(), "no".to_string()]
}

fn half_half() -> Dist<usize, Rational> {
    Dist::from_weights([(0, ratio(1, 2)), (1, ratio(1, 2))])
}

/// States `(0, L, R, 2)`: no component up, only left, only right, both.
pub fn repairable_4state(lambda: &Rational, mu: &Rational) -> Result<LabelledModel> {
    check_rates(lambda, mu)?;
    let (l, m) = (lambda.clone(), mu.clone());
    let z = int(0);
    let lm = &l + &m;
    let rates = vec![
        vec![-(int(2) * &m), l.clone(), l.clone(), z.clone()],
        vec![m.clone(), -lm.clone(), z.clone(), l.clone()],
        vec![m.clone(), z.clone(), -lm.clone(), l.clone()],
        vec![z, m.clone(), m, -(int(2) * &l)],
    ];
    let states = ["0", "L", "R", "2"].iter().map(|s| s.to_string()).collect();
    let generator = Generator::new(states, rates)?;
    let obs = vec![Dist::dirac(1), half_half(), half_half(), Dist::dirac(0)];
    LabelledModel::new(generator, labels(), obs)
}

/// States `(0, 1, 2)` counting operational components.
pub fn repairable_3state(lambda: &Rational, mu: &Rational) -> Result<LabelledModel> {
    check_rates(lambda, mu)?;
    let (l, m) = (lambda.clone(), mu.clone());
    let z = int(0);
    let two = int(2);
    let rates = vec![
        vec![-(&two * &m), l.clone(), z.clone()],
        vec![&two * &m, -(&l + &m), &two * &l],
        vec![z, m, -(&two * &l)],
    ];
    let states = ["0", "1", "2"].iter().map(|s| s.to_string()).collect();
    let generator = Generator::new(states, rates)?;
    let obs = vec![Dist::dirac(1), half_half(), Dist::dirac(0)];
    LabelledModel::new(generator, labels(), obs)
}

/// The map `0 ↦ 0, L ↦ 1, R ↦ 1, 2 ↦ 2` between the two models.
pub fn repairable_homomorphism() -> Vec<usize> {
    vec![0, 1, 1, 2]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_state_layout() {
        let m = repairable_4state(&int(2), &int(3)).unwrap();
        assert_eq!(m.states(), ["0", "L", "R", "2"]);
        let g = m.generator();
        assert_eq!(g.rate(0, 0), &int(-6));
        assert_eq!(g.rate(1, 0), &int(3));
        assert_eq!(g.rate(2, 0), &int(3));
        assert_eq!(g.rate(3, 0), &int(0));
        assert_eq!(m.obs(3), &Dist::dirac(0));
        assert_eq!(m.obs(1).get(&0), ratio(1, 2));
    }

    #[test]
    fn three_state_layout() {
        let m = repairable_3state(&int(2), &int(3)).unwrap();
        let g = m.generator();
        assert_eq!(g.rate(1, 0), &int(6));
        assert_eq!(g.rate(1, 2), &int(4));
        for j in 0..3 {
            let s: Rational = (0..3).map(|k| g.rate(k, j).clone()).sum();
            assert_eq!(s, int(0));
        }
    }

    #[test]
    fn rejects_nonpositive_rates() {
        assert!(repairable_4state(&int(0), &int(1)).is_err());
        assert!(repairable_3state(&int(1), &int(-1)).is_err());
    }
}
