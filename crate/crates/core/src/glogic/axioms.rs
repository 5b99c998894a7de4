//! Finite checks of the trace-logic conditions on an algebra `o : D Ω -> Ω`:
//! `o` is an Eilenberg-Moore algebra, every propositional operator is a
//! homomorphism, both modalities satisfy the left and right diagrams, and
//! the split-coequalizer identities behind the trace semantics hold for the
//! observation and delay generators.

use std::fmt;

use crate::findist::distlaw::{grid_distributions, LawReport};
use crate::findist::{flatten, Atom, Dist};
use crate::numeric::{format_rational, one, ratio, zero, Rational};

type Q<A> = Dist<A, Rational>;

/// Which algebra and operator set to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxiomInstance {
    /// Ω = [0, 1], `o` = expectation, operators `+_p` and `⊤`.
    Quantitative,
    /// Ω = {⊥, ⊤} with `o` = expectation, operators `¬`, `∧`, thresholds at 1/2.
    BooleanWithExpectation,
}

/// An input together with its printed form, for counterexample reports.
struct Case<T> {
    shown: String,
    value: T,
}

impl<T> fmt::Debug for Case<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.shown)
    }
}

fn cases<T>(items: Vec<T>, show: impl Fn(&T) -> String) -> Vec<Case<T>> {
    items.into_iter().map(|value| Case { shown: show(&value), value }).collect()
}

fn differ(a: &Rational, b: &Rational, show: &impl Fn(&Rational) -> String) -> Option<(String, String)> {
    (a != b).then(|| (show(a), show(b)))
}

fn differ_dist<A: Atom>(a: &Q<A>, b: &Q<A>) -> Option<(String, String)> {
    (a != b).then(|| (format!("{a:?}"), format!("{b:?}")))
}

/// Distributions on `items` with weights in multiples of `1/q` for
/// `q = 1, 2, .., quantum` (powers of two), coarsest first, without repeats.
fn coarse_to_fine<A: Atom>(items: &[A], quantum: i64) -> Vec<Q<A>> {
    let mut out: Vec<Q<A>> = Vec::new();
    let mut q = 1;
    while q <= quantum {
        for d in grid_distributions(items, q) {
            if !out.contains(&d) {
                out.push(d);
            }
        }
        q *= 2;
    }
    out
}

fn expectation(mu: &Q<Rational>) -> Rational {
    mu.iter().map(|(v, p)| v * p).sum()
}

pub fn trace_logic_axiom_check(instance: AxiomInstance) -> LawReport {
    let boolean = instance == AxiomInstance::BooleanWithExpectation;
    let omega: Vec<Rational> = if boolean { vec![zero(), one()] } else { vec![zero(), ratio(1, 2), one()] };
    let show = move |v: &Rational| -> String {
        if boolean && *v == zero() {
            "⊥".to_string()
        } else if boolean && *v == one() {
            "⊤".to_string()
        } else {
            format_rational(v)
        }
    };
    let ket = |mu: &Q<Rational>| mu.to_ket(|v| show(v));
    let in_omega = |v: &Rational| !boolean || *v == zero() || *v == one();
    let threshold = ratio(1, 2);
    // the Boolean modalities compare the mass of ⊤ against 1/2
    let cut = |v: Rational| -> Rational {
        if !boolean {
            v
        } else if v >= threshold {
            one()
        } else {
            zero()
        }
    };
    let label_modality = |mu: &Q<(usize, Rational)>| cut(mu.iter().filter(|((b, _), _)| *b == 0).map(|((_, v), p)| v * p).sum());
    let delay_modality = |mu: &Q<Rational>| cut(expectation(mu));

    let mut report = LawReport::default();
    let simple = coarse_to_fine(&omega, 4);

    report.run("o maps into Ω", cases(simple.clone(), ket), |c| {
        let v = expectation(&c.value);
        (!in_omega(&v)).then(|| (show(&v), "an element of Ω".to_string()))
    });
    report.run("o unit", cases(omega.clone(), show), |c| {
        differ(&expectation(&Dist::dirac(c.value.clone())), &c.value, &show)
    });
    let nested = grid_distributions(&grid_distributions(&omega, 2), 2);
    report.run("o multiplication", cases(nested.clone(), |d| format!("{d:?}")), |c| {
        let left = expectation(&flatten(&c.value));
        let right = expectation(&c.value.map(expectation));
        differ(&left, &right, &show)
    });

    let pairs: Vec<(Rational, Rational)> =
        omega.iter().flat_map(|a| omega.iter().map(move |b| (a.clone(), b.clone()))).collect();
    let pair_dists = grid_distributions(&pairs, 2);
    if boolean {
        report.run("homomorphism ¬", cases(simple.clone(), ket), |c| {
            let left = one() - expectation(&c.value);
            let right = expectation(&c.value.map(|v| one() - v));
            differ(&left, &right, &show)
        });
        report.run("homomorphism ∧", cases(pair_dists.clone(), |d| format!("{d:?}")), |c| {
            let a = expectation(&c.value.map(|(a, _)| a.clone()));
            let b = expectation(&c.value.map(|(_, b)| b.clone()));
            let right = expectation(&c.value.map(|(a, b)| a.min(b).clone()));
            differ(&a.min(b), &right, &show)
        });
    } else {
        for p in [ratio(1, 4), ratio(1, 2), ratio(3, 4)] {
            let name = format!("homomorphism +_{}", format_rational(&p));
            let mix = |a: &Rational, b: &Rational| &p * a + (one() - &p) * b;
            report.run(&name, cases(pair_dists.clone(), |d| format!("{d:?}")), |c| {
                let a = expectation(&c.value.map(|(a, _)| a.clone()));
                let b = expectation(&c.value.map(|(_, b)| b.clone()));
                let right = expectation(&c.value.map(|(a, b)| mix(a, b)));
                differ(&mix(&a, &b), &right, &show)
            });
        }
        report.run("homomorphism ⊤", cases(vec![Dist::<(), Rational>::dirac(())], |_| "δ(∗)".to_string()), |c| {
            differ(&one(), &expectation(&c.value.map(|_| one())), &show)
        });
    }

    // modal diagrams for (b) with b = 0 over the alphabet {0, 1}
    let inner = grid_distributions(&omega, 2);
    let labelled_inner: Vec<(usize, Q<Rational>)> =
        (0..2).flat_map(|b| inner.iter().map(move |d| (b, d.clone()))).collect();
    report.run("left diagram (b)", cases(grid_distributions(&labelled_inner, 2), |d| format!("{d:?}")), |c| {
        let joined = c.value.bind(|(b, nu)| nu.strength(b));
        let pushed = c.value.map(|(b, nu)| (*b, expectation(nu)));
        differ(&label_modality(&joined), &label_modality(&pushed), &show)
    });
    let labelled_omega: Vec<(usize, Rational)> =
        (0..2).flat_map(|b| omega.iter().map(move |v| (b, v.clone()))).collect();
    let outer = grid_distributions(&grid_distributions(&labelled_omega, 2), 2);
    report.run("right diagram (b)", cases(outer, |d| format!("{d:?}")), |c| {
        let left = label_modality(&flatten(&c.value));
        let right = expectation(&c.value.map(label_modality));
        differ(&left, &right, &show)
    });
    report.run("left diagram <r>", cases(nested.clone(), |d| format!("{d:?}")), |c| {
        differ(&delay_modality(&flatten(&c.value)), &delay_modality(&c.value.map(expectation)), &show)
    });
    report.run("right diagram <r>", cases(nested, |d| format!("{d:?}")), |c| {
        differ(&delay_modality(&flatten(&c.value)), &expectation(&c.value.map(delay_modality)), &show)
    });

    split_coequalizer_checks(&mut report);
    report
}

type Point = (Vec<usize>, usize);

fn points(n: usize) -> Vec<Point> {
    let mut words: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..n {
        words = words.into_iter().flat_map(|w| (0..2).map(move |b| [w.clone(), vec![b]].concat())).collect();
    }
    words.into_iter().flat_map(|w| (0..2).map(move |x| (w.clone(), x))).collect()
}

/// The identities exhibiting `μ^{g,t}` as a split coequalizer of
/// `M_g μ^{e,t}` and `μ^{g,e} M_t`, for `g ∈ {(0,1), (r,0)}`, `M_t X = D(B^n × X)`
/// with `B = X = {0, 1}` and `n ≤ 1`.
fn split_coequalizer_checks(report: &mut LawReport) {
    for n in 0..2 {
        let ys = points(n);
        let inner = grid_distributions(&ys, 2);

        // g = (0, 1): M_g Y = D(B × Y)
        let e = |xi: &Q<(usize, Q<Point>)>| {
            xi.bind(|(b, nu)| nu.map(|(u, x)| ([vec![*b], u.clone()].concat(), *x)))
        };
        let s = |zeta: &Q<Point>| zeta.map(|(bu, x)| (bu[0], Dist::dirac((bu[1..].to_vec(), *x))));
        let t = |xi: &Q<(usize, Q<Point>)>| xi.map(|(b, nu)| (*b, nu.map(|y| Dist::dirac(y.clone()))));
        let f = |th: &Q<(usize, Q<Q<Point>>)>| th.map(|(b, psi)| (*b, flatten(psi)));
        let g = |th: &Q<(usize, Q<Q<Point>>)>| th.bind(|(b, psi)| psi.strength(b));

        let longer = grid_distributions(&points(n + 1), 2);
        report.run(&format!("coequalizer e∘s = id, g=(0,1), n={n}"), cases(longer, |d| format!("{d:?}")), |c| {
            differ_dist(&e(&s(&c.value)), &c.value)
        });
        let labelled: Vec<(usize, Q<Point>)> = (0..2).flat_map(|b| inner.iter().map(move |d| (b, d.clone()))).collect();
        let xis = grid_distributions(&labelled, 2);
        report.run(&format!("coequalizer f∘t = id, g=(0,1), n={n}"), cases(xis.clone(), |d| format!("{d:?}")), |c| {
            differ_dist(&f(&t(&c.value)), &c.value)
        });
        report.run(&format!("coequalizer g∘t = s∘e, g=(0,1), n={n}"), cases(xis, |d| format!("{d:?}")), |c| {
            differ_dist(&g(&t(&c.value)), &s(&e(&c.value)))
        });

        // g = (r, 0): M_g Y = D Y
        let e0 = |phi: &Q<Q<Point>>| flatten(phi);
        let s0 = |zeta: &Q<Point>| zeta.map(|y| Dist::dirac(y.clone()));
        let t0 = |phi: &Q<Q<Point>>| phi.map(|nu| nu.map(|y| Dist::dirac(y.clone())));
        let f0 = |th: &Q<Q<Q<Point>>>| th.map(flatten);
        let g0 = |th: &Q<Q<Q<Point>>>| flatten(th);
        report.run(&format!("coequalizer e∘s = id, g=(r,0), n={n}"), cases(inner.clone(), |d| format!("{d:?}")), |c| {
            differ_dist(&e0(&s0(&c.value)), &c.value)
        });
        let phis = grid_distributions(&inner, 2);
        report.run(&format!("coequalizer f∘t = id, g=(r,0), n={n}"), cases(phis.clone(), |d| format!("{d:?}")), |c| {
            differ_dist(&f0(&t0(&c.value)), &c.value)
        });
        report.run(&format!("coequalizer g∘t = s∘e, g=(r,0), n={n}"), cases(phis, |d| format!("{d:?}")), |c| {
            differ_dist(&g0(&t0(&c.value)), &s0(&e0(&c.value)))
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantitative_instance_passes() {
        let r = trace_logic_axiom_check(AxiomInstance::Quantitative);
        assert!(r.passed(), "{:?}", r.counterexample);
        assert!(r.checked.iter().any(|(name, _)| name.starts_with("coequalizer")));
        assert!(r.checked.iter().all(|(_, n)| *n > 0));
    }

    #[test]
    fn boolean_with_expectation_fails_at_half() {
        let r = trace_logic_axiom_check(AxiomInstance::BooleanWithExpectation);
        let c = r.counterexample.expect("must fail");
        assert_eq!(c.law, "o maps into Ω");
        assert_eq!(c.input, "1/2|⊥⟩ + 1/2|⊤⟩");
        assert_eq!(c.left, "0.5");
    }
}
