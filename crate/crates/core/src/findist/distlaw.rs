//! Finite-instance checks of the monad laws of `D` and of the graded
//! distributive law `B^u × D X -> D(B^u × X)` induced by the strength.
//!
//! Everything here runs in exact rational arithmetic over small enumerated
//! carriers. Mutated variants of the law and of `bind` are provided so that
//! the checkers can be shown to reject broken structure.

use std::fmt;

use super::{flatten, Atom, Dist};
use crate::numeric::{ratio, Rational};

/// A word over label indices; the `u`-fold power `B^u` of the label set.
pub type LabelWord = Vec<usize>;

type QDist<A> = Dist<A, Rational>;

/// Which distributive law to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LawVariant {
    Strength,
    /// The strength with labels 0 and 1 exchanged in the first letter.
    SwapLabel,
}

impl LawVariant {
    pub fn apply<A: Atom>(&self, word: &LabelWord, d: &QDist<A>) -> QDist<(LabelWord, A)> {
        match self {
            LawVariant::Strength => d.strength(word),
            LawVariant::SwapLabel => {
                let mut w = word.clone();
                if let Some(first) = w.first_mut() {
                    *first = match *first {
                        0 => 1,
                        1 => 0,
                        other => other,
                    };
                }
                d.strength(&w)
            }
        }
    }
}

/// Which Kleisli extension to check against the monad laws.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BindVariant {
    Standard,
    /// Ignores the input weights and continues from the first atom only.
    FirstAtom,
}

impl BindVariant {
    pub fn apply<A: Atom, B: Atom>(&self, d: &QDist<A>, f: impl Fn(&A) -> QDist<B>) -> QDist<B> {
        match self {
            BindVariant::Standard => d.bind(f),
            BindVariant::FirstAtom => d.support().next().map(f).unwrap_or_else(Dist::empty),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub law: String,
    pub input: String,
    pub left: String,
    pub right: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails at {}: {} != {}", self.law, self.input, self.left, self.right)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LawReport {
    /// `(law name, number of instances checked)`, in check order.
    pub checked: Vec<(String, usize)>,
    pub counterexample: Option<Counterexample>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    pub fn total(&self) -> usize {
        self.checked.iter().map(|(_, n)| n).sum()
    }

    pub(crate) fn run<I, T>(&mut self, law: &str, inputs: I, mut check: impl FnMut(&T) -> Option<(String, String)>)
    where
        I: IntoIterator<Item = T>,
        T: fmt::Debug,
    {
        if self.counterexample.is_some() {
            return;
        }
        let mut n = 0;
        for input in inputs {
            n += 1;
            if let Some((left, right)) = check(&input) {
                self.counterexample = Some(Counterexample {
                    law: law.to_string(),
                    input: format!("{input:?}"),
                    left,
                    right,
                });
                break;
            }
        }
        self.checked.push((law.to_string(), n));
    }
}

fn compare<A: Atom>(left: &QDist<A>, right: &QDist<A>) -> Option<(String, String)> {
    (left != right).then(|| (format!("{left:?}"), format!("{right:?}")))
}

/// Bounds of the enumeration.
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub max_carrier: usize,
    pub max_labels: usize,
    pub max_word_len: usize,
    /// Weight grid is `{0, 1/q, ..., 1}`.
    pub quantum: i64,
}

impl Default for Enumeration {
    fn default() -> Self {
        Enumeration { max_carrier: 3, max_labels: 2, max_word_len: 2, quantum: 4 }
    }
}

/// Every full distribution over `items` whose weights lie on the `1/q` grid.
pub fn grid_distributions<A: Atom>(items: &[A], quantum: i64) -> Vec<QDist<A>> {
    let mut out = Vec::new();
    let mut parts = vec![0i64; items.len()];
    fn rec<A: Atom>(i: usize, left: i64, parts: &mut Vec<i64>, items: &[A], q: i64, out: &mut Vec<QDist<A>>) {
        if i + 1 == items.len() {
            parts[i] = left;
            out.push(Dist::from_weights(items.iter().cloned().zip(parts.iter().map(|&p| ratio(p, q)))));
            return;
        }
        for p in (0..=left).rev() {
            parts[i] = p;
            rec(i + 1, left - p, parts, items, q, out);
        }
    }
    if !items.is_empty() {
        rec(0, quantum, &mut parts, items, quantum, &mut out);
    }
    out
}

/// All words of length `0..=max_len` over `labels` letters, shortest first.
pub fn label_words(labels: usize, max_len: usize) -> Vec<LabelWord> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<LabelWord> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for b in 0..labels {
                let mut v = w.clone();
                v.push(b);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Checks the four diagrams (multiplication and unit for both monads) of the
/// graded distributive law on the full enumeration.
pub fn check_distributive_law(law: LawVariant, bounds: &Enumeration) -> LawReport {
    let mut report = LawReport::default();
    for n in 1..=bounds.max_carrier {
        let carrier: Vec<usize> = (0..n).collect();
        let dists = grid_distributions(&carrier, bounds.quantum);
        let nested = grid_distributions(&dists, bounds.quantum);
        for labels in 1..=bounds.max_labels {
            let words = label_words(labels, bounds.max_word_len);

            let unit_inputs = words.iter().flat_map(|w| carrier.iter().map(move |x| (w.clone(), *x)));
            report.run(&format!("unit of D (n={n}, labels={labels})"), unit_inputs, |(w, x)| {
                compare(&law.apply(w, &Dist::dirac(*x)), &Dist::dirac((w.clone(), *x)))
            });

            report.run(&format!("unit of B^- (n={n}, labels={labels})"), dists.iter(), |d| {
                compare(&law.apply(&Vec::new(), d), &d.map(|x| (Vec::new(), *x)))
            });

            let mult_inputs = words.iter().flat_map(|w| nested.iter().map(move |dd| (w, dd)));
            report.run(&format!("multiplication of D (n={n}, labels={labels})"), mult_inputs, |(w, dd)| {
                let left = law.apply(w, &flatten(dd));
                let right = dd.bind(|d| law.apply(w, d));
                compare(&left, &right)
            });

            let pairs = words
                .iter()
                .flat_map(|u| words.iter().map(move |v| (u, v)))
                .flat_map(|(u, v)| dists.iter().map(move |d| (u, v, d)));
            report.run(&format!("multiplication of B^- (n={n}, labels={labels})"), pairs, |(u, v, d)| {
                let uv: LabelWord = u.iter().chain(v.iter()).copied().collect();
                let left = law.apply(&uv, d);
                let right = law.apply(u, &law.apply(v, d)).map(|(a, (b, x))| {
                    let mut w = a.clone();
                    w.extend(b.iter().copied());
                    (w, *x)
                });
                compare(&left, &right)
            });
        }
    }
    report
}

/// Monad laws of `D` on the grid enumeration: both unit laws over carriers
/// up to `max_carrier`, associativity over carriers up to `max_assoc_carrier`.
pub fn check_monad_laws(bind: BindVariant, max_carrier: usize, max_assoc_carrier: usize, quantum: i64) -> LawReport {
    let mut report = LawReport::default();
    for n in 1..=max_carrier {
        let carrier: Vec<usize> = (0..n).collect();
        let dists = grid_distributions(&carrier, quantum);
        let kernels = kleisli_maps(&dists, n);

        let left_inputs = carrier.iter().flat_map(|x| kernels.iter().map(move |f| (*x, f)));
        report.run(&format!("left unit (n={n})"), left_inputs, |(x, f)| {
            compare(&bind.apply(&Dist::dirac(*x), |y| f[*y].clone()), &f[*x])
        });

        report.run(&format!("right unit (n={n})"), dists.iter(), |d| compare(&bind.apply(d, |y| Dist::dirac(*y)), d));

        if n <= max_assoc_carrier {
            let assoc_inputs = dists
                .iter()
                .flat_map(|d| kernels.iter().map(move |f| (d, f)))
                .flat_map(|(d, f)| kernels.iter().map(move |g| (d, f, g)));
            report.run(&format!("associativity (n={n})"), assoc_inputs, |(d, f, g)| {
                let left = bind.apply(&bind.apply(d, |x| f[*x].clone()), |y| g[*y].clone());
                let right = bind.apply(d, |x| bind.apply(&f[*x], |y| g[*y].clone()));
                compare(&left, &right)
            });
        }

        let natural_inputs = dists.iter().flat_map(|d| kernels.iter().map(move |f| (d, f)));
        report.run(&format!("naturality of bind (n={n})"), natural_inputs, |(d, f)| {
            let h = |x: &usize| (x + 1) % n.max(1);
            let left = bind.apply(d, |x| f[*x].clone()).map(h);
            let right = bind.apply(d, |x| f[*x].map(h));
            compare(&left, &right)
        });
    }
    report
}

fn kleisli_maps(dists: &[QDist<usize>], n: usize) -> Vec<Vec<QDist<usize>>> {
    let mut out: Vec<Vec<QDist<usize>>> = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                dists.iter().map(move |d| {
                    let mut f = prefix.clone();
                    f.push(d.clone());
                    f
                })
            })
            .collect();
    }
    out
}
