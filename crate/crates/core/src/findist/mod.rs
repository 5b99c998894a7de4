//! Finitely-supported (sub)distributions: the branching monad `D` and its
//! partial variant `D(- + 1)`.
//!
//! Both are represented by [`Dist`]; a subdistribution simply carries total
//! mass below one, the missing mass being the implicit termination atom.
//! Atoms iterate in the `Ord` order of the carrier so output is reproducible.

mod weight;
pub mod distlaw;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

pub use weight::Weight;

/// Mass tolerance for float-mode distributions.
pub const EPS_MASS: f64 = 1e-9;

pub trait Atom: Clone + Ord + fmt::Debug {}
impl<T: Clone + Ord + fmt::Debug> Atom for T {}

#[derive(Clone, PartialEq)]
pub struct Dist<A: Atom, W: Weight> {
    atoms: BTreeMap<A, W>,
}

pub type FinDist<A, W> = Dist<A, W>;
pub type FinSubDist<A, W> = Dist<A, W>;

impl<A: Atom, W: Weight> Dist<A, W> {
    /// The empty subdistribution (all mass on termination).
    pub fn empty() -> Self {
        Dist { atoms: BTreeMap::new() }
    }

    /// Accumulates weights without any mass check; zero weights are dropped.
    pub fn from_weights<I: IntoIterator<Item = (A, W)>>(items: I) -> Self {
        let mut atoms: BTreeMap<A, W> = BTreeMap::new();
        for (a, w) in items {
            if w.is_zero() {
                continue;
            }
            match atoms.get_mut(&a) {
                Some(acc) => *acc = acc.add(&w),
                None => {
                    atoms.insert(a, w);
                }
            }
        }
        atoms.retain(|_, w| !w.is_zero());
        Dist { atoms }
    }

    /// A full distribution: nonnegative weights of total mass one.
    pub fn full<I: IntoIterator<Item = (A, W)>>(items: I) -> Result<Self> {
        let d = Self::checked(items)?;
        if !d.is_full() {
            return Err(Error::invalid(format!("distribution has mass {}, expected 1", d.mass().format())));
        }
        Ok(d)
    }

    /// A subdistribution: nonnegative weights of total mass at most one.
    pub fn sub<I: IntoIterator<Item = (A, W)>>(items: I) -> Result<Self> {
        let d = Self::checked(items)?;
        if !d.is_sub() {
            return Err(Error::invalid(format!("subdistribution has mass {} > 1", d.mass().format())));
        }
        Ok(d)
    }

    fn checked<I: IntoIterator<Item = (A, W)>>(items: I) -> Result<Self> {
        let items: Vec<(A, W)> = items.into_iter().collect();
        if let Some((a, w)) = items.iter().find(|(_, w)| w.is_negative()) {
            return Err(Error::invalid(format!("negative weight {} at {a:?}", w.format())));
        }
        Ok(Self::from_weights(items))
    }

    pub fn dirac(x: A) -> Self {
        let mut atoms = BTreeMap::new();
        atoms.insert(x, W::one());
        Dist { atoms }
    }

    /// Uniform distribution over the given (deduplicated) atoms.
    pub fn uniform<I: IntoIterator<Item = A>>(items: I) -> Result<Self> {
        let set: std::collections::BTreeSet<A> = items.into_iter().collect();
        if set.is_empty() {
            return Err(Error::invalid("uniform distribution over an empty set"));
        }
        let w = W::from_rational(&crate::numeric::ratio(1, set.len() as i64));
        Ok(Dist { atoms: set.into_iter().map(|a| (a, w.clone())).collect() })
    }

    pub fn get(&self, a: &A) -> W {
        self.atoms.get(a).cloned().unwrap_or_else(W::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&A, &W)> {
        self.atoms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &A> {
        self.atoms.keys()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mass(&self) -> W {
        self.atoms.values().fold(W::zero(), |acc, w| acc.add(w))
    }

    pub fn is_full(&self) -> bool {
        let m = self.mass();
        if W::exact() {
            m == W::one()
        } else {
            (m.to_f64() - 1.0).abs() <= EPS_MASS
        }
    }

    pub fn is_sub(&self) -> bool {
        let m = self.mass();
        if W::exact() {
            m <= W::one()
        } else {
            m.to_f64() <= 1.0 + EPS_MASS
        }
    }

    /// Kleisli extension: `sum_x d(x) * f(x)`.
    pub fn bind<B: Atom, F>(&self, mut f: F) -> Dist<B, W>
    where
        F: FnMut(&A) -> Dist<B, W>,
    {
        let mut out: BTreeMap<B, W> = BTreeMap::new();
        for (a, w) in &self.atoms {
            for (b, v) in f(a).atoms {
                let contrib = w.mul(&v);
                match out.get_mut(&b) {
                    Some(acc) => *acc = acc.add(&contrib),
                    None => {
                        out.insert(b, contrib);
                    }
                }
            }
        }
        out.retain(|_, w| !w.is_zero());
        Dist { atoms: out }
    }

    /// Functor action: sums weights over preimages of `g`.
    pub fn map<B: Atom, F>(&self, mut g: F) -> Dist<B, W>
    where
        F: FnMut(&A) -> B,
    {
        Dist::from_weights(self.atoms.iter().map(|(a, w)| (g(a), w.clone())))
    }

    /// Attaches a fixed label to every atom.
    pub fn strength<L: Atom>(&self, label: &L) -> Dist<(L, A), W> {
        Dist { atoms: self.atoms.iter().map(|(a, w)| ((label.clone(), a.clone()), w.clone())).collect() }
    }

    /// Independent product.
    pub fn product<B: Atom>(&self, other: &Dist<B, W>) -> Dist<(A, B), W> {
        let mut atoms = BTreeMap::new();
        for (a, w) in &self.atoms {
            for (b, v) in &other.atoms {
                let p = w.mul(v);
                if !p.is_zero() {
                    atoms.insert((a.clone(), b.clone()), p);
                }
            }
        }
        Dist { atoms }
    }

    pub fn scale(&self, factor: &W) -> Self {
        Dist::from_weights(self.atoms.iter().map(|(a, w)| (a.clone(), w.mul(factor))))
    }

    pub fn convert<V: Weight>(&self, f: impl Fn(&W) -> V) -> Dist<A, V> {
        Dist::from_weights(self.atoms.iter().map(|(a, w)| (a.clone(), f(w))))
    }

    pub fn to_f64(&self) -> Dist<A, f64> {
        self.convert(|w| w.to_f64())
    }

    /// Largest per-atom weight difference over the union of supports.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, w) in &self.atoms {
            worst = worst.max(w.sub(&other.get(a)).abs().to_f64());
        }
        for (a, w) in &other.atoms {
            if !self.atoms.contains_key(a) {
                worst = worst.max(w.abs().to_f64());
            }
        }
        worst
    }

    /// `p|atom⟩ + p|atom⟩`, with `0` for the empty subdistribution.
    pub fn to_ket(&self, mut show: impl FnMut(&A) -> String) -> String {
        if self.atoms.is_empty() {
            return "0".to_string();
        }
        self.atoms
            .iter()
            .map(|(a, w)| format!("{}|{}⟩", w.format(), show(a)))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// One `(atom, weight)` CSV row per atom.
    pub fn to_csv_rows(&self, mut show: impl FnMut(&A) -> String) -> Vec<String> {
        self.atoms.iter().map(|(a, w)| format!("{},{}", show(a), w.format())).collect()
    }
}

/// Shows a weight through [`Weight::format`] inside debug output.
struct Shown(String);

impl fmt::Debug for Shown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<A: Atom, W: Weight> fmt::Debug for Dist<A, W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.atoms.iter().map(|(a, w)| (a, Shown(w.format())))).finish()
    }
}

impl<A: Atom + fmt::Display, W: Weight> fmt::Display for Dist<A, W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_ket(|a| a.to_string()))
    }
}

pub fn dirac<A: Atom, W: Weight>(x: A) -> Dist<A, W> {
    Dist::dirac(x)
}

pub fn bind<A: Atom, B: Atom, W: Weight>(d: &Dist<A, W>, f: impl FnMut(&A) -> Dist<B, W>) -> Dist<B, W> {
    d.bind(f)
}

pub fn strength<L: Atom, A: Atom, W: Weight>(label: &L, d: &Dist<A, W>) -> Dist<(L, A), W> {
    d.strength(label)
}

pub fn product<A: Atom, B: Atom, W: Weight>(d1: &Dist<A, W>, d2: &Dist<B, W>) -> Dist<(A, B), W> {
    d1.product(d2)
}

pub fn pushforward<A: Atom, B: Atom, W: Weight>(d: &Dist<A, W>, g: impl FnMut(&A) -> B) -> Dist<B, W> {
    d.map(g)
}

/// Equality up to `tol`; with `tol == 0` the comparison is exact.
pub fn dist_eq<A: Atom, W: Weight>(d1: &Dist<A, W>, d2: &Dist<A, W>, tol: f64) -> bool {
    if tol == 0.0 {
        return d1 == d2;
    }
    d1.max_abs_diff(d2) <= tol
}

/// Flattening `D D X -> D X`.
pub fn flatten<A: Atom, W: Weight>(dd: &Dist<Dist<A, W>, W>) -> Dist<A, W>
where
    Dist<A, W>: Ord,
{
    dd.bind(|d| d.clone())
}

impl<A: Atom, W: Weight + Ord> Eq for Dist<A, W> {}

impl<A: Atom, W: Weight + Ord> PartialOrd for Dist<A, W> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<A: Atom, W: Weight + Ord> Ord for Dist<A, W> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.atoms.iter().cmp(other.atoms.iter())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{ratio, Rational};

    type Q = Dist<char, Rational>;

    fn q(items: &[(char, i64, i64)]) -> Q {
        Dist::full(items.iter().map(|&(a, n, d)| (a, ratio(n, d)))).unwrap()
    }

    #[test]
    fn dirac_and_unit_laws() {
        let d: Q = dirac('a');
        assert_eq!(d.get(&'a'), ratio(1, 1));
        let f = |x: &char| if *x == 'a' { q(&[('c', 1, 1)]) } else { q(&[('c', 1, 2), ('d', 1, 2)]) };
        assert_eq!(d.bind(f), q(&[('c', 1, 1)]));
        assert_eq!(d.map(|c| c.to_ascii_uppercase()), dirac('A'));
    }

    #[test]
    fn bind_hand_convolution() {
        let d = q(&[('a', 1, 2), ('b', 1, 2)]);
        assert_eq!(d.bind(|x| dirac(*x)), d);
        let f = |x: &char| if *x == 'a' { q(&[('c', 1, 1)]) } else { q(&[('c', 1, 2), ('d', 1, 2)]) };
        assert_eq!(d.bind(f), q(&[('c', 3, 4), ('d', 1, 4)]));
    }

    #[test]
    fn strength_examples() {
        let d = q(&[('x', 1, 3), ('y', 2, 3)]);
        let s = strength(&'b', &d);
        assert_eq!(s.get(&('b', 'x')), ratio(1, 3));
        assert_eq!(s.get(&('b', 'y')), ratio(2, 3));
        assert_eq!(strength(&'b', &dirac::<char, Rational>('x')), dirac(('b', 'x')));
        assert_eq!(s.map(|(_, x)| *x), d);
    }

    #[test]
    fn product_examples() {
        let coin = q(&[('y', 1, 2), ('n', 1, 2)]);
        let p = product(&coin, &coin);
        assert_eq!(p.len(), 4);
        assert!(p.iter().all(|(_, w)| *w == ratio(1, 4)));
        let tagged = product(&dirac::<char, Rational>('a'), &coin);
        assert_eq!(tagged.map(|(_, x)| *x), coin);
        let half: Dist<char, Rational> = Dist::sub([('u', ratio(1, 2))]).unwrap();
        assert_eq!(product(&half, &coin).mass(), ratio(1, 2));
    }

    #[test]
    fn pushforward_examples() {
        let d: Dist<(char, char), Rational> =
            Dist::full([(('y', 's'), ratio(1, 4)), (('n', 's'), ratio(3, 4))]).unwrap();
        assert_eq!(pushforward(&d, |(b, _)| *b), q(&[('y', 1, 4), ('n', 3, 4)]));
        assert_eq!(pushforward(&d, |x| *x), d);
        let sub: Dist<char, Rational> = Dist::sub([('a', ratio(1, 3)), ('b', ratio(1, 3))]).unwrap();
        assert_eq!(pushforward(&sub, |_| ()), Dist::from_weights([((), ratio(2, 3))]));
    }

    #[test]
    fn dist_eq_examples() {
        let d = q(&[('a', 1, 2), ('b', 1, 2)]);
        assert!(dist_eq(&d, &d, 0.0));
        let a: Dist<char, f64> = dirac('a');
        let almost: Dist<char, f64> = Dist::from_weights([('a', 1.0 - 1e-12)]);
        assert!(dist_eq(&a, &almost, 1e-9));
        assert!(!dist_eq(&a, &dirac('b'), 1e-9));
        assert!(!dist_eq(&a, &almost, 0.0));
    }

    #[test]
    fn validation() {
        assert!(Dist::<char, Rational>::full([('a', ratio(1, 2))]).is_err());
        assert!(Dist::<char, Rational>::sub([('a', ratio(3, 2))]).is_err());
        assert!(Dist::<char, Rational>::sub([('a', ratio(-1, 2))]).is_err());
        assert!(Dist::<char, f64>::full([('a', 0.5), ('b', 0.5 + 1e-12)]).is_ok());
        let d = Dist::<char, Rational>::from_weights([('a', ratio(0, 1)), ('b', ratio(1, 1))]);
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn ket_and_csv() {
        let d = q(&[('a', 1, 2), ('b', 1, 2)]);
        assert_eq!(d.to_string(), "1/2|a⟩ + 1/2|b⟩");
        assert_eq!(d.to_f64().to_string(), "0.5|a⟩ + 0.5|b⟩");
        assert_eq!(d.to_csv_rows(|a| a.to_string()), ["a,1/2", "b,1/2"]);
        assert_eq!(Dist::<char, f64>::empty().to_string(), "0");
    }

    #[test]
    fn flatten_matches_bind() {
        let inner1 = q(&[('a', 1, 2), ('b', 1, 2)]);
        let inner2 = q(&[('b', 1, 1)]);
        let outer: Dist<Q, Rational> = Dist::full([(inner1, ratio(1, 2)), (inner2, ratio(1, 2))]).unwrap();
        assert_eq!(flatten(&outer), q(&[('a', 1, 4), ('b', 3, 4)]));
    }
}
