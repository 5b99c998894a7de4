use proptest::prelude::*;

use graded_coalg::findist::distlaw::{check_distributive_law, check_monad_laws, BindVariant, Enumeration, LawVariant};
use graded_coalg::findist::{bind, dist_eq, dirac, flatten, product, pushforward, Dist};
use graded_coalg::numeric::{int, ratio, Rational};

fn qdist() -> impl Strategy<Value = Dist<u8, Rational>> {
    prop::collection::vec((0u8..4, 1i64..5), 1..4).prop_map(|items| {
        let total: i64 = items.iter().map(|p| p.1).sum();
        Dist::from_weights(items.into_iter().map(|(a, w)| (a, ratio(w, total))))
    })
}

fn kernel(seed: u8) -> impl Fn(&u8) -> Dist<u8, Rational> {
    move |x| Dist::from_weights([((x + seed) % 4, ratio(1, 3)), ((x * 2 + 1) % 4, ratio(2, 3))])
}

proptest! {
    #[test]
    fn unit_laws(d in qdist(), x in 0u8..4) {
        let f = kernel(1);
        prop_assert_eq!(bind(&dirac(x), &f), f(&x));
        prop_assert_eq!(bind(&d, |y| dirac(*y)), d.clone());
    }

    #[test]
    fn associativity(d in qdist()) {
        let (f, g) = (kernel(1), kernel(2));
        prop_assert_eq!(bind(&bind(&d, &f), &g), bind(&d, |x| bind(&f(x), &g)));
    }

    #[test]
    fn mass_and_marginals(d in qdist(), e in qdist()) {
        prop_assert_eq!(d.mass(), int(1));
        let p = product(&d, &e);
        prop_assert_eq!(pushforward(&p, |(a, _)| *a), d.clone());
        prop_assert_eq!(pushforward(&p, |(_, b)| *b), e);
    }

    #[test]
    fn flatten_matches_bind(d in qdist()) {
        let f = kernel(3);
        let nested: Dist<Dist<u8, Rational>, Rational> = d.map(|x| f(x));
        prop_assert_eq!(flatten(&nested), bind(&d, &f));
    }
}

#[test]
fn validation() {
    assert!(Dist::full([(0, ratio(1, 2)), (1, ratio(1, 3))]).is_err());
    assert!(Dist::sub([(0, ratio(1, 2)), (1, ratio(1, 3))]).is_ok());
    assert!(Dist::sub([(0, ratio(3, 2))]).is_err());
    assert!(Dist::<u8, Rational>::full([(0, ratio(-1, 2)), (1, ratio(3, 2))]).is_err());
    let d: Dist<u8, f64> = Dist::from_weights([(0, 0.5), (0, 0.25), (1, 0.0)]);
    assert_eq!(d.len(), 1);
    assert!(dist_eq(&d, &Dist::from_weights([(0, 0.75)]), 1e-15));
}

#[test]
fn law_checkers() {
    assert!(check_distributive_law(LawVariant::Strength, &Enumeration { max_carrier: 2, ..Enumeration::default() }).passed());
    assert!(!check_distributive_law(LawVariant::SwapLabel, &Enumeration::default()).passed());
    assert!(check_monad_laws(BindVariant::Standard, 2, 2, 4).passed());
    let r = check_monad_laws(BindVariant::FirstAtom, 2, 2, 4);
    let c = r.counterexample.expect("mutation is caught");
    assert_eq!(c.law, "right unit (n=2)");
}

#[test]
fn ket_output() {
    let d = Dist::from_weights([(2, ratio(1, 4)), (1, ratio(3, 4))]);
    assert_eq!(d.to_ket(|x| x.to_string()), "3/4|1⟩ + 1/4|2⟩");
}
