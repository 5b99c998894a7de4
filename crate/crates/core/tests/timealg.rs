use proptest::prelude::*;

use graded_coalg::numeric::ratio;
use graded_coalg::timealg::{count_morphism, length_morphism, samp_mul, samp_normalize, SamplingWord, TimeValue};
use graded_coalg::Error;

fn raw_word() -> impl Strategy<Value = Vec<(i64, i64, i64)>> {
    prop::collection::vec((0i64..6, 1i64..4, 0i64..3), 0..5)
}

fn build(raw: &[(i64, i64, i64)]) -> SamplingWord {
    let pairs: Vec<_> = raw.iter().map(|&(n, d, k)| (ratio(n, d), k)).collect();
    samp_normalize(&pairs).unwrap()
}

proptest! {
    #[test]
    fn monoid_laws(a in raw_word(), b in raw_word(), c in raw_word()) {
        let (u, v, w) = (build(&a), build(&b), build(&c));
        prop_assert_eq!(samp_mul(&samp_mul(&u, &v), &w), samp_mul(&u, &samp_mul(&v, &w)));
        prop_assert_eq!(samp_mul(&SamplingWord::unit(), &u), u.clone());
        prop_assert_eq!(samp_mul(&u, &SamplingWord::unit()), u.clone());
    }

    #[test]
    fn morphisms(a in raw_word(), b in raw_word()) {
        let (u, v) = (build(&a), build(&b));
        let uv = samp_mul(&u, &v);
        prop_assert_eq!(length_morphism(&uv), length_morphism(&u) + length_morphism(&v));
        prop_assert_eq!(count_morphism(&uv), count_morphism(&u) + count_morphism(&v));
    }

    #[test]
    fn normal_form_is_canonical(a in raw_word()) {
        let u = build(&a);
        prop_assert!(u.is_normalized());
        prop_assert_eq!(u.to_string().parse::<SamplingWord>().unwrap(), u.clone());
        // the generators multiply back to the word
        let rebuilt = u.generators().iter().fold(SamplingWord::unit(), |acc, g| acc.mul(g));
        prop_assert_eq!(rebuilt, u);
    }
}

#[test]
fn junction_rules() {
    let w = |s: &str| s.parse::<SamplingWord>().unwrap();
    // trailing zero count absorbs the next delay
    assert_eq!(w("1:0").mul(&w("2:1")), w("3:1"));
    // zero delay merges the observation counts
    assert_eq!(w("1:2").mul(&w("0:1,1:0")), w("1:3,1:0"));
    // otherwise the words are concatenated
    assert_eq!(w("1:2").mul(&w("1/2:1")).to_string(), "1:2,0.5:1");
    assert_eq!(w("0:0,0:0,1:0"), w("1:0"));
    assert!(w("").is_unit());
}

#[test]
fn parse_errors() {
    assert!(matches!("1:1,x:2".parse::<SamplingWord>(), Err(Error::Parse { offset: 4, .. })));
    assert!("1:-1".parse::<SamplingWord>().is_err());
    assert!("-1:1".parse::<SamplingWord>().is_err());
    assert!(TimeValue::from_ratio(-1, 2).is_err());
}
