use std::collections::{BTreeMap, BTreeSet};

use graded_coalg::ctmc::repairable_4state;
use graded_coalg::findist::Dist;
use graded_coalg::gcoalg::{
    behavioural_equivalent, check_graded_axioms, composite_at, enumerate_words, extend_graded_semantics, kleisli,
    random_walk, trace_equivalent, trace_vector, DeterministicSystem, PowersetCoalgebra, TraceConfig, TraceVerdict,
    WordGradedKernel,
};
use graded_coalg::numeric::{int, ratio, to_f64, Rational};
use graded_coalg::timealg::{SamplingWord, TimeValue};
use graded_coalg::Error;

fn word(s: &str) -> SamplingWord {
    s.parse().unwrap()
}

/// Trace of `(t, 1, s, 1)` by summing over the two landing states.
fn two_observation_oracle(x: usize, t: &TimeValue, s: &TimeValue) -> BTreeMap<(usize, usize), f64> {
    let m = repairable_4state(&int(1), &int(2)).unwrap();
    let (kt, ks) = (m.kernel_at(t), m.kernel_at(s));
    let obs = |y: usize, b: usize| to_f64(&m.obs(y).get(&b));
    let mut out = BTreeMap::new();
    for y in 0..4 {
        for z in 0..4 {
            for b1 in 0..2 {
                for b2 in 0..2 {
                    let p = kt.entry(y, x) * obs(y, b1) * ks.entry(z, y) * obs(z, b2);
                    *out.entry((b1, b2)).or_insert(0.0) += p;
                }
            }
        }
    }
    out
}

#[test]
fn trace_vector_matches_direct_sum() {
    let m = repairable_4state(&int(1), &int(2)).unwrap();
    for x in 0..4 {
        let d = trace_vector(&m, x, &word("0.5:1,1.25:1")).unwrap();
        for ((b1, b2), p) in two_observation_oracle(x, &TimeValue::from_ratio(1, 2).unwrap(), &TimeValue::from_ratio(5, 4).unwrap()) {
            assert!((d.get(&vec![b1, b2]) - p).abs() < 1e-12, "state {x}, word {b1}{b2}");
        }
        assert!((d.mass() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn observation_words_are_exact() {
    let m = repairable_4state(&int(1), &int(1)).unwrap();
    let k = WordGradedKernel::<_, Rational>::new(&m);
    let d = k.trace_vector(1, &word("0:3")).unwrap();
    assert_eq!(d.len(), 8);
    assert!(d.iter().all(|(_, p)| *p == ratio(1, 8)));
    assert!(matches!(k.trace_vector(1, &word("1:1")), Err(Error::InexactTime(_))));
}

#[test]
fn composite_respects_the_monoid() {
    let m = repairable_4state(&int(2), &int(3)).unwrap();
    let (u, v) = (word("0.1:2,1:0"), word("0.4:1,0:0"));
    let direct = composite_at(&m, &u.mul(&v)).unwrap();
    let composed = kleisli(&composite_at(&m, &u).unwrap(), &composite_at(&m, &v).unwrap());
    for (a, b) in direct.iter().zip(&composed) {
        assert!(a.max_abs_diff(b) < 1e-12);
    }
}

#[test]
fn deterministic_system_is_exact() {
    let sys = DeterministicSystem::new(
        vec!["start".into(), "end".into()],
        vec!["s".into(), "e".into()],
        vec![1, 1],
        vec![0, 1],
    )
    .unwrap();
    let k = WordGradedKernel::<_, Rational>::new(&sys);
    assert_eq!(k.trace_vector(0, &word("0:1,1:1")).unwrap(), Dist::dirac(vec![0, 1]));
    let pairs = vec![(word("1:1"), word("0:2,3:1")), (word("0:0"), word("2:0"))];
    let r = check_graded_axioms(&k, &pairs, 0.0).unwrap();
    assert!(r.passed());
    assert!(DeterministicSystem::new(vec!["a".into(), "b".into()], vec!["x".into()], vec![1, 0], vec![0, 0]).is_err());
}

#[test]
fn equivalences() {
    let m = repairable_4state(&int(1), &int(1)).unwrap();
    assert!(behavioural_equivalent(&m, 1, &m, 2).unwrap().is_equivalent());
    assert!(!behavioural_equivalent(&m, 0, &m, 1).unwrap().is_equivalent());
    let config = TraceConfig { max_segments: 2, max_obs: 2, ..TraceConfig::default() };
    match trace_equivalent(&m, 0, &m, 1, &config).unwrap() {
        TraceVerdict::Distinguished { word, gap, .. } => {
            assert_eq!(word.to_string(), "0:1");
            assert!((gap - 0.5).abs() < 1e-12);
        }
        other => panic!("expected a witness, got {other:?}"),
    }
}

#[test]
fn word_enumeration_is_sorted_and_normal() {
    let grid = vec![TimeValue::from_int(1), TimeValue::from_int(2)];
    let words = enumerate_words(&grid, 2, 2);
    assert!(words.windows(2).all(|w| w[0] < w[1]));
    assert!(words.iter().all(|w| w.is_normalized() && w.count() <= 2 && w.positive_segments() <= 2));
    assert!(words.contains(&SamplingWord::unit()));
    assert!(words.contains(&word("1:1,2:1")));
}

#[test]
fn step_coalgebras() {
    let w = random_walk(3).unwrap();
    let d = w.iterate(3, &3).unwrap();
    // from the wall: stay/down paths
    assert_eq!(d.get(&3), ratio(3, 8));
    assert_eq!(d.mass(), int(1));

    let succ = BTreeMap::from([(0, BTreeSet::from([1, 2])), (1, BTreeSet::from([0])), (2, BTreeSet::from([2]))]);
    let c = PowersetCoalgebra::new(succ).unwrap();
    let two = extend_graded_semantics(&c, 2, &0).unwrap();
    assert_eq!(two, Dist::full([(0, ratio(1, 2)), (2, ratio(1, 2))]).unwrap());
}
