use proptest::prelude::*;

use graded_coalg::ctmc::{repairable_3state, repairable_4state};
use graded_coalg::findist::Dist;
use graded_coalg::glogic::{
    eval_boolean, eval_quantitative, parse_formula, parse_formula_with, separating_modality_probe,
    trace_logic_axiom_check, uniform_depth, word_value, AxiomInstance, Formula, ProbeAtom, ProbeGrade, ProbeOutcome,
    Value,
};
use graded_coalg::numeric::{int, ratio};
use graded_coalg::timealg::TimeValue;
use graded_coalg::Error;

fn boolean_formula() -> impl Strategy<Value = Formula> {
    let leaf = Just(Formula::top());
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (prop_oneof![Just("yes"), Just("no")], 0i64..=4, inner.clone())
                .prop_map(|(b, p, a)| Formula::label(b, Some(ratio(p, 4)), a)),
            (1i64..=6, 0i64..=4, inner).prop_map(|(t, p, a)| Formula::delay(
                TimeValue::from_ratio(t, 2).unwrap(),
                Some(ratio(p, 4)),
                a
            )),
        ]
    })
}

proptest! {
    #[test]
    fn display_parses_back(phi in boolean_formula()) {
        let text = phi.to_string();
        prop_assert_eq!(parse_formula(&text).unwrap(), phi);
    }

    #[test]
    fn negation_complements(phi in boolean_formula()) {
        let m = repairable_4state(&int(1), &int(1)).unwrap();
        let not = Formula::not(phi.clone());
        for x in 0..4 {
            prop_assert_eq!(eval_boolean(&not, &m, x).unwrap(), !eval_boolean(&phi, &m, x).unwrap());
        }
    }
}

#[test]
fn delay_expectation_has_a_closed_form() {
    // at λ = μ = 1 the chance of seeing `yes` after time 1 from state 2 is
    // exactly the chance p that one fixed component is up
    let m = repairable_4state(&int(1), &int(1)).unwrap();
    let p = 0.5 + 0.5 * (-2.0f64).exp();
    let phi = parse_formula("<1> (yes) T").unwrap();
    let v = eval_quantitative(&phi, &m, 3).unwrap();
    assert!(!v.is_exact());
    assert!((v.to_f64() - p).abs() < 1e-12);
    // the Boolean version only counts the state where `yes` is certain: p² ≈ 0.322
    assert!(eval_boolean(&parse_formula("<1>_0.32 (yes)_1 T").unwrap(), &m, 3).unwrap());
    assert!(!eval_boolean(&parse_formula("<1>_0.33 (yes)_1 T").unwrap(), &m, 3).unwrap());
}

#[test]
fn observation_only_formulas_stay_exact() {
    let m = repairable_3state(&int(2), &int(3)).unwrap();
    let phi = parse_formula("(yes)(no) T +_1/3 (no)(no) T").unwrap();
    assert_eq!(eval_quantitative(&phi, &m, 1).unwrap(), Value::Exact(ratio(1, 4)));
    assert_eq!(eval_quantitative(&phi, &m, 0).unwrap(), Value::Exact(ratio(2, 3)));
}

#[test]
fn uniform_depth_and_word_values() {
    let phi = parse_formula("<1>(yes)<2>(no)T +_1/2 <1>(no)<2>(yes)T").unwrap();
    assert_eq!(uniform_depth(&phi).unwrap().to_string(), "1:1,2:1");
    let labels = vec!["yes".to_string(), "no".to_string()];
    assert_eq!(word_value(&phi, &labels, &[0, 1]).unwrap(), ratio(1, 2));
    assert_eq!(word_value(&phi, &labels, &[0, 0]).unwrap(), int(0));
    assert!(matches!(uniform_depth(&parse_formula("(yes)T +_1/2 T").unwrap()), Err(Error::NotUniform(_))));
}

#[test]
fn parser_rejects_bad_input() {
    let alphabet = vec!["yes".to_string(), "no".to_string()];
    assert!(matches!(parse_formula_with("(maybe)_0.5 T", Some(&alphabet)), Err(Error::UnknownLabel(_))));
    assert!(matches!(parse_formula("(yes)_0.5 T +_1/2 T"), Err(Error::Parse { .. })));
    assert!(matches!(parse_formula("!T &"), Err(Error::Parse { offset: 4, .. })));
    assert!(parse_formula("<1>_2 T").is_err());
}

#[test]
fn probe_separates_kernel_columns() {
    let m = repairable_4state(&int(1), &int(1)).unwrap();
    let t = TimeValue::from_int(1);
    let k = m.kernel_at(&t);
    let column = |j: usize| Dist::from_weights((0..4).map(|i| (ProbeAtom::point(&m.states()[i]), k.entry(i, j))));
    let grade = ProbeGrade::Delay(t);
    let same = separating_modality_probe(&column(1), &column(1), &grade, m.states(), 1e-12).unwrap();
    assert!(matches!(same, ProbeOutcome::Equal));
    match separating_modality_probe(&column(0), &column(3), &grade, m.states(), 1e-12).unwrap() {
        ProbeOutcome::Witness { point, left, right, .. } => {
            // from 0 the chain is more likely to still be in 0
            assert_eq!(point, "0");
            assert!(left && !right);
        }
        other => panic!("expected a witness, got {other:?}"),
    }
}

#[test]
fn trace_logic_axioms() {
    assert!(trace_logic_axiom_check(AxiomInstance::Quantitative).passed());
    let r = trace_logic_axiom_check(AxiomInstance::BooleanWithExpectation);
    assert!(r.counterexample.expect("Boolean truth values are not closed under expectation").law.contains("Ω"));
}
