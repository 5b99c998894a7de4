//! Modal logics interpreted over the graded semantics.
//!
//! Two instances are provided. The Boolean one has truth values `{⊥, ⊤}`,
//! operators `¬`, `∧` and thresholded modalities `(b)_p φ` ("label `b` is
//! observed and `φ` holds with probability at least `p`") and `⟨r⟩_p φ`
//! ("after time `r`, `φ` holds with probability at least `p`"). The
//! quantitative one has values in `[0, 1]`, affine mixtures `φ +_p ψ` and
//! the expectation modalities `(b) φ` and `⟨r⟩ φ`; restricted to formulas of
//! uniform depth it factors through traces.

mod axioms;
mod budget;
mod depth;
mod eval;
mod formula;
mod parser;
mod probe;

pub use axioms::{trace_logic_axiom_check, AxiomInstance};
pub use budget::{
    boolean_catalogue, find_distinguishing_formula, invariance_suite, logical_quotient, quantitative_formulas,
    BooleanCatalogue, Disagreement, Distinction, FormulaBudget, InvarianceReport, LogicalQuotient,
};
pub use depth::{modality_depth, trace_semantics, uniform_depth, word_value};
pub use eval::{eval_boolean, eval_quantitative, Evaluator, Value, THRESHOLD_SLACK};
pub use formula::{Constant, Formula, Instance, Modality, PropOp};
pub use parser::{parse_formula, parse_formula_with};
pub use probe::{separating_modality_probe, ProbeAtom, ProbeGrade, ProbeOutcome};
