//! Bounded formula enumeration and the operations built on it: logical
//! quotients, distinguishing formulas and invariance checks.
//!
//! Boolean formulas are enumerated by modal depth. Each level applies every
//! thresholded modality to the formulas found at the previous level and then
//! closes under `¬` and `∧`. Only one formula per extension (the first one
//! found) is kept, which loses nothing because semantics depends on the
//! extension of the arguments alone. Quantitative formulas are the modal
//! chains `λ₁ … λ_d T` followed by binary mixtures of chains of equal depth.

use std::collections::HashSet;

use serde_json::{json, Value as Json};

use super::eval::{Evaluator, Value};
use super::formula::{Formula, Instance, Modality};
use super::depth::uniform_depth;
use crate::ctmc::LabelledModel;
use crate::error::{Error, Result};
use crate::numeric::{one, ratio, zero, Rational};
use crate::timealg::{SamplingWord, TimeValue};

#[derive(Clone, Debug, PartialEq)]
pub struct FormulaBudget {
    pub thresholds: Vec<Rational>,
    /// Also use every observation probability of the models as a threshold.
    pub observation_thresholds: bool,
    pub times: Vec<TimeValue>,
    pub max_depth: usize,
    pub mix_weights: Vec<Rational>,
    pub max_formulas: usize,
    /// Quantitative values closer than this count as equal.
    pub tol: f64,
}

impl Default for FormulaBudget {
    fn default() -> Self {
        let times = [(1, 10), (1, 2), (1, 1), (2, 1), (5, 1)];
        FormulaBudget {
            thresholds: vec![ratio(1, 4), ratio(1, 2), ratio(3, 4)],
            observation_thresholds: true,
            times: times.iter().map(|&(n, d)| TimeValue::from_ratio(n, d).expect("valid")).collect(),
            max_depth: 3,
            mix_weights: vec![ratio(1, 4), ratio(1, 2), ratio(3, 4)],
            max_formulas: 5000,
            tol: 1e-8,
        }
    }
}

impl FormulaBudget {
    pub fn with_depth(mut self, depth: usize) -> Self {
        self.max_depth = depth;
        self
    }

    fn threshold_set(&self, models: &[&LabelledModel]) -> Vec<Rational> {
        let mut ps = self.thresholds.clone();
        if self.observation_thresholds {
            for m in models {
                for x in 0..m.n_states() {
                    ps.extend(m.obs(x).iter().map(|(_, p)| p.clone()));
                }
            }
        }
        ps.retain(|p| *p > zero() && *p <= one());
        ps.sort();
        ps.dedup();
        ps
    }

    fn times(&self) -> Vec<TimeValue> {
        let mut ts = self.times.clone();
        ts.sort();
        ts.dedup();
        ts
    }
}

/// Boolean formulas with their extensions, in enumeration order.
#[derive(Clone, Debug)]
pub struct BooleanCatalogue {
    pub entries: Vec<(Formula, Vec<bool>)>,
    /// Candidates produced before deduplication.
    pub examined: usize,
}

pub fn boolean_catalogue(m: &LabelledModel, budget: &FormulaBudget) -> Result<BooleanCatalogue> {
    boolean_catalogue_with(&Evaluator::new(m), budget, &[m])
}

fn boolean_catalogue_with(
    ev: &Evaluator<'_>,
    budget: &FormulaBudget,
    threshold_sources: &[&LabelledModel],
) -> Result<BooleanCatalogue> {
    let m = ev.model();
    let mut modalities: Vec<Modality> = Vec::new();
    let thresholds = budget.threshold_set(threshold_sources);
    for label in m.labels() {
        for p in &thresholds {
            modalities.push(Modality::Label { label: label.clone(), threshold: Some(p.clone()) });
        }
    }
    for t in budget.times() {
        for p in &thresholds {
            modalities.push(Modality::Delay { time: t.clone(), threshold: Some(p.clone()) });
        }
    }

    let mut cat = Catalogue { entries: Vec::new(), seen: HashSet::new(), examined: 0, cap: budget.max_formulas };
    cat.add(Formula::top(), vec![true; m.n_states()]);
    cat.close(0);
    let mut frontier_start = 0;
    for _ in 0..budget.max_depth {
        let level_start = cat.entries.len();
        let frontier: Vec<(Formula, Vec<bool>)> = cat.entries[frontier_start..].to_vec();
        for modality in &modalities {
            for (phi, ext) in &frontier {
                if cat.full() {
                    break;
                }
                let out = ev.boolean_modal(modality, ext)?;
                cat.add(Formula::modal(modality.clone(), phi.clone()), out);
            }
        }
        cat.close(level_start);
        if cat.entries.len() == level_start {
            break;
        }
        frontier_start = level_start;
    }
    Ok(BooleanCatalogue { entries: cat.entries, examined: cat.examined })
}

struct Catalogue {
    entries: Vec<(Formula, Vec<bool>)>,
    seen: HashSet<Vec<bool>>,
    examined: usize,
    cap: usize,
}

impl Catalogue {
    fn full(&self) -> bool {
        self.entries.len() >= self.cap
    }

    fn add(&mut self, phi: Formula, ext: Vec<bool>) {
        self.examined += 1;
        if !self.full() && self.seen.insert(ext.clone()) {
            self.entries.push((phi, ext));
        }
    }

    /// Closes under `¬` and `∧`, starting from the entries at `from..`.
    fn close(&mut self, from: usize) {
        let mut start = from;
        while start < self.entries.len() && !self.full() {
            let end = self.entries.len();
            for i in start..end {
                let (phi, ext) = self.entries[i].clone();
                self.add(Formula::not(phi), ext.iter().map(|b| !b).collect());
            }
            for i in start..end {
                for j in 0..end {
                    if self.full() {
                        return;
                    }
                    let (a, ea) = &self.entries[j];
                    let (b, eb) = &self.entries[i];
                    let ext = ea.iter().zip(eb).map(|(x, y)| *x && *y).collect();
                    let phi = Formula::and(a.clone(), b.clone());
                    self.add(phi, ext);
                }
            }
            start = end;
        }
    }
}

/// Modal chains up to the depth bound, then same-depth binary mixtures.
pub fn quantitative_formulas(labels: &[String], budget: &FormulaBudget) -> Vec<Formula> {
    let mut modalities: Vec<Modality> =
        labels.iter().map(|b| Modality::Label { label: b.clone(), threshold: None }).collect();
    modalities.extend(budget.times().into_iter().map(|time| Modality::Delay { time, threshold: None }));
    let mut chains = vec![Formula::top()];
    let mut level = vec![Formula::top()];
    for _ in 0..budget.max_depth {
        level = modalities
            .iter()
            .flat_map(|m| level.iter().map(move |phi| Formula::modal(m.clone(), phi.clone())))
            .collect();
        chains.extend(level.iter().cloned());
    }
    chains.truncate(budget.max_formulas);

    let mut groups: Vec<(SamplingWord, Vec<usize>)> = Vec::new();
    for (i, phi) in chains.iter().enumerate() {
        let d = uniform_depth(phi).expect("chains are uniform");
        match groups.iter_mut().find(|(k, _)| *k == d) {
            Some((_, members)) => members.push(i),
            None => groups.push((d, vec![i])),
        }
    }
    let mut out = chains.clone();
    'outer: for (_, members) in &groups {
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                for p in &budget.mix_weights {
                    if out.len() >= budget.max_formulas {
                        break 'outer;
                    }
                    out.push(Formula::mix(p.clone(), chains[i].clone(), chains[j].clone()));
                }
            }
        }
    }
    out
}

fn values_differ(a: &Value, b: &Value, tol: f64) -> bool {
    match (a, b) {
        (Value::Exact(a), Value::Exact(b)) => a != b,
        _ => (a.to_f64() - b.to_f64()).abs() > tol,
    }
}

/// States grouped by agreement on every formula of the budget.
#[derive(Clone, Debug, PartialEq)]
pub struct LogicalQuotient {
    pub blocks: Vec<Vec<usize>>,
    /// Formulas kept (for the Boolean logic: one per distinct extension).
    pub formulas: usize,
    /// Candidate formulas generated, including ones equivalent to earlier ones.
    pub examined: usize,
}

impl LogicalQuotient {
    pub fn to_json(&self, m: &LabelledModel) -> Json {
        let names: Vec<Vec<&str>> =
            self.blocks.iter().map(|b| b.iter().map(|&x| m.states()[x].as_str()).collect()).collect();
        json!({ "blocks": names, "formulas": self.formulas, "examined": self.examined })
    }
}

pub fn logical_quotient(m: &LabelledModel, instance: Instance, budget: &FormulaBudget) -> Result<LogicalQuotient> {
    let n = m.n_states();
    match instance {
        Instance::Boolean => {
            let cat = boolean_catalogue(m, budget)?;
            let signature = |x: usize| cat.entries.iter().map(|(_, e)| e[x]).collect::<Vec<bool>>();
            let mut blocks: Vec<(Vec<bool>, Vec<usize>)> = Vec::new();
            for x in 0..n {
                let s = signature(x);
                match blocks.iter_mut().find(|(t, _)| *t == s) {
                    Some((_, b)) => b.push(x),
                    None => blocks.push((s, vec![x])),
                }
            }
            Ok(LogicalQuotient {
                blocks: blocks.into_iter().map(|(_, b)| b).collect(),
                formulas: cat.entries.len(),
                examined: cat.examined,
            })
        }
        Instance::Quantitative => {
            let ev = Evaluator::new(m);
            let formulas = quantitative_formulas(m.labels(), budget);
            let table = formulas.iter().map(|f| ev.quantitative(f)).collect::<Result<Vec<_>>>()?;
            // greedy: each state joins the first block whose representative it matches
            let mut blocks: Vec<Vec<usize>> = Vec::new();
            for x in 0..n {
                let same = |r: usize| table.iter().all(|vals| !values_differ(&vals[r], &vals[x], budget.tol));
                match blocks.iter_mut().find(|b| same(b[0])) {
                    Some(b) => b.push(x),
                    None => blocks.push(vec![x]),
                }
            }
            Ok(LogicalQuotient { blocks, formulas: formulas.len(), examined: formulas.len() })
        }
    }
}

/// A formula on which two states disagree, with both values printed.
#[derive(Clone, Debug, PartialEq)]
pub struct Distinction {
    pub formula: Formula,
    pub left: String,
    pub right: String,
}

impl Distinction {
    pub fn to_json(&self) -> Json {
        json!({ "formula": self.formula.to_string(), "left": self.left, "right": self.right })
    }
}

fn union(m1: &LabelledModel, m2: &LabelledModel) -> Result<LabelledModel> {
    m1.disjoint_union(m2, ("a.", "b."))
}

fn check_state(m: &LabelledModel, x: usize) -> Result<()> {
    if x >= m.n_states() {
        return Err(Error::UnknownState(x.to_string()));
    }
    Ok(())
}

/// The first formula of the budget, in enumeration order, separating
/// state `x` of `m1` from state `y` of `m2`.
pub fn find_distinguishing_formula(
    m1: &LabelledModel,
    x: usize,
    m2: &LabelledModel,
    y: usize,
    instance: Instance,
    budget: &FormulaBudget,
) -> Result<Option<Distinction>> {
    check_state(m1, x)?;
    check_state(m2, y)?;
    let u = union(m1, m2)?;
    let y = m1.n_states() + y;
    let ev = Evaluator::new(&u);
    match instance {
        Instance::Boolean => {
            let cat = boolean_catalogue_with(&ev, budget, &[m1, m2])?;
            Ok(cat.entries.into_iter().find(|(_, e)| e[x] != e[y]).map(|(formula, e)| Distinction {
                formula,
                left: e[x].to_string(),
                right: e[y].to_string(),
            }))
        }
        Instance::Quantitative => {
            for formula in quantitative_formulas(u.labels(), budget) {
                let vals = ev.quantitative(&formula)?;
                if values_differ(&vals[x], &vals[y], budget.tol) {
                    return Ok(Some(Distinction { left: vals[x].to_string(), right: vals[y].to_string(), formula }));
                }
            }
            Ok(None)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Disagreement {
    pub x: usize,
    pub y: usize,
    pub formula: Formula,
    pub left: String,
    pub right: String,
}

/// Result of checking that related states satisfy the same budgeted formulas.
#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceReport {
    /// Formulas kept (for the Boolean logic: one per distinct extension).
    pub formulas: usize,
    /// Candidate formulas generated, including ones equivalent to earlier ones.
    pub examined: usize,
    pub pairs: usize,
    pub disagreements: Vec<Disagreement>,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Checks every pair `(x, y)` (state of `m1`, state of `m2`) against every
/// formula in the budget. Quantitative formulas are all of uniform depth.
pub fn invariance_suite(
    m1: &LabelledModel,
    m2: &LabelledModel,
    pairs: &[(usize, usize)],
    instance: Instance,
    budget: &FormulaBudget,
) -> Result<InvarianceReport> {
    for &(x, y) in pairs {
        check_state(m1, x)?;
        check_state(m2, y)?;
    }
    let u = union(m1, m2)?;
    let n1 = m1.n_states();
    let ev = Evaluator::new(&u);
    let mut disagreements = Vec::new();
    let (formulas, examined);
    match instance {
        Instance::Boolean => {
            let cat = boolean_catalogue_with(&ev, budget, &[m1, m2])?;
            formulas = cat.entries.len();
            examined = cat.examined;
            for (phi, e) in &cat.entries {
                for &(x, y) in pairs {
                    if e[x] != e[n1 + y] {
                        disagreements.push(Disagreement {
                            x,
                            y,
                            formula: phi.clone(),
                            left: e[x].to_string(),
                            right: e[n1 + y].to_string(),
                        });
                    }
                }
            }
        }
        Instance::Quantitative => {
            let all = quantitative_formulas(u.labels(), budget);
            formulas = all.len();
            examined = all.len();
            for phi in all {
                let vals = ev.quantitative(&phi)?;
                for &(x, y) in pairs {
                    if values_differ(&vals[x], &vals[n1 + y], budget.tol) {
                        disagreements.push(Disagreement {
                            x,
                            y,
                            formula: phi.clone(),
                            left: vals[x].to_string(),
                            right: vals[n1 + y].to_string(),
                        });
                    }
                }
            }
        }
    }
    Ok(InvarianceReport { formulas, examined, pairs: pairs.len(), disagreements })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctmc::{repairable_3state, repairable_4state, repairable_homomorphism};
    use crate::numeric::int;

    #[test]
    fn quantitative_budget_size() {
        let labels = vec!["yes".to_string(), "no".to_string()];
        let fs = quantitative_formulas(&labels, &FormulaBudget::default());
        // 1 + 7 + 49 + 343 chains plus mixtures
        assert!(fs.len() > 400);
        assert_eq!(fs[0], Formula::top());
        assert!(fs.iter().all(|f| uniform_depth(f).is_ok()));
    }

    #[test]
    fn zero_budget_gives_one_block() {
        let m = repairable_4state(&int(1), &int(1)).unwrap();
        let q = logical_quotient(&m, Instance::Boolean, &FormulaBudget::default().with_depth(0)).unwrap();
        assert_eq!(q.blocks, vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn quotients_match_lumping() {
        let m = repairable_4state(&int(1), &int(2)).unwrap();
        for instance in [Instance::Boolean, Instance::Quantitative] {
            let q = logical_quotient(&m, instance, &FormulaBudget::default()).unwrap();
            assert_eq!(q.blocks, vec![vec![0], vec![1, 2], vec![3]], "{instance}");
        }
    }

    #[test]
    fn distinguishing_formula_for_extremes() {
        let m = repairable_3state(&int(1), &int(1)).unwrap();
        let d = find_distinguishing_formula(&m, 0, &m, 2, Instance::Boolean, &FormulaBudget::default())
            .unwrap()
            .unwrap();
        assert_eq!(d.formula.to_string(), "(yes)_0.25 T");
        assert_eq!((d.left.as_str(), d.right.as_str()), ("false", "true"));
        let none = find_distinguishing_formula(&m, 1, &m, 1, Instance::Quantitative, &FormulaBudget::default()).unwrap();
        assert!(none.is_none());
    }

    #[test]
    fn homomorphism_preserves_formulas() {
        let m4 = repairable_4state(&int(1), &int(1)).unwrap();
        let m3 = repairable_3state(&int(1), &int(1)).unwrap();
        let pairs: Vec<(usize, usize)> = repairable_homomorphism().into_iter().enumerate().collect();
        let budget = FormulaBudget::default().with_depth(2);
        for instance in [Instance::Boolean, Instance::Quantitative] {
            let r = invariance_suite(&m4, &m3, &pairs, instance, &budget).unwrap();
            assert!(r.passed(), "{instance}: {:?}", r.disagreements.first());
            assert!(r.formulas > 1);
        }
    }
}
