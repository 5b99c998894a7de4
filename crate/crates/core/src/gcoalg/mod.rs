//! The coalgebra graded by sampling intervals.
//!
//! For a word `(t0, k0, ..., tn, kn)` the composite kernel lets time `t0`
//! pass, takes `k0` independent observations at the landed state, lets `t1`
//! pass, and so on. Its value at state `x` is a distribution over pairs
//! (observed label word, final state). Label words are vectors of label
//! indices into the system's alphabet.

mod step;
mod trace;

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::ctmc::LabelledModel;
use crate::error::{Error, Result};
use crate::findist::{Dist, Weight};
use crate::numeric::Rational;
use crate::timealg::{SamplingWord, Segment, TimeValue};

pub use crate::findist::distlaw::LabelWord;
pub use step::{extend_graded_semantics, random_walk, GradedStepCoalgebra, NestedSet, PowersetCoalgebra};
pub use trace::{
    behavioural_equivalent, enumerate_words, trace_equivalent, BehaviouralVerdict, ExactReport, TraceBound,
    TraceConfig, TraceVerdict,
};

/// Distribution over `(label word, state)`.
pub type CompositeDist<W> = Dist<(LabelWord, usize), W>;

/// A finite system with time-indexed transition kernels and observations.
pub trait TimedSystem<W: Weight>: Sync {
    fn state_names(&self) -> &[String];
    fn label_names(&self) -> &[String];
    fn observation(&self, x: usize) -> Dist<usize, W>;
    /// One distribution over target states per source state.
    fn transition(&self, t: &TimeValue) -> Result<Vec<Dist<usize, W>>>;

    fn n_states(&self) -> usize {
        self.state_names().len()
    }
}

impl TimedSystem<f64> for LabelledModel {
    fn state_names(&self) -> &[String] {
        self.states()
    }
    fn label_names(&self) -> &[String] {
        self.labels()
    }
    fn observation(&self, x: usize) -> Dist<usize, f64> {
        self.obs(x).to_f64()
    }
    fn transition(&self, t: &TimeValue) -> Result<Vec<Dist<usize, f64>>> {
        let k = self.kernel_at(t);
        Ok((0..self.n_states()).map(|j| k.column(j)).collect())
    }
}

/// Exact view of a chain: only observation words (no elapsed time) are available.
impl TimedSystem<Rational> for LabelledModel {
    fn state_names(&self) -> &[String] {
        self.states()
    }
    fn label_names(&self) -> &[String] {
        self.labels()
    }
    fn observation(&self, x: usize) -> Dist<usize, Rational> {
        self.obs(x).clone()
    }
    fn transition(&self, t: &TimeValue) -> Result<Vec<Dist<usize, Rational>>> {
        if !t.is_zero() {
            return Err(Error::InexactTime(format!("t = {t}")));
        }
        Ok((0..self.n_states()).map(Dist::dirac).collect())
    }
}

/// A deterministic system over the time monoid: identity at `t = 0` and the
/// idempotent map `after` for every positive duration, with one label per
/// state. All kernels are Dirac, so every weight stays exact.
#[derive(Clone, Debug)]
pub struct DeterministicSystem {
    states: Vec<String>,
    labels: Vec<String>,
    after: Vec<usize>,
    label_of: Vec<usize>,
}

impl DeterministicSystem {
    pub fn new(states: Vec<String>, labels: Vec<String>, after: Vec<usize>, label_of: Vec<usize>) -> Result<Self> {
        let n = states.len();
        if after.len() != n || label_of.len() != n {
            return Err(Error::invalid("flow and labelling must have one entry per state"));
        }
        if let Some(x) = (0..n).find(|&x| after[x] >= n || after[after[x]] != after[x]) {
            return Err(Error::invalid(format!("flow is not an idempotent map at state {x}")));
        }
        if label_of.iter().any(|&b| b >= labels.len()) {
            return Err(Error::invalid("label index out of range"));
        }
        Ok(DeterministicSystem { states, labels, after, label_of })
    }
}

impl<W: Weight> TimedSystem<W> for DeterministicSystem {
    fn state_names(&self) -> &[String] {
        &self.states
    }
    fn label_names(&self) -> &[String] {
        &self.labels
    }
    fn observation(&self, x: usize) -> Dist<usize, W> {
        Dist::dirac(self.label_of[x])
    }
    fn transition(&self, t: &TimeValue) -> Result<Vec<Dist<usize, W>>> {
        Ok((0..self.states.len()).map(|x| Dist::dirac(if t.is_zero() { x } else { self.after[x] })).collect())
    }
}

fn concat(u: &LabelWord, v: &LabelWord) -> LabelWord {
    let mut w = Vec::with_capacity(u.len() + v.len());
    w.extend_from_slice(u);
    w.extend_from_slice(v);
    w
}

/// Kleisli composite: run `first`, then `second` from the state it lands in,
/// concatenating label words.
pub fn kleisli<W: Weight>(first: &[CompositeDist<W>], second: &[CompositeDist<W>]) -> Vec<CompositeDist<W>> {
    first
        .iter()
        .map(|d| d.bind(|(u, y)| second[*y].map(|(v, z)| (concat(u, v), *z))))
        .collect()
}

/// The unit `x ↦ dirac((ε, x))`.
pub fn unit_composite<W: Weight>(n: usize) -> Vec<CompositeDist<W>> {
    (0..n).map(|x| Dist::dirac((Vec::new(), x))).collect()
}

/// The composite kernel indexed by sampling words, memoised per word and
/// per duration. Safe to share between threads.
pub struct WordGradedKernel<'a, S: TimedSystem<W>, W: Weight> {
    system: &'a S,
    words: RwLock<HashMap<SamplingWord, Arc<Vec<CompositeDist<W>>>>>,
    kernels: RwLock<HashMap<TimeValue, Arc<Vec<Dist<usize, W>>>>>,
    powers: RwLock<HashMap<(usize, u64), Arc<Dist<LabelWord, W>>>>,
}

impl<'a, S: TimedSystem<W>, W: Weight> WordGradedKernel<'a, S, W> {
    pub fn new(system: &'a S) -> Self {
        WordGradedKernel {
            system,
            words: RwLock::new(HashMap::new()),
            kernels: RwLock::new(HashMap::new()),
            powers: RwLock::new(HashMap::new()),
        }
    }

    pub fn system(&self) -> &'a S {
        self.system
    }

    pub fn transition(&self, t: &TimeValue) -> Result<Arc<Vec<Dist<usize, W>>>> {
        if let Some(k) = self.kernels.read().expect("cache lock").get(t) {
            return Ok(k.clone());
        }
        let k = Arc::new(self.system.transition(t)?);
        Ok(self.kernels.write().expect("cache lock").entry(t.clone()).or_insert(k).clone())
    }

    /// `k` independent observations at state `y`, as a distribution over words.
    pub fn observations(&self, y: usize, k: u64) -> Arc<Dist<LabelWord, W>> {
        if let Some(d) = self.powers.read().expect("cache lock").get(&(y, k)) {
            return d.clone();
        }
        let obs = self.system.observation(y);
        let mut d: Dist<LabelWord, W> = Dist::dirac(Vec::new());
        for _ in 0..k {
            d = d.product(&obs).map(|(w, b)| {
                let mut w = w.clone();
                w.push(*b);
                w
            });
        }
        let d = Arc::new(d);
        self.powers.write().expect("cache lock").entry((y, k)).or_insert(d).clone()
    }

    /// The kernel of one segment: elapse `time`, then observe `count` times.
    pub fn segment(&self, seg: &Segment) -> Result<Vec<CompositeDist<W>>> {
        let k = self.transition(&seg.time)?;
        Ok(k.iter()
            .map(|col| col.bind(|y| self.observations(*y, seg.count).map(|w| (w.clone(), *y))))
            .collect())
    }

    /// `γ̂_w`: one composite distribution per start state.
    pub fn composite_at(&self, w: &SamplingWord) -> Result<Arc<Vec<CompositeDist<W>>>> {
        if let Some(d) = self.words.read().expect("cache lock").get(w) {
            return Ok(d.clone());
        }
        let mut acc = unit_composite(self.system.n_states());
        for seg in w.segments() {
            if seg.time.is_zero() && seg.count == 0 {
                continue;
            }
            acc = kleisli(&acc, &self.segment(seg)?);
        }
        let acc = Arc::new(acc);
        Ok(self.words.write().expect("cache lock").entry(w.clone()).or_insert(acc).clone())
    }

    /// Distribution of observed label words from `x` along `w`.
    pub fn trace_vector(&self, x: usize, w: &SamplingWord) -> Result<Dist<LabelWord, W>> {
        let c = self.composite_at(w)?;
        let d = c.get(x).ok_or_else(|| Error::UnknownState(format!("#{x}")))?;
        Ok(d.map(|(u, _)| u.clone()))
    }
}

/// Float composite kernel of a chain.
pub fn composite_at(m: &LabelledModel, w: &SamplingWord) -> Result<Vec<CompositeDist<f64>>> {
    Ok(WordGradedKernel::<_, f64>::new(m).composite_at(w)?.as_ref().clone())
}

/// Float trace vector of a chain at state `x`.
pub fn trace_vector(m: &LabelledModel, x: usize, w: &SamplingWord) -> Result<Dist<LabelWord, f64>> {
    WordGradedKernel::<_, f64>::new(m).trace_vector(x, w)
}

/// Renders a label word by concatenating label names (`ε` when empty).
pub fn show_label_word(labels: &[String], w: &LabelWord) -> String {
    if w.is_empty() {
        "ε".to_string()
    } else {
        w.iter().map(|&b| labels[b].as_str()).collect()
    }
}

fn max_diff<W: Weight>(a: &[CompositeDist<W>], b: &[CompositeDist<W>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.max_abs_diff(y)).fold(0.0, f64::max)
}

#[derive(Clone, Debug)]
pub struct AxiomReport {
    /// Whether `γ̂` at the unit word is exactly `x ↦ dirac((ε, x))`.
    pub unit_exact: bool,
    /// `(u, v, ‖γ̂_{u·v} − γ̂_u • γ̂_v‖)` per sampled pair.
    pub residuals: Vec<(SamplingWord, SamplingWord, f64)>,
    /// Whether every atom of `γ̂_w` carries a label word of length `count(w)`.
    pub counts_consistent: bool,
    pub tol: f64,
}

impl AxiomReport {
    pub fn worst(&self) -> f64 {
        self.residuals.iter().map(|r| r.2).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.unit_exact && self.counts_consistent && self.worst() <= self.tol
    }
}

/// Checks the unit axiom exactly and the multiplication axiom on each pair.
pub fn check_graded_axioms<S: TimedSystem<W>, W: Weight>(
    k: &WordGradedKernel<'_, S, W>,
    pairs: &[(SamplingWord, SamplingWord)],
    tol: f64,
) -> Result<AxiomReport> {
    let n = k.system().n_states();
    let unit = k.composite_at(&SamplingWord::unit())?;
    let unit_exact = unit.as_ref() == &unit_composite::<W>(n);
    let mut residuals = Vec::with_capacity(pairs.len());
    let mut counts_consistent = true;
    for (u, v) in pairs {
        let uv = u.mul(v);
        let direct = k.composite_at(&uv)?;
        let composed = kleisli(&k.composite_at(u)?, &k.composite_at(v)?);
        let expected = uv.count() as usize;
        counts_consistent &= direct.iter().all(|d| d.support().all(|(w, _)| w.len() == expected));
        residuals.push((u.clone(), v.clone(), max_diff(&direct, &composed)));
    }
    Ok(AxiomReport { unit_exact, residuals, counts_consistent, tol })
}

#[derive(Clone, Debug)]
pub struct RoundtripReport {
    /// `‖γ̂_{(t,0)} − γ_t‖` per time.
    pub delay: Vec<(TimeValue, f64)>,
    /// Whether `γ̂_{(0,1)}` is exactly `x ↦ Σ_b obs(x)(b) |(b, x)⟩`.
    pub observe_exact: bool,
    /// `‖rebuilt − γ̂_w‖` per word, rebuilding from the two generator families.
    pub rebuilt: Vec<(SamplingWord, f64)>,
    pub tol: f64,
}

impl RoundtripReport {
    pub fn worst(&self) -> f64 {
        self.delay.iter().map(|r| r.1).chain(self.rebuilt.iter().map(|r| r.1)).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.observe_exact && self.worst() <= self.tol
    }
}

/// Restricts `γ̂` to the generators `(t, 0)` and `(0, 1)`, compares them to
/// the raw kernels and labelling, and rebuilds `γ̂_w` from them alone.
pub fn labelled_roundtrip_check<S: TimedSystem<W>, W: Weight>(
    k: &WordGradedKernel<'_, S, W>,
    times: &[TimeValue],
    words: &[SamplingWord],
    tol: f64,
) -> Result<RoundtripReport> {
    let sys = k.system();
    let n = sys.n_states();
    let mut delay = Vec::with_capacity(times.len());
    for t in times {
        let restricted = k.composite_at(&SamplingWord::delay(t.clone()))?;
        let raw: Vec<CompositeDist<W>> =
            sys.transition(t)?.iter().map(|d| d.map(|y| (Vec::new(), *y))).collect();
        delay.push((t.clone(), max_diff(&restricted, &raw)));
    }
    let labelling: Vec<CompositeDist<W>> = (0..n).map(|x| sys.observation(x).map(|b| (vec![*b], x))).collect();
    let observe_exact = k.composite_at(&SamplingWord::observe(1))?.as_ref() == &labelling;

    let mut rebuilt = Vec::with_capacity(words.len());
    for w in words {
        let mut acc = unit_composite::<W>(n);
        for g in w.generators() {
            let s = &g.segments()[0];
            let piece: Vec<CompositeDist<W>> = if s.count == 0 {
                sys.transition(&s.time)?.iter().map(|d| d.map(|y| (Vec::new(), *y))).collect()
            } else {
                labelling.clone()
            };
            acc = kleisli(&acc, &piece);
        }
        rebuilt.push((w.clone(), max_diff(&acc, &k.composite_at(w)?)));
    }
    Ok(RoundtripReport { delay, observe_exact, rebuilt, tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctmc::repairable_4state;
    use crate::numeric::{int, ratio};

    fn w(s: &str) -> SamplingWord {
        s.parse().unwrap()
    }

    #[test]
    fn observation_words_are_exact() {
        let m = repairable_4state(&int(1), &int(1)).unwrap();
        let k = WordGradedKernel::<_, Rational>::new(&m);
        let at_l = k.composite_at(&w("0:2")).unwrap()[1].clone();
        assert_eq!(at_l.len(), 4);
        assert!(at_l.iter().all(|((u, y), p)| u.len() == 2 && *y == 1 && *p == ratio(1, 4)));
        assert!(matches!(k.composite_at(&w("1:0")), Err(Error::InexactTime(_))));
        assert_eq!(k.trace_vector(3, &w("0:1")).unwrap(), Dist::dirac(vec![0]));
    }

    #[test]
    fn deterministic_system_is_exact() {
        let sys = DeterministicSystem::new(
            vec!["armed".into(), "fired".into()],
            vec!["quiet".into(), "bang".into()],
            vec![1, 1],
            vec![0, 1],
        )
        .unwrap();
        let k = WordGradedKernel::<_, Rational>::new(&sys);
        assert_eq!(k.trace_vector(0, &w("0:1,1:1")).unwrap(), Dist::dirac(vec![0, 1]));
        let pairs = vec![(w("0:1"), w("2:1")), (w("1:0"), w("0:2")), (w("0:0"), w("1/2:1,1:1"))];
        let report = check_graded_axioms(&k, &pairs, 0.0).unwrap();
        assert!(report.passed());
        assert!(DeterministicSystem::new(vec!["a".into(), "b".into()], vec!["x".into()], vec![1, 0], vec![0, 0]).is_err());
    }

    #[test]
    fn cache_returns_identical_values() {
        let m = repairable_4state(&int(2), &int(3)).unwrap();
        let k = WordGradedKernel::<_, f64>::new(&m);
        let a = k.composite_at(&w("1:1,2:1")).unwrap();
        let b = k.composite_at(&w("1:1,2:1")).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn label_word_rendering() {
        let labels = vec!["yes".to_string(), "no".to_string()];
        assert_eq!(show_label_word(&labels, &vec![0, 1]), "yesno");
        assert_eq!(show_label_word(&labels, &vec![]), "ε");
    }
}
