//! Finite continuous-time Markov chains with probabilistic observations.
//!
//! Column convention throughout: `rates[k][j]` is the rate of the jump
//! `j -> k`, and kernel entry `(k, j)` is the probability `γ_t(k | j)`.
//! Distributions are columns; every generator column sums to zero (to at
//! most zero for partial chains, whose missing mass means termination).

pub mod eigen;
pub mod expm;
mod io;
mod lumping;
mod models;
mod uniformization;

use nalgebra::DMatrix;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::findist::Dist;
use crate::numeric::{format_rational, to_f64, Rational};
use crate::timealg::TimeValue;

pub use eigen::{eigen_solution, EigenSolution};
pub use io::{model_from_json, model_to_json, ModelFile};
pub use lumping::{lumpability_quotient, refine_partition, Lumping};
pub use models::{repairable_3state, repairable_4state, repairable_homomorphism};
pub use uniformization::uniformized;

/// A rate matrix over named states, stored exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    states: Vec<String>,
    rates: Vec<Vec<Rational>>,
    partial: bool,
    float: DMatrix<f64>,
}

impl Generator {
    /// A conservative generator: every column sums to exactly zero.
    pub fn new(states: Vec<String>, rates: Vec<Vec<Rational>>) -> Result<Self> {
        Self::build(states, rates, false)
    }

    /// A sub-Markov generator: column sums may be negative (killing rate).
    pub fn new_partial(states: Vec<String>, rates: Vec<Vec<Rational>>) -> Result<Self> {
        Self::build(states, rates, true)
    }

    fn build(states: Vec<String>, rates: Vec<Vec<Rational>>, partial: bool) -> Result<Self> {
        let n = states.len();
        if n == 0 {
            return Err(Error::validation("model has no states"));
        }
        for (i, s) in states.iter().enumerate() {
            if states[..i].contains(s) {
                return Err(Error::validation(format!("duplicate state name `{s}` at index {i}")));
            }
        }
        if rates.len() != n {
            return Err(Error::validation(format!("rate matrix has {} rows, expected {n}", rates.len())));
        }
        for (k, row) in rates.iter().enumerate() {
            if row.len() != n {
                return Err(Error::validation(format!("rate row {k} has {} entries, expected {n}", row.len())));
            }
        }
        for j in 0..n {
            let mut sum = Rational::zero();
            for (k, row) in rates.iter().enumerate() {
                if k != j && row[j].is_negative() {
                    return Err(Error::validation(format!(
                        "negative off-diagonal rate {} at ({k},{j})",
                        format_rational(&row[j])
                    )));
                }
                sum += &row[j];
            }
            let bad = if partial { sum.is_positive() } else { !sum.is_zero() };
            if bad {
                return Err(Error::validation(format!(
                    "column {j} sums to {}, expected {}",
                    format_rational(&sum),
                    if partial { "at most 0" } else { "0" }
                )));
            }
        }
        let float = DMatrix::from_fn(n, n, |k, j| to_f64(&rates[k][j]));
        Ok(Generator { states, rates, partial, float })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    /// Rate of the jump `from -> to` (diagonal: minus the total outflow).
    pub fn rate(&self, to: usize, from: usize) -> &Rational {
        &self.rates[to][from]
    }

    pub fn rates(&self) -> &[Vec<Rational>] {
        &self.rates
    }

    pub fn is_partial(&self) -> bool {
        self.partial
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.float
    }

    pub fn state_index(&self, name: &str) -> Result<usize> {
        self.states.iter().position(|s| s == name).ok_or_else(|| Error::UnknownState(name.to_string()))
    }
}

/// The transition matrix `γ_t`, entry `(k, j) = γ_t(k | j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    pub time: TimeValue,
    pub matrix: DMatrix<f64>,
}

impl Kernel {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn entry(&self, to: usize, from: usize) -> f64 {
        self.matrix[(to, from)]
    }

    /// The distribution `γ_t(- | from)`, with exact zeros dropped.
    pub fn column(&self, from: usize) -> Dist<usize, f64> {
        Dist::from_weights(self.matrix.column(from).iter().copied().enumerate())
    }

    /// Largest deviation of a column sum from one, and most negative entry.
    pub fn stochasticity_defect(&self) -> (f64, f64) {
        let mut sum_defect: f64 = 0.0;
        for j in 0..self.dim() {
            let s: f64 = self.matrix.column(j).iter().sum();
            sum_defect = sum_defect.max((s - 1.0).abs());
        }
        let min = self.matrix.iter().copied().fold(0.0, f64::min);
        (sum_defect, min)
    }
}

/// `γ_t = exp(t · rates)` by uniformization; `t = 0` gives the identity exactly.
pub fn kernel_at(g: &Generator, t: &TimeValue) -> Kernel {
    Kernel { time: t.clone(), matrix: uniformized(g.matrix(), t.to_f64()) }
}

/// A chain together with an observation distribution per state.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelledModel {
    generator: Generator,
    labels: Vec<String>,
    obs: Vec<Dist<usize, Rational>>,
}

impl LabelledModel {
    /// `obs[x]` is a distribution over label indices and must have mass one.
    pub fn new(generator: Generator, labels: Vec<String>, obs: Vec<Dist<usize, Rational>>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::validation("model has no labels"));
        }
        for (i, b) in labels.iter().enumerate() {
            if labels[..i].contains(b) {
                return Err(Error::validation(format!("duplicate label `{b}` at index {i}")));
            }
        }
        if obs.len() != generator.dim() {
            return Err(Error::validation(format!(
                "{} observation rows for {} states",
                obs.len(),
                generator.dim()
            )));
        }
        for (x, d) in obs.iter().enumerate() {
            if let Some(b) = d.support().find(|b| **b >= labels.len()) {
                return Err(Error::validation(format!("obs of state {x} uses label index {b} out of range")));
            }
            if d.iter().any(|(_, w)| w.is_negative()) {
                return Err(Error::validation(format!("obs of state {x} has a negative weight")));
            }
            if !d.is_full() {
                return Err(Error::validation(format!(
                    "obs of state {x} (`{}`) has mass {}, expected 1",
                    generator.states[x],
                    format_rational(&d.mass())
                )));
            }
        }
        Ok(LabelledModel { generator, labels, obs })
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn states(&self) -> &[String] {
        self.generator.states()
    }

    pub fn n_states(&self) -> usize {
        self.generator.dim()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn obs(&self, x: usize) -> &Dist<usize, Rational> {
        &self.obs[x]
    }

    pub fn is_partial(&self) -> bool {
        self.generator.is_partial()
    }

    pub fn state_index(&self, name: &str) -> Result<usize> {
        self.generator.state_index(name)
    }

    pub fn label_index(&self, name: &str) -> Result<usize> {
        self.labels.iter().position(|b| b == name).ok_or_else(|| Error::UnknownLabel(name.to_string()))
    }

    pub fn kernel_at(&self, t: &TimeValue) -> Kernel {
        kernel_at(&self.generator, t)
    }

    /// The same model with labels reindexed to follow `order`, which must be
    /// a permutation of the current label set.
    pub fn with_label_order(&self, order: &[String]) -> Result<Self> {
        let mut sorted_a = self.labels.clone();
        let mut sorted_b = order.to_vec();
        sorted_a.sort();
        sorted_b.sort();
        if sorted_a != sorted_b {
            return Err(Error::AlphabetMismatch(self.labels.clone(), order.to_vec()));
        }
        let remap: Vec<usize> = self.labels.iter().map(|b| order.iter().position(|c| c == b).unwrap()).collect();
        let obs = self.obs.iter().map(|d| d.map(|b| remap[*b])).collect();
        LabelledModel::new(self.generator.clone(), order.to_vec(), obs)
    }

    /// Block-diagonal union; state names get the given prefixes. The second
    /// model's labels are reindexed to the first model's order.
    pub fn disjoint_union(&self, other: &LabelledModel, prefixes: (&str, &str)) -> Result<Self> {
        let other = other.with_label_order(&self.labels)?;
        let (n1, n2) = (self.n_states(), other.n_states());
        let n = n1 + n2;
        let mut rates = vec![vec![Rational::zero(); n]; n];
        for k in 0..n1 {
            for j in 0..n1 {
                rates[k][j] = self.generator.rates[k][j].clone();
            }
        }
        for k in 0..n2 {
            for j in 0..n2 {
                rates[n1 + k][n1 + j] = other.generator.rates[k][j].clone();
            }
        }
        let states = self
            .states()
            .iter()
            .map(|s| format!("{}{s}", prefixes.0))
            .chain(other.states().iter().map(|s| format!("{}{s}", prefixes.1)))
            .collect();
        let generator = if self.is_partial() || other.is_partial() {
            Generator::new_partial(states, rates)?
        } else {
            Generator::new(states, rates)?
        };
        let obs = self.obs.iter().chain(other.obs.iter()).cloned().collect();
        LabelledModel::new(generator, self.labels.clone(), obs)
    }
}

/// Residuals of `H·γ_t − δ_t·H` per probe time plus observation preservation.
#[derive(Clone, Debug, PartialEq)]
pub struct HomomorphismReport {
    pub residuals: Vec<(TimeValue, f64)>,
    /// Largest per-label observation discrepancy `|obs₁(x)(b) − obs₂(h(x))(b)|`.
    pub obs_residual: f64,
    pub tol: f64,
}

impl HomomorphismReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|(_, r)| *r).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_residual() <= self.tol && self.obs_residual <= self.tol
    }
}

/// Checks that the state map `h` (indices of `m1` to indices of `m2`)
/// commutes with the kernels at every probe time and preserves observations.
/// Labels are matched by name.
pub fn check_homomorphism(
    h: &[usize],
    m1: &LabelledModel,
    m2: &LabelledModel,
    times: &[TimeValue],
    tol: f64,
) -> Result<HomomorphismReport> {
    if h.len() != m1.n_states() {
        return Err(Error::invalid(format!("state map has {} entries for {} states", h.len(), m1.n_states())));
    }
    if let Some(&bad) = h.iter().find(|&&y| y >= m2.n_states()) {
        return Err(Error::invalid(format!("state map target {bad} out of range")));
    }
    let m2 = m2.with_label_order(m1.labels())?;
    let (n1, n2) = (m1.n_states(), m2.n_states());
    let hm = DMatrix::from_fn(n2, n1, |k, j| if h[j] == k { 1.0 } else { 0.0 });
    let mut residuals = Vec::with_capacity(times.len());
    for t in times {
        let g = m1.kernel_at(t).matrix;
        let d = m2.kernel_at(t).matrix;
        let diff = &hm * g - d * &hm;
        residuals.push((t.clone(), diff.amax()));
    }
    let mut obs_residual: f64 = 0.0;
    for x in 0..n1 {
        let gap = m1.obs(x).max_abs_diff(m2.obs(h[x]));
        obs_residual = obs_residual.max(gap);
    }
    Ok(HomomorphismReport { residuals, obs_residual, tol })
}

/// Probe times used to verify lumping witnesses.
pub fn probe_times() -> Vec<TimeValue> {
    vec![
        TimeValue::zero(),
        TimeValue::from_ratio(1, 10).expect("valid"),
        TimeValue::from_int(1),
        TimeValue::from_int(5),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, ratio};

    fn two_state(a: i64, b: i64) -> Generator {
        Generator::new(
            vec!["u".into(), "v".into()],
            vec![vec![int(-a), int(b)], vec![int(a), int(-b)]],
        )
        .unwrap()
    }

    #[test]
    fn generator_validation() {
        let bad_sum = Generator::new(vec!["u".into()], vec![vec![int(1)]]);
        assert!(matches!(bad_sum, Err(Error::Validation(_))));
        let negative = Generator::new(
            vec!["u".into(), "v".into()],
            vec![vec![int(1), int(0)], vec![int(-1), int(0)]],
        );
        assert!(negative.unwrap_err().to_string().contains("(1,0)"));
        assert!(Generator::new_partial(vec!["u".into()], vec![vec![int(-1)]]).is_ok());
        assert!(Generator::new_partial(vec!["u".into()], vec![vec![int(1)]]).is_err());
        assert!(Generator::new(vec!["u".into(), "u".into()], vec![vec![int(0); 2]; 2]).is_err());
    }

    #[test]
    fn two_state_kernel_closed_form() {
        let g = two_state(1, 2);
        let t = TimeValue::from_ratio(3, 4).unwrap();
        let k = kernel_at(&g, &t);
        // stationary (2/3, 1/3), relaxation rate 3
        let e = (-3.0f64 * 0.75).exp();
        assert!((k.entry(0, 0) - (2.0 / 3.0 + e / 3.0)).abs() < 1e-11);
        assert!((k.entry(1, 0) - (1.0 / 3.0 - e / 3.0)).abs() < 1e-11);
        let (defect, min) = k.stochasticity_defect();
        assert!(defect < 1e-12 && min >= 0.0);
    }

    #[test]
    fn zero_time_is_identity() {
        let k = kernel_at(&two_state(5, 7), &TimeValue::zero());
        assert_eq!(k.matrix, DMatrix::identity(2, 2));
    }

    #[test]
    fn label_reordering() {
        let g = two_state(1, 1);
        let obs = vec![Dist::dirac(0), Dist::full([(0, ratio(1, 2)), (1, ratio(1, 2))]).unwrap()];
        let m = LabelledModel::new(g, vec!["a".into(), "b".into()], obs).unwrap();
        let r = m.with_label_order(&["b".into(), "a".into()]).unwrap();
        assert_eq!(r.obs(0), &Dist::dirac(1));
        assert!(m.with_label_order(&["a".into(), "c".into()]).is_err());
    }

    #[test]
    fn obs_must_be_full() {
        let obs = vec![Dist::from_weights([(0, ratio(1, 2))]), Dist::dirac(0)];
        let err = LabelledModel::new(two_state(1, 1), vec!["a".into()], obs).unwrap_err();
        assert!(err.to_string().contains("state 0"));
    }
}
