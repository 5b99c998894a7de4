//! Trace equivalence (bounded search plus an exact single-delay mode) and
//! behavioural equivalence via lumping witnesses.

use serde_json::{json, Value};

use super::{show_label_word, LabelWord, WordGradedKernel};
use crate::ctmc::{eigen_solution, lumpability_quotient, LabelledModel};
use crate::error::{Error, Result};
use crate::findist::Dist;
use crate::numeric::format_f64;
use crate::timealg::{SamplingWord, TimeValue};

#[derive(Clone, Debug, PartialEq)]
pub struct TraceConfig {
    pub time_grid: Vec<TimeValue>,
    pub max_segments: usize,
    pub max_obs: u64,
    pub tol: f64,
    /// Also compare the eigen-coefficients of single-delay traces.
    pub exact: bool,
}

impl Default for TraceConfig {
    fn default() -> Self {
        let grid = [(1, 10), (1, 2), (1, 1), (2, 1), (5, 1)];
        TraceConfig {
            time_grid: grid.iter().map(|&(n, d)| TimeValue::from_ratio(n, d).expect("valid")).collect(),
            max_segments: 3,
            max_obs: 4,
            tol: 1e-8,
            exact: false,
        }
    }
}

/// Normalized words with positive times from `grid` (plus a leading zero),
/// at most `max_segments` segments and `max_obs` observations, sorted.
pub fn enumerate_words(grid: &[TimeValue], max_segments: usize, max_obs: u64) -> Vec<SamplingWord> {
    let mut positive: Vec<TimeValue> = grid.iter().filter(|t| !t.is_zero()).cloned().collect();
    positive.sort();
    positive.dedup();
    let mut out = Vec::new();
    let mut firsts = vec![TimeValue::zero()];
    firsts.extend(positive.iter().cloned());

    fn extend(
        prefix: &mut Vec<(TimeValue, u64)>,
        budget: u64,
        max_segments: usize,
        positive: &[TimeValue],
        out: &mut Vec<SamplingWord>,
    ) {
        // the last segment may end with zero observations
        for k in 0..=budget {
            let mut word = prefix.clone();
            word.last_mut().expect("nonempty").1 = k;
            out.push(SamplingWord::normalize(word));
            if k > 0 && prefix.len() < max_segments {
                for t in positive {
                    prefix.last_mut().expect("nonempty").1 = k;
                    prefix.push((t.clone(), 0));
                    extend(prefix, budget - k, max_segments, positive, out);
                    prefix.pop();
                }
            }
        }
    }
    if max_segments == 0 {
        return vec![SamplingWord::unit()];
    }
    for t in firsts {
        let mut prefix = vec![(t, 0)];
        extend(&mut prefix, max_obs, max_segments, &positive, &mut out);
    }
    out.sort();
    out.dedup();
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceBound {
    pub time_grid: Vec<TimeValue>,
    pub max_segments: usize,
    pub max_obs: u64,
    pub tol: f64,
    pub words_checked: usize,
}

/// Outcome of comparing single-delay traces through eigen-coefficients.
#[derive(Clone, Debug, PartialEq)]
pub enum ExactReport {
    /// Every coefficient family agreed; `families` were compared.
    Agree { families: usize },
    /// The first coefficient family that differs.
    Disagree { word: String, label_word: String, eigenvalue: f64, left: f64, right: f64 },
    /// An eigendecomposition was unavailable for one of the models.
    Unavailable,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TraceVerdict {
    Distinguished {
        word: SamplingWord,
        left: Dist<String, f64>,
        right: Dist<String, f64>,
        gap: f64,
    },
    IndistinguishableUpTo { bound: TraceBound, exact: Option<ExactReport> },
}

impl TraceVerdict {
    pub fn is_distinguished(&self) -> bool {
        matches!(self, TraceVerdict::Distinguished { .. })
    }

    pub fn to_json(&self) -> Value {
        let dist = |d: &Dist<String, f64>| -> Value {
            d.iter().map(|(w, p)| (w.clone(), Value::String(format_f64(*p)))).collect::<serde_json::Map<_, _>>().into()
        };
        match self {
            TraceVerdict::Distinguished { word, left, right, gap } => json!({
                "kind": "Distinguished",
                "witness_word": word.to_string(),
                "trace_left": dist(left),
                "trace_right": dist(right),
                "gap": format_f64(*gap),
            }),
            TraceVerdict::IndistinguishableUpTo { bound, exact } => {
                let mut v = json!({
                    "kind": "IndistinguishableUpTo",
                    "bound": {
                        "time_grid": bound.time_grid.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                        "max_segments": bound.max_segments,
                        "max_obs": bound.max_obs,
                        "tol": format_f64(bound.tol),
                        "words_checked": bound.words_checked,
                    },
                });
                if let Some(e) = exact {
                    v["exact"] = match e {
                        ExactReport::Agree { families } => json!({"result": "agree", "families": families}),
                        ExactReport::Disagree { word, label_word, eigenvalue, left, right } => json!({
                            "result": "disagree",
                            "word": word,
                            "label_word": label_word,
                            "eigenvalue": format_f64(*eigenvalue),
                            "left": format_f64(*left),
                            "right": format_f64(*right),
                        }),
                        ExactReport::Unavailable => json!({"result": "unavailable"}),
                    };
                }
                v
            }
        }
    }
}

fn named(labels: &[String], d: &Dist<LabelWord, f64>) -> Dist<String, f64> {
    d.map(|w| show_label_word(labels, w))
}

/// Bounded trace comparison of `x` in `m1` against `y` in `m2`.
pub fn trace_equivalent(
    m1: &LabelledModel,
    x: usize,
    m2: &LabelledModel,
    y: usize,
    config: &TraceConfig,
) -> Result<TraceVerdict> {
    if x >= m1.n_states() || y >= m2.n_states() {
        return Err(Error::UnknownState(format!("#{}", if x >= m1.n_states() { x } else { y })));
    }
    if config.time_grid.is_empty() {
        return Err(Error::invalid("time grid is empty"));
    }
    let m2 = m2.with_label_order(m1.labels())?;
    let k1 = WordGradedKernel::<_, f64>::new(m1);
    let k2 = WordGradedKernel::<_, f64>::new(&m2);
    let words = enumerate_words(&config.time_grid, config.max_segments, config.max_obs);
    for w in &words {
        let left = k1.trace_vector(x, w)?;
        let right = k2.trace_vector(y, w)?;
        let gap = left.max_abs_diff(&right);
        if gap > config.tol {
            return Ok(TraceVerdict::Distinguished {
                word: w.clone(),
                left: named(m1.labels(), &left),
                right: named(m1.labels(), &right),
                gap,
            });
        }
    }
    let bound = TraceBound {
        time_grid: config.time_grid.clone(),
        max_segments: config.max_segments,
        max_obs: config.max_obs,
        tol: config.tol,
        words_checked: words.len(),
    };
    let exact = config.exact.then(|| exact_single_delay(m1, x, &m2, y, config));
    Ok(TraceVerdict::IndistinguishableUpTo { bound, exact })
}

/// Coefficients of `t ↦ P(w0 w1 | x, (0, k0, t, k1))` as an exponential
/// polynomial, one entry per eigenvalue cluster.
fn coefficients(
    m: &LabelledModel,
    x: usize,
    clusters: &[(f64, nalgebra::DMatrix<f64>)],
    k0: u64,
    k1: u64,
) -> Vec<(LabelWord, Vec<(f64, f64)>)> {
    let k = WordGradedKernel::<_, f64>::new(m);
    let first = k.observations(x, k0);
    let n = m.n_states();
    let seconds: Vec<_> = (0..n).map(|z| k.observations(z, k1)).collect();
    let mut words: Vec<LabelWord> = Vec::new();
    for (w0, _) in first.iter() {
        for z in 0..n {
            for (w1, _) in seconds[z].iter() {
                let mut w = w0.clone();
                w.extend_from_slice(w1);
                words.push(w);
            }
        }
    }
    words.sort();
    words.dedup();
    words
        .into_iter()
        .map(|w| {
            let (w0, w1) = w.split_at(k0 as usize);
            let p0 = first.get(&w0.to_vec());
            let coeffs = clusters
                .iter()
                .map(|(l, proj)| {
                    let s: f64 = (0..n).map(|z| proj[(z, x)] * seconds[z].get(&w1.to_vec())).sum();
                    (*l, p0 * s)
                })
                .collect();
            (w, coeffs)
        })
        .collect()
}

fn exact_single_delay(m1: &LabelledModel, x: usize, m2: &LabelledModel, y: usize, config: &TraceConfig) -> ExactReport {
    let (Some(e1), Some(e2)) = (eigen_solution(m1.generator()), eigen_solution(m2.generator())) else {
        return ExactReport::Unavailable;
    };
    let projectors = |e: &crate::ctmc::EigenSolution| -> Vec<(f64, nalgebra::DMatrix<f64>)> {
        e.clusters().into_iter().map(|(l, idx)| (l, e.projector(&idx))).collect()
    };
    let (p1, p2) = (projectors(&e1), projectors(&e2));
    let mut families = 0;
    for k0 in 0..=config.max_obs {
        for k1 in 0..=(config.max_obs - k0) {
            let c1 = coefficients(m1, x, &p1, k0, k1);
            let c2 = coefficients(m2, y, &p2, k0, k1);
            let mut all: Vec<LabelWord> = c1.iter().chain(c2.iter()).map(|(w, _)| w.clone()).collect();
            all.sort();
            all.dedup();
            let lookup = |c: &[(LabelWord, Vec<(f64, f64)>)], w: &LabelWord| {
                c.iter().find(|(v, _)| v == w).map(|(_, cs)| cs.clone()).unwrap_or_default()
            };
            for w in all {
                let (a, b) = (lookup(&c1, &w), lookup(&c2, &w));
                // merge both coefficient lists by eigenvalue
                let mut merged: Vec<(f64, f64, f64)> = Vec::new();
                for (l, c) in a {
                    merged.push((l, c, 0.0));
                }
                for (l, c) in b {
                    match merged.iter_mut().find(|e| (e.0 - l).abs() <= 1e-7 * l.abs().max(1.0)) {
                        Some(e) => e.2 += c,
                        None => merged.push((l, 0.0, c)),
                    }
                }
                families += 1;
                if let Some(&(l, left, right)) = merged.iter().find(|e| (e.1 - e.2).abs() > config.tol) {
                    let word = if k0 == 0 { format!("t:{k1}") } else { format!("0:{k0},t:{k1}") };
                    return ExactReport::Disagree {
                        word,
                        label_word: show_label_word(m1.labels(), &w),
                        eigenvalue: l,
                        left,
                        right,
                    };
                }
            }
        }
    }
    ExactReport::Agree { families }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BehaviouralVerdict {
    /// Both states lie in one block of a verified lumping of the disjoint union.
    EquivalentWitness { partition: Vec<Vec<String>>, map: Vec<(String, String)> },
    /// No lumping merges the states; this does not prove inequivalence.
    NoWitnessFound { partition: Vec<Vec<String>>, rounds: usize },
}

impl BehaviouralVerdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, BehaviouralVerdict::EquivalentWitness { .. })
    }

    pub fn to_json(&self) -> Value {
        match self {
            BehaviouralVerdict::EquivalentWitness { partition, map } => json!({
                "kind": "EquivalentWitness",
                "partition": partition,
                "map": map.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
            }),
            BehaviouralVerdict::NoWitnessFound { partition, rounds } => json!({
                "kind": "NoWitnessFound",
                "partition": partition,
                "rounds": rounds,
            }),
        }
    }
}

/// Searches for a lumping of the disjoint union (state names prefixed by
/// `a.` and `b.`) that puts `x` and `y` in one block.
pub fn behavioural_equivalent(m1: &LabelledModel, x: usize, m2: &LabelledModel, y: usize) -> Result<BehaviouralVerdict> {
    if x >= m1.n_states() || y >= m2.n_states() {
        return Err(Error::UnknownState(format!("#{}", if x >= m1.n_states() { x } else { y })));
    }
    let union = m1.disjoint_union(m2, ("a.", "b."))?;
    let lumping = lumpability_quotient(&union)?;
    let names = union.states();
    let partition: Vec<Vec<String>> =
        lumping.blocks.iter().map(|b| b.iter().map(|&s| names[s].clone()).collect()).collect();
    if !lumping.report.passed() {
        return Ok(BehaviouralVerdict::NoWitnessFound { partition, rounds: lumping.rounds });
    }
    if lumping.same_block(x, m1.n_states() + y) {
        let map = (0..names.len())
            .map(|s| (names[s].clone(), lumping.quotient.states()[lumping.block_of[s]].clone()))
            .collect();
        Ok(BehaviouralVerdict::EquivalentWitness { partition, map })
    } else {
        Ok(BehaviouralVerdict::NoWitnessFound { partition, rounds: lumping.rounds })
    }
}
