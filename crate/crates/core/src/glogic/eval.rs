use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use nalgebra::DMatrix;

use super::formula::{Formula, Modality, PropOp};
use crate::ctmc::LabelledModel;
use crate::error::{Error, Result};
use crate::numeric::{format_f64, format_rational, one, to_f64, zero, Rational};
use crate::timealg::TimeValue;

/// Slack granted to `⟨r⟩_p` comparisons whose left side is a float.
pub const THRESHOLD_SLACK: f64 = 1e-12;

/// A quantitative truth value. Values stay exact until a positive delay is crossed.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(Rational),
    Approx(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => to_f64(r),
            Value::Approx(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn scale(&self, w: &Rational) -> Value {
        match self {
            Value::Exact(r) => Value::Exact(r * w),
            Value::Approx(x) => Value::Approx(x * to_f64(w)),
        }
    }

    /// `p·a + (1 − p)·b`.
    pub fn mix(p: &Rational, a: &Value, b: &Value) -> Value {
        let q = one() - p;
        match (a, b) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(p * a + q * b),
            _ => Value::Approx(to_f64(p) * a.to_f64() + to_f64(&q) * b.to_f64()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) => f.write_str(&format_rational(r)),
            Value::Approx(x) => f.write_str(&format_f64(*x)),
        }
    }
}

fn wrong(operator: impl fmt::Display, instance: &str) -> Error {
    Error::WrongInstance { operator: operator.to_string(), instance: instance.to_string() }
}

/// Evaluates formulas over every state of one model, caching kernels by time.
pub struct Evaluator<'a> {
    model: &'a LabelledModel,
    kernels: RwLock<HashMap<TimeValue, Arc<DMatrix<f64>>>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(model: &'a LabelledModel) -> Self {
        Evaluator { model, kernels: RwLock::new(HashMap::new()) }
    }

    pub fn model(&self) -> &'a LabelledModel {
        self.model
    }

    fn kernel(&self, t: &TimeValue) -> Arc<DMatrix<f64>> {
        if let Some(k) = self.kernels.read().unwrap().get(t) {
            return k.clone();
        }
        let k = Arc::new(self.model.kernel_at(t).matrix);
        self.kernels.write().unwrap().insert(t.clone(), k.clone());
        k
    }

    /// Truth value of a Boolean formula at each state.
    pub fn boolean(&self, phi: &Formula) -> Result<Vec<bool>> {
        let n = self.model.n_states();
        match phi {
            Formula::Const(_) => Ok(vec![true; n]),
            Formula::Prop(PropOp::Not, args) => Ok(self.boolean(&args[0])?.into_iter().map(|b| !b).collect()),
            Formula::Prop(PropOp::And, args) => {
                let a = self.boolean(&args[0])?;
                let b = self.boolean(&args[1])?;
                Ok(a.iter().zip(&b).map(|(x, y)| *x && *y).collect())
            }
            Formula::Prop(op @ PropOp::Mix(_), _) => Err(wrong(format!("{op:?}"), "Boolean")),
            Formula::Modal(m, arg) => {
                let inner = self.boolean(arg)?;
                self.boolean_modal(m, &inner)
            }
        }
    }

    /// `⟦λ_p⟧` applied pointwise to the extension `arg` of its argument.
    pub fn boolean_modal(&self, m: &Modality, arg: &[bool]) -> Result<Vec<bool>> {
        let Some(p) = m.threshold() else {
            return Err(wrong(m, "Boolean"));
        };
        let n = self.model.n_states();
        match m {
            Modality::Label { label, .. } => {
                let b = self.model.label_index(label)?;
                Ok((0..n)
                    .map(|x| {
                        let mass = if arg[x] { self.model.obs(x).get(&b) } else { zero() };
                        mass >= *p
                    })
                    .collect())
            }
            Modality::Delay { time, .. } if time.is_zero() => {
                Ok(arg.iter().map(|&v| if v { one() >= *p } else { zero() >= *p }).collect())
            }
            Modality::Delay { time, .. } => {
                let k = self.kernel(time);
                let p = to_f64(p);
                Ok((0..n)
                    .map(|x| {
                        let mass: f64 = (0..n).filter(|&y| arg[y]).map(|y| k[(y, x)]).sum();
                        mass >= p - THRESHOLD_SLACK
                    })
                    .collect())
            }
        }
    }

    /// Value of a quantitative formula at each state.
    pub fn quantitative(&self, phi: &Formula) -> Result<Vec<Value>> {
        if self.model.is_partial() {
            return Err(Error::invalid("the quantitative logic needs a full (non-partial) chain"));
        }
        self.quantitative_inner(phi)
    }

    fn quantitative_inner(&self, phi: &Formula) -> Result<Vec<Value>> {
        let n = self.model.n_states();
        match phi {
            Formula::Const(_) => Ok(vec![Value::Exact(one()); n]),
            Formula::Prop(PropOp::Mix(p), args) => {
                let a = self.quantitative_inner(&args[0])?;
                let b = self.quantitative_inner(&args[1])?;
                Ok(a.iter().zip(&b).map(|(x, y)| Value::mix(p, x, y)).collect())
            }
            Formula::Prop(op, _) => Err(wrong(format!("{op:?}"), "quantitative")),
            Formula::Modal(m, arg) => {
                let inner = self.quantitative_inner(arg)?;
                self.quantitative_modal(m, &inner)
            }
        }
    }

    /// `⟦λ⟧` applied pointwise to the values `arg` of its argument.
    pub fn quantitative_modal(&self, m: &Modality, arg: &[Value]) -> Result<Vec<Value>> {
        if m.threshold().is_some() {
            return Err(wrong(m, "quantitative"));
        }
        let n = self.model.n_states();
        match m {
            Modality::Label { label, .. } => {
                let b = self.model.label_index(label)?;
                Ok((0..n).map(|x| arg[x].scale(&self.model.obs(x).get(&b))).collect())
            }
            Modality::Delay { time, .. } if time.is_zero() => Ok(arg.to_vec()),
            Modality::Delay { time, .. } => {
                let k = self.kernel(time);
                Ok((0..n)
                    .map(|x| Value::Approx((0..n).map(|y| k[(y, x)] * arg[y].to_f64()).sum()))
                    .collect())
            }
        }
    }
}

pub fn eval_boolean(phi: &Formula, m: &LabelledModel, x: usize) -> Result<bool> {
    check_state(m, x)?;
    Ok(Evaluator::new(m).boolean(phi)?[x])
}

pub fn eval_quantitative(phi: &Formula, m: &LabelledModel, x: usize) -> Result<Value> {
    check_state(m, x)?;
    Ok(Evaluator::new(m).quantitative(phi)?.swap_remove(x))
}

fn check_state(m: &LabelledModel, x: usize) -> Result<()> {
    if x >= m.n_states() {
        return Err(Error::UnknownState(x.to_string()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctmc::repairable_3state;
    use crate::glogic::parse_formula;
    use crate::numeric::{int, ratio};

    fn model() -> LabelledModel {
        repairable_3state(&int(1), &int(1)).unwrap()
    }

    #[test]
    fn boolean_examples() {
        let m = model();
        let f = parse_formula("(yes)_0.5 T").unwrap();
        assert_eq!(Evaluator::new(&m).boolean(&f).unwrap(), [false, true, true]);
        let g = parse_formula("<1>_0.3 (yes)_1 T").unwrap();
        // γ_1(2|2) = (1 + e^-2)²/4 ≈ 0.322 and γ_1(2|0) = (1 − e^-2)²/4 ≈ 0.187
        assert!(eval_boolean(&g, &m, 2).unwrap());
        assert!(!eval_boolean(&g, &m, 0).unwrap());
        assert!(eval_boolean(&parse_formula("<0>_1 T").unwrap(), &m, 0).unwrap());
        assert!(matches!(eval_boolean(&f, &m, 7), Err(Error::UnknownState(_))));
    }

    #[test]
    fn quantitative_examples() {
        let m = model();
        let f = parse_formula("<1> (yes) T").unwrap();
        let v = eval_quantitative(&f, &m, 2).unwrap();
        assert!((v.to_f64() - (1.0 + (-2.0f64).exp()) / 2.0).abs() < 1e-12);
        let g = parse_formula("(yes) T +_1/4 T").unwrap();
        assert_eq!(eval_quantitative(&g, &m, 1).unwrap(), Value::Exact(ratio(7, 8)));
        assert!(matches!(
            eval_quantitative(&parse_formula("!T").unwrap(), &m, 0),
            Err(Error::WrongInstance { .. })
        ));
        assert!(matches!(eval_boolean(&f, &m, 0), Err(Error::WrongInstance { .. })));
        assert!(matches!(
            eval_boolean(&parse_formula("(maybe)_0.5 T").unwrap(), &m, 0),
            Err(Error::UnknownLabel(_))
        ));
    }
}
