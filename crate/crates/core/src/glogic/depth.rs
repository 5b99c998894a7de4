use super::formula::{Formula, Modality};
use crate::error::{Error, Result};
use crate::findist::{Dist, Weight};
use crate::gcoalg::LabelWord;
use crate::numeric::{one, zero, Rational};
use crate::timealg::SamplingWord;

use super::eval::Value;

/// The sampling word a modality consumes.
pub fn modality_depth(m: &Modality) -> SamplingWord {
    match m {
        Modality::Label { .. } => SamplingWord::observe(1),
        Modality::Delay { time, .. } => SamplingWord::delay(time.clone()),
    }
}

/// The uniform depth of `phi`: constants sit at the unit, propositional
/// operators need arguments of equal depth, and `λφ` has depth `d(λ)·depth(φ)`.
pub fn uniform_depth(phi: &Formula) -> Result<SamplingWord> {
    match phi {
        Formula::Const(_) => Ok(SamplingWord::unit()),
        Formula::Prop(_, args) => {
            let depths = args.iter().map(uniform_depth).collect::<Result<Vec<_>>>()?;
            match depths.split_first() {
                None => Ok(SamplingWord::unit()),
                Some((first, rest)) if rest.iter().all(|d| d == first) => Ok(first.clone()),
                Some(_) => Err(Error::NotUniform(phi.to_string())),
            }
        }
        Formula::Modal(m, arg) => Ok(modality_depth(m).mul(&uniform_depth(arg)?)),
    }
}

/// `ev(φ, w)`: the value of a uniform quantitative formula on one label word.
/// Labels are consumed left to right; delays do not consume anything.
pub fn word_value(phi: &Formula, labels: &[String], word: &[usize]) -> Result<Rational> {
    match phi {
        Formula::Const(_) => {
            if word.is_empty() {
                Ok(one())
            } else {
                Err(Error::invalid("label word is longer than the formula depth"))
            }
        }
        Formula::Prop(super::formula::PropOp::Mix(p), args) => {
            let a = word_value(&args[0], labels, word)?;
            let b = word_value(&args[1], labels, word)?;
            Ok(p * a + (one() - p) * b)
        }
        Formula::Prop(op, _) => Err(Error::WrongInstance {
            operator: format!("{op:?}"),
            instance: "quantitative".to_string(),
        }),
        Formula::Modal(m, arg) => {
            if m.threshold().is_some() {
                return Err(Error::WrongInstance { operator: m.to_string(), instance: "quantitative".to_string() });
            }
            match m {
                Modality::Delay { .. } => word_value(arg, labels, word),
                Modality::Label { label, .. } => {
                    let b = labels.iter().position(|l| l == label).ok_or_else(|| Error::UnknownLabel(label.clone()))?;
                    match word.split_first() {
                        None => Err(Error::invalid("label word is shorter than the formula depth")),
                        Some((&first, rest)) if first == b => word_value(arg, labels, rest),
                        Some((_, rest)) => {
                            // still walk the remainder so malformed words are reported
                            word_value(arg, labels, rest)?;
                            Ok(zero())
                        }
                    }
                }
            }
        }
    }
}

/// `⟨φ⟩ : M_k 1 -> [0, 1]` for a uniform quantitative formula of depth `k`,
/// applied to a distribution over label words of length `count(k)`.
pub fn trace_semantics<W: Weight>(phi: &Formula, labels: &[String], nu: &Dist<LabelWord, W>) -> Result<Value> {
    let k = uniform_depth(phi)?;
    if let Some(w) = nu.support().find(|w| w.len() as u64 != k.count()) {
        return Err(Error::invalid(format!(
            "label word of length {} does not match depth {k} (count {})",
            w.len(),
            k.count()
        )));
    }
    if W::exact() {
        let mut total = zero();
        for (w, p) in nu.iter() {
            total += p.to_rational() * word_value(phi, labels, w)?;
        }
        Ok(Value::Exact(total))
    } else {
        let mut total = 0.0;
        for (w, p) in nu.iter() {
            total += p.to_f64() * crate::numeric::to_f64(&word_value(phi, labels, w)?);
        }
        Ok(Value::Approx(total))
    }
}
