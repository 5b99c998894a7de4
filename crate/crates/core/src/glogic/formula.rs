use std::fmt;

use crate::error::{Error, Result};
use crate::numeric::{format_rational, Rational};
use crate::timealg::TimeValue;

/// Which logic a formula belongs to. `T` alone belongs to both.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Instance {
    /// Truth values `{⊥, ⊤}`; operators `¬`, `∧`, `(b)_p`, `⟨r⟩_p`.
    Boolean,
    /// Truth values in `[0, 1]`; operators `+_p`, `(b)`, `⟨r⟩`.
    Quantitative,
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Instance::Boolean => "Boolean",
            Instance::Quantitative => "quantitative",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Constant {
    Top,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PropOp {
    Not,
    And,
    /// `a +_p b = p·a + (1 − p)·b`.
    Mix(Rational),
}

impl PropOp {
    pub fn arity(&self) -> usize {
        match self {
            PropOp::Not => 1,
            PropOp::And | PropOp::Mix(_) => 2,
        }
    }

    pub fn instance(&self) -> Instance {
        match self {
            PropOp::Not | PropOp::And => Instance::Boolean,
            PropOp::Mix(_) => Instance::Quantitative,
        }
    }
}

/// Unary modalities; a threshold selects the Boolean variant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Modality {
    /// `(b)` or `(b)_p`, depth `(0, 1)`.
    Label { label: String, threshold: Option<Rational> },
    /// `⟨r⟩` or `⟨r⟩_p`, depth `(r, 0)`.
    Delay { time: TimeValue, threshold: Option<Rational> },
}

impl Modality {
    pub fn threshold(&self) -> Option<&Rational> {
        match self {
            Modality::Label { threshold, .. } | Modality::Delay { threshold, .. } => threshold.as_ref(),
        }
    }

    pub fn instance(&self) -> Instance {
        if self.threshold().is_some() {
            Instance::Boolean
        } else {
            Instance::Quantitative
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modality::Label { label, .. } => write!(f, "({label})")?,
            Modality::Delay { time, .. } => write!(f, "<{time}>")?,
        }
        if let Some(p) = self.threshold() {
            write!(f, "_{}", format_rational(p))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Const(Constant),
    Prop(PropOp, Vec<Formula>),
    Modal(Modality, Box<Formula>),
}

impl Formula {
    pub fn top() -> Self {
        Formula::Const(Constant::Top)
    }

    pub fn not(arg: Formula) -> Self {
        Formula::Prop(PropOp::Not, vec![arg])
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::Prop(PropOp::And, vec![a, b])
    }

    pub fn mix(p: Rational, a: Formula, b: Formula) -> Self {
        Formula::Prop(PropOp::Mix(p), vec![a, b])
    }

    pub fn modal(m: Modality, arg: Formula) -> Self {
        Formula::Modal(m, Box::new(arg))
    }

    pub fn label(label: &str, threshold: Option<Rational>, arg: Formula) -> Self {
        Self::modal(Modality::Label { label: label.to_string(), threshold }, arg)
    }

    pub fn delay(time: TimeValue, threshold: Option<Rational>, arg: Formula) -> Self {
        Self::modal(Modality::Delay { time, threshold }, arg)
    }

    /// Checks arities and that all probabilities lie in `[0, 1]`.
    pub fn validate(&self) -> Result<()> {
        let unit = |p: &Rational| {
            if num_traits::Signed::is_negative(p) || *p > crate::numeric::one() {
                Err(Error::invalid(format!("probability {} outside [0,1]", format_rational(p))))
            } else {
                Ok(())
            }
        };
        match self {
            Formula::Const(_) => Ok(()),
            Formula::Prop(op, args) => {
                if args.len() != op.arity() {
                    return Err(Error::invalid(format!("operator expects {} arguments, got {}", op.arity(), args.len())));
                }
                if let PropOp::Mix(p) = op {
                    unit(p)?;
                }
                args.iter().try_for_each(Formula::validate)
            }
            Formula::Modal(m, arg) => {
                if let Some(p) = m.threshold() {
                    unit(p)?;
                }
                arg.validate()
            }
        }
    }

    /// The logic the formula belongs to; `None` for formulas built from `T` only.
    pub fn instance(&self) -> Result<Option<Instance>> {
        let mut found: Option<Instance> = None;
        let mut conflict = None;
        self.visit(&mut |f| {
            let here = match f {
                Formula::Const(_) => None,
                Formula::Prop(op, _) => Some(op.instance()),
                Formula::Modal(m, _) => Some(m.instance()),
            };
            if let Some(i) = here {
                match found {
                    None => found = Some(i),
                    Some(j) if j != i && conflict.is_none() => conflict = Some(f.to_string()),
                    _ => {}
                }
            }
        });
        match conflict {
            Some(sub) => Err(Error::invalid(format!("formula mixes Boolean and quantitative operators at `{sub}`"))),
            None => Ok(found),
        }
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Const(_) => {}
            Formula::Prop(_, args) => args.iter().for_each(|a| a.visit(f)),
            Formula::Modal(_, arg) => arg.visit(f),
        }
    }

    /// Nesting depth of modal operators.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Const(_) => 0,
            Formula::Prop(_, args) => args.iter().map(Formula::modal_depth).max().unwrap_or(0),
            Formula::Modal(_, arg) => 1 + arg.modal_depth(),
        }
    }

    /// Labels mentioned anywhere in the formula.
    pub fn labels(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Modal(Modality::Label { label, .. }, _) = f {
                if !out.contains(label) {
                    out.push(label.clone());
                }
            }
        });
        out
    }

    fn is_binary(&self) -> bool {
        matches!(self, Formula::Prop(op, _) if op.arity() == 2)
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_binary() {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Canonical concrete syntax; `&` and `+_p` associate to the left.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Const(Constant::Top) => f.write_str("T"),
            Formula::Prop(PropOp::Not, args) => {
                f.write_str("!")?;
                args[0].fmt_operand(f)
            }
            Formula::Prop(op, args) => {
                write!(f, "{}", args[0])?;
                match op {
                    PropOp::And => f.write_str(" & ")?,
                    PropOp::Mix(p) => write!(f, " +_{} ", format_rational(p))?,
                    PropOp::Not => unreachable!(),
                }
                args[1].fmt_operand(f)
            }
            Formula::Modal(m, arg) => {
                write!(f, "{m} ")?;
                arg.fmt_operand(f)
            }
        }
    }
}
