//! Separating distinct elements of `M_g X` for a generator `g` with a single
//! thresholded modality applied to a characteristic function of `X`.

use serde_json::{json, Value as Json};

use super::formula::Modality;
use crate::error::{Error, Result};
use crate::findist::{Dist, Weight};
use crate::timealg::TimeValue;

/// The generator whose modalities are probed.
#[derive(Clone, Debug, PartialEq)]
pub enum ProbeGrade {
    /// `(r, 0)`: elements of `D X`, probed with `⟨r⟩_q`.
    Delay(TimeValue),
    /// `(0, 1)`: elements of `D(B × X)`, probed with `(b)_q`.
    Observe,
}

/// A point of `X`, labelled when probing the observation generator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProbeAtom {
    pub label: Option<String>,
    pub point: String,
}

impl ProbeAtom {
    pub fn point(point: &str) -> Self {
        ProbeAtom { label: None, point: point.to_string() }
    }

    pub fn labelled(label: &str, point: &str) -> Self {
        ProbeAtom { label: Some(label.to_string()), point: point.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProbeOutcome {
    /// The inputs agree everywhere within the tolerance.
    Equal,
    /// `⟦modality⟧ ∘ M_g f_point` is `⊤` on one side and `⊥` on the other.
    Witness { modality: Modality, point: String, left: bool, right: bool },
}

impl ProbeOutcome {
    pub fn to_json(&self) -> Json {
        match self {
            ProbeOutcome::Equal => json!({ "kind": "equal" }),
            ProbeOutcome::Witness { modality, point, left, right } => json!({
                "kind": "witness",
                "modality": modality.to_string(),
                "characteristic_of": point,
                "left": left,
                "right": right,
            }),
        }
    }
}

/// Finds the first atom (in atom order) where `mu` and `nu` differ by more
/// than `tol`, sets `q` to the larger of the two weights there and returns
/// the modality with threshold `q` applied to the characteristic function
/// of that atom's point. Atoms carrying no mass on either side are never
/// probed. Both inputs must live on `carrier`.
pub fn separating_modality_probe<W: Weight>(
    mu: &Dist<ProbeAtom, W>,
    nu: &Dist<ProbeAtom, W>,
    grade: &ProbeGrade,
    carrier: &[String],
    tol: f64,
) -> Result<ProbeOutcome> {
    for d in [mu, nu] {
        for a in d.support() {
            if !carrier.contains(&a.point) {
                return Err(Error::invalid(format!("point `{}` is not in the carrier", a.point)));
            }
            match (grade, &a.label) {
                (ProbeGrade::Delay(_), Some(b)) => {
                    return Err(Error::invalid(format!("labelled atom ({b}, {}) at a delay grade", a.point)))
                }
                (ProbeGrade::Observe, None) => {
                    return Err(Error::invalid(format!("unlabelled atom {} at the observation grade", a.point)))
                }
                _ => {}
            }
        }
    }
    let mut atoms: Vec<&ProbeAtom> = mu.support().chain(nu.support()).collect();
    atoms.sort();
    atoms.dedup();
    for a in atoms {
        let (p, r) = (mu.get(a), nu.get(a));
        if (p.to_f64() - r.to_f64()).abs() <= tol {
            continue;
        }
        let q = if p > r { p.clone() } else { r.clone() };
        let threshold = Some(q.to_rational());
        let modality = match grade {
            ProbeGrade::Delay(time) => Modality::Delay { time: time.clone(), threshold },
            ProbeGrade::Observe => Modality::Label { label: a.label.clone().expect("checked"), threshold },
        };
        // the pushforward along f_x puts exactly the weight of `a` on ⊤
        // (for labels: on (b, ⊤))
        let holds = |d: &Dist<ProbeAtom, W>| d.get(a) >= q;
        return Ok(ProbeOutcome::Witness { modality, point: a.point.clone(), left: holds(mu), right: holds(nu) });
    }
    Ok(ProbeOutcome::Equal)
}
