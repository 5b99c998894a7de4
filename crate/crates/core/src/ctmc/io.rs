//! JSON model files.
//!
//! ```json
//! {
//!   "states": ["up", "down"],
//!   "rates": [[-1, "3/2"], [1, "-3/2"]],
//!   "labels": ["ok", "fail"],
//!   "obs": {"up": {"ok": 1}, "down": {"fail": 1}}
//! }
//! ```
//!
//! Rates use the column convention (`rates[k][j]` is the rate `j -> k`).
//! Numbers may be JSON numbers or strings holding decimals or fractions.
//! The optional `"partial": true` admits columns summing below zero.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Generator, LabelledModel};
use crate::error::{Error, Result};
use crate::findist::Dist;
use crate::numeric::{format_rational, parse_rational, Rational};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub states: Vec<String>,
    pub rates: Vec<Vec<Value>>,
    pub labels: Vec<String>,
    pub obs: BTreeMap<String, BTreeMap<String, Value>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub partial: bool,
}

fn number(v: &Value, at: &str) -> Result<Rational> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => return Err(Error::validation(format!("{at}: expected a number, found {other}"))),
    };
    parse_rational(&text).map_err(|_| Error::validation(format!("{at}: `{text}` is not a number")))
}

impl ModelFile {
    pub fn into_model(self) -> Result<LabelledModel> {
        let mut rates = Vec::with_capacity(self.rates.len());
        for (k, row) in self.rates.iter().enumerate() {
            let parsed: Result<Vec<Rational>> =
                row.iter().enumerate().map(|(j, v)| number(v, &format!("rates[{k}][{j}]"))).collect();
            rates.push(parsed?);
        }
        let generator = if self.partial {
            Generator::new_partial(self.states.clone(), rates)?
        } else {
            Generator::new(self.states.clone(), rates)?
        };
        if let Some(extra) = self.obs.keys().find(|s| !self.states.contains(s)) {
            return Err(Error::validation(format!("obs given for unknown state `{extra}`")));
        }
        let mut obs = Vec::with_capacity(self.states.len());
        for (x, s) in self.states.iter().enumerate() {
            let row = self
                .obs
                .get(s)
                .ok_or_else(|| Error::validation(format!("obs missing for state {x} (`{s}`)")))?;
            let mut weights = Vec::with_capacity(row.len());
            for (b, v) in row {
                let at = format!("obs[{s}][{b}]");
                let idx = self
                    .labels
                    .iter()
                    .position(|l| l == b)
                    .ok_or_else(|| Error::validation(format!("{at}: unknown label")))?;
                let w = number(v, &at)?;
                if num_traits::Signed::is_negative(&w) {
                    return Err(Error::validation(format!("{at}: negative weight")));
                }
                weights.push((idx, w));
            }
            obs.push(Dist::from_weights(weights));
        }
        LabelledModel::new(generator, self.labels, obs)
    }

    pub fn from_model(m: &LabelledModel) -> Self {
        let as_value = |r: &Rational| Value::String(format_rational(r));
        let rates = m.generator().rates().iter().map(|row| row.iter().map(as_value).collect()).collect();
        let obs = m
            .states()
            .iter()
            .enumerate()
            .map(|(x, s)| {
                let row = m.obs(x).iter().map(|(b, w)| (m.labels()[*b].clone(), as_value(w))).collect();
                (s.clone(), row)
            })
            .collect();
        ModelFile {
            states: m.states().to_vec(),
            rates,
            labels: m.labels().to_vec(),
            obs,
            partial: m.is_partial(),
        }
    }
}

pub fn model_from_json(text: &str) -> Result<LabelledModel> {
    let file: ModelFile = serde_json::from_str(text)?;
    file.into_model()
}

pub fn model_to_json(m: &LabelledModel) -> String {
    serde_json::to_string_pretty(&ModelFile::from_model(m)).expect("model files serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctmc::repairable_4state;
    use crate::numeric::{int, ratio};

    #[test]
    fn roundtrip() {
        let m = repairable_4state(&ratio(3, 2), &int(1)).unwrap();
        let back = model_from_json(&model_to_json(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn parses_mixed_numbers() {
        let text = r#"{"states":["u","d"],"rates":[[-1,"3/2"],[1.0,-1.5]],
            "labels":["ok","fail"],"obs":{"u":{"ok":1},"d":{"fail":"1/2","ok":0.5}}}"#;
        let m = model_from_json(text).unwrap();
        assert_eq!(m.generator().rate(0, 1), &ratio(3, 2));
        assert_eq!(m.obs(1).get(&1), ratio(1, 2));
    }

    #[test]
    fn reports_first_violation_with_indices() {
        let text = r#"{"states":["u","d"],"rates":[[-1,2],[1,-1]],"labels":["ok"],"obs":{"u":{"ok":1},"d":{"ok":1}}}"#;
        let err = model_from_json(text).unwrap_err().to_string();
        assert!(err.contains("column 1"), "{err}");
        let text = r#"{"states":["u"],"rates":[["x"]],"labels":["ok"],"obs":{"u":{"ok":1}}}"#;
        assert!(model_from_json(text).unwrap_err().to_string().contains("rates[0][0]"));
        let text = r#"{"states":["u"],"rates":[[0]],"labels":["ok"],"obs":{"u":{"ok":"1/2"}}}"#;
        assert!(model_from_json(text).unwrap_err().to_string().contains("mass"));
        let text = r#"{"states":["u"],"rates":[[-1]],"labels":["ok"],"obs":{"u":{"ok":1}},"partial":true}"#;
        assert!(model_from_json(text).unwrap().is_partial());
    }
}
