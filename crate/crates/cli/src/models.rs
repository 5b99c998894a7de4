use std::path::PathBuf;

use graded_coalg::ctmc::{model_from_json, repairable_3state, repairable_4state, LabelledModel};
use graded_coalg::gcoalg::{random_walk, GradedStepCoalgebra};
use graded_coalg::numeric::{parse_rational, Rational};

use crate::{Builtin, Failure, Global};

/// Where a model comes from.
pub struct Source {
    pub model: Option<PathBuf>,
    pub builtin: Option<Builtin>,
}

impl Source {
    pub fn primary(g: &Global) -> Self {
        Source { model: g.model.clone(), builtin: g.builtin }
    }

    pub fn is_given(&self) -> bool {
        self.model.is_some() || self.builtin.is_some()
    }
}

pub enum Loaded {
    Chain(LabelledModel),
    Walk(GradedStepCoalgebra<i64>),
}

pub fn rates(g: &Global) -> Result<(Rational, Rational), Failure> {
    Ok((parse_rational(&g.lambda)?, parse_rational(&g.mu)?))
}

pub fn load(g: &Global, source: &Source) -> Result<Loaded, Failure> {
    if let Some(path) = &source.model {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        return Ok(Loaded::Chain(model_from_json(&text)?));
    }
    let (lambda, mu) = rates(g)?;
    Ok(match source.builtin.unwrap_or(Builtin::Repairable4) {
        Builtin::Repairable4 => Loaded::Chain(repairable_4state(&lambda, &mu)?),
        Builtin::Repairable3 => Loaded::Chain(repairable_3state(&lambda, &mu)?),
        Builtin::Randomwalk => Loaded::Walk(random_walk(g.radius)?),
    })
}

/// Loads a chain, rejecting the discrete-time random walk.
pub fn load_chain(g: &Global, source: &Source) -> Result<LabelledModel, Failure> {
    match load(g, source)? {
        Loaded::Chain(m) => Ok(m),
        Loaded::Walk(_) => Err(Failure::Usage(
            "the randomwalk built-in is a discrete-time step coalgebra; only `kernel` accepts it".into(),
        )),
    }
}

pub fn state(m: &LabelledModel, name: &str) -> Result<usize, Failure> {
    Ok(m.state_index(name)?)
}
