//! Graded monad coalgebras for continuous-time probabilistic systems.
//!
//! The crate is organised bottom-up:
//!
//! * [`timealg`]: exact time values and the monoid of sampling intervals.
//! * [`findist`]: finitely-supported (sub)distributions and law checkers.
//! * [`ctmc`]: rate generators, transition kernels, built-in models, lumping.
//! * [`gcoalg`]: the word-graded composite coalgebra, traces, equivalences.
//! * [`glogic`]: Boolean and quantitative modal logics over those coalgebras.
//!
//! Matrices follow the column convention: entry `(k, j)` is the rate (or
//! probability) of moving from state `j` to state `k`, and distributions are
//! column vectors.

pub mod ctmc;
pub mod error;
pub mod findist;
pub mod gcoalg;
pub mod glogic;
pub mod numeric;
pub mod timealg;

pub use error::{Error, Result};
