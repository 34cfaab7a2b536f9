//! Normal forms for ground normal logic programs under the answer set semantics.

pub mod cycles;
pub mod error;
pub mod generators;
pub mod kernel;
pub mod normalize;
pub mod program;
pub mod semantics;
pub mod text;

pub use error::{Error, Result};
pub use program::{Atom, Literal, Polarity, Program, Rule};
