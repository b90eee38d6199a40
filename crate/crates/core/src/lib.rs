//! Exact computation with T-spaces of the one-variable free algebra over finite fields.

pub mod error;
pub mod families;
pub mod gf;
pub mod linspan;
pub mod poly;
pub mod replay;
pub mod rewrite;
pub mod unitary;
pub mod verify;

pub use error::{Error, Result};
pub use gf::{FieldElement, FieldSpec};
pub use poly::{Ambient, Exp, SparsePoly};
