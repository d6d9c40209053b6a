//! Exact dilation theory for self-adjoint operators on indefinite inner
//! product modules over commutative characteristic-2 *-rings.
//!
//! The crate builds the Halmos (`V ⊕ V`), Egervary (`N+1` copies) and
//! Sz.-Nagy (bilateral and unilateral sequence space) dilations as explicit
//! block operators, and checks unitarity, isometry and the power-compression
//! identities as exact equalities.

pub mod cli;
pub mod dilation;
pub mod document;
pub mod explorer;
pub mod gf2lin;
pub mod matrix;
pub mod operator;
pub mod ring;
pub mod seqspace;
pub mod space;

pub use dilation::{DilationError, DilationKind, DilationReport, PowerCheck, VerifyParams};
pub use document::{Document, ParseError, ParseErrorKind};
pub use matrix::{Matrix, MatrixError};
pub use operator::{Operator, OperatorClass, OperatorError};
pub use ring::{Elem, Ring, RingError, RingKind, RingSpec, Star};
pub use seqspace::{FinSuppSeq, Laterality, LazyBandedOp, LazyKind, SeqError};
pub use space::{Space, SpaceError, Vector};
