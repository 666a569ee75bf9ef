//! Unique decoders for interleaved, folded and multiplicity Reed-Solomon codes
//! under semi-adversarial errors, together with the polynomial machinery they
//! run on and brute-force oracles for checking them.
//!
//! The decoders reduce decoding to a shifted polynomial-module minimization
//! ([`minimize::solve`]) followed by one exact polynomial division. All
//! arithmetic is exact over prime fields and small extension fields.

pub mod bounds;
pub mod channel;
pub mod codes;
pub mod decode;
pub mod error;
pub mod field;
pub mod format;
pub mod linalg;
pub mod minimize;
mod ntt;
pub mod poly;

pub use channel::{Adversary, ChannelSpec, ErrorPattern};
pub use codes::{CodeSpec, Family, Message, Word};
pub use decode::{DecodeResult, FailReason, Outcome};
pub use error::{Error, FieldError, Result};
pub use field::{make_field, Fe, Field, FieldSpec, SubfieldEmbedding};
pub use minimize::{MinimizeProblem, MinimizeSolution};
pub use poly::{Degree, PointSet, Poly};
