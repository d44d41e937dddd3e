//! Blind, anonymous and traceable trapdoor issuance for public-key
//! encryption with keyword search.
//!
//! A data user holding an anonymous credential obtains a search trapdoor
//! for a keyword from the trapdoor generation center without revealing the
//! keyword or their identity. Every request leaves a record on an
//! append-only ledger that only the tracer can open, recovering the
//! requester's identity and the keyword.

pub mod algebra;
pub mod credential;
pub mod error;
pub mod harness;
pub mod homomorphic;
pub mod ledger;
pub mod scheme;
pub mod zkp;

pub use algebra::{Decode, Encode, G1Elem, G2Elem, GtElem, Scalar, SystemParams};
pub use error::{Error, Result};
