//! Nearly-MDS expander codes over prime fields.

pub mod bigraph;
pub mod channel;
pub mod gf;
pub mod gmd;
pub mod grs;
pub mod harness;
pub mod instance;
pub mod iterdec;
pub mod linalg;
pub mod ltenc;
pub mod tanner;

pub use gf::{FieldElement, GfError, PrimeField};
pub use grs::{DecodeFailure, GrsCode, GrsError};
