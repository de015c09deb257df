//! Witness-based nonlinear entanglement detection on multiple copies of a
//! state.
//!
//! Witnesses are placed on slots that cross copy boundaries (for example
//! `W` on `A B'` and `V` on `B A'`) and the product is evaluated against
//! `rho^{(x)k}`. The crate also provides the dense linear algebra and tensor
//! index machinery this needs, a PPT check, and a two-copy entanglement
//! concentration protocol.

pub mod concentration;
pub mod detection;
pub mod error;
pub mod format;
pub mod linalg;
pub mod multipartite;
pub mod ppt;
pub mod reproduce;
pub mod scenario;
pub mod states;
pub mod witnesses;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use multipartite::{MultipartiteOperator, SubsystemShape};
