//! Graph products of cyclic groups: normal forms, automorphisms, and the
//! boundedness of automorphism-invariant word norms.

pub mod automorphisms;
pub mod classes;
pub mod classifier;
pub mod corpus;
pub mod norms;
pub mod presentation;
pub mod quasimorphisms;
pub mod sampling;
pub mod vertex_set;
pub mod words;

pub use classifier::{classify, verify_certificate, Certificate, Verdict};
pub use presentation::{Order, Presentation};
pub use vertex_set::VertexSet;
pub use words::NormalWord;
