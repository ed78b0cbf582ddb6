//! Exact-rational jet calculus for linear and classical connections.

pub mod connection;
pub mod covariant;
pub mod error;
pub mod group;
pub mod identities;
pub mod io;
pub mod multi_index;
pub mod operators;
pub mod reduction;
pub mod scalar;
pub mod series;
pub mod solver;
pub mod suites;
pub mod tensor;

pub use connection::{ClassicalConnectionJet, ConnectionKind, LinearConnectionJet, SymmetricJetPart};
pub use error::{JetError, Result};
pub use group::{DiffeoJet, GaugeJet, WGroupElement};
pub use multi_index::MultiIndex;
pub use scalar::Scalar;
pub use series::TruncatedSeries;
pub use tensor::{SlotKind, TensorFieldJet, Valence};
