//! Exact tools for vertex models on multigraphs over the Gaussian rationals:
//! partition functions, fragment combinatorics, edge connection matrices and
//! their ranks, tensor invariants of orthogonal subgroups, and one-parameter
//! degeneration limits of spin models.
//!
//! Everything is computed exactly in Q(i); there are no floating-point paths
//! and no epsilons. Square roots that leave Q(i) surface as errors.

pub mod check;
pub mod connection;
pub mod error;
pub mod graph;
pub mod invariants;
pub mod linalg;
pub mod model;
pub mod scalar;
pub mod spin;
pub mod tensor;

pub use connection::{
    build_matrix, rank_via_gram, saturating_rank, Certificate, ConnectionMatrix, RankReport,
};
pub use error::{Error, Result};
pub use graph::{enumerate_fragments, Attachment, Fragment, Graph};
pub use invariants::{brauer_invariant_dim, spin_stabilizer, BrauerDiagram, FiniteOrthogonalGroup};
pub use model::{PartitionPolynomial, SpinForm, VertexModel};
pub use scalar::{GaussRational, Rational};
pub use spin::{
    apply_limit, degenerate_witness, normalize_spin, orbit_closed, LimitResult, OneParamSubgroup,
    TruncatedModel,
};
pub use tensor::{gram_matrix, gram_rank, span_rank, OrthogonalMap, Tensor};
