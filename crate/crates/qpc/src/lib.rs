//! Finite-dimensional numerics for quantum perfect correlations.
//!
//! The crate decides whether two observables (or POVMs) are perfectly
//! correlated in a given state, computes the subspaces that characterize the
//! relation (cyclic subspaces, perfectly correlative domains, commutative
//! domains), builds Naimark dilations and measurement models, and ships a
//! property-based verifier that exercises every equivalence the theory
//! provides as an executable check.
//!
//! Everything is dense complex linear algebra on dimensions up to a few
//! dozen; the eigensolver and SVD are self-contained Jacobi iterations, so
//! there is no external numerical dependency.

pub mod bipartite;
pub mod correlation;
pub mod dilation;
pub mod joint_dist;
pub mod linalg;
pub mod measurement;
pub mod spectral;
pub mod verifier;

pub use correlation::{CorrelationVerdict, QuantumState, Witness};
pub use linalg::{ComplexMatrix, Subspace, ToleranceProfile, C64};
pub use spectral::{HermitianObservable, Povm, RealFunction, RealSet};

/// Errors shared by all modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix entry at ({row},{col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("POVM normalizer stayed singular after {retries} retries")]
    SingularNormalizer { retries: usize },
    #[error("no joint distribution: observables incompatible in this state")]
    IncompatiblePair,
    #[error("meter label sets differ")]
    LabelMismatch,
    #[error("spectrum is degenerate within the clustering tolerance")]
    DegenerateSpectrum,
    #[error("observable spectrum is not {{0,1}}")]
    SpectrumNotBinary,
    #[error("unknown suite id: {0}")]
    UnknownSuite(String),
    #[error("invalid measuring process: {0}")]
    InvalidProcess(String),
}

pub type Result<T> = std::result::Result<T, Error>;
