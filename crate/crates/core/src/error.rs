//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the simulation and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("unknown mode id {0}")]
    UnknownMode(u16),

    #[error("output mode {0} collides with an occupied spectator mode")]
    ModeCollision(u16),

    #[error("photon number mismatch: {0}")]
    PhotonNumberMismatch(String),

    #[error("post-selection has exactly zero probability")]
    ZeroProbability,

    #[error("post-selection probability {0:.3e} is below the numerical floor")]
    ProbabilityUnderflow(f64),

    #[error("conditional state is not a pure polarization state: {0}")]
    MixedConditional(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("matrix trace {0:.6} differs from 1 beyond tolerance")]
    BadTrace(f64),

    #[error("state is not normalized (squared norm {0:.6})")]
    NotNormalized(f64),

    #[error("{n} sites exceeds the {max}-site limit of the dense solver")]
    TooManySites { n: usize, max: usize },

    #[error("invalid spin system: {0}")]
    InvalidSystem(String),

    #[error("empty spin sector (sz = {0})")]
    EmptySector(f64),

    #[error("requested {k} eigenpairs but the sector has dimension {dim}")]
    SectorTooSmall { k: usize, dim: usize },

    #[error("gap is flat across the scan grid; no avoided crossing to locate")]
    FlatGapScan,

    #[error("invalid dimer covering: {0}")]
    InvalidCovering(String),

    #[error("empty decomposition basis")]
    EmptyBasis,

    #[error("permutation is not an automorphism of the coupling graph")]
    NotAutomorphism,

    #[error("geometry fails the symmetry screen: {0}")]
    SymmetryScreen(String),

    #[error("invalid qubit index set: {0}")]
    BadIndices(String),

    #[error("measurement settings are not informationally complete: {0}")]
    IncompleteSettings(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("config error: {0}")]
    ConfigGeneral(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code the CLI maps this error to: 1 for configuration
    /// problems, 2 for numerical/physical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::ConfigGeneral(_) | Error::Io(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
