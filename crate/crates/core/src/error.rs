use alloc::string::String;

/// Errors produced by the entanglement toolkit.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("state vector has zero norm")]
    Normalization,
    #[error("basis entry {0} appears more than once")]
    DuplicateBasis(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error("qubit subset must be a nonempty proper subset of the register: {0}")]
    Subset(String),
    #[error("qubit index {index} outside a {n_qubits}-qubit register")]
    InvalidQubit { index: usize, n_qubits: usize },
    #[error("register of {0} qubits is outside the supported range 1..=8")]
    RegisterSize(usize),
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    Hermiticity(f64),
    #[error("density matrix trace is {0}, expected 1")]
    Trace(f64),
    #[error("eigenvalue {0:e} is below the clipping floor")]
    NegativeEigenvalue(f64),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },
    #[error("linear system is underdetermined: solution manifold has dimension {0}")]
    Underdetermined(usize),
    #[error("measure is not defined for this state family: {0}")]
    UnsupportedFamily(String),
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("density matrix has rank above 2 (third eigenvalue {0:e})")]
    Rank(f64),
    #[error("mixing matrix columns are not orthonormal (deviation {0:e})")]
    Isometry(f64),
    #[error("eigenvector has weight {0:e} outside the cluster-class support")]
    UnsupportedSupport(f64),
    #[error("{quantity} = {computed} does not match the reference {expected}")]
    Reproduction {
        quantity: String,
        computed: f64,
        expected: f64,
    },
}

pub type Result<T> = core::result::Result<T, Error>;
