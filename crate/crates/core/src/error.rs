use thiserror::Error;

/// Errors raised anywhere in the construction and certification pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} must be even and at least 2, got {value}")]
    Parity { what: &'static str, value: usize },

    #[error("gate at layer {layer} on qubits ({q},{p}): {reason}")]
    BadGate {
        layer: usize,
        q: usize,
        p: usize,
        reason: String,
    },

    #[error("layer {layer}: qubit {qubit} is acted on by more than one gate")]
    OverlappingSupport { layer: usize, qubit: usize },

    #[error("layer {layer}: qubit {qubit} is idle; brickwork circuits need a gate on every qubit in every layer")]
    IdleQubit { layer: usize, qubit: usize },

    #[error("matrix is not unitary: ||U^dag U - I|| = {deviation:.3e}")]
    NonUnitary { deviation: f64 },

    #[error("last layer {depth} must consist of Identity gates for the circular unraveling")]
    LastLayerNotIdentity { depth: usize },

    #[error("single-qubit gates are not accepted on this path")]
    SingleQubitGate,

    #[error("n = {n} = 2kD with D = {depth}: frozen zero-energy loops exist on the torus")]
    FrozenLoops { n: usize, depth: usize },

    #[error("depth D = {depth} must exceed n/2 = {half} for this path")]
    DepthTooShallow { depth: usize, half: usize },

    #[error("time configuration {0:?} is not valid for this circuit")]
    InvalidConfig(Vec<u16>),

    #[error("bit string is not balanced (sum of (-1)^x_i = {0})")]
    Unbalanced(i64),

    #[error(
        "configuration graph is disconnected: {unreached} vertices not reachable from the origin"
    )]
    Disconnected { unreached: usize },

    #[error("operator is not Hermitian: max |H - H^dag| entry = {0:.3e}")]
    NonHermitian(f64),

    #[error("basis mismatch: {left} vs {right}")]
    BasisMismatch { left: String, right: String },

    #[error("Krylov solver did not converge after {iterations} iterations (worst residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("kernels overlap (cos theta = {cos_theta:.12})")]
    KernelsOverlap { cos_theta: f64 },

    #[error("input basis is rank deficient")]
    RankDeficient,

    #[error("qubit {qubit} of S_in is not in the past causal cone of the output qubit {q_out}")]
    CausalCone { qubit: usize, q_out: usize },

    #[error("{0} is out of range")]
    OutOfRange(String),

    #[error("state space too large: {0}")]
    TooLarge(String),

    #[error("gate kind {0} has no controlled-U fermionic representation")]
    NotControlled(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
