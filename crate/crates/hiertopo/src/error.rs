use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("self-edge at node {0}")]
    SelfEdge(usize),

    #[error("duplicate edge between {0} and {1}")]
    DuplicateEdge(usize, usize),

    #[error("edge ({i}, {j}) has nonpositive weight {weight}")]
    NonpositiveWeight { i: usize, j: usize, weight: f64 },

    #[error("node index {index} out of range for order {order}")]
    NodeOutOfRange { index: usize, order: usize },

    #[error("{name} = {value} is below the minimum {min}")]
    ParameterTooSmall {
        name: &'static str,
        value: usize,
        min: usize,
    },

    #[error("graph is disconnected")]
    Disconnected,

    #[error("exact Cheeger search is limited to {max} nodes, graph has {n}; use the heuristic mode")]
    CheegerTooLarge { n: usize, max: usize },

    #[error("level weight alpha must be positive, got {0}")]
    NonpositiveAlpha(f64),

    #[error("the bottom-level weight must be 1, got {0}")]
    UnnormalizedAlphas(f64),

    #[error("hierarchy needs at least one base graph")]
    EmptyHierarchy,

    #[error("base graph at level {level} must be connected with order >= 2")]
    InvalidBase { level: usize },

    #[error("{alphas} level weights given for {bases} base graphs")]
    AlphaCountMismatch { alphas: usize, bases: usize },

    #[error("truncated hierarchies require identical base graphs at every level")]
    MixedTruncatedBases,

    #[error("truncated hierarchies need bases rooted at vertex 0, got root {0}")]
    TruncatedRootPlacement(usize),

    #[error("address digit at position {position} (value {digit}) must be zero after an earlier zero digit")]
    TrailingZeroViolation { position: usize, digit: usize },

    #[error("address digit at position {position} (value {digit}) exceeds base order {order}")]
    DigitOutOfRange {
        position: usize,
        digit: usize,
        order: usize,
    },

    #[error("address has {got} digits, hierarchy has {want} levels")]
    AddressLengthMismatch { got: usize, want: usize },

    #[error("characteristic polynomials are limited to order {max}, matrix has order {n}")]
    CharPolyTooLarge { n: usize, max: usize },

    #[error("eigenvalue recursion is defined for non-truncated hierarchies only")]
    TruncatedSpectrumUnsupported,

    #[error("root finding failed at level {level} for block eigenvalue {mu}: {reason}")]
    RootFinding {
        level: usize,
        mu: f64,
        reason: String,
    },

    #[error("root at level {level} for block eigenvalue {mu} kept imaginary part {imag:e}")]
    ComplexRoot { level: usize, mu: f64, imag: f64 },

    #[error("spectral gap {0:e} is not positive; graph appears disconnected")]
    ZeroSpectralGap(f64),

    #[error("edge ({i}, {j}) carries probability {p} outside (0, 1]")]
    InvalidProbability { i: usize, j: usize, p: f64 },

    #[error("base probability {0} outside (0, 1]")]
    InvalidBaseProbability(f64),

    #[error("level decay alpha {0} outside (0, 1]")]
    InvalidDecayAlpha(f64),

    #[error("spreading did not cover the graph within {0} steps")]
    StepCapExceeded(u64),

    #[error("two-qubit gate needs distinct qubits, got ({0}, {0})")]
    SelfGate(usize),

    #[error("circuit with {qubits} qubits does not fit a machine with {nodes} nodes")]
    CircuitTooLarge { qubits: usize, nodes: usize },

    #[error("target part sizes sum to {got}, subset has {need} nodes")]
    InfeasiblePartition { got: usize, need: usize },

    #[error("mapping is not injective: machine node {0} is used twice")]
    NonInjectiveMapping(usize),

    #[error("mapping covers {got} qubits, circuit has {want}")]
    MappingLengthMismatch { got: usize, want: usize },

    #[error("machine must be an unweighted hierarchy of equal complete graphs")]
    UnsupportedMachine,

    #[error("invalid gate list line {line}: {reason}")]
    GateListParse { line: usize, reason: String },

    #[error("invalid graph JSON: {0}")]
    GraphParse(String),

    #[error("invalid hierarchy spec JSON: {0}")]
    SpecParse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
