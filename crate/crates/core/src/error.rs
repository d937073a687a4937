use thiserror::Error;

/// Errors surfaced by graph construction, circuit validation, and simulation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("edge coloring failed: {0}")]
    ColoringFailure(String),

    #[error("level {level} out of range [1, {max}]")]
    LevelOutOfRange { level: u32, max: u32 },

    #[error("permutation is not color-preserving: {0}")]
    NotColorPreserving(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("oracle-gate precondition violated at gate {gate}: output register holds {found:#x}, expected 0 or {expected:#x}")]
    GenuinenessViolation { gate: usize, found: u64, expected: u64 },

    #[error("address depth overflow: appending would exceed the configured cap of {p_max}")]
    AddressDepth { p_max: u32 },

    #[error("value is not an address-tree label: {0}")]
    NotAnAddress(String),

    #[error("state support exceeded the cap of {cap} configurations at gate {gate}")]
    SupportCap { cap: usize, gate: usize },

    #[error("invalid address subtree: {0}")]
    BadSubtree(String),

    #[error("{0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
