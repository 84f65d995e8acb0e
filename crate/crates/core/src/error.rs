use num_bigint::BigUint;

/// Everything that can go wrong while evaluating, integrating or solving.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// The restart loop reached its precision cap without meeting the target.
    #[error("precision exhausted: working precision would exceed {max_precision} bits")]
    PrecisionExhausted { max_precision: u64 },
    /// A user-supplied approximation callback returned enclosures that do not intersect.
    #[error("leaf oracle is inconsistent: answers at precision {first} and {second} are disjoint")]
    OracleViolation { first: u64, second: u64 },
    /// A discrete enrichment or range promise was found to be false.
    #[error("promise violated: {0}")]
    PromiseViolation(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("sampling grid needs {required} points, cap is {cap}")]
    GridExplosion { required: BigUint, cap: u64 },
    #[error("solver needs {required} steps, cap is {cap}")]
    StepExplosion { required: BigUint, cap: u64 },
    #[error("audit failure: {op} produced discrete output {measured} above its declared bound {bound} at k = {k}")]
    AuditFailure {
        op: String,
        k: u64,
        measured: u64,
        bound: u64,
    },
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
}

impl Error {
    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
