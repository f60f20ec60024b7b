use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Evaluation left the declared domain of an expression (division by
    /// zero, invalid power, interval crossing a singularity).
    #[error("domain error: {0}")]
    Domain(String),

    /// Subdivision exceeded the configured box cap before meeting the
    /// width budget.
    #[error("subdivision budget exhausted: {0}")]
    Budget(String),

    /// A partition cell straddles two labelled regions with different
    /// atomic-proposition sets.
    #[error("misaligned labels: {0}")]
    MisalignedLabels(String),

    /// Some row of the IMC admits no stochastic vector between its bounds.
    #[error("infeasible IMC row {row}: {reason}")]
    Infeasible { row: usize, reason: String },

    /// Vertex enumeration would exceed the configured combinatorial limit.
    #[error("combinatorial cap exceeded: {0}")]
    CombinatorialCap(String),

    /// Value iteration hit the iteration cap before the tolerance.
    #[error("value iteration did not converge within {0} iterations")]
    NonConvergence(usize),

    /// A state label has no matching DFA transition.
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    /// A variance interval collapses to zero where the Dirac case is not
    /// representable.
    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),

    /// Text could not be parsed (expression, property, config grammar).
    #[error("parse error: {0}")]
    Parse(String),

    /// A parsed document violates a semantic constraint.
    #[error("validation error: {0}")]
    Validation(String),

    /// No grid size in the candidate ladder certifies the completeness
    /// inequality.
    #[error("no feasible grid size: {0}")]
    NoFeasibleEta(String),
}

pub type Result<T> = std::result::Result<T, Error>;
