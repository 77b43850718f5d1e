use std::fmt;

/// Stable handle of a node inside a [`crate::tree::BeliefTree`] arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{what} index {index} out of range (size {size})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },
    #[error("degenerate belief at (state {state}, action {action}): {reason}")]
    DegenerateBelief {
        state: usize,
        action: usize,
        reason: &'static str,
    },
    #[error("discount factor {0} is outside [0, 1)")]
    InvalidDiscount(f64),
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("invalid MDP: {0}")]
    InvalidMdp(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("node {0} is not a leaf")]
    NotALeaf(NodeId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("node {0} has no upper-bound samples")]
    NoSamples(NodeId),
    #[error("leaf {0} has no value assigned")]
    IncompleteValuation(NodeId),
    #[error("node {node} is missing {missing}")]
    IncompleteNode { node: NodeId, missing: &'static str },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_index(what: &'static str, index: usize, size: usize) -> Result<()> {
    if index < size {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { what, index, size })
    }
}

pub(crate) fn check_discount(gamma: f64) -> Result<()> {
    if (0.0..1.0).contains(&gamma) {
        Ok(())
    } else {
        Err(Error::InvalidDiscount(gamma))
    }
}

pub(crate) fn check_tolerance(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(tol))
    }
}
