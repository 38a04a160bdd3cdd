use std::fmt;

use thiserror::Error;

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PddlError {
    #[error("{pos}: syntax error: expected {expected}, found {found}")]
    Syntax {
        pos: Pos,
        expected: String,
        found: String,
    },
    #[error("{pos}: unsupported feature: {feature}")]
    UnsupportedFeature { pos: Pos, feature: String },
    #[error("{pos}: arity mismatch: `{predicate}` declared with {expected} argument(s), used with {found}")]
    ArityMismatch {
        pos: Pos,
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("{pos}: undeclared {kind} `{name}`")]
    CrossRef {
        pos: Pos,
        kind: String,
        name: String,
    },
    #[error("{pos}: duplicate {kind} `{name}`")]
    Duplicate {
        pos: Pos,
        kind: String,
        name: String,
    },
}

impl PddlError {
    pub(crate) fn syntax(pos: Pos, expected: &str, found: &str) -> Self {
        PddlError::Syntax {
            pos,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    pub(crate) fn unsupported(pos: Pos, feature: impl Into<String>) -> Self {
        PddlError::UnsupportedFeature {
            pos,
            feature: feature.into(),
        }
    }

    pub(crate) fn cross_ref(pos: Pos, kind: &str, name: &str) -> Self {
        PddlError::CrossRef {
            pos,
            kind: kind.to_string(),
            name: name.to_string(),
        }
    }

    pub(crate) fn duplicate(pos: Pos, kind: &str, name: &str) -> Self {
        PddlError::Duplicate {
            pos,
            kind: kind.to_string(),
            name: name.to_string(),
        }
    }

    pub fn pos(&self) -> Pos {
        match self {
            PddlError::Syntax { pos, .. }
            | PddlError::UnsupportedFeature { pos, .. }
            | PddlError::ArityMismatch { pos, .. }
            | PddlError::CrossRef { pos, .. }
            | PddlError::Duplicate { pos, .. } => *pos,
        }
    }
}
