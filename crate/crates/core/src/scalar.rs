//! The complete idempotent semiring of integers extended with `-inf` and `+inf`,
//! with `max` as sum and `+` as product.

use std::fmt;
use std::str::FromStr;

use crate::error::ParseError;

/// An element of the extended max-plus integers.
///
/// The derived order is the natural order of the dioid:
/// `NegInf < Finite(n) < PosInf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Scalar {
    /// `ε`, neutral for `⊕` and absorbing for `⊗`.
    #[default]
    NegInf,
    Finite(i64),
    /// `⊤`, absorbing for `⊕`.
    PosInf,
}

pub use Scalar::{Finite, NegInf, PosInf};

impl Scalar {
    pub const EPS: Scalar = NegInf;
    pub const E: Scalar = Finite(0);
    pub const TOP: Scalar = PosInf;

    pub fn is_eps(self) -> bool {
        self == NegInf
    }

    pub fn is_top(self) -> bool {
        self == PosInf
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Finite(v) => Some(v),
            _ => None,
        }
    }

    /// `a ⊕ b`.
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Scalar) -> Scalar {
        self.max(other)
    }

    /// `a ⊗ b`. `ε` absorbs even against `⊤`.
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: Scalar) -> Scalar {
        match (self, other) {
            (NegInf, _) | (_, NegInf) => NegInf,
            (PosInf, _) | (_, PosInf) => PosInf,
            (Finite(a), Finite(b)) => Finite(a.checked_add(b).expect("max-plus scalar overflow")),
        }
    }

    /// `a ∧ b`.
    pub fn meet(self, other: Scalar) -> Scalar {
        self.min(other)
    }

    /// `a∖b`: the greatest `x` with `a ⊗ x ⪯ b`.
    pub fn lres(self, b: Scalar) -> Scalar {
        match (self, b) {
            (NegInf, _) => PosInf,
            (_, PosInf) => PosInf,
            (PosInf, _) => NegInf,
            (Finite(_), NegInf) => NegInf,
            (Finite(a), Finite(b)) => Finite(b.checked_sub(a).expect("max-plus scalar overflow")),
        }
    }

    /// `b ∘/ a`, equal to `a∖b` since the product is commutative.
    pub fn rres(self, a: Scalar) -> Scalar {
        a.lres(self)
    }

    /// Natural order: `a ⪯ b` iff `a ⊕ b = b`.
    pub fn leq(self, other: Scalar) -> bool {
        self.add(other) == other
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Finite(v)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegInf => f.write_str("eps"),
            PosInf => f.write_str("T"),
            Finite(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for Scalar {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "eps" => Ok(NegInf),
            "T" => Ok(PosInf),
            t => t
                .parse::<i64>()
                .map(Finite)
                .map_err(|_| ParseError::new(format!("invalid scalar `{t}`"))),
        }
    }
}
