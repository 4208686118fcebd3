//! Text grammar for series:
//!
//! ```text
//! series := "eps" | "T" | poly | [head "+"] "(" poly ")" "." "(" mono ")*"
//! head   := poly | "(" poly ")"
//! poly   := mono ("+" mono)*
//! mono   := coeff "g" exponent
//! ```

use std::fmt;
use std::str::FromStr;

use super::{Kind, Monomial, PeriodicSeries, Polynomial};
use crate::error::{ParseError, SeriesError};
use crate::scalar::Scalar;

/// A non-canonical description `p ⊕ q r*` as written by a user.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawSeries {
    pub transient: Vec<Monomial>,
    pub pattern: Vec<Monomial>,
    pub period: Option<Monomial>,
}

impl RawSeries {
    /// Canonical series with the same value.
    ///
    /// Rejects periods with a non-finite or negative coefficient or a negative
    /// exponent, and transients that claim a different date than the periodic
    /// expansion at an exponent both of them reach.
    pub fn canonicalize(&self) -> Result<PeriodicSeries, SeriesError> {
        let p = Polynomial::from_terms(self.transient.iter().copied()).into_series();
        let Some(r) = self.period else {
            let all = self.transient.iter().chain(&self.pattern).copied();
            return Ok(Polynomial::from_terms(all).into_series());
        };
        let tau = match r.coeff.finite() {
            Some(t) if t >= 0 && r.exp >= 0 => t,
            _ => return Err(SeriesError::InvalidPeriod(r.to_string())),
        };
        let pattern: Vec<Monomial> = self
            .pattern
            .iter()
            .copied()
            .filter(|m| !m.coeff.is_eps())
            .collect();
        if let Some(first) = pattern.iter().map(|m| m.exp).min() {
            for m in self
                .transient
                .iter()
                .filter(|m| !m.coeff.is_eps() && m.exp >= first)
            {
                let claimed = pattern
                    .iter()
                    .filter_map(|q| {
                        let gap = m.exp - q.exp;
                        if gap < 0 {
                            None
                        } else if r.exp == 0 {
                            (gap == 0).then_some(q.coeff)
                        } else if gap % r.exp == 0 {
                            Some(q.coeff.mul(Scalar::Finite(tau * (gap / r.exp))))
                        } else {
                            None
                        }
                    })
                    .max();
                if let Some(c) = claimed {
                    if c != m.coeff {
                        return Err(SeriesError::Inconsistent(format!(
                            "transient claims {} at exponent {} but the periodic part gives {}",
                            m.coeff, m.exp, c
                        )));
                    }
                }
            }
        }
        let r_star = PeriodicSeries::monomial(tau, r.exp).star()?;
        let q = Polynomial::from_terms(pattern).into_series();
        Ok(p.add(&q.mul(&r_star)))
    }
}

fn parse_mono(text: &str) -> Result<Monomial, ParseError> {
    let (c, e) = text
        .split_once('g')
        .ok_or_else(|| ParseError::new(format!("monomial `{text}` lacks `g`")))?;
    let coeff: Scalar = c.parse()?;
    let exp: i64 = e
        .parse()
        .map_err(|_| ParseError::new(format!("invalid exponent in `{text}`")))?;
    Ok(Monomial { coeff, exp })
}

fn parse_poly(text: &str) -> Result<Vec<Monomial>, ParseError> {
    if text == "eps" {
        return Ok(Vec::new());
    }
    text.split('+').map(parse_mono).collect()
}

impl FromStr for RawSeries {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if text.is_empty() {
            return Err(ParseError::new("empty series"));
        }
        let Some(body) = text.strip_suffix(")*") else {
            return Ok(RawSeries {
                transient: parse_poly(&text)?,
                ..Default::default()
            });
        };
        let bad = || ParseError::new(format!("malformed periodic part in `{text}`"));
        let dot = body.rfind(").(").ok_or_else(bad)?;
        let r = &body[dot + 3..];
        let open = body[..dot].rfind('(').ok_or_else(bad)?;
        let q = &body[open + 1..dot];
        let head = &body[..open];
        let transient = if head.is_empty() {
            Vec::new()
        } else {
            let head = head.strip_suffix('+').ok_or_else(|| {
                ParseError::new(format!("expected `+` before the pattern in `{text}`"))
            })?;
            let head = head
                .strip_prefix('(')
                .and_then(|h| h.strip_suffix(')'))
                .unwrap_or(head);
            parse_poly(head)?
        };
        Ok(RawSeries {
            transient,
            pattern: parse_poly(q)?,
            period: Some(parse_mono(r)?),
        })
    }
}

impl FromStr for PeriodicSeries {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim() == "T" {
            return Ok(PeriodicSeries::top());
        }
        let raw: RawSeries = s.parse()?;
        raw.canonicalize()
            .map_err(|e| ParseError::new(e.to_string()))
    }
}

impl fmt::Display for PeriodicSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Top => f.write_str("T"),
            Kind::Ultimate { p, tail: None } => write!(f, "{p}"),
            Kind::Ultimate {
                p,
                tail: Some((q, r)),
            } => {
                if !p.is_empty() {
                    write!(f, "({p})+")?;
                }
                write!(f, "({q}).({}g{})*", r.tau, r.nu)
            }
        }
    }
}
