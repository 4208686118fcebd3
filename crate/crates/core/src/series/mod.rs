//! Ultimately periodic series in the event-shift operator `γ` with
//! coefficients in the extended max-plus integers.
//!
//! A series `s = p ⊕ q r*` is stored in canonical form: `p` and `q` are lists
//! of non-dominated monomials (exponents and coefficients both strictly
//! increasing), `r = τγ^ν` is the smallest period of the corner sequence and
//! `p` is the shortest transient for that period. Two series are equal as
//! values iff their canonical forms are structurally equal.
//!
//! Internally every operation works on the dater `k ↦ s(k)`, the greatest
//! coefficient of a monomial with exponent `≤ k`. Each operation supplies an
//! exact evaluator for its result together with a provable point beyond which
//! the result repeats, and [`PeriodicSeries::from_fn`] re-encodes it.

mod dater;
mod ops;
mod text;

use std::fmt;

pub use dater::{DaterFit, DaterSlice};
pub use text::RawSeries;

use crate::scalar::{Finite, NegInf, PosInf, Scalar};

/// `t γ^n`. A monomial never carries an `ε` coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub coeff: Scalar,
    pub exp: i64,
}

impl Monomial {
    pub fn new(coeff: impl Into<Scalar>, exp: i64) -> Self {
        Monomial {
            coeff: coeff.into(),
            exp,
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}g{}", self.coeff, self.exp)
    }
}

/// A canonical polynomial: exponents and coefficients strictly increasing.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    terms: Vec<Monomial>,
}

impl Polynomial {
    /// Canonical polynomial `⊕ terms`, dropping `ε` and dominated monomials.
    pub fn from_terms(terms: impl IntoIterator<Item = Monomial>) -> Self {
        let mut all: Vec<Monomial> = terms.into_iter().filter(|m| !m.coeff.is_eps()).collect();
        all.sort_by(|a, b| a.exp.cmp(&b.exp).then(b.coeff.cmp(&a.coeff)));
        let mut out: Vec<Monomial> = Vec::with_capacity(all.len());
        for m in all {
            match out.last() {
                Some(last) if m.coeff <= last.coeff => {}
                Some(last) if last.coeff.is_top() => {}
                _ => out.push(m),
            }
        }
        Polynomial { terms: out }
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Dater value at `k`.
    pub fn eval(&self, k: i64) -> Scalar {
        self.terms
            .iter()
            .take_while(|m| m.exp <= k)
            .map(|m| m.coeff)
            .last()
            .unwrap_or(NegInf)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("eps");
        }
        for (i, m) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

/// Period `r = τγ^ν` of a periodic tail; canonical tails have `τ, ν ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Period {
    pub tau: i64,
    pub nu: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Kind {
    /// `⊤` at every event index.
    Top,
    /// `p ⊕ q r*`; `tail == None` for polynomials (including `ε` and series
    /// ending in a `⊤` monomial).
    Ultimate {
        p: Polynomial,
        tail: Option<(Polynomial, Period)>,
    },
}

/// An ultimately periodic series `p ⊕ q r*` in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PeriodicSeries {
    kind: Kind,
}

/// Asymptotic slope `ν/τ` of a series, in events per time unit.
///
/// Polynomials have no growing tail and compare above every finite slope.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slope {
    Rational(num_rational::Ratio<i64>),
    Polynomial,
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Rational(r) => write!(f, "{r}"),
            Slope::Polynomial => f.write_str("polynomial"),
        }
    }
}

/// How a dater behaves beyond its explicitly evaluated prefix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Shape {
    Eps,
    Top,
    /// Finite on `[start, from)`, `⊤` from `from` on.
    TopFrom {
        start: i64,
        from: i64,
    },
    /// `s(k + ν) = s(k) + τ` for every `k ≥ from`; `τ = 0` for polynomials.
    Periodic {
        start: i64,
        from: i64,
        tau: i64,
        nu: i64,
    },
}

/// Tail promise handed to [`PeriodicSeries::from_fn`].
#[derive(Clone, Copy, Debug)]
pub(crate) enum TailSpec {
    Periodic { from: i64, tau: i64, nu: i64 },
    TopFrom(i64),
}

impl PeriodicSeries {
    /// The zero series `ε`.
    pub fn eps() -> Self {
        PeriodicSeries {
            kind: Kind::Ultimate {
                p: Polynomial::default(),
                tail: None,
            },
        }
    }

    /// The unit `e = 0γ⁰`.
    pub fn e() -> Self {
        Self::monomial(Finite(0), 0)
    }

    /// The top series, `⊤` at every event index.
    pub fn top() -> Self {
        PeriodicSeries { kind: Kind::Top }
    }

    pub fn monomial(coeff: impl Into<Scalar>, exp: i64) -> Self {
        Self::polynomial([Monomial::new(coeff, exp)])
    }

    pub fn polynomial(terms: impl IntoIterator<Item = Monomial>) -> Self {
        PeriodicSeries {
            kind: Kind::Ultimate {
                p: Polynomial::from_terms(terms),
                tail: None,
            },
        }
    }

    /// `(e)(τγ^ν)*` for `τ, ν ≥ 1`.
    pub(crate) fn period_star(period: Period) -> Self {
        debug_assert!(period.tau >= 1 && period.nu >= 1);
        PeriodicSeries {
            kind: Kind::Ultimate {
                p: Polynomial::default(),
                tail: Some((
                    Polynomial {
                        terms: vec![Monomial::new(0, 0)],
                    },
                    period,
                )),
            },
        }
    }

    pub fn is_eps(&self) -> bool {
        matches!(&self.kind, Kind::Ultimate { p, tail: None } if p.is_empty())
    }

    /// True for the series that is `⊤` at every index.
    pub fn is_top(&self) -> bool {
        matches!(self.kind, Kind::Top)
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self.kind, Kind::Ultimate { tail: None, .. })
    }

    /// The transient polynomial `p` (empty for the top series).
    pub fn transient(&self) -> &[Monomial] {
        match &self.kind {
            Kind::Ultimate { p, .. } => p.terms(),
            Kind::Top => &[],
        }
    }

    /// The pattern polynomial `q`; empty when there is no periodic tail.
    pub fn pattern(&self) -> &[Monomial] {
        match &self.kind {
            Kind::Ultimate {
                tail: Some((q, _)), ..
            } => q.terms(),
            _ => &[],
        }
    }

    /// The period monomial `r = τγ^ν`, if the series has a periodic tail.
    pub fn period(&self) -> Option<Monomial> {
        match &self.kind {
            Kind::Ultimate {
                tail: Some((_, r)), ..
            } => Some(Monomial::new(r.tau, r.nu)),
            _ => None,
        }
    }

    pub(crate) fn period_raw(&self) -> Option<Period> {
        match &self.kind {
            Kind::Ultimate {
                tail: Some((_, r)), ..
            } => Some(*r),
            _ => None,
        }
    }

    /// Least exponent carrying a monomial, `None` for `ε` and `⊤`.
    pub fn valuation(&self) -> Option<i64> {
        match &self.kind {
            Kind::Top => None,
            Kind::Ultimate { p, tail } => p
                .terms()
                .first()
                .or_else(|| tail.as_ref().and_then(|(q, _)| q.terms().first()))
                .map(|m| m.exp),
        }
    }

    /// True when every monomial has a nonnegative exponent and a coefficient
    /// other than `⊤`-everywhere; `ε` counts as causal.
    pub fn is_causal(&self) -> bool {
        match &self.kind {
            Kind::Top => false,
            _ => self.valuation().is_none_or(|v| v >= 0),
        }
    }

    /// The dater value `s(k)`: greatest coefficient among monomials of
    /// exponent `≤ k`.
    pub fn eval(&self, k: i64) -> Scalar {
        match &self.kind {
            Kind::Top => PosInf,
            Kind::Ultimate { p, tail } => {
                let mut best = p.eval(k);
                if let Some((q, r)) = tail {
                    for m in q.terms() {
                        if m.exp > k {
                            break;
                        }
                        let reps = (k - m.exp) / r.nu;
                        best = best.max(m.coeff.mul(Finite(reps * r.tau)));
                    }
                }
                best
            }
        }
    }

    pub(crate) fn shape(&self) -> Shape {
        match &self.kind {
            Kind::Top => Shape::Top,
            Kind::Ultimate { p, tail } => {
                let Some(start) = self.valuation() else {
                    return Shape::Eps;
                };
                match tail {
                    Some((q, r)) => Shape::Periodic {
                        start,
                        from: q.terms()[0].exp,
                        tau: r.tau,
                        nu: r.nu,
                    },
                    None => {
                        let last = p.terms().last().expect("non-eps polynomial");
                        if last.coeff.is_top() {
                            Shape::TopFrom {
                                start,
                                from: last.exp,
                            }
                        } else {
                            Shape::Periodic {
                                start,
                                from: last.exp,
                                tau: 0,
                                nu: 1,
                            }
                        }
                    }
                }
            }
        }
    }

    /// Multiplies by the finite monomial `tγ^n`.
    pub(crate) fn shift(&self, t: i64, n: i64) -> Self {
        let mv = |m: &Monomial| Monomial {
            coeff: m.coeff.mul(Finite(t)),
            exp: m.exp + n,
        };
        match &self.kind {
            Kind::Top => self.clone(),
            Kind::Ultimate { p, tail } => PeriodicSeries {
                kind: Kind::Ultimate {
                    p: Polynomial {
                        terms: p.terms().iter().map(mv).collect(),
                    },
                    tail: tail.as_ref().map(|(q, r)| {
                        (
                            Polynomial {
                                terms: q.terms().iter().map(mv).collect(),
                            },
                            *r,
                        )
                    }),
                },
            },
        }
    }

    /// Re-encodes the dater `f` in canonical form.
    ///
    /// `f` must be `ε` below `start`, nondecreasing, and satisfy the `tail`
    /// promise: for `Periodic { from, tau, nu }`, `f(k + nu) = f(k) + tau` for
    /// all `k ≥ from`; for `TopFrom(n)`, `f(k) = ⊤` for `k ≥ n`.
    pub(crate) fn from_fn(start: i64, tail: TailSpec, f: impl Fn(i64) -> Scalar) -> Self {
        let last = match tail {
            TailSpec::Periodic { from, nu, .. } => from.max(start) + nu,
            TailSpec::TopFrom(n) => n.max(start),
        };
        let mut corners: Vec<Monomial> = Vec::new();
        let mut prev = NegInf;
        for k in start..=last {
            let v = if matches!(tail, TailSpec::TopFrom(n) if k >= n) {
                PosInf
            } else {
                f(k)
            };
            debug_assert!(v >= prev, "dater decreases at {k}");
            if v > prev {
                corners.push(Monomial { coeff: v, exp: k });
                prev = v;
            }
            if v.is_top() {
                return PeriodicSeries {
                    kind: Kind::Ultimate {
                        p: Polynomial { terms: corners },
                        tail: None,
                    },
                };
            }
        }
        let (from, tau, nu) = match tail {
            TailSpec::Periodic { from, tau, nu } => (from.max(start), tau, nu),
            TailSpec::TopFrom(_) => unreachable!("top tail reached above"),
        };
        if tau == 0 || corners.is_empty() {
            return PeriodicSeries {
                kind: Kind::Ultimate {
                    p: Polynomial { terms: corners },
                    tail: None,
                },
            };
        }
        Self::from_corners(corners, from, Period { tau, nu })
    }

    /// Canonical encoding of a corner list whose corners of exponent `> from`
    /// repeat with `period`; `corners` must reach exponent `from + period.nu`.
    fn from_corners(mut corners: Vec<Monomial>, from: i64, period: Period) -> Self {
        let region = corners
            .iter()
            .position(|c| c.exp > from)
            .expect("periodic region has corners");
        let m = corners.len() - region;
        debug_assert!(m >= 1);
        corners.extend_from_within(region..);
        for c in corners[region + m..].iter_mut() {
            c.exp += period.nu;
            c.coeff = c.coeff.mul(Finite(period.tau));
        }
        let delta = |i: usize, d: usize| {
            let (a, b) = (corners[i], corners[i + d]);
            (
                b.exp - a.exp,
                b.coeff.finite().unwrap() - a.coeff.finite().unwrap(),
            )
        };
        let d = (1..=m)
            .filter(|d| m.is_multiple_of(*d))
            .find(|&d| {
                let first = delta(region, d);
                (region..region + m).all(|i| delta(i, d) == first)
            })
            .unwrap_or(m);
        let (dn, dt) = delta(region, d);
        let mut begin = region;
        while begin > 0
            && corners[begin - 1].coeff.finite().is_some()
            && delta(begin - 1, d) == (dn, dt)
        {
            begin -= 1;
        }
        let q = corners[begin..begin + d].to_vec();
        corners.truncate(begin);
        PeriodicSeries {
            kind: Kind::Ultimate {
                p: Polynomial { terms: corners },
                tail: Some((Polynomial { terms: q }, Period { tau: dt, nu: dn })),
            },
        }
    }

    /// Asymptotic slope `σ∞ = ν/τ`.
    pub fn slope(&self) -> Result<Slope, crate::error::SeriesError> {
        use num_rational::Ratio;
        match self.shape() {
            Shape::Eps => Err(crate::error::SeriesError::UndefinedSlope),
            Shape::Top | Shape::TopFrom { .. } => Ok(Slope::Rational(Ratio::from_integer(0))),
            Shape::Periodic { tau: 0, .. } => Ok(Slope::Polynomial),
            Shape::Periodic { tau, nu, .. } => Ok(Slope::Rational(Ratio::new(nu, tau))),
        }
    }
}

impl Default for PeriodicSeries {
    fn default() -> Self {
        Self::eps()
    }
}

impl From<Monomial> for PeriodicSeries {
    fn from(m: Monomial) -> Self {
        Self::polynomial([m])
    }
}
