//! Dioid operations on periodic series.

use std::collections::HashMap;

use num_integer::Integer;

use super::{Kind, Monomial, Period, PeriodicSeries, Polynomial, Shape, TailSpec};
use crate::error::SeriesError;
use crate::scalar::{Finite, NegInf, PosInf, Scalar};

/// Periodic part of a dater together with the linear envelope of its tail:
/// for `k ≥ from`, `ν·s(k) - τ·(k - from)` lies in `[lo, hi]`.
#[derive(Clone, Copy, Debug)]
struct Envelope {
    from: i64,
    tau: i64,
    nu: i64,
    lo: i128,
    hi: i128,
}

impl Envelope {
    fn of(s: &PeriodicSeries, from: i64, tau: i64, nu: i64) -> Self {
        let mut lo = i128::MAX;
        let mut hi = i128::MIN;
        for r in 0..nu {
            let v = s.eval(from + r).finite().expect("finite periodic tail");
            let w = nu as i128 * v as i128 - tau as i128 * r as i128;
            lo = lo.min(w);
            hi = hi.max(w);
        }
        Envelope {
            from,
            tau,
            nu,
            lo,
            hi,
        }
    }

    /// `self` grows strictly faster than `other`.
    fn steeper_than(&self, other: &Envelope) -> bool {
        (self.tau as i128) * (other.nu as i128) > (other.tau as i128) * (self.nu as i128)
    }

    fn same_rate(&self, other: &Envelope) -> bool {
        (self.tau as i128) * (other.nu as i128) == (other.tau as i128) * (self.nu as i128)
    }
}

/// Index from which the steeper dater `fast` stays above `slow`.
fn crossover(fast: &Envelope, slow: &Envelope) -> i64 {
    let (t1, n1, f1) = (fast.tau as i128, fast.nu as i128, fast.from as i128);
    let (t2, n2, f2) = (slow.tau as i128, slow.nu as i128, slow.from as i128);
    let d = n2 * t1 - n1 * t2;
    debug_assert!(d > 0);
    let rhs = n1 * slow.hi - n2 * fast.lo + n2 * t1 * f1 - n1 * t2 * f2;
    let k = Integer::div_ceil(&rhs, &d);
    i64::try_from(k).expect("crossover index out of range")
}

/// Tail of `a ⊕ b` (`dominant_fast = true`) or `a ∧ b` (`false`) for two
/// periodic daters.
fn combined_tail(a: &Envelope, b: &Envelope, dominant_fast: bool) -> TailSpec {
    if a.same_rate(b) {
        let nu = a.nu.lcm(&b.nu);
        let tau = a.tau * (nu / a.nu);
        return TailSpec::Periodic {
            from: a.from.max(b.from),
            tau,
            nu,
        };
    }
    let (fast, slow) = if a.steeper_than(b) { (a, b) } else { (b, a) };
    let k = crossover(fast, slow).max(a.from).max(b.from);
    let winner = if dominant_fast { fast } else { slow };
    TailSpec::Periodic {
        from: k,
        tau: winner.tau,
        nu: winner.nu,
    }
}

fn envelope(s: &PeriodicSeries) -> Option<Envelope> {
    match s.shape() {
        Shape::Periodic { from, tau, nu, .. } => Some(Envelope::of(s, from, tau, nu)),
        _ => None,
    }
}

fn start_of(shape: Shape) -> i64 {
    match shape {
        Shape::TopFrom { start, .. } | Shape::Periodic { start, .. } => start,
        Shape::Eps | Shape::Top => unreachable!("no start for eps or top"),
    }
}

fn top_from(shape: Shape) -> Option<i64> {
    match shape {
        Shape::TopFrom { from, .. } => Some(from),
        _ => None,
    }
}

/// Shifts `(t, n)` applied to one periodic base.
type Shifts = Vec<(i64, i64)>;

/// A series as a finite sum of terms `m` (polynomial part) or `m r*`.
fn terms(s: &PeriodicSeries) -> Vec<(Monomial, Option<Period>)> {
    let mut out: Vec<(Monomial, Option<Period>)> =
        s.transient().iter().map(|m| (*m, None)).collect();
    if let Some(r) = s.period_raw() {
        out.extend(s.pattern().iter().map(|m| (*m, Some(r))));
    }
    out
}

/// `r1* ⊗ r2*` for two canonical periods.
fn period_pair_star(r1: Period, r2: Period) -> PeriodicSeries {
    let g = r1.nu.gcd(&r2.nu);
    let same_rate = (r1.tau as i128) * (r2.nu as i128) == (r2.tau as i128) * (r1.nu as i128);
    if same_rate {
        // All reachable exponents lie on the line t = (τ/ν)·n; past the
        // Frobenius bound every multiple of g is reachable.
        let from = (r1.nu / g - 1) * (r2.nu / g - 1) * g;
        let limit = (from + g) as usize;
        let mut reach = vec![false; limit + 1];
        reach[0] = true;
        for n in 1..=limit {
            reach[n] = (n >= r1.nu as usize && reach[n - r1.nu as usize])
                || (n >= r2.nu as usize && reach[n - r2.nu as usize]);
        }
        let step = r1.tau * g / r1.nu;
        let f = move |k: i64| {
            if k < 0 {
                return NegInf;
            }
            let k = (k as usize).min(limit);
            let n = (0..=k).rev().find(|&n| reach[n]).unwrap();
            Finite(n as i64 * r1.tau / r1.nu)
        };
        return PeriodicSeries::from_fn(
            0,
            TailSpec::Periodic {
                from,
                tau: step,
                nu: g,
            },
            f,
        );
    }
    let (fast, slow) = if (r1.tau as i128) * (r2.nu as i128) > (r2.tau as i128) * (r1.nu as i128) {
        (r1, r2)
    } else {
        (r2, r1)
    };
    // An optimal split uses fewer than ν_fast/g copies of the slow period.
    let max_b = fast.nu / g;
    let from = (max_b - 1) * slow.nu;
    let f = move |k: i64| {
        (0..max_b)
            .filter(|b| b * slow.nu <= k)
            .map(|b| Finite(b * slow.tau + fast.tau * ((k - b * slow.nu).div_euclid(fast.nu))))
            .max()
            .unwrap_or(NegInf)
    };
    PeriodicSeries::from_fn(
        0,
        TailSpec::Periodic {
            from,
            tau: fast.tau,
            nu: fast.nu,
        },
        f,
    )
}

/// Generator `(t, n)` with the greatest rate `t/n` among positive exponents.
fn best_rate<'a>(gens: impl Iterator<Item = &'a (i64, usize)>) -> Option<(i64, usize)> {
    gens.filter(|g| g.1 > 0)
        .max_by(|a, b| ((a.0 as i128) * (b.1 as i128)).cmp(&((b.0 as i128) * (a.1 as i128))))
        .copied()
}

/// Periodic series from exact-sum values: the dater is their running max.
/// `from` must be a point past which the tail has the rate of `best`.
fn knapsack_series(exact: &[Option<i64>], from: usize, best: (i64, usize)) -> PeriodicSeries {
    let mut dater = Vec::with_capacity(exact.len());
    let mut acc = NegInf;
    for v in exact {
        acc = acc.max(v.map_or(NegInf, Finite));
        dater.push(acc);
    }
    let f = |k: i64| if k < 0 { NegInf } else { dater[k as usize] };
    PeriodicSeries::from_fn(
        0,
        TailSpec::Periodic {
            from: from as i64,
            tau: best.0,
            nu: best.1 as i64,
        },
        f,
    )
}

/// `(p ⊕ q r*)*` for finite terms of nonnegative exponent, by unbounded
/// knapsacks over the generators. Sums without `q` use only `p`; sums with
/// at least one `q` may also use `r`. In each family a compressed optimum
/// has at most `ν*` generators other than the best one `(τ*, ν*)`, so its
/// tail has rate `τ*/ν*` from `ν*·(max ν + 2)` on. `None` outside this case.
fn knapsack_star(p: &[Monomial], tail: Option<(&[Monomial], Period)>) -> Option<PeriodicSeries> {
    // zero-exponent terms with `t ≤ 0` are kept: in `q` they unlock `r`
    let finite = |ms: &[Monomial]| -> Option<Vec<(i64, usize)>> {
        let mut out = Vec::new();
        for m in ms {
            let t = m.coeff.finite()?;
            match m.exp {
                0 if t > 0 => return None,
                n if n >= 0 => out.push((t, n as usize)),
                _ => return None,
            }
        }
        Some(out)
    };
    let gp: Vec<_> = finite(p)?.into_iter().filter(|g| g.1 > 0).collect();
    let (gq, gr) = match tail {
        Some((q, r)) => (finite(q)?, vec![(r.tau, r.nu as usize)]),
        None => (Vec::new(), Vec::new()),
    };
    let at = |v: &[Option<i64>], k: usize, n: usize| if k >= n { v[k - n] } else { None };
    let horizon = |best: (i64, usize), gens: &mut dyn Iterator<Item = &(i64, usize)>| {
        let max_n = gens.map(|g| g.1).max().unwrap_or(1).max(1);
        let from = best.1 * (max_n + 2);
        (from, from + best.1 + 1)
    };

    let mut result = PeriodicSeries::e();
    let best_free = best_rate(gp.iter()).filter(|b| b.0 > 0);
    let best_tied =
        best_rate(gp.iter().chain(&gq).chain(&gr)).filter(|b| b.0 > 0 && !gq.is_empty());
    let (from_free, len_free) = best_free.map_or((0, 1), |b| horizon(b, &mut gp.iter()));
    let (from_tied, len_tied) =
        best_tied.map_or((0, 1), |b| horizon(b, &mut gp.iter().chain(&gq).chain(&gr)));
    // exact exponent sums: `free` uses only `p`, `tied` at least one `q`
    let len = len_free.max(len_tied);
    let mut free = vec![None; len];
    let mut tied: Vec<Option<i64>> = vec![None; len];
    for k in 0..len {
        free[k] = if k == 0 {
            Some(0)
        } else {
            gp.iter()
                .filter_map(|&(t, n)| at(&free, k, n).map(|v| v + t))
                .max()
        };
        let from_q = gq
            .iter()
            .filter_map(|&(t, n)| at(&free, k, n).max(at(&tied, k, n)).map(|v| v + t));
        let from_rest = gp
            .iter()
            .chain(&gr)
            .filter_map(|&(t, n)| at(&tied, k, n).map(|v| v + t));
        tied[k] = from_q.chain(from_rest).max();
    }
    if let Some(b) = best_free {
        result = knapsack_series(&free[..len_free], from_free, b);
    }
    if let Some(b) = best_tied {
        result = result.add(&knapsack_series(&tied[..len_tied], from_tied, b));
    }
    Some(result)
}

/// `(tγ^n)*`.
fn monomial_star(m: Monomial) -> Result<PeriodicSeries, SeriesError> {
    match (m.coeff, m.exp) {
        (NegInf, _) => Ok(PeriodicSeries::e()),
        (PosInf, n) if n > 0 => Ok(PeriodicSeries::polynomial([
            Monomial::new(0, 0),
            Monomial::new(PosInf, n),
        ])),
        (PosInf, 0) => Ok(PeriodicSeries::monomial(PosInf, 0)),
        (PosInf, _) => Ok(PeriodicSeries::top()),
        (Finite(t), n) if n > 0 => {
            if t <= 0 {
                Ok(PeriodicSeries::e())
            } else {
                Ok(PeriodicSeries::period_star(Period { tau: t, nu: n }))
            }
        }
        (Finite(t), 0) => {
            if t <= 0 {
                Ok(PeriodicSeries::e())
            } else {
                Ok(PeriodicSeries::monomial(PosInf, 0))
            }
        }
        (Finite(t), _) => {
            if t > 0 {
                Ok(PeriodicSeries::top())
            } else {
                Err(SeriesError::NonCausalStar(m.to_string()))
            }
        }
    }
}

impl PeriodicSeries {
    /// `a ⊕ b`: pointwise max of daters.
    pub fn add(&self, other: &PeriodicSeries) -> PeriodicSeries {
        let (sa, sb) = (self.shape(), other.shape());
        match (sa, sb) {
            (Shape::Eps, _) => return other.clone(),
            (_, Shape::Eps) => return self.clone(),
            (Shape::Top, _) | (_, Shape::Top) => return PeriodicSeries::top(),
            _ => {}
        }
        if self == other {
            return self.clone();
        }
        let start = start_of(sa).min(start_of(sb));
        let f = |k| self.eval(k).add(other.eval(k));
        let tail = match (top_from(sa), top_from(sb)) {
            (Some(x), Some(y)) => TailSpec::TopFrom(x.min(y)),
            (Some(x), None) | (None, Some(x)) => TailSpec::TopFrom(x),
            (None, None) => {
                let (ea, eb) = (envelope(self).unwrap(), envelope(other).unwrap());
                combined_tail(&ea, &eb, true)
            }
        };
        PeriodicSeries::from_fn(start, tail, f)
    }

    /// `a ∧ b`: pointwise min of daters.
    pub fn meet(&self, other: &PeriodicSeries) -> PeriodicSeries {
        let (sa, sb) = (self.shape(), other.shape());
        match (sa, sb) {
            (Shape::Eps, _) | (_, Shape::Eps) => return PeriodicSeries::eps(),
            (Shape::Top, _) => return other.clone(),
            (_, Shape::Top) => return self.clone(),
            _ => {}
        }
        if self == other {
            return self.clone();
        }
        let start = start_of(sa).max(start_of(sb));
        let f = |k| self.eval(k).meet(other.eval(k));
        let tail = match (sa, sb) {
            (Shape::TopFrom { from: x, .. }, Shape::TopFrom { from: y, .. }) => {
                TailSpec::TopFrom(x.max(y))
            }
            (Shape::TopFrom { from: x, .. }, Shape::Periodic { from, tau, nu, .. })
            | (Shape::Periodic { from, tau, nu, .. }, Shape::TopFrom { from: x, .. }) => {
                TailSpec::Periodic {
                    from: from.max(x),
                    tau,
                    nu,
                }
            }
            _ => {
                let (ea, eb) = (envelope(self).unwrap(), envelope(other).unwrap());
                combined_tail(&ea, &eb, false)
            }
        };
        PeriodicSeries::from_fn(start, tail, f)
    }

    /// `a ⊗ b`: max-plus convolution of daters.
    pub fn mul(&self, other: &PeriodicSeries) -> PeriodicSeries {
        let (sa, sb) = (self.shape(), other.shape());
        match (sa, sb) {
            (Shape::Eps, _) | (_, Shape::Eps) => return PeriodicSeries::eps(),
            (Shape::Top, _) | (_, Shape::Top) => return PeriodicSeries::top(),
            _ => {}
        }
        let (start_a, start_b) = (start_of(sa), start_of(sb));
        if top_from(sa).is_some() || top_from(sb).is_some() {
            let bound = [
                top_from(sa).map(|n| n + start_b),
                top_from(sb).map(|n| n + start_a),
            ]
            .into_iter()
            .flatten()
            .min()
            .unwrap();
            let f = |k: i64| {
                (start_a..=k - start_b)
                    .map(|i| self.eval(i).mul(other.eval(k - i)))
                    .max()
                    .unwrap_or(NegInf)
            };
            return PeriodicSeries::from_fn(start_a + start_b, TailSpec::TopFrom(bound), f);
        }
        // terms sharing a periodic base are summed in one pass
        let mut groups: HashMap<(Option<Period>, Option<Period>), Shifts> = HashMap::new();
        for (m1, r1) in terms(self) {
            for (m2, r2) in terms(other) {
                let t = m1.coeff.finite().unwrap() + m2.coeff.finite().unwrap();
                let key = match (r1, r2) {
                    (Some(a), None) | (None, Some(a)) => (Some(a), None),
                    pair => pair,
                };
                groups.entry(key).or_default().push((t, m1.exp + m2.exp));
            }
        }
        let mut acc = PeriodicSeries::eps();
        for (key, shifts) in groups {
            let base = match key {
                (None, _) => {
                    acc = acc.add(&PeriodicSeries::polynomial(
                        shifts.iter().map(|&(t, n)| Monomial::new(t, n)),
                    ));
                    continue;
                }
                (Some(r), None) => PeriodicSeries::period_star(r),
                (Some(r1), Some(r2)) => period_pair_star(r1, r2),
            };
            let Shape::Periodic {
                start,
                from,
                tau,
                nu,
            } = base.shape()
            else {
                unreachable!("period stars are periodic")
            };
            let lo = shifts.iter().map(|s| s.1).min().unwrap();
            let hi = shifts.iter().map(|s| s.1).max().unwrap();
            let f = |k: i64| {
                shifts
                    .iter()
                    .map(|&(t, n)| base.eval(k - n).mul(Finite(t)))
                    .max()
                    .unwrap()
            };
            acc = acc.add(&PeriodicSeries::from_fn(
                start + lo,
                TailSpec::Periodic {
                    from: from + hi,
                    tau,
                    nu,
                },
                f,
            ));
        }
        acc
    }

    /// Kleene star `⊕_{i≥0} a^i`.
    ///
    /// Uses commutativity: `(a ⊕ b)* = a* b*` and `(q r*)* = e ⊕ q (q ⊕ r)*`.
    /// Fails only when the star is finite at every event index (a
    /// non-positive monomial of negative exponent), which has no periodic
    /// encoding.
    pub fn star(&self) -> Result<PeriodicSeries, SeriesError> {
        match &self.kind {
            Kind::Top => Ok(PeriodicSeries::top()),
            Kind::Ultimate { p, tail } => {
                if let Some(s) =
                    knapsack_star(p.terms(), tail.as_ref().map(|(q, r)| (q.terms(), *r)))
                {
                    return Ok(s);
                }
                let mut acc = PeriodicSeries::e();
                for m in p.terms() {
                    acc = acc.mul(&monomial_star(*m)?);
                }
                if let Some((q, r)) = tail {
                    let mut inner = PeriodicSeries::period_star(*r);
                    for m in q.terms() {
                        inner = inner.mul(&monomial_star(*m)?);
                    }
                    let q_series = PeriodicSeries {
                        kind: Kind::Ultimate {
                            p: q.clone(),
                            tail: None,
                        },
                    };
                    acc = acc.mul(&PeriodicSeries::e().add(&q_series.mul(&inner)));
                }
                Ok(acc)
            }
        }
    }

    /// `a⁺ = a ⊗ a*`.
    pub fn plus(&self) -> Result<PeriodicSeries, SeriesError> {
        Ok(self.mul(&self.star()?))
    }

    /// `a∖b`: the greatest `x` with `a ⊗ x ⪯ b`.
    ///
    /// On daters, `x(k) = ∧_i a(i)∖b(k+i)`; the infimum is reduced to a
    /// finite window using the periodic tails of both operands.
    pub fn lres(&self, b: &PeriodicSeries) -> PeriodicSeries {
        let a = self;
        let (sa, sb) = (a.shape(), b.shape());
        match (sa, sb) {
            (Shape::Eps, _) | (_, Shape::Top) => return PeriodicSeries::top(),
            (Shape::Top, _) | (_, Shape::Eps) => return PeriodicSeries::eps(),
            _ => {}
        }
        let (start_a, start_b) = (start_of(sa), start_of(sb));
        let window_min = |k: i64, lo: i64, hi: i64| -> Scalar {
            (lo..hi)
                .map(|i| a.eval(i).lres(b.eval(k + i)))
                .min()
                .unwrap_or(PosInf)
        };
        match (sa, sb) {
            (Shape::TopFrom { .. }, Shape::Periodic { .. }) => PeriodicSeries::eps(),
            (Shape::TopFrom { from: na, .. }, Shape::TopFrom { from: nb, .. }) => {
                let lowest = nb - na;
                let f = |k: i64| {
                    if k < lowest {
                        NegInf
                    } else {
                        window_min(k, start_a, nb - k)
                    }
                };
                PeriodicSeries::from_fn(
                    lowest.min(nb - start_a),
                    TailSpec::TopFrom(nb - start_a),
                    f,
                )
            }
            (Shape::Periodic { .. }, Shape::TopFrom { from: nb, .. }) => {
                let f = |k: i64| window_min(k, start_a, nb - k);
                let lowest = (start_b - start_a).min(nb - start_a);
                PeriodicSeries::from_fn(lowest, TailSpec::TopFrom(nb - start_a), f)
            }
            (
                Shape::Periodic {
                    from: ta,
                    tau: tau_a,
                    nu: nu_a,
                    ..
                },
                Shape::Periodic {
                    from: tb,
                    tau: tau_b,
                    nu: nu_b,
                    ..
                },
            ) => {
                if (tau_a as i128) * (nu_b as i128) > (tau_b as i128) * (nu_a as i128) {
                    return PeriodicSeries::eps();
                }
                let start = start_b - start_a;
                let period = nu_a.lcm(&nu_b);
                let f = |k: i64| {
                    if k < start {
                        return NegInf;
                    }
                    let i0 = ta.max(tb - k).max(start_a);
                    window_min(k, start_a, i0 + period)
                };
                let from = start.max(tb - start_a);
                PeriodicSeries::from_fn(
                    start,
                    TailSpec::Periodic {
                        from,
                        tau: tau_b,
                        nu: nu_b,
                    },
                    f,
                )
            }
            _ => unreachable!(),
        }
    }

    /// `b ∘/ a` with `self = b`: the greatest `x` with `x ⊗ a ⪯ b`.
    pub fn rres(&self, a: &PeriodicSeries) -> PeriodicSeries {
        a.lres(self)
    }

    /// Natural order `a ⪯ b ⇔ a ⊕ b = b`.
    pub fn leq(&self, other: &PeriodicSeries) -> bool {
        &self.add(other) == other
    }

    /// Scales every coefficient by the scalar `t` (`t ⊗ s`).
    pub fn scale(&self, t: Scalar) -> PeriodicSeries {
        match t {
            NegInf => PeriodicSeries::eps(),
            Finite(v) => self.shift(v, 0),
            PosInf => self.mul(&PeriodicSeries::monomial(PosInf, 0)),
        }
    }
}

impl Polynomial {
    pub(crate) fn into_series(self) -> PeriodicSeries {
        PeriodicSeries {
            kind: Kind::Ultimate {
                p: self,
                tail: None,
            },
        }
    }
}
