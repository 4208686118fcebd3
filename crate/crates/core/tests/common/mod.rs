//! Random generators and brute-force oracles shared by the integration tests.
//!
//! The oracles never call library arithmetic: a series is rebuilt from its raw
//! description by closed-form expansion, and every operation is replayed on
//! truncated daters.

#![allow(dead_code)]

use maxplus_observer::scalar::{Finite, NegInf, PosInf};
use maxplus_observer::{Monomial, PeriodicSeries, Scalar, SeriesMatrix, SystemMatrices};
use rand::Rng;

/// `p ⊕ q (τγ^ν)*` as drawn, before any canonicalization.
#[derive(Clone, Debug)]
pub struct Raw {
    pub p: Vec<(i64, i64)>,
    pub q: Vec<(i64, i64)>,
    pub r: Option<(i64, i64)>,
}

impl Raw {
    pub fn series(&self) -> PeriodicSeries {
        let poly = |v: &[(i64, i64)]| {
            PeriodicSeries::polynomial(v.iter().map(|&(t, n)| Monomial::new(t, n)))
        };
        let p = poly(&self.p);
        match self.r {
            None => p.add(&poly(&self.q)),
            Some((tau, nu)) => {
                p.add(&poly(&self.q).mul(&PeriodicSeries::monomial(tau, nu).star().unwrap()))
            }
        }
    }

    /// `s(k)`: the largest coefficient at an exponent `≤ k`.
    pub fn dater(&self, k: i64) -> Scalar {
        let mut best = NegInf;
        for &(t, n) in &self.p {
            if n <= k {
                best = best.max(Finite(t));
            }
        }
        for &(t, n) in &self.q {
            if n > k {
                continue;
            }
            let v = match self.r {
                None => t,
                Some((_, 0)) => t,
                Some((tau, nu)) => t + tau * ((k - n) / nu),
            };
            best = best.max(Finite(v));
        }
        best
    }

    pub fn daters(&self, horizon: usize) -> Vec<Scalar> {
        (0..=horizon as i64).map(|k| self.dater(k)).collect()
    }
}

/// Exponents and coefficients in `0..=8`, periods with `ν ≥ 1`.
pub fn raw_series<R: Rng>(rng: &mut R) -> Raw {
    let mono = |rng: &mut R| (rng.gen_range(0..=8), rng.gen_range(0..=8));
    let np = rng.gen_range(0..=2);
    let p = (0..np).map(|_| mono(rng)).collect();
    let nq = rng.gen_range(1..=3);
    let q = (0..nq).map(|_| mono(rng)).collect();
    let r = if rng.gen_bool(0.8) {
        Some((rng.gen_range(0..=8), rng.gen_range(1..=8)))
    } else {
        None
    };
    Raw { p, q, r }
}

/// Like [`raw_series`] but without a positive coefficient at exponent 0, so
/// the star stays finite.
pub fn raw_starrable<R: Rng>(rng: &mut R) -> Raw {
    let mut raw = raw_series(rng);
    for m in raw.p.iter_mut().chain(raw.q.iter_mut()) {
        if m.1 == 0 {
            m.1 = 1;
        }
    }
    raw
}

pub fn eval_all(s: &PeriodicSeries, horizon: usize) -> Vec<Scalar> {
    (0..=horizon as i64).map(|k| s.eval(k)).collect()
}

pub fn oracle_add(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| (*x).max(*y)).collect()
}

pub fn oracle_meet(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| (*x).min(*y)).collect()
}

fn plus(a: Scalar, b: Scalar) -> Scalar {
    match (a, b) {
        (NegInf, _) | (_, NegInf) => NegInf,
        (PosInf, _) | (_, PosInf) => PosInf,
        (Finite(x), Finite(y)) => Finite(x + y),
    }
}

pub fn oracle_mul(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    (0..a.len())
        .map(|k| (0..=k).map(|i| plus(a[i], b[k - i])).max().unwrap())
        .collect()
}

/// Least `x = e ⊕ a x` on the window.
pub fn oracle_star(a: &[Scalar]) -> Vec<Scalar> {
    let mut x = vec![Finite(0); a.len()];
    loop {
        let next: Vec<Scalar> = oracle_mul(a, &x)
            .into_iter()
            .map(|v| v.max(Finite(0)))
            .collect();
        if next == x {
            return x;
        }
        x = next;
    }
}

fn scalar_lres(a: Scalar, b: Scalar) -> Scalar {
    match (a, b) {
        (NegInf, _) | (_, PosInf) => PosInf,
        (PosInf, _) | (_, NegInf) => NegInf,
        (Finite(x), Finite(y)) => Finite(y - x),
    }
}

/// `min_{0 ≤ j < window} a(j) ∖ b(k + j)`.
fn lres_window(a: &Raw, b: &Raw, k: i64, window: i64) -> Scalar {
    (0..window)
        .map(|j| scalar_lres(a.dater(j), b.dater(k + j)))
        .min()
        .unwrap()
}

/// Greatest `x` with `a ⊗ x ⪯ b`, at `k`. A value still moving when the scan
/// window doubles is heading to `ε`.
pub fn oracle_lres(a: &Raw, b: &Raw, k: i64) -> Scalar {
    let short = lres_window(a, b, k, 200);
    let long = lres_window(a, b, k, 400);
    if short == long {
        long
    } else {
        NegInf
    }
}

/// A random causal polynomial with exponents `lo..=3` and coefficients in
/// `0..=9`, or `ε`.
pub fn poly_entry<R: Rng>(rng: &mut R, lo: i64, density: f64) -> (PeriodicSeries, Raw) {
    if !rng.gen_bool(density) {
        return (
            PeriodicSeries::eps(),
            Raw {
                p: vec![],
                q: vec![],
                r: None,
            },
        );
    }
    let count = rng.gen_range(1..=2);
    let p: Vec<(i64, i64)> = (0..count)
        .map(|_| (rng.gen_range(0..=9), rng.gen_range(lo..=3)))
        .collect();
    let raw = Raw {
        p,
        q: vec![],
        r: None,
    };
    (raw.series(), raw)
}

/// Random timed event graph matrices: `n ≤ 5`, times `0..=9`, tokens `0..=2`,
/// zero-token places only from a lower to a higher index, every state
/// disturbed directly (`R = I`).
pub fn random_system<R: Rng>(rng: &mut R, identity_output: bool) -> SystemMatrices {
    let n = rng.gen_range(1..=5);
    let mut a = SeriesMatrix::eps(n, n);
    for i in 0..n {
        for j in 0..n {
            if !rng.gen_bool(if i == j { 0.7 } else { 0.35 }) {
                continue;
            }
            let tokens = if j < i {
                rng.gen_range(0..=2)
            } else {
                rng.gen_range(1..=2)
            };
            let t: i64 = rng.gen_range(0..=9);
            let v = a.get(i, j).add(&PeriodicSeries::monomial(t, tokens));
            a.set(i, j, v);
        }
    }
    let pick = |rng: &mut R, count: usize| -> Vec<usize> {
        let mut idx: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            idx.swap(i, rng.gen_range(0..=i));
        }
        idx.truncate(count);
        idx
    };
    let p = rng.gen_range(1..=n);
    let mut b = SeriesMatrix::eps(n, p);
    for (col, x) in pick(rng, p).into_iter().enumerate() {
        b.set(x, col, PeriodicSeries::e());
    }
    let c = if identity_output {
        SeriesMatrix::identity(n)
    } else {
        let m = rng.gen_range(1..=n);
        let mut c = SeriesMatrix::eps(m, n);
        for (row, x) in pick(rng, m).into_iter().enumerate() {
            c.set(row, x, PeriodicSeries::e());
        }
        c
    };
    SystemMatrices {
        a,
        b,
        c,
        r: SeriesMatrix::identity(n),
    }
}

/// Nondecreasing random firing dates on `0..=horizon`, starting at a random
/// event, with occasional jumps.
pub fn random_dates<R: Rng>(rng: &mut R, horizon: usize, jump: i64) -> Vec<Scalar> {
    let start = rng.gen_range(0..=horizon / 4);
    let mut t: i64 = rng.gen_range(0..=5);
    (0..=horizon)
        .map(|k| {
            if k < start {
                NegInf
            } else {
                t += rng.gen_range(0..=jump);
                Finite(t)
            }
        })
        .collect()
}

/// Sparse disturbance events: mostly `ε`, sometimes a late date.
pub fn random_disturbance<R: Rng>(rng: &mut R, horizon: usize) -> Vec<Scalar> {
    (0..=horizon)
        .map(|k| {
            if rng.gen_bool(0.1) {
                Finite(rng.gen_range(0..=8 * (k as i64 + 1)))
            } else {
                NegInf
            }
        })
        .collect()
}

/// Column `j` of `A*` on `0..=horizon` from the entry daters of `A`, by one
/// pass over the event index. Needs zero-delay terms only in `a_il` with
/// `l < i`, so each `x_i(k)` depends on already computed values.
pub fn star_column_oracle(d: &[Vec<Vec<Scalar>>], j: usize, horizon: usize) -> Vec<Vec<Scalar>> {
    let n = d.len();
    let mut x = vec![vec![NegInf; horizon + 1]; n];
    for k in 0..=horizon {
        for i in 0..n {
            let mut v = if i == j { Finite(0) } else { NegInf };
            for (l, xl) in x.iter().enumerate() {
                for shift in 0..=k {
                    if shift == 0 && l >= i {
                        continue;
                    }
                    v = v.max(plus(d[i][l][shift], xl[k - shift]));
                }
            }
            x[i][k] = v;
        }
    }
    x
}
