//! Event-domain simulation of the plant and of the observer on `0..=K`.
//!
//! Initial conditions are canonical: every transition is `ε` before event 0.
//! Input slices are replaced by their running max before use, so a slice of
//! raw firing dates and the dater it induces give the same run.

use std::fmt;
use std::str::FromStr;

use crate::error::{ParseError, SimError};
use crate::matrix::SeriesMatrix;
use crate::scalar::{Finite, NegInf, PosInf, Scalar};
use crate::series::DaterSlice;
use crate::teg::SystemMatrices;

/// Named dater slices sharing one horizon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory {
    pub names: Vec<String>,
    pub slices: Vec<DaterSlice>,
}

impl Trajectory {
    pub fn new(names: Vec<String>, slices: Vec<DaterSlice>) -> Self {
        assert_eq!(names.len(), slices.len());
        Trajectory { names, slices }
    }

    /// `count` slices named `prefix1..`, all `ε` on `0..=horizon`.
    pub fn eps(prefix: &str, count: usize, horizon: usize) -> Self {
        Trajectory {
            names: (1..=count).map(|i| format!("{prefix}{i}")).collect(),
            slices: vec![DaterSlice::new(vec![NegInf; horizon + 1]); count],
        }
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    /// Common horizon; `None` without slices.
    pub fn horizon(&self) -> Option<usize> {
        self.slices.first().and_then(DaterSlice::horizon)
    }

    pub fn value(&self, i: usize, k: usize) -> Scalar {
        self.slices[i].dates[k]
    }

    pub fn renamed(mut self, names: &[String]) -> Self {
        assert_eq!(names.len(), self.slices.len());
        self.names = names.to_vec();
        self
    }

    fn prepared(
        &self,
        what: &'static str,
        count: usize,
        horizon: usize,
    ) -> Result<Vec<Vec<Scalar>>, SimError> {
        if self.len() != count {
            return Err(SimError::SliceCount {
                what,
                expected: count,
                got: self.len(),
            });
        }
        self.slices
            .iter()
            .map(|s| {
                if s.dates.len() <= horizon {
                    return Err(SimError::Horizon {
                        what,
                        want: horizon,
                        got: s.dates.len().saturating_sub(1),
                    });
                }
                Ok(DaterSlice::from_events(&s.dates[..=horizon]).dates)
            })
            .collect()
    }
}

/// Dater of `s ⊗ v` at `k` for a causal `s` given by its dates `s(0..=k)`.
fn conv(s: &[Scalar], v: &[Scalar], k: usize) -> Scalar {
    (0..=k).map(|n| s[n].mul(v[k - n])).max().unwrap_or(NegInf)
}

fn dates_of(m: &SeriesMatrix, horizon: usize) -> Result<Vec<Vec<Vec<Scalar>>>, SimError> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| {
                    let s = m.get(i, j);
                    if !s.is_causal() {
                        return Err(SimError::NonCausalGain(i + 1, j + 1));
                    }
                    Ok(s.to_dater(horizon).dates)
                })
                .collect()
        })
        .collect()
}

/// `M ⊗ v` on `0..=horizon`.
fn apply(m: &[Vec<Vec<Scalar>>], v: &[Vec<Scalar>], horizon: usize) -> Vec<Vec<Scalar>> {
    m.iter()
        .map(|row| {
            (0..=horizon)
                .map(|k| {
                    row.iter()
                        .zip(v)
                        .map(|(s, x)| conv(s, x, k))
                        .max()
                        .unwrap_or(NegInf)
                })
                .collect()
        })
        .collect()
}

/// Least `x` with `x = Ax ⊕ extra(x)` by sweeps in block order.
fn fixpoint(
    sys: &SystemMatrices,
    horizon: usize,
    mut extra: impl FnMut(&[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>, SimError>,
) -> Result<Vec<Vec<Scalar>>, SimError> {
    let n = sys.n();
    let a = dates_of(&sys.a, horizon)?;
    let order = sys.a.scc_block_form().permutation;
    let limit = (n + 1) * (horizon + 2) + 1;
    let mut x = vec![vec![NegInf; horizon + 1]; n];
    for _ in 0..limit {
        let ext = extra(&x)?;
        let mut changed = false;
        for &i in order.iter().rev() {
            for k in 0..=horizon {
                let drive = (0..n)
                    .map(|j| conv(&a[i][j], &x[j], k))
                    .max()
                    .unwrap_or(NegInf);
                let v = drive.max(ext[i][k]).max(x[i][k]);
                if v != x[i][k] {
                    x[i][k] = v;
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(x);
        }
    }
    Err(SimError::Diverged(limit))
}

fn trajectory(prefix: &str, dates: Vec<Vec<Scalar>>) -> Trajectory {
    let names = (1..=dates.len()).map(|i| format!("{prefix}{i}")).collect();
    Trajectory {
        names,
        slices: dates.into_iter().map(DaterSlice::new).collect(),
    }
}

/// Least solution of `x = Ax ⊕ Bu ⊕ Rw` on `0..=horizon`.
pub fn earliest_state(
    sys: &SystemMatrices,
    u: &Trajectory,
    w: &Trajectory,
    horizon: usize,
) -> Result<Trajectory, SimError> {
    let u = u.prepared("u", sys.b.cols(), horizon)?;
    let w = w.prepared("w", sys.r.cols(), horizon)?;
    let bu = apply(&dates_of(&sys.b, horizon)?, &u, horizon);
    let rw = apply(&dates_of(&sys.r, horizon)?, &w, horizon);
    let ext: Vec<Vec<Scalar>> = bu
        .iter()
        .zip(&rw)
        .map(|(p, q)| p.iter().zip(q).map(|(a, b)| a.add(*b)).collect())
        .collect();
    let x = fixpoint(sys, horizon, |_| Ok(ext.clone()))?;
    Ok(trajectory("x", x))
}

fn output_rows(c: &SeriesMatrix) -> Result<Vec<usize>, SimError> {
    (0..c.rows())
        .map(|i| {
            let hits: Vec<usize> = (0..c.cols()).filter(|&j| !c.get(i, j).is_eps()).collect();
            match hits.as_slice() {
                [j] if *c.get(i, *j) == crate::series::PeriodicSeries::e() => Ok(*j),
                _ => Err(SimError::BadOutputRow(i + 1)),
            }
        })
        .collect()
}

/// `y = Cx` for a structural `C`.
pub fn system_output(sys: &SystemMatrices, x: &Trajectory) -> Result<Trajectory, SimError> {
    if x.len() != sys.n() {
        return Err(SimError::SliceCount {
            what: "x",
            expected: sys.n(),
            got: x.len(),
        });
    }
    let rows = output_rows(&sys.c)?;
    Ok(Trajectory {
        names: (1..=rows.len()).map(|i| format!("y{i}")).collect(),
        slices: rows.iter().map(|&j| x.slices[j].clone()).collect(),
    })
}

/// Least solution of `x̂ = Ax̂ ⊕ Bu ⊕ L(Cx̂ ⊕ y)` on `0..=horizon`.
pub fn observer_run(
    sys: &SystemMatrices,
    l: &SeriesMatrix,
    u: &Trajectory,
    y: &Trajectory,
    horizon: usize,
) -> Result<Trajectory, SimError> {
    let u = u.prepared("u", sys.b.cols(), horizon)?;
    let y = y.prepared("y", sys.c.rows(), horizon)?;
    let rows = output_rows(&sys.c)?;
    let bu = apply(&dates_of(&sys.b, horizon)?, &u, horizon);
    let ld = dates_of(l, horizon)?;
    let x = fixpoint(sys, horizon, |xh| {
        let merged: Vec<Vec<Scalar>> = rows
            .iter()
            .zip(&y)
            .map(|(&j, yj)| xh[j].iter().zip(yj).map(|(a, b)| a.add(*b)).collect())
            .collect();
        let ly = apply(&ld, &merged, horizon);
        Ok(bu
            .iter()
            .zip(&ly)
            .map(|(p, q)| p.iter().zip(q).map(|(a, b)| a.add(*b)).collect())
            .collect())
    })?;
    Ok(trajectory("x", x))
}

/// Outcome of comparing an estimate against the true run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EstimationReport {
    /// `(state, k)` with `x̂(k) ⋠ x(k)`, 0-based.
    pub violations: Vec<(usize, usize)>,
    /// `(output, k)` with `ŷ(k) ≠ y(k)`, 0-based.
    pub output_mismatches: Vec<(usize, usize)>,
    /// Per state, the largest `x(k) − x̂(k)`: `ε` if the state never fires,
    /// `⊤` if it fires while the estimate stays `ε`.
    pub max_gap: Vec<Scalar>,
    /// No state has an unbounded gap on the horizon.
    pub bounded: bool,
}

impl EstimationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.output_mismatches.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "lower_bound = {}\noutputs_equal = {}\nbounded_gap = {}\n",
            self.violations.is_empty(),
            self.output_mismatches.is_empty(),
            self.bounded
        );
        let gaps: Vec<String> = self.max_gap.iter().map(Scalar::to_string).collect();
        out.push_str(&format!("max_gap = {}\n", gaps.join(" ")));
        for &(i, k) in &self.violations {
            out.push_str(&format!("violation x{} k={k}\n", i + 1));
        }
        for &(i, k) in &self.output_mismatches {
            out.push_str(&format!("output_mismatch y{} k={k}\n", i + 1));
        }
        out
    }
}

pub fn compare_estimation(
    x: &Trajectory,
    xhat: &Trajectory,
    y: &Trajectory,
    yhat: &Trajectory,
) -> EstimationReport {
    let mut violations = Vec::new();
    let mut max_gap = Vec::with_capacity(x.len());
    for (i, (s, e)) in x.slices.iter().zip(&xhat.slices).enumerate() {
        let mut gap = NegInf;
        for (k, (&a, &b)) in s.dates.iter().zip(&e.dates).enumerate() {
            if !b.leq(a) {
                violations.push((i, k));
            }
            let g = match (a, b) {
                (NegInf, _) => NegInf,
                (_, NegInf) => PosInf,
                (Finite(a), Finite(b)) => Finite(a - b),
                _ => Finite(0),
            };
            gap = gap.max(g);
        }
        max_gap.push(gap);
    }
    let mut output_mismatches = Vec::new();
    for (i, (s, e)) in y.slices.iter().zip(&yhat.slices).enumerate() {
        for (k, (a, b)) in s.dates.iter().zip(&e.dates).enumerate() {
            if a != b {
                output_mismatches.push((i, k));
            }
        }
    }
    let bounded = !max_gap.contains(&PosInf);
    EstimationReport {
        violations,
        output_mismatches,
        max_gap,
        bounded,
    }
}

impl fmt::Display for Trajectory {
    /// One row per event index; the header is `k` followed by the names.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k")?;
        for name in &self.names {
            write!(f, " {name}")?;
        }
        writeln!(f)?;
        for k in 0..=self.horizon().unwrap_or(0) {
            if self.is_empty() {
                break;
            }
            write!(f, "{k}")?;
            for s in &self.slices {
                write!(f, " {}", s.dates[k])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for Trajectory {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| ParseError::new("empty trajectory table"))?;
        let mut cols = header.split_whitespace();
        if cols.next() != Some("k") {
            return Err(ParseError::at_line(1, "header must start with `k`"));
        }
        let names: Vec<String> = cols.map(str::to_owned).collect();
        let mut slices = vec![Vec::new(); names.len()];
        for (expected, (line, row)) in lines.enumerate() {
            let cells: Vec<&str> = row.split_whitespace().collect();
            if cells.len() != names.len() + 1 {
                return Err(ParseError::at_line(
                    line,
                    format!("expected {} cells, got {}", names.len() + 1, cells.len()),
                ));
            }
            if cells[0].parse::<usize>().ok() != Some(expected) {
                return Err(ParseError::at_line(
                    line,
                    format!("expected event index {expected}"),
                ));
            }
            for (slice, cell) in slices.iter_mut().zip(&cells[1..]) {
                slice.push(
                    cell.parse::<Scalar>()
                        .map_err(|e| ParseError::at_line(line, e.message))?,
                );
            }
        }
        Ok(Trajectory {
            names,
            slices: slices.into_iter().map(DaterSlice::new).collect(),
        })
    }
}

impl Trajectory {
    /// Slices in the order of `wanted`, taken by name.
    pub fn select(&self, wanted: &[String]) -> Result<Trajectory, ParseError> {
        let slices = wanted
            .iter()
            .map(|name| {
                self.names
                    .iter()
                    .position(|n| n == name)
                    .map(|i| self.slices[i].clone())
                    .ok_or_else(|| ParseError::new(format!("trajectory has no column `{name}`")))
            })
            .collect::<Result<_, _>>()?;
        Ok(Trajectory {
            names: wanted.to_vec(),
            slices,
        })
    }
}
