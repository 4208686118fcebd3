//! Dense matrices of periodic series.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use crate::error::{MatrixError, ParseError};
use crate::series::{PeriodicSeries, Slope};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeriesMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<PeriodicSeries>,
}

/// Strongly connected components of the precedence graph of a square matrix,
/// ordered so that the permuted matrix is block upper triangular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockStructure {
    /// `permutation[p]` is the original index placed at position `p`.
    pub permutation: Vec<usize>,
    /// Ranges of positions in the permuted order, one per component.
    pub blocks: Vec<Range<usize>>,
    pub k: usize,
}

impl BlockStructure {
    pub fn is_irreducible(&self) -> bool {
        self.k == 1
    }

    /// Original indices of component `b`.
    pub fn members(&self, b: usize) -> &[usize] {
        &self.permutation[self.blocks[b].clone()]
    }

    /// Component holding original index `i`.
    pub fn block_of(&self, i: usize) -> usize {
        let pos = self
            .permutation
            .iter()
            .position(|&p| p == i)
            .expect("index out of range");
        self.blocks
            .iter()
            .position(|r| r.contains(&pos))
            .expect("position in some block")
    }
}

impl SeriesMatrix {
    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> PeriodicSeries,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        SeriesMatrix {
            rows,
            cols,
            entries,
        }
    }

    /// Builds a matrix from rows of equal length.
    pub fn from_rows(rows: Vec<Vec<PeriodicSeries>>) -> Result<Self, ParseError> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != cols) {
            return Err(ParseError::new(format!(
                "row {} has {} entries, expected {cols}",
                i + 1,
                rows[i].len()
            )));
        }
        let n = rows.len();
        Ok(SeriesMatrix {
            rows: n,
            cols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn eps(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| PeriodicSeries::eps())
    }

    pub fn top(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| PeriodicSeries::top())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                PeriodicSeries::e()
            } else {
                PeriodicSeries::eps()
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &PeriodicSeries {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of range"
        );
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: PeriodicSeries) {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of range"
        );
        self.entries[i * self.cols + j] = value;
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &PeriodicSeries)> {
        self.entries
            .iter()
            .enumerate()
            .map(move |(n, s)| (n / self.cols, n % self.cols, s))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// `[self other]`.
    pub fn hconcat(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.rows != other.rows {
            return Err(MatrixError::DimensionMismatch {
                op: "hconcat",
                left: self.dims(),
                right: other.dims(),
            });
        }
        Ok(Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        }))
    }

    /// Columns `range` of `self`.
    pub fn columns(&self, range: Range<usize>) -> Self {
        assert!(range.end <= self.cols);
        Self::from_fn(self.rows, range.len(), |i, j| {
            self.get(i, range.start + j).clone()
        })
    }

    /// `P^T A P`: entry `(p, q)` of the result is entry
    /// `(perm[p], perm[q])` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert!(self.is_square() && perm.len() == self.rows);
        Self::from_fn(self.rows, self.cols, |p, q| {
            self.get(perm[p], perm[q]).clone()
        })
    }

    fn same_dims(&self, other: &Self, op: &'static str) -> Result<(), MatrixError> {
        if self.dims() == other.dims() {
            Ok(())
        } else {
            Err(MatrixError::DimensionMismatch {
                op,
                left: self.dims(),
                right: other.dims(),
            })
        }
    }

    fn zip(
        &self,
        other: &Self,
        f: impl Fn(&PeriodicSeries, &PeriodicSeries) -> PeriodicSeries,
    ) -> Self {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| f(a, b))
            .collect();
        SeriesMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        self.same_dims(other, "add")?;
        Ok(self.zip(other, PeriodicSeries::add))
    }

    pub fn meet(&self, other: &Self) -> Result<Self, MatrixError> {
        self.same_dims(other, "meet")?;
        Ok(self.zip(other, PeriodicSeries::meet))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::DimensionMismatch {
                op: "mul",
                left: self.dims(),
                right: other.dims(),
            });
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, k| {
            (0..self.cols).fold(PeriodicSeries::eps(), |acc, j| {
                let (a, b) = (self.get(i, j), other.get(j, k));
                if a.is_eps() || b.is_eps() {
                    acc
                } else {
                    acc.add(&a.mul(b))
                }
            })
        }))
    }

    /// Entrywise order.
    pub fn leq(&self, other: &Self) -> bool {
        self.dims() == other.dims()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.leq(b))
    }

    /// `A* = ⊕_{i≥0} A^i` by pivot elimination in block order.
    pub fn star(&self) -> Result<Self, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::DimensionMismatch {
                op: "star",
                left: self.dims(),
                right: self.dims(),
            });
        }
        let n = self.rows;
        let order = self.scc_block_form().permutation;
        let mut a = self.clone();
        for &k in &order {
            let pivot = a.get(k, k).star()?;
            let col: Vec<PeriodicSeries> = (0..n).map(|i| a.get(i, k).mul(&pivot)).collect();
            let row: Vec<PeriodicSeries> = (0..n).map(|j| a.get(k, j).clone()).collect();
            for (i, left) in col.iter().enumerate().filter(|(_, s)| !s.is_eps()) {
                for (j, right) in row.iter().enumerate().filter(|(_, s)| !s.is_eps()) {
                    let v = a.get(i, j).add(&left.mul(right));
                    a.set(i, j, v);
                }
            }
        }
        a.add(&Self::identity(n))
    }

    /// Greatest `X` with `self ⊗ X ⪯ b`.
    pub fn lres(&self, b: &Self) -> Result<Self, MatrixError> {
        if self.rows != b.rows {
            return Err(MatrixError::DimensionMismatch {
                op: "lres",
                left: self.dims(),
                right: b.dims(),
            });
        }
        Ok(Self::from_fn(self.cols, b.cols, |i, j| {
            (0..self.rows).fold(PeriodicSeries::top(), |acc, k| {
                acc.meet(&self.get(k, i).lres(b.get(k, j)))
            })
        }))
    }

    /// Greatest `X` with `X ⊗ a ⪯ self`.
    pub fn rres(&self, a: &Self) -> Result<Self, MatrixError> {
        if self.cols != a.cols {
            return Err(MatrixError::DimensionMismatch {
                op: "rres",
                left: self.dims(),
                right: a.dims(),
            });
        }
        Ok(Self::from_fn(self.rows, a.rows, |i, j| {
            (0..self.cols).fold(PeriodicSeries::top(), |acc, k| {
                acc.meet(&self.get(i, k).rres(a.get(j, k)))
            })
        }))
    }

    /// Entrywise asymptotic slopes; `None` marks `ε` entries.
    pub fn slopes(&self) -> Vec<Vec<Option<Slope>>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j).slope().ok())
                    .collect()
            })
            .collect()
    }

    /// Strongly connected components of the graph with an arc `j → i` for
    /// every `a_ij ≠ ε`, in an order where `a_ij ≠ ε` implies
    /// `block(i) ≤ block(j)`. Ties go to the component with the smallest
    /// original index.
    pub fn scc_block_form(&self) -> BlockStructure {
        assert!(self.is_square(), "block form needs a square matrix");
        let n = self.rows;
        let succ: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| i != j && !self.get(i, j).is_eps())
                    .collect()
            })
            .collect();
        let comp = tarjan(&succ);
        let k = comp.iter().copied().max().map_or(0, |c| c + 1);
        let mut members = vec![Vec::new(); k];
        for (i, &c) in comp.iter().enumerate() {
            members[c].push(i);
        }
        // component c must precede d when some i in c depends on some j in d
        let mut indeg = vec![0usize; k];
        let mut edges = vec![Vec::new(); k];
        for i in 0..n {
            for &j in &succ[i] {
                let (c, d) = (comp[i], comp[j]);
                if c != d && !edges[c].contains(&d) {
                    edges[c].push(d);
                    indeg[d] += 1;
                }
            }
        }
        let mut ready: Vec<usize> = (0..k).filter(|&c| indeg[c] == 0).collect();
        let mut permutation = Vec::with_capacity(n);
        let mut blocks = Vec::with_capacity(k);
        while !ready.is_empty() {
            ready.sort_by_key(|&c| std::cmp::Reverse(members[c][0]));
            let c = ready.pop().expect("nonempty");
            let start = permutation.len();
            permutation.extend(&members[c]);
            blocks.push(start..permutation.len());
            for &d in &edges[c] {
                indeg[d] -= 1;
                if indeg[d] == 0 {
                    ready.push(d);
                }
            }
        }
        BlockStructure {
            permutation,
            blocks,
            k,
        }
    }
}

/// Component id of every vertex.
fn tarjan(succ: &[Vec<usize>]) -> Vec<usize> {
    struct State<'a> {
        succ: &'a [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        comp: Vec<usize>,
        next_index: usize,
        next_comp: usize,
    }

    fn visit(s: &mut State, v: usize) {
        s.index[v] = Some(s.next_index);
        s.low[v] = s.next_index;
        s.next_index += 1;
        s.stack.push(v);
        s.on_stack[v] = true;
        for w in s.succ[v].clone() {
            match s.index[w] {
                None => {
                    visit(s, w);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(iw) if s.on_stack[w] => s.low[v] = s.low[v].min(iw),
                Some(_) => {}
            }
        }
        if Some(s.low[v]) == s.index[v] {
            loop {
                let w = s.stack.pop().expect("stack holds v");
                s.on_stack[w] = false;
                s.comp[w] = s.next_comp;
                if w == v {
                    break;
                }
            }
            s.next_comp += 1;
        }
    }

    let n = succ.len();
    let mut s = State {
        succ,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        comp: vec![0; n],
        next_index: 0,
        next_comp: 0,
    };
    for v in 0..n {
        if s.index[v].is_none() {
            visit(&mut s, v);
        }
    }
    s.comp
}

impl fmt::Display for SeriesMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(";")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        f.write_str("]")
    }
}

impl FromStr for SeriesMatrix {
    type Err = ParseError;

    /// `[s11,s12;s21,s22]`; the brackets are optional.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        let body = text
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .unwrap_or(text);
        if body.trim().is_empty() {
            return Ok(SeriesMatrix {
                rows: 0,
                cols: 0,
                entries: Vec::new(),
            });
        }
        let rows = body
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(str::parse)
                    .collect::<Result<Vec<PeriodicSeries>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rows(rows)
    }
}
