//! Timed event graphs and their `γ`-domain matrices.
//!
//! Document format, one statement per line, `#` starts a comment:
//!
//! ```text
//! state x1 x2 x3
//! input u1 u2
//! output y1 y2
//! disturbance w1 w2 w3
//! place x2 -> x1 time 1 tokens 0
//! bind_input u1 -> x2
//! bind_output x1 -> y1
//! bind_disturbance w1 -> x1
//! ```
//!
//! Name lists may be split over several statements. Matrix indices follow
//! declaration order. Without any `bind_disturbance` statement `R` is the
//! identity and the disturbances default to `w1..wn`.

use std::collections::HashMap;
use std::fmt;

use crate::error::{MatrixError, ParseError};
use crate::matrix::SeriesMatrix;
use crate::series::PeriodicSeries;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Place {
    pub from: usize,
    pub to: usize,
    pub time: i64,
    pub tokens: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TegModel {
    pub states: Vec<String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub disturbances: Vec<String>,
    pub places: Vec<Place>,
    /// `(input, state)` pairs.
    pub input_bindings: Vec<(usize, usize)>,
    /// `(state, output)` pairs.
    pub output_bindings: Vec<(usize, usize)>,
    /// `(disturbance, state)` pairs; empty means `R` is the identity.
    pub disturbance_bindings: Vec<(usize, usize)>,
}

/// `x = Ax ⊕ Bu ⊕ Rw`, `y = Cx`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemMatrices {
    pub a: SeriesMatrix,
    pub b: SeriesMatrix,
    pub c: SeriesMatrix,
    pub r: SeriesMatrix,
}

/// Violations of the shape rules on `B`, `C` and `R`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StructureReport {
    pub violations: Vec<String>,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The transfer matrices of the closed system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transfer {
    pub a_star: SeriesMatrix,
    pub ca_b: SeriesMatrix,
    pub ca_r: SeriesMatrix,
    pub a_b: SeriesMatrix,
    pub a_r: SeriesMatrix,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Role {
    State,
    Input,
    Output,
    Disturbance,
}

impl Role {
    fn word(self) -> &'static str {
        match self {
            Role::State => "state",
            Role::Input => "input",
            Role::Output => "output",
            Role::Disturbance => "disturbance",
        }
    }
}

pub fn parse_teg(text: &str) -> Result<TegModel, ParseError> {
    let mut model = TegModel::default();
    let mut names: HashMap<String, (Role, usize)> = HashMap::new();
    let mut pending: Vec<(usize, Vec<String>)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let words: Vec<String> = content.split_whitespace().map(str::to_owned).collect();
        let role = match words[0].as_str() {
            "state" => Some(Role::State),
            "input" => Some(Role::Input),
            "output" => Some(Role::Output),
            "disturbance" => Some(Role::Disturbance),
            "place" | "bind_input" | "bind_output" | "bind_disturbance" => None,
            other => {
                return Err(ParseError::at_line(
                    line,
                    format!("unknown statement `{other}`"),
                ))
            }
        };
        match role {
            Some(role) => {
                for name in &words[1..] {
                    let list = match role {
                        Role::State => &mut model.states,
                        Role::Input => &mut model.inputs,
                        Role::Output => &mut model.outputs,
                        Role::Disturbance => &mut model.disturbances,
                    };
                    if names.insert(name.clone(), (role, list.len())).is_some() {
                        return Err(ParseError::at_line(
                            line,
                            format!("transition `{name}` declared twice"),
                        ));
                    }
                    list.push(name.clone());
                }
            }
            None => pending.push((line, words)),
        }
    }

    if model.states.is_empty() {
        return Err(ParseError::new("no state transitions"));
    }

    let lookup = |line: usize, name: &str, role: Role| -> Result<usize, ParseError> {
        match names.get(name) {
            Some(&(r, i)) if r == role => Ok(i),
            Some(&(r, _)) => Err(ParseError::at_line(
                line,
                format!(
                    "`{name}` is a {} transition, expected a {} transition",
                    r.word(),
                    role.word()
                ),
            )),
            None => Err(ParseError::at_line(
                line,
                format!("unknown transition `{name}`"),
            )),
        }
    };

    for (line, words) in pending {
        let arrow = |what: &str| -> Result<(String, String), ParseError> {
            match &words[1..] {
                [from, arrow, to, ..] if arrow == "->" => Ok((from.clone(), to.clone())),
                _ => Err(ParseError::at_line(
                    line,
                    format!("expected `{what} FROM -> TO`"),
                )),
            }
        };
        match words[0].as_str() {
            "place" => {
                let (from, to) = arrow("place")?;
                let from_idx = lookup(line, &from, Role::State)?;
                let to_idx = lookup(line, &to, Role::State)?;
                let rest = &words[4..];
                let [kw_t, t, kw_c, c] = rest else {
                    return Err(ParseError::at_line(
                        line,
                        "expected `place FROM -> TO time T tokens C`",
                    ));
                };
                if kw_t != "time" || kw_c != "tokens" {
                    return Err(ParseError::at_line(
                        line,
                        "expected `place FROM -> TO time T tokens C`",
                    ));
                }
                let number = |s: &str, field: &str| {
                    s.parse::<i64>()
                        .map_err(|_| ParseError::at_line(line, format!("invalid {field} `{s}`")))
                };
                let time = number(t, "time")?;
                let tokens = number(c, "tokens")?;
                let label = format!("place {from} -> {to}");
                if time < 0 {
                    return Err(ParseError::at_line(
                        line,
                        format!("{label}: negative holding time {time}"),
                    ));
                }
                if tokens < 0 {
                    return Err(ParseError::at_line(
                        line,
                        format!("{label}: negative marking {tokens}"),
                    ));
                }
                model.places.push(Place {
                    from: from_idx,
                    to: to_idx,
                    time,
                    tokens,
                });
            }
            kind => {
                let (from, to) = arrow(kind)?;
                if words.len() != 4 {
                    return Err(ParseError::at_line(
                        line,
                        format!("expected `{kind} FROM -> TO`"),
                    ));
                }
                match kind {
                    "bind_input" => {
                        let pair = (
                            lookup(line, &from, Role::Input)?,
                            lookup(line, &to, Role::State)?,
                        );
                        model.input_bindings.push(pair);
                    }
                    "bind_output" => {
                        let pair = (
                            lookup(line, &from, Role::State)?,
                            lookup(line, &to, Role::Output)?,
                        );
                        model.output_bindings.push(pair);
                    }
                    _ => {
                        let pair = (
                            lookup(line, &from, Role::Disturbance)?,
                            lookup(line, &to, Role::State)?,
                        );
                        model.disturbance_bindings.push(pair);
                    }
                }
            }
        }
    }

    if model.disturbance_bindings.is_empty() {
        let n = model.states.len();
        if model.disturbances.is_empty() {
            model.disturbances = (1..=n).map(|i| format!("w{i}")).collect();
        } else if model.disturbances.len() != n {
            return Err(ParseError::new(format!(
                "{} disturbances declared without bindings; the identity default needs {n}",
                model.disturbances.len()
            )));
        }
    }
    Ok(model)
}

impl TegModel {
    pub fn n(&self) -> usize {
        self.states.len()
    }

    pub fn build_matrices(&self) -> SystemMatrices {
        let n = self.n();
        let mut a = SeriesMatrix::eps(n, n);
        for p in &self.places {
            let v = a
                .get(p.to, p.from)
                .add(&PeriodicSeries::monomial(p.time, p.tokens));
            a.set(p.to, p.from, v);
        }
        let mut b = SeriesMatrix::eps(n, self.inputs.len());
        for &(u, x) in &self.input_bindings {
            b.set(x, u, PeriodicSeries::e());
        }
        let mut c = SeriesMatrix::eps(self.outputs.len(), n);
        for &(x, y) in &self.output_bindings {
            c.set(y, x, PeriodicSeries::e());
        }
        let r = if self.disturbance_bindings.is_empty() {
            SeriesMatrix::identity(n)
        } else {
            let mut r = SeriesMatrix::eps(n, self.disturbances.len());
            for &(w, x) in &self.disturbance_bindings {
                r.set(x, w, PeriodicSeries::e());
            }
            r
        };
        SystemMatrices { a, b, c, r }
    }

    /// A copy without output `j` and its bindings.
    pub fn without_output(&self, j: usize) -> TegModel {
        let mut m = self.clone();
        m.outputs.remove(j);
        m.output_bindings = m
            .output_bindings
            .into_iter()
            .filter(|&(_, y)| y != j)
            .map(|(x, y)| (x, if y > j { y - 1 } else { y }))
            .collect();
        m
    }
}

impl fmt::Display for TegModel {
    /// The document form accepted by [`parse_teg`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (word, list) in [
            ("state", &self.states),
            ("input", &self.inputs),
            ("output", &self.outputs),
            ("disturbance", &self.disturbances),
        ] {
            if !list.is_empty() {
                writeln!(f, "{word} {}", list.join(" "))?;
            }
        }
        for p in &self.places {
            writeln!(
                f,
                "place {} -> {} time {} tokens {}",
                self.states[p.from], self.states[p.to], p.time, p.tokens
            )?;
        }
        for &(u, x) in &self.input_bindings {
            writeln!(f, "bind_input {} -> {}", self.inputs[u], self.states[x])?;
        }
        for &(x, y) in &self.output_bindings {
            writeln!(f, "bind_output {} -> {}", self.states[x], self.outputs[y])?;
        }
        for &(w, x) in &self.disturbance_bindings {
            writeln!(
                f,
                "bind_disturbance {} -> {}",
                self.disturbances[w], self.states[x]
            )?;
        }
        Ok(())
    }
}

impl SystemMatrices {
    pub fn n(&self) -> usize {
        self.a.rows()
    }

    /// Checks that every column of `B` and `R` and every row of `C` holds
    /// exactly one `e`, that no row of `B`/`R` and no column of `C` holds two,
    /// and that all other entries are `ε`.
    pub fn validate_structure(&self) -> StructureReport {
        let mut report = StructureReport::default();
        if !self.a.is_square() {
            report.violations.push(format!(
                "A is {}x{}, not square",
                self.a.rows(),
                self.a.cols()
            ));
            return report;
        }
        let n = self.n();
        for (name, m, want) in [
            ("B", &self.b, (n, None)),
            ("R", &self.r, (n, None)),
            ("C", &self.c, (0, Some(n))),
        ] {
            let dims_ok = match want {
                (rows, None) => m.rows() == rows,
                (_, Some(cols)) => m.cols() == cols,
            };
            if !dims_ok {
                report.violations.push(format!(
                    "{name} has dimensions {}x{} incompatible with n = {n}",
                    m.rows(),
                    m.cols()
                ));
            }
        }
        if !report.passed() {
            return report;
        }
        let e = PeriodicSeries::e();
        let mut check = |name: &str, m: &SeriesMatrix, per_column: bool| {
            for (i, j, s) in m.entries() {
                if !s.is_eps() && *s != e {
                    report.violations.push(format!(
                        "{name}({},{}): non-structural entry {s}",
                        i + 1,
                        j + 1
                    ));
                }
            }
            let count_row = |i: usize| (0..m.cols()).filter(|&j| *m.get(i, j) == e).count();
            let count_col = |j: usize| (0..m.rows()).filter(|&i| *m.get(i, j) == e).count();
            let (exact, at_most, exact_word, at_most_word) = if per_column {
                (
                    (0..m.cols()).map(count_col).collect::<Vec<_>>(),
                    (0..m.rows()).map(count_row).collect::<Vec<_>>(),
                    "column",
                    "row",
                )
            } else {
                (
                    (0..m.rows()).map(count_row).collect::<Vec<_>>(),
                    (0..m.cols()).map(count_col).collect::<Vec<_>>(),
                    "row",
                    "column",
                )
            };
            for (k, c) in exact.iter().enumerate() {
                if *c != 1 {
                    report.violations.push(format!(
                        "{name} {exact_word} {} has {c} entries equal to e, expected 1",
                        k + 1
                    ));
                }
            }
            for (k, c) in at_most.iter().enumerate() {
                if *c > 1 {
                    report.violations.push(format!(
                        "{name} {at_most_word} {} has {c} entries equal to e, expected at most 1",
                        k + 1
                    ));
                }
            }
        };
        check("B", &self.b, true);
        check("R", &self.r, true);
        check("C", &self.c, false);
        report
    }

    /// `A*`, `CA*B`, `CA*R`, `A*B`, `A*R`.
    pub fn transfer(&self) -> Result<Transfer, MatrixError> {
        let a_star = self.a.star()?;
        let a_b = a_star.mul(&self.b)?;
        let a_r = a_star.mul(&self.r)?;
        let ca_b = self.c.mul(&a_b)?;
        let ca_r = self.c.mul(&a_r)?;
        Ok(Transfer {
            a_star,
            ca_b,
            ca_r,
            a_b,
            a_r,
        })
    }
}
