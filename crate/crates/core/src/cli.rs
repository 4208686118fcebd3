//! `mpobs` command-line front end.
//!
//! Exit codes: 0 success, 1 a check failed, 2 bad input.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::matrix::SeriesMatrix;
use crate::observer::synth_lx;
use crate::simulate::{
    compare_estimation, earliest_state, observer_run, system_output, Trajectory,
};
use crate::teg::{parse_teg, TegModel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

const DEFAULT_HORIZON: usize = 40;

#[derive(Parser, Debug)]
#[command(
    name = "mpobs",
    version,
    about = "Max-plus observers for timed event graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Kleene star of a square matrix file.
    Star { matrix: PathBuf },
    /// System matrices and transfer matrices of a TEG.
    Transfer { teg: PathBuf },
    /// Greatest observer matrix and its checks.
    Observe {
        teg: PathBuf,
        /// Also fail when the estimate is not provably exact.
        #[arg(long)]
        require_exact: bool,
    },
    /// Plant and observer runs with the estimation report.
    Simulate {
        teg: PathBuf,
        /// Input table with one column per input transition.
        #[arg(long)]
        u: Option<PathBuf>,
        /// Disturbance table with one column per disturbance transition.
        #[arg(long)]
        w: Option<PathBuf>,
        /// Last event index. Defaults to the table horizon, or 40 without tables.
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Structural checks on B, C, R and the component structure of A.
    Check { teg: PathBuf },
}

struct Outcome {
    body: String,
    code: i32,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let outcome = match dispatch(&cli) {
        Ok(o) => o,
        Err(Failure(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_INPUT;
        }
    };
    let written = match &cli.out {
        Some(path) => fs::write(path, &outcome.body)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => stdout
            .write_all(outcome.body.as_bytes())
            .map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => outcome.code,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_INPUT
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("cannot read {}: {e}", path.display())))
}

fn load_teg(path: &Path) -> Result<TegModel, Failure> {
    parse_teg(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn grid(m: &SeriesMatrix) -> Value {
    let rows: Vec<Vec<String>> = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect())
        .collect();
    json!(rows)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes") + "\n"
}

fn dispatch(cli: &Cli) -> Result<Outcome, Failure> {
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Star { matrix } => {
            let a: SeriesMatrix = read(matrix)?
                .parse()
                .map_err(|e| Failure(format!("{}: {e}", matrix.display())))?;
            if !a.is_square() {
                return Err(Failure(format!(
                    "matrix is {}x{}, not square",
                    a.rows(),
                    a.cols()
                )));
            }
            let star = a.star()?;
            let body = if json {
                pretty(&json!({ "star": grid(&star) }))
            } else {
                format!("{star}\n")
            };
            Ok(Outcome {
                body,
                code: EXIT_OK,
            })
        }
        Command::Transfer { teg } => {
            let sys = load_teg(teg)?.build_matrices();
            let t = sys.transfer()?;
            let named = [
                ("A", &sys.a),
                ("B", &sys.b),
                ("C", &sys.c),
                ("R", &sys.r),
                ("A*", &t.a_star),
                ("CA*B", &t.ca_b),
                ("CA*R", &t.ca_r),
                ("A*B", &t.a_b),
                ("A*R", &t.a_r),
            ];
            let body = if json {
                let map: serde_json::Map<String, Value> = named
                    .iter()
                    .map(|(k, m)| (k.to_string(), grid(m)))
                    .collect();
                pretty(&Value::Object(map))
            } else {
                named.iter().map(|(k, m)| format!("{k} = {m}\n")).collect()
            };
            Ok(Outcome {
                body,
                code: EXIT_OK,
            })
        }
        Command::Observe { teg, require_exact } => {
            let sys = load_teg(teg)?.build_matrices();
            let report = sys.validate_structure();
            if !report.passed() {
                return Err(Failure(format!(
                    "structural check failed: {}",
                    report.violations.join("; ")
                )));
            }
            let res = synth_lx(&sys)?;
            let ok = res.checks.required_pass() && (!require_exact || res.checks.prop4_exact);
            let body = if json { res.to_json() } else { res.to_text() };
            Ok(Outcome {
                body,
                code: if ok { EXIT_OK } else { EXIT_CHECK_FAILED },
            })
        }
        Command::Simulate { teg, u, w, horizon } => {
            simulate(teg, u.as_deref(), w.as_deref(), *horizon, json)
        }
        Command::Check { teg } => {
            let model = load_teg(teg)?;
            let sys = model.build_matrices();
            let report = sys.validate_structure();
            let blocks = sys.a.scc_block_form();
            let comps: Vec<Vec<String>> = (0..blocks.k)
                .map(|b| {
                    blocks
                        .members(b)
                        .iter()
                        .map(|&i| model.states[i].clone())
                        .collect()
                })
                .collect();
            let body = if json {
                pretty(&json!({
                    "passed": report.passed(),
                    "violations": report.violations,
                    "components": comps,
                    "irreducible": blocks.is_irreducible(),
                }))
            } else {
                let mut s = format!(
                    "structure = {}\n",
                    if report.passed() { "pass" } else { "fail" }
                );
                for v in &report.violations {
                    s.push_str(&format!("violation: {v}\n"));
                }
                let listed: Vec<String> = comps
                    .iter()
                    .map(|c| format!("{{{}}}", c.join(" ")))
                    .collect();
                s.push_str(&format!("components = {} {}\n", blocks.k, listed.join(" ")));
                s
            };
            Ok(Outcome {
                body,
                code: if report.passed() {
                    EXIT_OK
                } else {
                    EXIT_CHECK_FAILED
                },
            })
        }
    }
}

fn load_table(path: Option<&Path>, names: &[String]) -> Result<Option<Trajectory>, Failure> {
    let Some(path) = path else { return Ok(None) };
    let table: Trajectory = read(path)?
        .parse()
        .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    Ok(Some(table.select(names).map_err(|e| {
        Failure(format!("{}: {e}", path.display()))
    })?))
}

fn simulate(
    teg: &Path,
    u_path: Option<&Path>,
    w_path: Option<&Path>,
    horizon: Option<usize>,
    json: bool,
) -> Result<Outcome, Failure> {
    let model = load_teg(teg)?;
    let sys = model.build_matrices();
    let report = sys.validate_structure();
    if !report.passed() {
        return Err(Failure(format!(
            "structural check failed: {}",
            report.violations.join("; ")
        )));
    }
    let u = load_table(u_path, &model.inputs)?;
    let w = load_table(w_path, &model.disturbances)?;
    let file_horizon = match (&u, &w) {
        (Some(a), Some(b)) if a.horizon() != b.horizon() => {
            return Err(Failure(format!(
                "horizon mismatch: input table covers {:?} events, disturbance table {:?}",
                a.horizon().map(|k| k + 1),
                b.horizon().map(|k| k + 1)
            )))
        }
        (Some(t), _) | (None, Some(t)) => t.horizon(),
        (None, None) => None,
    };
    let k = match (horizon, file_horizon) {
        (Some(k), Some(f)) if k > f => {
            return Err(Failure(format!(
                "horizon {k} exceeds the {} events given in the tables",
                f + 1
            )))
        }
        (Some(k), _) => k,
        (None, Some(f)) => f,
        (None, None) => DEFAULT_HORIZON,
    };
    let u = u.unwrap_or_else(|| Trajectory::eps("u", model.inputs.len(), k).renamed(&model.inputs));
    let w = w.unwrap_or_else(|| {
        Trajectory::eps("w", model.disturbances.len(), k).renamed(&model.disturbances)
    });
    let lx = synth_lx(&sys)?.lx;
    let x = earliest_state(&sys, &u, &w, k)?;
    let y = system_output(&sys, &x)?;
    let xhat = observer_run(&sys, &lx, &u, &y, k)?;
    let yhat = system_output(&sys, &xhat)?;
    let cmp = compare_estimation(&x, &xhat, &y, &yhat);
    let hat = |names: &[String]| names.iter().map(|n| format!("{n}_hat")).collect::<Vec<_>>();
    let x = x.renamed(&model.states);
    let y = y.renamed(&model.outputs);
    let xhat = xhat.renamed(&hat(&model.states));
    let yhat = yhat.renamed(&hat(&model.outputs));
    let code = if cmp.passed() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    };
    let body = if json {
        let table = |t: &Trajectory| -> Value {
            let cols: serde_json::Map<String, Value> = t
                .names
                .iter()
                .zip(&t.slices)
                .map(|(n, s)| {
                    (
                        n.clone(),
                        json!(s.dates.iter().map(ToString::to_string).collect::<Vec<_>>()),
                    )
                })
                .collect();
            Value::Object(cols)
        };
        pretty(&json!({
            "horizon": k,
            "x": table(&x),
            "x_hat": table(&xhat),
            "y": table(&y),
            "y_hat": table(&yhat),
            "report": {
                "lower_bound": cmp.violations.is_empty(),
                "outputs_equal": cmp.output_mismatches.is_empty(),
                "bounded_gap": cmp.bounded,
                "max_gap": cmp.max_gap.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "violations": cmp.violations.iter().map(|&(i, k)| json!({"state": model.states[i], "k": k})).collect::<Vec<_>>(),
                "output_mismatches": cmp.output_mismatches.iter().map(|&(i, k)| json!({"output": model.outputs[i], "k": k})).collect::<Vec<_>>(),
            }
        }))
    } else {
        format!(
            "# x\n{x}\n# x_hat\n{xhat}\n# y\n{y}\n# y_hat\n{yhat}\n# report\n{}",
            cmp.to_text()
        )
    };
    Ok(Outcome { body, code })
}
