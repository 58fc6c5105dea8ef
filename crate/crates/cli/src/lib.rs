//! Command-line front end: every subcommand reads JSON files, writes one
//! JSON document to standard output and exits with 0 (all checks pass),
//! 1 (a tolerance was breached) or 2 (invalid input).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use ruelle::bfunc::{b_function, b_hat, PoleSum};
use ruelle::corpus;
use ruelle::derivs::{self, Method, CUSP_TOL, FD_STEP, RANK_TOL};
use ruelle::orbits::{find_orbits, orbit_data, orbit_data_with_tol, refine_orbit, PeriodicOrbit, ORBIT_TOL};
use ruelle::spaces::{Coord, MapDescriptor, MapPoint};
use ruelle::transfer::{transfer_closed_form, transfer_eval};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "ruelle",
    version,
    about = "Multiplier derivatives through the Ruelle transfer operator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Periodic orbits of exact period n.
    Orbits {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        period: usize,
        #[arg(long, default_value_t = ORBIT_TOL)]
        tol: f64,
    },
    /// B of an orbit as a pole sum, or B^ with --hat.
    Bfunc {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        orbit: PathBuf,
        #[arg(long)]
        hat: bool,
    },
    /// Closed-form transfer of a pole sum, optionally checked at a point.
    Transfer {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        polesum: PathBuf,
        /// Point `re,im` at which to compare with preimage summation.
        #[arg(long, value_parser = parse_complex)]
        numeric_at: Option<Complex64>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Checks B - T B = sum L_j/(z - v_j) at sample points.
    VerifyIdentity {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        orbit: PathBuf,
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Derivative of the multiplier in one chart coordinate.
    Deriv {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        orbit: PathBuf,
        /// sigma, m, vJ, ivJ (reciprocal) or VK (grouped value).
        #[arg(long)]
        coord: Coord,
        #[arg(long, value_enum, default_value_t = MethodArg::Residue)]
        method: MethodArg,
        #[arg(long, default_value_t = FD_STEP)]
        fd_step: f64,
        /// Relative tolerance on pairwise deltas with --method all.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Cusp derivatives of an orbit with multiplier 1, by both routes.
    Cusp {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        orbit: PathBuf,
        #[arg(long, value_delimiter = ',')]
        cols: Option<Vec<Coord>>,
        #[arg(long, default_value_t = FD_STEP)]
        h0: f64,
        #[arg(long, default_value_t = CUSP_TOL)]
        tol: f64,
    },
    /// Multiplier Jacobian of several orbits and its numerical rank.
    Jacobian {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        orbits: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        cols: Option<Vec<Coord>>,
        #[arg(long, default_value_t = RANK_TOL)]
        rank_tol: f64,
    },
    /// Runs a regression suite.
    Corpus {
        #[arg(long, value_enum, default_value_t = Suite::Default)]
        suite: Suite,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Residue,
    Identity,
    Fd,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Default,
}

/// Orbit files need only the points; anything else is recomputed.
#[derive(Debug, Deserialize)]
struct OrbitFile {
    points: Vec<Complex64>,
}

#[derive(Debug, Serialize)]
struct ErrorReport {
    kind: String,
    message: String,
    exit_code: i32,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected `re` or `re,im`, got {s:?}")),
    }
}

enum Failure {
    Input(String, String),
    Lib(ruelle::Error),
}

impl From<ruelle::Error> for Failure {
    fn from(e: ruelle::Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<(Value, bool), Failure>;

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input("io".into(), format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input("json".into(), format!("{}: {e}", path.display())))
}

fn read_map(path: &Path) -> Result<MapPoint, Failure> {
    Ok(read_json::<MapDescriptor>(path)?.build()?)
}

/// Orbit points in files may be rounded; they are accepted at this relative
/// cycle defect and then polished by Newton.
pub const INPUT_ORBIT_TOL: f64 = 1e-3;

fn read_orbit(f: &MapPoint, path: &Path) -> Result<PeriodicOrbit, Failure> {
    let file: OrbitFile = read_json(path)?;
    let rough = orbit_data_with_tol(f, &file.points, INPUT_ORBIT_TOL)?;
    let refined = refine_orbit(f, &rough)?;
    Ok(orbit_data(f, &refined.points)?)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable report")
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

fn execute(command: Command) -> Outcome {
    match command {
        Command::Orbits { map, period, tol } => {
            let f = read_map(&map)?;
            let search = find_orbits(&f, period, tol)?;
            let complete = search.complete;
            Ok((
                json!({ "period": period, "complete": complete, "orbits": search.orbits }),
                complete,
            ))
        }
        Command::Bfunc { map, orbit, hat } => {
            let f = read_map(&map)?;
            let o = read_orbit(&f, &orbit)?;
            let ps = if hat { b_hat(&o)? } else { b_function(&o)? };
            let (g1, g2) = ps.gamma_coeffs();
            let kind = if hat { "b_hat" } else { "b" };
            Ok((
                json!({ "kind": kind, "multiplier": o.multiplier, "terms": ps, "gamma": [g1, g2] }),
                true,
            ))
        }
        Command::Transfer {
            map,
            polesum,
            numeric_at,
            tol,
        } => {
            let f = read_map(&map)?;
            let psi: PoleSum = read_json(&polesum)?;
            let closed = transfer_closed_form(&f, &psi)?;
            let mut report = json!({ "closed_form": closed });
            let mut passed = true;
            if let Some(z) = numeric_at {
                let numeric = transfer_eval(&f, &psi, z)?;
                let value = closed.eval(z)?;
                let delta = rel(value, numeric);
                passed = delta <= tol;
                report["check"] = json!({
                    "z": z, "closed_form": value, "numeric": numeric, "delta": delta, "tol": tol, "passed": passed
                });
            }
            Ok((report, passed))
        }
        Command::VerifyIdentity {
            map,
            orbit,
            samples,
            tol,
        } => {
            let f = read_map(&map)?;
            let o = read_orbit(&f, &orbit)?;
            let check = derivs::verify_identity(&f, &o, samples)?;
            let passed = check.max_residual <= tol;
            let mut report = to_value(&check);
            report["tol"] = json!(tol);
            report["passed"] = json!(passed);
            Ok((report, passed))
        }
        Command::Deriv {
            map,
            orbit,
            coord,
            method,
            fd_step,
            tol,
        } => {
            let f = read_map(&map)?;
            let o = read_orbit(&f, &orbit)?;
            deriv_report(&f, &o, coord, method, fd_step, tol)
        }
        Command::Cusp {
            map,
            orbit,
            cols,
            h0,
            tol,
        } => {
            let f = read_map(&map)?;
            let o = read_orbit(&f, &orbit)?;
            let cols = cols.unwrap_or_else(|| derivs::default_columns(&f));
            let report = derivs::cusp_derivatives_with(&f, &o, &cols, h0, tol)?;
            Ok((to_value(&report), true))
        }
        Command::Jacobian {
            map,
            orbits,
            cols,
            rank_tol,
        } => {
            let f = read_map(&map)?;
            let orbits = orbits
                .iter()
                .map(|p| read_orbit(&f, p))
                .collect::<Result<Vec<_>, _>>()?;
            let cols = cols.unwrap_or_else(|| derivs::default_columns(&f));
            let mut jac = derivs::assemble_jacobian(&f, &orbits, &cols)?;
            jac.rank = derivs::numerical_rank(&jac, rank_tol);
            jac.rank_tol = rank_tol;
            Ok((to_value(&jac), true))
        }
        Command::Corpus { suite: Suite::Default } => {
            let outcomes = corpus::run_default();
            let passed = outcomes.iter().all(|o| o.passed);
            let table: Vec<String> = outcomes.iter().map(|o| o.summary()).collect();
            Ok((
                json!({ "suite": "default", "passed": passed, "table": table, "criteria": outcomes }),
                passed,
            ))
        }
    }
}

fn deriv_report(f: &MapPoint, o: &PeriodicOrbit, coord: Coord, method: MethodArg, fd_step: f64, tol: f64) -> Outcome {
    let single = |m: Method| -> Result<Complex64, ruelle::Error> {
        match m {
            Method::Fd => derivs::drho_fd_oracle(f, o, coord, fd_step),
            _ => derivs::derivative(f, o, coord, m),
        }
    };
    let methods = match method {
        MethodArg::Residue => vec![Method::Residue],
        MethodArg::Identity => vec![Method::Identity],
        MethodArg::Fd => vec![Method::Fd],
        MethodArg::All => vec![Method::Residue, Method::Identity, Method::Fd],
    };
    let mut values = serde_json::Map::new();
    let mut computed = Vec::new();
    for m in methods {
        let value = match single(m) {
            Ok(v) => v,
            // With `all`, routes that do not apply to this coordinate are
            // reported and skipped.
            Err(e) if method == MethodArg::All && !e.is_tolerance_breach() => {
                values.insert(m.to_string(), json!({ "unavailable": e.to_string() }));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        values.insert(m.to_string(), json!(value));
        computed.push((m, value));
    }
    let mut deltas = Vec::new();
    let mut passed = true;
    for i in 0..computed.len() {
        for j in (i + 1)..computed.len() {
            let delta = rel(computed[i].1, computed[j].1);
            passed &= delta <= tol;
            deltas.push(json!({ "a": computed[i].0, "b": computed[j].0, "delta": delta }));
        }
    }
    let report = json!({
        "coord": coord,
        "multiplier": o.multiplier,
        "values": values,
        "deltas": deltas,
        "tol": tol,
        "passed": passed,
    });
    Ok((report, passed))
}

fn error_kind(e: &ruelle::Error) -> String {
    let debug = format!("{e:?}");
    debug
        .split(|c: char| !c.is_alphanumeric())
        .next()
        .unwrap_or_default()
        .to_string()
}

fn emit_error(stderr: &mut dyn Write, kind: String, message: String, exit_code: i32) -> i32 {
    let report = ErrorReport {
        kind,
        message,
        exit_code,
    };
    let _ = writeln!(
        stderr,
        "{}",
        serde_json::to_string(&report).expect("serializable error")
    );
    exit_code
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the exit code.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
        Err(e) => return emit_error(stderr, "usage".into(), e.to_string().trim().to_string(), EXIT_INPUT),
    };
    match execute(cli.command) {
        Ok((value, passed)) => {
            let text = serde_json::to_string_pretty(&value).expect("serializable report");
            let _ = writeln!(stdout, "{text}");
            if passed {
                EXIT_OK
            } else {
                EXIT_TOLERANCE
            }
        }
        Err(Failure::Input(kind, message)) => emit_error(stderr, kind, message, EXIT_INPUT),
        Err(Failure::Lib(e)) => {
            let code = if e.is_tolerance_breach() {
                EXIT_TOLERANCE
            } else {
                EXIT_INPUT
            };
            emit_error(stderr, error_kind(&e), e.to_string(), code)
        }
    }
}
