//! Command-line front end.
//!
//! Every invocation prints exactly one [`ResultDocument`] on standard output.
//! Exit codes: 0 success, feasible or true; 1 usage or domain error; 2 false,
//! infeasible or a failed check; 3 indeterminate.

use std::path::Path;

use clap::{Args, Parser, Subcommand};

use crate::check::{Check, Checked};
use crate::error::{Error, Result};
use crate::fibration::{cross_section_checked, phi_checked};
use crate::geodesic::{
    compatible_star, connect_checked, geodesic, omega_fiber_star, CompatibilityVerdict, Status,
};
use crate::involution::PositiveElement;
use crate::io::{parse_document, sha256_hex, InputEcho, Output, ResultDocument};
use crate::linalg::{ComplexMatrix, Tolerance};
use crate::polar::{omega_a_inverse_checked, omega_checked, omega_phi_move_checked, orbit_check};
use crate::projection::{cond_expectation_checked, Idempotent, OrthProjection};
use crate::suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FALSE: i32 = 2;
pub const EXIT_INDETERMINATE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "projgeom", version, about = "Oblique projections, polar retractions and geodesics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct PairArgs {
    /// Orthogonal projection (MatrixDocument JSON).
    #[arg(long)]
    p: String,
    /// Idempotent (MatrixDocument JSON).
    #[arg(long)]
    q: String,
}

#[derive(Args, Debug)]
struct CompatArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Seed of the restart generator.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The a-selfadjoint idempotent with the range of p.
    Phi {
        #[arg(long)]
        p: String,
        #[arg(long)]
        a: String,
    },
    /// A point (p, a) whose image is q.
    Section {
        #[arg(long)]
        q: String,
    },
    /// Polar retraction of an idempotent.
    Omega {
        #[arg(long)]
        q: String,
    },
    /// The a-selfadjoint idempotent retracting onto r.
    OmegaInv {
        #[arg(long)]
        r: String,
        #[arg(long)]
        a: String,
    },
    /// Retraction of phi(p, a) by the closed block formula.
    Move {
        #[arg(long)]
        p: String,
        #[arg(long)]
        a: String,
    },
    /// Whether r lies in the orbit of p.
    Orbit {
        #[arg(long)]
        p: String,
        #[arg(long)]
        r: String,
    },
    /// Samples of the geodesic from p to q.
    Geodesic {
        #[command(flatten)]
        pair: PairArgs,
        /// Number of equally spaced samples on [0, 1].
        #[arg(long, default_value_t = 5)]
        samples: usize,
    },
    /// Exponent and velocity of the geodesic from p to q.
    Connect {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Search for a positive a making p and q both a-selfadjoint.
    Compat {
        #[command(flatten)]
        args: CompatArgs,
        /// Use the flipped constraint (pairs retracting onto p).
        #[arg(long)]
        flip: bool,
    },
    /// Same as `compat --flip`.
    OmegaCompat {
        #[command(flatten)]
        args: CompatArgs,
    },
    /// Conditional expectation p x p + (1 - p) x (1 - p).
    Expect {
        #[arg(long)]
        x: String,
        #[arg(long)]
        p: String,
    },
    /// Runs the invariant battery on seeded instances.
    CheckSuite {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        cases: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Phi { .. } => "phi",
            Command::Section { .. } => "section",
            Command::Omega { .. } => "omega",
            Command::OmegaInv { .. } => "omega-inv",
            Command::Move { .. } => "move",
            Command::Orbit { .. } => "orbit",
            Command::Geodesic { .. } => "geodesic",
            Command::Connect { .. } => "connect",
            Command::Compat { .. } => "compat",
            Command::OmegaCompat { .. } => "omega-compat",
            Command::Expect { .. } => "expect",
            Command::CheckSuite { .. } => "check-suite",
        }
    }
}

/// Exit code, the document for standard output and an optional diagnostic
/// for standard error.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: Option<String>,
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome { code: EXIT_OK, stdout: e.to_string(), stderr: None };
            }
            let mut doc = ResultDocument::new("");
            let message = e.render().to_string();
            doc.error = Some(message.trim_end().to_string());
            return Outcome { code: EXIT_ERROR, stdout: doc.to_json(), stderr: Some(message) };
        }
    };
    let mut doc = ResultDocument::new(cli.command.name());
    match dispatch(&cli.command, &mut doc) {
        Ok(code) => Outcome { code, stdout: doc.to_json(), stderr: None },
        Err(e) => {
            let message = e.to_string();
            doc.error = Some(message.clone());
            Outcome { code: EXIT_ERROR, stdout: doc.to_json(), stderr: Some(message) }
        }
    }
}

fn load(doc: &mut ResultDocument, flag: &str, path: &str) -> Result<ComplexMatrix> {
    let bytes = std::fs::read(Path::new(path))
        .map_err(|e| Error::Read { path: path.to_string(), message: e.to_string() })?;
    let (m, label) = parse_document(&bytes)?;
    doc.inputs.push(InputEcho { flag: flag.to_string(), path: path.to_string(), label, sha256: sha256_hex(&bytes) });
    Ok(m)
}

fn load_projection(doc: &mut ResultDocument, flag: &str, path: &str) -> Result<OrthProjection> {
    OrthProjection::new(load(doc, flag, path)?)
}

fn load_idempotent(doc: &mut ResultDocument, flag: &str, path: &str) -> Result<Idempotent> {
    Idempotent::new(load(doc, flag, path)?)
}

fn load_positive(doc: &mut ResultDocument, flag: &str, path: &str) -> Result<PositiveElement> {
    PositiveElement::new(load(doc, flag, path)?)
}

fn by_checks(doc: &ResultDocument) -> i32 {
    if doc.all_pass() {
        EXIT_OK
    } else {
        EXIT_FALSE
    }
}

fn take_checks<T>(doc: &mut ResultDocument, checked: Checked<T>) -> T {
    doc.checks.extend(checked.checks);
    checked.value
}

fn dispatch(cmd: &Command, doc: &mut ResultDocument) -> Result<i32> {
    match cmd {
        Command::Phi { p, a } => {
            let p = load_projection(doc, "p", p)?;
            let a = load_positive(doc, "a", a)?;
            let q = take_checks(doc, phi_checked(&p, &a)?);
            doc.output("q", Output::Matrix(q.into_matrix()));
        }
        Command::Section { q } => {
            let q = load_idempotent(doc, "q", q)?;
            let point = take_checks(doc, cross_section_checked(&q)?);
            doc.output("p", Output::Matrix(point.p.matrix().clone()));
            doc.output("a", Output::Matrix(point.a.matrix().clone()));
        }
        Command::Omega { q } => {
            let q = load_idempotent(doc, "q", q)?;
            let r = take_checks(doc, omega_checked(&q)?);
            doc.output("r", Output::Matrix(r.matrix().clone()));
        }
        Command::OmegaInv { r, a } => {
            let r = load_projection(doc, "r", r)?;
            let a = load_positive(doc, "a", a)?;
            let q = take_checks(doc, omega_a_inverse_checked(&r, &a)?);
            doc.output("q", Output::Matrix(q.into_matrix()));
        }
        Command::Move { p, a } => {
            let p = load_projection(doc, "p", p)?;
            let a = load_positive(doc, "a", a)?;
            let r = take_checks(doc, omega_phi_move_checked(&p, &a)?);
            doc.checks.push(orbit_check(&p, &r, Tolerance::default()));
            doc.output("r", Output::Matrix(r.matrix().clone()));
        }
        Command::Orbit { p, r } => {
            let p = load_projection(doc, "p", p)?;
            let r = load_projection(doc, "r", r)?;
            p.matrix().ensure_same_dim(r.matrix())?;
            let check = orbit_check(&p, &r, Tolerance::default());
            doc.output("distance", Output::Scalar(check.value));
            doc.output("in_orbit", Output::Flag(check.pass));
            doc.checks.push(check);
        }
        Command::Geodesic { pair, samples } => {
            if *samples < 2 {
                return Err(Error::HypothesesViolated("at least two samples are needed"));
            }
            let p = load_projection(doc, "p", &pair.p)?;
            let q = load_idempotent(doc, "q", &pair.q)?;
            let conn = take_checks(doc, connect_checked(&p, &q)?);
            let g = geodesic(conn.velocity.clone());
            let mut curve = Vec::with_capacity(*samples);
            let mut times = Vec::with_capacity(*samples);
            for i in 0..*samples {
                let t = i as f64 / (*samples - 1) as f64;
                let m = g.eval(t)?.into_matrix();
                let scale = 1.0 + m.norm() * m.norm();
                doc.checks.push(Check::at_most(format!("idempotent_at_sample_{i}"), (&(&m * &m) - &m).norm(), 1e-9 * scale));
                times.push(Output::Scalar(t));
                curve.push(Output::Matrix(m));
            }
            doc.output("times", Output::List(times));
            doc.output("samples", Output::List(curve));
            doc.output("length", Output::Scalar(g.length(0.0, 1.0)?));
            doc.output("velocity", Output::Matrix(conn.velocity.matrix().clone()));
        }
        Command::Connect { pair } => {
            let p = load_projection(doc, "p", &pair.p)?;
            let q = load_idempotent(doc, "q", &pair.q)?;
            let conn = take_checks(doc, connect_checked(&p, &q)?);
            doc.output("exponent", Output::Matrix(conn.exponent));
            doc.output("velocity", Output::Matrix(conn.velocity.matrix().clone()));
        }
        Command::Compat { args, flip } => return compat(doc, args, *flip),
        Command::OmegaCompat { args } => return compat(doc, args, true),
        Command::Expect { x, p } => {
            let x = load(doc, "x", x)?;
            let p = load_projection(doc, "p", p)?;
            let e = take_checks(doc, cond_expectation_checked(&x, &p)?);
            doc.output("expectation", Output::Matrix(e));
        }
        Command::CheckSuite { n, seed, cases } => {
            let report = suite::run(*n, *seed, *cases)?;
            doc.output("n", Output::Integer(*n as u64));
            doc.output("seed", Output::Integer(*seed));
            doc.output("cases", Output::Integer(report.cases as u64));
            doc.output("evaluations", Output::Integer(report.evaluations as u64));
            doc.output("failures", Output::Integer(report.total_failures() as u64));
            doc.checks = report.checks;
        }
    }
    Ok(by_checks(doc))
}

/// The serde name of a unit enum variant.
fn label(value: &impl serde::Serialize) -> String {
    serde_json::to_value(value).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

fn compat(doc: &mut ResultDocument, args: &CompatArgs, flip: bool) -> Result<i32> {
    let p = load_projection(doc, "p", &args.pair.p)?;
    let q = load_idempotent(doc, "q", &args.pair.q)?;
    let v: CompatibilityVerdict =
        if flip { omega_fiber_star(&p, &q, args.seed)? } else { compatible_star(&p, &q, args.seed)? };
    doc.output("status", Output::Text(label(&v.status)));
    doc.output("certificate", Output::Text(label(&v.certificate)));
    doc.output("flip", Output::Flag(flip));
    doc.output("seed", Output::Integer(args.seed));
    doc.output("min_eigenvalue", Output::Scalar(v.min_eigenvalue));
    doc.output("nullspace_dim", Output::Integer(v.nullspace_dim as u64));
    doc.output("restarts_used", Output::Integer(v.restarts_used as u64));
    doc.output("exponent", Output::Matrix(v.exponent.clone()));
    if let Some(w) = &v.witness {
        doc.output("witness", Output::Matrix(w.matrix().clone()));
    }
    if let Some(b) = &v.b {
        doc.output("b", Output::Matrix(b.clone()));
    }
    if let Some(c) = &v.c {
        doc.output("c", Output::Matrix(c.clone()));
    }
    doc.checks.extend(v.checks);
    Ok(match v.status {
        Status::Feasible => by_checks(doc),
        Status::Infeasible => EXIT_FALSE,
        Status::Indeterminate => EXIT_INDETERMINATE,
    })
}
