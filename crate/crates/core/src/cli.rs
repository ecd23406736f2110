//! Command-line front end. Everything except process exit lives here so the
//! commands can be driven from tests.
//!
//! Exit codes: 0 success, 1 certified negative answer (not embeddable, not
//! chordal, infeasible), 2 malformed input, 3 numerical failure.

use std::fs;
use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::completion::{
    clique_feasible, complete_chordal_rooted, is_chordal, non_chordal_witness, Chordality, CompletionError,
    CompletionVerdict,
};
use crate::embed::{check_euclidean, check_kissing, construct_embedding, schur_construction, EmbedError, Method};
use crate::io::{
    parse_graph, to_json, EuclideanSphereFile, FormatError, MatrixFile, SphereSetFile, VectorFile,
};
use crate::kissing::{classify_pair, distance_matrix, dist_k, KissingError};
use crate::lightcone::{psi, psi_inverse, LightconeError};
use crate::numkernel::{KernelError, Tolerance};
use crate::spheres::{check_spheres, hyperboloid_embed, separation_matrix, SpheresError};

#[derive(Debug, Parser)]
#[command(name = "kissing", version, about = "Distance geometry of kissing spheres")]
pub struct Cli {
    /// Relative threshold below which eigenvalues count as zero.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub eig_zero: f64,
    /// Relative residual allowed in factorization and alignment checks.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub residual: f64,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Kissing,
    Euclidean,
    Spheres,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckMethod {
    Minors,
    Inertia,
    DistanceInertia,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmbedMethod {
    Factor,
    Schur,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pairwise distance matrix of a sphere set.
    Dist { input: String },
    /// Tangent / disjoint / intersecting / shared tangent point, per pair.
    Classify { input: String },
    /// Certify whether a matrix is realizable in dimension n.
    Check {
        input: String,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "kissing")]
        mode: Mode,
        #[arg(long, value_enum, default_value = "inertia")]
        method: CheckMethod,
    },
    /// Recover a sphere set from a squared distance matrix.
    Embed {
        input: String,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "factor")]
        method: EmbedMethod,
        /// Pivot pair `a,b` for the Schur construction.
        #[arg(long, value_parser = parse_pivot)]
        pivot: Option<(usize, usize)>,
    },
    /// Map spheres to lightcone vectors, or back with --inverse.
    Lightcone {
        input: String,
        #[arg(long)]
        inverse: bool,
    },
    /// Separation matrix and hyperboloid vectors of Euclidean spheres.
    Spheres { input: String },
    /// Complete edge lengths on a chordal graph to a full matrix.
    Complete {
        input: String,
        #[arg(long)]
        n: usize,
        /// Index of the clique-tree root.
        #[arg(long, default_value_t = 0)]
        root: usize,
    },
    /// Lengths on a non-chordal graph that pass every clique test but
    /// cannot be completed.
    Witness {
        input: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
}

fn parse_pivot(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected a,b")?;
    let p = |v: &str| v.trim().parse::<usize>().map_err(|e| e.to_string());
    Ok((p(a)?, p(b)?))
}

/// Exit code plus the JSON document for stdout (or diagnostics for stderr).
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub stdout: Option<String>,
    pub stderr: Option<String>,
}

impl Outcome {
    fn json(exit_code: i32, value: &impl Serialize) -> Self {
        Outcome {
            exit_code,
            stdout: Some(to_json(value)),
            stderr: None,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Numerical(String),
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<KernelError> for Failure {
    fn from(e: KernelError) -> Self {
        match e {
            KernelError::EigenNonConvergence | KernelError::EigenResidual { .. } | KernelError::SingularPivot { .. } => {
                Failure::Numerical(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<KissingError> for Failure {
    fn from(e: KissingError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<LightconeError> for Failure {
    fn from(e: LightconeError) -> Self {
        match e {
            LightconeError::Kernel(k) => k.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<EmbedError> for Failure {
    fn from(e: EmbedError) -> Self {
        match e {
            EmbedError::Kernel(k) => k.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<SpheresError> for Failure {
    fn from(e: SpheresError) -> Self {
        match e {
            SpheresError::Kernel(k) => k.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<CompletionError> for Failure {
    fn from(e: CompletionError) -> Self {
        match e {
            CompletionError::Kernel(k) | CompletionError::Embed(EmbedError::Kernel(k)) => k.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn read_input(path: &str, stdin: &mut dyn Read) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        stdin.read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{path}: {e}")))
    }
}

/// Runs a parsed command line, reading `-` inputs from `stdin`. The
/// `--output` file, if any, is written here as well.
pub fn run(cli: &Cli, stdin: &mut dyn Read) -> Outcome {
    let tol = match Tolerance::new(cli.eig_zero, cli.residual) {
        Ok(t) => t,
        Err(e) => return failure(Failure::Input(e.to_string())),
    };
    let outcome = match dispatch(&cli.command, &tol, stdin) {
        Ok(o) => o,
        Err(f) => return failure(f),
    };
    match (&cli.output, &outcome.stdout) {
        (Some(path), Some(text)) => match fs::write(path, format!("{text}\n")) {
            Ok(()) => Outcome {
                stdout: None,
                ..outcome
            },
            Err(e) => failure(Failure::Input(format!("{}: {e}", path.display()))),
        },
        _ => outcome,
    }
}

fn failure(f: Failure) -> Outcome {
    let (exit_code, msg) = match f {
        Failure::Input(m) => (2, m),
        Failure::Numerical(m) => (3, m),
    };
    Outcome {
        exit_code,
        stdout: None,
        stderr: Some(msg),
    }
}

fn method_of(m: CheckMethod) -> Method {
    match m {
        CheckMethod::Minors => Method::Minors,
        CheckMethod::Inertia => Method::Inertia,
        CheckMethod::DistanceInertia => Method::DistanceInertia,
    }
}

fn dispatch(command: &Command, tol: &Tolerance, stdin: &mut dyn Read) -> Result<Outcome, Failure> {
    match command {
        Command::Dist { input } => {
            let f = SphereSetFile::parse(&read_input(input, stdin)?)?;
            let k = f.spheres.len();
            let mut d = vec![vec![0.0; k]; k];
            for i in 0..k {
                for j in (i + 1)..k {
                    let v = dist_k(&f.spheres[i], &f.spheres[j])?;
                    d[i][j] = v;
                    d[j][i] = v;
                }
            }
            Ok(Outcome::json(0, &json!({ "d": d })))
        }
        Command::Classify { input } => {
            let f = SphereSetFile::parse(&read_input(input, stdin)?)?;
            let mut pairs = Vec::new();
            for i in 0..f.spheres.len() {
                for j in (i + 1)..f.spheres.len() {
                    let class = classify_pair(&f.spheres[i], &f.spheres[j])?;
                    pairs.push(json!({ "i": i, "j": j, "class": class }));
                }
            }
            Ok(Outcome::json(0, &json!({ "pairs": pairs })))
        }
        Command::Check { input, n, mode, method } => {
            let f = MatrixFile::parse(&read_input(input, stdin)?)?;
            let method = method_of(*method);
            let cert = match mode {
                Mode::Kissing => check_kissing(&f.distance_matrix()?, *n, method, tol)?,
                Mode::Euclidean => check_euclidean(&f.distance_matrix()?, *n, method, tol)?,
                Mode::Spheres => check_spheres(&f.separation_matrix()?, *n, method, tol)?,
            };
            Ok(Outcome::json(if cert.is_embeddable() { 0 } else { 1 }, &cert))
        }
        Command::Embed { input, n, method, pivot } => {
            let f = MatrixFile::parse(&read_input(input, stdin)?)?;
            let d = f.distance_matrix()?;
            let result = match method {
                EmbedMethod::Factor => construct_embedding(&d, *n, tol).map(|r| r.spheres),
                EmbedMethod::Schur => {
                    let pivot = pivot.ok_or_else(|| Failure::Input("--method schur needs --pivot a,b".into()))?;
                    schur_construction(&d, *n, pivot, tol)
                }
            };
            match result {
                Ok(spheres) => {
                    let error = d.relative_error(&distance_matrix(&spheres)?);
                    Ok(Outcome::json(0, &json!({ "n": n, "spheres": spheres, "relative_error": error })))
                }
                Err(EmbedError::Infeasible { inertia, reason }) => Ok(Outcome::json(
                    1,
                    &json!({ "failure": "not_embeddable", "inertia": inertia, "detail": reason.to_string() }),
                )),
                Err(EmbedError::Realization(f)) => Ok(Outcome::json(
                    1,
                    &json!({ "failure": "realization", "diagnostic": f, "detail": f.to_string() }),
                )),
                Err(e @ (EmbedError::NotSemidefinite(_) | EmbedError::SchurRankTooHigh { .. })) => {
                    Ok(Outcome::json(1, &json!({ "failure": "not_embeddable", "detail": e.to_string() })))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Lightcone { input, inverse } => {
            let text = read_input(input, stdin)?;
            if *inverse {
                let f = VectorFile::parse(&text)?;
                let spheres = f.vectors.iter().map(|v| psi_inverse(v, tol)).collect::<Result<Vec<_>, _>>()?;
                Ok(Outcome::json(0, &SphereSetFile { n: f.n, spheres }))
            } else {
                let f = SphereSetFile::parse(&text)?;
                let vectors = f.spheres.iter().map(|s| psi(s, f.n)).collect::<Result<Vec<_>, _>>()?;
                Ok(Outcome::json(0, &VectorFile { n: f.n, vectors }))
            }
        }
        Command::Spheres { input } => {
            let f = EuclideanSphereFile::parse(&read_input(input, stdin)?)?;
            let s = separation_matrix(&f.spheres)?;
            let vectors: Vec<_> = f.spheres.iter().map(hyperboloid_embed).collect();
            Ok(Outcome::json(
                0,
                &json!({ "separation": MatrixFile::from_separation(&s), "hyperboloid": vectors }),
            ))
        }
        Command::Complete { input, n, root } => {
            let g = parse_graph(&read_input(input, stdin)?)?;
            let r = complete_chordal_rooted(&g, *n, *root, tol).or_else(|e| match e {
                // a non-chordal graph has no clique tree, so the root is moot
                CompletionError::BadRoot { .. } if !is_chordal(&g).is_chordal() => {
                    complete_chordal_rooted(&g, *n, 0, tol)
                }
                e => Err(e),
            })?;
            let mut out = json!({ "verdict": r.verdict });
            if let Some(d) = &r.full_matrix {
                out["d2"] = json!(d.to_rows());
            }
            if let Some(z) = &r.embedding {
                out["embedding"] = json!(z);
            }
            if let Some(w) = &r.witness {
                out["witness"] = json!(w);
            }
            if let Some(rep) = &r.report {
                out["report"] = json!(rep);
            }
            let code = if r.verdict == CompletionVerdict::Completed { 0 } else { 1 };
            Ok(Outcome::json(code, &out))
        }
        Command::Witness { input, n } => {
            let g = parse_graph(&read_input(input, stdin)?)?;
            if let Chordality::Chordal { peo } = is_chordal(&g) {
                return Ok(Outcome::json(1, &json!({ "chordal": true, "peo": peo })));
            }
            let (w, cycle) = non_chordal_witness(&g)?;
            let feasible = clique_feasible(&w, *n, tol)?.feasible;
            let mut out: Value = serde_json::to_value(&w).expect("graph serializes");
            out["cycle"] = json!(cycle);
            out["clique_feasible"] = json!(feasible);
            Ok(Outcome::json(0, &out))
        }
    }
}
