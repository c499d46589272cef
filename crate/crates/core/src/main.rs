//! Command-line front end.
//!
//! Exit codes: 0 success (or YES), 1 NO (or invalid certificate), 2 usage
//! or parse error, 3 domain error (zero estimate, empty S, unsupported
//! mode).

use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use invmilp::brute::enumerate_region;
use invmilp::decide::{
    build_certificate, decide_imdvp, decide_imovp, decide_impvp, decide_mdvp, decide_movp,
    decide_mpvp, reduce_mdvp_to_impvp, reduce_mpvp_to_imdvp, verify_certificate, Decision,
    ReductionArtifacts,
};
use invmilp::error::Error;
use invmilp::instance::InverseInstance;
use invmilp::io::{
    certificate_to_file, emit_result, iteration_rows, outcome_str, parse_certificate,
    parse_instance, reduction_out, separation_out, IterationRow, RawInstance, RunResult,
};
use invmilp::milp::{solve_milp, MilpOutcome};
use invmilp::rational::{format_rat, format_vec, parse_rat, Norm, Rat};
use invmilp::solver::{fenchel_separate, solve_inverse};

#[derive(Parser)]
#[command(
    name = "invmilp",
    about = "Exact solver and verifier for inverse mixed integer linear optimization",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct InstanceArg {
    /// Instance file; use `-` for stdin
    #[arg(long)]
    instance: String,
    /// Override the instance's norm (l1 or linf)
    #[arg(long)]
    norm: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the inverse problem by the cutting-plane method
    SolveInverse {
        #[command(flatten)]
        common: InstanceArg,
        /// Also write the iteration trace to this file
        #[arg(long)]
        trace: Option<std::path::PathBuf>,
    },
    /// Solve the forward problem max d'x over S
    SolveForward {
        #[command(flatten)]
        common: InstanceArg,
        /// Objective, e.g. --d "2 -1"; defaults to the instance estimate
        #[arg(long)]
        d: Option<String>,
    },
    /// Separate the target from conv(S), producing a Fenchel cut or a
    /// convex-combination membership proof
    Separate {
        #[command(flatten)]
        common: InstanceArg,
    },
    /// Decide a bound/value verification problem
    Decide {
        /// One of mpvp, mdvp, movp, impvp, imdvp, imovp
        problem: String,
        /// The bound: alpha for forward problems, gamma for inverse ones
        #[arg(long)]
        value: String,
        #[command(flatten)]
        common: InstanceArg,
        /// Objective for the forward problems (defaults to the estimate)
        #[arg(long)]
        d: Option<String>,
    },
    /// Run a Karp reduction and decide the constructed instance
    Reduce {
        /// mdvp-impvp or mpvp-imdvp
        which: String,
        #[arg(long)]
        alpha: String,
        #[command(flatten)]
        common: InstanceArg,
        /// Manual vertex-complexity override for mixed instances
        #[arg(long)]
        nu: Option<u64>,
    },
    /// Build or verify a Caratheodory certificate
    Certificate {
        /// build or verify
        action: String,
        #[command(flatten)]
        common: InstanceArg,
        /// gamma (required for build)
        #[arg(long)]
        value: Option<String>,
        /// Certificate file (required for verify)
        #[arg(long)]
        certificate: Option<std::path::PathBuf>,
    },
    /// Enumerate a bounded pure-integer region and its hull vertices
    Enumerate {
        #[command(flatten)]
        common: InstanceArg,
    },
}

fn read_instance(arg: &InstanceArg) -> Result<(RawInstance, Option<Norm>), Error> {
    let text = if arg.instance == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Error::Parse { line: 0, msg: e.to_string() })?;
        buf
    } else {
        std::fs::read_to_string(&arg.instance)
            .map_err(|e| Error::Parse { line: 0, msg: format!("{}: {e}", arg.instance) })?
    };
    let norm = match &arg.norm {
        Some(s) => {
            Some(Norm::parse(s).ok_or_else(|| Error::Domain(format!("unknown norm `{s}`")))?)
        }
        None => None,
    };
    Ok((parse_instance(&text)?, norm))
}

fn parse_d(text: &str, n: usize) -> Result<Vec<Rat>, Error> {
    let v: Result<Vec<Rat>, String> = text.split_whitespace().map(parse_rat).collect();
    let v = v.map_err(|msg| Error::Parse { line: 0, msg })?;
    if v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: v.len() });
    }
    Ok(v)
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parse { .. } | Error::DimensionMismatch { .. } => 2,
        _ => 3,
    }
}

fn decision_exit(d: Decision) -> u8 {
    match d {
        Decision::Yes => 0,
        Decision::No => 1,
    }
}

fn run(cli: Cli) -> Result<(RunResult, u8), Error> {
    match cli.cmd {
        Cmd::SolveInverse { common, trace } => {
            let (raw, norm) = read_instance(&common)?;
            let inv = raw.into_inverse(norm)?;
            let sol = solve_inverse(&inv)?;
            let rows = iteration_rows(&sol.trace, &inv.c, inv.norm);
            if let Some(path) = trace {
                let doc = TraceDoc {
                    norm: inv.norm.as_str().to_string(),
                    estimate: format_vec(&inv.c),
                    target: format_vec(&inv.x0),
                    iterations: rows.clone(),
                };
                let mut text = serde_json::to_string_pretty(&doc)
                    .map_err(|e| Error::Internal(e.to_string()))?;
                text.push('\n');
                std::fs::write(&path, text)
                    .map_err(|e| Error::Internal(format!("{}: {e}", path.display())))?;
            }
            let mut r = RunResult::new("solve-inverse");
            r.norm = Some(inv.norm.as_str().into());
            r.outcome = Some(outcome_str(sol.trace.outcome).into());
            r.theta_star = Some(format_rat(&sol.theta_star));
            r.d_star = Some(format_vec(&sol.d_star));
            r.iterations = Some(rows);
            Ok((r, 0))
        }
        Cmd::SolveForward { common, d } => {
            let (raw, _) = read_instance(&common)?;
            let n = raw.forward.num_vars;
            let d = match (&d, &raw.c) {
                (Some(text), _) => parse_d(text, n)?,
                (None, Some(c)) => c.clone(),
                (None, None) => {
                    return Err(Error::Domain(
                        "no objective: pass --d or add an estimate line".into(),
                    ))
                }
            };
            let mut r = RunResult::new("solve-forward");
            r.d = Some(format_vec(&d));
            match solve_milp(&raw.forward, &d)? {
                MilpOutcome::Optimal { argmax, value } => {
                    r.status = Some("optimal".into());
                    r.value = Some(format_rat(&value));
                    r.argmax = Some(format_vec(&argmax));
                }
                MilpOutcome::Unbounded { ray } => {
                    r.status = Some("unbounded".into());
                    r.ray = Some(format_vec(&ray));
                }
                MilpOutcome::Infeasible => {
                    r.status = Some("infeasible".into());
                }
            }
            Ok((r, 0))
        }
        Cmd::Separate { common } => {
            let (raw, _) = read_instance(&common)?;
            let x0 = raw
                .x0
                .clone()
                .ok_or_else(|| Error::Domain("target required for inverse commands".into()))?;
            let sep = fenchel_separate(&raw.forward, &x0)?;
            let mut r = RunResult::new("separate");
            r.separation = Some(separation_out(&sep));
            Ok((r, 0))
        }
        Cmd::Decide { problem, value, common, d } => {
            let (raw, norm) = read_instance(&common)?;
            let bound = parse_rat(&value).map_err(|msg| Error::Parse { line: 0, msg })?;
            let mut r = RunResult::new("decide");
            let answer = match problem.as_str() {
                "mpvp" | "mdvp" | "movp" => {
                    let n = raw.forward.num_vars;
                    let dvec = match (&d, &raw.c) {
                        (Some(text), _) => parse_d(text, n)?,
                        (None, Some(c)) => c.clone(),
                        (None, None) => {
                            return Err(Error::Domain(
                                "no objective: pass --d or add an estimate line".into(),
                            ))
                        }
                    };
                    r.alpha = Some(format_rat(&bound));
                    r.d = Some(format_vec(&dvec));
                    match problem.as_str() {
                        "mpvp" => decide_mpvp(&bound, &raw.forward, &dvec)?,
                        "mdvp" => decide_mdvp(&bound, &raw.forward, &dvec)?,
                        _ => decide_movp(&bound, &raw.forward, &dvec)?,
                    }
                }
                "impvp" | "imdvp" | "imovp" => {
                    let inv = raw.into_inverse(norm)?;
                    r.norm = Some(inv.norm.as_str().into());
                    r.gamma = Some(format_rat(&bound));
                    match problem.as_str() {
                        "impvp" => decide_impvp(&bound, &inv)?,
                        "imdvp" => decide_imdvp(&bound, &inv)?,
                        _ => decide_imovp(&bound, &inv)?,
                    }
                }
                other => return Err(Error::Domain(format!("unknown decision problem `{other}`"))),
            };
            r.answer = Some(answer.as_str().into());
            Ok((r, decision_exit(answer)))
        }
        Cmd::Reduce { which, alpha, common, nu } => {
            let (raw, norm) = read_instance(&common)?;
            let alpha = parse_rat(&alpha).map_err(|msg| Error::Parse { line: 0, msg })?;
            let c = raw
                .c
                .clone()
                .ok_or_else(|| Error::Domain("estimate required for reductions".into()))?;
            let norm = norm.or(raw.norm).unwrap_or(Norm::Linf);
            let mut r = RunResult::new("reduce");
            r.norm = Some(norm.as_str().into());
            r.alpha = Some(format_rat(&alpha));
            let (art, answer): (ReductionArtifacts, Decision) = match which.as_str() {
                "mdvp-impvp" => {
                    let art = reduce_mdvp_to_impvp(&alpha, &raw.forward, &c)?;
                    let inv = art.inverse_instance(&raw.forward, &c, norm)?;
                    let ans = decide_impvp(&art.gamma_out, &inv)?;
                    (art, ans)
                }
                "mpvp-imdvp" => {
                    let art = reduce_mpvp_to_imdvp(&alpha, &raw.forward, &c, nu)?;
                    let inv = art.inverse_instance(&raw.forward, &c, norm)?;
                    let ans = decide_imdvp(&art.gamma_out, &inv)?;
                    (art, ans)
                }
                other => return Err(Error::Domain(format!("unknown reduction `{other}`"))),
            };
            r.reduction = Some(reduction_out(&art));
            r.answer = Some(answer.as_str().into());
            Ok((r, decision_exit(answer)))
        }
        Cmd::Certificate { action, common, value, certificate } => {
            let (raw, norm) = read_instance(&common)?;
            let inv: InverseInstance = raw.into_inverse(norm)?;
            let mut r = RunResult::new("certificate");
            r.norm = Some(inv.norm.as_str().into());
            match action.as_str() {
                "build" => {
                    let gamma = value
                        .ok_or_else(|| Error::Domain("certificate build needs --value".into()))?;
                    let gamma = parse_rat(&gamma).map_err(|msg| Error::Parse { line: 0, msg })?;
                    r.gamma = Some(format_rat(&gamma));
                    match build_certificate(&inv, &gamma)? {
                        Some(cert) => {
                            r.certificate = Some(certificate_to_file(&cert));
                        }
                        None => {
                            r.outcome = Some("no-certificate".into());
                        }
                    }
                    Ok((r, 0))
                }
                "verify" => {
                    let path = certificate.ok_or_else(|| {
                        Error::Domain("certificate verify needs --certificate".into())
                    })?;
                    let text = std::fs::read_to_string(&path).map_err(|e| Error::Parse {
                        line: 0,
                        msg: format!("{}: {e}", path.display()),
                    })?;
                    let cert = parse_certificate(&text)?;
                    let ok = verify_certificate(&cert, &inv);
                    r.gamma = Some(format_rat(&cert.gamma));
                    r.certificate_valid = Some(ok);
                    Ok((r, if ok { 0 } else { 1 }))
                }
                other => Err(Error::Domain(format!("unknown certificate action `{other}`"))),
            }
        }
        Cmd::Enumerate { common } => {
            let (raw, _) = read_instance(&common)?;
            let region = enumerate_region(&raw.forward, raw.x0.as_deref())?;
            let mut r = RunResult::new("enumerate");
            r.points = Some(region.points.iter().map(|p| format_vec(p)).collect());
            r.hull_vertices = Some(region.hull_vertices.iter().map(|p| format_vec(p)).collect());
            if !region.hull_vertices.is_empty() {
                r.vertex_complexity = Some(
                    region
                        .hull_vertices
                        .iter()
                        .map(|v| invmilp::rational::encoding_length_vec(v))
                        .max()
                        .unwrap(),
                );
            }
            Ok((r, 0))
        }
    }
}

#[derive(serde::Serialize)]
struct TraceDoc {
    norm: String,
    estimate: Vec<String>,
    target: Vec<String>,
    iterations: Vec<IterationRow>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((result, code)) => {
            print!("{}", emit_result(&result));
            ExitCode::from(code)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
