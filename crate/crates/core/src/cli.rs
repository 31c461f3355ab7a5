//! The `nearstable` command line.
//!
//! Exit codes: 0 pass, 2 certificate produced but an assertion failed,
//! 3 input error, 4 resource limit, 1 internal error.

use crate::certificate::{
    cacq_certificate, sha256_hex, shm_certificate, smf_certificate, verify_certificate,
    RunCertificate,
};
use crate::error::Error;
use crate::io::{instance_to_json, parse_instance, parse_solution, to_canonical_string};
use crate::model::Instance;
use crate::oracle::{enumerate_near_feasible, generate, Family, Generated, GeneratorConfig};
use crate::scarf::ScarfSolver;
use crate::smf::RoundingMode;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_LIMIT: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "nearstable",
    version,
    about = "Near-feasible stable matchings and flows"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Problem {
    Shm,
    Cacq,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FlowProblem {
    Smf,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Json,
    Summary,
}

#[derive(clap::Args, Debug)]
struct Output {
    /// Write the certificate here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Record wall-clock time in the certificate.
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute a near-feasible stable matching.
    Solve {
        #[arg(value_enum)]
        problem: Problem,
        input: PathBuf,
        /// Write pivot and rounding events here, one per line.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Round a stable fractional flow carried in the instance file.
    Round {
        #[arg(value_enum)]
        problem: FlowProblem,
        input: PathBuf,
        #[arg(long, default_value = "default")]
        mode: RoundingMode,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Check a solution (or a certificate) against an instance:
    /// `verify [shm|cacq|smf] <instance> <solution>`.
    Verify {
        #[arg(num_args = 2..=3, required = true)]
        args: Vec<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Generate seeded random instances.
    Gen {
        family: Family,
        #[arg(long)]
        seed: u64,
        /// Number of consecutive seeds; requires --dir.
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// Corpus root; files go to `<dir>/v1/<family>-seed<N>.json`.
        #[arg(long)]
        dir: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        vertices: Option<usize>,
        #[arg(long)]
        edges: Option<usize>,
        #[arg(long)]
        ell: Option<usize>,
        #[arg(long)]
        colleges: Option<usize>,
        #[arg(long)]
        sets: Option<usize>,
        #[arg(long)]
        commodities: Option<usize>,
        #[arg(long)]
        max_capacity: Option<u64>,
        /// Tie probability in thousandths.
        #[arg(long)]
        tie_rate: Option<u32>,
        /// Acceptability probability in thousandths (cacq).
        #[arg(long)]
        density: Option<u32>,
    },
    /// List every revised capacity vector within the bounds that admits a
    /// stable matching (shm instances, at most 20 edges).
    Oracle {
        input: PathBuf,
        #[arg(long)]
        bound: u64,
        #[arg(long)]
        sum_bound: Option<u64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_PASS
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if let Error::Invalid(violations) = &e {
                for v in violations {
                    let _ = writeln!(stderr, "  {v}");
                }
            }
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ResourceLimit(_) => EXIT_LIMIT,
        e if e.is_input_error() => EXIT_INPUT,
        _ => EXIT_INTERNAL,
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Error> {
    std::fs::read(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn text(bytes: &[u8], path: &Path) -> Result<String, Error> {
    String::from_utf8(bytes.to_vec())
        .map_err(|_| Error::Parse(format!("{} is not UTF-8", path.display())))
}

fn emit(target: Option<&Path>, content: &str, stdout: &mut dyn Write) -> Result<(), Error> {
    match target {
        Some(p) => std::fs::write(p, content)?,
        None => stdout.write_all(content.as_bytes())?,
    }
    Ok(())
}

fn finish(
    mut cert: RunCertificate,
    started: Instant,
    out: &Output,
    stdout: &mut dyn Write,
) -> Result<i32, Error> {
    if out.timing {
        cert.wall_clock_ms = Some(started.elapsed().as_millis());
    }
    let body = match out.format {
        Format::Json => to_canonical_string(&cert.to_json()),
        Format::Summary => cert.summary(),
    };
    emit(out.output.as_deref(), &body, stdout)?;
    Ok(if cert.passed { EXIT_PASS } else { EXIT_FAIL })
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<i32, Error> {
    let started = Instant::now();
    match command {
        Command::Solve {
            problem,
            input,
            trace,
            out,
        } => {
            let bytes = read(&input)?;
            let (inst, _) = parse_instance(&text(&bytes, &input)?)?;
            let digest = sha256_hex(&bytes);
            let solver = ScarfSolver::from_env();
            let mut lines = Vec::new();
            let mut record = |e: &crate::scarf::PivotEvent| lines.push(e.to_string());
            let detailed = out.format == Format::Json;
            let cert = match (problem, &inst) {
                (Problem::Shm, Instance::Shm(i)) => {
                    let sol = crate::shm::solve_shm_with(i, &solver, &mut record)?;
                    for (t, s) in sol.steps.iter().enumerate() {
                        let deleted = match &s.deleted {
                            crate::shm::DeletedRow::Vertex { vertex } => format!("vertex {vertex}"),
                            crate::shm::DeletedRow::Aggregate => "aggregate".into(),
                        };
                        lines.push(format!(
                            "round {} deleted={deleted} fractional={}->{} objective={}",
                            t + 1,
                            s.fractional_before,
                            s.fractional_after,
                            crate::rational::format(&s.objective)
                        ));
                    }
                    shm_certificate(i, digest, &sol, detailed)
                }
                (Problem::Cacq, Instance::Cacq(i)) => {
                    let sol = crate::cacq::solve_cacq_with(i, &solver, &mut record)?;
                    for (t, s) in sol.steps.iter().enumerate() {
                        lines.push(format!(
                            "round {} set={} tight={} mass={} fractional={}->{}",
                            t + 1,
                            s.set,
                            s.tight,
                            s.fractional_mass,
                            s.fractional_before,
                            s.fractional_after
                        ));
                    }
                    cacq_certificate(digest, &sol, detailed)
                }
                (p, i) => {
                    return Err(Error::Parse(format!(
                        "`solve {}` given a `{}` instance",
                        format!("{p:?}").to_lowercase(),
                        i.kind()
                    )))
                }
            };
            if let Some(t) = trace {
                std::fs::write(t, lines.join("\n") + "\n")?;
            }
            finish(cert, started, &out, stdout)
        }
        Command::Round {
            problem: FlowProblem::Smf,
            input,
            mode,
            trace,
            out,
        } => {
            let bytes = read(&input)?;
            let (inst, flow) = parse_instance(&text(&bytes, &input)?)?;
            let Instance::Smf(i) = inst else {
                return Err(Error::Parse(format!(
                    "`round smf` given a `{}` instance",
                    inst.kind()
                )));
            };
            let f = flow.ok_or_else(|| Error::Parse("instance carries no `flow`".into()))?;
            let sol = crate::smf::round_stable_flow(&i, &f, mode)?;
            if let Some(t) = trace {
                let lines: Vec<String> = sol
                    .steps
                    .iter()
                    .enumerate()
                    .map(|(t, s)| {
                        format!(
                            "augment {} commodity={} kind={:?} along={} epsilon={} arcs={}",
                            t + 1,
                            s.commodity,
                            s.kind,
                            s.along,
                            crate::rational::format(&s.epsilon),
                            s.arcs.join(",")
                        )
                    })
                    .collect();
                std::fs::write(t, lines.join("\n") + "\n")?;
            }
            let cert =
                smf_certificate(&i, &f, sha256_hex(&bytes), &sol, out.format == Format::Json);
            finish(cert, started, &out, stdout)
        }
        Command::Verify { args, out } => {
            let (kind, inst_path, sol_path) = match args.as_slice() {
                [i, s] => (None, PathBuf::from(i), PathBuf::from(s)),
                [k, i, s] => (Some(k.clone()), PathBuf::from(i), PathBuf::from(s)),
                _ => unreachable!("clap enforces two or three arguments"),
            };
            let inst_bytes = read(&inst_path)?;
            let sol_bytes = read(&sol_path)?;
            let (mut inst, _) = parse_instance(&text(&inst_bytes, &inst_path)?)?;
            if let Some(k) = kind {
                if k != inst.kind() {
                    return Err(Error::Parse(format!(
                        "asked to verify `{k}` but the instance is `{}`",
                        inst.kind()
                    )));
                }
            }
            if let Instance::Cacq(i) = &inst {
                inst = Instance::Cacq(i.normalize());
            }
            let solution = parse_solution(&text(&sol_bytes, &sol_path)?, &inst)?;
            let cert = verify_certificate(
                &inst,
                &solution,
                vec![
                    ("instance".into(), sha256_hex(&inst_bytes)),
                    ("solution".into(), sha256_hex(&sol_bytes)),
                ],
            );
            finish(cert, started, &out, stdout)
        }
        Command::Gen {
            family,
            seed,
            count,
            dir,
            output,
            vertices,
            edges,
            ell,
            colleges,
            sets,
            commodities,
            max_capacity,
            tie_rate,
            density,
        } => {
            if count > 1 && dir.is_none() {
                return Err(Error::Parse("--count above 1 needs --dir".into()));
            }
            let name = format!("{family:?}").to_lowercase();
            for s in seed..seed.saturating_add(count) {
                let mut c = GeneratorConfig::new(family, s);
                c.vertices = vertices.unwrap_or(c.vertices);
                c.edges = edges.unwrap_or(c.edges);
                c.ell = ell.unwrap_or(c.ell);
                c.colleges = colleges.unwrap_or(c.colleges);
                c.sets = sets.unwrap_or(c.sets);
                c.commodities = commodities.unwrap_or(c.commodities);
                c.max_capacity = max_capacity.unwrap_or(c.max_capacity);
                c.tie_rate = tie_rate.unwrap_or(c.tie_rate).min(1000);
                c.density = density.unwrap_or(c.density).min(1000);
                let doc = match generate(&c)? {
                    Generated::Shm(i) => instance_to_json(&Instance::Shm(i), None),
                    Generated::Cacq(i) => instance_to_json(&Instance::Cacq(i), None),
                    Generated::Smf(i, f) => instance_to_json(&Instance::Smf(i), Some(&f)),
                };
                let body = to_canonical_string(&doc);
                match &dir {
                    Some(d) => {
                        let folder = d.join("v1");
                        std::fs::create_dir_all(&folder)?;
                        std::fs::write(folder.join(format!("{name}-seed{s}.json")), body)?;
                    }
                    None => emit(output.as_deref(), &body, stdout)?,
                }
            }
            Ok(EXIT_PASS)
        }
        Command::Oracle {
            input,
            bound,
            sum_bound,
            output,
        } => {
            let bytes = read(&input)?;
            let (inst, _) = parse_instance(&text(&bytes, &input)?)?;
            let Instance::Shm(i) = inst else {
                return Err(Error::Parse("the oracle handles shm instances only".into()));
            };
            let found = enumerate_near_feasible(&i, bound, sum_bound)?;
            let entries: Vec<_> = found
                .iter()
                .map(|(q, m)| {
                    let capacity: serde_json::Map<String, serde_json::Value> = i
                        .vertices
                        .iter()
                        .zip(q)
                        .map(|(v, &c)| (v.clone(), json!(c)))
                        .collect();
                    let matching: Vec<&str> = m
                        .iter()
                        .enumerate()
                        .filter(|(_, &b)| b)
                        .map(|(e, _)| i.edges[e].id.as_str())
                        .collect();
                    json!({ "capacity": capacity, "matching": matching })
                })
                .collect();
            let doc = json!({
                "kind": "oracle",
                "version": crate::io::VERSION,
                "input_sha256": sha256_hex(&bytes),
                "bound": bound,
                "sum_bound": sum_bound,
                "count": entries.len(),
                "near_feasible": entries,
            });
            emit(output.as_deref(), &to_canonical_string(&doc), stdout)?;
            Ok(EXIT_PASS)
        }
    }
}
