//! `cutcover` command-line tool.
//!
//! Exit codes: 0 ok, 1 a check or property failed, 2 unreadable or
//! malformed input, 3 algorithm does not fit the requirement flavor,
//! 4 solver abort, 5 invalid planar embedding, 6 flow extraction failure.
//! Every error is a single stderr line `error[<class>]: <reason>`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cutcover::certificate::{solve, verify_certificate, CertificateFile};
use cutcover::flow::{gap_report, verify_flow, FlowAssignment, PipelineError};
use cutcover::format::{document_kind, FlowFile, FormatError, GapReportFile, InstanceFile, MulticutFile};
use cutcover::generate::{random_ecap, random_proper, random_seymour, SizeBounds};
use cutcover::harness::{property_harness, Fault, HarnessConfig};
use cutcover::planar::{check_multicut, DualizeError};
use cutcover::wgmv::ClauseResult;
use cutcover::{Algorithm, RequirementError, SolverError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "cutcover", version, about = "Primal-dual cut cover solvers with exact certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a cut cover instance and write its certificate.
    Solve {
        #[arg(long, value_enum)]
        algorithm: AlgorithmArg,
        input: PathBuf,
        /// Certificate path; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check a certificate, flow or multicut against its instance.
    Verify { document: PathBuf, instance: PathBuf },
    /// Run the planar multicut/multiflow pipeline on a Seymour instance.
    Seymour { input: PathBuf, output_dir: PathBuf },
    /// Generate a random instance.
    Gen {
        #[arg(value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Maximum vertex count.
        #[arg(long)]
        size: Option<usize>,
        /// Instance path; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the randomized property harness.
    Harness {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Instances of each kind.
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, value_enum, default_value_t = FaultArg::None)]
        fault: FaultArg,
        #[arg(long)]
        no_shrink: bool,
        /// Report path; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Where witness instances go; defaults to `<report>.witnesses`.
        #[arg(long)]
        witness_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Gw,
    Wgmv,
    WgmvHalf,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Ecap,
    Proper,
    Seymour,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FaultArg {
    None,
    SkipReverseDelete,
    SkipReductions,
}

/// A failure with its exit code and one-line reason.
struct Failure {
    code: u8,
    class: &'static str,
    reason: String,
}

impl Failure {
    fn new(code: u8, class: &'static str, reason: impl ToString) -> Self {
        Failure { code, class, reason: reason.to_string() }
    }
}

type Outcome = Result<u8, Failure>;

fn parse_error(path: &Path, e: impl ToString) -> Failure {
    Failure::new(2, "parse", format!("{}: {}", path.display(), e.to_string()))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| parse_error(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::new(2, "io", format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| Failure::new(2, "io", format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => write(p, text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(x: &T) -> String {
    serde_json::to_string_pretty(x).expect("documents serialize")
}

fn solver_failure(e: SolverError) -> Failure {
    match e {
        SolverError::NotProper(_) | SolverError::Requirement(RequirementError::WrongFlavor { .. }) => {
            Failure::new(3, "flavor", e)
        }
        _ => Failure::new(4, "solver", e),
    }
}

fn print_clauses(clauses: &[ClauseResult]) -> u8 {
    for c in clauses {
        let status = if c.passed { "ok" } else { "FAIL" };
        println!("clause {}: {status}: {}", c.name, c.detail);
    }
    let failed: Vec<&str> = clauses.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        println!("verdict: ok");
        0
    } else {
        println!("verdict: FAIL ({})", failed.join(", "));
        1
    }
}

fn cmd_solve(algorithm: AlgorithmArg, input: &Path, output: Option<&Path>, trace: Option<&Path>) -> Outcome {
    let file = InstanceFile::parse(&read(input)?).map_err(|e| parse_error(input, e))?;
    let (g, f) = file.to_cover().map_err(|e| parse_error(input, e))?;
    let algorithm = match algorithm {
        AlgorithmArg::Gw => Algorithm::Gw,
        AlgorithmArg::Wgmv => Algorithm::Wgmv,
        AlgorithmArg::WgmvHalf => Algorithm::WgmvHalf,
    };
    let (cert, tr) = solve(&g, &f, algorithm).map_err(solver_failure)?;
    if let Some(p) = trace {
        write(p, &to_json(&tr))?;
    }
    emit(output, &cert.to_json())?;
    Ok(0)
}

fn cmd_verify(document: &Path, instance: &Path) -> Outcome {
    let text = read(document)?;
    let kind = document_kind(&text).map_err(|e| parse_error(document, e))?;
    let inst_file = InstanceFile::parse(&read(instance)?).map_err(|e| parse_error(instance, e))?;
    let clauses = match kind.as_str() {
        "certificate" => {
            let cert = CertificateFile::parse(&text).map_err(|e| parse_error(document, e))?;
            let (g, f) = inst_file.to_cover().map_err(|e| parse_error(instance, e))?;
            verify_certificate(&g, &f, &cert)
        }
        "flow" => {
            let flow = FlowFile::parse(&text).map_err(|e| parse_error(document, e))?;
            let inst = seymour_instance(&inst_file, instance)?;
            let assignment = FlowAssignment { paths: flow.paths };
            let verdict = verify_flow(&inst, &assignment);
            let mut clauses = verdict.clauses;
            clauses.push(ClauseResult {
                name: "recorded-total".into(),
                passed: verdict.total == flow.total,
                detail: format!("recomputed {}, recorded {}", verdict.total, flow.total),
            });
            clauses
        }
        "multicut" => {
            let cut: MulticutFile = serde_json::from_str(&text).map_err(|e| parse_error(document, e))?;
            let inst = seymour_instance(&inst_file, instance)?;
            let separates = check_multicut(&inst, &cut.edges);
            let capacity = inst.capacity(&cut.edges);
            vec![
                ClauseResult {
                    name: "separates".into(),
                    passed: separates.is_ok(),
                    detail: separates.map_or_else(|e| e.to_string(), |_| "every demand is cut".into()),
                },
                ClauseResult {
                    name: "recorded-capacity".into(),
                    passed: capacity == cut.capacity,
                    detail: format!("recomputed {capacity}, recorded {}", cut.capacity),
                },
            ]
        }
        other => return Err(parse_error(document, format!("cannot verify a {other} document"))),
    };
    Ok(print_clauses(&clauses))
}

fn seymour_instance(file: &InstanceFile, path: &Path) -> Result<cutcover::planar::SeymourInstance, Failure> {
    file.to_seymour().map_err(|e| match e {
        FormatError::Embedding(e) => Failure::new(5, "embedding", format!("{}: {e}", path.display())),
        e => parse_error(path, e),
    })
}

fn cmd_seymour(input: &Path, dir: &Path) -> Outcome {
    let file = InstanceFile::parse(&read(input)?).map_err(|e| parse_error(input, e))?;
    let inst = seymour_instance(&file, input)?;
    let report = gap_report(&inst).map_err(|e| match e {
        PipelineError::Dualize(DualizeError::Embedding(_)) | PipelineError::Dualize(DualizeError::Bridge(_)) => {
            Failure::new(5, "embedding", e)
        }
        PipelineError::Extraction(_) => Failure::new(6, "extraction", e),
        PipelineError::Solver(s) => solver_failure(s),
        PipelineError::Multicut(_) => Failure::new(4, "solver", e),
        PipelineError::Check(_) => Failure::new(1, "check", e),
    })?;
    let dual = InstanceFile::from_cover(&report.dual_graph, &report.dual_oracle)
        .map_err(|e| Failure::new(4, "solver", e))?;
    let (cert, _) = solve(&report.dual_graph, &report.dual_oracle, Algorithm::WgmvHalf).map_err(solver_failure)?;
    write(&dir.join("dual_instance.json"), &dual.to_json())?;
    write(&dir.join("certificate.json"), &cert.to_json())?;
    write(&dir.join("multicut.json"), &to_json(&MulticutFile::new(report.multicut.clone(), report.multicut_value)))?;
    write(&dir.join("flow.json"), &to_json(&FlowFile::new(report.flow.paths.clone())))?;
    write(&dir.join("gap_report.json"), &to_json(&GapReportFile::from_report(&report)))?;
    println!(
        "multicut {} flow {} ratio {}",
        report.multicut_value,
        report.flow_value,
        report.ratio.map_or("none".into(), |r| r.to_string())
    );
    Ok(0)
}

fn cmd_gen(kind: KindArg, seed: u64, size: Option<usize>, output: Option<&Path>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = match kind {
        KindArg::Seymour => SizeBounds::PLANAR,
        _ => SizeBounds::SMALL,
    };
    let bounds = match size {
        Some(n) if n < 2 => return Err(Failure::new(2, "usage", "--size must be at least 2")),
        Some(n) => SizeBounds { max_vertices: n, max_edges: base.max_edges * n / base.max_vertices, ..base },
        None => base,
    };
    let file = match kind {
        KindArg::Ecap => {
            let (g, f) = random_ecap(&mut rng, bounds);
            InstanceFile::from_cover(&g, &f)
        }
        KindArg::Proper => {
            let (g, f) = random_proper(&mut rng, bounds);
            InstanceFile::from_cover(&g, &f)
        }
        KindArg::Seymour => Ok(InstanceFile::from_seymour(&random_seymour(&mut rng, bounds))),
    }
    .map_err(|e| Failure::new(4, "solver", e))?;
    emit(output, &file.to_json())?;
    Ok(0)
}

fn cmd_harness(
    seed: u64,
    count: usize,
    fault: FaultArg,
    shrink: bool,
    output: Option<&Path>,
    witness_dir: Option<&Path>,
) -> Outcome {
    let mut config = HarnessConfig::new(seed, count);
    config.shrink = shrink;
    config.fault = match fault {
        FaultArg::None => Fault::None,
        FaultArg::SkipReverseDelete => Fault::SkipReverseDelete,
        FaultArg::SkipReductions => Fault::SkipReductions,
    };
    let mut report = property_harness(config);
    let dir = witness_dir.map(Path::to_path_buf).or_else(|| output.map(|p| p.with_extension("witnesses")));
    if let Some(dir) = dir {
        for prop in &mut report.properties {
            for (k, w) in prop.witnesses.iter_mut().enumerate() {
                let path = dir.join(format!("{}-{k}.json", prop.name));
                write(&path, &w.instance.to_json())?;
                w.path = Some(path.display().to_string());
            }
        }
    }
    emit(output, &to_json(&report))?;
    for p in &report.properties {
        if p.failures > 0 {
            eprintln!("FAIL property {}: {} of {} instances", p.name, p.failures, p.instances_run);
        }
    }
    Ok(if report.passed() { 0 } else { 1 })
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Solve { algorithm, input, output, trace } => {
            cmd_solve(algorithm, &input, output.as_deref(), trace.as_deref())
        }
        Command::Verify { document, instance } => cmd_verify(&document, &instance),
        Command::Seymour { input, output_dir } => cmd_seymour(&input, &output_dir),
        Command::Gen { kind, seed, size, output } => cmd_gen(kind, seed, size, output.as_deref()),
        Command::Harness { seed, count, fault, no_shrink, output, witness_dir } => {
            cmd_harness(seed, count, fault, !no_shrink, output.as_deref(), witness_dir.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error[{}]: {}", f.class, f.reason.replace('\n', " "));
            ExitCode::from(f.code)
        }
    }
}
