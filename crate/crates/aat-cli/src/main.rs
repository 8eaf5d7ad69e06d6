use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aat_core::pipeline::{run, run_catalog, Job, Stage};
use aat_core::problem::{load_problem, Options, ProblemError, SpecializationMode};
use aat_core::report::Report;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "aat", version, about = "Derive and verify algebraic addition theorems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// First-order relations P_kp and the elimination trace
    Derive(StageArgs),
    /// Primitive element, variety V and the total differential system
    Variety(StageArgs),
    /// Negation relation and rational addition formula
    Resolve(StageArgs),
    /// All residual suites: group laws, formula agreement, recursion
    Verify(StageArgs),
    /// Period search
    Period(StageArgs),
    /// Every stage
    All(StageArgs),
    /// Every built-in family through every stage
    Catalog(CatalogArgs),
}

#[derive(Args)]
struct StageArgs {
    /// Problem file
    problem: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CatalogArgs {
    /// Run only the families whose label starts with this prefix
    #[arg(long)]
    family: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Report path
    #[arg(short, long, default_value = "report.json")]
    output: PathBuf,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// exact-point or numeric-reconstruct
    #[arg(long, value_parser = parse_mode)]
    mode: Option<SpecializationMode>,
    /// Record wall-clock stage timings (the report is then no longer replay-identical)
    #[arg(long)]
    timings: bool,
}

fn parse_mode(s: &str) -> Result<SpecializationMode, String> {
    SpecializationMode::parse(s).ok_or_else(|| "expected exact-point or numeric-reconstruct".to_string())
}

impl Common {
    fn apply(&self, o: &mut Options) {
        if let Some(t) = self.tol {
            o.tol = t;
        }
        if let Some(s) = self.samples {
            o.samples = s;
        }
        if let Some(s) = self.seed {
            o.seed = s;
        }
        if self.mode.is_some() {
            o.mode = self.mode;
        }
    }
}

fn write(report: &Report, path: &Path) -> bool {
    match report.emit(path) {
        Ok(()) => true,
        Err(e) => {
            eprintln!("error: cannot write {}: {e}", path.display());
            false
        }
    }
}

fn summarize(report: &Report) {
    for (name, v) in &report.verdicts {
        println!("{v:4}  {name}");
    }
    for f in &report.failures {
        println!("FAILED  {f}");
    }
    println!("{}", if report.passed() { "all verdicts pass" } else { "some verdicts fail" });
}

fn run_stage(stage: Stage, args: &StageArgs) -> ExitCode {
    let c = &args.common;
    let spec = match load_problem(&args.problem) {
        Ok(s) => s,
        Err(e) => {
            let mut o = Options::default();
            c.apply(&mut o);
            let mut r = Report::new(o.seed);
            r.fail("load", &e);
            match e {
                ProblemError::NotFound(_) => eprintln!("error: {e}"),
                _ => eprintln!("error: {}: {e}", args.problem.display()),
            }
            write(&r, &c.output);
            return ExitCode::from(2);
        }
    };
    let mut spec = spec;
    c.apply(&mut spec.options);
    let label = args.problem.file_stem().map_or("problem".into(), |s| s.to_string_lossy().to_string());
    let report = match Job::from_spec(&label, &spec) {
        Ok(job) => run(&job, stage, c.timings),
        Err(e) => {
            let mut r = Report::new(spec.options.seed);
            r.fail("setup", e);
            r
        }
    };
    finish(&report, &c.output)
}

fn finish(report: &Report, path: &Path) -> ExitCode {
    summarize(report);
    if !write(report, path) {
        return ExitCode::from(2);
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Derive(a) => run_stage(Stage::Derive, a),
        Command::Variety(a) => run_stage(Stage::Variety, a),
        Command::Resolve(a) => run_stage(Stage::Resolve, a),
        Command::Verify(a) => run_stage(Stage::Verify, a),
        Command::Period(a) => run_stage(Stage::Period, a),
        Command::All(a) => run_stage(Stage::All, a),
        Command::Catalog(a) => {
            let c = &a.common;
            let mut o = Options::default();
            c.apply(&mut o);
            finish(&run_catalog(&o, c.timings, a.family.as_deref()), &c.output)
        }
    }
}
