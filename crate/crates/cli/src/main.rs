//! `catamerge`: check, integrate, query and round-trip `.cmg` documents.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use catamerge_core::acyclicity::check_weak_acyclicity;
use catamerge_core::chase::{ChaseConfig, ChaseOutcome};
use catamerge_core::instance::check_model;
use catamerge_core::instance::export::instance_csvs;
use catamerge_core::program::{load, Integration, LoadedExtension, Program};
use catamerge_core::query::explain;
use catamerge_core::syntax::{print_canonical, Diagnostic, SourceDocument};

const MAX_ROUNDS_VAR: &str = "CATAMERGE_MAX_ROUNDS";

#[derive(Parser, Debug)]
#[command(name = "catamerge", version, about = "Integrate schemas and data through theory extensions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate every input; report diagnostics.
    Check {
        /// `.cmg` files, or directories searched for them.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Migrate the source instances into the combined schema and chase.
    Integrate(Run),
    /// Integrate, then evaluate a query over the saturated instance.
    Query {
        #[command(flatten)]
        run: Run,
        /// Name of the query to evaluate.
        #[arg(long = "query", short = 'q')]
        name: String,
        /// Print the join plan as well.
        #[arg(long)]
        explain: bool,
    },
    /// Integrate, project back to one source schema and compare.
    Roundtrip {
        #[command(flatten)]
        run: Run,
        /// Source schema to project to.
        #[arg(long)]
        schema: String,
    },
}

#[derive(Args, Debug)]
struct Run {
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Extension to integrate; may be omitted when only one is declared.
    #[arg(long, short = 'x')]
    extension: Option<String>,
    /// Directory for the artifacts.
    #[arg(long, short = 'o', default_value = "catamerge-out")]
    out: PathBuf,
    /// Also write `trace.log`.
    #[arg(long)]
    trace: bool,
    /// Bound on chase rounds; overrides CATAMERGE_MAX_ROUNDS.
    #[arg(long)]
    max_rounds: Option<u32>,
}

/// Why a command stopped; maps onto the exit code.
#[derive(Debug)]
enum Failure {
    Invalid(String),
    Clash,
    Exhausted,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Clash => 2,
            Failure::Exhausted => 3,
        }
    }
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Invalid(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Check { inputs } => check(&inputs),
        Command::Integrate(run) => integrate(&run).map(|_| ()),
        Command::Query { run, name, explain } => query(&run, &name, explain),
        Command::Roundtrip { run, schema } => roundtrip(&run, &schema),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if let Failure::Invalid(msg) = &f {
                eprintln!("error: {msg}");
            }
            ExitCode::from(f.code())
        }
    }
}

/// Expands directories into their `.cmg` files, sorted by name.
fn collect_files(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, Failure> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(input)
                .map_err(|e| format!("{}: {e}", input.display()))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "cmg"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(input.clone());
        }
    }
    Ok(files)
}

fn read_documents(inputs: &[PathBuf]) -> Result<Vec<SourceDocument>, Failure> {
    collect_files(inputs)?
        .iter()
        .map(|p| {
            let bytes = fs::read(p).map_err(|e| format!("{}: {e}", p.display()))?;
            Ok(SourceDocument::from_bytes(p.display().to_string(), &bytes))
        })
        .collect()
}

fn report(diags: &[Diagnostic]) {
    for d in diags {
        eprintln!("{d}");
    }
}

fn load_program(inputs: &[PathBuf]) -> Result<Program, Failure> {
    let docs = read_documents(inputs)?;
    load(&docs).map_err(|diags| {
        report(&diags);
        let errors = diags.iter().filter(|d| d.is_error()).count();
        Failure::Invalid(format!("{errors} error(s) in the input"))
    })
}

fn check(inputs: &[PathBuf]) -> Outcome {
    let p = load_program(inputs)?;
    let mut errors = 0;
    for x in &p.extensions {
        let w = check_weak_acyclicity(&x.combined.schema.constraints, &x.combined.schema);
        if !w.is_acyclic() {
            eprintln!("error: extension `{}`: {w}", x.spec.name);
            errors += 1;
        }
    }
    for i in &p.instances {
        let cs = &i.schema().constraints;
        if cs.is_empty() {
            continue;
        }
        let r = check_model(i, cs)?;
        if !r.is_satisfied() {
            eprintln!("warning: instance `{}` does not yet satisfy its schema:\n{r}", i.name());
        }
    }
    if errors > 0 {
        return Err(Failure::Invalid(format!("{errors} error(s) in the input")));
    }
    println!(
        "ok: {} schema(s), {} instance(s), {} extension(s), {} query(ies)",
        p.schemas.len(),
        p.instances.len(),
        p.extensions.len(),
        p.queries.len()
    );
    Ok(())
}

fn config(run: &Run) -> Result<ChaseConfig, Failure> {
    let mut cfg = ChaseConfig::default();
    if let Ok(v) = std::env::var(MAX_ROUNDS_VAR) {
        cfg.max_rounds = v
            .trim()
            .parse()
            .map_err(|_| format!("{MAX_ROUNDS_VAR} must be a positive integer, got `{v}`"))?;
    }
    if let Some(n) = run.max_rounds {
        cfg.max_rounds = n;
    }
    Ok(cfg)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

/// Resolved inputs of one run, checked before anything executes.
struct Prepared {
    program: Program,
    cfg: ChaseConfig,
}

impl Prepared {
    fn new(run: &Run) -> Result<Prepared, Failure> {
        let program = load_program(&run.inputs)?;
        let cfg = config(run)?;
        program.pick_extension(run.extension.as_deref())?;
        Ok(Prepared { program, cfg })
    }

    fn extension(&self, run: &Run) -> &LoadedExtension {
        self.program
            .pick_extension(run.extension.as_deref())
            .expect("checked in Prepared::new")
    }
}

/// Runs the chase and writes its artifacts. Returns the integration only when
/// it saturated.
fn chase_and_write(prep: &Prepared, run: &Run) -> Result<Integration, Failure> {
    let x = prep.extension(run);
    fs::create_dir_all(&run.out).map_err(|e| format!("{}: {e}", run.out.display()))?;
    let r = prep.program.integrate(x, &prep.cfg)?;
    write(&run.out, "combined.cmg", &print_canonical(&r.combined))?;
    if run.trace {
        write(&run.out, "trace.log", &r.outcome.trace().to_log())?;
    }
    match &r.outcome {
        ChaseOutcome::Saturated { instance, trace } => {
            write(&run.out, "saturated.cmg", &print_canonical(instance))?;
            for (name, csv) in instance_csvs(instance) {
                write(&run.out, &name, &csv)?;
            }
            eprintln!(
                "saturated `{}` after {} action(s); {} element(s)",
                x.spec.name,
                trace.entries.len(),
                instance.total_count()
            );
        }
        ChaseOutcome::Failed {
            clash,
            constraint,
            round,
            trace,
        } => {
            eprintln!("chase failed in round {round} on `{constraint}`: {clash}");
            eprintln!("{} action(s) applied before the clash", trace.entries.len());
            return Err(Failure::Clash);
        }
        ChaseOutcome::Exhausted { rounds, .. } => {
            eprintln!("chase stopped after {rounds} round(s) without saturating");
            return Err(Failure::Exhausted);
        }
    }
    Ok(r)
}

fn integrate(run: &Run) -> Result<Integration, Failure> {
    let prep = Prepared::new(run)?;
    let r = chase_and_write(&prep, run)?;
    let sat = r.saturated().expect("saturated");
    for e in &sat.schema().entities {
        println!("{e}: {}", sat.count(e));
    }
    Ok(r)
}

fn query(run: &Run, name: &str, show_plan: bool) -> Outcome {
    let prep = Prepared::new(run)?;
    if prep.program.query(name).is_none() {
        return Err(Failure::Invalid(format!("unknown query `{name}`")));
    }
    let r = chase_and_write(&prep, run)?;
    let sat = r.saturated().expect("saturated");
    let table = prep.program.run_query(name, sat)?;
    write(&run.out, &format!("query_{name}.csv"), &table.to_csv())?;
    if show_plan {
        let plan = explain(prep.program.query(name).expect("checked above"), sat)?;
        print!("{plan}");
    }
    print!("{}", table.to_aligned());
    Ok(())
}

fn roundtrip(run: &Run, schema: &str) -> Outcome {
    let prep = Prepared::new(run)?;
    let x = prep.extension(run);
    if x.spec.include(schema).is_none() {
        return Err(Failure::Invalid(format!(
            "schema `{schema}` is not part of extension `{}`",
            x.spec.name
        )));
    }
    let r = chase_and_write(&prep, run)?;
    let sat = r.saturated().expect("saturated");
    let (_, report) = prep.program.roundtrip(x, sat, schema)?;
    let text = report.to_string();
    write(&run.out, &format!("roundtrip_{schema}.txt"), &text)?;
    print!("{text}");
    Ok(())
}
