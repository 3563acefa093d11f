//! Command line for the scheduling toolkit: run online algorithms, exact
//! solvers, adversaries, batch sweeps, and schedule validation over the JSON
//! file formats of the core crate.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gridsched_core::adversary;
use gridsched_core::dvs::Reference;
use gridsched_core::error::GridError;
use gridsched_core::exact;
use gridsched_core::harness::{self, GeneratorSpec, OptMethod};
use gridsched_core::model::{cost, load_profile, validate_schedule, Instance, Schedule};
use gridsched_core::online::{self, Algorithm, FitRule};
use gridsched_core::slots::SlotInstance;

#[derive(Parser)]
#[command(name = "gridsched", version, about = "Non-preemptive power-request scheduling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an online algorithm on an instance file and write its schedule.
    Solve(SolveArgs),
    /// Run an exact method and write the optimal schedule plus table stats.
    Exact(ExactArgs),
    /// Generate an adversarial run and report the achieved ratio.
    Adversary(AdversaryArgs),
    /// Sweep seeded random instances and compare against exact optima.
    Bench(BenchArgs),
    /// Check a schedule file against an instance file.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Instance JSON ({"alpha", "jobs": [...]}); greedy expects the slot-set
    /// schema instead ({"jobs": [{"id", "slots"}]}).
    #[arg(long)]
    instance: PathBuf,
    /// v | uv | general | uu | ad-nextfit | ad-firstfit | greedy
    #[arg(long)]
    alg: String,
    /// Reference profile for "v".
    #[arg(long, value_enum, default_value_t = ReferenceArg::Bkp)]
    reference: ReferenceArg,
    /// Width-class base for "general".
    #[arg(long, default_value_t = 2.0)]
    class_base: f64,
    /// Overrides the instance file's alpha.
    #[arg(long)]
    alpha: Option<f64>,
    /// Write the schedule JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExactArgs {
    #[arg(long)]
    instance: PathBuf,
    /// e | eplus | unit | brute
    #[arg(long)]
    method: MethodArg,
    #[arg(long)]
    alpha: Option<f64>,
    /// Brute-force search-space cap.
    #[arg(long, default_value_t = exact::DEFAULT_CAP)]
    cap: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AdversaryArgs {
    /// lambda | greedy
    #[arg(long = "type")]
    kind: AdversaryKind,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    /// Base width for the lambda adversary.
    #[arg(long, default_value_t = 100)]
    x: i64,
    /// Rounds for the greedy adversary.
    #[arg(long, default_value_t = 3)]
    k: u32,
    /// Online algorithm the lambda adversary plays against.
    #[arg(long, default_value = "general")]
    algorithm: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Generator spec JSON (seed, count, jobs, tau, width, height, alpha, class).
    #[arg(long)]
    spec: PathBuf,
    /// Comma-separated algorithm names; defaults to every algorithm whose
    /// input class the spec satisfies.
    #[arg(long)]
    algorithms: Option<String>,
    /// e | eplus | brute
    #[arg(long, value_enum, default_value_t = OptArg::Brute)]
    opt: OptArg,
    /// Output directory for report.csv and aggregate.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    schedule: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReferenceArg {
    Avr,
    Bkp,
    Yds,
}

impl From<ReferenceArg> for Reference {
    fn from(r: ReferenceArg) -> Self {
        match r {
            ReferenceArg::Avr => Reference::Avr,
            ReferenceArg::Bkp => Reference::Bkp,
            ReferenceArg::Yds => Reference::Yds,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    E,
    Eplus,
    Unit,
    Brute,
}

#[derive(Clone, Copy, ValueEnum)]
enum AdversaryKind {
    Lambda,
    Greedy,
}

#[derive(Clone, Copy, ValueEnum)]
enum OptArg {
    E,
    Eplus,
    Brute,
}

impl From<OptArg> for OptMethod {
    fn from(o: OptArg) -> Self {
        match o {
            OptArg::E => OptMethod::E,
            OptArg::Eplus => OptMethod::EPlus,
            OptArg::Brute => OptMethod::Brute,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), GridError> {
    match cli.command {
        Command::Solve(args) => solve(args),
        Command::Exact(args) => run_exact(args),
        Command::Adversary(args) => run_adversary(args),
        Command::Bench(args) => bench(args),
        Command::Validate(args) => validate(args),
    }
}

fn load_instance(path: &Path, alpha: Option<f64>) -> Result<Instance, GridError> {
    let mut instance = Instance::parse(&fs::read_to_string(path)?)?;
    if let Some(alpha) = alpha {
        instance.alpha = alpha;
        instance.validate()?;
    }
    Ok(instance)
}

fn write_or_print(out: Option<&Path>, content: &str) -> Result<(), GridError> {
    match out {
        Some(path) => fs::write(path, content)?,
        None => println!("{content}"),
    }
    Ok(())
}

fn solve(args: SolveArgs) -> Result<(), GridError> {
    if args.alg == "greedy" {
        let mut instance = SlotInstance::parse(&fs::read_to_string(&args.instance)?)?;
        if let Some(alpha) = args.alpha {
            instance.alpha = alpha;
        }
        let (assignment, greedy_cost) = online::greedy_assign(&instance)?;
        write_or_print(args.out.as_deref(), &serde_json::to_string_pretty(&assignment)?)?;
        println!("greedy: cost {greedy_cost} over {} jobs", instance.jobs.len());
        return Ok(());
    }
    let instance = load_instance(&args.instance, args.alpha)?;
    let algorithm = match args.alg.as_str() {
        "v" => Algorithm::Paced(args.reference.into()),
        "uv" => Algorithm::UniformWidth,
        "general" => Algorithm::WidthClassed { base: args.class_base },
        "uu" => Algorithm::Quota,
        "ad-nextfit" => Algorithm::DensityQueues(FitRule::NextFit),
        "ad-firstfit" => Algorithm::DensityQueues(FitRule::FirstFit),
        other => {
            return Err(GridError::InputClassViolation(format!(
                "unknown algorithm \"{other}\""
            )))
        }
    };
    let schedule = online::solve(&instance, algorithm)?;
    let total = cost(&load_profile(&instance, &schedule)?, instance.alpha)?;
    write_or_print(args.out.as_deref(), &schedule.to_json())?;
    println!(
        "{}: cost {total} over {} jobs (alpha {})",
        algorithm.name(),
        instance.jobs.len(),
        instance.alpha
    );
    Ok(())
}

fn run_exact(args: ExactArgs) -> Result<(), GridError> {
    let instance = load_instance(&args.instance, args.alpha)?;
    let (schedule, optimal, stats) = match args.method {
        MethodArg::E => {
            let out = exact::solve_e_default(&instance)?;
            (out.schedule, out.cost, Some(out.stats))
        }
        MethodArg::Eplus => {
            let out = exact::solve_eplus(&instance)?;
            (out.schedule, out.cost, Some(out.stats))
        }
        MethodArg::Unit => {
            let out = exact::solve_unit(&instance)?;
            (out.schedule, out.cost, Some(out.stats))
        }
        MethodArg::Brute => {
            let (schedule, c) = exact::brute_force_capped(&instance, args.cap)?;
            (schedule, c, None)
        }
    };
    write_or_print(args.out.as_deref(), &schedule.to_json())?;
    if let Some(stats) = stats {
        println!(
            "{}",
            serde_json::json!({
                "windows": stats.windows,
                "max_clique": stats.max_clique,
                "right_rows": stats.right_rows,
                "left_rows": stats.left_rows,
            })
        );
    }
    println!("optimal cost {optimal} (alpha {})", instance.alpha);
    Ok(())
}

fn run_adversary(args: AdversaryArgs) -> Result<(), GridError> {
    match args.kind {
        AdversaryKind::Lambda => {
            let mut scheduler = match args.algorithm.as_str() {
                "general" => online::width_classes::boxed_scheduler(2.0),
                other => {
                    return Err(GridError::InputClassViolation(format!(
                        "the lambda adversary feeds arbitrary widths; algorithm \"{other}\" cannot take them"
                    )))
                }
            };
            let transcript = adversary::lambda_adversary(scheduler.as_mut(), args.alpha, args.x)?;
            let (_, opt_cost) = adversary::lambda_opt_schedule(&transcript);
            write_or_print(args.out.as_deref(), &serde_json::to_string_pretty(&transcript)?)?;
            println!(
                "lambda adversary alpha={} x={}: algorithm cost {}, offline cost {} (bound {}), ratio {}",
                args.alpha,
                args.x,
                transcript.algorithm_cost,
                opt_cost,
                transcript.opt_bound,
                transcript.algorithm_cost / opt_cost
            );
        }
        AdversaryKind::Greedy => {
            let (output, greedy_cost) = adversary::greedy_adversary_report(args.k)?;
            write_or_print(args.out.as_deref(), &serde_json::to_string_pretty(&output)?)?;
            println!(
                "greedy adversary k={}: greedy cost {greedy_cost}, optimal cost {}, ratio {}",
                args.k,
                output.expected_opt_cost,
                greedy_cost / output.expected_opt_cost
            );
        }
    }
    Ok(())
}

fn parse_algorithms(names: &str) -> Result<Vec<Algorithm>, GridError> {
    names
        .split(',')
        .map(|name| match name.trim() {
            "v-avr" => Ok(Algorithm::Paced(Reference::Avr)),
            "v-bkp" | "v" => Ok(Algorithm::Paced(Reference::Bkp)),
            "v-yds" => Ok(Algorithm::Paced(Reference::Yds)),
            "uv" => Ok(Algorithm::UniformWidth),
            "general" => Ok(Algorithm::WidthClassed { base: 2.0 }),
            "uu" => Ok(Algorithm::Quota),
            "ad-nextfit" => Ok(Algorithm::DensityQueues(FitRule::NextFit)),
            "ad-firstfit" => Ok(Algorithm::DensityQueues(FitRule::FirstFit)),
            other => Err(GridError::InputClassViolation(format!(
                "unknown algorithm \"{other}\" (greedy runs under the adversary subcommand)"
            ))),
        })
        .collect()
}

fn bench(args: BenchArgs) -> Result<(), GridError> {
    let spec = GeneratorSpec::parse(&fs::read_to_string(&args.spec)?)?;
    let instances = harness::generate(&spec)?;
    let algorithms = match &args.algorithms {
        Some(names) => parse_algorithms(names)?,
        None => harness::algorithms_for(spec.class),
    };
    let report = harness::compare(&instances, &algorithms, args.opt.into(), spec.seed)?;
    fs::create_dir_all(&args.out)?;
    fs::write(args.out.join("report.csv"), report.to_csv())?;
    fs::write(args.out.join("aggregate.json"), report.aggregate_json())?;
    println!(
        "{} instances x {} algorithms: max ratio {}, {} bound violations -> {}",
        instances.len(),
        algorithms.len(),
        report.max_ratio(),
        report.violations(),
        args.out.display()
    );
    Ok(())
}

fn validate(args: ValidateArgs) -> Result<(), GridError> {
    let instance = load_instance(&args.instance, None)?;
    let schedule = Schedule::parse(&fs::read_to_string(&args.schedule)?)?;
    let violations = validate_schedule(&instance, &schedule);
    if violations.is_empty() {
        let total = cost(&load_profile(&instance, &schedule)?, instance.alpha)?;
        println!("valid: cost {total}");
        Ok(())
    } else {
        for violation in &violations {
            println!("{}", serde_json::to_string(violation)?);
        }
        Err(GridError::InfeasibleOutcome(violations))
    }
}
