//! `punctual`: line-oriented `key=value` front end to the library.

mod error;
mod opponents;

use std::cmp::Ordering;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use punctual::binary_lift::Lift;
use punctual::copies::{element_at, Identity, OracleArithmetic, PunctualCopy};
use punctual::copy_double::DoubleCopy;
use punctual::copy_gap::GapCopy;
use punctual::cycles::{c_k, s_k, verify_cycle_partition, LengthFunction};
use punctual::foundations::ProviderName;
use punctual::island::{
    LFamily, LevitzFamily, LinearEngine, Listing, MetaEngine, PolyFamily, PrimeSet, Symbol,
};
use punctual::levitz::{anf, compare, parse_term, witness_d, DigitCap};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "punctual",
    version,
    about = "Punctual copies of the successor structure"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Gap sequence behind copy-gap: tower or ackermann-diagonal.
    #[arg(long, global = true, default_value = "tower")]
    provider: ProviderName,
    /// Iteration budget for brute-force searches.
    #[arg(long, global = true, default_value_t = 1 << 16, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    /// Decimal digits allowed in any materialized value.
    #[arg(long, global = true, default_value_t = DigitCap::default().0, value_parser = clap::value_parser!(u64).range(1..))]
    digit_cap: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Successor in the copy-gap structure.
    SuccA { x: BigUint },
    /// Block and offset of an element of the copy-gap structure.
    PosA { x: BigUint },
    /// The first elements c(0), c(1), ... of the copy-gap structure.
    ChainA { count: u64 },
    /// The first elements of the doubled copy.
    ChainD {
        count: u64,
        #[arg(long, value_enum, default_value_t = Base::Identity)]
        base: Base,
    },
    /// An operation in the binary lift of a base copy.
    Lift {
        #[arg(value_enum)]
        op: LiftOp,
        x: BigUint,
        y: Option<BigUint>,
        #[arg(long, value_enum, default_value_t = LiftBase::Identity)]
        base: LiftBase,
    },
    /// Terms built from 0, 1, x by +, *, n^f and x^f.
    #[command(subcommand)]
    Levitz(LevitzCommand),
    /// The linear island construction.
    #[command(subcommand)]
    Island(RunCommand<IslandRun>),
    /// The family construction.
    #[command(subcommand)]
    Meta(RunCommand<MetaRun>),
    /// Cycle structure for a length function.
    Cycles {
        /// `odd`, `even`, or bits such as `0110` with tail `:odd`/`:even`.
        #[arg(long)]
        lengths: String,
        #[arg(long, default_value_t = 200)]
        bound: u64,
        /// Also print s_K and c_K for every x below the bound.
        #[arg(long)]
        table: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Base {
    Identity,
    Gap,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LiftBase {
    Identity,
    Gap,
    /// The lift of the identity lift.
    Double,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LiftOp {
    Succ,
    Plus,
    Times,
    Pow2,
}

#[derive(Debug, Subcommand)]
enum LevitzCommand {
    /// Eventual-domination verdict with a strict witness.
    Cmp { f: String, g: String },
    /// A strict domination witness for f below g.
    Witness { f: String, g: String },
    /// Additive normal form.
    Anf { f: String },
    /// Gödel code.
    Encode { f: String },
}

#[derive(Debug, Subcommand)]
enum RunCommand<T: Args> {
    Run(T),
}

#[derive(Debug, Args)]
struct IslandRun {
    #[arg(long, default_value = "2,3")]
    primes: String,
    /// Opponent file, one `a=.. b=.. value=.. converge=..` per line.
    #[arg(long)]
    opponents: PathBuf,
    #[arg(long)]
    stages: u64,
    /// Write the event transcript here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Compare declared images with the oracle on this many mainland elements.
    #[arg(long, default_value_t = 0)]
    check_images: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyName {
    Poly,
    Levitz,
}

#[derive(Debug, Args)]
struct MetaRun {
    #[arg(long, value_enum)]
    family: FamilyName,
    /// Opponent file, one `value=.. converge=..` per line.
    #[arg(long)]
    opponents: Option<PathBuf>,
    #[arg(long)]
    stages: u64,
    /// Explicit first listed terms, separated by `;`.
    #[arg(long)]
    prefix: Option<String>,
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Compare t_0..t_k images with the oracle on this many mainland elements.
    #[arg(long, default_value_t = 0)]
    check_images: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(lines) => {
            let mut stdout = std::io::stdout().lock();
            for line in lines {
                // a closed pipe ends the report early
                if writeln!(stdout, "{line}").is_err() {
                    break;
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error={} message={e}", e.code());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<Vec<String>, CliError> {
    let g = cli.global;
    let cap = DigitCap(g.digit_cap);
    let gap = || GapCopy::new(g.provider.build());
    match cli.command {
        Command::SuccA { x } => Ok(vec![format!("result={}", gap().successor_a(&x))]),
        Command::PosA { x } => {
            let tag = gap().pos_a(&x);
            Ok(vec![format!("block={} offset={}", tag.block, tag.offset)])
        }
        Command::ChainA { count } => Ok(vec![chain(&gap(), count, g.budget)?]),
        Command::ChainD { count, base } => Ok(vec![match base {
            Base::Identity => chain(&DoubleCopy::new(Identity, g.budget), count, g.budget)?,
            Base::Gap => chain(&DoubleCopy::new(gap(), g.budget), count, g.budget)?,
        }]),
        Command::Lift { op, x, y, base } => {
            let result = match base {
                LiftBase::Identity => lift(&Lift::new(Identity, g.budget), op, &x, y.as_ref())?,
                LiftBase::Gap => lift(
                    &Lift::new(OracleArithmetic::new(gap(), g.budget), g.budget),
                    op,
                    &x,
                    y.as_ref(),
                )?,
                LiftBase::Double => lift(
                    &Lift::new(Lift::new(Identity, g.budget), g.budget),
                    op,
                    &x,
                    y.as_ref(),
                )?,
            };
            Ok(vec![format!("result={result}")])
        }
        Command::Levitz(cmd) => levitz(cmd, cap),
        Command::Island(RunCommand::Run(args)) => island(args),
        Command::Meta(RunCommand::Run(args)) => match args.family {
            FamilyName::Poly => meta(PolyFamily, &args, |s| s.parse().map_err(CliError::Usage)),
            FamilyName::Levitz => meta(LevitzFamily::new(cap), &args, |s| Ok(parse_term(s)?)),
        },
        Command::Cycles {
            lengths,
            bound,
            table,
        } => cycles(&lengths, bound, table),
    }
}

fn chain(copy: &impl PunctualCopy, count: u64, budget: u64) -> Result<String, CliError> {
    let elements = (0..count)
        .map(|p| element_at(copy, &BigUint::from(p), budget).map(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(format!("copy={} chain={}", copy.name(), elements.join(",")))
}

fn lift<B: PunctualCopy>(
    lift: &Lift<B>,
    op: LiftOp,
    x: &BigUint,
    y: Option<&BigUint>,
) -> Result<BigUint, CliError> {
    let second = || y.ok_or_else(|| CliError::Usage("this operation takes two arguments".into()));
    let unary = |r| match y {
        Some(_) => Err(CliError::Usage("this operation takes one argument".into())),
        None => r,
    };
    Ok(match op {
        LiftOp::Succ => unary(Ok(lift.lift_succ(x)?))?,
        LiftOp::Plus => lift.lift_plus(x, second()?)?,
        LiftOp::Times => lift.lift_times(x, second()?)?,
        LiftOp::Pow2 => unary(Ok(lift.lift_pow2(x)?))?,
    })
}

fn levitz(cmd: LevitzCommand, cap: DigitCap) -> Result<Vec<String>, CliError> {
    match cmd {
        LevitzCommand::Cmp { f, g } => {
            let (f, g) = (parse_term(&f)?, parse_term(&g)?);
            let verdict = compare(&f, &g)?;
            let witness = match verdict {
                Ordering::Less => Some(witness_d(&f, &g)?),
                Ordering::Greater => Some(witness_d(&g, &f)?),
                Ordering::Equal => None,
            };
            Ok(vec![match witness {
                Some(w) => format!("verdict={verdict:?} witness={w}"),
                None => format!("verdict={verdict:?}"),
            }])
        }
        LevitzCommand::Witness { f, g } => {
            let (f, g) = (parse_term(&f)?, parse_term(&g)?);
            if compare(&f, &g)? != Ordering::Less {
                return Err(CliError::Usage(format!(
                    "`{f}` is not eventually below `{g}`"
                )));
            }
            Ok(vec![format!("witness={}", witness_d(&f, &g)?)])
        }
        LevitzCommand::Anf { f } => Ok(vec![format!("anf={}", anf(&parse_term(&f)?)?)]),
        LevitzCommand::Encode { f } => Ok(vec![format!("code={}", parse_term(&f)?.encode(cap)?)]),
    }
}

fn write_trace(path: &Option<PathBuf>, transcript: &[String]) -> Result<(), CliError> {
    if let Some(path) = path {
        let mut text = transcript.join("\n");
        text.push('\n');
        fs::write(path, text)?;
    }
    Ok(())
}

fn island(args: IslandRun) -> Result<Vec<String>, CliError> {
    let primes: PrimeSet = args.primes.parse().map_err(CliError::Usage)?;
    let lines = opponents::parse(&fs::read_to_string(&args.opponents)?)?;
    let requirements = opponents::linear_requirements(lines)?;
    let total = requirements.len();
    let mut engine = LinearEngine::new(primes, requirements)?;
    engine.run(args.stages)?;
    write_trace(&args.trace, engine.transcript())?;
    engine.verify_records()?;
    let mut out = vec![format!(
        "stages={} size={} mainland={} islands={} satisfied={}/{total}",
        engine.stage(),
        engine.size(),
        engine.mainland().len(),
        engine.island_count(),
        engine.records().len()
    )];
    for r in engine.records() {
        out.push(format!(
            "requirement={} a={} b={} witness={} stage={} case={} q={} lhs={} target={} target_position={}",
            r.requirement,
            r.a,
            r.b,
            r.witness,
            r.stage,
            r.case.number(),
            r.q,
            r.lhs(),
            r.target,
            r.target_position
        ));
    }
    if args.check_images > 0 {
        let report = engine.check_images(args.check_images);
        out.push(format!(
            "images_checked={} undeclared={} mismatches={}",
            report.checked,
            report.undeclared,
            report.mismatches.len()
        ));
        if !report.passed() {
            return Err(CliError::Mismatch(report.mismatches.join("; ")));
        }
    }
    Ok(out)
}

fn meta<F: LFamily>(
    family: F,
    args: &MetaRun,
    parse: impl Fn(&str) -> Result<F::Term, CliError>,
) -> Result<Vec<String>, CliError> {
    let prefix = match &args.prefix {
        Some(text) => text
            .split(';')
            .map(|t| parse(t.trim()))
            .collect::<Result<Vec<_>, _>>()?,
        None => Vec::new(),
    };
    let opponents = match &args.opponents {
        Some(path) => opponents::parse(&fs::read_to_string(path)?)?
            .into_iter()
            .map(|l| l.opponent)
            .collect(),
        None => Vec::new(),
    };
    let total = opponents.len();
    let mut engine = MetaEngine::new(family, Listing::with_prefix(prefix), opponents);
    let outcome = engine.run(args.stages);
    write_trace(&args.trace, engine.transcript())?;
    outcome?;
    engine.verify_records()?;
    let declarations = engine.verify_declarations()?;
    let mut out = vec![format!(
        "family={} stages={} size={} mainland={} archipelago={} theta={} declarations={declarations} satisfied={}/{total}",
        engine.family().name(),
        engine.stage(),
        engine.size(),
        engine.mainland().len(),
        engine.archipelago_size(),
        engine.theta(),
        engine.records().len()
    )];
    for r in engine.records() {
        out.push(format!(
            "requirement={} witness={} stage={} guess={} successor_of_guess={} big_theta={} d_prime={} new_theta={}",
            r.requirement, r.witness, r.stage, r.guess, r.successor_of_guess, r.big_theta, r.d_prime, r.new_theta
        ));
    }
    if args.check_images > 0 {
        let symbols: Vec<Symbol> = (0..=engine.records().len()).map(Symbol::Listed).collect();
        let report = engine.check_images(&symbols, args.check_images)?;
        out.push(format!(
            "images_checked={} undeclared={} mismatches={}",
            report.checked,
            report.undeclared,
            report.mismatches.len()
        ));
        if !report.passed() {
            return Err(CliError::Mismatch(report.mismatches.join("; ")));
        }
    }
    Ok(out)
}

fn cycles(lengths: &str, bound: u64, table: bool) -> Result<Vec<String>, CliError> {
    let f: LengthFunction = lengths.parse()?;
    let report = verify_cycle_partition(&f, bound);
    let mut out = vec![format!(
        "lengths={f} bound={bound} checked={} cycles={} passed={}",
        report.checked,
        report.cycles,
        report.passed()
    )];
    if table {
        out.extend((0..bound).map(|x| format!("x={x} s_k={} c_k={}", s_k(&f, x), c_k(&f, x))));
    }
    if !report.passed() {
        return Err(CliError::Mismatch(report.failures.join("; ")));
    }
    Ok(out)
}
