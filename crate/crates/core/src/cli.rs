//! The `edchase` command line.
//!
//! Exit codes: 0 success or implied, 1 not implied or rejected, 2 step
//! budget exhausted, 64 usage, 65 unreadable or invalid input, 70 a
//! generated proof failed its own check.

use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::chase::{run_chase, ChaseOutcome, Verdict, DEFAULT_BUDGET};
use crate::model::{violation, Dependency, Relation, Valuation, Violation};
use crate::proof::{check_deduction, generate_deduction, generate_typed_deduction};
use crate::symbol::FreshSource;
use crate::textio::{
    parse_deduction, write_deduction, write_relation, write_trace, Decl, GoalRef, Item, SourceFile,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_EXHAUSTED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_SOFTWARE: i32 = 70;

#[derive(Parser, Debug)]
#[command(name = "edchase", version, about = "Chase, prove and check embedded dependencies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Problem {
    /// Premises.
    #[arg(short = 's', long = "sigma", value_name = "DEPS")]
    sigma: PathBuf,
    /// File holding the goal (a `goal:` line or a single dependency).
    #[arg(short = 'g', long = "goal", value_name = "GOAL")]
    goal: PathBuf,
    /// Step budget; defaults to $EDCHASE_MAX_STEPS, then 10000.
    #[arg(long = "max-steps", value_name = "N")]
    max_steps: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide implication by the chase and optionally emit a deduction.
    Prove {
        #[command(flatten)]
        problem: Problem,
        /// Generate a deduction with the typed rules.
        #[arg(long)]
        typed: bool,
        #[arg(long = "emit-proof", value_name = "P")]
        emit_proof: Option<PathBuf>,
        #[arg(long = "emit-trace", value_name = "T")]
        emit_trace: Option<PathBuf>,
    },
    /// Print the chase trace.
    Chase {
        #[command(flatten)]
        problem: Problem,
    },
    /// Print a relation satisfying the premises and violating the goal.
    Countermodel {
        #[command(flatten)]
        problem: Problem,
    },
    /// Check a deduction document against premises and goal.
    Verify {
        #[arg(short = 's', long = "sigma", value_name = "DEPS")]
        sigma: PathBuf,
        #[arg(short = 'p', long = "proof", value_name = "PROOF")]
        proof: PathBuf,
        #[arg(short = 'g', long = "goal", value_name = "GOAL")]
        goal: PathBuf,
    },
    /// Model-check every dependency of a file on a relation.
    CheckModel {
        #[arg(short = 'r', long = "relation", value_name = "REL")]
        relation: PathBuf,
        #[arg(short = 'd', long = "deps", value_name = "DEPS")]
        deps: PathBuf,
        /// Relation to use when the file declares several.
        #[arg(long)]
        name: Option<String>,
    },
    /// Rewrite ed sentences as egds and tgds.
    Normalize { file: PathBuf },
}

/// A failure already reported, carrying its exit code.
struct Fail(i32);

fn data_error(path: &Path, e: impl Display) -> Fail {
    eprintln!("{}:{e}", path.display());
    Fail(EXIT_DATA)
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        Fail(EXIT_DATA)
    })
}

fn write(path: &Path, text: &str) -> Result<(), Fail> {
    fs::write(path, text).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        Fail(EXIT_SOFTWARE)
    })
}

fn load(path: &Path, fresh: &mut FreshSource) -> Result<SourceFile, Fail> {
    let text = read(path)?;
    SourceFile::parse_with(&text, fresh).map_err(|e| data_error(path, e))
}

fn load_sigma(path: &Path, fresh: &mut FreshSource) -> Result<Vec<Dependency>, Fail> {
    let file = load(path, fresh)?;
    file.dependencies().map_err(|e| data_error(path, format!("1:1: {e}")))
}

fn load_goal(path: &Path, fresh: &mut FreshSource) -> Result<Dependency, Fail> {
    let file = load(path, fresh)?;
    let formula = match file.goal().map_err(|e| data_error(path, format!("1:1: {e}")))? {
        Some(f) => f,
        None => {
            let deps = file.dependencies().map_err(|e| data_error(path, format!("1:1: {e}")))?;
            match <[Dependency; 1]>::try_from(deps) {
                Ok([d]) => crate::model::Formula::single(d),
                Err(_) => return Err(data_error(path, "1:1: expected a goal or exactly one dependency")),
            }
        }
    };
    match <[Dependency; 1]>::try_from(formula.into_conjuncts()) {
        Ok([d]) => Ok(d),
        Err(_) => Err(data_error(path, "1:1: goal normalizes to several dependencies; prove them one at a time")),
    }
}

fn budget(flag: Option<usize>) -> Result<usize, Fail> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var("EDCHASE_MAX_STEPS") {
        Ok(v) => v.trim().parse().map_err(|_| {
            eprintln!("EDCHASE_MAX_STEPS: not a step count: {v}");
            Fail(EXIT_USAGE)
        }),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn chase(problem: &Problem) -> Result<ChaseOutcome, Fail> {
    let mut fresh = FreshSource::new();
    let sigma = load_sigma(&problem.sigma, &mut fresh)?;
    let goal = load_goal(&problem.goal, &mut fresh)?;
    let budget = budget(problem.max_steps)?;
    run_chase(&sigma, &goal, budget).map_err(|e| data_error(&problem.goal, format!("1:1: {e}")))
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Implied => EXIT_OK,
        Verdict::NotImplied => EXIT_NO,
        Verdict::Exhausted => EXIT_EXHAUSTED,
    }
}

fn report(outcome: &ChaseOutcome) -> Result<(), Fail> {
    println!("{} after {} steps", outcome.verdict, outcome.steps.len());
    if outcome.verdict == Verdict::NotImplied {
        let cm = outcome.countermodel().map_err(|e| {
            eprintln!("countermodel: {e}");
            Fail(EXIT_SOFTWARE)
        })?;
        print!("{}", write_relation("countermodel", &cm));
    }
    Ok(())
}

fn prove(
    problem: &Problem,
    typed: bool,
    emit_proof: Option<&Path>,
    emit_trace: Option<&Path>,
) -> Result<i32, Fail> {
    let mut fresh = FreshSource::new();
    let sigma = load_sigma(&problem.sigma, &mut fresh)?;
    let goal = load_goal(&problem.goal, &mut fresh)?;
    if typed {
        if let Some(i) = sigma.iter().position(|d| !d.is_typed()) {
            return Err(data_error(&problem.sigma, format!("1:1: premise {i} is not typed")));
        }
        if !goal.is_typed() {
            return Err(data_error(&problem.goal, "1:1: goal is not typed"));
        }
    }
    let budget = budget(problem.max_steps)?;
    let outcome = run_chase(&sigma, &goal, budget).map_err(|e| data_error(&problem.goal, format!("1:1: {e}")))?;
    if let Some(t) = emit_trace {
        write(t, &write_trace(&outcome))?;
    }
    report(&outcome)?;
    if let (Verdict::Implied, Some(p)) = (outcome.verdict, emit_proof) {
        let generated = if typed {
            generate_typed_deduction(&outcome)
        } else {
            generate_deduction(&outcome)
        };
        let ded = generated.map_err(|e| {
            eprintln!("proof generation: {e}");
            Fail(EXIT_SOFTWARE)
        })?;
        let text = write_deduction(&ded);
        let reparsed = parse_deduction(&text).map_err(|e| {
            eprintln!("proof document does not parse back: {e}");
            Fail(EXIT_SOFTWARE)
        })?;
        check_deduction(&reparsed, &goal).map_err(|e| {
            eprintln!("generated proof rejected: {e}");
            Fail(EXIT_SOFTWARE)
        })?;
        write(p, &text)?;
    }
    Ok(verdict_code(outcome.verdict))
}

fn verify(sigma: &Path, proof: &Path, goal: &Path) -> Result<i32, Fail> {
    let mut fresh = FreshSource::new();
    let sigma_deps = load_sigma(sigma, &mut fresh)?;
    let goal = load_goal(goal, &mut fresh)?;
    let ded = parse_deduction(&read(proof)?).map_err(|e| data_error(proof, e))?;
    if let Some(i) = ded.premises.iter().position(|p| !sigma_deps.iter().any(|s| s == p || s.same_as(p))) {
        println!("rejected: premise {i} is not among the dependencies of {}", sigma.display());
        return Ok(EXIT_NO);
    }
    match check_deduction(&ded, &goal) {
        Ok(()) => {
            println!("accepted: {} lines", ded.lines.len());
            Ok(EXIT_OK)
        }
        Err(e) => {
            println!("rejected: {e}");
            Ok(EXIT_NO)
        }
    }
}

fn show_violation(d: &Dependency, v: &Violation) -> String {
    match v {
        Violation::Valuation(f) => {
            let hidden = d.distinct_values();
            let shown: Valuation = f.iter().filter(|(x, _)| !hidden.contains(x)).collect();
            format!("valuation {shown}")
        }
        Violation::Row(t) | Violation::JoinTuple(t) => {
            let parts: Vec<String> = t.iter().map(|s| s.to_string()).collect();
            format!("tuple ({})", parts.join(","))
        }
    }
}

fn check_model(rel_path: &Path, deps_path: &Path, name: Option<&str>) -> Result<i32, Fail> {
    let mut fresh = FreshSource::new();
    let rels = load(rel_path, &mut fresh)?;
    let relations = rels.relations();
    let r: &Relation = match name {
        Some(n) => relations
            .iter()
            .find(|(m, _)| *m == n)
            .map(|(_, r)| *r)
            .ok_or_else(|| data_error(rel_path, format!("1:1: no relation named {n}")))?,
        None => match relations.as_slice() {
            [(_, r)] => r,
            [] => return Err(data_error(rel_path, "1:1: no relation declared")),
            _ => return Err(data_error(rel_path, "1:1: several relations; pick one with --name")),
        },
    };
    let deps = load(deps_path, &mut fresh)?;
    let mut all = true;
    let mut count = 0;
    for decl in &deps.decls {
        let Decl { name, item, pos } = decl;
        let conjuncts = match item {
            Item::Dependency(d) | Item::Goal(GoalRef::Inline(d)) => vec![d.clone()],
            Item::Ed(e) => crate::model::normalize_ed(e).map_err(|e| data_error(deps_path, format!("{pos}: {e}")))?,
            _ => continue,
        };
        let label = name.clone().unwrap_or_else(|| format!("#{count}"));
        count += 1;
        let mut failure = None;
        for d in &conjuncts {
            let v = violation(r, d).map_err(|e| data_error(deps_path, format!("{pos}: {e}")))?;
            if let Some(v) = v {
                failure = Some(show_violation(d, &v));
                break;
            }
        }
        match failure {
            None => println!("{label}: satisfied"),
            Some(w) => {
                all = false;
                println!("{label}: violated by {w}");
            }
        }
    }
    Ok(if all { EXIT_OK } else { EXIT_NO })
}

fn normalize(path: &Path) -> Result<i32, Fail> {
    let file = load(path, &mut FreshSource::new())?;
    let mut out = SourceFile::default();
    for d in file.decls {
        match &d.item {
            Item::Ed(e) => {
                let parts = crate::model::normalize_ed(e).map_err(|e| data_error(path, format!("{}: {e}", d.pos)))?;
                let many = parts.len() > 1;
                for (i, dep) in parts.into_iter().enumerate() {
                    let name = d.name.as_ref().map(|n| if many { format!("{n}_{i}") } else { n.clone() });
                    out.decls.push(Decl {
                        name,
                        item: Item::Dependency(dep),
                        pos: d.pos,
                    });
                }
            }
            _ => out.decls.push(d),
        }
    }
    print!("{out}");
    Ok(EXIT_OK)
}

fn dispatch(cli: Cli) -> Result<i32, Fail> {
    match cli.command {
        Command::Prove {
            problem,
            typed,
            emit_proof,
            emit_trace,
        } => prove(&problem, typed, emit_proof.as_deref(), emit_trace.as_deref()),
        Command::Chase { problem } => {
            let outcome = chase(&problem)?;
            print!("{}", write_trace(&outcome));
            Ok(verdict_code(outcome.verdict))
        }
        Command::Countermodel { problem } => {
            let outcome = chase(&problem)?;
            report(&outcome)?;
            Ok(verdict_code(outcome.verdict))
        }
        Command::Verify { sigma, proof, goal } => verify(&sigma, &proof, &goal),
        Command::CheckModel { relation, deps, name } => check_model(&relation, &deps, name.as_deref()),
        Command::Normalize { file } => normalize(&file),
    }
}

/// Runs one invocation and returns its exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(Fail(code)) => code,
    }
}
