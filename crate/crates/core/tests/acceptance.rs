//! One PASS/FAIL line per acceptance criterion; exits non-zero on any FAIL.

mod common;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use common::{equal_up_to_fresh, holds, holds_all, random_instance, small_relations, Instance, Map};
use edchase::chase::{run_chase, ChaseOutcome, ChaseStep, Verdict};
use edchase::model::{violation, Dependency, Ejd, Formula, Ind, Relation, Tgd, Violation};
use edchase::proof::{
    check_deduction, check_rule, generate_deduction, generate_typed_deduction, replay_deduction, Deduction,
    GenerateError, Line, LineContext, Payload, Rule,
};
use edchase::symbol::{syms, FreshSource, Symbol};
use edchase::textio::{parse_deduction, write_deduction, write_trace, SourceFile};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_2024;
const BATCH: usize = 150;
const BUDGET: usize = 200;

type Outcome = Result<String, String>;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn read_fixture(name: &str) -> SourceFile {
    SourceFile::parse(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

fn edchase(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_edchase")).args(args).output().unwrap();
    let mut text = String::from_utf8_lossy(&out.stdout).into_owned();
    text.push_str(&String::from_utf8_lossy(&out.stderr));
    (out.status.code().unwrap_or(-1), text)
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn emvd_problem() -> (Vec<Dependency>, Dependency) {
    let mut fresh = FreshSource::new();
    let text = |n| std::fs::read_to_string(fixture(n)).unwrap();
    let sigma = SourceFile::parse_with(&text("emvd_sigma.edc"), &mut fresh).unwrap().dependencies().unwrap();
    let goal = SourceFile::parse_with(&text("emvd_goal.edc"), &mut fresh)
        .unwrap()
        .goal()
        .unwrap()
        .unwrap()
        .into_conjuncts()
        .remove(0);
    (sigma, goal)
}

fn example_one() -> Outcome {
    let rel = read_fixture("ex1_relation.edc");
    let deps = read_fixture("ex1_deps.edc").dependencies().unwrap();
    let r = rel.relations()[0].1;
    ensure(r.len() == 4, "relation should have 4 rows")?;
    let sat: Vec<bool> = deps.iter().map(|d| violation(r, d).unwrap().is_none()).collect();
    ensure(sat == [true, false], format!("satisfaction {sat:?}"))?;
    ensure(
        deps.iter().map(|d| holds(r, d)).collect::<Vec<_>>() == [true, false],
        "brute-force oracle disagrees",
    )?;
    let Some(Violation::Valuation(g)) = violation(r, &deps[1]).unwrap() else {
        return Err("no valuation witness".into());
    };
    let hidden = deps[1].distinct_values();
    let shown: Map = g.iter().filter(|(x, _)| !hidden.contains(x)).collect();
    let expected: Map = syms("x y z").into_iter().zip(syms("3 0 1")).collect();
    ensure(shown == expected, format!("witness {shown:?}"))?;
    let (code, out) = edchase(&[
        "check-model",
        "-r",
        fixture("ex1_relation.edc").to_str().unwrap(),
        "-d",
        fixture("ex1_deps.edc").to_str().unwrap(),
    ]);
    ensure(code == 1, format!("check-model exit {code}"))?;
    ensure(out.contains("sigma1: satisfied"), out.clone())?;
    ensure(out.contains("sigma2: violated by valuation {x->3,y->0,z->1}"), out)?;
    Ok("sigma1 holds, sigma2 fails with g = {x->3,y->0,z->1}".into())
}

/// Collapses runs: CS, CR-tgd+, CR-egd, CR-egd, EE+, CT-tgd.
fn segments(ded: &Deduction) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for l in &ded.lines {
        let tag = l.rule.tag().to_string();
        let collapsible = matches!(l.rule, Rule::CrTgd | Rule::Ee);
        if collapsible && out.last().is_some_and(|t| t.trim_end_matches('+') == tag) {
            let last = out.last_mut().unwrap();
            if !last.ends_with('+') {
                last.push('+');
            }
        } else {
            out.push(tag);
        }
    }
    out
}

fn worked_example() -> Outcome {
    let (sigma, goal) = emvd_problem();
    let out = run_chase(&sigma, &goal, BUDGET).map_err(|e| e.to_string())?;
    ensure(out.verdict == Verdict::Implied, format!("verdict {}", out.verdict))?;
    let kinds: Vec<&str> = out
        .steps
        .iter()
        .map(|s| match s {
            ChaseStep::Tgd { .. } => "tgd",
            ChaseStep::Egd { .. } => "egd",
        })
        .collect();
    ensure(kinds == ["tgd", "egd", "egd"], format!("steps {kinds:?}"))?;
    let chase_fixture = read_fixture("emvd_chase.edc");
    let tau2 = chase_fixture.relations().into_iter().find(|(n, _)| *n == "tau2").unwrap().1;
    ensure(equal_up_to_fresh(out.last.body(), tau2), format!("final tableau {}", out.last.body()))?;
    let tau1 = chase_fixture.relations().into_iter().find(|(n, _)| *n == "tau1").unwrap().1;
    ensure(equal_up_to_fresh(&out.states()[1].body().clone(), &rename_named(tau1, &["d2", "d3"])), "tau1 differs")?;
    let ded = generate_deduction(&out).map_err(|e| e.to_string())?;
    let seg = segments(&ded);
    ensure(seg == ["CS", "CR-tgd+", "CR-egd", "CR-egd", "EE", "CT-tgd"] || seg == ["CS", "CR-tgd+", "CR-egd", "CR-egd", "EE+", "CT-tgd"], format!("segments {seg:?}"))?;
    check_deduction(&ded, &goal).map_err(|e| e.to_string())?;

    let dir = tempfile::tempdir().unwrap();
    let proof = dir.path().join("p.edp");
    let s = fixture("emvd_sigma.edc");
    let g = fixture("emvd_goal.edc");
    let (code, text) = edchase(&["prove", "-s", s.to_str().unwrap(), "-g", g.to_str().unwrap(), "--emit-proof", proof.to_str().unwrap()]);
    ensure(code == 0, format!("prove exit {code}: {text}"))?;
    let (code, text) = edchase(&["verify", "-s", s.to_str().unwrap(), "-p", proof.to_str().unwrap(), "-g", g.to_str().unwrap()]);
    ensure(code == 0, format!("verify exit {code}: {text}"))?;
    Ok(format!("steps {kinds:?}, segments {}", seg.join("; ")))
}

/// Turns the named chase-minted values of a figure into fresh symbols.
fn rename_named(r: &Relation, names: &[&str]) -> Relation {
    let map: Map = names
        .iter()
        .enumerate()
        .map(|(i, n)| (Symbol::named(n), Symbol::fresh(1000 + i as u32)))
        .collect();
    Relation::new(r.schema(), r.rows().map(|row| row.iter().map(|s| *map.get(s).unwrap_or(s)).collect::<Vec<_>>())).unwrap()
}

fn typed_variant() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let proof = dir.path().join("typed.edp");
    let s = fixture("emvd_sigma.edc");
    let g = fixture("emvd_goal.edc");
    let (code, text) = edchase(&[
        "prove", "--typed", "-s", s.to_str().unwrap(), "-g", g.to_str().unwrap(), "--emit-proof", proof.to_str().unwrap(),
    ]);
    ensure(code == 0, format!("typed prove exit {code}: {text}"))?;
    let ded = parse_deduction(&std::fs::read_to_string(&proof).unwrap()).map_err(|e| e.to_string())?;
    ensure(ded.count(Rule::CsStar) == 1 && ded.count(Rule::Cs) == 0, "expected one CSstar start")?;
    ensure(ded.lines.last().map(|l| l.rule) == Some(Rule::CtStarTgd), "expected CTstar end")?;
    let (_, goal) = emvd_problem();
    check_deduction(&ded, &goal).map_err(|e| e.to_string())?;

    // no extension of r = {(0,1)} to x, y satisfies both t(AB) <= AB
    let r_attrs = syms("A B x y");
    let candidates: Vec<Symbol> = syms("0 1 @0");
    let mut rows = Vec::new();
    for vx in &candidates {
        for vy in &candidates {
            rows.push(vec![Symbol::named("0"), Symbol::named("1"), *vx, *vy]);
        }
    }
    let conds: Vec<Dependency> = vec![
        Ind::new(syms("x y"), syms("A B")).unwrap().into(),
        Ind::new(syms("y x"), syms("A B")).unwrap().into(),
    ];
    let mut satisfying = 0;
    for mask in 1u32..(1 << rows.len()) {
        let pick: Vec<Vec<Symbol>> = (0..rows.len()).filter(|i| mask & (1 << i) != 0).map(|i| rows[i].clone()).collect();
        let ext = Relation::new(&r_attrs, pick).unwrap();
        if holds_all(&ext, &conds) {
            satisfying += 1;
        }
    }
    ensure(satisfying == 0, format!("{satisfying} extensions satisfy the untyped start"))?;

    let swap: Dependency = Tgd::new(
        Relation::new(&syms("A B"), [syms("x y"), syms("y x")]).unwrap(),
        Relation::new(&syms("A B"), [syms("y x")]).unwrap(),
    )
    .unwrap()
    .into();
    let out = run_chase(&[], &swap, BUDGET).map_err(|e| e.to_string())?;
    ensure(
        matches!(generate_typed_deduction(&out), Err(GenerateError::Untyped)),
        "typed generator accepted an untyped goal",
    )?;
    let start = Line {
        rule: Rule::CsStar,
        refs: vec![],
        new_attrs: syms("x y"),
        payload: Payload::None,
        formula: Formula::new(vec![
            Ind::new(syms("A B"), syms("x y")).unwrap().into(),
            Ind::new(syms("A B"), syms("y x")).unwrap().into(),
            Ejd::new(vec![syms("x y"), syms("y x")]).unwrap().into(),
            Ind::new(syms("x y"), syms("A B")).unwrap().into(),
            Ind::new(syms("y x"), syms("A B")).unwrap().into(),
        ])
        .unwrap(),
    };
    let ctx = LineContext { premises: &[], lines: &[] };
    ensure(check_rule(&start, &ctx).is_err(), "checker accepted an untyped CSstar line")?;
    let (code, _) = edchase(&["prove", "--typed", "-s", fixture("untyped.edc").to_str().unwrap(), "-g", fixture("untyped.edc").to_str().unwrap()]);
    ensure(code == 65, format!("typed prove on untyped input exit {code}"))?;
    Ok(format!("{}-line typed deduction accepted; 0 of 511 extensions satisfy the untyped start", ded.lines.len()))
}

struct Batch {
    instances: Vec<Instance>,
    outcomes: Vec<ChaseOutcome>,
}

fn batch() -> Result<Batch, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let instances: Vec<Instance> = (0..BATCH).map(|_| random_instance(&mut rng)).collect();
    let mut outcomes = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        outcomes.push(run_chase(&inst.sigma, &inst.goal, BUDGET).map_err(|e| format!("instance {i}: {e}"))?);
    }
    Ok(Batch { instances, outcomes })
}

fn tally(b: &Batch) -> String {
    let count = |v| b.outcomes.iter().filter(|o| o.verdict == v).count();
    format!(
        "{} instances: {} implied, {} not implied, {} exhausted",
        b.instances.len(),
        count(Verdict::Implied),
        count(Verdict::NotImplied),
        count(Verdict::Exhausted)
    )
}

fn countermodels(b: &Batch) -> Outcome {
    let mut checked = 0;
    for (i, (inst, out)) in b.instances.iter().zip(&b.outcomes).enumerate() {
        if out.verdict != Verdict::NotImplied {
            continue;
        }
        let cm = out.countermodel().map_err(|e| format!("instance {i}: {e}"))?;
        ensure(holds_all(&cm, &inst.sigma), format!("instance {i}: countermodel violates a premise"))?;
        ensure(!holds(&cm, &inst.goal), format!("instance {i}: countermodel satisfies the goal"))?;
        checked += 1;
    }
    ensure(checked > 0, "batch has no not-implied instance")?;
    Ok(format!("{checked} countermodels verified; {}", tally(b)))
}

fn relations_for(schema: &[Symbol], domain: usize) -> Vec<Relation> {
    small_relations(schema, domain, 3)
}

fn soundness(b: &Batch) -> Outcome {
    let mut pools = std::collections::BTreeMap::new();
    let (mut implied, mut relations) = (0, 0);
    for (i, (inst, out)) in b.instances.iter().zip(&b.outcomes).enumerate() {
        if out.verdict != Verdict::Implied {
            continue;
        }
        implied += 1;
        let pool = pools.entry(inst.schema.len()).or_insert_with(|| relations_for(&inst.schema, 4));
        for r in pool.iter() {
            relations += 1;
            if holds_all(r, &inst.sigma) && !holds(r, &inst.goal) {
                return Err(format!("instance {i}: {r} satisfies the premises but not the goal"));
            }
        }
    }
    ensure(implied > 0, "batch has no implied instance")?;
    Ok(format!("{implied} implied instances, {relations} relation checks, 0 counterexamples"))
}

/// Renames `from` to `to` in the records of lines `start..` of a proof
/// document, leaving premises and the conclusion alone.
fn rename_from_line(text: &str, start: usize, from: Symbol, to: Symbol) -> String {
    let (from, to) = (from.to_string(), to.to_string());
    let mut out = String::new();
    for line in text.lines() {
        let idx = line
            .strip_prefix("line index=")
            .and_then(|r| r.split(' ').next())
            .and_then(|n| n.parse::<usize>().ok());
        if idx.is_some_and(|i| i >= start) {
            out.push_str(&replace_token(line, &from, &to));
        } else {
            out.push_str(line);
        }
        out.push('\n');
    }
    out
}

fn replace_token(line: &str, from: &str, to: &str) -> String {
    let is_word = |c: char| c.is_alphanumeric() || c == '_' || c == '@';
    let mut out = String::new();
    let mut word = String::new();
    for c in line.chars() {
        if is_word(c) {
            word.push(c);
        } else {
            out.push_str(if word == from { to } else { &word });
            word.clear();
            out.push(c);
        }
    }
    out.push_str(if word == from { to } else { &word });
    out
}

enum Rejection {
    Checker,
    Parser,
}

fn rejected(text: &str, goal: &Dependency) -> Option<Rejection> {
    match parse_deduction(text) {
        Err(_) => Some(Rejection::Parser),
        Ok(d) => check_deduction(&d, goal).err().map(|_| Rejection::Checker),
    }
}

fn proof_round_trip(b: &Batch) -> Outcome {
    let (mut proofs, mut deletions, mut collisions, mut by_parser, mut ind_deletions) = (0, 0, 0, 0, 0);
    let mut new_lines = std::collections::BTreeMap::<&str, usize>::new();
    for (i, (inst, out)) in b.instances.iter().zip(&b.outcomes).enumerate() {
        if out.verdict != Verdict::Implied {
            continue;
        }
        let ded = generate_deduction(out).map_err(|e| format!("instance {i}: {e}"))?;
        check_deduction(&ded, &inst.goal).map_err(|e| format!("instance {i}: {e}"))?;
        let back = parse_deduction(&write_deduction(&ded)).map_err(|e| format!("instance {i}: {e}"))?;
        ensure(back == ded, format!("instance {i}: document round trip"))?;
        proofs += 1;

        for k in 0..ded.lines.len() {
            let mut m = ded.clone();
            m.lines.remove(k);
            ensure(check_deduction(&m, &inst.goal).is_err(), format!("instance {i}: deleting line {k} accepted"))?;
            deletions += 1;
        }

        let text = write_deduction(&ded);
        let mut known: Vec<Symbol> = inst.goal.attributes().into_iter().collect();
        for (k, line) in ded.lines.iter().enumerate() {
            if !line.new_attrs.is_empty() {
                *new_lines.entry(line.rule.tag()).or_default() += 1;
            }
            for n in &line.new_attrs {
                let targets: Vec<Symbol> = known.iter().copied().chain(line.new_attrs.iter().copied().filter(|m| m != n)).collect();
                for t in targets {
                    let mutated = rename_from_line(&text, k, *n, t);
                    match rejected(&mutated, &inst.goal) {
                        None => return Err(format!("instance {i}: line {k} new {n} renamed to {t} accepted")),
                        Some(Rejection::Parser) => by_parser += 1,
                        Some(Rejection::Checker) => {}
                    }
                    collisions += 1;
                }
            }
            // a later line claiming the same attribute as new
            for j in k + 1..ded.lines.len() {
                for n in &line.new_attrs {
                    let mut m = ded.clone();
                    m.lines[j].new_attrs.push(*n);
                    ensure(check_deduction(&m, &inst.goal).is_err(), format!("instance {i}: line {j} re-introducing {n} accepted"))?;
                    collisions += 1;
                }
            }
            known.extend(line.new_attrs.iter().copied());
        }

        for (k, line) in ded.lines.iter().enumerate() {
            let conj = line.formula.conjuncts();
            if conj.len() < 2 {
                continue;
            }
            for (c, d) in conj.iter().enumerate() {
                if !matches!(d, Dependency::Ind(_)) {
                    continue;
                }
                let mut m = ded.clone();
                let mut rest = conj.to_vec();
                rest.remove(c);
                m.lines[k].formula = Formula::new(rest).unwrap();
                ensure(check_deduction(&m, &inst.goal).is_err(), format!("instance {i}: deleting conjunct {c} of line {k} accepted"))?;
                ind_deletions += 1;
            }
        }
    }
    ensure(proofs > 0, "no deductions generated")?;
    Ok(format!(
        "{proofs} deductions accepted; rejected {deletions} line deletions, {collisions} collisions ({by_parser} at parse time), {ind_deletions} ind deletions; lines with new attributes {new_lines:?}"
    ))
}

fn replay(b: &Batch) -> Outcome {
    let mut pools = std::collections::BTreeMap::new();
    let (mut runs, mut lines, mut max_rows) = (0, 0, 0);
    for (i, (inst, out)) in b.instances.iter().zip(&b.outcomes).enumerate() {
        if out.verdict != Verdict::Implied {
            continue;
        }
        let ded = generate_deduction(out).map_err(|e| format!("instance {i}: {e}"))?;
        let pool = pools.entry(inst.schema.len()).or_insert_with(|| relations_for(&inst.schema, 2));
        for r in pool.iter().filter(|r| holds_all(r, &inst.sigma)) {
            let ext = replay_deduction(r, &ded).map_err(|e| format!("instance {i} on {r}: {e}"))?;
            for (k, line) in ded.lines.iter().enumerate() {
                for d in line.formula.conjuncts() {
                    ensure(holds(&ext, d), format!("instance {i} on {r}: line {k} fails on the extension"))?;
                    lines += 1;
                }
            }
            ensure(holds(&ext, &inst.goal), format!("instance {i} on {r}: goal fails on the extension"))?;
            max_rows = max_rows.max(ext.len());
            runs += 1;
        }
    }
    Ok(format!("{runs} replays, {lines} conjunct checks on extensions (largest {max_rows} rows)"))
}

fn random_file(rng: &mut ChaCha8Rng) -> SourceFile {
    use edchase::textio::{Decl, GoalRef, Item, Pos};
    use rand::seq::SliceRandom;
    use rand::Rng;
    let pos = Pos { line: 1, col: 1 };
    let all = common::schema(3);
    let mut decls = Vec::new();
    let n = rng.gen_range(1..=5);
    let vals = syms("0 1 2 3 @4 @5");
    for k in 0..n {
        let name = format!("d{k}");
        let item = match if k == 0 { 0 } else { rng.gen_range(0..5) } {
            0 => {
                let width = if k == 0 { 3 } else { rng.gen_range(1..=3) };
                let rows = (0..rng.gen_range(0..=4))
                    .map(|_| (0..width).map(|_| *vals.choose(rng).unwrap()).collect::<Vec<_>>())
                    .collect::<Vec<_>>();
                Item::Relation(Relation::new(&all[..width], rows).unwrap())
            }
            1 | 2 => {
                let width = rng.gen_range(1..=3);
                Item::Dependency(common::random_dependency(rng, &common::schema(width)))
            }
            3 => {
                let len = rng.gen_range(1..=3);
                let mut l = all.clone();
                l.shuffle(rng);
                let mut r = all.clone();
                r.shuffle(rng);
                Item::Dependency(Ind::new(l[..len].to_vec(), r[..len].to_vec()).unwrap().into())
            }
            _ => {
                let comps = (0..rng.gen_range(1..=3))
                    .map(|_| {
                        let mut c = all.clone();
                        c.shuffle(rng);
                        c.truncate(rng.gen_range(1..=3));
                        c
                    })
                    .collect();
                Item::Dependency(Ejd::new(comps).unwrap().into())
            }
        };
        decls.push(Decl { name: Some(name), item, pos });
    }
    let deps: Vec<String> = decls
        .iter()
        .filter(|d| matches!(d.item, Item::Dependency(_)))
        .map(|d| d.name.clone().unwrap())
        .collect();
    if let Some(target) = deps.choose(rng) {
        if decls.len() < 5 && rng.gen_bool(0.5) {
            decls.push(Decl { name: None, item: Item::Goal(GoalRef::Named(target.clone())), pos });
        }
    }
    SourceFile { decls }
}

fn parser_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0xf11e);
    for i in 0..200 {
        let f = random_file(&mut rng);
        let text = f.to_string();
        let back = SourceFile::parse(&text).map_err(|e| format!("file {i}: {e}\n{text}"))?;
        ensure(back == f, format!("file {i} differs after round trip:\n{text}"))?;
        ensure(back.to_string() == text, format!("file {i} prints differently"))?;
    }
    let mut fixtures: Vec<PathBuf> = std::fs::read_dir(fixture(""))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "edc"))
        .collect();
    fixtures.sort();
    for p in &fixtures {
        SourceFile::parse(&std::fs::read_to_string(p).unwrap()).map_err(|e| format!("{}:{e}", p.display()))?;
    }
    Ok(format!("200 generated files round-trip; {} fixtures parse", fixtures.len()))
}

fn transcript() -> Result<String, String> {
    let b = batch()?;
    let mut out = String::new();
    for o in &b.outcomes {
        out.push_str(&write_trace(o));
        if o.verdict == Verdict::Implied {
            out.push_str(&write_deduction(&generate_deduction(o).map_err(|e| e.to_string())?));
        }
    }
    let (sigma, goal) = emvd_problem();
    let o = run_chase(&sigma, &goal, BUDGET).map_err(|e| e.to_string())?;
    out.push_str(&write_trace(&o));
    out.push_str(&write_deduction(&generate_typed_deduction(&o).map_err(|e| e.to_string())?));
    Ok(out)
}

fn determinism() -> Outcome {
    let first = transcript()?;
    let second = transcript()?;
    ensure(first == second, "in-process transcripts differ")?;

    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for run in 0..2 {
        let p = dir.path().join(format!("p{run}"));
        let t = dir.path().join(format!("t{run}"));
        edchase(&[
            "prove",
            "-s",
            fixture("emvd_sigma.edc").to_str().unwrap(),
            "-g",
            fixture("emvd_goal.edc").to_str().unwrap(),
            "--emit-proof",
            p.to_str().unwrap(),
            "--emit-trace",
            t.to_str().unwrap(),
        ]);
        files.push((std::fs::read(&p).unwrap(), std::fs::read(&t).unwrap()));
    }
    ensure(files[0] == files[1], "CLI outputs differ between runs")?;
    Ok(format!("{} bytes of traces and proofs identical across runs", first.len()))
}

fn main() {
    let started = Instant::now();
    let batch = batch();
    let mut failed = 0;
    let mut report = String::new();
    let mut run = |n: usize, name: &str, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let result = f();
        let ms = t.elapsed().as_millis();
        let line = match &result {
            Ok(detail) => format!("PASS {n} {name} ({ms} ms): {detail}"),
            Err(why) => {
                failed += 1;
                format!("FAIL {n} {name} ({ms} ms): {why}")
            }
        };
        println!("{line}");
        let _ = writeln!(report, "{line}");
    };
    let with_batch = |f: fn(&Batch) -> Outcome| {
        let b = batch.as_ref().map_err(|e| e.clone());
        move || b.clone().and_then(f)
    };
    run(1, "example-1 reproduction", &example_one);
    run(2, "worked example end to end", &worked_example);
    run(3, "typed variant", &typed_variant);
    run(4, "countermodels", &with_batch(countermodels));
    run(5, "soundness cross-check", &with_batch(soundness));
    run(6, "proof round trip and mutations", &with_batch(proof_round_trip));
    run(7, "replay", &with_batch(replay));
    run(8, "parser round trip", &parser_round_trip);
    run(9, "determinism", &determinism);
    println!("{} of 9 criteria pass ({} ms)", 9 - failed, started.elapsed().as_millis());
    if failed > 0 {
        std::process::exit(1);
    }
}
