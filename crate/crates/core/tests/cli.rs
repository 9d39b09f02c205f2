use std::path::{Path, PathBuf};
use std::process::Command;

use edchase::textio::SourceFile;

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn edchase_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_edchase"));
    cmd.args(args).env_remove("EDCHASE_MAX_STEPS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().unwrap();
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn edchase(args: &[&str]) -> Run {
    edchase_env(args, &[])
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn prove_implied_exits_zero() {
    let r = edchase(&["prove", "-s", &fixture("emvd_sigma.edc"), "-g", &fixture("emvd_goal.edc")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.starts_with("implied after 3 steps"), "{}", r.stdout);
}

#[test]
fn not_implied_prints_a_countermodel() {
    let dir = tempfile::tempdir().unwrap();
    let sigma = write(dir.path(), "s.edc", "egd fd over (A,B): { (x,y); (x,z) } => y = z\n");
    let goal = write(dir.path(), "g.edc", "egd over (A,B): { (x,y); (z,y) } => x = z\n");
    let r = edchase(&["countermodel", "-s", sigma.to_str().unwrap(), "-g", goal.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    let text = r.stdout.split_once('\n').unwrap().1;
    let cm = SourceFile::parse(text).unwrap();
    assert_eq!(cm.relations()[0].0, "countermodel");
    assert_eq!(cm.relations()[0].1.len(), 2);
}

#[test]
fn exhausted_budget_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let sigma = write(dir.path(), "s.edc", "tgd over (A,B): { (x,y) } => { (y,_) }\n");
    let goal = write(dir.path(), "g.edc", "tgd over (A,B): { (x,y) } => { (y,x) }\n");
    let (s, g) = (sigma.to_str().unwrap(), goal.to_str().unwrap());
    let r = edchase(&["prove", "-s", s, "-g", g, "--max-steps", "5"]);
    assert_eq!(r.code, 2, "{}{}", r.stdout, r.stderr);
    assert!(r.stdout.contains("after 5 steps"), "{}", r.stdout);

    let r = edchase(&["prove", "-s", s, "-g", g, "--max-steps", "0"]);
    assert_eq!(r.code, 2);

    let r = edchase_env(&["chase", "-s", s, "-g", g], &[("EDCHASE_MAX_STEPS", "7")]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.ends_with("verdict value=exhausted steps=7\n"), "{}", r.stdout);

    // the flag wins over the environment
    let r = edchase_env(&["chase", "-s", s, "-g", g, "--max-steps", "3"], &[("EDCHASE_MAX_STEPS", "7")]);
    assert!(r.stdout.ends_with("steps=3\n"), "{}", r.stdout);

    let r = edchase_env(&["chase", "-s", s, "-g", g], &[("EDCHASE_MAX_STEPS", "lots")]);
    assert_eq!(r.code, 64);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(edchase(&[]).code, 64);
    assert_eq!(edchase(&["frobnicate"]).code, 64);
    assert_eq!(edchase(&["prove", "-s", "x"]).code, 64);
    assert_eq!(edchase(&["--help"]).code, 0);
}

#[test]
fn bad_input_exits_65_with_a_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.edc", "relation r(A,B) {\n (1,2,3) }\n");
    let r = edchase(&["normalize", bad.to_str().unwrap()]);
    assert_eq!(r.code, 65);
    assert!(r.stderr.contains("bad.edc:2:2:"), "{}", r.stderr);

    let r = edchase(&["normalize", "/nonexistent/file.edc"]);
    assert_eq!(r.code, 65);

    let r = edchase(&["prove", "--typed", "-s", &fixture("untyped.edc"), "-g", &fixture("untyped.edc")]);
    assert_eq!(r.code, 65, "{}", r.stderr);
    assert!(r.stderr.contains("not typed"), "{}", r.stderr);
}

#[test]
fn verify_accepts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let proof = dir.path().join("p.edp");
    let (s, g) = (fixture("emvd_sigma.edc"), fixture("emvd_goal.edc"));
    let r = edchase(&["prove", "-s", &s, "-g", &g, "--emit-proof", proof.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let r = edchase(&["verify", "-s", &s, "-p", proof.to_str().unwrap(), "-g", &g]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(r.stdout.starts_with("accepted:"));

    // dropping the last line leaves a proof of something else
    let text = std::fs::read_to_string(&proof).unwrap();
    let kept: Vec<&str> = text.lines().filter(|l| !l.starts_with("conclusion")).collect();
    let truncated = write(dir.path(), "short.edp", &(kept[..kept.len() - 1].join("\n") + "\n"));
    let r = edchase(&["verify", "-s", &s, "-p", truncated.to_str().unwrap(), "-g", &g]);
    assert_eq!(r.code, 1, "{}{}", r.stdout, r.stderr);
    assert!(r.stdout.starts_with("rejected:"));

    // a premise the sigma file does not hold
    let other = write(dir.path(), "other.edc", "egd over (A,B,C,D): { (a,b,c,d); (a,b2,c2,d2) } => b = b2\n");
    let r = edchase(&["verify", "-s", other.to_str().unwrap(), "-p", proof.to_str().unwrap(), "-g", &g]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("premise 0"), "{}", r.stdout);
}

#[test]
fn emitted_trace_matches_chase_output() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.txt");
    let (s, g) = (fixture("emvd_sigma.edc"), fixture("emvd_goal.edc"));
    edchase(&["prove", "-s", &s, "-g", &g, "--emit-trace", trace.to_str().unwrap()]);
    let chased = edchase(&["chase", "-s", &s, "-g", &g]);
    assert_eq!(chased.code, 0);
    assert_eq!(std::fs::read_to_string(&trace).unwrap(), chased.stdout);
    assert!(chased.stdout.starts_with("chase-trace v1\n"));
}

#[test]
fn check_model_lists_every_dependency() {
    let r = edchase(&["check-model", "-r", &fixture("ex1_relation.edc"), "-d", &fixture("ex1_deps.edc")]);
    assert_eq!(r.code, 1);
    assert_eq!(r.stdout, "sigma1: satisfied\nsigma2: violated by valuation {x->3,y->0,z->1}\n");

    let r = edchase(&["check-model", "-r", &fixture("untyped.edc"), "--name", "r", "-d", &fixture("fd_ind.edc")]);
    assert_eq!(r.code, 1, "{}", r.stderr);
    assert!(r.stdout.contains("key: satisfied"), "{}", r.stdout);
    assert!(r.stdout.contains("into: violated by tuple (0,1)"), "{}", r.stdout);

    let r = edchase(&["check-model", "-r", &fixture("untyped.edc"), "-d", &fixture("fd_ind.edc")]);
    assert_eq!(r.code, 65);
}

#[test]
fn normalize_splits_ed_sentences() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "ed.edc",
        "ed e over (A,B,C): R(x,y,z) & R(_,x,y) -> R(z,_,x) & y = z\nind i: A <= B\n",
    );
    let r = edchase(&["normalize", f.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let out = SourceFile::parse(&r.stdout).unwrap();
    let names: Vec<_> = out.decls.iter().map(|d| d.name.clone().unwrap()).collect();
    assert_eq!(names, ["e_0", "e_1", "i"]);
    assert!(r.stdout.contains("tgd e_0") || r.stdout.contains("egd e_0"), "{}", r.stdout);
}
