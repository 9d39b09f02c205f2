//! Chases an embedded multivalued dependency over an EMVD and an FD and
//! prints every intermediate tableau.
//!
//! cargo run --example chase_trace

use edchase::chase::{run_chase, DEFAULT_BUDGET};
use edchase::symbol::FreshSource;
use edchase::textio::{write_trace, SourceFile};

fn main() {
    let mut fresh = FreshSource::new();
    let sigma = SourceFile::parse_with(include_str!("../fixtures/emvd_sigma.edc"), &mut fresh)
        .unwrap()
        .dependencies()
        .unwrap();
    let goal = SourceFile::parse_with(include_str!("../fixtures/emvd_goal.edc"), &mut fresh)
        .unwrap()
        .goal()
        .unwrap()
        .unwrap()
        .into_conjuncts()
        .remove(0);

    let outcome = run_chase(&sigma, &goal, DEFAULT_BUDGET).unwrap();
    for (i, state) in outcome.states().iter().enumerate() {
        println!("tau{i}:");
        for row in state.body().rows() {
            let cells: Vec<String> = row.iter().map(|s| s.to_string()).collect();
            println!("  {}", cells.join(" "));
        }
    }
    println!("verdict: {}\n", outcome.verdict);
    print!("{}", write_trace(&outcome));
}
