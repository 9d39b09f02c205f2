//! A failed implication: the chase stops without reaching a trivial
//! dependency and its last tableau is a counterexample.
//!
//! cargo run --example countermodel

use edchase::chase::run_chase;
use edchase::model::satisfies;
use edchase::textio::{parse_dependency, write_relation};

fn main() {
    // A -> B does not give B -> A
    let fd = parse_dependency("egd over (A,B,C): { (x,y,z); (x,w,v) } => y = w").unwrap();
    let goal = parse_dependency("egd over (A,B,C): { (x,y,z); (u,y,v) } => x = u").unwrap();

    let outcome = run_chase(std::slice::from_ref(&fd), &goal, 100).unwrap();
    println!("{} after {} steps", outcome.verdict, outcome.steps.len());
    let r = outcome.countermodel().unwrap();
    print!("{}", write_relation("cm", &r));
    println!("premise holds: {}", satisfies(&r, &fd).unwrap());
    println!("goal holds:    {}", satisfies(&r, &goal).unwrap());
}
