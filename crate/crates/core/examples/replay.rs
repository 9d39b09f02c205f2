//! Replays a deduction on a concrete relation, building the extension to
//! the new attributes and checking every line on it.
//!
//! cargo run --example replay

use edchase::chase::run_chase;
use edchase::model::Relation;
use edchase::proof::{generate_deduction, replay_deduction};
use edchase::symbol::syms;
use edchase::textio::parse_dependency;

fn main() {
    let sigma = vec![
        parse_dependency("tgd over (A,B,C,D): { (a0,b0,c0,d0); (a0,b1,c1,d1) } => { (a0,b0,c1,d2) }").unwrap(),
        parse_dependency("egd over (A,B,C,D): { (a0,b0,c0,d0); (a1,b1,c0,d1) } => d0 = d1").unwrap(),
    ];
    let goal = parse_dependency("tgd over (A,B,C,D): { (a0,b0,c0,d0); (a0,b1,c1,d1) } => { (a0,b0,c1,d1) }").unwrap();
    let ded = generate_deduction(&run_chase(&sigma, &goal, 100).unwrap()).unwrap();

    let r = Relation::new(
        &syms("A B C D"),
        ["0 0 0 0", "0 1 1 1", "0 0 1 1", "0 1 0 0"].map(syms),
    )
    .unwrap();
    let extended = replay_deduction(&r, &ded).unwrap();
    println!("schema: {:?}", extended.schema().iter().map(|s| s.to_string()).collect::<Vec<_>>());
    println!("{} rows, every line holds", extended.len());
}
