//! The typed start and termination rules: a deduction for a typed problem,
//! and the untyped tableau the typed start rule refuses.
//!
//! cargo run --example typed_rules

use edchase::chase::run_chase;
use edchase::proof::{check_deduction, generate_typed_deduction, Rule};
use edchase::textio::parse_dependency;

fn main() {
    let sigma = vec![
        parse_dependency("tgd over (A,B,C,D): { (a0,b0,c0,d0); (a0,b1,c1,d1) } => { (a0,b0,c1,d2) }").unwrap(),
        parse_dependency("egd over (A,B,C,D): { (a0,b0,c0,d0); (a1,b1,c0,d1) } => d0 = d1").unwrap(),
    ];
    let goal = parse_dependency("tgd over (A,B,C,D): { (a0,b0,c0,d0); (a0,b1,c1,d1) } => { (a0,b0,c1,d1) }").unwrap();
    let ded = generate_typed_deduction(&run_chase(&sigma, &goal, 100).unwrap()).unwrap();
    for (i, line) in ded.lines.iter().enumerate() {
        println!("{i:>2} {:<11} {}", line.rule.tag(), line.formula);
    }
    check_deduction(&ded, &goal).unwrap();
    println!("CSstar lines: {}, accepted\n", ded.count(Rule::CsStar));

    // y sits under A in one row and under B in the other
    let swap = parse_dependency("tgd over (A,B): { (x,y); (y,x) } => { (y,x) }").unwrap();
    println!("typed? {}", swap.is_typed());
    let outcome = run_chase(&[], &swap, 100).unwrap();
    println!("chase says {}", outcome.verdict);
    match generate_typed_deduction(&outcome) {
        Ok(_) => println!("unexpected typed deduction"),
        Err(e) => println!("typed generator: {e}"),
    }
}
