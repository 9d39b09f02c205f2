//! Turns an implied chase into a deduction, prints it as a proof document,
//! reads it back and checks it.
//!
//! cargo run --example prove_and_check

use edchase::chase::run_chase;
use edchase::proof::{check_deduction, generate_deduction};
use edchase::textio::{parse_deduction, parse_dependency, write_deduction};

fn main() {
    let sigma = vec![
        parse_dependency("tgd over (A,B,C,D): { (a0,b0,c0,d0); (a0,b1,c1,d1) } => { (a0,b0,c1,d2) }").unwrap(),
        parse_dependency("egd over (A,B,C,D): { (a0,b0,c0,d0); (a1,b1,c0,d1) } => d0 = d1").unwrap(),
    ];
    let goal = parse_dependency("tgd over (A,B,C,D): { (a0,b0,c0,d0); (a0,b1,c1,d1) } => { (a0,b0,c1,d1) }").unwrap();

    let outcome = run_chase(&sigma, &goal, 100).unwrap();
    let ded = generate_deduction(&outcome).unwrap();
    let text = write_deduction(&ded);
    print!("{text}");

    let back = parse_deduction(&text).unwrap();
    match check_deduction(&back, &goal) {
        Ok(()) => println!("checked: {} lines", back.lines.len()),
        Err(e) => println!("rejected: {e}"),
    }

    // dropping a line breaks the references that follow it
    let mut broken = back.clone();
    broken.lines.remove(2);
    println!("without line 2: {}", check_deduction(&broken, &goal).unwrap_err());
}
