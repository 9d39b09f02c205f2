//! Reads a file mixing every declaration form and prints it back with ed
//! sentences split into egds and tgds.
//!
//! cargo run --example parse_and_normalize

use edchase::textio::SourceFile;

const INPUT: &str = "
relation emp(E,D,M) { (ann,toys,bob); (bob,toys,bob); }
egd fd over (E,D,M): { (e,d,m); (e,d2,m2) } => d = d2
ind mgr: M <= E
ejd split: join (E,D)(D,M)
ed boss over (E,D,M): R(e,d,m) -> R(m,d,_) & m = m
";

fn main() {
    let file = SourceFile::parse(INPUT).unwrap();
    print!("{file}");
    println!("--");
    for dep in file.dependencies().unwrap() {
        println!("{dep}");
    }
    match SourceFile::parse("relation r(A,B) {\n  (1,2,3);\n}") {
        Ok(_) => unreachable!(),
        Err(e) => println!("--\nerror at {e}"),
    }
}
