//! Checks a relation against two tgds and prints the embedding that has no
//! extension.
//!
//! cargo run --example model_check

use edchase::model::{violation, Valuation, Violation};
use edchase::textio::SourceFile;

fn main() {
    let rel = SourceFile::parse(include_str!("../fixtures/ex1_relation.edc")).unwrap();
    let deps = SourceFile::parse(include_str!("../fixtures/ex1_deps.edc")).unwrap();
    let (_, r) = rel.relations()[0];
    println!("r = {r}");

    for (decl, dep) in deps.decls.iter().zip(deps.dependencies().unwrap()) {
        let name = decl.name.as_deref().unwrap_or("?");
        match violation(r, &dep).unwrap() {
            None => println!("{name}: satisfied"),
            Some(Violation::Valuation(g)) => {
                // blank cells are private to the tableau, leave them out
                let hidden = dep.distinct_values();
                let g: Valuation = g.iter().filter(|(x, _)| !hidden.contains(x)).collect();
                println!("{name}: violated, no extension of {g}");
            }
            Some(other) => println!("{name}: violated by {other:?}"),
        }
    }
}
