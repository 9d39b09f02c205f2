//! Oracles and instance generators shared by the integration tests.
//!
//! The oracles here deliberately avoid the library's homomorphism search
//! and model checker: they assign tableau rows to relation rows by brute
//! force and read values off positionally.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use edchase::model::{Dependency, Egd, Relation, Tgd};
use edchase::symbol::{syms, Symbol};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Map = BTreeMap<Symbol, Symbol>;

/// Rows of `t` over `attrs`, as attribute-keyed maps.
fn keyed_rows(t: &Relation) -> Vec<Vec<(Symbol, Symbol)>> {
    t.rows()
        .map(|row| t.schema().iter().copied().zip(row.iter().copied()).collect())
        .collect()
}

fn cell(r: &Relation, row: &[Symbol], attr: Symbol) -> Symbol {
    let i = r.schema().iter().position(|a| *a == attr).expect("attribute present");
    row[i]
}

/// Every valuation of `t`'s values that sends each row of `t` onto some row
/// of `r`, extending `fixed`. Rows of `t` are assigned to rows of `r` one at
/// a time, abandoning an assignment as soon as two cells disagree.
pub fn embeddings(t: &Relation, r: &Relation, fixed: &Map) -> Vec<Map> {
    let t_rows = keyed_rows(t);
    let r_rows: Vec<&Vec<Symbol>> = r.rows().collect();
    let mut out = BTreeSet::new();
    fn assign(i: usize, t_rows: &[Vec<(Symbol, Symbol)>], r: &Relation, r_rows: &[&Vec<Symbol>], f: &Map, out: &mut BTreeSet<Map>) {
        let Some(trow) = t_rows.get(i) else {
            out.insert(f.clone());
            return;
        };
        'targets: for target in r_rows {
            let mut g = f.clone();
            for (attr, v) in trow {
                let w = cell(r, target, *attr);
                if *g.entry(*v).or_insert(w) != w {
                    continue 'targets;
                }
            }
            assign(i + 1, t_rows, r, r_rows, &g, out);
        }
    }
    assign(0, &t_rows, r, &r_rows, fixed, &mut out);
    out.into_iter().collect()
}

fn project(r: &Relation, attrs: &[Symbol]) -> BTreeSet<Vec<Symbol>> {
    r.rows().map(|row| attrs.iter().map(|a| cell(r, row, *a)).collect()).collect()
}

/// Brute-force `r ⊨ d`.
pub fn holds(r: &Relation, d: &Dependency) -> bool {
    match d {
        Dependency::Egd(e) => embeddings(e.body(), r, &Map::new())
            .iter()
            .all(|f| f[&e.lhs()] == f[&e.rhs()]),
        Dependency::Tgd(t) => {
            let shared = t.shared_values();
            embeddings(t.body(), r, &Map::new()).iter().all(|f| {
                let fixed: Map = f.iter().filter(|(k, _)| shared.contains(k)).map(|(k, v)| (*k, *v)).collect();
                !embeddings(t.head(), r, &fixed).is_empty()
            })
        }
        Dependency::Ind(i) => {
            let rhs = project(r, i.rhs());
            project(r, i.lhs()).iter().all(|row| rhs.contains(row))
        }
        Dependency::Ejd(j) => {
            let union: Vec<Symbol> = j.attributes().into_iter().collect();
            let have = project(r, &union);
            // every combination of component rows that agrees on shared
            // attributes must appear in the projection on the union
            let comps: Vec<(Vec<Symbol>, BTreeSet<Vec<Symbol>>)> = j
                .components()
                .iter()
                .map(|c| (c.as_slice().to_vec(), project(r, c.as_slice())))
                .collect();
            fn go(
                comps: &[(Vec<Symbol>, BTreeSet<Vec<Symbol>>)],
                acc: &mut Map,
                union: &[Symbol],
                have: &BTreeSet<Vec<Symbol>>,
            ) -> bool {
                let Some(((attrs, rows), rest)) = comps.split_first() else {
                    let row: Vec<Symbol> = union.iter().map(|a| acc[a]).collect();
                    return have.contains(&row);
                };
                for row in rows {
                    let mut next = acc.clone();
                    if attrs.iter().zip(row).all(|(a, v)| *next.entry(*a).or_insert(*v) == *v)
                        && !go(rest, &mut next, union, have)
                    {
                        return false;
                    }
                }
                true
            }
            go(&comps, &mut Map::new(), &union, &have)
        }
    }
}

pub fn holds_all(r: &Relation, ds: &[Dependency]) -> bool {
    ds.iter().all(|d| holds(r, d))
}

/// Equal up to a bijective renaming of fresh symbols; named symbols are
/// compared literally.
pub fn equal_up_to_fresh(a: &Relation, b: &Relation) -> bool {
    if a.schema() != b.schema() || a.len() != b.len() {
        return false;
    }
    let fresh_a: Vec<Symbol> = a.values().into_iter().filter(|s| s.is_fresh()).collect();
    let fresh_b: Vec<Symbol> = b.values().into_iter().filter(|s| s.is_fresh()).collect();
    if fresh_a.len() != fresh_b.len() {
        return false;
    }
    let mut perm = fresh_b.clone();
    permutations(&mut perm, 0, &mut |p| {
        let map: Map = fresh_a.iter().copied().zip(p.iter().copied()).collect();
        let renamed: BTreeSet<Vec<Symbol>> = a
            .rows()
            .map(|row| row.iter().map(|s| *map.get(s).unwrap_or(s)).collect())
            .collect();
        renamed == b.rows().cloned().collect()
    })
}

fn permutations(items: &mut Vec<Symbol>, k: usize, test: &mut impl FnMut(&[Symbol]) -> bool) -> bool {
    if k == items.len() {
        return test(items);
    }
    for i in k..items.len() {
        items.swap(k, i);
        if permutations(items, k + 1, test) {
            items.swap(k, i);
            return true;
        }
        items.swap(k, i);
    }
    false
}

pub const ATTRS: [&str; 3] = ["A", "B", "C"];

pub fn schema(k: usize) -> Vec<Symbol> {
    syms(&ATTRS[..k].join(" "))
}

/// Every relation over `schema` with at most `max_rows` rows and values
/// from a `domain`-element set, one per class under renaming of values.
pub fn small_relations(schema: &[Symbol], domain: usize, max_rows: usize) -> Vec<Relation> {
    let dom: Vec<Symbol> = (0..domain).map(|i| Symbol::named(&i.to_string())).collect();
    let mut all_rows: Vec<Vec<Symbol>> = vec![vec![]];
    for _ in schema {
        all_rows = all_rows
            .into_iter()
            .flat_map(|r| dom.iter().map(move |d| {
                let mut r = r.clone();
                r.push(*d);
                r
            }))
            .collect();
    }
    let mut perms: Vec<Vec<usize>> = Vec::new();
    let mut idx: Vec<usize> = (0..domain).collect();
    heap_perms(&mut idx, domain, &mut perms);
    let index_of = |s: Symbol| dom.iter().position(|d| *d == s).unwrap();

    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    fn subsets(n: usize, max: usize, start: usize, chosen: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        f(chosen);
        if chosen.len() == max {
            return;
        }
        for i in start..n {
            chosen.push(i);
            subsets(n, max, i + 1, chosen, f);
            chosen.pop();
        }
    }
    subsets(all_rows.len(), max_rows, 0, &mut chosen, &mut |pick| {
        let rows: BTreeSet<Vec<Symbol>> = pick.iter().map(|i| all_rows[*i].clone()).collect();
        let canonical = perms.iter().all(|p| {
            let image: BTreeSet<Vec<Symbol>> = rows
                .iter()
                .map(|r| r.iter().map(|s| dom[p[index_of(*s)]]).collect())
                .collect();
            rows <= image
        });
        if canonical {
            out.push(Relation::new(schema, rows).unwrap());
        }
    });
    out
}

fn heap_perms(a: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(a.clone());
        return;
    }
    for i in 0..k {
        heap_perms(a, k - 1, out);
        if k.is_multiple_of(2) {
            a.swap(i, k - 1);
        } else {
            a.swap(0, k - 1);
        }
    }
}

/// An implication instance: premises and goal over one schema.
#[derive(Clone, Debug)]
pub struct Instance {
    pub schema: Vec<Symbol>,
    pub sigma: Vec<Dependency>,
    pub goal: Dependency,
}

fn random_body(rng: &mut ChaCha8Rng, schema: &[Symbol]) -> Relation {
    let pool = syms("x0 x1 x2 x3");
    let rows = rng.gen_range(1..=3);
    let body: Vec<Vec<Symbol>> = (0..rows)
        .map(|_| schema.iter().map(|_| *pool.choose(rng).unwrap()).collect())
        .collect();
    Relation::new(schema, body).unwrap()
}

pub fn random_dependency(rng: &mut ChaCha8Rng, schema: &[Symbol]) -> Dependency {
    let body = random_body(rng, schema);
    let vals: Vec<Symbol> = body.values().into_iter().collect();
    if rng.gen_bool(0.5) {
        let x = *vals.choose(rng).unwrap();
        let y = *vals.choose(rng).unwrap();
        Egd::new(body, x, y).unwrap().into()
    } else {
        let mut pool = vals.clone();
        pool.extend(syms("z0 z1"));
        let rows = rng.gen_range(1..=2);
        let head: Vec<Vec<Symbol>> = (0..rows)
            .map(|_| schema.iter().map(|_| *pool.choose(rng).unwrap()).collect())
            .collect();
        Tgd::new(body, Relation::new(schema, head).unwrap()).unwrap().into()
    }
}

pub fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let k = rng.gen_range(1..=3);
    let schema = schema(k);
    let n = rng.gen_range(0..=2);
    let sigma = (0..n).map(|_| random_dependency(rng, &schema)).collect();
    let goal = random_dependency(rng, &schema);
    Instance { schema, sigma, goal }
}
