#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rand::Rng;
use spc_core::lang::{load, parse_with, Program};
use spc_core::logic::ir::VarTable;
use spc_core::logic::{enumerate_models, evaluate_classical, ground, Logic, TheorySpec};

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn corpus(name: &str) -> Program {
    load(corpus_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn corpus_files() -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "sp"))
        .collect();
    out.sort();
    out
}

/// Parses `text`, resolving `(compose ...)` paths against the corpus.
pub fn parse_in_corpus(text: &str) -> Program {
    let dir = corpus_dir();
    let resolver = move |name: &str| load(dir.join(name)).map_err(|e| e.to_string());
    parse_with(text, &resolver).unwrap_or_else(|d| panic!("{d}\n{text}"))
}

fn prop_formula(rng: &mut impl Rng, atoms: usize, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.25) {
        let a = rng.gen_range(0..atoms);
        return if rng.gen_bool(0.5) { format!("p{a}") } else { format!("(not p{a})") };
    }
    let l = prop_formula(rng, atoms, depth - 1);
    match rng.gen_range(0..5) {
        0 => format!("(not {l})"),
        k => {
            let r = prop_formula(rng, atoms, depth - 1);
            let op = ["and", "or", "=>", "<=>"][k - 1];
            format!("({l} {op} {r})")
        }
    }
}

/// A random propositional program over at most `max_atoms` atoms with
/// random literal weights (some left undeclared).
pub fn random_prop_program(rng: &mut impl Rng, algebra: &str, max_atoms: usize) -> String {
    let n = rng.gen_range(1..=max_atoms);
    let boolean = algebra.starts_with("[BOOL");
    let mut src = format!("(set-logic PL)\n(set-algebra {algebra})\n");
    for a in 0..n {
        src.push_str(&format!("(declare-predicate p{a} ())\n"));
    }
    let mut parts = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        parts.push(prop_formula(rng, n, 4));
    }
    src.push_str(&format!("F = ({})\n", parts.join(" and ")));
    for a in 0..n {
        for lit in [format!("p{a}"), format!("(neg p{a})")] {
            if rng.gen_bool(0.8) {
                let w = if boolean { rng.gen_range(0..=1) } else { rng.gen_range(0..=5) };
                src.push_str(&format!("(declare-weight ({lit} {w}))\n"));
            }
        }
    }
    src.push_str("(count F)\n");
    src
}

fn fol_atom(rng: &mut impl Rng, scope: &[(String, &'static str)], sizes: (usize, usize)) -> String {
    let arg = |rng: &mut dyn rand::RngCore, sort: &'static str| -> String {
        let vars: Vec<&String> = scope.iter().filter(|(_, s)| *s == sort).map(|(v, _)| v).collect();
        if !vars.is_empty() && rng.gen_bool(0.7) {
            vars[rng.gen_range(0..vars.len())].clone()
        } else if sort == "OBJ" {
            format!("{}", rng.gen_range(1..=sizes.0))
        } else {
            ["red", "blue"][rng.gen_range(0..sizes.1)].to_string()
        }
    };
    match rng.gen_range(0..3) {
        0 => format!("big({})", arg(rng, "OBJ")),
        1 => format!("link({},{})", arg(rng, "OBJ"), arg(rng, "OBJ")),
        _ => format!("paint({},{})", arg(rng, "OBJ"), arg(rng, "HUE")),
    }
}

fn fol_formula(rng: &mut impl Rng, scope: &mut Vec<(String, &'static str)>, sizes: (usize, usize), depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.2) {
        return fol_atom(rng, scope, sizes);
    }
    match rng.gen_range(0..6) {
        0 => format!("(not {})", fol_formula(rng, scope, sizes, depth - 1)),
        1 | 2 => {
            let l = fol_formula(rng, scope, sizes, depth - 1);
            let r = fol_formula(rng, scope, sizes, depth - 1);
            let op = ["and", "or", "=>"][rng.gen_range(0..3)];
            format!("({l} {op} {r})")
        }
        _ => {
            let q = if rng.gen_bool(0.5) { "forall" } else { "exists" };
            let sort = if rng.gen_bool(0.7) { "OBJ" } else { "HUE" };
            let v = format!("v{}", scope.len());
            scope.push((v.clone(), sort));
            let body = fol_formula(rng, scope, sizes, depth - 1);
            scope.pop();
            format!("({q}{{{v}:{sort}}} {body})")
        }
    }
}

/// A random closed first-order program over at most 3 objects and 2 hues.
pub fn random_fol_program(rng: &mut impl Rng) -> String {
    let objs = rng.gen_range(1..=3);
    let hues = rng.gen_range(1..=2);
    let hue_names = ["red", "blue"][..hues].join(",");
    let mut src = format!(
        "(set-logic FOL)\n(set-algebra [NAT,+,0])\n(set-type OBJ={{1,...,{objs}}})\n(set-type HUE={{{hue_names}}})\n\
         (declare-predicate big (OBJ))\n(declare-predicate link (OBJ,OBJ))\n(declare-predicate paint (OBJ,HUE))\n"
    );
    let parts: Vec<String> = (0..rng.gen_range(1..=3))
        .map(|_| fol_formula(rng, &mut Vec::new(), (objs, hues), 4))
        .collect();
    src.push_str(&format!("(count ({}))\n", parts.join(" and ")));
    src
}

/// Model count of a first-order program by evaluating the quantified query
/// on every interpretation of the vocabulary.
pub fn direct_count(p: &Program) -> u64 {
    let f = p.resolve(&p.query_formula()).unwrap();
    let table = VarTable::new(&p.vocabulary, false).unwrap();
    let sizes: Vec<u32> = table.vars.iter().map(|v| v.size().unwrap() as u32).collect();
    let mut assign = vec![0u32; sizes.len()];
    let mut n = 0;
    loop {
        if evaluate_classical(&p.vocabulary, &f, &table.interpretation(&assign)).unwrap() {
            n += 1;
        }
        let mut i = sizes.len();
        loop {
            if i == 0 {
                return n;
            }
            i -= 1;
            assign[i] += 1;
            if assign[i] < sizes[i] {
                break;
            }
            assign[i] = 0;
        }
    }
}

/// Model count after grounding quantifiers away.
pub fn grounded_count(p: &Program) -> u64 {
    let f = p.resolve(&p.query_formula()).unwrap();
    let g = ground(&f, &p.vocabulary).unwrap();
    enumerate_models(&TheorySpec::new(vec![Logic::Fol]), &p.vocabulary, &g).unwrap().len() as u64
}
