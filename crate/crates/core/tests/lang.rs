mod common;

use spc_core::lang::{parse, render};
use spc_core::Error;

use common::{corpus, corpus_files, parse_in_corpus};

#[test]
fn every_corpus_file_parses() {
    let files = corpus_files();
    assert!(files.len() >= 19);
    for f in files {
        spc_core::lang::load(&f).unwrap_or_else(|e| panic!("{}: {e}", f.display()));
    }
}

#[test]
fn render_then_parse_is_identity() {
    for f in corpus_files() {
        let p = spc_core::lang::load(&f).unwrap();
        let text = render(&p);
        let q = parse_in_corpus(&text);
        assert_eq!(p, q, "{}\n{text}", f.display());
        assert_eq!(render(&q), text);
    }
}

#[test]
fn empty_input_needs_a_count() {
    let d = parse("").unwrap_err();
    assert!(d.to_string().contains("missing (count ...)"), "{d}");
}

#[test]
fn diagnostics_have_positions() {
    let d = parse("(set-logic PL)\n(set-algebra [NAT,+,0])\n(count (p and q))").unwrap_err();
    let first = &d.0[0];
    assert_eq!(first.pos.line, 3, "{d}");
}

#[test]
fn unknown_algebra_is_rejected() {
    assert!(parse("(set-logic PL) (set-algebra [NAT,xor,0]) (count TRUE)").is_err());
}

#[test]
fn data_predicates_are_recorded() {
    let p = corpus("coloring.sp");
    let data: Vec<&str> = p.vocabulary.data_symbols.iter().map(String::as_str).collect();
    assert_eq!(data, ["edge", "node"]);
    assert_eq!(p.vocabulary.sorts.len(), 2);
}

#[test]
fn composed_programs_need_a_file_context() {
    let text = std::fs::read_to_string(common::corpus_dir().join("robot_phi.sp")).unwrap();
    assert!(parse(&text).is_err());
    let p = corpus("robot_phi.sp");
    assert!(p.components.is_some());
}

#[test]
fn missing_file_is_an_io_error() {
    let r = spc_core::lang::load(common::corpus_dir().join("no_such_file.sp"));
    assert!(matches!(r, Err(Error::Io { .. })));
}

#[test]
fn cyclic_bindings_do_not_resolve() {
    let src = "(set-logic PL) (set-algebra [NAT,+,0]) (declare-predicate p ())
        A = (B and p) B = (A or p) (count A)";
    match parse(src) {
        Err(_) => {}
        Ok(p) => assert!(p.resolve(&p.query_formula()).is_err()),
    }
}
