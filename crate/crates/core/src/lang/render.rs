use std::fmt::Write;

use super::{MeasureKind, Program, Query};
use crate::logic::{Formula, SortDomain, Term};
use crate::scalar::fmt_rational;
use crate::semiring::{Ext, Value};

/// Canonical text for a program; `parse(render(p))` rebuilds `p`.
pub fn render(p: &Program) -> String {
    let mut out = String::new();
    let w = &mut out;
    if let Some(c) = &p.components {
        line(w, format_args!("(compose \"{}\" \"{}\")", c.paths.0, c.paths.1));
    } else {
        line(w, format_args!("(set-logic {})", p.theory));
        line(w, format_args!("(set-algebra {})", p.algebra));
        let voc = &p.vocabulary;
        for (name, dom) in &voc.sorts {
            let body = match dom {
                SortDomain::Range { lo, hi } => format!("{{{lo},...,{hi}}}"),
                SortDomain::Enum(items) => {
                    format!("{{{}}}", items.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","))
                }
                SortDomain::Real => "REAL".into(),
            };
            line(w, format_args!("(set-type {name}={body})"));
        }
        for (name, args) in &voc.predicates {
            line(w, format_args!("(declare-predicate {name} ({}))", args.join(",")));
        }
        for (name, sig) in &voc.functions {
            line(w, format_args!("(declare-function {name} ({}) {})", sig.args.join(","), sig.result));
        }
        if !voc.data_symbols.is_empty() {
            let names: Vec<&str> = voc.data_symbols.iter().map(String::as_str).collect();
            line(w, format_args!("(declare-data {})", names.join(" ")));
        }
    }
    for (var, (lo, hi)) in &p.bounds {
        line(w, format_args!("(set-option bounds {var} {} {})", fmt_rational(lo), fmt_rational(hi)));
    }
    for (key, value) in &p.options {
        line(w, format_args!("(set-option {key} {value})"));
    }
    for (name, f) in &p.bindings {
        line(w, format_args!("{name} = {}", wrapped(f)));
    }
    for (name, m) in &p.weights.measures {
        let kind = match m.kind {
            MeasureKind::Lebesgue => "LEBESGUE",
            MeasureKind::Counting => "COUNTING",
        };
        line(w, format_args!("(declare-measure {name} {kind})"));
    }
    for (lit, v) in &p.weights.literals {
        line(w, format_args!("(declare-weight ({lit} {}))", weight_number(v)));
    }
    for (guard, term) in &p.weights.guarded {
        line(w, format_args!("(declare-weight {} {})", wrapped(guard), term_arg(term)));
    }
    match &p.query {
        Query::Count(f) => line(w, format_args!("(count {f})")),
        Query::Conditional { phi, q, component } => {
            let tail = component.map(|c| format!(" {c}")).unwrap_or_default();
            line(w, format_args!("(count-conditional {} {}{tail})", wrapped(phi), wrapped(q)));
        }
    }
    out
}

fn line(w: &mut String, args: std::fmt::Arguments<'_>) {
    w.write_fmt(args).expect("writing to a string");
    w.push('\n');
}

fn wrapped(f: &Formula) -> String {
    match f {
        Formula::True | Formula::False | Formula::Ref(_) => f.to_string(),
        _ => format!("({f})"),
    }
}

fn term_arg(t: &Term) -> String {
    match t {
        Term::Const(_) => t.to_string(),
        _ => format!("({t})"),
    }
}

fn weight_number(v: &Value) -> String {
    match v {
        Value::Bool(b) => u8::from(*b).to_string(),
        Value::Num(Ext::Fin(r)) => fmt_rational(r),
        Value::Float(x) => format!("{x}"),
        other => other.to_string(),
    }
}
