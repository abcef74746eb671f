//! Formulas, terms, vocabularies, interpretations and the satisfaction relation.
//!
//! A theory here is one of a fixed set of logics ([`Logic`]) over a typed
//! vocabulary with finite enumerated sorts, bounded integer ranges, and `REAL`.

mod eval;
mod ground;
pub mod ir;
mod search;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::IndexMap;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::scalar::int;

pub use eval::{evaluate, evaluate_classical, eval_term};
pub use ground::{ground, ground_with};
pub use search::{enumerate_models, ModelSearch, SearchOutcome, DEFAULT_CAP};
pub(crate) use search::fix_data;

pub const REAL_SORT: &str = "REAL";

/// A universe element: a number or a symbolic enum member.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Datum {
    Num(BigRational),
    Sym(String),
}

impl Datum {
    pub fn int(n: i64) -> Self {
        Datum::Num(int(n))
    }

    pub fn as_num(&self) -> Option<&BigRational> {
        match self {
            Datum::Num(r) => Some(r),
            Datum::Sym(_) => None,
        }
    }
}

impl fmt::Display for Datum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Datum::Num(r) => f.write_str(&crate::scalar::fmt_number(r)),
            Datum::Sym(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SortDomain {
    /// Inclusive integer range `{lo,...,hi}`.
    Range { lo: i64, hi: i64 },
    /// Explicit finite set `{r,b,g}` or `{1,2,3}`.
    Enum(Vec<Datum>),
    Real,
}

impl SortDomain {
    pub fn is_finite(&self) -> bool {
        !matches!(self, SortDomain::Real)
    }

    /// Elements in domain order; `None` for `REAL`.
    pub fn elements(&self) -> Option<Vec<Datum>> {
        match self {
            SortDomain::Range { lo, hi } => Some((*lo..=*hi).map(Datum::int).collect()),
            SortDomain::Enum(items) => Some(items.clone()),
            SortDomain::Real => None,
        }
    }

    pub fn len(&self) -> Option<u64> {
        match self {
            SortDomain::Range { lo, hi } => Some((hi - lo + 1).max(0) as u64),
            SortDomain::Enum(items) => Some(items.len() as u64),
            SortDomain::Real => None,
        }
    }

    pub fn contains(&self, d: &Datum) -> bool {
        match (self, d) {
            (SortDomain::Range { lo, hi }, Datum::Num(r)) => {
                r.is_integer() && *r >= int(*lo) && *r <= int(*hi)
            }
            (SortDomain::Enum(items), d) => items.contains(d),
            (SortDomain::Real, Datum::Num(_)) => true,
            _ => false,
        }
    }

    /// Sorts whose elements are numbers (ranges, numeric enums, REAL).
    pub fn is_numeric(&self) -> bool {
        match self {
            SortDomain::Enum(items) => items.iter().all(|d| matches!(d, Datum::Num(_))),
            _ => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionSig {
    pub args: Vec<String>,
    pub result: String,
}

/// Declared sorts and symbols.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub sorts: IndexMap<String, SortDomain>,
    pub predicates: IndexMap<String, Vec<String>>,
    pub functions: IndexMap<String, FunctionSig>,
    /// Predicates whose extension is fixed to the positive facts of the query.
    pub data_symbols: BTreeSet<String>,
}

static REAL_DOMAIN: SortDomain = SortDomain::Real;

impl Vocabulary {
    pub fn sort(&self, name: &str) -> Option<&SortDomain> {
        if name == REAL_SORT {
            return Some(&REAL_DOMAIN);
        }
        self.sorts.get(name)
    }

    pub fn has_symbol(&self, name: &str) -> bool {
        self.predicates.contains_key(name) || self.functions.contains_key(name)
    }

    /// Predicate and function names, sorted.
    pub fn symbols(&self) -> BTreeSet<&str> {
        self.predicates
            .keys()
            .chain(self.functions.keys())
            .map(String::as_str)
            .collect()
    }

    /// The finite elements of `sort`, or an error for REAL / undeclared sorts.
    pub fn finite_elements(&self, sort: &str) -> crate::Result<Vec<Datum>> {
        self.sort(sort)
            .ok_or_else(|| crate::Error::UndeclaredSort(sort.to_string()))?
            .elements()
            .ok_or_else(|| crate::Error::InfiniteDomain(sort.to_string()))
    }

    /// Finds the first sort that lists `d` among its symbolic elements.
    pub fn enum_sort_of(&self, sym: &str) -> Option<&str> {
        self.sorts.iter().find_map(|(name, dom)| match dom {
            SortDomain::Enum(items) if items.iter().any(|d| matches!(d, Datum::Sym(s) if s == sym)) => {
                Some(name.as_str())
            }
            _ => None,
        })
    }

    /// Union of two vocabularies whose symbols are disjoint. Sorts declared in
    /// both must agree.
    pub fn merge(&self, other: &Vocabulary) -> crate::Result<Vocabulary> {
        let mut out = self.clone();
        for (name, dom) in &other.sorts {
            match out.sorts.get(name) {
                Some(existing) if existing != dom => {
                    return Err(crate::Error::IllSorted(format!(
                        "sort `{name}` is declared differently in the two environments"
                    )))
                }
                Some(_) => {}
                None => {
                    out.sorts.insert(name.clone(), dom.clone());
                }
            }
        }
        if let Some(shared) = self.symbols().intersection(&other.symbols()).next() {
            return Err(crate::Error::SharedAtom(shared.to_string()));
        }
        out.predicates
            .extend(other.predicates.iter().map(|(k, v)| (k.clone(), v.clone())));
        out.functions
            .extend(other.functions.iter().map(|(k, v)| (k.clone(), v.clone())));
        out.data_symbols.extend(other.data_symbols.iter().cloned());
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Binder {
    pub name: String,
    pub sort: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    Eq,
    Ne,
    Le,
    Lt,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Le => "<=",
            CmpOp::Lt => "<",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    pub fn holds<T: PartialOrd>(self, a: &T, b: &T) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Le => a <= b,
            CmpOp::Lt => a < b,
            CmpOp::Ge => a >= b,
            CmpOp::Gt => a > b,
        }
    }

    /// The relation with its sides swapped (`a < b` iff `b > a`).
    pub fn flip(self) -> CmpOp {
        match self {
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Ge => CmpOp::Le,
            CmpOp::Gt => CmpOp::Lt,
            other => other,
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, CmpOp::Lt | CmpOp::Gt | CmpOp::Ne)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Term {
    /// A 0-ary function symbol.
    Const(String),
    /// A bound variable.
    Var(String),
    Lit(Datum),
    App(String, Vec<Term>),
    Add(Vec<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Vec<Term>),
    Neg(Box<Term>),
    /// `sum{vars} body` over finite sorts.
    Sum { vars: Vec<Binder>, body: Box<Term> },
    /// Squared norm: `norm(sum{vs} t)` is the sum of `t²`, `norm(t)` is `t²`.
    Norm(Box<Term>),
}

impl Term {
    pub fn num(r: BigRational) -> Term {
        Term::Lit(Datum::Num(r))
    }

    pub fn int(n: i64) -> Term {
        Term::Lit(Datum::int(n))
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(name.to_string())
    }

    fn is_atomic(&self) -> bool {
        matches!(
            self,
            Term::Const(_) | Term::Var(_) | Term::Lit(_) | Term::App(..) | Term::Norm(_)
        )
    }

    pub(crate) fn visit_symbols<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Term::Const(c) => {
                out.insert(c);
            }
            Term::App(f, args) => {
                out.insert(f);
                args.iter().for_each(|a| a.visit_symbols(out));
            }
            Term::Var(_) | Term::Lit(_) => {}
            Term::Add(ts) | Term::Mul(ts) => ts.iter().for_each(|t| t.visit_symbols(out)),
            Term::Sub(a, b) => {
                a.visit_symbols(out);
                b.visit_symbols(out);
            }
            Term::Neg(t) | Term::Norm(t) => t.visit_symbols(out),
            Term::Sum { body, .. } => body.visit_symbols(out),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Formula {
    True,
    False,
    Atom { pred: String, args: Vec<Term> },
    Cmp { lhs: Term, op: CmpOp, rhs: Term },
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    /// A named formula binding.
    Ref(String),
    /// `implicit` marks free variables closed from the outside.
    Forall { vars: Vec<Binder>, body: Box<Formula>, implicit: bool },
    Exists { vars: Vec<Binder>, body: Box<Formula> },
}

impl Formula {
    pub fn atom(pred: &str) -> Formula {
        Formula::Atom {
            pred: pred.to_string(),
            args: Vec::new(),
        }
    }

    pub fn cmp(lhs: Term, op: CmpOp, rhs: Term) -> Formula {
        Formula::Cmp { lhs, op, rhs }
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(parts: Vec<Formula>) -> Formula {
        Formula::And(parts)
    }

    pub fn or(parts: Vec<Formula>) -> Formula {
        Formula::Or(parts)
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    /// Top-level conjuncts, with nested conjunctions flattened.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            match f {
                Formula::And(parts) => parts.iter().for_each(|p| walk(p, out)),
                Formula::True => {}
                other => out.push(other),
            }
        }
        walk(self, &mut out);
        out
    }

    /// Predicate and function symbols mentioned (named references excluded).
    pub fn symbols(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.visit_symbols(&mut out);
        out
    }

    fn visit_symbols<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Formula::True | Formula::False | Formula::Ref(_) => {}
            Formula::Atom { pred, args } => {
                out.insert(pred);
                args.iter().for_each(|a| a.visit_symbols(out));
            }
            Formula::Cmp { lhs, rhs, .. } => {
                lhs.visit_symbols(out);
                rhs.visit_symbols(out);
            }
            Formula::Not(f) => f.visit_symbols(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.visit_symbols(out)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit_symbols(out);
                b.visit_symbols(out);
            }
            Formula::Forall { body, .. } | Formula::Exists { body, .. } => body.visit_symbols(out),
        }
    }

    pub(crate) fn is_atomic(&self) -> bool {
        matches!(
            self,
            Formula::True | Formula::False | Formula::Atom { .. } | Formula::Ref(_)
        )
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let child = |t: &Term| {
            if t.is_atomic() || matches!(t, Term::Lit(_)) {
                t.to_string()
            } else {
                format!("({t})")
            }
        };
        match self {
            Term::Const(c) | Term::Var(c) => f.write_str(c),
            Term::Lit(d) => d.fmt(f),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Term::Add(ts) => f.write_str(&ts.iter().map(child).collect::<Vec<_>>().join(" + ")),
            Term::Mul(ts) => f.write_str(&ts.iter().map(child).collect::<Vec<_>>().join("*")),
            Term::Sub(a, b) => write!(f, "{} - {}", child(a), child(b)),
            Term::Neg(t) => write!(f, "-{}", child(t)),
            Term::Sum { vars, body } => write!(f, "sum{{{}}} {}", binders(vars), child(body)),
            Term::Norm(t) => write!(f, "norm({t})"),
        }
    }
}

fn binders(vars: &[Binder]) -> String {
    vars.iter()
        .map(|b| format!("{}:{}", b.name, b.sort))
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let child = |g: &Formula| {
            if g.is_atomic() {
                g.to_string()
            } else {
                format!("({g})")
            }
        };
        match self {
            Formula::True => f.write_str("TRUE"),
            Formula::False => f.write_str("FALSE"),
            Formula::Atom { pred, args } if args.is_empty() => f.write_str(pred),
            Formula::Atom { pred, args } => {
                write!(f, "{pred}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Formula::Cmp { lhs, op, rhs } => write!(f, "{lhs} {} {rhs}", op.symbol()),
            Formula::Not(g) => write!(f, "not {}", child(g)),
            Formula::And(gs) if gs.is_empty() => f.write_str("TRUE"),
            Formula::Or(gs) if gs.is_empty() => f.write_str("FALSE"),
            Formula::And(gs) => f.write_str(&gs.iter().map(child).collect::<Vec<_>>().join(" and ")),
            Formula::Or(gs) => f.write_str(&gs.iter().map(child).collect::<Vec<_>>().join(" or ")),
            Formula::Implies(a, b) => write!(f, "{} => {}", child(a), child(b)),
            Formula::Iff(a, b) => write!(f, "{} <=> {}", child(a), child(b)),
            Formula::Ref(name) => f.write_str(name),
            Formula::Forall { body, implicit: true, .. } => body.fmt(f),
            Formula::Forall { vars, body, .. } => write!(f, "forall{{{}}} {}", binders(vars), child(body)),
            Formula::Exists { vars, body } => write!(f, "exists{{{}}} {}", binders(vars), child(body)),
        }
    }
}

/// Which logics a program draws on; several may be combined (`QF_LIA;PL`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Logic {
    /// Classical propositional logic.
    Pl,
    /// Propositional logic under minimal-model satisfaction.
    PlMin,
    /// First-order logic over finite typed domains (Herbrand semantics).
    Fol,
    /// Quantifier-free integer arithmetic over finite typed domains.
    QfLia,
    /// Linear (and polynomial) real arithmetic.
    Lra,
}

impl Logic {
    pub fn keyword(self) -> &'static str {
        match self {
            Logic::Pl => "PL",
            Logic::PlMin => "PL-MIN",
            Logic::Fol => "FOL",
            Logic::QfLia => "QF_LIA",
            Logic::Lra => "LRA",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Logic> {
        Some(match s {
            "PL" => Logic::Pl,
            "PL-MIN" | "PL_MIN" => Logic::PlMin,
            "FOL" | "FOL-FIN" => Logic::Fol,
            "QF_LIA" => Logic::QfLia,
            "LRA" | "QF_LRA" => Logic::Lra,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheorySpec {
    pub logics: Vec<Logic>,
}

impl TheorySpec {
    pub fn new(logics: Vec<Logic>) -> Self {
        TheorySpec { logics }
    }

    pub fn pl() -> Self {
        TheorySpec::new(vec![Logic::Pl])
    }

    pub fn has(&self, l: Logic) -> bool {
        self.logics.contains(&l)
    }

    pub fn minimal_models(&self) -> bool {
        self.has(Logic::PlMin)
    }
}

impl fmt::Display for TheorySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.logics.iter().map(|l| l.keyword()).collect();
        f.write_str(&names.join(";"))
    }
}

/// A ground atom `p(d1,...,dn)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroundAtom {
    pub pred: String,
    pub args: Vec<Datum>,
}

impl GroundAtom {
    pub fn prop(name: &str) -> Self {
        GroundAtom {
            pred: name.to_string(),
            args: Vec::new(),
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pred)?;
        if !self.args.is_empty() {
            let args: Vec<_> = self.args.iter().map(|a| a.to_string()).collect();
            write!(f, "({})", args.join(","))?;
        }
        Ok(())
    }
}

/// A model: values for functions/constants and the set of true ground atoms.
///
/// Atoms not in `true_atoms` are false; `atoms` lists every ground atom the
/// model decides (used to print negative literals).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interpretation {
    pub functions: BTreeMap<String, BTreeMap<Vec<Datum>, Datum>>,
    pub true_atoms: BTreeSet<GroundAtom>,
    pub atoms: BTreeSet<GroundAtom>,
}

impl Interpretation {
    pub fn set_const(&mut self, name: &str, value: Datum) {
        self.set_entry(name, Vec::new(), value);
    }

    pub fn set_entry(&mut self, name: &str, args: Vec<Datum>, value: Datum) {
        self.functions
            .entry(name.to_string())
            .or_default()
            .insert(args, value);
    }

    pub fn set_atom(&mut self, atom: GroundAtom, truth: bool) {
        if truth {
            self.true_atoms.insert(atom.clone());
        } else {
            self.true_atoms.remove(&atom);
        }
        self.atoms.insert(atom);
    }

    pub fn holds(&self, atom: &GroundAtom) -> bool {
        self.true_atoms.contains(atom)
    }

    pub fn value(&self, name: &str, args: &[Datum]) -> Option<&Datum> {
        self.functions.get(name)?.get(args)
    }

    /// `p`, `not q`, `x1=1`, ... in canonical order.
    pub fn literals(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .atoms
            .iter()
            .map(|a| {
                if self.true_atoms.contains(a) {
                    a.to_string()
                } else {
                    format!("not {a}")
                }
            })
            .collect();
        for (name, table) in &self.functions {
            for (args, v) in table {
                if args.is_empty() {
                    out.push(format!("{name}={v}"));
                } else {
                    let a: Vec<_> = args.iter().map(|d| d.to_string()).collect();
                    out.push(format!("{name}({})={v}", a.join(",")));
                }
            }
        }
        out
    }

    /// Restriction to the given symbols.
    pub fn restrict(&self, symbols: &BTreeSet<&str>) -> Interpretation {
        Interpretation {
            functions: self
                .functions
                .iter()
                .filter(|(k, _)| symbols.contains(k.as_str()))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
            true_atoms: self
                .true_atoms
                .iter()
                .filter(|a| symbols.contains(a.pred.as_str()))
                .cloned()
                .collect(),
            atoms: self
                .atoms
                .iter()
                .filter(|a| symbols.contains(a.pred.as_str()))
                .cloned()
                .collect(),
        }
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.literals().join(", "))
    }
}
