use std::collections::BTreeMap;

use indexmap::IndexMap;
use num_rational::BigRational;

use super::lexer::{lex, Tok, Token};
use super::{
    Components, Diagnostic, Diagnostics, Literal, MeasureKind, MeasureSpec, Pos, Program, Query, WeightMode,
    WeightSpec,
};
use crate::logic::{
    Binder, CmpOp, Datum, Formula, FunctionSig, GroundAtom, Logic, SortDomain, Term, TheorySpec, Vocabulary,
    REAL_SORT,
};
use crate::scalar::parse_rational;
use crate::semiring::SemiringSpec;

type Resolver<'r> = dyn Fn(&str) -> Result<Program, String> + 'r;

const KEYWORDS: &[&str] = &[
    "set-logic",
    "set-algebra",
    "set-type",
    "set-option",
    "declare-predicate",
    "declare-function",
    "declare-weight",
    "declare-data",
    "declare-measure",
    "count",
    "count-conditional",
    "compose",
];

/// Parses a program. `(compose ...)` is rejected; use [`parse_with`] or
/// [`super::load`] for wrappers.
pub fn parse(text: &str) -> Result<Program, Diagnostics> {
    parse_with(text, &|path| Err(format!("cannot open `{path}` without a file context")))
}

/// Parses a program, loading composed environments through `resolver`.
pub fn parse_with(text: &str, resolver: &Resolver<'_>) -> Result<Program, Diagnostics> {
    let (toks, mut diags) = lex(text);
    let mut p = Parser {
        src: text,
        toks,
        i: 0,
        end: 0,
        diags: Vec::new(),
        resolver,
        theory: None,
        algebra: None,
        voc: Vocabulary::default(),
        bindings: IndexMap::new(),
        imported: IndexMap::new(),
        weights: WeightSpec::default(),
        pending_literals: Vec::new(),
        first_factorized: None,
        query: None,
        options: BTreeMap::new(),
        bounds: BTreeMap::new(),
        components: None,
    };
    p.end = p.toks.len();
    p.program();
    diags.append(&mut p.diags);
    let program = p.finish(&mut diags);
    diags.sort_by_key(|d| d.pos);
    match program {
        Some(prog) if diags.is_empty() => Ok(prog),
        _ => {
            if diags.is_empty() {
                diags.push(Diagnostic::new(Pos { line: 1, col: 1 }, "invalid program"));
            }
            Err(Diagnostics(diags))
        }
    }
}

/// Unelaborated expression.
#[derive(Clone, Debug)]
struct E {
    pos: Pos,
    kind: Ex,
}

#[derive(Clone, Debug)]
enum Ex {
    Name(String),
    Call(String, Vec<E>),
    Num(BigRational),
    Bool(bool),
    Not(Box<E>),
    And(Vec<E>),
    Or(Vec<E>),
    Implies(Box<E>, Box<E>),
    Iff(Box<E>, Box<E>),
    Cmp(Box<E>, CmpOp, Box<E>),
    Add(Vec<E>),
    Sub(Box<E>, Box<E>),
    Mul(Vec<E>),
    Neg(Box<E>),
    Sum(Vec<RawBinder>, Box<E>),
    Quant(bool, Vec<RawBinder>, Box<E>),
    Norm(Box<E>),
}

#[derive(Clone, Debug)]
struct RawBinder {
    name: String,
    sort: Option<String>,
    pos: Pos,
}

struct Fail;
type PResult<T> = Result<T, Fail>;

struct Parser<'s, 'r> {
    src: &'s str,
    toks: Vec<Token>,
    i: usize,
    /// Exclusive token bound for the construct being parsed.
    end: usize,
    diags: Vec<Diagnostic>,
    resolver: &'r Resolver<'r>,
    theory: Option<TheorySpec>,
    algebra: Option<SemiringSpec>,
    voc: Vocabulary,
    bindings: IndexMap<String, Formula>,
    imported: IndexMap<String, Formula>,
    weights: WeightSpec,
    pending_literals: Vec<(Literal, BigRational, Pos)>,
    first_factorized: Option<Pos>,
    query: Option<(Query, Pos)>,
    options: BTreeMap<String, String>,
    bounds: BTreeMap<String, (BigRational, BigRational)>,
    components: Option<Box<Components>>,
}

/// Scope used while elaborating one top-level formula.
#[derive(Default)]
struct Scope {
    vars: Vec<(String, Option<String>)>,
    implicit: Option<Vec<Binder>>,
}

impl Scope {
    fn top() -> Self {
        Scope {
            vars: Vec::new(),
            implicit: Some(Vec::new()),
        }
    }

    fn lookup(&self, name: &str) -> Option<usize> {
        self.vars.iter().rposition(|(n, _)| n == name)
    }
}

impl<'s, 'r> Parser<'s, 'r> {
    // ---- token plumbing ----

    fn peek(&self) -> Option<&Tok> {
        (self.i < self.end).then(|| &self.toks[self.i].tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        (self.i + k < self.end).then(|| &self.toks[self.i + k].tok)
    }

    fn pos(&self) -> Pos {
        if self.i < self.toks.len() {
            self.toks[self.i].pos
        } else {
            self.eof_pos()
        }
    }

    fn eof_pos(&self) -> Pos {
        match self.toks.last() {
            None => Pos { line: 1, col: 1 },
            Some(t) => {
                let text = &self.src[t.start..t.end];
                Pos {
                    line: t.pos.line + text.matches('\n').count(),
                    col: t.pos.col + text.chars().count(),
                }
            }
        }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.peek().cloned();
        if t.is_some() {
            self.i += 1;
        }
        t
    }

    fn error<T>(&mut self, pos: Pos, msg: impl Into<String>) -> PResult<T> {
        self.diags.push(Diagnostic::new(pos, msg));
        Err(Fail)
    }

    fn expect(&mut self, want: Tok, what: &str) -> PResult<()> {
        match self.peek() {
            Some(t) if *t == want => {
                self.i += 1;
                Ok(())
            }
            Some(t) => {
                let msg = format!("expected {what}, found {}", describe(t));
                self.error(self.pos(), msg)
            }
            None => self.error(self.pos(), format!("expected {what}")),
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Pos)> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.i += 1;
                Ok((s, pos))
            }
            Some(t) => {
                let msg = format!("expected {what}, found {}", describe(t));
                self.error(pos, msg)
            }
            None => self.error(pos, format!("expected {what}")),
        }
    }

    /// Optionally signed number.
    fn number(&mut self, what: &str) -> PResult<BigRational> {
        let pos = self.pos();
        let neg = if self.peek() == Some(&Tok::Op("-")) {
            self.i += 1;
            true
        } else {
            false
        };
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                let r = parse_rational(&n);
                self.i += 1;
                match r {
                    Some(r) => Ok(if neg { -r } else { r }),
                    None => self.error(pos, format!("malformed number `{n}`")),
                }
            }
            _ => self.error(pos, format!("expected {what}")),
        }
    }

    /// Index of the `)` matching the `(` at `open`, within the whole stream.
    fn matching(&self, open: usize) -> Option<usize> {
        let mut depth = 0i32;
        for (k, t) in self.toks.iter().enumerate().skip(open) {
            match t.tok {
                Tok::LParen => depth += 1,
                Tok::RParen => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(k);
                    }
                }
                _ => {}
            }
        }
        None
    }

    fn at_directive(&self) -> bool {
        matches!(self.peek(), Some(Tok::LParen))
            && matches!(self.peek_at(1), Some(Tok::Ident(k)) if KEYWORDS.contains(&k.as_str()))
    }

    fn at_binding(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(_))) && matches!(self.peek_at(1), Some(Tok::Assign))
    }

    fn recover(&mut self) {
        self.i += 1;
        while self.i < self.end && !self.at_directive() && !self.at_binding() {
            self.i += 1;
        }
    }

    // ---- top level ----

    fn program(&mut self) {
        while self.i < self.end {
            if self.at_directive() {
                let open = self.i;
                match self.matching(open) {
                    Some(close) => {
                        let saved_end = self.end;
                        self.end = close;
                        self.i = open + 1;
                        let ok = self.directive();
                        if ok.is_ok() && self.i < close {
                            let pos = self.pos();
                            let msg = format!("unexpected {} in directive", describe(&self.toks[self.i].tok));
                            self.diags.push(Diagnostic::new(pos, msg));
                        }
                        self.end = saved_end;
                        self.i = close + 1;
                    }
                    None => {
                        let pos = self.toks[open].pos;
                        self.diags.push(Diagnostic::new(pos, "unbalanced parenthesis"));
                        self.i = self.end;
                    }
                }
            } else if self.at_binding() {
                if self.binding().is_err() {
                    while self.i < self.end && !self.at_directive() && !self.at_binding() {
                        self.i += 1;
                    }
                }
            } else {
                let pos = self.pos();
                let msg = format!(
                    "expected a directive or `NAME = formula`, found {}",
                    describe(&self.toks[self.i].tok)
                );
                self.diags.push(Diagnostic::new(pos, msg));
                self.recover();
            }
        }
    }

    fn binding(&mut self) -> PResult<()> {
        let (name, pos) = self.ident("a name")?;
        self.i += 1;
        let e = self.expr()?;
        if !(self.i >= self.end || self.at_directive() || self.at_binding()) {
            let p = self.pos();
            let msg = format!("unexpected {} after formula", describe(&self.toks[self.i].tok));
            return self.error(p, msg);
        }
        if self.voc.has_symbol(&name) {
            return self.error(pos, format!("`{name}` is already declared as a symbol"));
        }
        if self.bindings.contains_key(&name) || self.imported.contains_key(&name) {
            return self.error(pos, format!("formula `{name}` is defined twice"));
        }
        let f = self.top_formula(&e)?;
        self.bindings.insert(name, f);
        Ok(())
    }

    fn directive(&mut self) -> PResult<()> {
        let (kw, pos) = self.ident("a directive")?;
        match kw.as_str() {
            "set-logic" => self.set_logic(),
            "set-algebra" => self.set_algebra(),
            "set-type" => self.set_type(),
            "set-option" => self.set_option(),
            "declare-predicate" => self.declare_predicate(),
            "declare-function" => self.declare_function(),
            "declare-data" => self.declare_data(),
            "declare-measure" => self.declare_measure(),
            "declare-weight" => self.declare_weight(pos),
            "count" => {
                let e = self.expr()?;
                let f = self.top_formula(&e)?;
                self.set_query(Query::Count(f), pos)
            }
            "count-conditional" => {
                let phi = self.expr()?;
                let q = self.expr()?;
                let component = if self.peek().is_some() {
                    let p = self.pos();
                    let n = self.number("a component (1 or 2)")?;
                    if n != crate::scalar::int(1) && n != crate::scalar::int(2) {
                        return self.error(p, "component must be 1 or 2");
                    }
                    Some(if n == crate::scalar::int(1) { 1 } else { 2 })
                } else {
                    None
                };
                let phi = self.top_formula(&phi)?;
                let q = self.top_formula(&q)?;
                self.set_query(Query::Conditional { phi, q, component }, pos)
            }
            "compose" => self.compose(pos),
            _ => self.error(pos, format!("unknown directive `{kw}`")),
        }
    }

    fn set_query(&mut self, q: Query, pos: Pos) -> PResult<()> {
        if self.query.is_some() {
            return self.error(pos, "duplicate (count ...)");
        }
        self.query = Some((q, pos));
        Ok(())
    }

    fn set_logic(&mut self) -> PResult<()> {
        let mut logics = Vec::new();
        loop {
            let (name, pos) = self.ident("a logic")?;
            match Logic::from_keyword(&name) {
                Some(l) => logics.push(l),
                None => return self.error(pos, format!("unknown logic `{name}`")),
            }
            if self.peek() == Some(&Tok::Semi) {
                self.i += 1;
            } else {
                break;
            }
        }
        self.theory = Some(TheorySpec::new(logics));
        Ok(())
    }

    fn set_algebra(&mut self) -> PResult<()> {
        let pos = self.pos();
        self.expect(Tok::LBracket, "`[`")?;
        let start = self.toks[self.i - 1].start;
        while self.peek().is_some_and(|t| *t != Tok::RBracket) {
            self.i += 1;
        }
        self.expect(Tok::RBracket, "`]`")?;
        let text: String = self.src[start..self.toks[self.i - 1].end]
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect();
        match SemiringSpec::parse(&text) {
            Ok(s) => {
                self.algebra = Some(s);
                Ok(())
            }
            Err(e) => self.error(pos, e),
        }
    }

    fn set_type(&mut self) -> PResult<()> {
        let (name, pos) = self.ident("a sort name")?;
        self.expect(Tok::Assign, "`=`")?;
        if name == REAL_SORT || self.voc.sorts.contains_key(&name) {
            return self.error(pos, format!("sort `{name}` is already declared"));
        }
        if let Some(Tok::Ident(w)) = self.peek() {
            if w == REAL_SORT {
                self.i += 1;
                self.voc.sorts.insert(name, SortDomain::Real);
                return Ok(());
            }
        }
        self.expect(Tok::LBrace, "`{`")?;
        let mut items: Vec<Option<Datum>> = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Ellipsis) => {
                    self.i += 1;
                    items.push(None);
                }
                Some(Tok::Ident(s)) => {
                    let s = s.clone();
                    self.i += 1;
                    items.push(Some(Datum::Sym(s)));
                }
                _ => {
                    let n = self.number("a sort element")?;
                    items.push(Some(Datum::Num(n)));
                }
            }
            if self.peek() == Some(&Tok::Comma) {
                self.i += 1;
            } else {
                break;
            }
        }
        self.expect(Tok::RBrace, "`}`")?;
        let domain = match items.as_slice() {
            [Some(Datum::Num(lo)), None, Some(Datum::Num(hi))] => {
                let as_int = |r: &BigRational| -> Option<i64> {
                    use num_traits::ToPrimitive;
                    r.is_integer().then(|| r.to_integer().to_i64()).flatten()
                };
                match (as_int(lo), as_int(hi)) {
                    (Some(lo), Some(hi)) if lo <= hi => SortDomain::Range { lo, hi },
                    _ => return self.error(pos, "a range `{lo,...,hi}` needs integers with lo <= hi"),
                }
            }
            _ if items.iter().any(Option::is_none) => {
                return self.error(pos, "`...` is only allowed as `{lo,...,hi}`")
            }
            _ => {
                let elems: Vec<Datum> = items.into_iter().flatten().collect();
                let mut seen = std::collections::BTreeSet::new();
                for d in &elems {
                    if !seen.insert(d) {
                        return self.error(pos, format!("element `{d}` listed twice"));
                    }
                }
                SortDomain::Enum(elems)
            }
        };
        self.voc.sorts.insert(name, domain);
        Ok(())
    }

    fn set_option(&mut self) -> PResult<()> {
        let (key, _) = self.ident("an option name")?;
        if key == "bounds" {
            let (var, pos) = self.ident("a constant")?;
            let lo = self.number("a lower bound")?;
            let hi = self.number("an upper bound")?;
            if !self.voc.functions.contains_key(&var) {
                return self.error(pos, format!("undeclared symbol `{var}`"));
            }
            if lo > hi {
                return self.error(pos, "lower bound exceeds upper bound");
            }
            self.bounds.insert(var, (lo, hi));
            return Ok(());
        }
        let start = self.i;
        self.i = self.end;
        let value = if start < self.end {
            self.src[self.toks[start].start..self.toks[self.end - 1].end].trim().to_string()
        } else {
            String::new()
        };
        self.options.insert(key, value);
        Ok(())
    }

    fn sort_list(&mut self) -> PResult<Vec<String>> {
        self.expect(Tok::LParen, "`(`")?;
        let mut sorts = Vec::new();
        if self.peek() != Some(&Tok::RParen) {
            loop {
                let (s, pos) = self.ident("a sort")?;
                self.check_sort(&s, pos)?;
                sorts.push(s);
                if self.peek() == Some(&Tok::Comma) {
                    self.i += 1;
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(sorts)
    }

    fn check_sort(&mut self, s: &str, pos: Pos) -> PResult<()> {
        if self.voc.sort(s).is_none() {
            return self.error(pos, format!("undeclared sort `{s}`"));
        }
        Ok(())
    }

    fn fresh_symbol(&mut self, name: &str, pos: Pos) -> PResult<()> {
        if self.voc.has_symbol(name) || self.bindings.contains_key(name) || self.imported.contains_key(name) {
            return self.error(pos, format!("`{name}` is already declared"));
        }
        if is_reserved(name) {
            return self.error(pos, format!("`{name}` is a reserved word"));
        }
        Ok(())
    }

    fn declare_predicate(&mut self) -> PResult<()> {
        let (name, pos) = self.ident("a predicate name")?;
        self.fresh_symbol(&name, pos)?;
        let args = self.sort_list()?;
        for a in &args {
            if a == REAL_SORT || matches!(self.voc.sort(a), Some(SortDomain::Real)) {
                return self.error(pos, "predicate arguments must range over finite sorts");
            }
        }
        self.voc.predicates.insert(name, args);
        Ok(())
    }

    fn declare_function(&mut self) -> PResult<()> {
        let (name, pos) = self.ident("a function name")?;
        self.fresh_symbol(&name, pos)?;
        let args = self.sort_list()?;
        for a in &args {
            if matches!(self.voc.sort(a), Some(SortDomain::Real)) {
                return self.error(pos, "function arguments must range over finite sorts");
            }
        }
        let (result, rpos) = self.ident("a result sort")?;
        self.check_sort(&result, rpos)?;
        self.voc.functions.insert(name, FunctionSig { args, result });
        Ok(())
    }

    fn declare_data(&mut self) -> PResult<()> {
        if self.peek().is_none() {
            return self.error(self.pos(), "expected predicate names");
        }
        while self.peek().is_some() {
            let (name, pos) = self.ident("a predicate name")?;
            if !self.voc.predicates.contains_key(&name) {
                return self.error(pos, format!("`{name}` is not a declared predicate"));
            }
            self.voc.data_symbols.insert(name);
        }
        Ok(())
    }

    fn set_mode(&mut self, mode: WeightMode, pos: Pos) -> PResult<()> {
        match self.weights.mode {
            Some(m) if m != mode => self.error(pos, "mixed weight modes"),
            _ => {
                self.weights.mode = Some(mode);
                Ok(())
            }
        }
    }

    fn declare_measure(&mut self) -> PResult<()> {
        let (name, pos) = self.ident("a constant")?;
        let (kind, kpos) = self.ident("LEBESGUE or COUNTING")?;
        let Some(sig) = self.voc.functions.get(&name).cloned() else {
            return self.error(pos, format!("undeclared symbol `{name}`"));
        };
        if !sig.args.is_empty() {
            return self.error(pos, "measures apply to constants only");
        }
        let real = matches!(self.voc.sort(&sig.result), Some(SortDomain::Real));
        let kind = match kind.as_str() {
            "LEBESGUE" if real => MeasureKind::Lebesgue,
            "COUNTING" if !real => MeasureKind::Counting,
            "LEBESGUE" => return self.error(kpos, "the Lebesgue measure needs a REAL constant"),
            "COUNTING" => return self.error(kpos, "the counting measure needs a finite sort"),
            other => return self.error(kpos, format!("unknown measure `{other}`")),
        };
        self.set_mode(WeightMode::Measure, pos)?;
        if self.weights.measures.contains_key(&name) {
            return self.error(pos, format!("duplicate measure for `{name}`"));
        }
        self.weights.measures.insert(name, MeasureSpec { kind, sort: sig.result });
        Ok(())
    }

    fn declare_weight(&mut self, pos: Pos) -> PResult<()> {
        let start = self.i;
        let diag_mark = self.diags.len();
        if let Some((lit, w)) = self.try_factorized() {
            self.set_mode(WeightMode::Factorized, pos)?;
            if self.pending_literals.iter().any(|(l, _, _)| *l == lit) {
                return self.error(pos, format!("duplicate weight for literal {lit}"));
            }
            self.first_factorized.get_or_insert(pos);
            self.pending_literals.push((lit, w, pos));
            return Ok(());
        }
        self.diags.truncate(diag_mark);
        self.i = start;
        let guard = self.expr()?;
        let weight = self.expr()?;
        self.set_mode(WeightMode::ModelLevel, pos)?;
        let guard = self.top_formula(&guard)?;
        let mut scope = Scope::default();
        let weight = self.term(&weight, &mut scope, None)?;
        self.weights.guarded.push((guard, weight));
        Ok(())
    }

    /// `(LIT w)` where LIT is a ground atom or `(neg ATOM)`.
    fn try_factorized(&mut self) -> Option<(Literal, BigRational)> {
        if self.peek() != Some(&Tok::LParen) || self.end - self.i < 3 {
            return None;
        }
        let close = self.matching(self.i)?;
        if close + 1 != self.end {
            return None;
        }
        self.i += 1;
        let positive = if self.peek() == Some(&Tok::LParen) {
            let inner_close = self.matching(self.i)?;
            self.i += 1;
            let Some(Tok::Ident(w)) = self.peek().cloned() else { return None };
            if w != "neg" && w != "not" {
                return None;
            }
            self.i += 1;
            let atom = self.ground_atom(inner_close)?;
            if self.i != inner_close {
                return None;
            }
            self.i += 1;
            return self.weight_tail(close).map(|w| (Literal { atom, positive: false }, w));
        } else {
            true
        };
        let atom = self.ground_atom(close)?;
        self.weight_tail(close).map(|w| (Literal { atom, positive }, w))
    }

    fn weight_tail(&mut self, close: usize) -> Option<BigRational> {
        let saved = self.end;
        self.end = close;
        let w = self.number("a weight").ok();
        let done = self.i == close;
        self.end = saved;
        if done {
            self.i = close + 1;
            w
        } else {
            None
        }
    }

    fn ground_atom(&mut self, limit: usize) -> Option<GroundAtom> {
        let Some(Tok::Ident(name)) = self.peek().cloned() else { return None };
        let sorts = self.voc.predicates.get(&name)?.clone();
        self.i += 1;
        let mut args = Vec::new();
        if !sorts.is_empty() {
            if self.peek() != Some(&Tok::LParen) {
                return None;
            }
            self.i += 1;
            for (k, s) in sorts.iter().enumerate() {
                if k > 0 {
                    if self.peek() != Some(&Tok::Comma) {
                        return None;
                    }
                    self.i += 1;
                }
                let d = match self.peek().cloned() {
                    Some(Tok::Ident(sym)) => {
                        self.i += 1;
                        Datum::Sym(sym)
                    }
                    _ => Datum::Num(self.number("an element").ok()?),
                };
                if !self.voc.sort(s).is_some_and(|dom| dom.contains(&d)) {
                    return None;
                }
                args.push(d);
            }
            if self.peek() != Some(&Tok::RParen) {
                return None;
            }
            self.i += 1;
        }
        (self.i <= limit).then_some(GroundAtom { pred: name, args })
    }

    fn compose(&mut self, pos: Pos) -> PResult<()> {
        if self.components.is_some() {
            return self.error(pos, "duplicate (compose ...)");
        }
        if !self.voc.symbols().is_empty() || !self.bindings.is_empty() {
            return self.error(pos, "(compose ...) must come before declarations and formulas");
        }
        let mut paths = Vec::new();
        while self.i < self.end {
            let start = self.toks[self.i].start;
            let first = self.i;
            self.i += 1;
            while self.i < self.end && self.toks[self.i].start == self.toks[self.i - 1].end {
                self.i += 1;
            }
            let text = match &self.toks[first].tok {
                Tok::Str(s) if self.i == first + 1 => s.clone(),
                _ => self.src[start..self.toks[self.i - 1].end].to_string(),
            };
            paths.push((text, self.toks[first].pos));
        }
        if paths.len() != 2 {
            return self.error(pos, "(compose ...) takes two program paths");
        }
        let mut loaded = Vec::new();
        for (path, ppos) in &paths {
            match (self.resolver)(path) {
                Ok(p) => loaded.push(p),
                Err(e) => return self.error(*ppos, e),
            }
        }
        let second = loaded.pop().unwrap();
        let first = loaded.pop().unwrap();
        for p in [&first, &second] {
            if p.components.is_some() {
                return self.error(pos, "nested composition is not supported");
            }
        }
        let voc = match first.vocabulary.merge(&second.vocabulary) {
            Ok(v) => v,
            Err(e) => return self.error(pos, e.to_string()),
        };
        let mut logics = first.theory.logics.clone();
        for l in &second.theory.logics {
            if !logics.contains(l) {
                logics.push(*l);
            }
        }
        self.voc = voc;
        self.theory = Some(TheorySpec::new(logics));
        self.algebra = Some(SemiringSpec::compose(&first.algebra, &second.algebra));
        self.imported = first.all_bindings();
        for (k, v) in second.all_bindings() {
            if self.imported.contains_key(&k) {
                return self.error(pos, format!("both environments define formula `{k}`"));
            }
            self.imported.insert(k, v);
        }
        self.components = Some(Box::new(Components {
            paths: (paths[0].0.clone(), paths[1].0.clone()),
            first,
            second,
        }));
        Ok(())
    }

    fn finish(&mut self, diags: &mut Vec<Diagnostic>) -> Option<Program> {
        let eof = self.eof_pos();
        let query = match self.query.take() {
            Some((q, _)) => Some(q),
            None => {
                diags.push(Diagnostic::new(eof, "missing (count ...)"));
                None
            }
        };
        if self.components.is_none() {
            if self.theory.is_none() {
                diags.push(Diagnostic::new(eof, "missing (set-logic ...)"));
            }
            if self.algebra.is_none() {
                diags.push(Diagnostic::new(eof, "missing (set-algebra ...)"));
            }
        } else if self.weights.mode.is_some() {
            diags.push(Diagnostic::new(eof, "weights belong in the composed environments"));
        }
        let algebra = self.algebra.clone()?;
        if let Some(pos) = self.first_factorized {
            if algebra.times.is_none() {
                diags.push(Diagnostic::new(pos, format!("factorized weights need ⊗, but {algebra} has none")));
            }
        }
        for (lit, w, pos) in std::mem::take(&mut self.pending_literals) {
            match algebra.value_from_number(&w) {
                Ok(v) => {
                    self.weights.literals.insert(lit, v);
                }
                Err(e) => diags.push(Diagnostic::new(pos, e.to_string())),
            }
        }
        Some(Program {
            theory: self.theory.clone()?,
            algebra,
            vocabulary: std::mem::take(&mut self.voc),
            bindings: std::mem::take(&mut self.bindings),
            weights: std::mem::take(&mut self.weights),
            query: query?,
            options: std::mem::take(&mut self.options),
            bounds: std::mem::take(&mut self.bounds),
            components: self.components.take(),
        })
    }

    // ---- expressions ----

    fn expr(&mut self) -> PResult<E> {
        self.iff()
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == w)
    }

    fn iff(&mut self) -> PResult<E> {
        let mut l = self.implies()?;
        while self.peek() == Some(&Tok::Op("<=>")) {
            let pos = self.pos();
            self.i += 1;
            let r = self.implies()?;
            l = E { pos, kind: Ex::Iff(Box::new(l), Box::new(r)) };
        }
        Ok(l)
    }

    fn implies(&mut self) -> PResult<E> {
        let l = self.or()?;
        if self.peek() == Some(&Tok::Op("=>")) {
            let pos = self.pos();
            self.i += 1;
            let r = self.implies()?;
            return Ok(E { pos, kind: Ex::Implies(Box::new(l), Box::new(r)) });
        }
        Ok(l)
    }

    fn or(&mut self) -> PResult<E> {
        let first = self.and()?;
        let pos = first.pos;
        let mut items = vec![first];
        while self.is_word("or") {
            self.i += 1;
            items.push(self.and()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { E { pos, kind: Ex::Or(items) } })
    }

    fn and(&mut self) -> PResult<E> {
        let first = self.unary()?;
        let pos = first.pos;
        let mut items = vec![first];
        while self.is_word("and") {
            self.i += 1;
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { E { pos, kind: Ex::And(items) } })
    }

    fn unary(&mut self) -> PResult<E> {
        let pos = self.pos();
        if self.is_word("not") || self.is_word("neg") {
            self.i += 1;
            let inner = self.unary()?;
            return Ok(E { pos, kind: Ex::Not(Box::new(inner)) });
        }
        if (self.is_word("forall") || self.is_word("exists")) && self.peek_at(1) == Some(&Tok::LBrace) {
            let forall = self.is_word("forall");
            self.i += 1;
            let binders = self.binders()?;
            let body = self.unary()?;
            return Ok(E { pos, kind: Ex::Quant(forall, binders, Box::new(body)) });
        }
        self.comparison()
    }

    fn binders(&mut self) -> PResult<Vec<RawBinder>> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut out = Vec::new();
        loop {
            let (name, pos) = self.ident("a variable")?;
            let sort = if self.peek() == Some(&Tok::Colon) {
                self.i += 1;
                let (s, spos) = self.ident("a sort")?;
                self.check_sort(&s, spos)?;
                Some(s)
            } else {
                None
            };
            out.push(RawBinder { name, sort, pos });
            if self.peek() == Some(&Tok::Comma) {
                self.i += 1;
            } else {
                break;
            }
        }
        self.expect(Tok::RBrace, "`}`")?;
        Ok(out)
    }

    fn cmp_op(&self) -> Option<CmpOp> {
        Some(match self.peek()? {
            Tok::Op("==") => CmpOp::Eq,
            Tok::Op("!=") => CmpOp::Ne,
            Tok::Op("<=") => CmpOp::Le,
            Tok::Op("<") => CmpOp::Lt,
            Tok::Op(">=") => CmpOp::Ge,
            Tok::Op(">") => CmpOp::Gt,
            _ => return None,
        })
    }

    fn comparison(&mut self) -> PResult<E> {
        let first = self.additive()?;
        let mut operands = vec![first];
        let mut ops = Vec::new();
        while let Some(op) = self.cmp_op() {
            let pos = self.pos();
            self.i += 1;
            ops.push((op, pos));
            operands.push(self.additive()?);
        }
        if ops.is_empty() {
            return Ok(operands.pop().unwrap());
        }
        let mut parts: Vec<E> = ops
            .iter()
            .enumerate()
            .map(|(k, (op, pos))| E {
                pos: *pos,
                kind: Ex::Cmp(Box::new(operands[k].clone()), *op, Box::new(operands[k + 1].clone())),
            })
            .collect();
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            E { pos: parts[0].pos, kind: Ex::And(parts) }
        })
    }

    fn additive(&mut self) -> PResult<E> {
        let mut acc = self.multiplicative()?;
        let mut in_sum = false;
        loop {
            match self.peek() {
                Some(Tok::Op("+")) => {
                    self.i += 1;
                    let r = self.multiplicative()?;
                    match (&mut acc.kind, in_sum) {
                        (Ex::Add(items), true) => items.push(r),
                        _ => {
                            acc = E { pos: acc.pos, kind: Ex::Add(vec![acc, r]) };
                            in_sum = true;
                        }
                    }
                }
                Some(Tok::Op("-")) => {
                    self.i += 1;
                    let r = self.multiplicative()?;
                    acc = E { pos: acc.pos, kind: Ex::Sub(Box::new(acc), Box::new(r)) };
                    in_sum = false;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn multiplicative(&mut self) -> PResult<E> {
        let first = self.prefix()?;
        let pos = first.pos;
        let mut items = vec![first];
        while self.peek() == Some(&Tok::Op("*")) {
            self.i += 1;
            items.push(self.prefix()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { E { pos, kind: Ex::Mul(items) } })
    }

    fn prefix(&mut self) -> PResult<E> {
        let pos = self.pos();
        if self.peek() == Some(&Tok::Op("-")) {
            self.i += 1;
            let inner = self.prefix()?;
            return Ok(match inner.kind {
                Ex::Num(r) => E { pos, kind: Ex::Num(-r) },
                other => E { pos, kind: Ex::Neg(Box::new(E { pos: inner.pos, kind: other })) },
            });
        }
        if self.is_word("sum") && self.peek_at(1) == Some(&Tok::LBrace) {
            self.i += 1;
            let binders = self.binders()?;
            let body = self.additive()?;
            return Ok(E { pos, kind: Ex::Sum(binders, Box::new(body)) });
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<E> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Num(n)) => match parse_rational(&n) {
                Some(r) => Ok(E { pos, kind: Ex::Num(r) }),
                None => self.error(pos, format!("malformed number `{n}`")),
            },
            Some(Tok::Ident(name)) => {
                match name.as_str() {
                    "TRUE" | "true" => return Ok(E { pos, kind: Ex::Bool(true) }),
                    "FALSE" | "false" => return Ok(E { pos, kind: Ex::Bool(false) }),
                    _ => {}
                }
                if is_reserved(&name) {
                    return self.error(pos, format!("unexpected `{name}`"));
                }
                if name == "norm" && self.peek() == Some(&Tok::LParen) {
                    self.i += 1;
                    let inner = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(E { pos, kind: Ex::Norm(Box::new(inner)) });
                }
                if self.peek() == Some(&Tok::LParen) && self.callable(&name) {
                    self.i += 1;
                    let mut args = Vec::new();
                    if self.peek() != Some(&Tok::RParen) {
                        loop {
                            args.push(self.expr()?);
                            if self.peek() == Some(&Tok::Comma) {
                                self.i += 1;
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(E { pos, kind: Ex::Call(name, args) });
                }
                Ok(E { pos, kind: Ex::Name(name) })
            }
            Some(t) => self.error(pos, format!("expected a formula or term, found {}", describe(&t))),
            None => self.error(pos, "expected a formula or term"),
        }
    }

    /// `NAME (` is an application for declared symbols, or when the paren is
    /// written flush against an undeclared name.
    fn callable(&self, name: &str) -> bool {
        if self.at_directive() {
            return false;
        }
        if self.voc.has_symbol(name) {
            return true;
        }
        if self.bindings.contains_key(name) || self.imported.contains_key(name) {
            return false;
        }
        self.toks[self.i].start == self.toks[self.i - 1].end
    }

    // ---- elaboration ----

    fn top_formula(&mut self, e: &E) -> PResult<Formula> {
        let mut scope = Scope::top();
        let f = self.formula(e, &mut scope)?;
        let implicit = scope.implicit.take().unwrap_or_default();
        Ok(if implicit.is_empty() {
            f
        } else {
            Formula::Forall { vars: implicit, body: Box::new(f), implicit: true }
        })
    }

    fn formula(&mut self, e: &E, sc: &mut Scope) -> PResult<Formula> {
        let pos = e.pos;
        Ok(match &e.kind {
            Ex::Bool(true) => Formula::True,
            Ex::Bool(false) => Formula::False,
            Ex::Name(name) => {
                if sc.lookup(name).is_some() {
                    return self.error(pos, format!("variable `{name}` used as a formula"));
                }
                if let Some(args) = self.voc.predicates.get(name) {
                    if !args.is_empty() {
                        return self.error(pos, format!("`{name}` expects {} argument(s)", args.len()));
                    }
                    return Ok(Formula::atom(name));
                }
                if self.bindings.contains_key(name) || self.imported.contains_key(name) {
                    return Ok(Formula::Ref(name.clone()));
                }
                if self.voc.functions.contains_key(name) {
                    return self.error(pos, format!("function `{name}` used as a formula"));
                }
                return self.error(pos, format!("undeclared name `{name}`"));
            }
            Ex::Call(name, args) => {
                let Some(sorts) = self.voc.predicates.get(name).cloned() else {
                    if self.voc.functions.contains_key(name) {
                        return self.error(pos, format!("function `{name}` used as a formula"));
                    }
                    return self.error(pos, format!("undeclared predicate `{name}`"));
                };
                let args = self.arguments(name, &sorts, args, sc, pos)?;
                Formula::Atom { pred: name.clone(), args }
            }
            Ex::Not(g) => Formula::not(self.formula(g, sc)?),
            Ex::And(gs) => Formula::And(self.formulas(gs, sc)?),
            Ex::Or(gs) => Formula::Or(self.formulas(gs, sc)?),
            Ex::Implies(a, b) => Formula::implies(self.formula(a, sc)?, self.formula(b, sc)?),
            Ex::Iff(a, b) => Formula::iff(self.formula(a, sc)?, self.formula(b, sc)?),
            Ex::Cmp(a, op, b) => {
                let lhs = self.term(a, sc, None)?;
                let rhs = self.term(b, sc, None)?;
                self.check_comparable(&lhs, &rhs, sc, pos)?;
                Formula::cmp(lhs, *op, rhs)
            }
            Ex::Quant(forall, binders, body) => {
                let depth = sc.vars.len();
                for b in binders {
                    sc.vars.push((b.name.clone(), b.sort.clone()));
                }
                let body = self.formula(body, sc);
                let vars = self.close_binders(binders, sc, depth);
                let body = Box::new(body?);
                let vars = vars?;
                if *forall {
                    Formula::Forall { vars, body, implicit: false }
                } else {
                    Formula::Exists { vars, body }
                }
            }
            _ => return self.error(pos, "expected a formula, found a term"),
        })
    }

    fn formulas(&mut self, gs: &[E], sc: &mut Scope) -> PResult<Vec<Formula>> {
        let mut out = Vec::new();
        let mut failed = false;
        for g in gs {
            match self.formula(g, sc) {
                Ok(f) => out.push(f),
                Err(Fail) => failed = true,
            }
        }
        if failed {
            Err(Fail)
        } else {
            Ok(out)
        }
    }

    fn close_binders(&mut self, binders: &[RawBinder], sc: &mut Scope, depth: usize) -> PResult<Vec<Binder>> {
        let scoped: Vec<(String, Option<String>)> = sc.vars.drain(depth..).collect();
        let mut out = Vec::new();
        for (b, (_, sort)) in binders.iter().zip(scoped) {
            match sort {
                Some(sort) => {
                    if !self.voc.sort(&sort).is_some_and(SortDomain::is_finite) {
                        return self.error(b.pos, format!("variable `{}` must range over a finite sort", b.name));
                    }
                    out.push(Binder { name: b.name.clone(), sort });
                }
                None => {
                    return self.error(
                        b.pos,
                        format!("cannot infer the sort of `{}`; write `{}:SORT`", b.name, b.name),
                    )
                }
            }
        }
        Ok(out)
    }

    fn arguments(&mut self, name: &str, sorts: &[String], args: &[E], sc: &mut Scope, pos: Pos) -> PResult<Vec<Term>> {
        if sorts.len() != args.len() {
            return self.error(pos, format!("`{name}` expects {} argument(s), got {}", sorts.len(), args.len()));
        }
        let mut out = Vec::new();
        for (a, s) in args.iter().zip(sorts) {
            let t = self.term(a, sc, Some(s))?;
            if let Term::Lit(d) = &t {
                if !self.voc.sort(s).is_some_and(|dom| dom.contains(d)) {
                    return self.error(a.pos, format!("sort mismatch: `{d}` is not in {s}"));
                }
            }
            if let Some(other) = self.sort_of(&t, sc) {
                if !self.compatible(&other, s) {
                    return self.error(a.pos, format!("sort mismatch: expected {s}, found {other}"));
                }
            }
            out.push(t);
        }
        Ok(out)
    }

    fn term(&mut self, e: &E, sc: &mut Scope, expected: Option<&str>) -> PResult<Term> {
        let pos = e.pos;
        Ok(match &e.kind {
            Ex::Num(r) => Term::num(r.clone()),
            Ex::Name(name) => {
                if let Some(k) = sc.lookup(name) {
                    if sc.vars[k].1.is_none() {
                        sc.vars[k].1 = expected.map(str::to_string);
                    }
                    return Ok(Term::Var(name.clone()));
                }
                if let Some(sig) = self.voc.functions.get(name) {
                    if !sig.args.is_empty() {
                        return self.error(pos, format!("`{name}` expects {} argument(s)", sig.args.len()));
                    }
                    return Ok(Term::Const(name.clone()));
                }
                if self.voc.enum_sort_of(name).is_some() {
                    return Ok(Term::Lit(Datum::Sym(name.clone())));
                }
                if self.voc.predicates.contains_key(name) {
                    return self.error(pos, format!("predicate `{name}` used as a term"));
                }
                if self.bindings.contains_key(name) || self.imported.contains_key(name) {
                    return self.error(pos, format!("formula `{name}` used as a term"));
                }
                match (expected, sc.implicit.as_mut()) {
                    (Some(sort), Some(implicit)) => {
                        implicit.push(Binder { name: name.clone(), sort: sort.to_string() });
                        sc.vars.insert(0, (name.clone(), Some(sort.to_string())));
                        Term::Var(name.clone())
                    }
                    _ => return self.error(pos, format!("undeclared name `{name}`")),
                }
            }
            Ex::Call(name, args) => {
                let Some(sig) = self.voc.functions.get(name).cloned() else {
                    if self.voc.predicates.contains_key(name) {
                        return self.error(pos, format!("predicate `{name}` used as a term"));
                    }
                    return self.error(pos, format!("undeclared function `{name}`"));
                };
                let args = self.arguments(name, &sig.args, args, sc, pos)?;
                if args.is_empty() {
                    Term::Const(name.clone())
                } else {
                    Term::App(name.clone(), args)
                }
            }
            Ex::Add(ts) => Term::Add(self.terms(ts, sc)?),
            Ex::Mul(ts) => Term::Mul(self.terms(ts, sc)?),
            Ex::Sub(a, b) => Term::Sub(Box::new(self.term(a, sc, None)?), Box::new(self.term(b, sc, None)?)),
            Ex::Neg(a) => Term::Neg(Box::new(self.term(a, sc, None)?)),
            Ex::Norm(a) => Term::Norm(Box::new(self.term(a, sc, None)?)),
            Ex::Sum(binders, body) => {
                let depth = sc.vars.len();
                for b in binders {
                    sc.vars.push((b.name.clone(), b.sort.clone()));
                }
                let body = self.term(body, sc, None);
                let vars = self.close_binders(binders, sc, depth);
                let body = Box::new(body?);
                Term::Sum { vars: vars?, body }
            }
            _ => return self.error(pos, "expected a term, found a formula"),
        })
    }

    fn terms(&mut self, ts: &[E], sc: &mut Scope) -> PResult<Vec<Term>> {
        ts.iter().map(|t| self.term(t, sc, None)).collect()
    }

    /// The declared sort of a simple term, if it has one.
    fn sort_of(&self, t: &Term, sc: &Scope) -> Option<String> {
        match t {
            Term::Var(v) => sc.lookup(v).and_then(|k| sc.vars[k].1.clone()),
            Term::Const(c) | Term::App(c, _) => self.voc.functions.get(c).map(|s| s.result.clone()),
            Term::Lit(Datum::Sym(s)) => self.voc.enum_sort_of(s).map(str::to_string),
            _ => None,
        }
    }

    fn compatible(&self, a: &str, b: &str) -> bool {
        if a == b {
            return true;
        }
        let numeric = |s: &str| self.voc.sort(s).is_some_and(SortDomain::is_numeric);
        numeric(a) && numeric(b)
    }

    fn check_comparable(&mut self, a: &Term, b: &Term, sc: &Scope, pos: Pos) -> PResult<()> {
        let symbolic = |t: &Term| matches!(t, Term::Lit(Datum::Sym(_)));
        let numeric_lit = |t: &Term| matches!(t, Term::Lit(Datum::Num(_)));
        match (self.sort_of(a, sc), self.sort_of(b, sc)) {
            (Some(x), Some(y)) if !self.compatible(&x, &y) => {
                self.error(pos, format!("sort mismatch: {x} compared with {y}"))
            }
            (Some(x), None) | (None, Some(x))
                if !self.voc.sort(&x).is_some_and(SortDomain::is_numeric) && (numeric_lit(a) || numeric_lit(b)) =>
            {
                self.error(pos, format!("sort mismatch: {x} compared with a number"))
            }
            (None, None) if symbolic(a) != symbolic(b) && (numeric_lit(a) || numeric_lit(b)) => {
                self.error(pos, "sort mismatch: symbol compared with a number")
            }
            _ => Ok(()),
        }
    }
}

fn is_reserved(name: &str) -> bool {
    matches!(
        name,
        "and" | "or" | "not" | "neg" | "forall" | "exists" | "sum" | "TRUE" | "FALSE" | "true" | "false"
    )
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBrace => "`{`".into(),
        Tok::RBrace => "`}`".into(),
        Tok::LBracket => "`[`".into(),
        Tok::RBracket => "`]`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Colon => "`:`".into(),
        Tok::Semi => "`;`".into(),
        Tok::Dot => "`.`".into(),
        Tok::Ellipsis => "`...`".into(),
        Tok::Assign => "`=`".into(),
        Tok::Op(o) => format!("`{o}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Num(n) => format!("number {n}"),
        Tok::Str(s) => format!("string \"{s}\""),
    }
}
