//! Compiled formulas over a flat table of ground variables.
//!
//! Compilation expands quantifiers and comprehensions, inlines named
//! formulas, and maps every ground atom and ground function entry to a slot in
//! a [`VarTable`]. Slots hold scalars: booleans as 0/1, numbers as themselves,
//! enum symbols as a fixed integer code.

use std::collections::{BTreeMap, HashMap};

use indexmap::IndexMap;

use super::{Binder, CmpOp, Datum, Formula, GroundAtom, Interpretation, SortDomain, Term, Vocabulary};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum VarDomain {
    Bool,
    Finite(Vec<Datum>),
    Real,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarInfo {
    pub symbol: String,
    pub args: Vec<Datum>,
    pub domain: VarDomain,
}

impl VarInfo {
    pub fn is_bool(&self) -> bool {
        matches!(self.domain, VarDomain::Bool)
    }

    pub fn name(&self) -> String {
        GroundAtom {
            pred: self.symbol.clone(),
            args: self.args.clone(),
        }
        .to_string()
    }

    pub fn size(&self) -> Option<usize> {
        match &self.domain {
            VarDomain::Bool => Some(2),
            VarDomain::Finite(d) => Some(d.len()),
            VarDomain::Real => None,
        }
    }
}

/// Every ground entry of every declared symbol, in canonical order:
/// symbol name, then argument tuples in domain order.
#[derive(Clone, Debug)]
pub struct VarTable {
    pub vars: Vec<VarInfo>,
    index: HashMap<(String, Vec<Datum>), usize>,
    codes: BTreeMap<String, i64>,
}

impl VarTable {
    pub fn new(voc: &Vocabulary, allow_real: bool) -> Result<Self> {
        let mut symbols: Vec<(&str, &[String], Option<&str>)> = voc
            .predicates
            .iter()
            .map(|(n, a)| (n.as_str(), a.as_slice(), None))
            .chain(
                voc.functions
                    .iter()
                    .map(|(n, s)| (n.as_str(), s.args.as_slice(), Some(s.result.as_str()))),
            )
            .collect();
        symbols.sort_by(|a, b| a.0.cmp(b.0));
        let mut vars = Vec::new();
        for (name, args, result) in symbols {
            let domain = match result {
                None => VarDomain::Bool,
                Some(sort) => match voc.sort(sort) {
                    Some(SortDomain::Real) if allow_real => VarDomain::Real,
                    Some(SortDomain::Real) => return Err(Error::InfiniteDomain(format!("{name} : {sort}"))),
                    Some(d) => VarDomain::Finite(d.elements().unwrap_or_default()),
                    None => return Err(Error::UndeclaredSort(sort.to_string())),
                },
            };
            let mut tuples: Vec<Vec<Datum>> = vec![Vec::new()];
            for s in args {
                let elems = voc.finite_elements(s)?;
                tuples = tuples
                    .into_iter()
                    .flat_map(|t| {
                        elems.iter().map(move |d| {
                            let mut t = t.clone();
                            t.push(d.clone());
                            t
                        })
                    })
                    .collect();
            }
            for args in tuples {
                vars.push(VarInfo {
                    symbol: name.to_string(),
                    args,
                    domain: domain.clone(),
                });
            }
        }
        let index = vars
            .iter()
            .enumerate()
            .map(|(i, v)| ((v.symbol.clone(), v.args.clone()), i))
            .collect();
        let mut syms: Vec<String> = voc
            .sorts
            .values()
            .filter_map(|d| match d {
                SortDomain::Enum(items) => Some(items.iter().filter_map(|d| match d {
                    Datum::Sym(s) => Some(s.clone()),
                    Datum::Num(_) => None,
                })),
                _ => None,
            })
            .flatten()
            .collect();
        syms.sort();
        syms.dedup();
        let codes = syms.into_iter().enumerate().map(|(i, s)| (s, i as i64)).collect();
        Ok(VarTable { vars, index, codes })
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn lookup(&self, symbol: &str, args: &[Datum]) -> Option<usize> {
        self.index.get(&(symbol.to_string(), args.to_vec())).copied()
    }

    /// Scalar encoding of a datum.
    pub fn encode<T: Scalar>(&self, d: &Datum) -> T {
        match d {
            Datum::Num(r) => T::from_rational(r),
            Datum::Sym(s) => T::from_i64(self.codes.get(s).copied().unwrap_or(-1)).unwrap(),
        }
    }

    /// Scalar values of each domain element of a finite slot.
    pub fn domain_values<T: Scalar>(&self, var: usize) -> Vec<T> {
        match &self.vars[var].domain {
            VarDomain::Bool => vec![T::zero(), T::one()],
            VarDomain::Finite(d) => d.iter().map(|x| self.encode(x)).collect(),
            VarDomain::Real => Vec::new(),
        }
    }

    /// Builds an interpretation from domain indices (finite slots only).
    pub fn interpretation(&self, assignment: &[u32]) -> Interpretation {
        let mut m = Interpretation::default();
        for (v, &i) in self.vars.iter().zip(assignment) {
            match &v.domain {
                VarDomain::Bool => m.set_atom(
                    GroundAtom {
                        pred: v.symbol.clone(),
                        args: v.args.clone(),
                    },
                    i == 1,
                ),
                VarDomain::Finite(d) => m.set_entry(&v.symbol, v.args.clone(), d[i as usize].clone()),
                VarDomain::Real => {}
            }
        }
        m
    }

    /// Slots belonging to the given symbols.
    pub fn slots_of<'a>(&'a self, symbols: &'a std::collections::BTreeSet<&str>) -> impl Iterator<Item = usize> + 'a {
        self.vars
            .iter()
            .enumerate()
            .filter(move |(_, v)| symbols.contains(v.symbol.as_str()))
            .map(|(i, _)| i)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CTerm<T> {
    Const(T),
    Var(usize),
    Add(Vec<CTerm<T>>),
    Sub(Box<CTerm<T>>, Box<CTerm<T>>),
    Mul(Vec<CTerm<T>>),
    Neg(Box<CTerm<T>>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum CFormula<T> {
    Const(bool),
    /// A boolean slot.
    Var(usize),
    Cmp(CTerm<T>, CmpOp, CTerm<T>),
    Not(Box<CFormula<T>>),
    And(Vec<CFormula<T>>),
    Or(Vec<CFormula<T>>),
    Implies(Box<CFormula<T>>, Box<CFormula<T>>),
    Iff(Box<CFormula<T>>, Box<CFormula<T>>),
}

impl<T: Scalar> CTerm<T> {
    pub fn eval(&self, vals: &[Option<T>]) -> Option<T> {
        match self {
            CTerm::Const(c) => Some(c.clone()),
            CTerm::Var(v) => vals[*v].clone(),
            CTerm::Add(ts) => {
                let mut acc = T::zero();
                for t in ts {
                    acc = acc + t.eval(vals)?;
                }
                Some(acc)
            }
            CTerm::Mul(ts) => {
                let mut acc = T::one();
                let mut unknown = false;
                for t in ts {
                    match t.eval(vals) {
                        Some(x) if x.is_zero() => return Some(T::zero()),
                        Some(x) => acc = acc * x,
                        None => unknown = true,
                    }
                }
                (!unknown).then_some(acc)
            }
            CTerm::Sub(a, b) => Some(a.eval(vals)? - b.eval(vals)?),
            CTerm::Neg(a) => Some(-a.eval(vals)?),
        }
    }

    pub fn visit_vars(&self, out: &mut Vec<usize>) {
        match self {
            CTerm::Const(_) => {}
            CTerm::Var(v) => out.push(*v),
            CTerm::Add(ts) | CTerm::Mul(ts) => ts.iter().for_each(|t| t.visit_vars(out)),
            CTerm::Sub(a, b) => {
                a.visit_vars(out);
                b.visit_vars(out);
            }
            CTerm::Neg(a) => a.visit_vars(out),
        }
    }

    pub fn vars(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit_vars(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Replaces slots that have a definition.
    pub fn substitute(&self, defs: &HashMap<usize, CTerm<T>>) -> CTerm<T> {
        match self {
            CTerm::Var(v) => match defs.get(v) {
                Some(t) => t.clone(),
                None => self.clone(),
            },
            CTerm::Const(_) => self.clone(),
            CTerm::Add(ts) => CTerm::Add(ts.iter().map(|t| t.substitute(defs)).collect()),
            CTerm::Mul(ts) => CTerm::Mul(ts.iter().map(|t| t.substitute(defs)).collect()),
            CTerm::Sub(a, b) => CTerm::Sub(Box::new(a.substitute(defs)), Box::new(b.substitute(defs))),
            CTerm::Neg(a) => CTerm::Neg(Box::new(a.substitute(defs))),
        }
    }

    /// `Σ cᵢ·xᵢ + d`, or `None` when the term is not linear.
    pub fn linearize(&self) -> Option<(BTreeMap<usize, T>, T)> {
        match self {
            CTerm::Const(c) => Some((BTreeMap::new(), c.clone())),
            CTerm::Var(v) => Some((BTreeMap::from([(*v, T::one())]), T::zero())),
            CTerm::Add(ts) => {
                let mut coeffs = BTreeMap::new();
                let mut d = T::zero();
                for t in ts {
                    let (c, k) = t.linearize()?;
                    add_into(&mut coeffs, c, &T::one());
                    d = d + k;
                }
                Some((coeffs, d))
            }
            CTerm::Sub(a, b) => {
                let (mut ca, da) = a.linearize()?;
                let (cb, db) = b.linearize()?;
                add_into(&mut ca, cb, &-T::one());
                Some((ca, da - db))
            }
            CTerm::Neg(a) => {
                let (c, d) = a.linearize()?;
                Some((c.into_iter().map(|(k, v)| (k, -v)).collect(), -d))
            }
            CTerm::Mul(ts) => {
                let mut coeffs: Option<BTreeMap<usize, T>> = None;
                let mut d = T::one();
                let mut scale = T::one();
                for t in ts {
                    let (c, k) = t.linearize()?;
                    if c.is_empty() {
                        scale = scale * k;
                    } else if coeffs.is_some() {
                        return None;
                    } else {
                        coeffs = Some(c);
                        d = k;
                    }
                }
                match coeffs {
                    None => Some((BTreeMap::new(), scale)),
                    Some(c) => Some((
                        c.into_iter().map(|(k, v)| (k, v * scale.clone())).collect(),
                        d * scale,
                    )),
                }
            }
        }
    }

    pub fn map_scalar<U: Scalar>(&self, f: &impl Fn(&T) -> U) -> CTerm<U> {
        match self {
            CTerm::Const(c) => CTerm::Const(f(c)),
            CTerm::Var(v) => CTerm::Var(*v),
            CTerm::Add(ts) => CTerm::Add(ts.iter().map(|t| t.map_scalar(f)).collect()),
            CTerm::Mul(ts) => CTerm::Mul(ts.iter().map(|t| t.map_scalar(f)).collect()),
            CTerm::Sub(a, b) => CTerm::Sub(Box::new(a.map_scalar(f)), Box::new(b.map_scalar(f))),
            CTerm::Neg(a) => CTerm::Neg(Box::new(a.map_scalar(f))),
        }
    }
}

fn add_into<T: Scalar>(acc: &mut BTreeMap<usize, T>, more: BTreeMap<usize, T>, sign: &T) {
    for (k, v) in more {
        let cur = acc.remove(&k).unwrap_or_else(T::zero);
        let next = cur + v * sign.clone();
        if !next.is_zero() {
            acc.insert(k, next);
        }
    }
}

impl<T: Scalar> CFormula<T> {
    /// Kleene evaluation: `None` when unassigned slots leave the value open.
    pub fn eval3(&self, vals: &[Option<T>]) -> Option<bool> {
        match self {
            CFormula::Const(b) => Some(*b),
            CFormula::Var(v) => vals[*v].as_ref().map(|x| !x.is_zero()),
            CFormula::Cmp(a, op, b) => Some(op.holds(&a.eval(vals)?, &b.eval(vals)?)),
            CFormula::Not(g) => g.eval3(vals).map(|b| !b),
            CFormula::And(gs) => {
                let mut open = false;
                for g in gs {
                    match g.eval3(vals) {
                        Some(false) => return Some(false),
                        None => open = true,
                        Some(true) => {}
                    }
                }
                (!open).then_some(true)
            }
            CFormula::Or(gs) => {
                let mut open = false;
                for g in gs {
                    match g.eval3(vals) {
                        Some(true) => return Some(true),
                        None => open = true,
                        Some(false) => {}
                    }
                }
                (!open).then_some(false)
            }
            CFormula::Implies(a, b) => match (a.eval3(vals), b.eval3(vals)) {
                (Some(false), _) | (_, Some(true)) => Some(true),
                (Some(true), Some(false)) => Some(false),
                _ => None,
            },
            CFormula::Iff(a, b) => Some(a.eval3(vals)? == b.eval3(vals)?),
        }
    }

    pub fn visit_vars(&self, out: &mut Vec<usize>) {
        match self {
            CFormula::Const(_) => {}
            CFormula::Var(v) => out.push(*v),
            CFormula::Cmp(a, _, b) => {
                a.visit_vars(out);
                b.visit_vars(out);
            }
            CFormula::Not(g) => g.visit_vars(out),
            CFormula::And(gs) | CFormula::Or(gs) => gs.iter().for_each(|g| g.visit_vars(out)),
            CFormula::Implies(a, b) | CFormula::Iff(a, b) => {
                a.visit_vars(out);
                b.visit_vars(out);
            }
        }
    }

    pub fn vars(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit_vars(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Top-level conjuncts, flattened.
    pub fn conjuncts(&self) -> Vec<&CFormula<T>> {
        let mut out = Vec::new();
        fn walk<'a, T>(f: &'a CFormula<T>, out: &mut Vec<&'a CFormula<T>>) {
            match f {
                CFormula::And(gs) => gs.iter().for_each(|g| walk(g, out)),
                CFormula::Const(true) => {}
                other => out.push(other),
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn substitute(&self, defs: &HashMap<usize, CTerm<T>>) -> CFormula<T> {
        let sub = |g: &CFormula<T>| Box::new(g.substitute(defs));
        match self {
            CFormula::Const(_) | CFormula::Var(_) => self.clone(),
            CFormula::Cmp(a, op, b) => CFormula::Cmp(a.substitute(defs), *op, b.substitute(defs)),
            CFormula::Not(g) => CFormula::Not(sub(g)),
            CFormula::And(gs) => CFormula::And(gs.iter().map(|g| g.substitute(defs)).collect()),
            CFormula::Or(gs) => CFormula::Or(gs.iter().map(|g| g.substitute(defs)).collect()),
            CFormula::Implies(a, b) => CFormula::Implies(sub(a), sub(b)),
            CFormula::Iff(a, b) => CFormula::Iff(sub(a), sub(b)),
        }
    }

    pub fn map_scalar<U: Scalar>(&self, f: &impl Fn(&T) -> U) -> CFormula<U> {
        let sub = |g: &CFormula<T>| Box::new(g.map_scalar(f));
        match self {
            CFormula::Const(b) => CFormula::Const(*b),
            CFormula::Var(v) => CFormula::Var(*v),
            CFormula::Cmp(a, op, b) => CFormula::Cmp(a.map_scalar(f), *op, b.map_scalar(f)),
            CFormula::Not(g) => CFormula::Not(sub(g)),
            CFormula::And(gs) => CFormula::And(gs.iter().map(|g| g.map_scalar(f)).collect()),
            CFormula::Or(gs) => CFormula::Or(gs.iter().map(|g| g.map_scalar(f)).collect()),
            CFormula::Implies(a, b) => CFormula::Implies(sub(a), sub(b)),
            CFormula::Iff(a, b) => CFormula::Iff(sub(a), sub(b)),
        }
    }
}

type Env = Vec<(String, Datum)>;

/// Compiles surface formulas and terms against a [`VarTable`].
pub struct Compiler<'a> {
    pub voc: &'a Vocabulary,
    pub table: &'a VarTable,
    pub bindings: &'a IndexMap<String, Formula>,
}

impl<'a> Compiler<'a> {
    pub fn new(voc: &'a Vocabulary, table: &'a VarTable, bindings: &'a IndexMap<String, Formula>) -> Self {
        Compiler { voc, table, bindings }
    }

    pub fn formula<T: Scalar>(&self, f: &Formula) -> Result<CFormula<T>> {
        self.f(f, &mut Vec::new(), &mut Vec::new())
    }

    pub fn term<T: Scalar>(&self, t: &Term) -> Result<CTerm<T>> {
        self.t(t, &mut Vec::new())
    }

    fn f<T: Scalar>(&self, f: &Formula, env: &mut Env, stack: &mut Vec<String>) -> Result<CFormula<T>> {
        Ok(match f {
            Formula::True => CFormula::Const(true),
            Formula::False => CFormula::Const(false),
            Formula::Ref(name) => {
                if stack.contains(name) {
                    return Err(Error::UnresolvedRef(format!("{name} (cyclic)")));
                }
                let body = self
                    .bindings
                    .get(name)
                    .ok_or_else(|| Error::UnresolvedRef(name.clone()))?;
                stack.push(name.clone());
                let out = self.f(body, env, stack);
                stack.pop();
                out?
            }
            Formula::Atom { pred, args } => {
                let args = self.ground_args(args, env)?;
                let slot = self.table.lookup(pred, &args).ok_or_else(|| {
                    Error::IllSorted(format!(
                        "no ground atom {}",
                        GroundAtom { pred: pred.clone(), args: args.clone() }
                    ))
                })?;
                CFormula::Var(slot)
            }
            Formula::Cmp { lhs, op, rhs } => {
                let a = self.t::<T>(lhs, env)?;
                let b = self.t::<T>(rhs, env)?;
                match (&a, &b) {
                    (CTerm::Const(x), CTerm::Const(y)) => CFormula::Const(op.holds(x, y)),
                    _ => CFormula::Cmp(a, *op, b),
                }
            }
            Formula::Not(g) => CFormula::Not(Box::new(self.f(g, env, stack)?)),
            Formula::And(gs) => CFormula::And(gs.iter().map(|g| self.f(g, env, stack)).collect::<Result<_>>()?),
            Formula::Or(gs) => CFormula::Or(gs.iter().map(|g| self.f(g, env, stack)).collect::<Result<_>>()?),
            Formula::Implies(a, b) => {
                CFormula::Implies(Box::new(self.f(a, env, stack)?), Box::new(self.f(b, env, stack)?))
            }
            Formula::Iff(a, b) => CFormula::Iff(Box::new(self.f(a, env, stack)?), Box::new(self.f(b, env, stack)?)),
            Formula::Forall { vars, body, .. } => {
                let mut parts = Vec::new();
                self.each(vars, env, &mut |env| {
                    parts.push(self.f(body, env, stack)?);
                    Ok(())
                })?;
                CFormula::And(parts)
            }
            Formula::Exists { vars, body } => {
                let mut parts = Vec::new();
                self.each(vars, env, &mut |env| {
                    parts.push(self.f(body, env, stack)?);
                    Ok(())
                })?;
                CFormula::Or(parts)
            }
        })
    }

    fn each(&self, vars: &[Binder], env: &mut Env, k: &mut dyn FnMut(&mut Env) -> Result<()>) -> Result<()> {
        match vars.split_first() {
            None => k(env),
            Some((b, rest)) => {
                for d in self.voc.finite_elements(&b.sort)? {
                    env.push((b.name.clone(), d));
                    let r = self.each(rest, env, k);
                    env.pop();
                    r?;
                }
                Ok(())
            }
        }
    }

    fn ground_args(&self, args: &[Term], env: &mut Env) -> Result<Vec<Datum>> {
        args.iter().map(|a| self.datum(a, env)).collect()
    }

    /// Evaluates an argument term that may only depend on bound variables.
    fn datum(&self, t: &Term, env: &mut Env) -> Result<Datum> {
        match t {
            Term::Lit(d) => Ok(d.clone()),
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|(_, d)| d.clone())
                .ok_or_else(|| Error::Unassigned(v.clone())),
            other => match self.t::<num_rational::BigRational>(other, env)? {
                CTerm::Const(r) => Ok(Datum::Num(r)),
                _ => Err(Error::Unsupported(format!(
                    "argument `{other}` depends on the model; only bound variables and literals may index symbols"
                ))),
            },
        }
    }

    fn t<T: Scalar>(&self, t: &Term, env: &mut Env) -> Result<CTerm<T>> {
        Ok(match t {
            Term::Lit(d) => CTerm::Const(self.table.encode(d)),
            Term::Var(v) => {
                let d = env
                    .iter()
                    .rev()
                    .find(|(n, _)| n == v)
                    .map(|(_, d)| d.clone())
                    .ok_or_else(|| Error::Unassigned(v.clone()))?;
                CTerm::Const(self.table.encode(&d))
            }
            Term::Const(c) => CTerm::Var(
                self.table
                    .lookup(c, &[])
                    .ok_or_else(|| Error::Unassigned(c.clone()))?,
            ),
            Term::App(f, args) => {
                let args = self.ground_args(args, env)?;
                let slot = self.table.lookup(f, &args).ok_or_else(|| {
                    Error::IllSorted(format!(
                        "no ground entry {}",
                        GroundAtom { pred: f.clone(), args: args.clone() }
                    ))
                })?;
                CTerm::Var(slot)
            }
            Term::Add(ts) => fold(CTerm::Add(ts.iter().map(|t| self.t(t, env)).collect::<Result<_>>()?)),
            Term::Mul(ts) => fold(CTerm::Mul(ts.iter().map(|t| self.t(t, env)).collect::<Result<_>>()?)),
            Term::Sub(a, b) => fold(CTerm::Sub(Box::new(self.t(a, env)?), Box::new(self.t(b, env)?))),
            Term::Neg(a) => fold(CTerm::Neg(Box::new(self.t(a, env)?))),
            Term::Sum { vars, body } => {
                let mut parts = Vec::new();
                self.each(vars, env, &mut |env| {
                    parts.push(self.t(body, env)?);
                    Ok(())
                })?;
                fold(CTerm::Add(parts))
            }
            Term::Norm(inner) => match inner.as_ref() {
                Term::Sum { vars, body } => {
                    let mut parts = Vec::new();
                    self.each(vars, env, &mut |env| {
                        let g = self.t::<T>(body, env)?;
                        parts.push(fold(CTerm::Mul(vec![g.clone(), g])));
                        Ok(())
                    })?;
                    fold(CTerm::Add(parts))
                }
                other => {
                    let g = self.t::<T>(other, env)?;
                    fold(CTerm::Mul(vec![g.clone(), g]))
                }
            },
        })
    }
}

/// Folds a node whose children are all constants.
fn fold<T: Scalar>(t: CTerm<T>) -> CTerm<T> {
    let all_const = |ts: &[CTerm<T>]| ts.iter().all(|t| matches!(t, CTerm::Const(_)));
    match &t {
        CTerm::Add(ts) | CTerm::Mul(ts) if all_const(ts) => CTerm::Const(t.eval(&[]).unwrap()),
        CTerm::Sub(a, b) if matches!((a.as_ref(), b.as_ref()), (CTerm::Const(_), CTerm::Const(_))) => {
            CTerm::Const(t.eval(&[]).unwrap())
        }
        CTerm::Neg(a) if matches!(a.as_ref(), CTerm::Const(_)) => CTerm::Const(t.eval(&[]).unwrap()),
        _ => t,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;
    use num_rational::BigRational;

    #[test]
    fn linear_forms() {
        // 2*(x + 3) - y
        let t: CTerm<BigRational> = CTerm::Sub(
            Box::new(CTerm::Mul(vec![
                CTerm::Const(int(2)),
                CTerm::Add(vec![CTerm::Var(0), CTerm::Const(int(3))]),
            ])),
            Box::new(CTerm::Var(1)),
        );
        let (c, d) = t.linearize().unwrap();
        assert_eq!(c[&0], int(2));
        assert_eq!(c[&1], int(-1));
        assert_eq!(d, int(6));
        let sq: CTerm<f64> = CTerm::Mul(vec![CTerm::Var(0), CTerm::Var(0)]);
        assert!(sq.linearize().is_none());
    }

    #[test]
    fn kleene() {
        let f: CFormula<f64> = CFormula::Or(vec![CFormula::Var(0), CFormula::Var(1)]);
        assert_eq!(f.eval3(&[None, Some(1.0)]), Some(true));
        assert_eq!(f.eval3(&[None, Some(0.0)]), None);
        assert_eq!(f.eval3(&[Some(0.0), Some(0.0)]), Some(false));
    }
}
