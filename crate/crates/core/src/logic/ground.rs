use num_rational::BigRational;
use num_traits::{One, Zero};

use super::eval::compare;
use super::{Binder, Datum, Formula, SortDomain, Term, Vocabulary};
use crate::error::{Error, Result};

type Env = Vec<(String, Datum)>;

/// Expands quantifiers and comprehensions over finite sorts.
///
/// The result mentions only ground atoms and ground function terms. Symbols
/// with REAL results are rejected.
pub fn ground(f: &Formula, voc: &Vocabulary) -> Result<Formula> {
    ground_with(f, voc, false)
}

/// As [`ground`], optionally admitting REAL-valued function symbols.
pub fn ground_with(f: &Formula, voc: &Vocabulary, allow_real: bool) -> Result<Formula> {
    Grounder { voc, allow_real }.formula(f, &mut Vec::new())
}

struct Grounder<'a> {
    voc: &'a Vocabulary,
    allow_real: bool,
}

impl Grounder<'_> {
    fn instances(&self, vars: &[Binder]) -> Result<Vec<Vec<(String, Datum)>>> {
        let mut out = vec![Vec::new()];
        for b in vars {
            let elems = self.voc.finite_elements(&b.sort)?;
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    elems.iter().map(move |d| {
                        let mut row = prefix.clone();
                        row.push((b.name.clone(), d.clone()));
                        row
                    })
                })
                .collect();
        }
        Ok(out)
    }

    fn formula(&self, f: &Formula, env: &mut Env) -> Result<Formula> {
        Ok(match f {
            Formula::True | Formula::False => f.clone(),
            Formula::Ref(name) => return Err(Error::UnresolvedRef(name.clone())),
            Formula::Atom { pred, args } => Formula::Atom {
                pred: pred.clone(),
                args: args.iter().map(|a| self.term(a, env)).collect::<Result<_>>()?,
            },
            Formula::Cmp { lhs, op, rhs } => {
                let lhs = self.term(lhs, env)?;
                let rhs = self.term(rhs, env)?;
                match (&lhs, &rhs) {
                    (Term::Lit(a), Term::Lit(b)) => {
                        if compare(a, *op, b)? {
                            Formula::True
                        } else {
                            Formula::False
                        }
                    }
                    _ => Formula::Cmp { lhs, op: *op, rhs },
                }
            }
            Formula::Not(g) => Formula::not(self.formula(g, env)?),
            Formula::And(gs) => Formula::And(self.all(gs, env)?),
            Formula::Or(gs) => Formula::Or(self.all(gs, env)?),
            Formula::Implies(a, b) => Formula::implies(self.formula(a, env)?, self.formula(b, env)?),
            Formula::Iff(a, b) => Formula::iff(self.formula(a, env)?, self.formula(b, env)?),
            Formula::Forall { vars, body, .. } => Formula::And(self.expand(vars, body, env)?),
            Formula::Exists { vars, body } => Formula::Or(self.expand(vars, body, env)?),
        })
    }

    fn all(&self, gs: &[Formula], env: &mut Env) -> Result<Vec<Formula>> {
        gs.iter().map(|g| self.formula(g, env)).collect()
    }

    fn expand(&self, vars: &[Binder], body: &Formula, env: &mut Env) -> Result<Vec<Formula>> {
        let mut out = Vec::new();
        for row in self.instances(vars)? {
            let depth = env.len();
            env.extend(row);
            let g = self.formula(body, env);
            env.truncate(depth);
            out.push(g?);
        }
        Ok(out)
    }

    fn check_symbol(&self, name: &str) -> Result<()> {
        if self.allow_real {
            return Ok(());
        }
        if let Some(sig) = self.voc.functions.get(name) {
            if matches!(self.voc.sort(&sig.result), Some(SortDomain::Real)) {
                return Err(Error::InfiniteDomain(format!("{name} : {}", sig.result)));
            }
        }
        Ok(())
    }

    fn term(&self, t: &Term, env: &mut Env) -> Result<Term> {
        Ok(match t {
            Term::Lit(_) => t.clone(),
            Term::Var(v) => match env.iter().rev().find(|(n, _)| n == v) {
                Some((_, d)) => Term::Lit(d.clone()),
                None => return Err(Error::Unassigned(v.clone())),
            },
            Term::Const(c) => {
                self.check_symbol(c)?;
                t.clone()
            }
            Term::App(f, args) => {
                self.check_symbol(f)?;
                Term::App(f.clone(), args.iter().map(|a| self.term(a, env)).collect::<Result<_>>()?)
            }
            Term::Add(ts) => fold_add(ts.iter().map(|t| self.term(t, env)).collect::<Result<_>>()?),
            Term::Mul(ts) => fold_mul(ts.iter().map(|t| self.term(t, env)).collect::<Result<_>>()?),
            Term::Sub(a, b) => {
                let (a, b) = (self.term(a, env)?, self.term(b, env)?);
                match (&a, &b) {
                    (Term::Lit(Datum::Num(x)), Term::Lit(Datum::Num(y))) => Term::num(x - y),
                    _ => Term::Sub(Box::new(a), Box::new(b)),
                }
            }
            Term::Neg(a) => match self.term(a, env)? {
                Term::Lit(Datum::Num(x)) => Term::num(-x),
                other => Term::Neg(Box::new(other)),
            },
            Term::Sum { vars, body } => {
                let mut parts = Vec::new();
                for row in self.instances(vars)? {
                    let depth = env.len();
                    env.extend(row);
                    let g = self.term(body, env);
                    env.truncate(depth);
                    parts.push(g?);
                }
                fold_add(parts)
            }
            Term::Norm(inner) => match inner.as_ref() {
                Term::Sum { vars, body } => {
                    let mut parts = Vec::new();
                    for row in self.instances(vars)? {
                        let depth = env.len();
                        env.extend(row);
                        let g = self.term(body, env);
                        env.truncate(depth);
                        let g = g?;
                        parts.push(fold_mul(vec![g.clone(), g]));
                    }
                    fold_add(parts)
                }
                other => {
                    let g = self.term(other, env)?;
                    fold_mul(vec![g.clone(), g])
                }
            },
        })
    }
}

fn literal(t: &Term) -> Option<&BigRational> {
    match t {
        Term::Lit(Datum::Num(r)) => Some(r),
        _ => None,
    }
}

fn fold_add(parts: Vec<Term>) -> Term {
    if parts.iter().all(|p| literal(p).is_some()) {
        return Term::num(parts.iter().filter_map(literal).fold(BigRational::zero(), |a, b| a + b));
    }
    if parts.len() == 1 {
        return parts.into_iter().next().unwrap();
    }
    Term::Add(parts)
}

fn fold_mul(parts: Vec<Term>) -> Term {
    if parts.iter().all(|p| literal(p).is_some()) {
        return Term::num(parts.iter().filter_map(literal).fold(BigRational::one(), |a, b| a * b));
    }
    if parts.len() == 1 {
        return parts.into_iter().next().unwrap();
    }
    Term::Mul(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::FunctionSig;

    #[test]
    fn identity_on_ground_input() {
        let voc = Vocabulary::default();
        let f = Formula::or(vec![Formula::atom("p"), Formula::not(Formula::atom("q"))]);
        assert_eq!(ground(&f, &voc).unwrap(), f);
    }

    #[test]
    fn rejects_real_symbols() {
        let mut voc = Vocabulary::default();
        voc.functions.insert(
            "x".into(),
            FunctionSig { args: vec![], result: "REAL".into() },
        );
        let f = Formula::cmp(Term::constant("x"), super::super::CmpOp::Le, Term::int(1));
        assert!(matches!(ground(&f, &voc), Err(Error::InfiniteDomain(_))));
        assert!(ground_with(&f, &voc, true).is_ok());
    }
}
