use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::Zero;

use super::{Binder, CmpOp, Datum, Formula, GroundAtom, Interpretation, Term, TheorySpec, Vocabulary};
use crate::error::{Error, Result};

type Env = Vec<(String, Datum)>;

/// Largest number of true atoms for which subset-minimality is checked.
const MINIMALITY_LIMIT: usize = 24;

/// `m ⊨ f` under the theory's satisfaction relation.
///
/// Named references must be inlined first (see `Program::resolve`).
pub fn evaluate(theory: &TheorySpec, voc: &Vocabulary, f: &Formula, m: &Interpretation) -> Result<bool> {
    if !evaluate_classical(voc, f, m)? {
        return Ok(false);
    }
    if !theory.minimal_models() {
        return Ok(true);
    }
    let trues: Vec<&GroundAtom> = m.true_atoms.iter().collect();
    if trues.len() > MINIMALITY_LIMIT {
        return Err(Error::CapExceeded {
            size: format!("2^{}", trues.len()),
            cap: 1 << MINIMALITY_LIMIT,
        });
    }
    let full = (1u64 << trues.len()) - 1;
    for mask in 0..full {
        let mut sub = m.clone();
        for (i, a) in trues.iter().enumerate() {
            if mask & (1 << i) == 0 {
                sub.true_atoms.remove(*a);
            }
        }
        if evaluate_classical(voc, f, &sub)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Classical inductive satisfaction, ignoring any minimality condition.
pub fn evaluate_classical(voc: &Vocabulary, f: &Formula, m: &Interpretation) -> Result<bool> {
    Evaluator { voc, m }.formula(f, &mut Vec::new())
}

/// Value of a closed term in `m`.
pub fn eval_term(voc: &Vocabulary, tm: &Term, m: &Interpretation) -> Result<Datum> {
    Evaluator { voc, m }.term(tm, &mut Vec::new())
}

struct Evaluator<'a> {
    voc: &'a Vocabulary,
    m: &'a Interpretation,
}

impl Evaluator<'_> {
    fn formula(&self, f: &Formula, env: &mut Env) -> Result<bool> {
        Ok(match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom { pred, args } => {
                let atom = GroundAtom {
                    pred: pred.clone(),
                    args: args.iter().map(|a| self.term(a, env)).collect::<Result<_>>()?,
                };
                if self.m.true_atoms.contains(&atom) {
                    true
                } else if self.m.atoms.contains(&atom) || self.voc.data_symbols.contains(pred) {
                    false
                } else {
                    return Err(Error::Unassigned(atom.to_string()));
                }
            }
            Formula::Cmp { lhs, op, rhs } => {
                let a = self.term(lhs, env)?;
                let b = self.term(rhs, env)?;
                compare(&a, *op, &b)?
            }
            Formula::Not(g) => !self.formula(g, env)?,
            Formula::And(gs) => {
                for g in gs {
                    if !self.formula(g, env)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(gs) => {
                for g in gs {
                    if self.formula(g, env)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Implies(a, b) => !self.formula(a, env)? || self.formula(b, env)?,
            Formula::Iff(a, b) => self.formula(a, env)? == self.formula(b, env)?,
            Formula::Ref(name) => return Err(Error::UnresolvedRef(name.clone())),
            Formula::Forall { vars, body, .. } => {
                let mut all = true;
                self.each_binding(vars, env, &mut |ev, env| {
                    if all && !ev.formula(body, env)? {
                        all = false;
                    }
                    Ok(())
                })?;
                all
            }
            Formula::Exists { vars, body } => {
                let mut any = false;
                self.each_binding(vars, env, &mut |ev, env| {
                    if !any && ev.formula(body, env)? {
                        any = true;
                    }
                    Ok(())
                })?;
                any
            }
        })
    }

    fn each_binding(
        &self,
        vars: &[Binder],
        env: &mut Env,
        k: &mut dyn FnMut(&Self, &mut Env) -> Result<()>,
    ) -> Result<()> {
        match vars.split_first() {
            None => k(self, env),
            Some((b, rest)) => {
                for d in self.voc.finite_elements(&b.sort)? {
                    env.push((b.name.clone(), d));
                    let r = self.each_binding(rest, env, k);
                    env.pop();
                    r?;
                }
                Ok(())
            }
        }
    }

    fn term(&self, t: &Term, env: &mut Env) -> Result<Datum> {
        Ok(match t {
            Term::Lit(d) => d.clone(),
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|(_, d)| d.clone())
                .ok_or_else(|| Error::Unassigned(v.clone()))?,
            Term::Const(c) => self
                .m
                .value(c, &[])
                .cloned()
                .ok_or_else(|| Error::Unassigned(c.clone()))?,
            Term::App(f, args) => {
                let args: Vec<Datum> = args.iter().map(|a| self.term(a, env)).collect::<Result<_>>()?;
                match self.m.value(f, &args) {
                    Some(d) => d.clone(),
                    None => {
                        let shown = GroundAtom { pred: f.clone(), args };
                        return Err(Error::Unassigned(shown.to_string()));
                    }
                }
            }
            Term::Add(ts) => {
                let mut acc = BigRational::zero();
                for t in ts {
                    acc += self.num(t, env)?;
                }
                Datum::Num(acc)
            }
            Term::Mul(ts) => {
                let mut acc = crate::scalar::int(1);
                for t in ts {
                    acc *= self.num(t, env)?;
                }
                Datum::Num(acc)
            }
            Term::Sub(a, b) => Datum::Num(self.num(a, env)? - self.num(b, env)?),
            Term::Neg(a) => Datum::Num(-self.num(a, env)?),
            Term::Sum { vars, body } => {
                let mut acc = BigRational::zero();
                self.each_binding(vars, env, &mut |ev, env| {
                    acc += ev.num(body, env)?;
                    Ok(())
                })?;
                Datum::Num(acc)
            }
            Term::Norm(inner) => match inner.as_ref() {
                Term::Sum { vars, body } => {
                    let mut acc = BigRational::zero();
                    self.each_binding(vars, env, &mut |ev, env| {
                        let v = ev.num(body, env)?;
                        acc += &v * &v;
                        Ok(())
                    })?;
                    Datum::Num(acc)
                }
                other => {
                    let v = self.num(other, env)?;
                    Datum::Num(&v * &v)
                }
            },
        })
    }

    fn num(&self, t: &Term, env: &mut Env) -> Result<BigRational> {
        match self.term(t, env)? {
            Datum::Num(r) => Ok(r),
            Datum::Sym(s) => Err(Error::IllSorted(format!(
                "symbolic value `{s}` used in arithmetic"
            ))),
        }
    }
}

pub(crate) fn compare(a: &Datum, op: CmpOp, b: &Datum) -> Result<bool> {
    match (a, b) {
        (Datum::Num(x), Datum::Num(y)) => Ok(op.holds(x, y)),
        _ if matches!(op, CmpOp::Eq) => Ok(a == b),
        _ if matches!(op, CmpOp::Ne) => Ok(a != b),
        _ => Err(Error::IllSorted(format!(
            "cannot order `{a}` and `{b}` with {}",
            op.symbol()
        ))),
    }
}

/// Symbols whose values an interpretation must supply to decide `f`.
#[allow(dead_code)]
pub(crate) fn needed_symbols(f: &Formula) -> BTreeSet<&str> {
    f.symbols()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{Logic, SortDomain};

    fn prop_voc(names: &[&str]) -> Vocabulary {
        let mut v = Vocabulary::default();
        for n in names {
            v.predicates.insert(n.to_string(), Vec::new());
        }
        v
    }

    fn model(voc: &Vocabulary, trues: &[&str]) -> Interpretation {
        let mut m = Interpretation::default();
        for p in voc.predicates.keys() {
            m.set_atom(GroundAtom::prop(p), trues.contains(&p.as_str()));
        }
        m
    }

    #[test]
    fn classical_disjunction() {
        let voc = prop_voc(&["p", "q"]);
        let f = Formula::or(vec![Formula::atom("p"), Formula::atom("q")]);
        assert!(evaluate(&TheorySpec::pl(), &voc, &f, &model(&voc, &["p"])).unwrap());
        assert!(evaluate(&TheorySpec::pl(), &voc, &Formula::True, &model(&voc, &[])).unwrap());
    }

    #[test]
    fn minimal_models() {
        let voc = prop_voc(&["p", "q", "r"]);
        let f = Formula::and(vec![
            Formula::atom("p"),
            Formula::or(vec![Formula::not(Formula::atom("p")), Formula::atom("q")]),
        ]);
        let t = TheorySpec::new(vec![Logic::PlMin]);
        assert!(evaluate(&t, &voc, &f, &model(&voc, &["p", "q"])).unwrap());
        assert!(!evaluate(&t, &voc, &f, &model(&voc, &["p", "q", "r"])).unwrap());
    }

    #[test]
    fn product_and_sum() {
        let mut voc = Vocabulary::default();
        voc.sorts.insert("E".into(), SortDomain::Range { lo: 1, hi: 2 });
        let mut m = Interpretation::default();
        m.set_const("x1", Datum::int(1));
        m.set_const("x2", Datum::int(2));
        let t = Term::Mul(vec![Term::constant("x1"), Term::constant("x2")]);
        assert_eq!(eval_term(&voc, &t, &m).unwrap(), Datum::int(2));
        let e = || Term::Var("e".into());
        let s = Term::Sum {
            vars: vec![Binder { name: "e".into(), sort: "E".into() }],
            body: Box::new(Term::Mul(vec![e(), e()])),
        };
        assert_eq!(eval_term(&voc, &s, &m).unwrap(), Datum::int(5));
    }

    #[test]
    fn unassigned_is_an_error() {
        let voc = prop_voc(&["p"]);
        let m = Interpretation::default();
        assert!(matches!(
            evaluate(&TheorySpec::pl(), &voc, &Formula::atom("p"), &m),
            Err(Error::Unassigned(_))
        ));
    }
}
