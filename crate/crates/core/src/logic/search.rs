use std::collections::HashMap;

use indexmap::IndexMap;
use num_rational::BigRational;

use super::ir::{CFormula, CTerm, Compiler, VarDomain, VarTable};
use super::{Formula, GroundAtom, Interpretation, TheorySpec, Vocabulary};
use crate::error::{Error, Result};

/// Default bound on the product of free-slot domain sizes.
pub const DEFAULT_CAP: u64 = 1 << 26;

/// Satisfying assignments of a compiled formula over a finite [`VarTable`].
///
/// Slots fixed by unit conjuncts, and slots defined by a top-level equality
/// (`x == t`, `p <=> g`) are computed rather than branched on, so only the
/// remaining free slots count against the cap.
pub struct ModelSearch<'a> {
    pub table: &'a VarTable,
    pub formula: CFormula<BigRational>,
    pub fixed: Vec<Option<u32>>,
    pub cap: u64,
    pub minimal: bool,
}

#[derive(Clone, Debug, Default)]
pub struct SearchOutcome {
    /// Domain indices per slot, sorted in canonical order.
    pub models: Vec<Vec<u32>>,
    pub free_slots: usize,
    pub nodes: u64,
}

enum Def {
    Term(CTerm<BigRational>),
    Formula(CFormula<BigRational>),
}

impl<'a> ModelSearch<'a> {
    pub fn new(table: &'a VarTable, formula: CFormula<BigRational>) -> Self {
        ModelSearch {
            table,
            formula,
            fixed: vec![None; table.len()],
            cap: DEFAULT_CAP,
            minimal: false,
        }
    }

    pub fn run(&self) -> Result<SearchOutcome> {
        let n = self.table.len();
        if let Some(v) = self.table.vars.iter().find(|v| matches!(v.domain, VarDomain::Real)) {
            return Err(Error::InfiniteDomain(v.name()));
        }
        let values: Vec<Vec<BigRational>> = (0..n).map(|i| self.table.domain_values(i)).collect();
        let index_of: Vec<HashMap<&BigRational, u32>> = values
            .iter()
            .map(|vs| vs.iter().enumerate().map(|(i, v)| (v, i as u32)).collect())
            .collect();

        let mut fixed = self.fixed.clone();
        let mut defs: Vec<(usize, Def)> = Vec::new();
        let mut defined = vec![false; n];
        let mut unsat = false;
        for c in self.formula.conjuncts() {
            match c {
                CFormula::Const(false) => unsat = true,
                CFormula::Var(v) => unsat |= !set_fixed(&mut fixed, *v, 1),
                CFormula::Not(g) => {
                    if let CFormula::Var(v) = g.as_ref() {
                        unsat |= !set_fixed(&mut fixed, *v, 0);
                    }
                }
                CFormula::Cmp(a, super::CmpOp::Eq, b) => {
                    for (lhs, rhs) in [(a, b), (b, a)] {
                        let CTerm::Var(v) = lhs else { continue };
                        let v = *v;
                        if self.table.vars[v].is_bool() || defined[v] {
                            continue;
                        }
                        if let CTerm::Const(k) = rhs {
                            match index_of[v].get(k) {
                                Some(&i) => unsat |= !set_fixed(&mut fixed, v, i),
                                None => unsat = true,
                            }
                            break;
                        }
                        if fixed[v].is_none() && acyclic(v, &rhs.vars(), &defs) {
                            defs.push((v, Def::Term(rhs.clone())));
                            defined[v] = true;
                            break;
                        }
                    }
                }
                CFormula::Iff(a, b) => {
                    for (lhs, rhs) in [(a, b), (b, a)] {
                        let CFormula::Var(v) = lhs.as_ref() else { continue };
                        let v = *v;
                        if defined[v] || fixed[v].is_some() {
                            continue;
                        }
                        if acyclic(v, &rhs.vars(), &defs) {
                            defs.push((v, Def::Formula(rhs.as_ref().clone())));
                            defined[v] = true;
                            break;
                        }
                    }
                }
                _ => {}
            }
        }
        let mut out = SearchOutcome::default();
        if unsat {
            return Ok(out);
        }
        let free: Vec<usize> = (0..n).filter(|&i| fixed[i].is_none() && !defined[i]).collect();
        out.free_slots = free.len();
        let mut space: u128 = 1;
        for &v in &free {
            space = space.saturating_mul(values[v].len() as u128);
        }
        if space > self.cap as u128 {
            return Err(Error::CapExceeded {
                size: space.to_string(),
                cap: self.cap,
            });
        }

        let order = topo_order(&defs);
        let mut state = State {
            vals: vec![None; n],
            idx: vec![u32::MAX; n],
        };
        for (v, f) in fixed.iter().enumerate() {
            if let Some(i) = f {
                state.vals[v] = Some(values[v][*i as usize].clone());
                state.idx[v] = *i;
            }
        }
        let ctx = Ctx {
            formula: &self.formula,
            values: &values,
            index_of: &index_of,
            defs: &defs,
            order: &order,
            free: &free,
        };
        ctx.dfs(0, &mut state, &mut out);
        out.models.sort();
        if self.minimal {
            out.models = minimal_only(self.table, out.models);
        }
        Ok(out)
    }
}

fn set_fixed(fixed: &mut [Option<u32>], v: usize, i: u32) -> bool {
    match fixed[v] {
        Some(j) => j == i,
        None => {
            fixed[v] = Some(i);
            true
        }
    }
}

/// True when defining `v` by an expression over `deps` creates no cycle.
fn acyclic(v: usize, deps: &[usize], defs: &[(usize, Def)]) -> bool {
    let mut stack: Vec<usize> = deps.to_vec();
    let mut seen = std::collections::HashSet::new();
    while let Some(d) = stack.pop() {
        if d == v {
            return false;
        }
        if !seen.insert(d) {
            continue;
        }
        if let Some((_, def)) = defs.iter().find(|(w, _)| *w == d) {
            stack.extend(def_vars(def));
        }
    }
    true
}

fn def_vars(d: &Def) -> Vec<usize> {
    match d {
        Def::Term(t) => t.vars(),
        Def::Formula(f) => f.vars(),
    }
}

/// Definitions ordered so that each comes after those it depends on.
fn topo_order(defs: &[(usize, Def)]) -> Vec<usize> {
    let pos: HashMap<usize, usize> = defs.iter().enumerate().map(|(i, (v, _))| (*v, i)).collect();
    let mut order = Vec::new();
    let mut mark = vec![false; defs.len()];
    fn visit(i: usize, defs: &[(usize, Def)], pos: &HashMap<usize, usize>, mark: &mut [bool], order: &mut Vec<usize>) {
        if mark[i] {
            return;
        }
        mark[i] = true;
        for d in def_vars(&defs[i].1) {
            if let Some(&j) = pos.get(&d) {
                visit(j, defs, pos, mark, order);
            }
        }
        order.push(i);
    }
    for i in 0..defs.len() {
        visit(i, defs, &pos, &mut mark, &mut order);
    }
    order
}

struct State {
    vals: Vec<Option<BigRational>>,
    idx: Vec<u32>,
}

struct Ctx<'c> {
    formula: &'c CFormula<BigRational>,
    values: &'c [Vec<BigRational>],
    index_of: &'c [HashMap<&'c BigRational, u32>],
    defs: &'c [(usize, Def)],
    order: &'c [usize],
    free: &'c [usize],
}

impl Ctx<'_> {
    /// Computes every definition whose inputs are known. Returns false when a
    /// defined value falls outside its slot's domain.
    fn propagate(&self, st: &mut State, touched: &mut Vec<usize>) -> bool {
        for &di in self.order {
            let (v, def) = &self.defs[di];
            if st.vals[*v].is_some() {
                continue;
            }
            let value = match def {
                Def::Term(t) => t.eval(&st.vals),
                Def::Formula(f) => f.eval3(&st.vals).map(|b| if b { crate::scalar::int(1) } else { crate::scalar::int(0) }),
            };
            let Some(value) = value else { continue };
            match self.index_of[*v].get(&value) {
                Some(&i) => {
                    st.vals[*v] = Some(value);
                    st.idx[*v] = i;
                    touched.push(*v);
                }
                None => return false,
            }
        }
        true
    }

    fn dfs(&self, depth: usize, st: &mut State, out: &mut SearchOutcome) {
        out.nodes += 1;
        let mut touched = Vec::new();
        let ok = self.propagate(st, &mut touched);
        if ok {
            match self.formula.eval3(&st.vals) {
                Some(false) => {}
                verdict => {
                    if depth == self.free.len() {
                        if verdict == Some(true) {
                            out.models.push(st.idx.clone());
                        }
                    } else {
                        let v = self.free[depth];
                        for (i, value) in self.values[v].iter().enumerate() {
                            st.vals[v] = Some(value.clone());
                            st.idx[v] = i as u32;
                            self.dfs(depth + 1, st, out);
                        }
                        st.vals[v] = None;
                        st.idx[v] = u32::MAX;
                    }
                }
            }
        }
        for v in touched {
            st.vals[v] = None;
            st.idx[v] = u32::MAX;
        }
    }
}

/// Keeps models whose set of true boolean slots has no proper subset among
/// the other models.
fn minimal_only(table: &VarTable, models: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
    let bools: Vec<usize> = (0..table.len()).filter(|&i| table.vars[i].is_bool()).collect();
    let trues = |m: &Vec<u32>| -> Vec<usize> { bools.iter().copied().filter(|&b| m[b] == 1).collect() };
    let sets: Vec<Vec<usize>> = models.iter().map(trues).collect();
    let proper_subset = |a: &Vec<usize>, b: &Vec<usize>| a.len() < b.len() && a.iter().all(|x| b.contains(x));
    models
        .iter()
        .enumerate()
        .filter(|(i, _)| !sets.iter().any(|s| proper_subset(s, &sets[*i])))
        .map(|(_, m)| m.clone())
        .collect()
}

/// Satisfying interpretations of `f` in canonical order.
///
/// Data predicates are held to the positive ground atoms among the top-level
/// conjuncts of `f`.
pub fn enumerate_models(theory: &TheorySpec, voc: &Vocabulary, f: &Formula) -> Result<Vec<Interpretation>> {
    let table = VarTable::new(voc, false)?;
    let bindings = IndexMap::new();
    let compiled = Compiler::new(voc, &table, &bindings).formula(f)?;
    let mut search = ModelSearch::new(&table, compiled);
    search.minimal = theory.minimal_models();
    fix_data(voc, &table, f, &bindings, &mut search.fixed)?;
    let out = search.run()?;
    Ok(out.models.iter().map(|m| table.interpretation(m)).collect())
}

/// Closes data predicates over the positive facts in the query.
pub(crate) fn fix_data(
    voc: &Vocabulary,
    table: &VarTable,
    query: &Formula,
    bindings: &IndexMap<String, Formula>,
    fixed: &mut [Option<u32>],
) -> Result<()> {
    if voc.data_symbols.is_empty() {
        return Ok(());
    }
    for (i, v) in table.vars.iter().enumerate() {
        if voc.data_symbols.contains(&v.symbol) {
            fixed[i] = Some(0);
        }
    }
    let mut facts = Vec::new();
    collect_facts(query, bindings, &mut facts, &mut Vec::new());
    for atom in facts {
        if !voc.data_symbols.contains(&atom.pred) {
            continue;
        }
        let slot = table
            .lookup(&atom.pred, &atom.args)
            .ok_or_else(|| Error::IllSorted(format!("no ground atom {atom}")))?;
        fixed[slot] = Some(1);
    }
    Ok(())
}

fn collect_facts(f: &Formula, bindings: &IndexMap<String, Formula>, out: &mut Vec<GroundAtom>, stack: &mut Vec<String>) {
    match f {
        Formula::And(gs) => gs.iter().for_each(|g| collect_facts(g, bindings, out, stack)),
        Formula::Ref(name) if !stack.contains(name) => {
            if let Some(body) = bindings.get(name) {
                stack.push(name.clone());
                collect_facts(body, bindings, out, stack);
                stack.pop();
            }
        }
        Formula::Atom { pred, args } => {
            let ground: Option<Vec<_>> = args
                .iter()
                .map(|a| match a {
                    super::Term::Lit(d) => Some(d.clone()),
                    _ => None,
                })
                .collect();
            if let Some(args) = ground {
                out.push(GroundAtom { pred: pred.clone(), args });
            }
        }
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{CmpOp, Datum, FunctionSig, SortDomain, Term};

    fn pq() -> Vocabulary {
        let mut v = Vocabulary::default();
        v.predicates.insert("p".into(), vec![]);
        v.predicates.insert("q".into(), vec![]);
        v
    }

    #[test]
    fn three_models_of_disjunction() {
        let f = Formula::or(vec![Formula::atom("p"), Formula::atom("q")]);
        let ms = enumerate_models(&TheorySpec::pl(), &pq(), &f).unwrap();
        assert_eq!(ms.len(), 3);
        // false-before-true on p, then q
        assert_eq!(ms[0].to_string(), "{not p, q}");
        assert_eq!(ms[2].to_string(), "{p, q}");
        assert!(enumerate_models(&TheorySpec::pl(), &pq(), &Formula::False).unwrap().is_empty());
    }

    #[test]
    fn definitions_shrink_the_space() {
        let mut v = Vocabulary::default();
        v.sorts.insert("N".into(), SortDomain::Range { lo: 0, hi: 1_000_000 });
        for c in ["x", "y"] {
            v.functions.insert(c.into(), FunctionSig { args: vec![], result: "N".into() });
        }
        // x == 3 and y == x*x
        let f = Formula::and(vec![
            Formula::cmp(Term::constant("x"), CmpOp::Eq, Term::int(3)),
            Formula::cmp(
                Term::constant("y"),
                CmpOp::Eq,
                Term::Mul(vec![Term::constant("x"), Term::constant("x")]),
            ),
        ]);
        let ms = enumerate_models(&TheorySpec::pl(), &v, &f).unwrap();
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].value("y", &[]), Some(&Datum::int(9)));
    }

    #[test]
    fn cap_is_enforced() {
        let mut v = Vocabulary::default();
        v.sorts.insert("N".into(), SortDomain::Range { lo: 0, hi: 9999 });
        for c in ["x", "y", "z"] {
            v.functions.insert(c.into(), FunctionSig { args: vec![], result: "N".into() });
        }
        let f = Formula::cmp(Term::constant("x"), CmpOp::Le, Term::constant("y"));
        assert!(matches!(
            enumerate_models(&TheorySpec::pl(), &v, &f),
            Err(Error::CapExceeded { .. })
        ));
    }
}
