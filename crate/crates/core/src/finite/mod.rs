//! Counting over finite theories: exhaustive enumeration and compiled circuits.

pub mod circuit;

use indexmap::IndexMap;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::lang::{Program, WeightMode, WeightSpec};
use crate::logic::ir::{CFormula, CTerm, Compiler, VarTable};
use crate::logic::{fix_data, Formula, ModelSearch, SearchOutcome, Vocabulary};
use crate::result::{Backend, CountResult, Stats};
use crate::semiring::{SemiringSpec, Value};

pub use circuit::{brute_force_count, circuit_formula, count_circuit, Circuit, Node, NodeId, Prop};

/// Satisfying models of `query` over a finite table.
pub struct Enumeration {
    pub table: VarTable,
    pub outcome: SearchOutcome,
    /// Scalar value of every domain element, per slot.
    pub values: Vec<Vec<BigRational>>,
}

impl Enumeration {
    pub fn run(
        voc: &Vocabulary,
        bindings: &IndexMap<String, Formula>,
        query: &Formula,
        minimal: bool,
        cap: u64,
    ) -> Result<Self> {
        let table = VarTable::new(voc, false)?;
        let compiled: CFormula<BigRational> = Compiler::new(voc, &table, bindings).formula(query)?;
        let mut search = ModelSearch::new(&table, compiled);
        search.cap = cap;
        search.minimal = minimal;
        fix_data(voc, &table, query, bindings, &mut search.fixed)?;
        let outcome = search.run()?;
        let values = (0..table.len()).map(|i| table.domain_values(i)).collect();
        Ok(Enumeration { table, outcome, values })
    }

    pub fn scalars(&self, model: &[u32]) -> Vec<Option<BigRational>> {
        model
            .iter()
            .enumerate()
            .map(|(v, &i)| Some(self.values[v][i as usize].clone()))
            .collect()
    }
}

/// A weight specification compiled against a variable table.
pub struct ModelWeights<'a> {
    algebra: &'a SemiringSpec,
    kind: WeightKind,
}

enum WeightKind {
    Unit(Value),
    /// `(slot, truth, weight)` for each declared literal.
    Literals(Vec<(usize, u32, Value)>),
    Guarded(Vec<(CFormula<BigRational>, CTerm<BigRational>)>),
}

impl<'a> ModelWeights<'a> {
    pub fn compile(
        spec: &WeightSpec,
        algebra: &'a SemiringSpec,
        voc: &Vocabulary,
        table: &VarTable,
        bindings: &IndexMap<String, Formula>,
    ) -> Result<Self> {
        let kind = match spec.mode {
            None => WeightKind::Unit(algebra.unit()),
            Some(WeightMode::Factorized) => {
                let mut lits = Vec::new();
                for (lit, w) in &spec.literals {
                    let slot = table
                        .lookup(&lit.atom.pred, &lit.atom.args)
                        .ok_or_else(|| Error::IllSorted(format!("no ground atom {}", lit.atom)))?;
                    lits.push((slot, u32::from(lit.positive), w.clone()));
                }
                WeightKind::Literals(lits)
            }
            Some(WeightMode::ModelLevel) => {
                let c = Compiler::new(voc, table, bindings);
                let mut guarded = Vec::new();
                for (g, t) in &spec.guarded {
                    guarded.push((c.formula(g)?, c.term(t)?));
                }
                WeightKind::Guarded(guarded)
            }
            Some(WeightMode::Measure) => {
                return Err(Error::BackendMismatch {
                    backend: "enumerate".into(),
                    reason: "measure weights need the exact-measure or mc backend".into(),
                })
            }
        };
        Ok(ModelWeights { algebra, kind })
    }

    /// `w(M)` for a model given as slot indices and their scalar values.
    pub fn weight(&self, model: &[u32], vals: &[Option<BigRational>], table: &VarTable) -> Result<Value> {
        match &self.kind {
            WeightKind::Unit(v) => Ok(v.clone()),
            WeightKind::Literals(lits) => self.algebra.product(
                lits.iter()
                    .filter(|(slot, truth, _)| model[*slot] == *truth)
                    .map(|(_, _, w)| w.clone()),
            ),
            WeightKind::Guarded(guards) => {
                for (g, t) in guards {
                    if g.eval3(vals) == Some(true) {
                        let r = t
                            .eval(vals)
                            .ok_or_else(|| Error::Undefined("weight term has unassigned inputs".into()))?;
                        return self.algebra.value_from_number(&r);
                    }
                }
                Err(Error::NoGuard(table.interpretation(model).to_string()))
            }
        }
    }

    pub fn is_factorized(&self) -> bool {
        matches!(self.kind, WeightKind::Literals(_))
    }
}

/// `#(query, w)` by enumerating satisfying models in canonical order.
pub fn count_formula(p: &Program, query: &Formula, cap: u64) -> Result<CountResult> {
    if p.components.is_some() {
        return Err(Error::BackendMismatch {
            backend: "enumerate".into(),
            reason: "composed programs are counted by the composition engine".into(),
        });
    }
    if p.weights.mode == Some(WeightMode::Measure) {
        return Err(Error::BackendMismatch {
            backend: "enumerate".into(),
            reason: "measure weights need the exact-measure or mc backend".into(),
        });
    }
    let bindings = p.all_bindings();
    let en = Enumeration::run(&p.vocabulary, &bindings, query, p.theory.minimal_models(), cap)?;
    let weights = ModelWeights::compile(&p.weights, &p.algebra, &p.vocabulary, &en.table, &bindings)?;
    let mut ws = Vec::with_capacity(en.outcome.models.len());
    for m in &en.outcome.models {
        ws.push(weights.weight(m, &en.scalars(m), &en.table)?);
    }
    let value = p.algebra.fold(ws.iter().cloned())?;
    let witness = if p.algebra.is_selective() {
        ws.iter()
            .position(|w| *w == value)
            .map(|i| en.table.interpretation(&en.outcome.models[i]))
    } else {
        None
    };
    let mut r = CountResult::exact(value, Backend::Enumerate);
    r.witness = witness;
    r.stats = Stats {
        models: Some(en.outcome.models.len() as u64),
        search_nodes: Some(en.outcome.nodes),
        free_slots: Some(en.outcome.free_slots as u64),
        ..Stats::default()
    };
    Ok(r)
}

/// `#(φ, w)` for the program's query by enumeration.
pub fn count_enumerative(p: &Program, cap: u64) -> Result<CountResult> {
    count_formula(p, &p.query_formula(), cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;
    use crate::logic::DEFAULT_CAP;

    const FIG2: &str = "(set-logic PL) (set-algebra [NAT,max,*,0,1])
        (declare-predicate p ()) (declare-predicate q ())
        F = (p or q)
        (declare-weight (p 1)) (declare-weight ((neg p) 2))
        (declare-weight (q 3)) (declare-weight ((neg q) 4))
        (count F)";

    #[test]
    fn mpe_and_wmc() {
        let p = parse(FIG2).unwrap();
        let r = count_enumerative(&p, DEFAULT_CAP).unwrap();
        assert_eq!(r.value, Value::int(6));
        assert_eq!(r.witness.unwrap().to_string(), "{not p, q}");
        let p = parse(&FIG2.replace("max", "+")).unwrap();
        let r = count_enumerative(&p, DEFAULT_CAP).unwrap();
        assert_eq!(r.value, Value::int(13));
        assert!(r.witness.is_none());
    }

    #[test]
    fn unsatisfiable_is_empty() {
        let p = parse(&FIG2.replace("(count F)", "(count (F and not p and not q))")).unwrap();
        let r = count_enumerative(&p, DEFAULT_CAP).unwrap();
        assert_eq!(r.value, Value::int(0));
        assert!(r.witness.is_none());
    }

    #[test]
    fn guard_must_cover_models() {
        let src = "(set-logic PL) (set-algebra [NAT,+,0]) (declare-predicate p ())
            (declare-weight p 5) (count TRUE)";
        let p = parse(src).unwrap();
        assert!(matches!(count_enumerative(&p, DEFAULT_CAP), Err(Error::NoGuard(_))));
    }
}
