//! Counting composed programs over `S1 × S2`.

use std::collections::HashSet;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::finite::{Enumeration, ModelWeights};
use crate::lang::{Components, Program, WeightMode};
use crate::logic::Formula;
use crate::result::{Backend, CountResult, Stats};
use crate::semiring::Value;

/// Value of `(set-option composition ...)` selecting the staged semantics.
pub const LEARN_THEN_INFER: &str = "learn-then-infer";

fn parts(p: &Program) -> Result<&Components> {
    let c = p
        .components
        .as_deref()
        .ok_or_else(|| Error::BackendMismatch {
            backend: "compose".into(),
            reason: "the program has no (compose ...)".into(),
        })?;
    if p.theory.minimal_models() {
        return Err(Error::Unsupported("composition under minimal-model semantics".into()));
    }
    for env in [&c.first, &c.second] {
        if env.weights.mode == Some(WeightMode::Measure) {
            return Err(Error::Unsupported("composition of measure environments".into()));
        }
    }
    Ok(c)
}

/// `#(query, (w1, w2))` for a composed program.
///
/// Pointwise by default: each model weighs `(w1(M), w2(M))` and the pairs are
/// folded componentwise. Under `learn-then-infer` the first component is the
/// ⊕1-optimum over the first environment's conjuncts and the second folds
/// only models whose first-environment part attains it.
pub fn compose_formula(p: &Program, query: &Formula, cap: u64) -> Result<CountResult> {
    let c = parts(p)?;
    if p.option("composition") == Some(LEARN_THEN_INFER) {
        return learn_then_infer(p, c, query, cap);
    }
    let bindings = p.all_bindings();
    let en = Enumeration::run(&p.vocabulary, &bindings, query, false, cap)?;
    let w1 = ModelWeights::compile(&c.first.weights, &c.first.algebra, &p.vocabulary, &en.table, &bindings)?;
    let w2 = ModelWeights::compile(&c.second.weights, &c.second.algebra, &p.vocabulary, &en.table, &bindings)?;
    let mut ws = Vec::with_capacity(en.outcome.models.len());
    for m in &en.outcome.models {
        let vals = en.scalars(m);
        ws.push(Value::pair(w1.weight(m, &vals, &en.table)?, w2.weight(m, &vals, &en.table)?));
    }
    let mut r = CountResult::exact(p.algebra.fold(ws)?, Backend::Enumerate);
    r.stats = Stats {
        models: Some(en.outcome.models.len() as u64),
        search_nodes: Some(en.outcome.nodes),
        free_slots: Some(en.outcome.free_slots as u64),
        ..Stats::default()
    };
    Ok(r)
}

fn learn_then_infer(p: &Program, c: &Components, query: &Formula, cap: u64) -> Result<CountResult> {
    if !c.first.algebra.is_selective() {
        return Err(Error::Unsupported(format!(
            "learn-then-infer needs a selective first algebra, not {}",
            c.first.algebra
        )));
    }
    let bindings = p.all_bindings();
    let resolved = p.resolve(query)?;
    let first_symbols = c.first.vocabulary.symbols();
    let learn: Vec<Formula> = resolved
        .conjuncts()
        .into_iter()
        .filter(|f| f.symbols().is_subset(&first_symbols))
        .cloned()
        .collect();
    let learn = Formula::and(learn);
    let stage1 = Enumeration::run(&c.first.vocabulary, &IndexMap::new(), &learn, false, cap)?;
    let w1 = ModelWeights::compile(&c.first.weights, &c.first.algebra, &c.first.vocabulary, &stage1.table, &bindings)?;
    let mut ws1 = Vec::with_capacity(stage1.outcome.models.len());
    for m in &stage1.outcome.models {
        ws1.push(w1.weight(m, &stage1.scalars(m), &stage1.table)?);
    }
    let v1 = c.first.algebra.fold(ws1.iter().cloned())?;
    let optimal: Vec<&Vec<u32>> = stage1
        .outcome
        .models
        .iter()
        .zip(&ws1)
        .filter(|(_, w)| **w == v1)
        .map(|(m, _)| m)
        .collect();
    let keys: HashSet<&Vec<u32>> = optimal.iter().copied().collect();

    let stage2 = Enumeration::run(&p.vocabulary, &bindings, query, false, cap)?;
    let project: Vec<usize> = stage1
        .table
        .vars
        .iter()
        .map(|v| stage2.table.lookup(&v.symbol, &v.args).expect("merged table has every first-environment slot"))
        .collect();
    let w2 = ModelWeights::compile(&c.second.weights, &c.second.algebra, &p.vocabulary, &stage2.table, &bindings)?;
    let mut ws2 = Vec::new();
    for m in &stage2.outcome.models {
        let key: Vec<u32> = project.iter().map(|&s| m[s]).collect();
        if keys.contains(&key) {
            ws2.push(w2.weight(m, &stage2.scalars(m), &stage2.table)?);
        }
    }
    let v2 = c.second.algebra.fold(ws2.iter().cloned())?;
    let mut r = CountResult::exact(Value::pair(v1, v2), Backend::Enumerate);
    r.witness = optimal.first().map(|m| stage1.table.interpretation(m));
    r.stats = Stats {
        models: Some(ws2.len() as u64),
        search_nodes: Some(stage1.outcome.nodes + stage2.outcome.nodes),
        free_slots: Some(stage2.outcome.free_slots as u64),
        ..Stats::default()
    };
    Ok(r)
}

pub fn count_composed(p: &Program, cap: u64) -> Result<CountResult> {
    compose_formula(p, &p.query_formula(), cap)
}
