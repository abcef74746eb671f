//! Backend selection and `count-conditional`.

use std::time::Instant;

use num_traits::Zero;

use crate::compose::compose_formula;
use crate::error::{Error, Result};
use crate::finite::{circuit_formula, count_formula};
use crate::lang::{Program, Query, WeightMode};
use crate::logic::ir::{VarDomain, VarTable};
use crate::logic::{Formula, DEFAULT_CAP};
use crate::measure::{measure_formula, optimize_program, MeasureSetup};
use crate::result::{Backend, CountResult, Stats};
use crate::semiring::{Ext, Value};

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub backend: Backend,
    /// Monte Carlo sample count.
    pub samples: u64,
    pub seed: u64,
    /// Largest search space the enumerator accepts.
    pub cap: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            backend: Backend::Auto,
            samples: 100_000,
            seed: 0,
            cap: DEFAULT_CAP,
        }
    }
}

fn has_real_symbols(p: &Program) -> bool {
    VarTable::new(&p.vocabulary, true)
        .map(|t| t.vars.iter().any(|v| v.domain == VarDomain::Real))
        .unwrap_or(false)
}

/// The backend `Auto` resolves to.
pub fn choose_backend(p: &Program) -> Backend {
    if p.components.is_some() {
        Backend::Enumerate
    } else if p.weights.mode == Some(WeightMode::Measure) {
        Backend::ExactMeasure
    } else if has_real_symbols(p) {
        Backend::Auto
    } else {
        Backend::Enumerate
    }
}

/// Evaluates the program's query.
pub fn count(p: &Program, opts: &RunOptions) -> Result<CountResult> {
    let start = Instant::now();
    let mut r = match &p.query {
        Query::Count(f) => count_query(p, f, opts)?,
        Query::Conditional { phi, q, component } => conditional(p, phi, q, *component, opts)?,
    };
    r.stats.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    Ok(r)
}

fn count_query(p: &Program, query: &Formula, opts: &RunOptions) -> Result<CountResult> {
    let backend = match opts.backend {
        Backend::Auto => choose_backend(p),
        b => b,
    };
    if p.components.is_some() {
        return match backend {
            Backend::Enumerate => compose_formula(p, query, opts.cap),
            other => Err(Error::BackendMismatch {
                backend: other.to_string(),
                reason: "composed programs are counted by enumeration".into(),
            }),
        };
    }
    match backend {
        Backend::Enumerate => count_formula(p, query, opts.cap),
        Backend::Circuit => circuit_formula(p, query),
        Backend::ExactMeasure => measure_formula(p, query),
        Backend::Mc => {
            let setup = mc_setup(p, query)?;
            Ok(crate::measure::estimate_result(&setup.estimate(opts.samples, opts.seed)?))
        }
        Backend::Auto | Backend::VertexEnum | Backend::ProjectedGradient | Backend::GridRefine => {
            if *query != p.query_formula() {
                return Err(Error::Unsupported("conditionals over optimization programs".into()));
            }
            optimize_program(p, backend, opts.seed)
        }
    }
}

fn mc_setup(p: &Program, query: &Formula) -> Result<MeasureSetup> {
    if p.weights.mode != Some(WeightMode::Measure) {
        return Err(Error::BackendMismatch {
            backend: "mc".into(),
            reason: "the theory is finite; use enumerate or circuit".into(),
        });
    }
    MeasureSetup::new(p, query)
}

/// `#(phi ∧ q) / #(phi)`; on composed programs, of one component (default 2).
fn conditional(p: &Program, phi: &Formula, q: &Formula, component: Option<u8>, opts: &RunOptions) -> Result<CountResult> {
    let joint = Formula::and(vec![phi.clone(), q.clone()]);
    let backend = match opts.backend {
        Backend::Auto => choose_backend(p),
        b => b,
    };
    if backend == Backend::Mc && p.components.is_none() {
        // Same seed, same samples: the ratio is hits(phi ∧ q) / hits(phi).
        let num = mc_setup(p, &joint)?.estimate(opts.samples, opts.seed)?;
        let den = mc_setup(p, phi)?.estimate(opts.samples, opts.seed)?;
        if den.hits == 0 {
            return Err(Error::UndefinedConditional);
        }
        let ratio = num.hits as f64 / den.hits as f64;
        let mut r = crate::measure::estimate_result(&num);
        r.value = Value::Float(ratio);
        r.std_error = Some((ratio * (1.0 - ratio) / den.hits as f64).sqrt());
        return Ok(r);
    }
    let num = count_query(p, &joint, opts)?;
    let den = count_query(p, phi, opts)?;
    let pick = |v: &Value| -> Result<Value> {
        if p.components.is_none() {
            return Ok(v.clone());
        }
        let (a, b) = v
            .components()
            .ok_or_else(|| Error::CarrierMismatch(format!("{v} is not a pair")))?;
        Ok(match component.unwrap_or(2) {
            1 => a.clone(),
            _ => b.clone(),
        })
    };
    let value = ratio(&pick(&num.value)?, &pick(&den.value)?)?;
    let mut r = CountResult::exact(value, num.backend);
    r.exact = num.exact && den.exact && r.value.is_exact();
    r.stats = Stats {
        models: num.stats.models.zip(den.stats.models).map(|(a, b)| a + b),
        regions: num.stats.regions.zip(den.stats.regions).map(|(a, b)| a + b),
        ..Stats::default()
    };
    Ok(r)
}

fn as_number(v: &Value) -> Result<Value> {
    match v {
        Value::Bool(b) => Ok(Value::int(i64::from(*b))),
        Value::Num(Ext::Fin(_)) | Value::Float(_) => Ok(v.clone()),
        other => Err(Error::Undefined(format!("cannot divide {other}"))),
    }
}

/// `num / den` for numeric values.
pub fn ratio(num: &Value, den: &Value) -> Result<Value> {
    let (num, den) = (as_number(num)?, as_number(den)?);
    match (num.as_rational(), den.as_rational()) {
        (Some(a), Some(b)) => {
            if b.is_zero() {
                return Err(Error::UndefinedConditional);
            }
            Ok(Value::rational(a / b))
        }
        _ => {
            let a = num.as_f64().unwrap_or(f64::NAN);
            let b = den.as_f64().unwrap_or(f64::NAN);
            if b == 0.0 {
                return Err(Error::UndefinedConditional);
            }
            Ok(Value::Float(a / b))
        }
    }
}
