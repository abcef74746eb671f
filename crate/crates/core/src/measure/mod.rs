//! Counting with measures: exact region decomposition, Monte Carlo, and
//! optimization over real variables.

pub mod diff;
pub mod factorize;
pub mod interval;
pub mod linalg;
pub mod mc;
pub mod optimize;
pub mod region;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lang::{MeasureKind, Program, WeightMode};
use crate::logic::ir::{CFormula, CTerm, Compiler, VarTable};
use crate::logic::{CmpOp, Formula};
use crate::result::{Backend, CountResult, Stats};

pub use factorize::{factorize_demo, Factorization};
pub use interval::Interval;
pub use mc::{Estimate, SampleDim};
pub use optimize::{optimize_program, Problem, Sense, Solution};
pub use region::{decompose, Axis, Dim, Part, Region};

/// A measure program's query compiled against its measured symbols.
#[derive(Clone, Debug)]
pub struct MeasureSetup {
    pub table: VarTable,
    /// The query with `bounds` options conjoined.
    pub formula: CFormula<BigRational>,
    pub dims: Vec<Dim<BigRational>>,
    pub bounds: Vec<Option<(BigRational, BigRational)>>,
}

impl MeasureSetup {
    pub fn new(p: &Program, query: &Formula) -> Result<Self> {
        if p.weights.mode != Some(WeightMode::Measure) {
            return Err(Error::BackendMismatch {
                backend: "exact-measure".into(),
                reason: "the program declares no measures".into(),
            });
        }
        let table = VarTable::new(&p.vocabulary, true)?;
        let bindings = p.all_bindings();
        let mut parts = vec![Compiler::new(&p.vocabulary, &table, &bindings).formula(query)?];
        let mut dims = Vec::new();
        let mut bounds = Vec::new();
        for (slot, info) in table.vars.iter().enumerate() {
            let Some(m) = p.weights.measures.get(&info.symbol) else { continue };
            let axis = match m.kind {
                MeasureKind::Lebesgue => Axis::Real,
                MeasureKind::Counting => Axis::Finite(table.domain_values(slot)),
            };
            let b = p.bounds.get(&info.symbol).cloned();
            if let Some((lo, hi)) = &b {
                parts.push(CFormula::Cmp(CTerm::Const(lo.clone()), CmpOp::Le, CTerm::Var(slot)));
                parts.push(CFormula::Cmp(CTerm::Var(slot), CmpOp::Le, CTerm::Const(hi.clone())));
            }
            dims.push(Dim { slot, name: info.name(), axis });
            bounds.push(b);
        }
        let formula = CFormula::And(parts);
        if let Some(v) = formula.vars().into_iter().find(|v| dims.iter().all(|d| d.slot != *v)) {
            return Err(Error::Unsupported(format!(
                "`{}` has no declared measure",
                table.vars[v].name()
            )));
        }
        Ok(MeasureSetup { table, formula, dims, bounds })
    }

    pub fn regions(&self) -> Result<Vec<Region<BigRational>>> {
        decompose(&self.formula, &self.dims, self.table.len())
    }

    /// Product measure of one region.
    pub fn measure(&self, r: &Region<BigRational>) -> Result<BigRational> {
        let mut acc = BigRational::from_integer(1.into());
        for (dim, part) in self.dims.iter().zip(&r.parts) {
            let size = match part {
                Part::Real(ivs) => {
                    let mut total = BigRational::zero();
                    for iv in ivs {
                        total += iv.length().ok_or_else(|| Error::InfiniteMeasure(dim.name.clone()))?;
                    }
                    total
                }
                Part::Finite(idx) => BigRational::from_integer((idx.len() as i64).into()),
            };
            acc *= size;
        }
        Ok(acc)
    }

    pub fn sample_dims(&self) -> Result<Vec<SampleDim>> {
        self.dims
            .iter()
            .zip(&self.bounds)
            .map(|(d, b)| match (&d.axis, b) {
                (Axis::Real, Some((lo, hi))) => Ok(SampleDim::Uniform {
                    slot: d.slot,
                    lo: lo.to_f64().unwrap_or(f64::NAN),
                    hi: hi.to_f64().unwrap_or(f64::NAN),
                }),
                (Axis::Real, None) => Err(Error::MissingBounds(self.table.vars[d.slot].symbol.clone())),
                (Axis::Finite(values), _) => Ok(SampleDim::Pick {
                    slot: d.slot,
                    values: values.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect(),
                }),
            })
            .collect()
    }

    pub fn estimate(&self, samples: u64, seed: u64) -> Result<Estimate> {
        let dims = self.sample_dims()?;
        let f: CFormula<f64> = self.formula.map_scalar(&|r| r.to_f64().unwrap_or(f64::NAN));
        Ok(mc::estimate(&f, &dims, self.table.len(), samples, seed))
    }
}

/// Exact `#(query, μ)` as the ⊕-fold of region measures.
pub fn measure_formula(p: &Program, query: &Formula) -> Result<CountResult> {
    let setup = MeasureSetup::new(p, query)?;
    let regions = setup.regions()?;
    let mut values = Vec::with_capacity(regions.len());
    for r in &regions {
        values.push(p.algebra.value_from_number(&setup.measure(r)?)?);
    }
    let mut out = CountResult::exact(p.algebra.fold(values)?, Backend::ExactMeasure);
    out.stats = Stats {
        regions: Some(regions.len() as u64),
        ..Stats::default()
    };
    Ok(out)
}

pub fn product_measure_count(p: &Program) -> Result<CountResult> {
    measure_formula(p, &p.query_formula())
}

/// Monte Carlo estimate of `#(query, μ)` over the bounded box.
pub fn mc_formula(p: &Program, query: &Formula, samples: u64, seed: u64) -> Result<CountResult> {
    let e = MeasureSetup::new(p, query)
        .map_err(|e| match e {
            Error::BackendMismatch { reason, .. } => Error::BackendMismatch { backend: "mc".into(), reason },
            other => other,
        })?
        .estimate(samples, seed)?;
    Ok(estimate_result(&e))
}

pub fn estimate_result(e: &Estimate) -> CountResult {
    let mut out = CountResult::exact(crate::semiring::Value::Float(e.value), Backend::Mc);
    out.exact = false;
    out.std_error = Some(e.std_error);
    out.stats = Stats {
        samples: Some(e.samples),
        hits: Some(e.hits),
        ..Stats::default()
    };
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;
    use crate::scalar::rat;
    use crate::semiring::Value;

    const HYBRID: &str = "(set-logic LRA) (set-algebra [REAL,+,*,0,1])
        (set-type BIT={0,1})
        (declare-function X () REAL) (declare-function Y () BIT)
        (set-option bounds X 0 1)
        (declare-measure X LEBESGUE) (declare-measure Y COUNTING)
        PHI = ((0 <= X <= 1) and (Y == 0 or Y == 1) and (X > 0.6 and Y != 1))
        (count PHI)";

    #[test]
    fn hybrid_volume() {
        let p = parse(HYBRID).unwrap();
        let r = product_measure_count(&p).unwrap();
        assert_eq!(r.value, Value::rational(rat(2, 5)));
        let m = mc_formula(&p, &p.query_formula(), 100_000, 1).unwrap();
        let x = m.value.as_f64().unwrap();
        assert!((x - 0.4).abs() < 4.0 * m.std_error.unwrap());
    }

    #[test]
    fn unbounded_and_unsampled() {
        let p = parse(&HYBRID.replace("(set-option bounds X 0 1)", "").replace("(count PHI)", "(count (X > 0))")).unwrap();
        assert!(matches!(product_measure_count(&p), Err(Error::InfiniteMeasure(ref x)) if x == "X"));
        assert!(matches!(mc_formula(&p, &p.query_formula(), 10, 0), Err(Error::MissingBounds(_))));
    }
}
