//! Optimization of a weight term over a real region (`[REAL,inf,0]`, `[REAL,sup,0]`).

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::diff::gradient;
use super::linalg::{dot, solve};
use super::region::show;
use crate::scalar::round_float;
use crate::error::{Error, Result};
use crate::lang::{Program, WeightMode};
use crate::logic::ir::{CFormula, CTerm, Compiler, VarDomain, VarTable};
use crate::logic::{CmpOp, Datum, Formula, GroundAtom, Interpretation};
use crate::result::{Backend, CountResult, Stats};
use crate::semiring::{PlusOp, Value};

/// Largest number of constraint subsets vertex enumeration will try.
pub const VERTEX_CAP: u128 = 1_000_000;
pub const PG_MAX_ITER: u64 = 10_000;
pub const GRID_POINTS: f64 = 1e5;
pub const GRID_ROUNDS: u64 = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// `opt { objective(x) : constraints(x), lo <= x <= hi }` over variables `0..n`.
#[derive(Clone, Debug)]
pub struct Problem {
    pub names: Vec<String>,
    pub constraints: Vec<CFormula<BigRational>>,
    pub objective: CTerm<BigRational>,
    pub sense: Sense,
    pub bounds: Vec<(BigRational, BigRational)>,
    origin: Option<Origin>,
}

/// Where the variables came from, for witnesses.
#[derive(Clone, Debug)]
struct Origin {
    table: VarTable,
    decision: Vec<usize>,
    defined: Vec<(usize, CTerm<BigRational>)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution<T> {
    /// `None` when the problem is infeasible.
    pub x: Option<Vec<T>>,
    pub value: Option<T>,
    pub flags: Vec<String>,
    pub iterations: u64,
    pub evaluations: u64,
}

impl<T> Solution<T> {
    fn infeasible(evaluations: u64) -> Self {
        Solution {
            x: None,
            value: None,
            flags: vec!["infeasible".into()],
            iterations: 0,
            evaluations,
        }
    }
}

impl Problem {
    pub fn new(
        names: Vec<String>,
        constraints: Vec<CFormula<BigRational>>,
        objective: CTerm<BigRational>,
        sense: Sense,
        bounds: Vec<(BigRational, BigRational)>,
    ) -> Self {
        Problem {
            names,
            constraints,
            objective,
            sense,
            bounds,
            origin: None,
        }
    }

    /// Builds the problem a program describes.
    ///
    /// Equalities `x == t` (either side) become definitions and are
    /// substituted away; the remaining free slots are the decision variables.
    pub fn from_program(p: &Program) -> Result<Problem> {
        let sense = match p.algebra.plus {
            PlusOp::Min | PlusOp::Inf => Sense::Minimize,
            PlusOp::Max | PlusOp::Sup => Sense::Maximize,
            _ => {
                return Err(Error::BackendMismatch {
                    backend: "optimize".into(),
                    reason: format!("{} does not select a minimum or maximum", p.algebra),
                })
            }
        };
        let term = match (p.weights.mode, p.weights.guarded.as_slice()) {
            (Some(WeightMode::ModelLevel), [(Formula::True, t)]) => t,
            _ => {
                return Err(Error::Unsupported(
                    "optimization needs exactly one weight, (declare-weight TRUE TERM)".into(),
                ))
            }
        };
        let table = VarTable::new(&p.vocabulary, true)?;
        let bindings = p.all_bindings();
        let c = Compiler::new(&p.vocabulary, &table, &bindings);
        let query: CFormula<BigRational> = c.formula(&p.query_formula())?;
        let objective: CTerm<BigRational> = c.term(term)?;
        let conj: Vec<CFormula<BigRational>> = query.conjuncts().into_iter().cloned().collect();

        let mut defs: HashMap<usize, CTerm<BigRational>> = HashMap::new();
        let mut used = vec![false; conj.len()];
        loop {
            let mut changed = false;
            for (i, f) in conj.iter().enumerate() {
                if used[i] {
                    continue;
                }
                let CFormula::Cmp(a, CmpOp::Eq, b) = f else { continue };
                for (l, r) in [(a, b), (b, a)] {
                    let CTerm::Var(v) = l else { continue };
                    if defs.contains_key(v) {
                        continue;
                    }
                    let r = r.substitute(&defs);
                    if r.vars().contains(v) {
                        continue;
                    }
                    let single = HashMap::from([(*v, r.clone())]);
                    for d in defs.values_mut() {
                        *d = d.substitute(&single);
                    }
                    defs.insert(*v, r);
                    used[i] = true;
                    changed = true;
                    break;
                }
            }
            if !changed {
                break;
            }
        }

        let constraints: Vec<CFormula<BigRational>> = conj
            .iter()
            .zip(&used)
            .filter(|(_, u)| !**u)
            .map(|(f, _)| f.substitute(&defs))
            .collect();
        let objective = objective.substitute(&defs);
        let mut decision: Vec<usize> = objective.vars();
        for f in &constraints {
            decision.extend(f.vars());
        }
        decision.sort_unstable();
        decision.dedup();

        let mut names = Vec::new();
        let mut bounds = Vec::new();
        for &s in &decision {
            let info = &table.vars[s];
            let name = info.name();
            match info.domain {
                VarDomain::Real => {}
                VarDomain::Bool => {
                    return Err(Error::Unsupported(format!(
                        "predicate `{name}` in an optimization problem"
                    )))
                }
                VarDomain::Finite(_) => {
                    return Err(Error::Unsupported(format!(
                        "`{name}` ranges over a finite sort; only REAL symbols are optimized"
                    )))
                }
            }
            let b = p.bounds.get(&info.symbol).ok_or_else(|| Error::MissingBounds(info.symbol.clone()))?;
            names.push(name);
            bounds.push(b.clone());
        }
        let index: HashMap<usize, CTerm<BigRational>> = decision
            .iter()
            .enumerate()
            .map(|(k, &s)| (s, CTerm::Var(k)))
            .collect();
        let mut defined: Vec<(usize, CTerm<BigRational>)> =
            defs.into_iter().map(|(s, t)| (s, t.substitute(&index))).collect();
        defined.sort_by_key(|(s, _)| *s);
        Ok(Problem {
            names,
            constraints: constraints.iter().map(|f| f.substitute(&index)).collect(),
            objective: objective.substitute(&index),
            sense,
            bounds,
            origin: Some(Origin { table, decision, defined }),
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    fn name(&self, v: usize) -> String {
        self.names.get(v).cloned().unwrap_or_else(|| format!("#{v}"))
    }

    /// Decision and defined symbols at `x`, converted by `conv`.
    pub fn witness<T: crate::scalar::Scalar>(&self, x: &[T], conv: impl Fn(&T) -> Option<BigRational>) -> Interpretation {
        let mut m = Interpretation::default();
        let Some(o) = &self.origin else {
            for (n, v) in self.names.iter().zip(x) {
                if let Some(v) = conv(v) {
                    m.set_const(n, Datum::Num(v));
                }
            }
            return m;
        };
        let vals: Vec<Option<T>> = x.iter().cloned().map(Some).collect();
        let mut put = |slot: usize, v: &T| {
            let Some(v) = conv(v) else { return };
            let info = &o.table.vars[slot];
            match info.domain {
                VarDomain::Bool => m.set_atom(
                    GroundAtom {
                        pred: info.symbol.clone(),
                        args: info.args.clone(),
                    },
                    !v.is_zero(),
                ),
                _ => m.set_entry(&info.symbol, info.args.clone(), Datum::Num(v)),
            }
        };
        for (k, &s) in o.decision.iter().enumerate() {
            put(s, &x[k]);
        }
        for (s, t) in &o.defined {
            if let Some(v) = t.map_scalar(&T::from_rational).eval(&vals) {
                put(*s, &v);
            }
        }
        m
    }

    fn linear_rows(&self) -> Result<Vec<Row>> {
        let n = self.len();
        let mut rows = Vec::new();
        for f in &self.constraints {
            match f {
                CFormula::Const(true) => {}
                CFormula::Const(false) => rows.push(Row {
                    a: vec![BigRational::zero(); n],
                    b: -BigRational::from_integer(1.into()),
                    strict: false,
                }),
                CFormula::Cmp(l, op, r) => {
                    let diff = CTerm::Sub(Box::new(l.clone()), Box::new(r.clone()));
                    let text = || format!("{} {} {}", show(l, &|v| self.name(v)), op.symbol(), show(r, &|v| self.name(v)));
                    let (coeffs, k) = diff
                        .linearize()
                        .ok_or_else(|| Error::Unsupported(format!("nonlinear constraint `{}`", text())))?;
                    let mut a = vec![BigRational::zero(); n];
                    for (v, c) in coeffs {
                        a[v] = c;
                    }
                    let neg = |a: &[BigRational]| a.iter().map(|x| -x.clone()).collect::<Vec<_>>();
                    match op {
                        CmpOp::Le | CmpOp::Lt => rows.push(Row { a, b: -k, strict: op.is_strict() }),
                        CmpOp::Ge | CmpOp::Gt => rows.push(Row { a: neg(&a), b: k, strict: op.is_strict() }),
                        CmpOp::Eq => {
                            rows.push(Row { a: neg(&a), b: k.clone(), strict: false });
                            rows.push(Row { a, b: -k, strict: false });
                        }
                        CmpOp::Ne => return Err(Error::Unsupported(format!("disequality `{}`", text()))),
                    }
                }
                _ => {
                    return Err(Error::Unsupported(
                        "vertex enumeration handles conjunctions of linear comparisons".into(),
                    ))
                }
            }
        }
        for (v, (lo, hi)) in self.bounds.iter().enumerate() {
            let mut a = vec![BigRational::zero(); n];
            a[v] = BigRational::from_integer(1.into());
            rows.push(Row { a: a.clone(), b: hi.clone(), strict: false });
            a[v] = -a[v].clone();
            rows.push(Row { a, b: -lo.clone(), strict: false });
        }
        Ok(rows)
    }

    /// Exact optimum of a linear problem by enumerating the vertices of its
    /// closure. Ties go to the lexicographically smallest vertex.
    pub fn vertex_enum(&self) -> Result<Solution<BigRational>> {
        let n = self.len();
        let (c, c0) = self
            .objective
            .linearize()
            .ok_or_else(|| Error::Unsupported("objective is not linear".into()))?;
        let mut cv = vec![BigRational::zero(); n];
        for (v, x) in c {
            cv[v] = x;
        }
        let rows = self.linear_rows()?;
        let m = rows.len();
        if binomial(m as u128, n as u128) > VERTEX_CAP {
            return Err(Error::Unsupported(format!(
                "C({m},{n}) vertex candidates exceed {VERTEX_CAP}"
            )));
        }
        let feasible = |x: &[BigRational]| rows.iter().all(|r| dot(&r.a, x) <= r.b);
        let mut evaluations = 0u64;
        let mut optimal: Vec<Vec<BigRational>> = Vec::new();
        let mut best: Option<BigRational> = None;
        let mut pick = vec![0usize; n];
        for (i, p) in pick.iter_mut().enumerate() {
            *p = i;
        }
        loop {
            if n <= m {
                evaluations += 1;
                let a: Vec<Vec<BigRational>> = pick.iter().map(|&i| rows[i].a.clone()).collect();
                let b: Vec<BigRational> = pick.iter().map(|&i| rows[i].b.clone()).collect();
                if let Some(x) = solve(&a, &b) {
                    if feasible(&x) {
                        let val = dot(&cv, &x) + c0.clone();
                        let better = match &best {
                            None => true,
                            Some(b) => match self.sense {
                                Sense::Minimize => val < *b,
                                Sense::Maximize => val > *b,
                            },
                        };
                        if better {
                            best = Some(val);
                            optimal = vec![x];
                        } else if best.as_ref() == Some(&val) && !optimal.contains(&x) {
                            optimal.push(x);
                        }
                    }
                }
            }
            if !next_combination(&mut pick, m) {
                break;
            }
        }
        let Some(value) = best else {
            return Ok(Solution::infeasible(evaluations));
        };
        let k = BigRational::from_integer((optimal.len() as i64).into());
        let centroid: Vec<BigRational> = (0..n)
            .map(|j| optimal.iter().fold(BigRational::zero(), |acc, x| acc + x[j].clone()) / k.clone())
            .collect();
        let mut flags = Vec::new();
        if rows.iter().any(|r| r.strict && dot(&r.a, &centroid) >= r.b) {
            flags.push("not-attained".into());
        }
        optimal.sort_by(|a, b| a.partial_cmp(b).expect("rationals are ordered"));
        Ok(Solution {
            x: optimal.into_iter().next(),
            value: Some(value),
            flags,
            iterations: 0,
            evaluations,
        })
    }

    fn float_box(&self) -> (Vec<f64>, Vec<f64>) {
        self.bounds
            .iter()
            .map(|(lo, hi)| (lo.to_f64().unwrap_or(f64::NAN), hi.to_f64().unwrap_or(f64::NAN)))
            .unzip()
    }

    /// Projected gradient descent with Armijo backtracking on a box.
    ///
    /// Single-variable linear constraints tighten the box; anything else is
    /// refused. Starts at the centre plus seeded jitter of 5% of each side.
    pub fn projected_gradient(&self, seed: u64) -> Result<Solution<f64>> {
        let n = self.len();
        let (mut lo, mut hi) = self.float_box();
        for f in &self.constraints {
            let refuse = || Error::Unsupported("projected gradient needs a box region".into());
            match f {
                CFormula::Const(true) => continue,
                CFormula::Const(false) => return Ok(Solution::infeasible(0)),
                CFormula::Cmp(l, op, r) => {
                    let diff = CTerm::Sub(Box::new(l.clone()), Box::new(r.clone()));
                    let (coeffs, k) = diff.linearize().ok_or_else(refuse)?;
                    if coeffs.len() != 1 || *op == CmpOp::Ne {
                        return Err(refuse());
                    }
                    let (&v, c) = coeffs.iter().next().unwrap();
                    let at = (-k / c.clone()).to_f64().unwrap_or(f64::NAN);
                    let op = if c.is_negative() { op.flip() } else { *op };
                    match op {
                        CmpOp::Le | CmpOp::Lt => hi[v] = hi[v].min(at),
                        CmpOp::Ge | CmpOp::Gt => lo[v] = lo[v].max(at),
                        CmpOp::Eq => {
                            lo[v] = lo[v].max(at);
                            hi[v] = hi[v].min(at);
                        }
                        CmpOp::Ne => unreachable!(),
                    }
                }
                _ => return Err(refuse()),
            }
        }
        if (0..n).any(|v| lo[v] > hi[v]) {
            return Ok(Solution::infeasible(0));
        }
        let sign = match self.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let obj: CTerm<f64> = self.objective.map_scalar(&|r| r.to_f64().unwrap_or(f64::NAN));
        let grad = gradient(&obj, &(0..n).collect::<Vec<_>>());
        let mut evaluations = 0u64;
        let mut f = |x: &[f64]| {
            evaluations += 1;
            let vals: Vec<Option<f64>> = x.iter().copied().map(Some).collect();
            sign * obj.eval(&vals).unwrap_or(f64::NAN)
        };
        let g = |x: &[f64]| {
            let vals: Vec<Option<f64>> = x.iter().copied().map(Some).collect();
            grad.iter().map(|d| sign * d.eval(&vals).unwrap_or(f64::NAN)).collect::<Vec<f64>>()
        };
        let project = |x: &mut [f64]| {
            for v in 0..n {
                x[v] = x[v].clamp(lo[v], hi[v]);
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x: Vec<f64> = (0..n)
            .map(|v| {
                let mid = 0.5 * (lo[v] + hi[v]);
                mid + 0.05 * (hi[v] - lo[v]) * rng.gen_range(-1.0..=1.0)
            })
            .collect();
        project(&mut x);
        let mut fx = f(&x);
        let mut alpha = 1.0;
        let mut iterations = 0;
        const SIGMA: f64 = 1e-4;
        while iterations < PG_MAX_ITER {
            iterations += 1;
            let gx = g(&x);
            let mut moved = false;
            while alpha > 1e-16 {
                let mut y: Vec<f64> = x.iter().zip(&gx).map(|(a, d)| a - alpha * d).collect();
                project(&mut y);
                let step: f64 = gx.iter().zip(y.iter().zip(&x)).map(|(d, (a, b))| d * (a - b)).sum();
                let fy = f(&y);
                if fy <= fx + SIGMA * step {
                    let shift = y.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                    moved = shift > 1e-13;
                    x = y;
                    fx = fy;
                    break;
                }
                alpha *= 0.5;
            }
            if !moved {
                break;
            }
            alpha = (alpha * 2.0).min(1e6);
        }
        let mut flags = Vec::new();
        if !fx.is_finite() {
            flags.push("diverged".into());
        }
        Ok(Solution {
            value: Some(sign * fx),
            x: Some(x),
            flags,
            iterations,
            evaluations,
        })
    }

    /// Grid search over the box, re-centred and shrunk around the best
    /// feasible point each round.
    pub fn grid_refine(&self) -> Result<Solution<f64>> {
        let n = self.len();
        if n > 16 {
            return Err(Error::Unsupported(format!("grid refinement over {n} variables")));
        }
        let (lo0, hi0) = self.float_box();
        let cons: Vec<CFormula<f64>> = self
            .constraints
            .iter()
            .map(|f| f.map_scalar(&|r| r.to_f64().unwrap_or(f64::NAN)))
            .collect();
        let obj: CTerm<f64> = self.objective.map_scalar(&|r| r.to_f64().unwrap_or(f64::NAN));
        let k = (GRID_POINTS.powf(1.0 / n.max(1) as f64).floor() as usize).max(3);
        let better = |a: f64, b: f64| match self.sense {
            Sense::Minimize => a < b,
            Sense::Maximize => a > b,
        };
        let (mut lo, mut hi) = (lo0.clone(), hi0.clone());
        let mut best: Option<(Vec<f64>, f64)> = None;
        let mut evaluations = 0u64;
        let mut iterations = 0u64;
        for _ in 0..GRID_ROUNDS {
            iterations += 1;
            let step: Vec<f64> = (0..n).map(|v| (hi[v] - lo[v]) / (k - 1) as f64).collect();
            let mut idx = vec![0usize; n];
            loop {
                let x: Vec<f64> = (0..n).map(|v| lo[v] + step[v] * idx[v] as f64).collect();
                let vals: Vec<Option<f64>> = x.iter().copied().map(Some).collect();
                evaluations += 1;
                if cons.iter().all(|c| c.eval3(&vals) == Some(true)) {
                    if let Some(y) = obj.eval(&vals) {
                        if best.as_ref().is_none_or(|(_, b)| better(y, *b)) {
                            best = Some((x, y));
                        }
                    }
                }
                let mut d = n;
                let done = loop {
                    if d == 0 {
                        break true;
                    }
                    d -= 1;
                    idx[d] += 1;
                    if idx[d] < k {
                        break false;
                    }
                    idx[d] = 0;
                };
                if done {
                    break;
                }
            }
            let Some((c, _)) = &best else { break };
            if step.iter().all(|s| *s < 1e-12) {
                break;
            }
            for v in 0..n {
                lo[v] = (c[v] - 2.0 * step[v]).max(lo0[v]);
                hi[v] = (c[v] + 2.0 * step[v]).min(hi0[v]);
            }
        }
        Ok(match best {
            None => Solution::infeasible(evaluations),
            Some((x, y)) => Solution {
                x: Some(x),
                value: Some(y),
                flags: Vec::new(),
                iterations,
                evaluations,
            },
        })
    }
}

struct Row {
    a: Vec<BigRational>,
    b: BigRational,
    strict: bool,
}

fn binomial(m: u128, n: u128) -> u128 {
    if n > m {
        return 0;
    }
    let n = n.min(m - n);
    let mut acc: u128 = 1;
    for i in 0..n {
        acc = acc.saturating_mul(m - i) / (i + 1);
        if acc > VERTEX_CAP * 1000 {
            return u128::MAX;
        }
    }
    acc
}

fn next_combination(pick: &mut [usize], m: usize) -> bool {
    let n = pick.len();
    let mut i = n;
    while i > 0 {
        i -= 1;
        if pick[i] < m - n + i {
            pick[i] += 1;
            for j in i + 1..n {
                pick[j] = pick[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Runs an optimizer on a program. `Backend::Auto` tries vertex enumeration,
/// then projected gradient, then grid refinement.
pub fn optimize_program(p: &Program, backend: Backend, seed: u64) -> Result<CountResult> {
    let prob = Problem::from_program(p)?;
    let single = [backend];
    let order: &[Backend] = match backend {
        Backend::Auto => &[Backend::VertexEnum, Backend::ProjectedGradient, Backend::GridRefine],
        b if b.is_optimizer() => &single,
        other => {
            return Err(Error::BackendMismatch {
                backend: other.to_string(),
                reason: "not an optimizer".into(),
            })
        }
    };
    let mut last = None;
    for (i, &b) in order.iter().enumerate() {
        let attempt = match b {
            Backend::VertexEnum => prob.vertex_enum().map(|s| finish_exact(p, &prob, s)),
            Backend::ProjectedGradient => prob.projected_gradient(seed).map(|s| finish_float(p, &prob, s)),
            _ => prob.grid_refine().map(|s| finish_float(p, &prob, s)),
        };
        match attempt {
            Ok(r) => {
                let mut r = r?;
                r.backend = b;
                return Ok(r);
            }
            Err(Error::Unsupported(m)) if i + 1 < order.len() => last = Some(m),
            Err(e) => return Err(e),
        }
    }
    Err(Error::Unsupported(last.unwrap_or_default()))
}

fn finish_exact(p: &Program, prob: &Problem, s: Solution<BigRational>) -> Result<CountResult> {
    let value = match &s.value {
        Some(v) => p.algebra.value_from_number(v)?,
        None => p.algebra.empty.clone(),
    };
    let mut r = CountResult::exact(value, Backend::VertexEnum);
    r.witness = s.x.as_ref().map(|x| prob.witness(x, |v| Some(v.clone())));
    r.flags = s.flags;
    r.stats = Stats {
        evaluations: Some(s.evaluations),
        ..Stats::default()
    };
    Ok(r)
}

fn finish_float(p: &Program, prob: &Problem, s: Solution<f64>) -> Result<CountResult> {
    let value = match s.value {
        Some(v) => Value::Float(v),
        None => p.algebra.empty.clone(),
    };
    let mut r = CountResult::exact(value, Backend::GridRefine);
    r.exact = false;
    r.witness = s.x.as_ref().map(|x| prob.witness(x, |v| round_float(*v)));
    r.flags = s.flags;
    r.stats = Stats {
        iterations: Some(s.iterations),
        evaluations: Some(s.evaluations),
        ..Stats::default()
    };
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn var(v: usize) -> CTerm<BigRational> {
        CTerm::Var(v)
    }

    fn k(n: i64) -> CTerm<BigRational> {
        CTerm::Const(int(n))
    }

    fn simplex(sense: Sense) -> Problem {
        // x + y <= 3 over [0,3]^2, objective x + 2y
        Problem::new(
            vec!["x".into(), "y".into()],
            vec![CFormula::Cmp(CTerm::Add(vec![var(0), var(1)]), CmpOp::Le, k(3))],
            CTerm::Add(vec![var(0), CTerm::Mul(vec![k(2), var(1)])]),
            sense,
            vec![(int(0), int(3)), (int(0), int(3))],
        )
    }

    #[test]
    fn vertices_of_a_triangle() {
        let s = simplex(Sense::Maximize).vertex_enum().unwrap();
        assert_eq!(s.value, Some(int(6)));
        assert_eq!(s.x, Some(vec![int(0), int(3)]));
        let s = simplex(Sense::Minimize).vertex_enum().unwrap();
        assert_eq!(s.value, Some(int(0)));
        assert!(s.flags.is_empty());
    }

    #[test]
    fn strict_bound_is_not_attained() {
        let mut p = simplex(Sense::Minimize);
        p.constraints.push(CFormula::Cmp(var(0), CmpOp::Gt, CTerm::Const(rat(1, 2))));
        let s = p.vertex_enum().unwrap();
        assert_eq!(s.value, Some(rat(1, 2)));
        assert_eq!(s.flags, vec!["not-attained".to_string()]);
    }

    #[test]
    fn infeasible_region() {
        let mut p = simplex(Sense::Minimize);
        p.constraints.push(CFormula::Cmp(var(0), CmpOp::Gt, k(5)));
        let s = p.vertex_enum().unwrap();
        assert!(s.x.is_none());
        assert_eq!(s.flags, vec!["infeasible".to_string()]);
        assert!(p.grid_refine().unwrap().x.is_none());
    }

    #[test]
    fn approximate_methods_agree() {
        let p = simplex(Sense::Maximize);
        let g = p.grid_refine().unwrap();
        assert!((g.value.unwrap() - 6.0).abs() < 1e-6);
        // PG refuses the diagonal constraint but handles a box.
        assert!(matches!(p.projected_gradient(0), Err(Error::Unsupported(_))));
        let mut b = p.clone();
        b.constraints.clear();
        b.objective = CTerm::Mul(vec![
            CTerm::Sub(Box::new(var(0)), Box::new(k(1))),
            CTerm::Sub(Box::new(var(0)), Box::new(k(1))),
        ]);
        b.sense = Sense::Minimize;
        let s = b.projected_gradient(3).unwrap();
        assert!(s.value.unwrap().abs() < 1e-9);
        assert!((s.x.unwrap()[0] - 1.0).abs() < 1e-4);
    }
}
