//! Decomposition of a single-variable-atom formula into disjoint boxes.

use indexmap::IndexMap;

use super::interval::{cells, representative, Interval};
use crate::error::{Error, Result};
use crate::logic::ir::{CFormula, CTerm};
use crate::scalar::Scalar;

/// Largest number of cell tuples the sweep will visit.
pub const CELL_CAP: u64 = 1 << 22;

#[derive(Clone, Debug, PartialEq)]
pub enum Axis<T> {
    Real,
    /// Scalar values of a finite domain, in domain order.
    Finite(Vec<T>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dim<T> {
    pub slot: usize,
    pub name: String,
    pub axis: Axis<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Part<T> {
    /// Disjoint intervals, left to right.
    Real(Vec<Interval<T>>),
    /// Indices into the finite domain.
    Finite(Vec<usize>),
}

/// A product of one part per dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Region<T> {
    pub parts: Vec<Part<T>>,
}

/// Satisfying set of `f` as disjoint regions.
///
/// Every comparison atom must be linear in at most one real dimension.
/// `nslots` sizes the evaluation vector; slots outside `dims` stay unassigned.
pub fn decompose<T: Scalar>(f: &CFormula<T>, dims: &[Dim<T>], nslots: usize) -> Result<Vec<Region<T>>> {
    let names = |v: usize| {
        dims.iter()
            .find(|d| d.slot == v)
            .map(|d| d.name.clone())
            .unwrap_or_else(|| format!("#{v}"))
    };
    let mut breaks: Vec<Vec<T>> = vec![Vec::new(); dims.len()];
    let mut atoms = Vec::new();
    collect_atoms(f, &mut atoms);
    for (a, op, b) in atoms {
        let text = || format!("{} {} {}", show(a, &names), op.symbol(), show(b, &names));
        let vars = f_vars(a, b);
        let real: Vec<usize> = vars
            .iter()
            .filter(|v| dims.iter().any(|d| d.slot == **v && d.axis == Axis::Real))
            .copied()
            .collect();
        if real.is_empty() {
            continue;
        }
        if vars.len() > 1 {
            return Err(Error::MultiVariableAtom(text()));
        }
        let diff = CTerm::Sub(Box::new(a.clone()), Box::new(b.clone()));
        let (coeffs, k) = diff.linearize().ok_or_else(|| Error::NonlinearAtom(text()))?;
        if let Some(c) = coeffs.get(&real[0]) {
            let d = dims.iter().position(|d| d.slot == real[0]).unwrap();
            breaks[d].push(-k / c.clone());
        }
    }
    let mut axes: Vec<Vec<Interval<T>>> = Vec::with_capacity(dims.len());
    let mut reps: Vec<Vec<T>> = Vec::with_capacity(dims.len());
    for (d, dim) in dims.iter().enumerate() {
        match &dim.axis {
            Axis::Real => {
                let mut b = std::mem::take(&mut breaks[d]);
                b.sort_by(|x, y| x.partial_cmp(y).expect("comparable breakpoints"));
                b.dedup();
                let c = cells(&b);
                reps.push(c.iter().map(representative).collect());
                axes.push(c);
            }
            Axis::Finite(values) => {
                reps.push(values.clone());
                axes.push(Vec::new());
            }
        }
    }
    let total = reps
        .iter()
        .try_fold(1u64, |acc, r| acc.checked_mul(r.len() as u64))
        .unwrap_or(u64::MAX);
    if total > CELL_CAP {
        return Err(Error::Unsupported(format!(
            "{total} cells exceed the decomposition cap of {CELL_CAP}"
        )));
    }
    if reps.iter().any(Vec::is_empty) {
        return Ok(Vec::new());
    }

    let mut vals: Vec<Option<T>> = vec![None; nslots];
    let mut idx = vec![0usize; dims.len()];
    let mut sat: Vec<Vec<usize>> = Vec::new();
    loop {
        for (d, dim) in dims.iter().enumerate() {
            vals[dim.slot] = Some(reps[d][idx[d]].clone());
        }
        match f.eval3(&vals) {
            Some(true) => sat.push(idx.clone()),
            Some(false) => {}
            None => return Err(Error::Unsupported("formula mentions unmeasured symbols".into())),
        }
        let mut d = dims.len();
        loop {
            if d == 0 {
                return Ok(merge(sat, &axes));
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < reps[d].len() {
                break;
            }
            idx[d] = 0;
        }
    }
}

fn merge<T: Scalar>(sat: Vec<Vec<usize>>, axes: &[Vec<Interval<T>>]) -> Vec<Region<T>> {
    let n = axes.len();
    let mut boxes: Vec<Vec<Vec<usize>>> = sat
        .into_iter()
        .map(|t| t.into_iter().map(|i| vec![i]).collect())
        .collect();
    for d in (0..n).rev() {
        let mut groups: IndexMap<Vec<Vec<usize>>, Vec<usize>> = IndexMap::new();
        for mut b in boxes {
            let set = std::mem::take(&mut b[d]);
            groups.entry(b).or_default().extend(set);
        }
        boxes = groups
            .into_iter()
            .map(|(mut k, mut s)| {
                s.sort_unstable();
                s.dedup();
                k[d] = s;
                k
            })
            .collect();
    }
    boxes
        .into_iter()
        .map(|b| Region {
            parts: b
                .into_iter()
                .enumerate()
                .map(|(d, set)| {
                    if axes[d].is_empty() {
                        Part::Finite(set)
                    } else {
                        Part::Real(runs(&set, &axes[d]))
                    }
                })
                .collect(),
        })
        .collect()
}

fn runs<T: Scalar>(set: &[usize], cells: &[Interval<T>]) -> Vec<Interval<T>> {
    let mut out: Vec<Interval<T>> = Vec::new();
    let mut last: Option<usize> = None;
    for &i in set {
        match (last, out.last_mut()) {
            (Some(l), Some(cur)) if l + 1 == i => *cur = cur.join(&cells[i]),
            _ => out.push(cells[i].clone()),
        }
        last = Some(i);
    }
    out
}

fn collect_atoms<'a, T>(f: &'a CFormula<T>, out: &mut Vec<(&'a CTerm<T>, crate::logic::CmpOp, &'a CTerm<T>)>) {
    match f {
        CFormula::Const(_) | CFormula::Var(_) => {}
        CFormula::Cmp(a, op, b) => out.push((a, *op, b)),
        CFormula::Not(g) => collect_atoms(g, out),
        CFormula::And(gs) | CFormula::Or(gs) => gs.iter().for_each(|g| collect_atoms(g, out)),
        CFormula::Implies(a, b) | CFormula::Iff(a, b) => {
            collect_atoms(a, out);
            collect_atoms(b, out);
        }
    }
}

fn f_vars<T: Scalar>(a: &CTerm<T>, b: &CTerm<T>) -> Vec<usize> {
    let mut v = a.vars();
    v.extend(b.vars());
    v.sort_unstable();
    v.dedup();
    v
}

/// Text of a compiled term, for messages.
pub fn show<T: Scalar>(t: &CTerm<T>, names: &impl Fn(usize) -> String) -> String {
    let join = |ts: &[CTerm<T>], sep: &str| ts.iter().map(|t| show(t, names)).collect::<Vec<_>>().join(sep);
    match t {
        CTerm::Const(c) => {
            let x = c.to_f64();
            if x.fract() == 0.0 && x.abs() < 1e15 {
                format!("{}", x as i64)
            } else {
                format!("{x}")
            }
        }
        CTerm::Var(v) => names(*v),
        CTerm::Add(ts) => format!("({})", join(ts, " + ")),
        CTerm::Mul(ts) => join(ts, " * "),
        CTerm::Sub(a, b) => format!("({} - {})", show(a, names), show(b, names)),
        CTerm::Neg(a) => format!("-{}", show(a, names)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::CmpOp;
    use crate::scalar::int;
    use num_rational::BigRational;

    fn x() -> CTerm<BigRational> {
        CTerm::Var(0)
    }

    fn c(n: i64) -> CTerm<BigRational> {
        CTerm::Const(int(n))
    }

    #[test]
    fn union_of_intervals_merges() {
        // (0 <= x <= 1) or (1 < x < 2)
        let f = CFormula::Or(vec![
            CFormula::And(vec![CFormula::Cmp(c(0), CmpOp::Le, x()), CFormula::Cmp(x(), CmpOp::Le, c(1))]),
            CFormula::And(vec![CFormula::Cmp(c(1), CmpOp::Lt, x()), CFormula::Cmp(x(), CmpOp::Lt, c(2))]),
        ]);
        let dims = [Dim { slot: 0, name: "x".into(), axis: Axis::Real }];
        let r = decompose(&f, &dims, 1).unwrap();
        assert_eq!(r.len(), 1);
        match &r[0].parts[0] {
            Part::Real(iv) => assert_eq!(iv.iter().map(|i| i.to_string()).collect::<Vec<_>>(), ["[0, 2)"]),
            _ => panic!(),
        }
    }

    #[test]
    fn two_variable_atoms_are_refused() {
        let f = CFormula::Cmp(CTerm::Var(0), CmpOp::Lt, CTerm::Var(1));
        let dims = [
            Dim { slot: 0, name: "x".into(), axis: Axis::Real },
            Dim { slot: 1, name: "y".into(), axis: Axis::Real },
        ];
        let e = decompose(&f, &dims, 2).unwrap_err();
        assert!(matches!(e, Error::MultiVariableAtom(ref s) if s == "x < y"), "{e}");
        let sq = CFormula::Cmp(CTerm::Mul(vec![x(), x()]), CmpOp::Lt, c(1));
        assert!(matches!(decompose(&sq, &dims[..1], 2), Err(Error::NonlinearAtom(_))));
    }
}
