//! Symbolic derivatives of compiled terms.

use crate::logic::ir::CTerm;
use crate::scalar::Scalar;

/// `∂t/∂x_v`, simplified.
pub fn derivative<T: Scalar>(t: &CTerm<T>, v: usize) -> CTerm<T> {
    simplify(&raw(t, v))
}

fn raw<T: Scalar>(t: &CTerm<T>, v: usize) -> CTerm<T> {
    match t {
        CTerm::Const(_) => CTerm::Const(T::zero()),
        CTerm::Var(u) => CTerm::Const(if *u == v { T::one() } else { T::zero() }),
        CTerm::Add(ts) => CTerm::Add(ts.iter().map(|t| raw(t, v)).collect()),
        CTerm::Sub(a, b) => CTerm::Sub(Box::new(raw(a, v)), Box::new(raw(b, v))),
        CTerm::Neg(a) => CTerm::Neg(Box::new(raw(a, v))),
        CTerm::Mul(ts) => CTerm::Add(
            (0..ts.len())
                .filter(|&i| ts[i].vars().contains(&v))
                .map(|i| {
                    let mut f: Vec<CTerm<T>> = ts.clone();
                    f[i] = raw(&ts[i], v);
                    CTerm::Mul(f)
                })
                .collect(),
        ),
    }
}

/// Folds constants and drops neutral operands.
pub fn simplify<T: Scalar>(t: &CTerm<T>) -> CTerm<T> {
    match t {
        CTerm::Const(_) | CTerm::Var(_) => t.clone(),
        CTerm::Add(ts) => {
            let mut k = T::zero();
            let mut rest = Vec::new();
            for s in ts.iter().map(simplify) {
                match s {
                    CTerm::Const(c) => k = k + c,
                    CTerm::Add(inner) => rest.extend(inner),
                    other => rest.push(other),
                }
            }
            if !k.is_zero() || rest.is_empty() {
                rest.push(CTerm::Const(k));
            }
            if rest.len() == 1 {
                rest.pop().unwrap()
            } else {
                CTerm::Add(rest)
            }
        }
        CTerm::Mul(ts) => {
            let mut k = T::one();
            let mut rest = Vec::new();
            for s in ts.iter().map(simplify) {
                match s {
                    CTerm::Const(c) => k = k * c,
                    CTerm::Mul(inner) => rest.extend(inner),
                    other => rest.push(other),
                }
            }
            if k.is_zero() {
                return CTerm::Const(k);
            }
            if k != T::one() || rest.is_empty() {
                rest.insert(0, CTerm::Const(k));
            }
            if rest.len() == 1 {
                rest.pop().unwrap()
            } else {
                CTerm::Mul(rest)
            }
        }
        CTerm::Sub(a, b) => match (simplify(a), simplify(b)) {
            (CTerm::Const(x), CTerm::Const(y)) => CTerm::Const(x - y),
            (x, CTerm::Const(y)) if y.is_zero() => x,
            (CTerm::Const(x), y) if x.is_zero() => simplify(&CTerm::Neg(Box::new(y))),
            (x, y) => CTerm::Sub(Box::new(x), Box::new(y)),
        },
        CTerm::Neg(a) => match simplify(a) {
            CTerm::Const(x) => CTerm::Const(-x),
            CTerm::Neg(inner) => *inner,
            x => CTerm::Neg(Box::new(x)),
        },
    }
}

/// Gradient as one term per variable in `vars`.
pub fn gradient<T: Scalar>(t: &CTerm<T>, vars: &[usize]) -> Vec<CTerm<T>> {
    vars.iter().map(|&v| derivative(t, v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(t: &CTerm<f64>, x: &[f64]) -> f64 {
        let vals: Vec<Option<f64>> = x.iter().copied().map(Some).collect();
        t.eval(&vals).unwrap()
    }

    #[test]
    fn matches_finite_differences() {
        // (3 - x*y)^2 - x + 2
        let r = CTerm::Sub(
            Box::new(CTerm::Const(3.0)),
            Box::new(CTerm::Mul(vec![CTerm::Var(0), CTerm::Var(1)])),
        );
        let t = CTerm::Add(vec![
            CTerm::Mul(vec![r.clone(), r]),
            CTerm::Neg(Box::new(CTerm::Var(0))),
            CTerm::Const(2.0),
        ]);
        let g = gradient(&t, &[0, 1]);
        for p in [[0.5, -1.0], [2.0, 0.25], [-1.5, 3.0]] {
            for (v, dv) in g.iter().enumerate() {
                let h = 1e-6;
                let mut a = p;
                let mut b = p;
                a[v] += h;
                b[v] -= h;
                let fd = (eval(&t, &a) - eval(&t, &b)) / (2.0 * h);
                assert!((eval(dv, &p) - fd).abs() < 1e-5, "d/dx{v} at {p:?}");
            }
        }
    }

    #[test]
    fn simplifies_constants() {
        let t: CTerm<f64> = CTerm::Mul(vec![CTerm::Const(2.0), CTerm::Var(0), CTerm::Const(3.0)]);
        assert_eq!(derivative(&t, 0), CTerm::Const(6.0));
        assert_eq!(derivative(&t, 1), CTerm::Const(0.0));
    }
}
