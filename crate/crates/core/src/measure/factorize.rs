//! Low-rank matrix factorization by gradient descent: `I ≈ L Rᵀ`.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::linalg::{axpy, frobenius2, matmul, sub, transpose, Matrix};
use crate::error::{Error, Result};
use crate::logic::{Datum, Interpretation};
use crate::scalar::round_float;
use crate::result::{Backend, CountResult, Stats};
use crate::semiring::Value;

#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    /// `‖I − L Rᵀ‖²` at the final factors.
    pub err: f64,
    /// `p × k`.
    pub left: Matrix<f64>,
    /// `n × k`.
    pub right: Matrix<f64>,
    pub steps: usize,
    pub accepted: usize,
    pub rate: f64,
    pub diverged: bool,
    /// Error after initialization and after every accepted step.
    pub history: Vec<f64>,
}

/// Factorizes a `p × n` matrix into rank-`k` factors.
///
/// A step `L -= rate·∇L, R -= rate·∇R` is kept only if it lowers the error;
/// otherwise the rate halves. Entries start uniform in `±sqrt(max|I|/k)`.
pub fn factorize_demo(input: &[Vec<BigRational>], k: usize, steps: usize, rate: &BigRational, seed: u64) -> Result<Factorization> {
    let p = input.len();
    let n = input.first().map_or(0, Vec::len);
    if p == 0 || n == 0 || input.iter().any(|r| r.len() != n) {
        return Err(Error::Unsupported("input must be a non-empty rectangular matrix".into()));
    }
    if k == 0 || k > p.min(n) {
        return Err(Error::Unsupported(format!("rank {k} must lie in 1..={}", p.min(n))));
    }
    if !rate.is_positive() {
        return Err(Error::Unsupported("rate must be positive".into()));
    }
    let m: Matrix<f64> = input
        .iter()
        .map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
        .collect();
    let top = m.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
    let scale = (top.max(1e-12) / k as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut init = |rows: usize| -> Matrix<f64> {
        (0..rows)
            .map(|_| (0..k).map(|_| scale * rng.gen_range(-1.0..1.0)).collect())
            .collect()
    };
    let mut left = init(p);
    let mut right = init(n);
    let residual = |l: &Matrix<f64>, r: &Matrix<f64>| sub(&m, &matmul(l, &transpose(r)));
    let mut e = residual(&left, &right);
    let mut err = frobenius2(&e);
    let mut rate = rate.to_f64().unwrap_or(f64::NAN);
    let mut out = Factorization {
        err,
        left: Vec::new(),
        right: Vec::new(),
        steps,
        accepted: 0,
        rate,
        diverged: !err.is_finite(),
        history: vec![err],
    };
    for _ in 0..steps {
        if out.diverged {
            break;
        }
        if !rate.is_finite() {
            out.diverged = true;
            break;
        }
        // ∇L = −2 E R, ∇R = −2 Eᵀ L
        let gl = matmul(&e, &right);
        let gr = matmul(&transpose(&e), &left);
        let l2 = axpy(&left, &(2.0 * rate), &gl);
        let r2 = axpy(&right, &(2.0 * rate), &gr);
        let e2 = residual(&l2, &r2);
        let err2 = frobenius2(&e2);
        if err2 < err {
            left = l2;
            right = r2;
            e = e2;
            err = err2;
            out.accepted += 1;
            out.history.push(err);
        } else {
            rate *= 0.5;
            if rate == 0.0 {
                break;
            }
        }
    }
    out.diverged |= !err.is_finite();
    out.err = err;
    out.rate = rate;
    out.left = left;
    out.right = right;
    Ok(out)
}

impl Factorization {
    /// The error as a count result; the witness assigns `left(i,e)` and `right(j,e)`.
    pub fn to_result(&self) -> CountResult {
        let mut m = Interpretation::default();
        for (name, mat) in [("left", &self.left), ("right", &self.right)] {
            for (i, row) in mat.iter().enumerate() {
                for (e, x) in row.iter().enumerate() {
                    if let Some(q) = round_float(*x) {
                        m.set_entry(name, vec![Datum::int(i as i64 + 1), Datum::int(e as i64 + 1)], Datum::Num(q));
                    }
                }
            }
        }
        let mut r = CountResult::exact(Value::Float(self.err), Backend::ProjectedGradient);
        r.exact = false;
        r.witness = Some(m);
        if self.diverged {
            r.flags.push("diverged".into());
        }
        r.stats = Stats {
            iterations: Some(self.steps as u64),
            evaluations: Some(self.accepted as u64),
            ..Stats::default()
        };
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn rank_one_matrix() {
        let i = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        let f = factorize_demo(&i, 1, 5000, &rat(1, 100), 0).unwrap();
        assert!(f.err <= 1e-3, "err {}", f.err);
        assert!(f.history.windows(2).all(|w| w[1] < w[0]));
        assert!(!f.diverged);
    }

    #[test]
    fn rejects_bad_rank() {
        let i = vec![vec![int(1), int(2)]];
        assert!(factorize_demo(&i, 2, 10, &rat(1, 10), 0).is_err());
    }
}
