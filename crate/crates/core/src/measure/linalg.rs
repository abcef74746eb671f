//! Dense linear algebra over a [`Scalar`].

use crate::scalar::Scalar;

pub type Matrix<T> = Vec<Vec<T>>;

fn is_negligible<T: Scalar>(x: &T) -> bool {
    if T::EXACT {
        x.is_zero()
    } else {
        x.to_f64().abs() < 1e-12
    }
}

/// Solves `a x = b` for square `a` by Gaussian elimination with partial
/// pivoting. `None` when `a` is singular.
pub fn solve<T: Scalar>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let n = b.len();
    let mut m: Matrix<T> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            m[i][col]
                .abs()
                .partial_cmp(&m[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if is_negligible(&m[pivot][col]) {
            return None;
        }
        m.swap(col, pivot);
        for row in col + 1..n {
            if m[row][col].is_zero() {
                continue;
            }
            let factor = m[row][col].clone() / m[col][col].clone();
            for k in col..=n {
                let delta = factor.clone() * m[col][k].clone();
                m[row][k] = m[row][k].clone() - delta;
            }
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = m[row][n].clone();
        for k in row + 1..n {
            acc = acc - m[row][k].clone() * x[k].clone();
        }
        x[row] = acc / m[row][row].clone();
    }
    Some(x)
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn matmul<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>]) -> Matrix<T> {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).fold(T::zero(), |acc, (x, br)| acc + x.clone() * br[j].clone()))
                .collect()
        })
        .collect()
}

pub fn transpose<T: Scalar>(a: &[Vec<T>]) -> Matrix<T> {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Squared Frobenius norm.
pub fn frobenius2<T: Scalar>(a: &[Vec<T>]) -> T {
    a.iter().flatten().fold(T::zero(), |acc, x| acc + x.clone() * x.clone())
}

pub fn sub<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>]) -> Matrix<T> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p.clone() - q.clone()).collect())
        .collect()
}

/// `a + s * b`.
pub fn axpy<T: Scalar>(a: &[Vec<T>], s: &T, b: &[Vec<T>]) -> Matrix<T> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p.clone() + s.clone() * q.clone()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn exact_solve() {
        let a = vec![vec![int(2), int(1)], vec![int(1), int(3)]];
        let x = solve(&a, &[int(3), int(5)]).unwrap();
        assert_eq!(x, vec![rat(4, 5), rat(7, 5)]);
        assert!(solve(&[vec![int(1), int(2)], vec![int(2), int(4)]], &[int(1), int(2)]).is_none());
    }

    #[test]
    fn float_products() {
        let a = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        assert_eq!(matmul(&a, &transpose(&a)), vec![vec![5.0, 11.0], vec![11.0, 25.0]]);
        assert_eq!(frobenius2(&sub(&a, &a)), 0.0);
        let x: Vec<f64> = solve(&a, &[5.0, 11.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }
}
