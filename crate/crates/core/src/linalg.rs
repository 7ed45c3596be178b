//! Dense helpers for the small matrices this crate works with (n <= 8).
//! Everything is generic over [`Scalar`] so the same code runs on plain
//! floats and on dual towers; pivots compare principal parts only.

use crate::jet::Scalar;

/// Row-major square matrix inverse by Gauss-Jordan with partial pivoting.
/// Returns `None` when the best pivot falls below `tol` in principal value.
pub fn invert<T: Scalar>(a: &[T], n: usize, tol: f64) -> Option<Vec<T>> {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut inv: Vec<T> = (0..n * n)
        .map(|k| {
            if k % (n + 1) == 0 {
                T::one()
            } else {
                T::zero()
            }
        })
        .collect();

    for col in 0..n {
        let mut piv = col;
        let mut best = m[col * n + col].re().abs();
        for row in col + 1..n {
            let v = m[row * n + col].re().abs();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best < tol {
            return None;
        }
        if piv != col {
            for k in 0..n {
                m.swap(col * n + k, piv * n + k);
                inv.swap(col * n + k, piv * n + k);
            }
        }
        let d = m[col * n + col].clone();
        for k in 0..n {
            m[col * n + k] = m[col * n + k].clone() / d.clone();
            inv[col * n + k] = inv[col * n + k].clone() / d.clone();
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = m[row * n + col].clone();
            for k in 0..n {
                m[row * n + k] = m[row * n + k].clone() - f.clone() * m[col * n + k].clone();
                inv[row * n + k] = inv[row * n + k].clone() - f.clone() * inv[col * n + k].clone();
            }
        }
    }
    Some(inv)
}

pub fn mat_vec<T: Scalar>(a: &[T], x: &[T], n: usize) -> Vec<T> {
    (0..n)
        .map(|i| {
            let mut s = T::zero();
            for j in 0..n {
                s = s + a[i * n + j].clone() * x[j].clone();
            }
            s
        })
        .collect()
}

pub fn mat_mul<T: Scalar>(a: &[T], b: &[T], n: usize) -> Vec<T> {
    let mut c = vec![T::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k].clone();
            for j in 0..n {
                c[i * n + j] = c[i * n + j].clone() + aik.clone() * b[k * n + j].clone();
            }
        }
    }
    c
}

pub fn transpose<T: Clone>(a: &[T], n: usize) -> Vec<T> {
    let mut t = a.to_vec();
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = a[i * n + j].clone();
        }
    }
    t
}

/// Bilinear form x^T a y.
pub fn bilinear<T: Scalar>(a: &[T], x: &[T], y: &[T], n: usize) -> T {
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            s = s + x[i].clone() * a[i * n + j].clone() * y[j].clone();
        }
    }
    s
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub fn axpy(alpha: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| alpha * a + b).collect()
}

pub fn scale(alpha: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|a| alpha * a).collect()
}

pub fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn add(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

pub fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Symmetry defect max_ij |a_ij - a_ji|.
pub fn asymmetry(a: &[f64], n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((a[i * n + j] - a[j * n + i]).abs());
        }
    }
    worst
}

/// Cholesky-based positive definiteness test for a symmetric matrix.
pub fn is_positive_definite(a: &[f64], n: usize) -> bool {
    let mut l = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return false;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    true
}
