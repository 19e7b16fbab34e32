//! Small dense-vector helpers on slices.

use crate::scalar::Real;

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn scaled<T: Real>(a: &[T], s: T) -> Vec<T> {
    a.iter().map(|&x| x * s).collect()
}

pub fn neg<T: Real>(a: &[T]) -> Vec<T> {
    a.iter().map(|&x| -x).collect()
}

pub fn add<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn sub<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

/// Returns `a / |a|`, or `None` for a (numerically) zero vector.
pub fn normalized<T: Real>(a: &[T]) -> Option<Vec<T>> {
    let n = norm(a);
    if n <= T::epsilon() {
        None
    } else {
        Some(scaled(a, T::one() / n))
    }
}

pub fn cross3<T: Real>(a: &[T], b: &[T]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Angle between two unit vectors, clamped against rounding.
pub fn angle_between<T: Real>(a: &[T], b: &[T]) -> T {
    dot(a, b).max(-T::one()).min(T::one()).acos()
}

/// Numerical rank of a set of vectors by modified Gram-Schmidt.
pub fn rank<T: Real>(vectors: &[Vec<T>], tol: T) -> usize {
    let mut basis: Vec<Vec<T>> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        for b in &basis {
            let c = dot(&r, b);
            for (ri, &bi) in r.iter_mut().zip(b) {
                *ri = *ri - c * bi;
            }
        }
        if norm(&r) > tol {
            if let Some(unit) = normalized(&r) {
                basis.push(unit);
            }
        }
    }
    basis.len()
}

/// Deterministic pairwise (cascade) summation.
///
/// The reduction tree depends only on the slice length, so repeated calls on
/// the same values give bit-identical results regardless of threading.
pub fn pairwise_sum<T: Real>(values: &[T]) -> T {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        values.iter().fold(T::zero(), |acc, &x| acc + x)
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let v: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(pairwise_sum(&v), 55.0);
    }

    #[test]
    fn pairwise_is_accurate_on_long_input() {
        let v = vec![0.1f64; 1_000_000];
        assert!((pairwise_sum(&v) - 100_000.0).abs() < 1e-8);
    }

    #[test]
    fn rank_detects_collinear_sets() {
        let a = vec![vec![1.0f64, 0.0], vec![-1.0, 0.0]];
        assert_eq!(rank(&a, 1e-9), 1);
        let b = vec![
            vec![1.0f64, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![1.0, 1.0, 0.0],
        ];
        assert_eq!(rank(&b, 1e-9), 2);
    }

    #[test]
    fn cross_of_basis_vectors() {
        assert_eq!(
            cross3(&[1.0f64, 0.0, 0.0], &[0.0, 1.0, 0.0]),
            [0.0, 0.0, 1.0]
        );
    }
}
