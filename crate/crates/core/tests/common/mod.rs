#![allow(dead_code)]

use std::f64::consts::FRAC_1_SQRT_2;

use pseudocone::{Cone64, Facet, PseudoCone64};

pub fn quadrant() -> Cone64 {
    Cone64::polyhedral(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
}

pub fn octant() -> Cone64 {
    Cone64::polyhedral(vec![
        vec![1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, 0.0, 1.0],
    ])
    .unwrap()
}

/// `{y in quadrant : y1 + y2 >= sqrt 2}`.
pub fn half_plane() -> PseudoCone64 {
    PseudoCone64::wulff_shape(
        quadrant(),
        vec![Facet::new(vec![-FRAC_1_SQRT_2, -FRAC_1_SQRT_2], 1.0)],
    )
    .unwrap()
}

/// The quadrant translated by `(s, s)`.
pub fn shifted_quadrant(s: f64) -> PseudoCone64 {
    PseudoCone64::translated_cone(quadrant(), &[s, s]).unwrap()
}

/// Composite Simpson rule with `n` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let x = a + k as f64 * h;
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    s * h / 3.0
}

/// Radial function straight from the definition `min {r : r v in K}`, for
/// `K` given by `<y, u_i> <= -h_i`.
pub fn radial_oracle(normals: &[Vec<f64>], depths: &[f64], v: &[f64]) -> f64 {
    normals
        .iter()
        .zip(depths)
        .map(|(u, h)| h / dot(v, u).abs())
        .fold(0.0, f64::max)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            let pivot = a[col].clone();
            for (x, p) in a[r][col..].iter_mut().zip(&pivot[col..]) {
                *x -= f * p;
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for mut rest in combinations(n - first - 1, k - 1) {
            for r in rest.iter_mut() {
                *r += first + 1;
            }
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Vertices of the polyhedron `K = C ∩ {<y, u_i> <= -h_i}` by brute-force
/// enumeration of `n`-fold plane intersections.
pub fn vertices(k: &PseudoCone64) -> Vec<Vec<f64>> {
    let n = k.dim();
    let cone_normals = k.cone().facet_normals().expect("polyhedral cone").to_vec();
    // rows (a, b) with constraint <a, y> <= b
    let mut rows: Vec<(Vec<f64>, f64)> = k
        .facets()
        .iter()
        .map(|f| (f.normal.clone(), -f.depth))
        .collect();
    rows.extend(cone_normals.into_iter().map(|m| (m, 0.0)));
    let mut out = Vec::new();
    for idx in combinations(rows.len(), n) {
        let a = idx.iter().map(|&i| rows[i].0.clone()).collect();
        let b = idx.iter().map(|&i| rows[i].1).collect();
        let Some(y) = solve(a, b) else { continue };
        let feasible = rows
            .iter()
            .all(|(a, b)| dot(a, &y) <= b + 1e-9 * (1.0 + b.abs()));
        if feasible && y.iter().any(|c| c.abs() > 0.0) {
            out.push(y);
        }
    }
    out
}

/// `h̄_K(u) = min_{y in K} -<y, u>`, attained at a vertex for `u` in the
/// dual cone.
pub fn support_oracle(k: &PseudoCone64, u: &[f64]) -> f64 {
    vertices(k)
        .iter()
        .map(|y| -dot(y, u))
        .fold(f64::INFINITY, f64::min)
}
