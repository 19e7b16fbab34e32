//! Radial values of many depth vectors over one grid and normal set.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{ArcCells, QuadratureGrid};
use crate::linalg::dot;
use crate::pseudocone::NodeValue;
use crate::scalar::Real;

const CHUNK: usize = 4096;

/// One quadrature term: `weight` of spherical measure on which facet
/// `facet` attains the radial maximum, with radial value `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece<T> {
    pub node: usize,
    pub facet: usize,
    pub weight: T,
    pub rho: T,
}

/// Reciprocal inner products `1 / |<v_j, u_i>|` for a fixed grid and normal
/// set, so that radial values for many depth vectors cost one pass each.
#[derive(Debug, Clone)]
pub struct RadialTable<T> {
    facets: usize,
    inv: Vec<T>,
    weights: Vec<T>,
    normals: Vec<Vec<T>>,
    cells: Option<ArcCells<T>>,
}

impl<T: Real> RadialTable<T> {
    pub fn new(grid: &QuadratureGrid<T>, normals: &[Vec<T>]) -> Result<Self> {
        if let Some(u) = normals.iter().find(|u| u.len() != grid.dim()) {
            return Err(Error::DimensionMismatch {
                expected: grid.dim(),
                found: u.len(),
            });
        }
        let m = normals.len();
        let mut inv = Vec::with_capacity(grid.len() * m);
        for v in grid.nodes() {
            for (i, u) in normals.iter().enumerate() {
                let c = dot(v, u).abs();
                if c < T::parallel_guard() {
                    return Err(Error::DegenerateDirection { facet: i });
                }
                inv.push(T::one() / c);
            }
        }
        Ok(Self {
            facets: m,
            inv,
            weights: grid.weights().to_vec(),
            normals: normals.to_vec(),
            cells: grid.arc_cells().cloned(),
        })
    }

    pub fn facet_count(&self) -> usize {
        self.facets
    }

    pub fn node_count(&self) -> usize {
        self.weights.len()
    }

    /// Radial values for depth vector `depths`; ties go to the smallest index.
    pub fn evaluate(&self, depths: &[T]) -> Vec<NodeValue<T>> {
        assert_eq!(depths.len(), self.facets, "depth vector length");
        self.inv
            .par_chunks(self.facets)
            .map(|row| {
                let mut best = NodeValue {
                    rho: depths[0] * row[0],
                    facet: 0,
                };
                for (i, (&h, &r)) in depths.iter().zip(row).enumerate().skip(1) {
                    let t = h * r;
                    if t > best.rho {
                        best = NodeValue { rho: t, facet: i };
                    }
                }
                best
            })
            .collect()
    }

    /// Quadrature pieces for `depths`, given `values = self.evaluate(depths)`.
    ///
    /// Off midpoint grids every node is one piece. On a midpoint grid a cell
    /// containing a tie is cut at the exact tie angles and each sub-arc is
    /// evaluated at its own midpoint, which keeps the facet masses continuous
    /// in the depths.
    pub fn pieces(&self, depths: &[T], values: &[NodeValue<T>]) -> Vec<Piece<T>> {
        assert_eq!(values.len(), self.node_count(), "node value length");
        let Some(cells) = &self.cells else {
            return values
                .iter()
                .zip(&self.weights)
                .enumerate()
                .map(|(node, (nv, &weight))| Piece {
                    node,
                    facet: nv.facet,
                    weight,
                    rho: nv.rho,
                })
                .collect();
        };
        let ties = TieAngles::new(depths, &self.normals, cells.angles[0] - T::PI());
        let chunks: Vec<Vec<Piece<T>>> = values
            .par_chunks(CHUNK)
            .enumerate()
            .map(|(c, chunk)| {
                let mut out = Vec::with_capacity(chunk.len());
                for (k, nv) in chunk.iter().enumerate() {
                    let node = c * CHUNK + k;
                    self.cell_pieces(node, nv, cells, &ties, depths, &mut out);
                }
                out
            })
            .collect();
        chunks.concat()
    }

    fn cell_pieces(
        &self,
        node: usize,
        nv: &NodeValue<T>,
        cells: &ArcCells<T>,
        ties: &TieAngles<T>,
        depths: &[T],
        out: &mut Vec<Piece<T>>,
    ) {
        let weight = self.weights[node];
        let mid = cells.angles[node];
        let half = cells.width * T::lit(0.5);
        let (lo, hi) = (mid - half, mid + half);
        let c = nv.facet;
        let split = (0..self.facets).any(|b| {
            b != c && {
                let r = ties.right(c, b);
                let l = ties.left(c, b);
                (r >= mid && r < hi) || (l <= mid && l > lo)
            }
        });
        if !split {
            out.push(Piece {
                node,
                facet: c,
                weight,
                rho: nv.rho,
            });
            return;
        }
        let mut left = sweep(c, mid, lo, self.facets, |a, b| ties.left(a, b), false);
        let right = sweep(c, mid, hi, self.facets, |a, b| ties.right(a, b), true);
        left.reverse();
        let mut segments: Vec<(T, T, usize)> = Vec::with_capacity(left.len() + right.len());
        for (a, b, f) in left.into_iter().map(|(a, b, f)| (b, a, f)).chain(right) {
            match segments.last_mut() {
                Some(last) if last.2 == f => last.1 = b,
                _ => segments.push((a, b, f)),
            }
        }
        segments.retain(|(a, b, _)| b > a);
        // The last piece takes the remainder so the cell weight is kept exactly.
        let mut used = T::zero();
        let count = segments.len();
        for (k, (a, b, f)) in segments.into_iter().enumerate() {
            let share = if k + 1 == count {
                (weight - used).max(T::zero())
            } else {
                weight * ((b - a) / cells.width)
            };
            used = used + share;
            let m = (a + b) * T::lit(0.5);
            let u = &self.normals[f];
            let ip = (m.cos() * u[0] + m.sin() * u[1]).abs();
            out.push(Piece {
                node,
                facet: f,
                weight: share,
                rho: depths[f] / ip,
            });
        }
    }
}

/// Walks from `start` towards `end`, switching to whichever facet overtakes
/// the current one first. Returns `(from, to, facet)` segments.
fn sweep<T: Real>(
    first: usize,
    start: T,
    end: T,
    facets: usize,
    tie: impl Fn(usize, usize) -> T,
    forward: bool,
) -> Vec<(T, T, usize)> {
    let ahead = |x: T, p: T| {
        if forward {
            x >= p && x < end
        } else {
            x <= p && x > end
        }
    };
    let closer = |x: T, y: T| if forward { x < y } else { x > y };
    let (mut cur, mut prev, mut p) = (first, usize::MAX, start);
    let mut out = Vec::new();
    for _ in 0..=facets {
        let mut next: Option<(T, usize)> = None;
        for b in (0..facets).filter(|&b| b != cur && b != prev) {
            let x = tie(cur, b);
            if ahead(x, p) && next.is_none_or(|(y, _)| closer(x, y)) {
                next = Some((x, b));
            }
        }
        match next {
            Some((x, b)) => {
                out.push((p, x, cur));
                prev = cur;
                cur = b;
                p = x;
            }
            None => break,
        }
    }
    out.push((p, end, cur));
    out
}

/// For each ordered facet pair `(a, b)`, the angles at which `b` overtakes
/// `a` when sweeping counter-clockwise (`right`) or clockwise (`left`),
/// reduced to `[base, base + 2π)`.
///
/// `b` beats `a` at `v` exactly when `<v, h_a u_b - h_b u_a> > 0`, so both
/// crossings are a quarter turn either side of that vector's angle.
struct TieAngles<T> {
    m: usize,
    right: Vec<T>,
    left: Vec<T>,
}

impl<T: Real> TieAngles<T> {
    fn new(depths: &[T], normals: &[Vec<T>], base: T) -> Self {
        let m = depths.len();
        let two_pi = T::PI() + T::PI();
        let reduce = |x: T| {
            let r = (x - base) % two_pi;
            if r < T::zero() {
                r + two_pi + base
            } else {
                r + base
            }
        };
        let mut right = vec![T::nan(); m * m];
        let mut left = vec![T::nan(); m * m];
        for a in 0..m {
            for b in 0..m {
                if a == b {
                    continue;
                }
                let (ua, ub) = (&normals[a], &normals[b]);
                let w0 = depths[a] * ub[0] - depths[b] * ua[0];
                let w1 = depths[a] * ub[1] - depths[b] * ua[1];
                let theta = w1.atan2(w0);
                right[a * m + b] = reduce(theta - T::FRAC_PI_2());
                left[a * m + b] = reduce(theta + T::FRAC_PI_2());
            }
        }
        Self { m, right, left }
    }

    fn right(&self, a: usize, b: usize) -> T {
        self.right[a * self.m + b]
    }

    fn left(&self, a: usize, b: usize) -> T {
        self.left[a * self.m + b]
    }
}
