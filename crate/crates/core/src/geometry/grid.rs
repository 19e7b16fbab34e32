use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::cone::{sphere_area, Cone, ConeKind};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Node placement rule for [`sphere_grid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GridScheme {
    /// Equal sub-arcs of `Omega_C` with midpoint nodes (n = 2 only).
    Midpoint,
    /// Fibonacci lattice on `S^2`, filtered to `Omega_C` (n = 3 only).
    Fibonacci,
    /// Seeded uniform samples on `S^{n-1}`, filtered to `Omega_C` (any n).
    Random,
}

impl GridScheme {
    /// Midpoint in the plane, Fibonacci in space, random otherwise.
    pub fn default_for(dim: usize) -> Self {
        match dim {
            2 => Self::Midpoint,
            3 => Self::Fibonacci,
            _ => Self::Random,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Midpoint => "midpoint",
            Self::Fibonacci => "fibonacci",
            Self::Random => "random",
        }
    }
}

/// Equal-weight quadrature for spherical Lebesgue measure on `Omega_C`.
///
/// Nodes are stored flat, `dim` coordinates per node.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid<T> {
    dim: usize,
    coords: Vec<T>,
    weights: Vec<T>,
    omega_area: T,
    resolution: usize,
    scheme: GridScheme,
    seed: u64,
    cells: Option<ArcCells<T>>,
}

/// The arc partition behind a midpoint grid: node `j` is the centre of the
/// cell `[angles[j] - width / 2, angles[j] + width / 2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcCells<T> {
    pub angles: Vec<T>,
    pub width: T,
}

/// Upper bound on raw sphere samples drawn by the filtering schemes.
const MAX_RAW_SAMPLES: usize = 200_000_000;

/// Builds a quadrature grid on `Omega_C`.
///
/// `resolution` is the target number of nodes inside the cone. For the
/// filtering schemes the raw point count is scaled up by
/// `sigma(S^{n-1}) / sigma(Omega_C)`, so the kept count is close to, but not
/// exactly, `resolution`. `seed` only matters for [`GridScheme::Random`].
pub fn sphere_grid<T: Real>(
    cone: &Cone<T>,
    resolution: usize,
    scheme: GridScheme,
    seed: u64,
) -> Result<QuadratureGrid<T>> {
    if resolution == 0 {
        return Err(Error::InvalidParameter {
            name: "resolution",
            reason: "must be positive".into(),
        });
    }
    let dim = cone.dim();
    let omega_area = cone.omega_area();
    let mut cells = None;
    let coords = match scheme {
        GridScheme::Midpoint => {
            if dim != 2 {
                return Err(Error::Unsupported(
                    "the midpoint scheme is planar; use fibonacci or random".into(),
                ));
            }
            let (coords, arc) = midpoint_nodes(cone, resolution, omega_area);
            cells = arc;
            coords
        }
        GridScheme::Fibonacci => {
            if dim != 3 {
                return Err(Error::Unsupported(
                    "the fibonacci scheme needs n = 3".into(),
                ));
            }
            let raw = raw_count(resolution, dim, omega_area)?;
            fibonacci_nodes(cone, raw)
        }
        GridScheme::Random => {
            let raw = raw_count(resolution, dim, omega_area)?;
            random_nodes(cone, raw, seed)
        }
    };
    let kept = coords.len() / dim;
    if kept == 0 {
        return Err(Error::EmptyGrid { resolution });
    }
    let w = omega_area / T::from_count(kept);
    Ok(QuadratureGrid {
        dim,
        coords,
        weights: vec![w; kept],
        omega_area,
        resolution,
        scheme,
        seed,
        cells,
    })
}

fn raw_count<T: Real>(resolution: usize, dim: usize, omega_area: T) -> Result<usize> {
    let ratio = (sphere_area::<T>(dim) / omega_area).to_f64_lossy();
    let raw = (resolution as f64 * ratio).ceil();
    if !(raw.is_finite() && raw <= MAX_RAW_SAMPLES as f64) {
        return Err(Error::InvalidParameter {
            name: "resolution",
            reason: format!("cone too thin: {raw:.3e} raw sphere samples needed"),
        });
    }
    Ok(raw as usize)
}

fn midpoint_nodes<T: Real>(
    cone: &Cone<T>,
    count: usize,
    width: T,
) -> (Vec<T>, Option<ArcCells<T>>) {
    let start = match cone.kind() {
        ConeKind::Circular { axis, half_angle } => axis[1].atan2(axis[0]) - *half_angle,
        ConeKind::Polyhedral { extreme_rays, .. } => {
            let (a, b) = (&extreme_rays[0], &extreme_rays[1]);
            // Start from the ray whose counter-clockwise sweep reaches the other.
            let s = if a[0] * b[1] - a[1] * b[0] > T::zero() {
                a
            } else {
                b
            };
            s[1].atan2(s[0])
        }
    };
    let step = width / T::from_count(count);
    let half = T::lit(0.5);
    let mut out = Vec::with_capacity(2 * count);
    let mut angles = Vec::with_capacity(count);
    for k in 0..count {
        let angle = start + (T::from_count(k) + half) * step;
        let v = [angle.cos(), angle.sin()];
        if cone.contains(&v, true) {
            out.extend_from_slice(&v);
            angles.push(angle);
        }
    }
    // A dropped node would leave a hole in the partition.
    let cells = (angles.len() == count).then_some(ArcCells {
        angles,
        width: step,
    });
    (out, cells)
}

fn fibonacci_nodes<T: Real>(cone: &Cone<T>, raw: usize) -> Vec<T> {
    let golden = T::PI() * (T::lit(3.0) - T::lit(5.0).sqrt());
    let m = T::from_count(raw);
    let mut out = Vec::new();
    for k in 0..raw {
        let kf = T::from_count(k);
        let z = T::one() - (T::lit(2.0) * kf + T::one()) / m;
        let r = (T::one() - z * z).max(T::zero()).sqrt();
        let phi = golden * kf;
        let v = [r * phi.cos(), r * phi.sin(), z];
        if cone.contains(&v, true) {
            out.extend_from_slice(&v);
        }
    }
    out
}

fn random_nodes<T: Real>(cone: &Cone<T>, raw: usize, seed: u64) -> Vec<T> {
    let dim = cone.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut buf = vec![0.0f64; dim];
    let mut v = vec![T::zero(); dim];
    for _ in 0..raw {
        for b in buf.iter_mut() {
            *b = StandardNormal.sample(&mut rng);
        }
        let r = buf.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r == 0.0 {
            continue;
        }
        for (vi, &b) in v.iter_mut().zip(&buf) {
            *vi = T::lit(b / r);
        }
        if cone.contains(&v, true) {
            out.extend_from_slice(&v);
        }
    }
    out
}

impl<T: Real> QuadratureGrid<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, j: usize) -> &[T] {
        &self.coords[j * self.dim..(j + 1) * self.dim]
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// Flat node coordinates, `dim` per node.
    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn omega_area(&self) -> T {
        self.omega_area
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn scheme(&self) -> GridScheme {
        self.scheme
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The cell partition, for midpoint grids.
    pub fn arc_cells(&self) -> Option<&ArcCells<T>> {
        self.cells.as_ref()
    }

    pub fn weight_sum(&self) -> T {
        crate::linalg::pairwise_sum(&self.weights)
    }
}
