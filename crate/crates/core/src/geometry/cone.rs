use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{ConeDefect, Error, Result};
use crate::linalg::{angle_between, cross3, dot, neg, norm, normalized, rank};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub enum ConeKind<T> {
    /// `{x : angle(x, axis) <= half_angle}`.
    Circular { axis: Vec<T>, half_angle: T },
    /// Conic hull of `generators`, described by its outward facet normals.
    Polyhedral {
        generators: Vec<Vec<T>>,
        extreme_rays: Vec<Vec<T>>,
        facet_normals: Vec<Vec<T>>,
    },
}

/// A closed convex cone that is pointed and has nonempty interior.
#[derive(Debug, Clone, PartialEq)]
pub struct Cone<T> {
    kind: ConeKind<T>,
    dim: usize,
}

/// Monte Carlo estimate of a spherical area with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate<T> {
    pub value: T,
    pub std_error: T,
    pub samples: usize,
}

/// Surface measure of the unit sphere `S^{n-1}` in `R^n`.
pub fn sphere_area<T: Real>(n: usize) -> T {
    assert!(n >= 1, "sphere_area needs n >= 1");
    let two = T::lit(2.0);
    let two_pi = T::TAU();
    let (mut area, mut k) = if n % 2 == 1 { (two, 1) } else { (two_pi, 2) };
    while k < n {
        k += 2;
        area = area * two_pi / T::from_count(k - 2);
    }
    area
}

impl<T: Real> Cone<T> {
    pub fn circular(axis: Vec<T>, half_angle: T) -> Result<Self> {
        let n = axis.len();
        if n < 2 {
            return Err(Error::InvalidCone(ConeDefect::DimensionTooSmall));
        }
        if !axis.iter().all(|x| x.is_finite()) || (norm(&axis) - T::one()).abs() > T::geom_tol() {
            return Err(Error::InvalidCone(ConeDefect::NonUnitAxis));
        }
        if !(half_angle > T::zero() && half_angle < T::FRAC_PI_2()) {
            return Err(Error::InvalidCone(ConeDefect::HalfAngleOutOfRange));
        }
        Ok(Self {
            kind: ConeKind::Circular { axis, half_angle },
            dim: n,
        })
    }

    /// Circular cone with an explicit dimension check on the axis.
    pub fn circular_in(axis: Vec<T>, half_angle: T, n: usize) -> Result<Self> {
        if axis.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: axis.len(),
            });
        }
        Self::circular(axis, half_angle)
    }

    /// Conic hull of unit generators in dimension 2 or 3.
    pub fn polyhedral(generators: Vec<Vec<T>>) -> Result<Self> {
        let tol = T::geom_tol();
        let n = generators
            .first()
            .map(Vec::len)
            .ok_or(Error::InvalidCone(ConeDefect::Empty))?;
        if generators.iter().any(|g| g.len() != n) {
            return Err(Error::InvalidCone(ConeDefect::RaggedGenerators));
        }
        if n < 2 {
            return Err(Error::InvalidCone(ConeDefect::DimensionTooSmall));
        }
        if n > 3 {
            return Err(Error::InvalidCone(ConeDefect::UnsupportedDimension));
        }
        for (i, g) in generators.iter().enumerate() {
            if !g.iter().all(|x| x.is_finite()) || (norm(g) - T::one()).abs() > tol {
                return Err(Error::InvalidCone(ConeDefect::NonUnitGenerator(i)));
            }
        }
        for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if dot(a, b) < -T::one() + tol {
                    return Err(Error::InvalidCone(ConeDefect::ContainsLine));
                }
            }
        }
        if rank(&generators, T::lit(1e-9)) < n {
            return Err(Error::InvalidCone(ConeDefect::LowerDimensional));
        }

        let facet_normals = enumerate_facets(&generators, tol);
        if facet_normals.is_empty() || rank(&facet_normals, T::lit(1e-9)) < n {
            return Err(Error::InvalidCone(ConeDefect::ContainsLine));
        }

        let mut extreme_rays: Vec<Vec<T>> = Vec::new();
        for g in &generators {
            let on = facet_normals
                .iter()
                .filter(|m| dot(m, g).abs() <= tol)
                .count();
            if on >= n - 1 && !extreme_rays.iter().any(|r| dot(r, g) > T::one() - tol) {
                extreme_rays.push(g.clone());
            }
        }

        Ok(Self {
            kind: ConeKind::Polyhedral {
                generators,
                extreme_rays,
                facet_normals,
            },
            dim: n,
        })
    }

    pub fn kind(&self) -> &ConeKind<T> {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_circular(&self) -> bool {
        matches!(self.kind, ConeKind::Circular { .. })
    }

    /// Outward unit facet normals; `None` for circular cones, whose facets
    /// are not enumerable.
    pub fn facet_normals(&self) -> Option<&[Vec<T>]> {
        match &self.kind {
            ConeKind::Circular { .. } => None,
            ConeKind::Polyhedral { facet_normals, .. } => Some(facet_normals),
        }
    }

    pub fn extreme_rays(&self) -> Option<&[Vec<T>]> {
        match &self.kind {
            ConeKind::Circular { .. } => None,
            ConeKind::Polyhedral { extreme_rays, .. } => Some(extreme_rays),
        }
    }

    /// The dual cone `{x : <x, y> <= 0 for all y in C}`.
    pub fn dual(&self) -> Self {
        match &self.kind {
            ConeKind::Circular { axis, half_angle } => Self {
                kind: ConeKind::Circular {
                    axis: neg(axis),
                    half_angle: T::FRAC_PI_2() - *half_angle,
                },
                dim: self.dim,
            },
            // The outward facet normals of C are exactly the extreme rays of C°.
            ConeKind::Polyhedral { facet_normals, .. } => Self::polyhedral(facet_normals.clone())
                .expect("dual of a valid polyhedral cone is valid"),
        }
    }

    /// A unit direction in the interior of the cone.
    pub fn interior_direction(&self) -> Vec<T> {
        match &self.kind {
            ConeKind::Circular { axis, .. } => axis.clone(),
            ConeKind::Polyhedral { extreme_rays, .. } => {
                let mut s = vec![T::zero(); self.dim];
                for r in extreme_rays {
                    for (si, &ri) in s.iter_mut().zip(r) {
                        *si = *si + ri;
                    }
                }
                normalized(&s).expect("extreme rays of a pointed cone do not cancel")
            }
        }
    }

    /// Membership with the default slack.
    pub fn contains(&self, x: &[T], strict: bool) -> bool {
        self.contains_with_tol(x, strict, T::geom_tol())
    }

    /// Membership test; `tol` is a slack relative to `|x|`. Strict membership
    /// requires every inequality to hold with margin `tol`, non-strict admits
    /// violations up to `tol`.
    pub fn contains_with_tol(&self, x: &[T], strict: bool, tol: T) -> bool {
        if x.len() != self.dim {
            return false;
        }
        let r = norm(x);
        if r == T::zero() {
            return !strict;
        }
        let slack = tol * r;
        match &self.kind {
            ConeKind::Circular { axis, half_angle } => {
                let excess = dot(x, axis) - r * half_angle.cos();
                if strict {
                    excess > slack
                } else {
                    excess >= -slack
                }
            }
            ConeKind::Polyhedral { facet_normals, .. } => facet_normals.iter().all(|m| {
                let s = dot(m, x);
                if strict {
                    s < -slack
                } else {
                    s <= slack
                }
            }),
        }
    }

    /// `sigma_{n-1}(Omega_C)`: exact for circular cones in any dimension and
    /// for polyhedral cones in dimensions 2 and 3.
    pub fn omega_area(&self) -> T {
        match &self.kind {
            ConeKind::Circular { half_angle, .. } => cap_area(self.dim, *half_angle),
            ConeKind::Polyhedral { facet_normals, .. } => {
                if self.dim == 2 {
                    T::PI() - angle_between(&facet_normals[0], &facet_normals[1])
                } else {
                    // Girard: the area of a convex spherical polygon equals 2π
                    // minus the perimeter of its polar polygon.
                    let ordered = cyclic_order(facet_normals);
                    let k = ordered.len();
                    let perimeter = (0..k)
                        .map(|i| angle_between(ordered[i], ordered[(i + 1) % k]))
                        .fold(T::zero(), |a, b| a + b);
                    T::TAU() - perimeter
                }
            }
        }
    }

    /// Rejection-sampling estimate of `sigma_{n-1}(Omega_C)`.
    pub fn omega_area_monte_carlo(&self, samples: usize, seed: u64) -> MonteCarloEstimate<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hits = 0usize;
        let mut x = vec![T::zero(); self.dim];
        for _ in 0..samples {
            for xi in x.iter_mut() {
                let z: f64 = StandardNormal.sample(&mut rng);
                *xi = T::lit(z);
            }
            if self.contains_with_tol(&x, true, T::zero()) {
                hits += 1;
            }
        }
        let total = sphere_area::<T>(self.dim);
        let n = T::from_count(samples.max(1));
        let p = T::from_count(hits) / n;
        MonteCarloEstimate {
            value: total * p,
            std_error: total * (p * (T::one() - p) / n).sqrt(),
            samples,
        }
    }

    /// Same cone up to tolerance (compares axes/angles or facet normal sets).
    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        if self.dim != other.dim {
            return false;
        }
        match (&self.kind, &other.kind) {
            (
                ConeKind::Circular {
                    axis: a,
                    half_angle: t,
                },
                ConeKind::Circular {
                    axis: b,
                    half_angle: s,
                },
            ) => (*t - *s).abs() <= tol && a.iter().zip(b).all(|(&x, &y)| (x - y).abs() <= tol),
            (
                ConeKind::Polyhedral {
                    facet_normals: f, ..
                },
                ConeKind::Polyhedral {
                    facet_normals: g, ..
                },
            ) => {
                f.len() == g.len()
                    && f.iter()
                        .all(|m| g.iter().any(|k| dot(m, k) >= T::one() - tol))
            }
            _ => false,
        }
    }
}

fn cap_area<T: Real>(n: usize, theta: T) -> T {
    match n {
        2 => T::lit(2.0) * theta,
        3 => T::TAU() * (T::one() - theta.cos()),
        _ => {
            // sigma(S^{n-2}) * ∫_0^θ sin^{n-2}(t) dt, composite Simpson.
            let steps = 4096usize;
            let h = theta / T::from_count(steps);
            let p = (n - 2) as i32;
            let f = |t: T| t.sin().powi(p);
            let mut acc = f(T::zero()) + f(theta);
            for k in 1..steps {
                let c = if k % 2 == 1 { T::lit(4.0) } else { T::lit(2.0) };
                acc = acc + c * f(h * T::from_count(k));
            }
            sphere_area::<T>(n - 1) * acc * h / T::lit(3.0)
        }
    }
}

fn enumerate_facets<T: Real>(generators: &[Vec<T>], tol: T) -> Vec<Vec<T>> {
    let n = generators[0].len();
    let mut candidates: Vec<Vec<T>> = Vec::new();
    if n == 2 {
        for g in generators {
            candidates.push(vec![-g[1], g[0]]);
        }
    } else {
        for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if let Some(c) = normalized(&cross3(a, b)) {
                    candidates.push(c);
                }
            }
        }
    }

    let mut facets: Vec<Vec<T>> = Vec::new();
    for c in candidates {
        for m in [neg(&c), c.clone()] {
            let supporting = generators.iter().all(|g| dot(&m, g) <= tol);
            let proper = generators.iter().any(|g| dot(&m, g) < -tol);
            if supporting && proper && !facets.iter().any(|f| dot(f, &m) > T::one() - tol) {
                facets.push(m);
            }
        }
    }
    facets
}

/// Orders unit vectors spanning a pointed 3-d cone cyclically around the
/// cone's central direction.
fn cyclic_order<T: Real>(vectors: &[Vec<T>]) -> Vec<&Vec<T>> {
    let mut centre = vec![T::zero(); 3];
    for v in vectors {
        for (c, &x) in centre.iter_mut().zip(v) {
            *c = *c + x;
        }
    }
    let e = normalized(&centre).expect("pointed cone");
    let seed = if e[0].abs() < T::lit(0.9) {
        vec![T::one(), T::zero(), T::zero()]
    } else {
        vec![T::zero(), T::one(), T::zero()]
    };
    let b1 = normalized(&cross3(&e, &seed)).expect("seed not parallel to centre");
    let b2 = cross3(&e, &b1);
    let mut keyed: Vec<(T, &Vec<T>)> = vectors
        .iter()
        .map(|v| (dot(v, &b2).atan2(dot(v, &b1)), v))
        .collect();
    keyed.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite angles"));
    keyed.into_iter().map(|(_, v)| v).collect()
}
