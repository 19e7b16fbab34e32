//! Seeded random instances: normals in the closed dual cone, pseudo-cones
//! and perturbation vectors.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::{Cone, ConeKind, QuadratureGrid};
use crate::linalg::{dot, norm, normalized, sub};
use crate::pseudocone::{Facet, PseudoCone};
use crate::scalar::Real;

/// Minimum chord between two sampled normals.
const MIN_SEPARATION: f64 = 1e-3;

/// A random unit vector in the dual cone of `cone`.
///
/// Polyhedral: a uniformly weighted positive combination of the dual
/// generators. Circular: a direction in the dual cap at a uniform angle from
/// its axis.
pub fn random_dual_normal<T: Real, R: Rng + ?Sized>(cone: &Cone<T>, rng: &mut R) -> Vec<T> {
    match cone.kind() {
        ConeKind::Polyhedral { facet_normals, .. } => loop {
            let mut s = vec![T::zero(); cone.dim()];
            for m in facet_normals {
                let w = T::lit(rng.random::<f64>());
                for (si, &mi) in s.iter_mut().zip(m) {
                    *si = *si + w * mi;
                }
            }
            if let Some(u) = normalized(&s) {
                return u;
            }
        },
        ConeKind::Circular { axis, half_angle } => {
            let dual_axis: Vec<T> = axis.iter().map(|&a| -a).collect();
            let beta = T::FRAC_PI_2() - *half_angle;
            let side = loop {
                let raw: Vec<T> = (0..cone.dim())
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(rng);
                        T::lit(z)
                    })
                    .collect();
                let c = dot(&raw, &dual_axis);
                let perp: Vec<T> = raw
                    .iter()
                    .zip(&dual_axis)
                    .map(|(&r, &a)| r - c * a)
                    .collect();
                if let Some(p) = normalized(&perp) {
                    break p;
                }
            };
            let alpha = beta * T::lit(rng.random::<f64>());
            dual_axis
                .iter()
                .zip(&side)
                .map(|(&a, &p)| alpha.cos() * a + alpha.sin() * p)
                .collect()
        }
    }
}

/// A uniformly random vector in `[-1, 1]^m`.
pub fn random_coefficients<T: Real, R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<T> {
    (0..m)
        .map(|_| T::lit(rng.random_range(-1.0..=1.0)))
        .collect()
}

/// A pseudo-cone with `facets` random dual normals and depths in `[0.5, 2]`.
pub fn random_pseudocone<T: Real, R: Rng + ?Sized>(
    cone: &Cone<T>,
    facets: usize,
    rng: &mut R,
) -> Result<PseudoCone<T>> {
    if facets == 0 {
        return Err(Error::InvalidParameter {
            name: "facets",
            reason: "at least one facet is required".into(),
        });
    }
    let sep = T::lit(MIN_SEPARATION);
    let mut list: Vec<Facet<T>> = Vec::with_capacity(facets);
    while list.len() < facets {
        let u = random_dual_normal(cone, rng);
        if list.iter().any(|f| norm(&sub(&f.normal, &u)) < sep) {
            continue;
        }
        let depth = T::lit(rng.random_range(0.5..=2.0));
        list.push(Facet::new(u, depth));
    }
    PseudoCone::wulff_shape(cone.clone(), list)
}

/// Like [`random_pseudocone`], resampling until every facet is the radial
/// maximiser at some grid node.
pub fn random_active_pseudocone<T: Real, R: Rng + ?Sized>(
    cone: &Cone<T>,
    facets: usize,
    grid: &QuadratureGrid<T>,
    rng: &mut R,
    max_tries: usize,
) -> Result<PseudoCone<T>> {
    for _ in 0..max_tries {
        let k = random_pseudocone(cone, facets, rng)?;
        if k.inactive_facets(grid)?.is_empty() {
            return Ok(k);
        }
    }
    Err(Error::InvalidParameter {
        name: "max_tries",
        reason: format!("no all-active {facets}-facet sample in {max_tries} tries"),
    })
}
