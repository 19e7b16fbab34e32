//! Finite-facet pseudo-cones `K = C ∩ ⋂_i {y : <y, u_i> <= -h_i}`.
//!
//! A pseudo-cone is stored as the Wulff shape of finitely many facet depths
//! `h_i > 0` over unit normals `u_i` in the dual cone. For `v` in `Omega_C`
//! the radial function is `max_i h_i / |<v, u_i>|` and the radial Gauss map
//! is the maximising normal.

use crate::error::{Error, FacetDefect, Result};
use crate::geometry::{Cone, QuadratureGrid};
use crate::linalg::{dot, norm, sub};
use crate::radial_table::{Piece, RadialTable};
use crate::scalar::Real;

/// Default relative tolerance for reporting ties in the radial Gauss map.
pub const DEFAULT_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Facet<T> {
    pub normal: Vec<T>,
    pub depth: T,
}

impl<T> Facet<T> {
    pub fn new(normal: Vec<T>, depth: T) -> Self {
        Self { normal, depth }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PseudoCone<T> {
    cone: Cone<T>,
    dual: Cone<T>,
    facets: Vec<Facet<T>>,
}

/// Radial Gauss map value at one direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadialGaussResult {
    /// Smallest maximising facet index.
    pub index: usize,
    /// Every facet within the tie tolerance of the maximum, ascending.
    pub tie_indices: Vec<usize>,
    pub is_tie: bool,
}

/// Radial value and (smallest-index) Gauss facet at one grid node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeValue<T> {
    pub rho: T,
    pub facet: usize,
}

impl<T: Real> PseudoCone<T> {
    /// Validates the facet list and builds the Wulff shape `[h]` over `cone`.
    pub fn wulff_shape(cone: Cone<T>, facets: Vec<Facet<T>>) -> Result<Self> {
        let dual = cone.dual();
        validate_facets(&cone, &dual, &facets)?;
        Ok(Self { cone, dual, facets })
    }

    /// `C + z` for a polyhedral cone and `z` in the interior of `C`.
    pub fn translated_cone(cone: Cone<T>, z: &[T]) -> Result<Self> {
        if z.len() != cone.dim() {
            return Err(Error::DimensionMismatch {
                expected: cone.dim(),
                found: z.len(),
            });
        }
        if !cone.contains(z, true) {
            return Err(Error::InvalidParameter {
                name: "z",
                reason: "translation must lie in the interior of the cone".into(),
            });
        }
        let normals = cone
            .facet_normals()
            .ok_or_else(|| {
                Error::Unsupported("a translated circular cone has no finite facet list".into())
            })?
            .to_vec();
        let facets = normals
            .into_iter()
            .map(|m| {
                let depth = -dot(&m, z);
                Facet::new(m, depth)
            })
            .collect();
        Self::wulff_shape(cone, facets)
    }

    pub fn cone(&self) -> &Cone<T> {
        &self.cone
    }

    pub fn dual_cone(&self) -> &Cone<T> {
        &self.dual
    }

    pub fn facets(&self) -> &[Facet<T>] {
        &self.facets
    }

    pub fn dim(&self) -> usize {
        self.cone.dim()
    }

    pub fn len(&self) -> usize {
        self.facets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }

    pub fn depths(&self) -> Vec<T> {
        self.facets.iter().map(|f| f.depth).collect()
    }

    pub fn normals(&self) -> Vec<Vec<T>> {
        self.facets.iter().map(|f| f.normal.clone()).collect()
    }

    /// Same normals, new depths.
    pub fn with_depths(&self, depths: &[T]) -> Result<Self> {
        if depths.len() != self.facets.len() {
            return Err(Error::DimensionMismatch {
                expected: self.facets.len(),
                found: depths.len(),
            });
        }
        for (index, &d) in depths.iter().enumerate() {
            check_depth(index, d)?;
        }
        let facets = self
            .facets
            .iter()
            .zip(depths)
            .map(|(f, &d)| Facet::new(f.normal.clone(), d))
            .collect();
        Ok(Self {
            cone: self.cone.clone(),
            dual: self.dual.clone(),
            facets,
        })
    }

    /// `rho_K(v)` for `v` in the open domain `Omega_C`.
    pub fn radial(&self, v: &[T]) -> Result<T> {
        Ok(self.radial_terms(v)?.0)
    }

    /// The facet(s) attaining the radial maximum at `v`.
    pub fn radial_gauss(&self, v: &[T], tie_tol: T) -> Result<RadialGaussResult> {
        let (rho, _, terms) = self.radial_terms(v)?;
        let floor = rho * (T::one() - tie_tol);
        let tie_indices: Vec<usize> = terms
            .iter()
            .enumerate()
            .filter(|(_, &t)| t >= floor)
            .map(|(i, _)| i)
            .collect();
        Ok(RadialGaussResult {
            index: tie_indices[0],
            is_tie: tie_indices.len() > 1,
            tie_indices,
        })
    }

    fn radial_terms(&self, v: &[T]) -> Result<(T, usize, Vec<T>)> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        if !self.cone.contains(v, true) {
            return Err(Error::OutsideDomain);
        }
        let mut terms = Vec::with_capacity(self.facets.len());
        for (i, f) in self.facets.iter().enumerate() {
            let c = dot(v, &f.normal).abs();
            if c < T::parallel_guard() {
                return Err(Error::DegenerateDirection { facet: i });
            }
            terms.push(f.depth * (T::one() / c));
        }
        let (mut best, mut idx) = (terms[0], 0);
        for (i, &t) in terms.iter().enumerate().skip(1) {
            if t > best {
                best = t;
                idx = i;
            }
        }
        Ok((best, idx, terms))
    }

    /// Grid approximation of `h̄_K(u) = min_v rho_K(v) |<v, u>|`.
    ///
    /// Overestimates the infimum by an amount of the order of the node
    /// spacing.
    pub fn support(&self, u: &[T], grid: &QuadratureGrid<T>) -> Result<T> {
        if u.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.len(),
            });
        }
        if !self.dual.contains(u, false) {
            return Err(Error::InvalidParameter {
                name: "u",
                reason: "support direction lies outside the dual cone".into(),
            });
        }
        let values = self.evaluate_on(grid)?;
        Ok(grid
            .nodes()
            .zip(&values)
            .map(|(v, nv)| nv.rho * dot(v, u).abs())
            .fold(T::infinity(), T::min))
    }

    /// Grid estimate of `b(K)`, the distance from the origin: the smallest
    /// radial value over the nodes. An upper bound on the true distance.
    pub fn distance_from_origin(&self, grid: &QuadratureGrid<T>) -> Result<T> {
        Ok(self
            .evaluate_on(grid)?
            .iter()
            .map(|nv| nv.rho)
            .fold(T::infinity(), T::min))
    }

    pub fn scale(&self, lambda: T) -> Result<Self> {
        if !(lambda > T::zero() && lambda.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: "scale factor must be positive and finite".into(),
            });
        }
        let depths: Vec<T> = self.facets.iter().map(|f| f.depth * lambda).collect();
        self.with_depths(&depths)
    }

    /// Wulff shape of the depths `h_i exp(t g_i)`.
    pub fn perturb(&self, g: &[T], t: T) -> Result<Self> {
        if g.len() != self.facets.len() {
            return Err(Error::DimensionMismatch {
                expected: self.facets.len(),
                found: g.len(),
            });
        }
        if !g.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "g",
                reason: "perturbation values must be finite".into(),
            });
        }
        if !(t.abs() <= T::one()) {
            return Err(Error::InvalidParameter {
                name: "t",
                reason: "perturbation parameter must satisfy |t| <= 1".into(),
            });
        }
        let depths: Vec<T> = self
            .facets
            .iter()
            .zip(g)
            .map(|(f, &gi)| f.depth * (t * gi).exp())
            .collect();
        self.with_depths(&depths)
    }

    /// Radial value and Gauss facet at every grid node.
    pub fn evaluate_on(&self, grid: &QuadratureGrid<T>) -> Result<Vec<NodeValue<T>>> {
        Ok(RadialTable::new(grid, &self.normals())?.evaluate(&self.depths()))
    }

    /// Quadrature pieces: one per node, or several for a planar cell that
    /// straddles a tie between facets.
    pub fn pieces_on(&self, grid: &QuadratureGrid<T>) -> Result<Vec<Piece<T>>> {
        let table = RadialTable::new(grid, &self.normals())?;
        let depths = self.depths();
        let values = table.evaluate(&depths);
        Ok(table.pieces(&depths, &values))
    }

    /// Facets that carry no quadrature weight on the grid.
    pub fn inactive_facets(&self, grid: &QuadratureGrid<T>) -> Result<Vec<usize>> {
        let mut hit = vec![false; self.facets.len()];
        for p in self.pieces_on(grid)? {
            if p.weight > T::zero() {
                hit[p.facet] = true;
            }
        }
        Ok(hit
            .iter()
            .enumerate()
            .filter(|(_, &h)| !h)
            .map(|(i, _)| i)
            .collect())
    }
}

fn check_depth<T: Real>(index: usize, depth: T) -> Result<()> {
    if depth > T::zero() && depth.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidFacet {
            index,
            defect: FacetDefect::NonPositiveDepth,
        })
    }
}

fn validate_facets<T: Real>(cone: &Cone<T>, dual: &Cone<T>, facets: &[Facet<T>]) -> Result<()> {
    if facets.is_empty() {
        return Err(Error::InvalidParameter {
            name: "facets",
            reason: "at least one facet is required".into(),
        });
    }
    let tol = T::geom_tol();
    for (index, f) in facets.iter().enumerate() {
        let bad = |defect| Err(Error::InvalidFacet { index, defect });
        if f.normal.len() != cone.dim() {
            return bad(FacetDefect::WrongDimension);
        }
        if !f.normal.iter().all(|x| x.is_finite()) || (norm(&f.normal) - T::one()).abs() > tol {
            return bad(FacetDefect::NonUnitNormal);
        }
        if !dual.contains(&f.normal, false) {
            return bad(FacetDefect::NormalOutsideDual);
        }
        check_depth(index, f.depth)?;
        if facets[..index]
            .iter()
            .any(|e| norm(&sub(&e.normal, &f.normal)) <= tol)
        {
            return bad(FacetDefect::DuplicateNormal);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sphere_grid, GridScheme};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_6, SQRT_2};

    fn quadrant() -> Cone<f64> {
        Cone::polyhedral(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    fn half_plane() -> PseudoCone<f64> {
        PseudoCone::wulff_shape(
            quadrant(),
            vec![Facet::new(vec![-FRAC_1_SQRT_2, -FRAC_1_SQRT_2], 1.0)],
        )
        .unwrap()
    }

    fn shifted() -> PseudoCone<f64> {
        PseudoCone::wulff_shape(
            quadrant(),
            vec![
                Facet::new(vec![0.0, -1.0], 1.0),
                Facet::new(vec![-1.0, 0.0], 1.0),
            ],
        )
        .unwrap()
    }

    fn dir(theta: f64) -> [f64; 2] {
        [theta.cos(), theta.sin()]
    }

    #[test]
    fn wulff_rejects_bad_facets() {
        let err = PseudoCone::wulff_shape(quadrant(), vec![Facet::new(vec![1.0, 0.0], 1.0)]);
        assert_eq!(
            err,
            Err(Error::InvalidFacet {
                index: 0,
                defect: FacetDefect::NormalOutsideDual
            })
        );
        let err = PseudoCone::wulff_shape(
            quadrant(),
            vec![
                Facet::new(vec![0.0, -1.0], 1.0),
                Facet::new(vec![-1.0, 0.0], 0.0),
            ],
        );
        assert_eq!(
            err,
            Err(Error::InvalidFacet {
                index: 1,
                defect: FacetDefect::NonPositiveDepth
            })
        );
        let err = PseudoCone::wulff_shape(
            quadrant(),
            vec![
                Facet::new(vec![0.0, -1.0], 1.0),
                Facet::new(vec![0.0, -1.0], 2.0),
            ],
        );
        assert_eq!(
            err,
            Err(Error::InvalidFacet {
                index: 1,
                defect: FacetDefect::DuplicateNormal
            })
        );
        assert!(PseudoCone::wulff_shape(quadrant(), vec![]).is_err());
    }

    #[test]
    fn half_plane_radial() {
        let k = half_plane();
        for theta in [0.1f64, 0.5, 1.2] {
            let expected = SQRT_2 / (theta.cos() + theta.sin());
            assert!((k.radial(&dir(theta)).unwrap() - expected).abs() < 1e-14);
        }
        assert!((k.radial(&dir(FRAC_PI_4)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn shifted_cone_radial_and_gauss() {
        let k = shifted();
        let v = dir(FRAC_PI_6);
        assert!((k.radial(&v).unwrap() - 2.0).abs() < 1e-14);
        let g = k.radial_gauss(&v, 1e-12).unwrap();
        assert_eq!(g.index, 0);
        assert!(!g.is_tie);

        let g = k.radial_gauss(&dir(FRAC_PI_4), 1e-12).unwrap();
        assert_eq!(g.index, 0);
        assert_eq!(g.tie_indices, vec![0, 1]);
        assert!(g.is_tie);
    }

    #[test]
    fn radial_rejects_boundary_directions() {
        assert_eq!(half_plane().radial(&[1.0, 0.0]), Err(Error::OutsideDomain));
        assert_eq!(
            half_plane().radial(&[1.0, 0.0, 0.0]),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        );
    }

    #[test]
    fn radial_guards_parallel_boundary_normals() {
        // A boundary normal of the dual cone is orthogonal to a boundary ray of
        // C; just inside the cone the inner product is tiny but nonzero.
        let k = shifted();
        let v = dir(1e-8);
        assert!(k.radial(&v).unwrap() > 1e7);
    }

    #[test]
    fn distance_from_origin_fixtures() {
        let grid = sphere_grid(&quadrant(), 100_000, GridScheme::Midpoint, 0).unwrap();
        // The minimiser sits on a tie, so the grid bias is first order.
        let b = shifted().distance_from_origin(&grid).unwrap();
        assert!(b >= SQRT_2 && b - SQRT_2 < 1e-4);
        assert!((half_plane().distance_from_origin(&grid).unwrap() - 1.0).abs() < 1e-9);
        let b2 = half_plane()
            .scale(3.0)
            .unwrap()
            .distance_from_origin(&grid)
            .unwrap();
        assert!((b2 - 3.0).abs() < 1e-8);
    }

    #[test]
    fn support_on_active_facet() {
        let grid = sphere_grid(&quadrant(), 10_000, GridScheme::Midpoint, 0).unwrap();
        let k = half_plane();
        let h = k.support(&[-FRAC_1_SQRT_2, -FRAC_1_SQRT_2], &grid).unwrap();
        assert!((1.0 - 1e-12..1.0 + 1e-3).contains(&h));
        assert!(k.support(&[1.0, 0.0], &grid).is_err());
    }

    #[test]
    fn support_dominates_depths() {
        let grid = sphere_grid(&quadrant(), 10_000, GridScheme::Midpoint, 0).unwrap();
        let k = shifted();
        for f in k.facets() {
            let h = k.support(&f.normal, &grid).unwrap();
            assert!(h >= f.depth - 1e-12);
            assert!(h - f.depth < 1e-3);
        }
    }

    #[test]
    fn scale_and_perturb() {
        let k = half_plane();
        assert_eq!(k.scale(1.0).unwrap(), k);
        assert_eq!(k.scale(2.0).unwrap().depths(), vec![2.0]);
        assert!(k.scale(0.0).is_err());
        assert!(k.scale(-1.0).is_err());

        let s = shifted();
        assert_eq!(s.perturb(&[0.3, -0.7], 0.0).unwrap(), s);
        let c = s.perturb(&[0.5, 0.5], 0.2).unwrap();
        let e = s.scale(0.1f64.exp()).unwrap();
        for (a, b) in c.depths().iter().zip(e.depths()) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(s.perturb(&[0.1, 0.2], 1.5).is_err());
        assert!(s.perturb(&[0.1], 0.5).is_err());
    }

    #[test]
    fn translated_cone_facets() {
        let k = PseudoCone::translated_cone(quadrant(), &[1.0, 1.0]).unwrap();
        assert_eq!(k.depths(), vec![1.0, 1.0]);
        assert!(PseudoCone::translated_cone(quadrant(), &[1.0, 0.0]).is_err());
        let circ = Cone::circular(vec![0.0, 1.0], 0.5).unwrap();
        assert!(matches!(
            PseudoCone::translated_cone(circ, &[0.0, 1.0]),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn inactive_facet_is_reported_not_removed() {
        let s = FRAC_1_SQRT_2;
        let k = PseudoCone::wulff_shape(
            quadrant(),
            vec![
                Facet::new(vec![0.0, -1.0], 1.0),
                Facet::new(vec![-1.0, 0.0], 1.0),
                Facet::new(vec![-s, -s], 0.5),
            ],
        )
        .unwrap();
        let grid = sphere_grid(&quadrant(), 1000, GridScheme::Midpoint, 0).unwrap();
        assert_eq!(k.inactive_facets(&grid).unwrap(), vec![2]);
        assert_eq!(k.len(), 3);
    }

    #[test]
    fn table_matches_pointwise_radial() {
        let grid = sphere_grid(&quadrant(), 257, GridScheme::Midpoint, 0).unwrap();
        let k = shifted().perturb(&[0.4, -0.2], 1.0).unwrap();
        let values = k.evaluate_on(&grid).unwrap();
        for (v, nv) in grid.nodes().zip(&values) {
            assert_eq!(k.radial(v).unwrap(), nv.rho);
            assert_eq!(k.radial_gauss(v, 0.0).unwrap().index, nv.facet);
        }
    }
}
