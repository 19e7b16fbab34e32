//! Decay pairs `(G, F)` with `F(x) = -x G'(x)`, the functional `J_G`, dual
//! volumes, `F`-radial measures and dual curvature measures.
//!
//! All grid sums go through [`pairwise_sum`] in a fixed order: per-node
//! terms are bucketed by Gauss facet, each bucket is summed pairwise, and a
//! total is the pairwise sum of its buckets in facet order. The total of
//! [`dual_curvature`] and [`dual_volume`] are therefore the same number.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Cone, QuadratureGrid};
use crate::linalg::{norm, pairwise_sum, sub};
use crate::pseudocone::PseudoCone;
use crate::radial_table::Piece;
use crate::scalar::Real;

type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayKind {
    Power,
    Exponential,
    Custom,
}

#[derive(Clone)]
enum Decay<T> {
    Power { q: T },
    Exponential,
    Custom { g: ScalarFn<T>, f: ScalarFn<T> },
}

/// A strictly decreasing positive `G` on `(0, ∞)` and `F(x) = -x G'(x)`.
#[derive(Clone)]
pub struct DecayPair<T> {
    decay: Decay<T>,
}

impl<T: Real> fmt::Debug for DecayPair<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.decay {
            Decay::Power { q } => write!(f, "DecayPair::Power(q = {q})"),
            Decay::Exponential => write!(f, "DecayPair::Exponential"),
            Decay::Custom { .. } => write!(f, "DecayPair::Custom"),
        }
    }
}

/// Sample abscissae for validating custom pairs.
const CHECK_POINTS: [f64; 7] = [0.05, 0.2, 0.5, 1.0, 2.0, 5.0, 20.0];

impl<T: Real> DecayPair<T> {
    /// `G(x) = x^q`, `F(x) = |q| x^q` for `q < 0`.
    pub fn power(q: T) -> Result<Self> {
        if !(q < T::zero() && q.is_finite()) {
            return Err(Error::InvalidDecay(format!(
                "power index must be negative, got {q}"
            )));
        }
        Ok(Self {
            decay: Decay::Power { q },
        })
    }

    /// `G(x) = e^{-x}`, `F(x) = x e^{-x}`.
    pub fn exponential() -> Self {
        Self {
            decay: Decay::Exponential,
        }
    }

    /// A caller-supplied pair, checked by central differences on a fixed
    /// set of sample points.
    pub fn custom<G, F>(g: G, f: F) -> Result<Self>
    where
        G: Fn(T) -> T + Send + Sync + 'static,
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        let pair = Self {
            decay: Decay::Custom {
                g: Arc::new(g),
                f: Arc::new(f),
            },
        };
        let xs: Vec<T> = CHECK_POINTS.iter().map(|&x| T::lit(x)).collect();
        for w in xs.windows(2) {
            let (ga, gb) = (pair.g(w[0]), pair.g(w[1]));
            if !(ga > T::zero() && gb > T::zero()) {
                return Err(Error::InvalidDecay(format!(
                    "G is not positive at {}",
                    w[1]
                )));
            }
            if !(gb < ga) {
                return Err(Error::InvalidDecay(format!(
                    "G is not strictly decreasing on [{}, {}]",
                    w[0], w[1]
                )));
            }
        }
        let tol = if T::epsilon() < T::lit(1e-10) {
            T::lit(1e-6)
        } else {
            T::epsilon().cbrt()
        };
        let err = pair.consistency_error(&xs);
        if !(err <= tol) {
            return Err(Error::InvalidDecay(format!(
                "F does not match -x G'(x): relative error {err}"
            )));
        }
        Ok(pair)
    }

    pub fn kind(&self) -> DecayKind {
        match self.decay {
            Decay::Power { .. } => DecayKind::Power,
            Decay::Exponential => DecayKind::Exponential,
            Decay::Custom { .. } => DecayKind::Custom,
        }
    }

    /// The index `q` of a power pair.
    pub fn power_index(&self) -> Option<T> {
        match self.decay {
            Decay::Power { q } => Some(q),
            _ => None,
        }
    }

    /// Errors unless this is the power pair with index `q`.
    pub fn ensure_power_index(&self, q: T) -> Result<()> {
        match self.decay {
            Decay::Power { q: own } if own == q => Ok(()),
            Decay::Power { q: own } => Err(Error::InvalidDecay(format!(
                "power pair has q = {own} but q = {q} was requested"
            ))),
            _ => Err(Error::InvalidDecay("not a power pair".into())),
        }
    }

    #[inline]
    pub fn g(&self, x: T) -> T {
        match &self.decay {
            Decay::Power { q } => x.powf(*q),
            Decay::Exponential => (-x).exp(),
            Decay::Custom { g, .. } => g(x),
        }
    }

    #[inline]
    pub fn f(&self, x: T) -> T {
        match &self.decay {
            Decay::Power { q } => q.abs() * x.powf(*q),
            Decay::Exponential => x * (-x).exp(),
            Decay::Custom { f, .. } => f(x),
        }
    }

    /// Largest relative deviation of `-x (G(x+ε) - G(x-ε)) / 2ε` from `F(x)`
    /// over `xs`, with `ε = 1e-6 x` in double precision.
    pub fn consistency_error(&self, xs: &[T]) -> T {
        let rel = if T::epsilon() < T::lit(1e-10) {
            T::lit(1e-6)
        } else {
            T::epsilon().cbrt()
        };
        xs.iter()
            .map(|&x| {
                let eps = rel * x;
                let fd = -x * (self.g(x + eps) - self.g(x - eps)) / (eps + eps);
                let exact = self.f(x);
                if exact > T::zero() {
                    ((fd - exact) / exact).abs()
                } else {
                    T::infinity()
                }
            })
            .fold(T::zero(), T::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom<T> {
    pub u: Vec<T>,
    pub weight: T,
}

impl<T> Atom<T> {
    pub fn new(u: Vec<T>, weight: T) -> Self {
        Self { u, weight }
    }
}

/// Finitely supported nonnegative measure on unit vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure<T> {
    atoms: Vec<Atom<T>>,
    total: T,
}

impl<T: Real> DiscreteMeasure<T> {
    pub fn new(atoms: Vec<Atom<T>>) -> Result<Self> {
        let dim = atoms
            .first()
            .map(|a| a.u.len())
            .ok_or_else(|| Error::InvalidMeasure("no atoms".into()))?;
        let tol = T::geom_tol();
        for (i, a) in atoms.iter().enumerate() {
            if a.u.len() != dim {
                return Err(Error::InvalidMeasure(format!(
                    "atom {i} has wrong dimension"
                )));
            }
            if !a.u.iter().all(|x| x.is_finite()) || (norm(&a.u) - T::one()).abs() > tol {
                return Err(Error::InvalidMeasure(format!(
                    "atom {i} is not a unit vector"
                )));
            }
            if !(a.weight >= T::zero() && a.weight.is_finite()) {
                return Err(Error::InvalidMeasure(format!(
                    "atom {i} has weight {}",
                    a.weight
                )));
            }
            if atoms[..i].iter().any(|b| norm(&sub(&a.u, &b.u)) <= tol) {
                return Err(Error::InvalidMeasure(format!(
                    "atom {i} repeats an earlier atom"
                )));
            }
        }
        Ok(Self::from_parts(atoms))
    }

    fn from_parts(atoms: Vec<Atom<T>>) -> Self {
        let weights: Vec<T> = atoms.iter().map(|a| a.weight).collect();
        Self {
            total: pairwise_sum(&weights),
            atoms,
        }
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].u.len()
    }

    /// `|φ|`: pairwise sum of the weights in atom order.
    pub fn total(&self) -> T {
        self.total
    }

    pub fn weights(&self) -> Vec<T> {
        self.atoms.iter().map(|a| a.weight).collect()
    }

    pub fn normals(&self) -> Vec<Vec<T>> {
        self.atoms.iter().map(|a| a.u.clone()).collect()
    }

    pub fn scaled(&self, s: T) -> Self {
        Self::from_parts(
            self.atoms
                .iter()
                .map(|a| Atom::new(a.u.clone(), a.weight * s))
                .collect(),
        )
    }

    /// Errors unless every atom lies in the dual of `cone` (closed set).
    pub fn ensure_in_dual_of(&self, cone: &Cone<T>) -> Result<()> {
        if self.dim() != cone.dim() {
            return Err(Error::DimensionMismatch {
                expected: cone.dim(),
                found: self.dim(),
            });
        }
        let dual = cone.dual();
        match self.atoms.iter().position(|a| !dual.contains(&a.u, false)) {
            Some(i) => Err(Error::InvalidMeasure(format!(
                "atom {i} lies outside the dual cone"
            ))),
            None => Ok(()),
        }
    }

    /// Mass carried by atoms in the open set `Omega_{C°}`.
    pub fn interior_mass(&self, cone: &Cone<T>) -> T {
        let dual = cone.dual();
        let inside: Vec<T> = self
            .atoms
            .iter()
            .filter(|a| dual.contains(&a.u, true))
            .map(|a| a.weight)
            .collect();
        pairwise_sum(&inside)
    }
}

/// Per-facet pairwise sums of `term(piece)`.
pub(crate) fn bucket_sums<T, F>(pieces: &[Piece<T>], facets: usize, term: F) -> Vec<T>
where
    T: Real,
    F: Fn(&Piece<T>) -> T + Send + Sync,
{
    let terms: Vec<T> = pieces.par_iter().map(term).collect();
    let mut buckets: Vec<Vec<T>> = vec![Vec::new(); facets];
    for (t, p) in terms.into_iter().zip(pieces) {
        buckets[p.facet].push(t);
    }
    buckets.iter().map(|b| pairwise_sum(b)).collect()
}

/// `C̃_q` bucket masses from precomputed pieces.
pub(crate) fn curvature_masses<T: Real>(
    pieces: &[Piece<T>],
    facets: usize,
    q: T,
    dim: usize,
) -> Vec<T> {
    let inv_n = T::one() / T::from_count(dim);
    bucket_sums(pieces, facets, |p| p.weight * p.rho.powf(q))
        .into_iter()
        .map(|s| s * inv_n)
        .collect()
}

fn check_negative_q<T: Real>(q: T) -> Result<()> {
    if q < T::zero() && q.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "q",
            reason: format!("dual curvature index must be negative, got {q}"),
        })
    }
}

fn check_grid<T: Real>(k: &PseudoCone<T>, grid: &QuadratureGrid<T>) -> Result<()> {
    if grid.dim() != k.dim() {
        Err(Error::DimensionMismatch {
            expected: k.dim(),
            found: grid.dim(),
        })
    } else {
        Ok(())
    }
}

fn atoms_from<T: Real>(k: &PseudoCone<T>, masses: Vec<T>) -> DiscreteMeasure<T> {
    DiscreteMeasure::from_parts(
        k.facets()
            .iter()
            .zip(masses)
            .map(|(f, w)| Atom::new(f.normal.clone(), w))
            .collect(),
    )
}

/// `J_G(K) = ∫_{Omega_C} G(rho_K(v)) dv` by grid quadrature.
pub fn j_g<T: Real>(
    k: &PseudoCone<T>,
    decay: &DecayPair<T>,
    grid: &QuadratureGrid<T>,
) -> Result<T> {
    check_grid(k, grid)?;
    let pieces = k.pieces_on(grid)?;
    let buckets = bucket_sums(&pieces, k.len(), |p| p.weight * decay.g(p.rho));
    Ok(pairwise_sum(&buckets))
}

/// `Ṽ_q(K) = (1/n) ∫ rho_K^q`; identical to the total of [`dual_curvature`].
pub fn dual_volume<T: Real>(k: &PseudoCone<T>, q: T, grid: &QuadratureGrid<T>) -> Result<T> {
    Ok(dual_curvature(k, q, grid)?.total())
}

/// `μ_{F,K}`: push-forward of `F(rho_K) dv` under the radial Gauss map.
pub fn radial_measure<T: Real>(
    k: &PseudoCone<T>,
    decay: &DecayPair<T>,
    grid: &QuadratureGrid<T>,
) -> Result<DiscreteMeasure<T>> {
    check_grid(k, grid)?;
    let pieces = k.pieces_on(grid)?;
    let masses = bucket_sums(&pieces, k.len(), |p| p.weight * decay.f(p.rho));
    Ok(atoms_from(k, masses))
}

/// `C̃_q(K, ·)` on the facet normals of `K`, for `q < 0`.
pub fn dual_curvature<T: Real>(
    k: &PseudoCone<T>,
    q: T,
    grid: &QuadratureGrid<T>,
) -> Result<DiscreteMeasure<T>> {
    check_negative_q(q)?;
    check_grid(k, grid)?;
    let pieces = k.pieces_on(grid)?;
    let masses = curvature_masses(&pieces, k.len(), q, k.dim());
    Ok(atoms_from(k, masses))
}

/// [`dual_curvature`] with the index taken from a power pair; errors if the
/// pair's index differs from `q`.
pub fn dual_curvature_for<T: Real>(
    k: &PseudoCone<T>,
    decay: &DecayPair<T>,
    q: T,
    grid: &QuadratureGrid<T>,
) -> Result<DiscreteMeasure<T>> {
    decay.ensure_power_index(q)?;
    dual_curvature(k, q, grid)
}
