//! The derivative of `J_G` along multiplicative Wulff perturbations, its
//! finite-difference oracle, and the scale-invariant functional
//! `Φ(h) = -(1/|φ|) Σ φ_i log h_i + (1/q) log Ṽ_q([h])` with its gradient in
//! log-depth coordinates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Cone, QuadratureGrid};
use crate::linalg::{norm, pairwise_sum, sub};
use crate::measures::{curvature_masses, j_g, radial_measure, DecayPair, DiscreteMeasure};
use crate::pseudocone::{Facet, PseudoCone};
use crate::radial_table::RadialTable;
use crate::scalar::Real;

/// Relative agreement required between the exact derivative and the
/// finite-difference estimate at the smallest step.
pub const DEFAULT_FD_TOL: f64 = 1e-3;

/// Floor for the denominator of relative errors.
const REL_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdSample<T> {
    pub t: T,
    pub value: T,
}

/// Exact derivative of `J_G` next to central differences at several steps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationalReport<T> {
    pub exact_derivative: T,
    pub fd_estimates: Vec<FdSample<T>>,
    pub relative_errors: Vec<T>,
    /// Empirical convergence order between consecutive steps, sorted by
    /// decreasing `|t|`.
    pub observed_orders: Vec<T>,
    pub tolerance: T,
    pub converged: bool,
}

impl<T: Real> VariationalReport<T> {
    /// Relative error at the smallest `|t|`.
    pub fn finest_error(&self) -> T {
        self.fd_estimates
            .iter()
            .zip(&self.relative_errors)
            .min_by(|a, b| a.0.t.abs().partial_cmp(&b.0.t.abs()).expect("finite steps"))
            .map(|(_, &e)| e)
            .unwrap_or(T::infinity())
    }
}

/// `-Σ_i g_i μ_{F,K}({u_i})`, the derivative of `J_G` at `t = 0` along
/// `K_t = [h̄_K e^{t g}]`.
pub fn jg_derivative_exact<T: Real>(
    k: &PseudoCone<T>,
    g: &[T],
    decay: &DecayPair<T>,
    grid: &QuadratureGrid<T>,
) -> Result<T> {
    check_len(k.len(), g.len())?;
    let mu = radial_measure(k, decay, grid)?;
    let terms: Vec<T> = mu
        .atoms()
        .iter()
        .zip(g)
        .map(|(a, &gi)| gi * a.weight)
        .collect();
    Ok(-pairwise_sum(&terms))
}

/// Central differences `(J_G(K_t) - J_G(K_{-t})) / 2t` for each step,
/// compared against [`jg_derivative_exact`].
pub fn jg_derivative_fd<T: Real>(
    k: &PseudoCone<T>,
    g: &[T],
    decay: &DecayPair<T>,
    grid: &QuadratureGrid<T>,
    t_values: &[T],
) -> Result<VariationalReport<T>> {
    if t_values.is_empty() {
        return Err(Error::InvalidParameter {
            name: "t_values",
            reason: "at least one step is required".into(),
        });
    }
    if let Some(t) = t_values
        .iter()
        .find(|t| !(t.abs() <= T::one() && **t != T::zero()))
    {
        return Err(Error::InvalidParameter {
            name: "t_values",
            reason: format!("steps must satisfy 0 < |t| <= 1, got {t}"),
        });
    }
    let exact = jg_derivative_exact(k, g, decay, grid)?;

    let mut steps = t_values.to_vec();
    steps.sort_by(|a, b| b.abs().partial_cmp(&a.abs()).expect("finite steps"));

    let floor = T::lit(REL_FLOOR);
    let mut fd_estimates = Vec::with_capacity(steps.len());
    let mut relative_errors = Vec::with_capacity(steps.len());
    for &t in &steps {
        let plus = j_g(&k.perturb(g, t)?, decay, grid)?;
        let minus = j_g(&k.perturb(g, -t)?, decay, grid)?;
        let value = (plus - minus) / (t + t);
        fd_estimates.push(FdSample { t, value });
        relative_errors.push((value - exact).abs() / exact.abs().max(floor));
    }
    let observed_orders = steps
        .windows(2)
        .zip(relative_errors.windows(2))
        .map(|(t, e)| (e[0] / e[1]).log10() / (t[0] / t[1]).abs().log10())
        .collect();
    let tolerance = T::lit(DEFAULT_FD_TOL);
    let finest = *relative_errors.last().expect("nonempty");
    Ok(VariationalReport {
        exact_derivative: exact,
        fd_estimates,
        relative_errors,
        observed_orders,
        tolerance,
        converged: finest <= tolerance,
    })
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Value and log-depth gradient of `Φ` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiEval<T> {
    pub value: T,
    /// `∂Φ/∂ log h_i = -φ_i/|φ| + C̃_q([h], {u_i}) / Ṽ_q([h])`.
    pub gradient: Vec<T>,
    pub dual_volume: T,
    /// `C̃_q([h], {u_i})` per facet.
    pub curvature: Vec<T>,
    /// Smallest radial value on the grid, the grid estimate of `b([h])`.
    pub min_rho: T,
}

/// `Φ` for a fixed target measure, index, cone and grid.
///
/// The facet normals are the atoms of the target measure; the radial table
/// over the grid is built once and reused for every depth vector.
#[derive(Debug, Clone)]
pub struct PhiObjective<T> {
    cone: Cone<T>,
    normals: Vec<Vec<T>>,
    target: Vec<T>,
    target_total: T,
    q: T,
    dim: usize,
    table: RadialTable<T>,
}

impl<T: Real> PhiObjective<T> {
    pub fn new(
        cone: &Cone<T>,
        measure: &DiscreteMeasure<T>,
        q: T,
        grid: &QuadratureGrid<T>,
    ) -> Result<Self> {
        if !(q < T::zero() && q.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "q",
                reason: format!("index must be negative, got {q}"),
            });
        }
        if grid.dim() != cone.dim() {
            return Err(Error::DimensionMismatch {
                expected: cone.dim(),
                found: grid.dim(),
            });
        }
        measure.ensure_in_dual_of(cone)?;
        if let Some(i) = measure.atoms().iter().position(|a| !(a.weight > T::zero())) {
            return Err(Error::InvalidMeasure(format!(
                "atom {i} has zero weight; every target weight must be positive"
            )));
        }
        let normals = measure.normals();
        Ok(Self {
            cone: cone.clone(),
            table: RadialTable::new(grid, &normals)?,
            normals,
            target: measure.weights(),
            target_total: measure.total(),
            q,
            dim: cone.dim(),
        })
    }

    pub fn facet_count(&self) -> usize {
        self.normals.len()
    }

    pub fn q(&self) -> T {
        self.q
    }

    pub fn cone(&self) -> &Cone<T> {
        &self.cone
    }

    pub fn target_total(&self) -> T {
        self.target_total
    }

    /// The Wulff shape with the target's normals and the given depths.
    pub fn pseudocone(&self, depths: &[T]) -> Result<PseudoCone<T>> {
        check_len(self.normals.len(), depths.len())?;
        PseudoCone::wulff_shape(
            self.cone.clone(),
            self.normals
                .iter()
                .zip(depths)
                .map(|(u, &h)| Facet::new(u.clone(), h))
                .collect(),
        )
    }

    /// Evaluates at depths `h`.
    pub fn eval(&self, depths: &[T]) -> Result<PhiEval<T>> {
        check_len(self.normals.len(), depths.len())?;
        if let Some(i) = depths
            .iter()
            .position(|h| !(*h > T::zero() && h.is_finite()))
        {
            return Err(Error::InvalidParameter {
                name: "facet_depths",
                reason: format!("depth {i} must be positive and finite"),
            });
        }
        let log_depths: Vec<T> = depths.iter().map(|h| h.ln()).collect();
        Ok(self.eval_inner(depths, &log_depths))
    }

    /// Evaluates at log-depths `x = log h`.
    pub fn eval_log(&self, log_depths: &[T]) -> PhiEval<T> {
        assert_eq!(log_depths.len(), self.normals.len(), "log-depth length");
        let depths: Vec<T> = log_depths.iter().map(|x| x.exp()).collect();
        self.eval_inner(&depths, log_depths)
    }

    fn eval_inner(&self, depths: &[T], log_depths: &[T]) -> PhiEval<T> {
        let values = self.table.evaluate(depths);
        let pieces = self.table.pieces(depths, &values);
        let curvature = curvature_masses(&pieces, depths.len(), self.q, self.dim);
        let dual_volume = pairwise_sum(&curvature);
        let weighted: Vec<T> = self
            .target
            .iter()
            .zip(log_depths)
            .map(|(&w, &x)| w * x)
            .collect();
        let value = -pairwise_sum(&weighted) / self.target_total + dual_volume.ln() / self.q;
        let gradient = self
            .target
            .iter()
            .zip(&curvature)
            .map(|(&w, &c)| c / dual_volume - w / self.target_total)
            .collect();
        let min_rho = values.iter().map(|nv| nv.rho).fold(T::infinity(), T::min);
        PhiEval {
            value,
            gradient,
            dual_volume,
            curvature,
            min_rho,
        }
    }
}

/// `Φ(h)` with facet normals taken from the atoms of `measure`.
pub fn phi<T: Real>(
    facet_depths: &[T],
    measure: &DiscreteMeasure<T>,
    q: T,
    cone: &Cone<T>,
    grid: &QuadratureGrid<T>,
) -> Result<T> {
    Ok(PhiObjective::new(cone, measure, q, grid)?
        .eval(facet_depths)?
        .value)
}

/// Log-depth gradient of [`phi`].
pub fn phi_gradient<T: Real>(
    facet_depths: &[T],
    measure: &DiscreteMeasure<T>,
    q: T,
    cone: &Cone<T>,
    grid: &QuadratureGrid<T>,
) -> Result<Vec<T>> {
    Ok(PhiObjective::new(cone, measure, q, grid)?
        .eval(facet_depths)?
        .gradient)
}

/// `Φ(h̄_K)` for a pseudo-cone whose normals must coincide, in order, with
/// the atoms of `measure`.
pub fn phi_of<T: Real>(
    k: &PseudoCone<T>,
    measure: &DiscreteMeasure<T>,
    q: T,
    grid: &QuadratureGrid<T>,
) -> Result<T> {
    check_len(measure.len(), k.len())?;
    let tol = T::geom_tol();
    for (i, (f, a)) in k.facets().iter().zip(measure.atoms()).enumerate() {
        if norm(&sub(&f.normal, &a.u)) > tol {
            return Err(Error::InvalidMeasure(format!(
                "atom {i} does not match facet normal {i}"
            )));
        }
    }
    phi(&k.depths(), measure, q, k.cone(), grid)
}
