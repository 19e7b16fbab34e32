//! Discrete dual Minkowski problem for `q < 0`: given a finite measure `φ`
//! on the closed dual domain, find a pseudo-cone `K` with `C̃_q(K, ·) ≈ φ`.
//!
//! `Φ` is minimised over log-depths on the normalised slice `Ṽ_q = 1` by
//! projected gradient descent with Armijo backtracking, trying a
//! Barzilai-Borwein step first; the minimiser is then dilated so that its
//! total dual curvature equals `|φ|`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{sphere_grid, Cone, GridScheme, QuadratureGrid};
use crate::measures::{dual_curvature, DiscreteMeasure};
use crate::pseudocone::PseudoCone;
use crate::scalar::Real;
use crate::variational::{PhiEval, PhiObjective};

/// Relative allowance for grid bias when checking `b(K) <= c₂`.
pub const BOUND_ALLOWANCE: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions<T> {
    pub max_iter: usize,
    /// Stop once the infinity norm of the gradient drops to this value.
    pub grad_tol: T,
    /// Sufficient-decrease constant of the Armijo rule.
    pub armijo_c: T,
    /// Backtracking factor.
    pub shrink: T,
    /// First trial step; later iterations start from the spectral step.
    pub initial_step: T,
    /// Backtracking gives up below this step length.
    pub min_step: T,
    pub grid_resolution: usize,
    /// Defaults to [`GridScheme::default_for`] the cone's dimension.
    pub grid_scheme: Option<GridScheme>,
    pub seed: u64,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            max_iter: 10_000,
            grad_tol: T::lit(1e-6),
            armijo_c: T::lit(1e-4),
            shrink: T::lit(0.5),
            initial_step: T::one(),
            min_step: T::lit(1e-20),
            grid_resolution: 100_000,
            grid_scheme: None,
            seed: 0,
        }
    }
}

impl<T: Real> SolverOptions<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: &str| {
            Err(Error::InvalidParameter {
                name,
                reason: reason.into(),
            })
        };
        if self.max_iter == 0 {
            return bad("max_iter", "must be positive");
        }
        if !(self.grad_tol > T::zero() && self.grad_tol < T::one()) {
            return bad("grad_tol", "must lie in (0, 1)");
        }
        if !(self.armijo_c > T::zero() && self.armijo_c < T::one()) {
            return bad("armijo_c", "must lie in (0, 1)");
        }
        if !(self.shrink > T::zero() && self.shrink < T::one()) {
            return bad("shrink", "must lie in (0, 1)");
        }
        if !(self.initial_step > T::zero() && self.initial_step.is_finite()) {
            return bad("initial_step", "must be positive");
        }
        if !(self.min_step > T::zero() && self.min_step < self.initial_step) {
            return bad("min_step", "must be positive and below the initial step");
        }
        if self.grid_resolution == 0 {
            return bad("grid_resolution", "must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStatus {
    Converged,
    MaxIter,
    LineSearchFailure,
}

/// One row of the optimisation trace, recorded at each normalised iterate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow<T> {
    pub iteration: usize,
    pub phi: T,
    pub grad_norm: T,
    /// `max_i |C̃_q(λK, {u_i}) - φ_i| / |φ|` for the dilate matching `|φ|`.
    pub residual: T,
    pub step: T,
    /// Grid estimate of `b(K)` at `Ṽ_q(K) = 1`.
    pub distance: T,
    /// `Ṽ_q` of the iterate; one up to rounding.
    pub dual_volume: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverResult<T> {
    /// The final iterate dilated so that its total dual curvature is `|φ|`.
    pub solution: PseudoCone<T>,
    pub status: SolverStatus,
    pub iterations: usize,
    pub grad_norm: T,
    /// Recomputed on `solution`: `max_i |C̃_q(K̂, {u_i}) - φ_i| / |φ|`.
    pub residual: T,
    /// Total `C̃_q` mass of `solution`.
    pub solution_mass: T,
    pub phi_trace: Vec<T>,
    pub trace: Vec<TraceRow<T>>,
    /// Dilation factor applied to the normalised minimiser.
    pub lambda: T,
    /// Explicit upper bound on `b(K)` over `{Ṽ_q = 1}`.
    pub c2: T,
    /// Smallest and largest `b(K)` seen over the normalised iterates; the
    /// minimum is the empirical stand-in for the non-explicit lower bound.
    pub min_distance: T,
    pub max_distance: T,
    /// Normalised iterates with `b(K) > c₂ (1 + BOUND_ALLOWANCE)`.
    pub bound_violations: usize,
    /// Facets of `solution` that attain the radial maximum nowhere on the grid.
    pub inactive_facets: Vec<usize>,
    pub grid_nodes: usize,
}

/// The explicit constant `c₂ = (n / σ_{n-1}(Omega_C))^{1/q}` bounding the
/// distance from the origin of every pseudo-cone with `Ṽ_q = 1`.
pub fn distance_upper_bound<T: Real>(cone: &Cone<T>, q: T) -> Result<T> {
    if !(q < T::zero() && q.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "q",
            reason: format!("index must be negative, got {q}"),
        });
    }
    let n = T::from_count(cone.dim());
    Ok((n / cone.omega_area()).powf(T::one() / q))
}

/// Builds the grid from `opts` and runs [`solve_on_grid`].
pub fn solve_dual_minkowski<T: Real>(
    cone: &Cone<T>,
    target: &DiscreteMeasure<T>,
    q: T,
    opts: &SolverOptions<T>,
) -> Result<SolverResult<T>> {
    opts.validate()?;
    let scheme = opts
        .grid_scheme
        .unwrap_or_else(|| GridScheme::default_for(cone.dim()));
    let grid = sphere_grid(cone, opts.grid_resolution, scheme, opts.seed)?;
    solve_on_grid(cone, target, q, &grid, opts)
}

/// Minimises `Φ` on a given grid. Grid fields of `opts` are ignored.
pub fn solve_on_grid<T: Real>(
    cone: &Cone<T>,
    target: &DiscreteMeasure<T>,
    q: T,
    grid: &QuadratureGrid<T>,
    opts: &SolverOptions<T>,
) -> Result<SolverResult<T>> {
    opts.validate()?;
    let objective = PhiObjective::new(cone, target, q, grid)?;
    let c2 = distance_upper_bound(cone, q)?;
    let bound = c2 * (T::one() + T::lit(BOUND_ALLOWANCE));
    let m = objective.facet_count();

    // x = log h, started at h ≡ 1 and moved onto Ṽ_q = 1.
    let mut x = vec![T::zero(); m];
    let mut current = objective.eval_log(&x);
    normalize(&mut x, &current, q);
    current = objective.eval_log(&x);

    let mut trace: Vec<TraceRow<T>> = Vec::new();
    let mut step_taken = T::zero();
    let mut previous: Option<(Vec<T>, Vec<T>)> = None;
    let mut status = SolverStatus::MaxIter;
    let mut iterations = 0;
    loop {
        let direction = projected_descent(&current.gradient);
        let grad_norm = inf_norm(&current.gradient);
        trace.push(TraceRow {
            iteration: iterations,
            phi: current.value,
            grad_norm,
            residual: rescaled_residual(&current, target),
            step: step_taken,
            distance: current.min_rho,
            dual_volume: current.dual_volume,
        });
        if grad_norm <= opts.grad_tol {
            status = SolverStatus::Converged;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }

        let slope: T = direction
            .iter()
            .map(|d| *d * *d)
            .fold(T::zero(), |a, b| a + b);
        let mut step = match &previous {
            Some((px, pg)) => {
                spectral_step(&x, px, &current.gradient, pg).unwrap_or(opts.initial_step)
            }
            None => opts.initial_step,
        };
        let accepted = loop {
            let trial: Vec<T> = x
                .iter()
                .zip(&direction)
                .map(|(&xi, &di)| xi + step * di)
                .collect();
            let eval = objective.eval_log(&trial);
            if eval.value.is_finite() && eval.value <= current.value - opts.armijo_c * step * slope
            {
                break Some((trial, eval));
            }
            step = step * opts.shrink;
            if step < opts.min_step {
                break None;
            }
        };
        let Some((mut trial, eval)) = accepted else {
            status = SolverStatus::LineSearchFailure;
            break;
        };
        normalize(&mut trial, &eval, q);
        let renormalized = objective.eval_log(&trial);
        if !(renormalized.value <= current.value) {
            // The accepted decrease is below the rounding of the rescaling.
            status = SolverStatus::LineSearchFailure;
            break;
        }
        previous = Some((std::mem::replace(&mut x, trial), current.gradient.clone()));
        current = renormalized;
        step_taken = step;
        iterations += 1;
    }

    finish(
        &objective, target, q, grid, x, current, status, iterations, trace, c2, bound,
    )
}

#[allow(clippy::too_many_arguments)]
fn finish<T: Real>(
    objective: &PhiObjective<T>,
    target: &DiscreteMeasure<T>,
    q: T,
    grid: &QuadratureGrid<T>,
    x: Vec<T>,
    current: PhiEval<T>,
    status: SolverStatus,
    iterations: usize,
    trace: Vec<TraceRow<T>>,
    c2: T,
    bound: T,
) -> Result<SolverResult<T>> {
    let depths: Vec<T> = x.iter().map(|v| v.exp()).collect();
    let normalized = objective.pseudocone(&depths)?;
    let lambda = (target.total() / current.dual_volume).powf(T::one() / q);
    let solution = normalized.scale(lambda)?;

    let achieved = dual_curvature(&solution, q, grid)?;
    let residual = achieved
        .atoms()
        .iter()
        .zip(target.atoms())
        .map(|(a, b)| (a.weight - b.weight).abs())
        .fold(T::zero(), T::max)
        / target.total();
    let inactive_facets = solution.inactive_facets(grid)?;

    let min_distance = trace.iter().map(|r| r.distance).fold(T::infinity(), T::min);
    let max_distance = trace
        .iter()
        .map(|r| r.distance)
        .fold(T::neg_infinity(), T::max);
    let bound_violations = trace.iter().filter(|r| r.distance > bound).count();
    let phi_trace = trace.iter().map(|r| r.phi).collect();

    Ok(SolverResult {
        solution,
        status,
        iterations,
        grad_norm: inf_norm(&current.gradient),
        residual,
        solution_mass: achieved.total(),
        phi_trace,
        trace,
        lambda,
        c2,
        min_distance,
        max_distance,
        bound_violations,
        inactive_facets,
        grid_nodes: grid.len(),
    })
}

/// Shifts log-depths so that `Ṽ_q = 1`, using `Ṽ_q(λK) = λ^q Ṽ_q(K)`.
fn normalize<T: Real>(x: &mut [T], eval: &PhiEval<T>, q: T) {
    let shift = -eval.dual_volume.ln() / q;
    for xi in x.iter_mut() {
        *xi = *xi + shift;
    }
}

/// Barzilai-Borwein step `<s, y> / <y, y>` from the last move, measured on
/// the zero-sum subspace. `None` when the curvature estimate is unusable.
fn spectral_step<T: Real>(x: &[T], prev_x: &[T], g: &[T], prev_g: &[T]) -> Option<T> {
    let s: Vec<T> = x.iter().zip(prev_x).map(|(&a, &b)| a - b).collect();
    let s = projected_descent(&s);
    let y: Vec<T> = g.iter().zip(prev_g).map(|(&a, &b)| a - b).collect();
    // projected_descent negates, so flip the sign of <s, y>
    let sy = -s
        .iter()
        .zip(&y)
        .fold(T::zero(), |acc, (&a, &b)| acc + a * b);
    let yy = y.iter().fold(T::zero(), |acc, &b| acc + b * b);
    let step = sy / yy;
    (sy > T::zero() && step.is_finite()).then_some(step)
}

/// Negative gradient with its mean removed (the scaling direction is flat).
fn projected_descent<T: Real>(gradient: &[T]) -> Vec<T> {
    let mean = gradient.iter().fold(T::zero(), |a, &b| a + b) / T::from_count(gradient.len());
    gradient.iter().map(|&g| mean - g).collect()
}

/// Residual of the dilate with total mass `|φ|`, from the curvature of the
/// current iterate. Algebraically this equals the gradient's infinity norm.
fn rescaled_residual<T: Real>(eval: &PhiEval<T>, target: &DiscreteMeasure<T>) -> T {
    let total = target.total();
    let factor = total / eval.dual_volume;
    eval.curvature
        .iter()
        .zip(target.atoms())
        .map(|(&c, a)| (c * factor - a.weight).abs())
        .fold(T::zero(), T::max)
        / total
}

fn inf_norm<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |a, &b| a.max(b.abs()))
}
