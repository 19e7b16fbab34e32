mod common;

use std::sync::LazyLock;

use proptest::prelude::*;
use pseudocone::fixtures::{random_coefficients, random_dual_normal, random_pseudocone};
use pseudocone::{
    distance_upper_bound, dual_curvature, dual_volume, jg_derivative_fd, radial_measure,
    sphere_grid, Atom, Cone64, DecayPair64, DiscreteMeasure64, Facet, GridScheme, PhiObjective,
    PseudoCone64, QuadratureGrid64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{dot, octant, quadrant, support_oracle};

static QUADRANT_GRID: LazyLock<QuadratureGrid64> =
    LazyLock::new(|| sphere_grid(&quadrant(), 20_000, GridScheme::Midpoint, 0).unwrap());
static OCTANT_GRID: LazyLock<QuadratureGrid64> =
    LazyLock::new(|| sphere_grid(&octant(), 20_000, GridScheme::Fibonacci, 0).unwrap());

fn setting(planar: bool) -> (Cone64, &'static QuadratureGrid64) {
    if planar {
        (quadrant(), &QUADRANT_GRID)
    } else {
        (octant(), &OCTANT_GRID)
    }
}

fn instance(seed: u64, planar: bool, m: usize) -> (PseudoCone64, ChaCha8Rng) {
    let (cone, _) = setting(planar);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = random_pseudocone(&cone, m, &mut rng).unwrap();
    (k, rng)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// A pointed cone spanned by random directions in the positive orthant.
fn random_cone(rng: &mut ChaCha8Rng, dim: usize) -> pseudocone::Result<Cone64> {
    let count = if dim == 2 { 2 } else { rng.random_range(3..=5) };
    let gens = (0..count)
        .map(|_| {
            let v: Vec<f64> = (0..dim).map(|_| rng.random_range(0.05..1.0)).collect();
            let r = dot(&v, &v).sqrt();
            v.iter().map(|x| x / r).collect()
        })
        .collect();
    Cone64::polyhedral(gens)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bipolar_membership(seed in any::<u64>(), planar in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = if planar { 2 } else { 3 };
        let cone = random_cone(&mut rng, dim);
        prop_assume!(cone.is_ok());
        let cone = cone.unwrap();
        let dual = cone.dual();
        for _ in 0..200 {
            let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let by_dual = dual.extreme_rays().unwrap().iter().map(|y| dot(&x, y)).fold(f64::MIN, f64::max);
            let by_primal = cone.extreme_rays().unwrap().iter().map(|y| dot(&x, y)).fold(f64::MIN, f64::max);
            if by_dual.abs() > 1e-9 {
                prop_assert_eq!(cone.contains(&x, false), by_dual <= 0.0);
            }
            if by_primal.abs() > 1e-9 {
                prop_assert_eq!(dual.contains(&x, false), by_primal <= 0.0);
            }
        }
    }

    #[test]
    fn grid_nodes_are_interior(seed in any::<u64>(), dim in 2usize..=4, angle in 0.2f64..1.4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let axis: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = dot(&axis, &axis).sqrt();
        prop_assume!(r > 0.1);
        let axis: Vec<f64> = axis.iter().map(|a| a / r).collect();
        let cone = Cone64::circular(axis, angle).unwrap();
        let grid = sphere_grid(&cone, 2000, GridScheme::default_for(dim), seed).unwrap();
        prop_assert!(grid.nodes().all(|v| cone.contains(v, true)));
        prop_assert!(rel(grid.weight_sum(), cone.omega_area()) < 1e-12);
    }

    #[test]
    fn radial_dominates_every_facet(seed in any::<u64>(), planar in any::<bool>(), m in 1usize..7) {
        let (k, _) = instance(seed, planar, m);
        let (_, grid) = setting(planar);
        let values = k.evaluate_on(grid).unwrap();
        for (v, nv) in grid.nodes().zip(&values) {
            for (i, f) in k.facets().iter().enumerate() {
                let term = f.depth / dot(v, &f.normal).abs();
                prop_assert!(nv.rho >= term * (1.0 - 1e-15));
                if i == nv.facet {
                    prop_assert!(rel(term, nv.rho) < 1e-15);
                }
            }
        }
    }

    #[test]
    fn adding_a_facet_never_lowers_rho(seed in any::<u64>(), planar in any::<bool>(), m in 1usize..6) {
        let (k, mut rng) = instance(seed, planar, m);
        let (cone, grid) = setting(planar);
        let u = random_dual_normal(&cone, &mut rng);
        prop_assume!(k.facets().iter().all(|f| dot(&f.normal, &u) < 1.0 - 1e-9));
        let mut facets = k.facets().to_vec();
        facets.push(Facet::new(u, rng.random_range(0.5..2.0)));
        let bigger = PseudoCone64::wulff_shape(cone, facets).unwrap();
        let a = k.evaluate_on(grid).unwrap();
        let b = bigger.evaluate_on(grid).unwrap();
        prop_assert!(a.iter().zip(&b).all(|(x, y)| y.rho >= x.rho));
    }

    #[test]
    fn log_radial_derivative_is_g_of_gauss(seed in any::<u64>(), planar in any::<bool>(), m in 2usize..7) {
        let (k, mut rng) = instance(seed, planar, m);
        let (_, grid) = setting(planar);
        let g: Vec<f64> = random_coefficients(m, &mut rng);
        let node = rng.random_range(0..grid.len());
        let v = grid.node(node);
        let mut terms: Vec<f64> = k.facets().iter().map(|f| f.depth / dot(v, &f.normal).abs()).collect();
        let top = k.radial_gauss(v, 0.0).unwrap().index;
        terms.sort_by(|a, b| b.total_cmp(a));
        prop_assume!(terms.len() < 2 || terms[1] < terms[0] * (1.0 - 1e-2));
        let base = k.radial(v).unwrap().ln();
        for t in [1e-3, 1e-4, 1e-5] {
            let moved = k.perturb(&g, t).unwrap().radial(v).unwrap().ln();
            let err = ((moved - base) / t - g[top]).abs();
            prop_assert!(err <= t && err < 1e-8, "t = {t}: error {err}");
        }
    }

    #[test]
    fn measures_scale_by_lambda_to_the_q(
        seed in any::<u64>(),
        planar in any::<bool>(),
        m in 1usize..7,
        q in -3.0f64..-0.1,
        lambda in 0.1f64..10.0,
    ) {
        let (k, _) = instance(seed, planar, m);
        let (_, grid) = setting(planar);
        let scaled = k.scale(lambda).unwrap();
        let factor = lambda.powf(q);
        let v = dual_volume(&k, q, grid).unwrap();
        prop_assert!(rel(dual_volume(&scaled, q, grid).unwrap(), factor * v) < 1e-12);
        let decay = DecayPair64::power(q).unwrap();
        let c = dual_curvature(&k, q, grid).unwrap();
        let cs = dual_curvature(&scaled, q, grid).unwrap();
        let mu = radial_measure(&k, &decay, grid).unwrap();
        let mus = radial_measure(&scaled, &decay, grid).unwrap();
        for i in 0..m {
            prop_assert!((cs.atoms()[i].weight - factor * c.atoms()[i].weight).abs() <= 1e-12 * factor * v);
            prop_assert!((mus.atoms()[i].weight - factor * mu.atoms()[i].weight).abs() <= 1e-12 * factor * mu.total());
        }
    }

    #[test]
    fn mass_conservation(seed in any::<u64>(), planar in any::<bool>(), m in 1usize..7, q in -3.0f64..-0.1) {
        let (k, _) = instance(seed, planar, m);
        let (_, grid) = setting(planar);
        prop_assert_eq!(dual_curvature(&k, q, grid).unwrap().total(), dual_volume(&k, q, grid).unwrap());
        let decay = DecayPair64::exponential();
        let mu = radial_measure(&k, &decay, grid).unwrap();
        let direct: f64 = k.pieces_on(grid).unwrap().iter().map(|p| p.weight * decay.f(p.rho)).sum();
        prop_assert!(rel(mu.total(), direct) < 1e-12);
    }

    #[test]
    fn integral_transform_identity(seed in any::<u64>(), planar in any::<bool>(), m in 1usize..7, q in -3.0f64..-0.1) {
        let (k, mut rng) = instance(seed, planar, m);
        let (_, grid) = setting(planar);
        let g: Vec<f64> = random_coefficients(m, &mut rng);
        let c = dual_curvature(&k, q, grid).unwrap();
        let lhs: f64 = c.atoms().iter().zip(&g).map(|(a, gi)| gi * a.weight).sum();
        let n = k.dim() as f64;
        let rhs: f64 = k
            .pieces_on(grid)
            .unwrap()
            .iter()
            .map(|p| p.weight * g[p.facet] * p.rho.powf(q) / n)
            .sum();
        let scale: f64 = c.total();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
    }

    #[test]
    fn pieces_partition_each_cell(seed in any::<u64>(), m in 1usize..7) {
        let (k, _) = instance(seed, true, m);
        let grid = &*QUADRANT_GRID;
        let mut per_node = vec![0.0; grid.len()];
        for p in k.pieces_on(grid).unwrap() {
            per_node[p.node] += p.weight;
        }
        for (s, w) in per_node.iter().zip(grid.weights()) {
            prop_assert!(rel(*s, *w) < 1e-12);
        }
    }

    #[test]
    fn tie_rule_changes_little(seed in any::<u64>(), m in 2usize..7, q in -3.0f64..-0.1) {
        // Largest-index tie breaking, evaluated independently node by node.
        let (k, _) = instance(seed, false, m);
        let grid = &*OCTANT_GRID;
        let mut mass = vec![0.0; m];
        let mut tied = 0.0;
        for (v, &w) in grid.nodes().zip(grid.weights()) {
            let terms: Vec<f64> = k.facets().iter().map(|f| f.depth / dot(v, &f.normal).abs()).collect();
            let best = terms.iter().cloned().fold(f64::MIN, f64::max);
            let last = terms.iter().rposition(|&t| t == best).unwrap();
            if terms.iter().filter(|&&t| t >= best * (1.0 - 1e-12)).count() > 1 {
                tied += w * best.powf(q) / 3.0;
            }
            mass[last] += w * best.powf(q) / 3.0;
        }
        let c = dual_curvature(&k, q, grid).unwrap();
        prop_assert!(tied < 1e-6 * c.total());
        for (a, b) in c.atoms().iter().zip(&mass) {
            prop_assert!((a.weight - b).abs() <= tied + 1e-12 * c.total());
        }
    }

    #[test]
    fn phi_scale_invariance_and_gradient_sum(seed in any::<u64>(), planar in any::<bool>(), m in 1usize..7, q in -3.0f64..-0.1) {
        let (k, mut rng) = instance(seed, planar, m);
        let (cone, grid) = setting(planar);
        let target = DiscreteMeasure64::new(
            k.normals().into_iter().map(|u| Atom::new(u, rng.random_range(0.05..2.0))).collect(),
        ).unwrap();
        let objective = PhiObjective::new(&cone, &target, q, grid).unwrap();
        let base = objective.eval(&k.depths()).unwrap();
        for lambda in [0.5, 2.0, 10.0] {
            let h: Vec<f64> = k.depths().iter().map(|h| h * lambda).collect();
            prop_assert!((objective.eval(&h).unwrap().value - base.value).abs() < 1e-10);
        }
        prop_assert!(base.gradient.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn phi_bounded_below_on_unit_dual_volume(seed in any::<u64>(), planar in any::<bool>(), m in 1usize..7, q in -3.0f64..-0.1) {
        let (k, mut rng) = instance(seed, planar, m);
        let (cone, grid) = setting(planar);
        let k = k.scale(dual_volume(&k, q, grid).unwrap().powf(-1.0 / q)).unwrap();
        prop_assert!((dual_volume(&k, q, grid).unwrap() - 1.0).abs() < 1e-12);
        let target = DiscreteMeasure64::new(
            k.normals().into_iter().map(|u| Atom::new(u, rng.random_range(0.05..2.0))).collect(),
        ).unwrap();
        let objective = PhiObjective::new(&cone, &target, q, grid).unwrap();
        let c2 = distance_upper_bound(&cone, q).unwrap();
        let value = objective.eval(&k.depths()).unwrap().value;
        prop_assert!(value >= -(c2 * (1.0 + 1e-2)).ln(), "{value} vs {}", -c2.ln());
    }

    #[test]
    fn depths_never_exceed_support(seed in any::<u64>(), planar in any::<bool>(), m in 1usize..6) {
        let (k, _) = instance(seed, planar, m);
        let (_, grid) = setting(planar);
        for f in k.facets() {
            let exact = support_oracle(&k, &f.normal);
            prop_assert!(f.depth <= exact * (1.0 + 1e-12));
            prop_assert!(k.support(&f.normal, grid).unwrap() >= exact * (1.0 - 1e-12));
        }
    }

    #[test]
    fn planar_fd_identity(seed in any::<u64>(), m in 2usize..7, kind in 0usize..3) {
        let (k, mut rng) = instance(seed, true, m);
        let g: Vec<f64> = random_coefficients(m, &mut rng);
        let decay = match kind {
            0 => DecayPair64::power(-1.0).unwrap(),
            1 => DecayPair64::power(-0.5).unwrap(),
            _ => DecayPair64::exponential(),
        };
        let r = jg_derivative_fd(&k, &g, &decay, &QUADRANT_GRID, &[1e-3, 1e-4, 1e-5]).unwrap();
        prop_assert!(r.converged, "{r:?}");
    }
}
