mod common;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use approx::assert_relative_eq;
use pseudocone::fixtures::random_pseudocone;
use pseudocone::{
    dual_curvature, dual_volume, j_g, jg_derivative_exact, phi, radial_measure, sphere_grid, Atom,
    Cone64, DecayPair64, DiscreteMeasure64, Facet, GridScheme, PseudoCone64,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{half_plane, octant, quadrant, radial_oracle, shifted_quadrant, simpson};

fn planar(n: usize) -> pseudocone::QuadratureGrid64 {
    sphere_grid(&quadrant(), n, GridScheme::Midpoint, 0).unwrap()
}

/// `∫_0^{π/2} f(rho(θ)) dθ` by Simpson on the definition of `rho`.
fn planar_oracle(k: &PseudoCone64, f: impl Fn(f64) -> f64) -> f64 {
    let normals = k.normals();
    let depths = k.depths();
    // The integrand is only continuous at ties; a fine rule keeps the kink
    // error far below the tolerances used here.
    simpson(
        |t| f(radial_oracle(&normals, &depths, &[t.cos(), t.sin()])),
        0.0,
        FRAC_PI_2,
        2_000_000,
    )
}

#[test]
fn half_plane_j_g_and_dual_volume() {
    let grid = planar(100_000);
    let k = half_plane();
    let inverse = DecayPair64::power(-1.0).unwrap();
    assert!((j_g(&k, &inverse, &grid).unwrap() - SQRT_2).abs() < 1e-4);
    assert!((dual_volume(&k, -1.0, &grid).unwrap() - FRAC_1_SQRT_2).abs() < 1e-4);
    let c = dual_curvature(&k, -1.0, &grid).unwrap();
    assert_eq!(c.len(), 1);
    assert!((c.total() - FRAC_1_SQRT_2).abs() < 1e-4);
}

#[test]
fn shifted_quadrant_j_g_and_dual_volume() {
    let grid = planar(100_000);
    let k = shifted_quadrant(1.0);
    let inverse = DecayPair64::power(-1.0).unwrap();
    assert!((j_g(&k, &inverse, &grid).unwrap() - (2.0 - SQRT_2)).abs() < 1e-4);
    assert!((dual_volume(&k, -1.0, &grid).unwrap() - (1.0 - SQRT_2 / 2.0)).abs() < 1e-4);
}

#[test]
fn shifted_quadrant_mass_splits_evenly() {
    let grid = planar(100_000);
    let k = shifted_quadrant(1.0);
    let mu = radial_measure(&k, &DecayPair64::power(-1.0).unwrap(), &grid).unwrap();
    let half = (2.0 - SQRT_2) / 2.0;
    for a in mu.atoms() {
        assert!((a.weight - half).abs() < 1e-4);
    }
    assert!((mu.atoms()[0].weight - mu.atoms()[1].weight).abs() < 1e-12);
}

#[test]
fn half_plane_phi_value() {
    let grid = planar(100_000);
    let target =
        DiscreteMeasure64::new(vec![Atom::new(vec![-FRAC_1_SQRT_2, -FRAC_1_SQRT_2], 1.0)]).unwrap();
    let value = phi(&[1.0], &target, -1.0, &quadrant(), &grid).unwrap();
    assert!((value - 0.5 * 2f64.ln()).abs() < 1e-4);
}

#[test]
fn constant_perturbation_derivative() {
    // g ≡ 1 gives -Σ μ_i = -n |q| Ṽ_q.
    let grid = planar(100_000);
    let k = half_plane();
    let d = jg_derivative_exact(&k, &[1.0], &DecayPair64::power(-1.0).unwrap(), &grid).unwrap();
    assert!((d + SQRT_2).abs() < 1e-4);

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let k = random_pseudocone(&quadrant(), 5, &mut rng).unwrap();
    let q = -0.7;
    let d = jg_derivative_exact(&k, &[1.0; 5], &DecayPair64::power(q).unwrap(), &grid).unwrap();
    let v = dual_volume(&k, q, &grid).unwrap();
    assert_relative_eq!(d, -2.0 * q.abs() * v, max_relative = 1e-12);
}

#[test]
fn random_planar_integrals_match_simpson() {
    let grid = planar(100_000);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for m in [1, 3, 6] {
        let k = random_pseudocone(&quadrant(), m, &mut rng).unwrap();
        for q in [-1.0, -0.5, -3.0] {
            let expected = planar_oracle(&k, |r| r.powf(q)) / 2.0;
            assert_relative_eq!(
                dual_volume(&k, q, &grid).unwrap(),
                expected,
                max_relative = 1e-7
            );
        }
        let expected = planar_oracle(&k, |r| (-r).exp());
        assert_relative_eq!(
            j_g(&k, &DecayPair64::exponential(), &grid).unwrap(),
            expected,
            max_relative = 1e-7
        );
    }
}

#[test]
fn per_facet_masses_match_simpson_between_ties() {
    // C+(s,s): the facet with normal -e2 owns (0, π/4) where rho = s / sin θ.
    let grid = planar(100_000);
    let s = 0.8;
    let k = shifted_quadrant(s);
    let c = dual_curvature(&k, -2.0, &grid).unwrap();
    let expected = simpson(|t| (t.sin() / s).powi(2), 0.0, FRAC_PI_4, 10_000) / 2.0;
    for a in c.atoms() {
        assert_relative_eq!(a.weight, expected, max_relative = 1e-8);
    }
}

#[test]
fn octant_half_space_dual_volume() {
    // K = {y in octant : y1 + y2 + y3 >= sqrt 3}; rho^{-1}(v) = <v, 1> / sqrt 3
    // and ∫ over the octant of each coordinate is π/4.
    let s = 1.0 / 3f64.sqrt();
    let k = PseudoCone64::wulff_shape(octant(), vec![Facet::new(vec![-s, -s, -s], 1.0)]).unwrap();
    let expected = PI / (4.0 * 3f64.sqrt());
    // independent check of the closed form in spherical coordinates
    let oracle = simpson(
        |phi| {
            simpson(
                |theta| {
                    let v = [
                        theta.sin() * phi.cos(),
                        theta.sin() * phi.sin(),
                        theta.cos(),
                    ];
                    (v[0] + v[1] + v[2]) * s * theta.sin()
                },
                0.0,
                FRAC_PI_2,
                400,
            )
        },
        0.0,
        FRAC_PI_2,
        400,
    ) / 3.0;
    assert_relative_eq!(oracle, expected, max_relative = 1e-10);

    let grid = sphere_grid(&octant(), 200_000, GridScheme::Fibonacci, 0).unwrap();
    let v = dual_volume(&k, -1.0, &grid).unwrap();
    assert!((v - expected).abs() < 2e-3, "{v} vs {expected}");
}

#[test]
fn circular_cone_dual_volume() {
    // Half-angle β around the y axis, one facet along the axis at depth 1:
    // Ṽ_{-1} = (1/2) ∫_{-β}^{β} cos t dt = sin β.
    let beta = 0.6;
    let cone = Cone64::circular(vec![0.0, 1.0], beta).unwrap();
    let k =
        PseudoCone64::wulff_shape(cone.clone(), vec![Facet::new(vec![0.0, -1.0], 1.0)]).unwrap();
    let grid = sphere_grid(&cone, 50_000, GridScheme::Midpoint, 0).unwrap();
    assert!((dual_volume(&k, -1.0, &grid).unwrap() - beta.sin()).abs() < 1e-8);
}
