//! Invariants that need no reference numbers.

use minsurf::chebyshev::{cheb_eval, cheb_fit, cheb_zeros, fd_derivatives, grid_derivatives, DerivativeField};
use minsurf::geometry::{
    bilinear_height_grid, bilinear_mean_curvature, make_quad, mean_curvature_numeric, GraphFrame,
    QuadConfig,
};
use minsurf::schwarz::{
    boundary_point, isotropy_residual, weierstrass_integrals, weierstrass_integrals_via,
    weierstrass_integrand, Piece, DEFAULT_CLEARANCE,
};
use minsurf::solver::{solve_detailed, SolverConfig};
use minsurf::HeightGrid;
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn discrete_orthogonality_of_chebyshev_nodes() {
    for n in [4usize, 9, 20, 40] {
        let nodes = cheb_zeros(n + 1).unwrap();
        for i in 0..=n {
            for j in 0..=n {
                let s: f64 = nodes
                    .iter()
                    .map(|&x| cheb_eval(i, x).unwrap() * cheb_eval(j, x).unwrap())
                    .sum();
                let want = match (i, j) {
                    (0, 0) => (n + 1) as f64,
                    _ if i == j => (n + 1) as f64 / 2.0,
                    _ => 0.0,
                };
                assert!((s - want).abs() < 1e-10, "n={n} i={i} j={j}: {s}");
            }
        }
    }
}

fn max_interior_error(g: &HeightGrid, d: &DerivativeField, exact: &dyn Fn(f64, f64) -> [f64; 5]) -> f64 {
    let n = g.n();
    let mut worst = 0.0f64;
    // one node away from the edges, where one-sided stencils take over
    for i in 1..n {
        for j in 1..n {
            let (x, y) = g.base_point(i, j);
            let k = d.index(i, j);
            let got = [d.zx[k], d.zy[k], d.zxx[k], d.zyy[k], d.zxy[k]];
            for (a, b) in got.iter().zip(exact(x, y)) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    worst
}

#[test]
fn derivative_pipelines_converge_at_second_order() {
    let f = |x: f64, y: f64| (1.3 * x).sin() * (0.7 * y).cos() + 0.2 * x * y;
    let exact = |x: f64, y: f64| {
        let (sx, cx) = (1.3 * x).sin_cos();
        let (sy, cy) = (0.7 * y).sin_cos();
        [
            1.3 * cx * cy + 0.2 * y,
            -0.7 * sx * sy + 0.2 * x,
            -1.69 * sx * cy,
            -0.49 * sx * cy,
            -0.91 * cx * sy + 0.2,
        ]
    };
    let frame = GraphFrame::xy(2.0, 1.5);
    for (name, pipeline) in [
        ("chebyshev", grid_derivatives as fn(&HeightGrid) -> minsurf::Result<DerivativeField>),
        ("finite-difference", fd_derivatives as fn(&HeightGrid) -> minsurf::Result<DerivativeField>),
    ] {
        let errs: Vec<f64> = [16usize, 32, 64]
            .iter()
            .map(|&n| {
                let g = HeightGrid::from_fn(n, frame, f).unwrap();
                max_interior_error(&g, &pipeline(&g).unwrap(), &exact)
            })
            .collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 1.8, "{name}: errors {errs:?}, order {order}");
        }
    }
}

#[test]
fn solver_keeps_boundary_bitwise_and_ruled2_symmetry() {
    for config in [QuadConfig::Ruled1, QuadConfig::Ruled2] {
        for (r, d) in [(1.0, 1.0), (2.0, 1.0), (1.0, 3.0)] {
            let q = make_quad(config, r, d).unwrap();
            let seed = bilinear_height_grid(&q, 24).unwrap();
            let s = solve_detailed(&q, 24, &SolverConfig::default()).unwrap();
            assert!(s.grid.same_boundary(&seed), "{config} ({r},{d})");
            if config == QuadConfig::Ruled2 {
                let n = 24;
                for i in 0..=n {
                    for j in 0..=n {
                        let sum = s.grid.get(i, j) + s.grid.get(n - i, j);
                        assert!((sum - d).abs() <= 1e-6 * d, "({r},{d}) at ({i},{j}): {sum}");
                    }
                }
            }
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    #[test]
    fn polynomials_up_to_degree_n_are_reproduced(
        coeffs in prop::collection::vec(-2.0f64..2.0, 1..24),
        x in -1.0f64..1.0,
    ) {
        let m = coeffs.len();
        let p = |t: f64| coeffs.iter().rev().fold(0.0, |acc, a| acc * t + a);
        let values: Vec<f64> = cheb_zeros(m).unwrap().iter().map(|&t| p(t)).collect();
        let series = cheb_fit(&values).unwrap();
        prop_assert!((series.interp(x).unwrap() - p(x)).abs() < 1e-10 * (1.0 + p(x).abs()) * m as f64);
    }

    #[test]
    fn isotropy_holds_everywhere(re in -3.0f64..3.0, im in -3.0f64..3.0) {
        if let Ok(phi) = weierstrass_integrand(c(re, im)) {
            prop_assert!(isotropy_residual(&phi) <= 1e-10);
        }
    }

    #[test]
    fn contour_integrals_are_path_independent(
        alpha in 0.05f64..3.09,
        frac in 0.05f64..0.9,
        bend in 0.05f64..0.95,
        lift in -0.1f64..0.1,
    ) {
        let piece = if alpha > std::f64::consts::FRAC_PI_2 { Piece::FrontRight } else { Piece::FrontLeft };
        let target = boundary_point(alpha, piece).unwrap() * frac;
        // waypoint off the straight segment, still well inside the domain
        let via = target * bend + target * c(0.0, lift);
        let direct = weierstrass_integrals(target, DEFAULT_CLEARANCE).unwrap();
        let bent = weierstrass_integrals_via(&[via], target, DEFAULT_CLEARANCE).unwrap();
        for k in 0..3 {
            prop_assert!((direct.value[k] - bent.value[k]).norm() <= 1e-8);
        }
    }

    #[test]
    fn closed_form_curvature_matches_oracle(
        r in 0.3f64..3.0,
        d in 0.3f64..3.0,
        u in 0.05f64..0.95,
        v in 0.05f64..0.95,
        ruled1 in any::<bool>(),
    ) {
        let config = if ruled1 { QuadConfig::Ruled1 } else { QuadConfig::Ruled2 };
        let q = make_quad(config, r, d).unwrap();
        let exact = bilinear_mean_curvature(&q, u, v).unwrap();
        let numeric = mean_curvature_numeric(|a, b| q.eval_unchecked(a, b), u, v, 1e-3).unwrap();
        prop_assert!((exact - numeric).abs() <= 1e-6 * exact.abs().max(1e-3), "{} vs {}", exact, numeric);
    }
}
