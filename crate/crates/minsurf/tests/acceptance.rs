//! Acceptance run: one PASS/FAIL line per criterion, at full tolerance.
//! Exits with status 1 when any criterion fails.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use common::TABLE;
use minsurf::area::{
    area_biquadratic, area_gradient_sum_with, area_param_numeric, area_triangulation, ruled1_area,
    ruled2_area, GradientRule,
};
use minsurf::chebyshev::{cheb_eval, cheb_fit, cheb_zeros, fd_derivatives, grid_derivatives};
use minsurf::geometry::{
    bilinear_height_grid, bilinear_mean_curvature, make_quad, mean_curvature_numeric, GraphFrame,
    QuadConfig,
};
use minsurf::schwarz::{
    boundary_point, compute_kappa, distance_to_boundary, isotropy_residual, schwarz_mesh,
    weierstrass_integrals, weierstrass_integrals_via, weierstrass_integrand, Piece,
    CORNER_HEIGHT, DEFAULT_CLEARANCE,
};
use minsurf::solver::{solve_detailed, solve_many, SolverConfig};
use minsurf::{Execution, HeightGrid, Result};
use num_complex::Complex64;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

fn within(x: f64, want: f64, tol: f64) -> bool {
    (x - want).abs() <= tol
}

fn closed_form_areas() -> Result<Outcome> {
    let mut bad = Vec::new();
    for row in &TABLE {
        let a1 = ruled1_area(row.r, row.d)?;
        let a2 = ruled2_area(row.r, row.d)?;
        if !within(a1, row.ruled1, 1e-6) {
            bad.push(format!("ruled1({},{})={a1:.9} vs {}", row.r, row.d, row.ruled1));
        }
        if !within(a2, row.ruled2, 1e-6) {
            bad.push(format!("ruled2({},{})={a2:.9} vs {}", row.r, row.d, row.ruled2));
        }
    }
    Ok(Outcome::new(
        bad.is_empty(),
        if bad.is_empty() { "14/14 within 1e-6".to_string() } else { bad.join("; ") },
    ))
}

fn estimator_calibration() -> Result<Outcome> {
    let q = make_quad(QuadConfig::Ruled2, 1.0, 1.0)?;
    let g = bilinear_height_grid(&q, 30)?;
    let d = grid_derivatives(&g)?;
    let sum = area_gradient_sum_with(&g, &d, GradientRule::CellCenter)?;
    let interior = area_gradient_sum_with(&g, &d, GradientRule::InteriorNodes)?;
    let tri = area_triangulation(&g);
    let biq = area_biquadratic(&g, 1e-10)?;
    let t40 = area_triangulation(&bilinear_height_grid(&q, 40)?);
    let t20 = area_triangulation(&bilinear_height_grid(&q, 20)?);
    let checks = [
        within(sum, 1.2717, 5e-4),
        within(tri, 1.281277, 1e-5),
        within(biq, 1.280789195, 1e-6),
        within(t40, 1.2811, 1e-4),
        within(t20, 1.2819, 1e-4),
    ];
    Ok(Outcome::new(
        checks.iter().all(|&c| c),
        format!(
            "gradient sum {sum:.6} (interior-node rule {interior:.6}) vs 1.2717; \
             triangulation {tri:.7}; biquadratic {biq:.9}; N=40 {t40:.5}; N=20 {t20:.5}"
        ),
    ))
}

fn table_reproduction() -> Result<Outcome> {
    let quads = TABLE
        .iter()
        .map(|row| make_quad(QuadConfig::Ruled2, row.r, row.d))
        .collect::<Result<Vec<_>>>()?;
    let solutions = solve_many(&quads, 40, &SolverConfig::default(), Execution::default());
    let mut pass = true;
    let mut parts = Vec::new();
    for (row, s) in TABLE.iter().zip(solutions) {
        let s = s?;
        let a = area_biquadratic(&s.grid, 1e-9)?;
        let ok = within(a, row.numerical, 2e-3)
            && a <= ruled2_area(row.r, row.d)?
            && s.report.status.is_converged();
        pass &= ok;
        parts.push(format!(
            "({},{}) {a:.4}{} {}",
            row.r,
            row.d,
            if ok { "" } else { "!" },
            s.report.status.label()
        ));
    }
    Ok(Outcome::new(pass, parts.join(", ")))
}

fn schwarz_constants() -> Result<Outcome> {
    let k = compute_kappa()?;
    Ok(Outcome::new(
        within(k.edge_integral.abs(), 0.47196, 1e-5) && within(k.kappa, 0.37456, 1e-5),
        format!("|edge integral| {:.6}, kappa {:.6}", k.edge_integral.abs(), k.kappa),
    ))
}

fn schwarz_geometry() -> Result<Outcome> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut worst_rim = 0.0f64;
    for piece in [Piece::FrontRight, Piece::FrontLeft] {
        let patch = schwarz_mesh(piece, 32, 32, DEFAULT_CLEARANCE, Execution::default())?;
        let (a, b) = patch.z_range();
        lo = lo.min(a);
        hi = hi.max(b);
        worst_rim = patch.rim().map(distance_to_boundary).fold(worst_rim, f64::max);
    }
    Ok(Outcome::new(
        within(lo, -CORNER_HEIGHT, 2e-3) && within(hi, CORNER_HEIGHT, 2e-3) && worst_rim < 2e-3,
        format!("z in [{lo:.6}, {hi:.6}], rim distance to edges <= {worst_rim:.2e}"),
    ))
}

fn property_suites() -> Result<Outcome> {
    let mut failures = Vec::new();

    // discrete orthogonality and exactness up to degree N
    let mut ortho = 0.0f64;
    for n in [8usize, 20, 40] {
        let nodes = cheb_zeros(n + 1)?;
        for i in 0..=n {
            for j in 0..=n {
                let mut s = 0.0;
                for &x in &nodes {
                    s += cheb_eval(i, x)? * cheb_eval(j, x)?;
                }
                let want = if i != j { 0.0 } else if i == 0 { (n + 1) as f64 } else { (n + 1) as f64 / 2.0 };
                ortho = ortho.max((s - want).abs());
            }
        }
        let p = |t: f64| (0..=n).fold(0.0, |acc, k| acc * t + 1.0 / (k + 1) as f64);
        let series = cheb_fit(&nodes.iter().map(|&t| p(t)).collect::<Vec<_>>())?;
        for k in 0..=50 {
            let x = -1.0 + k as f64 / 25.0;
            ortho = ortho.max((series.interp(x)? - p(x)).abs());
        }
    }
    if ortho > 1e-10 {
        failures.push(format!("chebyshev {ortho:.1e}"));
    }

    // derivative convergence order, both pipelines
    let f = |x: f64, y: f64| (1.3 * x).sin() * (0.7 * y).cos() + 0.2 * x * y;
    let exact = |x: f64, y: f64| {
        let (sx, cx) = (1.3 * x).sin_cos();
        let (sy, cy) = (0.7 * y).sin_cos();
        [1.3 * cx * cy + 0.2 * y, -0.7 * sx * sy + 0.2 * x, -1.69 * sx * cy, -0.49 * sx * cy, -0.91 * cx * sy + 0.2]
    };
    let mut orders = Vec::new();
    for fd in [false, true] {
        let mut errs = Vec::new();
        for n in [16usize, 32, 64] {
            let g = HeightGrid::from_fn(n, GraphFrame::xy(2.0, 1.5), f)?;
            let d = if fd { fd_derivatives(&g)? } else { grid_derivatives(&g)? };
            let mut worst = 0.0f64;
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
            errs.push(worst);
        }
        orders.extend(errs.windows(2).map(|w| (w[0] / w[1]).log2()));
    }
    let min_order = orders.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_order < 1.8 {
        failures.push(format!("derivative order {min_order:.2}"));
    }

    // isotropy and path independence
    let mut iso = 0.0f64;
    for a in -12..=12 {
        for b in -12..=12 {
            if let Ok(phi) = weierstrass_integrand(Complex64::new(a as f64 * 0.2, b as f64 * 0.2 + 0.01)) {
                iso = iso.max(isotropy_residual(&phi));
            }
        }
    }
    if iso > 1e-10 {
        failures.push(format!("isotropy {iso:.1e}"));
    }
    let mut path = 0.0f64;
    for k in 1..12 {
        let alpha = PI * k as f64 / 12.0;
        let piece = if alpha > PI / 2.0 { Piece::FrontRight } else { Piece::FrontLeft };
        let target = boundary_point(alpha, piece)? * 0.8;
        let via = target * Complex64::new(0.5, 0.08);
        let direct = weierstrass_integrals(target, DEFAULT_CLEARANCE)?;
        let bent = weierstrass_integrals_via(&[via], target, DEFAULT_CLEARANCE)?;
        for c in 0..3 {
            path = path.max((direct.value[c] - bent.value[c]).norm());
        }
    }
    if path > 1e-8 {
        failures.push(format!("path independence {path:.1e}"));
    }

    // boundary preservation and symmetry on converged grids
    let mut sym = 0.0f64;
    let mut boundary_ok = true;
    for (config, r, d) in [(QuadConfig::Ruled2, 2.0, 1.0), (QuadConfig::Ruled2, 1.0, 3.0), (QuadConfig::Ruled1, 1.0, 2.0)] {
        let q = make_quad(config, r, d)?;
        let n = 24;
        let s = solve_detailed(&q, n, &SolverConfig::default())?;
        boundary_ok &= s.grid.same_boundary(&bilinear_height_grid(&q, n)?);
        if config == QuadConfig::Ruled2 {
            for i in 0..=n {
                for j in 0..=n {
                    sym = sym.max((s.grid.get(i, j) + s.grid.get(n - i, j) - d).abs() / d);
                }
            }
        }
    }
    if !boundary_ok {
        failures.push("boundary changed".into());
    }
    if sym > 1e-6 {
        failures.push(format!("symmetry {sym:.1e}"));
    }

    // closed-form curvature against the numeric oracle
    let mut curv = 0.0f64;
    for config in [QuadConfig::Ruled1, QuadConfig::Ruled2] {
        for (r, d) in [(1.0, 1.0), (2.0, 1.0), (1.0, 3.0)] {
            let q = make_quad(config, r, d)?;
            for (u, v) in [(0.2, 0.3), (0.5, 0.5), (0.9, 0.15), (0.35, 0.8)] {
                let h = bilinear_mean_curvature(&q, u, v)?;
                let num = mean_curvature_numeric(|a, b| q.eval_unchecked(a, b), u, v, 1e-3)?;
                curv = curv.max((h - num).abs() / h.abs().max(1e-3));
            }
        }
    }
    if curv > 1e-6 {
        failures.push(format!("curvature {curv:.1e}"));
    }

    Ok(Outcome::new(
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "chebyshev {ortho:.1e}, min order {min_order:.2}, isotropy {iso:.1e}, \
                 path {path:.1e}, symmetry {sym:.1e}, curvature {curv:.1e}"
            )
        } else {
            failures.join("; ")
        },
    ))
}

fn oracle_equivalence() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for row in &TABLE {
        for config in [QuadConfig::Ruled1, QuadConfig::Ruled2] {
            let q = make_quad(config, row.r, row.d)?;
            let numeric = area_param_numeric(|u, v| q.eval_unchecked(u, v), 1e-10)?;
            let closed = match config {
                QuadConfig::Ruled1 => ruled1_area(row.r, row.d)?,
                QuadConfig::Ruled2 => ruled2_area(row.r, row.d)?,
            };
            worst = worst.max((numeric - closed).abs());
        }
    }
    Ok(Outcome::new(worst <= 1e-6, format!("max |quadrature - closed form| {worst:.1e}")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 7] = [
        ("1 closed-form areas", closed_form_areas),
        ("2 estimator calibration", estimator_calibration),
        ("3 table reproduction", table_reproduction),
        ("4 schwarz constants", schwarz_constants),
        ("5 schwarz geometry", schwarz_geometry),
        ("6 property suites", property_suites),
        ("7 oracle equivalence", oracle_equivalence),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {} ({:.1}s)",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
