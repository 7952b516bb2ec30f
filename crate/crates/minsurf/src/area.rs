//! Surface-area estimators for height grids, quadrature of parametric
//! surfaces, and the closed-form areas of the two bilinear (ruled) seeds.

use std::f64::consts::PI;

use crate::chebyshev::{grid_derivatives, DerivativeField};
use crate::error::{domain, Error, Result};
use crate::geometry::Point3;
use crate::grid::HeightGrid;
use crate::par::{map_range, pairwise_sum, Execution};
use crate::quadrature::RectQuadrature;

/// Where the gradient-sum estimator samples the slope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GradientRule {
    /// One term per cell, derivatives averaged from its four corners.
    #[default]
    CellCenter,
    /// One term per interior lattice node.
    InteriorNodes,
}

fn check_field(g: &HeightGrid, d: &DerivativeField) -> Result<()> {
    d.check_shape()?;
    if d.n != g.n() || d.du != g.du() || d.dv != g.dv() {
        return Err(Error::Shape(format!(
            "derivative field (N={}, du={}, dv={}) does not match grid (N={}, du={}, dv={})",
            d.n,
            d.du,
            d.dv,
            g.n(),
            g.du(),
            g.dv()
        )));
    }
    Ok(())
}

/// Σ √(1 + z_x² + z_y²)·du·dv with the default [`GradientRule`].
pub fn area_gradient_sum(g: &HeightGrid, d: &DerivativeField) -> Result<f64> {
    area_gradient_sum_with(g, d, GradientRule::default())
}

pub fn area_gradient_sum_with(
    g: &HeightGrid,
    d: &DerivativeField,
    rule: GradientRule,
) -> Result<f64> {
    check_field(g, d)?;
    let n = g.n();
    let element = |zx: f64, zy: f64| (1.0 + zx * zx + zy * zy).sqrt();
    let terms: Vec<f64> = match rule {
        GradientRule::CellCenter => {
            let mut out = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    let ks = [
                        d.index(i, j),
                        d.index(i + 1, j),
                        d.index(i, j + 1),
                        d.index(i + 1, j + 1),
                    ];
                    let zx = 0.25 * ks.iter().map(|&k| d.zx[k]).sum::<f64>();
                    let zy = 0.25 * ks.iter().map(|&k| d.zy[k]).sum::<f64>();
                    out.push(element(zx, zy));
                }
            }
            out
        }
        GradientRule::InteriorNodes => {
            let mut out = Vec::with_capacity((n - 1) * (n - 1));
            for i in 1..n {
                for j in 1..n {
                    let k = d.index(i, j);
                    out.push(element(d.zx[k], d.zy[k]));
                }
            }
            out
        }
    };
    Ok(pairwise_sum(&terms) * g.du() * g.dv())
}

/// The three edge vectors that meet at node (i, j) of cell (i−1..i, j−1..j).
fn cell_vectors(g: &HeightGrid, i: usize, j: usize) -> [Point3; 3] {
    let z = g.get(i, j);
    [
        Point3::new(0.0, g.dv(), z - g.get(i, j - 1)),
        Point3::new(g.du(), 0.0, z - g.get(i - 1, j)),
        Point3::new(g.du(), g.dv(), z - g.get(i - 1, j - 1)),
    ]
}

/// Sum over cells of (|v¹×v²| + |v²×v³|)/2, where v¹, v², v³ run from node
/// (i, j) back to (i, j−1), (i−1, j) and (i−1, j−1).
pub fn area_triangulation(g: &HeightGrid) -> f64 {
    let n = g.n();
    let mut terms = Vec::with_capacity(n * n);
    for i in 1..=n {
        for j in 1..=n {
            let [v1, v2, v3] = cell_vectors(g, i, j);
            terms.push(0.5 * (v1.cross(v2).norm() + v2.cross(v3).norm()));
        }
    }
    pairwise_sum(&terms)
}

// Quadratic Lagrange basis on nodes 0, 1, 2 and its derivative.
fn lagrange2(x: f64) -> ([f64; 3], [f64; 3]) {
    (
        [
            0.5 * (x - 1.0) * (x - 2.0),
            -x * (x - 2.0),
            0.5 * x * (x - 1.0),
        ],
        [x - 1.5, 2.0 - 2.0 * x, x - 0.5],
    )
}

/// Area of the piecewise-biquadratic interpolant through 2×2-cell blocks,
/// integrated adaptively to absolute tolerance `tol`.
pub fn area_biquadratic(g: &HeightGrid, tol: f64) -> Result<f64> {
    area_biquadratic_with(g, tol, Execution::default())
}

pub fn area_biquadratic_with(g: &HeightGrid, tol: f64, exec: Execution) -> Result<f64> {
    let n = g.n();
    if n % 2 != 0 {
        return domain(format!(
            "biquadratic area needs an even grid order, got N={n}"
        ));
    }
    if !(tol > 0.0) {
        return domain(format!("tolerance {tol} must be positive"));
    }
    let blocks = n / 2;
    let per_block = tol / (blocks * blocks) as f64;
    let (du, dv) = (g.du(), g.dv());
    let rule = RectQuadrature::new(6);
    let parts = map_range(blocks * blocks, exec, |b| {
        let (bi, bj) = (b / blocks, b % blocks);
        let mut z = [[0.0; 3]; 3];
        for (a, row) in z.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = g.get(2 * bi + a, 2 * bj + c);
            }
        }
        // local coordinates measured in cells
        let integrand = |x: f64, y: f64| {
            let (lx, dlx) = lagrange2(x);
            let (ly, dly) = lagrange2(y);
            let (mut zx, mut zy) = (0.0, 0.0);
            for a in 0..3 {
                for c in 0..3 {
                    zx += dlx[a] * ly[c] * z[a][c];
                    zy += lx[a] * dly[c] * z[a][c];
                }
            }
            let (zx, zy) = (zx / du, zy / dv);
            (1.0 + zx * zx + zy * zy).sqrt()
        };
        rule.integrate(&integrand, 0.0, 2.0, 0.0, 2.0, per_block / (du * dv))
            .map(|v| v * du * dv)
    });
    let parts = parts.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&parts))
}

const PARAM_STEP: f64 = 1e-4;

// Second-order difference quotient along one parameter, one-sided near the
// ends so the sampler is never evaluated outside [0, 1].
fn partial<F: Fn(f64) -> Point3>(f: F, x: f64) -> Point3 {
    let h = PARAM_STEP;
    if x - h < 0.0 {
        (f(x) * -3.0 + f(x + h) * 4.0 - f(x + 2.0 * h)) * (0.5 / h)
    } else if x + h > 1.0 {
        (f(x) * 3.0 - f(x - h) * 4.0 + f(x - 2.0 * h)) * (0.5 / h)
    } else {
        (f(x + h) - f(x - h)) * (0.5 / h)
    }
}

/// ∫∫ |X_u × X_v| du dv over [0,1]² with X_u, X_v from difference quotients
/// of `sampler`.
pub fn area_param_numeric<F>(sampler: F, tol: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> Point3,
{
    if !(tol > 0.0) {
        return domain(format!("tolerance {tol} must be positive"));
    }
    let element = |u: f64, v: f64| {
        let xu = partial(|s| sampler(s, v), u);
        let xv = partial(|t| sampler(u, t), v);
        xu.cross(xv).norm()
    };
    RectQuadrature::new(8).integrate(&element, 0.0, 1.0, 0.0, 1.0, tol)
}

fn check_rd(r: f64, d: f64) -> Result<()> {
    if r > 0.0 && d > 0.0 && r.is_finite() && d.is_finite() {
        Ok(())
    } else {
        domain(format!(
            "r and d must be positive and finite (r={r}, d={d})"
        ))
    }
}

/// Area of the ruled₁ bilinear surface.
pub fn ruled1_area(r: f64, d: f64) -> Result<f64> {
    check_rd(r, d)?;
    let s = (d * d + 2.0 * r * r).sqrt();
    // atan(num/den) continued through den = 0: the angle stays in (−π, 0)
    let angle = (2.0 * r * r * d * s).atan2(r.powi(4) - 2.0 * r * r * d * d - d.powi(4)) - PI;
    let log = ((s - r) / (s + r)).ln();
    Ok(d * (s / 3.0 + d.powi(3) * angle / (6.0 * r * r) - (3.0 * d * d + r * r) / (6.0 * r) * log))
}

/// Area of the ruled₂ bilinear surface.
pub fn ruled2_area(r: f64, d: f64) -> Result<f64> {
    check_rd(r, d)?;
    let s = (d * d + 2.0 * r * r).sqrt();
    Ok(d * s / 3.0 - (r * r / 6.0) * (d * s / (r * r)).atan()
        + (r * r / 3.0) * ((s + d) / (s - d)).ln()
        + (d * r / 4.0) * (1.0 + d * d / (3.0 * r * r)) * ((s + r) / (s - r)).ln())
}

/// The three grid estimators side by side, plus the closed-form area of the
/// bilinear seed when the grid remembers its boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct AreaReport {
    pub n: usize,
    pub gradient_sum: f64,
    pub triangulation: f64,
    /// `None` for odd N.
    pub biquadratic: Option<f64>,
    pub analytic_ruled: Option<f64>,
}

pub fn area_report(g: &HeightGrid, tol: f64) -> Result<AreaReport> {
    let d = grid_derivatives(g)?;
    let biquadratic = if g.n() % 2 == 0 {
        Some(area_biquadratic(g, tol)?)
    } else {
        None
    };
    let analytic_ruled = match g.quad() {
        Some(q) => Some(match q.config {
            crate::QuadConfig::Ruled1 => ruled1_area(q.r, q.d)?,
            crate::QuadConfig::Ruled2 => ruled2_area(q.r, q.d)?,
        }),
        None => None,
    };
    Ok(AreaReport {
        n: g.n(),
        gradient_sum: area_gradient_sum(g, &d)?,
        triangulation: area_triangulation(g),
        biquadratic,
        analytic_ruled,
    })
}
