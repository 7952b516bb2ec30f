//! Quadrilateral boundaries, the bilinear seed surface and mean curvature.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::grid::HeightGrid;

/// A point (or vector) in R³.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn dot(self, o: Point3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Point3) -> Point3 {
        Point3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn component(self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::Z => self.z,
        }
    }

    fn set_component(&mut self, axis: Axis, value: f64) {
        match axis {
            Axis::X => self.x = value,
            Axis::Y => self.y = value,
            Axis::Z => self.z = value,
        }
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

/// Coordinate axis label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// The two corner orderings studied for the four points
/// r1=(0,0,0), r2=(r,d,0), r3=(0,d,d), r4=(r,0,d).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuadConfig {
    /// Cycle r4 → r3 → r2 → r1; a graph x(y,z) over a d×d square.
    Ruled1,
    /// Cycle r1 → r4 → r2 → r3; a graph z(x,y) over an r×d rectangle.
    Ruled2,
}

impl fmt::Display for QuadConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuadConfig::Ruled1 => "ruled1",
            QuadConfig::Ruled2 => "ruled2",
        })
    }
}

impl FromStr for QuadConfig {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ruled1" => Ok(QuadConfig::Ruled1),
            "ruled2" => Ok(QuadConfig::Ruled2),
            other => domain(format!("unknown configuration `{other}`")),
        }
    }
}

/// Orientation of the surface as a height field over a base rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphFrame {
    /// Axes spanning the base plane, in grid index order (i, j).
    pub base: [Axis; 2],
    /// Side lengths of the base rectangle along `base[0]` and `base[1]`.
    pub extents: [f64; 2],
    pub height: Axis,
}

impl GraphFrame {
    /// Frame of a plain z(x,y) graph over `[0,lx]×[0,ly]`.
    pub fn xy(lx: f64, ly: f64) -> Self {
        GraphFrame {
            base: [Axis::X, Axis::Y],
            extents: [lx, ly],
            height: Axis::Z,
        }
    }

    /// World point for base coordinates (s, t) and height h.
    pub fn to_world(&self, s: f64, t: f64, h: f64) -> Point3 {
        let mut p = Point3::default();
        p.set_component(self.base[0], s);
        p.set_component(self.base[1], t);
        p.set_component(self.height, h);
        p
    }
}

/// Four corners of a skew quadrilateral together with the bilinear patch
/// X(u,v) = (1−u)(1−v)x00 + u(1−v)x10 + (1−u)v x01 + uv x11.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadBoundary {
    pub config: QuadConfig,
    pub r: f64,
    pub d: f64,
    pub x00: Point3,
    pub x10: Point3,
    pub x01: Point3,
    pub x11: Point3,
}

/// Builds the boundary for `config` with scale parameters `r` and `d`.
pub fn make_quad(config: QuadConfig, r: f64, d: f64) -> Result<QuadBoundary> {
    if !(r > 0.0 && r.is_finite() && d > 0.0 && d.is_finite()) {
        return domain(format!(
            "r and d must be positive and finite (r={r}, d={d})"
        ));
    }
    let r1 = Point3::new(0.0, 0.0, 0.0);
    let r2 = Point3::new(r, d, 0.0);
    let r3 = Point3::new(0.0, d, d);
    let r4 = Point3::new(r, 0.0, d);
    let (x00, x10, x01, x11) = match config {
        QuadConfig::Ruled1 => (r4, r3, r1, r2),
        QuadConfig::Ruled2 => (r1, r4, r3, r2),
    };
    Ok(QuadBoundary {
        config,
        r,
        d,
        x00,
        x10,
        x01,
        x11,
    })
}

impl QuadBoundary {
    /// Corners in boundary order x00 → x10 → x11 → x01.
    pub fn corners(&self) -> [Point3; 4] {
        [self.x00, self.x10, self.x11, self.x01]
    }

    pub fn frame(&self) -> GraphFrame {
        match self.config {
            QuadConfig::Ruled1 => GraphFrame {
                base: [Axis::Y, Axis::Z],
                extents: [self.d, self.d],
                height: Axis::X,
            },
            QuadConfig::Ruled2 => GraphFrame::xy(self.r, self.d),
        }
    }

    /// Bilinear patch without range checks; polynomial, so valid everywhere.
    pub fn eval_unchecked(&self, u: f64, v: f64) -> Point3 {
        self.x00 * ((1.0 - u) * (1.0 - v))
            + self.x10 * (u * (1.0 - v))
            + self.x01 * ((1.0 - u) * v)
            + self.x11 * (u * v)
    }

    /// Patch parameters of the point above base coordinates (s, t).
    pub fn param_at_base(&self, s: f64, t: f64) -> (f64, f64) {
        match self.config {
            QuadConfig::Ruled1 => (s / self.d, 1.0 - t / self.d),
            QuadConfig::Ruled2 => (s / self.r, t / self.d),
        }
    }

    /// Height of the bilinear seed above base coordinates (s, t).
    pub fn seed_height(&self, s: f64, t: f64) -> f64 {
        let (u, v) = self.param_at_base(s, t);
        self.eval_unchecked(u, v).component(self.frame().height)
    }
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        domain(format!("{name}={x} outside [0,1]"))
    }
}

/// Point of the bilinear patch at (u, v) ∈ [0,1]².
pub fn bilinear_eval(q: &QuadBoundary, u: f64, v: f64) -> Result<Point3> {
    check_unit("u", u)?;
    check_unit("v", v)?;
    Ok(q.eval_unchecked(u, v))
}

/// Samples the bilinear seed on a uniform (n+1)×(n+1) grid of its frame.
pub fn bilinear_height_grid(q: &QuadBoundary, n: usize) -> Result<HeightGrid> {
    if n < 2 {
        return domain(format!("grid order N={n} must be at least 2"));
    }
    let frame = q.frame();
    let nf = n as f64;
    let mut g = HeightGrid::zeros(n, frame)?;
    g.set_quad(*q);
    for i in 0..=n {
        for j in 0..=n {
            // exact patch parameters, so the ring lies on the straight edges
            let (a, b) = (i as f64 / nf, j as f64 / nf);
            let (u, v) = match q.config {
                QuadConfig::Ruled1 => (a, 1.0 - b),
                QuadConfig::Ruled2 => (a, b),
            };
            g.set(i, j, q.eval_unchecked(u, v).component(frame.height));
        }
    }
    Ok(g)
}

/// Closed-form mean curvature of the bilinear patch.
pub fn bilinear_mean_curvature(q: &QuadBoundary, u: f64, v: f64) -> Result<f64> {
    check_unit("u", u)?;
    check_unit("v", v)?;
    let (r, d) = (q.r, q.d);
    let (a, b) = (1.0 - 2.0 * u, 1.0 - 2.0 * v);
    Ok(match q.config {
        QuadConfig::Ruled1 => {
            let w = d * d + r * r * a * a + r * r * b * b;
            -2.0 * r.powi(3) * a * b / (d * w.powf(1.5))
        }
        QuadConfig::Ruled2 => {
            let w = r * r + r * r * a * a + d * d * b * b;
            -2.0 * d * r * a * b / w.powf(1.5)
        }
    })
}

/// Finite-difference mean curvature of a parametric surface, without any
/// restriction on where the stencil lands.
///
/// Uses the unit normal (X_u × X_v)/|X_u × X_v| and
/// H = −(g11·h22 − 2·g12·h12 + g22·h11) / (2·(g11·g22 − g12²)).
pub fn mean_curvature_fd<F>(sampler: F, u: f64, v: f64, h: f64) -> f64
where
    F: Fn(f64, f64) -> Point3,
{
    let c = sampler(u, v);
    let (pu, mu) = (sampler(u + h, v), sampler(u - h, v));
    let (pv, mv) = (sampler(u, v + h), sampler(u, v - h));
    let xu = (pu - mu) * (0.5 / h);
    let xv = (pv - mv) * (0.5 / h);
    let xuu = (pu - c * 2.0 + mu) * (1.0 / (h * h));
    let xvv = (pv - c * 2.0 + mv) * (1.0 / (h * h));
    let xuv = (sampler(u + h, v + h) - sampler(u + h, v - h) - sampler(u - h, v + h)
        + sampler(u - h, v - h))
        * (0.25 / (h * h));
    let n = xu.cross(xv);
    let n = n * (1.0 / n.norm());
    let (g11, g12, g22) = (xu.dot(xu), xu.dot(xv), xv.dot(xv));
    let (h11, h12, h22) = (xuu.dot(n), xuv.dot(n), xvv.dot(n));
    -(g11 * h22 - 2.0 * g12 * h12 + g22 * h11) / (2.0 * (g11 * g22 - g12 * g12))
}

/// Mean curvature of `sampler` at (u, v) from centred differences of step `h`.
/// The stencil must stay inside [0,1]².
pub fn mean_curvature_numeric<F>(sampler: F, u: f64, v: f64, h: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> Point3,
{
    if !(h > 0.0 && h < 0.5) {
        return domain(format!("step h={h} must lie in (0, 0.5)"));
    }
    if u - h < 0.0 || u + h > 1.0 || v - h < 0.0 || v + h > 1.0 {
        return domain(format!("stencil around ({u},{v}) with h={h} leaves [0,1]²"));
    }
    Ok(mean_curvature_fd(sampler, u, v, h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ruled1_x11_matches_r2() {
        let q = make_quad(QuadConfig::Ruled1, 1.0, 2.0).unwrap();
        assert_eq!(q.x11, Point3::new(1.0, 2.0, 0.0));
        assert_eq!(
            bilinear_eval(&q, 1.0, 1.0).unwrap(),
            Point3::new(1.0, 2.0, 0.0)
        );
    }

    #[test]
    fn equal_scales_give_regular_tetrahedron() {
        for config in [QuadConfig::Ruled1, QuadConfig::Ruled2] {
            let c = make_quad(config, 1.0, 1.0).unwrap().corners();
            let mut dists = vec![];
            for i in 0..4 {
                for j in i + 1..4 {
                    dists.push((c[i] - c[j]).norm());
                }
            }
            for dd in &dists {
                assert!((dd - 2f64.sqrt()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn degenerate_scale_rejected() {
        assert!(matches!(
            make_quad(QuadConfig::Ruled1, 0.0, 1.0),
            Err(Error::Domain(_))
        ));
        assert!(make_quad(QuadConfig::Ruled2, 1.0, -2.0).is_err());
        assert!(make_quad(QuadConfig::Ruled2, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn bilinear_corner_and_centre() {
        let q = make_quad(QuadConfig::Ruled2, 1.0, 1.0).unwrap();
        assert_eq!(bilinear_eval(&q, 0.0, 0.0).unwrap(), Point3::default());
        let c = bilinear_eval(&q, 0.5, 0.5).unwrap();
        assert!((c - Point3::new(0.5, 0.5, 0.5)).norm() < 1e-15);
        assert!(bilinear_eval(&q, 1.1, 0.5).is_err());
    }

    #[test]
    fn centre_height_of_coarse_grid() {
        let q = make_quad(QuadConfig::Ruled2, 1.0, 1.0).unwrap();
        let g = bilinear_height_grid(&q, 2).unwrap();
        assert_eq!(g.get(1, 1), 0.5);
        assert!(bilinear_height_grid(&q, 1).is_err());
    }

    #[test]
    fn ruled1_boundary_ring_on_straight_edges() {
        let q = make_quad(QuadConfig::Ruled1, 1.0, 2.0).unwrap();
        let n = 4;
        let g = bilinear_height_grid(&q, n).unwrap();
        let f = q.frame();
        // corner heights in grid index order
        let h = |p: Point3| p.component(f.height);
        let at = |i: usize, j: usize| {
            let (s, t) = (i as f64 * g.du(), j as f64 * g.dv());
            let (u, v) = q.param_at_base(s, t);
            q.eval_unchecked(u, v)
        };
        let (c00, c10, c01, c11) = (h(at(0, 0)), h(at(n, 0)), h(at(0, n)), h(at(n, n)));
        for k in 0..=n {
            let a = k as f64 / n as f64;
            assert!((g.get(k, 0) - (c00 + (c10 - c00) * a)).abs() < 1e-14);
            assert!((g.get(k, n) - (c01 + (c11 - c01) * a)).abs() < 1e-14);
            assert!((g.get(0, k) - (c00 + (c01 - c00) * a)).abs() < 1e-14);
            assert!((g.get(n, k) - (c10 + (c11 - c10) * a)).abs() < 1e-14);
        }
        // the corner heights really are the corners of the quadrilateral
        let corner_heights: Vec<f64> = q.corners().iter().map(|p| h(*p)).collect();
        for c in [c00, c10, c01, c11] {
            assert!(corner_heights.iter().any(|x| (x - c).abs() < 1e-14));
        }
    }

    #[test]
    fn closed_form_curvature_values() {
        let q = make_quad(QuadConfig::Ruled2, 1.0, 1.0).unwrap();
        let h = bilinear_mean_curvature(&q, 0.0, 0.0).unwrap();
        assert!((h + 2.0 / 3f64.powf(1.5)).abs() < 1e-15);
        let q1 = make_quad(QuadConfig::Ruled1, 1.7, 0.6).unwrap();
        for v in [0.0, 0.3, 0.9] {
            assert_eq!(bilinear_mean_curvature(&q1, 0.5, v).unwrap(), 0.0);
        }
    }

    #[test]
    fn plane_has_zero_curvature() {
        let plane = |u: f64, v: f64| Point3::new(u, v, 0.3 * u - 1.7 * v);
        let h = mean_curvature_numeric(plane, 0.4, 0.6, 1e-3).unwrap();
        assert!(h.abs() < 1e-8);
        assert!(mean_curvature_numeric(plane, 0.0005, 0.5, 1e-3).is_err());
    }

    #[test]
    fn closed_form_agrees_with_oracle() {
        for config in [QuadConfig::Ruled1, QuadConfig::Ruled2] {
            for (r, d) in [(1.0, 1.0), (2.0, 1.0), (1.0, 2.0)] {
                let q = make_quad(config, r, d).unwrap();
                for a in 1..9 {
                    for b in 1..9 {
                        let (u, v) = (a as f64 / 9.0, b as f64 / 9.0);
                        let exact = bilinear_mean_curvature(&q, u, v).unwrap();
                        let fd = mean_curvature_numeric(|s, t| q.eval_unchecked(s, t), u, v, 1e-3)
                            .unwrap();
                        let scale = exact.abs().max(1e-3);
                        assert!(
                            (exact - fd).abs() <= 1e-6 * scale,
                            "{config} r={r} d={d} ({u},{v}): {exact} vs {fd}"
                        );
                    }
                }
            }
        }
    }
}
