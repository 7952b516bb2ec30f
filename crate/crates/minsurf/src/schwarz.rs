//! The Schwarz minimal surface over the regular skew quadrilateral
//! A(½,0,h), B(0,−½,−h), C(−½,0,h), D(0,½,−h) with h = 1/(2√2).
//!
//! Points come from the Weierstrass–Enneper integrals
//! X(ρ) = s·Re ∫₀^ρ ((1−ω²)R, i(1+ω²)R, −2ωR) dω with
//! R(ω) = −2/√((ω⁴−b⁴)(ω⁴−b⁻⁴)), b = (√3−1)/√2.
//! The eight branch points b·iᵏ and b⁻¹·iᵏ are the images of the corners
//! and of their reflections. The conformal domain of one piece is a
//! quarter-disc cut off by a circle of radius √2 through two adjacent
//! branch points; it is sampled on a polar grid and pushed through the
//! integrals.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::geometry::Point3;
use crate::par::{map_range, Execution};
use crate::quadrature::{integrate_1d, C3};

/// Modulus of the four inner branch points.
pub fn branch_radius() -> f64 {
    (3f64.sqrt() - 1.0) / SQRT_2
}

/// Height of the corners above the centre.
pub const CORNER_HEIGHT: f64 = 0.353_553_390_593_273_8; // 1/(2√2)

/// Absolute tolerance of every contour integral.
pub const QUAD_TOL: f64 = 1e-11;

/// Distance below which an argument counts as sitting on a branch point.
const SINGULAR_EPS: f64 = 1e-9;

/// The eight zeros of the quartic in ω⁴: b·iᵏ then b⁻¹·iᵏ.
pub fn branch_points() -> [Complex64; 8] {
    let b = branch_radius();
    let i = Complex64::i();
    let mut out = [Complex64::new(0.0, 0.0); 8];
    for k in 0..4 {
        out[k] = b * i.powi(k as i32);
        out[k + 4] = i.powi(k as i32) / b;
    }
    out
}

/// √((b⁴−ω⁴)(b⁻⁴−ω⁴)) as a product of principal roots. This is the branch
/// equal to 1 at ω = 0 and continuous on the plane cut along the four rays
/// from b·iᵏ outward, which contains every conformal domain used here.
pub fn quartic_sqrt(w: Complex64) -> Complex64 {
    let b4 = branch_radius().powi(4);
    let w4 = w * w * w * w;
    (b4 - w4).sqrt() * (1.0 / b4 - w4).sqrt()
}

fn integrand_unchecked(w: Complex64) -> C3 {
    integrand_from(quartic_sqrt(w), w)
}

fn integrand_from(root: Complex64, w: Complex64) -> C3 {
    let r = -2.0 / root;
    let w2 = w * w;
    C3([(1.0 - w2) * r, Complex64::i() * (1.0 + w2) * r, 2.0 * w * r])
}

/// Integrand at ω = anchor + δ. When the anchor is a branch point the
/// vanishing factor is formed from δ directly, so ω may come arbitrarily
/// close to the anchor without cancellation.
fn integrand_offset(anchor: Complex64, delta: Complex64) -> C3 {
    let w = anchor + delta;
    let b4 = branch_radius().powi(4);
    let w4 = w * w * w * w;
    let points = branch_points();
    // p⁴ − ω⁴ = −δ(2p + δ)(p² + ω²)
    let near = |p: Complex64| -delta * (2.0 * p + delta) * (p * p + w * w);
    let inner = if points[..4].contains(&anchor) { near(anchor) } else { b4 - w4 };
    let outer = if points[4..].contains(&anchor) { near(anchor) } else { 1.0 / b4 - w4 };
    integrand_from(inner.sqrt() * outer.sqrt(), w)
}

/// The Weierstrass integrand ((1−ω²)R, i(1+ω²)R, 2ωR).
pub fn weierstrass_integrand(w: Complex64) -> Result<[Complex64; 3]> {
    if let Some(p) = branch_points()
        .iter()
        .find(|p| (*p - w).norm() < SINGULAR_EPS)
    {
        return Err(Error::Singularity(format!(
            "ω={w} is at the branch point {p}"
        )));
    }
    Ok(integrand_unchecked(w).0)
}

/// |φ₁²+φ₂²+φ₃²| relative to Σ|φₖ|²; zero for an isotropic vector.
pub fn isotropy_residual(phi: &[Complex64; 3]) -> f64 {
    let sum = phi[0] * phi[0] + phi[1] * phi[1] + phi[2] * phi[2];
    let size: f64 = phi.iter().map(|c| c.norm_sqr()).sum();
    sum.norm() / size.max(1.0)
}

/// Phase-continued square root of the quartic along a path: each new value
/// takes the sign whose phase is closest to the previous one. Independent
/// of [`quartic_sqrt`], so the two check each other.
#[derive(Debug, Clone)]
pub struct BranchTracker {
    last: Complex64,
}

impl Default for BranchTracker {
    fn default() -> Self {
        BranchTracker {
            last: Complex64::new(1.0, 0.0),
        }
    }
}

impl BranchTracker {
    pub fn next(&mut self, w: Complex64) -> Result<Complex64> {
        let w4 = w.powi(4);
        let q = 1.0 - 14.0 * w4 + w4 * w4;
        let mut s = q.sqrt();
        if (s - self.last).norm() > (s + self.last).norm() {
            s = -s;
        }
        let turn = (s / self.last).arg().abs();
        if turn >= FRAC_PI_2 {
            return Err(Error::Branch(format!(
                "phase jump {turn:.3} at ω={w}; refine the path"
            )));
        }
        self.last = s;
        Ok(s)
    }
}

fn segment_distance(p: Complex64, a: Complex64, c: Complex64) -> f64 {
    let dir = c - a;
    let len2 = dir.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * dir.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + dir * t)).norm()
}

/// Largest isotropy residual met while integrating, alongside the value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrals {
    pub value: [Complex64; 3],
    pub isotropy: f64,
}

// ∫ along the straight leg a → c with ω = a + (c−a)·u²(3−2u); the weight
// 6u(1−u) cancels an inverse square root at either end.
fn leg(a: Complex64, c: Complex64, tol: f64, isotropy: &mut f64) -> Result<C3> {
    let dir = c - a;
    if dir.norm() == 0.0 {
        return Ok(C3([Complex64::new(0.0, 0.0); 3]));
    }
    let v = integrate_1d(
        |u: f64| {
            // measure from the nearer end; u²(3−2u) is symmetric about ½
            let (anchor, delta) = if u <= 0.5 {
                (a, dir * (u * u * (3.0 - 2.0 * u)))
            } else {
                let v = 1.0 - u;
                (c, -dir * (v * v * (3.0 - 2.0 * v)))
            };
            let w = anchor + delta;
            let phi = integrand_offset(anchor, delta);
            *isotropy = isotropy.max(isotropy_residual(&phi.0));
            let jac = dir * (6.0 * u * (1.0 - u));
            let out = C3([phi.0[0] * jac, phi.0[1] * jac, phi.0[2] * jac]);
            if out.0.iter().all(|c| c.is_finite()) {
                Ok(out)
            } else {
                Err(Error::Singularity(format!("integrand not finite at ω={w}")))
            }
        },
        0.0,
        1.0,
        tol,
    )?;
    Ok(v)
}

/// ∫₀^ρ φ dω along the polygon 0 → waypoints → ρ.
///
/// A branch point closer than `clearance` to the end of the path becomes an
/// extra vertex (the path runs into the corner and out again). One closer
/// than `clearance` to any other part of the path is a [`Error::Path`].
pub fn weierstrass_integrals_via(
    waypoints: &[Complex64],
    target: Complex64,
    clearance: f64,
) -> Result<Integrals> {
    if !(clearance > 0.0) {
        return domain(format!("clearance {clearance} must be positive"));
    }
    let mut vertices = vec![Complex64::new(0.0, 0.0)];
    vertices.extend_from_slice(waypoints);
    let points = branch_points();
    if let Some(p) = points.iter().find(|p| (**p - target).norm() < clearance) {
        if (*p - target).norm() > 0.0 {
            vertices.push(*p);
        }
    }
    vertices.push(target);
    for pair in vertices.windows(2) {
        for p in &points {
            let at_end = (*p - pair[0]).norm() == 0.0 || (*p - pair[1]).norm() == 0.0;
            if at_end {
                continue;
            }
            let dist = segment_distance(*p, pair[0], pair[1]);
            if dist < clearance {
                return Err(Error::Path(format!(
                    "segment {} → {} passes {dist:.2e} from branch point {p}",
                    pair[0], pair[1]
                )));
            }
        }
    }
    let mut isotropy = 0.0f64;
    let mut total = C3([Complex64::new(0.0, 0.0); 3]);
    let legs = vertices.len() - 1;
    for pair in vertices.windows(2) {
        total = total + leg(pair[0], pair[1], QUAD_TOL / legs as f64, &mut isotropy)?;
    }
    Ok(Integrals {
        value: total.0,
        isotropy,
    })
}

/// ∫₀^ρ φ dω along the straight path.
pub fn weierstrass_integrals(target: Complex64, clearance: f64) -> Result<Integrals> {
    weierstrass_integrals_via(&[], target, clearance)
}

/// Default clearance between an integration path and a branch point.
pub const DEFAULT_CLEARANCE: f64 = 1e-3;

fn to_point(i: &[Complex64; 3], scale: f64) -> Point3 {
    Point3::new(scale * i[0].re, scale * i[1].re, -scale * i[2].re)
}

/// Surface point over ρ, scaled by `scale`.
pub fn schwarz_point(target: Complex64, scale: f64) -> Result<Point3> {
    Ok(to_point(
        &weierstrass_integrals(target, DEFAULT_CLEARANCE)?.value,
        scale,
    ))
}

/// Scale constants of the surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaScale {
    /// Re ∫₀^{ib} 4ρ/√(1+14ρ⁴+ρ⁸) dρ along the imaginary axis.
    pub edge_integral: f64,
    /// (1/(2√2)) / (2·|edge_integral|).
    pub kappa: f64,
    /// Unscaled z of the corner image of ib.
    pub corner_integral: f64,
    /// Scale that puts the corners at height ±1/(2√2).
    pub geometric_scale: f64,
}

pub fn compute_kappa() -> Result<KappaScale> {
    let b = branch_radius();
    // ρ = it: 4ρ dρ = −4t dt and ρ⁴ = t⁴
    let edge_integral: f64 = -integrate_1d(
        |t: f64| {
            let t4 = t.powi(4);
            Ok(4.0 * t / (1.0 + 14.0 * t4 + t4 * t4).sqrt())
        },
        0.0,
        b,
        1e-13,
    )?;
    let kappa = CORNER_HEIGHT / (2.0 * edge_integral.abs());
    let corner = weierstrass_integrals(Complex64::new(0.0, b), DEFAULT_CLEARANCE)?;
    let corner_integral = -corner.value[2].re;
    Ok(KappaScale {
        edge_integral,
        kappa,
        corner_integral,
        geometric_scale: CORNER_HEIGHT / corner_integral.abs(),
    })
}

/// One of the two mirror-image pieces of the conformal domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Piece {
    /// Second quadrant of the ω-plane, bounded by the circle of radius √2
    /// about (1−i)/√2; corners D (ω=ib) and A (ω=−b).
    FrontRight,
    /// Its mirror under ω ↦ −ω̄ (first quadrant, circle about −(1+i)/√2);
    /// corners C (ω=b) and D.
    FrontLeft,
}

impl Piece {
    pub fn label(&self) -> &'static str {
        match self {
            Piece::FrontRight => "front-right",
            Piece::FrontLeft => "front-left",
        }
    }

    /// Angular range covered by the piece.
    pub fn alpha_range(&self) -> (f64, f64) {
        match self {
            Piece::FrontRight => (FRAC_PI_2, PI),
            Piece::FrontLeft => (0.0, FRAC_PI_2),
        }
    }

    /// Branch points at the two corners of the piece.
    pub fn corners(&self) -> [Complex64; 2] {
        let b = branch_radius();
        match self {
            Piece::FrontRight => [Complex64::new(0.0, b), Complex64::new(-b, 0.0)],
            Piece::FrontLeft => [Complex64::new(b, 0.0), Complex64::new(0.0, b)],
        }
    }

    fn circle_center(&self) -> Complex64 {
        match self {
            Piece::FrontRight => Complex64::new(1.0, -1.0) / SQRT_2,
            Piece::FrontLeft => Complex64::new(-1.0, -1.0) / SQRT_2,
        }
    }
}

impl std::fmt::Display for Piece {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=PI).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::Branch(format!("α={alpha} outside [0, π]")))
    }
}

fn theta_front_right(alpha: f64) -> f64 {
    let (s, k) = alpha.sin_cos();
    // root of cot α = (1 + 2cos θ)/(−1 + 2 sin θ) on the far side of the
    // circle, in a form without cancellation at s = 0
    let arg = 0.5 * (-s * s - k * s + k * (3.0 * s * s - 2.0 * k * s + 3.0 * k * k).sqrt());
    arg.clamp(-1.0, 1.0).acos()
}

/// Circle angle θ of the boundary point seen from the origin at angle α,
/// measured from the centre of the piece's boundary circle.
pub fn boundary_theta(alpha: f64, piece: Piece) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(match piece {
        Piece::FrontRight => theta_front_right(alpha),
        Piece::FrontLeft => PI - theta_front_right(PI - alpha),
    })
}

/// Boundary point ω on the ray at angle α.
pub fn boundary_point(alpha: f64, piece: Piece) -> Result<Complex64> {
    let theta = boundary_theta(alpha, piece)?;
    Ok(piece.circle_center() + SQRT_2 * Complex64::from_polar(1.0, theta))
}

/// Distance from the origin to the domain boundary along the ray α.
pub fn r_max(alpha: f64, piece: Piece) -> Result<f64> {
    let theta = boundary_theta(alpha, piece)?;
    let (s, c) = theta.sin_cos();
    let r2 = match piece {
        Piece::FrontRight => 3.0 + 2.0 * c - 2.0 * s,
        Piece::FrontLeft => 3.0 - 2.0 * c - 2.0 * s,
    };
    Ok(r2.max(0.0).sqrt())
}

/// Sampled piece of the surface.
#[derive(Debug, Clone, PartialEq)]
pub struct SchwarzPatch {
    pub piece: Piece,
    pub n_r: usize,
    pub n_alpha: usize,
    /// Node (a, k) at index a·n_r + k: ray a, radial step k.
    pub points: Vec<Point3>,
    /// (r̂, α) of each node.
    pub params: Vec<(f64, f64)>,
    pub scale: f64,
    /// Largest isotropy residual met by any quadrature node.
    pub isotropy_residual: f64,
}

impl SchwarzPatch {
    pub fn index(&self, a: usize, k: usize) -> usize {
        a * self.n_r + k
    }

    /// Nodes on the outer boundary r̂ = r_max(α).
    pub fn rim(&self) -> impl Iterator<Item = Point3> + '_ {
        (0..self.n_alpha).map(move |a| self.points[self.index(a, self.n_r - 1)])
    }

    pub fn z_range(&self) -> (f64, f64) {
        self.points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.z), hi.max(p.z))
            })
    }
}

/// Samples one piece on an n_alpha × n_r polar grid. `margin` is the
/// clearance kept between integration paths and branch points.
pub fn schwarz_mesh(
    piece: Piece,
    n_r: usize,
    n_alpha: usize,
    margin: f64,
    exec: Execution,
) -> Result<SchwarzPatch> {
    if n_r < 2 || n_alpha < 2 {
        return domain(format!(
            "mesh counts must be at least 2 (got {n_r}×{n_alpha})"
        ));
    }
    if !(margin > 0.0 && margin < 0.1) {
        return domain(format!("margin {margin} must lie in (0, 0.1)"));
    }
    let scale = compute_kappa()?.geometric_scale;
    let (a0, a1) = piece.alpha_range();
    let alphas: Vec<f64> = (0..n_alpha)
        .map(|a| a0 + (a1 - a0) * a as f64 / (n_alpha - 1) as f64)
        .collect();
    let radii = alphas
        .iter()
        .map(|&a| r_max(a, piece))
        .collect::<Result<Vec<f64>>>()?;
    let nodes = map_range(n_alpha * n_r, exec, |idx| {
        let (a, k) = (idx / n_r, idx % n_r);
        let rhat = radii[a] * k as f64 / (n_r - 1) as f64;
        let target = Complex64::from_polar(rhat, alphas[a]);
        let direct = match weierstrass_integrals(target, margin) {
            // a ray grazing a corner: run along the boundary ray into the
            // corner, then cut across to the node
            Err(Error::Path(_)) => {
                let corner = piece.corners().into_iter().min_by(|p, q| {
                    (p - target).norm().total_cmp(&(q - target).norm())
                });
                weierstrass_integrals_via(&[corner.unwrap()], target, margin)
            }
            other => other,
        };
        direct.map(|i| (to_point(&i.value, scale), (rhat, alphas[a]), i.isotropy))
    });
    let mut points = Vec::with_capacity(nodes.len());
    let mut params = Vec::with_capacity(nodes.len());
    let mut isotropy_residual = 0.0f64;
    for node in nodes {
        let (p, rp, iso) = node?;
        points.push(p);
        params.push(rp);
        isotropy_residual = isotropy_residual.max(iso);
    }
    Ok(SchwarzPatch {
        piece,
        n_r,
        n_alpha,
        points,
        params,
        scale,
        isotropy_residual,
    })
}

/// The four corners A, B, C, D.
pub fn corners() -> [Point3; 4] {
    let h = CORNER_HEIGHT;
    [
        Point3::new(0.5, 0.0, h),
        Point3::new(0.0, -0.5, -h),
        Point3::new(-0.5, 0.0, h),
        Point3::new(0.0, 0.5, -h),
    ]
}

/// Distance from `p` to the nearest of the edges AB, BC, CD, DA.
pub fn distance_to_boundary(p: Point3) -> f64 {
    let c = corners();
    (0..4)
        .map(|k| {
            let (a, b) = (c[k], c[(k + 1) % 4]);
            let ab = b - a;
            let t = ((p - a).dot(ab) / ab.dot(ab)).clamp(0.0, 1.0);
            (p - (a + ab * t)).norm()
        })
        .fold(f64::INFINITY, f64::min)
}
