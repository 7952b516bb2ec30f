//! Adaptive quadrature: Gauss–Kronrod on intervals (real, complex or vector
//! valued) and tensor Gauss–Legendre on rectangles.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be integrated: closed under addition and real scaling,
/// with a norm for the error estimate.
pub trait Integrand:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Three complex components, the shape of a Weierstrass integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct C3(pub [Complex64; 3]);

impl Add for C3 {
    type Output = C3;
    fn add(self, o: C3) -> C3 {
        C3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for C3 {
    type Output = C3;
    fn sub(self, o: C3) -> C3 {
        C3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Mul<f64> for C3 {
    type Output = C3;
    fn mul(self, s: f64) -> C3 {
        C3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

impl Integrand for C3 {
    fn zero() -> Self {
        C3([Complex64::new(0.0, 0.0); 3])
    }
    fn magnitude(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
}

fn gk15<T: Integrand, F: FnMut(f64) -> Result<T>>(f: &mut F, a: f64, b: f64) -> Result<Panel<T>> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.magnitude() * WGK[7];
    for k in 0..7 {
        let dx = h * XGK[k];
        let (lo, hi) = (f(c - dx)?, f(c + dx)?);
        abs += (lo.magnitude() + hi.magnitude()) * WGK[k];
        let s = lo + hi;
        kron = kron + s * WGK[k];
        if k % 2 == 1 {
            gauss = gauss + s * WG[k / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    let mut err = (kron - gauss).magnitude();
    // below this the estimate is rounding noise
    if err <= 50.0 * f64::EPSILON * abs * h.abs() {
        err = 0.0;
    }
    if !err.is_finite() {
        return Err(Error::Numerical(format!("non-finite integrand on [{a}, {b}]")));
    }
    Ok(Panel { a, b, value: kron, err })
}

/// Adaptive Gauss–Kronrod integration of `f` over `[a, b]` to absolute
/// tolerance `tol`. The panel with the largest error estimate is bisected
/// until the estimates sum to at most `tol`; the final sum runs over panels
/// in left-to-right order, so the result is deterministic.
pub fn integrate_1d<T, F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<T>
where
    T: Integrand,
    F: FnMut(f64) -> Result<T>,
{
    const MAX_PANELS: usize = 4000;
    let mut panels = vec![gk15(&mut f, a, b)?];
    loop {
        let total_err: f64 = panels.iter().map(|p| p.err).sum();
        if total_err <= tol {
            break;
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |(k, e), (i, p)| if p.err > e { (i, p.err) } else { (k, e) });
        let p = panels.swap_remove(worst);
        let m = 0.5 * (p.a + p.b);
        if panels.len() >= MAX_PANELS || m <= p.a.min(p.b) || m >= p.a.max(p.b) {
            return Err(Error::Numerical(format!(
                "adaptive quadrature did not converge on [{a}, {b}] (error estimate {total_err:.2e})"
            )));
        }
        panels.push(gk15(&mut f, p.a, m)?);
        panels.push(gk15(&mut f, m, p.b)?);
    }
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    Ok(panels.into_iter().fold(T::zero(), |acc, p| acc + p.value))
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pnm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Tensor Gauss–Legendre rule on a rectangle, bisected into quarters until
/// a rule and the sum of its four children agree to `tol`.
pub struct RectQuadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    max_depth: u32,
}

impl RectQuadrature {
    pub fn new(order: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        RectQuadrature {
            nodes,
            weights,
            max_depth: 12,
        }
    }

    fn rule<F: Fn(f64, f64) -> f64>(&self, f: &F, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
        let (cx, hx) = (0.5 * (x0 + x1), 0.5 * (x1 - x0));
        let (cy, hy) = (0.5 * (y0 + y1), 0.5 * (y1 - y0));
        let mut sum = 0.0;
        for (xi, wi) in self.nodes.iter().zip(&self.weights) {
            let mut row = 0.0;
            for (yj, wj) in self.nodes.iter().zip(&self.weights) {
                row += wj * f(cx + hx * xi, cy + hy * yj);
            }
            sum += wi * row;
        }
        sum * hx * hy
    }

    /// ∫∫ f over [x0,x1]×[y0,y1] to absolute tolerance `tol`.
    pub fn integrate<F: Fn(f64, f64) -> f64>(
        &self,
        f: &F,
        x0: f64,
        x1: f64,
        y0: f64,
        y1: f64,
        tol: f64,
    ) -> Result<f64> {
        let coarse = self.rule(f, x0, x1, y0, y1);
        self.refine(f, [x0, x1, y0, y1], tol, coarse, 0)
    }

    fn refine<F: Fn(f64, f64) -> f64>(
        &self,
        f: &F,
        [x0, x1, y0, y1]: [f64; 4],
        tol: f64,
        coarse: f64,
        depth: u32,
    ) -> Result<f64> {
        let (xm, ym) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
        let quads = [
            [x0, xm, y0, ym],
            [xm, x1, y0, ym],
            [x0, xm, ym, y1],
            [xm, x1, ym, y1],
        ];
        let parts: Vec<f64> = quads
            .iter()
            .map(|q| self.rule(f, q[0], q[1], q[2], q[3]))
            .collect();
        let fine: f64 = parts.iter().sum();
        if !fine.is_finite() {
            return Err(Error::Numerical(
                "non-finite integrand in 2D quadrature".into(),
            ));
        }
        if (fine - coarse).abs() <= tol {
            return Ok(fine);
        }
        if depth >= self.max_depth {
            return Err(Error::Numerical(format!(
                "2D quadrature did not converge (|fine − coarse| = {:.2e})",
                (fine - coarse).abs()
            )));
        }
        let mut total = 0.0;
        for (q, c) in quads.iter().zip(parts) {
            total += self.refine(f, *q, 0.25 * tol, c, depth + 1)?;
        }
        Ok(total)
    }
}
