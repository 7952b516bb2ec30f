//! Chebyshev polynomials, discrete fits and spectral derivatives of grid data.
//!
//! Grid data live on a uniform lattice while the fits need samples at the
//! zeros of T_{N+1}. Each grid line is therefore resampled onto the nodes with
//! a not-a-knot cubic spline, fitted with
//! c_n = 2/(N+1) Σ_m v_m T_n(x_m), and the interpolant
//! ẑ(x) = Σ_n c_n T_n(x) − c₀/2 (or its derivatives) is evaluated back on the
//! lattice. Pass one runs along the second grid index, pass two along the
//! first; because every step is linear, the whole pipeline is a fixed matrix
//! per derivative order, built once by [`DerivativeOps::chebyshev`].
//!
//! Node arrays are indexed 0..=N throughout.

use crate::error::{domain, Error, Result};
use crate::grid::HeightGrid;
use crate::linalg::BandMatrix;
use crate::par::{map_range, Execution};

const RANGE_SLACK: f64 = 1e-12;

fn check_unit_interval(x: f64) -> Result<f64> {
    if x.is_nan() || x < -1.0 - RANGE_SLACK || x > 1.0 + RANGE_SLACK {
        return domain(format!("x={x} outside [-1,1]"));
    }
    Ok(x.clamp(-1.0, 1.0))
}

/// T_0..=T_nmax at x, together with first and second derivatives, from the
/// three-term recurrence and its derivatives:
/// T'_{k+1} = 2T_k + 2xT'_k − T'_{k−1}, T''_{k+1} = 4T'_k + 2xT''_k − T''_{k−1}.
/// No division by 1−x², so the endpoints need no special case.
pub(crate) fn cheb_table(nmax: usize, x: f64) -> [Vec<f64>; 3] {
    let mut t = vec![0.0; nmax + 1];
    let mut dt = vec![0.0; nmax + 1];
    let mut ddt = vec![0.0; nmax + 1];
    t[0] = 1.0;
    if nmax >= 1 {
        t[1] = x;
        dt[1] = 1.0;
    }
    for k in 1..nmax {
        t[k + 1] = 2.0 * x * t[k] - t[k - 1];
        dt[k + 1] = 2.0 * t[k] + 2.0 * x * dt[k] - dt[k - 1];
        ddt[k + 1] = 4.0 * dt[k] + 2.0 * x * ddt[k] - ddt[k - 1];
    }
    [t, dt, ddt]
}

/// T_n(x) for x ∈ [−1, 1].
pub fn cheb_eval(n: usize, x: f64) -> Result<f64> {
    let x = check_unit_interval(x)?;
    let (mut a, mut b) = (1.0, x);
    if n == 0 {
        return Ok(a);
    }
    for _ in 1..n {
        let c = 2.0 * x * b - a;
        a = b;
        b = c;
    }
    Ok(b)
}

/// Zeros x_k = cos(π(k+½)/n), k = 0..n, of T_n in decreasing order.
pub fn cheb_zeros(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return domain("T_0 has no zeros");
    }
    let nf = n as f64;
    Ok((0..n)
        .map(|k| (std::f64::consts::PI * (k as f64 + 0.5) / nf).cos())
        .collect())
}

/// Which base-plane direction a series runs along.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChebAxis {
    X,
    Y,
}

/// Chebyshev coefficients of one grid line, plus the affine map from the
/// physical interval `[lo, hi]` onto [−1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries {
    coeffs: Vec<f64>,
    pub axis: ChebAxis,
    pub lo: f64,
    pub hi: f64,
}

impl ChebSeries {
    pub fn from_coeffs(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Shape(
                "a series needs at least one coefficient".into(),
            ));
        }
        Ok(ChebSeries {
            coeffs,
            axis: ChebAxis::X,
            lo: -1.0,
            hi: 1.0,
        })
    }

    /// Attaches the physical interval the series represents.
    pub fn on_interval(mut self, axis: ChebAxis, lo: f64, hi: f64) -> Result<Self> {
        if !(hi > lo) {
            return domain(format!("empty interval [{lo},{hi}]"));
        }
        self.axis = axis;
        self.lo = lo;
        self.hi = hi;
        Ok(self)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Maps a physical coordinate onto [−1, 1].
    pub fn to_unit(&self, t: f64) -> f64 {
        (2.0 * t - self.lo - self.hi) / (self.hi - self.lo)
    }

    /// ẑ(x) = Σ c_n T_n(x) − c₀/2.
    pub fn interp(&self, x: f64) -> Result<f64> {
        let x = check_unit_interval(x)?;
        let [t, _, _] = cheb_table(self.order(), x);
        Ok(dot(&self.coeffs, &t) - 0.5 * self.coeffs[0])
    }

    /// Σ c_n T_n^{(order)}(x) for order 1 or 2.
    pub fn deriv(&self, x: f64, order: u8) -> Result<f64> {
        if !(order == 1 || order == 2) {
            return domain(format!("derivative order {order} not in {{1,2}}"));
        }
        let x = check_unit_interval(x)?;
        let table = cheb_table(self.order(), x);
        Ok(dot(&self.coeffs, &table[order as usize]))
    }

    /// Derivative with respect to the physical coordinate.
    pub fn deriv_physical(&self, t: f64, order: u8) -> Result<f64> {
        let scale = 2.0 / (self.hi - self.lo);
        Ok(self.deriv(self.to_unit(t), order)? * scale.powi(order as i32))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Fits values sampled at the zeros of T_{N+1} (ordered as [`cheb_zeros`]).
pub fn cheb_fit(values: &[f64]) -> Result<ChebSeries> {
    if values.is_empty() {
        return Err(Error::Shape("cannot fit an empty sample".into()));
    }
    let m = values.len();
    let nodes = cheb_zeros(m)?;
    let mut coeffs = vec![0.0; m];
    for (x, v) in nodes.iter().zip(values) {
        let [t, _, _] = cheb_table(m - 1, *x);
        for (c, tn) in coeffs.iter_mut().zip(&t) {
            *c += v * tn;
        }
    }
    let w = 2.0 / m as f64;
    coeffs.iter_mut().for_each(|c| *c *= w);
    ChebSeries::from_coeffs(coeffs)
}

pub fn cheb_interp(s: &ChebSeries, x: f64) -> Result<f64> {
    s.interp(x)
}

pub fn cheb_deriv(s: &ChebSeries, x: f64, order: u8) -> Result<f64> {
    s.deriv(x, order)
}

/// Grid → node resampling matrix: row k holds the weights that the
/// not-a-knot cubic spline through the uniform points t_i = −1 + 2i/N gives
/// at the k-th Chebyshev zero.
fn resample_matrix(n: usize) -> Result<Square> {
    let m = n + 1;
    let h = 2.0 / n as f64;
    // second-derivative moments M = S·y
    let mut band = BandMatrix::zeros(m, 2, 2);
    for (row, sign) in [(0usize, 1isize), (n, -1isize)] {
        for (k, c) in [1.0, -2.0, 1.0].iter().enumerate() {
            band.set(row, (row as isize + sign * k as isize) as usize, *c);
        }
    }
    for i in 1..n {
        band.set(i, i - 1, 1.0);
        band.set(i, i, 4.0);
        band.set(i, i + 1, 1.0);
    }
    let lu = band.factor()?;
    let mut moments = Square::zeros(m);
    for col in 0..m {
        // second difference of the unit vector e_col, interior rows only
        let mut rhs = vec![0.0; m];
        for (i, c) in [(col.wrapping_sub(1), 1.0), (col, -2.0), (col + 1, 1.0)] {
            if (1..n).contains(&i) {
                rhs[i] = 6.0 / (h * h) * c;
            }
        }
        for (i, v) in lu.solve(&rhs)?.into_iter().enumerate() {
            moments.a[i * m + col] = v;
        }
    }
    let mut out = Square::zeros(m);
    for (k, x) in cheb_zeros(m)?.iter().enumerate() {
        let cell = (((x + 1.0) / h).floor() as usize).min(n - 1);
        let b = (x - (-1.0 + cell as f64 * h)) / h;
        let a = 1.0 - b;
        let (ca, cb) = ((a * a * a - a) * h * h / 6.0, (b * b * b - b) * h * h / 6.0);
        let row = &mut out.a[k * m..(k + 1) * m];
        row[cell] += a;
        row[cell + 1] += b;
        for col in 0..m {
            row[col] += ca * moments.a[cell * m + col] + cb * moments.a[(cell + 1) * m + col];
        }
    }
    Ok(out)
}

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
struct Square {
    n: usize,
    a: Vec<f64>,
}

impl Square {
    fn zeros(n: usize) -> Self {
        Square {
            n,
            a: vec![0.0; n * n],
        }
    }

    fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = 1.0;
        }
        m
    }

    fn mul(&self, o: &Square) -> Square {
        let n = self.n;
        let mut out = Square::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.a[i * n + k];
                if aik != 0.0 {
                    for j in 0..n {
                        out.a[i * n + j] += aik * o.a[k * n + j];
                    }
                }
            }
        }
        out
    }
}

/// Linear operators taking one grid line of heights to the smoothed values,
/// first and second derivatives on the same lattice (unit-interval scaling).
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeOps {
    n: usize,
    ops: [Square; 3],
}

impl DerivativeOps {
    /// The resample → fit → evaluate pipeline as three (N+1)×(N+1) matrices.
    pub fn chebyshev(n: usize) -> Result<Self> {
        if n < 4 {
            return domain(format!(
                "grid order N={n} too small for second derivatives (need ≥4)"
            ));
        }
        let m = n + 1;
        let nodes = cheb_zeros(m)?;
        let resample = resample_matrix(n)?;
        // nodes → coefficients
        let mut fit = Square::zeros(m);
        for (k, x) in nodes.iter().enumerate() {
            let [t, _, _] = cheb_table(n, *x);
            for (deg, tn) in t.iter().enumerate() {
                fit.a[deg * m + k] = 2.0 / m as f64 * tn;
            }
        }
        // coefficients → lattice values and derivatives
        let mut eval = [Square::zeros(m), Square::zeros(m), Square::zeros(m)];
        for i in 0..m {
            let x = -1.0 + 2.0 * i as f64 / n as f64;
            let table = cheb_table(n, x);
            for (order, e) in eval.iter_mut().enumerate() {
                e.a[i * m..(i + 1) * m].copy_from_slice(&table[order]);
            }
            eval[0].a[i * m] -= 0.5;
        }
        let coef = fit.mul(&resample);
        let ops = eval.map(|e| e.mul(&coef));
        Ok(DerivativeOps { n, ops })
    }

    /// Second-order centred differences (one-sided at the ends) on the same
    /// unit-interval lattice; the smoothing operator is the identity.
    pub fn finite_difference(n: usize) -> Result<Self> {
        if n < 4 {
            return domain(format!(
                "grid order N={n} too small for second derivatives (need ≥4)"
            ));
        }
        let m = n + 1;
        let h = 2.0 / n as f64;
        let mut d1 = Square::zeros(m);
        let mut d2 = Square::zeros(m);
        for i in 1..n {
            d1.a[i * m + i - 1] = -0.5 / h;
            d1.a[i * m + i + 1] = 0.5 / h;
            d2.a[i * m + i - 1] = 1.0 / (h * h);
            d2.a[i * m + i] = -2.0 / (h * h);
            d2.a[i * m + i + 1] = 1.0 / (h * h);
        }
        for (row, sign, step) in [(0usize, 1.0, 1isize), (n, -1.0, -1isize)] {
            let at = |k: isize| (row as isize + k * step) as usize;
            d1.a[row * m + at(0)] = sign * -1.5 / h;
            d1.a[row * m + at(1)] = sign * 2.0 / h;
            d1.a[row * m + at(2)] = sign * -0.5 / h;
            for (k, c) in [2.0, -5.0, 4.0, -1.0].iter().enumerate() {
                d2.a[row * m + at(k as isize)] = c / (h * h);
            }
        }
        Ok(DerivativeOps {
            n,
            ops: [Square::identity(m), d1, d2],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// out = A_a · Z · A_bᵀ, i.e. order `b` along j (pass one) then order `a`
    /// along i (pass two).
    fn apply_pair(&self, z: &[f64], a: usize, b: usize, exec: Execution) -> Vec<f64> {
        let m = self.n + 1;
        let (opa, opb) = (&self.ops[a].a, &self.ops[b].a);
        let pass1: Vec<f64> = map_range(m, exec, |i| {
            (0..m)
                .map(|j| dot(&z[i * m..(i + 1) * m], &opb[j * m..(j + 1) * m]))
                .collect::<Vec<f64>>()
        })
        .concat();
        map_range(m, exec, |i| {
            let row = &opa[i * m..(i + 1) * m];
            (0..m)
                .map(|j| (0..m).map(|k| row[k] * pass1[k * m + j]).sum::<f64>())
                .collect::<Vec<f64>>()
        })
        .concat()
    }

    /// Applies the operators to a grid and converts to physical derivatives.
    pub fn apply(&self, g: &HeightGrid, exec: Execution) -> Result<DerivativeField> {
        if g.n() != self.n {
            return Err(Error::Shape(format!(
                "operators built for N={} applied to grid with N={}",
                self.n,
                g.n()
            )));
        }
        let n = self.n as f64;
        let sx = 2.0 / (g.du() * n);
        let sy = 2.0 / (g.dv() * n);
        let z = g.heights();
        let scaled = |v: Vec<f64>, s: f64| v.into_iter().map(|x| x * s).collect::<Vec<_>>();
        Ok(DerivativeField {
            n: self.n,
            du: g.du(),
            dv: g.dv(),
            z: self.apply_pair(z, 0, 0, exec),
            zx: scaled(self.apply_pair(z, 1, 0, exec), sx),
            zy: scaled(self.apply_pair(z, 0, 1, exec), sy),
            zxx: scaled(self.apply_pair(z, 2, 0, exec), sx * sx),
            zyy: scaled(self.apply_pair(z, 0, 2, exec), sy * sy),
            zxy: scaled(self.apply_pair(z, 1, 1, exec), sx * sy),
        })
    }
}

/// Smoothed heights and their physical base-plane derivatives on the lattice
/// of the source grid. All arrays are row-major (N+1)×(N+1).
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeField {
    pub n: usize,
    pub du: f64,
    pub dv: f64,
    pub z: Vec<f64>,
    pub zx: Vec<f64>,
    pub zy: Vec<f64>,
    pub zxx: Vec<f64>,
    pub zyy: Vec<f64>,
    pub zxy: Vec<f64>,
}

impl DerivativeField {
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * (self.n + 1) + j
    }

    pub(crate) fn check_shape(&self) -> Result<()> {
        let len = (self.n + 1) * (self.n + 1);
        let arrays = [&self.z, &self.zx, &self.zy, &self.zxx, &self.zyy, &self.zxy];
        if arrays.iter().any(|a| a.len() != len) {
            return Err(Error::Shape(format!(
                "derivative arrays must have {len} entries"
            )));
        }
        Ok(())
    }
}

/// Chebyshev derivatives of a grid (the two-pass pipeline).
pub fn grid_derivatives(g: &HeightGrid) -> Result<DerivativeField> {
    DerivativeOps::chebyshev(g.n())?.apply(g, Execution::default())
}

/// Finite-difference derivatives of a grid, for comparison runs.
pub fn fd_derivatives(g: &HeightGrid) -> Result<DerivativeField> {
    DerivativeOps::finite_difference(g.n())?.apply(g, Execution::default())
}

/// Globally smooth interpolant of a grid: the tensor-product Chebyshev series
/// produced by the same resample-and-fit steps, evaluable anywhere on the base
/// rectangle.
#[derive(Debug, Clone)]
pub struct ChebSurface {
    n: usize,
    lx: f64,
    ly: f64,
    coeffs: Vec<f64>,
}

impl ChebSurface {
    pub fn from_grid(g: &HeightGrid) -> Result<Self> {
        let n = g.n();
        if n < 4 {
            return domain("grid order must be at least 4");
        }
        let m = n + 1;
        let mut fit = Square::zeros(m);
        for (k, x) in cheb_zeros(m)?.iter().enumerate() {
            let [t, _, _] = cheb_table(n, *x);
            for (deg, tn) in t.iter().enumerate() {
                fit.a[deg * m + k] = 2.0 / m as f64 * tn;
            }
        }
        let coef = fit.mul(&resample_matrix(n)?);
        let z = Square {
            n: m,
            a: g.heights().to_vec(),
        };
        let mut ct = coef.clone();
        for i in 0..m {
            for j in 0..m {
                ct.a[i * m + j] = coef.a[j * m + i];
            }
        }
        let c = coef.mul(&z).mul(&ct);
        Ok(ChebSurface {
            n,
            lx: g.du() * n as f64,
            ly: g.dv() * n as f64,
            coeffs: c.a,
        })
    }

    /// Height at base coordinates (s, t), clamped to the rectangle.
    pub fn height(&self, s: f64, t: f64) -> f64 {
        let m = self.n + 1;
        let xi = (2.0 * s / self.lx - 1.0).clamp(-1.0, 1.0);
        let eta = (2.0 * t / self.ly - 1.0).clamp(-1.0, 1.0);
        let [mut tx, _, _] = cheb_table(self.n, xi);
        let [mut ty, _, _] = cheb_table(self.n, eta);
        tx[0] = 0.5;
        ty[0] = 0.5;
        (0..m)
            .map(|a| tx[a] * dot(&self.coeffs[a * m..(a + 1) * m], &ty))
            .sum()
    }
}
