//! Damped Newton iteration for the mean-curvature numerator
//! F(z) = z_yy(1+z_x²) − 2 z_x z_y z_xy + z_xx(1+z_y²).
//!
//! Each step linearises F around the current grid with a nine-point stencil
//! whose coefficients come from the derivative field, solves C·dz = −F on
//! the interior nodes and adds `reduction_factor·dz`. Boundary heights are
//! never written.

use std::collections::VecDeque;

use crate::area::area_biquadratic;
use crate::chebyshev::{DerivativeField, DerivativeOps};
use crate::error::{domain, Error, Result};
use crate::geometry::{bilinear_height_grid, QuadBoundary};
use crate::grid::HeightGrid;
use crate::linalg::BandMatrix;
use crate::par::{map_range, Execution};

/// How the derivative field is computed inside the iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeMode {
    Chebyshev,
    /// Second-order finite differences; converges noticeably worse.
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Multiplier applied to every Newton correction, in (0, 1].
    pub reduction_factor: f64,
    pub max_iters: usize,
    /// Stop when max|F| falls to this level; `None` means
    /// 1e−8·(1 + max|F| of the seed).
    pub residual_tol: Option<f64>,
    /// Stop when max|dz| falls to this level.
    pub step_tol: f64,
    /// Residual-floor test: compare max|F| with its value this many
    /// iterations earlier...
    pub floor_window: usize,
    /// ...and stop when it moved by less than this fraction...
    pub floor_rel_change: f64,
    /// ...while max|dz| is below this multiple of the height scale.
    pub floor_step: f64,
    pub derivatives: DerivativeMode,
    pub execution: Execution,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            reduction_factor: 0.5,
            max_iters: 200,
            residual_tol: None,
            step_tol: 1e-10,
            floor_window: 10,
            floor_rel_change: 5e-2,
            floor_step: 1e-5,
            derivatives: DerivativeMode::Chebyshev,
            execution: Execution::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.reduction_factor > 0.0 && self.reduction_factor <= 1.0) {
            return domain(format!(
                "reduction factor {} not in (0,1]",
                self.reduction_factor
            ));
        }
        if let Some(t) = self.residual_tol {
            if !(t > 0.0) {
                return domain(format!("residual tolerance {t} must be positive"));
            }
        }
        if !(self.step_tol > 0.0 && self.floor_rel_change > 0.0 && self.floor_step > 0.0) {
            return domain("tolerances must be positive");
        }
        if self.max_iters == 0 {
            return domain("max_iters must be at least 1");
        }
        Ok(())
    }
}

/// F at every lattice point of the field.
pub fn residual_f(d: &DerivativeField) -> Result<Vec<f64>> {
    d.check_shape()?;
    Ok((0..d.zx.len())
        .map(|k| {
            let (zx, zy) = (d.zx[k], d.zy[k]);
            d.zyy[k] * (1.0 + zx * zx) - 2.0 * zx * zy * d.zxy[k] + d.zxx[k] * (1.0 + zy * zy)
        })
        .collect())
}

/// Right-hand side written out term by term:
/// b = 2 z_x z_xy z_y − z_xx(1+z_y²) − (1+z_x²) z_yy.
pub fn rhs_expanded(d: &DerivativeField) -> Vec<f64> {
    (0..d.zx.len())
        .map(|k| {
            let (zx, zy) = (d.zx[k], d.zy[k]);
            2.0 * zx * d.zxy[k] * zy - d.zxx[k] * (1.0 + zy * zy) - (1.0 + zx * zx) * d.zyy[k]
        })
        .collect()
}

/// Nine coefficients of the linearised operator at one node, indexed
/// `[di + 1][dj + 1]` for the neighbour (i+di, j+dj).
pub fn stencil(d: &DerivativeField, i: usize, j: usize) -> [[f64; 3]; 3] {
    let k = d.index(i, j);
    let (a, b) = (d.zx[k], d.zy[k]);
    let (axx, ayy, axy) = (d.zxx[k], d.zyy[k], d.zxy[k]);
    let (du, dv) = (d.du, d.dv);
    let corner = a * b / (2.0 * du * dv);
    let along_x = (1.0 + b * b) / (du * du);
    let along_y = (1.0 + a * a) / (dv * dv);
    let skew_x = (ayy * a - b * axy) / du;
    let skew_y = (b * axx - a * axy) / dv;
    [
        [-corner, along_x - skew_x, corner],
        [
            along_y - skew_y,
            -2.0 * along_x - 2.0 * along_y,
            along_y + skew_y,
        ],
        [corner, along_x + skew_x, -corner],
    ]
}

/// The linear system C·dz = b over the (N−1)² interior nodes, numbered
/// row-major: node (i, j) ↦ (i−1)(N−1) + (j−1).
#[derive(Debug, Clone)]
pub struct NewtonSystem {
    pub n: usize,
    pub matrix: BandMatrix,
    pub rhs: Vec<f64>,
}

impl NewtonSystem {
    pub fn unknown(&self, i: usize, j: usize) -> usize {
        (i - 1) * (self.n - 1) + (j - 1)
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.matrix.get(row, col)
    }
}

pub fn assemble_system(g: &HeightGrid, d: &DerivativeField) -> Result<NewtonSystem> {
    let n = g.n();
    if n < 4 {
        return domain(format!("grid order N={n} must be at least 4"));
    }
    if d.n != n {
        return Err(Error::Shape(format!(
            "field N={} does not match grid N={n}",
            d.n
        )));
    }
    let f = residual_f(d)?;
    let m = n - 1;
    let mut matrix = BandMatrix::zeros(m * m, m + 1, m + 1);
    let mut rhs = vec![0.0; m * m];
    for i in 1..n {
        for j in 1..n {
            let row = (i - 1) * m + (j - 1);
            let c = stencil(d, i, j);
            for (di, line) in c.iter().enumerate() {
                for (dj, value) in line.iter().enumerate() {
                    let (ii, jj) = (i + di - 1, j + dj - 1);
                    // boundary corrections are zero, so those columns drop out
                    if ii >= 1 && ii < n && jj >= 1 && jj < n {
                        matrix.set(row, (ii - 1) * m + (jj - 1), *value);
                    }
                }
            }
            rhs[row] = -f[d.index(i, j)];
        }
    }
    Ok(NewtonSystem { n, matrix, rhs })
}

/// Outcome of one Newton step.
#[derive(Debug, Clone)]
pub struct Step {
    pub grid: HeightGrid,
    /// max|F| over interior nodes of the grid the step started from.
    pub max_f: f64,
    /// max|dz| of the undamped correction.
    pub max_dz: f64,
}

/// Reusable Newton stepper; holds the derivative operators for one N.
#[derive(Debug, Clone)]
pub struct Newton {
    ops: DerivativeOps,
    execution: Execution,
}

impl Newton {
    pub fn new(n: usize, mode: DerivativeMode, execution: Execution) -> Result<Self> {
        let ops = match mode {
            DerivativeMode::Chebyshev => DerivativeOps::chebyshev(n)?,
            DerivativeMode::FiniteDifference => DerivativeOps::finite_difference(n)?,
        };
        Ok(Newton { ops, execution })
    }

    pub fn derivatives(&self, g: &HeightGrid) -> Result<DerivativeField> {
        self.ops.apply(g, self.execution)
    }

    /// max|F| over interior nodes.
    pub fn max_residual(&self, g: &HeightGrid) -> Result<f64> {
        let d = self.derivatives(g)?;
        Ok(interior_max(g.n(), &residual_f(&d)?))
    }

    pub fn step(&self, g: &HeightGrid, reduction: f64) -> Result<Step> {
        if g.heights().iter().any(|h| !h.is_finite()) {
            return Err(Error::Divergence("non-finite height in grid".into()));
        }
        let d = self.derivatives(g)?;
        let sys = assemble_system(g, &d)?;
        let max_f = interior_max(g.n(), &sys.rhs_as_grid(g.n()));
        let dz = sys.matrix.clone().factor()?.solve(&sys.rhs)?;
        let n = g.n();
        let mut next = g.clone();
        let heights = next.heights_mut();
        let mut max_dz = 0.0f64;
        for i in 1..n {
            for j in 1..n {
                let delta = dz[(i - 1) * (n - 1) + (j - 1)];
                max_dz = max_dz.max(delta.abs());
                heights[i * (n + 1) + j] += reduction * delta;
            }
        }
        if !max_dz.is_finite() || next.heights().iter().any(|h| !h.is_finite()) {
            return Err(Error::Divergence("Newton correction is not finite".into()));
        }
        Ok(Step {
            grid: next,
            max_f,
            max_dz,
        })
    }
}

impl NewtonSystem {
    fn rhs_as_grid(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; (n + 1) * (n + 1)];
        for i in 1..n {
            for j in 1..n {
                out[i * (n + 1) + j] = self.rhs[self.unknown(i, j)];
            }
        }
        out
    }
}

fn interior_max(n: usize, values: &[f64]) -> f64 {
    let mut m = 0.0f64;
    for i in 1..n {
        for j in 1..n {
            m = m.max(values[i * (n + 1) + j].abs());
        }
    }
    m
}

/// One damped Newton step with the configured derivative mode.
pub fn newton_step(g: &HeightGrid, cfg: &SolverConfig) -> Result<(HeightGrid, f64, f64)> {
    cfg.validate()?;
    let s = Newton::new(g.n(), cfg.derivatives, cfg.execution)?.step(g, cfg.reduction_factor)?;
    Ok((s.grid, s.max_f, s.max_dz))
}

/// Which test ended a converged run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopCriterion {
    ResidualTol,
    StepTol,
    /// max|F| stopped moving while the corrections became negligible.
    ResidualFloor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged(StopCriterion),
    MaxIters,
    Diverged,
}

impl SolveStatus {
    pub fn is_converged(&self) -> bool {
        matches!(self, SolveStatus::Converged(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            SolveStatus::Converged(_) => "Converged",
            SolveStatus::MaxIters => "MaxIters",
            SolveStatus::Diverged => "Diverged",
        }
    }

    pub fn criterion_label(&self) -> &'static str {
        match self {
            SolveStatus::Converged(StopCriterion::ResidualTol) => "residual_tol",
            SolveStatus::Converged(StopCriterion::StepTol) => "step_tol",
            SolveStatus::Converged(StopCriterion::ResidualFloor) => "residual_floor",
            _ => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub iterations: usize,
    /// max|F| of the grid entering each iteration.
    pub max_f: Vec<f64>,
    pub max_dz: Vec<f64>,
    pub status: SolveStatus,
    /// Reduction factor in force at the end (halved once on growth).
    pub reduction_factor: f64,
    pub residual_tol: f64,
}

/// Result of [`solve_detailed`]: final grid, history and the last few
/// iterates for the uncertainty estimate.
#[derive(Debug, Clone)]
pub struct Solution {
    pub grid: HeightGrid,
    pub report: ConvergenceReport,
    pub recent: Vec<HeightGrid>,
}

/// An iteration counts towards divergence only if max|F| grows by more
/// than this factor; smaller wobbles are noise at the residual floor.
const GROWTH_FACTOR: f64 = 1.01;

/// Number of trailing iterates kept for the area spread.
pub const SPREAD_WINDOW: usize = 5;

impl Solution {
    /// Spread (max − min) of biquadratic areas over the trailing iterates.
    pub fn area_spread(&self, tol: f64) -> Result<f64> {
        let areas = self
            .recent
            .iter()
            .map(|g| area_biquadratic(g, tol))
            .collect::<Result<Vec<f64>>>()?;
        let lo = areas.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = areas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok(if areas.is_empty() { 0.0 } else { hi - lo })
    }
}

/// Iterates from the bilinear seed until a stopping test fires.
pub fn solve(
    q: &QuadBoundary,
    n: usize,
    cfg: &SolverConfig,
) -> Result<(HeightGrid, ConvergenceReport)> {
    let s = solve_detailed(q, n, cfg)?;
    Ok((s.grid, s.report))
}

pub fn solve_detailed(q: &QuadBoundary, n: usize, cfg: &SolverConfig) -> Result<Solution> {
    cfg.validate()?;
    let seed = bilinear_height_grid(q, n)?;
    iterate(seed, cfg)
}

/// Runs the iteration from an arbitrary starting grid.
pub fn iterate(seed: HeightGrid, cfg: &SolverConfig) -> Result<Solution> {
    cfg.validate()?;
    let newton = Newton::new(seed.n(), cfg.derivatives, cfg.execution)?;
    let scale = seed.height_scale();
    let mut grid = seed;
    let mut reduction = cfg.reduction_factor;
    let mut halved = false;
    let mut growth = 0usize;
    let mut max_f = Vec::new();
    let mut max_dz = Vec::new();
    let mut recent: VecDeque<HeightGrid> = VecDeque::new();
    let mut residual_tol = cfg.residual_tol.unwrap_or(f64::NAN);
    let mut status = SolveStatus::MaxIters;

    for k in 0..cfg.max_iters {
        let step = match newton.step(&grid, reduction) {
            Ok(s) => s,
            Err(Error::Divergence(_)) => {
                status = SolveStatus::Diverged;
                break;
            }
            Err(e) => return Err(e),
        };
        if k == 0 && cfg.residual_tol.is_none() {
            residual_tol = 1e-8 * (1.0 + step.max_f);
        }
        max_f.push(step.max_f);
        max_dz.push(step.max_dz);
        if step.max_f <= residual_tol {
            status = SolveStatus::Converged(StopCriterion::ResidualTol);
            break;
        }
        grid = step.grid;
        if recent.len() == SPREAD_WINDOW {
            recent.pop_front();
        }
        recent.push_back(grid.clone());
        if step.max_dz <= cfg.step_tol {
            status = SolveStatus::Converged(StopCriterion::StepTol);
            break;
        }
        if k >= cfg.floor_window {
            let before = max_f[k - cfg.floor_window];
            if (before - step.max_f).abs() <= cfg.floor_rel_change * before
                && step.max_dz <= cfg.floor_step * scale
            {
                status = SolveStatus::Converged(StopCriterion::ResidualFloor);
                break;
            }
        }
        growth = if k > 0 && step.max_f > GROWTH_FACTOR * max_f[k - 1] {
            growth + 1
        } else {
            0
        };
        if growth >= 5 {
            if halved {
                status = SolveStatus::Diverged;
                break;
            }
            reduction *= 0.5;
            halved = true;
            growth = 0;
        }
    }
    if recent.is_empty() {
        recent.push_back(grid.clone());
    }
    let report = ConvergenceReport {
        iterations: max_f.len(),
        max_f,
        max_dz,
        status,
        reduction_factor: reduction,
        residual_tol,
    };
    Ok(Solution {
        grid,
        report,
        recent: recent.into(),
    })
}

/// Solves several boundaries, possibly concurrently; output order follows
/// the input order.
pub fn solve_many(
    quads: &[QuadBoundary],
    n: usize,
    cfg: &SolverConfig,
    exec: Execution,
) -> Vec<Result<Solution>> {
    // inner loops stay sequential when the outer loop is parallel
    let inner = SolverConfig {
        execution: if exec == Execution::Parallel {
            Execution::Sequential
        } else {
            cfg.execution
        },
        ..*cfg
    };
    map_range(quads.len(), exec, |k| solve_detailed(&quads[k], n, &inner))
}
