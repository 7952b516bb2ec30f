use crate::error::{domain, Result};
use crate::geometry::{GraphFrame, Point3, QuadBoundary};

/// Heights on a uniform (N+1)×(N+1) lattice over the base rectangle of a
/// [`GraphFrame`]. Index `i` runs along `frame.base[0]`, `j` along
/// `frame.base[1]`; storage is row-major in `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightGrid {
    n: usize,
    du: f64,
    dv: f64,
    heights: Vec<f64>,
    frame: GraphFrame,
    quad: Option<QuadBoundary>,
}

impl HeightGrid {
    pub fn zeros(n: usize, frame: GraphFrame) -> Result<Self> {
        if n < 1 {
            return domain("grid order must be at least 1");
        }
        let [lx, ly] = frame.extents;
        if !(lx > 0.0 && ly > 0.0) {
            return domain(format!("base extents must be positive, got {lx}×{ly}"));
        }
        Ok(HeightGrid {
            n,
            du: lx / n as f64,
            dv: ly / n as f64,
            heights: vec![0.0; (n + 1) * (n + 1)],
            frame,
            quad: None,
        })
    }

    /// Grid of `f(s, t)` sampled at the lattice points of `frame`.
    pub fn from_fn(n: usize, frame: GraphFrame, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut g = Self::zeros(n, frame)?;
        for i in 0..=n {
            for j in 0..=n {
                let (s, t) = g.base_point(i, j);
                g.set(i, j, f(s, t));
            }
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn du(&self) -> f64 {
        self.du
    }

    pub fn dv(&self) -> f64 {
        self.dv
    }

    pub fn frame(&self) -> GraphFrame {
        self.frame
    }

    /// Boundary this grid was seeded from, if any.
    pub fn quad(&self) -> Option<&QuadBoundary> {
        self.quad.as_ref()
    }

    pub(crate) fn set_quad(&mut self, q: QuadBoundary) {
        self.quad = Some(q);
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * (self.n + 1) + j
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.heights[self.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, h: f64) {
        let k = self.index(i, j);
        self.heights[k] = h;
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub(crate) fn heights_mut(&mut self) -> &mut [f64] {
        &mut self.heights
    }

    /// Base-plane coordinates of lattice point (i, j).
    pub fn base_point(&self, i: usize, j: usize) -> (f64, f64) {
        (i as f64 * self.du, j as f64 * self.dv)
    }

    /// Lattice point (i, j) as a point in space.
    pub fn world_point(&self, i: usize, j: usize) -> Point3 {
        let (s, t) = self.base_point(i, j);
        self.frame.to_world(s, t, self.get(i, j))
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.n || j == self.n
    }

    /// True when every boundary height is bitwise identical in both grids.
    pub fn same_boundary(&self, other: &HeightGrid) -> bool {
        if self.n != other.n {
            return false;
        }
        (0..=self.n).all(|i| {
            (0..=self.n).all(|j| {
                !self.is_boundary(i, j) || self.get(i, j).to_bits() == other.get(i, j).to_bits()
            })
        })
    }

    /// Largest absolute height, at least 1; a scale for step tolerances.
    pub fn height_scale(&self) -> f64 {
        self.heights.iter().fold(1.0f64, |m, h| m.max(h.abs()))
    }
}
