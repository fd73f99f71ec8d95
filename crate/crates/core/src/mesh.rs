//! Uniform square partition of the unit cavity Ω = (0,1)².
//!
//! Cells are `Q_jk = [(j−1)h, jh] × [(k−1)h, kh]` for `j,k ∈ 1..=N`, vertices
//! `V_jk = (jh, kh)` for `j,k ∈ 0..=N`, with `h = 1/N`. All index maps are
//! row-major with `j` fastest so sparse patterns and scan orders are
//! reproducible. The red/black cell coloring (red iff `j+k` even) underlies
//! both the pressure space and the per-cell divergence law.

use thiserror::Error;

/// Errors from mesh construction and index checks.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum MeshError {
    /// The scheme requires an even number of cells per side: the red/black
    /// coloring must split the boundary cells evenly for the corner lifting.
    #[error("cells per side must be even, got {0}")]
    OddResolution(usize),
    #[error("cells per side must be at least 2, got {0}")]
    TooCoarse(usize),
    #[error("cell index ({j},{k}) outside 1..={n}")]
    CellOutOfRange { j: usize, k: usize, n: usize },
}

/// Two-coloring of cells by index parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellColor {
    /// `j + k` even.
    Red,
    /// `j + k` odd.
    Black,
}

impl CellColor {
    /// Color of cell `Q_jk` (no range check; see [`Mesh::cell_color`]).
    #[inline]
    pub fn of(j: usize, k: usize) -> Self {
        if (j + k) % 2 == 0 {
            CellColor::Red
        } else {
            CellColor::Black
        }
    }
}

/// Which boundary side an edge lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

/// Axis of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Horizontal,
    Vertical,
}

/// One edge of the mesh: id, geometry, and the adjacent cells.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeInfo {
    pub id: usize,
    pub kind: EdgeKind,
    pub midpoint: (f64, f64),
    /// `Some(side)` for boundary edges, `None` for interior ones.
    pub boundary: Option<Side>,
    /// Adjacent cells as `(j,k)` pairs: `[below, above]` for horizontal
    /// edges, `[left, right]` for vertical ones. Boundary edges have one
    /// `None` slot.
    pub cells: [Option<(usize, usize)>; 2],
}

/// Uniform N×N partition of the unit square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh {
    n: usize,
    h: f64,
}

impl Mesh {
    /// Builds the N×N partition. `n` must be even (the red/black structure of
    /// the method needs it) and at least 2.
    pub fn new(n: usize) -> Result<Self, MeshError> {
        if n < 2 {
            return Err(MeshError::TooCoarse(n));
        }
        if n % 2 != 0 {
            return Err(MeshError::OddResolution(n));
        }
        // h is computed exactly once; h*n == 1.0 holds to machine precision
        // and exactly when n is a power of two.
        Ok(Mesh { n, h: 1.0 / n as f64 })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Mesh size h = 1/N.
    #[inline]
    pub fn h(&self) -> f64 {
        self.h
    }

    #[inline]
    pub fn num_cells(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        (self.n + 1) * (self.n + 1)
    }

    /// Vertices strictly inside Ω; these carry the velocity DOFs.
    #[inline]
    pub fn num_interior_vertices(&self) -> usize {
        (self.n - 1) * (self.n - 1)
    }

    /// Total number of edges, horizontal plus vertical: 2N(N+1).
    #[inline]
    pub fn num_edges(&self) -> usize {
        2 * self.n * (self.n + 1)
    }

    #[inline]
    pub fn num_boundary_edges(&self) -> usize {
        4 * self.n
    }

    /// Row-major cell id of `Q_jk`, `j,k ∈ 1..=N`, j fastest.
    #[inline]
    pub fn cell_index(&self, j: usize, k: usize) -> usize {
        debug_assert!((1..=self.n).contains(&j) && (1..=self.n).contains(&k));
        (k - 1) * self.n + (j - 1)
    }

    /// Inverse of [`Mesh::cell_index`].
    #[inline]
    pub fn cell_at(&self, idx: usize) -> (usize, usize) {
        debug_assert!(idx < self.num_cells());
        (idx % self.n + 1, idx / self.n + 1)
    }

    /// Row-major vertex id of `V_jk`, `j,k ∈ 0..=N`.
    #[inline]
    pub fn vertex_index(&self, j: usize, k: usize) -> usize {
        debug_assert!(j <= self.n && k <= self.n);
        k * (self.n + 1) + j
    }

    /// Coordinates of vertex `V_jk`.
    #[inline]
    pub fn vertex(&self, j: usize, k: usize) -> (f64, f64) {
        (j as f64 * self.h, k as f64 * self.h)
    }

    /// Barycenter of cell `Q_jk`.
    #[inline]
    pub fn cell_center(&self, j: usize, k: usize) -> (f64, f64) {
        ((j as f64 - 0.5) * self.h, (k as f64 - 0.5) * self.h)
    }

    /// `[x_lo, x_hi, y_lo, y_hi]` of cell `Q_jk`.
    #[inline]
    pub fn cell_bounds(&self, j: usize, k: usize) -> [f64; 4] {
        let h = self.h;
        [(j - 1) as f64 * h, j as f64 * h, (k - 1) as f64 * h, k as f64 * h]
    }

    /// Checked color lookup for cell `Q_jk`.
    pub fn cell_color(&self, j: usize, k: usize) -> Result<CellColor, MeshError> {
        if !(1..=self.n).contains(&j) || !(1..=self.n).contains(&k) {
            return Err(MeshError::CellOutOfRange { j, k, n: self.n });
        }
        Ok(CellColor::of(j, k))
    }

    /// The cell containing `(x,y)`, with points on mesh lines pushed to the
    /// lower-left cell and the result clamped into the mesh. Use
    /// [`Mesh::cells_containing`] when one-sided traces matter.
    pub fn containing_cell(&self, x: f64, y: f64) -> (usize, usize) {
        let clamp = |t: f64| -> usize {
            let j = (t / self.h).floor() as isize + 1;
            j.clamp(1, self.n as isize) as usize
        };
        (clamp(x), clamp(y))
    }

    /// All cells whose closure contains `(x,y)`: 1 for cell-interior points,
    /// 2 for edge-interior points, 4 for vertices. Used to average one-sided
    /// traces of broken functions.
    pub fn cells_containing(&self, x: f64, y: f64) -> Vec<(usize, usize)> {
        let mut js = Vec::with_capacity(2);
        let mut ks = Vec::with_capacity(2);
        let axis = |t: f64, out: &mut Vec<usize>| {
            let s = t / self.h;
            let r = s.round();
            // On a mesh line (within an absolute grid tolerance) both sides count.
            if (s - r).abs() < 1e-12 {
                let i = r as isize;
                if i >= 1 {
                    out.push(i as usize);
                }
                if i < self.n as isize && i >= 0 {
                    out.push(i as usize + 1);
                }
            } else {
                let i = (s.floor() as isize + 1).clamp(1, self.n as isize);
                out.push(i as usize);
            }
        };
        axis(x, &mut js);
        axis(y, &mut ks);
        let mut cells = Vec::with_capacity(js.len() * ks.len());
        for &k in &ks {
            for &j in &js {
                cells.push((j, k));
            }
        }
        cells
    }

    /// Enumerates all edges with midpoints, boundary flags, and adjacency.
    /// Horizontal edges come first, then vertical, both row-major.
    pub fn edge_midpoints(&self) -> Vec<EdgeInfo> {
        let n = self.n;
        let h = self.h;
        let mut edges = Vec::with_capacity(self.num_edges());
        // Horizontal edge (j,k): [(j−1)h, jh] × {kh}, j ∈ 1..=N, k ∈ 0..=N.
        for k in 0..=n {
            for j in 1..=n {
                let boundary = match k {
                    0 => Some(Side::Bottom),
                    _ if k == n => Some(Side::Top),
                    _ => None,
                };
                edges.push(EdgeInfo {
                    id: k * n + (j - 1),
                    kind: EdgeKind::Horizontal,
                    midpoint: ((j as f64 - 0.5) * h, k as f64 * h),
                    boundary,
                    cells: [
                        (k > 0).then_some((j, k)),
                        (k < n).then_some((j, k + 1)),
                    ],
                });
            }
        }
        // Vertical edge (j,k): {jh} × [(k−1)h, kh], j ∈ 0..=N, k ∈ 1..=N.
        let voff = n * (n + 1);
        for k in 1..=n {
            for j in 0..=n {
                let boundary = match j {
                    0 => Some(Side::Left),
                    _ if j == n => Some(Side::Right),
                    _ => None,
                };
                edges.push(EdgeInfo {
                    id: voff + (k - 1) * (n + 1) + j,
                    kind: EdgeKind::Vertical,
                    midpoint: (j as f64 * h, (k as f64 - 0.5) * h),
                    boundary,
                    cells: [
                        (j > 0).then_some((j, k)),
                        (j < n).then_some((j + 1, k)),
                    ],
                });
            }
        }
        edges
    }
}
