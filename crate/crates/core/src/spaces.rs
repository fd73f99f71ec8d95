//! Global discrete spaces: the P1-nonconforming velocity space with its
//! interior-vertex DOF map, the piecewise-constant pressure space with its
//! two color-sum constraints, and the fixed boundary lifting that carries the
//! lid data.
//!
//! A velocity field stores one coefficient pair per mesh vertex. Only the
//! interior vertices are solver unknowns (boundary basis functions vanish at
//! every boundary edge midpoint, so the homogeneous space needs none of
//! them); boundary slots exist so diagnostic fields — e.g. an interpolated
//! rigid rotation — can be represented too. The lid itself is not imposed
//! through vertex coefficients at all but through the separate
//! [`BoundaryLifting`].

use crate::elements::{p1nc_corner_value_ref, AffineMap, DssyRef, CORNER_GRAD_SIGNS, CORNER_OFFSETS};
use crate::mesh::Mesh;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpaceError {
    #[error("point ({x}, {y}) lies outside cell ({j}, {k})")]
    PointOutsideCell { x: f64, y: f64, j: usize, k: usize },
    #[error("coefficient vector has length {got}, expected {expected}")]
    BadLength { got: usize, expected: usize },
}

/// The four corner vertices of cell `(j,k)` in BL, BR, TR, TL order.
pub fn cell_corner_vertices(j: usize, k: usize) -> [(usize, usize); 4] {
    CORNER_OFFSETS.map(|(a, b)| (j - 1 + a, k - 1 + b))
}

// ---------------------------------------------------------------------------
// Velocity
// ---------------------------------------------------------------------------

/// Coefficients `(ξ, η)` of a P1-nonconforming vector field, one pair per
/// mesh vertex (boundary slots included, zero for homogeneous fields).
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    n: usize,
    xi: Vec<f64>,
    eta: Vec<f64>,
}

impl VelocityField {
    pub fn zeros(mesh: &Mesh) -> Self {
        let len = mesh.num_vertices();
        VelocityField { n: mesh.n(), xi: vec![0.0; len], eta: vec![0.0; len] }
    }

    /// Interpolates a smooth vector field: coefficient pair = `f(V)/2` at
    /// every vertex, which reproduces affine fields exactly cell by cell
    /// (the four corner basis functions sum to 2, not 1).
    pub fn interpolate<F: FnMut(f64, f64) -> (f64, f64)>(mesh: &Mesh, mut f: F) -> Self {
        let mut field = Self::zeros(mesh);
        let n = mesh.n();
        for k in 0..=n {
            for j in 0..=n {
                let (x, y) = mesh.vertex(j, k);
                let (u, v) = f(x, y);
                field.set(j, k, 0.5 * u, 0.5 * v);
            }
        }
        field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Scalar solver unknowns: `2(N−1)²`.
    pub fn num_dofs(&self) -> usize {
        2 * (self.n - 1) * (self.n - 1)
    }

    #[inline]
    fn vidx(&self, j: usize, k: usize) -> usize {
        k * (self.n + 1) + j
    }

    #[inline]
    pub fn xi(&self, j: usize, k: usize) -> f64 {
        self.xi[self.vidx(j, k)]
    }

    #[inline]
    pub fn eta(&self, j: usize, k: usize) -> f64 {
        self.eta[self.vidx(j, k)]
    }

    pub fn set(&mut self, j: usize, k: usize, xi: f64, eta: f64) {
        let i = self.vidx(j, k);
        self.xi[i] = xi;
        self.eta[i] = eta;
    }

    /// Unpacks a solver vector `[ξ-block, η-block]` over interior vertices.
    pub fn from_dof_vector(mesh: &Mesh, dofs: &[f64]) -> Result<Self, SpaceError> {
        let n = mesh.n();
        let m = (n - 1) * (n - 1);
        if dofs.len() != 2 * m {
            return Err(SpaceError::BadLength { got: dofs.len(), expected: 2 * m });
        }
        let mut field = Self::zeros(mesh);
        for k in 1..n {
            for j in 1..n {
                let d = interior_dof_index(n, j, k);
                field.set(j, k, dofs[d], dofs[m + d]);
            }
        }
        Ok(field)
    }

    /// Packs interior coefficients into a solver vector `[ξ-block, η-block]`.
    pub fn to_dof_vector(&self) -> Vec<f64> {
        let n = self.n;
        let m = (n - 1) * (n - 1);
        let mut dofs = vec![0.0; 2 * m];
        for k in 1..n {
            for j in 1..n {
                let d = interior_dof_index(n, j, k);
                dofs[d] = self.xi(j, k);
                dofs[m + d] = self.eta(j, k);
            }
        }
        dofs
    }

    /// Value of the represented field at a point of the given cell
    /// (one-sided trace on the cell boundary).
    pub fn eval_in_cell(&self, mesh: &Mesh, cell: (usize, usize), x: f64, y: f64) -> (f64, f64) {
        let (xc, yc) = mesh.cell_center(cell.0, cell.1);
        let s = 2.0 / mesh.h();
        let (xr, yr) = ((x - xc) * s, (y - yc) * s);
        let mut u = 0.0;
        let mut v = 0.0;
        for (c, &(vj, vk)) in cell_corner_vertices(cell.0, cell.1).iter().enumerate() {
            let phi = p1nc_corner_value_ref(c, xr, yr);
            u += self.xi(vj, vk) * phi;
            v += self.eta(vj, vk) * phi;
        }
        (u, v)
    }

    /// Constant gradient on a cell: rows are components, columns ∂x, ∂y.
    pub fn gradient_in_cell(&self, mesh: &Mesh, cell: (usize, usize)) -> [[f64; 2]; 2] {
        let h = mesh.h();
        let mut g = [[0.0; 2]; 2];
        for (c, &(vj, vk)) in cell_corner_vertices(cell.0, cell.1).iter().enumerate() {
            let [sx, sy] = CORNER_GRAD_SIGNS[c];
            let (xi, eta) = (self.xi(vj, vk), self.eta(vj, vk));
            g[0][0] += xi * sx / h;
            g[0][1] += xi * sy / h;
            g[1][0] += eta * sx / h;
            g[1][1] += eta * sy / h;
        }
        g
    }

    /// CSV of the interior (DOF-carrying) coefficients: `j,k,xi,eta`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,k,xi,eta\n");
        for k in 1..self.n {
            for j in 1..self.n {
                out.push_str(&format!("{},{},{:.17e},{:.17e}\n", j, k, self.xi(j, k), self.eta(j, k)));
            }
        }
        out
    }
}

/// Global index of interior vertex `(j,k)` (`1 ≤ j,k ≤ N−1`) within one
/// component block; row-major, deterministic.
#[inline]
pub fn interior_dof_index(n: usize, j: usize, k: usize) -> usize {
    debug_assert!((1..n).contains(&j) && (1..n).contains(&k));
    (k - 1) * (n - 1) + (j - 1)
}

/// Inverse of [`interior_dof_index`].
#[inline]
pub fn interior_dof_vertex(n: usize, d: usize) -> (usize, usize) {
    (d % (n - 1) + 1, d / (n - 1) + 1)
}

// ---------------------------------------------------------------------------
// Boundary lifting
// ---------------------------------------------------------------------------

/// The fixed discrete field carrying the lid data `(1,0)ᵗ`: one half times
/// the sum of the top-boundary vertex basis functions, plus one half times a
/// DSSY function on each top corner cell that tops up the lid value at the
/// two outermost top-edge midpoints. Its support is the top row of cells and
/// its second component is identically zero.
#[derive(Debug, Clone)]
pub struct BoundaryLifting {
    n: usize,
    h: f64,
    dssy: DssyRef,
}

impl BoundaryLifting {
    pub fn new(mesh: &Mesh) -> Self {
        BoundaryLifting { n: mesh.n(), h: mesh.h(), dssy: DssyRef::new(1).expect("ℓ=1 is valid") }
    }

    /// Whether the lifting is nonzero anywhere on this cell.
    #[inline]
    pub fn supports_cell(&self, cell: (usize, usize)) -> bool {
        cell.1 == self.n
    }

    fn map_for(&self, cell: (usize, usize)) -> AffineMap {
        let center = ((cell.0 as f64 - 0.5) * self.h, (cell.1 as f64 - 0.5) * self.h);
        AffineMap { center, scale: 0.5 * self.h }
    }

    /// One-sided value at a point of the given cell.
    pub fn value_in_cell(&self, cell: (usize, usize), x: f64, y: f64) -> (f64, f64) {
        if !self.supports_cell(cell) {
            return (0.0, 0.0);
        }
        let (j, n) = (cell.0, self.n);
        let map = self.map_for(cell);
        let (xr, yr) = map.to_reference(x, y);
        let mut u = 0.0;
        // vertex basis of the top-left corner vertex V_{j−1,N} (skip the
        // domain corner vertex j−1 = 0) and top-right vertex V_{j,N}
        if j >= 2 {
            u += 0.5 * p1nc_corner_value_ref(3, xr, yr);
        }
        if j <= n - 1 {
            u += 0.5 * p1nc_corner_value_ref(2, xr, yr);
        }
        // DSSY top-edge function on the two corner cells
        if j == 1 || j == n {
            u += 0.5 * self.dssy.value(2, xr, yr).expect("node 2 is valid");
        }
        (u, 0.0)
    }

    /// One-sided gradient at a point of the given cell; rows are components,
    /// columns ∂x, ∂y. The second row is zero.
    pub fn gradient_in_cell(&self, cell: (usize, usize), x: f64, y: f64) -> [[f64; 2]; 2] {
        if !self.supports_cell(cell) {
            return [[0.0; 2]; 2];
        }
        let (j, n) = (cell.0, self.n);
        let map = self.map_for(cell);
        let (xr, yr) = map.to_reference(x, y);
        let s = map.grad_scale();
        let mut gx = 0.0;
        let mut gy = 0.0;
        if j >= 2 {
            let [sx, sy] = CORNER_GRAD_SIGNS[3];
            gx += 0.5 * sx / self.h;
            gy += 0.5 * sy / self.h;
        }
        if j <= n - 1 {
            let [sx, sy] = CORNER_GRAD_SIGNS[2];
            gx += 0.5 * sx / self.h;
            gy += 0.5 * sy / self.h;
        }
        if j == 1 || j == n {
            let (_, g) = self.dssy.eval(2, xr, yr).expect("node 2 is valid");
            gx += 0.5 * g[0] * s;
            gy += 0.5 * g[1] * s;
        }
        [[gx, gy], [0.0, 0.0]]
    }

    /// Exact per-cell divergence integral `∫_Q ∇·u_b dx`: the DSSY terms
    /// integrate to zero (θ is even), leaving only the single vertex basis
    /// present on each corner cell: `+h/2` on the top-left cell, `−h/2` on
    /// the top-right cell, zero elsewhere.
    pub fn cell_divergence_integral(&self, cell: (usize, usize)) -> f64 {
        if !self.supports_cell(cell) {
            return 0.0;
        }
        if cell.0 == 1 {
            0.5 * self.h
        } else if cell.0 == self.n {
            -0.5 * self.h
        } else {
            0.0
        }
    }
}

/// Full discrete velocity `u_h = u_{0,h} + u_{b,h}` at a point of the hinted
/// cell. Errors if the point lies outside the cell (up to a 1e-12 snap);
/// points on the cell boundary give that cell's one-sided trace.
pub fn evaluate_velocity(
    mesh: &Mesh,
    field: &VelocityField,
    lifting: Option<&BoundaryLifting>,
    x: f64,
    y: f64,
    cell: (usize, usize),
) -> Result<(f64, f64), SpaceError> {
    check_in_cell(mesh, cell, x, y)?;
    let (mut u, mut v) = field.eval_in_cell(mesh, cell, x, y);
    if let Some(lift) = lifting {
        let (lu, lv) = lift.value_in_cell(cell, x, y);
        u += lu;
        v += lv;
    }
    Ok((u, v))
}

/// Gradient of the full discrete velocity at a point of the hinted cell;
/// rows are components, columns ∂x, ∂y.
pub fn evaluate_velocity_gradient(
    mesh: &Mesh,
    field: &VelocityField,
    lifting: Option<&BoundaryLifting>,
    x: f64,
    y: f64,
    cell: (usize, usize),
) -> Result<[[f64; 2]; 2], SpaceError> {
    check_in_cell(mesh, cell, x, y)?;
    let mut g = field.gradient_in_cell(mesh, cell);
    if let Some(lift) = lifting {
        let lg = lift.gradient_in_cell(cell, x, y);
        for r in 0..2 {
            for c in 0..2 {
                g[r][c] += lg[r][c];
            }
        }
    }
    Ok(g)
}

fn check_in_cell(mesh: &Mesh, cell: (usize, usize), x: f64, y: f64) -> Result<(), SpaceError> {
    let (j, k) = cell;
    let [x0, x1, y0, y1] = mesh.cell_bounds(j, k);
    let eps = 1e-12;
    if x < x0 - eps || x > x1 + eps || y < y0 - eps || y > y1 + eps {
        return Err(SpaceError::PointOutsideCell { x, y, j, k });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Pressure
// ---------------------------------------------------------------------------

/// Piecewise-constant pressure, one value per cell. Solver outputs satisfy
/// the two color constraints (zero sum over red cells and over black cells);
/// the type itself stores arbitrary cell values so that constraint
/// violations can be measured.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureField {
    n: usize,
    gamma: Vec<f64>,
}

impl PressureField {
    pub fn zeros(mesh: &Mesh) -> Self {
        PressureField { n: mesh.n(), gamma: vec![0.0; mesh.num_cells()] }
    }

    pub fn from_cell_values(mesh: &Mesh, gamma: Vec<f64>) -> Result<Self, SpaceError> {
        if gamma.len() != mesh.num_cells() {
            return Err(SpaceError::BadLength { got: gamma.len(), expected: mesh.num_cells() });
        }
        Ok(PressureField { n: mesh.n(), gamma })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Constrained dimension of the pressure space: `N² − 2`.
    pub fn num_dofs(&self) -> usize {
        self.n * self.n - 2
    }

    #[inline]
    pub fn value(&self, j: usize, k: usize) -> f64 {
        self.gamma[(k - 1) * self.n + (j - 1)]
    }

    pub fn set(&mut self, j: usize, k: usize, value: f64) {
        self.gamma[(k - 1) * self.n + (j - 1)] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.gamma
    }

    /// The two constraint functionals `(h²·Σ_red γ, h²·Σ_black γ)`; both are
    /// zero for members of the constrained pressure space.
    pub fn constraint_residuals(&self, mesh: &Mesh) -> (f64, f64) {
        let (red, black) = pressure_constraint_rows(mesh);
        let dot = |row: &[f64]| -> f64 { row.iter().zip(&self.gamma).map(|(r, g)| r * g).sum() };
        (dot(&red), dot(&black))
    }

    /// CSV of the cell values: `j,k,gamma`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,k,gamma\n");
        for k in 1..=self.n {
            for j in 1..=self.n {
                out.push_str(&format!("{},{},{:.17e}\n", j, k, self.value(j, k)));
            }
        }
        out
    }
}

/// The two pressure constraint rows over cell indices: the indicator of the
/// red cells and of the black cells, each scaled by the cell area h². Their
/// span contains both the constant and the checkerboard null modes.
pub fn pressure_constraint_rows(mesh: &Mesh) -> (Vec<f64>, Vec<f64>) {
    let n = mesh.n();
    let area = mesh.h() * mesh.h();
    let mut red = vec![0.0; n * n];
    let mut black = vec![0.0; n * n];
    for k in 1..=n {
        for j in 1..=n {
            let idx = (k - 1) * n + (j - 1);
            if (j + k) % 2 == 0 {
                red[idx] = area;
            } else {
                black[idx] = area;
            }
        }
    }
    (red, black)
}
