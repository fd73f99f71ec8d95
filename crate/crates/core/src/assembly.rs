//! Assembly of the broken bilinear forms on the uniform mesh: the ν-scaled
//! diffusion block, the divergence coupling, the convection block frozen at a
//! transport field, the two pressure constraint rows, and the right-hand
//! side contributions of the boundary lifting.
//!
//! Both velocity components see the same scalar diffusion and convection
//! blocks (the forms act componentwise with a shared transport field), so
//! those are assembled once as `(N−1)² × (N−1)²` scalar matrices. The
//! divergence coupling differs per component and is kept as two blocks
//! `b_x`, `b_y` with cell-indexed rows; the full matrix is `B = [b_x  b_y]`.

use crate::elements::{gauss_rule, p1nc_corner_value_ref, AffineMap, QuadratureRule, CORNER_GRAD_SIGNS, DEFAULT_NG};
use crate::linalg::CsrMatrix;
use crate::mesh::Mesh;
use crate::spaces::{
    cell_corner_vertices, interior_dof_index, pressure_constraint_rows, BoundaryLifting,
    VelocityField,
};

/// The assembled constrained Oseen saddle system
///
/// ```text
/// [ K   Bᵀ  0 ] [u]   [f]        K = νA + N_w   (per velocity component)
/// [ B   0   Cᵀ] [p] = [g]
/// [ 0   C   0 ] [μ]   [0]
/// ```
///
/// with `B` storing the form `b_h` including its minus sign
/// (`(Bu)_cell = −∫_cell ∇·u`) and `C` the two h²-scaled color indicator
/// rows whose span contains the constant and checkerboard pressure modes.
#[derive(Debug, Clone)]
pub struct SaddleSystem {
    pub mesh: Mesh,
    pub nu: f64,
    /// Scalar diffusion block, ν included.
    pub a: CsrMatrix,
    /// Scalar convection block for the frozen transport field.
    pub n_w: CsrMatrix,
    /// Divergence coupling of the x-velocity coefficients.
    pub b_x: CsrMatrix,
    /// Divergence coupling of the y-velocity coefficients.
    pub b_y: CsrMatrix,
    /// Red constraint row over cells (h²·indicator).
    pub c_red: Vec<f64>,
    /// Black constraint row over cells (h²·indicator).
    pub c_black: Vec<f64>,
    /// Velocity right-hand side `[x-block, y-block]`, length `2(N−1)²`.
    pub f: Vec<f64>,
    /// Pressure right-hand side over cells, length `N²`.
    pub g: Vec<f64>,
}

impl SaddleSystem {
    /// Scalar velocity block `K = νA + N_w` shared by both components.
    pub fn k_matrix(&self) -> CsrMatrix {
        self.a.add(&self.n_w).expect("blocks share the interior-DOF shape")
    }

    /// Number of scalar velocity DOFs per component.
    pub fn velocity_block_size(&self) -> usize {
        let n = self.mesh.n();
        (n - 1) * (n - 1)
    }

    /// `y = B u` for a packed velocity vector `[x-block, y-block]`.
    pub fn apply_b(&self, u: &[f64]) -> Vec<f64> {
        let m = self.velocity_block_size();
        let mut y = self.b_x.matvec(&u[..m]);
        self.b_y.matvec_add(1.0, &u[m..], &mut y);
        y
    }

    /// `y = Bᵀ q` packed as `[x-block, y-block]`.
    pub fn apply_b_transpose(&self, q: &[f64]) -> Vec<f64> {
        let m = self.velocity_block_size();
        let mut y = vec![0.0; 2 * m];
        self.b_x.transpose_matvec_into(q, &mut y[..m]);
        self.b_y.transpose_matvec_into(q, &mut y[m..]);
        y
    }
}

/// Assembles the full saddle system at transport field `w` (pass the
/// homogeneous coefficients; the lifting, when given, is added to the
/// transport pointwise and drives the right-hand side).
pub fn assemble_system(
    mesh: &Mesh,
    nu: f64,
    w: &VelocityField,
    lifting: Option<&BoundaryLifting>,
) -> SaddleSystem {
    let (b_x, b_y) = assemble_b(mesh);
    let (c_red, c_black) = pressure_constraint_rows(mesh);
    let (f, g) = assemble_rhs(mesh, nu, w, lifting);
    SaddleSystem {
        mesh: *mesh,
        nu,
        a: assemble_a(mesh, nu),
        n_w: assemble_convection(mesh, w, lifting),
        b_x,
        b_y,
        c_red,
        c_black,
        f,
        g,
    }
}

/// ν-scaled scalar diffusion block: `a_h(u, v) = ν Σ_Q ∫_Q ∇u·∇v`. Basis
/// gradients are constant per cell, so entries are exact: each shared cell
/// contributes `ν·(s_r·s_t)` with the corner sign vectors — `2ν` on the
/// diagonal, `−2ν` for opposite corners, `0` for adjacent ones.
pub fn assemble_a(mesh: &Mesh, nu: f64) -> CsrMatrix {
    let n = mesh.n();
    let m = (n - 1) * (n - 1);
    let mut triplets = Vec::with_capacity(5 * m);
    for k in 1..=n {
        for j in 1..=n {
            let corners = cell_corner_vertices(j, k);
            for (cr, &(rj, rk)) in corners.iter().enumerate() {
                if !is_interior(n, rj, rk) {
                    continue;
                }
                let row = interior_dof_index(n, rj, rk);
                for (ct, &(tj, tk)) in corners.iter().enumerate() {
                    if !is_interior(n, tj, tk) {
                        continue;
                    }
                    let dot = CORNER_GRAD_SIGNS[cr][0] * CORNER_GRAD_SIGNS[ct][0]
                        + CORNER_GRAD_SIGNS[cr][1] * CORNER_GRAD_SIGNS[ct][1];
                    if dot != 0.0 {
                        triplets.push((row, interior_dof_index(n, tj, tk), nu * dot));
                    }
                }
            }
        }
    }
    CsrMatrix::from_triplets(m, m, triplets)
}

/// Divergence blocks with the form's minus sign:
/// `(b_x)_{cell,v} = −∫_cell ∂φ_v/∂x = −s_x·h`, likewise for y.
pub fn assemble_b(mesh: &Mesh) -> (CsrMatrix, CsrMatrix) {
    let n = mesh.n();
    let h = mesh.h();
    let m = (n - 1) * (n - 1);
    let cells = n * n;
    let mut tx = Vec::with_capacity(4 * cells);
    let mut ty = Vec::with_capacity(4 * cells);
    for k in 1..=n {
        for j in 1..=n {
            let row = mesh.cell_index(j, k);
            for (c, &(vj, vk)) in cell_corner_vertices(j, k).iter().enumerate() {
                if !is_interior(n, vj, vk) {
                    continue;
                }
                let col = interior_dof_index(n, vj, vk);
                let [sx, sy] = CORNER_GRAD_SIGNS[c];
                tx.push((row, col, -sx * h));
                ty.push((row, col, -sy * h));
            }
        }
    }
    (CsrMatrix::from_triplets(cells, m, tx), CsrMatrix::from_triplets(cells, m, ty))
}

/// Scalar convection block `c_h(w; u, v) = Σ_Q ∫_Q (w·∇u) v` frozen at
/// `w = w_hom (+ lifting)`, assembled by tensor Gauss quadrature.
pub fn assemble_convection(
    mesh: &Mesh,
    w: &VelocityField,
    lifting: Option<&BoundaryLifting>,
) -> CsrMatrix {
    let n = mesh.n();
    let h = mesh.h();
    let m = (n - 1) * (n - 1);
    let rule = gauss_rule(DEFAULT_NG);
    let phi_ref = reference_values(&rule);
    let mut triplets = Vec::with_capacity(16 * n * n);
    let mut local = [[0.0f64; 4]; 4];
    for k in 1..=n {
        for j in 1..=n {
            let corners = cell_corner_vertices(j, k);
            let map = AffineMap::for_cell(mesh, j, k);
            let jac = map.jacobian();
            for row in local.iter_mut() {
                row.fill(0.0);
            }
            for (q, &(xr, yr, wq)) in rule.points.iter().enumerate() {
                // transport field at the quadrature point
                let mut wx = 0.0;
                let mut wy = 0.0;
                for (c, &(vj, vk)) in corners.iter().enumerate() {
                    let phi = phi_ref[q][c];
                    wx += w.xi(vj, vk) * phi;
                    wy += w.eta(vj, vk) * phi;
                }
                if let Some(lift) = lifting {
                    if lift.supports_cell((j, k)) {
                        let (x, y) = map.to_physical(xr, yr);
                        let (lu, lv) = lift.value_in_cell((j, k), x, y);
                        wx += lu;
                        wy += lv;
                    }
                }
                let scale = wq * jac;
                for (ct, signs) in CORNER_GRAD_SIGNS.iter().enumerate() {
                    // (w·∇φ_t) is constant in the trial corner
                    let conv = (wx * signs[0] + wy * signs[1]) / h;
                    for cr in 0..4 {
                        local[cr][ct] += scale * conv * phi_ref[q][cr];
                    }
                }
            }
            for (cr, &(rj, rk)) in corners.iter().enumerate() {
                if !is_interior(n, rj, rk) {
                    continue;
                }
                let row = interior_dof_index(n, rj, rk);
                for (ct, &(tj, tk)) in corners.iter().enumerate() {
                    if is_interior(n, tj, tk) {
                        triplets.push((row, interior_dof_index(n, tj, tk), local[cr][ct]));
                    }
                }
            }
        }
    }
    CsrMatrix::from_triplets(m, m, triplets)
}

/// Right-hand side driven by the boundary lifting:
/// `f = −a_h(u_b, ·) − c_h(w; u_b, ·)` (x-rows only — the lifting's second
/// component vanishes) and `g_cell = −b_h(u_b, χ_cell) = +∫_cell ∇·u_b`.
/// Without a lifting both vanish.
pub fn assemble_rhs(
    mesh: &Mesh,
    nu: f64,
    w: &VelocityField,
    lifting: Option<&BoundaryLifting>,
) -> (Vec<f64>, Vec<f64>) {
    let n = mesh.n();
    let h = mesh.h();
    let m = (n - 1) * (n - 1);
    let mut f = vec![0.0; 2 * m];
    let mut g = vec![0.0; n * n];
    let Some(lift) = lifting else {
        return (f, g);
    };
    let rule = gauss_rule(DEFAULT_NG);
    let phi_ref = reference_values(&rule);
    // support of the lifting is the top cell row
    let k = n;
    for j in 1..=n {
        let corners = cell_corner_vertices(j, k);
        let map = AffineMap::for_cell(mesh, j, k);
        let jac = map.jacobian();
        let mut local = [0.0f64; 4];
        for (q, &(xr, yr, wq)) in rule.points.iter().enumerate() {
            let (x, y) = map.to_physical(xr, yr);
            let gb = lift.gradient_in_cell((j, k), x, y)[0];
            // transport at the point (homogeneous + lifting)
            let mut wx = 0.0;
            let mut wy = 0.0;
            for (c, &(vj, vk)) in corners.iter().enumerate() {
                let phi = phi_ref[q][c];
                wx += w.xi(vj, vk) * phi;
                wy += w.eta(vj, vk) * phi;
            }
            let (lu, lv) = lift.value_in_cell((j, k), x, y);
            wx += lu;
            wy += lv;
            let conv_b = wx * gb[0] + wy * gb[1]; // (w·∇) u_b1
            let scale = wq * jac;
            for (cr, signs) in CORNER_GRAD_SIGNS.iter().enumerate() {
                let grad_dot = (gb[0] * signs[0] + gb[1] * signs[1]) / h;
                local[cr] -= scale * (nu * grad_dot + conv_b * phi_ref[q][cr]);
            }
        }
        for (cr, &(rj, rk)) in corners.iter().enumerate() {
            if is_interior(n, rj, rk) {
                f[interior_dof_index(n, rj, rk)] += local[cr];
            }
        }
        g[mesh.cell_index(j, k)] = lift.cell_divergence_integral((j, k));
    }
    (f, g)
}

/// Load vector of a body force: `∫_Q f·(φ_v e_comp)` for every interior
/// vertex and component, packed `[x-block, y-block]`.
pub fn assemble_body_force<F: FnMut(f64, f64) -> (f64, f64)>(
    mesh: &Mesh,
    mut force: F,
) -> Vec<f64> {
    let n = mesh.n();
    let m = (n - 1) * (n - 1);
    let rule = gauss_rule(DEFAULT_NG);
    let phi_ref = reference_values(&rule);
    let mut f = vec![0.0; 2 * m];
    for k in 1..=n {
        for j in 1..=n {
            let corners = cell_corner_vertices(j, k);
            let map = AffineMap::for_cell(mesh, j, k);
            let jac = map.jacobian();
            let mut local = [[0.0f64; 2]; 4];
            for (q, &(xr, yr, wq)) in rule.points.iter().enumerate() {
                let (x, y) = map.to_physical(xr, yr);
                let (fx, fy) = force(x, y);
                let scale = wq * jac;
                for cr in 0..4 {
                    local[cr][0] += scale * fx * phi_ref[q][cr];
                    local[cr][1] += scale * fy * phi_ref[q][cr];
                }
            }
            for (cr, &(rj, rk)) in corners.iter().enumerate() {
                if is_interior(n, rj, rk) {
                    let d = interior_dof_index(n, rj, rk);
                    f[d] += local[cr][0];
                    f[m + d] += local[cr][1];
                }
            }
        }
    }
    f
}

/// Coordinate text dump `row col value` (one entry per line) for external
/// verification of assembled matrices.
pub fn matrix_coordinate_text(m: &CsrMatrix) -> String {
    let mut out = String::new();
    for r in 0..m.nrows() {
        let (cols, vals) = m.row(r);
        for (&c, &v) in cols.iter().zip(vals) {
            out.push_str(&format!("{} {} {:.17e}\n", r, c, v));
        }
    }
    out
}

#[inline]
fn is_interior(n: usize, j: usize, k: usize) -> bool {
    (1..n).contains(&j) && (1..n).contains(&k)
}

/// P1-NC corner basis values at the quadrature points, shared by all cells.
fn reference_values(rule: &QuadratureRule) -> Vec<[f64; 4]> {
    rule.points
        .iter()
        .map(|&(xr, yr, _)| {
            [
                p1nc_corner_value_ref(0, xr, yr),
                p1nc_corner_value_ref(1, xr, yr),
                p1nc_corner_value_ref(2, xr, yr),
                p1nc_corner_value_ref(3, xr, yr),
            ]
        })
        .collect()
}
