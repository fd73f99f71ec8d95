//! Post-processing of solved cavity fields: volumetric flow rates across
//! mesh lines, the vorticity integral and its compatibility defect, per-cell
//! divergence values (the alternating ±h³ mass-defect pattern), a bilinear
//! stream-function reconstruction, vortex location at cell centers, and
//! centerline velocity profiles.

use serde::Serialize;
use thiserror::Error;

use crate::elements::{gauss_1d, gauss_rule, AffineMap, DEFAULT_NG};
use crate::linalg::{BandedMatrix, CsrMatrix, LinalgError};
use crate::mesh::Mesh;
use crate::spaces::{evaluate_velocity, BoundaryLifting, SpaceError, VelocityField};

/// Neumann-data incompatibility above this level signals an unconverged or
/// inconsistent velocity field.
const COMPATIBILITY_LIMIT: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("line coordinate {0} lies outside the open interval (0, 1)")]
    BadLine(f64),
    #[error(
        "stream-function data incompatible: defect {defect:.3e} exceeds \
         {COMPATIBILITY_LIMIT:.0e} — the velocity field looks unconverged"
    )]
    IncompatibleData { defect: f64 },
    #[error("no cell center lies inside region x ∈ [{x0}, {x1}], y ∈ [{y0}, {y1}]")]
    EmptyRegion { x0: f64, x1: f64, y0: f64, y1: f64 },
    #[error("stream-function solve failed: {0}")]
    Linear(#[from] LinalgError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// Which family of mesh-parallel lines a flow rate is measured across.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineAxis {
    /// Vertical line `x = c`; integrates the horizontal velocity.
    Vertical,
    /// Horizontal line `y = c`; integrates the vertical velocity.
    Horizontal,
}

/// Scalar values on the `(N+1)²` mesh vertices, row-major from the origin.
#[derive(Debug, Clone, Serialize)]
pub struct VertexGrid {
    n: usize,
    values: Vec<f64>,
}

impl VertexGrid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, j: usize, k: usize) -> f64 {
        self.values[k * (self.n + 1) + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Bilinear value at the center of cell `(j,k)` — the mean of the four
    /// surrounding vertex values.
    pub fn cell_center_value(&self, j: usize, k: usize) -> f64 {
        0.25 * (self.value(j - 1, k - 1)
            + self.value(j, k - 1)
            + self.value(j - 1, k)
            + self.value(j, k))
    }

    /// `x,y,value` rows, vertex scan order.
    pub fn to_csv(&self) -> String {
        let h = 1.0 / self.n as f64;
        let mut out = String::from("x,y,value\n");
        for k in 0..=self.n {
            for j in 0..=self.n {
                out.push_str(&format!(
                    "{:.17e},{:.17e},{:.17e}\n",
                    j as f64 * h,
                    k as f64 * h,
                    self.value(j, k)
                ));
            }
        }
        out
    }
}

/// Scalar values at the `N²` cell centers, cell scan order.
#[derive(Debug, Clone, Serialize)]
pub struct CellGrid {
    n: usize,
    values: Vec<f64>,
}

impl CellGrid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, j: usize, k: usize) -> f64 {
        self.values[(k - 1) * self.n + (j - 1)]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `x,y,value` rows at cell centers, cell scan order.
    pub fn to_csv(&self) -> String {
        let h = 1.0 / self.n as f64;
        let mut out = String::from("x,y,value\n");
        for k in 1..=self.n {
            for j in 1..=self.n {
                out.push_str(&format!(
                    "{:.17e},{:.17e},{:.17e}\n",
                    (j as f64 - 0.5) * h,
                    (k as f64 - 0.5) * h,
                    self.value(j, k)
                ));
            }
        }
        out
    }
}

/// One located vortex: stream-function extremum over cell centers, the
/// vorticity there, and the center coordinates.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct VortexPoint {
    pub psi: f64,
    pub omega: f64,
    pub x: f64,
    pub y: f64,
}

/// Vortex record tagged with its conventional cavity location label.
#[derive(Debug, Clone, Serialize)]
pub struct LabeledVortex {
    pub label: String,
    pub psi: f64,
    pub omega: f64,
    pub x: f64,
    pub y: f64,
}

/// Whether a vortex search looks for the minimum or maximum of ψ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    Min,
    Max,
}

/// One sampled point of a centerline profile.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProfilePoint {
    /// The varying coordinate (y for the vertical centerline, x for the
    /// horizontal one).
    pub coord: f64,
    pub value: f64,
}

/// Velocity profiles along the two centerlines of the cavity.
#[derive(Debug, Clone, Serialize)]
pub struct CenterlineProfiles {
    /// `u(0.5, y)` at the sampled ordinates.
    pub u: Vec<ProfilePoint>,
    /// `v(x, 0.5)` at the sampled abscissas.
    pub v: Vec<ProfilePoint>,
}

/// Default sampling ordinates for `u(0.5, y)`: the classical benchmark
/// stations, all exact multiples of 1/128.
pub const U_PROFILE_STATIONS: [f64; 15] = [
    0.031_25,     // 4/128
    0.039_062_5,  // 5/128
    0.046_875,    // 6/128
    0.054_687_5,  // 7/128
    0.093_75,     // 12/128
    0.140_625,    // 18/128
    0.195_312_5,  // 25/128
    0.5,          // 64/128
    0.765_625,    // 98/128
    0.773_437_5,  // 99/128
    0.843_75,     // 108/128
    0.906_25,     // 116/128
    0.921_875,    // 118/128
    0.929_687_5,  // 119/128
    0.937_5,      // 120/128
];

/// Default sampling abscissas for `v(x, 0.5)`, in the conventional
/// (descending) benchmark order; exact multiples of 1/128.
pub const V_PROFILE_STATIONS: [f64; 15] = [
    0.976_562_5,  // 125/128
    0.968_75,     // 124/128
    0.960_937_5,  // 123/128
    0.953_125,    // 122/128
    0.851_562_5,  // 109/128
    0.734_375,    // 94/128
    0.617_187_5,  // 79/128
    0.5,          // 64/128
    0.453_125,    // 58/128
    0.281_25,     // 36/128
    0.171_875,    // 22/128
    0.101_562_5,  // 13/128
    0.070_312_5,  // 9/128
    0.0625,       // 8/128
    0.054_687_5,  // 7/128
];

/// Full diagnostics record of one solved cavity field. Scalar indicators and
/// vortex records serialize to JSON; the ψ/ω grids are written separately as
/// CSV.
#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    pub re: f64,
    pub n: usize,
    /// |∫ u(0.5, y) dy| — net volumetric flow across the vertical centerline.
    pub q_u_half: f64,
    /// |∫ v(x, 0.5) dx| — net volumetric flow across the horizontal centerline.
    pub q_v_half: f64,
    /// ∫_Ω ω dx; −1 up to round-off for the cavity.
    pub vorticity_integral: f64,
    /// |∫ω + ∮g| — solvability defect of the stream-function problem.
    pub compatibility_defect: f64,
    pub max_cell_divergence: f64,
    /// Signed per-cell values of ∫_Q ∇·u_h, cell scan order.
    pub cell_divergence: Vec<f64>,
    pub vortices: Vec<LabeledVortex>,
    #[serde(skip)]
    pub psi: VertexGrid,
    #[serde(skip)]
    pub omega: CellGrid,
}

/// Net volumetric flow rate `|∫ u·n|` across the full line `x = c`
/// (`Vertical`) or `y = c` (`Horizontal`). On a mesh line the two one-sided
/// traces integrate identically (mean continuity across edges), and the
/// implementation averages them; across cell interiors the trace is single
/// valued. Each cell segment is integrated exactly by Gauss quadrature.
pub fn flow_rate(
    mesh: &Mesh,
    u: &VelocityField,
    lifting: Option<&BoundaryLifting>,
    axis: LineAxis,
    c: f64,
) -> Result<f64, DiagnosticsError> {
    let (total, _) = line_trace_integrals(mesh, u, lifting, axis, c)?;
    Ok(total.abs())
}

/// Signed line integral together with the largest disagreement between the
/// one-sided traces encountered along the way (zero off mesh lines).
fn line_trace_integrals(
    mesh: &Mesh,
    u: &VelocityField,
    lifting: Option<&BoundaryLifting>,
    axis: LineAxis,
    c: f64,
) -> Result<(f64, f64), DiagnosticsError> {
    if !(c > 0.0 && c < 1.0) {
        return Err(DiagnosticsError::BadLine(c));
    }
    let n = mesh.n();
    let h = mesh.h();
    let (nodes, weights) = gauss_1d(4);
    let mut total = 0.0;
    let mut max_disagreement = 0.0f64;
    for seg in 1..=n {
        // segment of the line crossing mesh row/column `seg`
        let s_mid = (seg as f64 - 0.5) * h;
        let (px, py) = match axis {
            LineAxis::Vertical => (c, s_mid),
            LineAxis::Horizontal => (s_mid, c),
        };
        let cells = mesh.cells_containing(px, py);
        debug_assert!(!cells.is_empty());
        let mut side_integrals = Vec::with_capacity(cells.len());
        for &cell in &cells {
            let mut acc = 0.0;
            for (&t, &wq) in nodes.iter().zip(&weights) {
                let s = s_mid + 0.5 * h * t;
                let (x, y) = match axis {
                    LineAxis::Vertical => (c, s),
                    LineAxis::Horizontal => (s, c),
                };
                let (vel_u, vel_v) = evaluate_velocity(mesh, u, lifting, x, y, cell)?;
                let comp = match axis {
                    LineAxis::Vertical => vel_u,
                    LineAxis::Horizontal => vel_v,
                };
                acc += wq * comp;
            }
            side_integrals.push(acc * 0.5 * h);
        }
        let mean = side_integrals.iter().sum::<f64>() / side_integrals.len() as f64;
        for &s in &side_integrals {
            max_disagreement = max_disagreement.max((s - mean).abs() * 2.0);
        }
        total += mean;
    }
    Ok((total, max_disagreement))
}

/// `∫_Ω (∂v/∂x − ∂u/∂y) dx` over the broken field, by exact per-cell
/// quadrature (the interior part has constant curl; the lifting needs the
/// full rule).
pub fn vorticity_integral(mesh: &Mesh, u: &VelocityField, lifting: Option<&BoundaryLifting>) -> f64 {
    let n = mesh.n();
    let area = mesh.h() * mesh.h();
    let rule = gauss_rule(DEFAULT_NG);
    let mut total = 0.0;
    for k in 1..=n {
        for j in 1..=n {
            let g = u.gradient_in_cell(mesh, (j, k));
            total += (g[1][0] - g[0][1]) * area;
            if let Some(lift) = lifting {
                if lift.supports_cell((j, k)) {
                    let map = AffineMap::for_cell(mesh, j, k);
                    let jac = map.jacobian();
                    for &(xr, yr, wq) in &rule.points {
                        let (x, y) = map.to_physical(xr, yr);
                        let gl = lift.gradient_in_cell((j, k), x, y);
                        total += wq * jac * (gl[1][0] - gl[0][1]);
                    }
                }
            }
        }
    }
    total
}

/// Signed `∫_Q ∇·u_h` for every cell (scan order) and the largest magnitude.
/// For a solved cavity field the values are ±h³ with signs alternating on
/// the red/black cell coloring.
pub fn cell_divergence(
    mesh: &Mesh,
    u: &VelocityField,
    lifting: Option<&BoundaryLifting>,
) -> (Vec<f64>, f64) {
    let n = mesh.n();
    let area = mesh.h() * mesh.h();
    let mut values = Vec::with_capacity(mesh.num_cells());
    let mut max_abs = 0.0f64;
    for k in 1..=n {
        for j in 1..=n {
            let g = u.gradient_in_cell(mesh, (j, k));
            let mut div = (g[0][0] + g[1][1]) * area;
            if let Some(lift) = lifting {
                div += lift.cell_divergence_integral((j, k));
            }
            values.push(div);
            max_abs = max_abs.max(div.abs());
        }
    }
    (values, max_abs)
}

/// Broken curl of the full velocity at every cell barycenter.
pub fn omega_at_centers(
    mesh: &Mesh,
    u: &VelocityField,
    lifting: Option<&BoundaryLifting>,
) -> CellGrid {
    let n = mesh.n();
    let mut values = Vec::with_capacity(mesh.num_cells());
    for k in 1..=n {
        for j in 1..=n {
            let g = u.gradient_in_cell(mesh, (j, k));
            let mut omega = g[1][0] - g[0][1];
            if let Some(lift) = lifting {
                if lift.supports_cell((j, k)) {
                    let (cx, cy) = mesh.cell_center(j, k);
                    let gl = lift.gradient_in_cell((j, k), cx, cy);
                    omega += gl[1][0] - gl[0][1];
                }
            }
            values.push(omega);
        }
    }
    CellGrid { n, values }
}

/// Solves the Neumann problem `−Δψ = ω`, `∂ψ/∂n = tangential velocity data`,
/// with conforming bilinear elements on the mesh vertices; the additive
/// constant is fixed by `ψ(0,0) = 0`. The right-hand side is built from the
/// discrete field itself (volume term from the broken curl, boundary term
/// from the one-sided velocity traces), and its compatibility defect — zero
/// up to round-off for any velocity built as interior field + lifting — is
/// returned alongside ψ after being projected out.
pub fn stream_function(
    mesh: &Mesh,
    u: &VelocityField,
    lifting: Option<&BoundaryLifting>,
) -> Result<(VertexGrid, f64), DiagnosticsError> {
    let n = mesh.n();
    let h = mesh.h();
    let nv = (n + 1) * (n + 1);
    let vidx = |j: usize, k: usize| k * (n + 1) + j;

    // reference bilinear basis on [−1,1]², corner order BL, BR, TR, TL
    let corner_signs: [[f64; 2]; 4] = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
    let shape = |c: usize, xr: f64, yr: f64| -> f64 {
        0.25 * (1.0 + corner_signs[c][0] * xr) * (1.0 + corner_signs[c][1] * yr)
    };

    // element stiffness, computed once by quadrature; the 2D Laplace
    // stiffness of a square is scale invariant
    let rule2 = gauss_rule(2);
    let mut k_local = [[0.0f64; 4]; 4];
    for &(xr, yr, wq) in &rule2.points {
        let grads: Vec<[f64; 2]> = (0..4)
            .map(|c| {
                [
                    0.25 * corner_signs[c][0] * (1.0 + corner_signs[c][1] * yr),
                    0.25 * corner_signs[c][1] * (1.0 + corner_signs[c][0] * xr),
                ]
            })
            .collect();
        for r in 0..4 {
            for t in 0..4 {
                k_local[r][t] += wq * (grads[r][0] * grads[t][0] + grads[r][1] * grads[t][1]);
            }
        }
    }

    let rule = gauss_rule(DEFAULT_NG);
    let mut triplets = Vec::with_capacity(16 * mesh.num_cells() + 1);
    let mut b = vec![0.0f64; nv];
    for k in 1..=n {
        for j in 1..=n {
            let verts = [
                vidx(j - 1, k - 1),
                vidx(j, k - 1),
                vidx(j, k),
                vidx(j - 1, k),
            ];
            for r in 0..4 {
                for t in 0..4 {
                    triplets.push((verts[r], verts[t], k_local[r][t]));
                }
            }
            // volume load ∫ ω χ
            let g = u.gradient_in_cell(mesh, (j, k));
            let curl_interior = g[1][0] - g[0][1];
            let map = AffineMap::for_cell(mesh, j, k);
            let jac = map.jacobian();
            let lift_here = lifting.filter(|l| l.supports_cell((j, k)));
            for &(xr, yr, wq) in &rule.points {
                let mut omega = curl_interior;
                if let Some(lift) = lift_here {
                    let (x, y) = map.to_physical(xr, yr);
                    let gl = lift.gradient_in_cell((j, k), x, y);
                    omega += gl[1][0] - gl[0][1];
                }
                let scale = wq * jac * omega;
                for (r, &v) in verts.iter().enumerate() {
                    b[v] += scale * shape(r, xr, yr);
                }
            }
        }
    }

    // boundary term ∮ g χ with g the tangential trace data: −u below,
    // +u above, +v on the left, −v on the right
    let (nodes, weights) = gauss_1d(4);
    let mut boundary_edge = |cell: (usize, usize),
                             va: usize,
                             vb: usize,
                             point: &dyn Fn(f64) -> (f64, f64),
                             sign_component: &dyn Fn(f64, f64) -> f64|
     -> Result<(), DiagnosticsError> {
        for (&t, &wq) in nodes.iter().zip(&weights) {
            let (x, y) = point(t);
            let (vel_u, vel_v) = evaluate_velocity(mesh, u, lifting, x, y, cell)?;
            let g_val = sign_component(vel_u, vel_v);
            let scale = wq * 0.5 * h * g_val;
            // linear hats along the edge: (1−t)/2 at the start, (1+t)/2 at the end
            b[va] += scale * 0.5 * (1.0 - t);
            b[vb] += scale * 0.5 * (1.0 + t);
        }
        Ok(())
    };
    for j in 1..=n {
        let (x0, x1) = ((j as f64 - 1.0) * h, j as f64 * h);
        let xm = 0.5 * (x0 + x1);
        boundary_edge(
            (j, 1),
            vidx(j - 1, 0),
            vidx(j, 0),
            &|t| (xm + 0.5 * h * t, 0.0),
            &|vu, _| -vu,
        )?;
        boundary_edge(
            (j, n),
            vidx(j - 1, n),
            vidx(j, n),
            &|t| (xm + 0.5 * h * t, 1.0),
            &|vu, _| vu,
        )?;
    }
    for k in 1..=n {
        let (y0, y1) = ((k as f64 - 1.0) * h, k as f64 * h);
        let ym = 0.5 * (y0 + y1);
        boundary_edge(
            (1, k),
            vidx(0, k - 1),
            vidx(0, k),
            &|t| (0.0, ym + 0.5 * h * t),
            &|_, vv| vv,
        )?;
        boundary_edge(
            (n, k),
            vidx(n, k - 1),
            vidx(n, k),
            &|t| (1.0, ym + 0.5 * h * t),
            &|_, vv| -vv,
        )?;
    }

    // pure-Neumann solvability: the residual against the constant mode is
    // the compatibility defect; reject clearly inconsistent data, project
    // the rest out
    let defect = b.iter().sum::<f64>();
    if defect.abs() > COMPATIBILITY_LIMIT {
        return Err(DiagnosticsError::IncompatibleData { defect: defect.abs() });
    }
    let shift = defect / nv as f64;
    for v in b.iter_mut() {
        *v -= shift;
    }

    // fix the constant: replace the (linearly dependent) first row by ψ₀ = 0
    triplets.retain(|&(r, _, _)| r != 0);
    triplets.push((0, 0, 1.0));
    b[0] = 0.0;
    let a = CsrMatrix::from_triplets(nv, nv, triplets);
    let half_bw = n + 2;
    let lu = BandedMatrix::from_csr(&a, half_bw, half_bw)?.factor()?;
    let mut psi = b;
    lu.solve_in_place(&mut psi);
    Ok((VertexGrid { n, values: psi }, defect.abs()))
}

/// Grid extremum of ψ over the cell centers inside `region`
/// (`[x0, x1, y0, y1]`), reported with the vorticity at the same center.
/// Ties keep the first center in scan order.
pub fn locate_vortex(
    psi: &VertexGrid,
    omega: &CellGrid,
    region: [f64; 4],
    mode: Extremum,
) -> Result<VortexPoint, DiagnosticsError> {
    let n = psi.n();
    debug_assert_eq!(n, omega.n());
    let h = 1.0 / n as f64;
    let [x0, x1, y0, y1] = region;
    let eps = 1e-12;
    let mut best: Option<VortexPoint> = None;
    for k in 1..=n {
        for j in 1..=n {
            let cx = (j as f64 - 0.5) * h;
            let cy = (k as f64 - 0.5) * h;
            if cx < x0 - eps || cx > x1 + eps || cy < y0 - eps || cy > y1 + eps {
                continue;
            }
            let value = psi.cell_center_value(j, k);
            let better = match (&best, mode) {
                (None, _) => true,
                (Some(b), Extremum::Min) => value < b.psi,
                (Some(b), Extremum::Max) => value > b.psi,
            };
            if better {
                best = Some(VortexPoint { psi: value, omega: omega.value(j, k), x: cx, y: cy });
            }
        }
    }
    best.ok_or(DiagnosticsError::EmptyRegion { x0, x1, y0, y1 })
}

/// Point value of the full velocity, averaging the traces of every cell
/// containing the point (they agree at edge midpoints; elsewhere the average
/// is the canonical single value).
fn point_velocity(
    mesh: &Mesh,
    u: &VelocityField,
    lifting: Option<&BoundaryLifting>,
    x: f64,
    y: f64,
) -> Result<(f64, f64), DiagnosticsError> {
    let cells = mesh.cells_containing(x, y);
    let mut sum = (0.0, 0.0);
    for &cell in &cells {
        let (vu, vv) = evaluate_velocity(mesh, u, lifting, x, y, cell)?;
        sum.0 += vu;
        sum.1 += vv;
    }
    let count = cells.len() as f64;
    Ok((sum.0 / count, sum.1 / count))
}

/// Velocity profiles along the vertical centerline (`u(0.5, y)`) and the
/// horizontal one (`v(x, 0.5)`). `None` station lists fall back to the
/// classical benchmark ordinates. Stations on the boundary return the
/// boundary data itself: zero on the walls, the lid speed at `y = 1` when a
/// lifting is present.
pub fn centerline_profiles(
    mesh: &Mesh,
    u: &VelocityField,
    lifting: Option<&BoundaryLifting>,
    u_stations: Option<&[f64]>,
    v_stations: Option<&[f64]>,
) -> Result<CenterlineProfiles, DiagnosticsError> {
    let u_stations = u_stations.unwrap_or(&U_PROFILE_STATIONS);
    let v_stations = v_stations.unwrap_or(&V_PROFILE_STATIONS);
    let mut u_points = Vec::with_capacity(u_stations.len());
    for &y in u_stations {
        let value = if y <= 0.0 {
            0.0
        } else if y >= 1.0 {
            if lifting.is_some() {
                1.0
            } else {
                0.0
            }
        } else {
            point_velocity(mesh, u, lifting, 0.5, y)?.0
        };
        u_points.push(ProfilePoint { coord: y, value });
    }
    let mut v_points = Vec::with_capacity(v_stations.len());
    for &x in v_stations {
        let value = if x <= 0.0 || x >= 1.0 {
            0.0
        } else {
            point_velocity(mesh, u, lifting, x, 0.5)?.1
        };
        v_points.push(ProfilePoint { coord: x, value });
    }
    Ok(CenterlineProfiles { u: u_points, v: v_points })
}

/// Search regions for the conventional cavity vortices as
/// `(label, [x0,x1,y0,y1], mode)`.
const VORTEX_SEARCHES: [(&str, [f64; 4], Extremum); 4] = [
    ("primary", [0.0, 1.0, 0.0, 1.0], Extremum::Min),
    ("bottom_left", [0.0, 0.3, 0.0, 0.3], Extremum::Max),
    ("bottom_right", [0.7, 1.0, 0.0, 0.3], Extremum::Max),
    ("top_left", [0.0, 0.3, 0.7, 1.0], Extremum::Max),
];

/// Computes the full diagnostics suite for a solved cavity field.
pub fn full_report(
    mesh: &Mesh,
    u: &VelocityField,
    lifting: Option<&BoundaryLifting>,
    re: f64,
) -> Result<DiagnosticsReport, DiagnosticsError> {
    let q_u_half = flow_rate(mesh, u, lifting, LineAxis::Vertical, 0.5)?;
    let q_v_half = flow_rate(mesh, u, lifting, LineAxis::Horizontal, 0.5)?;
    let vort = vorticity_integral(mesh, u, lifting);
    let (divergence, max_div) = cell_divergence(mesh, u, lifting);
    let (psi, compatibility_defect) = stream_function(mesh, u, lifting)?;
    let omega = omega_at_centers(mesh, u, lifting);
    let mut vortices = Vec::new();
    for (label, region, mode) in VORTEX_SEARCHES {
        let point = locate_vortex(&psi, &omega, region, mode)?;
        vortices.push(LabeledVortex {
            label: label.to_string(),
            psi: point.psi,
            omega: point.omega,
            x: point.x,
            y: point.y,
        });
    }
    Ok(DiagnosticsReport {
        re,
        n: mesh.n(),
        q_u_half,
        q_v_half,
        vorticity_integral: vort,
        compatibility_defect,
        max_cell_divergence: max_div,
        cell_divergence: divergence,
        vortices,
        psi,
        omega,
    })
}
