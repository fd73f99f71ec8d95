//! Reference-element machinery: the P1-nonconforming vertex basis, the DSSY
//! nonconforming family on the reference square, affine cell maps, and tensor
//! Gauss-Legendre quadrature.
//!
//! Conventions: the reference square is `Q̂ = [−1,1]²`; DSSY DOF nodes are the
//! edge midpoints `x̂₁=(1,0), x̂₂=(0,1), x̂₃=(−1,0), x̂₄=(0,−1)` (right, top,
//! left, bottom). Cell corners are ordered BL, BR, TR, TL throughout.

use crate::mesh::Mesh;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ElementError {
    #[error("theta family index must be 0, 1, or 2, got {0}")]
    BadFamily(usize),
    #[error("DSSY node index must be in 1..=4, got {0}")]
    BadNode(usize),
    #[error("cell ({cj},{ck}) is not adjacent to vertex ({vj},{vk})")]
    NotAdjacent { vj: usize, vk: usize, cj: usize, ck: usize },
}

// ---------------------------------------------------------------------------
// θ family
// ---------------------------------------------------------------------------

/// The even generator polynomials `θ_ℓ` of the DSSY spaces:
/// `θ₀ = t²`, `θ₁ = t² − (5/3)t⁴`, `θ₂ = t² − (25/6)t⁴ + (7/2)t⁶`.
///
/// `θ₁` and `θ₂` have zero mean on `[−1,1]`, which is what gives the element
/// its edge mean-value property; `θ₀` (the rotated-Q1 generator) does not.
pub fn theta(ell: usize, t: f64) -> Result<f64, ElementError> {
    let t2 = t * t;
    match ell {
        0 => Ok(t2),
        1 => Ok(t2 - 5.0 / 3.0 * t2 * t2),
        2 => Ok(t2 - 25.0 / 6.0 * t2 * t2 + 3.5 * t2 * t2 * t2),
        _ => Err(ElementError::BadFamily(ell)),
    }
}

/// Derivative `θ_ℓ'(t)`.
pub fn theta_deriv(ell: usize, t: f64) -> Result<f64, ElementError> {
    let t2 = t * t;
    match ell {
        0 => Ok(2.0 * t),
        1 => Ok(2.0 * t - 20.0 / 3.0 * t2 * t),
        2 => Ok(2.0 * t - 50.0 / 3.0 * t2 * t + 21.0 * t2 * t2 * t),
        _ => Err(ElementError::BadFamily(ell)),
    }
}

// ---------------------------------------------------------------------------
// DSSY reference basis
// ---------------------------------------------------------------------------

/// DSSY reference element `Span{1, x̂, ŷ, θ_ℓ(x̂) − θ_ℓ(ŷ)}` with basis dual to
/// point evaluation at the four edge midpoints.
#[derive(Debug, Clone, Copy)]
pub struct DssyRef {
    ell: usize,
    /// Coefficient of `θ(x̂) − θ(ŷ)` in ψ̂₁: `1/(4 θ_ℓ(1))`.
    d: f64,
}

impl DssyRef {
    pub fn new(ell: usize) -> Result<Self, ElementError> {
        let s = theta(ell, 1.0)?;
        Ok(DssyRef { ell, d: 1.0 / (4.0 * s) })
    }

    pub fn family(&self) -> usize {
        self.ell
    }

    /// The DOF nodes x̂₁..x̂₄ (right, top, left, bottom edge midpoints).
    pub fn nodes() -> [(f64, f64); 4] {
        [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]
    }

    /// Value and gradient of ψ̂_j at a reference point, `j ∈ 1..=4`.
    ///
    /// ψ̂₁ = ¼ + ½x̂ + d·μ, ψ̂₂ = ¼ + ½ŷ − d·μ, ψ̂₃ = ¼ − ½x̂ + d·μ,
    /// ψ̂₄ = ¼ − ½ŷ − d·μ with μ = θ(x̂) − θ(ŷ); for ℓ=1, d = −3/8.
    pub fn eval(&self, j: usize, x: f64, y: f64) -> Result<(f64, [f64; 2]), ElementError> {
        if !(1..=4).contains(&j) {
            return Err(ElementError::BadNode(j));
        }
        let mu = theta(self.ell, x)? - theta(self.ell, y)?;
        let dmu_dx = theta_deriv(self.ell, x)?;
        let dmu_dy = -theta_deriv(self.ell, y)?;
        let d = self.d;
        let (value, grad) = match j {
            1 => (0.25 + 0.5 * x + d * mu, [0.5 + d * dmu_dx, d * dmu_dy]),
            2 => (0.25 + 0.5 * y - d * mu, [-d * dmu_dx, 0.5 - d * dmu_dy]),
            3 => (0.25 - 0.5 * x + d * mu, [-0.5 + d * dmu_dx, d * dmu_dy]),
            _ => (0.25 - 0.5 * y - d * mu, [-d * dmu_dx, -0.5 - d * dmu_dy]),
        };
        Ok((value, grad))
    }

    /// Value of ψ̂_j only.
    pub fn value(&self, j: usize, x: f64, y: f64) -> Result<f64, ElementError> {
        Ok(self.eval(j, x, y)?.0)
    }
}

// ---------------------------------------------------------------------------
// P1-nonconforming vertex basis
// ---------------------------------------------------------------------------

/// Corner offsets of a cell in BL, BR, TR, TL order: vertex of corner `c` of
/// cell `Q_jk` is `V_{j−1+CORNER_OFFSETS[c].0, k−1+CORNER_OFFSETS[c].1}`.
pub const CORNER_OFFSETS: [(usize, usize); 4] = [(0, 0), (1, 0), (1, 1), (0, 1)];

/// Gradient sign pattern of the vertex basis attached to corner `c` of a
/// cell, in BL, BR, TR, TL order; physical gradient is `signs/h`. Each
/// gradient points from the cell center toward its corner.
pub const CORNER_GRAD_SIGNS: [[f64; 2]; 4] =
    [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];

/// Value at reference coordinates of the vertex basis attached to corner `c`:
/// `½ + (s_x x̂ + s_y ŷ)/2`. The function takes value 1 at the midpoints of
/// the two cell edges meeting in its corner, 0 at the opposite two, and ½ at
/// the cell center, independent of h.
#[inline]
pub fn p1nc_corner_value_ref(c: usize, x: f64, y: f64) -> f64 {
    let [sx, sy] = CORNER_GRAD_SIGNS[c];
    0.5 + 0.5 * (sx * x + sy * y)
}

/// Constant gradient of the basis of vertex `(vj,vk)` on an adjacent cell
/// `(cj,ck)`: `(1/h)·(±1,±1)` with `+1` in x iff the vertex lies on the
/// cell's right edge, `+1` in y iff on its top edge.
pub fn p1nc_gradient(
    h: f64,
    vertex: (usize, usize),
    cell: (usize, usize),
) -> Result<[f64; 2], ElementError> {
    let (vj, vk) = vertex;
    let (cj, ck) = cell;
    let adj_x = cj == vj || cj == vj + 1;
    let adj_y = ck == vk || ck == vk + 1;
    if !adj_x || !adj_y || cj == 0 || ck == 0 {
        return Err(ElementError::NotAdjacent { vj, vk, cj, ck });
    }
    let sx = if cj == vj { 1.0 } else { -1.0 };
    let sy = if ck == vk { 1.0 } else { -1.0 };
    Ok([sx / h, sy / h])
}

// ---------------------------------------------------------------------------
// Affine cell map
// ---------------------------------------------------------------------------

/// Scaling map `F_Q : Q̂ → Q`, reference square to physical cell.
#[derive(Debug, Clone, Copy)]
pub struct AffineMap {
    pub center: (f64, f64),
    /// Half the cell width: physical = center + scale·reference.
    pub scale: f64,
}

impl AffineMap {
    pub fn for_cell(mesh: &Mesh, j: usize, k: usize) -> Self {
        AffineMap { center: mesh.cell_center(j, k), scale: 0.5 * mesh.h() }
    }

    #[inline]
    pub fn to_physical(&self, xr: f64, yr: f64) -> (f64, f64) {
        (self.center.0 + self.scale * xr, self.center.1 + self.scale * yr)
    }

    #[inline]
    pub fn to_reference(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.center.0) / self.scale, (y - self.center.1) / self.scale)
    }

    /// Area element: dx dy = jacobian · dx̂ dŷ.
    #[inline]
    pub fn jacobian(&self) -> f64 {
        self.scale * self.scale
    }

    /// Chain-rule factor taking reference gradients to physical ones.
    #[inline]
    pub fn grad_scale(&self) -> f64 {
        1.0 / self.scale
    }
}

// ---------------------------------------------------------------------------
// Gauss-Legendre quadrature
// ---------------------------------------------------------------------------

/// 1D Gauss-Legendre nodes/weights on [−1,1], exact through degree 2n−1.
/// Computed by Newton iteration on the Legendre recurrence; converges to
/// machine precision in a handful of steps for any practical n.
pub fn gauss_1d(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature order must be at least 1");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and P_n'(x) via the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for m in 2..=n {
                let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x.abs();
        nodes[n - 1 - i] = x.abs();
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Tensor quadrature rule on the reference square.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    /// Points-per-direction.
    pub n_g: usize,
    /// `(x̂, ŷ, weight)` triples; weights sum to |Q̂| = 4.
    pub points: Vec<(f64, f64, f64)>,
}

/// Default points-per-direction. The convection form with DSSY lifting
/// factors reaches per-variable degree 11 (4+3+4); degree-11 exactness needs
/// n_g = 6, which removes quadrature from the error budget at negligible
/// cost.
pub const DEFAULT_NG: usize = 6;

/// Tensor Gauss-Legendre rule with `n_g` points per direction, exact for
/// per-variable degree ≤ 2·n_g − 1.
pub fn gauss_rule(n_g: usize) -> QuadratureRule {
    let (nodes, weights) = gauss_1d(n_g);
    let mut points = Vec::with_capacity(n_g * n_g);
    for (iy, &y) in nodes.iter().enumerate() {
        for (ix, &x) in nodes.iter().enumerate() {
            points.push((x, y, weights[ix] * weights[iy]));
        }
    }
    QuadratureRule { n_g, points }
}

impl QuadratureRule {
    /// Integrates `f` over a physical cell through the cell's affine map.
    pub fn integrate_cell<F: FnMut(f64, f64) -> f64>(&self, map: &AffineMap, mut f: F) -> f64 {
        let jac = map.jacobian();
        self.points
            .iter()
            .map(|&(xr, yr, w)| {
                let (x, y) = map.to_physical(xr, yr);
                w * jac * f(x, y)
            })
            .sum()
    }
}
