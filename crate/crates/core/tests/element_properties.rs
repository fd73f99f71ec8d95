//! Randomized property tests for the two reference elements and the
//! quadrature rules: exact algebraic identities are held to 1e-13, gradient
//! formulas are cross-checked against central finite differences at 1e-8.

use ncflow_core::elements::{
    gauss_1d, gauss_rule, p1nc_corner_value_ref, p1nc_gradient, AffineMap, DssyRef,
    CORNER_GRAD_SIGNS, CORNER_OFFSETS,
};
use ncflow_core::mesh::Mesh;
use ncflow_core::spaces::{evaluate_velocity, VelocityField};
use proptest::prelude::*;

const EXACT: f64 = 1e-13;
const FD: f64 = 1e-8;

fn ref_point() -> impl Strategy<Value = (f64, f64)> {
    (-1.0..=1.0f64, -1.0..=1.0f64)
}

fn interior_ref_point() -> impl Strategy<Value = (f64, f64)> {
    (-0.9..=0.9f64, -0.9..=0.9f64)
}

fn central_diff<F: Fn(f64, f64) -> f64>(f: &F, x: f64, y: f64, step: f64) -> [f64; 2] {
    [
        (f(x + step, y) - f(x - step, y)) / (2.0 * step),
        (f(x, y + step) - f(x, y - step)) / (2.0 * step),
    ]
}

#[test]
fn corner_basis_values_at_edge_midpoints() {
    // each corner function is 1 at the midpoints of the two edges meeting in
    // its corner and 0 at the opposite two
    for c in 0..4 {
        let [sx, sy] = CORNER_GRAD_SIGNS[c];
        assert_eq!(p1nc_corner_value_ref(c, sx, 0.0), 1.0);
        assert_eq!(p1nc_corner_value_ref(c, 0.0, sy), 1.0);
        assert_eq!(p1nc_corner_value_ref(c, -sx, 0.0), 0.0);
        assert_eq!(p1nc_corner_value_ref(c, 0.0, -sy), 0.0);
        assert_eq!(p1nc_corner_value_ref(c, 0.0, 0.0), 0.5);
    }
}

#[test]
fn dssy_basis_is_kronecker_at_midpoint_nodes() {
    for ell in [0usize, 1, 2] {
        let elem = DssyRef::new(ell).unwrap();
        for (i, &(nx, ny)) in DssyRef::nodes().iter().enumerate() {
            for j in 1..=4 {
                let expected = if j == i + 1 { 1.0 } else { 0.0 };
                let value = elem.value(j, nx, ny).unwrap();
                assert!(
                    (value - expected).abs() <= EXACT,
                    "ell={ell}, ψ̂_{j} at node {}: {value} vs {expected}",
                    i + 1
                );
            }
        }
    }
}

#[test]
fn dssy_edge_means_are_kronecker_only_for_mean_zero_families() {
    let (nodes, weights) = gauss_1d(6);
    // edges in node order: right (x̂=1), top (ŷ=1), left (x̂=−1), bottom (ŷ=−1)
    let edge_point = |edge: usize, t: f64| match edge {
        0 => (1.0, t),
        1 => (t, 1.0),
        2 => (-1.0, t),
        _ => (t, -1.0),
    };
    let edge_mean = |elem: &DssyRef, j: usize, edge: usize| -> f64 {
        nodes
            .iter()
            .zip(&weights)
            .map(|(&t, &w)| {
                let (x, y) = edge_point(edge, t);
                w * elem.value(j, x, y).unwrap()
            })
            .sum::<f64>()
            / 2.0
    };
    for ell in [1usize, 2] {
        let elem = DssyRef::new(ell).unwrap();
        for j in 1..=4 {
            for edge in 0..4 {
                let expected = if j == edge + 1 { 1.0 } else { 0.0 };
                let mean = edge_mean(&elem, j, edge);
                assert!(
                    (mean - expected).abs() <= EXACT,
                    "ell={ell}, mean of ψ̂_{j} over edge {edge}: {mean} vs {expected}"
                );
            }
        }
    }
    // the rotated-Q1 generator t² does not have zero mean, so its midpoint
    // basis loses the edge mean-value property
    let rotated_q1 = DssyRef::new(0).unwrap();
    let off_mean = edge_mean(&rotated_q1, 4, 1);
    assert!(off_mean.abs() > 0.05, "expected a visible mean defect, got {off_mean}");
}

#[test]
fn gauss_rules_integrate_polynomials_exactly() {
    for n in 1..=8usize {
        let (nodes, weights) = gauss_1d(n);
        for p in 0..=(2 * n - 1) {
            let quad: f64 = nodes.iter().zip(&weights).map(|(&t, &w)| w * t.powi(p as i32)).sum();
            let exact = if p % 2 == 0 { 2.0 / (p as f64 + 1.0) } else { 0.0 };
            assert!(
                (quad - exact).abs() <= EXACT,
                "n={n}, degree {p}: {quad} vs {exact}"
            );
        }
    }
    // tensor rule on a physical cell: ∫ x^p y^q over the cell
    let mesh = Mesh::new(4).unwrap();
    let map = AffineMap::for_cell(&mesh, 2, 3);
    let rule = gauss_rule(4);
    let [x0, x1, y0, y1] = mesh.cell_bounds(2, 3);
    let prim = |a: f64, b: f64, p: i32| (b.powi(p + 1) - a.powi(p + 1)) / (p as f64 + 1.0);
    for p in 0..=5i32 {
        for q in 0..=5i32 {
            let quad = rule.integrate_cell(&map, |x, y| x.powi(p) * y.powi(q));
            let exact = prim(x0, x1, p) * prim(y0, y1, q);
            assert!(
                (quad - exact).abs() <= EXACT,
                "x^{p} y^{q}: {quad} vs {exact}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn corner_values_sum_to_two_everywhere((x, y) in ref_point()) {
        let sum: f64 = (0..4).map(|c| p1nc_corner_value_ref(c, x, y)).sum();
        prop_assert!((sum - 2.0).abs() <= EXACT, "Σφ = {sum}");
    }

    #[test]
    fn dssy_basis_is_a_partition_of_unity(
        ell in 0usize..=2,
        (x, y) in ref_point(),
    ) {
        let elem = DssyRef::new(ell).unwrap();
        let sum: f64 = (1..=4).map(|j| elem.value(j, x, y).unwrap()).sum();
        prop_assert!((sum - 1.0).abs() <= EXACT, "ell={ell}: Σψ̂ = {sum}");
    }

    #[test]
    fn vertex_basis_gradient_matches_finite_differences(
        half_n in 1usize..=4,
        vfrac in (0.0..1.0f64, 0.0..1.0f64),
        corner in 0usize..4,
        (xr, yr) in interior_ref_point(),
    ) {
        let n = 2 * half_n;
        let mesh = Mesh::new(n).unwrap();
        let vj = 1 + (vfrac.0 * (n - 1) as f64) as usize;
        let vk = 1 + (vfrac.1 * (n - 1) as f64) as usize;
        // pick one of the four cells sharing vertex (vj,vk) and find which
        // of its corners the vertex occupies
        let (dj, dk) = CORNER_OFFSETS[corner];
        let cell = (vj + dj, vk + dk);
        let offset = (vj + 1 - cell.0, vk + 1 - cell.1);
        let c = CORNER_OFFSETS.iter().position(|&o| o == offset).unwrap();
        let map = AffineMap::for_cell(&mesh, cell.0, cell.1);
        let grad = p1nc_gradient(mesh.h(), (vj, vk), cell).unwrap();
        let f = |x: f64, y: f64| {
            let (rx, ry) = map.to_reference(x, y);
            p1nc_corner_value_ref(c, rx, ry)
        };
        let (x, y) = map.to_physical(xr, yr);
        let fd = central_diff(&f, x, y, 1e-6);
        prop_assert!((grad[0] - fd[0]).abs() <= FD, "∂x: {} vs {}", grad[0], fd[0]);
        prop_assert!((grad[1] - fd[1]).abs() <= FD, "∂y: {} vs {}", grad[1], fd[1]);
    }

    #[test]
    fn dssy_gradient_matches_finite_differences(
        ell in 0usize..=2,
        j in 1usize..=4,
        (x, y) in interior_ref_point(),
    ) {
        let elem = DssyRef::new(ell).unwrap();
        let (_, grad) = elem.eval(j, x, y).unwrap();
        let f = |px: f64, py: f64| elem.value(j, px, py).unwrap();
        let fd = central_diff(&f, x, y, 1e-5);
        prop_assert!((grad[0] - fd[0]).abs() <= FD, "∂x̂ ψ̂_{j}: {} vs {}", grad[0], fd[0]);
        prop_assert!((grad[1] - fd[1]).abs() <= FD, "∂ŷ ψ̂_{j}: {} vs {}", grad[1], fd[1]);
    }

    #[test]
    fn interpolation_reproduces_affine_velocity_fields(
        half_n in 1usize..=4,
        coeffs in prop::array::uniform6(-2.0..2.0f64),
        cell_frac in (0.0..1.0f64, 0.0..1.0f64),
        (xr, yr) in interior_ref_point(),
    ) {
        let n = 2 * half_n;
        let mesh = Mesh::new(n).unwrap();
        let [a, b, c, d, e, f] = coeffs;
        let exact = move |x: f64, y: f64| (a + b * x + c * y, d + e * x + f * y);
        let field = VelocityField::interpolate(&mesh, exact);
        let cj = 1 + (cell_frac.0 * n as f64) as usize;
        let ck = 1 + (cell_frac.1 * n as f64) as usize;
        let (cj, ck) = (cj.min(n), ck.min(n));
        let map = AffineMap::for_cell(&mesh, cj, ck);
        let (x, y) = map.to_physical(xr, yr);
        let (eu, ev) = exact(x, y);
        let (du, dv) = evaluate_velocity(&mesh, &field, None, x, y, (cj, ck)).unwrap();
        prop_assert!((du - eu).abs() <= EXACT, "u: {du} vs {eu}");
        prop_assert!((dv - ev).abs() <= EXACT, "v: {dv} vs {ev}");
    }

    #[test]
    fn random_fields_are_continuous_at_edge_midpoints(
        seedlets in prop::collection::vec(-1.0..1.0f64, 50),
    ) {
        let n = 6;
        let mesh = Mesh::new(n).unwrap();
        let mut field = VelocityField::zeros(&mesh);
        let mut it = seedlets.into_iter();
        for k in 1..n {
            for j in 1..n {
                field.set(j, k, it.next().unwrap(), it.next().unwrap());
            }
        }
        let h = mesh.h();
        for k in 1..=n {
            for j in 1..n {
                // vertical edge between cells (j,k) and (j+1,k)
                let (x, y) = (j as f64 * h, (k as f64 - 0.5) * h);
                let left = evaluate_velocity(&mesh, &field, None, x, y, (j, k)).unwrap();
                let right = evaluate_velocity(&mesh, &field, None, x, y, (j + 1, k)).unwrap();
                prop_assert!((left.0 - right.0).abs() <= EXACT);
                prop_assert!((left.1 - right.1).abs() <= EXACT);
            }
        }
        for k in 1..n {
            for j in 1..=n {
                // horizontal edge between cells (j,k) and (j,k+1)
                let (x, y) = ((j as f64 - 0.5) * h, k as f64 * h);
                let below = evaluate_velocity(&mesh, &field, None, x, y, (j, k)).unwrap();
                let above = evaluate_velocity(&mesh, &field, None, x, y, (j, k + 1)).unwrap();
                prop_assert!((below.0 - above.0).abs() <= EXACT);
                prop_assert!((below.1 - above.1).abs() <= EXACT);
            }
        }
    }
}
