//! Acceptance gate for the cavity solver: nine criteria, one printed
//! PASS/FAIL line each, every tolerance pinned at its check site. Solutions
//! are cached and shared between criteria, but each timed criterion performs
//! its own solves inside its stopwatch.
//!
//! Meshes go up to 256 cells per side; the full gate takes roughly half an
//! hour on one core. Run it with
//!
//! ```text
//! cargo test -p ncflow-cli --test acceptance -- --nocapture
//! ```
//!
//! Two opt-in tiers (`--ignored`) cover the high-Reynolds vortex tables and
//! the 512-mesh profile check; they are informational and long-running.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use ncflow_cli::reference;
use ncflow_core::assembly::{
    assemble_a, assemble_b, assemble_body_force, assemble_convection, assemble_system,
};
use ncflow_core::diagnostics::{
    cell_divergence, centerline_profiles, full_report, DiagnosticsReport,
};
use ncflow_core::elements::{
    gauss_1d, gauss_rule, p1nc_corner_value_ref, p1nc_gradient, AffineMap, DssyRef,
    CORNER_OFFSETS, DEFAULT_NG,
};
use ncflow_core::linalg::CsrMatrix;
use ncflow_core::mesh::{CellColor, Mesh};
use ncflow_core::solver::{picard_solve, solve_oseen, solve_stokes};
use ncflow_core::spaces::{
    evaluate_velocity, evaluate_velocity_gradient, BoundaryLifting, PressureField, VelocityField,
};
use ncflow_core::{CavitySolution, PicardConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// shared driver
// ---------------------------------------------------------------------------

/// Collects the per-criterion verdicts and prints them as they land.
struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn new() -> Self {
        Gate { failures: Vec::new() }
    }

    fn record(&mut self, criterion: usize, pass: bool, detail: String) {
        let status = if pass { "PASS" } else { "FAIL" };
        let line = format!("criterion {criterion}: {status} — {detail}");
        println!("{line}");
        if !pass {
            self.failures.push(line);
        }
    }
}

/// Cavity solves (and their diagnostics reports) shared across criteria,
/// keyed by (Re, N). Every solve uses the library defaults: relative
/// residual 1e-10, automatic continuation.
struct Cache {
    solutions: HashMap<(u64, usize), CavitySolution>,
    reports: HashMap<(u64, usize), DiagnosticsReport>,
}

impl Cache {
    fn new() -> Self {
        Cache { solutions: HashMap::new(), reports: HashMap::new() }
    }

    fn solution(&mut self, re: f64, n: usize) -> &CavitySolution {
        self.solutions.entry((re.to_bits(), n)).or_insert_with(|| {
            let mesh = Mesh::new(n).expect("valid mesh size");
            let config = PicardConfig { re, ..Default::default() };
            picard_solve(&mesh, &config)
                .unwrap_or_else(|e| panic!("cavity solve Re={re}, N={n} failed: {e}"))
        })
    }

    fn report(&mut self, re: f64, n: usize) -> &DiagnosticsReport {
        let key = (re.to_bits(), n);
        if !self.reports.contains_key(&key) {
            let rep = {
                let sol = self.solution(re, n);
                full_report(&sol.mesh, &sol.u, Some(&sol.lifting), re).expect("diagnostics")
            };
            self.reports.insert(key, rep);
        }
        &self.reports[&key]
    }
}

#[test]
fn acceptance_criteria() {
    let mut gate = Gate::new();
    let mut cache = Cache::new();

    let (ok, detail) = criterion_1_divergence_law(&mut cache);
    gate.record(1, ok, detail);
    let (ok, detail) = criterion_2_vorticity_compatibility(&mut cache);
    gate.record(2, ok, detail);
    let (ok, detail) = criterion_3_flow_rates(&mut cache);
    gate.record(3, ok, detail);
    let (ok, detail) = criterion_4_centerline_profiles(&mut cache);
    gate.record(4, ok, detail);
    let (ok, detail) = criterion_5_primary_vortex(&mut cache);
    gate.record(5, ok, detail);
    let (ok, detail) = criterion_6_dof_counts();
    gate.record(6, ok, detail);
    let (ok, detail) = criterion_7_element_properties();
    gate.record(7, ok, detail);
    let (ok, detail) = criterion_8_oracle_equivalence();
    gate.record(8, ok, detail);
    let (ok, detail) = criterion_9_manufactured_convergence();
    gate.record(9, ok, detail);

    assert!(
        gate.failures.is_empty(),
        "{} criterion(s) failed:\n{}",
        gate.failures.len(),
        gate.failures.join("\n")
    );
}

// ---------------------------------------------------------------------------
// criterion 1: per-cell divergence law, |∫_Q ∇·u_h| = h³ with alternating
// signs, for (Re, N) ∈ {100, 1000} × {16, 64, 128}; six runs within 5 min
// ---------------------------------------------------------------------------

fn criterion_1_divergence_law(cache: &mut Cache) -> (bool, String) {
    const BUDGET_S: f64 = 300.0;
    let pairs =
        [(100.0, 16usize), (1000.0, 16), (100.0, 64), (1000.0, 64), (100.0, 128), (1000.0, 128)];
    let started = Instant::now();
    let mut magnitudes_ok = true;
    let mut signs_ok = true;
    // worst defect as a fraction of its allowance 1e-11·h³ + 1e-13
    let mut worst_fraction = 0.0f64;
    for &(re, n) in &pairs {
        let sol = cache.solution(re, n);
        let h3 = sol.mesh.h().powi(3);
        let allowance = 1e-11 * h3 + 1e-13;
        let (div, _) = cell_divergence(&sol.mesh, &sol.u, Some(&sol.lifting));
        for (idx, &d) in div.iter().enumerate() {
            let defect = (d.abs() - h3).abs();
            worst_fraction = worst_fraction.max(defect / allowance);
            magnitudes_ok &= defect <= allowance;
            let (j, k) = sol.mesh.cell_at(idx);
            signs_ok &= (d < 0.0) == (CellColor::of(j, k) == CellColor::Red);
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    let pass = magnitudes_ok && signs_ok && elapsed <= BUDGET_S;
    let detail = format!(
        "per-cell |∫∇·u_h| = h³ within 1e-11·h³+1e-13 over (Re,N) ∈ {{100,1000}}×{{16,64,128}} \
         (worst defect at {worst_fraction:.1e} of the allowance), red cells negative: {signs_ok}; \
         {elapsed:.1} s of {BUDGET_S:.0} s budget"
    );
    (pass, detail)
}

// ---------------------------------------------------------------------------
// criterion 2: |∫_Ω ω + 1| ≤ 1e-10 for Re ∈ {100, 400, 1000} at N = 128
// ---------------------------------------------------------------------------

fn criterion_2_vorticity_compatibility(cache: &mut Cache) -> (bool, String) {
    const LIMIT: f64 = 1e-10;
    let mut worst = 0.0f64;
    for &re in &[100.0, 400.0, 1000.0] {
        let defect = (cache.report(re, 128).vorticity_integral + 1.0).abs();
        worst = worst.max(defect);
    }
    let pass = worst <= LIMIT;
    let detail = format!(
        "∫ω = −1 at N=128 for Re ∈ {{100,400,1000}} (worst defect {worst:.1e} ≤ {LIMIT:.0e})"
    );
    (pass, detail)
}

// ---------------------------------------------------------------------------
// criterion 3: centerline volumetric flow rates Q_{u,0.5}, Q_{v,0.5} ≤ 1e-10
// for Re ∈ {100, 1000} at N = 128
// ---------------------------------------------------------------------------

fn criterion_3_flow_rates(cache: &mut Cache) -> (bool, String) {
    const LIMIT: f64 = 1e-10;
    let mut worst = 0.0f64;
    for &re in &[100.0, 1000.0] {
        let rep = cache.report(re, 128);
        worst = worst.max(rep.q_u_half.abs()).max(rep.q_v_half.abs());
    }
    let pass = worst <= LIMIT;
    let detail = format!(
        "|Q_u(0.5)|, |Q_v(0.5)| at N=128 for Re ∈ {{100,1000}} (worst {worst:.1e} ≤ {LIMIT:.0e})"
    );
    (pass, detail)
}

// ---------------------------------------------------------------------------
// criterion 4: Re = 1000, N = 256 centerline velocities within 1% of the
// Botella–Peyret spectral values at the 15 interior benchmark stations,
// within 30 min
// ---------------------------------------------------------------------------

fn criterion_4_centerline_profiles(cache: &mut Cache) -> (bool, String) {
    const BUDGET_S: f64 = 1800.0;
    const REL_TOL: f64 = 0.01;
    let started = Instant::now();
    let sol = cache.solution(1000.0, 256);

    let interior = |rows: &'static [reference::ProfileRow]| -> Vec<(f64, f64)> {
        rows.iter()
            .filter(|r| !r.is_boundary())
            .filter_map(|r| r.botella_peyret.map(|bp| (r.station(), bp)))
            .collect()
    };
    let u_rows = interior(&reference::U_CENTERLINE_RE1000);
    let v_rows = interior(&reference::V_CENTERLINE_RE1000);

    let u_stations: Vec<f64> = u_rows.iter().map(|&(s, _)| s).collect();
    let v_stations: Vec<f64> = v_rows.iter().map(|&(s, _)| s).collect();
    let profiles = centerline_profiles(
        &sol.mesh,
        &sol.u,
        Some(&sol.lifting),
        Some(&u_stations),
        Some(&v_stations),
    )
    .expect("profile extraction");

    let mut worst = 0.0f64;
    for (point, &(_, bp)) in profiles.u.iter().zip(&u_rows).chain(profiles.v.iter().zip(&v_rows)) {
        worst = worst.max((point.value - bp).abs() / bp.abs());
    }
    let elapsed = started.elapsed().as_secs_f64();
    let stations = u_rows.len() + v_rows.len();
    let pass = u_rows.len() == 15 && v_rows.len() == 15 && worst <= REL_TOL && elapsed <= BUDGET_S;
    let detail = format!(
        "Re=1000, N=256 centerline u/v within {:.0}% of Botella–Peyret at {stations} \
         interior stations (worst rel. err {worst:.2e}); {elapsed:.0} s of {BUDGET_S:.0} s budget",
        REL_TOL * 100.0
    );
    (pass, detail)
}

// ---------------------------------------------------------------------------
// criterion 5: Re = 100, N = 256 primary vortex: ψ_min within 5e-4 absolute,
// center within one cell width of the tabulated location, |ω| within 2%
// ---------------------------------------------------------------------------

fn criterion_5_primary_vortex(cache: &mut Cache) -> (bool, String) {
    const PSI_ABS: f64 = 5e-4;
    const OMEGA_REL: f64 = 0.02;
    let n = 256usize;
    let h = 1.0 / n as f64;
    let rep = cache.report(100.0, n);
    let primary =
        rep.vortices.iter().find(|v| v.label == "primary").expect("primary vortex located");
    let r = reference::primary_vortex_nc256(100.0).expect("Re=100 vortex reference");

    let psi_ok = (primary.psi - r.psi_min).abs() <= PSI_ABS;
    let loc_ok = (primary.x - r.x).abs() <= h && (primary.y - r.y).abs() <= h;
    // the classical tables report the primary-vortex vorticity as a positive
    // number; with ω = ∂v/∂x − ∂u/∂y and a lid moving in +x the computed
    // center value is negative, so the comparison uses the magnitude
    let omega_ok = (primary.omega.abs() - r.omega).abs() <= OMEGA_REL * r.omega;

    let pass = psi_ok && loc_ok && omega_ok;
    let detail = format!(
        "Re=100, N=256 primary vortex: ψ {:.6} (ref {:.6} ± {PSI_ABS:.0e}), center \
         ({:.4}, {:.4}) within h = {h:.4} of ({:.4}, {:.4}), |ω| {:.5} within {:.0}% of {:.5}",
        primary.psi,
        r.psi_min,
        primary.x,
        primary.y,
        r.x,
        r.y,
        primary.omega.abs(),
        OMEGA_REL * 100.0,
        r.omega
    );
    (pass, detail)
}

// ---------------------------------------------------------------------------
// criterion 6: velocity/pressure space dimensions match the tabulated counts
// ---------------------------------------------------------------------------

fn criterion_6_dof_counts() -> (bool, String) {
    let mut pass = true;
    let mut parts = Vec::new();
    for &(n, v_ref, p_ref) in &reference::DOF_COUNTS {
        let mesh = Mesh::new(n).expect("valid mesh size");
        let v = VelocityField::zeros(&mesh).num_dofs();
        let p = PressureField::zeros(&mesh).num_dofs();
        pass &= v == v_ref && p == p_ref;
        parts.push(format!("N={n}: {v}/{p} (ref {v_ref}/{p_ref})"));
    }
    (pass, format!("velocity/pressure DOF counts — {}", parts.join(", ")))
}

// ---------------------------------------------------------------------------
// criterion 7: reference-element identities to 1e-13; analytic gradients
// within 1e-8 of central finite differences
// ---------------------------------------------------------------------------

fn central_diff<F: Fn(f64, f64) -> f64>(f: &F, x: f64, y: f64, step: f64) -> [f64; 2] {
    [
        (f(x + step, y) - f(x - step, y)) / (2.0 * step),
        (f(x, y + step) - f(x, y - step)) / (2.0 * step),
    ]
}

fn criterion_7_element_properties() -> (bool, String) {
    const EXACT: f64 = 1e-13;
    const FD_TOL: f64 = 1e-8;
    let samples = [-0.9, -0.45, 0.0, 0.45, 0.9];
    let mut worst_exact = 0.0f64;
    let mut worst_fd = 0.0f64;

    // midpoint-node duality, edge mean-value property, partition of unity,
    // and gradient cross-checks for the two mean-zero bubble families
    let (gn, gw) = gauss_1d(6);
    let edge_point = |edge: usize, t: f64| match edge {
        0 => (1.0, t),
        1 => (t, 1.0),
        2 => (-1.0, t),
        _ => (t, -1.0),
    };
    for ell in [1usize, 2] {
        let elem = DssyRef::new(ell).expect("bubble family");
        for (i, &(nx, ny)) in DssyRef::nodes().iter().enumerate() {
            for j in 1..=4 {
                let expected = if j == i + 1 { 1.0 } else { 0.0 };
                let value = elem.value(j, nx, ny).expect("node value");
                worst_exact = worst_exact.max((value - expected).abs());
            }
        }
        for j in 1..=4 {
            for edge in 0..4 {
                let mean: f64 = gn
                    .iter()
                    .zip(&gw)
                    .map(|(&t, &w)| {
                        let (x, y) = edge_point(edge, t);
                        w * elem.value(j, x, y).expect("edge value")
                    })
                    .sum::<f64>()
                    / 2.0;
                let expected = if j == edge + 1 { 1.0 } else { 0.0 };
                worst_exact = worst_exact.max((mean - expected).abs());
            }
        }
        for &x in &samples {
            for &y in &samples {
                let sum: f64 = (1..=4).map(|j| elem.value(j, x, y).expect("value")).sum();
                worst_exact = worst_exact.max((sum - 1.0).abs());
                for j in 1..=4 {
                    let (_, grad) = elem.eval(j, x, y).expect("eval");
                    let f = |px: f64, py: f64| elem.value(j, px, py).expect("value");
                    let fd = central_diff(&f, x, y, 1e-5);
                    worst_fd =
                        worst_fd.max((grad[0] - fd[0]).abs()).max((grad[1] - fd[1]).abs());
                }
            }
        }
    }

    // corner-function identities for the vertex element: midpoint values and
    // the two-cover partition Σφ = 2
    for c in 0..4 {
        let on = [
            p1nc_corner_value_ref(c, 1.0, 0.0),
            p1nc_corner_value_ref(c, 0.0, 1.0),
            p1nc_corner_value_ref(c, -1.0, 0.0),
            p1nc_corner_value_ref(c, 0.0, -1.0),
        ];
        // each corner function hits 1 on two adjacent midpoints, 0 opposite
        let ones = on.iter().filter(|&&v| (v - 1.0).abs() <= EXACT).count();
        let zeros = on.iter().filter(|&&v| v.abs() <= EXACT).count();
        if ones != 2 || zeros != 2 {
            worst_exact = worst_exact.max(1.0);
        }
    }
    for &x in &samples {
        for &y in &samples {
            let sum: f64 = (0..4).map(|c| p1nc_corner_value_ref(c, x, y)).sum();
            worst_exact = worst_exact.max((sum - 2.0).abs());
        }
    }

    // vertex-basis gradients against finite differences through the physical
    // map, for every cell sharing a handful of interior vertices
    let mesh = Mesh::new(4).expect("mesh");
    for &(vj, vk) in &[(1usize, 1usize), (2, 3), (3, 1)] {
        for corner in 0..4 {
            let (dj, dk) = CORNER_OFFSETS[corner];
            let cell = (vj + dj, vk + dk);
            let offset = (vj + 1 - cell.0, vk + 1 - cell.1);
            let c = CORNER_OFFSETS.iter().position(|&o| o == offset).expect("corner offset");
            let map = AffineMap::for_cell(&mesh, cell.0, cell.1);
            let grad = p1nc_gradient(mesh.h(), (vj, vk), cell).expect("gradient");
            let f = |x: f64, y: f64| {
                let (rx, ry) = map.to_reference(x, y);
                p1nc_corner_value_ref(c, rx, ry)
            };
            let (x, y) = map.to_physical(0.3, -0.4);
            let fd = central_diff(&f, x, y, 1e-6);
            worst_fd = worst_fd.max((grad[0] - fd[0]).abs()).max((grad[1] - fd[1]).abs());
        }
    }

    let pass = worst_exact <= EXACT && worst_fd <= FD_TOL;
    let detail = format!(
        "midpoint duality, edge means, partitions of unity exact to {worst_exact:.1e} ≤ \
         {EXACT:.0e}; gradients within {worst_fd:.1e} ≤ {FD_TOL:.0e} of central differences"
    );
    (pass, detail)
}

// ---------------------------------------------------------------------------
// criterion 8: assembled forms vs a dense-quadrature oracle at N = 4 (10
// random coefficient vectors, 1e-12), and the explicit pinned-cell pressure
// basis reproducing the multiplier Stokes velocity to 1e-10
// ---------------------------------------------------------------------------

const ORACLE_NG: usize = 8;

fn random_field(mesh: &Mesh, rng: &mut ChaCha8Rng) -> VelocityField {
    let n = mesh.n();
    let mut f = VelocityField::zeros(mesh);
    for k in 1..n {
        for j in 1..n {
            f.set(j, k, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    f
}

fn integrate<F: FnMut(f64, f64, (usize, usize)) -> f64>(mesh: &Mesh, mut integrand: F) -> f64 {
    let rule = gauss_rule(ORACLE_NG);
    let mut total = 0.0;
    for k in 1..=mesh.n() {
        for j in 1..=mesh.n() {
            let map = AffineMap::for_cell(mesh, j, k);
            let jac = map.jacobian();
            for &(xr, yr, w) in &rule.points {
                let (x, y) = map.to_physical(xr, yr);
                total += w * jac * integrand(x, y, (j, k));
            }
        }
    }
    total
}

fn component_halves(field: &VelocityField) -> (Vec<f64>, Vec<f64>) {
    let dofs = field.to_dof_vector();
    let m = dofs.len() / 2;
    (dofs[..m].to_vec(), dofs[m..].to_vec())
}

fn scalar_block_product(block: &CsrMatrix, v: &VelocityField, u: &VelocityField) -> f64 {
    let (ux, uy) = component_halves(u);
    let (vx, vy) = component_halves(v);
    let au_x = block.matvec(&ux);
    let au_y = block.matvec(&uy);
    vx.iter().zip(&au_x).map(|(a, b)| a * b).sum::<f64>()
        + vy.iter().zip(&au_y).map(|(a, b)| a * b).sum::<f64>()
}

fn criterion_8_oracle_equivalence() -> (bool, String) {
    const FORM_TOL: f64 = 1e-12;
    const PINNED_TOL: f64 = 1e-10;
    let mesh = Mesh::new(4).expect("mesh");
    let nu = 0.23;
    let lifting = BoundaryLifting::new(&mesh);
    let a = assemble_a(&mesh, nu);
    let (b_x, b_y) = assemble_b(&mesh);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst_form = 0.0f64;

    for _ in 0..10 {
        let u = random_field(&mesh, &mut rng);
        let v = random_field(&mesh, &mut rng);
        let w = random_field(&mesh, &mut rng);
        let q: Vec<f64> = (0..mesh.num_cells()).map(|_| rng.gen_range(-1.0..1.0)).collect();

        // a_h: ν ∫ ∇u : ∇v against the assembled scalar diffusion block
        let dense_a = integrate(&mesh, |x, y, cell| {
            let gu = evaluate_velocity_gradient(&mesh, &u, None, x, y, cell).expect("grad");
            let gv = evaluate_velocity_gradient(&mesh, &v, None, x, y, cell).expect("grad");
            let mut s = 0.0;
            for r in 0..2 {
                for c in 0..2 {
                    s += gu[r][c] * gv[r][c];
                }
            }
            nu * s
        });
        worst_form = worst_form.max((scalar_block_product(&a, &v, &u) - dense_a).abs());

        // b_h: −∫ q ∇·u against the assembled divergence blocks
        let (ux, uy) = component_halves(&u);
        let bu_x = b_x.matvec(&ux);
        let bu_y = b_y.matvec(&uy);
        let sparse_b: f64 =
            q.iter().zip(bu_x.iter().zip(&bu_y)).map(|(qc, (x, y))| qc * (x + y)).sum();
        let dense_b = integrate(&mesh, |x, y, cell| {
            let g = evaluate_velocity_gradient(&mesh, &u, None, x, y, cell).expect("grad");
            -q[mesh.cell_index(cell.0, cell.1)] * (g[0][0] + g[1][1])
        });
        worst_form = worst_form.max((sparse_b - dense_b).abs());

        // c_h: ∫ ((w·∇)u)·v with and without the boundary lifting in the
        // transport field
        for lift in [None, Some(&lifting)] {
            let n_w = assemble_convection(&mesh, &w, lift);
            let dense_c = integrate(&mesh, |x, y, cell| {
                let (wx, wy) = evaluate_velocity(&mesh, &w, lift, x, y, cell).expect("value");
                let gu = evaluate_velocity_gradient(&mesh, &u, None, x, y, cell).expect("grad");
                let (vx, vy) = evaluate_velocity(&mesh, &v, None, x, y, cell).expect("value");
                (wx * gu[0][0] + wy * gu[0][1]) * vx + (wx * gu[1][0] + wy * gu[1][1]) * vy
            });
            worst_form = worst_form.max((scalar_block_product(&n_w, &v, &u) - dense_c).abs());
        }
    }
    let forms_ok = worst_form <= FORM_TOL;

    // multiplier formulation vs an explicit pinned-cell difference basis on
    // a Stokes solve, with the pins placed at the bottom-left color pair
    let n = mesh.n();
    let nu_stokes = 0.02;
    let w0 = VelocityField::zeros(&mesh);
    let sys = assemble_system(&mesh, nu_stokes, &w0, Some(&lifting));
    let m = sys.velocity_block_size();
    let cells = mesh.num_cells();
    let k_sparse = sys.k_matrix();

    let mut k_dense = DMatrix::<f64>::zeros(2 * m, 2 * m);
    for r in 0..m {
        let (cols, vals) = k_sparse.row(r);
        for (&c, &val) in cols.iter().zip(vals) {
            k_dense[(r, c)] = val;
            k_dense[(m + r, m + c)] = val;
        }
    }
    let mut b_dense = DMatrix::<f64>::zeros(cells, 2 * m);
    for r in 0..cells {
        let (cols, vals) = sys.b_x.row(r);
        for (&c, &val) in cols.iter().zip(vals) {
            b_dense[(r, c)] = val;
        }
        let (cols, vals) = sys.b_y.row(r);
        for (&c, &val) in cols.iter().zip(vals) {
            b_dense[(r, m + c)] = val;
        }
    }
    let pin_red = mesh.cell_index(1, 1);
    let pin_black = mesh.cell_index(2, 1);
    let mut basis = DMatrix::<f64>::zeros(cells, cells - 2);
    let mut col = 0;
    for k in 1..=n {
        for j in 1..=n {
            let c = mesh.cell_index(j, k);
            if c == pin_red || c == pin_black {
                continue;
            }
            let pin = match CellColor::of(j, k) {
                CellColor::Red => pin_red,
                CellColor::Black => pin_black,
            };
            basis[(c, col)] = 1.0;
            basis[(pin, col)] = -1.0;
            col += 1;
        }
    }
    assert_eq!(col, cells - 2);

    let b_reduced = &basis.transpose() * &b_dense;
    let nd = 2 * m + cells - 2;
    let mut saddle = DMatrix::<f64>::zeros(nd, nd);
    saddle.view_mut((0, 0), (2 * m, 2 * m)).copy_from(&k_dense);
    saddle.view_mut((0, 2 * m), (2 * m, cells - 2)).copy_from(&b_reduced.transpose());
    saddle.view_mut((2 * m, 0), (cells - 2, 2 * m)).copy_from(&b_reduced);
    let mut rhs = DVector::<f64>::zeros(nd);
    for (i, &v) in sys.f.iter().enumerate() {
        rhs[i] = v;
    }
    let g_reduced = basis.transpose() * DVector::from_column_slice(&sys.g);
    for i in 0..(cells - 2) {
        rhs[2 * m + i] = g_reduced[i];
    }
    let pinned = saddle.lu().solve(&rhs).expect("reduced saddle system is nonsingular");

    let multiplier = solve_stokes(&mesh, nu_stokes, Some(&lifting)).expect("Stokes solve");
    let mut velocity_diff = 0.0f64;
    for i in 0..2 * m {
        velocity_diff = velocity_diff.max((pinned[i] - multiplier.u[i]).abs());
    }
    let pinned_ok = velocity_diff <= PINNED_TOL;

    let pass = forms_ok && pinned_ok;
    let detail = format!(
        "N=4 assembled a_h/b_h/c_h vs dense quadrature over 10 random trials (worst \
         {worst_form:.1e} ≤ {FORM_TOL:.0e}); pinned-cell basis vs multiplier Stokes velocity \
         (max diff {velocity_diff:.1e} ≤ {PINNED_TOL:.0e})"
    );
    (pass, detail)
}

// ---------------------------------------------------------------------------
// criterion 9: first-order convergence (observed order ≥ 0.9) to a smooth
// manufactured Stokes solution across N = 16 → 32 → 64
// ---------------------------------------------------------------------------

/// Divergence-free manufactured velocity from the stream function
/// ψ = sin²(πx) sin²(πy), with pressure x³ + y³ − 1/2 (zero mean).
fn mf_velocity(x: f64, y: f64) -> (f64, f64) {
    let sx = (PI * x).sin();
    let sy = (PI * y).sin();
    (PI * sx * sx * (2.0 * PI * y).sin(), -PI * (2.0 * PI * x).sin() * sy * sy)
}

fn mf_gradient(x: f64, y: f64) -> [[f64; 2]; 2] {
    let pi2 = PI * PI;
    let s2x = (2.0 * PI * x).sin();
    let s2y = (2.0 * PI * y).sin();
    let c2x = (2.0 * PI * x).cos();
    let c2y = (2.0 * PI * y).cos();
    let sx2 = (PI * x).sin().powi(2);
    let sy2 = (PI * y).sin().powi(2);
    [
        [pi2 * s2x * s2y, 2.0 * pi2 * sx2 * c2y],
        [-2.0 * pi2 * c2x * sy2, -pi2 * s2x * s2y],
    ]
}

fn mf_pressure(x: f64, y: f64) -> f64 {
    x * x * x + y * y * y - 0.5
}

/// f = −Δu + ∇p at unit viscosity.
fn mf_body_force(x: f64, y: f64) -> (f64, f64) {
    let pi3 = PI * PI * PI;
    let s2x = (2.0 * PI * x).sin();
    let s2y = (2.0 * PI * y).sin();
    let c2x = (2.0 * PI * x).cos();
    let c2y = (2.0 * PI * y).cos();
    let sx2 = (PI * x).sin().powi(2);
    let sy2 = (PI * y).sin().powi(2);
    let lap_u = 2.0 * pi3 * c2x * s2y - 4.0 * pi3 * sx2 * s2y;
    let lap_v = 4.0 * pi3 * s2x * sy2 - 2.0 * pi3 * s2x * c2y;
    (-lap_u + 3.0 * x * x, -lap_v + 3.0 * y * y)
}

fn mf_errors_at(n: usize) -> (f64, f64) {
    let mesh = Mesh::new(n).expect("mesh");
    let w = VelocityField::zeros(&mesh);
    let mut sys = assemble_system(&mesh, 1.0, &w, None);
    sys.f = assemble_body_force(&mesh, mf_body_force);
    let sol = solve_oseen(&sys, None).expect("manufactured Stokes solve");
    let field = VelocityField::from_dof_vector(&mesh, &sol.u).expect("DOF length");

    let rule = gauss_rule(DEFAULT_NG);
    let mut h1_sq = 0.0;
    let mut p_sq = 0.0;
    for k in 1..=n {
        for j in 1..=n {
            let gh = field.gradient_in_cell(&mesh, (j, k));
            let ph = sol.p[mesh.cell_index(j, k)];
            let map = AffineMap::for_cell(&mesh, j, k);
            let jac = map.jacobian();
            for &(xr, yr, wq) in &rule.points {
                let (x, y) = map.to_physical(xr, yr);
                let ge = mf_gradient(x, y);
                let mut diff = 0.0;
                for r in 0..2 {
                    for c in 0..2 {
                        diff += (gh[r][c] - ge[r][c]).powi(2);
                    }
                }
                h1_sq += wq * jac * diff;
                p_sq += wq * jac * (ph - mf_pressure(x, y)).powi(2);
            }
        }
    }
    (h1_sq.sqrt(), p_sq.sqrt())
}

fn criterion_9_manufactured_convergence() -> (bool, String) {
    const MIN_ORDER: f64 = 0.9;
    // self-check of the manufactured calculus before trusting the errors
    for &(x, y) in &[(0.31, 0.77), (0.62, 0.11), (0.05, 0.55)] {
        let g = mf_gradient(x, y);
        assert!((g[0][0] + g[1][1]).abs() <= 1e-12, "manufactured field is not solenoidal");
        let fd_u = central_diff(&|px, py| mf_velocity(px, py).0, x, y, 1e-5);
        let fd_v = central_diff(&|px, py| mf_velocity(px, py).1, x, y, 1e-5);
        assert!((fd_u[0] - g[0][0]).abs() <= 1e-6 && (fd_u[1] - g[0][1]).abs() <= 1e-6);
        assert!((fd_v[0] - g[1][0]).abs() <= 1e-6 && (fd_v[1] - g[1][1]).abs() <= 1e-6);
    }
    for &(x, y) in &[(0.0, 0.3), (1.0, 0.8), (0.4, 0.0), (0.7, 1.0)] {
        let (u, v) = mf_velocity(x, y);
        assert!(u.abs() <= 1e-13 && v.abs() <= 1e-13, "boundary data must be homogeneous");
    }

    let meshes = [16usize, 32, 64];
    let errors: Vec<(f64, f64)> = meshes.iter().map(|&n| mf_errors_at(n)).collect();
    let mut orders = Vec::new();
    let mut pass = true;
    for pair in errors.windows(2) {
        let order_u = (pair[0].0 / pair[1].0).log2();
        let order_p = (pair[0].1 / pair[1].1).log2();
        pass &= order_u >= MIN_ORDER && order_p >= MIN_ORDER;
        orders.push(format!("u {order_u:.2}, p {order_p:.2}"));
    }
    let detail = format!(
        "manufactured Stokes orders across N = 16→32→64 ({}) all ≥ {MIN_ORDER}",
        orders.join("; ")
    );
    (pass, detail)
}

// ---------------------------------------------------------------------------
// opt-in extended tiers (non-gating)
// ---------------------------------------------------------------------------

/// High-Reynolds vortex survey at N = 256. The benchmark tables extend to
/// Re = 5000, but convergence there depends on the continuation path, so the
/// tier reports deviations without gating on them.
#[test]
#[ignore = "extended tier: Re ∈ {2500, 3200, 5000} at N=256 takes hours; run explicitly"]
fn extended_high_reynolds_vortices() {
    for &re in &[2500.0, 3200.0, 5000.0] {
        let mesh = Mesh::new(256).expect("mesh");
        let config = PicardConfig { re, ..Default::default() };
        let sol = picard_solve(&mesh, &config)
            .unwrap_or_else(|e| panic!("cavity solve Re={re}, N=256 failed: {e}"));
        let rep = full_report(&sol.mesh, &sol.u, Some(&sol.lifting), re).expect("diagnostics");
        let primary =
            rep.vortices.iter().find(|v| v.label == "primary").expect("primary vortex");
        match reference::primary_vortex_nc256(re) {
            Some(r) => println!(
                "Re={re}: ψ {:.6} (ref {:.6}), |ω| {:.5} (ref {:.5}), center ({:.4}, {:.4}) \
                 (ref ({:.4}, {:.4}))",
                primary.psi,
                r.psi_min,
                primary.omega.abs(),
                r.omega,
                primary.x,
                primary.y,
                r.x,
                r.y
            ),
            None => println!(
                "Re={re}: ψ {:.6}, |ω| {:.5}, center ({:.4}, {:.4}) — no reference row",
                primary.psi,
                primary.omega.abs(),
                primary.x,
                primary.y
            ),
        }
        assert!(primary.psi.is_finite() && primary.omega.is_finite());
    }
}

/// Fine-mesh profile check: Re = 1000 on N = 512, each interior centerline
/// station within 0.3% of the Botella–Peyret value. (Published 512-mesh
/// results for this discretization deviate from the spectral benchmark by up
/// to ~0.18% at some stations, so a 0.1% gate would reject even the
/// reference data; 0.3% covers it with margin.) The banded factors at this
/// size need roughly 7 GB of memory.
#[test]
#[ignore = "optional fine-mesh tier: N=512 needs ~7 GB and several hours; run explicitly"]
fn fine_mesh_centerline_profiles() {
    const REL_TOL: f64 = 3e-3;
    let mesh = Mesh::new(512).expect("mesh");
    let config = PicardConfig { re: 1000.0, ..Default::default() };
    let sol = picard_solve(&mesh, &config).expect("cavity solve Re=1000, N=512");

    let interior = |rows: &'static [reference::ProfileRow]| -> Vec<(f64, f64)> {
        rows.iter()
            .filter(|r| !r.is_boundary())
            .filter_map(|r| r.botella_peyret.map(|bp| (r.station(), bp)))
            .collect()
    };
    let u_rows = interior(&reference::U_CENTERLINE_RE1000);
    let v_rows = interior(&reference::V_CENTERLINE_RE1000);
    let u_stations: Vec<f64> = u_rows.iter().map(|&(s, _)| s).collect();
    let v_stations: Vec<f64> = v_rows.iter().map(|&(s, _)| s).collect();
    let profiles = centerline_profiles(
        &sol.mesh,
        &sol.u,
        Some(&sol.lifting),
        Some(&u_stations),
        Some(&v_stations),
    )
    .expect("profile extraction");

    let mut worst = 0.0f64;
    for (point, &(station, bp)) in
        profiles.u.iter().zip(&u_rows).chain(profiles.v.iter().zip(&v_rows))
    {
        let rel = (point.value - bp).abs() / bp.abs();
        worst = worst.max(rel);
        assert!(
            rel <= REL_TOL,
            "station {station}: computed {} vs reference {bp} (rel. err {rel:.2e})",
            point.value
        );
    }
    println!("N=512 centerlines within {REL_TOL} of Botella–Peyret (worst rel. err {worst:.2e})");
}
