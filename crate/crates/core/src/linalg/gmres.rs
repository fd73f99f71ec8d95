//! Full (unrestarted) GMRES with modified Gram-Schmidt, one
//! reorthogonalization pass, and Givens-rotation least squares. An optional
//! projector is applied to the initial residual and to every new Krylov
//! vector; with the projector onto the orthogonal complement of a known
//! operator kernel, this solves consistent singular systems in that
//! complement — exactly the shape of the pressure Schur complement here,
//! whose kernel is spanned by the constant and checkerboard modes.

use super::{axpy, dot, nrm2};

#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub iterations: usize,
    /// True relative residual ‖b − A x‖ / ‖b‖, recomputed at exit.
    pub rel_residual: f64,
    pub converged: bool,
}

/// Solves `A x = b` to relative residual `tol`; `x` carries the initial
/// guess in and the solution out. `project` is applied to the initial
/// residual and every Krylov vector (pass `|_| {}` for plain GMRES).
/// Stops early on stagnation (no meaningful progress over 20 iterations) or
/// lucky breakdown; `converged` reports whether the target was met.
pub fn gmres<A, P>(
    apply: A,
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iters: usize,
    project: P,
) -> GmresOutcome
where
    A: FnMut(&[f64], &mut [f64]),
    P: FnMut(&mut [f64]),
{
    gmres_right(apply, |v: &[f64], out: &mut [f64]| out.copy_from_slice(v), b, x, tol, max_iters, project)
}

/// Right-preconditioned variant: solves `A M⁻¹ y = b`, returning
/// `x = M⁻¹ y`. `precondition` applies `M⁻¹`. The Krylov basis lives in
/// residual space and all reported norms are true residuals of the original
/// system, so convergence control and the exit check are unaffected by the
/// quality of `M`.
pub fn gmres_right<A, M, P>(
    mut apply: A,
    mut precondition: M,
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iters: usize,
    mut project: P,
) -> GmresOutcome
where
    A: FnMut(&[f64], &mut [f64]),
    M: FnMut(&[f64], &mut [f64]),
    P: FnMut(&mut [f64]),
{
    let m = b.len();
    let norm_b = nrm2(b);
    if norm_b == 0.0 {
        x.fill(0.0);
        return GmresOutcome { iterations: 0, rel_residual: 0.0, converged: true };
    }
    let mut work = vec![0.0; m];
    let mut r0 = b.to_vec();
    if x.iter().any(|&v| v != 0.0) {
        apply(x, &mut work);
        for (ri, &wi) in r0.iter_mut().zip(&work) {
            *ri -= wi;
        }
    }
    project(&mut r0);
    let beta = nrm2(&r0);
    if beta <= tol * norm_b {
        return GmresOutcome { iterations: 0, rel_residual: beta / norm_b, converged: true };
    }

    let mut basis: Vec<Vec<f64>> = Vec::new();
    for ri in r0.iter_mut() {
        *ri /= beta;
    }
    basis.push(r0);
    let mut hess: Vec<Vec<f64>> = Vec::new(); // column k has k+2 entries
    let mut cs: Vec<f64> = Vec::new();
    let mut sn: Vec<f64> = Vec::new();
    let mut g = vec![beta];
    let mut best_rel = beta / norm_b;
    let mut since_progress = 0usize;
    let mut k_used = 0usize;
    let mut pre = vec![0.0; m];

    for k in 0..max_iters {
        precondition(&basis[k], &mut pre);
        apply(&pre, &mut work);
        project(&mut work);
        let w_scale = nrm2(&work);
        let mut hk = Vec::with_capacity(k + 2);
        for v in basis.iter() {
            let hij = dot(&work, v);
            axpy(-hij, v, &mut work);
            hk.push(hij);
        }
        // selective reorthogonalization: a second pass is needed only when
        // the first one cancelled most of the vector (the usual 1/√2 rule);
        // skipping it otherwise halves the Gram-Schmidt cost at large k
        if nrm2(&work) < 0.707 * w_scale {
            for (i, v) in basis.iter().enumerate() {
                let c = dot(&work, v);
                if c != 0.0 {
                    axpy(-c, v, &mut work);
                    hk[i] += c;
                }
            }
        }
        let hnorm = nrm2(&work);
        hk.push(hnorm);
        // previously accumulated rotations
        for i in 0..k {
            let (a, b2) = (hk[i], hk[i + 1]);
            hk[i] = cs[i] * a + sn[i] * b2;
            hk[i + 1] = -sn[i] * a + cs[i] * b2;
        }
        // new rotation zeroing the subdiagonal
        let r = hk[k].hypot(hk[k + 1]);
        let (c, s) = if r == 0.0 { (1.0, 0.0) } else { (hk[k] / r, hk[k + 1] / r) };
        cs.push(c);
        sn.push(s);
        hk[k] = r;
        hk[k + 1] = 0.0;
        hess.push(hk);
        g.push(-s * g[k]);
        g[k] *= c;
        k_used = k + 1;

        let rel = g[k + 1].abs() / norm_b;
        if rel < 0.995 * best_rel {
            best_rel = rel;
            since_progress = 0;
        } else {
            since_progress += 1;
        }
        let breakdown = hnorm <= 1e-14 * w_scale;
        if rel <= tol || breakdown || since_progress >= 20 || k + 1 == max_iters {
            break;
        }
        for wi in work.iter_mut() {
            *wi /= hnorm;
        }
        basis.push(std::mem::replace(&mut work, vec![0.0; m]));
    }

    // back-substitute H y = g
    let mut y = vec![0.0; k_used];
    for i in (0..k_used).rev() {
        let mut s = g[i];
        for (jj, yj) in y.iter().enumerate().skip(i + 1) {
            s -= hess[jj][i] * yj;
        }
        y[i] = if hess[i][i] != 0.0 { s / hess[i][i] } else { 0.0 };
    }
    // unwind the preconditioner once on the assembled residual-space update
    let mut s = vec![0.0; m];
    for (j, yj) in y.iter().enumerate() {
        axpy(*yj, &basis[j], &mut s);
    }
    precondition(&s, &mut pre);
    for (xi, &pi) in x.iter_mut().zip(&pre) {
        *xi += pi;
    }

    // honest exit residual
    apply(x, &mut work);
    let mut r = b.to_vec();
    for (ri, &wi) in r.iter_mut().zip(&work) {
        *ri -= wi;
    }
    project(&mut r);
    let rel = nrm2(&r) / norm_b;
    GmresOutcome { iterations: k_used, rel_residual: rel, converged: rel <= tol }
}
