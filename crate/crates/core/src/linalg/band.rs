//! Banded LU factorization with partial pivoting, in the classic band
//! storage layout: entry (i, j) of the matrix lives at band row
//! `kl + ku + i − j` of column `j`, with `kl` extra rows on top for the fill
//! that row interchanges can introduce. Factor in place, then solve
//! repeatedly against the frozen factors.

use super::{CsrMatrix, LinalgError};

#[derive(Debug, Clone)]
pub struct BandedMatrix {
    m: usize,
    kl: usize,
    ku: usize,
    /// Column-major, `ldab = 2kl + ku + 1` rows per column.
    ab: Vec<f64>,
    /// Largest |entry| at ingestion; anchors the singularity threshold.
    scale: f64,
}

impl BandedMatrix {
    pub fn zeros(m: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        BandedMatrix { m, kl, ku, ab: vec![0.0; ldab * m], scale: 0.0 }
    }

    #[inline]
    fn ldab(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    /// Adds `v` to entry (i, j); errors if outside the declared band.
    pub fn add_entry(&mut self, i: usize, j: usize, v: f64) -> Result<(), LinalgError> {
        if i >= self.m || j >= self.m || i + self.ku < j || j + self.kl < i {
            return Err(LinalgError::OutsideBand { row: i, col: j, kl: self.kl, ku: self.ku });
        }
        let ldab = self.ldab();
        self.ab[j * ldab + (self.kl + self.ku + i - j)] += v;
        self.scale = self.scale.max(v.abs());
        Ok(())
    }

    /// Copies a square CSR matrix into band storage with the given bands.
    pub fn from_csr(a: &CsrMatrix, kl: usize, ku: usize) -> Result<Self, LinalgError> {
        if a.nrows() != a.ncols() {
            return Err(LinalgError::DimensionMismatch {
                context: format!("banded conversion of {}x{} matrix", a.nrows(), a.ncols()),
            });
        }
        let mut band = Self::zeros(a.nrows(), kl, ku);
        for r in 0..a.nrows() {
            let (cols, vals) = a.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                band.add_entry(r, c, v)?;
            }
        }
        Ok(band)
    }

    /// LU factorization with partial pivoting (row interchanges stay within
    /// the widened band). Consumes the matrix; errors on a pivot smaller
    /// than `1e-14 ×` the largest ingested entry.
    pub fn factor(mut self) -> Result<BandedLu, LinalgError> {
        let (m, kl, ku) = (self.m, self.kl, self.ku);
        let ldab = self.ldab();
        let d = kl + ku; // band row of the diagonal
        let tiny = 1e-14 * self.scale;
        let mut ipiv = vec![0usize; m];
        for j in 0..m {
            let km = kl.min(m - 1 - j);
            // pivot search in column j, rows j..=j+km
            let col = &self.ab[j * ldab..(j + 1) * ldab];
            let mut best = 0usize;
            let mut best_abs = col[d].abs();
            for t in 1..=km {
                let a = col[d + t].abs();
                if a > best_abs {
                    best_abs = a;
                    best = t;
                }
            }
            if best_abs <= tiny {
                return Err(LinalgError::SingularPivot { col: j });
            }
            ipiv[j] = j + best;
            let ju = (j + kl + ku).min(m - 1);
            if best != 0 {
                for c in j..=ju {
                    let base = c * ldab + d + j - c;
                    self.ab.swap(base, base + best);
                }
            }
            // scale the multipliers
            let inv = 1.0 / self.ab[j * ldab + d];
            for t in 1..=km {
                self.ab[j * ldab + d + t] *= inv;
            }
            // trailing update, column by column (contiguous in memory)
            if km > 0 {
                let (head, tail) = self.ab.split_at_mut((j + 1) * ldab);
                let lcol = &head[j * ldab + d + 1..j * ldab + d + km + 1];
                for c in j + 1..=ju {
                    let off = (c - j - 1) * ldab;
                    let f = tail[off + d + j - c];
                    if f != 0.0 {
                        let dst = &mut tail[off + d + j - c + 1..off + d + j - c + km + 1];
                        for (dv, &lv) in dst.iter_mut().zip(lcol) {
                            *dv -= f * lv;
                        }
                    }
                }
            }
        }
        Ok(BandedLu { m, kl, ku, ab: self.ab, ipiv })
    }
}

/// Frozen LU factors of a banded matrix; solves repeatedly in place.
#[derive(Debug, Clone)]
pub struct BandedLu {
    m: usize,
    kl: usize,
    ku: usize,
    ab: Vec<f64>,
    ipiv: Vec<usize>,
}

impl BandedLu {
    pub fn size(&self) -> usize {
        self.m
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        debug_assert_eq!(b.len(), self.m);
        let (m, kl, ku) = (self.m, self.kl, self.ku);
        let ldab = 2 * kl + ku + 1;
        let d = kl + ku;
        // forward: P L y = b
        for j in 0..m {
            let p = self.ipiv[j];
            if p != j {
                b.swap(j, p);
            }
            let bj = b[j];
            if bj != 0.0 {
                let km = kl.min(m - 1 - j);
                let col = &self.ab[j * ldab + d + 1..j * ldab + d + km + 1];
                for (t, &l) in col.iter().enumerate() {
                    b[j + 1 + t] -= l * bj;
                }
            }
        }
        // backward: U x = y, column-oriented
        for j in (0..m).rev() {
            let xj = b[j] / self.ab[j * ldab + d];
            b[j] = xj;
            if xj != 0.0 {
                let i0 = j.saturating_sub(kl + ku);
                let col = &self.ab[j * ldab + d + i0 - j..j * ldab + d];
                for (idx, &u) in col.iter().enumerate() {
                    b[i0 + idx] -= u * xj;
                }
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Solves `A x = b` for two right-hand sides in one sweep. The triangular
    /// solves are bound by streaming the factor through memory, so sharing one
    /// pass between both vectors nearly halves their cost; the arithmetic per
    /// vector is identical to [`BandedLu::solve_in_place`].
    pub fn solve_pair_in_place(&self, b0: &mut [f64], b1: &mut [f64]) {
        debug_assert_eq!(b0.len(), self.m);
        debug_assert_eq!(b1.len(), self.m);
        let (m, kl, ku) = (self.m, self.kl, self.ku);
        let ldab = 2 * kl + ku + 1;
        let d = kl + ku;
        // forward: P L y = b
        for j in 0..m {
            let p = self.ipiv[j];
            if p != j {
                b0.swap(j, p);
                b1.swap(j, p);
            }
            let (y0, y1) = (b0[j], b1[j]);
            if y0 != 0.0 || y1 != 0.0 {
                let km = kl.min(m - 1 - j);
                let col = &self.ab[j * ldab + d + 1..j * ldab + d + km + 1];
                for (t, &l) in col.iter().enumerate() {
                    b0[j + 1 + t] -= l * y0;
                    b1[j + 1 + t] -= l * y1;
                }
            }
        }
        // backward: U x = y, column-oriented
        for j in (0..m).rev() {
            let diag = self.ab[j * ldab + d];
            let x0 = b0[j] / diag;
            let x1 = b1[j] / diag;
            b0[j] = x0;
            b1[j] = x1;
            if x0 != 0.0 || x1 != 0.0 {
                let i0 = j.saturating_sub(kl + ku);
                let col = &self.ab[j * ldab + d + i0 - j..j * ldab + d];
                for (idx, &u) in col.iter().enumerate() {
                    b0[i0 + idx] -= u * x0;
                    b1[i0 + idx] -= u * x1;
                }
            }
        }
    }
}
