//! Dense least-squares kernels over column-major data.

/// Relative size below which a column is treated as lying in the span of the
/// columns before it.
pub const RANK_TOLERANCE: f64 = 1e-9;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `X b` for columns `X`.
pub fn mat_vec(columns: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = columns.first().map_or(0, Vec::len);
    let mut out = vec![0.0; n];
    for (col, &coef) in columns.iter().zip(b) {
        for (o, x) in out.iter_mut().zip(col) {
            *o += x * coef;
        }
    }
    out
}

/// `X^T v` for columns `X`.
pub fn mat_t_vec(columns: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    columns.iter().map(|c| dot(c, v)).collect()
}

/// Householder QR factorization of an `n x p` matrix with `n >= p`.
#[derive(Debug, Clone)]
pub struct Qr {
    /// Column `k` holds the Householder vector in rows `k..`, and `R[i][k]` for `i < k`.
    work: Vec<Vec<f64>>,
    rdiag: Vec<f64>,
    beta: Vec<f64>,
    col_norms: Vec<f64>,
}

impl Qr {
    pub fn new(columns: &[Vec<f64>]) -> Self {
        let p = columns.len();
        let n = columns.first().map_or(0, Vec::len);
        assert!(n >= p, "QR needs at least as many rows as columns");
        let col_norms = columns.iter().map(|c| norm(c)).collect();
        let mut work: Vec<Vec<f64>> = columns.to_vec();
        let mut rdiag = vec![0.0; p];
        let mut beta = vec![0.0; p];
        for k in 0..p {
            let (left, right) = work.split_at_mut(k + 1);
            let u = &mut left[k][k..];
            let nrm = norm(u);
            if nrm == 0.0 {
                continue;
            }
            let a0 = u[0];
            let alpha = if a0 > 0.0 { -nrm } else { nrm };
            u[0] -= alpha;
            let b = 1.0 / (nrm * (nrm + a0.abs()));
            rdiag[k] = alpha;
            beta[k] = b;
            for col in right.iter_mut() {
                let tail = &mut col[k..];
                let s = b * dot(u, tail);
                for (t, ui) in tail.iter_mut().zip(u.iter()) {
                    *t -= s * ui;
                }
            }
        }
        Self {
            work,
            rdiag,
            beta,
            col_norms,
        }
    }

    pub fn ncols(&self) -> usize {
        self.rdiag.len()
    }

    /// Index of the first column whose component orthogonal to the preceding
    /// columns is negligible.
    pub fn first_dependent_column(&self) -> Option<usize> {
        (0..self.ncols()).find(|&k| self.rdiag[k].abs() <= RANK_TOLERANCE * self.col_norms[k].max(f64::MIN_POSITIVE))
    }

    /// Applies `Q^T` in place.
    pub fn apply_qt(&self, b: &mut [f64]) {
        for k in 0..self.ncols() {
            if self.beta[k] == 0.0 {
                continue;
            }
            let u = &self.work[k][k..];
            let tail = &mut b[k..];
            let s = self.beta[k] * dot(u, tail);
            for (t, ui) in tail.iter_mut().zip(u) {
                *t -= s * ui;
            }
        }
    }

    fn r(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.rdiag[i]
        } else {
            self.work[j][i]
        }
    }

    /// Least-squares solution of `X b = y`.
    pub fn solve(&self, y: &[f64]) -> Vec<f64> {
        let mut qty = y.to_vec();
        self.apply_qt(&mut qty);
        let p = self.ncols();
        let mut x = vec![0.0; p];
        for i in (0..p).rev() {
            let mut s = qty[i];
            for j in i + 1..p {
                s -= self.r(i, j) * x[j];
            }
            x[i] = s / self.rdiag[i];
        }
        x
    }

    /// `(X^T X)^{-1} = R^{-1} R^{-T}`, row-major.
    pub fn xtx_inverse(&self) -> Vec<Vec<f64>> {
        let p = self.ncols();
        // Upper-triangular inverse by back substitution, column by column.
        let mut rinv = vec![vec![0.0; p]; p];
        for j in 0..p {
            rinv[j][j] = 1.0 / self.rdiag[j];
            for i in (0..j).rev() {
                let s: f64 = (i + 1..=j).map(|k| self.r(i, k) * rinv[k][j]).sum();
                rinv[i][j] = -s / self.rdiag[i];
            }
        }
        let mut out = vec![vec![0.0; p]; p];
        for i in 0..p {
            for j in i..p {
                let s: f64 = (j..p).map(|k| rinv[i][k] * rinv[j][k]).sum();
                out[i][j] = s;
                out[j][i] = s;
            }
        }
        out
    }
}

/// Marks each column as independent of the columns kept before it, using
/// modified Gram-Schmidt with one reorthogonalization pass.
pub fn independent_columns(columns: &[Vec<f64>]) -> Vec<bool> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    columns
        .iter()
        .map(|col| {
            let original = norm(col);
            if original == 0.0 {
                return false;
            }
            let mut r = col.clone();
            for _ in 0..2 {
                for q in &basis {
                    let s = dot(q, &r);
                    for (ri, qi) in r.iter_mut().zip(q) {
                        *ri -= s * qi;
                    }
                }
            }
            let residual = norm(&r);
            if residual <= RANK_TOLERANCE * original {
                false
            } else {
                r.iter_mut().for_each(|x| *x /= residual);
                basis.push(r);
                true
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_square_system() {
        // [[2, 1], [1, 3]] x = [3, 5] -> x = [0.8, 1.4]
        let cols = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = Qr::new(&cols).solve(&[3.0, 5.0]);
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
    }

    #[test]
    fn inverse_gram() {
        let cols = vec![vec![1.0, 1.0, 1.0], vec![0.0, 1.0, 2.0]];
        // X^T X = [[3, 3], [3, 5]], inverse = [[5, -3], [-3, 3]] / 6
        let inv = Qr::new(&cols).xtx_inverse();
        let expect = [[5.0 / 6.0, -0.5], [-0.5, 0.5]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((inv[i][j] - expect[i][j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn detects_dependence() {
        let cols = vec![vec![1.0, 1.0, 1.0, 1.0], vec![1.0, 2.0, 3.0, 4.0], vec![2.0, 3.0, 4.0, 5.0]];
        assert_eq!(Qr::new(&cols).first_dependent_column(), Some(2));
        assert_eq!(independent_columns(&cols), vec![true, true, false]);
        assert_eq!(Qr::new(&cols[..2]).first_dependent_column(), None);
        assert_eq!(independent_columns(&[vec![0.0; 3]]), vec![false]);
    }
}
