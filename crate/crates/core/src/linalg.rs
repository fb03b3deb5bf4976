//! Small dense real-matrix kernel.
//!
//! Instances handled by this crate have at most a few hundred columns, so a
//! plain row-major `Vec<f64>` is all the storage we need. Everything here is a
//! pure function of its inputs.

use crate::error::{Error, Result};

/// Default rank tolerance, relative to the largest absolute entry.
pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-10;

/// Dense real matrix with row-major storage and finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "matrix entries",
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    context: "matrix row length",
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        DenseMatrix::new(rows.len(), cols, data)
    }

    /// Builds a matrix from its columns.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        let cols = columns.len();
        let mut data = vec![0.0; rows * cols];
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::DimensionMismatch {
                    context: "matrix column length",
                    expected: rows,
                    found: col.len(),
                });
            }
            for (i, &v) in col.iter().enumerate() {
                data[i * cols + j] = v;
            }
        }
        DenseMatrix::new(rows, cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        let mut m = DenseMatrix::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        DenseMatrix::new(n, n, m.data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// `⟨X_j, v⟩` without materializing the column.
    pub fn column_dot(&self, j: usize, v: &[f64]) -> f64 {
        debug_assert_eq!(v.len(), self.rows);
        v.iter()
            .enumerate()
            .map(|(i, &vi)| self.data[i * self.cols + j] * vi)
            .sum()
    }

    pub fn column_norm(&self, j: usize) -> f64 {
        (0..self.rows)
            .map(|i| self.get(i, j).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn column_norms(&self) -> Vec<f64> {
        (0..self.cols).map(|j| self.column_norm(j)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `X v`.
    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "matrix-vector product",
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `Xᵀ r`.
    pub fn tr_mul_vec(&self, r: &[f64]) -> Result<Vec<f64>> {
        if r.len() != self.rows {
            return Err(Error::DimensionMismatch {
                context: "transposed matrix-vector product",
                expected: self.rows,
                found: r.len(),
            });
        }
        let mut out = vec![0.0; self.cols];
        for (i, &ri) in r.iter().enumerate() {
            if ri == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * ri;
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Submatrix of the given columns, in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.rows, columns.len());
        for i in 0..self.rows {
            for (jj, &j) in columns.iter().enumerate() {
                m.set(i, jj, self.get(i, j));
            }
        }
        m
    }

    /// `XᵀX`.
    pub fn gram(&self) -> DenseMatrix {
        let p = self.cols;
        let mut g = DenseMatrix::zeros(p, p);
        for i in 0..self.rows {
            let row = self.row(i);
            for a in 0..p {
                if row[a] == 0.0 {
                    continue;
                }
                for b in a..p {
                    g.data[a * p + b] += row[a] * row[b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                g.data[a * p + b] = g.data[b * p + a];
            }
        }
        g
    }

    pub fn with_appended_column(&self, column: &[f64]) -> Result<DenseMatrix> {
        if column.len() != self.rows {
            return Err(Error::DimensionMismatch {
                context: "appended column",
                expected: self.rows,
                found: column.len(),
            });
        }
        let cols = self.cols + 1;
        let mut data = Vec::with_capacity(self.rows * cols);
        for (i, &v) in column.iter().enumerate() {
            data.extend_from_slice(self.row(i));
            data.push(v);
        }
        DenseMatrix::new(self.rows, cols, data)
    }
}

/// Which ℓ_q norm to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    /// Finite order `q ≥ 1`.
    Lq(u32),
    Infinity,
}

/// `(Σ|vᵢ|^q)^{1/q}`, or `max|vᵢ|` for [`Norm::Infinity`].
pub fn lq_norm(v: &[f64], norm: Norm) -> f64 {
    match norm {
        Norm::Infinity => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        Norm::Lq(1) => l1_norm(v),
        Norm::Lq(2) => l2_norm(v),
        Norm::Lq(q) => {
            assert!(q >= 1, "lq_norm needs q >= 1");
            let q = q as i32;
            v.iter()
                .map(|x| x.abs().powi(q))
                .sum::<f64>()
                .powf(1.0 / q as f64)
        }
    }
}

pub fn l1_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn inner(v: &[f64], w: &[f64]) -> Result<f64> {
    if v.len() != w.len() {
        return Err(Error::DimensionMismatch {
            context: "inner product",
            expected: v.len(),
            found: w.len(),
        });
    }
    Ok(v.iter().zip(w).map(|(a, b)| a * b).sum())
}

/// Reduced row echelon form with partial pivoting.
struct Echelon {
    reduced: DenseMatrix,
    pivots: Vec<usize>,
}

fn reduced_row_echelon(a: &DenseMatrix, rank_tolerance: f64) -> Echelon {
    let mut m = a.clone();
    let threshold = rank_tolerance * a.max_abs();
    let (rows, cols) = (m.rows, m.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (best, best_abs) = (r..rows)
            .map(|i| (i, m.get(i, c).abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_abs <= threshold {
            for i in r..rows {
                m.set(i, c, 0.0);
            }
            continue;
        }
        if best != r {
            for j in 0..cols {
                m.data.swap(best * cols + j, r * cols + j);
            }
        }
        let pivot = m.get(r, c);
        for j in c..cols {
            let v = m.get(r, j) / pivot;
            m.set(r, j, v);
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = m.get(i, c);
            if factor == 0.0 {
                continue;
            }
            for j in c..cols {
                let v = m.get(i, j) - factor * m.get(r, j);
                m.set(i, j, v);
            }
            m.set(i, c, 0.0);
        }
        pivots.push(c);
        r += 1;
    }
    Echelon { reduced: m, pivots }
}

/// Numerical rank by row reduction at `rank_tolerance · max|A|`.
pub fn rank(a: &DenseMatrix, rank_tolerance: f64) -> usize {
    reduced_row_echelon(a, rank_tolerance).pivots.len()
}

/// A basis of `{v : Xv = 0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct NullspaceBasis {
    pub dim: usize,
    pub basis: Vec<Vec<f64>>,
    pub rank_tolerance: f64,
}

impl NullspaceBasis {
    /// True when every basis vector satisfies `‖Xv‖₂ ≤ tol·‖v‖₂·max|X|`.
    pub fn annihilated_by(&self, x: &DenseMatrix) -> bool {
        let scale = x.max_abs();
        self.basis.iter().all(|v| {
            let xv = x.mul_vec(v).expect("basis vector length matches X");
            l2_norm(&xv) <= self.rank_tolerance * l2_norm(v) * scale
        })
    }
}

/// Nullspace basis via reduced row echelon form.
///
/// One basis vector per free column. Each vector is scaled so that its last
/// nonzero coordinate equals 1.
pub fn nullspace(x: &DenseMatrix, rank_tolerance: f64) -> NullspaceBasis {
    let Echelon { reduced, pivots } = reduced_row_echelon(x, rank_tolerance);
    let p = x.cols;
    let mut is_pivot = vec![false; p];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for free in (0..p).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0.0; p];
        v[free] = 1.0;
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -reduced.get(row, free);
        }
        let scale = lq_norm(&v, Norm::Infinity);
        if let Some(&last) = v.iter().rev().find(|c| c.abs() > rank_tolerance * scale) {
            v.iter_mut().for_each(|c| *c /= last);
        }
        basis.push(v);
    }
    NullspaceBasis {
        dim: basis.len(),
        basis,
        rank_tolerance,
    }
}

/// Least-squares fit restricted to a column subset.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportFit {
    /// Coefficients in the order of the requested support.
    pub coefficients: Vec<f64>,
    pub residual_norm: f64,
    /// Set when `X_T` lost rank; the coefficients are then the minimum-norm solution.
    pub rank_deficient: bool,
}

/// Minimizes `‖Y − X_T b_T‖₂` over the columns in `support`.
pub fn least_squares_on_support(
    x: &DenseMatrix,
    y: &[f64],
    support: &[usize],
) -> Result<SupportFit> {
    if y.len() != x.rows {
        return Err(Error::DimensionMismatch {
            context: "least squares response",
            expected: x.rows,
            found: y.len(),
        });
    }
    if let Some(&bad) = support.iter().find(|&&j| j >= x.cols) {
        return Err(Error::InvalidParameter(format!(
            "support index {} out of range for {} columns",
            bad + 1,
            x.cols
        )));
    }
    if support.is_empty() {
        return Ok(SupportFit {
            coefficients: Vec::new(),
            residual_norm: l2_norm(y),
            rank_deficient: false,
        });
    }
    let xt = x.select_columns(support);
    let gram = xt.gram();
    let rhs = xt.tr_mul_vec(y)?;
    let full_rank = rank(&xt, DEFAULT_RANK_TOLERANCE) == support.len();

    let coefficients = if full_rank {
        let mut b = solve_spd(&gram, &rhs)?;
        // one step of iterative refinement
        let r = residual(&xt, y, &b)?;
        let correction = solve_spd(&gram, &xt.tr_mul_vec(&r)?)?;
        b.iter_mut().zip(&correction).for_each(|(bi, ci)| *bi += ci);
        b
    } else {
        minimum_norm_solve(&gram, &rhs)?
    };
    let r = residual(&xt, y, &coefficients)?;
    Ok(SupportFit {
        residual_norm: l2_norm(&r),
        coefficients,
        rank_deficient: !full_rank,
    })
}

fn residual(x: &DenseMatrix, y: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let xb = x.mul_vec(b)?;
    Ok(y.iter().zip(&xb).map(|(a, c)| a - c).collect())
}

/// Gaussian elimination with partial pivoting on a nonsingular square system.
fn solve_spd(a: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = a.rows;
    let mut m = a.data.clone();
    let mut b = rhs.to_vec();
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&i, &j| m[i * n + c].abs().total_cmp(&m[j * n + c].abs()))
            .unwrap_or(c);
        if m[piv * n + c] == 0.0 {
            return Err(Error::InvariantViolation(
                "singular normal equations on a full-rank support".into(),
            ));
        }
        if piv != c {
            for j in 0..n {
                m.swap(piv * n + j, c * n + j);
            }
            b.swap(piv, c);
        }
        for i in c + 1..n {
            let f = m[i * n + c] / m[c * n + c];
            if f == 0.0 {
                continue;
            }
            for j in c..n {
                m[i * n + j] -= f * m[c * n + j];
            }
            b[i] -= f * b[c];
        }
    }
    let mut out = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i * n + j] * out[j]).sum();
        out[i] = (b[i] - s) / m[i * n + i];
    }
    Ok(out)
}

/// Pseudo-inverse solve of a symmetric positive semidefinite system.
fn minimum_norm_solve(gram: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let (values, vectors) = symmetric_eigen(gram)?;
    let top = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let cutoff = DEFAULT_RANK_TOLERANCE * top;
    let n = gram.rows;
    let mut out = vec![0.0; n];
    for (k, &lambda) in values.iter().enumerate() {
        if lambda <= cutoff {
            continue;
        }
        let proj: f64 = (0..n).map(|i| vectors.get(i, k) * rhs[i]).sum::<f64>() / lambda;
        for (i, o) in out.iter_mut().enumerate() {
            *o += proj * vectors.get(i, k);
        }
    }
    Ok(out)
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    symmetric_eigen(a).map(|(values, _)| values)
}

/// Cyclic Jacobi eigen-decomposition. Eigenvalues ascending, eigenvectors as
/// the matching columns of the returned matrix.
pub(crate) fn symmetric_eigen(a: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    if a.rows != a.cols {
        return Err(Error::DimensionMismatch {
            context: "symmetric eigenproblem (square matrix)",
            expected: a.rows,
            found: a.cols,
        });
    }
    let n = a.rows;
    let sym_tol = 1e-12 * a.max_abs();
    let mut deviation: f64 = 0.0;
    for i in 0..n {
        for j in 0..i {
            deviation = deviation.max((a.get(i, j) - a.get(j, i)).abs());
        }
    }
    if deviation > sym_tol {
        return Err(Error::Asymmetric {
            deviation,
            tolerance: sym_tol,
        });
    }

    let mut m = a.clone();
    let mut v = DenseMatrix::identity(n);
    let target = 1e-12 * a.frobenius_norm();
    let off_norm = |m: &DenseMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m.get(i, j).powi(2);
                }
            }
        }
        s.sqrt()
    };

    for _sweep in 0..100 {
        if off_norm(&m) <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (m.get(q, q) - m.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                let app = m.get(p, p) - t * apq;
                let aqq = m.get(q, q) + t * apq;
                m.set(p, p, app);
                m.set(q, q, aqq);
                m.set(p, q, 0.0);
                m.set(q, p, 0.0);
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = m.get(r, p);
                    let arq = m.get(r, q);
                    let new_rp = arp - s * (arq + tau * arp);
                    let new_rq = arq + s * (arp - tau * arq);
                    m.set(r, p, new_rp);
                    m.set(p, r, new_rp);
                    m.set(r, q, new_rq);
                    m.set(q, r, new_rq);
                }
                for r in 0..n {
                    let vrp = v.get(r, p);
                    let vrq = v.get(r, q);
                    v.set(r, p, vrp - s * (vrq + tau * vrp));
                    v.set(r, q, vrq + s * (vrp - tau * vrq));
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(i, i).total_cmp(&m.get(j, j)));
    let values = order.iter().map(|&i| m.get(i, i)).collect();
    let vectors = v.select_columns(&order);
    Ok((values, vectors))
}
