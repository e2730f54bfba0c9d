//! Structured symmetric interaction operators.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Symmetry tolerance accepted for user-supplied dense blocks.
const SYMMETRY_TOL: f64 = 1e-12;

/// Symmetric sparse matrix with the diagonal kept apart from the
/// off-diagonal entries (stored in compressed rows, both triangles).
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSym {
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    diag: Vec<f64>,
}

impl SparseSym {
    pub fn zeros(n: usize) -> Self {
        SparseSym {
            row_ptr: vec![0; n + 1],
            cols: Vec::new(),
            vals: Vec::new(),
            diag: vec![0.0; n],
        }
    }

    /// Builds from `(i, j, w)` triplets; each triplet sets both `(i, j)` and
    /// `(j, i)`. Repeated pairs are summed.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut diag = vec![0.0; n];
        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
        for &(i, j, w) in triplets {
            if i >= n || j >= n {
                return Err(Error::InvalidParameter(format!(
                    "entry ({i}, {j}) out of range for dimension {n}"
                )));
            }
            if !w.is_finite() {
                return Err(Error::InvalidParameter(format!("non-finite entry at ({i}, {j})")));
            }
            if i == j {
                diag[i] += w;
            } else {
                rows[i].push((j as u32, w));
                rows[j].push((i as u32, w));
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            for (c, w) in row {
                match cols.last() {
                    Some(&last) if last == c && cols.len() > *row_ptr.last().unwrap() => {
                        *vals.last_mut().unwrap() += w;
                    }
                    _ => {
                        cols.push(c);
                        vals.push(w);
                    }
                }
            }
            row_ptr.push(cols.len());
        }
        Ok(SparseSym {
            row_ptr,
            cols,
            vals,
            diag,
        })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Off-diagonal entries of row `i` as (columns, values).
    #[inline]
    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.cols[a..b], &self.vals[a..b])
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn nnz_offdiag(&self) -> usize {
        self.cols.len()
    }

    /// Upper-triangle triplets including the diagonal.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.n() {
            if self.diag[i] != 0.0 {
                out.push((i, i, self.diag[i]));
            }
            let (cols, vals) = self.row(i);
            for (&j, &w) in cols.iter().zip(vals) {
                if j as usize > i {
                    out.push((i, j as usize, w));
                }
            }
        }
        out
    }

    fn scaled(&self, s: f64) -> Self {
        SparseSym {
            row_ptr: self.row_ptr.clone(),
            cols: self.cols.clone(),
            vals: self.vals.iter().map(|w| w * s).collect(),
            diag: self.diag.iter().map(|w| w * s).collect(),
        }
    }
}

/// Scaled outer product `coef · u uᵀ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankOne {
    pub coef: f64,
    pub u: Vec<f64>,
}

/// Symmetric operator `J = S + Σ_k c_k u_k u_kᵀ + D` with `S` sparse and
/// `D` an optional dense block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorRepr", into = "OperatorRepr")]
pub struct InteractionOperator {
    n: usize,
    sparse: SparseSym,
    rank_one: Vec<RankOne>,
    dense: Option<DMatrix<f64>>,
}

#[derive(Serialize, Deserialize)]
struct OperatorRepr {
    n: usize,
    sparse: Vec<(usize, usize, f64)>,
    rank_one: Vec<RankOne>,
    dense: Option<Vec<Vec<f64>>>,
}

impl TryFrom<OperatorRepr> for InteractionOperator {
    type Error = Error;

    fn try_from(r: OperatorRepr) -> Result<Self> {
        let mut op = InteractionOperator::zeros(r.n).with_sparse(&r.sparse)?;
        for term in r.rank_one {
            op = op.with_rank_one(term.coef, term.u)?;
        }
        if let Some(rows) = r.dense {
            if rows.len() != r.n || rows.iter().any(|row| row.len() != r.n) {
                return Err(Error::Mismatch(format!("dense block must be {0}x{0}", r.n)));
            }
            let m = DMatrix::from_fn(r.n, r.n, |i, j| rows[i][j]);
            op = op.with_dense(m)?;
        }
        Ok(op)
    }
}

impl From<InteractionOperator> for OperatorRepr {
    fn from(op: InteractionOperator) -> Self {
        OperatorRepr {
            n: op.n,
            sparse: op.sparse.triplets(),
            dense: op
                .dense
                .as_ref()
                .map(|m| (0..op.n).map(|i| (0..op.n).map(|j| m[(i, j)]).collect()).collect()),
            rank_one: op.rank_one,
        }
    }
}

impl InteractionOperator {
    /// The zero operator on `n` coordinates.
    pub fn zeros(n: usize) -> Self {
        InteractionOperator {
            n,
            sparse: SparseSym::zeros(n),
            rank_one: Vec::new(),
            dense: None,
        }
    }

    /// Replaces the sparse part; see [`SparseSym::from_triplets`].
    pub fn with_sparse(mut self, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        self.sparse = SparseSym::from_triplets(self.n, triplets)?;
        Ok(self)
    }

    pub fn with_rank_one(mut self, coef: f64, u: Vec<f64>) -> Result<Self> {
        if u.len() != self.n {
            return Err(Error::Mismatch(format!(
                "rank-one vector has length {}, expected {}",
                u.len(),
                self.n
            )));
        }
        if !coef.is_finite() || u.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite rank-one term".into()));
        }
        self.rank_one.push(RankOne { coef, u });
        Ok(self)
    }

    /// Sets the dense block, which must be square of size `n` and symmetric.
    pub fn with_dense(mut self, m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != self.n || m.ncols() != self.n {
            return Err(Error::Mismatch(format!(
                "dense block is {}x{}, expected {2}x{2}",
                m.nrows(),
                m.ncols(),
                self.n
            )));
        }
        for i in 0..self.n {
            for j in 0..i {
                let (a, b) = (m[(i, j)], m[(j, i)]);
                if !a.is_finite() || (a - b).abs() > SYMMETRY_TOL * (1.0 + a.abs()) {
                    return Err(Error::InvalidParameter(format!(
                        "dense block not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        self.dense = Some(m);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sparse(&self) -> &SparseSym {
        &self.sparse
    }

    pub fn rank_one_terms(&self) -> &[RankOne] {
        &self.rank_one
    }

    pub fn dense(&self) -> Option<&DMatrix<f64>> {
        self.dense.as_ref()
    }

    /// `J x`, summing the contributions of every part (diagonal included).
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "dimension mismatch");
        let mut y: Vec<f64> = (0..self.n)
            .map(|i| {
                let (cols, vals) = self.sparse.row(i);
                let off: f64 = cols.iter().zip(vals).map(|(&j, &w)| w * x[j as usize]).sum();
                off + self.sparse.diag[i] * x[i]
            })
            .collect();
        for term in &self.rank_one {
            let s = term.coef * dot(&term.u, x);
            for (yi, ui) in y.iter_mut().zip(&term.u) {
                *yi += s * ui;
            }
        }
        if let Some(d) = &self.dense {
            for (j, &xj) in x.iter().enumerate() {
                if xj != 0.0 {
                    for (yi, dij) in y.iter_mut().zip(d.column(j).iter()) {
                        *yi += dij * xj;
                    }
                }
            }
        }
        y
    }

    /// `xᵀ J x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.apply(x))
    }

    /// `Σ_{j≠i} J_ij x_j`, computed from scratch.
    pub fn offdiag_field(&self, i: usize, x: &[f64]) -> f64 {
        let (cols, vals) = self.sparse.row(i);
        let mut m: f64 = cols.iter().zip(vals).map(|(&j, &w)| w * x[j as usize]).sum();
        for term in &self.rank_one {
            m += term.coef * term.u[i] * (dot(&term.u, x) - term.u[i] * x[i]);
        }
        if let Some(d) = &self.dense {
            m += dot(dense_column(d, i), x) - d[(i, i)] * x[i];
        }
        m
    }

    /// Entry `J_ij`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let mut e = if i == j {
            self.sparse.diag[i]
        } else {
            let (cols, vals) = self.sparse.row(i);
            cols.binary_search(&(j as u32)).map_or(0.0, |k| vals[k])
        };
        for term in &self.rank_one {
            e += term.coef * term.u[i] * term.u[j];
        }
        if let Some(d) = &self.dense {
            e += d[(i, j)];
        }
        e
    }

    /// Materialises `J` as a dense matrix.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = self.dense.clone().unwrap_or_else(|| DMatrix::zeros(self.n, self.n));
        for i in 0..self.n {
            m[(i, i)] += self.sparse.diag[i];
            let (cols, vals) = self.sparse.row(i);
            for (&j, &w) in cols.iter().zip(vals) {
                m[(i, j as usize)] += w;
            }
        }
        for term in &self.rank_one {
            for j in 0..self.n {
                let s = term.coef * term.u[j];
                for i in 0..self.n {
                    m[(i, j)] += s * term.u[i];
                }
            }
        }
        m
    }

    /// `s · J`, preserving the structure.
    pub fn scaled(&self, s: f64) -> Self {
        InteractionOperator {
            n: self.n,
            sparse: self.sparse.scaled(s),
            rank_one: self
                .rank_one
                .iter()
                .map(|t| RankOne {
                    coef: t.coef * s,
                    u: t.u.clone(),
                })
                .collect(),
            dense: self.dense.as_ref().map(|d| d * s),
        }
    }
}

/// Column `i` of a dense matrix as a contiguous slice (row `i` by symmetry).
#[inline]
pub fn dense_column(d: &DMatrix<f64>, i: usize) -> &[f64] {
    let n = d.nrows();
    &d.as_slice()[i * n..(i + 1) * n]
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_operator() -> InteractionOperator {
        let dense = DMatrix::from_row_slice(3, 3, &[1.0, 0.5, -0.25, 0.5, 2.0, 0.0, -0.25, 0.0, 0.1]);
        InteractionOperator::zeros(3)
            .with_sparse(&[(0, 1, 1.5), (1, 2, -2.0), (2, 2, 0.3)])
            .unwrap()
            .with_rank_one(-0.7, vec![1.0, 1.0, 1.0])
            .unwrap()
            .with_dense(dense)
            .unwrap()
    }

    #[test]
    fn apply_matches_dense() {
        let op = sample_operator();
        let x = [1.0, -1.0, 0.5];
        let want = op.to_dense() * nalgebra::DVector::from_column_slice(&x);
        for (a, b) in op.apply(&x).iter().zip(want.iter()) {
            assert!((a - b).abs() < 1e-14);
        }
        for i in 0..3 {
            for j in 0..3 {
                assert!((op.entry(i, j) - op.to_dense()[(i, j)]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn offdiag_field_excludes_diagonal() {
        let op = sample_operator();
        let x = [1.0, -1.0, 1.0];
        let full = op.apply(&x);
        for i in 0..3 {
            let want = full[i] - op.entry(i, i) * x[i];
            assert!((op.offdiag_field(i, &x) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn duplicate_triplets_sum() {
        let s = SparseSym::from_triplets(3, &[(0, 1, 1.0), (1, 0, 2.0)]).unwrap();
        assert_eq!(s.row(0), (&[1u32][..], &[3.0][..]));
        assert_eq!(s.row(1), (&[0u32][..], &[3.0][..]));
        assert_eq!(s.nnz_offdiag(), 2);
    }

    #[test]
    fn rejects_asymmetric_dense_and_bad_lengths() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(InteractionOperator::zeros(2).with_dense(m).is_err());
        assert!(InteractionOperator::zeros(2).with_rank_one(1.0, vec![1.0]).is_err());
        assert!(InteractionOperator::zeros(2).with_sparse(&[(0, 2, 1.0)]).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let op = sample_operator();
        let js = serde_json::to_string(&op).unwrap();
        let back: InteractionOperator = serde_json::from_str(&js).unwrap();
        assert_eq!(back.to_dense(), op.to_dense());
        assert_eq!(back.rank_one_terms(), op.rank_one_terms());
    }

    #[test]
    fn scaling_is_linear() {
        let op = sample_operator();
        let x = [0.3, 1.0, -2.0];
        let a = op.scaled(-1.5).apply(&x);
        let b = op.apply(&x);
        for (p, q) in a.iter().zip(&b) {
            assert!((p + 1.5 * q).abs() < 1e-13);
        }
    }
}
