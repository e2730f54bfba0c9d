use nalgebra::DMatrix;
use serde::Serialize;

use super::table::{enumerate_ising, ExactTable};
use crate::models::IsingModel;
use crate::{Error, Result};

/// Largest `n` accepted for Glauber kernels.
pub const MAX_KERNEL_SITES: usize = 16;
/// Row-sum and balance tolerance.
pub const KERNEL_TOL: f64 = 1e-12;

/// Sparse row: `(column index, probability)` pairs sorted by column.
pub type Row = Vec<(u32, f64)>;

/// Row-stochastic matrix over the support of `stationary`.
///
/// Rows are stored once and shared through `row_of`, so chains whose rows
/// depend only on a summary of the state stay compact.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMatrix {
    rows: Vec<Row>,
    row_of: Vec<u32>,
    stationary: ExactTable,
}

/// Worst-case residuals of the basic kernel identities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KernelResiduals {
    pub row_sum: f64,
    pub detailed_balance: f64,
    pub stationarity: f64,
}

impl KernelMatrix {
    /// Assembles a kernel without checking it; see [`KernelMatrix::residuals`].
    pub fn from_rows(rows: Vec<Row>, row_of: Vec<u32>, stationary: ExactTable) -> Result<Self> {
        let size = stationary.len();
        if row_of.len() != size || row_of.iter().any(|&r| r as usize >= rows.len()) {
            return Err(Error::Mismatch("row map does not cover the support".into()));
        }
        if rows.iter().flatten().any(|&(c, _)| c as usize >= size) {
            return Err(Error::Mismatch("row entry outside the support".into()));
        }
        Ok(KernelMatrix {
            rows,
            row_of,
            stationary,
        })
    }

    pub fn size(&self) -> usize {
        self.row_of.len()
    }

    /// Number of distinct stored rows.
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn stationary(&self) -> &ExactTable {
        &self.stationary
    }

    #[inline]
    pub fn row(&self, x: usize) -> &[(u32, f64)] {
        &self.rows[self.row_of[x] as usize]
    }

    /// `P(x, y)`.
    pub fn entry(&self, x: usize, y: usize) -> f64 {
        let row = self.row(x);
        if row.len() == self.size() {
            row[y].1
        } else {
            row.binary_search_by_key(&(y as u32), |&(c, _)| c)
                .map_or(0.0, |k| row[k].1)
        }
    }

    /// `νP` for a row vector `ν`.
    pub fn apply_left(&self, nu: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.size()];
        for (x, &p) in nu.iter().enumerate() {
            if p != 0.0 {
                for &(y, q) in self.row(x) {
                    out[y as usize] += p * q;
                }
            }
        }
        out
    }

    /// `Pf` for a column vector `f`.
    pub fn apply_right(&self, f: &[f64]) -> Vec<f64> {
        (0..self.size())
            .map(|x| self.row(x).iter().map(|&(y, q)| q * f[y as usize]).sum())
            .collect()
    }

    /// Scales every entry of row `x` (including shared copies) by `factor`.
    /// Used to build negative controls.
    pub fn scale_row(&mut self, x: usize, factor: f64) {
        let r = self.row_of[x] as usize;
        let mut row = self.rows[r].clone();
        for e in &mut row {
            e.1 *= factor;
        }
        self.rows.push(row);
        self.row_of[x] = (self.rows.len() - 1) as u32;
    }

    pub fn residuals(&self) -> KernelResiduals {
        let pi = self.stationary.probs();
        let row_sum = (0..self.size())
            .map(|x| (self.row(x).iter().map(|e| e.1).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max);
        let mut balance = 0.0f64;
        for x in 0..self.size() {
            for &(y, q) in self.row(x) {
                let back = self.entry(y as usize, x);
                balance = balance.max((pi[x] * q - pi[y as usize] * back).abs());
            }
        }
        let moved = self.apply_left(pi);
        let stationarity = moved.iter().zip(pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        KernelResiduals {
            row_sum,
            detailed_balance: balance,
            stationarity,
        }
    }

    /// Dense copy of the matrix.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.size();
        let mut m = DMatrix::zeros(n, n);
        for x in 0..n {
            for &(y, q) in self.row(x) {
                m[(x, y as usize)] += q;
            }
        }
        m
    }
}

/// Heat-bath Glauber kernel of `pi` on its support.
///
/// A coordinate is chosen uniformly among `n_select ≥ n` slots; slots beyond
/// `n` (or flips leaving the support) hold the state. With `n_select = n`
/// this is the usual single-site chain.
pub fn glauber_kernel_with_selection(pi: &ExactTable, n_select: usize) -> Result<KernelMatrix> {
    let n = pi.n();
    if n > MAX_KERNEL_SITES {
        return Err(Error::TooLarge {
            what: "n",
            value: n,
            limit: MAX_KERNEL_SITES,
        });
    }
    if n_select < n.max(1) {
        return Err(Error::InvalidParameter(format!(
            "selection count {n_select} below dimension {n}"
        )));
    }
    let probs = pi.probs();
    let rate = 1.0 / n_select as f64;
    let mut rows = Vec::with_capacity(pi.len());
    for (x, &s) in pi.states().iter().enumerate() {
        let mut row: Row = Vec::with_capacity(n + 1);
        let mut stay = 1.0;
        for i in 0..n {
            if let Some(y) = pi.index_of(s ^ (1 << i)) {
                let denom = probs[x] + probs[y];
                let q = if denom > 0.0 { rate * probs[y] / denom } else { 0.0 };
                if q > 0.0 {
                    row.push((y as u32, q));
                    stay -= q;
                }
            }
        }
        row.push((x as u32, stay));
        row.sort_by_key(|e| e.0);
        rows.push(row);
    }
    let row_of = (0..pi.len() as u32).collect();
    KernelMatrix::from_rows(rows, row_of, pi.clone())
}

/// Heat-bath Glauber kernel of `pi`.
pub fn glauber_kernel(pi: &ExactTable) -> Result<KernelMatrix> {
    glauber_kernel_with_selection(pi, pi.n().max(1))
}

/// Glauber kernel of `μ_{J,h}`.
pub fn ising_glauber_kernel(model: &IsingModel) -> Result<KernelMatrix> {
    if model.n() > MAX_KERNEL_SITES {
        return Err(Error::TooLarge {
            what: "n",
            value: model.n(),
            limit: MAX_KERNEL_SITES,
        });
    }
    glauber_kernel(&enumerate_ising(model)?)
}

/// Kernel that resamples `x` from `pi` conditioned on the coordinates in
/// `fixed_mask` (block heat-bath). `fixed_mask = 0` gives the one-step
/// chain `1πᵀ`.
pub fn block_resampling_kernel(pi: &ExactTable, fixed_mask: u32) -> Result<KernelMatrix> {
    let mut classes: Vec<u32> = pi.states().iter().map(|s| s & fixed_mask).collect();
    classes.sort_unstable();
    classes.dedup();
    let probs = pi.probs();
    let mut rows: Vec<Row> = vec![Vec::new(); classes.len()];
    let mut mass = vec![0.0; classes.len()];
    let mut row_of = Vec::with_capacity(pi.len());
    for (y, &s) in pi.states().iter().enumerate() {
        let c = classes.binary_search(&(s & fixed_mask)).unwrap();
        rows[c].push((y as u32, probs[y]));
        mass[c] += probs[y];
        row_of.push(c as u32);
    }
    for (row, m) in rows.iter_mut().zip(&mass) {
        if *m <= 0.0 {
            return Err(Error::ZeroMassPinning("pi"));
        }
        for e in row.iter_mut() {
            e.1 /= m;
        }
    }
    KernelMatrix::from_rows(rows, row_of, pi.clone())
}
