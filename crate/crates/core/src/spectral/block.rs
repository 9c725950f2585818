//! `Op(f)` on `Torus(M) × ℤ(N)` restricted to a set of input frequencies and
//! written in the orthonormal Fourier basis `e_r(x) = e^{2πirx}` of the output:
//! column `ξ` holds `f̂(r - ξ; ξ)` at row `r mod M`, where
//! `f̂(k; ξ) = M⁻¹ Σ_j f(j/M, ξ) e^{-2πijk/M}`.
//!
//! Singular values of this sparse block are those of the truncated operator.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::fourier;
use crate::lca::{AxisKind, GridFunction, GroupGrid};
use crate::linalg::{
    banded_largest_eigenvalue, banded_smallest_eigenvalue, hermitian_eigenvalues, lanczos_largest, BandedHermitian,
    CMatrix, LanczosOptions,
};
use crate::symbols::Symbol;

/// Relative size below which Fourier coefficients of a column are dropped.
const DROP: f64 = 1e-14;
/// Gram matrices with a wider band are formed densely.
const MAX_BAND: usize = 384;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Columns {
    /// All frequencies `-N ≤ ξ < N`.
    All,
    /// High frequencies `|ξ| > N/2`.
    High,
}

#[derive(Clone, Debug)]
pub struct FrequencyBlock {
    pub samples: usize,
    pub band: usize,
    /// Input frequency of each column.
    pub cols: Vec<i64>,
    /// Sparse columns: `(row, value)` with rows in `0..samples`.
    pub entries: Vec<Vec<(usize, Complex64)>>,
}

/// Fourier coefficients `k ↦ ĝ(k)`, `-M/2 ≤ k < M/2`, of samples on `Torus(M)`.
fn torus_coefficients(grid: &GroupGrid, values: Vec<Complex64>) -> Result<Vec<(i64, Complex64)>> {
    let hat = fourier(&GridFunction::new(grid.clone(), values)?)?;
    let half = (grid.len() / 2) as i64;
    let max = hat.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(hat
        .values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() > DROP * max)
        .map(|(i, v)| (i as i64 - half, *v))
        .collect())
}

impl FrequencyBlock {
    /// Builds the block of `f` rebound to `Torus(oversample·band) × ℤ(band)`.
    pub fn build(f: &Symbol, band: usize, oversample: usize, columns: Columns) -> Result<FrequencyBlock> {
        let (xgrid, xigrid) = GroupGrid::torus_pair(band, oversample)?;
        let m = xgrid.len();
        let n = band as i64;
        let cols: Vec<i64> = (-n..n)
            .filter(|&k| match columns {
                Columns::All => true,
                Columns::High => 2 * k.abs() > n,
            })
            .collect();
        let wrap = |r: i64| r.rem_euclid(m as i64) as usize;
        let entries: Vec<Vec<(usize, Complex64)>> = if let Some(terms) = f.terms() {
            let mut hats = Vec::with_capacity(terms.len());
            for t in terms {
                hats.push(torus_coefficients(&xgrid, t.gamma.sample_on(&xgrid).values)?);
            }
            cols.par_iter()
                .map(|&xi| {
                    let mut col: Vec<(usize, Complex64)> = Vec::new();
                    for (t, hat) in terms.iter().zip(&hats) {
                        let p = t.psi.eval(&[xi as f64]);
                        for &(k, g) in hat {
                            let r = wrap(xi + k);
                            match col.iter_mut().find(|e| e.0 == r) {
                                Some(e) => e.1 += g * p,
                                None => col.push((r, g * p)),
                            }
                        }
                    }
                    col.sort_by_key(|e| e.0);
                    col
                })
                .collect()
        } else {
            let func = f.closure()?.clone();
            let xs: Vec<f64> = (0..m).map(|j| j as f64 / m as f64).collect();
            cols.par_iter()
                .map(|&xi| {
                    let vals: Vec<Complex64> = xs.iter().map(|x| func(&[*x], &[xi as f64])).collect();
                    let mut col: Vec<(usize, Complex64)> = torus_coefficients(&xgrid, vals)?
                        .into_iter()
                        .map(|(k, v)| (wrap(xi + k), v))
                        .collect();
                    col.sort_by_key(|e| e.0);
                    Ok(col)
                })
                .collect::<Result<_>>()?
        };
        let _ = xigrid;
        Ok(FrequencyBlock { samples: m, band, cols, entries })
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    /// Block of `Op(f - λ)`: `λ` leaves column `ξ` at row `ξ mod M`.
    pub fn shifted(&self, lambda: Complex64) -> FrequencyBlock {
        let mut out = self.clone();
        let m = self.samples as i64;
        for (col, &xi) in out.entries.iter_mut().zip(&self.cols) {
            let r = xi.rem_euclid(m) as usize;
            match col.binary_search_by_key(&r, |e| e.0) {
                Ok(i) => col[i].1 -= lambda,
                Err(i) => col.insert(i, (r, -lambda)),
            }
        }
        out
    }

    /// Dense `M × ncols` matrix (tests and small sizes).
    pub fn to_dense(&self) -> CMatrix {
        let mut d = CMatrix::zeros(self.samples, self.ncols());
        for (j, col) in self.entries.iter().enumerate() {
            for &(r, v) in col {
                d[(r, j)] = v;
            }
        }
        d
    }

    /// `G = B*B`, banded when the column supports overlap only locally.
    pub fn gram(&self) -> Gram {
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); self.samples];
        for (j, col) in self.entries.iter().enumerate() {
            for &(r, v) in col {
                rows[r].push((j, v));
            }
        }
        let bw = rows
            .iter()
            .filter(|r| !r.is_empty())
            .map(|r| r.last().unwrap().0 - r[0].0)
            .max()
            .unwrap_or(0);
        let n = self.ncols();
        if bw <= MAX_BAND {
            let mut g = BandedHermitian::zeros(n, bw);
            for row in &rows {
                for (a, &(i, vi)) in row.iter().enumerate() {
                    for &(j, vj) in &row[..=a] {
                        *g.lower_mut(i, j) += vi.conj() * vj;
                    }
                }
            }
            Gram::Banded(g)
        } else {
            let mut g = CMatrix::zeros(n, n);
            for row in &rows {
                for &(i, vi) in row {
                    for &(j, vj) in row {
                        g[(i, j)] += vi.conj() * vj;
                    }
                }
            }
            Gram::Dense(g)
        }
    }

    pub fn sigma_max(&self, opts: LanczosOptions) -> Result<f64> {
        self.gram().largest(opts).map(|l| l.max(0.0).sqrt())
    }

    pub fn sigma_min(&self, opts: LanczosOptions) -> Result<f64> {
        self.gram().smallest(opts).map(|l| l.max(0.0).sqrt())
    }
}

pub enum Gram {
    Banded(BandedHermitian),
    Dense(CMatrix),
}

impl Gram {
    pub fn largest(&self, opts: LanczosOptions) -> Result<f64> {
        match self {
            Gram::Banded(g) => banded_largest_eigenvalue(g, opts),
            Gram::Dense(g) => {
                let n = g.nrows();
                let r = lanczos_largest(n, 1, |x, y| {
                    let v = g * nalgebra::DVector::from_column_slice(x);
                    y.copy_from_slice(v.as_slice());
                }, opts)?;
                Ok(r.values.first().copied().unwrap_or(0.0))
            }
        }
    }

    pub fn smallest(&self, opts: LanczosOptions) -> Result<f64> {
        match self {
            Gram::Banded(g) => banded_smallest_eigenvalue(g, opts),
            Gram::Dense(g) => Ok(hermitian_eigenvalues(g).first().copied().unwrap_or(0.0)),
        }
    }
}

/// The symbol must live on a one-dimensional torus with an integer dual.
pub fn check_torus_symbol(f: &Symbol) -> Result<()> {
    let ok = f.xgrid().dim() == 1
        && matches!(f.xgrid().axes()[0].kind, AxisKind::Torus { .. })
        && matches!(f.xigrid().axes()[0].kind, AxisKind::Integers { .. });
    if ok {
        Ok(())
    } else {
        Err(Error::Unsupported(
            "frequency truncations need a symbol on a one-dimensional torus with integer dual".into(),
        ))
    }
}
