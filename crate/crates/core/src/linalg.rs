//! Hermitian eigenvalue kernels: dense helpers, banded storage with Cholesky,
//! and Lanczos with full reorthogonalization.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub type CMatrix = DMatrix<Complex64>;

pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Singular values of a dense matrix, descending.
pub fn dense_singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Spectral norm of a dense matrix.
pub fn operator_norm(m: &CMatrix) -> f64 {
    dense_singular_values(m).first().copied().unwrap_or(0.0)
}

/// Eigenvalues of a dense Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    e.sort_by(|a, b| a.total_cmp(b));
    e
}

/// Hermitian matrix stored by its lower band: `A[i][j]` for `0 ≤ i - j ≤ bw`.
#[derive(Clone, Debug)]
pub struct BandedHermitian {
    n: usize,
    bw: usize,
    data: Vec<Complex64>,
}

impl BandedHermitian {
    pub fn zeros(n: usize, bw: usize) -> Self {
        BandedHermitian { n, bw, data: vec![ZERO; n * (bw + 1)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    /// Entry `(i, j)` with `i ≥ j`; callers must stay inside the band.
    #[inline]
    pub fn lower(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * (self.bw + 1) + (i - j)]
    }

    #[inline]
    pub fn lower_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.data[i * (self.bw + 1) + (i - j)]
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if i >= j {
            if i - j > self.bw { ZERO } else { self.lower(i, j) }
        } else if j - i > self.bw {
            ZERO
        } else {
            self.lower(j, i).conj()
        }
    }

    pub fn max_diag(&self) -> f64 {
        (0..self.n).map(|i| self.lower(i, i).re).fold(0.0, f64::max)
    }

    pub fn add_diag(&mut self, s: f64) {
        for i in 0..self.n {
            *self.lower_mut(i, i) += s;
        }
    }

    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        for v in y.iter_mut() {
            *v = ZERO;
        }
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            y[i] += self.lower(i, i) * x[i];
            for j in lo..i {
                let a = self.lower(i, j);
                y[i] += a * x[j];
                y[j] += a.conj() * x[i];
            }
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        CMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// `A = L Lᴴ` within the band; fails if `A` is not numerically positive definite.
    pub fn cholesky(&self) -> Result<BandedCholesky> {
        let (n, bw) = (self.n, self.bw);
        let mut l = BandedHermitian::zeros(n, bw);
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let mut s = self.lower(i, j);
                for k in lo.max(j.saturating_sub(bw))..j {
                    s -= l.lower(i, k) * l.lower(j, k).conj();
                }
                if i == j {
                    if !(s.re > 0.0) {
                        return Err(Error::Numerical(format!(
                            "banded Cholesky: non-positive pivot {} at row {i}",
                            s.re
                        )));
                    }
                    *l.lower_mut(i, i) = Complex64::new(s.re.sqrt(), 0.0);
                } else {
                    *l.lower_mut(i, j) = s / l.lower(j, j).re;
                }
            }
        }
        Ok(BandedCholesky { l })
    }
}

#[derive(Clone, Debug)]
pub struct BandedCholesky {
    l: BandedHermitian,
}

impl BandedCholesky {
    pub fn solve(&self, b: &[Complex64], x: &mut [Complex64]) {
        let (n, bw) = (self.l.n, self.l.bw);
        x.copy_from_slice(b);
        for i in 0..n {
            let mut s = x[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.l.lower(i, k) * x[k];
            }
            x[i] = s / self.l.lower(i, i).re;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..(i + bw + 1).min(n) {
                s -= self.l.lower(k, i).conj() * x[k];
            }
            x[i] = s / self.l.lower(i, i).re;
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LanczosOptions {
    pub max_steps: usize,
    /// Relative residual bound for accepting a Ritz value.
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions { max_steps: 600, tol: 1e-11, seed: 0x5eed }
    }
}

#[derive(Clone, Debug)]
pub struct LanczosResult {
    /// Largest Ritz values, descending.
    pub values: Vec<f64>,
    pub steps: usize,
    pub converged: bool,
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let s = norm(&v);
    v.iter_mut().for_each(|x| *x /= s);
    v
}

fn orthogonalize(w: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, w);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= c * qi;
            }
        }
    }
}

/// Largest `k` eigenvalues of a Hermitian operator given by `apply(x, y)`: `y = A x`.
pub fn lanczos_largest(
    n: usize,
    k: usize,
    mut apply: impl FnMut(&[Complex64], &mut [Complex64]),
    opts: LanczosOptions,
) -> Result<LanczosResult> {
    if n == 0 || k == 0 {
        return Ok(LanczosResult { values: Vec::new(), steps: 0, converged: true });
    }
    let k = k.min(n);
    let max_steps = opts.max_steps.max(k + 2).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(max_steps);
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut q = random_unit(n, &mut rng);
    let mut w = vec![ZERO; n];
    let mut scale = 0.0f64;
    let mut ritz: Vec<f64> = Vec::new();
    let mut converged = false;

    for step in 0..max_steps {
        apply(&q, &mut w);
        let a = dot(&q, &w).re;
        basis.push(q.clone());
        alpha.push(a);
        orthogonalize(&mut w, &basis);
        let b = norm(&w);
        scale = scale.max(a.abs()).max(b);
        let last = step + 1 == max_steps;
        let check = last || step + 1 >= k && (step % 8 == 7 || b <= 1e-12 * scale);
        if check {
            let (vals, bounds) = tridiagonal_ritz(&alpha, &beta, b);
            let top: Vec<(f64, f64)> = vals.iter().copied().zip(bounds).rev().take(k).collect();
            ritz = top.iter().map(|p| p.0).collect();
            let ref_scale = scale.max(f64::MIN_POSITIVE);
            if top.len() == k && top.iter().all(|&(_, r)| r <= opts.tol * ref_scale) {
                converged = true;
                break;
            }
        }
        if last {
            break;
        }
        if b <= 1e-12 * scale {
            // Invariant subspace found: restart in its orthogonal complement.
            let mut fresh = random_unit(n, &mut rng);
            orthogonalize(&mut fresh, &basis);
            let s = norm(&fresh);
            if s < 1e-8 {
                converged = true;
                break;
            }
            fresh.iter_mut().for_each(|x| *x /= s);
            beta.push(0.0);
            q = fresh;
        } else {
            beta.push(b);
            q = w.iter().map(|x| x / b).collect();
        }
    }
    if basis.len() == n {
        converged = true;
    }
    Ok(LanczosResult { values: ritz, steps: basis.len(), converged })
}

/// Ritz values (ascending) of the tridiagonal matrix and their residual bounds.
fn tridiagonal_ritz(alpha: &[f64], beta: &[f64], next: f64) -> (Vec<f64>, Vec<f64>) {
    let m = alpha.len();
    let t = DMatrix::<f64>::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i == j + 1 {
            beta[j]
        } else if j == i + 1 {
            beta[i]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|i| (eig.eigenvalues[i], (next * eig.eigenvectors[(m - 1, i)]).abs()))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Smallest eigenvalue of a positive semidefinite banded matrix by shift-invert Lanczos.
pub fn banded_smallest_eigenvalue(a: &BandedHermitian, opts: LanczosOptions) -> Result<f64> {
    let tau = 1e-12 * a.max_diag().max(1e-200);
    let mut shifted = a.clone();
    shifted.add_diag(tau);
    let chol = shifted.cholesky()?;
    let res = lanczos_largest(a.dim(), 1, |x, y| chol.solve(x, y), opts)?;
    let theta = res.values.first().copied().unwrap_or(0.0);
    if theta <= 0.0 {
        return Err(Error::Numerical("shift-invert Lanczos returned a non-positive value".into()));
    }
    Ok((1.0 / theta - tau).max(0.0))
}

/// Largest eigenvalue of a banded Hermitian matrix.
pub fn banded_largest_eigenvalue(a: &BandedHermitian, opts: LanczosOptions) -> Result<f64> {
    let res = lanczos_largest(a.dim(), 1, |x, y| a.matvec(x, y), opts)?;
    Ok(res.values.first().copied().unwrap_or(0.0))
}
