//! Quantization `f ↦ Op(f)`:
//! `(Op(f)u)(x) = Σ_ξ ŵ_ξ ξ(x) f(x, ξ) (𝓕u)(ξ)`, equivalently the integral
//! operator with kernel `κ_f(x, x·y⁻¹)`, `κ_f = 𝔽₍₂₎⁻¹ f`.

use std::io::{BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{
    fourier_to, inverse_fourier_to, partial_fourier_1, partial_fourier_2, partial_fourier_2_inverse, Engine,
    PhaseFunction,
};
use crate::lca::{dual_grid, pairing, GridFunction, GroupGrid};
use crate::linalg::{operator_norm, CMatrix};
use crate::symbols::Symbol;

/// Largest grid for which dense matrices are formed.
pub const DENSE_LIMIT: usize = 8192;

/// `Op(f)` on a grid, in dense form, fast-apply form, or both.
#[derive(Clone, Debug)]
pub struct PdoOperator {
    pub xgrid: GroupGrid,
    pub xigrid: GroupGrid,
    pub matrix: Option<CMatrix>,
    pub symbol: Option<Symbol>,
    pub label: String,
}

impl PdoOperator {
    /// Operator given only by a dense matrix in the position basis.
    pub fn from_matrix(xgrid: GroupGrid, xigrid: GroupGrid, matrix: CMatrix, label: impl Into<String>) -> Result<Self> {
        let n = xgrid.len();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Dimension { expected: n * n, got: matrix.nrows() * matrix.ncols() });
        }
        Ok(PdoOperator { xgrid, xigrid, matrix: Some(matrix), symbol: None, label: label.into() })
    }

    /// Fast-apply only.
    pub fn lazy(f: &Symbol) -> Self {
        PdoOperator {
            xgrid: f.xgrid().clone(),
            xigrid: f.xigrid().clone(),
            matrix: None,
            symbol: Some(f.clone()),
            label: f.label.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.xgrid.len()
    }

    pub fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        if u.grid != self.xgrid {
            return Err(Error::GridMismatch("input lives on a different grid".into()));
        }
        if let Some(m) = &self.matrix {
            let v = m * DVector::from_column_slice(&u.values);
            return GridFunction::new(self.xgrid.clone(), v.as_slice().to_vec());
        }
        match &self.symbol {
            Some(f) => op_apply(f, u),
            None => Err(Error::Unsupported("operator has neither matrix nor symbol".into())),
        }
    }

    pub fn fast_apply(&self, u: &GridFunction) -> Result<GridFunction> {
        match &self.symbol {
            Some(f) => op_apply(f, u),
            None => Err(Error::Unsupported("operator has no symbol for fast application".into())),
        }
    }

    pub fn dense(&self) -> Result<&CMatrix> {
        self.matrix.as_ref().ok_or_else(|| Error::Unsupported("operator has no dense form".into()))
    }
}

fn ensure_dense(n: usize) -> Result<()> {
    if n > DENSE_LIMIT {
        return Err(Error::Unsupported(format!(
            "dense matrices are capped at {DENSE_LIMIT}², grid has {n} points"
        )));
    }
    Ok(())
}

/// `x·y⁻¹` for all pairs, row-major.
fn difference_table(grid: &GroupGrid) -> Vec<usize> {
    let n = grid.len();
    if grid.dim() == 1 {
        let a = &grid.axes()[0];
        (0..n).flat_map(|x| (0..n).map(move |y| a.sub_index(x, y))).collect()
    } else {
        (0..n).flat_map(|x| (0..n).map(move |y| grid.sub_index(x, y))).collect()
    }
}

/// Kernel matrix `M[x, y] = w_y κ(x, x·y⁻¹)` from a kernel on `X × X`.
fn kernel_to_matrix(kernel: &PhaseFunction) -> CMatrix {
    let grid = &kernel.first;
    let n = grid.len();
    let w = grid.weight();
    let diff = difference_table(grid);
    let rows: Vec<Complex64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|x| {
            let diff = &diff;
            (0..n).map(move |y| kernel.get(x, diff[x * n + y]) * w)
        })
        .collect();
    CMatrix::from_row_slice(n, n, &rows)
}

/// Dense position-basis matrix of `Op(f)`, with the fast-apply form attached.
pub fn op_matrix(f: &Symbol) -> Result<PdoOperator> {
    ensure_dense(f.xgrid().len())?;
    let kernel = partial_fourier_2_inverse(f.table())?;
    Ok(PdoOperator {
        xgrid: f.xgrid().clone(),
        xigrid: f.xigrid().clone(),
        matrix: Some(kernel_to_matrix(&kernel)),
        symbol: Some(f.clone()),
        label: f.label.clone(),
    })
}

/// Symbol `f` with `Op(f) = m`; exact on finite groups with the full dual.
pub fn symbol_from_matrix(xgrid: &GroupGrid, xigrid: &GroupGrid, m: &CMatrix, label: &str) -> Result<Symbol> {
    let n = xgrid.len();
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::Dimension { expected: n * n, got: m.nrows() * m.ncols() });
    }
    if !xgrid.is_finite_group() || xigrid != &dual_grid(xgrid)? {
        return Err(Error::Unsupported("matrices determine symbols only on finite groups with the full dual".into()));
    }
    let w = xgrid.weight();
    // κ(x, z) = M[x, y] / w where z = x·y⁻¹, i.e. y = x·z⁻¹.
    let kernel = PhaseFunction::from_fn(xgrid.clone(), xgrid.clone(), |x, z| m[(x, xgrid.sub_index(x, z))] / w);
    Symbol::from_table(label, partial_fourier_2(&kernel, xigrid)?)
}

/// `Op(f)u` without forming a matrix; tensor sums go through FFTs.
pub fn op_apply(f: &Symbol, u: &GridFunction) -> Result<GridFunction> {
    if &u.grid != f.xgrid() {
        return Err(Error::GridMismatch("input lives on a different grid than the symbol".into()));
    }
    let uhat = fourier_to(u, f.xigrid(), Engine::Auto)?;
    if let Some(terms) = f.terms() {
        let mut out = vec![Complex64::new(0.0, 0.0); u.grid.len()];
        for term in terms {
            let psi = term.psi.sample_on(f.xigrid());
            let prod: Vec<Complex64> = psi.values.iter().zip(&uhat.values).map(|(a, b)| a * b).collect();
            let v = inverse_fourier_to(&GridFunction::new(f.xigrid().clone(), prod)?, f.xgrid(), Engine::Auto)?;
            let gamma = term.gamma.sample_on(f.xgrid());
            for ((o, g), w) in out.iter_mut().zip(&gamma.values).zip(&v.values) {
                *o += g * w;
            }
        }
        return GridFunction::new(f.xgrid().clone(), out);
    }
    let table = f.table();
    let (xg, kg) = (f.xgrid(), f.xigrid());
    let wk = kg.weight();
    let out: Vec<Complex64> = (0..xg.len())
        .into_par_iter()
        .map(|x| {
            let row = table.row(x);
            (0..kg.len())
                .map(|k| pairing(xg, x, kg, k).map(|p| p * row[k] * uhat.values[k] * wk))
                .sum::<Result<Complex64>>()
        })
        .collect::<Result<_>>()?;
    GridFunction::new(xg.clone(), out)
}

/// Symbol of the adjoint: kernel `κ_g(x, z) = conj(κ_f(x·z⁻¹, z⁻¹))`.
pub fn adjoint_symbol(f: &Symbol) -> Result<Symbol> {
    let kernel = partial_fourier_2_inverse(f.table())?;
    let grid = &kernel.first;
    let id = grid.identity_index();
    let g = PhaseFunction::from_fn(grid.clone(), grid.clone(), |x, z| {
        kernel.get(grid.sub_index(x, z), grid.sub_index(id, z)).conj()
    });
    let table = partial_fourier_2(&g, f.xigrid())?;
    Symbol::from_table(format!("({})*", f.label), table)
}

/// `Sch(Ψ)[ξ, η] = ŵ_η Ψ(ξ·η⁻¹, η)` for `Ψ` on `Ξ × Ξ`.
pub fn schrodinger_matrix(psi: &PhaseFunction) -> Result<CMatrix> {
    if psi.first != psi.second {
        return Err(Error::GridMismatch("Schrödinger matrix needs a function on Ξ × Ξ".into()));
    }
    ensure_dense(psi.first.len())?;
    let g = &psi.first;
    let n = g.len();
    let w = g.weight();
    let diff = difference_table(g);
    Ok(CMatrix::from_fn(n, n, |xi, eta| psi.get(diff[xi * n + eta], eta) * w))
}

/// Matrices of `𝓕: L²(X) → L²(Ξ)` and `𝓕⁻¹`.
pub fn fourier_matrices(xgrid: &GroupGrid, xigrid: &GroupGrid) -> Result<(CMatrix, CMatrix)> {
    xgrid.pair_lengths(xigrid)?;
    let (nx, nk) = (xgrid.len(), xigrid.len());
    let (wx, wk) = (xgrid.weight(), xigrid.weight());
    let mut p = CMatrix::zeros(nk, nx);
    for k in 0..nk {
        for x in 0..nx {
            p[(k, x)] = pairing(xgrid, x, xigrid, k)?;
        }
    }
    let f = p.map(|v| v.conj() * wx);
    let finv = p.transpose().map(|v| v * wk);
    Ok((f, finv))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagramReport {
    /// `‖Op(f) - 𝓕⁻¹ Sch(𝔽₍₁₎f) 𝓕‖`.
    pub residual: f64,
    pub op_norm: f64,
    pub relative: f64,
}

/// Residual of `Op(f) = 𝓕⁻¹ ∘ Sch(𝔽₍₁₎f) ∘ 𝓕` in operator norm; finite groups only.
pub fn diagram_check(f: &Symbol) -> Result<DiagramReport> {
    if !f.xgrid().is_finite_group() {
        return Err(Error::Unsupported("the factorization check is exact only on finite groups".into()));
    }
    if f.xigrid() != &dual_grid(f.xgrid())? {
        return Err(Error::GridMismatch("the factorization check needs the full dual grid".into()));
    }
    let op = op_matrix(f)?;
    let m = op.dense()?;
    let sch = schrodinger_matrix(&partial_fourier_1(f.table())?)?;
    let (fw, finv) = fourier_matrices(f.xgrid(), f.xigrid())?;
    let residual = operator_norm(&(m - finv * sch * fw));
    let op_norm = operator_norm(m);
    let relative = if op_norm > 0.0 { residual / op_norm } else { residual };
    Ok(DiagramReport { residual, op_norm, relative })
}

/// `M_γ = diag(γ)`.
pub fn multiplication_operator(gamma: &GridFunction, xigrid: &GroupGrid) -> Result<PdoOperator> {
    ensure_dense(gamma.grid.len())?;
    let m = CMatrix::from_diagonal(&DVector::from_column_slice(&gamma.values));
    PdoOperator::from_matrix(gamma.grid.clone(), xigrid.clone(), m, "multiplication")
}

/// `C = 𝓕⁻¹ diag(ψ) 𝓕`.
pub fn convolution_operator(psi: &GridFunction, xgrid: &GroupGrid) -> Result<PdoOperator> {
    ensure_dense(xgrid.len())?;
    let (fw, finv) = fourier_matrices(xgrid, &psi.grid)?;
    let d = CMatrix::from_diagonal(&DVector::from_column_slice(&psi.values));
    PdoOperator::from_matrix(xgrid.clone(), psi.grid.clone(), finv * d * fw, "convolution")
}

/// Hilbert–Schmidt norm on `L²(X, w)`: `(Σ w_x w_y |K(x, y)|²)^{1/2}` with
/// kernel `K = M / w`; for uniform weights this is the Frobenius norm of `M`.
pub fn hs_norm(op: &PdoOperator) -> Result<f64> {
    Ok(op.dense()?.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt())
}

/// Writes `rows: u64, cols: u64` then row-major `(re: f64, im: f64)` pairs,
/// all little-endian.
pub fn write_binary(m: &CMatrix, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(std::fs::File::create(path)?);
    out.write_all(&(m.nrows() as u64).to_le_bytes())?;
    out.write_all(&(m.ncols() as u64).to_le_bytes())?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let v = m[(i, j)];
            out.write_all(&v.re.to_le_bytes())?;
            out.write_all(&v.im.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_binary(path: &Path) -> Result<CMatrix> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let word = |i: usize| -> Result<[u8; 8]> {
        bytes
            .get(8 * i..8 * i + 8)
            .and_then(|s| s.try_into().ok())
            .ok_or_else(|| Error::InvalidArgument("truncated matrix file".into()))
    };
    let rows = u64::from_le_bytes(word(0)?) as usize;
    let cols = u64::from_le_bytes(word(1)?) as usize;
    if bytes.len() != 16 + 16 * rows * cols {
        return Err(Error::InvalidArgument("matrix file size does not match its header".into()));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for k in 0..rows * cols {
        data.push(Complex64::new(f64::from_le_bytes(word(2 + 2 * k)?), f64::from_le_bytes(word(3 + 2 * k)?)));
    }
    Ok(CMatrix::from_row_slice(rows, cols, &data))
}

/// Writes `row,col,re,im` lines.
pub fn write_csv(m: &CMatrix, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["row", "col", "re", "im"])?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let v = m[(i, j)];
            w.write_record([i.to_string(), j.to_string(), format!("{:e}", v.re), format!("{:e}", v.im)])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{DualFunction, XFunction};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cyclic(n: usize) -> (GroupGrid, GroupGrid) {
        let x = GroupGrid::finite_cyclic(n).unwrap();
        let xi = dual_grid(&x).unwrap();
        (x, xi)
    }

    fn random_symbol(n: usize, seed: u64) -> Symbol {
        let (x, xi) = cyclic(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vals: Vec<Complex64> =
            (0..n * n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        Symbol::from_table("random", PhaseFunction::new(x, xi, vals).unwrap()).unwrap()
    }

    fn random_function(grid: &GroupGrid, seed: u64) -> GridFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vals = (0..grid.len()).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        GridFunction::new(grid.clone(), vals).unwrap()
    }

    fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn constant_symbol_gives_identity() {
        let (x, xi) = cyclic(8);
        let s = Symbol::tensor(XFunction::constant(c(1.0, 0.0)), DualFunction::constant(c(1.0, 0.0)), x, xi).unwrap();
        let op = op_matrix(&s).unwrap();
        assert!(max_diff(op.dense().unwrap(), &CMatrix::identity(8, 8)) < 1e-14);
        let u = random_function(s.xgrid(), 1);
        let v = op_apply(&s, &u).unwrap();
        assert!(v.values.iter().zip(&u.values).all(|(a, b)| (a - b).norm() < 1e-14));
    }

    #[test]
    fn position_only_symbol_is_diagonal() {
        let (x, xi) = cyclic(8);
        let g = XFunction::new("g", 8.0, |p| c(p[0], 1.0));
        let s = Symbol::tensor(g.clone(), DualFunction::constant(c(1.0, 0.0)), x.clone(), xi.clone()).unwrap();
        let op = op_matrix(&s).unwrap();
        let gamma = g.sample_on(&x);
        let m = multiplication_operator(&gamma, &xi).unwrap();
        assert!(max_diff(op.dense().unwrap(), m.dense().unwrap()) < 1e-13);
    }

    #[test]
    fn frequency_only_symbol_is_circulant_conjugation() {
        let (x, xi) = cyclic(8);
        let psi = random_function(&xi, 2);
        let table = PhaseFunction::from_fn(x.clone(), xi.clone(), |_, k| psi.values[k]);
        let s = Symbol::from_table("psi", table).unwrap();
        let op = op_matrix(&s).unwrap();
        let conv = convolution_operator(&psi, &x).unwrap();
        assert!(max_diff(op.dense().unwrap(), conv.dense().unwrap()) < 1e-12);
    }

    #[test]
    fn tensor_is_multiplication_after_convolution() {
        let (x, xi) = cyclic(8);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let gv: Vec<Complex64> = (0..8).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let pv: Vec<Complex64> = (0..8).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let gamma = GridFunction::new(x.clone(), gv).unwrap();
        let psi = GridFunction::new(xi.clone(), pv).unwrap();
        let s = Symbol::from_table("t", PhaseFunction::tensor(&gamma, &psi)).unwrap();
        let op = op_matrix(&s).unwrap();
        let prod = multiplication_operator(&gamma, &xi).unwrap().dense().unwrap()
            * convolution_operator(&psi, &x).unwrap().dense().unwrap();
        assert!(max_diff(op.dense().unwrap(), &prod) < 1e-12);
    }

    #[test]
    fn fast_apply_matches_matrix() {
        let s = random_symbol(64, 4);
        let op = op_matrix(&s).unwrap();
        let u = random_function(s.xgrid(), 5);
        let a = op.apply(&u).unwrap();
        let b = op.fast_apply(&u).unwrap();
        let err = a.values.iter().zip(&b.values).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
        assert!(err <= 1e-9 * u.norm2());
    }

    #[test]
    fn separable_fast_path_on_torus() {
        let (x, xi) = GroupGrid::torus_pair(16, 4).unwrap();
        let s = Symbol::tensor(
            XFunction::cosine(2.0, 1.0),
            DualFunction::real("sq", 1.0, |k| k[0].abs().sqrt().sin()),
            x.clone(),
            xi,
        )
        .unwrap();
        let op = op_matrix(&s).unwrap();
        let u = random_function(&x, 6);
        let a = op.apply(&u).unwrap();
        let b = op_apply(&s, &u).unwrap();
        let generic = PdoOperator::lazy(&Symbol::from_table("t", s.table().clone()).unwrap()).apply(&u).unwrap();
        for i in 0..x.len() {
            assert!((a.values[i] - b.values[i]).norm() < 1e-12);
            assert!((a.values[i] - generic.values[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn hilbert_schmidt_isometry() {
        for n in [4, 8, 16, 64] {
            let s = random_symbol(n, n as u64);
            let op = op_matrix(&s).unwrap();
            let lhs = hs_norm(&op).unwrap();
            let rhs = s.table().hs_norm();
            assert!((lhs - rhs).abs() <= 1e-10 * rhs, "N={n}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn linearity() {
        let a = random_symbol(16, 7);
        let b = random_symbol(16, 8);
        let (p, q) = (c(0.3, -1.0), c(2.0, 0.5));
        let sum: Vec<Complex64> =
            a.table().values.iter().zip(&b.table().values).map(|(x, y)| p * x + q * y).collect();
        let ab = Symbol::from_table("ab", PhaseFunction::new(a.xgrid().clone(), a.xigrid().clone(), sum).unwrap()).unwrap();
        let lhs = op_matrix(&ab).unwrap().matrix.unwrap();
        let rhs = op_matrix(&a).unwrap().matrix.unwrap() * p + op_matrix(&b).unwrap().matrix.unwrap() * q;
        assert!(max_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn adjoint_symbol_quantizes_to_adjoint() {
        let s = random_symbol(16, 9);
        let op = op_matrix(&s).unwrap().matrix.unwrap();
        let adj = op_matrix(&adjoint_symbol(&s).unwrap()).unwrap().matrix.unwrap();
        assert!(max_diff(&adj, &op.adjoint()) < 1e-12);
        // Real symbols need not give self-adjoint operators.
        let (x, xi) = cyclic(8);
        let r = Symbol::from_fn("real", 2.0, x, xi, |p, k| c((p[0] + k[0]).cos() + p[0].sin(), 0.0)).unwrap();
        let m = op_matrix(&r).unwrap().matrix.unwrap();
        assert!(max_diff(&m, &m.adjoint()) > 1e-3);
    }

    #[test]
    fn schrodinger_examples() {
        let (_, xi) = cyclic(8);
        let id = xi.identity_index();
        let delta = PhaseFunction::from_fn(xi.clone(), xi.clone(), |z, _| c(if z == id { 1.0 } else { 0.0 }, 0.0));
        let m = schrodinger_matrix(&delta).unwrap();
        assert!(max_diff(&m, &(CMatrix::identity(8, 8) * c(xi.weight(), 0.0))) < 1e-15);
        let a: Vec<Complex64> = (0..8).map(|i| c(i as f64, 1.0)).collect();
        let conv = PhaseFunction::from_fn(xi.clone(), xi.clone(), |z, _| a[z]);
        let m = schrodinger_matrix(&conv).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(m[(i, j)], m[((i + 1) % 8, (j + 1) % 8)]);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let vals: Vec<Complex64> = (0..64).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let psi = PhaseFunction::new(xi.clone(), xi.clone(), vals).unwrap();
        let m = schrodinger_matrix(&psi).unwrap();
        let w = xi.weight();
        // HS norm on L²(Ξ, ŵ): Σ ŵ ŵ |M/ŵ|².
        let hs = m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        assert!((hs - psi.hs_norm()).abs() < 1e-12 * hs, "{hs} vs {} (w={w})", psi.hs_norm());
    }

    #[test]
    fn diagram_commutes_on_finite_groups() {
        let (x, xi) = cyclic(4);
        let one = Symbol::tensor(XFunction::constant(c(1.0, 0.0)), DualFunction::constant(c(1.0, 0.0)), x, xi).unwrap();
        assert!(diagram_check(&one).unwrap().residual < 1e-14);
        let r = diagram_check(&random_symbol(16, 11)).unwrap();
        assert!(r.relative < 1e-10, "{r:?}");
        let (t, k) = GroupGrid::torus_pair(8, 4).unwrap();
        let s = Symbol::tensor(XFunction::cosine(1.0, 1.0), DualFunction::constant(c(1.0, 0.0)), t, k).unwrap();
        assert!(diagram_check(&s).is_err());
    }

    #[test]
    fn binary_and_csv_export() {
        let m = op_matrix(&random_symbol(8, 12)).unwrap().matrix.unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("op.bin");
        write_binary(&m, &p).unwrap();
        assert_eq!(std::fs::metadata(&p).unwrap().len(), 16 + 16 * 64);
        assert_eq!(read_binary(&p).unwrap(), m);
        let q = dir.path().join("op.csv");
        write_csv(&m, &q).unwrap();
        assert_eq!(std::fs::read_to_string(&q).unwrap().lines().count(), 65);
    }
}
