//! Fourier transforms between paired grids and partial transforms on phase space.
//!
//! Forward: `(F u)(ξ) = Σ_x w_x conj(ξ(x)) u(x)`.
//! Inverse: `(F⁻¹ ψ)(x) = Σ_ξ ŵ_ξ ξ(x) ψ(ξ)`.
//!
//! Each axis is handled by a [`LineTransform`]; power-of-two transform lengths
//! go through `rustfft`, the rest through a dense sum with exact integer
//! phase reduction. Both routes evaluate the same formula.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::lca::{dual_grid, root_of_unity, Axis, GridFunction, GroupGrid};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Engine {
    /// FFT for power-of-two lengths, dense otherwise.
    #[default]
    Auto,
    Fft,
    Dense,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sign {
    Forward,
    Inverse,
}

/// `out[o] = scale · Σ_i exp(±2πi (i + a_in)(o + a_out) / m) · in[i]`.
#[derive(Clone, Copy, Debug)]
struct LineTransform {
    len_in: usize,
    len_out: usize,
    a_in: i64,
    a_out: i64,
    m: usize,
    sign: Sign,
    scale: f64,
}

impl LineTransform {
    fn between(from: &Axis, to: &Axis, m: usize, sign: Sign) -> LineTransform {
        LineTransform {
            len_in: from.len,
            len_out: to.len,
            a_in: from.index_offset(),
            a_out: to.index_offset(),
            m,
            sign,
            scale: from.weight,
        }
    }

    fn apply(&self, input: &[Complex64], output: &mut [Complex64], engine: Engine) {
        let use_fft = match engine {
            Engine::Auto => self.m.is_power_of_two(),
            Engine::Fft => true,
            Engine::Dense => false,
        };
        if use_fft {
            self.apply_fft(input, output)
        } else {
            self.apply_dense(input, output)
        }
    }

    fn apply_fft(&self, input: &[Complex64], output: &mut [Complex64]) {
        let m = self.m as i64;
        let mut buf = vec![ZERO; self.m];
        for (i, v) in input.iter().enumerate() {
            buf[(i as i64 + self.a_in).rem_euclid(m) as usize] += *v;
        }
        plan(self.m, self.sign).process(&mut buf);
        for (o, slot) in output.iter_mut().enumerate() {
            *slot = buf[(o as i64 + self.a_out).rem_euclid(m) as usize] * self.scale;
        }
    }

    fn apply_dense(&self, input: &[Complex64], output: &mut [Complex64]) {
        let m = self.m as i64;
        let twiddles: Vec<Complex64> = (0..m)
            .map(|q| {
                let w = root_of_unity(q, self.m);
                match self.sign {
                    Sign::Forward => w.conj(),
                    Sign::Inverse => w,
                }
            })
            .collect();
        for (o, slot) in output.iter_mut().enumerate() {
            let lo = o as i64 + self.a_out;
            let mut acc = ZERO;
            for (i, v) in input.iter().enumerate() {
                let li = i as i64 + self.a_in;
                let q = (li as i128 * lo as i128).rem_euclid(m as i128) as usize;
                acc += twiddles[q] * v;
            }
            *slot = acc * self.scale;
        }
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, sign: Sign) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        match sign {
            Sign::Forward => p.plan_fft_forward(len),
            Sign::Inverse => p.plan_fft_inverse(len),
        }
    })
}

/// Applies `line` along `axis` of a row-major array of the given shape.
fn apply_along(
    values: &[Complex64],
    shape: &[usize],
    axis: usize,
    line: &LineTransform,
    engine: Engine,
) -> (Vec<Complex64>, Vec<usize>) {
    debug_assert_eq!(shape[axis], line.len_in);
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out_shape = shape.to_vec();
    out_shape[axis] = line.len_out;
    let mut out = vec![ZERO; outer * line.len_out * inner];
    let mut src = vec![ZERO; line.len_in];
    let mut dst = vec![ZERO; line.len_out];
    for o in 0..outer {
        for i in 0..inner {
            for (j, s) in src.iter_mut().enumerate() {
                *s = values[(o * line.len_in + j) * inner + i];
            }
            line.apply(&src, &mut dst, engine);
            for (j, d) in dst.iter().enumerate() {
                out[(o * line.len_out + j) * inner + i] = *d;
            }
        }
    }
    (out, out_shape)
}

/// Transforms the axes `offset .. offset + from.dim()` of an array from grid
/// `from` to its paired grid `to`.
fn transform_block(
    values: Vec<Complex64>,
    mut shape: Vec<usize>,
    offset: usize,
    from: &GroupGrid,
    to: &GroupGrid,
    lengths: &[usize],
    sign: Sign,
    engine: Engine,
) -> (Vec<Complex64>, Vec<usize>) {
    let mut values = values;
    for (k, ((fa, ta), &m)) in from.axes().iter().zip(to.axes()).zip(lengths).enumerate() {
        let line = LineTransform::between(fa, ta, m, sign);
        let (v, s) = apply_along(&values, &shape, offset + k, &line, engine);
        values = v;
        shape = s;
    }
    (values, shape)
}

/// Forward transform onto the Pontryagin dual grid.
pub fn fourier(u: &GridFunction) -> Result<GridFunction> {
    let target = dual_grid(&u.grid)?;
    fourier_to(u, &target, Engine::Auto)
}

/// Forward transform onto a paired (possibly band-truncated) dual grid.
pub fn fourier_to(u: &GridFunction, target: &GroupGrid, engine: Engine) -> Result<GridFunction> {
    let lengths = u.grid.pair_lengths(target)?;
    let (values, _) = transform_block(
        u.values.clone(),
        u.grid.shape(),
        0,
        &u.grid,
        target,
        &lengths,
        Sign::Forward,
        engine,
    );
    GridFunction::new(target.clone(), values)
}

/// Inverse transform, `F⁻¹ ∘ F = id` when `psi` lives on `dual_grid(X)`.
pub fn inverse_fourier(psi: &GridFunction) -> Result<GridFunction> {
    let target = dual_grid(&psi.grid)?;
    inverse_fourier_to(psi, &target, Engine::Auto)
}

/// Inverse transform from a dual grid onto the given primal grid.
pub fn inverse_fourier_to(
    psi: &GridFunction,
    target: &GroupGrid,
    engine: Engine,
) -> Result<GridFunction> {
    let lengths = target.pair_lengths(&psi.grid)?;
    let (values, _) = transform_block(
        psi.values.clone(),
        psi.grid.shape(),
        0,
        &psi.grid,
        target,
        &lengths,
        Sign::Inverse,
        engine,
    );
    GridFunction::new(target.clone(), values)
}

/// Complex function on a product `first × second` of grids, row-major with the
/// first variable outermost.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseFunction {
    pub first: GroupGrid,
    pub second: GroupGrid,
    pub values: Vec<Complex64>,
}

impl PhaseFunction {
    pub fn new(first: GroupGrid, second: GroupGrid, values: Vec<Complex64>) -> Result<Self> {
        let expected = first.len() * second.len();
        if values.len() != expected {
            return Err(Error::Dimension { expected, got: values.len() });
        }
        Ok(PhaseFunction { first, second, values })
    }

    pub fn zeros(first: GroupGrid, second: GroupGrid) -> Self {
        let n = first.len() * second.len();
        PhaseFunction { first, second, values: vec![ZERO; n] }
    }

    pub fn from_fn(
        first: GroupGrid,
        second: GroupGrid,
        f: impl Fn(usize, usize) -> Complex64,
    ) -> Self {
        let (n1, n2) = (first.len(), second.len());
        let mut values = Vec::with_capacity(n1 * n2);
        for i in 0..n1 {
            for k in 0..n2 {
                values.push(f(i, k));
            }
        }
        PhaseFunction { first, second, values }
    }

    /// Tensor product `γ ⊗ ψ`.
    pub fn tensor(gamma: &GridFunction, psi: &GridFunction) -> Self {
        PhaseFunction::from_fn(gamma.grid.clone(), psi.grid.clone(), |i, k| {
            gamma.values[i] * psi.values[k]
        })
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> Complex64 {
        self.values[i * self.second.len() + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, k: usize, v: Complex64) {
        let n2 = self.second.len();
        self.values[i * n2 + k] = v;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        let n2 = self.second.len();
        &self.values[i * n2..(i + 1) * n2]
    }

    /// Weighted L² norm `(Σ w ŵ |f|²)^{1/2}`.
    pub fn hs_norm(&self) -> f64 {
        let w = self.first.weight() * self.second.weight();
        (w * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn shape(&self) -> Vec<usize> {
        let mut s = self.first.shape();
        s.extend(self.second.shape());
        s
    }
}

/// `(F₍₁₎ g)(η, ξ) = Σ_x w_x conj(η(x)) g(x, ξ)`, onto `dual(X) × Ξ`.
pub fn partial_fourier_1(g: &PhaseFunction) -> Result<PhaseFunction> {
    let target = dual_grid(&g.first)?;
    let lengths = g.first.pair_lengths(&target)?;
    let (values, _) = transform_block(
        g.values.clone(),
        g.shape(),
        0,
        &g.first,
        &target,
        &lengths,
        Sign::Forward,
        Engine::Auto,
    );
    PhaseFunction::new(target, g.second.clone(), values)
}

/// Inverse of [`partial_fourier_1`].
pub fn partial_fourier_1_inverse(psi: &PhaseFunction) -> Result<PhaseFunction> {
    let target = dual_grid(&psi.first)?;
    let lengths = target.pair_lengths(&psi.first)?;
    let (values, _) = transform_block(
        psi.values.clone(),
        psi.shape(),
        0,
        &psi.first,
        &target,
        &lengths,
        Sign::Inverse,
        Engine::Auto,
    );
    PhaseFunction::new(target, psi.second.clone(), values)
}

/// Row-wise inverse transform in the second variable, `X × Ξ → X × X`:
/// `κ(x, z) = Σ_ξ ŵ_ξ ξ(z) f(x, ξ)`.
pub fn partial_fourier_2_inverse(f: &PhaseFunction) -> Result<PhaseFunction> {
    let target = f.first.clone();
    let lengths = target.pair_lengths(&f.second)?;
    let offset = f.first.dim();
    let (values, _) = transform_block(
        f.values.clone(),
        f.shape(),
        offset,
        &f.second,
        &target,
        &lengths,
        Sign::Inverse,
        Engine::Auto,
    );
    PhaseFunction::new(f.first.clone(), target, values)
}

/// Row-wise forward transform in the second variable, `X × X → X × Ξ`.
pub fn partial_fourier_2(kernel: &PhaseFunction, xigrid: &GroupGrid) -> Result<PhaseFunction> {
    let lengths = kernel.second.pair_lengths(xigrid)?;
    let offset = kernel.first.dim();
    let (values, _) = transform_block(
        kernel.values.clone(),
        kernel.shape(),
        offset,
        &kernel.second,
        xigrid,
        &lengths,
        Sign::Forward,
        Engine::Auto,
    );
    PhaseFunction::new(kernel.first.clone(), xigrid.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lca::{pairing, product_group};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_values(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
    }

    /// Dense DFT matrix oracle built from `pairing` alone.
    fn dense_forward(u: &GridFunction, target: &GroupGrid) -> Vec<Complex64> {
        let w = u.grid.weight();
        (0..target.len())
            .map(|k| {
                (0..u.grid.len())
                    .map(|x| w * pairing(&u.grid, x, target, k).unwrap().conj() * u.values[x])
                    .sum()
            })
            .collect()
    }

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn z2_delta_and_constant() {
        let g = GroupGrid::finite_cyclic(2).unwrap();
        let delta = GridFunction::new(g.clone(), vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let hat = fourier(&delta).unwrap();
        assert!(max_diff(&hat.values, &[c(1.0, 0.0), c(1.0, 0.0)]) < 1e-15);
        assert!((delta.norm2_squared() - 1.0).abs() < 1e-15);
        assert!((hat.norm2_squared() - 1.0).abs() < 1e-15);

        let one = GridFunction::new(g, vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let hat = fourier(&one).unwrap();
        assert!(max_diff(&hat.values, &[c(2.0, 0.0), c(0.0, 0.0)]) < 1e-15);

        let psi = GridFunction::new(hat.grid.clone(), vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let back = inverse_fourier(&psi).unwrap();
        assert!(max_diff(&back.values, &[c(1.0, 0.0), c(0.0, 0.0)]) < 1e-15);
    }

    #[test]
    fn z8_matches_dense_oracle_and_round_trips() {
        let g = GroupGrid::finite_cyclic(8).unwrap();
        let u = GridFunction::new(g.clone(), random_values(8, 1)).unwrap();
        let hat = fourier(&u).unwrap();
        assert!(max_diff(&hat.values, &dense_forward(&u, &hat.grid)) < 1e-12);
        let back = inverse_fourier(&hat).unwrap();
        assert!(max_diff(&back.values, &u.values) < 1e-12);
    }

    #[test]
    fn zero_maps_to_zero() {
        let xi = GroupGrid::integers(8).unwrap();
        let z = GridFunction::zeros(xi.clone());
        let t = GroupGrid::torus(32).unwrap();
        let back = inverse_fourier_to(&z, &t, Engine::Auto).unwrap();
        assert!(back.values.iter().all(|v| *v == ZERO));
    }

    #[test]
    fn torus_band_limited_round_trip() {
        let x = GroupGrid::torus(256).unwrap();
        let xi = GroupGrid::integers(128).unwrap();
        let psi = GridFunction::new(xi.clone(), random_values(256, 2)).unwrap();
        let u = inverse_fourier_to(&psi, &x, Engine::Auto).unwrap();
        let dense_u = inverse_fourier_to(&psi, &x, Engine::Dense).unwrap();
        assert!(max_diff(&u.values, &dense_u.values) < 1e-10);
        let back = fourier_to(&u, &xi, Engine::Auto).unwrap();
        assert!(max_diff(&back.values, &psi.values) < 1e-10);
    }

    #[test]
    fn oversampled_torus_round_trip() {
        let x = GroupGrid::torus(64).unwrap();
        let xi = GroupGrid::integers(16).unwrap();
        let psi = GridFunction::new(xi.clone(), random_values(32, 3)).unwrap();
        let u = inverse_fourier_to(&psi, &x, Engine::Auto).unwrap();
        let back = fourier_to(&u, &xi, Engine::Auto).unwrap();
        assert!(max_diff(&back.values, &psi.values) < 1e-12);
        assert!((u.norm2() - back.norm2()).abs() < 1e-12);
    }

    #[test]
    fn real_line_plancherel() {
        let x = GroupGrid::real_line(0.25, 16.0).unwrap();
        let u = GridFunction::from_fn(x, |p| c((-p[0] * p[0]).exp(), 0.5 * p[0].sin()));
        let hat = fourier(&u).unwrap();
        assert!((hat.norm2() - u.norm2()).abs() < 1e-12 * u.norm2());
        // Odd-length grids go through the dense route.
        let x = GroupGrid::real_line(0.5, 7.5).unwrap();
        let u = GridFunction::new(x.clone(), random_values(15, 9)).unwrap();
        let hat = fourier(&u).unwrap();
        assert!(max_diff(&hat.values, &dense_forward(&u, &hat.grid)) < 1e-12);
        let back = inverse_fourier(&hat).unwrap();
        assert!(max_diff(&back.values, &u.values) < 1e-12);
    }

    #[test]
    fn product_grid_transform_matches_oracle() {
        let g = product_group(&[GroupGrid::finite_cyclic(4).unwrap(), GroupGrid::finite_cyclic(3).unwrap()])
            .unwrap();
        let u = GridFunction::new(g.clone(), random_values(12, 4)).unwrap();
        let hat = fourier(&u).unwrap();
        assert!(max_diff(&hat.values, &dense_forward(&u, &hat.grid)) < 1e-12);
    }

    #[test]
    fn convolution_theorem_on_zn() {
        let g = GroupGrid::finite_cyclic(12).unwrap();
        let a = GridFunction::new(g.clone(), random_values(12, 5)).unwrap();
        let b = GridFunction::new(g.clone(), random_values(12, 6)).unwrap();
        let conv: Vec<Complex64> = (0..12)
            .map(|x| (0..12).map(|y| a.values[y] * b.values[g.sub_index(x, y)]).sum())
            .collect();
        let conv = GridFunction::new(g, conv).unwrap();
        let lhs = fourier(&conv).unwrap();
        let (fa, fb) = (fourier(&a).unwrap(), fourier(&b).unwrap());
        let rhs: Vec<Complex64> = fa.values.iter().zip(&fb.values).map(|(p, q)| p * q).collect();
        assert!(max_diff(&lhs.values, &rhs) < 1e-11);
    }

    #[test]
    fn partial_fourier_1_of_tensor_factorizes() {
        let x = GroupGrid::finite_cyclic(4).unwrap();
        let xi = dual_grid(&x).unwrap();
        let gamma = GridFunction::new(x.clone(), random_values(4, 7)).unwrap();
        let psi = GridFunction::new(xi.clone(), random_values(4, 8)).unwrap();
        let g = PhaseFunction::tensor(&gamma, &psi);
        let f1 = partial_fourier_1(&g).unwrap();
        let gamma_hat = fourier(&gamma).unwrap();
        for eta in 0..4 {
            for k in 0..4 {
                assert!((f1.get(eta, k) - gamma_hat.values[eta] * psi.values[k]).norm() < 1e-14);
            }
        }
        let zero = PhaseFunction::zeros(x, xi);
        assert!(partial_fourier_1(&zero).unwrap().values.iter().all(|v| *v == ZERO));
    }

    #[test]
    fn partial_fourier_1_round_trip() {
        let x = GroupGrid::finite_cyclic(4).unwrap();
        let xi = dual_grid(&x).unwrap();
        let g = PhaseFunction::new(x, xi, random_values(16, 10)).unwrap();
        let back = partial_fourier_1_inverse(&partial_fourier_1(&g).unwrap()).unwrap();
        assert!(max_diff(&back.values, &g.values) < 1e-12);
        assert_eq!(back.first, g.first);
    }

    #[test]
    fn kernel_of_constant_symbol_is_delta() {
        let x = GroupGrid::finite_cyclic(8).unwrap();
        let xi = dual_grid(&x).unwrap();
        let f = PhaseFunction::from_fn(x.clone(), xi.clone(), |_, _| c(1.0, 0.0));
        let k = partial_fourier_2_inverse(&f).unwrap();
        // Σ_ξ ŵ ξ(z) = δ_{z,0} · (ŵ · N) = δ_{z,0} / w_x.
        for i in 0..8 {
            for z in 0..8 {
                let expected = if z == 0 { 1.0 } else { 0.0 };
                assert!((k.get(i, z) - c(expected, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn kernel_of_tensor_and_dense_oracle() {
        let x = GroupGrid::finite_cyclic(8).unwrap();
        let xi = dual_grid(&x).unwrap();
        let gamma = GridFunction::new(x.clone(), random_values(8, 11)).unwrap();
        let psi = GridFunction::new(xi.clone(), random_values(8, 12)).unwrap();
        let f = PhaseFunction::tensor(&gamma, &psi);
        let k = partial_fourier_2_inverse(&f).unwrap();
        let psi_check = inverse_fourier(&psi).unwrap();
        for i in 0..8 {
            for z in 0..8 {
                assert!((k.get(i, z) - gamma.values[i] * psi_check.values[z]).norm() < 1e-13);
            }
        }
        let f = PhaseFunction::new(x.clone(), xi.clone(), random_values(64, 13)).unwrap();
        let k = partial_fourier_2_inverse(&f).unwrap();
        for i in 0..8 {
            for z in 0..8 {
                let oracle: Complex64 = (0..8)
                    .map(|e| xi.weight() * pairing(&x, z, &xi, e).unwrap() * f.get(i, e))
                    .sum();
                assert!((k.get(i, z) - oracle).norm() < 1e-12);
            }
        }
        let back = partial_fourier_2(&k, &xi).unwrap();
        assert!(max_diff(&back.values, &f.values) < 1e-12);
    }
}
