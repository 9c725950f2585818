use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lca::{AxisKind, GroupGrid};

/// Additive recurrence on the unit cube (R_d sequence) with a random shift.
#[derive(Clone, Debug)]
pub struct QuasiRandom {
    alpha: Vec<f64>,
    offset: Vec<f64>,
    index: u64,
}

impl QuasiRandom {
    pub fn new(dim: usize, seed: u64) -> Self {
        // Unique positive root of x^{d+1} = x + 1.
        let mut phi = 2.0f64;
        for _ in 0..64 {
            phi = (1.0 + phi).powf(1.0 / (dim as f64 + 1.0));
        }
        let alpha = (1..=dim).map(|j| (1.0 / phi.powi(j as i32)).fract()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let offset = (0..dim).map(|_| rng.random::<f64>()).collect();
        QuasiRandom { alpha, offset, index: 0 }
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn next_into(&mut self, out: &mut [f64]) {
        self.index += 1;
        let n = self.index as f64;
        for ((o, a), s) in out.iter_mut().zip(&self.alpha).zip(&self.offset) {
            *o = (s + n * a).fract();
        }
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        self.next_into(&mut v);
        v
    }
}

/// Shape of the dual space sampled at infinity: its dimension and which
/// coordinates are integer-valued.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSpace {
    pub lattice: Vec<bool>,
}

impl SampleSpace {
    pub fn continuous(dim: usize) -> Self {
        SampleSpace { lattice: vec![false; dim] }
    }

    pub fn integer(dim: usize) -> Self {
        SampleSpace { lattice: vec![true; dim] }
    }

    /// Non-compact directions of a dual grid; compact factors are rejected
    /// since they have no points at infinity.
    pub fn of_dual(grid: &GroupGrid) -> Result<Self> {
        let mut lattice = Vec::new();
        for axis in grid.axes() {
            match axis.kind {
                AxisKind::Integers { .. } => lattice.push(true),
                AxisKind::RealLine { .. } => lattice.push(false),
                AxisKind::Cyclic { .. } | AxisKind::Torus { .. } => {
                    return Err(Error::InvalidArgument(
                        "dual grid has a compact factor; it has no points at infinity".into(),
                    ))
                }
            }
        }
        Ok(SampleSpace { lattice })
    }

    pub fn dim(&self) -> usize {
        self.lattice.len()
    }

    pub fn snap(&self, xi: &mut [f64]) {
        for (v, &l) in xi.iter_mut().zip(&self.lattice) {
            if l {
                *v = v.round();
            }
        }
    }

    pub fn is_lattice(&self) -> bool {
        self.lattice.iter().any(|&l| l)
    }
}

/// Standard normal pair from two uniforms.
pub(crate) fn box_muller(u1: f64, u2: f64) -> (f64, f64) {
    let r = (-2.0 * (1.0 - u1).max(1e-300).ln()).sqrt();
    let a = std::f64::consts::TAU * u2;
    (r * a.cos(), r * a.sin())
}

/// Point on the unit sphere of `R^dim` from `unit_sphere_coords(dim)` uniforms.
pub(crate) fn sphere_point(u: &[f64], dim: usize) -> Vec<f64> {
    match dim {
        1 => vec![if u[0] < 0.5 { -1.0 } else { 1.0 }],
        2 => {
            let a = std::f64::consts::TAU * u[0];
            vec![a.cos(), a.sin()]
        }
        _ => {
            let mut v = Vec::with_capacity(dim + 1);
            for pair in u.chunks(2) {
                let (a, b) = box_muller(pair[0], pair.get(1).copied().unwrap_or(0.5));
                v.push(a);
                v.push(b);
            }
            v.truncate(dim);
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n < 1e-12 {
                let mut e = vec![0.0; dim];
                e[0] = 1.0;
                return e;
            }
            v.iter().map(|x| x / n).collect()
        }
    }
}

pub(crate) fn sphere_coords(dim: usize) -> usize {
    match dim {
        1 | 2 => 1,
        d => d + d % 2,
    }
}

pub(crate) fn euclid(xi: &[f64]) -> f64 {
    xi.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quasi_random_is_deterministic_and_in_cube() {
        let mut a = QuasiRandom::new(3, 7);
        let mut b = QuasiRandom::new(3, 7);
        for _ in 0..100 {
            let p = a.next_point();
            assert_eq!(p, b.next_point());
            assert!(p.iter().all(|v| (0.0..1.0).contains(v)));
        }
        assert_ne!(QuasiRandom::new(3, 8).next_point(), QuasiRandom::new(3, 7).next_point());
    }

    #[test]
    fn quasi_random_fills_the_interval() {
        let mut q = QuasiRandom::new(1, 0);
        let mut hits = [0usize; 10];
        for _ in 0..1000 {
            hits[(q.next_point()[0] * 10.0) as usize] += 1;
        }
        assert!(hits.iter().all(|&h| (95..=105).contains(&h)), "{hits:?}");
    }

    #[test]
    fn sphere_points_are_unit() {
        let mut q = QuasiRandom::new(sphere_coords(3), 1);
        for _ in 0..50 {
            let p = sphere_point(&q.next_point(), 3);
            assert!((euclid(&p) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sample_space_of_duals() {
        assert_eq!(
            SampleSpace::of_dual(&GroupGrid::integers(8).unwrap()).unwrap(),
            SampleSpace::integer(1)
        );
        assert!(SampleSpace::of_dual(&GroupGrid::torus(8).unwrap()).is_err());
    }
}
