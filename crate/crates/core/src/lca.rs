//! Discretized locally compact Abelian groups, their duals and Haar weights.
//!
//! A [`GroupGrid`] is a finite product of one-dimensional [`Axis`] factors.
//! Every factor pairs with its dual through a character of the form
//!
//! ```text
//! χ(j, k) = exp(2πi (j + a)(k + b) / M)
//! ```
//!
//! where `j`, `k` are point indices, `a`, `b` the index offsets of the two
//! axes and `M` the transform length of the pair. With the coordinate
//! conventions below this is `e^{2πi x ξ}` (or `e^{2πi x ξ / N}` on `Z_N`).
//! Phases are reduced modulo `M` in integer arithmetic before the complex
//! exponential is taken, so the bicharacter laws hold to round-off.
//!
//! Haar weights are correlated: `w · ŵ · M = 1` for every dual pair.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Serializable group descriptor, `{"kind": "...", ...}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GroupKind {
    /// `Z_N` with constant point weight (counting measure by default).
    FiniteCyclic {
        order: usize,
        #[serde(default = "unit_weight")]
        weight: f64,
    },
    /// The circle `R/Z` sampled at `x_j = j / samples`, weight `1/samples`.
    Torus { samples: usize },
    /// Frequencies `-band ..= band - 1` of `Z`, counting measure.
    IntegersTruncated { band: usize },
    /// `x_j = (j - n/2) * step` for `n = extent / step` points, weight `step`.
    RealLine { step: f64, extent: f64 },
    Product { factors: Vec<GroupKind> },
}

fn unit_weight() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AxisKind {
    Cyclic { order: usize },
    Torus { samples: usize },
    Integers { band: usize },
    RealLine { step: f64, extent: f64 },
}

/// One-dimensional factor of a grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub kind: AxisKind,
    pub len: usize,
    pub weight: f64,
}

impl Axis {
    fn from_kind(kind: &GroupKind) -> Result<Axis> {
        match *kind {
            GroupKind::FiniteCyclic { order, weight } => {
                if order == 0 {
                    return Err(Error::InvalidGroup("finite cyclic group of order 0".into()));
                }
                if !(weight > 0.0 && weight.is_finite()) {
                    return Err(Error::InvalidGroup(format!(
                        "haar weight must be positive, got {weight}"
                    )));
                }
                Ok(Axis { kind: AxisKind::Cyclic { order }, len: order, weight })
            }
            GroupKind::Torus { samples } => {
                if samples == 0 {
                    return Err(Error::InvalidGroup("torus with 0 samples".into()));
                }
                Ok(Axis {
                    kind: AxisKind::Torus { samples },
                    len: samples,
                    weight: 1.0 / samples as f64,
                })
            }
            GroupKind::IntegersTruncated { band } => {
                if band == 0 {
                    return Err(Error::InvalidGroup("truncated integers with band 0".into()));
                }
                Ok(Axis { kind: AxisKind::Integers { band }, len: 2 * band, weight: 1.0 })
            }
            GroupKind::RealLine { step, extent } => {
                let n = real_line_points(step, extent)?;
                Ok(Axis { kind: AxisKind::RealLine { step, extent }, len: n, weight: step })
            }
            GroupKind::Product { .. } => unreachable!("products are flattened by the caller"),
        }
    }

    pub fn descriptor(&self) -> GroupKind {
        match self.kind {
            AxisKind::Cyclic { order } => GroupKind::FiniteCyclic { order, weight: self.weight },
            AxisKind::Torus { samples } => GroupKind::Torus { samples },
            AxisKind::Integers { band } => GroupKind::IntegersTruncated { band },
            AxisKind::RealLine { step, extent } => GroupKind::RealLine { step, extent },
        }
    }

    /// Integer offset `a` such that point `j` carries the integer label `j + a`.
    pub fn index_offset(&self) -> i64 {
        match self.kind {
            AxisKind::Cyclic { .. } | AxisKind::Torus { .. } => 0,
            AxisKind::Integers { band } => -(band as i64),
            AxisKind::RealLine { .. } => -((self.len / 2) as i64),
        }
    }

    pub fn coordinate(&self, j: usize) -> f64 {
        let label = j as i64 + self.index_offset();
        match self.kind {
            AxisKind::Cyclic { .. } | AxisKind::Integers { .. } => label as f64,
            AxisKind::Torus { samples } => label as f64 / samples as f64,
            AxisKind::RealLine { step, .. } => label as f64 * step,
        }
    }

    pub fn is_compact(&self) -> bool {
        matches!(self.kind, AxisKind::Cyclic { .. } | AxisKind::Torus { .. })
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.kind, AxisKind::Cyclic { .. } | AxisKind::Integers { .. })
    }

    pub fn dual(&self) -> Result<Axis> {
        let kind = match self.kind {
            AxisKind::Cyclic { order } => GroupKind::FiniteCyclic {
                order,
                weight: 1.0 / (order as f64 * self.weight),
            },
            AxisKind::Torus { samples } => {
                if samples % 2 != 0 {
                    return Err(Error::InvalidGroup(format!(
                        "torus with odd sample count {samples} has no symmetric dual band"
                    )));
                }
                GroupKind::IntegersTruncated { band: samples / 2 }
            }
            AxisKind::Integers { band } => GroupKind::Torus { samples: 2 * band },
            AxisKind::RealLine { step, extent } => {
                GroupKind::RealLine { step: 1.0 / extent, extent: 1.0 / step }
            }
        };
        Axis::from_kind(&kind)
    }

    /// Transform length `M` of the pair `(self, dual)`, or an error when the
    /// two axes do not pair.
    pub fn pair_length(&self, dual: &Axis) -> Result<usize> {
        let mismatch = || {
            Error::GridMismatch(format!("{:?} does not pair with {:?}", self.kind, dual.kind))
        };
        match (self.kind, dual.kind) {
            (AxisKind::Cyclic { order: n }, AxisKind::Cyclic { order: m }) => {
                if n != m || !close(self.weight * dual.weight * n as f64, 1.0) {
                    return Err(mismatch());
                }
                Ok(n)
            }
            (AxisKind::Torus { samples }, AxisKind::Integers { band })
            | (AxisKind::Integers { band }, AxisKind::Torus { samples }) => {
                if 2 * band > samples {
                    return Err(Error::BandViolation(format!(
                        "band {band} exceeds Nyquist limit of {samples} samples"
                    )));
                }
                Ok(samples)
            }
            (AxisKind::RealLine { step, extent }, AxisKind::RealLine { step: s2, extent: e2 }) => {
                if self.len != dual.len || !close(step * e2, 1.0) || !close(s2 * extent, 1.0) {
                    return Err(mismatch());
                }
                Ok(self.len)
            }
            _ => Err(mismatch()),
        }
    }

    /// `x_i · x_j^{-1}` on index labels, wrapping modulo the axis length.
    pub fn sub_index(&self, i: usize, j: usize) -> usize {
        let n = self.len as i64;
        let a = self.index_offset();
        // label(i) - label(j) = i - j; its index is (i - j) - a.
        ((i as i64 - j as i64 - a).rem_euclid(n)) as usize
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn real_line_points(step: f64, extent: f64) -> Result<usize> {
    if !(step > 0.0 && extent > 0.0 && step.is_finite() && extent.is_finite()) {
        return Err(Error::InvalidGroup(format!(
            "real line grid needs positive step and extent, got step={step}, extent={extent}"
        )));
    }
    let ratio = extent / step;
    let n = ratio.round();
    if n < 1.0 || (ratio - n).abs() > 1e-9 * n.max(1.0) {
        return Err(Error::InvalidGroup(format!(
            "extent {extent} is not an integer multiple of step {step}"
        )));
    }
    Ok(n as usize)
}

/// A discretized LCA group: product of axes, lexicographic point indexing.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupGrid {
    kind: GroupKind,
    axes: Vec<Axis>,
}

impl GroupGrid {
    pub fn new(kind: GroupKind) -> Result<GroupGrid> {
        let mut axes = Vec::new();
        flatten_axes(&kind, &mut axes)?;
        Ok(GroupGrid { kind, axes })
    }

    pub fn finite_cyclic(order: usize) -> Result<GroupGrid> {
        GroupGrid::new(GroupKind::FiniteCyclic { order, weight: 1.0 })
    }

    pub fn torus(samples: usize) -> Result<GroupGrid> {
        GroupGrid::new(GroupKind::Torus { samples })
    }

    pub fn integers(band: usize) -> Result<GroupGrid> {
        GroupGrid::new(GroupKind::IntegersTruncated { band })
    }

    pub fn real_line(step: f64, extent: f64) -> Result<GroupGrid> {
        GroupGrid::new(GroupKind::RealLine { step, extent })
    }

    /// `Torus(oversample * band)` paired with `IntegersTruncated(band)`.
    pub fn torus_pair(band: usize, oversample: usize) -> Result<(GroupGrid, GroupGrid)> {
        if oversample < 2 {
            return Err(Error::BandViolation(format!(
                "oversampling factor {oversample} is below the Nyquist factor 2"
            )));
        }
        Ok((GroupGrid::torus(oversample * band)?, GroupGrid::integers(band)?))
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.len).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Haar weight of every point (all supported grids are uniform).
    pub fn weight(&self) -> f64 {
        self.axes.iter().map(|a| a.weight).product()
    }

    pub fn haar_weight(&self, _index: usize) -> f64 {
        self.weight()
    }

    pub fn total_mass(&self) -> f64 {
        self.weight() * self.len() as f64
    }

    pub fn is_compact(&self) -> bool {
        self.axes.iter().all(Axis::is_compact)
    }

    pub fn is_discrete(&self) -> bool {
        self.axes.iter().all(Axis::is_discrete)
    }

    pub fn is_finite_group(&self) -> bool {
        self.axes.iter().all(|a| matches!(a.kind, AxisKind::Cyclic { .. }))
    }

    /// Per-axis indices of a flat point index.
    pub fn unravel(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.axes.len()];
        for (slot, axis) in out.iter_mut().zip(&self.axes).rev() {
            *slot = index % axis.len;
            index /= axis.len;
        }
        out
    }

    pub fn ravel(&self, indices: &[usize]) -> usize {
        indices.iter().zip(&self.axes).fold(0, |acc, (&i, a)| acc * a.len + i)
    }

    pub fn coords_into(&self, index: usize, out: &mut [f64]) {
        let mut rest = index;
        for (slot, axis) in out.iter_mut().zip(&self.axes).rev() {
            *slot = axis.coordinate(rest % axis.len);
            rest /= axis.len;
        }
    }

    pub fn coords(&self, index: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.coords_into(index, &mut out);
        out
    }

    /// Flat index of `x · y^{-1}`.
    pub fn sub_index(&self, x: usize, y: usize) -> usize {
        let xs = self.unravel(x);
        let ys = self.unravel(y);
        let diff: Vec<usize> =
            self.axes.iter().zip(xs.iter().zip(&ys)).map(|(a, (&i, &j))| a.sub_index(i, j)).collect();
        self.ravel(&diff)
    }

    /// Flat index of the identity element (label 0 on every axis).
    pub fn identity_index(&self) -> usize {
        let idx: Vec<usize> = self
            .axes
            .iter()
            .map(|a| ((-a.index_offset()).rem_euclid(a.len as i64)) as usize)
            .collect();
        self.ravel(&idx)
    }

    /// Per-axis transform lengths when `dual` is paired with `self`.
    pub fn pair_lengths(&self, dual: &GroupGrid) -> Result<Vec<usize>> {
        if self.dim() != dual.dim() {
            return Err(Error::GridMismatch(format!(
                "grid of dimension {} cannot pair with grid of dimension {}",
                self.dim(),
                dual.dim()
            )));
        }
        self.axes.iter().zip(&dual.axes).map(|(a, b)| a.pair_length(b)).collect()
    }
}

fn flatten_axes(kind: &GroupKind, out: &mut Vec<Axis>) -> Result<()> {
    match kind {
        GroupKind::Product { factors } => {
            if factors.is_empty() {
                return Err(Error::InvalidGroup("empty product".into()));
            }
            for f in factors {
                flatten_axes(f, out)?;
            }
            Ok(())
        }
        other => {
            out.push(Axis::from_kind(other)?);
            Ok(())
        }
    }
}

/// Pontryagin dual grid with correlated Haar weights.
pub fn dual_grid(grid: &GroupGrid) -> Result<GroupGrid> {
    let kind = dual_kind(grid.kind())?;
    GroupGrid::new(kind)
}

fn dual_kind(kind: &GroupKind) -> Result<GroupKind> {
    match kind {
        GroupKind::Product { factors } => Ok(GroupKind::Product {
            factors: factors.iter().map(dual_kind).collect::<Result<_>>()?,
        }),
        other => Ok(Axis::from_kind(other)?.dual()?.descriptor()),
    }
}

/// Cartesian product with lexicographic indexing; a singleton list is returned unchanged.
pub fn product_group(factors: &[GroupGrid]) -> Result<GroupGrid> {
    match factors {
        [] => Err(Error::InvalidGroup("empty product".into())),
        [single] => Ok(single.clone()),
        many => GroupGrid::new(GroupKind::Product {
            factors: many.iter().map(|g| g.kind().clone()).collect(),
        }),
    }
}

/// Unit complex number `exp(2πi q / m)` for an already reduced integer phase.
#[inline]
pub(crate) fn root_of_unity(q: i64, m: usize) -> Complex64 {
    let theta = 2.0 * PI * (q as f64) / (m as f64);
    Complex64::new(theta.cos(), theta.sin())
}

/// Character value `ξ(x)` for point `x` of `xgrid` and `ξ` of `xigrid`.
pub fn pairing(xgrid: &GroupGrid, x: usize, xigrid: &GroupGrid, xi: usize) -> Result<Complex64> {
    let lengths = xgrid.pair_lengths(xigrid)?;
    if x >= xgrid.len() || xi >= xigrid.len() {
        return Err(Error::InvalidArgument(format!(
            "point index out of range: x={x} (of {}), xi={xi} (of {})",
            xgrid.len(),
            xigrid.len()
        )));
    }
    let xs = xgrid.unravel(x);
    let ks = xigrid.unravel(xi);
    let mut value = Complex64::new(1.0, 0.0);
    for (((pa, da), m), (j, k)) in
        xgrid.axes.iter().zip(&xigrid.axes).zip(lengths).zip(xs.into_iter().zip(ks))
    {
        let q = axis_phase(pa, j, da, k, m);
        value *= root_of_unity(q, m);
    }
    Ok(value)
}

/// Reduced integer phase `(j + a)(k + b) mod m`.
#[inline]
pub(crate) fn axis_phase(p: &Axis, j: usize, d: &Axis, k: usize, m: usize) -> i64 {
    let lj = j as i64 + p.index_offset();
    let lk = k as i64 + d.index_offset();
    ((lj as i128 * lk as i128).rem_euclid(m as i128)) as i64
}

/// Complex-valued function on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub grid: GroupGrid,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: GroupGrid, values: Vec<Complex64>) -> Result<GridFunction> {
        if values.len() != grid.len() {
            return Err(Error::Dimension { expected: grid.len(), got: values.len() });
        }
        Ok(GridFunction { grid, values })
    }

    pub fn zeros(grid: GroupGrid) -> GridFunction {
        let n = grid.len();
        GridFunction { grid, values: vec![Complex64::new(0.0, 0.0); n] }
    }

    pub fn from_fn(grid: GroupGrid, f: impl Fn(&[f64]) -> Complex64) -> GridFunction {
        let mut buf = vec![0.0; grid.dim()];
        let values = (0..grid.len())
            .map(|i| {
                grid.coords_into(i, &mut buf);
                f(&buf)
            })
            .collect();
        GridFunction { grid, values }
    }

    /// `Σ w |u|²`.
    pub fn norm2_squared(&self) -> f64 {
        self.grid.weight() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn norm2(&self) -> f64 {
        self.norm2_squared().sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn pairing_on_z4() {
        let g = GroupGrid::finite_cyclic(4).unwrap();
        let d = dual_grid(&g).unwrap();
        assert!(approx(pairing(&g, 1, &d, 1).unwrap(), Complex64::i()));
        for k in 0..4 {
            assert_eq!(pairing(&g, 0, &d, k).unwrap(), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn pairing_torus_with_integers() {
        let x = GroupGrid::torus(8).unwrap();
        let xi = GroupGrid::integers(4).unwrap();
        // x = 0.25 is index 2; ξ = 2 is index 2 + band.
        assert_eq!(x.coords(2), vec![0.25]);
        assert_eq!(xi.coords(6), vec![2.0]);
        assert!(approx(pairing(&x, 2, &xi, 6).unwrap(), Complex64::new(-1.0, 0.0)));
    }

    #[test]
    fn pairing_rejects_unpaired_grids() {
        let a = GroupGrid::finite_cyclic(4).unwrap();
        let b = GroupGrid::finite_cyclic(8).unwrap();
        assert!(matches!(pairing(&a, 0, &b, 0), Err(Error::GridMismatch(_))));
        let t = GroupGrid::torus(8).unwrap();
        let wide = GroupGrid::integers(8).unwrap();
        assert!(matches!(pairing(&t, 0, &wide, 0), Err(Error::BandViolation(_))));
    }

    #[test]
    fn bicharacter_laws_on_product() {
        let g = product_group(&[GroupGrid::finite_cyclic(6).unwrap(), GroupGrid::torus(8).unwrap()])
            .unwrap();
        let d = dual_grid(&g).unwrap();
        for x in 0..g.len() {
            for y in 0..g.len() {
                let xy = {
                    // x·y = x·(y^{-1})^{-1}
                    let inv_y = g.sub_index(g.identity_index(), y);
                    g.sub_index(x, inv_y)
                };
                for k in (0..d.len()).step_by(5) {
                    let lhs = pairing(&g, xy, &d, k).unwrap();
                    let rhs = pairing(&g, x, &d, k).unwrap() * pairing(&g, y, &d, k).unwrap();
                    assert!(approx(lhs, rhs));
                    assert!((lhs.norm() - 1.0).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn dual_examples() {
        let z8 = GroupGrid::finite_cyclic(8).unwrap();
        let d = dual_grid(&z8).unwrap();
        assert_eq!(d.kind(), &GroupKind::FiniteCyclic { order: 8, weight: 0.125 });

        let t = GroupGrid::torus(256).unwrap();
        assert_eq!(dual_grid(&t).unwrap().kind(), &GroupKind::IntegersTruncated { band: 128 });

        let z4 = GroupGrid::finite_cyclic(4).unwrap();
        let p = product_group(&[z4.clone(), z4]).unwrap();
        let dp = dual_grid(&p).unwrap();
        assert_eq!(dp.axes().len(), 2);
        assert!(dp.axes().iter().all(|a| a.kind == AxisKind::Cyclic { order: 4 }));
    }

    #[test]
    fn dual_is_involutive() {
        let kinds = vec![
            GroupKind::FiniteCyclic { order: 8, weight: 1.0 },
            GroupKind::Torus { samples: 64 },
            GroupKind::IntegersTruncated { band: 16 },
            GroupKind::RealLine { step: 0.125, extent: 16.0 },
            GroupKind::Product {
                factors: vec![
                    GroupKind::Torus { samples: 8 },
                    GroupKind::RealLine { step: 0.5, extent: 8.0 },
                ],
            },
        ];
        for kind in kinds {
            let g = GroupGrid::new(kind.clone()).unwrap();
            let dd = dual_grid(&dual_grid(&g).unwrap()).unwrap();
            assert_eq!(dd.kind(), &kind);
            assert_eq!(dd.len(), g.len());
        }
    }

    #[test]
    fn real_line_rejects_incommensurate_extent() {
        assert!(GroupGrid::real_line(0.3, 1.0).is_err());
        assert!(GroupGrid::real_line(-1.0, 1.0).is_err());
    }

    #[test]
    fn odd_torus_has_no_dual() {
        assert!(dual_grid(&GroupGrid::torus(7).unwrap()).is_err());
    }

    #[test]
    fn product_weights_and_mass() {
        let z2 = GroupGrid::finite_cyclic(2).unwrap();
        let p = product_group(&[z2.clone(), z2]).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.weight(), 1.0);

        let t4 = GroupGrid::torus(4).unwrap();
        let p = product_group(&[t4.clone(), t4]).unwrap();
        assert_eq!(p.len(), 16);
        assert_eq!(p.weight(), 1.0 / 16.0);

        let z3 = GroupGrid::finite_cyclic(3).unwrap();
        assert_eq!(product_group(&[z3.clone()]).unwrap(), z3);
        assert!(product_group(&[]).is_err());

        assert!((GroupGrid::torus(100).unwrap().total_mass() - 1.0).abs() < 1e-12);
        assert_eq!(GroupGrid::finite_cyclic(12).unwrap().total_mass(), 12.0);
    }

    #[test]
    fn cyclic_arithmetic_is_mod_n() {
        let g = GroupGrid::finite_cyclic(5).unwrap();
        assert_eq!(g.sub_index(1, 3), 3);
        assert_eq!(g.identity_index(), 0);
        let r = GroupGrid::real_line(0.5, 4.0).unwrap();
        assert_eq!(r.coords(r.identity_index()), vec![0.0]);
        assert_eq!(r.coords(r.sub_index(6, 5)), vec![0.5]);
    }

    #[test]
    fn descriptor_json_roundtrip() {
        let json = r#"{"kind":"product","factors":[{"kind":"finite-cyclic","order":4},{"kind":"torus","samples":16}]}"#;
        let kind: GroupKind = serde_json::from_str(json).unwrap();
        let g = GroupGrid::new(kind.clone()).unwrap();
        assert_eq!(g.len(), 64);
        let back: GroupKind = serde_json::from_str(&serde_json::to_string(&kind).unwrap()).unwrap();
        assert_eq!(back, kind);
    }
}
