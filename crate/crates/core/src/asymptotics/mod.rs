//! Upper limits along filter bases at infinity of the dual, cluster sets of
//! symbol values, and the corresponding Gohberg-type right-hand sides.

pub mod base;
pub mod fit;
pub mod sampling;

use std::collections::BTreeSet;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use base::{DfullFamily, FilterBase};
pub use fit::{fit_fixed, fit_free, monotone_envelope, PowerFit};
pub use sampling::{QuasiRandom, SampleSpace};

use crate::error::{Error, Result};
use crate::symbols::{Symbol, ThickeningSet};

/// Sampling plan for asymptotic functionals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AsymptoticSchedule {
    /// Increasing scales `t₁ < … < t_m`.
    pub scales: Vec<f64>,
    /// Quasi-random points per scale.
    pub samples: usize,
    /// Radii are drawn from `[t, window·t]`.
    pub window: f64,
    /// Best samples polished by a pattern search.
    pub refine: usize,
    /// Cap on x-grid points visited (strided).
    pub max_x_points: usize,
    pub seed: u64,
}

impl Default for AsymptoticSchedule {
    fn default() -> Self {
        AsymptoticSchedule {
            scales: vec![1e2, 1e3, 1e4, 1e5, 1e6],
            samples: 10_000,
            window: 100.0,
            refine: 16,
            max_x_points: 256,
            seed: 0,
        }
    }
}

impl AsymptoticSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.scales.is_empty() {
            return Err(Error::InvalidArgument("asymptotic schedule has no scales".into()));
        }
        if self.scales.windows(2).any(|w| !(w[1] > w[0])) || !(self.scales[0] > 0.0) {
            return Err(Error::InvalidArgument("scales must be positive and increasing".into()));
        }
        if self.samples == 0 || !(self.window > 1.0) {
            return Err(Error::InvalidArgument("need samples > 0 and window > 1".into()));
        }
        Ok(())
    }

    fn scale_seed(&self, k: usize) -> u64 {
        self.seed ^ (k as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
    }
}

/// Result of an upper (or lower) limit along a base.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimsupReport {
    pub value: f64,
    pub scales: Vec<f64>,
    /// Sampled sup (inf for lower limits) at each scale.
    pub per_scale: Vec<f64>,
    pub envelope: Vec<f64>,
    pub fit: PowerFit,
}

type RealPhi<'a> = dyn Fn(&[f64]) -> f64 + Sync + 'a;

fn pattern_search(
    phi: &RealPhi<'_>,
    base: &FilterBase,
    t: f64,
    space: &SampleSpace,
    start: &[f64],
    start_value: f64,
) -> f64 {
    let mut x = start.to_vec();
    let mut best = start_value;
    let scale = sampling::euclid(&x).max(1.0);
    let mut h = 1e-3 * scale;
    let lattice = space.is_lattice();
    if lattice {
        h = h.round().max(1.0);
    }
    for _ in 0..200 {
        let mut improved = false;
        for j in 0..x.len() {
            for sgn in [1.0, -1.0] {
                let mut y = x.clone();
                y[j] += sgn * h;
                space.snap(&mut y);
                if !base.contains(t, &y) {
                    continue;
                }
                let v = phi(&y);
                if v > best {
                    best = v;
                    x = y;
                    improved = true;
                }
            }
        }
        if !improved {
            if lattice {
                if h <= 1.0 {
                    break;
                }
                h = (h / 2.0).floor().max(1.0);
            } else {
                h /= 2.0;
                if h < 1e-12 * scale {
                    break;
                }
            }
        }
    }
    best
}

/// Sampled supremum of `phi` over the member set at scale `t`.
fn sampled_sup(
    phi: &RealPhi<'_>,
    base: &FilterBase,
    t: f64,
    space: &SampleSpace,
    sched: &AsymptoticSchedule,
    seed: u64,
) -> Result<f64> {
    let pts = base.sample(t, sched.samples, sched.window, space, seed)?;
    let vals: Vec<f64> = pts.par_iter().map(|p| phi(p)).collect();
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    let refined: Vec<f64> = order
        .iter()
        .take(sched.refine)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&&i| pattern_search(phi, base, t, space, &pts[i], vals[i]))
        .collect();
    Ok(refined.into_iter().chain(vals.iter().copied()).fold(f64::NEG_INFINITY, f64::max))
}

/// Upper limit of `phi` along `base`: per-scale sampled sups, their
/// non-increasing envelope, and the limit of an `a + b·t^{-1/2}` fit.
pub fn limsup_along(
    phi: &RealPhi<'_>,
    base: &FilterBase,
    space: &SampleSpace,
    sched: &AsymptoticSchedule,
) -> Result<LimsupReport> {
    sched.validate()?;
    base.validate(space)?;
    let mut per_scale = Vec::with_capacity(sched.scales.len());
    for (k, &t) in sched.scales.iter().enumerate() {
        per_scale.push(sampled_sup(phi, base, t, space, sched, sched.scale_seed(k))?);
    }
    let envelope = monotone_envelope(&per_scale);
    let fit = fit_fixed(&sched.scales, &envelope, 0.5);
    let last = *envelope.last().unwrap_or(&0.0);
    let mut value = fit.a.min(last);
    if per_scale.iter().all(|v| *v >= 0.0) {
        value = value.max(0.0);
    }
    Ok(LimsupReport { value, scales: sched.scales.clone(), per_scale, envelope, fit })
}

/// Lower limit, computed as `-limsup(-phi)`.
pub fn liminf_along(
    phi: &RealPhi<'_>,
    base: &FilterBase,
    space: &SampleSpace,
    sched: &AsymptoticSchedule,
) -> Result<LimsupReport> {
    let neg = |xi: &[f64]| -phi(xi);
    let r = limsup_along(&neg, base, space, sched)?;
    Ok(LimsupReport {
        value: -r.value,
        scales: r.scales,
        per_scale: r.per_scale.iter().map(|v| -v).collect(),
        envelope: r.envelope.iter().map(|v| -v).collect(),
        fit: PowerFit { a: -r.fit.a, b: -r.fit.b, p: r.fit.p, residual: r.fit.residual },
    })
}

/// `limsup |f|` along `X × B`.
pub fn gohberg_rhs(f: &Symbol, base: &FilterBase, sched: &AsymptoticSchedule) -> Result<LimsupReport> {
    let func = f.closure()?.clone();
    let space = SampleSpace::of_dual(f.xigrid())?;
    let xs = f.x_sample(sched.max_x_points);
    let phi = move |xi: &[f64]| xs.iter().map(|x| func(x, xi).norm()).fold(0.0, f64::max);
    limsup_along(&phi, base, &space, sched)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinFormReport {
    pub value: f64,
    /// Set when the position space is not compact; the value is then 0.
    pub noncompact: bool,
    pub argmin_x: Option<Vec<f64>>,
}

/// `min_x limsup_{ξ→∞} |f(x, ξ)|` over the standard base.
pub fn gohberg_rhs_standard_minform(f: &Symbol, sched: &AsymptoticSchedule) -> Result<MinFormReport> {
    let func = f.closure()?.clone();
    if !f.xgrid().is_compact() {
        return Ok(MinFormReport { value: 0.0, noncompact: true, argmin_x: None });
    }
    let space = SampleSpace::of_dual(f.xigrid())?;
    let xs = f.x_sample(sched.max_x_points);
    let per_x: Vec<f64> = xs
        .par_iter()
        .map(|x| {
            let phi = |xi: &[f64]| func(x, xi).norm();
            limsup_along(&phi, &FilterBase::Standard, &space, sched).map(|r| r.value)
        })
        .collect::<Result<_>>()?;
    let (i, v) = per_x
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if *v < acc.1 { (i, *v) } else { acc });
    Ok(MinFormReport { value: v, noncompact: false, argmin_x: Some(xs[i].clone()) })
}

/// `min_x liminf_{ξ→∞} |f(x, ξ)|` over the standard base, with its argmin.
pub fn min_liminf_abs(f: &Symbol, sched: &AsymptoticSchedule) -> Result<(f64, Vec<f64>)> {
    let func = f.closure()?.clone();
    let space = SampleSpace::of_dual(f.xigrid())?;
    let xs = f.x_sample(sched.max_x_points);
    let per_x: Vec<f64> = xs
        .par_iter()
        .map(|x| {
            let phi = |xi: &[f64]| func(x, xi).norm();
            liminf_along(&phi, &FilterBase::Standard, &space, sched).map(|r| r.value.max(0.0))
        })
        .collect::<Result<_>>()?;
    let (i, v) = per_x
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if *v < acc.1 { (i, *v) } else { acc });
    Ok((v, xs[i].clone()))
}

/// Rasterized approximation of the set of asymptotic values of a symbol.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterSet {
    pub epsilon: f64,
    /// Integer cell coordinates; cell `(i, j)` is `[iε, (i+1)ε) × [jε, (j+1)ε)`.
    pub cells: BTreeSet<(i64, i64)>,
}

impl ClusterSet {
    pub fn cell_of(&self, z: Complex64) -> (i64, i64) {
        ((z.re / self.epsilon).floor() as i64, (z.im / self.epsilon).floor() as i64)
    }

    pub fn center(&self, cell: (i64, i64)) -> Complex64 {
        Complex64::new((cell.0 as f64 + 0.5) * self.epsilon, (cell.1 as f64 + 0.5) * self.epsilon)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.cells.contains(&self.cell_of(z))
    }

    /// Distance from `z` to the nearest cell center.
    pub fn distance(&self, z: Complex64) -> f64 {
        self.cells.iter().map(|&c| (self.center(c) - z).norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.cells.iter().map(|&c| self.center(c).norm()).fold(0.0, f64::max)
    }

    pub fn dilate(&self) -> ClusterSet {
        ClusterSet { epsilon: self.epsilon, cells: dilate(&self.cells) }
    }

    /// Real-axis extent `[min, max]` of the cell centers.
    pub fn real_range(&self) -> Option<(f64, f64)> {
        let re: Vec<f64> = self.cells.iter().map(|&c| self.center(c).re).collect();
        if re.is_empty() {
            return None;
        }
        Some((re.iter().copied().fold(f64::INFINITY, f64::min), re.iter().copied().fold(f64::NEG_INFINITY, f64::max)))
    }
}

fn dilate(cells: &BTreeSet<(i64, i64)>) -> BTreeSet<(i64, i64)> {
    let mut out = BTreeSet::new();
    for &(i, j) in cells {
        for di in -1..=1 {
            for dj in -1..=1 {
                out.insert((i + di, j + dj));
            }
        }
    }
    out
}

/// Cells of resolution `epsilon` hit by `f(x, ξ)`, `ξ` in the member set, at
/// every scale (after a one-cell dilation). For non-compact `X` the cell of 0
/// is always included.
pub fn cluster_set(
    f: &Symbol,
    base: &FilterBase,
    epsilon: f64,
    sched: &AsymptoticSchedule,
) -> Result<ClusterSet> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("cluster-set resolution must be positive".into()));
    }
    sched.validate()?;
    let func = f.closure()?.clone();
    let space = SampleSpace::of_dual(f.xigrid())?;
    let xs = f.x_sample(sched.max_x_points);
    let cell = |z: Complex64| ((z.re / epsilon).floor() as i64, (z.im / epsilon).floor() as i64);
    let mut acc: Option<BTreeSet<(i64, i64)>> = None;
    for (k, &t) in sched.scales.iter().enumerate() {
        let pts = base.sample(t, sched.samples, sched.window, &space, sched.scale_seed(k))?;
        let hit: BTreeSet<(i64, i64)> = pts
            .par_iter()
            .map(|xi| xs.iter().map(|x| cell(func(x, xi))).collect::<BTreeSet<_>>())
            .reduce(BTreeSet::new, |mut a, b| {
                a.extend(b);
                a
            });
        let hit = dilate(&hit);
        acc = Some(match acc {
            None => hit,
            Some(prev) => prev.intersection(&hit).copied().collect(),
        });
    }
    let mut cells = acc.unwrap_or_default();
    if !f.xgrid().is_compact() {
        cells.insert((0, 0));
        cells.insert(cell(Complex64::new(0.0, 0.0)));
    }
    Ok(ClusterSet { epsilon, cells })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityReport {
    pub scale: f64,
    pub radii: Vec<f64>,
    pub ratios: Vec<f64>,
    pub threshold: f64,
    pub full: bool,
}

/// Density ratios `|A_t ∩ [-n, n]| / 2n` of a one-dimensional family on the
/// supplied radii; full when the last ratio reaches `1 - 1/t`.
pub fn dfull_density_check(family: &DfullFamily, t: f64, radii: &[f64], step: f64) -> Result<DensityReport> {
    if radii.is_empty() || !(step > 0.0) {
        return Err(Error::InvalidArgument("density check needs radii and a positive step".into()));
    }
    let ratios: Vec<f64> = radii
        .iter()
        .map(|&n| {
            let m = (n / step).floor() as i64;
            let hits = (-m..m).filter(|&j| family.contains(t, &[(j as f64 + 0.5) * step])).count();
            hits as f64 / (2 * m).max(1) as f64
        })
        .collect();
    let threshold = 1.0 - 1.0 / t;
    let full = *ratios.last().unwrap() >= threshold;
    Ok(DensityReport { scale: t, radii: radii.to_vec(), ratios, threshold, full })
}

/// Side of the parabola `(t, t²)` along its normal `(-2t, 1)/√(1+4t²)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalSide {
    /// `s < 0`: away from the convex hull; normal rays never meet the curve again.
    Outward,
    /// `s > 0`: into the convex hull.
    Inward,
    Both,
}

/// Sup of `phi` at normal offsets `s_hat ≤ |s| ≤ s_hat + extent` from the
/// parabola `(t, t²)`, `|t| ≤ extent`.
pub fn normal_bundle_sup(
    phi: &RealPhi<'_>,
    s_hat: f64,
    extent: f64,
    side: NormalSide,
    count: usize,
    seed: u64,
) -> f64 {
    let mut q = QuasiRandom::new(3, seed);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..count {
        let u = q.next_point();
        let t = extent * (2.0 * u[0] - 1.0);
        let mag = s_hat + extent * u[1];
        let s = match side {
            NormalSide::Outward => -mag,
            NormalSide::Inward => mag,
            NormalSide::Both => if u[2] < 0.5 { -mag } else { mag },
        };
        let p = ThickeningSet::parabola_normal_point(t, s);
        best = best.max(phi(&p));
    }
    best
}
