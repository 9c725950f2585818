//! Sampled membership diagnostics: vanishing oscillation, gradient decay,
//! Cesàro means and a symbol-class surrogate. Verdicts are advisory.

use serde::Serialize;

use super::{DualFunction, Symbol};
use crate::asymptotics::{
    fit_free, limsup_along, monotone_envelope, AsymptoticSchedule, FilterBase, LimsupReport, PowerFit,
    SampleSpace,
};
use crate::error::{Error, Result};
use crate::fourier::partial_fourier_1;
use crate::lca::GroupGrid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug)]
pub struct OscillationOptions {
    pub shifts: Vec<Vec<f64>>,
    /// Increasing radii `R_k`.
    pub radii: Vec<f64>,
    pub tol: f64,
    pub samples: usize,
    pub window: f64,
    pub seed: u64,
    /// Largest frequency resolved by the grid; the radii must reach past it.
    pub band: Option<f64>,
    /// Sets over which the oscillation is measured; `Standard` gives `|ξ| > R`.
    pub base: FilterBase,
    pub space: SampleSpace,
}

impl Default for OscillationOptions {
    fn default() -> Self {
        OscillationOptions {
            shifts: vec![vec![1.0]],
            radii: vec![1e2, 1e3, 1e4, 1e5, 1e6],
            tol: 1e-2,
            samples: 10_000,
            window: 100.0,
            seed: 0,
            band: None,
            base: FilterBase::Standard,
            space: SampleSpace::continuous(1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OscillationProfile {
    pub shifts: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
    /// `osc[s][k]`: sampled sup of `|ψ(ξ + ζ_s) - ψ(ξ)|` over the member set at `R_k`.
    pub osc: Vec<Vec<f64>>,
    pub envelope: Vec<Vec<f64>>,
    pub fits: Vec<PowerFit>,
    /// Extrapolated oscillation at infinity per shift.
    pub limits: Vec<f64>,
    pub tol: f64,
    pub verdict: Verdict,
}

/// Oscillation profile of `ψ` and a verdict on `osc(ζ, R) → 0`.
///
/// The verdict extrapolates the monotone envelope of `osc(ζ, ·)` with an
/// `a + b·R^{-p}` fit and passes when `a ≤ tol` for every shift.
pub fn vanishing_oscillation_test(psi: &DualFunction, opts: &OscillationOptions) -> Result<OscillationProfile> {
    let r_max = *opts
        .radii
        .last()
        .ok_or_else(|| Error::InvalidArgument("oscillation test needs radii".into()))?;
    if let Some(band) = opts.band {
        if r_max < band {
            return Err(Error::InvalidArgument(format!(
                "largest radius {r_max} is below the grid band {band}"
            )));
        }
    }
    if opts.shifts.is_empty() {
        return Err(Error::InvalidArgument("oscillation test needs shifts".into()));
    }
    let sched = AsymptoticSchedule {
        scales: opts.radii.clone(),
        samples: opts.samples,
        window: opts.window,
        seed: opts.seed,
        ..Default::default()
    };
    let mut osc = Vec::new();
    let mut envelope = Vec::new();
    let mut fits = Vec::new();
    let mut limits = Vec::new();
    for zeta in &opts.shifts {
        if zeta.len() != opts.space.dim() {
            return Err(Error::InvalidArgument("shift dimension differs from the dual".into()));
        }
        let phi = |xi: &[f64]| {
            let moved: Vec<f64> = xi.iter().zip(zeta).map(|(a, b)| a + b).collect();
            (psi.eval(&moved) - psi.eval(xi)).norm()
        };
        let r: LimsupReport = limsup_along(&phi, &opts.base, &opts.space, &sched)?;
        let env = monotone_envelope(&r.per_scale);
        let fit = fit_free(&opts.radii, &env);
        let limit = fit.a.clamp(0.0, *env.last().unwrap());
        osc.push(r.per_scale);
        envelope.push(env);
        fits.push(fit);
        limits.push(limit);
    }
    let verdict = if limits.iter().all(|a| *a <= opts.tol) { Verdict::Pass } else { Verdict::Fail };
    Ok(OscillationProfile {
        shifts: opts.shifts.clone(),
        radii: opts.radii.clone(),
        osc,
        envelope,
        fits,
        limits,
        tol: opts.tol,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradientReport {
    pub limsup: LimsupReport,
    pub tol: f64,
    pub verdict: Verdict,
}

/// `limsup_B max_j |∂_j ψ| ≤ tol`: every partial derivative decays along the
/// base, which places `ψ` in the oscillation envelope of the base's ideal.
pub fn gradient_decay_test(
    psi: &DualFunction,
    base: &FilterBase,
    space: &SampleSpace,
    sched: &AsymptoticSchedule,
    tol: f64,
) -> Result<GradientReport> {
    if !psi.has_gradient() {
        return Err(Error::InvalidArgument(format!("{} has no gradient", psi.name)));
    }
    let phi = |xi: &[f64]| {
        psi.gradient(xi).unwrap_or_default().iter().map(|g| g.norm()).fold(0.0, f64::max)
    };
    let limsup = limsup_along(&phi, base, space, sched)?;
    let verdict = if limsup.value <= tol { Verdict::Pass } else { Verdict::Fail };
    Ok(GradientReport { limsup, tol, verdict })
}

/// Grid indices with `|coords| ≤ r` for each radius.
pub fn ball_exhaustion(grid: &GroupGrid, radii: &[f64]) -> Vec<Vec<usize>> {
    let norms: Vec<f64> = (0..grid.len())
        .map(|i| grid.coords(i).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    radii
        .iter()
        .map(|&r| (0..grid.len()).filter(|&i| norms[i] <= r).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CesaroReport {
    pub measures: Vec<f64>,
    pub means: Vec<f64>,
    pub fit: PowerFit,
    pub limit: f64,
    pub tol: f64,
    pub verdict: Verdict,
}

/// `m_n = Σ_{ξ ∈ D_n} ŵ |ψ(ξ)| / m̂(D_n)` over a nested exhaustion of the grid.
pub fn cesaro_mean(psi: &DualFunction, grid: &GroupGrid, sets: &[Vec<usize>], tol: f64) -> Result<CesaroReport> {
    if sets.is_empty() {
        return Err(Error::InvalidArgument("Cesàro mean needs at least one set".into()));
    }
    let mut sorted: Vec<Vec<usize>> = Vec::with_capacity(sets.len());
    for (k, s) in sets.iter().enumerate() {
        let mut s = s.clone();
        s.sort_unstable();
        s.dedup();
        if s.is_empty() {
            return Err(Error::InvalidArgument(format!("set {k} of the exhaustion is empty")));
        }
        if s.iter().any(|&i| i >= grid.len()) {
            return Err(Error::InvalidArgument(format!("set {k} has indices outside the grid")));
        }
        if let Some(prev) = sorted.last() {
            if prev.iter().any(|i| s.binary_search(i).is_err()) {
                return Err(Error::InvalidArgument(format!("sets {} and {k} are not nested", k - 1)));
            }
        }
        sorted.push(s);
    }
    let w = grid.weight();
    let vals: Vec<f64> = (0..grid.len()).map(|i| psi.eval(&grid.coords(i)).norm()).collect();
    let measures: Vec<f64> = sorted.iter().map(|s| w * s.len() as f64).collect();
    let means: Vec<f64> = sorted
        .iter()
        .zip(&measures)
        .map(|(s, m)| w * s.iter().map(|&i| vals[i]).sum::<f64>() / m)
        .collect();
    let env = monotone_envelope(&means);
    let fit = fit_free(&measures, &env);
    let limit = fit.a.clamp(0.0, *env.last().unwrap());
    let verdict = if limit <= tol { Verdict::Pass } else { Verdict::Fail };
    Ok(CesaroReport { measures, means, fit, limit, tol, verdict })
}

/// `Σ_η ŵ_η sup_ξ |(𝔽₍₁₎ f)(η, ξ)|` on the grids: a finite value is a
/// sufficient surrogate for membership in the symbol class.
pub fn class_surrogate(f: &Symbol) -> Result<f64> {
    let g = partial_fourier_1(f.table())?;
    let w = g.first.weight();
    Ok((0..g.first.len())
        .map(|eta| w * g.row(eta).iter().map(|v| v.norm()).fold(0.0, f64::max))
        .sum())
}
