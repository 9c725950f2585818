//! Singular values, distance to the compacts, Gohberg ratios, Weyl-type
//! probes of the essential spectrum and Fredholm verdicts.
//!
//! On `Torus × ℤ` the operator is studied through its frequency truncations
//! (see [`block`]); on finite groups the dense matrix is used directly.

pub mod block;
pub mod report;

use nalgebra::{Cholesky, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use block::{check_torus_symbol, Columns, FrequencyBlock, Gram};
pub use report::{write_sigma_csv, SigmaTable, SpectralReport};

use crate::asymptotics::{
    fit_fixed, gohberg_rhs, gohberg_rhs_standard_minform, min_liminf_abs, AsymptoticSchedule, ClusterSet,
    FilterBase, LimsupReport, MinFormReport, PowerFit, SampleSpace,
};
use crate::error::{Error, Result};
use crate::lca::GridFunction;
use crate::linalg::{dense_singular_values, lanczos_largest, CMatrix, LanczosOptions};
use crate::pdo::{adjoint_symbol, op_matrix, PdoOperator, DENSE_LIMIT};
use crate::symbols::{vanishing_oscillation_test, DualFunction, OscillationOptions, Symbol, Verdict};

/// Band sizes `N_k` of the truncations `Torus(oversample·N_k) × ℤ(N_k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TruncationSchedule {
    pub bands: Vec<usize>,
    pub oversample: usize,
    /// Lanczos step budget per extreme singular value.
    pub budget: usize,
}

impl Default for TruncationSchedule {
    fn default() -> Self {
        TruncationSchedule { bands: vec![256, 512, 1024, 2048], oversample: 4, budget: 600 }
    }
}

impl TruncationSchedule {
    pub fn new(bands: Vec<usize>) -> Result<Self> {
        let s = TruncationSchedule { bands, ..Default::default() };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bands.len() < 3 {
            return Err(Error::InvalidArgument("a truncation schedule needs at least 3 sizes".into()));
        }
        if self.bands.windows(2).any(|w| w[1] <= w[0]) || self.bands[0] == 0 {
            return Err(Error::InvalidArgument("truncation sizes must be positive and strictly increasing".into()));
        }
        if self.oversample < 2 {
            return Err(Error::BandViolation("oversampling below 2 aliases the band".into()));
        }
        Ok(())
    }

    fn lanczos(&self) -> LanczosOptions {
        LanczosOptions { max_steps: self.budget.max(8), ..Default::default() }
    }
}

/// Thresholds used by the verdicts; every field can be overridden from a config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Accepted `|estimate / rhs - 1|`.
    pub ratio_band: f64,
    /// Weyl probe: final `σ_min` below this fraction of `sup |f|` supports `λ`.
    pub weyl_support: f64,
    /// Weyl probe: plateau above this fraction of `sup |f|` counts against `λ`.
    pub weyl_against: f64,
    /// Largest relative change between the last two plateau values.
    pub plateau_stability: f64,
    /// Fredholm corroboration requires `σ_min ≥ factor·c`.
    pub fredholm_factor: f64,
    /// Estimates below this are treated as zero.
    pub zero_tol: f64,
    /// Oscillation limit accepted as vanishing.
    pub vo_tol: f64,
    /// Fit residual relative to the plateau scale.
    pub fit_residual: f64,
    /// `c` at or below this is treated as zero.
    pub c_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ratio_band: 0.15,
            weyl_support: 0.05,
            weyl_against: 0.1,
            plateau_stability: 0.2,
            fredholm_factor: 0.5,
            zero_tol: 0.05,
            vo_tol: 1e-2,
            fit_residual: 0.2,
            c_tol: 1e-3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SvdMode {
    Dense,
    Iterative,
    Auto,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularValues {
    /// Descending.
    pub values: Vec<f64>,
    /// Set when more values were requested than the dimension.
    pub clamped: bool,
    pub mode: SvdMode,
}

/// Top `k` singular values of `op`, or the bottom `k` when `smallest` is set.
///
/// The iterative path runs Lanczos on `T*T`; the bottom end uses a
/// shift-inverted Cholesky factorization of `T*T`.
pub fn singular_values(op: &PdoOperator, k: usize, mode: SvdMode, smallest: bool) -> Result<SingularValues> {
    let n = op.dim();
    let clamped = k > n;
    if clamped {
        log::warn!("requested {k} singular values of a {n}-dimensional operator; clamping");
    }
    let k = k.min(n);
    let mode = match mode {
        SvdMode::Auto if n <= 2048 && op.matrix.is_some() => SvdMode::Dense,
        SvdMode::Auto => SvdMode::Iterative,
        m => m,
    };
    let owned;
    let matrix = match (&op.matrix, &op.symbol) {
        (Some(m), _) => Some(m),
        (None, Some(f)) if mode == SvdMode::Dense || smallest => {
            if n > DENSE_LIMIT {
                return Err(Error::Unsupported(format!("{n} points exceed the dense limit {DENSE_LIMIT}")));
            }
            owned = op_matrix(f)?;
            owned.matrix.as_ref()
        }
        _ => None,
    };
    let values = match mode {
        SvdMode::Dense => {
            let s = dense_singular_values(matrix.expect("dense form"));
            if smallest {
                s[n - k..].to_vec()
            } else {
                s[..k].to_vec()
            }
        }
        _ => {
            let opts = LanczosOptions { max_steps: 600.max(3 * k), ..Default::default() };
            if smallest {
                smallest_gram_eigenvalues(matrix.expect("dense form"), k, opts)?
            } else {
                largest_gram_eigenvalues(op, matrix, k, opts)?
            }
            .into_iter()
            .map(|l| l.max(0.0).sqrt())
            .collect()
        }
    };
    Ok(SingularValues { values, clamped, mode })
}

fn largest_gram_eigenvalues(op: &PdoOperator, matrix: Option<&CMatrix>, k: usize, opts: LanczosOptions) -> Result<Vec<f64>> {
    let n = op.dim();
    let res = match matrix {
        Some(m) => lanczos_largest(
            n,
            k,
            |x, y| {
                let v = DVector::from_column_slice(x);
                let w = m.ad_mul(&(m * v));
                y.copy_from_slice(w.as_slice());
            },
            opts,
        )?,
        None => {
            let f = op.symbol.as_ref().ok_or_else(|| Error::Unsupported("operator has no symbol".into()))?;
            let adj = PdoOperator::lazy(&adjoint_symbol(f)?);
            let mut failure = None;
            let res = lanczos_largest(
                n,
                k,
                |x, y| {
                    let r = GridFunction::new(op.xgrid.clone(), x.to_vec())
                        .and_then(|u| op.fast_apply(&u))
                        .and_then(|v| adj.fast_apply(&v));
                    match r {
                        Ok(w) => y.copy_from_slice(&w.values),
                        Err(e) => {
                            failure.get_or_insert(e);
                            y.fill(Complex64::new(0.0, 0.0));
                        }
                    }
                },
                opts,
            )?;
            if let Some(e) = failure {
                return Err(e);
            }
            res
        }
    };
    Ok(res.values)
}

/// Bottom `k` eigenvalues of `M*M`, descending.
fn smallest_gram_eigenvalues(m: &CMatrix, k: usize, opts: LanczosOptions) -> Result<Vec<f64>> {
    let n = m.ncols();
    let mut g = m.ad_mul(m);
    let scale = (0..n).map(|i| g[(i, i)].re).fold(0.0, f64::max).max(1e-200);
    let tau = 1e-12 * scale;
    for i in 0..n {
        g[(i, i)] += tau;
    }
    let chol = Cholesky::new(g).ok_or_else(|| Error::Numerical("shifted Gram matrix is not positive definite".into()))?;
    let res = lanczos_largest(
        n,
        k,
        |x, y| {
            let s = chol.solve(&DVector::from_column_slice(x));
            y.copy_from_slice(s.as_slice());
        },
        opts,
    )?;
    // Largest θ ↔ smallest λ; reverse to keep the output descending.
    let mut out: Vec<f64> = res.values.iter().map(|t| (1.0 / t - tau).max(0.0)).collect();
    out.reverse();
    Ok(out)
}

/// Dimension fractions at which singular values are read off.
pub const WINDOW_FRACTIONS: [f64; 3] = [0.5, 0.75, 0.9];

/// Median of `σ_{⌊θ·n⌋}` (descending order) over [`WINDOW_FRACTIONS`].
pub fn sigma_window_estimate(m: &CMatrix) -> f64 {
    let s = dense_singular_values(m);
    if s.is_empty() {
        return 0.0;
    }
    let mut picks: Vec<f64> = WINDOW_FRACTIONS
        .iter()
        .map(|t| s[((t * s.len() as f64).floor() as usize).min(s.len() - 1)])
        .collect();
    picks.sort_by(f64::total_cmp);
    picks[1]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Reliability {
    Reliable,
    Unreliable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EssNormReport {
    pub value: f64,
    /// `high-band-extrapolation` on tori, `sigma-window` on finite groups.
    pub method: String,
    pub bands: Vec<usize>,
    /// `σ_max` of the high-frequency truncation per band.
    pub sigma: Vec<f64>,
    pub fit: Option<PowerFit>,
    /// σ-window value of the full truncation, for bands small enough to decompose densely.
    pub window: Vec<Option<f64>>,
    pub flag: Reliability,
    pub reasons: Vec<String>,
}

/// Distance from `Op(f)` to the compact operators.
///
/// On `Torus × ℤ` the high-frequency part `|ξ| > N/2` of each truncation is
/// measured in operator norm and the sequence is extrapolated with
/// `a + b·N^{-1/2}`. On finite groups the σ-window of the dense matrix is returned.
pub fn essential_norm_estimate(f: &Symbol, sched: &TruncationSchedule, tol: &Tolerances) -> Result<EssNormReport> {
    if f.xgrid().is_finite_group() {
        let op = op_matrix(f)?;
        let value = sigma_window_estimate(op.dense()?);
        return Ok(EssNormReport {
            value,
            method: "sigma-window".into(),
            bands: vec![f.xgrid().len()],
            sigma: vec![value],
            fit: None,
            window: vec![Some(value)],
            flag: Reliability::Reliable,
            reasons: vec!["finite-dimensional: every operator is compact, the window value is a plateau diagnostic".into()],
        });
    }
    if !f.xgrid().is_compact() {
        return Err(Error::Unsupported("the essential norm is estimated only for compact position groups".into()));
    }
    check_torus_symbol(f)?;
    sched.validate()?;
    let opts = sched.lanczos();
    let per_band: Vec<(f64, Option<f64>)> = sched
        .bands
        .par_iter()
        .map(|&n| {
            let high = FrequencyBlock::build(f, n, sched.oversample, Columns::High)?;
            let s = high.sigma_max(opts)?;
            let window = if 2 * n <= 512 {
                Some(sigma_window_estimate(&FrequencyBlock::build(f, n, sched.oversample, Columns::All)?.to_dense()))
            } else {
                None
            };
            Ok((s, window))
        })
        .collect::<Result<_>>()?;
    let sigma: Vec<f64> = per_band.iter().map(|p| p.0).collect();
    let window = per_band.iter().map(|p| p.1).collect();
    let scales: Vec<f64> = sched.bands.iter().map(|&n| n as f64).collect();
    let fit = fit_fixed(&scales, &sigma, 0.5);
    let value = fit.a.max(0.0);
    let mut reasons = Vec::new();
    let level = fit.a.abs().max(sigma.iter().copied().fold(0.0, f64::max));
    if fit.residual > tol.fit_residual * level {
        reasons.push(format!(
            "fit residual {:.3e} exceeds {} of the plateau scale {:.3e}",
            fit.residual, tol.fit_residual, level
        ));
    }
    reasons.extend(oscillation_diagnostic(f, tol)?);
    let flag = if reasons.is_empty() { Reliability::Reliable } else { Reliability::Unreliable };
    Ok(EssNormReport {
        value,
        method: "high-band-extrapolation".into(),
        bands: sched.bands.clone(),
        sigma,
        fit: Some(fit),
        window,
        flag,
        reasons,
    })
}

/// Extrapolation assumes the dual dependence oscillates slowly; report
/// every dual profile whose unit-shift oscillation does not vanish.
fn oscillation_diagnostic(f: &Symbol, tol: &Tolerances) -> Result<Vec<String>> {
    let profiles: Vec<DualFunction> = match f.terms() {
        Some(terms) => terms.iter().map(|t| t.psi.clone()).collect(),
        None => {
            let func = f.closure()?.clone();
            f.x_sample(8)
                .into_iter()
                .map(|x| {
                    let func = func.clone();
                    let name = format!("section at x = {:.4}", x[0]);
                    DualFunction::new(name, f.sup_bound(), move |xi| func(&x, xi))
                })
                .collect()
        }
    };
    let opts = OscillationOptions {
        samples: 2000,
        tol: tol.vo_tol,
        space: SampleSpace::integer(1),
        ..Default::default()
    };
    let mut out = Vec::new();
    for psi in &profiles {
        let p = vanishing_oscillation_test(psi, &opts)?;
        if p.verdict == Verdict::Fail {
            out.push(format!("{}: unit-shift oscillation tends to {:.3e}", psi.name, p.limits[0]));
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GohbergVerdict {
    Consistent,
    Violation,
    Unreliable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GohbergReport {
    pub estimate: EssNormReport,
    pub rhs: LimsupReport,
    pub minform: MinFormReport,
    /// `estimate / rhs`, 1 when both vanish.
    pub ratio: f64,
    /// `minform ≤ 1.05·estimate` (up to `c_tol`).
    pub lower_bound_holds: bool,
    pub verdict: GohbergVerdict,
    pub notes: Vec<String>,
}

/// Compares the distance to the compacts with `limsup |f|` and checks the
/// `min_x limsup |f(x, ·)|` lower bound.
pub fn gohberg_verify(
    f: &Symbol,
    base: &FilterBase,
    sched: &TruncationSchedule,
    asched: &AsymptoticSchedule,
    tol: &Tolerances,
) -> Result<GohbergReport> {
    if *base != FilterBase::Standard {
        return Err(Error::InvalidArgument(format!(
            "operator-side distances are characterized only for the standard base, got {}",
            base.name()
        )));
    }
    let estimate = essential_norm_estimate(f, sched, tol)?;
    let rhs = gohberg_rhs(f, base, asched)?;
    let minform = gohberg_rhs_standard_minform(f, asched)?;
    let (e, r) = (estimate.value, rhs.value);
    let ratio = if e < 1e-10 && r < 1e-10 {
        1.0
    } else if r < 1e-10 {
        f64::INFINITY
    } else {
        e / r
    };
    let lower_bound_holds = minform.value <= 1.05 * e + tol.c_tol;
    let reliable = estimate.flag == Reliability::Reliable;
    let mut notes = Vec::new();
    let verdict = if r < 1e-10 && e > tol.zero_tol {
        notes.push(format!("limsup |f| vanishes but the estimate is {e:.4}"));
        GohbergVerdict::Violation
    } else if (ratio - 1.0).abs() > tol.ratio_band || !lower_bound_holds {
        if !lower_bound_holds {
            notes.push(format!("lower bound fails: minform {:.4} > 1.05·{e:.4}", minform.value));
        }
        if (ratio - 1.0).abs() > tol.ratio_band {
            notes.push(format!("ratio {ratio:.4} outside 1 ± {}", tol.ratio_band));
        }
        if reliable {
            GohbergVerdict::Violation
        } else {
            GohbergVerdict::Unreliable
        }
    } else if reliable {
        GohbergVerdict::Consistent
    } else {
        GohbergVerdict::Unreliable
    };
    if !reliable {
        notes.extend(estimate.reasons.iter().cloned());
    }
    Ok(GohbergReport { estimate, rhs, minform, ratio, lower_bound_holds, verdict, notes })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProbeVerdict {
    Supports,
    Against,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeTrajectory {
    pub lambda: [f64; 2],
    pub bands: Vec<usize>,
    /// `σ_min` of the high-frequency truncation of `Op(f) - λ`.
    pub sigma_min: Vec<f64>,
    pub verdict: ProbeVerdict,
    /// Whether `λ` lies in the predicted set, when one was given.
    pub predicted: Option<bool>,
    pub distance_to_predicted: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    /// Small `σ_min` is necessary for `λ` to be in the essential spectrum,
    /// not sufficient; verdicts are evidence in one direction only.
    pub one_directional: bool,
    pub sup: f64,
    pub trajectories: Vec<ProbeTrajectory>,
}

/// Weyl-type probe: `σ_min` of the compression of `Op(f) - λ` to `|ξ| > N/2`.
pub fn essential_spectrum_probe(
    f: &Symbol,
    lambdas: &[Complex64],
    sched: &TruncationSchedule,
    predicted: Option<&ClusterSet>,
    tol: &Tolerances,
) -> Result<ProbeReport> {
    check_torus_symbol(f)?;
    sched.validate()?;
    let opts = sched.lanczos();
    let sup = f.sup_bound();
    // sigma[k][l]: band k, λ_l.
    let sigma: Vec<Vec<f64>> = sched
        .bands
        .iter()
        .map(|&n| {
            let high = FrequencyBlock::build(f, n, sched.oversample, Columns::High)?;
            lambdas.par_iter().map(|&l| high.shifted(l).sigma_min(opts)).collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let trajectories = lambdas
        .iter()
        .enumerate()
        .map(|(l, &lambda)| {
            let traj: Vec<f64> = sigma.iter().map(|row| row[l]).collect();
            ProbeTrajectory {
                lambda: [lambda.re, lambda.im],
                bands: sched.bands.clone(),
                verdict: probe_verdict(&traj, sup, tol),
                sigma_min: traj,
                predicted: predicted.map(|p| p.contains(lambda) || p.distance(lambda) <= p.epsilon),
                distance_to_predicted: predicted.map(|p| p.distance(lambda)),
            }
        })
        .collect();
    Ok(ProbeReport { one_directional: true, sup, trajectories })
}

fn probe_verdict(traj: &[f64], sup: f64, tol: &Tolerances) -> ProbeVerdict {
    let n = traj.len();
    let last = traj[n - 1];
    if last < tol.weyl_support * sup {
        return ProbeVerdict::Supports;
    }
    let prev = traj[n - 2];
    let floor = tol.weyl_against * sup;
    if last > floor && prev > floor && (last - prev).abs() <= tol.plateau_stability * last.max(prev) {
        ProbeVerdict::Against
    } else {
        ProbeVerdict::Inconclusive
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FredholmVerdict {
    #[serde(rename = "FREDHOLM-SUFFICIENT")]
    FredholmSufficient,
    #[serde(rename = "NOT-FREDHOLM")]
    NotFredholm,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FredholmReport {
    pub verdict: FredholmVerdict,
    /// `min_x liminf_{ξ→∞} |f(x, ξ)|`.
    pub c: Option<f64>,
    pub argmin_x: Option<Vec<f64>>,
    /// `σ_min` of the full truncation per band.
    pub sigma_min_traj: Vec<f64>,
    /// Whether `σ_min ≥ fredholm_factor·c` on every band.
    pub corroborated: Option<bool>,
    pub note: String,
}

/// Fredholm verdict from `min_x liminf |f(x, ·)| > 0`, corroborated by the
/// smallest singular values of the truncations.
pub fn fredholm_check(
    f: &Symbol,
    sched: &TruncationSchedule,
    asched: &AsymptoticSchedule,
    tol: &Tolerances,
) -> Result<FredholmReport> {
    let empty = |verdict, note: &str| FredholmReport {
        verdict,
        c: None,
        argmin_x: None,
        sigma_min_traj: Vec::new(),
        corroborated: None,
        note: note.into(),
    };
    if !f.xgrid().is_compact() {
        return Ok(empty(
            FredholmVerdict::NotFredholm,
            "non-compact position group: Op(f) is never Fredholm here",
        ));
    }
    if f.xgrid().is_finite_group() {
        return Ok(empty(FredholmVerdict::FredholmSufficient, "finite-dimensional"));
    }
    let (c, argmin) = min_liminf_abs(f, asched)?;
    let torus_1d = check_torus_symbol(f).is_ok();
    let traj: Vec<f64> = if torus_1d {
        sched.validate()?;
        let opts = sched.lanczos();
        sched
            .bands
            .par_iter()
            .map(|&n| FrequencyBlock::build(f, n, sched.oversample, Columns::All)?.sigma_min(opts))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let (verdict, corroborated, note) = if c > tol.c_tol {
        let ok = torus_1d.then(|| traj.iter().all(|s| *s >= tol.fredholm_factor * c));
        let note = match ok {
            Some(true) => "symbol bounded away from 0 at infinity; truncations stay invertible",
            Some(false) => "symbol bounded away from 0 at infinity, but a truncation dips below the corroboration floor",
            None => "symbol bounded away from 0 at infinity; no truncation check for this group",
        };
        (FredholmVerdict::FredholmSufficient, ok, note)
    } else {
        (FredholmVerdict::Inconclusive, None, "liminf |f| reaches 0 at some x: the sufficient condition fails")
    };
    Ok(FredholmReport {
        verdict,
        c: Some(c),
        argmin_x: Some(argmin),
        sigma_min_traj: traj,
        corroborated,
        note: note.into(),
    })
}
