//! Task dispatch for run configurations and the built-in example presets.

use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::asymptotics::{
    cluster_set, dfull_density_check, gohberg_rhs, gohberg_rhs_standard_minform, limsup_along, min_liminf_abs,
    normal_bundle_sup, AsymptoticSchedule, DfullFamily, FilterBase, NormalSide, SampleSpace,
};
use crate::config::{GroupSpec, RunConfig, SymbolSpec};
use crate::error::{Error, Result};
use crate::fourier::{fourier_to, inverse_fourier_to, Engine};
use crate::lca::{dual_grid, GridFunction, GroupGrid, GroupKind};
use crate::linalg::operator_norm;
use crate::pdo::{
    convolution_operator, diagram_check, hs_norm, multiplication_operator, op_matrix, write_binary, write_csv,
};
use crate::spectral::{
    essential_spectrum_probe, fredholm_check, gohberg_verify, singular_values, write_sigma_csv, FredholmVerdict,
    GohbergVerdict, ProbeVerdict, SigmaTable, SpectralReport,
};
use crate::symbols::{
    ball_exhaustion, cesaro_indicator, gradient_decay_test, one_sided, parabola_envelope, parse_dual,
    radial_oscillation_symbol, syndetic_thickening_filter_data, vanishing_oscillation_test, DualFunction,
    OscillationOptions, Symbol, ThickeningSet, Verdict,
};

/// Identity defects accepted by the exact checks.
const EXACT_TOL: f64 = 1e-10;

/// Built-in examples: name and one-line description.
pub const PRESETS: [(&str, &str); 5] = [
    ("stoskan", "one-sided decay: oscillation and upper limits on a half-line base versus the standard base"),
    ("rradial", "directional ideals: decay along a cone and the gradient test for a radial oscillation"),
    ("pescado", "non-syndetic thickening of a parabola: upper limits off the curve and along its normals"),
    ("cesaro", "full-density sets: Cesàro means of a sparse dyadic indicator and density ratios"),
    ("sepavar", "separable symbol (2 + cos 2πx)·sin √|ξ| on Torus × ℤ: distance to compacts, Gohberg bounds, Weyl probe"),
];

/// Outcome of one run: the report, the contract violations (exit code 2) and warnings.
#[derive(Clone, Debug, Serialize)]
pub struct RunOutcome {
    pub task: String,
    pub result: Value,
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub sigma: Vec<SigmaTable>,
}

impl RunOutcome {
    fn new(task: &str) -> Self {
        RunOutcome { task: task.into(), result: Value::Null, violations: Vec::new(), warnings: Vec::new(), sigma: Vec::new() }
    }

    pub fn exit_code(&self) -> i32 {
        if self.violations.is_empty() {
            0
        } else {
            2
        }
    }

    /// Deterministic JSON document: the run config followed by the outcome.
    pub fn to_json(&self, cfg: &RunConfig) -> Result<String> {
        let doc = json!({
            "config": cfg,
            "task": self.task,
            "result": self.result,
            "violations": self.violations,
            "warnings": self.warnings,
        });
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    /// Writes `report.json` and, when σ tables exist, `sigma.csv` into `dir`.
    pub fn write(&self, cfg: &RunConfig, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.to_json(cfg)? + "\n")?;
        if !self.sigma.is_empty() {
            write_sigma_csv(&self.sigma, &dir.join("sigma.csv"))?;
        }
        Ok(())
    }
}

fn check(out: &mut RunOutcome, ok: bool, what: impl Into<String>) {
    if !ok {
        out.violations.push(what.into());
    }
}

/// Runs `cfg`; relative paths in the config resolve against `base_dir`.
pub fn run(cfg: &RunConfig, base_dir: &Path) -> Result<RunOutcome> {
    let mut out = RunOutcome::new(&cfg.task);
    match cfg.task.as_str() {
        "fourier-selftest" => fourier_selftest(cfg, &mut out)?,
        "build-op" => build_op(cfg, base_dir, &mut out)?,
        "diagram-check" => diagram(cfg, base_dir, &mut out)?,
        "gohberg" => gohberg(&cfg.symbol(base_dir)?, cfg, &mut out)?,
        "spectrum-probe" => probe(&cfg.symbol(base_dir)?, cfg, &mut out)?,
        "fredholm" => fredholm(&cfg.symbol(base_dir)?, cfg, &mut out)?,
        "asymptotics" => asymptotics(&cfg.symbol(base_dir)?, cfg, &mut out)?,
        task => match task.strip_prefix("examples:") {
            Some(name) => preset(name, cfg, &mut out)?,
            None => return Err(Error::Config(format!("unknown task `{task}`"))),
        },
    }
    Ok(out)
}

fn random_function(grid: &GroupGrid, seed: u64) -> Result<GridFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.len())
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    GridFunction::new(grid.clone(), values)
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn fourier_selftest(cfg: &RunConfig, out: &mut RunOutcome) -> Result<()> {
    let (x, xi) = match &cfg.group {
        Some(g) => g.grids()?,
        None => {
            let x = GroupGrid::finite_cyclic(64)?;
            let xi = dual_grid(&x)?;
            (x, xi)
        }
    };
    let full = xi == dual_grid(&x)?;
    let u = random_function(&x, cfg.seed)?;
    let fast = fourier_to(&u, &xi, Engine::Fft)?;
    let scale = fast.sup_norm().max(f64::MIN_POSITIVE);
    let engine_defect = if x.len() * xi.len() <= 1 << 24 {
        let dense = fourier_to(&u, &xi, Engine::Dense)?;
        Some(max_diff(&fast.values, &dense.values) / scale)
    } else {
        None
    };
    let (plancherel, roundtrip) = if full {
        let p = (fast.norm2() - u.norm2()).abs() / u.norm2();
        let back = inverse_fourier_to(&fast, &x, Engine::Fft)?;
        (Some(p), Some(max_diff(&back.values, &u.values) / u.sup_norm()))
    } else {
        (None, None)
    };
    for (name, v) in [("plancherel", plancherel), ("fft-vs-dense", engine_defect), ("roundtrip", roundtrip)] {
        if let Some(v) = v {
            check(out, v <= EXACT_TOL, format!("{name} defect {v:.3e} exceeds {EXACT_TOL:e}"));
        }
    }
    if !full {
        out.warnings.push("truncated dual: Plancherel and round trip are not identities and were skipped".into());
    }
    out.result = json!({
        "x": x.kind(), "dual": xi.kind(), "full_dual": full,
        "plancherel_defect": plancherel, "fft_vs_dense_defect": engine_defect, "roundtrip_defect": roundtrip,
    });
    Ok(())
}

fn build_op(cfg: &RunConfig, base_dir: &Path, out: &mut RunOutcome) -> Result<()> {
    let f = cfg.symbol(base_dir)?;
    let op = op_matrix(&f)?;
    let hs = hs_norm(&op)?;
    let symbol_norm = f.table().hs_norm();
    let hs_defect = (hs - symbol_norm).abs() / symbol_norm.max(f64::MIN_POSITIVE);
    let exact = f.xgrid().is_finite_group() && f.xigrid() == &dual_grid(f.xgrid())?;
    if exact {
        check(out, hs_defect <= EXACT_TOL, format!("Hilbert–Schmidt defect {hs_defect:.3e}"));
    }
    let sv = singular_values(&op, cfg.svd.k, cfg.svd.mode, cfg.svd.smallest)?;
    if sv.clamped {
        out.warnings.push(format!("requested {} singular values, dimension is {}", cfg.svd.k, op.dim()));
    }
    out.sigma.push(SigmaTable {
        band: op.dim(),
        kind: if cfg.svd.smallest { "bottom".into() } else { "top".into() },
        values: sv.values.clone(),
    });
    if let Some(o) = cfg.output.as_ref().filter(|o| o.matrices) {
        std::fs::create_dir_all(&o.dir)?;
        write_binary(op.dense()?, &o.dir.join("op.bin"))?;
        write_csv(op.dense()?, &o.dir.join("op.csv"))?;
    }
    out.result = json!({
        "symbol": f.label, "dim": op.dim(), "hs_norm": hs, "symbol_l2_norm": symbol_norm,
        "hs_defect": hs_defect, "exact_identities": exact, "singular_values": sv,
    });
    Ok(())
}

fn diagram(cfg: &RunConfig, base_dir: &Path, out: &mut RunOutcome) -> Result<()> {
    let f = cfg.symbol(base_dir)?;
    let d = diagram_check(&f)?;
    check(out, d.relative <= EXACT_TOL, format!("factorization residual {:.3e}", d.relative));
    let mut tensor = Value::Null;
    if let Some([term]) = f.terms() {
        let op = op_matrix(&f)?;
        let m = multiplication_operator(&term.gamma.sample_on(f.xgrid()), f.xigrid())?;
        let c = convolution_operator(&term.psi.sample_on(f.xigrid()), f.xgrid())?;
        let prod = m.dense()? * c.dense()?;
        let norm = operator_norm(op.dense()?).max(f64::MIN_POSITIVE);
        let r = operator_norm(&(op.dense()? - prod)) / norm;
        check(out, r <= EXACT_TOL, format!("tensor factorization residual {r:.3e}"));
        tensor = json!({ "relative": r });
    }
    out.result = json!({ "symbol": f.label, "diagram": d, "tensor_factorization": tensor });
    Ok(())
}

fn gohberg(f: &Symbol, cfg: &RunConfig, out: &mut RunOutcome) -> Result<()> {
    let g = gohberg_verify(f, &cfg.base, &cfg.schedule, &cfg.asymptotic_schedule(), &cfg.tolerances)?;
    match g.verdict {
        GohbergVerdict::Violation => out.violations.push(format!("Gohberg: {}", g.notes.join("; "))),
        GohbergVerdict::Unreliable => out.warnings.push(format!("Gohberg estimate unreliable: {}", g.notes.join("; "))),
        GohbergVerdict::Consistent => {}
    }
    let mut report = SpectralReport::new(f.label.clone(), cfg.schedule.clone());
    report.gohberg = Some(g);
    report.collect_tables();
    out.sigma.extend(report.sigma_tables.iter().cloned());
    out.result = serde_json::to_value(&report)?;
    Ok(())
}

fn probe(f: &Symbol, cfg: &RunConfig, out: &mut RunOutcome) -> Result<()> {
    if cfg.lambdas.is_empty() {
        return Err(Error::Config("spectrum-probe needs `lambdas`".into()));
    }
    let sched = cfg.asymptotic_schedule();
    let predicted = cluster_set(f, &FilterBase::Standard, cfg.epsilon, &sched)?;
    let p = essential_spectrum_probe(f, &cfg.lambda_values(), &cfg.schedule, Some(&predicted), &cfg.tolerances)?;
    for t in &p.trajectories {
        let lam = format!("λ = {} + {}i", t.lambda[0], t.lambda[1]);
        if t.predicted == Some(true) && t.verdict == ProbeVerdict::Against {
            out.violations.push(format!("{lam} is predicted but σ_min stays bounded below"));
        }
        if t.distance_to_predicted.is_some_and(|d| d > 0.5) && t.verdict == ProbeVerdict::Supports {
            out.violations.push(format!("{lam} is far from the predicted set but σ_min vanishes"));
        }
    }
    let mut report = SpectralReport::new(f.label.clone(), cfg.schedule.clone());
    report.weyl = Some(p);
    report.collect_tables();
    out.sigma.extend(report.sigma_tables.iter().cloned());
    out.result = json!({
        "report": report,
        "predicted": { "epsilon": predicted.epsilon, "cells": predicted.cells.len(), "real_range": predicted.real_range() },
    });
    Ok(())
}

fn fredholm(f: &Symbol, cfg: &RunConfig, out: &mut RunOutcome) -> Result<()> {
    let r = fredholm_check(f, &cfg.schedule, &cfg.asymptotic_schedule(), &cfg.tolerances)?;
    if r.verdict == FredholmVerdict::FredholmSufficient && r.corroborated == Some(false) {
        out.warnings.push(r.note.clone());
    }
    let mut report = SpectralReport::new(f.label.clone(), cfg.schedule.clone());
    report.fredholm = Some(r);
    report.collect_tables();
    out.sigma.extend(report.sigma_tables.iter().cloned());
    out.result = serde_json::to_value(&report)?;
    Ok(())
}

fn asymptotics(f: &Symbol, cfg: &RunConfig, out: &mut RunOutcome) -> Result<()> {
    let sched = cfg.asymptotic_schedule();
    let rhs = gohberg_rhs(f, &cfg.base, &sched)?;
    let minform = gohberg_rhs_standard_minform(f, &sched)?;
    let (c, argmin) = min_liminf_abs(f, &sched)?;
    let clusters = cluster_set(f, &cfg.base, cfg.epsilon, &sched)?;
    let space = SampleSpace::of_dual(f.xigrid())?;
    let mut vo = Vec::new();
    for term in f.terms().unwrap_or_default() {
        let opts = OscillationOptions {
            samples: sched.samples,
            seed: sched.seed,
            shifts: vec![vec![1.0; space.dim()]],
            space: space.clone(),
            tol: cfg.tolerances.vo_tol,
            ..Default::default()
        };
        vo.push(json!({ "psi": term.psi.name, "profile": vanishing_oscillation_test(&term.psi, &opts)? }));
    }
    out.result = json!({
        "symbol": f.label, "base": cfg.base.name(), "limsup_abs": rhs, "minform": minform,
        "min_liminf_abs": { "value": c, "argmin_x": argmin },
        "cluster_set": { "epsilon": clusters.epsilon, "cells": clusters.cells, "real_range": clusters.real_range() },
        "oscillation": vo,
    });
    Ok(())
}

/// Config that runs a preset with default budgets.
pub fn preset_config(name: &str) -> Result<RunConfig> {
    if !PRESETS.iter().any(|p| p.0 == name) {
        return Err(Error::Config(format!("unknown example `{name}`")));
    }
    Ok(RunConfig::for_task(&format!("examples:{name}")))
}

fn preset(name: &str, cfg: &RunConfig, out: &mut RunOutcome) -> Result<()> {
    let sched = cfg.asymptotic_schedule();
    match name {
        "stoskan" => stoskan(&sched, out),
        "rradial" => rradial(&sched, out),
        "pescado" => pescado(&sched, out),
        "cesaro" => cesaro(&sched, out),
        "sepavar" => sepavar(cfg, out),
        _ => Err(Error::Config(format!("unknown example `{name}`"))),
    }
}

fn oscillation_options(sched: &AsymptoticSchedule, base: FilterBase, tol: f64) -> OscillationOptions {
    OscillationOptions { samples: sched.samples, seed: sched.seed, base, tol, ..Default::default() }
}

fn stoskan(sched: &AsymptoticSchedule, out: &mut RunOutcome) -> Result<()> {
    let psi = one_sided();
    let right = syndetic_thickening_filter_data(ThickeningSet::HalfLine { a: 0.0 })?;
    let two_sided = vanishing_oscillation_test(&psi, &oscillation_options(sched, FilterBase::Standard, 1e-2))?;
    let one = vanishing_oscillation_test(&psi, &oscillation_options(sched, right.clone(), 1e-2))?;
    check(out, two_sided.verdict == Verdict::Fail, "one-sided symbol passes the two-sided oscillation test");
    check(out, one.verdict == Verdict::Pass, "one-sided symbol fails the half-line oscillation test");
    // Decays to the right only.
    let phi = |xi: &[f64]| (-xi[0].max(0.0)).exp();
    let space = SampleSpace::continuous(1);
    let on_right = limsup_along(&phi, &right, &space, sched)?;
    let standard = limsup_along(&phi, &FilterBase::Standard, &space, sched)?;
    check(out, on_right.value <= 1e-3, format!("half-line limsup {:.3e} of a right-decaying function", on_right.value));
    check(out, (standard.value - 1.0).abs() <= 1e-3, format!("standard limsup {:.6} ≠ 1", standard.value));
    out.result = json!({
        "symbol": psi.name, "oscillation_standard": two_sided, "oscillation_half_line": one,
        "decay_limsup_half_line": on_right, "decay_limsup_standard": standard,
    });
    Ok(())
}

fn rradial(sched: &AsymptoticSchedule, out: &mut RunOutcome) -> Result<()> {
    let psi = parse_dual("dirdecay:0,1")?;
    let phi = |xi: &[f64]| psi.eval(xi).norm();
    let space = SampleSpace::continuous(2);
    let cone = FilterBase::directional(&[0.0, 1.0])?;
    let along = limsup_along(&phi, &cone, &space, sched)?;
    let standard = limsup_along(&phi, &FilterBase::Standard, &space, sched)?;
    check(out, along.value <= 1e-3, format!("directional limsup {:.3e}", along.value));
    check(out, (standard.value - 1.0).abs() <= 1e-3, format!("standard limsup {:.6} ≠ 1", standard.value));
    let radial = radial_oscillation_symbol();
    let axis = FilterBase::directional(&[1.0, 0.0, 0.0])?;
    let grad = gradient_decay_test(&radial, &axis, &SampleSpace::continuous(3), sched, 1e-2)?;
    check(out, grad.verdict == Verdict::Pass, "radial oscillation: gradient does not decay along the cone");
    out.result = json!({
        "decay_symbol": psi.name, "limsup_directional": along, "limsup_standard": standard,
        "radial_symbol": radial.name, "gradient_test": grad,
    });
    Ok(())
}

fn pescado(sched: &AsymptoticSchedule, out: &mut RunOutcome) -> Result<()> {
    let psi = parabola_envelope();
    let phi = |xi: &[f64]| psi.eval(xi).norm();
    let space = SampleSpace::continuous(2);
    let off_curve = syndetic_thickening_filter_data(ThickeningSet::Parabola)?;
    let thick = limsup_along(&phi, &off_curve, &space, sched)?;
    // The curve has measure zero, so plane sampling misses it; points
    // (s, s²) with |s| > t lie in {|ξ| > t} and bound the standard limsup below.
    let on_curve = |s: &[f64]| phi(&[s[0], s[0] * s[0]]);
    let standard = limsup_along(&on_curve, &FilterBase::Standard, &SampleSpace::continuous(1), sched)?;
    check(out, thick.value <= 1e-3, format!("limsup off the thickened parabola {:.3e}", thick.value));
    check(out, (standard.value - 1.0).abs() <= 1e-3, format!("standard limsup {:.6} ≠ 1", standard.value));
    let s_hat = 5.0;
    let outward = normal_bundle_sup(&phi, s_hat, 100.0, NormalSide::Outward, sched.samples, sched.seed);
    check(out, outward <= (-s_hat).exp() * (1.0 + 1e-9), format!("outward normal sup {outward:.3e} above e^-{s_hat}"));
    let gaps: Vec<Option<Vec<f64>>> = [1.0, 10.0, 100.0].iter().map(|s| ThickeningSet::Parabola.gap_witness(*s)).collect();
    check(out, gaps.iter().all(Option::is_some), "parabola thickenings cover the plane");
    out.result = json!({
        "symbol": psi.name, "limsup_thickened": thick, "limsup_standard_on_curve": standard,
        "normal_offset": s_hat, "outward_normal_sup": outward, "gap_witnesses": gaps,
    });
    Ok(())
}

fn cesaro(sched: &AsymptoticSchedule, out: &mut RunOutcome) -> Result<()> {
    let psi: DualFunction = cesaro_indicator();
    let grid = GroupGrid::new(GroupKind::RealLine { step: 0.5, extent: 8192.0 })?;
    let radii: Vec<f64> = (6..=12).map(|k| 2f64.powi(k)).collect();
    let sets = ball_exhaustion(&grid, &radii);
    let means = crate::symbols::cesaro_mean(&psi, &grid, &sets, 1e-2)?;
    let bounds: Vec<f64> = radii.iter().map(|n| 2.0 * n.log2().powi(2) / n).collect();
    for ((n, m), b) in radii.iter().zip(&means.means).zip(&bounds) {
        check(out, m <= b, format!("Cesàro mean {m:.4e} above 2(log₂n)²/n = {b:.4e} at n = {n}"));
    }
    check(out, means.verdict == Verdict::Pass, "Cesàro means do not vanish");
    let density = dfull_density_check(&DfullFamily::SparseDyadicComplement, 10.0, &[1e3, 1e4, 1e5, 1e6], 1.0)?;
    check(out, density.full, "sparse dyadic complement does not reach full density");
    let phi = |xi: &[f64]| psi.eval(xi).norm();
    let space = SampleSpace::continuous(1);
    let dfull = FilterBase::Dfull { sets: DfullFamily::SparseDyadicComplement };
    let along = limsup_along(&phi, &dfull, &space, sched)?;
    check(out, along.value <= 1e-3, format!("limsup along full-density sets {:.3e}", along.value));
    out.result = json!({
        "symbol": psi.name, "radii": radii, "means": means, "bounds": bounds, "density": density,
        "limsup_full_density": along,
    });
    Ok(())
}

fn sepavar(cfg: &RunConfig, out: &mut RunOutcome) -> Result<()> {
    let mut cfg = cfg.clone();
    cfg.group = None;
    cfg.symbol = Some(SymbolSpec::Tensor { gamma: "trig:2:1".into(), psi: "vo:sqrt".into(), extra: Vec::new(), shift: None });
    if cfg.lambdas.is_empty() {
        cfg.lambdas = [-3.0, -1.5, 0.0, 1.5, 3.0, 4.0].iter().map(|v| crate::config::LambdaSpec::Real(*v)).collect();
    }
    let f = cfg.symbol(Path::new("."))?;
    let mut g = RunOutcome::new("gohberg");
    gohberg(&f, &cfg, &mut g)?;
    let mut p = RunOutcome::new("spectrum-probe");
    probe(&f, &cfg, &mut p)?;
    for sub in [&g, &p] {
        out.violations.extend(sub.violations.iter().cloned());
        out.warnings.extend(sub.warnings.iter().cloned());
        out.sigma.extend(sub.sigma.iter().cloned());
    }
    out.result = json!({ "symbol": f.label, "gohberg": g.result, "probe": p.result });
    Ok(())
}

/// Group spec of a torus truncation, for configs built in code.
pub fn torus_group(band: usize, oversample: usize) -> GroupSpec {
    GroupSpec {
        x: GroupKind::Torus { samples: band * oversample },
        dual: Some(GroupKind::IntegersTruncated { band }),
    }
}
