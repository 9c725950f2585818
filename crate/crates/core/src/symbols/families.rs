//! Built-in symbol families and their config-string names.

use std::sync::Arc;

use num_complex::Complex64;

use super::{DualFunction, RealFn, ThickeningSet, XFunction};
use crate::asymptotics::base::in_sparse_dyadic;
use crate::asymptotics::sampling::euclid;
use crate::error::{Error, Result};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `ψ(ξ) = sin(β(ξ₁))` with gradient `cos(β)·β′`.
pub fn vo_symbol(name: &str, beta: RealFn, derivative: Option<RealFn>) -> Result<DualFunction> {
    let db = derivative.ok_or_else(|| {
        Error::InvalidArgument("vanishing-oscillation family needs the derivative of β".into())
    })?;
    let b = beta.clone();
    Ok(DualFunction::real(name, 1.0, move |xi| beta(xi[0]).sin())
        .with_gradient(move |xi| vec![c(b(xi[0]).cos() * db(xi[0]))]))
}

/// `β(ξ) = |ξ|^α` and its derivative.
pub fn power_beta(alpha: f64) -> (RealFn, RealFn) {
    let beta: RealFn = Arc::new(move |x: f64| x.abs().powf(alpha));
    let deriv: RealFn = Arc::new(move |x: f64| {
        if x == 0.0 {
            0.0
        } else {
            alpha * x.abs().powf(alpha - 1.0) * x.signum()
        }
    });
    (beta, deriv)
}

/// `ψ(ξ) = envelope(|⟨ξ, ω₀⟩|)` for a unit direction `ω₀`.
pub fn directional_decay_symbol(
    omega0: &[f64],
    envelope: impl Fn(f64) -> f64 + Send + Sync + 'static,
    sup: f64,
) -> Result<DualFunction> {
    let n = euclid(omega0);
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::InvalidArgument("direction ω₀ must be a non-zero vector".into()));
    }
    let w: Vec<f64> = omega0.iter().map(|v| v / n).collect();
    let name = format!("dirdecay{w:?}");
    Ok(DualFunction::real(name, sup, move |xi| {
        let p: f64 = xi.iter().zip(&w).map(|(a, b)| a * b).sum();
        envelope(p.abs())
    }))
}

/// `cos(ξ₁⁻² cos(ξ₂ + ξ₃))` with `ξ₁` clamped to `≥ 1`, and its gradient.
pub fn radial_oscillation_symbol() -> DualFunction {
    DualFunction::real("cos-radial", 1.0, |xi| {
        let a = xi[0].max(1.0);
        (a.powi(-2) * (xi[1] + xi[2]).cos()).cos()
    })
    .with_gradient(|xi| {
        let a = xi[0].max(1.0);
        let s = xi[1] + xi[2];
        let u = a.powi(-2) * s.cos();
        let su = u.sin();
        let d1 = if xi[0] >= 1.0 { -su * (-2.0 * a.powi(-3) * s.cos()) } else { 0.0 };
        let d23 = -su * (-a.powi(-2) * s.sin());
        vec![c(d1), c(d23), c(d23)]
    })
}

/// Indicator of `⋃_{k ≥ 1} [2^k, 2^k + k]`.
pub fn cesaro_indicator() -> DualFunction {
    DualFunction::real("cesaro-indicator", 1.0, |xi| if in_sparse_dyadic(xi[0]) { 1.0 } else { 0.0 })
}

/// `exp(-dist(ξ, graph of t ↦ t²))`.
pub fn parabola_envelope() -> DualFunction {
    DualFunction::real("pescado", 1.0, |xi| (-ThickeningSet::Parabola.distance(xi)).exp())
}

/// Parses a dual-variable family name.
///
/// Recognized: `vo:sqrt`, `vo:pow:<α>`, `vo:linear`, `sin`, `decay`, `exp`,
/// `dirdecay[:<ω₀ comma list>]`, `cos-radial`, `cesaro-indicator`, `pescado`,
/// `one-sided`, `const:<c>`.
pub fn parse_dual(spec: &str) -> Result<DualFunction> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| -> Result<f64> {
        s.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad number `{s}` in `{spec}`")))
    };
    match parts.as_slice() {
        ["vo", "sqrt"] => {
            let (b, d) = power_beta(0.5);
            vo_symbol("vo:sqrt", b, Some(d))
        }
        ["vo", "pow", a] => {
            let alpha = num(a)?;
            let (b, d) = power_beta(alpha);
            vo_symbol(spec, b, Some(d))
        }
        ["vo", "linear"] | ["sin"] => {
            let b: RealFn = Arc::new(|x| x);
            let d: RealFn = Arc::new(|_| 1.0);
            vo_symbol(spec, b, Some(d))
        }
        ["decay"] => Ok(DualFunction::real("decay", 1.0, |xi| 1.0 / (1.0 + euclid(xi)))),
        ["exp"] => Ok(DualFunction::real("exp", 1.0, |xi| (-euclid(xi)).exp())),
        ["dirdecay"] => directional_decay_symbol(&[0.0, 1.0], |s| (-s).exp(), 1.0),
        ["dirdecay", w] => {
            let omega: Vec<f64> = w.split(',').map(num).collect::<Result<_>>()?;
            directional_decay_symbol(&omega, |s| (-s).exp(), 1.0)
        }
        ["cos-radial"] => Ok(radial_oscillation_symbol()),
        ["cesaro-indicator"] => Ok(cesaro_indicator()),
        ["pescado"] => Ok(parabola_envelope()),
        ["one-sided"] => Ok(one_sided()),
        ["const", v] => Ok(DualFunction::constant(c(num(v)?))),
        _ => Err(Error::Config(format!("unknown dual family `{spec}`"))),
    }
}

/// `sin(√ξ)` on the right half-line, `sin(ξ)` on the left.
pub fn one_sided() -> DualFunction {
    DualFunction::real("one-sided", 1.0, |xi| {
        let x = xi[0];
        if x >= 0.0 { x.sqrt().sin() } else { x.sin() }
    })
    .with_gradient(|xi| {
        let x = xi[0];
        let d = if x > 0.0 { x.sqrt().cos() / (2.0 * x.sqrt()) } else { x.cos() };
        vec![c(d)]
    })
}

/// Parses a position-variable family: `one`, `const:<c>`, `trig:<a>:<b>`
/// (`a + b·cos 2πx₁`), `bump` (narrow Gaussian at the origin of a torus).
pub fn parse_x(spec: &str) -> Result<XFunction> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| -> Result<f64> {
        s.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad number `{s}` in `{spec}`")))
    };
    match parts.as_slice() {
        ["one"] => Ok(XFunction::constant(c(1.0))),
        ["const", v] => Ok(XFunction::constant(c(num(v)?))),
        ["trig", a, b] => Ok(XFunction::cosine(num(a)?, num(b)?)),
        ["bump"] => Ok(XFunction::new("bump", 1.0, |x| {
            let d = x[0] - x[0].round();
            c((-50.0 * d * d).exp())
        })),
        _ => Err(Error::Config(format!("unknown position family `{spec}`"))),
    }
}
