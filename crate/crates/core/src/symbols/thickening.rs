//! Point sets `E` of the dual whose thickenings `E + K` never cover everything,
//! and their complements as a filter at infinity.

use serde::{Deserialize, Serialize};

use crate::asymptotics::FilterBase;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ThickeningSet {
    /// `(-∞, a]` on the line.
    HalfLine { a: f64 },
    /// `⋃_{n ≥ 0} [n², n² + width]` on the line; gaps grow like `2n`.
    ExpandingIntervals { width: f64 },
    /// Graph of `t ↦ t²` in the plane.
    Parabola,
    /// The whole space (syndetic, hence degenerate).
    Whole { dim: usize },
}

impl ThickeningSet {
    pub fn dim(&self) -> usize {
        match self {
            ThickeningSet::Parabola => 2,
            ThickeningSet::Whole { dim } => *dim,
            _ => 1,
        }
    }

    pub fn name(&self) -> String {
        match self {
            ThickeningSet::HalfLine { a } => format!("half-line({a})"),
            ThickeningSet::ExpandingIntervals { width } => format!("expanding-intervals({width})"),
            ThickeningSet::Parabola => "parabola".into(),
            ThickeningSet::Whole { dim } => format!("whole({dim})"),
        }
    }

    pub fn distance(&self, xi: &[f64]) -> f64 {
        match self {
            ThickeningSet::HalfLine { a } => (xi[0] - a).max(0.0),
            ThickeningSet::ExpandingIntervals { width } => {
                let x = xi[0];
                if x <= 0.0 {
                    return -x;
                }
                let n = x.sqrt().floor();
                [n - 1.0, n, n + 1.0]
                    .iter()
                    .filter(|m| **m >= 0.0)
                    .map(|m| {
                        let (lo, hi) = (m * m, m * m + width);
                        if x < lo { lo - x } else if x > hi { x - hi } else { 0.0 }
                    })
                    .fold(f64::INFINITY, f64::min)
            }
            ThickeningSet::Parabola => parabola_distance(xi[0], xi[1]),
            ThickeningSet::Whole { .. } => 0.0,
        }
    }

    /// A point at distance greater than `s` from the set, if any.
    pub fn gap_witness(&self, s: f64) -> Option<Vec<f64>> {
        match self {
            ThickeningSet::HalfLine { a } => Some(vec![a + s + 1.0]),
            ThickeningSet::ExpandingIntervals { width } => {
                // Gap after [n², n²+w] has length 2n + 1 - w.
                let n = ((2.0 * (s + 1.0) + width - 1.0) / 2.0).max(0.0).ceil() + 1.0;
                let lo = n * n + width;
                let hi = (n + 1.0) * (n + 1.0);
                Some(vec![0.5 * (lo + hi)])
            }
            ThickeningSet::Parabola => Some(vec![0.0, -(s + 1.0)]),
            ThickeningSet::Whole { .. } => None,
        }
    }

    /// Point `(t, t²) + s·n(t)` on the normal line through the parabola.
    pub fn parabola_normal_point(t: f64, s: f64) -> [f64; 2] {
        let r = (1.0 + 4.0 * t * t).sqrt();
        [t - 2.0 * t * s / r, t * t + s / r]
    }
}

/// Distance from `(u, v)` to the graph of `t ↦ t²`: stationary points solve
/// `2s³ + (1 - 2v)s - u = 0`.
fn parabola_distance(u: f64, v: f64) -> f64 {
    let p = 0.5 * (1.0 - 2.0 * v);
    let q = -0.5 * u;
    let mut roots = Vec::with_capacity(3);
    let disc = 0.25 * q * q + p * p * p / 27.0;
    if disc > 0.0 {
        let sd = disc.sqrt();
        roots.push((-0.5 * q + sd).cbrt() + (-0.5 * q - sd).cbrt());
    } else {
        let r = (-p / 3.0).sqrt();
        let arg = if r > 0.0 { (-0.5 * q / (r * r * r)).clamp(-1.0, 1.0) } else { 0.0 };
        let phi = arg.acos();
        for k in 0..3 {
            roots.push(2.0 * r * ((phi - std::f64::consts::TAU * k as f64) / 3.0).cos());
        }
    }
    roots
        .into_iter()
        .map(|mut s| {
            for _ in 0..3 {
                let f = s * s * s + p * s + q;
                let df = 3.0 * s * s + p;
                if df.abs() > 1e-300 {
                    s -= f / df;
                }
            }
            ((s - u).powi(2) + (s * s - v).powi(2)).sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Complements of the thickenings `E + B(0, t)` as a filter base; rejects
/// sets whose thickenings exhaust the space.
pub fn syndetic_thickening_filter_data(set: ThickeningSet) -> Result<FilterBase> {
    if set.gap_witness(1.0).is_none() {
        return Err(Error::InvalidArgument(format!(
            "set {} is syndetic: every thickening covers the dual",
            set.name()
        )));
    }
    Ok(FilterBase::Ethick { e: set })
}
