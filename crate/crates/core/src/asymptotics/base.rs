use serde::{Deserialize, Serialize};

use super::sampling::{euclid, sphere_coords, sphere_point, QuasiRandom, SampleSpace};
use crate::error::{Error, Result};
use crate::symbols::thickening::ThickeningSet;

/// Built-in families `A_t` of sets with full density at infinity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DfullFamily {
    /// `{|ξ| > t}` with the sparse set `⋃_k [2^k, 2^k + k]` removed.
    SparseDyadicComplement,
    /// `{|ξ| > t}`.
    Exterior,
}

impl DfullFamily {
    pub fn contains(&self, t: f64, xi: &[f64]) -> bool {
        if euclid(xi) <= t {
            return false;
        }
        match self {
            DfullFamily::Exterior => true,
            DfullFamily::SparseDyadicComplement => !in_sparse_dyadic(xi[0]),
        }
    }
}

/// Membership in `⋃_{k ≥ 1} [2^k, 2^k + k]`.
pub fn in_sparse_dyadic(x: f64) -> bool {
    if x < 2.0 {
        return false;
    }
    // x lies in [2^k, 2^{k+1}); only the block starting at 2^k can contain it.
    let k = x.log2().floor();
    x <= 2f64.powf(k) + k
}

/// A filter base at infinity of the dual, indexed by a scale `t`; member sets
/// shrink as `t` grows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "base", rename_all = "kebab-case")]
pub enum FilterBase {
    /// Complements of balls: `{|ξ| > t}`.
    Standard,
    /// Cones `{|ξ| > t, angle(ξ, ω₀) < 1/t}`.
    Directional { omega0: Vec<f64> },
    /// A full-density family `A_t`.
    Dfull { sets: DfullFamily },
    /// Complements of thickenings: `{dist(ξ, E) > t}`.
    Ethick {
        #[serde(rename = "E")]
        e: ThickeningSet,
    },
    /// Pointwise conjunction of several bases at a common scale.
    Intersection { bases: Vec<FilterBase> },
}

impl FilterBase {
    pub fn directional(omega0: &[f64]) -> Result<FilterBase> {
        let n = euclid(omega0);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidArgument("direction ω₀ must be a non-zero vector".into()));
        }
        Ok(FilterBase::Directional { omega0: omega0.iter().map(|v| v / n).collect() })
    }

    pub fn name(&self) -> String {
        match self {
            FilterBase::Standard => "standard".into(),
            FilterBase::Directional { omega0 } => format!("directional{omega0:?}"),
            FilterBase::Dfull { sets } => format!("dfull({sets:?})"),
            FilterBase::Ethick { e } => format!("ethick({})", e.name()),
            FilterBase::Intersection { bases } => {
                let names: Vec<String> = bases.iter().map(|b| b.name()).collect();
                format!("intersection({})", names.join(","))
            }
        }
    }

    pub fn validate(&self, space: &SampleSpace) -> Result<()> {
        let d = space.dim();
        let check = |want: usize, what: &str| {
            if want == d {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{what} has dimension {want}, dual has {d}")))
            }
        };
        match self {
            FilterBase::Standard => Ok(()),
            FilterBase::Directional { omega0 } => {
                if !(euclid(omega0) > 0.0) {
                    return Err(Error::InvalidArgument("direction ω₀ must be non-zero".into()));
                }
                check(omega0.len(), "ω₀")
            }
            FilterBase::Dfull { .. } => check(1, "full-density family"),
            FilterBase::Ethick { e } => {
                if e.gap_witness(1.0).is_none() {
                    return Err(Error::InvalidArgument(format!(
                        "set {} is syndetic: complements of its thickenings are empty",
                        e.name()
                    )));
                }
                check(e.dim(), "thickened set")
            }
            FilterBase::Intersection { bases } => {
                if bases.is_empty() {
                    return Err(Error::InvalidArgument("empty intersection of bases".into()));
                }
                bases.iter().try_for_each(|b| b.validate(space))
            }
        }
    }

    pub fn contains(&self, t: f64, xi: &[f64]) -> bool {
        match self {
            FilterBase::Standard => euclid(xi) > t,
            FilterBase::Directional { omega0 } => {
                let r = euclid(xi);
                if r <= t {
                    return false;
                }
                let w = euclid(omega0);
                let c = xi.iter().zip(omega0).map(|(a, b)| a * b).sum::<f64>() / (r * w);
                c.clamp(-1.0, 1.0).acos() < 1.0 / t
            }
            FilterBase::Dfull { sets } => sets.contains(t, xi),
            FilterBase::Ethick { e } => e.distance(xi) > t,
            FilterBase::Intersection { bases } => bases.iter().all(|b| b.contains(t, xi)),
        }
    }

    /// Up to `count` points of the member set at scale `t`, spread over
    /// radii `[t, window·t]`. Deterministic in `seed`.
    pub fn sample(
        &self,
        t: f64,
        count: usize,
        window: f64,
        space: &SampleSpace,
        seed: u64,
    ) -> Result<Vec<Vec<f64>>> {
        self.validate(space)?;
        let mut raw = Vec::with_capacity(count);
        self.propose(t, count, window, space, seed, &mut raw);
        let mut out: Vec<Vec<f64>> = raw
            .into_iter()
            .map(|mut p| {
                space.snap(&mut p);
                p
            })
            .filter(|p| self.contains(t, p))
            .collect();
        out.dedup();
        if out.is_empty() {
            return Err(Error::EmptyMemberSet { base: self.name(), scale: t });
        }
        Ok(out)
    }

    fn propose(
        &self,
        t: f64,
        count: usize,
        window: f64,
        space: &SampleSpace,
        seed: u64,
        out: &mut Vec<Vec<f64>>,
    ) {
        let d = space.dim();
        // Radii slightly above t so lattice rounding keeps most points inside.
        let lo = t * (1.0 + 1e-9) + if space.is_lattice() { 1.0 } else { 0.0 };
        let log_w = window.max(1.0 + 1e-9).ln();
        match self {
            FilterBase::Standard => {
                let mut q = QuasiRandom::new(1 + sphere_coords(d), seed);
                let mut u = vec![0.0; q.dim()];
                for i in 0..count {
                    q.next_into(&mut u);
                    let r = lo * (u[0] * log_w).exp();
                    let dir = if i < 2 * d {
                        let mut e = vec![0.0; d];
                        e[i / 2] = if i % 2 == 0 { 1.0 } else { -1.0 };
                        e
                    } else {
                        sphere_point(&u[1..], d)
                    };
                    out.push(dir.iter().map(|v| v * r).collect());
                }
            }
            FilterBase::Directional { omega0 } => {
                let w = euclid(omega0);
                let axis: Vec<f64> = omega0.iter().map(|v| v / w).collect();
                let mut q = QuasiRandom::new(2 + sphere_coords(d), seed);
                let mut u = vec![0.0; q.dim()];
                let aperture = (1.0 / t).min(std::f64::consts::PI);
                for i in 0..count {
                    q.next_into(&mut u);
                    let r = lo * (u[0] * log_w).exp();
                    let dir = if d == 1 || i == 0 {
                        axis.clone()
                    } else {
                        // Unit vector orthogonal to the axis.
                        let g = sphere_point(&u[2..], d);
                        let c: f64 = g.iter().zip(&axis).map(|(a, b)| a * b).sum();
                        let mut perp: Vec<f64> = g.iter().zip(&axis).map(|(a, b)| a - c * b).collect();
                        let pn = euclid(&perp);
                        if pn < 1e-12 {
                            axis.clone()
                        } else {
                            perp.iter_mut().for_each(|v| *v /= pn);
                            let a = 0.999 * aperture * u[1];
                            axis.iter().zip(&perp).map(|(x, y)| a.cos() * x + a.sin() * y).collect()
                        }
                    };
                    out.push(dir.iter().map(|v| v * r).collect());
                }
            }
            FilterBase::Dfull { .. } => {
                let mut q = QuasiRandom::new(1 + sphere_coords(d), seed);
                let mut u = vec![0.0; q.dim()];
                for i in 0..count {
                    q.next_into(&mut u);
                    let r = lo * (u[0] * log_w).exp();
                    let dir = if i < 2 * d {
                        let mut e = vec![0.0; d];
                        e[i / 2] = if i % 2 == 0 { 1.0 } else { -1.0 };
                        e
                    } else {
                        sphere_point(&u[1..], d)
                    };
                    out.push(dir.iter().map(|v| v * r).collect());
                }
            }
            FilterBase::Ethick { e } => {
                let half = count / 2;
                let mut q = QuasiRandom::new(d + 1, seed);
                let mut u = vec![0.0; q.dim()];
                for _ in 0..half {
                    q.next_into(&mut u);
                    let s = t * (u[d] * log_w).exp();
                    if let Some(w) = e.gap_witness(s) {
                        out.push(w);
                    }
                }
                let extent = window * t + e.gap_witness(t).map(|w| euclid(&w)).unwrap_or(0.0);
                for _ in half..count {
                    q.next_into(&mut u);
                    out.push(u[..d].iter().map(|v| extent * (2.0 * v - 1.0)).collect());
                }
            }
            FilterBase::Intersection { bases } => {
                let per = count.div_ceil(bases.len());
                for (k, b) in bases.iter().enumerate() {
                    b.propose(t, per, window, space, seed.wrapping_add(k as u64 * 0x9e37), out);
                }
            }
        }
    }
}
