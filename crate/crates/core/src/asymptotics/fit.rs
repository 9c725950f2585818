use serde::Serialize;

/// `e_k = max_{j ≥ k} v_j`: the smallest non-increasing majorant.
pub fn monotone_envelope(values: &[f64]) -> Vec<f64> {
    let mut out = values.to_vec();
    for k in (0..out.len().saturating_sub(1)).rev() {
        out[k] = out[k].max(out[k + 1]);
    }
    out
}

/// Least-squares fit `y ≈ a + b·s^{-p}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerFit {
    pub a: f64,
    pub b: f64,
    pub p: f64,
    /// Largest absolute deviation of the data from the fitted curve.
    pub residual: f64,
}

impl PowerFit {
    pub fn eval(&self, s: f64) -> f64 {
        self.a + self.b * s.powf(-self.p)
    }
}

/// Fit with a fixed exponent.
pub fn fit_fixed(scales: &[f64], values: &[f64], p: f64) -> PowerFit {
    let n = scales.len();
    if n == 0 {
        return PowerFit { a: 0.0, b: 0.0, p, residual: 0.0 };
    }
    if n == 1 {
        return PowerFit { a: values[0], b: 0.0, p, residual: 0.0 };
    }
    let xs: Vec<f64> = scales.iter().map(|s| s.powf(-p)).collect();
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = values.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(values).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let residual = xs
        .iter()
        .zip(values)
        .map(|(x, y)| (a + b * x - y).abs())
        .fold(0.0, f64::max);
    PowerFit { a, b, p, residual }
}

/// Fit with the exponent chosen from a grid on `(0, 2]` by smallest squared error.
pub fn fit_free(scales: &[f64], values: &[f64]) -> PowerFit {
    let mut best: Option<(f64, PowerFit)> = None;
    for i in 1..=80 {
        let p = i as f64 * 0.025;
        let f = fit_fixed(scales, values, p);
        let sse: f64 = scales.iter().zip(values).map(|(s, y)| (f.eval(*s) - y).powi(2)).sum();
        if best.as_ref().is_none_or(|(e, _)| sse < *e) {
            best = Some((sse, f));
        }
    }
    best.map(|b| b.1).unwrap_or(PowerFit { a: 0.0, b: 0.0, p: 1.0, residual: 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_is_non_increasing_majorant() {
        let e = monotone_envelope(&[1.0, 3.0, 2.0, 2.5, 0.5]);
        assert_eq!(e, vec![3.0, 3.0, 2.5, 2.5, 0.5]);
    }

    #[test]
    fn exact_power_law_is_recovered() {
        let s = [1e2, 1e3, 1e4, 1e5, 1e6];
        let y: Vec<f64> = s.iter().map(|t: &f64| 3.0 - 2.0 / t.sqrt()).collect();
        let f = fit_fixed(&s, &y, 0.5);
        assert!((f.a - 3.0).abs() < 1e-12 && (f.b + 2.0).abs() < 1e-10);
        let y: Vec<f64> = s.iter().map(|t: &f64| 0.75 * t.powf(-0.25)).collect();
        let f = fit_free(&s, &y);
        assert!(f.a.abs() < 1e-10 && (f.p - 0.25).abs() < 1e-12);
    }
}
