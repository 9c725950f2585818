//! Symbols `f(x, ξ)` on phase space: closure-backed or tabulated.

pub mod diagnostics;
pub mod families;
pub mod thickening;

use std::fmt;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::PhaseFunction;
use crate::lca::{GridFunction, GroupGrid};

pub use diagnostics::{
    cesaro_mean, class_surrogate, gradient_decay_test, vanishing_oscillation_test, ball_exhaustion,
    CesaroReport, GradientReport, OscillationOptions, OscillationProfile, Verdict,
};
pub use families::{
    cesaro_indicator, directional_decay_symbol, one_sided, parabola_envelope, parse_dual, parse_x, power_beta,
    radial_oscillation_symbol, vo_symbol,
};
pub use thickening::{syndetic_thickening_filter_data, ThickeningSet};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type PointFn = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;
pub type GradFn = Arc<dyn Fn(&[f64]) -> Vec<Complex64> + Send + Sync>;
pub type SymbolFn = Arc<dyn Fn(&[f64], &[f64]) -> Complex64 + Send + Sync>;

/// Bounded function on the dual, evaluable at arbitrary (off-grid) points.
#[derive(Clone)]
pub struct DualFunction {
    pub name: String,
    f: PointFn,
    sup: f64,
    gradient: Option<GradFn>,
}

impl fmt::Debug for DualFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DualFunction").field("name", &self.name).field("sup", &self.sup).finish()
    }
}

impl DualFunction {
    pub fn new(
        name: impl Into<String>,
        sup: f64,
        f: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        DualFunction { name: name.into(), f: Arc::new(f), sup, gradient: None }
    }

    pub fn real(name: impl Into<String>, sup: f64, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        DualFunction::new(name, sup, move |xi| Complex64::new(f(xi), 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        DualFunction::new(format!("const:{}", c.re), c.norm(), move |_| c)
            .with_gradient(|xi| vec![Complex64::new(0.0, 0.0); xi.len()])
    }

    pub fn with_gradient(
        mut self,
        g: impl Fn(&[f64]) -> Vec<Complex64> + Send + Sync + 'static,
    ) -> Self {
        self.gradient = Some(Arc::new(g));
        self
    }

    #[inline]
    pub fn eval(&self, xi: &[f64]) -> Complex64 {
        (self.f)(xi)
    }

    pub fn gradient(&self, xi: &[f64]) -> Option<Vec<Complex64>> {
        self.gradient.as_ref().map(|g| g(xi))
    }

    pub fn has_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup
    }

    pub fn sample_on(&self, grid: &GroupGrid) -> GridFunction {
        GridFunction::from_fn(grid.clone(), |p| self.eval(p))
    }

    pub fn closure(&self) -> PointFn {
        self.f.clone()
    }
}

/// Bounded function of the position variable.
#[derive(Clone)]
pub struct XFunction {
    pub name: String,
    f: PointFn,
    sup: f64,
}

impl fmt::Debug for XFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("XFunction").field("name", &self.name).field("sup", &self.sup).finish()
    }
}

impl XFunction {
    pub fn new(
        name: impl Into<String>,
        sup: f64,
        f: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        XFunction { name: name.into(), f: Arc::new(f), sup }
    }

    pub fn constant(c: Complex64) -> Self {
        XFunction::new(format!("const:{}", c.re), c.norm(), move |_| c)
    }

    /// `a + b·cos(2πx₁)`.
    pub fn cosine(a: f64, b: f64) -> Self {
        XFunction::new(format!("trig:{a}:{b}"), a.abs() + b.abs(), move |x| {
            Complex64::new(a + b * (std::f64::consts::TAU * x[0]).cos(), 0.0)
        })
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        (self.f)(x)
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup
    }

    pub fn sample_on(&self, grid: &GroupGrid) -> GridFunction {
        GridFunction::from_fn(grid.clone(), |p| self.eval(p))
    }
}

#[derive(Clone, Debug)]
pub struct TensorTerm {
    pub gamma: XFunction,
    pub psi: DualFunction,
}

#[derive(Clone)]
enum Source {
    Closure { f: SymbolFn, terms: Option<Vec<TensorTerm>> },
    Table,
}

/// Symbol on `X × Ξ` with a cached table on the grids.
#[derive(Clone)]
pub struct Symbol {
    pub label: String,
    xgrid: GroupGrid,
    xigrid: GroupGrid,
    source: Source,
    sup: f64,
    table: Arc<OnceLock<PhaseFunction>>,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol")
            .field("label", &self.label)
            .field("xgrid", self.xgrid.kind())
            .field("xigrid", self.xigrid.kind())
            .field("sup", &self.sup)
            .finish()
    }
}

impl Symbol {
    fn check_grids(xgrid: &GroupGrid, xigrid: &GroupGrid) -> Result<()> {
        xgrid.pair_lengths(xigrid).map(|_| ())
    }

    /// Closure-backed symbol.
    pub fn from_fn(
        label: impl Into<String>,
        sup: f64,
        xgrid: GroupGrid,
        xigrid: GroupGrid,
        f: impl Fn(&[f64], &[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Result<Symbol> {
        Self::check_grids(&xgrid, &xigrid)?;
        Ok(Symbol {
            label: label.into(),
            xgrid,
            xigrid,
            source: Source::Closure { f: Arc::new(f), terms: None },
            sup,
            table: Arc::new(OnceLock::new()),
        })
    }

    /// Finite sum of tensor products `Σ γ_k ⊗ ψ_k`.
    pub fn separable(terms: Vec<TensorTerm>, xgrid: GroupGrid, xigrid: GroupGrid) -> Result<Symbol> {
        Self::check_grids(&xgrid, &xigrid)?;
        if terms.is_empty() {
            return Err(Error::InvalidArgument("separable symbol needs at least one term".into()));
        }
        let label = terms
            .iter()
            .map(|t| format!("{}⊗{}", t.gamma.name, t.psi.name))
            .collect::<Vec<_>>()
            .join(" + ");
        let sup = terms.iter().map(|t| t.gamma.sup_bound() * t.psi.sup_bound()).sum();
        let ts = terms.clone();
        let f: SymbolFn = Arc::new(move |x: &[f64], xi: &[f64]| {
            ts.iter().map(|t| t.gamma.eval(x) * t.psi.eval(xi)).sum()
        });
        Ok(Symbol {
            label,
            xgrid,
            xigrid,
            source: Source::Closure { f, terms: Some(terms) },
            sup,
            table: Arc::new(OnceLock::new()),
        })
    }

    /// `f(x, ξ) = γ(x)·ψ(ξ)`.
    pub fn tensor(gamma: XFunction, psi: DualFunction, xgrid: GroupGrid, xigrid: GroupGrid) -> Result<Symbol> {
        Symbol::separable(vec![TensorTerm { gamma, psi }], xgrid, xigrid)
    }

    /// Tabulated symbol; asymptotic operations reject it.
    pub fn from_table(label: impl Into<String>, table: PhaseFunction) -> Result<Symbol> {
        Self::check_grids(&table.first, &table.second)?;
        let sup = table.sup_norm();
        let (xgrid, xigrid) = (table.first.clone(), table.second.clone());
        let cell = OnceLock::new();
        let _ = cell.set(table);
        Ok(Symbol {
            label: label.into(),
            xgrid,
            xigrid,
            source: Source::Table,
            sup,
            table: Arc::new(cell),
        })
    }

    /// Reads `x-index, ξ-index, re, im` rows; absent entries are zero.
    pub fn from_csv(path: &Path, xgrid: GroupGrid, xigrid: GroupGrid) -> Result<Symbol> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)?;
        let mut table = PhaseFunction::zeros(xgrid.clone(), xigrid.clone());
        for rec in rdr.records() {
            let rec = rec?;
            if rec.len() != 4 {
                return Err(Error::Config(format!("symbol table row has {} fields, want 4", rec.len())));
            }
            if rec.get(0).is_some_and(|s| s.parse::<f64>().is_err()) {
                continue; // header
            }
            let parse = |i: usize| -> Result<f64> {
                rec[i].parse::<f64>().map_err(|e| Error::Config(format!("bad number `{}`: {e}", &rec[i])))
            };
            let (i, k) = (parse(0)? as usize, parse(1)? as usize);
            if i >= xgrid.len() || k >= xigrid.len() {
                return Err(Error::Config(format!("table index ({i}, {k}) outside the grids")));
            }
            table.set(i, k, Complex64::new(parse(2)?, parse(3)?));
        }
        Symbol::from_table(path.display().to_string(), table)
    }

    pub fn xgrid(&self) -> &GroupGrid {
        &self.xgrid
    }

    pub fn xigrid(&self) -> &GroupGrid {
        &self.xigrid
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup
    }

    pub fn is_closure(&self) -> bool {
        matches!(self.source, Source::Closure { .. })
    }

    pub fn terms(&self) -> Option<&[TensorTerm]> {
        match &self.source {
            Source::Closure { terms: Some(t), .. } => Some(t),
            _ => None,
        }
    }

    pub fn closure(&self) -> Result<&SymbolFn> {
        match &self.source {
            Source::Closure { f, .. } => Ok(f),
            Source::Table => Err(Error::TabulatedOnly),
        }
    }

    /// Evaluation at arbitrary coordinates.
    pub fn eval(&self, x: &[f64], xi: &[f64]) -> Result<Complex64> {
        Ok(self.closure()?(x, xi))
    }

    pub fn table(&self) -> &PhaseFunction {
        self.table.get_or_init(|| {
            let f = match &self.source {
                Source::Closure { f, .. } => f.clone(),
                Source::Table => unreachable!("tabulated symbols are built with their table"),
            };
            let xs: Vec<Vec<f64>> = (0..self.xgrid.len()).map(|i| self.xgrid.coords(i)).collect();
            let ks: Vec<Vec<f64>> = (0..self.xigrid.len()).map(|k| self.xigrid.coords(k)).collect();
            PhaseFunction::from_fn(self.xgrid.clone(), self.xigrid.clone(), |i, k| f(&xs[i], &ks[k]))
        })
    }

    /// The same closure on other grids.
    pub fn rebind(&self, xgrid: GroupGrid, xigrid: GroupGrid) -> Result<Symbol> {
        Self::check_grids(&xgrid, &xigrid)?;
        match &self.source {
            Source::Table => Err(Error::TabulatedOnly),
            Source::Closure { .. } => Ok(Symbol {
                label: self.label.clone(),
                xgrid,
                xigrid,
                source: self.source.clone(),
                sup: self.sup,
                table: Arc::new(OnceLock::new()),
            }),
        }
    }

    /// `f + c`.
    pub fn shifted(&self, c: Complex64) -> Result<Symbol> {
        if let Some(terms) = self.terms() {
            let mut terms = terms.to_vec();
            terms.push(TensorTerm { gamma: XFunction::constant(Complex64::new(1.0, 0.0)), psi: DualFunction::constant(c) });
            let mut s = Symbol::separable(terms, self.xgrid.clone(), self.xigrid.clone())?;
            s.label = format!("{} + {}", self.label, c);
            return Ok(s);
        }
        let f = self.closure()?.clone();
        Symbol::from_fn(
            format!("{} + {}", self.label, c),
            self.sup + c.norm(),
            self.xgrid.clone(),
            self.xigrid.clone(),
            move |x, xi| f(x, xi) + c,
        )
    }

    /// Coordinates of at most `cap` x-grid points, evenly strided.
    pub fn x_sample(&self, cap: usize) -> Vec<Vec<f64>> {
        let n = self.xgrid.len();
        let stride = n.div_ceil(cap.max(1)).max(1);
        (0..n).step_by(stride).map(|i| self.xgrid.coords(i)).collect()
    }
}
