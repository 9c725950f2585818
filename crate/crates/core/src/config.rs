//! JSON run configurations for the command-line tool.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{AsymptoticSchedule, FilterBase};
use crate::error::{Error, Result};
use crate::lca::{dual_grid, GroupGrid, GroupKind};
use crate::spectral::{SvdMode, Tolerances, TruncationSchedule};
use crate::symbols::{parse_dual, parse_x, Symbol, TensorTerm};

pub const SCHEMA: u32 = 1;

/// Position group and, optionally, a truncated dual (the full dual otherwise).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub x: GroupKind,
    #[serde(default)]
    pub dual: Option<GroupKind>,
}

impl GroupSpec {
    pub fn grids(&self) -> Result<(GroupGrid, GroupGrid)> {
        let x = GroupGrid::new(self.x.clone())?;
        let xi = match &self.dual {
            Some(k) => GroupGrid::new(k.clone())?,
            None => dual_grid(&x)?,
        };
        x.pair_lengths(&xi)?;
        Ok((x, xi))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SymbolSpec {
    /// `Σ γ_i ⊗ ψ_i (+ shift)` from family names.
    Tensor {
        gamma: String,
        psi: String,
        #[serde(default)]
        extra: Vec<[String; 2]>,
        #[serde(default)]
        shift: Option<f64>,
    },
    /// Table in the `x_index,xi_index,re,im` CSV layout.
    Table { path: PathBuf },
}

impl SymbolSpec {
    pub fn build(&self, x: GroupGrid, xi: GroupGrid, base_dir: &Path) -> Result<Symbol> {
        match self {
            SymbolSpec::Tensor { gamma, psi, extra, shift } => {
                let mut terms = vec![TensorTerm { gamma: parse_x(gamma)?, psi: parse_dual(psi)? }];
                for [g, p] in extra {
                    terms.push(TensorTerm { gamma: parse_x(g)?, psi: parse_dual(p)? });
                }
                let s = Symbol::separable(terms, x, xi)?;
                match shift {
                    Some(c) => s.shifted(Complex64::new(*c, 0.0)),
                    None => Ok(s),
                }
            }
            SymbolSpec::Table { path } => {
                let p = if path.is_relative() { base_dir.join(path) } else { path.clone() };
                Symbol::from_csv(&p, x, xi)
            }
        }
    }
}

/// A real number or a `[re, im]` pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    Real(f64),
    Complex([f64; 2]),
}

impl LambdaSpec {
    pub fn value(&self) -> Complex64 {
        match *self {
            LambdaSpec::Real(r) => Complex64::new(r, 0.0),
            LambdaSpec::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SvdSpec {
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_mode")]
    pub mode: SvdMode,
    #[serde(default)]
    pub smallest: bool,
}

fn default_k() -> usize {
    8
}

fn default_mode() -> SvdMode {
    SvdMode::Auto
}

impl Default for SvdSpec {
    fn default() -> Self {
        SvdSpec { k: default_k(), mode: default_mode(), smallest: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Directory for `report.json`, `sigma.csv` and matrix dumps.
    pub dir: PathBuf,
    /// Also write dense operator matrices (`op.bin`, `op.csv`).
    #[serde(default)]
    pub matrices: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    pub task: String,
    #[serde(default)]
    pub group: Option<GroupSpec>,
    #[serde(default)]
    pub symbol: Option<SymbolSpec>,
    #[serde(default = "standard_base")]
    pub base: FilterBase,
    #[serde(default)]
    pub schedule: TruncationSchedule,
    #[serde(default)]
    pub asymptotics: AsymptoticSchedule,
    #[serde(default)]
    pub lambdas: Vec<LambdaSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub svd: SvdSpec,
    /// Resolution of the predicted cluster set.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

fn standard_base() -> FilterBase {
    FilterBase::Standard
}

fn default_epsilon() -> f64 {
    0.05
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if cfg.schema != SCHEMA {
            return Err(Error::Config(format!("unsupported schema {} (expected {SCHEMA})", cfg.schema)));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        RunConfig::from_json(&std::fs::read_to_string(path)?)
    }

    /// Config for a named task with every other field at its default.
    pub fn for_task(task: &str) -> RunConfig {
        RunConfig {
            schema: SCHEMA,
            task: task.into(),
            group: None,
            symbol: None,
            base: FilterBase::Standard,
            schedule: TruncationSchedule::default(),
            asymptotics: AsymptoticSchedule::default(),
            lambdas: Vec::new(),
            tolerances: Tolerances::default(),
            svd: SvdSpec::default(),
            epsilon: default_epsilon(),
            seed: 0,
            output: None,
        }
    }

    /// Grids from `group`, or the largest torus truncation of the schedule.
    pub fn grids(&self) -> Result<(GroupGrid, GroupGrid)> {
        match &self.group {
            Some(g) => g.grids(),
            None => {
                let band = *self
                    .schedule
                    .bands
                    .last()
                    .ok_or_else(|| Error::Config("no group and an empty schedule".into()))?;
                GroupGrid::torus_pair(band, self.schedule.oversample)
            }
        }
    }

    pub fn symbol(&self, base_dir: &Path) -> Result<Symbol> {
        let spec = self.symbol.as_ref().ok_or_else(|| Error::Config(format!("task `{}` needs a symbol", self.task)))?;
        let (x, xi) = self.grids()?;
        spec.build(x, xi, base_dir)
    }

    pub fn asymptotic_schedule(&self) -> AsymptoticSchedule {
        AsymptoticSchedule { seed: self.asymptotics.seed ^ self.seed, ..self.asymptotics.clone() }
    }

    pub fn lambda_values(&self) -> Vec<Complex64> {
        self.lambdas.iter().map(LambdaSpec::value).collect()
    }
}
