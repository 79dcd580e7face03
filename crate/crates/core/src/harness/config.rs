use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::benchmarks::{benchmark, cells_for_dofs, BenchmarkId};
use crate::element::SpaceKind;
use crate::solver::{Initialization, SchemeOptions, SensorMode};
use crate::stabilization::Projection;
use crate::weno::{WenoParams, WenoScheme};
use crate::{Error, Result};

/// Stabilization scheme selected for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    CcWeno,
    CvWeno,
    /// CV-WENO plus shock-capturing quadrature.
    CvWenoSc,
    /// `γ_e ≡ 0`.
    LowOrder,
    /// `γ_e ≡ 1`.
    None,
    /// Plain Galerkin, no stabilization term.
    Galerkin,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::CcWeno,
        Scheme::CvWeno,
        Scheme::CvWenoSc,
        Scheme::LowOrder,
        Scheme::None,
        Scheme::Galerkin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::CcWeno => "cc-weno",
            Scheme::CvWeno => "cv-weno",
            Scheme::CvWenoSc => "cv-weno-sc",
            Scheme::LowOrder => "low-order",
            Scheme::None => "none",
            Scheme::Galerkin => "galerkin",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Lookup(format!("unknown scheme '{s}'")))
    }
}

/// Tunable WENO constants; the reconstruction type comes from [`Scheme`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WenoOverrides {
    pub epsilon: f64,
    pub r: f64,
    pub q_sensor: f64,
    pub q_beta: f64,
    pub gamma_vertex: f64,
}

impl Default for WenoOverrides {
    fn default() -> Self {
        let d = WenoParams::default();
        Self {
            epsilon: d.epsilon,
            r: d.r,
            q_sensor: d.q_sensor,
            q_beta: d.q_beta,
            gamma_vertex: d.gamma_vertex,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilizationOverrides {
    pub cutoff: f64,
    pub projection: Projection,
}

impl Default for StabilizationOverrides {
    fn default() -> Self {
        Self {
            cutoff: 0.9,
            projection: Projection::NodalAverage,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory for result files; nothing is written when absent.
    pub dir: Option<PathBuf>,
    /// Write a snapshot every this many steps (0: final state only).
    pub every: usize,
}

/// One benchmark run. Serialized as TOML: top-level keys plus `[weno]`,
/// `[stabilization]` and `[output]` sections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub benchmark: BenchmarkId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceKind>,
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    #[serde(default = "default_degree")]
    pub p: usize,
    /// Cells per axis; one entry is used for every axis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<usize>>,
    /// Per-axis DOF target, used when `cells` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dofs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limiter: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initialization: Option<Initialization>,
    #[serde(default = "default_true")]
    pub over_integrate: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub weno: WenoOverrides,
    #[serde(default)]
    pub stabilization: StabilizationOverrides,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_scheme() -> Scheme {
    Scheme::CvWeno
}

fn default_degree() -> usize {
    2
}

fn default_cfl() -> f64 {
    0.1
}

fn default_true() -> bool {
    true
}

/// A config with every optional decision fixed by the benchmark defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedConfig {
    pub benchmark: BenchmarkId,
    pub space: SpaceKind,
    pub scheme: Scheme,
    pub p: usize,
    pub cells: [usize; 2],
    pub t_end: f64,
    pub cfl: f64,
    pub initialization: Initialization,
    pub options: SchemeOptions,
    pub output: OutputConfig,
}

impl BenchmarkConfig {
    pub fn new(benchmark: BenchmarkId) -> Self {
        Self {
            benchmark,
            space: None,
            scheme: default_scheme(),
            p: default_degree(),
            cells: None,
            dofs: None,
            t_end: None,
            cfl: default_cfl(),
            limiter: None,
            initialization: None,
            over_integrate: true,
            seed: 0,
            weno: WenoOverrides::default(),
            stabilization: StabilizationOverrides::default(),
            output: OutputConfig::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn scheme_options(&self, limiter: bool) -> SchemeOptions {
        let scheme = match self.scheme {
            Scheme::CcWeno => WenoScheme::CellCell,
            _ => WenoScheme::CellVertex,
        };
        let w = self.weno;
        let weno = WenoParams {
            epsilon: w.epsilon,
            r: w.r,
            q_sensor: w.q_sensor,
            q_beta: w.q_beta,
            gamma_vertex: w.gamma_vertex,
            scheme,
        };
        let sensor = match self.scheme {
            Scheme::CcWeno | Scheme::CvWeno | Scheme::CvWenoSc => SensorMode::Weno,
            Scheme::LowOrder => SensorMode::Fixed(0.0),
            Scheme::None => SensorMode::Fixed(1.0),
            Scheme::Galerkin => SensorMode::Off,
        };
        let mut options = SchemeOptions {
            sensor,
            weno,
            limiter,
            over_integrate: self.over_integrate,
            ..SchemeOptions::default()
        };
        options.stabilization.cutoff = self.stabilization.cutoff;
        options.stabilization.projection = self.stabilization.projection;
        options.stabilization.redistribution = self.scheme == Scheme::CvWenoSc;
        options
    }

    /// Fills in benchmark defaults and checks the result.
    pub fn resolve(&self) -> Result<ResolvedConfig> {
        let bench = benchmark(self.benchmark);
        let space = self.space.unwrap_or(bench.default_space);
        if self.p == 0 {
            return Err(Error::Config("polynomial degree must be at least 1".into()));
        }
        let cells = match (&self.cells, self.dofs) {
            (Some(c), _) => match c.as_slice() {
                [n] => [*n, if bench.dim == 2 { *n } else { 1 }],
                [nx, ny] if bench.dim == 2 => [*nx, *ny],
                _ => {
                    return Err(Error::Config(format!(
                        "expected 1 or {} cell counts, got {}",
                        bench.dim,
                        c.len()
                    )))
                }
            },
            (None, Some(n)) => {
                let e = cells_for_dofs(n, self.p, space);
                [e, if bench.dim == 2 { e } else { 1 }]
            }
            (None, None) => match bench.default_cells {
                Some(c) => c,
                None => {
                    let e = cells_for_dofs(bench.default_dofs, self.p, space);
                    [e, if bench.dim == 2 { e } else { 1 }]
                }
            },
        };
        if cells[0] == 0 || cells[1] == 0 {
            return Err(Error::Config("cell counts must be positive".into()));
        }
        let t_end = self.t_end.unwrap_or(bench.t_end);
        if !(t_end >= 0.0) {
            return Err(Error::Config(format!("t_end must be nonnegative, got {t_end}")));
        }
        if !(self.cfl > 0.0) {
            return Err(Error::Config(format!("cfl must be positive, got {}", self.cfl)));
        }
        let limiter = self.limiter.unwrap_or(bench.limiter);
        Ok(ResolvedConfig {
            benchmark: self.benchmark,
            space,
            scheme: self.scheme,
            p: self.p,
            cells,
            t_end,
            cfl: self.cfl,
            initialization: self.initialization.unwrap_or(bench.initialization),
            options: self.scheme_options(limiter),
            output: self.output.clone(),
        })
    }
}
