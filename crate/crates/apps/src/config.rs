//! Command-line options and their per-example validation.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Example {
    Bessel,
    Inertial,
    Pipe,
    Helmholtz,
    Opscheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("--nr must be at least 4, got {0}")]
    RadialSize(usize),
    #[error("--re must be positive and finite, got {0}")]
    Reynolds(f64),
    #[error("--alpha must be positive and finite, got {0}")]
    Alpha(f64),
    #[error("--alpha must be nonzero and finite, got {0}")]
    AxialWavenumber(f64),
    #[error("--kappa must be finite, got {0}")]
    Kappa(f64),
    #[error("--tol must be positive, got {0}")]
    Tolerance(f64),
    #[error("inertial waves need --m >= 1")]
    InertialOrder,
    #[error("--mode {mode} exceeds the {n} available eigenvalues")]
    Mode { mode: usize, n: usize },
}

/// Raw command line; unset values take per-example defaults.
#[derive(Debug, Clone, Parser)]
#[command(
    name = "diskspec",
    version,
    about = "Sparse spectral solvers on the unit disk"
)]
pub struct Cli {
    pub example: Example,
    /// Azimuthal order.
    #[arg(long)]
    pub m: Option<u32>,
    /// Radial coefficients per field.
    #[arg(long)]
    pub nr: Option<usize>,
    /// Aspect ratio (inertial) or axial wavenumber (pipe).
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Reynolds number.
    #[arg(long, allow_negative_numbers = true)]
    pub re: Option<f64>,
    /// Helmholtz wavenumber.
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    /// Helmholtz coefficient-tail tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Solve the screened equation `∇²f − κ²f = s` instead.
    #[arg(long)]
    pub screened: bool,
    /// Eigenmode whose fields are written with `--fields`.
    #[arg(long, default_value_t = 0)]
    pub mode: usize,
    /// Seed of the randomized operator checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory receiving `r,theta,re,im` grid dumps.
    #[arg(long)]
    pub fields: Option<PathBuf>,
    /// Radial samples of the grid dumps.
    #[arg(long, default_value_t = 64)]
    pub grid_nr: usize,
    /// Angular samples of the grid dumps.
    #[arg(long, default_value_t = 128)]
    pub grid_ntheta: usize,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

/// Fully resolved and validated run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub example: Example,
    pub m: u32,
    pub n_r: usize,
    pub alpha: f64,
    pub re: f64,
    pub kappa: f64,
    pub tol: f64,
    pub screened: bool,
    pub mode: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub fields: Option<PathBuf>,
    pub grid_nr: usize,
    pub grid_ntheta: usize,
    pub format: Format,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, ConfigError> {
        let (m, n_r) = match cli.example {
            Example::Bessel => (50, 500),
            Example::Inertial => (1, 500),
            Example::Pipe => (1, 64),
            Example::Helmholtz | Example::Opscheck => (0, 32),
        };
        let cfg = Self {
            example: cli.example,
            m: cli.m.unwrap_or(m),
            n_r: cli.nr.unwrap_or(n_r),
            alpha: cli.alpha.unwrap_or(1.0),
            re: cli.re.unwrap_or(1e4),
            kappa: cli.kappa.unwrap_or(60.0),
            tol: cli.tol.unwrap_or(1e-10),
            screened: cli.screened,
            mode: cli.mode,
            seed: cli.seed,
            out: cli.out,
            fields: cli.fields,
            grid_nr: cli.grid_nr.max(1),
            grid_ntheta: cli.grid_ntheta.max(1),
            format: cli.format,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match self.example {
            Example::Bessel | Example::Inertial | Example::Pipe if self.n_r < 4 => {
                return Err(ConfigError::RadialSize(self.n_r))
            }
            Example::Bessel if self.mode >= self.n_r - 1 => {
                return Err(ConfigError::Mode {
                    mode: self.mode,
                    n: self.n_r - 1,
                })
            }
            Example::Inertial if self.m == 0 => return Err(ConfigError::InertialOrder),
            Example::Inertial if !(self.alpha > 0.0 && self.alpha.is_finite()) => {
                return Err(ConfigError::Alpha(self.alpha))
            }
            Example::Pipe if self.alpha == 0.0 || !self.alpha.is_finite() => {
                return Err(ConfigError::AxialWavenumber(self.alpha))
            }
            Example::Pipe if !(self.re > 0.0 && self.re.is_finite()) => {
                return Err(ConfigError::Reynolds(self.re))
            }
            Example::Helmholtz if !self.kappa.is_finite() => {
                return Err(ConfigError::Kappa(self.kappa))
            }
            Example::Helmholtz if self.tol.is_nan() || self.tol <= 0.0 => {
                return Err(ConfigError::Tolerance(self.tol))
            }
            _ => {}
        }
        Ok(())
    }

    /// Signed `κ²` of the Helmholtz operator.
    pub fn kappa_sq(&self) -> f64 {
        let k2 = self.kappa * self.kappa;
        if self.screened {
            -k2
        } else {
            k2
        }
    }
}
