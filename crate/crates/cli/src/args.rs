//! Command-line surface. Validation that clap cannot express lives in the
//! `*_checked` helpers so every command rejects bad input the same way.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use covstat::specfun::MAX_ORDER;
use covstat::ApproachKind;

use crate::error::{usage, CliError};
use crate::species;

#[derive(Debug, Parser)]
#[command(name = "covstat", version, about = "Covariant canonical statistics of the relativistic perfect gas")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Y/m³ against βm for every treatment, plus a convergence sidecar.
    Figure1(Figure1Args),
    /// Ultra-relativistic closed forms next to their numerical counterparts.
    Table1(Table1Args),
    /// F, S, P, ⟨E⟩ and c_V over a temperature grid.
    Thermo(ThermoArgs),
    /// Integrate the constrained particle dynamics and write the trajectory.
    Simulate(SimulateArgs),
    /// Run the built-in invariant checks of every module.
    Selftest,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 0.01)]
    pub beta_m_min: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub beta_m_max: f64,
    #[arg(long, default_value_t = 61)]
    pub beta_m_points: usize,
    /// Space the grid linearly instead of logarithmically.
    #[arg(long)]
    pub linear: bool,
}

impl GridArgs {
    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        let (lo, hi, n) = (self.beta_m_min, self.beta_m_max, self.beta_m_points);
        if !(lo > 0.0 && lo.is_finite() && hi.is_finite()) {
            return Err(usage(format!("--beta-m-min must be positive and finite, got {lo}")));
        }
        if hi < lo {
            return Err(usage(format!("--beta-m-max {hi} is below --beta-m-min {lo}")));
        }
        // a single point is only meaningful for a degenerate range
        if n == 1 && lo == hi {
            return Ok(vec![lo]);
        }
        if n < 2 {
            return Err(usage("--beta-m-points must be at least 2 (or 1 with min = max)"));
        }
        let last = (n - 1) as f64;
        Ok((0..n)
            .map(|k| {
                let f = k as f64 / last;
                if self.linear {
                    lo + (hi - lo) * f
                } else {
                    lo * (hi / lo).powf(f)
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, Args)]
pub struct OrderArgs {
    /// Gauss-Laguerre order (1-128).
    #[arg(long, default_value_t = 40)]
    pub order: usize,
}

impl OrderArgs {
    pub fn checked(&self) -> Result<usize, CliError> {
        if (1..=MAX_ORDER).contains(&self.order) {
            Ok(self.order)
        } else {
            Err(usage(format!("--order must be in 1..={MAX_ORDER}, got {}", self.order)))
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GasArgs {
    /// Species from the mass table (H, He, Ne, Ar by default).
    #[arg(long, default_value = "H")]
    pub gas: String,
    /// Rest mass in MeV; overrides --gas.
    #[arg(long)]
    pub mass_mev: Option<f64>,
    /// Alternative species table in TOML.
    #[arg(long)]
    pub species_file: Option<PathBuf>,
    /// Number of particles.
    #[arg(long, default_value_t = 1)]
    pub n: u64,
    /// Rest-frame volume in fm³.
    #[arg(long, default_value_t = 1000.0)]
    pub volume_fm3: f64,
}

/// Resolved gas: mass in MeV, volume in MeV⁻³.
#[derive(Debug, Clone)]
pub struct Gas {
    pub label: String,
    pub mass_mev: f64,
    pub n: u64,
    pub volume_fm3: f64,
    pub spec: covstat::GasSpec,
}

impl GasArgs {
    pub fn resolve(&self) -> Result<Gas, CliError> {
        let (mass_mev, label) = species::resolve_mass(&self.gas, self.mass_mev, self.species_file.as_deref())?;
        if self.n == 0 {
            return Err(usage("--n must be at least 1"));
        }
        if !(self.volume_fm3 > 0.0 && self.volume_fm3.is_finite()) {
            return Err(usage(format!("--volume-fm3 must be positive, got {}", self.volume_fm3)));
        }
        let spec = covstat::GasSpec::new(self.n, mass_mev, species::fm3_to_natural(self.volume_fm3))
            .map_err(|e| usage(e.to_string()))?;
        Ok(Gas { label, mass_mev, n: self.n, volume_fm3: self.volume_fm3, spec })
    }
}

fn parse_approach(s: &str) -> Result<ApproachKind, String> {
    s.parse()
}

#[derive(Debug, Clone, Args)]
pub struct Figure1Args {
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub order: OrderArgs,
    #[arg(long, default_value = "figure1.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct Table1Args {
    #[command(flatten)]
    pub gas: GasArgs,
    #[command(flatten)]
    pub order: OrderArgs,
    /// Point at which closed forms and numerics are compared.
    #[arg(long, default_value_t = 1e-4)]
    pub beta_m: f64,
    #[arg(long, default_value = "table1.json")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ThermoArgs {
    #[command(flatten)]
    pub gas: GasArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub order: OrderArgs,
    /// Temperatures in kelvin; replaces the βm grid when given. Repeatable.
    #[arg(long = "temperature-k")]
    pub temperature_k: Vec<f64>,
    /// Treatments to tabulate (full, semi, juttner, nonrel). Repeatable; default all.
    #[arg(long, value_parser = parse_approach)]
    pub approach: Vec<ApproachKind>,
    /// Measure energies from the rest mass: drops N·m from ⟨E⟩ and F.
    #[arg(long)]
    pub subtract_rest_mass: bool,
    #[arg(long, default_value = "thermo.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    PerfectSimple,
    PerfectCovariant,
    RealGas,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = ModelKind::RealGas)]
    pub model: ModelKind,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.01)]
    pub dtau: f64,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    /// Side of the cube initial positions are drawn from.
    #[arg(long = "box", default_value_t = 3.0)]
    pub box_size: f64,
    /// Standard deviation of each initial spatial momentum component, in units of m.
    #[arg(long, default_value_t = 0.1)]
    pub momentum_scale: f64,
    /// Lennard-Jones well depth, in units of m.
    #[arg(long, default_value_t = 0.1)]
    pub kappa: f64,
    /// Lennard-Jones length scale, in units of 1/m.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Boost the initial state along x with this velocity before integrating.
    #[arg(long, default_value_t = 0.0)]
    pub boost_vx: f64,
    /// Write every k-th step to the trajectory.
    #[arg(long, default_value_t = 1)]
    pub every: usize,
    #[arg(long, default_value = "trajectory.csv")]
    pub out: PathBuf,
}
