//! Named parameter sweeps that reproduce the figures and link analyses.
//!
//! A [`SweepSpec`] fully determines a run. Runners return a [`Table`] whose
//! CSV rendering is byte-identical across runs and machines.

mod config;
mod runners;
mod table;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::fock::{FockError, TruncationPolicy};
use crate::gaussian::{GaussianError, Squeezing};
use crate::link::{AbsorptionModel, LinkError};

pub use runners::{
    fig1_crossing_squeezing, fig1_crossing_temperature, fig3_point, link_report, run,
    run_eb_thresholds, run_fig1, run_fig2, run_fig3, run_fig4, run_link_budget, Fig3Point,
};
pub use table::{Cell, Table};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl ScenarioError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Io(_) | ScenarioError::Csv(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScenarioKind {
    Fig1ThermalPrep,
    Fig2Channel,
    Fig3NonGaussian,
    Fig4Relay,
    LinkBudget,
    EbThresholds,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 6] = [
        ScenarioKind::Fig1ThermalPrep,
        ScenarioKind::Fig2Channel,
        ScenarioKind::Fig3NonGaussian,
        ScenarioKind::Fig4Relay,
        ScenarioKind::LinkBudget,
        ScenarioKind::EbThresholds,
    ];

    /// Config section name.
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::Fig1ThermalPrep => "fig1-thermal-prep",
            ScenarioKind::Fig2Channel => "fig2-channel",
            ScenarioKind::Fig3NonGaussian => "fig3-nongaussian",
            ScenarioKind::Fig4Relay => "fig4-relay",
            ScenarioKind::LinkBudget => "link-budget",
            ScenarioKind::EbThresholds => "eb-thresholds",
        }
    }

    /// Short subcommand name.
    pub fn command(&self) -> &'static str {
        match self {
            ScenarioKind::Fig1ThermalPrep => "fig1",
            ScenarioKind::Fig2Channel => "fig2",
            ScenarioKind::Fig3NonGaussian => "fig3",
            ScenarioKind::Fig4Relay => "fig4",
            ScenarioKind::LinkBudget => "link-budget",
            ScenarioKind::EbThresholds => "eb-thresholds",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s || k.command() == s)
            .ok_or_else(|| ScenarioError::Config(format!("unknown scenario `{s}`")))
    }
}

/// Inclusive uniform grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, steps: usize) -> Self {
        Self { min, max, steps }
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    fn validate(&self, what: &str, lo: f64, hi: f64) -> Result<(), ScenarioError> {
        if self.steps < 2 {
            return Err(ScenarioError::Config(format!(
                "{what}: need at least 2 steps"
            )));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(ScenarioError::Config(format!(
                "{what}: invalid range [{}, {}]",
                self.min, self.max
            )));
        }
        if self.min < lo || self.max > hi {
            return Err(ScenarioError::Config(format!(
                "{what}: range [{}, {}] leaves [{lo}, {hi}]",
                self.min, self.max
            )));
        }
        Ok(())
    }
}

/// Initial squeezing, given either in dB or as the quadrature variance `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SqueezeSetting {
    Db(f64),
    Variance(f64),
}

impl SqueezeSetting {
    pub fn squeezing(&self) -> Result<Squeezing, ScenarioError> {
        Ok(match *self {
            SqueezeSetting::Db(db) => Squeezing::from_db(db)?,
            SqueezeSetting::Variance(v) => Squeezing::from_variance(v)?,
        })
    }
}

/// Everything a sweep depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub kind: ScenarioKind,
    /// Temperature (K) for fig1, transmissivity for figs 2 to 4.
    pub axis: Axis,
    /// Squeezing (dB) for fig1.
    pub axis2: Axis,
    pub frequencies_ghz: Vec<f64>,
    pub temperature_k: f64,
    pub squeeze: SqueezeSetting,
    /// Squeezing at which fig1 reports the temperature crossing.
    pub crossing_squeeze_db: f64,
    pub kappa: f64,
    pub noon_n: Vec<usize>,
    pub truncation: TruncationPolicy,
    pub distances_m: Vec<f64>,
    pub aperture_m: f64,
    pub tx_power_dbm: f64,
    pub absorption_table: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

impl SweepSpec {
    /// Defaults chosen to span each figure's visible axes.
    pub fn default_for(kind: ScenarioKind) -> Self {
        let base = SweepSpec {
            kind,
            axis: Axis::new(0.0, 1.0, 201),
            axis2: Axis::new(0.0, 20.0, 101),
            frequencies_ghz: vec![15.0, 30.0, 100.0, 300.0],
            temperature_k: 300.0,
            squeeze: SqueezeSetting::Db(10.0),
            crossing_squeeze_db: 10.0,
            kappa: 1.0,
            noon_n: vec![2, 5],
            truncation: TruncationPolicy::default(),
            distances_m: vec![50.0, 100.0, 200.0],
            aperture_m: 1.0,
            tx_power_dbm: 0.0,
            absorption_table: None,
            output: None,
        };
        match kind {
            ScenarioKind::Fig1ThermalPrep => SweepSpec {
                axis: Axis::new(0.0, 300.0, 101),
                frequencies_ghz: vec![300.0],
                ..base
            },
            ScenarioKind::Fig3NonGaussian => SweepSpec {
                frequencies_ghz: vec![300.0],
                squeeze: SqueezeSetting::Variance(1.25),
                ..base
            },
            ScenarioKind::LinkBudget => SweepSpec {
                frequencies_ghz: vec![30.0, 300.0],
                ..base
            },
            _ => base,
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let cfg = |m: String| Err(ScenarioError::Config(m));
        match self.kind {
            ScenarioKind::Fig1ThermalPrep => {
                self.axis.validate("temperature axis", 0.0, f64::INFINITY)?;
                self.axis2.validate("squeezing axis", 0.0, f64::INFINITY)?;
            }
            ScenarioKind::Fig2Channel | ScenarioKind::Fig3NonGaussian | ScenarioKind::Fig4Relay => {
                self.axis.validate("transmissivity axis", 0.0, 1.0)?;
            }
            ScenarioKind::LinkBudget | ScenarioKind::EbThresholds => {}
        }
        if self.frequencies_ghz.is_empty() {
            return cfg("frequency list is empty".into());
        }
        if let Some(f) = self
            .frequencies_ghz
            .iter()
            .find(|f| !(f.is_finite() && **f > 0.0))
        {
            return cfg(format!("frequency {f} GHz is not positive"));
        }
        if !(self.temperature_k.is_finite() && self.temperature_k >= 0.0) {
            return cfg(format!("temperature {} K", self.temperature_k));
        }
        self.squeeze.squeezing()?;
        if !(self.crossing_squeeze_db.is_finite() && self.crossing_squeeze_db > 0.0) {
            return cfg(format!(
                "crossing squeezing {} dB",
                self.crossing_squeeze_db
            ));
        }
        if !(self.kappa > 0.0 && self.kappa <= 1.0) {
            return cfg(format!("kappa {} outside (0, 1]", self.kappa));
        }
        if self.noon_n.contains(&0) {
            return cfg("NOON photon numbers must be >= 1".into());
        }
        self.truncation.validate()?;
        if self.kind == ScenarioKind::LinkBudget && self.distances_m.is_empty() {
            return cfg("distance list is empty".into());
        }
        if let Some(d) = self
            .distances_m
            .iter()
            .find(|d| !(d.is_finite() && **d >= 0.0))
        {
            return cfg(format!("distance {d} m"));
        }
        if !(self.aperture_m.is_finite() && self.aperture_m > 0.0) {
            return cfg(format!("aperture {} m", self.aperture_m));
        }
        if !self.tx_power_dbm.is_finite() {
            return cfg("transmit power must be finite".into());
        }
        Ok(())
    }

    /// The absorption table named by the spec, or the built-in default.
    pub fn absorption_model(&self) -> Result<AbsorptionModel, ScenarioError> {
        match &self.absorption_table {
            Some(path) => AbsorptionModel::load(path).map_err(|e| match e {
                LinkError::Io(_) | LinkError::TableParse { .. } => {
                    ScenarioError::Config(format!("absorption table {}: {e}", path.display()))
                }
                other => other.into(),
            }),
            None => Ok(AbsorptionModel::default_model()),
        }
    }
}
