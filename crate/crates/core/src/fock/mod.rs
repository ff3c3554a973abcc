//! Truncated two-mode Fock-space engine.
//!
//! Density operators live on a product box `{0..=cutoff1} × {0..=cutoff2}`.
//! Projecting onto such a box commutes with the partial transpose up to a
//! principal submatrix, so truncation can only under-estimate the negativity
//! and the estimate grows monotonically with the cutoff.
//!
//! Mode 1 never moves. Mode 2 goes through a thermal-loss channel, expanded
//! with Kraus operators `G_{ℓ,n}` indexed by the number of photons `ℓ` lost to
//! the environment and the Fock index `n` of the injected thermal state.

mod evolve;
mod kraus;
mod negativity;
mod state;
mod states;

pub use evolve::{
    evolve_mode2, evolve_mode2_with, noon_log_negativity_after_channel, EvolutionPath,
    ThermalLossMap,
};
pub use kraus::{
    build_kraus_set, kraus_amplitude, thermal_weight, KrausOperator, KrausSet, LogFactorials,
};
pub use negativity::{
    converge_log_negativity, log_negativity_fock, negativity_fock, partial_transpose,
    pt_eigenvalues, ConvergedLogNeg, NEGATIVE_EIGENVALUE_THRESHOLD,
};
pub use state::FockDensityOp;
pub use states::{
    noon_density, pss_coefficients, pss_creation_probability, pss_density, thermal_product_density,
    tmsv_coefficients, tmsv_density, vacuum_density,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate state: {0}")]
    DegenerateState(String),
    #[error("photon cutoff {cutoff} too small: truncation discards probability {deficit:e}")]
    TruncationTooSmall { cutoff: usize, deficit: f64 },
    #[error("cutoff insufficient: completeness defect {defect:e} exceeds {tol:e} ({detail})")]
    CutoffInsufficient {
        defect: f64,
        tol: f64,
        detail: String,
    },
    #[error(
        "log-negativity not converged at cutoff {cutoff}: {value} vs {previous} (tol {tol:e})"
    )]
    NonConverged {
        cutoff: usize,
        value: f64,
        previous: f64,
        tol: f64,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
}

/// Largest probability a state constructor may discard to truncation.
pub const MAX_CONSTRUCTION_DEFICIT: f64 = 0.01;

/// Cutoffs used when evaluating states numerically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    /// Per-mode photon cutoff of the Fock box. Every joint state with at most
    /// this many photons in total is representable.
    pub total_photon_cutoff: usize,
    /// Upper index of the thermal expansion. `None` uses `ceil(20·(n̄+1))`.
    pub thermal_index_cutoff: Option<usize>,
    /// Largest change in E_LN accepted between a cutoff and its double.
    pub convergence_tol: f64,
    /// Largest tolerated completeness defect of a truncated Kraus set.
    pub completeness_tol: f64,
    /// Doubling stops once the photon cutoff would exceed this value.
    pub max_total_photon_cutoff: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            total_photon_cutoff: 12,
            thermal_index_cutoff: None,
            convergence_tol: 1e-3,
            completeness_tol: 1e-6,
            max_total_photon_cutoff: 48,
        }
    }
}

impl TruncationPolicy {
    pub fn with_cutoff(total_photon_cutoff: usize) -> Self {
        Self {
            total_photon_cutoff,
            max_total_photon_cutoff: (4 * total_photon_cutoff)
                .max(Self::default().max_total_photon_cutoff),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), FockError> {
        if self.total_photon_cutoff < 1 {
            return Err(FockError::InvalidParameter(
                "total_photon_cutoff must be >= 1".into(),
            ));
        }
        if self.thermal_index_cutoff == Some(0) {
            return Err(FockError::InvalidParameter(
                "thermal_index_cutoff must be >= 1".into(),
            ));
        }
        if !(self.convergence_tol > 0.0) || !(self.completeness_tol > 0.0) {
            return Err(FockError::InvalidParameter(
                "tolerances must be positive".into(),
            ));
        }
        if self.max_total_photon_cutoff < self.total_photon_cutoff {
            return Err(FockError::InvalidParameter(
                "max_total_photon_cutoff must be >= total_photon_cutoff".into(),
            ));
        }
        Ok(())
    }

    /// Thermal index cutoff for a given mean photon number.
    pub fn thermal_cutoff_for(&self, nbar: f64) -> usize {
        self.thermal_index_cutoff
            .unwrap_or_else(|| (20.0 * (nbar + 1.0)).ceil() as usize)
    }

    pub fn at_cutoff(&self, total_photon_cutoff: usize) -> Self {
        Self {
            total_photon_cutoff,
            ..*self
        }
    }
}
