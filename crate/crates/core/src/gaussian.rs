//! Two-mode Gaussian states in the covariance-matrix picture.
//!
//! Covariance matrices use the convention in which the vacuum has unit
//! quadrature variance (ħ = 2). Quadratures are ordered `(x1, p1, x2, p2)`,
//! so the matrix splits into the 2×2 blocks
//!
//! ```text
//! M = | A   C |
//!     | Cᵀ  B |
//! ```
//!
//! Everything here is closed form. The only iterative routine is
//! [`eb_transmissivity_bisect`], which exists to cross-check the closed-form
//! entanglement-breaking thresholds.

use std::fmt;

use nalgebra::{Matrix2, Matrix4};
use thiserror::Error;

/// Tolerance on the symmetry of a covariance matrix.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Slack allowed on the ordinary symplectic eigenvalues (`ν ≥ 1 − tol`).
pub const PHYSICALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaussianError {
    #[error("squeezing parameter must be finite and non-negative, got {0}")]
    InvalidSqueezing(f64),
    #[error("transmissivity must lie in [0, 1], got {0}")]
    InvalidTransmissivity(f64),
    #[error("mean thermal photon number must be finite and non-negative, got {0}")]
    InvalidPhotonNumber(f64),
    #[error("covariance matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("covariance matrix is not physical: {0}")]
    NonPhysicalCm(String),
}

/// Two-mode squeezing strength.
///
/// Stored as the squeezing parameter `r`. Decibels follow `dB = 10·log10(e^{2r})`,
/// which makes 10 dB correspond to a quadrature variance of exactly 5.05.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Squeezing {
    r: f64,
}

impl Squeezing {
    pub fn new(r: f64) -> Result<Self, GaussianError> {
        if !r.is_finite() || r < 0.0 {
            return Err(GaussianError::InvalidSqueezing(r));
        }
        Ok(Self { r })
    }

    pub fn from_db(db: f64) -> Result<Self, GaussianError> {
        if !db.is_finite() || db < 0.0 {
            return Err(GaussianError::InvalidSqueezing(db));
        }
        Self::new(db * std::f64::consts::LN_10 / 20.0)
    }

    /// From the single-mode quadrature variance `v = cosh(2r) ≥ 1`.
    pub fn from_variance(v: f64) -> Result<Self, GaussianError> {
        if !v.is_finite() || v < 1.0 {
            return Err(GaussianError::InvalidSqueezing(v));
        }
        Self::new(v.acosh() / 2.0)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Quadrature variance of each mode of the TMSV state, `cosh(2r)`.
    pub fn variance(&self) -> f64 {
        (2.0 * self.r).cosh()
    }

    pub fn db(&self) -> f64 {
        20.0 * self.r / std::f64::consts::LN_10
    }

    /// `λ = tanh(r)`, the geometric ratio of the TMSV Fock expansion.
    pub fn lambda(&self) -> f64 {
        self.r.tanh()
    }
}

impl fmt::Display for Squeezing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "r={:.6} ({:.4} dB, v={:.6})",
            self.r,
            self.db(),
            self.variance()
        )
    }
}

/// Fixed-attenuation channel that mixes the signal with a thermal mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalChannel {
    tau: f64,
    nbar: f64,
}

impl ThermalChannel {
    pub fn new(tau: f64, nbar: f64) -> Result<Self, GaussianError> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(GaussianError::InvalidTransmissivity(tau));
        }
        if !nbar.is_finite() || nbar < 0.0 {
            return Err(GaussianError::InvalidPhotonNumber(nbar));
        }
        Ok(Self { tau, nbar })
    }

    /// Channel specified by its thermal variance `ω = 2n̄ + 1` instead of `n̄`.
    pub fn with_omega(tau: f64, omega: f64) -> Result<Self, GaussianError> {
        if !omega.is_finite() || omega < 1.0 {
            return Err(GaussianError::InvalidPhotonNumber((omega - 1.0) / 2.0));
        }
        Self::new(tau, (omega - 1.0) / 2.0)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    pub fn omega(&self) -> f64 {
        2.0 * self.nbar + 1.0
    }
}

fn z2() -> Matrix2<f64> {
    Matrix2::new(1.0, 0.0, 0.0, -1.0)
}

/// Covariance matrix of a two-mode Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeCm {
    m: Matrix4<f64>,
}

impl TwoModeCm {
    /// Wraps a 4×4 matrix after checking symmetry. Physicality is checked
    /// separately by [`TwoModeCm::check_physical`].
    pub fn new(m: Matrix4<f64>) -> Result<Self, GaussianError> {
        let asym = (m - m.transpose()).amax();
        if !asym.is_finite() || asym > SYMMETRY_TOL * m.amax().max(1.0) {
            return Err(GaussianError::NotSymmetric(asym));
        }
        Ok(Self { m })
    }

    pub fn from_blocks(
        a: Matrix2<f64>,
        b: Matrix2<f64>,
        c: Matrix2<f64>,
    ) -> Result<Self, GaussianError> {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&a);
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(&b);
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(&c);
        m.fixed_view_mut::<2, 2>(2, 0).copy_from(&c.transpose());
        Self::new(m)
    }

    /// Standard form `diag(a,a,b,b)` with cross block `c·Z`.
    fn standard(a: f64, b: f64, c: f64) -> Self {
        let id = Matrix2::identity();
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&(id * a));
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(&(id * b));
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(&(z2() * c));
        m.fixed_view_mut::<2, 2>(2, 0).copy_from(&(z2() * c));
        Self { m }
    }

    pub fn identity() -> Self {
        Self {
            m: Matrix4::identity(),
        }
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.m
    }

    pub fn block_a(&self) -> Matrix2<f64> {
        self.m.fixed_view::<2, 2>(0, 0).into_owned()
    }

    pub fn block_b(&self) -> Matrix2<f64> {
        self.m.fixed_view::<2, 2>(2, 2).into_owned()
    }

    pub fn block_c(&self) -> Matrix2<f64> {
        self.m.fixed_view::<2, 2>(0, 2).into_owned()
    }

    /// Ordinary symplectic eigenvalues `(ν₋, ν₊)`.
    pub fn symplectic_eigenvalues(&self) -> Result<(f64, f64), GaussianError> {
        let delta = self.block_a().determinant()
            + self.block_b().determinant()
            + 2.0 * self.block_c().determinant();
        symplectic_pair(delta, self.determinant())
    }

    /// `det M`. When every 2×2 block is diagonal the position and momentum
    /// quadratures decouple and the determinant factorises exactly.
    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        let diagonal_blocks = [
            (0, 1),
            (1, 0),
            (2, 3),
            (3, 2),
            (0, 3),
            (1, 2),
            (2, 1),
            (3, 0),
        ]
        .iter()
        .all(|&ij| m[ij] == 0.0);
        if diagonal_blocks {
            (m[(0, 0)] * m[(2, 2)] - m[(0, 2)] * m[(2, 0)])
                * (m[(1, 1)] * m[(3, 3)] - m[(1, 3)] * m[(3, 1)])
        } else {
            m.determinant()
        }
    }

    pub fn check_physical(&self) -> Result<(), GaussianError> {
        let (lo, hi) = self.symplectic_eigenvalues()?;
        if lo < 1.0 - PHYSICALITY_TOL.sqrt() * hi.max(1.0) {
            return Err(GaussianError::NonPhysicalCm(format!(
                "smallest symplectic eigenvalue {lo} < 1"
            )));
        }
        Ok(())
    }
}

/// Solves `ν² = (Δ ± √(Δ² − 4 det M))/2` and returns `(ν₋, ν₊)`.
fn symplectic_pair(delta: f64, det: f64) -> Result<(f64, f64), GaussianError> {
    let disc = delta * delta - 4.0 * det;
    let scale = (delta * delta).max(1.0);
    if !disc.is_finite() || disc < -PHYSICALITY_TOL * scale {
        return Err(GaussianError::NonPhysicalCm(format!(
            "complex symplectic spectrum (Δ² − 4 det M = {disc:e})"
        )));
    }
    let root = disc.max(0.0).sqrt();
    let hi2 = (delta + root) / 2.0;
    let lo2 = if hi2 > 0.0 {
        det / hi2
    } else {
        (delta - root) / 2.0
    };
    if lo2 < -PHYSICALITY_TOL * scale {
        return Err(GaussianError::NonPhysicalCm(format!(
            "negative ν² = {lo2:e}"
        )));
    }
    Ok((lo2.max(0.0).sqrt(), hi2.sqrt()))
}

/// Two-mode squeezed vacuum.
pub fn tmsv_cm(s: Squeezing) -> TwoModeCm {
    let v = s.variance();
    TwoModeCm::standard(v, v, (v * v - 1.0).max(0.0).sqrt())
}

/// Two-mode squeezed state generated from thermal inputs with mean photon
/// numbers `nbar_alpha` (mode 1) and `nbar_beta` (mode 2).
pub fn thermal_tms_cm(
    s: Squeezing,
    nbar_alpha: f64,
    nbar_beta: f64,
) -> Result<TwoModeCm, GaussianError> {
    for n in [nbar_alpha, nbar_beta] {
        if !n.is_finite() || n < 0.0 {
            return Err(GaussianError::InvalidPhotonNumber(n));
        }
    }
    let r = s.r();
    let (ch2, sh2) = (r.cosh().powi(2), r.sinh().powi(2));
    let a = 2.0 * nbar_alpha * ch2 + 2.0 * nbar_beta * sh2 + (2.0 * r).cosh();
    let b = 2.0 * nbar_alpha * sh2 + 2.0 * nbar_beta * ch2 + (2.0 * r).cosh();
    let c = (nbar_alpha + nbar_beta + 1.0) * (2.0 * r).sinh();
    Ok(TwoModeCm::standard(a, b, c))
}

/// Sends mode 2 of an arbitrary two-mode state through `ch`.
///
/// `B → τB + (1−τ)ω·I`, `C → √τ·C`, `A` unchanged.
pub fn evolve_single_channel(m: &TwoModeCm, ch: &ThermalChannel) -> TwoModeCm {
    let tau = ch.tau();
    let b = m.block_b() * tau + Matrix2::identity() * ((1.0 - tau) * ch.omega());
    let c = m.block_c() * tau.sqrt();
    let mut out = m.m;
    out.fixed_view_mut::<2, 2>(2, 2).copy_from(&b);
    out.fixed_view_mut::<2, 2>(0, 2).copy_from(&c);
    out.fixed_view_mut::<2, 2>(2, 0).copy_from(&c.transpose());
    TwoModeCm { m: out }
}

/// TMSV mode forwarded through two hops (`ch_a` to the relay, `ch_b` onwards),
/// the relay acting as a mirror.
pub fn direct_relay_cm(s: Squeezing, ch_a: &ThermalChannel, ch_b: &ThermalChannel) -> TwoModeCm {
    let v = s.variance();
    let (ta, tb) = (ch_a.tau(), ch_b.tau());
    let v_out = tb * (ta * v + (1.0 - ta) * ch_a.omega()) + (1.0 - tb) * ch_b.omega();
    let c = (ta * tb).sqrt() * (v * v - 1.0).max(0.0).sqrt();
    TwoModeCm::standard(v, v_out, c)
}

/// End-to-end state after a Bell measurement at the relay on one mode from
/// each of two TMSV pairs with identical squeezing, averaged over outcomes
/// with optimal displacement.
pub fn swap_relay_cm(s: Squeezing, ch_a: &ThermalChannel, ch_b: &ThermalChannel) -> TwoModeCm {
    let v = s.variance();
    let (ta, tb) = (ch_a.tau(), ch_b.tau());
    let theta = (ta + tb) * v + (1.0 - ta) * ch_a.omega() + (1.0 - tb) * ch_b.omega();
    assert!(
        theta > 0.0,
        "theta must be positive for valid channels, got {theta}"
    );
    let k = v * v - 1.0;
    TwoModeCm::standard(
        v - k * ta / theta,
        v - k * tb / theta,
        k * (ta * tb).sqrt() / theta,
    )
}

/// Smallest symplectic eigenvalue of the partially transposed CM.
pub fn pt_symplectic_min(m: &TwoModeCm) -> Result<f64, GaussianError> {
    let delta =
        m.block_a().determinant() + m.block_b().determinant() - 2.0 * m.block_c().determinant();
    symplectic_pair(delta, m.determinant()).map(|(lo, _)| lo)
}

/// Logarithmic negativity `max[0, −log₂ ν₋]` in ebits.
pub fn log_negativity_cm(m: &TwoModeCm) -> Result<f64, GaussianError> {
    m.check_physical()?;
    let nu = pt_symplectic_min(m)?;
    Ok((-nu.log2()).max(0.0))
}

/// Transmission topology for which an entanglement-breaking threshold is
/// evaluated. The relay schemes assume both hops share `τ` and `ω`; their
/// threshold is the per-hop transmissivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EbScheme {
    Single,
    DirectRelaySymmetric,
    SwapRelaySymmetric,
}

impl EbScheme {
    pub const ALL: [EbScheme; 3] = [
        EbScheme::Single,
        EbScheme::DirectRelaySymmetric,
        EbScheme::SwapRelaySymmetric,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            EbScheme::Single => "single",
            EbScheme::DirectRelaySymmetric => "direct_relay",
            EbScheme::SwapRelaySymmetric => "swap_relay",
        }
    }

    /// Output CM for a TMSV with the given per-hop channel.
    pub fn output_cm(&self, s: Squeezing, ch: &ThermalChannel) -> TwoModeCm {
        match self {
            EbScheme::Single => evolve_single_channel(&tmsv_cm(s), ch),
            EbScheme::DirectRelaySymmetric => direct_relay_cm(s, ch, ch),
            EbScheme::SwapRelaySymmetric => swap_relay_cm(s, ch, ch),
        }
    }
}

impl std::str::FromStr for EbScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single" => Ok(EbScheme::Single),
            "direct_relay" | "direct" => Ok(EbScheme::DirectRelaySymmetric),
            "swap_relay" | "swap" => Ok(EbScheme::SwapRelaySymmetric),
            other => Err(format!("unknown scheme '{other}'")),
        }
    }
}

/// Closed-form entanglement-breaking transmissivity for thermal variance `omega ≥ 1`.
pub fn eb_transmissivity(scheme: EbScheme, omega: f64) -> f64 {
    debug_assert!(omega >= 1.0, "omega must be >= 1, got {omega}");
    let omega = omega.max(1.0);
    match scheme {
        EbScheme::Single => (omega - 1.0) / (omega + 1.0),
        EbScheme::DirectRelaySymmetric => (omega * omega - 1.0).sqrt() / (omega + 1.0),
        EbScheme::SwapRelaySymmetric => omega / (omega + 1.0),
    }
}

/// Locates the entanglement-breaking transmissivity numerically, by bisection
/// on `ν₋(τ) = 1` over the per-hop transmissivity.
pub fn eb_transmissivity_bisect(
    scheme: EbScheme,
    omega: f64,
    s: Squeezing,
) -> Result<f64, GaussianError> {
    let excess = |tau: f64| -> Result<f64, GaussianError> {
        let ch = ThermalChannel::with_omega(tau, omega)?;
        Ok(pt_symplectic_min(&scheme.output_cm(s, &ch))? - 1.0)
    };
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    if excess(lo)? < 0.0 {
        return Ok(0.0);
    }
    if excess(hi)? >= 0.0 {
        return Ok(1.0);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sq_db(db: f64) -> Squeezing {
        Squeezing::from_db(db).unwrap()
    }

    #[test]
    fn squeezing_conventions() {
        assert_abs_diff_eq!(sq_db(10.0).variance(), 5.05, epsilon = 1e-12);
        // "3 dB" of squeezing is v = 1.25 only to two digits; exactly it is 10·log10(2) dB
        assert_abs_diff_eq!(sq_db(3.0).variance(), 1.25, epsilon = 2e-3);
        let s = Squeezing::from_variance(1.25).unwrap();
        assert_abs_diff_eq!(s.db(), 10.0 * 2f64.log10(), epsilon = 1e-12);
        assert_eq!(Squeezing::new(0.0).unwrap().db(), 0.0);
        assert!(Squeezing::new(-0.1).is_err());
        assert!(Squeezing::from_variance(0.5).is_err());
    }

    #[test]
    fn tmsv_vacuum_is_identity() {
        let m = tmsv_cm(Squeezing::new(0.0).unwrap());
        assert_eq!(*m.matrix(), Matrix4::identity());
        assert_eq!(log_negativity_cm(&m).unwrap(), 0.0);
    }

    #[test]
    fn tmsv_log_negativity_is_2r_log2e() {
        let s = Squeezing::from_variance(1.25).unwrap();
        assert_abs_diff_eq!(
            log_negativity_cm(&tmsv_cm(s)).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let s = sq_db(10.0);
        let expected = 2.0 * s.r() * std::f64::consts::LOG2_E;
        assert_abs_diff_eq!(
            log_negativity_cm(&tmsv_cm(s)).unwrap(),
            expected,
            epsilon = 1e-12
        );
    }

    #[test]
    fn thermal_tms_limits() {
        let s = sq_db(7.0);
        let a = thermal_tms_cm(s, 0.0, 0.0).unwrap();
        assert!((a.matrix() - tmsv_cm(s).matrix()).amax() < 1e-12);

        let b = thermal_tms_cm(Squeezing::new(0.0).unwrap(), 1.5, 3.0).unwrap();
        let expected = Matrix4::from_diagonal(&nalgebra::Vector4::new(4.0, 4.0, 7.0, 7.0));
        assert!((b.matrix() - expected).amax() < 1e-12);
        assert!(thermal_tms_cm(s, -1.0, 0.0).is_err());
    }

    #[test]
    fn lossless_and_opaque_channels() {
        let m = thermal_tms_cm(sq_db(5.0), 0.3, 0.1).unwrap();
        let id = evolve_single_channel(&m, &ThermalChannel::new(1.0, 7.0).unwrap());
        assert!((id.matrix() - m.matrix()).amax() < 1e-15);

        let ch = ThermalChannel::new(0.0, 2.0).unwrap();
        let out = evolve_single_channel(&m, &ch);
        assert_eq!(out.block_b(), Matrix2::identity() * 5.0);
        assert_eq!(out.block_c(), Matrix2::zeros());
        assert_eq!(out.block_a(), m.block_a());
        assert!(ThermalChannel::new(1.01, 0.0).is_err());
        assert!(ThermalChannel::new(-0.01, 0.0).is_err());
    }

    #[test]
    fn relay_reductions() {
        let s = sq_db(10.0);
        let ch_a = ThermalChannel::new(0.9, 4.0).unwrap();
        let ideal = ThermalChannel::new(1.0, 11.0).unwrap();
        let d = direct_relay_cm(s, &ch_a, &ideal);
        let e = evolve_single_channel(&tmsv_cm(s), &ch_a);
        assert!((d.matrix() - e.matrix()).amax() < 1e-12);
        let both = direct_relay_cm(s, &ideal, &ideal);
        assert!((both.matrix() - tmsv_cm(s).matrix()).amax() < 1e-12);
    }

    #[test]
    fn direct_relay_is_channel_composition() {
        let s = sq_db(8.0);
        let ch_a = ThermalChannel::new(0.83, 2.5).unwrap();
        let ch_b = ThermalChannel::new(0.61, 9.0).unwrap();
        let composed = evolve_single_channel(&evolve_single_channel(&tmsv_cm(s), &ch_a), &ch_b);
        let closed = direct_relay_cm(s, &ch_a, &ch_b);
        assert!((composed.matrix() - closed.matrix()).amax() < 1e-12);
    }

    #[test]
    fn swap_with_nothing_arriving_is_product() {
        let s = sq_db(10.0);
        let ch = ThermalChannel::new(0.0, 20.0).unwrap();
        let m = swap_relay_cm(s, &ch, &ch);
        let v = s.variance();
        assert!((m.matrix() - Matrix4::identity() * v).amax() < 1e-12);
        assert_eq!(log_negativity_cm(&m).unwrap(), 0.0);
    }

    #[test]
    fn swap_cross_block_sign_matches_tmsv() {
        let s = sq_db(10.0);
        let ch = ThermalChannel::new(0.7, 1.0).unwrap();
        let c = swap_relay_cm(s, &ch, &ch).block_c();
        assert!(c[(0, 0)] > 0.0 && c[(1, 1)] < 0.0);
    }

    #[test]
    fn non_physical_matrix_is_rejected() {
        // squeezed below the Heisenberg bound in both modes with no correlations
        let m = TwoModeCm::new(Matrix4::identity() * 0.5).unwrap();
        assert!(m.check_physical().is_err());
        // correlations that exceed the local variances give a complex spectrum
        let bad = TwoModeCm::standard(1.0, 1.0, 3.0);
        assert!(matches!(
            log_negativity_cm(&bad),
            Err(GaussianError::NonPhysicalCm(_))
        ));
        let mut asym = Matrix4::identity();
        asym[(0, 1)] = 0.1;
        assert!(matches!(
            TwoModeCm::new(asym),
            Err(GaussianError::NotSymmetric(_))
        ));
    }

    #[test]
    fn closed_form_thresholds() {
        assert_eq!(eb_transmissivity(EbScheme::Single, 1.0), 0.0);
        assert_abs_diff_eq!(
            eb_transmissivity(EbScheme::Single, 3.0),
            0.5,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            eb_transmissivity(EbScheme::DirectRelaySymmetric, 3.0),
            8f64.sqrt() / 4.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            eb_transmissivity(EbScheme::SwapRelaySymmetric, 3.0),
            0.75,
            epsilon = 1e-15
        );
        let big = 1e6;
        let d = eb_transmissivity(EbScheme::DirectRelaySymmetric, big);
        let sw = eb_transmissivity(EbScheme::SwapRelaySymmetric, big);
        assert!((d - sw).abs() < 1e-6);
    }

    #[test]
    fn bisection_matches_closed_form() {
        let s = sq_db(10.0);
        for omega in [2.0, 41.7, 416.7] {
            for scheme in EbScheme::ALL {
                let numeric = eb_transmissivity_bisect(scheme, omega, s).unwrap();
                assert_abs_diff_eq!(numeric, eb_transmissivity(scheme, omega), epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn threshold_at_closed_form_has_unit_nu() {
        let s = sq_db(10.0);
        let omega = 41.7;
        let ch =
            ThermalChannel::with_omega(eb_transmissivity(EbScheme::Single, omega), omega).unwrap();
        let m = evolve_single_channel(&tmsv_cm(s), &ch);
        assert_abs_diff_eq!(pt_symplectic_min(&m).unwrap(), 1.0, epsilon = 1e-9);
        assert!(log_negativity_cm(&m).unwrap() < 1e-9);
    }

    #[test]
    fn vacuum_noise_never_breaks_entanglement() {
        for r in [0.05, 0.4, 1.2] {
            for tau in [1e-4, 0.01, 0.3, 0.99] {
                let ch = ThermalChannel::new(tau, 0.0).unwrap();
                let m = evolve_single_channel(&tmsv_cm(Squeezing::new(r).unwrap()), &ch);
                assert!(log_negativity_cm(&m).unwrap() > 0.0, "r={r} tau={tau}");
            }
        }
    }
}
