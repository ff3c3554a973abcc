use num_complex::Complex64;

use super::{FockDensityOp, FockError, TruncationPolicy, MAX_CONSTRUCTION_DEFICIT};
use crate::gaussian::Squeezing;

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Schmidt coefficients `√(1−λ²)·λⁿ` of the two-mode squeezed vacuum.
pub fn tmsv_coefficients(s: Squeezing, n_max: usize) -> Vec<f64> {
    let lam = s.lambda();
    let norm = (1.0 - lam * lam).sqrt();
    (0..=n_max).map(|n| norm * lam.powi(n as i32)).collect()
}

/// Schmidt coefficients of the photon-subtracted squeezed state,
/// `q_n = √((1−x²)³/(1+x²))·xⁿ·(n+1)` with `x = λκ`.
pub fn pss_coefficients(s: Squeezing, kappa: f64, n_max: usize) -> Vec<f64> {
    let x = s.lambda() * kappa;
    let x2 = x * x;
    let norm = ((1.0 - x2).powi(3) / (1.0 + x2)).sqrt();
    (0..=n_max)
        .map(|n| norm * x.powi(n as i32) * (n as f64 + 1.0))
        .collect()
}

/// Heralding probability of subtracting one photon from each mode with
/// beam splitters of transmissivity `kappa`.
pub fn pss_creation_probability(s: Squeezing, kappa: f64) -> f64 {
    let l2 = s.lambda().powi(2);
    let x2 = l2 * kappa * kappa;
    l2 * (1.0 - l2) * (1.0 + x2) * (1.0 - kappa).powi(2) / (1.0 - x2).powi(3)
}

fn schmidt_density(q: &[f64], cutoff: usize) -> FockDensityOp {
    let kept: f64 = q.iter().map(|x| x * x).sum();
    FockDensityOp::from_pure(cutoff, cutoff, 1.0 - kept, |a, b| {
        if a == b {
            real(q[a])
        } else {
            real(0.0)
        }
    })
}

fn check_deficit(q: &[f64], cutoff: usize) -> Result<(), FockError> {
    let deficit = 1.0 - q.iter().map(|x| x * x).sum::<f64>();
    if deficit > MAX_CONSTRUCTION_DEFICIT {
        return Err(FockError::TruncationTooSmall { cutoff, deficit });
    }
    Ok(())
}

/// Truncated TMSV density operator on a box with per-mode cutoff
/// `policy.total_photon_cutoff`.
pub fn tmsv_density(s: Squeezing, policy: &TruncationPolicy) -> Result<FockDensityOp, FockError> {
    policy.validate()?;
    let n = policy.total_photon_cutoff;
    let q = tmsv_coefficients(s, n);
    check_deficit(&q, n)?;
    Ok(schmidt_density(&q, n))
}

/// Truncated photon-subtracted squeezed state.
///
/// `kappa = 1` gives the limiting state, whose heralding probability is zero.
/// `λκ = 0` has no conditional state and is rejected.
pub fn pss_density(
    s: Squeezing,
    kappa: f64,
    policy: &TruncationPolicy,
) -> Result<FockDensityOp, FockError> {
    policy.validate()?;
    if !(0.0..=1.0).contains(&kappa) {
        return Err(FockError::InvalidParameter(format!(
            "kappa must lie in [0, 1], got {kappa}"
        )));
    }
    if s.lambda() * kappa == 0.0 {
        return Err(FockError::DegenerateState(
            "photon subtraction with lambda*kappa = 0 never succeeds".into(),
        ));
    }
    let n = policy.total_photon_cutoff;
    let q = pss_coefficients(s, kappa, n);
    check_deficit(&q, n)?;
    Ok(schmidt_density(&q, n))
}

/// `(|n,0⟩ + |0,n⟩)/√2` on the minimal box.
pub fn noon_density(n: usize) -> Result<FockDensityOp, FockError> {
    if n < 1 {
        return Err(FockError::InvalidParameter(
            "NOON photon number must be >= 1".into(),
        ));
    }
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    Ok(FockDensityOp::from_pure(n, n, 0.0, |a, b| {
        if (a, b) == (n, 0) || (a, b) == (0, n) {
            real(amp)
        } else {
            real(0.0)
        }
    }))
}

pub fn vacuum_density(cutoff1: usize, cutoff2: usize) -> FockDensityOp {
    FockDensityOp::from_pure(cutoff1, cutoff2, 0.0, |a, b| {
        real(if a == 0 && b == 0 { 1.0 } else { 0.0 })
    })
}

/// Product of two thermal states, truncated to the box.
pub fn thermal_product_density(
    nbar1: f64,
    nbar2: f64,
    cutoff1: usize,
    cutoff2: usize,
) -> Result<FockDensityOp, FockError> {
    for nb in [nbar1, nbar2] {
        if !(nb.is_finite() && nb >= 0.0) {
            return Err(FockError::InvalidParameter(format!(
                "mean photon number {nb}"
            )));
        }
    }
    let p = |nb: f64, k: usize| (nb / (nb + 1.0)).powi(k as i32) / (nb + 1.0);
    let d2 = cutoff2 + 1;
    let dim = (cutoff1 + 1) * d2;
    let mut m = nalgebra::DMatrix::from_element(dim, dim, real(0.0));
    let mut kept = 0.0;
    for i in 0..dim {
        let w = p(nbar1, i / d2) * p(nbar2, i % d2);
        m[(i, i)] = real(w);
        kept += w;
    }
    Ok(FockDensityOp::from_parts_unchecked(
        cutoff1,
        cutoff2,
        m,
        1.0 - kept,
    ))
}
