use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{FockDensityOp, FockError, TruncationPolicy};
use crate::gaussian::ThermalChannel;

/// Table of `ln k!`, built by summing logarithms.
#[derive(Debug, Clone)]
pub struct LogFactorials {
    table: Vec<f64>,
}

impl LogFactorials {
    pub fn up_to(n: usize) -> Self {
        let mut table = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        table.push(0.0);
        for k in 1..=n {
            acc += (k as f64).ln();
            table.push(acc);
        }
        Self { table }
    }

    #[inline]
    pub fn ln(&self, k: usize) -> f64 {
        self.table[k]
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

/// Probability `n̄ⁿ/(n̄+1)ⁿ⁺¹` that the thermal mode holds `n` photons.
pub fn thermal_weight(nbar: f64, n: usize) -> f64 {
    if nbar == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (n as f64 * nbar.ln() - (n as f64 + 1.0) * nbar.ln_1p()).exp()
}

/// `e·ln(x)` with the convention `0·ln 0 = 0`.
#[inline]
pub(crate) fn pow_ln(exponent: usize, ln_base: f64) -> f64 {
    if exponent == 0 {
        0.0
    } else {
        exponent as f64 * ln_base
    }
}

/// Matrix element `⟨input+n−ℓ| G_{ℓ,n} |input⟩` without the thermal weight
/// factor `√(n̄ⁿ/(n̄+1)ⁿ⁺¹)`.
///
/// `lf` must cover `input + n`.
pub fn kraus_amplitude(lf: &LogFactorials, tau: f64, ell: usize, n: usize, input: usize) -> f64 {
    if input + n < ell {
        return 0.0;
    }
    let m = input + n - ell;
    let ln_loss = 0.5 * (1.0 - tau).ln();
    let ln_keep = 0.5 * tau.ln();
    let prefactor = 0.5 * (lf.ln(m) + lf.ln(ell) + lf.ln(input) + lf.ln(n));
    let j_min = n.saturating_sub(m);
    let j_max = n.min(ell);
    let mut sum = 0.0;
    for j in j_min..=j_max {
        let ln_term = prefactor - lf.ln(m + j - n) - lf.ln(ell - j) - lf.ln(n - j) - lf.ln(j)
            + pow_ln(ell + n - 2 * j, ln_loss)
            + pow_ln(m + 2 * j - n, ln_keep);
        let term = ln_term.exp();
        if (n - j) % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
    }
    sum
}

/// One Kraus operator restricted to the truncated single-mode space. Each
/// `G_{ℓ,n}` moves `|p⟩` to `|p+n−ℓ⟩`, so it has at most one entry per input.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausOperator {
    pub ell: usize,
    pub n: usize,
    /// `(input, output, amplitude)` with the thermal weight folded in.
    pub entries: Vec<(usize, usize, f64)>,
}

impl KrausOperator {
    pub fn to_matrix(&self, dim: usize) -> DMatrix<f64> {
        let mut g = DMatrix::zeros(dim, dim);
        for &(p, m, a) in &self.entries {
            g[(m, p)] = a;
        }
        g
    }
}

/// Kraus operators of a thermal-loss channel on `{0..=mode_cutoff}`.
#[derive(Debug, Clone)]
pub struct KrausSet {
    pub channel: ThermalChannel,
    pub mode_cutoff: usize,
    pub ell_cutoff: usize,
    pub n_cutoff: usize,
    pub operators: Vec<KrausOperator>,
}

impl KrausSet {
    pub fn dim(&self) -> usize {
        self.mode_cutoff + 1
    }

    /// `Σ G†G`.
    pub fn completeness_matrix(&self) -> DMatrix<f64> {
        let mut s = DMatrix::zeros(self.dim(), self.dim());
        for op in &self.operators {
            for &(p, m, a) in &op.entries {
                for &(q, m2, b) in &op.entries {
                    if m == m2 {
                        s[(p, q)] += a * b;
                    }
                }
            }
        }
        s
    }

    /// `max |Σ G†G − I|` over inputs with at most `interior` photons.
    pub fn completeness_defect(&self, interior: usize) -> f64 {
        let s = self.completeness_matrix();
        let k = interior.min(self.mode_cutoff);
        let mut defect = 0.0_f64;
        for p in 0..=k {
            for q in 0..=k {
                let target = if p == q { 1.0 } else { 0.0 };
                defect = defect.max((s[(p, q)] - target).abs());
            }
        }
        defect
    }

    /// `Σ (I⊗G) ρ (I⊗G)†` with `ρ` embedded in this set's mode-2 space.
    pub fn apply_mode2(&self, rho: &FockDensityOp) -> Result<FockDensityOp, FockError> {
        if rho.cutoff2() > self.mode_cutoff {
            return Err(FockError::DimensionMismatch(format!(
                "state mode-2 cutoff {} exceeds Kraus space {}",
                rho.cutoff2(),
                self.mode_cutoff
            )));
        }
        let rho = rho.resized(rho.cutoff1(), self.mode_cutoff);
        let d2 = self.dim();
        let dim = rho.dim();
        let zero = Complex64::new(0.0, 0.0);
        let mut out = DMatrix::from_element(dim, dim, zero);
        let input = rho.matrix();
        for op in &self.operators {
            // output index -> (input index, amplitude)
            let mut map = vec![None; d2];
            for &(p, m, a) in &op.entries {
                map[m] = Some((p, a));
            }
            for r in 0..dim {
                let (a1, m) = (r / d2, r % d2);
                let Some((p, ga)) = map[m] else { continue };
                for c in 0..dim {
                    let (b1, m2) = (c / d2, c % d2);
                    let Some((q, gb)) = map[m2] else { continue };
                    let x = input[(a1 * d2 + p, b1 * d2 + q)];
                    if x != zero {
                        out[(r, c)] += x * (ga * gb);
                    }
                }
            }
        }
        let trace_in = rho.trace();
        let trace_out: f64 = out.diagonal().iter().map(|z| z.re).sum();
        Ok(FockDensityOp::from_parts_unchecked(
            rho.cutoff1(),
            self.mode_cutoff,
            out,
            rho.trace_deficit() + (trace_in - trace_out),
        ))
    }
}

/// Materialises `G_{ℓ,n}` for `n ≤ thermal cutoff` and every `ℓ` that maps
/// some input of the truncated space to an output inside it.
///
/// Fails with [`FockError::CutoffInsufficient`] when `Σ G†G` differs from the
/// identity by more than `policy.completeness_tol` on inputs with at most
/// `mode_cutoff/2` photons.
pub fn build_kraus_set(
    ch: &ThermalChannel,
    mode_cutoff: usize,
    policy: &TruncationPolicy,
) -> Result<KrausSet, FockError> {
    policy.validate()?;
    if mode_cutoff < 1 {
        return Err(FockError::InvalidParameter(
            "mode_cutoff must be >= 1".into(),
        ));
    }
    let set = KrausSet::build(ch, mode_cutoff, policy.thermal_cutoff_for(ch.nbar()));
    let defect = set.completeness_defect(mode_cutoff / 2);
    if defect > policy.completeness_tol {
        return Err(FockError::CutoffInsufficient {
            defect,
            tol: policy.completeness_tol,
            detail: format!("mode cutoff {mode_cutoff}, thermal cutoff {}", set.n_cutoff),
        });
    }
    Ok(set)
}

impl KrausSet {
    /// Builds the set without checking completeness.
    pub fn build(ch: &ThermalChannel, mode_cutoff: usize, n_cutoff: usize) -> Self {
        let ell_cutoff = mode_cutoff + n_cutoff;
        let lf = LogFactorials::up_to(mode_cutoff + n_cutoff + 1);
        let tau = ch.tau();
        let mut operators = Vec::new();
        for n in 0..=n_cutoff {
            let w = thermal_weight(ch.nbar(), n);
            if w == 0.0 {
                continue;
            }
            let sw = w.sqrt();
            for ell in n.saturating_sub(mode_cutoff)..=(n + mode_cutoff).min(ell_cutoff) {
                let entries: Vec<(usize, usize, f64)> = (0..=mode_cutoff)
                    .filter_map(|p| {
                        let m = (p + n).checked_sub(ell)?;
                        if m > mode_cutoff {
                            return None;
                        }
                        let a = sw * kraus_amplitude(&lf, tau, ell, n, p);
                        (a != 0.0).then_some((p, m, a))
                    })
                    .collect();
                if !entries.is_empty() {
                    operators.push(KrausOperator { ell, n, entries });
                }
            }
        }
        KrausSet {
            channel: *ch,
            mode_cutoff,
            ell_cutoff,
            n_cutoff,
            operators,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn binomial(n: usize, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn log_factorials() {
        let lf = LogFactorials::up_to(30);
        assert_eq!(lf.ln(0), 0.0);
        assert_eq!(lf.ln(1), 0.0);
        assert_abs_diff_eq!(lf.ln(10), 3_628_800f64.ln(), epsilon = 1e-12);
        assert_eq!(lf.len(), 31);
    }

    #[test]
    fn thermal_weights_sum_to_one() {
        let total: f64 = (0..2000).map(|n| thermal_weight(20.34, n)).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        assert_eq!(thermal_weight(0.0, 0), 1.0);
        assert_eq!(thermal_weight(0.0, 3), 0.0);
        assert!(thermal_weight(20.34, 500).is_finite());
    }

    #[test]
    fn pure_loss_amplitudes() {
        // n = 0: ⟨m|G_ℓ|m+ℓ⟩ = √C(m+ℓ, ℓ) · τ^{m/2} (1−τ)^{ℓ/2}
        let lf = LogFactorials::up_to(40);
        let tau: f64 = 0.7;
        for p in 0..12 {
            for ell in 0..=p {
                let m = p - ell;
                let expected = binomial(p, ell).sqrt()
                    * tau.powf(m as f64 / 2.0)
                    * (1.0 - tau).powf(ell as f64 / 2.0);
                assert_abs_diff_eq!(
                    kraus_amplitude(&lf, tau, ell, 0, p),
                    expected,
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn vacuum_input_receives_binomial_thermal_photons() {
        // from |0⟩ the environment's n photons arrive binomially with probability 1−τ
        let lf = LogFactorials::up_to(40);
        let tau: f64 = 0.35;
        for n in 0..15 {
            for ell in 0..=n {
                let k = n - ell;
                let g = kraus_amplitude(&lf, tau, ell, n, 0);
                let prob = binomial(n, k) * (1.0 - tau).powi(k as i32) * tau.powi(ell as i32);
                assert_abs_diff_eq!(g * g, prob, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn lossless_vacuum_noise_is_identity() {
        let ch = ThermalChannel::new(1.0, 0.0).unwrap();
        let set = build_kraus_set(&ch, 6, &TruncationPolicy::default()).unwrap();
        assert_eq!(set.operators.len(), 1);
        assert_eq!(set.operators[0].to_matrix(7), DMatrix::identity(7, 7));
    }

    #[test]
    fn vacuum_noise_keeps_only_pure_loss_terms() {
        let ch = ThermalChannel::new(0.6, 0.0).unwrap();
        let set = build_kraus_set(&ch, 8, &TruncationPolicy::default()).unwrap();
        assert!(set.operators.iter().all(|op| op.n == 0));
        assert!(set.completeness_defect(8) < 1e-12);
    }

    #[test]
    fn completeness_on_interior() {
        let policy = TruncationPolicy::default();
        for (tau, nbar, cutoff) in [
            (0.99, 20.340_618_339_036, 40),
            (0.8, 0.5, 40),
            (0.3, 0.05, 30),
        ] {
            let ch = ThermalChannel::new(tau, nbar).unwrap();
            let set = build_kraus_set(&ch, cutoff, &policy).unwrap();
            assert!(set.n_cutoff >= (20.0 * (nbar + 1.0)) as usize);
            assert!(
                set.completeness_defect(cutoff / 2) < 1e-6,
                "tau={tau} nbar={nbar}"
            );
        }
    }

    #[test]
    fn truncated_thermal_expansion_is_detected() {
        let ch = ThermalChannel::new(0.5, 5.0).unwrap();
        let policy = TruncationPolicy {
            thermal_index_cutoff: Some(4),
            ..TruncationPolicy::default()
        };
        assert!(matches!(
            build_kraus_set(&ch, 10, &policy),
            Err(FockError::CutoffInsufficient { .. })
        ));
    }
}
