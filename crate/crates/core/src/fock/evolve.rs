use nalgebra::DMatrix;
use num_complex::Complex64;

use super::kraus::{kraus_amplitude, pow_ln, thermal_weight, LogFactorials};
use super::{FockDensityOp, FockError, KrausSet, TruncationPolicy, NEGATIVE_EIGENVALUE_THRESHOLD};
use crate::gaussian::ThermalChannel;

/// How the thermal-loss map is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvolutionPath {
    /// Products of single Kraus matrix elements, grouped by photon shift.
    #[default]
    Factorized,
    /// The quadruple sum over `(n, ℓ, j, j')` for each elementary `|m'⟩⟨n'|`.
    DirectSum,
    /// Explicit conjugation `Σ G ρ G†` with a materialised [`super::KrausSet`].
    KrausConjugation,
}

/// Thermal-loss channel acting on mode 2, tabulated on the truncated space.
///
/// The channel is phase covariant, so `|p⟩⟨q|` only maps onto
/// `|p+k⟩⟨q+k|`. The table stores the coefficient of each shift `k`.
#[derive(Debug, Clone)]
pub struct ThermalLossMap {
    channel: ThermalChannel,
    in_cutoff: usize,
    out_cutoff: usize,
    thermal_cutoff: usize,
    transfer: Vec<f64>,
}

impl ThermalLossMap {
    pub fn build(
        channel: &ThermalChannel,
        in_cutoff: usize,
        out_cutoff: usize,
        thermal_cutoff: usize,
        path: EvolutionPath,
    ) -> Self {
        let mut map = Self {
            channel: *channel,
            in_cutoff,
            out_cutoff,
            thermal_cutoff,
            transfer: vec![0.0; (in_cutoff + 1).pow(2) * (in_cutoff + out_cutoff + 1)],
        };
        if channel.tau() == 1.0 {
            for p in 0..=in_cutoff.min(out_cutoff) {
                for q in 0..=in_cutoff.min(out_cutoff) {
                    let i = map.slot(p, q, 0);
                    map.transfer[i] = 1.0;
                }
            }
            return map;
        }
        match path {
            EvolutionPath::DirectSum => map.fill_direct(),
            _ => map.fill_factorized(),
        }
        map
    }

    #[inline]
    fn slot(&self, p: usize, q: usize, k: isize) -> usize {
        let span = self.in_cutoff + self.out_cutoff + 1;
        (p * (self.in_cutoff + 1) + q) * span + (k + self.in_cutoff as isize) as usize
    }

    /// Range of shifts `k` that keep both `p+k` and `q+k` inside the output box.
    fn shifts(&self, p: usize, q: usize) -> std::ops::RangeInclusive<isize> {
        let lo = -(p.min(q) as isize);
        let hi = self.out_cutoff as isize - p.max(q) as isize;
        lo..=hi
    }

    /// Coefficient of `|p+k⟩⟨q+k|` in the image of `|p⟩⟨q|`.
    pub fn transfer(&self, p: usize, q: usize, k: isize) -> f64 {
        if p > self.in_cutoff || q > self.in_cutoff || !self.shifts(p, q).contains(&k) {
            return 0.0;
        }
        self.transfer[self.slot(p, q, k)]
    }

    pub fn channel(&self) -> &ThermalChannel {
        &self.channel
    }

    pub fn out_cutoff(&self) -> usize {
        self.out_cutoff
    }

    pub fn thermal_cutoff(&self) -> usize {
        self.thermal_cutoff
    }

    fn fill_factorized(&mut self) {
        let (din, dout) = (self.in_cutoff + 1, self.out_cutoff + 1);
        let lf = LogFactorials::up_to(self.in_cutoff + self.out_cutoff + self.thermal_cutoff + 1);
        let tau = self.channel.tau();
        let mut g = vec![0.0; din * dout];
        for n in 0..=self.thermal_cutoff {
            let w = thermal_weight(self.channel.nbar(), n);
            if w == 0.0 {
                continue;
            }
            // g[p][m] = ⟨m|G_{ℓ,n}|p⟩ with ℓ = p + n − m
            for p in 0..din {
                for m in 0..dout {
                    g[p * dout + m] = match (p + n).checked_sub(m) {
                        Some(ell) => kraus_amplitude(&lf, tau, ell, n, p),
                        None => 0.0,
                    };
                }
            }
            for p in 0..din {
                for q in 0..din {
                    for k in self.shifts(p, q) {
                        if k > n as isize {
                            break;
                        }
                        let gp = g[p * dout + (p as isize + k) as usize];
                        let gq = g[q * dout + (q as isize + k) as usize];
                        let i = self.slot(p, q, k);
                        self.transfer[i] += w * gp * gq;
                    }
                }
            }
        }
    }

    fn fill_direct(&mut self) {
        let lf = LogFactorials::up_to(self.in_cutoff + self.out_cutoff + self.thermal_cutoff + 1);
        for p in 0..=self.in_cutoff {
            for q in 0..=self.in_cutoff {
                for (k, coeff) in elementary_image(
                    &lf,
                    &self.channel,
                    self.thermal_cutoff,
                    p,
                    q,
                    self.out_cutoff,
                ) {
                    let i = self.slot(p, q, k);
                    self.transfer[i] = coeff;
                }
            }
        }
    }

    /// Applies the map to mode 2. Mode 1 is untouched; probability pushed
    /// beyond the output box is added to the trace deficit.
    pub fn apply(&self, rho: &FockDensityOp) -> Result<FockDensityOp, FockError> {
        if rho.cutoff2() > self.in_cutoff {
            return Err(FockError::DimensionMismatch(format!(
                "state mode-2 cutoff {} exceeds map input cutoff {}",
                rho.cutoff2(),
                self.in_cutoff
            )));
        }
        let c1 = rho.cutoff1();
        let (din, dout) = (rho.cutoff2() + 1, self.out_cutoff + 1);
        let dim_out = (c1 + 1) * dout;
        let zero = Complex64::new(0.0, 0.0);
        let mut out = DMatrix::from_element(dim_out, dim_out, zero);
        let input = rho.matrix();
        for c in 0..input.ncols() {
            let (b1, q) = (c / din, c % din);
            for r in 0..input.nrows() {
                let x = input[(r, c)];
                if x == zero {
                    continue;
                }
                let (a1, p) = (r / din, r % din);
                for k in self.shifts(p, q) {
                    let t = self.transfer[self.slot(p, q, k)];
                    if t != 0.0 {
                        let ro = a1 * dout + (p as isize + k) as usize;
                        let co = b1 * dout + (q as isize + k) as usize;
                        out[(ro, co)] += x * t;
                    }
                }
            }
        }
        let trace_out: f64 = out.diagonal().iter().map(|z| z.re).sum();
        let deficit = rho.trace_deficit() + (rho.trace() - trace_out);
        Ok(FockDensityOp::from_parts_unchecked(
            c1,
            self.out_cutoff,
            out,
            deficit,
        ))
    }
}

/// Image of the elementary operator `|mp⟩⟨np|` as `(shift, coefficient)`
/// pairs, written out as the full quadruple sum over the thermal index `n`,
/// the loss index `ℓ` and the two binomial indices `j`, `j'`.
fn elementary_image(
    lf: &LogFactorials,
    ch: &ThermalChannel,
    thermal_cutoff: usize,
    mp: usize,
    np: usize,
    out_cutoff: usize,
) -> Vec<(isize, f64)> {
    let tau = ch.tau();
    let ln_loss = (1.0 - tau).ln();
    let ln_keep = 0.5 * tau.ln();
    let lo = -(mp.min(np) as isize);
    let hi = out_cutoff as isize - mp.max(np) as isize;
    let mut acc = vec![0.0; (hi - lo + 1).max(0) as usize];
    for n in 0..=thermal_cutoff {
        let w = thermal_weight(ch.nbar(), n);
        if w == 0.0 {
            continue;
        }
        let ell_max = (mp + n).min(np + n);
        for ell in 0..=ell_max {
            let k = n as isize - ell as isize;
            if k < lo || k > hi {
                continue;
            }
            let (out_m, out_n) = (mp + n - ell, np + n - ell);
            let mut sum = 0.0;
            for j in ell.saturating_sub(mp)..=n.min(ell) {
                for jp in ell.saturating_sub(np)..=n.min(ell) {
                    let ln_a = 0.5 * (lf.ln(out_m) + lf.ln(ell) + lf.ln(mp) + lf.ln(n))
                        - lf.ln(mp + j - ell)
                        - lf.ln(ell - j)
                        - lf.ln(n - j)
                        - lf.ln(j);
                    let ln_b = 0.5 * (lf.ln(out_n) + lf.ln(ell) + lf.ln(np) + lf.ln(n))
                        - lf.ln(np + jp - ell)
                        - lf.ln(ell - jp)
                        - lf.ln(n - jp)
                        - lf.ln(jp);
                    let ln_pow = pow_ln(ell + n - j - jp, ln_loss)
                        + pow_ln(mp + np + 2 * j + 2 * jp - 2 * ell, ln_keep);
                    let term = (ln_a + ln_b + ln_pow).exp();
                    if (2 * n - j - jp) % 2 == 1 {
                        sum -= term;
                    } else {
                        sum += term;
                    }
                }
            }
            acc[(k - lo) as usize] += w * sum;
        }
    }
    acc.into_iter()
        .enumerate()
        .map(|(i, c)| (i as isize + lo, c))
        .collect()
}

fn thermal_tail(nbar: f64, thermal_cutoff: usize) -> f64 {
    if nbar == 0.0 {
        0.0
    } else {
        (nbar / (nbar + 1.0)).powi(thermal_cutoff as i32 + 1)
    }
}

fn check_thermal_cutoff(
    ch: &ThermalChannel,
    policy: &TruncationPolicy,
) -> Result<usize, FockError> {
    let n_cut = policy.thermal_cutoff_for(ch.nbar());
    let tail = thermal_tail(ch.nbar(), n_cut);
    if tail > policy.completeness_tol {
        return Err(FockError::CutoffInsufficient {
            defect: tail,
            tol: policy.completeness_tol,
            detail: format!("thermal cutoff {n_cut} for nbar {}", ch.nbar()),
        });
    }
    Ok(n_cut)
}

/// Sends mode 2 of `rho` through `ch`.
///
/// The output box keeps `rho`'s mode-1 cutoff and extends mode 2 to
/// `max(rho.cutoff2, policy.total_photon_cutoff)`.
pub fn evolve_mode2(
    rho: &FockDensityOp,
    ch: &ThermalChannel,
    policy: &TruncationPolicy,
) -> Result<FockDensityOp, FockError> {
    evolve_mode2_with(rho, ch, policy, EvolutionPath::Factorized)
}

pub fn evolve_mode2_with(
    rho: &FockDensityOp,
    ch: &ThermalChannel,
    policy: &TruncationPolicy,
    path: EvolutionPath,
) -> Result<FockDensityOp, FockError> {
    policy.validate()?;
    if ch.tau() == 1.0 {
        return Ok(rho.clone());
    }
    let n_cut = check_thermal_cutoff(ch, policy)?;
    let out_cutoff = rho.cutoff2().max(policy.total_photon_cutoff);
    match path {
        EvolutionPath::KrausConjugation => KrausSet::build(ch, out_cutoff, n_cut).apply_mode2(rho),
        _ => ThermalLossMap::build(ch, rho.cutoff2(), out_cutoff, n_cut, path).apply(rho),
    }
}

/// E_LN of a NOON state `(|n,0⟩+|0,n⟩)/√2` after mode 2 crosses `ch`.
///
/// The partial transpose splits into 2×2 blocks on `{|0,b⟩, |n,b+n⟩}` and
/// non-negative diagonal entries, and the thermal cutoff bounds `b`, so no
/// photon-number truncation is involved.
pub fn noon_log_negativity_after_channel(
    n: usize,
    ch: &ThermalChannel,
    policy: &TruncationPolicy,
) -> Result<f64, FockError> {
    policy.validate()?;
    if n < 1 {
        return Err(FockError::InvalidParameter(
            "NOON photon number must be >= 1".into(),
        ));
    }
    if ch.tau() == 1.0 {
        return Ok(1.0);
    }
    let n_cut = check_thermal_cutoff(ch, policy)?;
    let lf = LogFactorials::up_to(n + 2 * n_cut + 2);
    let tau = ch.tau();
    // shifts k in [-n, n_cut]
    let idx = |k: isize| (k + n as isize) as usize;
    let len = n + n_cut + 1;
    let (mut t00, mut tnn, mut t0n) = (vec![0.0; len], vec![0.0; len], vec![0.0; len]);
    for nt in 0..=n_cut {
        let w = thermal_weight(ch.nbar(), nt);
        if w == 0.0 {
            continue;
        }
        for ell in 0..=(nt + n) {
            let k = nt as isize - ell as isize;
            let gn = kraus_amplitude(&lf, tau, ell, nt, n);
            tnn[idx(k)] += w * gn * gn;
            if k >= 0 {
                let g0 = kraus_amplitude(&lf, tau, ell, nt, 0);
                t00[idx(k)] += w * g0 * g0;
                t0n[idx(k)] += w * g0 * gn;
            }
        }
    }
    let mut negativity = 0.0;
    for b in 0..=n_cut {
        let alpha = 0.5 * tnn[idx(b as isize - n as isize)];
        let beta = if b + n <= n_cut {
            0.5 * t00[idx((b + n) as isize)]
        } else {
            0.0
        };
        let gamma = 0.5 * t0n[idx(b as isize)];
        let lowest = 0.5 * (alpha + beta) - (0.25 * (alpha - beta).powi(2) + gamma * gamma).sqrt();
        if lowest < -NEGATIVE_EIGENVALUE_THRESHOLD {
            negativity -= lowest;
        }
    }
    Ok((1.0 + 2.0 * negativity).log2())
}
