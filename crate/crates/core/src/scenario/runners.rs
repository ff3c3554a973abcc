use std::fmt::Write as _;

use rayon::prelude::*;

use super::{Cell, ScenarioError, ScenarioKind, SweepSpec, Table};
use crate::fock::{
    converge_log_negativity, evolve_mode2, noon_log_negativity_after_channel,
    pss_creation_probability, pss_density, ConvergedLogNeg,
};
use crate::gaussian::{
    direct_relay_cm, eb_transmissivity, eb_transmissivity_bisect, evolve_single_channel,
    log_negativity_cm, pt_symplectic_min, swap_relay_cm, thermal_tms_cm, tmsv_cm, EbScheme,
    Squeezing, ThermalChannel,
};
use crate::link::{
    channel_from_environment, contour_gain_dbi, eb_distance, friis_received_power,
    half_beamwidth_deg, mean_photon_number, thermal_variance, LinkEnvironment,
};

const BISECTION_STEPS: usize = 200;

/// Runs the scenario named in `spec`.
pub fn run(spec: &SweepSpec) -> Result<Table, ScenarioError> {
    spec.validate()?;
    match spec.kind {
        ScenarioKind::Fig1ThermalPrep => run_fig1(spec),
        ScenarioKind::Fig2Channel => run_fig2(spec),
        ScenarioKind::Fig3NonGaussian => run_fig3(spec),
        ScenarioKind::Fig4Relay => run_fig4(spec),
        ScenarioKind::LinkBudget => run_link_budget(spec),
        ScenarioKind::EbThresholds => run_eb_thresholds(spec),
    }
}

/// Root of `g` on the grid: finds the first pair of neighbouring points where
/// `g` changes sign and bisects between them.
fn locate_crossing<G>(grid: &[f64], g: G) -> Result<Option<f64>, ScenarioError>
where
    G: Fn(f64) -> Result<f64, ScenarioError>,
{
    let mut prev = (grid[0], g(grid[0])?);
    for &x in &grid[1..] {
        let gx = g(x)?;
        if gx == 0.0 {
            return Ok(Some(x));
        }
        if prev.1.signum() != gx.signum() && prev.1 != 0.0 {
            let (mut lo, mut hi, g_lo) = (prev.0, x, prev.1);
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if g(mid)?.signum() == g_lo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(Some(0.5 * (lo + hi)));
        }
        prev = (x, gx);
    }
    Ok(None)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "none".to_string(), |v| v.to_string())
}

fn fig1_nu(f_hz: f64, temp_k: f64, db: f64) -> Result<f64, ScenarioError> {
    let nbar = mean_photon_number(f_hz, temp_k);
    let cm = thermal_tms_cm(Squeezing::from_db(db)?, nbar, nbar)?;
    Ok(pt_symplectic_min(&cm)? - 1.0)
}

/// Temperature (K) at which a thermally seeded two-mode squeezer at `db`
/// stops producing entanglement, searched over `grid`.
pub fn fig1_crossing_temperature(
    f_ghz: f64,
    db: f64,
    grid: &[f64],
) -> Result<Option<f64>, ScenarioError> {
    locate_crossing(grid, |t| fig1_nu(f_ghz * 1e9, t, db))
}

/// Squeezing (dB) needed for entanglement at `temp_k`, searched over `grid`.
pub fn fig1_crossing_squeezing(
    f_ghz: f64,
    temp_k: f64,
    grid: &[f64],
) -> Result<Option<f64>, ScenarioError> {
    locate_crossing(grid, |db| fig1_nu(f_ghz * 1e9, temp_k, db))
}

pub fn run_fig1(spec: &SweepSpec) -> Result<Table, ScenarioError> {
    let temps = spec.axis.points();
    let dbs = spec.axis2.points();
    let mut table = Table::new(&["freq_ghz", "temp_k", "squeeze_db", "nbar", "e_ln_bits"]);
    for &f in &spec.frequencies_ghz {
        let rows: Vec<Vec<Cell>> = temps
            .par_iter()
            .map(|&t| -> Result<Vec<Vec<Cell>>, ScenarioError> {
                let nbar = mean_photon_number(f * 1e9, t);
                dbs.iter()
                    .map(|&db| {
                        let cm = thermal_tms_cm(Squeezing::from_db(db)?, nbar, nbar)?;
                        let e = log_negativity_cm(&cm)?;
                        Ok(vec![f.into(), t.into(), db.into(), nbar.into(), e.into()])
                    })
                    .collect()
            })
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .flatten()
            .collect();
        for row in rows {
            table.push(row);
        }
        let db_ref = spec.crossing_squeeze_db;
        let t_ref = spec.temperature_k;
        table.note(
            format!("crossing_temp_k at {f} GHz, {db_ref} dB"),
            fmt_opt(fig1_crossing_temperature(f, db_ref, &temps)?),
        );
        table.note(
            format!("crossing_squeeze_db at {f} GHz, {t_ref} K"),
            fmt_opt(fig1_crossing_squeezing(f, t_ref, &dbs)?),
        );
    }
    Ok(table)
}

fn single_channel_e_ln(s: Squeezing, tau: f64, omega: f64) -> Result<f64, ScenarioError> {
    let ch = ThermalChannel::with_omega(tau, omega)?;
    Ok(log_negativity_cm(&evolve_single_channel(&tmsv_cm(s), &ch))?)
}

pub fn run_fig2(spec: &SweepSpec) -> Result<Table, ScenarioError> {
    let s = spec.squeeze.squeezing()?;
    let taus = spec.axis.points();
    let mut table = Table::new(&[
        "freq_ghz",
        "temp_k",
        "tau",
        "nbar",
        "omega",
        "e_ln_bits",
        "tau_eb",
    ]);
    for &f in &spec.frequencies_ghz {
        let nbar = mean_photon_number(f * 1e9, spec.temperature_k);
        let omega = thermal_variance(f * 1e9, spec.temperature_k);
        let tau_eb = eb_transmissivity(EbScheme::Single, omega);
        let e: Vec<f64> = taus
            .par_iter()
            .map(|&t| single_channel_e_ln(s, t, omega))
            .collect::<Result<_, _>>()?;
        for (&t, e) in taus.iter().zip(e) {
            table.push(vec![
                f.into(),
                spec.temperature_k.into(),
                t.into(),
                nbar.into(),
                omega.into(),
                e.into(),
                tau_eb.into(),
            ]);
        }
        table.note(format!("tau_eb at {f} GHz"), tau_eb);
        table.note(
            format!("tau_eb_bisect at {f} GHz"),
            eb_transmissivity_bisect(EbScheme::Single, omega, s)?,
        );
    }
    Ok(table)
}

/// One grid point of the non-Gaussian sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Point {
    pub tau: f64,
    pub e_ln_tmsv: f64,
    pub pss: ConvergedLogNeg,
    pub e_ln_noon: Vec<f64>,
}

/// E_LN of the Gaussian, photon-subtracted and NOON states after mode 2
/// crosses `ch`.
pub fn fig3_point(
    spec: &SweepSpec,
    s: Squeezing,
    ch: &ThermalChannel,
) -> Result<Fig3Point, ScenarioError> {
    let e_ln_tmsv = log_negativity_cm(&evolve_single_channel(&tmsv_cm(s), ch))?;
    let policy = spec.truncation;
    let pss = converge_log_negativity(&policy, |n| {
        let p = policy.at_cutoff(n);
        evolve_mode2(&pss_density(s, spec.kappa, &p)?, ch, &p)
    })?;
    let e_ln_noon = spec
        .noon_n
        .iter()
        .map(|&n| noon_log_negativity_after_channel(n, ch, &policy))
        .collect::<Result<_, _>>()?;
    Ok(Fig3Point {
        tau: ch.tau(),
        e_ln_tmsv,
        pss,
        e_ln_noon,
    })
}

pub fn run_fig3(spec: &SweepSpec) -> Result<Table, ScenarioError> {
    let s = spec.squeeze.squeezing()?;
    let mut headers: Vec<String> = [
        "freq_ghz",
        "temp_k",
        "tau",
        "tau_eb",
        "e_ln_tmsv_bits",
        "e_ln_pss_bits",
        "pss_cutoff",
        "pss_change_bits",
        "pss_trace_deficit",
        "pss_converged",
    ]
    .iter()
    .map(|h| h.to_string())
    .collect();
    headers.extend(spec.noon_n.iter().map(|n| format!("e_ln_noon{n}_bits")));
    let mut table = Table::new(&headers);
    let taus = spec.axis.points();
    for &f in &spec.frequencies_ghz {
        let nbar = mean_photon_number(f * 1e9, spec.temperature_k);
        let omega = 2.0 * nbar + 1.0;
        let tau_eb = eb_transmissivity(EbScheme::Single, omega);
        let points: Vec<Fig3Point> = taus
            .par_iter()
            .map(|&t| fig3_point(spec, s, &ThermalChannel::new(t, nbar)?))
            .collect::<Result<_, _>>()?;
        let mut above = 0usize;
        let mut pss_wins = 0usize;
        let mut noon_wins = vec![0usize; spec.noon_n.len()];
        for p in &points {
            let mut row: Vec<Cell> = vec![
                f.into(),
                spec.temperature_k.into(),
                p.tau.into(),
                tau_eb.into(),
                p.e_ln_tmsv.into(),
                p.pss.e_ln.into(),
                p.pss.cutoff.into(),
                p.pss.change.into(),
                p.pss.trace_deficit.into(),
                p.pss.converged.into(),
            ];
            row.extend(p.e_ln_noon.iter().map(|&e| Cell::from(e)));
            table.push(row);
            if !p.pss.converged {
                table.non_converged += 1;
                continue;
            }
            if p.tau > tau_eb && p.tau < 1.0 {
                above += 1;
                pss_wins += usize::from(p.pss.e_ln > p.e_ln_tmsv);
                for (w, &e) in noon_wins.iter_mut().zip(&p.e_ln_noon) {
                    *w += usize::from(e > p.e_ln_tmsv);
                }
            }
        }
        table.note(format!("tau_eb at {f} GHz"), tau_eb);
        table.note(format!("converged interior points at {f} GHz"), above);
        table.note(format!("pss above tmsv at {f} GHz"), pss_wins);
        for (n, w) in spec.noon_n.iter().zip(noon_wins) {
            table.note(format!("noon{n} above tmsv at {f} GHz"), w);
        }
    }
    table.note(
        "pss heralding probability",
        pss_creation_probability(s, spec.kappa),
    );
    table.note("non-converged rows", table.non_converged);
    Ok(table)
}

pub fn run_fig4(spec: &SweepSpec) -> Result<Table, ScenarioError> {
    let s = spec.squeeze.squeezing()?;
    let taus = spec.axis.points();
    let mut table = Table::new(&[
        "freq_ghz",
        "temp_k",
        "tau_combined",
        "tau_hop",
        "e_ln_direct_bits",
        "e_ln_swap_bits",
        "e_ln_single_bits",
        "tau_eb_direct_hop",
        "tau_eb_swap_hop",
    ]);
    for &f in &spec.frequencies_ghz {
        let omega = thermal_variance(f * 1e9, spec.temperature_k);
        let eb_d = eb_transmissivity(EbScheme::DirectRelaySymmetric, omega);
        let eb_s = eb_transmissivity(EbScheme::SwapRelaySymmetric, omega);
        let rows: Vec<[f64; 3]> = taus
            .par_iter()
            .map(|&t| -> Result<[f64; 3], ScenarioError> {
                let hop = ThermalChannel::with_omega(t.sqrt(), omega)?;
                Ok([
                    log_negativity_cm(&direct_relay_cm(s, &hop, &hop))?,
                    log_negativity_cm(&swap_relay_cm(s, &hop, &hop))?,
                    single_channel_e_ln(s, t, omega)?,
                ])
            })
            .collect::<Result<_, _>>()?;
        for (&t, [d, w, single]) in taus.iter().zip(rows) {
            table.push(vec![
                f.into(),
                spec.temperature_k.into(),
                t.into(),
                t.sqrt().into(),
                d.into(),
                w.into(),
                single.into(),
                eb_d.into(),
                eb_s.into(),
            ]);
        }
        table.note(format!("tau_eb_direct_hop at {f} GHz"), eb_d);
        table.note(format!("tau_eb_swap_hop at {f} GHz"), eb_s);
        table.note(format!("tau_eb_direct_combined at {f} GHz"), eb_d * eb_d);
        table.note(format!("tau_eb_swap_combined at {f} GHz"), eb_s * eb_s);
    }
    Ok(table)
}

pub fn run_link_budget(spec: &SweepSpec) -> Result<Table, ScenarioError> {
    let model = spec.absorption_model()?;
    let s = spec.squeeze.squeezing()?;
    let mut table = Table::new(&[
        "freq_ghz",
        "temp_k",
        "distance_m",
        "aperture_m",
        "nbar",
        "omega",
        "alpha_db_per_km",
        "tau",
        "squeeze_db",
        "e_ln_bits",
        "tau_eb",
        "tau_margin",
        "beyond_eb",
        "eb_distance_m",
        "gain_dbi",
        "half_beamwidth_deg",
        "rx_power_dbm",
    ]);
    for &f in &spec.frequencies_ghz {
        for &d in &spec.distances_m {
            let env = LinkEnvironment::new(f * 1e9, spec.temperature_k, d, spec.aperture_m)?;
            let ch = channel_from_environment(&env, &model)?;
            let alpha = model.alpha_db_per_km(env.frequency_hz)?;
            let e = log_negativity_cm(&evolve_single_channel(&tmsv_cm(s), &ch))?;
            let tau_eb = eb_transmissivity(EbScheme::Single, ch.omega());
            let margin = ch.tau() - tau_eb;
            let eb_d = eb_distance(&env, &model, EbScheme::Single).ok();
            let rx = friis_received_power(&env, spec.tx_power_dbm).ok();
            table.push(vec![
                f.into(),
                spec.temperature_k.into(),
                d.into(),
                spec.aperture_m.into(),
                ch.nbar().into(),
                ch.omega().into(),
                alpha.into(),
                ch.tau().into(),
                s.db().into(),
                e.into(),
                tau_eb.into(),
                margin.into(),
                (margin <= 0.0).into(),
                eb_d.into(),
                contour_gain_dbi(env.frequency_hz, spec.aperture_m, 3.0).into(),
                half_beamwidth_deg(f, spec.aperture_m).into(),
                rx.into(),
            ]);
        }
    }
    Ok(table)
}

/// Plain-text rendering of a link-budget table.
pub fn link_report(table: &Table) -> String {
    let col = |row: &[Cell], name: &str| table.column(name).and_then(|c| row[c].as_f64());
    let num = |x: Option<f64>, prec: usize| {
        x.map_or_else(|| "n/a".to_string(), |v| format!("{v:.prec$}"))
    };
    let mut out = String::new();
    for row in &table.rows {
        let beyond = table
            .column("beyond_eb")
            .map(|c| row[c] == Cell::Bool(true))
            .unwrap_or(false);
        let _ = writeln!(
            out,
            "{} GHz, {} K, {} m hop, {} m aperture",
            num(col(row, "freq_ghz"), 1),
            num(col(row, "temp_k"), 1),
            num(col(row, "distance_m"), 1),
            num(col(row, "aperture_m"), 2),
        );
        let _ = writeln!(
            out,
            "  thermal noise   nbar = {}, omega = {}",
            num(col(row, "nbar"), 3),
            num(col(row, "omega"), 3)
        );
        let _ = writeln!(
            out,
            "  absorption      {} dB/km, tau = {}",
            num(col(row, "alpha_db_per_km"), 4),
            num(col(row, "tau"), 6)
        );
        let _ = writeln!(
            out,
            "  entanglement    E_LN = {} ebit at {} dB squeezing",
            num(col(row, "e_ln_bits"), 4),
            num(col(row, "squeeze_db"), 2)
        );
        let _ = writeln!(
            out,
            "  breaking point  tau_eb = {}, margin = {}{}, distance = {} m",
            num(col(row, "tau_eb"), 6),
            num(col(row, "tau_margin"), 6),
            if beyond { " (BEYOND)" } else { "" },
            num(col(row, "eb_distance_m"), 1)
        );
        let _ = writeln!(
            out,
            "  antenna         gain = {} dBi, half-beamwidth = {} deg, rx power = {} dBm",
            num(col(row, "gain_dbi"), 2),
            num(col(row, "half_beamwidth_deg"), 4),
            num(col(row, "rx_power_dbm"), 2)
        );
    }
    out
}

pub fn run_eb_thresholds(spec: &SweepSpec) -> Result<Table, ScenarioError> {
    let model = spec.absorption_model()?;
    let s = spec.squeeze.squeezing()?;
    let mut table = Table::new(&[
        "freq_ghz",
        "temp_k",
        "nbar",
        "omega",
        "scheme",
        "tau_eb",
        "tau_eb_bisect",
        "eb_distance_m",
    ]);
    for &f in &spec.frequencies_ghz {
        let env = LinkEnvironment::new(f * 1e9, spec.temperature_k, 0.0, spec.aperture_m)?;
        let omega = env.omega();
        for scheme in EbScheme::ALL {
            let dist = if model.covers(env.frequency_hz) {
                Some(eb_distance(&env, &model, scheme)?)
            } else {
                None
            };
            table.push(vec![
                f.into(),
                spec.temperature_k.into(),
                env.mean_photon_number().into(),
                omega.into(),
                scheme.name().into(),
                eb_transmissivity(scheme, omega).into(),
                eb_transmissivity_bisect(scheme, omega, s)?.into(),
                dist.into(),
            ]);
        }
    }
    let (lo, hi) = model.range_hz();
    table.note(
        "absorption model range GHz",
        format!("{} to {}", lo / 1e9, hi / 1e9),
    );
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_on_a_line() {
        let grid: Vec<f64> = (0..11).map(|i| i as f64).collect();
        let x = locate_crossing(&grid, |x| Ok(x - 3.3)).unwrap().unwrap();
        assert!((x - 3.3).abs() < 1e-12);
        assert_eq!(locate_crossing(&grid, |x| Ok(x + 1.0)).unwrap(), None);
    }

    #[test]
    fn small_fig3_grid_flags_rows() {
        let mut spec = SweepSpec::default_for(ScenarioKind::Fig3NonGaussian);
        spec.axis = super::super::Axis::new(0.97, 1.0, 3);
        spec.truncation.total_photon_cutoff = 6;
        let table = run(&spec).unwrap();
        assert_eq!(table.rows.len(), 3);
        assert_eq!(table.non_converged, 0);
        assert_eq!(table.footer_value("non-converged rows"), Some("0"));
        spec.truncation.convergence_tol = 1e-300;
        spec.truncation.max_total_photon_cutoff = 12;
        let table = run(&spec).unwrap();
        assert_eq!(table.non_converged, 3);
    }
}
