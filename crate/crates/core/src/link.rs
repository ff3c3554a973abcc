//! Physical layer: blackbody occupation, atmospheric absorption and the
//! classical free-space budget.
//!
//! The Friis helpers are reporting tools. They are never used to derive the
//! transmissivity of a quantum channel; that comes from absorption alone.

use std::path::Path;

use thiserror::Error;

use crate::gaussian::{eb_transmissivity, EbScheme, GaussianError, ThermalChannel};

/// Planck constant, J·s (CODATA 2018, exact).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant, J/K (CODATA 2018, exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Frequencies outside this band are accepted but not expected.
pub const MMWAVE_BAND_HZ: (f64, f64) = (1e9, 300e9);

#[derive(Debug, Error)]
pub enum LinkError {
    #[error("invalid link parameter: {0}")]
    InvalidParameter(String),
    #[error("frequency {freq_ghz} GHz outside absorption model range [{min_ghz}, {max_ghz}] GHz")]
    FrequencyOutOfModelRange {
        freq_ghz: f64,
        min_ghz: f64,
        max_ghz: f64,
    },
    #[error("no entanglement-breaking distance: {0}")]
    NoBreakingDistance(String),
    #[error("absorption table line {line}: {msg}")]
    TableParse { line: usize, msg: String },
    #[error("reading absorption table: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
}

/// Mean photon number of a thermal mode at frequency `f_hz` and temperature `t_k`.
pub fn mean_photon_number(f_hz: f64, t_k: f64) -> f64 {
    if t_k <= 0.0 {
        return 0.0;
    }
    1.0 / (PLANCK * f_hz / (BOLTZMANN * t_k)).exp_m1()
}

/// Quadrature variance of the thermal mode, `ω = 2n̄ + 1`.
pub fn thermal_variance(f_hz: f64, t_k: f64) -> f64 {
    2.0 * mean_photon_number(f_hz, t_k) + 1.0
}

/// Environment of a single line-of-sight hop.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkEnvironment {
    pub frequency_hz: f64,
    pub temperature_k: f64,
    pub distance_m: f64,
    /// Transmit aperture size `D`.
    pub aperture_m: f64,
    pub tx_gain_dbi: Option<f64>,
    pub rx_gain_dbi: Option<f64>,
}

impl LinkEnvironment {
    pub fn new(
        frequency_hz: f64,
        temperature_k: f64,
        distance_m: f64,
        aperture_m: f64,
    ) -> Result<Self, LinkError> {
        let env = Self {
            frequency_hz,
            temperature_k,
            distance_m,
            aperture_m,
            tx_gain_dbi: None,
            rx_gain_dbi: None,
        };
        env.validate()?;
        Ok(env)
    }

    pub fn with_gains(mut self, tx_dbi: f64, rx_dbi: f64) -> Self {
        self.tx_gain_dbi = Some(tx_dbi);
        self.rx_gain_dbi = Some(rx_dbi);
        self
    }

    pub fn validate(&self) -> Result<(), LinkError> {
        let bad = |what: &str, v: f64| Err(LinkError::InvalidParameter(format!("{what} = {v}")));
        if !(self.frequency_hz.is_finite() && self.frequency_hz > 0.0) {
            return bad("frequency_hz", self.frequency_hz);
        }
        if !(self.temperature_k.is_finite() && self.temperature_k >= 0.0) {
            return bad("temperature_k", self.temperature_k);
        }
        if !(self.distance_m.is_finite() && self.distance_m >= 0.0) {
            return bad("distance_m", self.distance_m);
        }
        if !(self.aperture_m.is_finite() && self.aperture_m > 0.0) {
            return bad("aperture_m", self.aperture_m);
        }
        Ok(())
    }

    pub fn in_mmwave_band(&self) -> bool {
        (MMWAVE_BAND_HZ.0..=MMWAVE_BAND_HZ.1).contains(&self.frequency_hz)
    }

    pub fn frequency_ghz(&self) -> f64 {
        self.frequency_hz / 1e9
    }

    pub fn mean_photon_number(&self) -> f64 {
        mean_photon_number(self.frequency_hz, self.temperature_k)
    }

    pub fn omega(&self) -> f64 {
        thermal_variance(self.frequency_hz, self.temperature_k)
    }

    /// Transmit and receive gains; unspecified gains default to the
    /// aperture gain at the 3 dB contour.
    pub fn gains_dbi(&self) -> (f64, f64) {
        let default = contour_gain_dbi(self.frequency_hz, self.aperture_m, 3.0);
        (
            self.tx_gain_dbi.unwrap_or(default),
            self.rx_gain_dbi.unwrap_or(default),
        )
    }
}

/// Piecewise-linear atmospheric absorption curve in dB/km.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionModel {
    points: Vec<(f64, f64)>,
}

impl AbsorptionModel {
    /// `points` are `(frequency_hz, alpha_db_per_km)`.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, LinkError> {
        if points.is_empty() {
            return Err(LinkError::InvalidParameter(
                "absorption model has no points".into(),
            ));
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(LinkError::InvalidParameter(
                    "absorption model frequencies must be strictly increasing".into(),
                ));
            }
        }
        if let Some(&(f, a)) = points
            .iter()
            .find(|(f, a)| !f.is_finite() || *f <= 0.0 || !a.is_finite() || *a < 0.0)
        {
            return Err(LinkError::InvalidParameter(format!(
                "bad absorption point ({f}, {a})"
            )));
        }
        Ok(Self { points })
    }

    /// Two anchors: 0.2 % loss over 100 m at 30 GHz and 2.3 % over 50 m at
    /// 300 GHz, joined linearly.
    pub fn default_model() -> Self {
        let alpha30 = -10.0 * 0.998f64.log10() / 0.1;
        let alpha300 = -10.0 * 0.977f64.log10() / 0.05;
        Self {
            points: vec![(30e9, alpha30), (300e9, alpha300)],
        }
    }

    /// Parses a two-column table `frequency_ghz alpha_db_per_km`. Columns may
    /// be separated by whitespace or commas; `#` starts a comment line.
    pub fn parse_table(text: &str) -> Result<Self, LinkError> {
        let mut points = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            let err = |msg: String| LinkError::TableParse { line: idx + 1, msg };
            if cols.len() != 2 {
                return Err(err(format!("expected 2 columns, found {}", cols.len())));
            }
            let f: f64 = cols[0]
                .parse()
                .map_err(|e| err(format!("frequency: {e}")))?;
            let a: f64 = cols[1].parse().map_err(|e| err(format!("alpha: {e}")))?;
            points.push((f * 1e9, a));
        }
        Self::new(points)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LinkError> {
        Self::parse_table(&std::fs::read_to_string(path)?)
    }

    pub fn to_table(&self) -> String {
        let mut out = String::from("# frequency_ghz alpha_db_per_km\n");
        for (f, a) in &self.points {
            out.push_str(&format!("{} {}\n", f / 1e9, a));
        }
        out
    }

    pub fn range_hz(&self) -> (f64, f64) {
        (self.points[0].0, self.points[self.points.len() - 1].0)
    }

    pub fn covers(&self, f_hz: f64) -> bool {
        let (lo, hi) = self.range_hz();
        f_hz >= lo && f_hz <= hi
    }

    pub fn alpha_db_per_km(&self, f_hz: f64) -> Result<f64, LinkError> {
        let (lo, hi) = self.range_hz();
        if !self.covers(f_hz) {
            return Err(LinkError::FrequencyOutOfModelRange {
                freq_ghz: f_hz / 1e9,
                min_ghz: lo / 1e9,
                max_ghz: hi / 1e9,
            });
        }
        let i = self.points.partition_point(|&(f, _)| f < f_hz);
        if i < self.points.len() && self.points[i].0 == f_hz {
            return Ok(self.points[i].1);
        }
        let (f0, a0) = self.points[i - 1];
        let (f1, a1) = self.points[i];
        Ok(a0 + (a1 - a0) * (f_hz - f0) / (f1 - f0))
    }
}

impl Default for AbsorptionModel {
    fn default() -> Self {
        Self::default_model()
    }
}

/// Received power in dBm from the Friis equation. Gains come from
/// [`LinkEnvironment::gains_dbi`].
pub fn friis_received_power(env: &LinkEnvironment, pt_dbm: f64) -> Result<f64, LinkError> {
    env.validate()?;
    if env.distance_m <= 0.0 {
        return Err(LinkError::InvalidParameter(
            "Friis equation needs distance > 0".into(),
        ));
    }
    let (gt, gr) = env.gains_dbi();
    let path = 20.0
        * (SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * env.distance_m * env.frequency_hz))
            .log10();
    Ok(pt_dbm + gt + gr + path)
}

/// Peak gain of a uniformly illuminated aperture of size `d_m`,
/// `(πD/λ)²` in dBi.
pub fn aperture_gain_dbi(f_hz: f64, d_m: f64) -> f64 {
    20.0 * (std::f64::consts::PI * d_m * f_hz / SPEED_OF_LIGHT).log10()
}

/// Gain on the `contour_db`-down contour of the main lobe.
pub fn contour_gain_dbi(f_hz: f64, d_m: f64, contour_db: f64) -> f64 {
    aperture_gain_dbi(f_hz, d_m) - contour_db
}

/// 3 dB half-beamwidth in degrees, `10/(f·D)` with `f` in GHz and `D` in metres.
pub fn half_beamwidth_deg(f_ghz: f64, d_m: f64) -> f64 {
    10.0 / (f_ghz * d_m)
}

/// Transmissivity from absorption over the hop distance.
pub fn absorption_transmissivity(alpha_db_per_km: f64, distance_m: f64) -> f64 {
    10f64.powf(-alpha_db_per_km * (distance_m / 1000.0) / 10.0)
}

pub fn channel_from_environment(
    env: &LinkEnvironment,
    model: &AbsorptionModel,
) -> Result<ThermalChannel, LinkError> {
    env.validate()?;
    let alpha = model.alpha_db_per_km(env.frequency_hz)?;
    let tau = absorption_transmissivity(alpha, env.distance_m);
    Ok(ThermalChannel::new(tau, env.mean_photon_number())?)
}

/// Hop length at which absorption alone brings the transmissivity down to the
/// scheme's entanglement-breaking value. `env.distance_m` is ignored.
pub fn eb_distance(
    env: &LinkEnvironment,
    model: &AbsorptionModel,
    scheme: EbScheme,
) -> Result<f64, LinkError> {
    env.validate()?;
    let alpha = model.alpha_db_per_km(env.frequency_hz)?;
    if alpha <= 0.0 {
        return Err(LinkError::NoBreakingDistance(format!(
            "no absorption at {} GHz",
            env.frequency_ghz()
        )));
    }
    let tau_eb = eb_transmissivity(scheme, env.omega());
    if tau_eb <= 0.0 {
        return Err(LinkError::NoBreakingDistance(
            "vacuum noise (omega = 1)".into(),
        ));
    }
    Ok(-10.0 * tau_eb.log10() / alpha * 1000.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn photon_number_edge_cases() {
        assert_eq!(mean_photon_number(300e9, 0.0), 0.0);
        assert_eq!(thermal_variance(300e9, 0.0), 1.0);
        // choose T so that hf/kT = ln 2
        let f = 100e9;
        let t = PLANCK * f / (BOLTZMANN * std::f64::consts::LN_2);
        assert_abs_diff_eq!(mean_photon_number(f, t), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn photon_number_reference_values() {
        // reference values from 50-digit evaluation with the same constants
        assert_abs_diff_eq!(
            mean_photon_number(300e9, 300.0),
            20.340_618_339_036,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            thermal_variance(300e9, 300.0),
            41.681_236_678_072,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            thermal_variance(30e9, 300.0),
            416.733_182_340_08,
            epsilon = 1e-7
        );
    }

    #[test]
    fn photon_number_monotone() {
        let mut prev = 0.0;
        for t in [1.0, 10.0, 70.0, 300.0, 1000.0] {
            let n = mean_photon_number(100e9, t);
            assert!(n > prev);
            prev = n;
        }
        let mut prev = f64::INFINITY;
        for f in [1e9, 15e9, 30e9, 100e9, 300e9] {
            let n = mean_photon_number(f, 300.0);
            assert!(n < prev);
            prev = n;
        }
    }

    #[test]
    fn friis_scaling() {
        let env = LinkEnvironment::new(60e9, 290.0, 10.0, 0.2).unwrap();
        let far = LinkEnvironment {
            distance_m: 100.0,
            ..env.clone()
        };
        let p1 = friis_received_power(&env, 10.0).unwrap();
        let p2 = friis_received_power(&far, 10.0).unwrap();
        assert_abs_diff_eq!(p1 - p2, 20.0, epsilon = 1e-10);

        let f = 30e9;
        let r = SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * f);
        let unity = LinkEnvironment::new(f, 300.0, r, 1.0)
            .unwrap()
            .with_gains(0.0, 0.0);
        assert_abs_diff_eq!(
            friis_received_power(&unity, 17.0).unwrap(),
            17.0,
            epsilon = 1e-10
        );
        let zero = LinkEnvironment {
            distance_m: 0.0,
            ..unity
        };
        assert!(friis_received_power(&zero, 0.0).is_err());
    }

    #[test]
    fn beamwidth_and_gain() {
        assert_abs_diff_eq!(half_beamwidth_deg(300.0, 1.0), 1.0 / 30.0, epsilon = 1e-15);
        assert_abs_diff_eq!(half_beamwidth_deg(150.0, 1.0), 1.0 / 15.0, epsilon = 1e-15);
        assert_abs_diff_eq!(half_beamwidth_deg(300.0, 2.0), 1.0 / 60.0, epsilon = 1e-15);
        let g3 = contour_gain_dbi(300e9, 1.0, 3.0);
        assert!((60.0..=70.0).contains(&g3), "{g3}");
        let g10 = contour_gain_dbi(300e9, 1.0, 10.0);
        assert!((g10 - 60.0).abs() < 1.0, "{g10}");
    }

    #[test]
    fn default_model_anchors() {
        let m = AbsorptionModel::default_model();
        let ch30 =
            channel_from_environment(&LinkEnvironment::new(30e9, 300.0, 100.0, 1.0).unwrap(), &m)
                .unwrap();
        assert_abs_diff_eq!(ch30.tau(), 0.998, epsilon = 1e-12);
        let ch300 =
            channel_from_environment(&LinkEnvironment::new(300e9, 300.0, 50.0, 1.0).unwrap(), &m)
                .unwrap();
        assert_abs_diff_eq!(ch300.tau(), 0.977, epsilon = 1e-12);
        let zero =
            channel_from_environment(&LinkEnvironment::new(100e9, 300.0, 0.0, 1.0).unwrap(), &m)
                .unwrap();
        assert_eq!(zero.tau(), 1.0);
        let err =
            channel_from_environment(&LinkEnvironment::new(15e9, 300.0, 10.0, 1.0).unwrap(), &m);
        assert!(matches!(
            err,
            Err(LinkError::FrequencyOutOfModelRange { .. })
        ));
    }

    #[test]
    fn interpolation_is_linear() {
        let m = AbsorptionModel::new(vec![(10e9, 1.0), (20e9, 3.0), (40e9, 4.0)]).unwrap();
        assert_abs_diff_eq!(m.alpha_db_per_km(15e9).unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.alpha_db_per_km(20e9).unwrap(), 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.alpha_db_per_km(30e9).unwrap(), 3.5, epsilon = 1e-12);
        assert_abs_diff_eq!(m.alpha_db_per_km(40e9).unwrap(), 4.0, epsilon = 1e-12);
        assert!(AbsorptionModel::new(vec![(20e9, 1.0), (10e9, 1.0)]).is_err());
        assert!(AbsorptionModel::new(vec![(20e9, -1.0)]).is_err());
    }

    #[test]
    fn table_parsing() {
        let text = "# freq alpha\n30 0.05\n\n 100, 0.5\n# trailing\n300\t2.0\n";
        let m = AbsorptionModel::parse_table(text).unwrap();
        assert_eq!(m.range_hz(), (30e9, 300e9));
        assert_abs_diff_eq!(m.alpha_db_per_km(100e9).unwrap(), 0.5, epsilon = 1e-12);
        let back = AbsorptionModel::parse_table(&m.to_table()).unwrap();
        assert_eq!(back, m);
        assert!(matches!(
            AbsorptionModel::parse_table("30 0.1\n40 x\n"),
            Err(LinkError::TableParse { line: 2, .. })
        ));
        assert!(AbsorptionModel::parse_table("30 0.1 7\n").is_err());
    }

    #[test]
    fn eb_distance_consistency() {
        let m = AbsorptionModel::default_model();
        for f in [30e9, 100e9, 300e9] {
            for scheme in EbScheme::ALL {
                let env = LinkEnvironment::new(f, 300.0, 0.0, 1.0).unwrap();
                let r = eb_distance(&env, &m, scheme).unwrap();
                let at = LinkEnvironment {
                    distance_m: r,
                    ..env.clone()
                };
                let tau = channel_from_environment(&at, &m).unwrap().tau();
                assert_abs_diff_eq!(tau, eb_transmissivity(scheme, env.omega()), epsilon = 1e-6);
            }
        }
        let cold = LinkEnvironment::new(300e9, 0.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            eb_distance(&cold, &m, EbScheme::Single),
            Err(LinkError::NoBreakingDistance(_))
        ));
    }

    #[test]
    fn environment_validation() {
        assert!(LinkEnvironment::new(0.0, 300.0, 1.0, 1.0).is_err());
        assert!(LinkEnvironment::new(1e9, -1.0, 1.0, 1.0).is_err());
        assert!(LinkEnvironment::new(1e9, 300.0, -1.0, 1.0).is_err());
        assert!(LinkEnvironment::new(1e9, 300.0, 1.0, 0.0).is_err());
        assert!(LinkEnvironment::new(300e9, 300.0, 1.0, 1.0)
            .unwrap()
            .in_mmwave_band());
        assert!(!LinkEnvironment::new(500e9, 300.0, 1.0, 1.0)
            .unwrap()
            .in_mmwave_band());
    }
}
