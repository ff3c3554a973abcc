//! `key = value` config files, one section per scenario.
//!
//! Keys outside any section apply to every scenario; keys in the scenario's
//! own section override them. Lists are comma separated.
//!
//! ```text
//! temp_k = 300
//!
//! [fig2-channel]
//! freq_ghz = 15, 30, 100, 300
//! squeeze_db = 10
//! axis_min = 0
//! axis_max = 1
//! points = 201
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::{Ini, Properties};

use super::{ScenarioError, ScenarioKind, SqueezeSetting, SweepSpec};

const KEYS: &[&str] = &[
    "axis_min",
    "axis_max",
    "points",
    "axis2_min",
    "axis2_max",
    "points2",
    "freq_ghz",
    "temp_k",
    "squeeze_db",
    "squeeze_variance",
    "crossing_squeeze_db",
    "kappa",
    "noon_n",
    "cutoff",
    "max_cutoff",
    "thermal_cutoff",
    "tol",
    "completeness_tol",
    "distances_m",
    "aperture_m",
    "tx_power_dbm",
    "absorption_table",
    "out",
];

fn parse<T: FromStr>(key: &str, raw: &str) -> Result<T, ScenarioError> {
    raw.trim()
        .parse()
        .map_err(|_| ScenarioError::Config(format!("`{key}`: cannot parse `{raw}`")))
}

fn parse_list<T: FromStr>(key: &str, raw: &str) -> Result<Vec<T>, ScenarioError> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

impl SweepSpec {
    /// Reads the section for `kind` (plus the general section) from INI text
    /// and layers it over [`SweepSpec::default_for`].
    pub fn from_ini_str(kind: ScenarioKind, text: &str) -> Result<Self, ScenarioError> {
        let ini = Ini::load_from_str_noescape(text)
            .map_err(|e| ScenarioError::Config(format!("parse error: {e}")))?;
        for name in ini.sections().flatten() {
            if !ScenarioKind::ALL
                .iter()
                .any(|k| k.name() == name || k.command() == name)
            {
                return Err(ScenarioError::Config(format!("unknown section [{name}]")));
            }
        }
        let mut spec = SweepSpec::default_for(kind);
        spec.apply(ini.general_section())?;
        for name in [kind.name(), kind.command()] {
            if let Some(props) = ini.section(Some(name)) {
                spec.apply(props)?;
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_ini_file(
        kind: ScenarioKind,
        path: impl AsRef<Path>,
    ) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScenarioError::Config(format!("{}: {e}", path.display())))?;
        Self::from_ini_str(kind, &text)
    }

    fn apply(&mut self, props: &Properties) -> Result<(), ScenarioError> {
        for (key, raw) in props.iter() {
            if !KEYS.contains(&key) {
                return Err(ScenarioError::Config(format!("unknown key `{key}`")));
            }
            match key {
                "axis_min" => self.axis.min = parse(key, raw)?,
                "axis_max" => self.axis.max = parse(key, raw)?,
                "points" => self.axis.steps = parse(key, raw)?,
                "axis2_min" => self.axis2.min = parse(key, raw)?,
                "axis2_max" => self.axis2.max = parse(key, raw)?,
                "points2" => self.axis2.steps = parse(key, raw)?,
                "freq_ghz" => self.frequencies_ghz = parse_list(key, raw)?,
                "temp_k" => self.temperature_k = parse(key, raw)?,
                "squeeze_db" => self.squeeze = SqueezeSetting::Db(parse(key, raw)?),
                "squeeze_variance" => self.squeeze = SqueezeSetting::Variance(parse(key, raw)?),
                "crossing_squeeze_db" => self.crossing_squeeze_db = parse(key, raw)?,
                "kappa" => self.kappa = parse(key, raw)?,
                "noon_n" => self.noon_n = parse_list(key, raw)?,
                "cutoff" => self.truncation.total_photon_cutoff = parse(key, raw)?,
                "max_cutoff" => self.truncation.max_total_photon_cutoff = parse(key, raw)?,
                "thermal_cutoff" => {
                    self.truncation.thermal_index_cutoff = match raw.trim() {
                        "auto" => None,
                        v => Some(parse(key, v)?),
                    }
                }
                "tol" => self.truncation.convergence_tol = parse(key, raw)?,
                "completeness_tol" => self.truncation.completeness_tol = parse(key, raw)?,
                "distances_m" => self.distances_m = parse_list(key, raw)?,
                "aperture_m" => self.aperture_m = parse(key, raw)?,
                "tx_power_dbm" => self.tx_power_dbm = parse(key, raw)?,
                "absorption_table" => self.absorption_table = Some(PathBuf::from(raw.trim())),
                "out" => self.output = Some(PathBuf::from(raw.trim())),
                _ => unreachable!(),
            }
        }
        Ok(())
    }

    /// Serialises every field into a single section named after the
    /// scenario. Reading it back yields an equal spec.
    pub fn to_ini_string(&self) -> String {
        let mut ini = Ini::new();
        let mut sec = ini.with_section(Some(self.kind.name()));
        sec.set("axis_min", self.axis.min.to_string())
            .set("axis_max", self.axis.max.to_string())
            .set("points", self.axis.steps.to_string())
            .set("axis2_min", self.axis2.min.to_string())
            .set("axis2_max", self.axis2.max.to_string())
            .set("points2", self.axis2.steps.to_string())
            .set("freq_ghz", join(&self.frequencies_ghz))
            .set("temp_k", self.temperature_k.to_string());
        match self.squeeze {
            SqueezeSetting::Db(db) => sec.set("squeeze_db", db.to_string()),
            SqueezeSetting::Variance(v) => sec.set("squeeze_variance", v.to_string()),
        };
        let t = &self.truncation;
        sec.set("crossing_squeeze_db", self.crossing_squeeze_db.to_string())
            .set("kappa", self.kappa.to_string())
            .set("noon_n", join(&self.noon_n))
            .set("cutoff", t.total_photon_cutoff.to_string())
            .set("max_cutoff", t.max_total_photon_cutoff.to_string())
            .set(
                "thermal_cutoff",
                t.thermal_index_cutoff
                    .map_or("auto".to_string(), |n| n.to_string()),
            )
            .set("tol", t.convergence_tol.to_string())
            .set("completeness_tol", t.completeness_tol.to_string())
            .set("distances_m", join(&self.distances_m))
            .set("aperture_m", self.aperture_m.to_string())
            .set("tx_power_dbm", self.tx_power_dbm.to_string());
        if let Some(p) = &self.absorption_table {
            sec.set("absorption_table", p.display().to_string());
        }
        if let Some(p) = &self.output {
            sec.set("out", p.display().to_string());
        }
        let mut buf = Vec::new();
        ini.write_to(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ini output is utf-8")
    }
}
