//! TOML run configuration.
//!
//! ```toml
//! [system]
//! n = 3
//! reference_hz = 125.76e6          # optional
//! labels = ["C1", "C2", "C3"]      # optional
//! offsets_hz = [2411.0, 22180.25, 6444.97]
//! j_hz = [[0.0, -1.27, 35.98],
//!         [-1.27, 0.0, 53.82],
//!         [35.98, 53.82, 0.0]]
//!
//! [defaults]                        # every key optional
//! epsilon = 1.0
//! tolerance = 1e-10
//! points = 8192
//! line_broadening_hz = 0.2
//! peak_fraction = 0.05
//! resolution_hz = 0.5
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::EQUIVALENCE_TOL;
use crate::spectrometer::{DEFAULT_LINE_BROADENING, DEFAULT_POINTS, PEAK_FRACTION};
use crate::spin::SpinSystem;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
    pub offsets_hz: Vec<f64>,
    pub j_hz: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Defaults {
    pub epsilon: f64,
    pub tolerance: f64,
    pub points: usize,
    pub line_broadening_hz: f64,
    pub peak_fraction: f64,
    pub resolution_hz: f64,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults {
            epsilon: 1.0,
            tolerance: EQUIVALENCE_TOL,
            points: DEFAULT_POINTS,
            line_broadening_hz: DEFAULT_LINE_BROADENING,
            peak_fraction: PEAK_FRACTION,
            resolution_hz: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub system: SystemSection,
    #[serde(default)]
    pub defaults: Defaults,
}

impl Config {
    /// Parses and validates.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| {
            let (line, column) = e
                .span()
                .map(|s| line_column(text, s.start))
                .unwrap_or((1, 1));
            Error::Parse {
                source_name: source_name.to_string(),
                line,
                column,
                message: e.message().to_string(),
            }
        })?;
        cfg.spin_system().map_err(|e| Error::Parse {
            source_name: source_name.to_string(),
            line: 1,
            column: 1,
            message: e.to_string(),
        })?;
        cfg.check_defaults().map_err(|e| Error::Parse {
            source_name: source_name.to_string(),
            line: 1,
            column: 1,
            message: e.to_string(),
        })?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    /// The validated spin system.
    pub fn spin_system(&self) -> Result<SpinSystem<f64>> {
        let s = &self.system;
        if s.offsets_hz.len() != s.n {
            return Err(Error::Domain(format!(
                "system.n = {} but {} offsets given",
                s.n,
                s.offsets_hz.len()
            )));
        }
        let mut sys = SpinSystem::new(s.offsets_hz.clone(), s.j_hz.clone(), s.labels.clone())?;
        if let Some(hz) = s.reference_hz {
            if !(hz.is_finite() && hz > 0.0) {
                return Err(Error::Domain("system.reference_hz must be positive".into()));
            }
            sys = sys.with_reference_mhz(hz / 1e6);
        }
        Ok(sys)
    }

    fn check_defaults(&self) -> Result<()> {
        let d = &self.defaults;
        let bad = |m: &str| Err(Error::Domain(format!("defaults.{m}")));
        if !d.epsilon.is_finite() {
            return bad("epsilon must be finite");
        }
        if !(d.tolerance > 0.0) {
            return bad("tolerance must be positive");
        }
        if d.points < 256 || !d.points.is_power_of_two() {
            return bad("points must be a power of two >= 256");
        }
        if !(d.line_broadening_hz >= 0.0) {
            return bad("line_broadening_hz must be non-negative");
        }
        if !(d.peak_fraction > 0.0 && d.peak_fraction < 1.0) {
            return bad("peak_fraction must be in (0, 1)");
        }
        if !(d.resolution_hz > 0.0) {
            return bad("resolution_hz must be positive");
        }
        Ok(())
    }

    /// Configuration for [`SpinSystem::alanine_example`].
    pub fn alanine_example() -> Self {
        let sys = SpinSystem::<f64>::alanine_example();
        Config {
            system: SystemSection {
                n: sys.n(),
                reference_hz: sys.reference_mhz().map(|m| m * 1e6),
                labels: sys.labels().to_vec(),
                offsets_hz: sys.offsets().to_vec(),
                j_hz: sys.couplings().to_vec(),
            },
            defaults: Defaults::default(),
        }
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}
