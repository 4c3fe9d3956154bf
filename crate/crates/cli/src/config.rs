//! Experiment configuration: TOML sections, one per module.
//!
//! ```toml
//! [experiment]
//! name = "dispersion-wave"
//! seed = 7
//!
//! [geometry]
//! chart = "perturbed_flat"
//! m = 0.0
//!
//! [dispersion]
//! h = [0.0625, 0.03125, 0.015625]
//! ```
//!
//! Every field outside `[experiment]` has a per-experiment default.

use serde::Deserialize;
use std::fmt;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Parse(String),
    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field, reason: reason.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentName {
    HjValidate,
    DispersionWave,
    DispersionKg,
    StrichartzFit,
    DiracSharpness,
    JacobiMoments,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 6] = [
        ExperimentName::HjValidate,
        ExperimentName::DispersionWave,
        ExperimentName::DispersionKg,
        ExperimentName::StrichartzFit,
        ExperimentName::DiracSharpness,
        ExperimentName::JacobiMoments,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentName::HjValidate => "hj-validate",
            ExperimentName::DispersionWave => "dispersion-wave",
            ExperimentName::DispersionKg => "dispersion-kg",
            ExperimentName::StrichartzFit => "strichartz-fit",
            ExperimentName::DiracSharpness => "dirac-sharpness",
            ExperimentName::JacobiMoments => "jacobi-moments",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            ExperimentName::HjValidate => "phase by characteristics against the flat closed form, or HJ residual and t^2 remainder on a curved chart",
            ExperimentName::DispersionWave => "fit of h^-alpha (1 + t/h)^-beta to the kernel maxima, massless branch",
            ExperimentName::DispersionKg => "same fit on the Klein-Gordon window t in [4h, sqrt(h) t0]",
            ExperimentName::StrichartzFit => "mixed-norm loss exponent over Littlewood-Paley shells on the torus",
            ExperimentName::DiracSharpness => "L^q growth of sphere eigenfunctions and the exact sharpness identities",
            ExperimentName::JacobiMoments => "growth exponent of weighted Jacobi moments",
        }
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartName {
    Flat,
    PerturbedFlat,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub name: ExperimentName,
    #[serde(default)]
    pub seed: u64,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub chart: Option<ChartName>,
    pub m: Option<f64>,
    pub epsilon: Option<f64>,
    pub center: Option<[f64; 2]>,
    pub radius: Option<f64>,
    pub t0: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HjSection {
    pub h: Option<Vec<f64>>,
    /// Times of the flat grid, or of the remainder fit on a curved chart.
    pub t: Option<Vec<f64>>,
    pub x: Option<Vec<[f64; 2]>>,
    pub xi: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionSection {
    pub h: Option<Vec<f64>>,
    pub t_count: Option<usize>,
    pub points: Option<Vec<[f64; 2]>>,
    pub radial_points: Option<usize>,
    pub band_spacing: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrichartzSection {
    pub d: Option<usize>,
    pub p: Option<String>,
    pub q: Option<String>,
    pub mass: Option<f64>,
    pub shells: Option<Vec<u32>>,
    pub trials: Option<u64>,
    pub time_points: Option<usize>,
    pub t_max: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiracSection {
    pub d: Option<u32>,
    pub q: Option<String>,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    pub count: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JacobiSection {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub p: Option<f64>,
    pub r: Option<f64>,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    pub count: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub geometry: GeometrySection,
    #[serde(default)]
    pub hamilton_jacobi: HjSection,
    #[serde(default)]
    pub dispersion: DispersionSection,
    #[serde(default)]
    pub strichartz: StrichartzSection,
    #[serde(default)]
    pub dirac: DiracSection,
    #[serde(default)]
    pub jacobi: JacobiSection,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    /// Range checks that do not need the numerical modules.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let g = &self.geometry;
        if let Some(m) = g.m {
            if !(m.is_finite() && m >= 0.0) {
                return Err(invalid("geometry.m", format!("mass must be finite and >= 0, got {m}")));
            }
        }
        if let Some(t0) = g.t0 {
            if !(t0 > 0.0 && t0 <= 1.0) {
                return Err(invalid("geometry.t0", format!("must lie in (0, 1], got {t0}")));
            }
        }
        if let Some(r) = g.radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(invalid("geometry.radius", format!("must be positive, got {r}")));
            }
        }
        for (field, hs) in [("hamilton_jacobi.h", &self.hamilton_jacobi.h), ("dispersion.h", &self.dispersion.h)] {
            if let Some(hs) = hs {
                if hs.is_empty() || hs.iter().any(|h| !(*h > 0.0 && *h <= 1.0)) {
                    return Err(invalid(field, "every h must lie in (0, 1]"));
                }
            }
        }
        if let Some(n) = self.dispersion.t_count {
            if n < 5 {
                return Err(invalid("dispersion.t_count", format!("at least 5 times per h are needed, got {n}")));
            }
        }
        if let Some(d) = self.strichartz.d {
            if !(1..=3).contains(&d) {
                return Err(invalid("strichartz.d", format!("torus dimension must be 1, 2 or 3, got {d}")));
            }
        }
        if let Some(t) = self.strichartz.trials {
            if t == 0 {
                return Err(invalid("strichartz.trials", "need at least one trial"));
            }
        }
        if let Some(d) = self.dirac.d {
            if !(2..=10).contains(&d) {
                return Err(invalid("dirac.d", format!("sphere dimension must lie in 2..=10, got {d}")));
            }
        }
        for (field, lo, hi) in [
            ("dirac.n_min", self.dirac.n_min, self.dirac.n_max),
            ("jacobi.n_min", self.jacobi.n_min, self.jacobi.n_max),
        ] {
            if let (Some(lo), Some(hi)) = (lo, hi) {
                if lo == 0 || hi <= lo {
                    return Err(invalid(field, format!("need 0 < n_min < n_max, got {lo}..{hi}")));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses() {
        let c = ExperimentConfig::parse("[experiment]\nname = \"jacobi-moments\"\n").unwrap();
        assert_eq!(c.experiment.name, ExperimentName::JacobiMoments);
        assert_eq!(c.experiment.seed, 0);
    }

    #[test]
    fn unknown_experiment_and_fields_are_rejected() {
        assert!(matches!(ExperimentConfig::parse("[experiment]\nname = \"bogus\"\n"), Err(ConfigError::Parse(_))));
        assert!(ExperimentConfig::parse("[experiment]\nname = \"hj-validate\"\n[geometry]\nmetric = 1\n").is_err());
    }

    #[test]
    fn ranges_are_checked() {
        let bad = "[experiment]\nname = \"dispersion-wave\"\n[dispersion]\nh = [0.5, 2.0]\n";
        assert!(matches!(ExperimentConfig::parse(bad), Err(ConfigError::Invalid { field: "dispersion.h", .. })));
        let bad = "[experiment]\nname = \"dirac-sharpness\"\n[dirac]\nd = 1\n";
        assert!(ExperimentConfig::parse(bad).is_err());
    }

    #[test]
    fn names_round_trip() {
        for n in ExperimentName::ALL {
            let c = ExperimentConfig::parse(&format!("[experiment]\nname = \"{n}\"\n")).unwrap();
            assert_eq!(c.experiment.name, n);
        }
    }
}
