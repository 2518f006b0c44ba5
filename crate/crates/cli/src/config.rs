use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use gkflow::flow::StepControl;
use gkflow::geometry::{fixtures, io, ProfileCurve, MIN_POINTS};
use gkflow::monitors::{MonitorSettings, Tolerances};
use gkflow::surgery::SurgeryParams;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid TOML: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    Sphere {
        r: f64,
    },
    Cylinder {
        r: f64,
        period: f64,
    },
    Dumbbell {
        bulb_r: f64,
        neck_r: f64,
        separation: f64,
    },
    /// Profile CSV; relative paths are taken from the config file's directory.
    ProfileFile {
        path: PathBuf,
    },
}

/// The step-control fields of a run; `kappa` lives at the top level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepConfig {
    pub cfl: f64,
    pub reparam_interval: usize,
    pub g_stop: Option<f64>,
    pub monitor_interval: usize,
}

impl Default for StepConfig {
    fn default() -> Self {
        let c = StepControl::default();
        Self {
            cfl: c.cfl,
            reparam_interval: c.reparam_interval,
            g_stop: c.g_stop,
            monitor_interval: c.monitor_interval,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub kappa: f64,
    /// Points on the initial profile (ignored for profile files).
    pub points: usize,
    pub t_max: f64,
    pub seed: u64,
    /// Relative paths are taken from the config file's directory.
    pub output_dir: PathBuf,
    pub shape: Shape,
    #[serde(default)]
    pub step: StepConfig,
    /// Present to run with surgery.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surgery: Option<SurgeryParams>,
    #[serde(default)]
    pub monitors: MonitorSettings,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    /// The shipped dumbbell with surgery enabled.
    fn default() -> Self {
        Self {
            n: 3,
            kappa: 0.0,
            points: 400,
            t_max: 2.0,
            seed: 0,
            output_dir: PathBuf::from("gkflow-out"),
            shape: Shape::Dumbbell {
                bulb_r: 1.0,
                neck_r: 0.35,
                separation: 8.0,
            },
            step: StepConfig::default(),
            surgery: Some(SurgeryParams::default()),
            monitors: MonitorSettings::default(),
            tolerances: Tolerances::default(),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::Invalid(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let c: Self = toml::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    /// Reads and validates a config, resolving relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut c = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if c.output_dir.is_relative() {
            c.output_dir = base.join(&c.output_dir);
        }
        if let Shape::ProfileFile { path } = &mut c.shape {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
        Ok(c)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if self.n < 3 {
            return invalid(format!("n must be at least 3, got {}", self.n));
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return invalid(format!("kappa must be non-negative, got {}", self.kappa));
        }
        if self.points < MIN_POINTS {
            return invalid(format!("points must be at least {MIN_POINTS}"));
        }
        positive("t_max", self.t_max)?;
        match &self.shape {
            Shape::Sphere { r } => positive("shape.r", *r)?,
            Shape::Cylinder { r, period } => {
                positive("shape.r", *r)?;
                positive("shape.period", *period)?;
            }
            Shape::Dumbbell {
                bulb_r,
                neck_r,
                separation,
            } => {
                positive("shape.bulb_r", *bulb_r)?;
                positive("shape.neck_r", *neck_r)?;
                positive("shape.separation", *separation)?;
                if neck_r >= bulb_r {
                    return invalid("shape.neck_r must be below shape.bulb_r".into());
                }
            }
            Shape::ProfileFile { .. } => {}
        }
        self.step_control()
            .validate()
            .map_err(|e| ConfigError::Invalid(format!("step: {e}")))?;
        if let Some(p) = &self.surgery {
            p.validate()
                .map_err(|e| ConfigError::Invalid(format!("surgery: {e}")))?;
        }
        if !(self.monitors.sigma > 0.0 && self.monitors.sigma < 0.5 && self.monitors.delta >= 0.0) {
            return invalid(
                "monitors: sigma must lie in (0, 1/2) and delta be non-negative".into(),
            );
        }
        Ok(())
    }

    pub fn step_control(&self) -> StepControl {
        StepControl {
            kappa: self.kappa,
            cfl: self.step.cfl,
            reparam_interval: self.step.reparam_interval,
            g_stop: self.step.g_stop,
            monitor_interval: self.step.monitor_interval,
        }
    }

    /// The initial profile described by `shape`.
    pub fn initial_profile(&self) -> Result<ProfileCurve, ConfigError> {
        let bad = |e: gkflow::geometry::GeometryError| ConfigError::Invalid(format!("shape: {e}"));
        let c = match &self.shape {
            Shape::Sphere { r } => fixtures::sphere(self.n, *r, self.points, 0.0).map_err(bad)?,
            Shape::Cylinder { r, period } => {
                fixtures::cylinder(self.n, *r, *period, self.points).map_err(bad)?
            }
            Shape::Dumbbell {
                bulb_r,
                neck_r,
                separation,
            } => fixtures::dumbbell(self.n, *bulb_r, *neck_r, *separation, self.points)
                .map_err(bad)?,
            Shape::ProfileFile { path } => io::read_csv(path).map_err(bad)?,
        };
        if c.dim() != self.n {
            return Err(ConfigError::Invalid(format!(
                "profile has n = {}, config has n = {}",
                c.dim(),
                self.n
            )));
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        let text = c.to_toml();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), c);
        assert_eq!(RunConfig::from_toml(&text).unwrap().to_toml(), text);
    }

    #[test]
    fn every_shape_round_trips() {
        for shape in [
            Shape::Sphere { r: 0.5 },
            Shape::Cylinder {
                r: 1.0,
                period: 3.25,
            },
            Shape::ProfileFile {
                path: "in/profile.csv".into(),
            },
        ] {
            let c = RunConfig {
                shape,
                surgery: None,
                ..RunConfig::default()
            };
            assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = RunConfig::default().to_toml();
        assert!(RunConfig::from_toml(&format!("bogus = 1\n{text}")).is_err());
        let text = text.replace("[step]\n", "[step]\nspeed = 2\n");
        assert!(RunConfig::from_toml(&text).is_err());
        let text = RunConfig::default()
            .to_toml()
            .replace("kind = \"dumbbell\"", "kind = \"dumbbell\"\nwidth = 1.0");
        assert!(RunConfig::from_toml(&text).is_err());
    }

    #[test]
    fn out_of_range_values_are_rejected() {
        let mut c = RunConfig::default();
        c.step.cfl = 0.0;
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.n = 2;
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.shape = Shape::Dumbbell {
            bulb_r: 1.0,
            neck_r: 1.5,
            separation: 8.0,
        };
        assert!(c.validate().is_err());
    }
}
