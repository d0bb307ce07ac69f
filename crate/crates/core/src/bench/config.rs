use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::carrier::Interpolation;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::reconstruction::{EvolutionConfig, ResidualScheme, Splitting};
use crate::schrodinger::{SplitOrder, TdseConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    HarmonicNull,
    QuarticCompare,
    QuarticResidualField,
    QuarticReconstruct,
    SignedPathDemo,
    UnderdeterminationDemo,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::HarmonicNull,
        Scenario::QuarticCompare,
        Scenario::QuarticResidualField,
        Scenario::QuarticReconstruct,
        Scenario::SignedPathDemo,
        Scenario::UnderdeterminationDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::HarmonicNull => "harmonic-null",
            Scenario::QuarticCompare => "quartic-compare",
            Scenario::QuarticResidualField => "quartic-residual-field",
            Scenario::QuarticReconstruct => "quartic-reconstruct",
            Scenario::SignedPathDemo => "signed-path-demo",
            Scenario::UnderdeterminationDemo => "underdetermination-demo",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Scenario::ALL.iter().map(|x| x.name()).collect();
                Error::InvalidConfig(format!(
                    "unknown scenario `{s}`; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridPreset {
    /// 384 × 768 points, `dq = 0.0625`.
    Balanced,
    /// 128 × 256 points, `dq = 0.125`.
    Reduced,
}

impl FromStr for GridPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "balanced" => Ok(GridPreset::Balanced),
            "reduced" => Ok(GridPreset::Reduced),
            _ => Err(Error::InvalidConfig(format!(
                "unknown grid preset `{s}`; expected balanced or reduced"
            ))),
        }
    }
}

/// Splitting order and residual substep method, written `strang`, `lie`,
/// `strang-rk4` or `lie-rk4` (`-exponential` is the default suffix).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Scheme {
    pub splitting: Splitting,
    pub residual: ResidualScheme,
}

impl Default for Scheme {
    fn default() -> Self {
        Self {
            splitting: Splitting::Strang,
            residual: ResidualScheme::Exponential,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.splitting {
            Splitting::Lie => "lie",
            Splitting::Strang => "strang",
        };
        match self.residual {
            ResidualScheme::Exponential => write!(f, "{s}"),
            ResidualScheme::Rk4 => write!(f, "{s}-rk4"),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::InvalidConfig(format!(
                "unknown scheme `{s}`; expected lie or strang, optionally suffixed -rk4"
            ))
        };
        let (head, tail) = s.split_once('-').unwrap_or((s, "exponential"));
        let splitting = match head {
            "lie" => Splitting::Lie,
            "strang" => Splitting::Strang,
            _ => return Err(bad()),
        };
        let residual = match tail {
            "exponential" => ResidualScheme::Exponential,
            "rk4" => ResidualScheme::Rk4,
            _ => return Err(bad()),
        };
        Ok(Self {
            splitting,
            residual,
        })
    }
}

impl TryFrom<String> for Scheme {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Scheme> for String {
    fn from(s: Scheme) -> String {
        s.to_string()
    }
}

/// A fully resolved benchmark configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub lambda: f64,
    pub grid_preset: GridPreset,
    /// Overrides the preset's position count.
    pub n_q: Option<usize>,
    /// Overrides the preset's position step.
    pub dq: Option<f64>,
    pub dt: f64,
    pub t_final: f64,
    pub samples: usize,
    /// Split-operator substeps per Schrödinger step.
    pub substeps: usize,
    pub interpolation: Interpolation,
    pub scheme: Scheme,
    pub seed: u64,
    pub dump_fields: bool,
    /// Not part of the recorded configuration.
    #[serde(skip)]
    pub out: PathBuf,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario) -> Self {
        let t = TdseConfig::default();
        Self {
            scenario,
            lambda: 0.02,
            grid_preset: GridPreset::Balanced,
            n_q: None,
            dq: None,
            dt: t.dt,
            t_final: t.t_final,
            samples: t.n_samples,
            substeps: t.substeps,
            interpolation: Interpolation::Septic,
            scheme: Scheme::default(),
            seed: 0,
            dump_fields: false,
            out: PathBuf::from("results"),
        }
    }

    pub fn grid(&self) -> Result<GridSpec> {
        let base = match self.grid_preset {
            GridPreset::Balanced => GridSpec::balanced(),
            GridPreset::Reduced => GridSpec::reduced(),
        };
        match (self.n_q, self.dq) {
            (None, None) => Ok(base),
            (n, h) => GridSpec::for_wigner(n.unwrap_or(base.n_q), h.unwrap_or(base.dq)),
        }
    }

    pub fn time(&self) -> TdseConfig {
        TdseConfig {
            dt: self.dt,
            t_final: self.t_final,
            n_samples: self.samples,
            substeps: self.substeps,
            order: SplitOrder::Fourth,
        }
    }

    pub fn evolution(&self) -> EvolutionConfig {
        EvolutionConfig {
            time: self.time(),
            interpolation: self.interpolation,
            splitting: self.scheme.splitting,
            residual_scheme: self.scheme.residual,
            ..EvolutionConfig::default()
        }
    }

    /// Checks every field and makes sure the output directory exists.
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "lambda must be ≥ 0, got {}",
                self.lambda
            )));
        }
        self.grid()?;
        self.time().validate()?;
        if self.out.as_os_str().is_empty() {
            return Err(Error::InvalidConfig("output directory is empty".into()));
        }
        std::fs::create_dir_all(&self.out).map_err(|e| {
            Error::InvalidConfig(format!("cannot create {}: {e}", self.out.display()))
        })?;
        let probe = self.out.join(".write-check");
        std::fs::write(&probe, b"")
            .and_then(|_| std::fs::remove_file(&probe))
            .map_err(|e| {
                Error::InvalidConfig(format!("{} is not writable: {e}", self.out.display()))
            })?;
        Ok(())
    }

    /// Overlays the keys present in `file`.
    pub fn apply(&mut self, file: &ConfigFile) {
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = file.$f.clone() { self.$f = v; } )* };
        }
        take!(
            scenario,
            lambda,
            grid_preset,
            dt,
            t_final,
            samples,
            substeps,
            interpolation,
            scheme,
            seed,
            dump_fields,
            out
        );
        if file.n_q.is_some() {
            self.n_q = file.n_q;
        }
        if file.dq.is_some() {
            self.dq = file.dq;
        }
    }
}

/// Contents of a TOML config file. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigFile {
    pub scenario: Option<Scenario>,
    pub lambda: Option<f64>,
    pub grid_preset: Option<GridPreset>,
    pub n_q: Option<usize>,
    pub dq: Option<f64>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub samples: Option<usize>,
    pub substeps: Option<usize>,
    pub interpolation: Option<Interpolation>,
    pub scheme: Option<Scheme>,
    pub seed: Option<u64>,
    pub dump_fields: Option<bool>,
    pub out: Option<PathBuf>,
}

impl ConfigFile {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Scenario::ALL {
            assert_eq!(s.name().parse::<Scenario>().unwrap(), s);
        }
        assert!("quartic".parse::<Scenario>().is_err());
        for s in ["lie", "strang", "lie-rk4", "strang-rk4"] {
            assert_eq!(s.parse::<Scheme>().unwrap().to_string(), s);
        }
        assert_eq!(
            "strang-exponential".parse::<Scheme>().unwrap(),
            Scheme::default()
        );
        assert!("euler".parse::<Scheme>().is_err());
    }

    #[test]
    fn file_overlay() {
        let file = ConfigFile::from_toml_str(
            "scenario = \"quartic-reconstruct\"\nlambda = 0.05\ngrid-preset = \"reduced\"\nscheme = \"lie\"\ninterpolation = \"quintic\"\n",
        )
        .unwrap();
        let mut cfg = ScenarioConfig::new(Scenario::HarmonicNull);
        cfg.apply(&file);
        assert_eq!(cfg.scenario, Scenario::QuarticReconstruct);
        assert_eq!(cfg.lambda, 0.05);
        assert_eq!(cfg.grid().unwrap(), GridSpec::reduced());
        assert_eq!(cfg.scheme.splitting, Splitting::Lie);
        assert_eq!(cfg.interpolation, Interpolation::Quintic);
        assert!(ConfigFile::from_toml_str("lamda = 1.0").is_err());
    }

    #[test]
    fn validation() {
        let dir = std::env::temp_dir().join("wigner-bench-config-test");
        let mut cfg = ScenarioConfig::new(Scenario::QuarticCompare);
        cfg.out = dir.clone();
        assert!(cfg.validate().is_ok());
        cfg.lambda = -0.1;
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
        cfg.lambda = 0.02;
        cfg.dt = 0.0;
        assert!(cfg.validate().is_err());
        cfg.dt = 0.005;
        cfg.n_q = Some(63);
        assert!(cfg.validate().is_err());
        let _ = std::fs::remove_dir_all(dir);
    }
}
