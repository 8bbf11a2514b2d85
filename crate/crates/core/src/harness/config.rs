use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::conformal::{MarkedDomain, Shape};
use crate::error::{Error, Result};

/// Domain of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainConfig {
    /// Lattice rhombus of side `round(1/δ)` hexagons, crossed between the
    /// `q = 0` and `q = side − 1` sides.
    Rhombus,
    /// Rectangle with marks at its corners, crossed horizontally.
    Rectangle { width: f64, height: f64 },
    /// Unit half-disc with `a` at the center of the diameter and the
    /// semicircle as the arc `cd`.
    HalfDisc,
    Marked { shape: Shape, marks: Vec<f64> },
}

impl DomainConfig {
    pub fn marked(&self) -> Result<Option<MarkedDomain>> {
        Ok(match self {
            DomainConfig::Rhombus => None,
            DomainConfig::Rectangle { width, height } => Some(MarkedDomain::rectangle(*width, *height)?),
            DomainConfig::HalfDisc => Some(half_disc()),
            DomainConfig::Marked { shape, marks } => Some(MarkedDomain::new(shape.clone(), marks.clone())?),
        })
    }

    pub fn label(&self) -> String {
        match self {
            DomainConfig::Rhombus => "rhombus".into(),
            DomainConfig::Rectangle { width, height } => format!("rect-{width}x{height}"),
            DomainConfig::HalfDisc => "half-disc".into(),
            DomainConfig::Marked { shape, .. } => shape.name().into(),
        }
    }
}

/// The symmetric half-disc with marks `[a, c, d]`.
pub fn half_disc() -> MarkedDomain {
    let arc = std::f64::consts::PI / (std::f64::consts::PI + 2.0);
    MarkedDomain::new(Shape::unit_half_disc(), vec![(1.0 + arc) / 2.0, 0.0, arc]).expect("valid marks")
}

fn default_alpha() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossingConfig {
    pub domain: DomainConfig,
    pub mesh: f64,
    pub samples: u64,
    /// Finite-size allowance on the distance to the continuum value.
    #[serde(default)]
    pub allowance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HittingConfig {
    pub domain: DomainConfig,
    pub mesh: f64,
    pub samples: u64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Slack on the KS statistic; the golden value when absent.
    pub slack: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    pub domain: DomainConfig,
    pub mesh: f64,
    pub perc_samples: u64,
    pub sle_samples: u64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub slack: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SleConfig {
    pub eps: Vec<f64>,
    pub runs: u64,
    pub epochs: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub permutations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmsConfig {
    /// Side of the square box holding the annuli, in mesh units.
    pub box_size: f64,
    /// Inner radius in mesh units.
    pub r_in: f64,
    pub ratios: Vec<f64>,
    pub samples: u64,
    #[serde(default = "default_interior_bound")]
    pub interior_slope_bound: f64,
    #[serde(default = "default_boundary_bound")]
    pub boundary_slope_bound: f64,
}

fn default_interior_bound() -> f64 {
    -2.0
}

fn default_boundary_bound() -> f64 {
    -1.0
}

/// A run configuration; each subcommand reads its own section.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub crossing: Option<CrossingConfig>,
    pub hitting: Option<HittingConfig>,
    pub compare: Option<CompareConfig>,
    pub sle: Option<SleConfig>,
    pub arms: Option<ArmsConfig>,
}

impl Config {
    /// Parses TOML, or JSON when the text starts with `{`.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Config = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::ConfigInvalid(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| Error::ConfigInvalid(e.to_string()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::ConfigInvalid(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Built-in settings matching the acceptance protocol.
    pub fn defaults() -> Self {
        Config {
            seed: None,
            workers: None,
            crossing: Some(CrossingConfig {
                domain: DomainConfig::Rhombus,
                mesh: 1.0 / 128.0,
                samples: 100_000,
                allowance: 0.0,
            }),
            hitting: Some(HittingConfig {
                domain: DomainConfig::HalfDisc,
                mesh: 0.01,
                samples: 20_000,
                alpha: 0.01,
                slack: None,
            }),
            compare: Some(CompareConfig {
                domain: DomainConfig::HalfDisc,
                mesh: 0.01,
                perc_samples: 10_000,
                sle_samples: 10_000,
                alpha: 0.01,
                slack: None,
            }),
            sle: Some(SleConfig { eps: vec![0.1, 0.2, 0.4], runs: 10_000, epochs: 3, alpha: 0.01, permutations: 999 }),
            arms: Some(ArmsConfig {
                box_size: 256.0,
                r_in: 4.0,
                ratios: vec![2.0, 4.0, 8.0],
                samples: 100_000,
                interior_slope_bound: -2.0,
                boundary_slope_bound: -1.0,
            }),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::ConfigInvalid(m));
        let mesh_ok = |m: f64| m > 0.0 && m.is_finite() && m < 1.0;
        if self.workers == Some(0) {
            return bad("workers must be positive".into());
        }
        if let Some(c) = &self.crossing {
            if !mesh_ok(c.mesh) {
                return bad(format!("crossing mesh {}", c.mesh));
            }
            if !(c.allowance >= 0.0) {
                return bad("crossing allowance must be nonnegative".into());
            }
            if let Some(md) = c.domain.marked()? {
                if md.marks().len() != 4 {
                    return bad("crossing needs four marks".into());
                }
            }
        }
        for (name, domain, mesh, alpha, slack) in [
            self.hitting.as_ref().map(|h| ("hitting", &h.domain, h.mesh, h.alpha, h.slack)),
            self.compare.as_ref().map(|c| ("compare", &c.domain, c.mesh, c.alpha, c.slack)),
        ]
        .into_iter()
        .flatten()
        {
            if !mesh_ok(mesh) {
                return bad(format!("{name} mesh {mesh}"));
            }
            if !(alpha > 0.0 && alpha < 1.0) {
                return bad(format!("{name} alpha {alpha}"));
            }
            if slack.is_some_and(|s| !(s >= 0.0)) {
                return bad(format!("{name} slack must be nonnegative"));
            }
            match domain.marked()? {
                Some(md) if md.marks().len() == 3 => {}
                _ => return bad(format!("{name} needs a domain with marks [a, c, d]")),
            }
        }
        if let Some(s) = &self.sle {
            if s.eps.is_empty() || s.eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
                return bad("sle eps must be positive".into());
            }
            if s.epochs < 2 {
                return bad("sle needs at least two epochs".into());
            }
            if !(s.alpha > 0.0 && s.alpha < 1.0) {
                return bad(format!("sle alpha {}", s.alpha));
            }
        }
        if let Some(a) = &self.arms {
            if !(a.r_in > 0.0) || a.ratios.is_empty() || a.ratios.iter().any(|r| !(*r >= 1.0 && r.is_finite())) {
                return bad("arms needs r_in > 0 and ratios ≥ 1".into());
            }
            let widest = a.ratios.iter().cloned().fold(1.0, f64::max) * a.r_in;
            if 2.0 * widest > a.box_size {
                return bad(format!("outer radius {widest} does not fit in box {}", a.box_size));
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON of the experiment sections. Seed and
    /// worker count are recorded separately and do not enter the hash.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.seed = None;
        c.workers = None;
        let json = serde_json::to_string(&c).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
