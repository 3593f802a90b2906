//! Scenario files: seabed, initial poles or pairs, ensembles, integrator
//! settings and requested outputs.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::pair_with_heading;
use crate::integrator::{integrate, IntegratorConfig};
use crate::invariants::{drift_report, ConservedQuantityReport, Quantity};
use crate::seabed::Seabed;
use crate::types::{validate_poles, ComplexNumber, Pole, StrengthSpec, SystemState, Trajectory};

type C = ComplexNumber;

pub const SCHEMA_VERSION: u32 = 1;

const PRESETS: &[(&str, &str)] = &[
    ("snell-step", include_str!("../presets/snell-step.toml")),
    ("mirror-step", include_str!("../presets/mirror-step.toml")),
    (
        "leapfrog-step",
        include_str!("../presets/leapfrog-step.toml"),
    ),
    (
        "leapfrog-bump",
        include_str!("../presets/leapfrog-bump.toml"),
    ),
    ("rainbow-disk", include_str!("../presets/rainbow-disk.toml")),
    (
        "linear-seabed",
        include_str!("../presets/linear-seabed.toml"),
    ),
    ("sloped-step", include_str!("../presets/sloped-step.toml")),
    ("abrupt-step", include_str!("../presets/abrupt-step.toml")),
    (
        "slope-comparison",
        include_str!("../presets/slope-comparison.toml"),
    ),
    ("soft-mirror", include_str!("../presets/soft-mirror.toml")),
    ("trough", include_str!("../presets/trough.toml")),
    ("caustic-arc", include_str!("../presets/caustic-arc.toml")),
];

/// Names of the bundled scenario presets.
pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

/// Source text of a bundled preset.
pub fn preset_source(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// One strength term `μ_n` of a pole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrengthTerm {
    pub n: i32,
    pub mu: C,
}

/// An explicitly placed pole: either a simple strength `mu` or a list of terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoleSpec {
    pub label: String,
    pub position: C,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<C>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub strengths: Vec<StrengthTerm>,
}

impl PoleSpec {
    fn to_pole(&self) -> Result<Pole> {
        let strength = match (self.mu, self.strengths.is_empty()) {
            (Some(mu), true) => StrengthSpec::simple(mu),
            (None, false) => self
                .strengths
                .iter()
                .fold(StrengthSpec::new(), |s, t| s.with(t.n, t.mu)),
            _ => {
                return Err(Error::Config(format!(
                    "pole `{}`: give exactly one of `mu` or `strengths`",
                    self.label
                )))
            }
        };
        Ok(Pole::new(self.label.clone(), self.position, strength))
    }
}

fn default_separation() -> f64 {
    0.05
}

fn default_mu() -> C {
    C::new(0.0, 1.0)
}

/// A small pair `−μ`, `+μ` centered at `center`, travelling along
/// `heading_deg` (degrees from the positive real axis).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub center: C,
    #[serde(default = "default_separation")]
    pub separation: f64,
    #[serde(default)]
    pub heading_deg: f64,
    #[serde(default = "default_mu")]
    pub mu: C,
}

fn full_turn() -> f64 {
    360.0
}

/// Copies of the pair differing in heading or release point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EnsembleSpec {
    /// Headings on a uniform grid over `[from_deg, to_deg)`, or uniformly
    /// random there when `seed` is given.
    Directions {
        count: usize,
        #[serde(default)]
        from_deg: f64,
        #[serde(default = "full_turn")]
        to_deg: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// An explicit list of headings.
    Headings { headings_deg: Vec<f64> },
    /// Pair centers evenly spaced along the segment from `start` to `end`.
    Line { count: usize, start: C, end: C },
}

impl EnsembleSpec {
    /// `(center, heading in radians)` of every member.
    pub fn releases(&self, pair: &PairSpec) -> Result<Vec<(C, f64)>> {
        let heading = pair.heading_deg.to_radians();
        let out: Vec<(C, f64)> = match self {
            EnsembleSpec::Directions {
                count,
                from_deg,
                to_deg,
                seed,
            } => {
                let (a, b) = (from_deg.to_radians(), to_deg.to_radians());
                if !(b > a) {
                    return Err(Error::Config(
                        "ensemble: `to_deg` must exceed `from_deg`".into(),
                    ));
                }
                match seed {
                    None => {
                        let full = (b - a - 2.0 * PI).abs() < 1e-12;
                        let n = if full {
                            *count
                        } else {
                            count.saturating_sub(1).max(1)
                        };
                        (0..*count)
                            .map(|k| (pair.center, a + (b - a) * k as f64 / n as f64))
                            .collect()
                    }
                    Some(seed) => {
                        let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                        (0..*count)
                            .map(|_| (pair.center, rng.gen_range(a..b)))
                            .collect()
                    }
                }
            }
            EnsembleSpec::Headings { headings_deg } => headings_deg
                .iter()
                .map(|h| (pair.center, h.to_radians()))
                .collect(),
            EnsembleSpec::Line { count, start, end } => (0..*count)
                .map(|k| {
                    (
                        start + (end - start) * ((k as f64 + 0.5) / *count as f64),
                        heading,
                    )
                })
                .collect(),
        };
        if out.is_empty() {
            return Err(Error::Config("ensemble: no members".into()));
        }
        Ok(out)
    }
}

/// A named alternative seabed; every initial configuration runs on each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variant {
    pub label: String,
    pub seabed: Seabed,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "yes")]
    pub trajectory: bool,
    #[serde(default = "yes")]
    pub events: bool,
    #[serde(default = "yes")]
    pub svg: bool,
    #[serde(default)]
    pub drift: Vec<Quantity>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            trajectory: true,
            events: true,
            svg: true,
            drift: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlotSpec {
    /// `[xmin, xmax, ymin, ymax]`; by default the window fits the trajectories.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub view: Option<[f64; 4]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seabed: Option<Seabed>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub variants: Vec<Variant>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub poles: Vec<PoleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<PairSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleSpec>,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub outputs: OutputSpec,
    #[serde(default)]
    pub plot: PlotSpec,
}

/// One independent run of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub label: String,
    pub seabed: Seabed,
    pub poles: Vec<Pole>,
}

impl Scenario {
    /// Parses and validates a scenario; errors carry the line and field.
    pub fn from_toml(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn preset(name: &str) -> Result<Self> {
        let text = preset_source(name).ok_or_else(|| {
            let known: Vec<&str> = preset_names().collect();
            Error::Config(format!(
                "unknown preset `{name}` (known: {})",
                known.join(", ")
            ))
        })?;
        Self::from_toml(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        match (&self.seabed, self.variants.is_empty()) {
            (Some(_), true) | (None, false) => {}
            _ => {
                return Err(Error::Config(
                    "give exactly one of `seabed` or `variants`".into(),
                ))
            }
        }
        for s in self.seabeds() {
            s.1.validate()
                .map_err(|e| Error::Config(format!("seabed `{}`: {e}", s.0)))?;
        }
        match (self.poles.is_empty(), &self.pair, &self.ensemble) {
            (false, None, None) | (true, Some(_), _) => {}
            (false, _, _) => {
                return Err(Error::Config(
                    "give either `poles` (without `ensemble`) or `pair`".into(),
                ))
            }
            (true, None, _) => return Err(Error::Config("no `poles` or `pair` given".into())),
        }
        if let Some(p) = &self.pair {
            if !(p.separation > 0.0 && p.separation.is_finite()) {
                return Err(Error::Config("pair.separation must be positive".into()));
            }
        }
        self.integrator
            .validate()
            .map_err(|e| Error::Config(format!("integrator: {e}")))?;
        self.members().map(|_| ())
    }

    fn seabeds(&self) -> Vec<(String, &Seabed)> {
        match &self.seabed {
            Some(s) => vec![(String::new(), s)],
            None => self
                .variants
                .iter()
                .map(|v| (v.label.clone(), &v.seabed))
                .collect(),
        }
    }

    /// Initial configurations crossed with seabed variants.
    pub fn members(&self) -> Result<Vec<Member>> {
        // explicit poles, or (center, heading) of each pair
        let (poles, releases) = if !self.poles.is_empty() {
            let poles = self
                .poles
                .iter()
                .map(PoleSpec::to_pole)
                .collect::<Result<Vec<_>>>()?;
            validate_poles(&poles).map_err(|e| Error::Config(e.to_string()))?;
            (Some(poles), vec![(C::new(0.0, 0.0), 0.0)])
        } else {
            let pair = self.pair.expect("validated");
            let releases = match &self.ensemble {
                Some(e) => e.releases(&pair)?,
                None => vec![(pair.center, pair.heading_deg.to_radians())],
            };
            (None, releases)
        };
        let seabeds = self.seabeds();
        let mut out = Vec::new();
        for (variant, seabed) in &seabeds {
            for (k, &(center, heading)) in releases.iter().enumerate() {
                let mut label = self.name.clone();
                if !variant.is_empty() {
                    label = format!("{label}-{variant}");
                }
                if releases.len() > 1 {
                    label = format!("{label}-{k:03}");
                }
                out.push(Member {
                    label,
                    seabed: (*seabed).clone(),
                    poles: match (&poles, self.pair) {
                        (Some(p), _) => p.clone(),
                        (None, Some(pair)) => {
                            pair_with_heading(center, pair.separation, heading, pair.mu, seabed)
                        }
                        (None, None) => unreachable!("validated"),
                    },
                });
            }
        }
        Ok(out)
    }
}

/// Result of one member run.
#[derive(Debug, Clone)]
pub struct MemberRun {
    pub member: Member,
    pub trajectory: Result<Trajectory>,
    pub drift: Vec<Result<ConservedQuantityReport>>,
}

impl MemberRun {
    /// Whether the member integrated to `t_end` without a terminal event.
    pub fn is_clean(&self) -> bool {
        matches!(&self.trajectory, Ok(t) if !t.ended_early())
    }
}

/// Integrates every member in parallel; results keep member order.
pub fn run_members(
    members: Vec<Member>,
    config: &IntegratorConfig,
    drift: &[Quantity],
) -> Vec<MemberRun> {
    members
        .into_par_iter()
        .map(|member| {
            let trajectory = integrate(
                &SystemState::from_poles(&member.poles),
                &member.poles,
                &member.seabed,
                config,
            );
            let drift = match &trajectory {
                Ok(t) => drift
                    .iter()
                    .map(|q| drift_report(t, &member.poles, &member.seabed, q))
                    .collect(),
                Err(_) => Vec::new(),
            };
            MemberRun {
                member,
                trajectory,
                drift,
            }
        })
        .collect()
}

impl Scenario {
    pub fn run(&self) -> Result<Vec<MemberRun>> {
        Ok(run_members(
            self.members()?,
            &self.integrator,
            &self.outputs.drift,
        ))
    }
}
