use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The corruption operators, plus the pass-through `clean` root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorId {
    Clean,
    Gamma,
    Blur,
    Defocus,
    Lens,
    Motion,
    Noise,
    Clouds,
    Glare,
}

/// Declared domain and identity value of one operator parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub min: f64,
    pub max: f64,
    /// Value at which the parameter has no effect.
    pub identity: f64,
}

impl ParamSpec {
    pub fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.min, self.max)
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.min && v <= self.max
    }
}

const fn p(name: &'static str, min: f64, max: f64, identity: f64) -> ParamSpec {
    ParamSpec {
        name,
        min,
        max,
        identity,
    }
}

const GAMMA: [ParamSpec; 1] = [p("gamma", 1.0, 4.0, 1.0)];
const BLUR: [ParamSpec; 1] = [p("sigma", 0.0, 16.0, 1.0)];
const DEFOCUS: [ParamSpec; 2] = [p("z", 1.0, 10.0, 1.0), p("f_stop", 64.0, 128.0, 128.0)];
const LENS: [ParamSpec; 2] = [p("distort", 0.0, 1.0, 0.0), p("disperse", 0.0, 1.0, 0.0)];
const MOTION: [ParamSpec; 2] = [p("distance", 0.0, 0.5, 0.0), p("zoom", 0.0, 0.5, 0.0)];
const NOISE: [ParamSpec; 1] = [p("scale", 0.0, 1.0, 0.0)];
const CLOUDS: [ParamSpec; 1] = [p("factor", 0.0, 1.0, 0.0)];
const GLARE: [ParamSpec; 1] = [p("mix", -0.5, 0.5, -0.5)];

impl OperatorId {
    pub const ALL: [OperatorId; 9] = [
        OperatorId::Clean,
        OperatorId::Gamma,
        OperatorId::Blur,
        OperatorId::Defocus,
        OperatorId::Lens,
        OperatorId::Motion,
        OperatorId::Noise,
        OperatorId::Clouds,
        OperatorId::Glare,
    ];

    /// The eight image corruptions (everything except `clean`).
    pub const CORRUPTIONS: [OperatorId; 8] = [
        OperatorId::Gamma,
        OperatorId::Blur,
        OperatorId::Defocus,
        OperatorId::Lens,
        OperatorId::Motion,
        OperatorId::Noise,
        OperatorId::Clouds,
        OperatorId::Glare,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OperatorId::Clean => "clean",
            OperatorId::Gamma => "gamma",
            OperatorId::Blur => "blur",
            OperatorId::Defocus => "defocus",
            OperatorId::Lens => "lens",
            OperatorId::Motion => "motion",
            OperatorId::Noise => "noise",
            OperatorId::Clouds => "clouds",
            OperatorId::Glare => "glare",
        }
    }

    /// Parameters in canonical order. The first one is the primary severity parameter.
    pub fn params(self) -> &'static [ParamSpec] {
        match self {
            OperatorId::Clean => &[],
            OperatorId::Gamma => &GAMMA,
            OperatorId::Blur => &BLUR,
            OperatorId::Defocus => &DEFOCUS,
            OperatorId::Lens => &LENS,
            OperatorId::Motion => &MOTION,
            OperatorId::Noise => &NOISE,
            OperatorId::Clouds => &CLOUDS,
            OperatorId::Glare => &GLARE,
        }
    }

    pub fn param(self, name: &str) -> Option<&'static ParamSpec> {
        self.params().iter().find(|s| s.name == name)
    }
}

impl fmt::Display for OperatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown operator `{0}`")]
pub struct UnknownOperator(pub String);

impl FromStr for OperatorId {
    type Err = UnknownOperator;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OperatorId::ALL
            .into_iter()
            .find(|op| op.as_str() == s)
            .ok_or_else(|| UnknownOperator(s.to_string()))
    }
}
