use crate::error::{Error, Result};
use crate::norms::critical_exponent;
use crate::phi::PhiKind;
use crate::solver::Tolerances;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioName {
    #[serde(rename = "thm2_i")]
    GapConstantSign,
    #[serde(rename = "thm2_ii")]
    GapOrthogonal,
    #[serde(rename = "thm2_iii")]
    EqualityDirichlet,
    #[serde(rename = "proposition_signs")]
    PropositionSigns,
    #[serde(rename = "norm_one")]
    NormOne,
    #[serde(rename = "eps_bound")]
    EpsBound,
    #[serde(rename = "bubble_verify")]
    BubbleVerify,
    #[serde(rename = "dual_check")]
    DualCheck,
    #[serde(rename = "sobolev_estimate")]
    SobolevEstimate,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 9] = [
        ScenarioName::GapConstantSign,
        ScenarioName::GapOrthogonal,
        ScenarioName::EqualityDirichlet,
        ScenarioName::PropositionSigns,
        ScenarioName::NormOne,
        ScenarioName::EpsBound,
        ScenarioName::BubbleVerify,
        ScenarioName::DualCheck,
        ScenarioName::SobolevEstimate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioName::GapConstantSign => "thm2_i",
            ScenarioName::GapOrthogonal => "thm2_ii",
            ScenarioName::EqualityDirichlet => "thm2_iii",
            ScenarioName::PropositionSigns => "proposition_signs",
            ScenarioName::NormOne => "norm_one",
            ScenarioName::EpsBound => "eps_bound",
            ScenarioName::BubbleVerify => "bubble_verify",
            ScenarioName::DualCheck => "dual_check",
            ScenarioName::SobolevEstimate => "sobolev_estimate",
        }
    }

    /// φ recipe used when the configuration leaves it open.
    pub fn default_phi_kind(self) -> PhiKind {
        match self {
            ScenarioName::GapOrthogonal => PhiKind::ThetaOrthogonal,
            ScenarioName::EqualityDirichlet => PhiKind::H0Member,
            _ => PhiKind::ConstantSignBump,
        }
    }

    /// Norms of φ visited when the configuration fixes none.
    pub fn default_norms(self) -> Vec<f64> {
        match self {
            ScenarioName::GapConstantSign | ScenarioName::EpsBound => vec![0.3, 0.5, 0.8],
            ScenarioName::GapOrthogonal => vec![0.5, 1.5],
            ScenarioName::EqualityDirichlet | ScenarioName::DualCheck => vec![1.5],
            ScenarioName::PropositionSigns => vec![0.3, 0.7, 1.3, 2.0],
            ScenarioName::NormOne => vec![1.0],
            ScenarioName::BubbleVerify | ScenarioName::SobolevEstimate => Vec::new(),
        }
    }

    /// For `r ≥ 3` the finest solver level stays at 200 nodes: beyond that the
    /// strong-form residual of an f64 minimizer is dominated by round-off
    /// amplified by `(4/h²)^r`.
    pub fn default_levels(self, r: usize) -> Vec<usize> {
        match self {
            ScenarioName::BubbleVerify => vec![800],
            ScenarioName::SobolevEstimate => vec![50, 100, 200, 400],
            _ if r >= 3 => vec![50, 100, 200],
            _ => vec![100, 200, 400],
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ScenarioName::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown scenario `{s}`")))
    }
}

/// Everything needed to run one scenario reproducibly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioName,
    #[serde(rename = "n_dim")]
    pub dim: usize,
    #[serde(rename = "order")]
    pub r: usize,
    #[serde(default)]
    pub phi_kind: Option<PhiKind>,
    /// A single target norm replacing the scenario's default list.
    #[serde(default)]
    pub phi_norm: Option<f64>,
    #[serde(default)]
    pub levels: Option<Vec<usize>>,
    /// Bubble concentration for `bubble_verify`.
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn new(scenario: ScenarioName, dim: usize, r: usize) -> Self {
        ScenarioConfig {
            scenario,
            dim,
            r,
            phi_kind: None,
            phi_norm: None,
            levels: None,
            epsilon: None,
            tolerances: Tolerances::default(),
            seed: 0,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 {
            return Err(Error::Config("order must be positive".into()));
        }
        critical_exponent(self.dim, self.r)?;
        if let Some(norm) = self.phi_norm {
            if !(norm > 0.0 && norm.is_finite()) {
                return Err(Error::Config(format!("target norm must be positive, got {norm}")));
            }
        }
        if let Some(levels) = &self.levels {
            if levels.is_empty() {
                return Err(Error::Config("at least one grid level is required".into()));
            }
        }
        if let Some(eps) = self.epsilon {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(Error::Config(format!("epsilon must be positive, got {eps}")));
            }
        }
        Ok(())
    }

    pub fn phi_kind(&self) -> PhiKind {
        self.phi_kind.unwrap_or_else(|| self.scenario.default_phi_kind())
    }

    pub fn norms(&self) -> Vec<f64> {
        match self.phi_norm {
            Some(n) => vec![n],
            None => self.scenario.default_norms(),
        }
    }

    pub fn levels(&self) -> Vec<usize> {
        self.levels.clone().unwrap_or_else(|| self.scenario.default_levels(self.r))
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon.unwrap_or(0.3)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in ScenarioName::ALL {
            assert_eq!(s.name().parse::<ScenarioName>().unwrap(), s);
        }
        assert!("thm3".parse::<ScenarioName>().is_err());
    }

    #[test]
    fn toml_document() {
        let cfg = ScenarioConfig::from_toml(
            "scenario = \"thm2_iii\"\nn_dim = 5\norder = 2\nphi_norm = 1.5\nlevels = [50, 100]\nseed = 3\n",
        )
        .unwrap();
        assert_eq!(cfg.scenario, ScenarioName::EqualityDirichlet);
        assert_eq!(cfg.levels(), vec![50, 100]);
        assert_eq!(cfg.phi_kind(), PhiKind::H0Member);
        assert!(ScenarioConfig::from_toml("scenario = \"thm2_i\"\nn_dim = 4\norder = 2\n").is_err());
        assert!(ScenarioConfig::from_toml("scenario = \"nope\"\nn_dim = 5\norder = 2\n").is_err());
    }

    #[test]
    fn rejects_nonpositive_norm() {
        let mut cfg = ScenarioConfig::new(ScenarioName::GapConstantSign, 3, 1);
        cfg.phi_norm = Some(0.0);
        assert!(cfg.validate().is_err());
    }
}
