use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("threshold {0} must be in (0, 1]")]
    Threshold(f64),
    #[error("weights must be non-negative and sum to 1 (got {0})")]
    Weights(f64),
    #[error("max_variants must be at least 1")]
    MaxVariants,
    #[error("config file: {0}")]
    Syntax(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScoreWeights {
    pub year: f64,
    pub authors: f64,
    pub venue: f64,
    pub volume_page: f64,
}

impl Default for ScoreWeights {
    fn default() -> Self {
        ScoreWeights { year: 0.25, authors: 0.25, venue: 0.25, volume_page: 0.25 }
    }
}

/// Acceptance threshold, component weights and the retry bound.
///
/// Read from a small TOML file:
///
/// ```toml
/// threshold = 0.8
/// max_variants = 3
/// [weights]
/// year = 0.25
/// authors = 0.25
/// venue = 0.25
/// volume_page = 0.25
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResolutionConfig {
    pub threshold: f64,
    pub weights: ScoreWeights,
    pub max_variants: usize,
}

impl Default for ResolutionConfig {
    fn default() -> Self {
        ResolutionConfig { threshold: 0.8, weights: ScoreWeights::default(), max_variants: 3 }
    }
}

impl ResolutionConfig {
    pub fn with_threshold(threshold: f64) -> Result<Self, ConfigError> {
        let c = ResolutionConfig { threshold, ..Self::default() };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(ConfigError::Threshold(self.threshold));
        }
        let w = self.weights;
        let parts = [w.year, w.authors, w.venue, w.volume_page];
        let sum: f64 = parts.iter().sum();
        if parts.iter().any(|p| *p < 0.0 || !p.is_finite()) || (sum - 1.0).abs() > 1e-9 {
            return Err(ConfigError::Weights(sum));
        }
        if self.max_variants == 0 {
            return Err(ConfigError::MaxVariants);
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let c: ResolutionConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }
}
