use std::path::Path;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use ageing_core::registry::{parse_copula, parse_marginal};
use ageing_core::semicopula::SemiCopula;
use ageing_core::univariate::SurvivalModel;
use ageing_core::Tolerance;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    pub size: Option<usize>,
    pub x_max: Option<f64>,
    pub tol: Option<f64>,
}

/// Model configuration, from a TOML file and/or command-line flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub copula: Option<String>,
    pub marginal: Option<String>,
    #[serde(default)]
    pub grids: Grids,
}

impl ModelSpec {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    }

    /// Flags take precedence over file values.
    pub fn merge(mut self, copula: Option<String>, marginal: Option<String>, grid: Option<usize>, tol: Option<f64>, x_max: Option<f64>) -> Self {
        self.copula = copula.or(self.copula);
        self.marginal = marginal.or(self.marginal);
        self.grids.size = grid.or(self.grids.size);
        self.grids.tol = tol.or(self.grids.tol);
        self.grids.x_max = x_max.or(self.grids.x_max);
        self
    }

    pub fn copula(&self) -> Result<SemiCopula, CliError> {
        let key = self.copula.as_deref().ok_or_else(|| CliError::input("missing copula (use --copula or a config file)"))?;
        parse_copula(key).map_err(CliError::from_core_input)
    }

    pub fn marginal(&self) -> Result<SurvivalModel, CliError> {
        let key = self
            .marginal
            .as_deref()
            .ok_or_else(|| CliError::input("missing marginal (use --marginal or a config file)"))?;
        parse_marginal(key).map_err(CliError::from_core_input)
    }

    pub fn tolerance(&self) -> Result<Tolerance, CliError> {
        match self.grids.tol {
            None => Ok(Tolerance::default()),
            Some(t) if t > 0.0 && t.is_finite() => Ok(Tolerance::new(t, Tolerance::default().floor.min(t))),
            Some(t) => Err(CliError::input(format!("tolerance must be positive, got {t}"))),
        }
    }

    /// Short digest of the resolved configuration plus any command extras.
    pub fn digest(&self, extra: &str) -> String {
        let canonical = format!(
            "copula={};marginal={};size={:?};x_max={:?};tol={:?};{extra}",
            self.copula.as_deref().unwrap_or(""),
            self.marginal.as_deref().unwrap_or(""),
            self.grids.size,
            self.grids.x_max,
            self.grids.tol,
        );
        let hash = Sha256::digest(canonical.as_bytes());
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let s: ModelSpec = toml::from_str("copula = \"clayton:1\"\nmarginal = \"exp:1\"\n[grids]\nsize = 9\n").unwrap();
        assert_eq!(s.copula.as_deref(), Some("clayton:1"));
        assert_eq!(s.grids.size, Some(9));
        assert!(toml::from_str::<ModelSpec>("copla = \"pi\"").is_err());
    }

    #[test]
    fn digest_depends_on_content() {
        let a = ModelSpec::default().merge(Some("pi".into()), None, None, None, None);
        let b = ModelSpec::default().merge(Some("m".into()), None, None, None, None);
        assert_eq!(a.digest("x"), a.digest("x"));
        assert_ne!(a.digest("x"), b.digest("x"));
        assert_eq!(a.digest("x").len(), 16);
    }
}
