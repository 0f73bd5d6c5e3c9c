//! Budget configuration: defaults, then the config file, then flags.

use std::path::Path;

use serde::Deserialize;
use twincurve::Budgets;

use crate::CliError;

/// File name looked up in the working directory when `--config` is absent.
pub const DEFAULT_CONFIG_FILE: &str = "twincurve.toml";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    budgets: BudgetOverrides,
}

/// Optional budget values; `None` leaves the lower layer in place.
#[derive(Debug, Default, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetOverrides {
    pub prime_enumeration: Option<u64>,
    pub class_group_imaginary: Option<u64>,
    pub class_group_real: Option<u64>,
    pub series_truncation: Option<u64>,
}

impl BudgetOverrides {
    fn apply(&self, b: &mut Budgets) {
        if let Some(v) = self.prime_enumeration {
            b.prime_enumeration = v;
        }
        if let Some(v) = self.class_group_imaginary {
            b.class_group_imaginary = v;
        }
        if let Some(v) = self.class_group_real {
            b.class_group_real = v;
        }
        if let Some(v) = self.series_truncation {
            b.series_truncation = v;
        }
    }
}

pub fn parse_config(text: &str) -> Result<BudgetOverrides, CliError> {
    let f: ConfigFile = toml::from_str(text).map_err(|e| CliError::Usage(format!("bad config file: {e}")))?;
    Ok(f.budgets)
}

/// Resolves budgets. An explicit `--config` path must exist; the default
/// file is optional.
pub fn resolve(config: Option<&Path>, flags: BudgetOverrides) -> Result<Budgets, CliError> {
    let mut budgets = Budgets::default();
    let text = match config {
        Some(path) => Some(
            std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?,
        ),
        None => std::fs::read_to_string(DEFAULT_CONFIG_FILE).ok(),
    };
    if let Some(text) = text {
        parse_config(&text)?.apply(&mut budgets);
    }
    flags.apply(&mut budgets);
    Ok(budgets)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = parse_config("[budgets]\nprime_enumeration = 500\nseries_truncation = 7\n").unwrap();
        let mut b = Budgets::default();
        file.apply(&mut b);
        let flags = BudgetOverrides { prime_enumeration: Some(900), ..Default::default() };
        flags.apply(&mut b);
        assert_eq!(b.prime_enumeration, 900);
        assert_eq!(b.series_truncation, 7);
        assert_eq!(b.class_group_real, Budgets::default().class_group_real);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(parse_config("[budgets]\nprimes = 5\n").is_err());
        assert!(parse_config("").is_ok());
    }
}
