//! Reading distributions, chains and polynomials from files or arguments.

use std::fs;
use std::path::Path;

use meandiff::divergences::{Distribution, DistributionOptions};
use meandiff::inequalities::{builtin_chain, parse_chain, InequalityChain};
use meandiff::polycert::{builtin_half_power, builtin_polynomial, substitute_t_squared, HalfPowerPoly, Polynomial};

use crate::CliError;

pub fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

/// Numbers from a JSON array or from CSV with one value per line; blank
/// lines and lines starting with `#` are ignored.
pub fn parse_values(text: &str, origin: &str) -> Result<Vec<f64>, CliError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        return serde_json::from_str::<Vec<f64>>(trimmed)
            .map_err(|e| CliError::Usage(format!("{origin}: invalid JSON array: {e}")));
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#')
        })
        .map(|(i, l)| {
            let field = l.trim().trim_end_matches(',').trim();
            field
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("{origin}:{}: not a number: '{field}'", i + 1)))
        })
        .collect()
}

pub fn load_distribution(path: &Path, opts: &DistributionOptions) -> Result<Distribution, CliError> {
    let origin = path.display().to_string();
    let values = parse_values(&read_file(path)?, &origin)?;
    Distribution::with_options(values, opts).map_err(|e| CliError::from(e).context(&origin))
}

/// A builtin chain name, or a path to a chain file.
pub fn resolve_chain(spec: &str) -> Result<(InequalityChain, String), CliError> {
    if let Some(c) = builtin_chain(spec) {
        return Ok((c, "builtin".into()));
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(CliError::Usage(format!("unknown chain '{spec}' (not a builtin name or an existing file)")));
    }
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("custom");
    let chain = parse_chain(&read_file(path)?, name).map_err(|e| CliError::Usage(format!("{spec}: {e}")))?;
    Ok((chain, path.display().to_string()))
}

/// `builtin:NAME`, a file, or a literal polynomial in `t` (or a half-power
/// polynomial in `x`, which is substituted `x = t²`).
pub fn resolve_polynomial(spec: &str) -> Result<(Polynomial, String), CliError> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        if let Some(p) = builtin_polynomial(name) {
            return Ok((p, spec.to_string()));
        }
        if let Some(h) = builtin_half_power(name) {
            return Ok((substitute_t_squared(&h), spec.to_string()));
        }
        return Err(CliError::Usage(format!("unknown builtin polynomial '{name}'")));
    }
    let path = Path::new(spec);
    let text = if path.is_file() { read_file(path)? } else { spec.to_string() };
    let text = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .collect::<Vec<_>>()
        .join(" ");
    match Polynomial::parse(&text) {
        Ok(p) => Ok((p, spec.to_string())),
        Err(first) => HalfPowerPoly::parse(&text)
            .map(|h| (substitute_t_squared(&h), spec.to_string()))
            .map_err(|_| CliError::Usage(format!("cannot parse polynomial '{}': {first}", text.trim()))),
    }
}
