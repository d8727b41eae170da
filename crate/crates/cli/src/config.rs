//! Parameter resolution with the precedence CLI flags > config file >
//! defaults, and a config echo that records every value a command actually
//! resolved — defaults included — for embedding in output headers.

use crate::error::CliError;
use diffset_core::budget::DEFAULT_BUDGET_POINTS;
use diffset_core::field::PrimeField;
use diffset_core::EnumerationBudget;
use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

/// Every key a config file may set; flags map to keys by dropping `--`.
/// `n`/`N` and `k`/`K` are distinct, case-sensitive keys.
const KNOWN_KEYS: &[&str] = &[
    "p", "n", "N", "K", "k", "model", "eps", "trials", "seed", "out", "budget", "mode", "r",
    "set", "diffs", "domain",
];

/// Merged view of CLI flags and config-file entries for one run.
#[derive(Debug)]
pub struct Resolver {
    command: &'static str,
    values: BTreeMap<String, String>,
    echo: RefCell<BTreeMap<String, String>>,
}

fn parse_config_text(text: &str, path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::input(format!(
                "{}: line {}: expected `key = value`, got {line:?}",
                path.display(),
                idx + 1
            )));
        };
        let key = key.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(CliError::input(format!(
                "{}: line {}: unknown key {key:?} (known: {})",
                path.display(),
                idx + 1,
                KNOWN_KEYS.join(", ")
            )));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

impl Resolver {
    /// Builds the merged parameter map: config-file entries first, then CLI
    /// flags on top.
    pub fn new(
        command: &'static str,
        cli: Vec<(&'static str, Option<String>)>,
        config_path: Option<&Path>,
    ) -> Result<Resolver, CliError> {
        let mut values = match config_path {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    CliError::input(format!("cannot read config {}: {e}", path.display()))
                })?;
                parse_config_text(&text, path)?
            }
            None => BTreeMap::new(),
        };
        for (key, value) in cli {
            if let Some(v) = value {
                values.insert(key.to_string(), v);
            }
        }
        Ok(Resolver { command, values, echo: RefCell::new(BTreeMap::new()) })
    }

    pub fn command(&self) -> &'static str {
        self.command
    }

    fn record(&self, key: &str, value: impl ToString) {
        self.echo.borrow_mut().insert(key.to_string(), value.to_string());
    }

    /// Everything this run resolved, defaults included, sorted by key.
    pub fn echo_entries(&self) -> Vec<(String, String)> {
        let mut entries: Vec<(String, String)> =
            self.echo.borrow().iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        entries.insert(0, ("command".to_string(), self.command.to_string()));
        entries
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    pub fn opt_str(&self, key: &str) -> Option<String> {
        let v = self.raw(key).map(|s| s.to_string());
        if let Some(ref s) = v {
            self.record(key, s);
        }
        v
    }

    pub fn require_str(&self, key: &str) -> Result<String, CliError> {
        self.opt_str(key)
            .ok_or_else(|| CliError::input(format!("--{key} is required for {}", self.command)))
    }

    pub fn str_or(&self, key: &str, default: &str) -> String {
        let v = self.raw(key).unwrap_or(default).to_string();
        self.record(key, &v);
        v
    }

    fn parse<T: std::str::FromStr>(&self, key: &str, text: &str) -> Result<T, CliError> {
        text.parse().map_err(|_| {
            CliError::input(format!(
                "--{key}: cannot parse {text:?} as {}",
                std::any::type_name::<T>()
            ))
        })
    }

    pub fn opt_usize(&self, key: &str) -> Result<Option<usize>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(text) => {
                let v: usize = self.parse(key, text)?;
                self.record(key, v);
                Ok(Some(v))
            }
        }
    }

    pub fn require_usize(&self, key: &str) -> Result<usize, CliError> {
        self.opt_usize(key)?
            .ok_or_else(|| CliError::input(format!("--{key} is required for {}", self.command)))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.raw(key) {
            None => {
                self.record(key, default);
                Ok(default)
            }
            Some(text) => {
                let v: usize = self.parse(key, text)?;
                self.record(key, v);
                Ok(v)
            }
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64, CliError> {
        match self.raw(key) {
            None => {
                self.record(key, default);
                Ok(default)
            }
            Some(text) => {
                let v: u64 = self.parse(key, text)?;
                self.record(key, v);
                Ok(v)
            }
        }
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.raw(key) {
            None => {
                self.record(key, default);
                Ok(default)
            }
            Some(text) => {
                let v: f64 = self.parse(key, text)?;
                if !v.is_finite() {
                    return Err(CliError::input(format!("--{key} must be finite, got {v}")));
                }
                self.record(key, v);
                Ok(v)
            }
        }
    }

    /// Comma-separated list of sizes, e.g. `--n 4,6,8`.
    pub fn usize_list(&self, key: &str) -> Result<Vec<usize>, CliError> {
        let text = self.require_str(key)?;
        let mut out = Vec::new();
        for part in text.split(',') {
            let part = part.trim();
            out.push(self.parse::<usize>(key, part)?);
        }
        if out.is_empty() {
            return Err(CliError::input(format!("--{key}: empty list")));
        }
        Ok(out)
    }

    /// The odd-prime modulus from `--p`.
    pub fn prime(&self) -> Result<PrimeField, CliError> {
        let p: u64 = {
            let text = self.require_str("p")?;
            self.parse("p", &text)?
        };
        PrimeField::new(p)
            .map_err(|_| CliError::input(format!("p must be an odd prime (got {p})")))
    }

    /// The enumeration budget from `--budget` (points), defaulted.
    pub fn budget(&self) -> Result<EnumerationBudget, CliError> {
        Ok(EnumerationBudget::new(self.u64_or("budget", DEFAULT_BUDGET_POINTS)?))
    }

    /// The master seed. Required — reproducibility is the product, so there
    /// is no silent time-based fallback.
    pub fn seed(&self) -> Result<u64, CliError> {
        match self.raw("seed") {
            Some(text) => {
                let v: u64 = self.parse("seed", text)?;
                self.record("seed", v);
                Ok(v)
            }
            None => Err(CliError::input(format!(
                "--seed is required for {} (runs are never time-seeded)",
                self.command
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn resolver(cli: Vec<(&'static str, Option<String>)>) -> Resolver {
        Resolver::new("test", cli, None).unwrap()
    }

    #[test]
    fn cli_overrides_config() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "# comment\ntrials = 10\nseed = 3").unwrap();
        let r = Resolver::new(
            "test",
            vec![("trials", Some("99".to_string()))],
            Some(file.path()),
        )
        .unwrap();
        assert_eq!(r.u64_or("trials", 1).unwrap(), 99);
        assert_eq!(r.seed().unwrap(), 3);
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "velocity = 9").unwrap();
        let err = Resolver::new("test", vec![], Some(file.path())).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("velocity"));
    }

    #[test]
    fn defaults_are_echoed() {
        let r = resolver(vec![]);
        assert_eq!(r.u64_or("trials", 100).unwrap(), 100);
        let echo = r.echo_entries();
        assert!(echo.contains(&("trials".to_string(), "100".to_string())));
        assert_eq!(echo[0].0, "command");
    }

    #[test]
    fn seed_is_required() {
        let r = resolver(vec![]);
        let err = r.seed().unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("--seed is required"));
    }

    #[test]
    fn prime_validation_message() {
        let r = resolver(vec![("p", Some("2".to_string()))]);
        let err = r.prime().unwrap_err();
        assert!(err.to_string().contains("odd prime"));
        let r = resolver(vec![("p", Some("9".to_string()))]);
        assert!(r.prime().is_err());
        let r = resolver(vec![("p", Some("13".to_string()))]);
        assert_eq!(r.prime().unwrap().modulus(), 13);
    }

    #[test]
    fn lists_parse() {
        let r = resolver(vec![("n", Some("4, 6,8".to_string()))]);
        assert_eq!(r.usize_list("n").unwrap(), vec![4, 6, 8]);
        let r = resolver(vec![("n", Some("4,x".to_string()))]);
        assert!(r.usize_list("n").is_err());
    }
}
