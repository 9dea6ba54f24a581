//! Flat key-value configuration files.
//!
//! One `key = value` per line, `#` starts a comment. Recognized keys:
//! `delta`, `epsilon`, `g`, `kappa_a`, `kappa_b`, `nbar`, `n_max`, `m_max`,
//! `order_N`. All nine are required; unknown keys are rejected.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::params::{ExpansionOrder, FockCutoffs, SystemParams};

pub const CONFIG_KEYS: [&str; 9] = [
    "delta", "epsilon", "g", "kappa_a", "kappa_b", "nbar", "n_max", "m_max", "order_N",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    pub params: SystemParams,
    pub cutoffs: FockCutoffs,
    pub order: ExpansionOrder,
}

impl Config {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Config {
            path: path.to_string(),
            line,
            msg,
        };

        let mut seen: HashMap<&str, (usize, f64)> = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(line, format!("expected `key = value`, got `{content}`")))?;
            let key = key.trim();
            let value = value.trim();
            let canon = CONFIG_KEYS
                .iter()
                .find(|k| **k == key)
                .ok_or_else(|| err(line, format!("unknown key `{key}`")))?;
            let parsed: f64 = value
                .parse()
                .map_err(|_| err(line, format!("cannot parse `{value}` as a number")))?;
            if seen.insert(canon, (line, parsed)).is_some() {
                return Err(err(line, format!("duplicate key `{key}`")));
            }
        }

        for key in CONFIG_KEYS {
            if !seen.contains_key(key) {
                return Err(err(0, format!("missing required key `{key}`")));
            }
        }

        let get = |k: &str| seen[k].1;
        let int = |k: &str| -> Result<usize> {
            let (line, v) = seen[k];
            if v.fract() != 0.0 || v < 0.0 || v > usize::MAX as f64 {
                return Err(err(line, format!("`{k}` must be a non-negative integer, got {v}")));
            }
            Ok(v as usize)
        };

        let params = SystemParams::new(
            get("delta"),
            get("epsilon"),
            get("g"),
            get("kappa_a"),
            get("kappa_b"),
            get("nbar"),
        )?;
        let cutoffs = FockCutoffs::new(int("n_max")?, int("m_max")?);
        let order = ExpansionOrder(int("order_N")? as u32);
        Ok(Config {
            params,
            cutoffs,
            order,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# Fig. 1 working point
delta   = 0.05
epsilon = 0.02
g       = 0.1     # chi = 0.1
kappa_a = 2e-3
kappa_b = 2e-5
nbar    = 1
n_max   = 10
m_max   = 14
order_N = 1
";

    #[test]
    fn parses_sample() {
        let cfg = Config::parse(SAMPLE, "sample").unwrap();
        assert_eq!(cfg.params.delta, 0.05);
        assert_eq!(cfg.params.chi(), 0.1);
        assert_eq!(cfg.cutoffs, FockCutoffs::new(10, 14));
        assert_eq!(cfg.order, ExpansionOrder(1));
    }

    #[test]
    fn rejects_unknown_key() {
        let bad = format!("{SAMPLE}\nomega = 2.0\n");
        let e = Config::parse(&bad, "bad").unwrap_err();
        assert!(e.to_string().contains("unknown key"));
    }

    #[test]
    fn rejects_missing_key() {
        let text = SAMPLE.lines().skip(2).collect::<Vec<_>>().join("\n");
        let e = Config::parse(&text, "missing").unwrap_err();
        assert!(e.to_string().contains("missing required key `delta`"));
    }

    #[test]
    fn rejects_fractional_cutoff() {
        let bad = SAMPLE.replace("n_max   = 10", "n_max = 10.5");
        assert!(Config::parse(&bad, "frac").is_err());
    }

    #[test]
    fn rejects_duplicate_key() {
        let bad = format!("{SAMPLE}\ndelta = 0.01\n");
        assert!(Config::parse(&bad, "dup").is_err());
    }
}
