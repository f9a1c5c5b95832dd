//! `key = value` parameter and config files.
//!
//! Blank lines and lines starting with `#` are ignored; a trailing `# ...`
//! comment after a value is stripped. Keys may not repeat.

use crate::error::{Error, Result};

/// Parsed `key = value` pairs in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: Vec<(String, String)>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = KeyValues::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                what: format!("expected `key = value`, got `{line}`"),
            })?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || v.is_empty() {
                return Err(Error::Parse {
                    line: i + 1,
                    what: "empty key or value".into(),
                });
            }
            if out.get(k).is_some() {
                return Err(Error::Parse {
                    line: i + 1,
                    what: format!("duplicate key `{k}`"),
                });
            }
            out.entries.push((k.to_string(), v.to_string()));
        }
        Ok(out)
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Inserts or replaces a value (used for command-line overrides).
    pub fn set(&mut self, key: &str, value: &str) {
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(e) => e.1 = value.to_string(),
            None => self.entries.push((key.to_string(), value.to_string())),
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }

    /// Fails on any key outside `allowed`.
    pub fn reject_unknown(&self, allowed: &[&str]) -> Result<()> {
        for k in self.keys() {
            if !allowed.contains(&k) {
                return Err(Error::Parse {
                    line: 0,
                    what: format!("unknown key `{k}` (allowed: {})", allowed.join(", ")),
                });
            }
        }
        Ok(())
    }

    /// Finite `f64` value of `key`, if present.
    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|v| parse_f64(key, v)).transpose()
    }

    pub fn require_f64(&self, key: &str) -> Result<f64> {
        self.f64(key)?.ok_or_else(|| Error::Parse {
            line: 0,
            what: format!("missing key `{key}`"),
        })
    }
}

/// Parses a finite float, accepting forms like `1e6` and `2.5`.
pub fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.trim().parse().map_err(|_| Error::Parse {
        line: 0,
        what: format!("`{key}`: `{v}` is not a number"),
    })?;
    if !x.is_finite() {
        return Err(Error::Parse {
            line: 0,
            what: format!("`{key}`: `{v}` is not finite"),
        });
    }
    Ok(x)
}

/// Formats a float with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_values() {
        let kv = KeyValues::parse("# header\nalpha = 0.5\n\nbeta=0.25 # trailing\n").unwrap();
        assert_eq!(kv.f64("alpha").unwrap(), Some(0.5));
        assert_eq!(kv.f64("beta").unwrap(), Some(0.25));
        assert!(kv.reject_unknown(&["alpha"]).is_err());
        assert!(kv.reject_unknown(&["alpha", "beta"]).is_ok());
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(KeyValues::parse("alpha 0.5").is_err());
        assert!(KeyValues::parse("a = 1\na = 2").is_err());
        assert!(KeyValues::parse("a = x").unwrap().f64("a").is_err());
        assert!(KeyValues::parse("a = inf").unwrap().f64("a").is_err());
    }

    #[test]
    fn seventeen_digits_roundtrip() {
        for &x in &[0.1, 1.0 / 3.0, -2.5e-300, 6.02e23] {
            let s = fmt17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt17(f64::INFINITY), "inf");
    }
}
