//! Parsing of `name:param=value,param=value` keys used by the CLI and
//! campaign configs.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Splits `name:params` into its two halves (params may be empty).
pub fn split_key(key: &str) -> (&str, &str) {
    match key.split_once(':') {
        Some((name, params)) => (name.trim(), params.trim()),
        None => (key.trim(), ""),
    }
}

#[derive(Debug, Default)]
pub struct Params {
    entries: BTreeMap<String, String>,
}

pub fn parse_params(text: &str) -> Result<Params> {
    let mut entries = BTreeMap::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected `name=value`, got `{part}`")))?;
        if entries.insert(k.trim().to_owned(), v.trim().to_owned()).is_some() {
            return Err(Error::Parse(format!("parameter `{k}` given twice")));
        }
    }
    Ok(Params { entries })
}

impl Params {
    fn take<T: std::str::FromStr>(&mut self, name: &str) -> Result<Option<T>> {
        match self.entries.remove(name) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Parse(format!("bad value `{v}` for parameter `{name}`"))),
        }
    }

    pub fn usize(&mut self, name: &str) -> Result<Option<usize>> {
        self.take(name)
    }

    pub fn f64(&mut self, name: &str) -> Result<Option<f64>> {
        self.take(name)
    }

    /// Fails if any parameter was not consumed.
    pub fn finish<T>(self, value: T) -> Result<T> {
        match self.entries.keys().next() {
            Some(k) => Err(Error::Parse(format!("unexpected parameter `{k}`"))),
            None => Ok(value),
        }
    }
}
