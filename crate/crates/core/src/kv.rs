//! `key = value` text files with `#` comments.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Parsed key/value pairs. Every key must be consumed by [`KvFile::finish`].
#[derive(Debug, Default)]
pub struct KvFile {
    entries: BTreeMap<String, (usize, String)>,
}

impl KvFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            let key = k.trim().to_string();
            if entries.insert(key.clone(), (i + 1, v.trim().to_string())).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key {key:?}", i + 1)));
            }
        }
        Ok(KvFile { entries })
    }

    /// Removes `key` and parses it into `slot` when present.
    pub fn take<T: FromStr>(&mut self, key: &str, slot: &mut T) -> Result<()> {
        if let Some((line, v)) = self.entries.remove(key) {
            *slot = v
                .parse()
                .map_err(|_| Error::Config(format!("line {line}: invalid value {v:?} for key {key:?}")))?;
        }
        Ok(())
    }

    pub fn take_opt<T: FromStr>(&mut self, key: &str, slot: &mut Option<T>) -> Result<()> {
        if let Some((line, v)) = self.entries.remove(key) {
            *slot = if v == "none" || v.is_empty() {
                None
            } else {
                Some(v.parse().map_err(|_| {
                    Error::Config(format!("line {line}: invalid value {v:?} for key {key:?}"))
                })?)
            };
        }
        Ok(())
    }

    /// Fails on any key nobody asked for.
    pub fn finish(self) -> Result<()> {
        match self.entries.into_iter().next() {
            None => Ok(()),
            Some((k, (line, _))) => Err(Error::Config(format!("line {line}: unknown key {k:?}"))),
        }
    }
}
