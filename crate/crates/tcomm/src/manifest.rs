//! Run manifests: a flat `key=value` record of inputs and parameters.

use std::collections::BTreeMap;
use std::io::{BufRead, Read, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.txt";

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RunManifest {
    /// everything that determines the outputs, sorted by key
    params: BTreeMap<String, String>,
    /// seconds since the Unix epoch
    pub started: u64,
    pub finished: u64,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        let mut m = Self {
            started: now(),
            ..Self::default()
        };
        m.set("command", command);
        m.set("tool_version", env!("CARGO_PKG_VERSION"));
        m
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        let value = value.to_string();
        assert!(
            !key.contains(['=', '\n']) && !value.contains('\n'),
            "manifest entries are single-line"
        );
        self.params.insert(key.to_owned(), value);
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    /// Records the input path and the SHA-256 of its contents.
    pub fn set_input(&mut self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let digest = sha256_reader(&mut file).map_err(|e| Error::io(path, e))?;
        self.set("input_path", path.display());
        self.set("input_sha256", digest);
        Ok(())
    }

    /// Digest of the parameters; identical inputs and settings give the same
    /// id. The input path itself is excluded so moved files keep their id.
    pub fn run_id(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self
            .params
            .iter()
            .filter(|(k, _)| k.as_str() != "input_path")
        {
            h.update(k.as_bytes());
            h.update(b"=");
            h.update(v.as_bytes());
            h.update(b"\n");
        }
        hex::encode(&h.finalize()[..8])
    }

    pub fn finish(&mut self) {
        self.finished = now();
    }

    pub fn write(&self, out: &mut impl Write) -> Result<()> {
        writeln!(out, "run_id={}", self.run_id())?;
        for (k, v) in &self.params {
            writeln!(out, "{k}={v}")?;
        }
        writeln!(out, "started_unix={}", self.started)?;
        writeln!(out, "finished_unix={}", self.finished)?;
        Ok(())
    }

    pub fn read(input: impl BufRead) -> Result<Self> {
        let mut m = Self::default();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, "expected key=value"))?;
            let stamp = || {
                v.parse::<u64>()
                    .map_err(|_| Error::parse(i + 1, "bad timestamp"))
            };
            match k {
                "run_id" => {}
                "started_unix" => m.started = stamp()?,
                "finished_unix" => m.finished = stamp()?,
                _ => {
                    m.params.insert(k.to_owned(), v.to_owned());
                }
            }
        }
        Ok(m)
    }
}

pub fn sha256_reader(r: &mut impl Read) -> std::io::Result<String> {
    let mut h = Sha256::new();
    let mut buf = [0u8; 1 << 16];
    loop {
        match r.read(&mut buf)? {
            0 => break,
            n => h.update(&buf[..n]),
        }
    }
    Ok(hex::encode(h.finalize()))
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}
