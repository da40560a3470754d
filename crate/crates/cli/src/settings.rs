//! Run parameters. Each one is taken from the command line if given, else
//! from the `--config` file, else from the environment (cap only), else
//! from the built-in default.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde_json::{json, Value};
use solvable_growth::{FieldCtx, DEFAULT_CAP};

/// Environment variable overriding the default closure cap.
pub const CAP_ENV: &str = "SOLGROWTH_CAP";

const CONFIG_KEYS: [&str; 8] = ["seed", "p", "a", "r", "C", "delta", "cap", "out"];

#[derive(Args, Debug, Default)]
pub struct CommonArgs {
    /// Seed for every sampled instance.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Field characteristic.
    #[arg(long, global = true)]
    pub p: Option<u32>,
    /// Field degree over F_p.
    #[arg(long, global = true)]
    pub a: Option<usize>,
    /// Matrix dimension.
    #[arg(long, global = true)]
    pub r: Option<usize>,
    /// Growth constant C.
    #[arg(long = "C", global = true)]
    pub c: Option<f64>,
    /// Kernel-mass threshold exponent: D = C^(1/delta).
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    /// Maximum size of any closure or product set.
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    /// Output file; stdout if absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Flat `key = value` file with any of: seed p a r C delta cap out.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub seed: u64,
    pub p: u32,
    pub a: usize,
    pub r: usize,
    pub c: f64,
    pub delta: f64,
    pub cap: usize,
    pub out: Option<PathBuf>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { seed: 0, p: 5, a: 1, r: 2, c: 2.0, delta: 1.0, cap: DEFAULT_CAP, out: None }
    }
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {}: expected `key = value`", n + 1);
        };
        let key = key.trim();
        if !CONFIG_KEYS.contains(&key) {
            bail!("config line {}: unknown key {key:?}", n + 1);
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_value<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    raw.parse().with_context(|| format!("bad value {raw:?} for {key}"))
}

impl Settings {
    pub fn resolve(args: &CommonArgs, env_cap: Option<&str>) -> Result<Self> {
        let file = match &args.config {
            Some(path) => parse_config(
                &fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
            )?,
            None => BTreeMap::new(),
        };
        let mut s = Settings::default();
        if let Some(v) = env_cap {
            s.cap = parse_value(CAP_ENV, v)?;
        }
        for (key, raw) in &file {
            match key.as_str() {
                "seed" => s.seed = parse_value(key, raw)?,
                "p" => s.p = parse_value(key, raw)?,
                "a" => s.a = parse_value(key, raw)?,
                "r" => s.r = parse_value(key, raw)?,
                "C" => s.c = parse_value(key, raw)?,
                "delta" => s.delta = parse_value(key, raw)?,
                "cap" => s.cap = parse_value(key, raw)?,
                "out" => s.out = Some(PathBuf::from(raw)),
                _ => unreachable!("keys are checked by parse_config"),
            }
        }
        s.seed = args.seed.unwrap_or(s.seed);
        s.p = args.p.unwrap_or(s.p);
        s.a = args.a.unwrap_or(s.a);
        s.r = args.r.unwrap_or(s.r);
        s.c = args.c.unwrap_or(s.c);
        s.delta = args.delta.unwrap_or(s.delta);
        s.cap = args.cap.unwrap_or(s.cap);
        if args.out.is_some() {
            s.out = args.out.clone();
        }
        if s.cap == 0 {
            bail!("cap must be positive");
        }
        if s.r == 0 {
            bail!("r must be positive");
        }
        Ok(s)
    }

    pub fn field(&self) -> Result<FieldCtx> {
        Ok(FieldCtx::new(self.p, self.a, None)?)
    }

    pub fn out(&self) -> Option<&Path> {
        self.out.as_deref()
    }

    /// The parameters echoed into every report.
    pub fn to_json(&self) -> Value {
        json!({
            "seed": self.seed,
            "p": self.p,
            "a": self.a,
            "r": self.r,
            "C": self.c,
            "delta": self.delta,
            "cap": self.cap,
        })
    }
}
