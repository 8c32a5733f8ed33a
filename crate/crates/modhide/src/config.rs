//! Run configuration: defaults, a plain-text config file, and validation.
//!
//! Precedence is flags > config file > defaults; the merge happens in the
//! CLI layer, which applies file values first and explicit flags on top.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::expr::LiftStyle;
use crate::moduli::ChainMode;
use crate::{Error, Result};

/// Everything an obfuscation run needs. Field-for-field what the config
/// file and the CLI flags can set.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub iterations: u32,
    pub depth_min: u32,
    pub depth_max: u32,
    /// Length of the modulus chain (the emitted runtime's table size).
    pub chain_len: u32,
    pub mode: ChainMode,
    pub style: LiftStyle,
    pub seed: u64,
    /// Appended to the class name when normalization changes the layout.
    pub suffix_normalize: String,
    /// Appended to the class name by every obfuscation iteration.
    pub suffix_iterate: String,
    pub all_constants: bool,
    /// Explicit reduction depths, one inner list per iteration, cycled
    /// within an iteration. Empty means depths are drawn from the seed.
    pub depth_schedule: Vec<Vec<u32>>,
    pub out_dir: PathBuf,
    pub jobs: u32,
    pub jdk_home: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            iterations: 1,
            depth_min: 2,
            depth_max: 12,
            chain_len: 13,
            mode: ChainMode::Doubled,
            style: LiftStyle::Random,
            seed: 0,
            suffix_normalize: "_mod".to_string(),
            suffix_iterate: "123".to_string(),
            all_constants: false,
            depth_schedule: Vec::new(),
            out_dir: PathBuf::from("out"),
            jobs: 1,
            jdk_home: None,
        }
    }
}

impl RunConfig {
    /// Checks cross-field consistency; every run entry point calls this once.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config { msg });
        if self.iterations < 1 {
            return fail("iterations must be at least 1".into());
        }
        if self.chain_len < 2 {
            return fail("chain length must be at least 2".into());
        }
        if self.depth_min < 1 {
            return fail("depth-min must be at least 1".into());
        }
        if self.depth_min > self.depth_max {
            return fail(format!(
                "depth-min {} exceeds depth-max {}",
                self.depth_min, self.depth_max
            ));
        }
        // one spare index is needed for the rendered modulus
        if self.depth_max > self.chain_len - 1 {
            return fail(format!(
                "depth-max {} needs a chain longer than {} (max usable depth is length - 1)",
                self.depth_max, self.chain_len
            ));
        }
        for (it, depths) in self.depth_schedule.iter().enumerate() {
            for &d in depths {
                if d < 1 || d > self.chain_len - 1 {
                    return fail(format!(
                        "depth {} in schedule for iteration {} is outside 1..={}",
                        d,
                        it + 1,
                        self.chain_len - 1
                    ));
                }
            }
        }
        if self.jobs < 1 {
            return fail("jobs must be at least 1".into());
        }
        Ok(())
    }

    /// Depth list for one iteration, if the schedule covers it.
    pub fn schedule_for(&self, iteration: usize) -> Option<&[u32]> {
        self.depth_schedule.get(iteration).map(|v| v.as_slice()).filter(|v| !v.is_empty())
    }
}

/// Parses `"10,6,12,5;8,12,6,7"` — iterations split by `;`, depths by `,`.
pub fn parse_schedule(text: &str) -> Result<Vec<Vec<u32>>> {
    let mut schedule = Vec::new();
    for part in text.split(';') {
        let part = part.trim();
        if part.is_empty() {
            schedule.push(Vec::new());
            continue;
        }
        let mut depths = Vec::new();
        for d in part.split(',') {
            let d = d.trim();
            depths.push(d.parse::<u32>().map_err(|_| Error::Config {
                msg: format!("bad depth '{d}' in schedule"),
            })?);
        }
        schedule.push(depths);
    }
    Ok(schedule)
}

/// Raw `key = value` pairs from a config file. `#` starts a comment; blank
/// lines are ignored; keys use the flag spellings (`depth-min`, `mode`…).
pub fn parse_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config {
                msg: format!("{}:{}: expected key = value, got '{}'", path.display(), lineno + 1, raw.trim()),
            });
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Applies config-file pairs onto `cfg`. Unknown keys are errors so typos
/// surface instead of silently keeping defaults.
pub fn apply_file(cfg: &mut RunConfig, pairs: &BTreeMap<String, String>) -> Result<()> {
    let bad = |key: &str, value: &str| Error::Config {
        msg: format!("bad value '{value}' for config key '{key}'"),
    };
    for (key, value) in pairs {
        match key.as_str() {
            "iterations" => cfg.iterations = value.parse().map_err(|_| bad(key, value))?,
            "depth-min" => cfg.depth_min = value.parse().map_err(|_| bad(key, value))?,
            "depth-max" => cfg.depth_max = value.parse().map_err(|_| bad(key, value))?,
            "chain-length" => cfg.chain_len = value.parse().map_err(|_| bad(key, value))?,
            "mode" => cfg.mode = parse_mode(value)?,
            "style" => cfg.style = parse_style(value)?,
            "seed" => cfg.seed = value.parse().map_err(|_| bad(key, value))?,
            "suffix-normalize" => cfg.suffix_normalize = value.clone(),
            "suffix-iterate" => cfg.suffix_iterate = value.clone(),
            "all-constants" => cfg.all_constants = parse_bool(value).ok_or_else(|| bad(key, value))?,
            "depths" => cfg.depth_schedule = parse_schedule(value)?,
            "out-dir" => cfg.out_dir = PathBuf::from(value),
            "jobs" => cfg.jobs = value.parse().map_err(|_| bad(key, value))?,
            "jdk-home" => cfg.jdk_home = Some(PathBuf::from(value)),
            _ => {
                return Err(Error::Config {
                    msg: format!("unknown config key '{key}'"),
                })
            }
        }
    }
    Ok(())
}

pub fn parse_mode(text: &str) -> Result<ChainMode> {
    match text {
        "doubled" => Ok(ChainMode::Doubled),
        "prime-sum" => Ok(ChainMode::PrimeSum),
        _ => Err(Error::Config {
            msg: format!("unknown mode '{text}' (expected doubled or prime-sum)"),
        }),
    }
}

pub fn parse_style(text: &str) -> Result<LiftStyle> {
    match text {
        "unit" => Ok(LiftStyle::Unit),
        "random" => Ok(LiftStyle::Random),
        _ => Err(Error::Config {
            msg: format!("unknown style '{text}' (expected unit or random)"),
        }),
    }
}

fn parse_bool(text: &str) -> Option<bool> {
    match text {
        "true" | "yes" | "on" | "1" => Some(true),
        "false" | "no" | "off" | "0" => Some(false),
        _ => None,
    }
}
