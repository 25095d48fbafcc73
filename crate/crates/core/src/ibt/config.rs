//! `key = value` run configuration. `#` starts a comment line; relative
//! paths are resolved against the directory holding the file.
//!
//! ```text
//! in_src = data/id.ne
//! in_tgt = data/id.hi
//! mono_src = data/mono.ne
//! mono_tgt = data/mono.hi
//! dev_src = data/dev.ne
//! dev_tgt = data/dev.hi
//! work_dir = runs/ibt
//! translate_s2t = ./translate.sh ne hi
//! translate_t2s = ./translate.sh hi ne
//! retrain = ./retrain.sh
//! threshold = 0.8
//! patience = 10
//! max_iterations = 30
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use super::{IbtError, LoopPolicy, DEFAULT_PATIENCE};
use crate::selection::DEFAULT_THRESHOLD;

#[derive(Debug, Clone, PartialEq)]
pub enum TranslatorSpec {
    /// Shell commands for each direction.
    Process { s2t: String, t2s: String },
    /// A directory shared with an external translator.
    Directory(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IbtConfig {
    pub in_src: PathBuf,
    pub in_tgt: PathBuf,
    pub mono_src: PathBuf,
    pub mono_tgt: PathBuf,
    pub dev_src: Option<PathBuf>,
    pub dev_tgt: Option<PathBuf>,
    pub work_dir: PathBuf,
    pub translator: TranslatorSpec,
    pub timeout: Duration,
    /// Called after each iteration as `sh -c <retrain> sh <iteration> <s2t.src> <s2t.tgt> <t2s.src> <t2s.tgt>`.
    pub retrain: Option<String>,
    /// Same arguments as `retrain`; prints the dev score as its last line.
    pub dev_scorer: Option<String>,
    pub threshold_src: f64,
    pub threshold_tgt: f64,
    pub order: usize,
    pub wx: bool,
    pub raw_total: bool,
    pub policy: LoopPolicy,
}

const KEYS: &[&str] = &[
    "in_src", "in_tgt", "mono_src", "mono_tgt", "dev_src", "dev_tgt", "work_dir",
    "translate_s2t", "translate_t2s", "exchange_dir", "timeout", "retrain", "dev_scorer",
    "threshold", "threshold_src", "threshold_tgt", "order", "wx", "raw_total", "patience",
    "max_iterations", "min_delta",
];

impl IbtConfig {
    pub fn load(path: &Path) -> Result<IbtConfig, IbtError> {
        let text = std::fs::read_to_string(path).map_err(|e| IbtError::Config {
            path: path.display().to_string(),
            line: 0,
            reason: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let base = std::path::absolute(base)?;
        IbtConfig::parse(&text, &base, &path.display().to_string())
    }

    /// `origin` names the source in error messages.
    pub fn parse(text: &str, base: &Path, origin: &str) -> Result<IbtConfig, IbtError> {
        let err = |line: usize, reason: String| IbtError::Config {
            path: origin.to_owned(),
            line,
            reason,
        };
        let mut entries: Vec<(&str, &str, usize)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err(i + 1, format!("expected `key = value`, found `{line}`")))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(err(i + 1, format!("unknown key `{k}`")));
            }
            if entries.iter().any(|(seen, _, _)| *seen == k) {
                return Err(err(i + 1, format!("duplicate key `{k}`")));
            }
            entries.push((k, v, i + 1));
        }
        let get = |k: &str| entries.iter().find(|(key, _, _)| *key == k).map(|&(_, v, l)| (v, l));
        let required = |k: &str| get(k).ok_or_else(|| err(0, format!("missing key `{k}`")));
        let path = |k: &str| -> Result<Option<PathBuf>, IbtError> { Ok(get(k).map(|(v, _)| base.join(v))) };
        let req_path = |k: &str| -> Result<PathBuf, IbtError> { required(k).map(|(v, _)| base.join(v)) };
        fn num<T: FromStr>(
            entry: Option<(&str, usize)>,
            default: T,
            err: &dyn Fn(usize, String) -> IbtError,
            key: &str,
        ) -> Result<T, IbtError> {
            match entry {
                None => Ok(default),
                Some((v, l)) => v.parse().map_err(|_| err(l, format!("`{key}` has invalid value `{v}`"))),
            }
        }
        let err_ref: &dyn Fn(usize, String) -> IbtError = &err;

        let translator = match (get("translate_s2t"), get("translate_t2s"), get("exchange_dir")) {
            (Some((s2t, _)), Some((t2s, _)), None) => TranslatorSpec::Process {
                s2t: s2t.to_owned(),
                t2s: t2s.to_owned(),
            },
            (None, None, Some((d, _))) => TranslatorSpec::Directory(base.join(d)),
            _ => {
                return Err(err(
                    0,
                    "give either both `translate_s2t` and `translate_t2s`, or `exchange_dir`".into(),
                ))
            }
        };
        let both = num(get("threshold"), DEFAULT_THRESHOLD, err_ref, "threshold")?;
        let config = IbtConfig {
            in_src: req_path("in_src")?,
            in_tgt: req_path("in_tgt")?,
            mono_src: req_path("mono_src")?,
            mono_tgt: req_path("mono_tgt")?,
            dev_src: path("dev_src")?,
            dev_tgt: path("dev_tgt")?,
            work_dir: req_path("work_dir")?,
            translator,
            timeout: Duration::from_secs_f64(num(get("timeout"), 3600.0, err_ref, "timeout")?),
            retrain: get("retrain").map(|(v, _)| v.to_owned()),
            dev_scorer: get("dev_scorer").map(|(v, _)| v.to_owned()),
            threshold_src: num(get("threshold_src"), both, err_ref, "threshold_src")?,
            threshold_tgt: num(get("threshold_tgt"), both, err_ref, "threshold_tgt")?,
            order: num(get("order"), 5, err_ref, "order")?,
            wx: num(get("wx"), true, err_ref, "wx")?,
            raw_total: num(get("raw_total"), false, err_ref, "raw_total")?,
            policy: LoopPolicy {
                patience: num(get("patience"), DEFAULT_PATIENCE, err_ref, "patience")?,
                max_iterations: num(get("max_iterations"), 100, err_ref, "max_iterations")?,
                min_delta: num(get("min_delta"), 0.0, err_ref, "min_delta")?,
            },
        };
        for (k, t) in [("threshold_src", config.threshold_src), ("threshold_tgt", config.threshold_tgt)] {
            if !(0.0..=1.0).contains(&t) {
                return Err(err(0, format!("`{k}` = {t} is outside [0, 1]")));
            }
        }
        if config.policy.patience == 0 {
            return Err(err(0, "`patience` must be at least 1".into()));
        }
        if config.order == 0 {
            return Err(err(0, "`order` must be at least 1".into()));
        }
        if !config.timeout.as_secs_f64().is_finite() || config.timeout.is_zero() {
            return Err(err(0, "`timeout` must be positive".into()));
        }
        if config.dev_scorer.is_none() && (config.dev_src.is_none() || config.dev_tgt.is_none()) {
            return Err(err(0, "give `dev_src` and `dev_tgt`, or a `dev_scorer` command".into()));
        }
        Ok(config)
    }
}
