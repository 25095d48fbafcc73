//! Sentence selection by scaled language-model score.
//!
//! Each candidate gets a raw score `L_i` from an in-domain model, and the
//! scores are min-max scaled over the whole candidate pool:
//!
//! ```text
//! SSS(i) = (L_i - min L) / (max L - min L)
//! ```
//!
//! so the most in-domain-like sentence scores 1 and the least scores 0.
//! Sentences at or above a threshold are kept. By default `L_i` is the
//! log10 probability per scored token (end marker included), so long
//! sentences are not penalised merely for being long; [`RawScore::Total`]
//! uses the plain sentence total instead.

mod dassa;
mod moore_lewis;
mod stream;

pub use dassa::{dassa_with_scorers, select_dassa, DassaConfig, DassaOutput, DassaReport};
pub use moore_lewis::{moore_lewis_scores, MooreLewis};
pub use stream::{read_scored_tsv, score_file, write_scored_tsv, ScoreBuffer, StreamSummary};

use rayon::prelude::*;

use crate::corpus::{CorpusError, MonolingualCorpus};
use crate::lm::{LmError, NGramModel, SentenceScore};

/// The threshold used for filtering when none is given.
pub const DEFAULT_THRESHOLD: f64 = 0.8;

#[derive(Debug, thiserror::Error)]
pub enum SelectionError {
    #[error("threshold {0} is outside [0, 1]")]
    Threshold(f64),
    #[error("no candidate sentences to score")]
    NoCandidates,
    #[error("raw score at index {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
    #[error("{0} corpus is empty")]
    EmptyCorpus(&'static str),
    #[error("line {line}: {reason}")]
    ScoredFile { line: usize, reason: String },
    #[error("scored file has {scored} rows but the pool has {pool} pairs")]
    PoolMismatch { scored: usize, pool: usize },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Lm(#[from] LmError),
}

/// Anything that can assign a log10 score to a tokenized sentence.
pub trait SentenceScorer: Sync {
    fn score_tokens(&self, tokens: &[&str]) -> SentenceScore;
}

impl SentenceScorer for NGramModel {
    fn score_tokens(&self, tokens: &[&str]) -> SentenceScore {
        NGramModel::score_tokens(self, tokens)
    }
}

/// Which number stands for a sentence before scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RawScore {
    /// Total log10 probability divided by the number of scored tokens.
    #[default]
    PerToken,
    /// Total log10 probability.
    Total,
}

impl RawScore {
    pub fn of(self, score: &SentenceScore) -> f64 {
        match self {
            RawScore::PerToken => score.per_token(),
            RawScore::Total => score.total,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoreOptions {
    /// WX-encode candidates before scoring. The model must be trained on WX text.
    pub transliterate: bool,
    pub raw: RawScore,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        ScoreOptions {
            transliterate: true,
            raw: RawScore::PerToken,
        }
    }
}

impl ScoreOptions {
    /// Raw score of one line of text.
    pub fn raw_score<S: SentenceScorer + ?Sized>(&self, scorer: &S, text: &str) -> f64 {
        let encoded;
        let text = if self.transliterate {
            encoded = crate::translit::to_wx(text);
            encoded.as_str()
        } else {
            text
        };
        let tokens: Vec<&str> = text.split_whitespace().collect();
        self.raw.of(&scorer.score_tokens(&tokens))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredSentence {
    pub index: usize,
    pub raw: f64,
    pub sss: f64,
}

/// The outcome of scaling one pool of raw scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoringRun {
    pub scores: Vec<ScoredSentence>,
    pub min: f64,
    pub max: f64,
    /// Set when every raw score was equal and all SSS were forced to 1.
    pub degenerate: bool,
    pub warnings: Vec<String>,
}

impl ScoringRun {
    pub fn sss(&self) -> Vec<f64> {
        self.scores.iter().map(|s| s.sss).collect()
    }
}

/// Min-max scaling of one value given the pool's extrema.
#[inline]
pub fn scale(raw: f64, min: f64, max: f64) -> f64 {
    if max == min {
        1.0
    } else {
        (raw - min) / (max - min)
    }
}

/// Scales raw scores to [0, 1]. An all-equal pool maps to 1.0 everywhere
/// and carries a warning.
pub fn scale_scores(raw: &[f64]) -> Result<ScoringRun, SelectionError> {
    if raw.is_empty() {
        return Err(SelectionError::NoCandidates);
    }
    if let Some((index, &value)) = raw.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(SelectionError::NonFinite { index, value });
    }
    let (min, max) = raw
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let degenerate = min == max;
    let mut warnings = Vec::new();
    if degenerate {
        let msg = format!("all {} raw scores equal {min}; every SSS set to 1.0", raw.len());
        log::warn!("{msg}");
        warnings.push(msg);
    }
    let scores = raw
        .iter()
        .enumerate()
        .map(|(index, &r)| ScoredSentence {
            index,
            raw: r,
            sss: scale(r, min, max),
        })
        .collect();
    Ok(ScoringRun {
        scores,
        min,
        max,
        degenerate,
        warnings,
    })
}

/// Raw scores of every candidate, in candidate order. Runs on the rayon pool.
pub fn raw_scores<S: SentenceScorer + ?Sized>(
    scorer: &S,
    candidates: &MonolingualCorpus,
    options: ScoreOptions,
) -> Vec<f64> {
    candidates
        .sentences
        .par_iter()
        .map(|s| options.raw_score(scorer, s.text()))
        .collect()
}

/// Scores and scales a candidate corpus.
pub fn sss_scores<S: SentenceScorer + ?Sized>(
    scorer: &S,
    candidates: &MonolingualCorpus,
    options: ScoreOptions,
) -> Result<ScoringRun, SelectionError> {
    if candidates.is_empty() {
        return Err(SelectionError::NoCandidates);
    }
    scale_scores(&raw_scores(scorer, candidates, options))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Source,
    Target,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Source => "source",
            Side::Target => "target",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    /// Strictly increasing.
    pub kept: Vec<usize>,
    pub threshold: f64,
    pub side: Side,
    pub min: f64,
    pub max: f64,
}

pub fn check_threshold(threshold: f64) -> Result<f64, SelectionError> {
    if (0.0..=1.0).contains(&threshold) {
        Ok(threshold)
    } else {
        Err(SelectionError::Threshold(threshold))
    }
}

/// Keeps every index with `sss >= threshold`.
pub fn filter_by_threshold(
    run: &ScoringRun,
    threshold: f64,
    side: Side,
) -> Result<SelectionResult, SelectionError> {
    check_threshold(threshold)?;
    Ok(SelectionResult {
        kept: run
            .scores
            .iter()
            .filter(|s| s.sss >= threshold)
            .map(|s| s.index)
            .collect(),
        threshold,
        side,
        min: run.min,
        max: run.max,
    })
}
