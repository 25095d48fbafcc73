//! Iterative back-translation with scaled-score filtering.
//!
//! Each iteration translates the source monolingual corpus with the
//! source→target translator and the target monolingual corpus with the
//! target→source one. Translations whose SSS under the matching in-domain
//! model clears the threshold are paired with their originals and appended
//! to the in-domain corpus, giving fresh training corpora for both
//! directions. Retraining happens outside, through a hook; the loop stops
//! once the dev score has failed to improve for `patience` iterations.
//!
//! Synthetic pairs are rebuilt from the original in-domain corpus every
//! iteration rather than accumulated.

mod config;
mod run;
mod translator;

pub use config::IbtConfig;
pub use run::{ibt_run, IbtRun, ShellHooks};
pub use translator::{DirectoryTranslator, Direction, ProcessTranslator, Translator};

use std::io::Write;

use crate::corpus::{combine_domains, CorpusError, MonolingualCorpus, ParallelCorpus, Sentence};
use crate::lm::LmError;
use crate::metrics::MetricError;
use crate::selection::{
    check_threshold, filter_by_threshold, sss_scores, ScoreOptions, SelectionError,
    SentenceScorer, Side,
};

/// Iterations without improvement before stopping.
pub const DEFAULT_PATIENCE: usize = 10;

#[derive(Debug, thiserror::Error)]
pub enum IbtError {
    #[error("cannot start `{command}`: {source}")]
    Spawn {
        command: String,
        source: std::io::Error,
    },
    #[error("`{command}` exited with {status}: {stderr}")]
    Exit {
        command: String,
        status: String,
        stderr: String,
    },
    #[error("`{command}` timed out after {seconds} s")]
    Timeout { command: String, seconds: f64 },
    #[error("translator `{translator}` returned {received} lines for {sent} inputs")]
    LineCount {
        translator: String,
        sent: usize,
        received: usize,
    },
    #[error("`{command}`: {reason}")]
    Output { command: String, reason: String },
    #[error("{path}:{line}: {reason}")]
    Config {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("iteration {iteration}: {source}")]
    Iteration {
        iteration: usize,
        source: Box<IbtError>,
    },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error(transparent)]
    Lm(#[from] LmError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

#[derive(Debug, Clone)]
pub struct IbtState {
    pub iteration: usize,
    pub history: Vec<f64>,
    /// Highest dev score so far; `None` before the first evaluation.
    pub best: Option<f64>,
    /// Iterations since `best` last improved.
    pub stall: usize,
    /// In-domain plus synthetic pairs for source→target training.
    pub forward: ParallelCorpus,
    /// In-domain plus synthetic pairs for target→source training.
    pub backward: ParallelCorpus,
}

impl IbtState {
    pub fn new(in_domain: &ParallelCorpus) -> Self {
        IbtState {
            iteration: 0,
            history: Vec::new(),
            best: None,
            stall: 0,
            forward: in_domain.clone(),
            backward: in_domain.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convergence {
    Continue,
    Converged,
}

/// Records a dev score. A score improves only if it exceeds the best so far
/// by more than `min_delta`; the first score always improves. A patience
/// of 0 is treated as 1.
pub fn convergence_check(
    state: &mut IbtState,
    score: f64,
    patience: usize,
    min_delta: f64,
) -> Convergence {
    state.history.push(score);
    match state.best {
        Some(best) if score <= best + min_delta => state.stall += 1,
        _ => {
            state.best = Some(score);
            state.stall = 0;
        }
    }
    if state.stall >= patience.max(1) {
        Convergence::Converged
    } else {
        Convergence::Continue
    }
}

/// Everything one iteration reads.
pub struct IbtInputs<'a> {
    pub in_domain: &'a ParallelCorpus,
    pub mono_src: &'a MonolingualCorpus,
    pub mono_tgt: &'a MonolingualCorpus,
    pub lm_src: &'a dyn SentenceScorer,
    pub lm_tgt: &'a dyn SentenceScorer,
    pub forward: &'a dyn Translator,
    pub backward: &'a dyn Translator,
    pub threshold_src: f64,
    pub threshold_tgt: f64,
    pub scoring: ScoreOptions,
}

/// What one iteration kept. Indices point into the monolingual corpora.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    pub iteration: usize,
    /// Indices of `mono_tgt` whose translation into the source language was kept.
    pub kept_src: Vec<usize>,
    /// Indices of `mono_src` whose translation into the target language was kept.
    pub kept_tgt: Vec<usize>,
    pub warnings: Vec<String>,
}

fn translate_corpus(
    t: &dyn Translator,
    corpus: &MonolingualCorpus,
) -> Result<Vec<Sentence>, IbtError> {
    if corpus.is_empty() {
        return Ok(Vec::new());
    }
    let lines: Vec<String> = corpus.iter().map(|s| s.text().to_owned()).collect();
    let out = t.translate(&lines)?;
    translator::check_count("translator", lines.len(), out.len())?;
    out.iter()
        .map(|l| Sentence::new(l).map_err(IbtError::from))
        .collect()
}

fn filter_side(
    scorer: &dyn SentenceScorer,
    translated: &[Sentence],
    threshold: f64,
    side: Side,
    scoring: ScoreOptions,
    warnings: &mut Vec<String>,
) -> Result<Vec<usize>, IbtError> {
    if translated.is_empty() {
        return Ok(Vec::new());
    }
    let run = sss_scores(scorer, &MonolingualCorpus::new(side.to_string(), translated.to_vec()), scoring)?;
    warnings.extend(run.warnings.iter().cloned());
    Ok(filter_by_threshold(&run, threshold, side)?.kept)
}

/// One round of translate, score, filter and concatenate.
pub fn ibt_iterate(state: &mut IbtState, inputs: &IbtInputs) -> Result<IterationReport, IbtError> {
    check_threshold(inputs.threshold_src)?;
    check_threshold(inputs.threshold_tgt)?;
    let (m_s, m_t) = rayon::join(
        || translate_corpus(inputs.backward, inputs.mono_tgt),
        || translate_corpus(inputs.forward, inputs.mono_src),
    );
    let (m_s, m_t) = (m_s?, m_t?);
    let mut warnings = Vec::new();
    let kept_src = filter_side(inputs.lm_src, &m_s, inputs.threshold_src, Side::Source, inputs.scoring, &mut warnings)?;
    let kept_tgt = filter_side(inputs.lm_tgt, &m_t, inputs.threshold_tgt, Side::Target, inputs.scoring, &mut warnings)?;

    let synthetic_s: Vec<Sentence> = kept_src.iter().map(|&j| m_s[j].clone()).collect();
    let originals_t: Vec<Sentence> = kept_src.iter().map(|&j| inputs.mono_tgt.sentences[j].clone()).collect();
    let originals_s: Vec<Sentence> = kept_tgt.iter().map(|&j| inputs.mono_src.sentences[j].clone()).collect();
    let synthetic_t: Vec<Sentence> = kept_tgt.iter().map(|&j| m_t[j].clone()).collect();
    let sn_s = ParallelCorpus::new("synthetic-s", synthetic_s, originals_t)?;
    let sn_t = ParallelCorpus::new("synthetic-t", originals_s, synthetic_t)?;

    state.iteration += 1;
    let name = &inputs.in_domain.name;
    state.forward = combine_domains(&[inputs.in_domain.clone(), sn_s], &format!("{name}.ibt{}.s2t", state.iteration))?;
    state.backward = combine_domains(&[inputs.in_domain.clone(), sn_t], &format!("{name}.ibt{}.t2s", state.iteration))?;
    Ok(IterationReport {
        iteration: state.iteration,
        kept_src,
        kept_tgt,
        warnings,
    })
}

/// Retraining and dev evaluation, supplied by the caller.
pub trait IbtHooks {
    fn retrain(&mut self, state: &IbtState) -> Result<(), IbtError>;
    fn evaluate(&mut self, state: &IbtState) -> Result<f64, IbtError>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopPolicy {
    pub patience: usize,
    pub max_iterations: usize,
    pub min_delta: f64,
}

impl Default for LoopPolicy {
    fn default() -> Self {
        LoopPolicy {
            patience: DEFAULT_PATIENCE,
            max_iterations: 100,
            min_delta: 0.0,
        }
    }
}

/// One line of the run log.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRecord {
    pub iteration: usize,
    pub kept_src: usize,
    pub kept_tgt: usize,
    pub size_forward: usize,
    pub size_backward: usize,
    pub mono_src: usize,
    pub mono_tgt: usize,
    pub dev_score: f64,
    pub stall: usize,
}

impl std::fmt::Display for LogRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let ratio = |k: usize, n: usize| if n == 0 { 0.0 } else { k as f64 / n as f64 };
        write!(
            f,
            "iteration={} kept_src={} kept_tgt={} kept_ratio_src={:.6} kept_ratio_tgt={:.6} size_idp1={} size_idp2={} dev_score={:.6} stall={}",
            self.iteration,
            self.kept_src,
            self.kept_tgt,
            ratio(self.kept_src, self.mono_tgt),
            ratio(self.kept_tgt, self.mono_src),
            self.size_forward,
            self.size_backward,
            self.dev_score,
            self.stall
        )
    }
}

/// Runs iterations until convergence or the cap. Each record is written to
/// `log` as soon as its iteration finishes, so a failure keeps the earlier
/// lines. Hook and translator errors are wrapped with the iteration number.
pub fn ibt_loop(
    inputs: &IbtInputs,
    policy: &LoopPolicy,
    hooks: &mut dyn IbtHooks,
    log: &mut dyn Write,
) -> Result<(IbtState, Vec<LogRecord>), IbtError> {
    let mut state = IbtState::new(inputs.in_domain);
    let mut records = Vec::new();
    while state.iteration < policy.max_iterations {
        let iteration = state.iteration + 1;
        let wrap = |source: IbtError| IbtError::Iteration {
            iteration,
            source: Box::new(source),
        };
        let report = ibt_iterate(&mut state, inputs).map_err(wrap)?;
        hooks.retrain(&state).map_err(wrap)?;
        let score = hooks.evaluate(&state).map_err(wrap)?;
        let verdict = convergence_check(&mut state, score, policy.patience, policy.min_delta);
        let record = LogRecord {
            iteration,
            kept_src: report.kept_src.len(),
            kept_tgt: report.kept_tgt.len(),
            size_forward: state.forward.len(),
            size_backward: state.backward.len(),
            mono_src: inputs.mono_src.len(),
            mono_tgt: inputs.mono_tgt.len(),
            dev_score: score,
            stall: state.stall,
        };
        writeln!(log, "{record}")?;
        log.flush()?;
        log::info!("{record}");
        records.push(record);
        if verdict == Convergence::Converged {
            break;
        }
    }
    Ok((state, records))
}
