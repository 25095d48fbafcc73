//! Corpus-level evaluation and relatedness metrics.
//!
//! Every metric takes parallel slices of hypotheses and references and
//! returns a [`MetricReport`]. Sentences are whitespace-tokenized for the
//! word-level metrics; character metrics drop all whitespace first.

mod bleu;
mod chrf;
mod ter;

pub use bleu::{bleu, char_bleu, BleuMode, BleuStats};
pub use chrf::{chrf, chrf_with};
pub use ter::{edit_distance, ter, EditCounts, TerStats};

use crate::corpus::{overlap_vocab, CorpusError, OverlapMode, ParallelCorpus};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricError {
    #[error("{hypotheses} hypotheses but {references} references")]
    LengthMismatch { hypotheses: usize, references: usize },
    #[error("no sentences to evaluate")]
    Empty,
    #[error("references contain no tokens")]
    EmptyReference,
    #[error("{0}")]
    Corpus(String),
}

impl From<CorpusError> for MetricError {
    fn from(e: CorpusError) -> Self {
        MetricError::Corpus(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub name: String,
    pub value: f64,
    /// Named side values: per-order precisions, edit breakdown, lengths.
    pub auxiliary: Vec<(String, f64)>,
}

impl MetricReport {
    pub fn aux(&self, key: &str) -> Option<f64> {
        self.auxiliary.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

impl std::fmt::Display for MetricReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}\t{:.4}", self.name, self.value)?;
        for (k, v) in &self.auxiliary {
            write!(f, "\t{k}={v:.4}")?;
        }
        Ok(())
    }
}

pub(crate) fn check_lengths<S: AsRef<str>, R: AsRef<str>>(
    hypotheses: &[S],
    references: &[R],
) -> Result<(), MetricError> {
    if hypotheses.len() != references.len() {
        return Err(MetricError::LengthMismatch {
            hypotheses: hypotheses.len(),
            references: references.len(),
        });
    }
    if hypotheses.is_empty() {
        return Err(MetricError::Empty);
    }
    Ok(())
}

pub(crate) fn words(s: &str) -> Vec<&str> {
    s.split_whitespace().collect()
}

pub(crate) fn chars(s: &str) -> Vec<char> {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

/// How close the two sides of a parallel corpus are, with the source side
/// in the hypothesis slot.
#[derive(Debug, Clone, PartialEq)]
pub struct Similarity {
    pub char_bleu: MetricReport,
    pub chrf: MetricReport,
    pub ter: MetricReport,
    pub overlapping_words: usize,
}

pub fn similarity(corpus: &ParallelCorpus, wx: bool) -> Result<Similarity, MetricError> {
    let (src, tgt) = if wx {
        (corpus.source_corpus("src").to_wx(), corpus.target_corpus("tgt").to_wx())
    } else {
        (corpus.source_corpus("src"), corpus.target_corpus("tgt"))
    };
    let h = &src.sentences;
    let r = &tgt.sentences;
    // Already encoded, so compare as written.
    let overlap = overlap_vocab(&src, &tgt, OverlapMode::Raw)?;
    Ok(Similarity {
        char_bleu: char_bleu(h, r)?,
        chrf: chrf(h, r)?,
        ter: ter(h, r)?,
        overlapping_words: overlap.count,
    })
}
