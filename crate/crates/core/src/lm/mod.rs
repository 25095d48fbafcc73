//! N-gram language models with interpolated modified Kneser-Ney smoothing.
//!
//! Models are stored in backoff form, one [`SortedTable`] per order, so
//! they read and write as ARPA files and query the way KenLM does: use the
//! longest stored n-gram ending in the word, adding the backoff weights of
//! every longer context that was skipped. All values are log10.
//!
//! `<s>` only ever conditions; `</s>` is always scored. Out-of-vocabulary
//! tokens are scored as `<unk>`.

mod arpa;
mod counts;
mod estimate;
mod table;

pub use arpa::{export_arpa, import_arpa, read_arpa, write_arpa, ArpaError};
pub use counts::{count_ngrams, NGramCounts};
pub use estimate::{estimate_kn, Discount};
pub use table::SortedTable;

use crate::corpus::{MonolingualCorpus, Sentence, Vocabulary, WordId};

/// log10 probability written for `<s>`, which is never predicted.
pub const BOS_LOG10_PROB: f64 = -99.0;

#[derive(Debug, thiserror::Error)]
pub enum LmError {
    #[error("n-gram order must be at least 1, got {0}")]
    InvalidOrder(usize),
    #[error("cannot train or evaluate on an empty corpus")]
    EmptyCorpus,
    #[error(transparent)]
    Arpa(#[from] ArpaError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub log10_prob: f64,
    /// Zero (weight 1) at the highest order and for contexts never extended.
    pub log10_backoff: f64,
}

/// A backoff n-gram model. Immutable once built; share freely across threads.
#[derive(Debug, Clone)]
pub struct NGramModel {
    pub(crate) order: usize,
    pub(crate) vocab: Vocabulary,
    pub(crate) tables: Vec<SortedTable<Entry>>,
    pub(crate) discounts: Vec<Discount>,
    pub(crate) warnings: Vec<String>,
}

/// Log10 probability of one sentence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SentenceScore {
    pub total: f64,
    /// Scored events: every token plus `</s>`.
    pub tokens: usize,
    pub oov: usize,
}

impl SentenceScore {
    pub fn per_token(&self) -> f64 {
        self.total / self.tokens as f64
    }
}

impl NGramModel {
    /// Counts and estimates in one step.
    pub fn train(corpus: &MonolingualCorpus, order: usize) -> Result<NGramModel, LmError> {
        Ok(estimate_kn(&count_ngrams(corpus, order)?))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Discounts per order, empty for models read from ARPA.
    pub fn discounts(&self) -> &[Discount] {
        &self.discounts
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn table(&self, n: usize) -> &SortedTable<Entry> {
        &self.tables[n - 1]
    }

    /// Number of stored n-grams of order `n`.
    pub fn entries(&self, n: usize) -> usize {
        self.tables[n - 1].len()
    }

    /// The stored entry for an n-gram of ids, if any.
    pub fn entry(&self, ngram: &[WordId]) -> Option<&Entry> {
        if ngram.is_empty() || ngram.len() > self.order {
            return None;
        }
        self.tables[ngram.len() - 1].get(ngram)
    }

    fn backoff(&self, context: &[WordId]) -> f64 {
        self.entry(context).map_or(0.0, |e| e.log10_backoff)
    }

    /// log10 p(word | context). Only the last `order - 1` context ids matter.
    pub fn log10_prob_ids(&self, context: &[WordId], word: WordId) -> f64 {
        let keep = context.len().min(self.order - 1);
        let context = &context[context.len() - keep..];
        let mut penalty = 0.0;
        let mut gram = Vec::with_capacity(keep + 1);
        for start in 0..=keep {
            let ctx = &context[start..];
            gram.clear();
            gram.extend_from_slice(ctx);
            gram.push(word);
            if let Some(e) = self.tables[gram.len() - 1].get(&gram) {
                return penalty + e.log10_prob;
            }
            penalty += self.backoff(ctx);
        }
        // Only reachable for ids with no unigram.
        penalty + self.tables[0].get(&[Vocabulary::UNK_ID]).map_or(BOS_LOG10_PROB, |e| e.log10_prob)
    }

    /// log10 p(word | context) with words as strings; markers are spelled `<s>`/`</s>`.
    pub fn log10_prob(&self, context: &[&str], word: &str) -> f64 {
        let ids: Vec<WordId> = context
            .iter()
            .map(|w| self.vocab.get(w).unwrap_or(Vocabulary::UNK_ID))
            .collect();
        let w = if word == crate::corpus::EOS {
            Vocabulary::EOS_ID
        } else {
            self.vocab.token_id(word)
        };
        self.log10_prob_ids(&ids, w)
    }

    pub fn score_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> SentenceScore {
        let mut history = Vec::with_capacity(tokens.len() + 2);
        history.push(Vocabulary::BOS_ID);
        let mut total = 0.0;
        let mut oov = 0;
        for t in tokens {
            let id = self.vocab.token_id(t.as_ref());
            if id == Vocabulary::UNK_ID {
                oov += 1;
            }
            total += self.log10_prob_ids(&history, id);
            history.push(id);
        }
        total += self.log10_prob_ids(&history, Vocabulary::EOS_ID);
        SentenceScore {
            total,
            tokens: tokens.len() + 1,
            oov,
        }
    }

    pub fn score(&self, sentence: &Sentence) -> SentenceScore {
        self.score_tokens(&sentence.token_vec())
    }

    /// `10^(-Σ total / Σ tokens)` over the corpus, end markers included.
    pub fn perplexity(&self, corpus: &MonolingualCorpus) -> Result<f64, LmError> {
        if corpus.is_empty() {
            return Err(LmError::EmptyCorpus);
        }
        let (total, tokens) = corpus.iter().fold((0.0, 0usize), |(t, n), s| {
            let sc = self.score(s);
            (t + sc.total, n + sc.tokens)
        });
        Ok(10f64.powf(-total / tokens as f64))
    }
}

/// Free-function form of [`NGramModel::score`].
pub fn lm_score(model: &NGramModel, sentence: &Sentence) -> SentenceScore {
    model.score(sentence)
}

/// Free-function form of [`NGramModel::perplexity`].
pub fn perplexity(model: &NGramModel, corpus: &MonolingualCorpus) -> Result<f64, LmError> {
    model.perplexity(corpus)
}
