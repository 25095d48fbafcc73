use std::collections::HashMap;

use super::table::SortedTable;
use super::LmError;
use crate::corpus::{MonolingualCorpus, Vocabulary, WordId};

/// Adjusted n-gram counts for Kneser-Ney estimation.
///
/// The top order and every `<s>`-initial n-gram keep their raw count. Every
/// other lower-order n-gram counts the distinct words seen to its left.
#[derive(Debug, Clone)]
pub struct NGramCounts {
    pub(crate) order: usize,
    pub(crate) vocab: Vocabulary,
    pub(crate) adjusted: Vec<SortedTable<u64>>,
    pub(crate) sentences: usize,
}

impl NGramCounts {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn sentences(&self) -> usize {
        self.sentences
    }

    fn ids(&self, words: &[&str]) -> Option<Vec<WordId>> {
        words.iter().map(|w| self.vocab.get(w)).collect()
    }

    /// Adjusted count of an n-gram given as words (markers written `<s>`, `</s>`).
    pub fn count(&self, words: &[&str]) -> u64 {
        let n = words.len();
        if n == 0 || n > self.order {
            return 0;
        }
        self.ids(words)
            .and_then(|ids| self.adjusted[n - 1].get(&ids).copied())
            .unwrap_or(0)
    }

    /// Number of distinct words that follow `context` in the next order's table.
    pub fn distinct_successors(&self, context: &[&str]) -> usize {
        let n = context.len() + 1;
        if n > self.order {
            return 0;
        }
        match self.ids(context) {
            Some(ids) => self.adjusted[n - 1].prefix_range(&ids).len(),
            None => 0,
        }
    }

    /// `[n_1, n_2, n_3, n_4]` for order `n`: how many n-grams have adjusted count 1..=4.
    pub fn counts_of_counts(&self, n: usize) -> [u64; 4] {
        let mut out = [0u64; 4];
        for &c in self.adjusted[n - 1].values() {
            if (1..=4).contains(&c) {
                out[c as usize - 1] += 1;
            }
        }
        out
    }

    pub fn table(&self, n: usize) -> &SortedTable<u64> {
        &self.adjusted[n - 1]
    }

    pub fn entries(&self, n: usize) -> usize {
        self.adjusted[n - 1].len()
    }
}

/// Counts n-grams up to `order` over `<s> w_1 .. w_k </s>` for each sentence.
pub fn count_ngrams(corpus: &MonolingualCorpus, order: usize) -> Result<NGramCounts, LmError> {
    if order < 1 {
        return Err(LmError::InvalidOrder(order));
    }
    if corpus.is_empty() {
        return Err(LmError::EmptyCorpus);
    }
    let vocab = Vocabulary::from_words(corpus.iter().flat_map(|s| s.tokens()));

    // Raw counts of the longest n-gram ending at every predicted position.
    let mut maps: Vec<HashMap<Vec<WordId>, u64>> = vec![HashMap::new(); order];
    let mut ids = Vec::new();
    for sentence in corpus.iter() {
        ids.clear();
        ids.push(Vocabulary::BOS_ID);
        ids.extend(sentence.tokens().map(|w| vocab.get(w).expect("word in vocabulary")));
        ids.push(Vocabulary::EOS_ID);
        for i in 1..ids.len() {
            let n = order.min(i + 1);
            *maps[n - 1].entry(ids[i + 1 - n..=i].to_vec()).or_default() += 1;
        }
    }

    // Continuation counts flow downwards: each distinct (n+1)-gram adds one
    // left extension to its suffix.
    for n in (1..order).rev() {
        let (lower, upper) = maps.split_at_mut(n);
        let higher = &upper[0];
        let target = &mut lower[n - 1];
        for gram in higher.keys() {
            debug_assert_ne!(gram[1], Vocabulary::BOS_ID);
            *target.entry(gram[1..].to_vec()).or_default() += 1;
        }
    }

    let adjusted = maps
        .into_iter()
        .enumerate()
        .map(|(i, m)| SortedTable::from_entries(i + 1, m.into_iter().collect()))
        .collect();
    Ok(NGramCounts {
        order,
        vocab,
        adjusted,
        sentences: corpus.len(),
    })
}
