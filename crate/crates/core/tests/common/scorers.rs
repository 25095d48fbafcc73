use std::collections::HashMap;

use lingsel::lm::SentenceScore;
use lingsel::selection::SentenceScorer;

/// Assigns fixed per-token scores to known sentences. Unknown sentences panic.
pub struct TableScorer(pub HashMap<String, f64>);

impl TableScorer {
    pub fn new(entries: &[(&str, f64)]) -> Self {
        TableScorer(entries.iter().map(|(s, v)| (s.to_string(), *v)).collect())
    }
}

impl SentenceScorer for TableScorer {
    fn score_tokens(&self, tokens: &[&str]) -> SentenceScore {
        let key = tokens.join(" ");
        let v = *self.0.get(&key).unwrap_or_else(|| panic!("no score for {key:?}"));
        // One scored token keeps the per-token value exact.
        SentenceScore { total: v, tokens: 1, oov: 0 }
    }
}
