//! Cross-entropy difference baseline: `H_in(s) - H_pool(s)` per token.
//! Lower means more like the in-domain data.

use rayon::prelude::*;

use super::{ScoreOptions, SelectionError};
use crate::corpus::MonolingualCorpus;
use crate::lm::NGramModel;

#[derive(Debug, Clone, PartialEq)]
pub struct MooreLewis {
    /// `(index, score)` in candidate order.
    pub scores: Vec<(usize, f64)>,
    /// Candidate indices from most to least in-domain; ties keep input order.
    pub ranking: Vec<usize>,
}

fn cross_entropy(model: &NGramModel, tokens: &[&str]) -> f64 {
    let s = model.score_tokens(tokens);
    -s.total / s.tokens as f64
}

pub fn moore_lewis_scores(
    in_model: &NGramModel,
    pool_model: &NGramModel,
    candidates: &MonolingualCorpus,
    transliterate: bool,
) -> Result<MooreLewis, SelectionError> {
    if candidates.is_empty() {
        return Err(SelectionError::NoCandidates);
    }
    let options = ScoreOptions {
        transliterate,
        ..ScoreOptions::default()
    };
    let scores: Vec<(usize, f64)> = candidates
        .sentences
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let text = if options.transliterate {
                s.to_wx().text().to_owned()
            } else {
                s.text().to_owned()
            };
            let tokens: Vec<&str> = text.split_whitespace().collect();
            (i, cross_entropy(in_model, &tokens) - cross_entropy(pool_model, &tokens))
        })
        .collect();
    let mut ranking: Vec<usize> = (0..scores.len()).collect();
    ranking.sort_by(|&a, &b| scores[a].1.total_cmp(&scores[b].1).then(a.cmp(&b)));
    Ok(MooreLewis { scores, ranking })
}
