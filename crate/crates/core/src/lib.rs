//! Corpus selection for related-language machine translation.
//!
//! The pipeline: transliterate text to WX ([`translit`]), train a modified
//! Kneser-Ney n-gram model on in-domain data ([`lm`]), score and min-max
//! scale candidate sentences, keep those above a threshold ([`selection`]),
//! and wrap the same filter around iterative back-translation ([`ibt`]).
//! [`metrics`] provides BLEU, chrF, TER and friends for evaluation and for
//! measuring how close two languages are.

pub mod corpus;
pub mod translit;
pub mod lm;
pub mod selection;
pub mod metrics;
pub mod ibt;
pub mod cli;

/// The guide's code samples, compiled and run as doctests.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../README.md")]
    pub mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/transliteration.md")]
    pub mod transliteration {}
    #[doc = include_str!("../../../book/src/language-model.md")]
    pub mod language_model {}
    #[doc = include_str!("../../../book/src/scaled-similarity.md")]
    pub mod scaled_similarity {}
    #[doc = include_str!("../../../book/src/bidirectional-selection.md")]
    pub mod bidirectional_selection {}
    #[doc = include_str!("../../../book/src/back-translation.md")]
    pub mod back_translation {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    pub mod metrics {}
    #[doc = include_str!("../../../book/src/command-line.md")]
    pub mod command_line {}
}
