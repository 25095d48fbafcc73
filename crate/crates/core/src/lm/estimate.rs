//! Interpolated modified Kneser-Ney estimation.
//!
//! For an n-gram `h w` with adjusted count `a`, context total `A(h)` and
//! order-n discounts `D(a)`:
//!
//! ```text
//! p(w | h) = max(a - D(a), 0) / A(h) + γ(h) · p(w | h')
//! γ(h)     = (D₁·N₁(h•) + D₂·N₂(h•) + D₃₊·N₃₊(h•)) / A(h)
//! ```
//!
//! where `h'` drops the oldest word of `h` and the recursion ends in the
//! uniform distribution over every predictable type (words, `</s>`,
//! `<unk>`). `<unk>` has no count, so it receives only its share of the
//! unigram interpolation mass. Because an unseen `w` gets exactly
//! `γ(h) · p(w | h')`, `γ(h)` is the backoff weight in ARPA form.

use super::counts::NGramCounts;
use super::table::SortedTable;
use super::{Entry, NGramModel, BOS_LOG10_PROB};
use crate::corpus::{Vocabulary, WordId};

const FALLBACK_DISCOUNT: f64 = 0.5;

/// The three discounts of one order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discount {
    pub d1: f64,
    pub d2: f64,
    pub d3_plus: f64,
    /// True when counts-of-counts were degenerate and 0.5 was used throughout.
    pub fallback: bool,
}

impl Discount {
    /// Chen-Goodman estimates from `[n_1, n_2, n_3, n_4]`, each clamped to
    /// `[0, k]`. Falls back to 0.5 everywhere if a count-of-count needed as a
    /// divisor is zero or an estimate comes out non-positive.
    pub fn from_counts_of_counts(n: [u64; 4]) -> Discount {
        let [n1, n2, n3, n4] = n.map(|v| v as f64);
        if n1 == 0.0 || n2 == 0.0 || n3 == 0.0 {
            return Self::fallback();
        }
        let y = n1 / (n1 + 2.0 * n2);
        let d = [
            1.0 - 2.0 * y * n2 / n1,
            2.0 - 3.0 * y * n3 / n2,
            3.0 - 4.0 * y * n4 / n3,
        ];
        // A zero discount can leave a context with no backoff mass at all.
        if d.iter().any(|&v| v <= 0.0) {
            return Self::fallback();
        }
        Discount {
            d1: d[0].clamp(0.0, 1.0),
            d2: d[1].clamp(0.0, 2.0),
            d3_plus: d[2].clamp(0.0, 3.0),
            fallback: false,
        }
    }

    fn fallback() -> Discount {
        Discount {
            d1: FALLBACK_DISCOUNT,
            d2: FALLBACK_DISCOUNT,
            d3_plus: FALLBACK_DISCOUNT,
            fallback: true,
        }
    }

    pub fn for_count(&self, count: u64) -> f64 {
        match count {
            0 => 0.0,
            1 => self.d1,
            2 => self.d2,
            _ => self.d3_plus,
        }
    }
}

/// Turns adjusted counts into a backoff-form model.
pub fn estimate_kn(counts: &NGramCounts) -> NGramModel {
    let order = counts.order;
    let vocab = counts.vocab.clone();
    // Everything except <s> can be predicted.
    let predictable = (vocab.len() - 1) as f64;
    let mut warnings = Vec::new();
    let mut discounts = Vec::with_capacity(order);
    let mut tables: Vec<SortedTable<Entry>> = Vec::with_capacity(order);

    for n in 1..=order {
        let table = counts.table(n);
        let discount = Discount::from_counts_of_counts(counts.counts_of_counts(n));
        if discount.fallback {
            let msg = format!(
                "order {n}: degenerate counts-of-counts {:?}, using discount {FALLBACK_DISCOUNT}",
                counts.counts_of_counts(n)
            );
            log::warn!("{msg}");
            warnings.push(msg);
        }
        discounts.push(discount);

        let mut entries: Vec<(Vec<WordId>, Entry)> = Vec::with_capacity(table.len() + 2);
        let mut unigram_gamma = 0.0;
        let mut start = 0;
        while start < table.len() {
            let context = &table.key(start)[..n - 1];
            let mut end = start;
            let mut total = 0.0;
            let mut mass = 0.0;
            while end < table.len() && &table.key(end)[..n - 1] == context {
                let a = *table.value(end);
                total += a as f64;
                mass += discount.for_count(a);
                end += 1;
            }
            let gamma = mass / total;
            for i in start..end {
                let key = table.key(i);
                let a = *table.value(i);
                let lower = if n == 1 {
                    1.0 / predictable
                } else {
                    let lower_key = &key[1..];
                    let entry = tables[n - 2]
                        .get(lower_key)
                        .expect("suffix of a counted n-gram is counted");
                    10f64.powf(entry.log10_prob)
                };
                let p = (a as f64 - discount.for_count(a)).max(0.0) / total + gamma * lower;
                entries.push((
                    key.to_vec(),
                    Entry {
                        log10_prob: p.log10(),
                        log10_backoff: 0.0,
                    },
                ));
            }
            if n == 1 {
                unigram_gamma = gamma;
            } else {
                let idx = tables[n - 2]
                    .find(context)
                    .expect("prefix of a counted n-gram is counted");
                tables[n - 2].value_mut(idx).log10_backoff = gamma.log10();
            }
            start = end;
        }

        if n == 1 {
            entries.push((
                vec![Vocabulary::UNK_ID],
                Entry {
                    log10_prob: (unigram_gamma / predictable).log10(),
                    log10_backoff: 0.0,
                },
            ));
            entries.push((
                vec![Vocabulary::BOS_ID],
                Entry {
                    log10_prob: BOS_LOG10_PROB,
                    log10_backoff: 0.0,
                },
            ));
        }
        tables.push(SortedTable::from_entries(n, entries));
    }

    NGramModel {
        order,
        vocab,
        tables,
        discounts,
        warnings,
    }
}
