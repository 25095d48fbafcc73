use std::collections::HashMap;
use std::hash::Hash;

use rayon::prelude::*;

use super::{check_lengths, chars, words, MetricError, MetricReport};

const MAX_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BleuMode {
    /// Geometric mean of the four precisions times `exp(1 - r/c)` when `c < r`.
    #[default]
    Standard,
    /// `min(1, c/r)` times the plain product of the four precisions.
    Product,
}

/// Clipped match and candidate counts per order, plus lengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BleuStats {
    pub matches: [u64; MAX_ORDER],
    pub totals: [u64; MAX_ORDER],
    pub hyp_len: u64,
    pub ref_len: u64,
}

impl BleuStats {
    pub fn of<T: Hash + Eq>(hyp: &[T], reference: &[T]) -> BleuStats {
        let mut s = BleuStats {
            hyp_len: hyp.len() as u64,
            ref_len: reference.len() as u64,
            ..BleuStats::default()
        };
        for n in 1..=MAX_ORDER {
            if hyp.len() < n {
                continue;
            }
            let mut ref_counts: HashMap<&[T], u64> = HashMap::new();
            for g in reference.windows(n) {
                *ref_counts.entry(g).or_default() += 1;
            }
            let mut hyp_counts: HashMap<&[T], u64> = HashMap::new();
            for g in hyp.windows(n) {
                *hyp_counts.entry(g).or_default() += 1;
            }
            s.totals[n - 1] = (hyp.len() + 1 - n) as u64;
            s.matches[n - 1] = hyp_counts
                .iter()
                .map(|(g, &c)| c.min(ref_counts.get(g).copied().unwrap_or(0)))
                .sum();
        }
        s
    }

    fn add(mut self, o: BleuStats) -> BleuStats {
        for n in 0..MAX_ORDER {
            self.matches[n] += o.matches[n];
            self.totals[n] += o.totals[n];
        }
        self.hyp_len += o.hyp_len;
        self.ref_len += o.ref_len;
        self
    }

    /// Precision per order; an order with no candidate n-grams has precision 0.
    pub fn precisions(&self) -> [f64; MAX_ORDER] {
        std::array::from_fn(|n| {
            if self.totals[n] == 0 {
                0.0
            } else {
                self.matches[n] as f64 / self.totals[n] as f64
            }
        })
    }

    pub fn brevity_penalty(&self, mode: BleuMode) -> f64 {
        let (c, r) = (self.hyp_len as f64, self.ref_len as f64);
        match mode {
            _ if c == 0.0 => 0.0,
            BleuMode::Standard if c < r => (1.0 - r / c).exp(),
            BleuMode::Standard => 1.0,
            BleuMode::Product => (c / r).min(1.0),
        }
    }

    pub fn score(&self, mode: BleuMode) -> f64 {
        let p = self.precisions();
        if p.contains(&0.0) {
            return 0.0;
        }
        let bp = self.brevity_penalty(mode);
        match mode {
            BleuMode::Standard => bp * (p.iter().map(|x| x.ln()).sum::<f64>() / MAX_ORDER as f64).exp(),
            BleuMode::Product => bp * p.iter().product::<f64>(),
        }
    }
}

fn corpus_stats<F>(hypotheses: &[&str], references: &[&str], pair: F) -> BleuStats
where
    F: Fn(&str, &str) -> BleuStats + Sync,
{
    hypotheses
        .par_iter()
        .zip(references.par_iter())
        .map(|(h, r)| pair(h, r))
        .reduce(BleuStats::default, BleuStats::add)
}

fn report(name: &str, stats: &BleuStats, mode: BleuMode) -> MetricReport {
    let mut auxiliary: Vec<(String, f64)> = stats
        .precisions()
        .iter()
        .enumerate()
        .map(|(n, &p)| (format!("p{}", n + 1), p))
        .collect();
    auxiliary.push(("bp".into(), stats.brevity_penalty(mode)));
    auxiliary.push(("hyp_len".into(), stats.hyp_len as f64));
    auxiliary.push(("ref_len".into(), stats.ref_len as f64));
    MetricReport {
        name: name.into(),
        value: stats.score(mode),
        auxiliary,
    }
}

fn as_strs<S: AsRef<str>>(v: &[S]) -> Vec<&str> {
    v.iter().map(AsRef::as_ref).collect()
}

/// Corpus BLEU over whitespace tokens.
pub fn bleu<S: AsRef<str>, R: AsRef<str>>(
    hypotheses: &[S],
    references: &[R],
    mode: BleuMode,
) -> Result<MetricReport, MetricError> {
    check_lengths(hypotheses, references)?;
    let stats = corpus_stats(&as_strs(hypotheses), &as_strs(references), |h, r| {
        BleuStats::of(&words(h), &words(r))
    });
    let name = match mode {
        BleuMode::Standard => "bleu",
        BleuMode::Product => "bleu-product",
    };
    Ok(report(name, &stats, mode))
}

/// Standard BLEU with each sentence read as a sequence of non-space characters.
pub fn char_bleu<S: AsRef<str>, R: AsRef<str>>(
    hypotheses: &[S],
    references: &[R],
) -> Result<MetricReport, MetricError> {
    check_lengths(hypotheses, references)?;
    let stats = corpus_stats(&as_strs(hypotheses), &as_strs(references), |h, r| {
        BleuStats::of(&chars(h), &chars(r))
    });
    Ok(report("char-bleu", &stats, BleuMode::Standard))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity() {
        let x = ["a b c d e", "f g h i"];
        assert_eq!(bleu(&x, &x, BleuMode::Standard).unwrap().value, 1.0);
        assert_eq!(bleu(&x, &x, BleuMode::Product).unwrap().value, 1.0);
        assert_eq!(char_bleu(&x, &x).unwrap().value, 1.0);
    }

    #[test]
    fn product_length_ratio() {
        let r = bleu(&["a b c d"], &["a b c d e"], BleuMode::Product).unwrap();
        assert_eq!(r.value, 0.8);
        let s = bleu(&["a b c d"], &["a b c d e"], BleuMode::Standard).unwrap();
        assert!((s.value - (-0.25f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn short_hypothesis_zeroes_high_orders() {
        let r = char_bleu(&["ab"], &["abc"]).unwrap();
        assert_eq!(r.aux("p1"), Some(1.0));
        assert_eq!(r.aux("p2"), Some(1.0));
        assert_eq!(r.aux("p3"), Some(0.0));
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn clipping() {
        let s = BleuStats::of(&["the", "the", "the"], &["the", "cat"]);
        assert_eq!(s.matches[0], 1);
        assert_eq!(s.totals[0], 3);
    }

    #[test]
    fn errors() {
        assert_eq!(
            bleu(&["a"], &["a", "b"], BleuMode::Standard),
            Err(MetricError::LengthMismatch { hypotheses: 1, references: 2 })
        );
        let empty: [&str; 0] = [];
        assert_eq!(bleu(&empty, &empty, BleuMode::Standard), Err(MetricError::Empty));
    }
}
