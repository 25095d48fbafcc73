#![allow(dead_code)]

pub mod kn_oracle;
pub mod scorers;

use std::collections::HashSet;

use lingsel::corpus::MonolingualCorpus;
use lingsel::lm::NGramModel;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Up to `max_sentences` sentences of 0..=7 words over `vocab` word types.
pub fn random_corpus(rng: &mut ChaCha8Rng, max_sentences: usize, vocab: usize) -> Vec<String> {
    let words: Vec<String> = (0..vocab).map(|i| format!("w{i}")).collect();
    let n = rng.gen_range(1..=max_sentences);
    (0..n)
        .map(|_| {
            let len = rng.gen_range(0..=7);
            (0..len)
                .map(|_| words.choose(rng).unwrap().as_str())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

fn words(m: &NGramModel, key: &[u32]) -> Vec<String> {
    key.iter().map(|&id| m.vocab().word(id).to_string()).collect()
}

/// Every stored probability and backoff against the oracle; returns entries checked.
pub fn check_against_oracle(lines: &[&str], order: usize) -> usize {
    let m = NGramModel::train(&MonolingualCorpus::from_lines("x", lines).unwrap(), order).unwrap();
    let oracle = kn_oracle::KnOracle::new(lines, order);
    let mut checked = 0;
    for n in 1..=order {
        let expected: HashSet<Vec<String>> = oracle.occurring(n);
        let mut seen = HashSet::new();
        for (key, e) in m.table(n).iter() {
            let g = words(&m, key);
            if n == 1 && (g[0] == "<s>" || g[0] == "<unk>") {
                if g[0] == "<unk>" {
                    let p = oracle.prob(&[], "<unk>").log10();
                    assert!((e.log10_prob - p).abs() < 1e-9);
                } else {
                    let b = oracle.log_backoff(&g);
                    assert!((e.log10_backoff - b).abs() < 1e-9);
                }
                checked += 1;
                continue;
            }
            assert!(expected.contains(&g), "unexpected n-gram {g:?}");
            seen.insert(g.clone());
            let p = oracle.prob(&g[..n - 1], &g[n - 1]).log10();
            assert!((e.log10_prob - p).abs() < 1e-9, "{g:?}: {} vs {p}", e.log10_prob);
            if n < order {
                let b = oracle.log_backoff(&g);
                assert!((e.log10_backoff - b).abs() < 1e-9, "bow {g:?}: {} vs {b}", e.log10_backoff);
            }
            checked += 1;
        }
        assert_eq!(seen.len(), expected.len(), "order {n} entry set");
    }
    for (n, d) in m.discounts().iter().enumerate() {
        let o = oracle.discounts(n + 1);
        assert!((d.d1 - o[0]).abs() < 1e-12);
        assert!((d.d2 - o[1]).abs() < 1e-12);
        assert!((d.d3_plus - o[2]).abs() < 1e-12);
    }
    checked
}
