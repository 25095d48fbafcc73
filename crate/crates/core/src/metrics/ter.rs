//! Translation edit rate with greedy block shifts.
//!
//! Each round tries every contiguous hypothesis block of up to
//! [`MAX_SHIFT_LEN`] words at every other position and applies the move that
//! lowers the word edit distance the most; the move itself costs one edit.
//! Rounds stop when no move lowers the distance or after [`MAX_ROUNDS`].

use rayon::prelude::*;

use super::{check_lengths, words, MetricError, MetricReport};

pub const MAX_SHIFT_LEN: usize = 10;
pub const MAX_ROUNDS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EditCounts {
    pub insertions: usize,
    pub deletions: usize,
    pub substitutions: usize,
}

impl EditCounts {
    pub fn total(&self) -> usize {
        self.insertions + self.deletions + self.substitutions
    }
}

/// Word-level Levenshtein distance with its breakdown. Insertions are
/// reference words missing from the hypothesis.
pub fn edit_distance<T: PartialEq>(hyp: &[T], reference: &[T]) -> EditCounts {
    let (n, m) = (hyp.len(), reference.len());
    let w = m + 1;
    let mut d = vec![0usize; (n + 1) * w];
    for i in 0..=n {
        d[i * w] = i;
    }
    for (j, v) in d[..w].iter_mut().enumerate() {
        *v = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub = d[(i - 1) * w + j - 1] + usize::from(hyp[i - 1] != reference[j - 1]);
            d[i * w + j] = sub.min(d[(i - 1) * w + j] + 1).min(d[i * w + j - 1] + 1);
        }
    }
    let mut counts = EditCounts::default();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = d[i * w + j];
        if i > 0 && j > 0 && here == d[(i - 1) * w + j - 1] + usize::from(hyp[i - 1] != reference[j - 1]) {
            if hyp[i - 1] != reference[j - 1] {
                counts.substitutions += 1;
            }
            i -= 1;
            j -= 1;
        } else if i > 0 && here == d[(i - 1) * w + j] + 1 {
            counts.deletions += 1;
            i -= 1;
        } else {
            counts.insertions += 1;
            j -= 1;
        }
    }
    counts
}

fn distance<T: PartialEq>(hyp: &[T], reference: &[T]) -> usize {
    let m = reference.len();
    let mut prev: Vec<usize> = (0..=m).collect();
    let mut cur = vec![0; m + 1];
    for (i, h) in hyp.iter().enumerate() {
        cur[0] = i + 1;
        for j in 1..=m {
            cur[j] = (prev[j - 1] + usize::from(*h != reference[j - 1]))
                .min(prev[j] + 1)
                .min(cur[j - 1] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m]
}

/// Moves `hyp[start..start + len]` so that it begins at `to` in the result.
fn shifted<T: Clone>(hyp: &[T], start: usize, len: usize, to: usize) -> Vec<T> {
    let mut rest: Vec<T> = hyp[..start].iter().chain(&hyp[start + len..]).cloned().collect();
    let block = hyp[start..start + len].to_vec();
    rest.splice(to..to, block);
    rest
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TerStats {
    pub edits: EditCounts,
    pub shifts: usize,
    pub ref_len: usize,
}

impl TerStats {
    pub fn of<T: PartialEq + Clone>(hyp: &[T], reference: &[T]) -> TerStats {
        let mut current = hyp.to_vec();
        let mut cost = distance(&current, reference);
        let mut shifts = 0;
        for _ in 0..MAX_ROUNDS {
            if cost == 0 {
                break;
            }
            let mut best: Option<(usize, Vec<T>)> = None;
            let n = current.len();
            for start in 0..n {
                for len in 1..=MAX_SHIFT_LEN.min(n - start) {
                    for to in 0..=(n - len) {
                        if to == start {
                            continue;
                        }
                        let cand = shifted(&current, start, len, to);
                        let c = distance(&cand, reference);
                        if c < best.as_ref().map_or(cost, |b| b.0) {
                            best = Some((c, cand));
                        }
                    }
                }
            }
            match best {
                Some((c, cand)) => {
                    current = cand;
                    cost = c;
                    shifts += 1;
                }
                None => break,
            }
        }
        TerStats {
            edits: edit_distance(&current, reference),
            shifts,
            ref_len: reference.len(),
        }
    }

    pub fn total(&self) -> usize {
        self.edits.total() + self.shifts
    }

    fn add(mut self, o: TerStats) -> TerStats {
        self.edits.insertions += o.edits.insertions;
        self.edits.deletions += o.edits.deletions;
        self.edits.substitutions += o.edits.substitutions;
        self.shifts += o.shifts;
        self.ref_len += o.ref_len;
        self
    }
}

/// Total edits over total reference words.
pub fn ter<S: AsRef<str> + Sync, R: AsRef<str> + Sync>(
    hypotheses: &[S],
    references: &[R],
) -> Result<MetricReport, MetricError> {
    check_lengths(hypotheses, references)?;
    let stats = hypotheses
        .par_iter()
        .zip(references.par_iter())
        .map(|(h, r)| TerStats::of(&words(h.as_ref()), &words(r.as_ref())))
        .reduce(TerStats::default, TerStats::add);
    if stats.ref_len == 0 {
        return Err(MetricError::EmptyReference);
    }
    let e = stats.edits;
    Ok(MetricReport {
        name: "ter".into(),
        value: stats.total() as f64 / stats.ref_len as f64,
        auxiliary: vec![
            ("insertions".into(), e.insertions as f64),
            ("deletions".into(), e.deletions as f64),
            ("substitutions".into(), e.substitutions as f64),
            ("shifts".into(), stats.shifts as f64),
            ("ref_len".into(), stats.ref_len as f64),
        ],
    })
}
