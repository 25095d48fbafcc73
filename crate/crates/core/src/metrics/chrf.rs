use std::collections::HashMap;

use rayon::prelude::*;

use super::{check_lengths, chars, MetricError, MetricReport};

#[derive(Debug, Clone, Default)]
struct Counts {
    matches: Vec<u64>,
    hyp: Vec<u64>,
    reference: Vec<u64>,
}

impl Counts {
    fn zero(max_n: usize) -> Counts {
        Counts {
            matches: vec![0; max_n],
            hyp: vec![0; max_n],
            reference: vec![0; max_n],
        }
    }

    fn of(h: &[char], r: &[char], max_n: usize) -> Counts {
        let mut c = Counts::zero(max_n);
        for n in 1..=max_n {
            let mut rc: HashMap<&[char], u64> = HashMap::new();
            if r.len() >= n {
                for g in r.windows(n) {
                    *rc.entry(g).or_default() += 1;
                }
                c.reference[n - 1] = (r.len() + 1 - n) as u64;
            }
            if h.len() >= n {
                let mut hc: HashMap<&[char], u64> = HashMap::new();
                for g in h.windows(n) {
                    *hc.entry(g).or_default() += 1;
                }
                c.hyp[n - 1] = (h.len() + 1 - n) as u64;
                c.matches[n - 1] = hc
                    .iter()
                    .map(|(g, &k)| k.min(rc.get(g).copied().unwrap_or(0)))
                    .sum();
            }
        }
        c
    }

    fn add(mut self, o: Counts) -> Counts {
        for i in 0..self.matches.len() {
            self.matches[i] += o.matches[i];
            self.hyp[i] += o.hyp[i];
            self.reference[i] += o.reference[i];
        }
        self
    }
}

fn f_beta(p: f64, r: f64, beta: f64) -> f64 {
    let b2 = beta * beta;
    if p + r == 0.0 {
        0.0
    } else {
        (1.0 + b2) * p * r / (b2 * p + r)
    }
}

/// chrF2: `chrf_with(h, r, 2.0, 6)`.
pub fn chrf<S: AsRef<str> + Sync, R: AsRef<str> + Sync>(
    hypotheses: &[S],
    references: &[R],
) -> Result<MetricReport, MetricError> {
    chrf_with(hypotheses, references, 2.0, 6)
}

/// Mean over orders `1..=max_n` of the corpus-level character n-gram
/// F-score. Orders where neither side has any n-gram are left out of the
/// mean; if that leaves nothing, both sides were empty and the score is 1.
pub fn chrf_with<S: AsRef<str> + Sync, R: AsRef<str> + Sync>(
    hypotheses: &[S],
    references: &[R],
    beta: f64,
    max_n: usize,
) -> Result<MetricReport, MetricError> {
    check_lengths(hypotheses, references)?;
    let max_n = max_n.max(1);
    let counts = hypotheses
        .par_iter()
        .zip(references.par_iter())
        .map(|(h, r)| Counts::of(&chars(h.as_ref()), &chars(r.as_ref()), max_n))
        .reduce(|| Counts::zero(max_n), Counts::add);

    let mut auxiliary = Vec::new();
    let mut sum = 0.0;
    let mut used = 0usize;
    for n in 0..max_n {
        if counts.hyp[n] == 0 && counts.reference[n] == 0 {
            continue;
        }
        let ratio = |den: u64| if den == 0 { 0.0 } else { counts.matches[n] as f64 / den as f64 };
        let f = f_beta(ratio(counts.hyp[n]), ratio(counts.reference[n]), beta);
        auxiliary.push((format!("f{}", n + 1), f));
        sum += f;
        used += 1;
    }
    auxiliary.push(("beta".into(), beta));
    let value = if used == 0 { 1.0 } else { sum / used as f64 };
    Ok(MetricReport {
        name: format!("chrf{beta}"),
        value,
        auxiliary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_disjoint() {
        assert_eq!(chrf(&["ab cd", "xyz"], &["ab cd", "xyz"]).unwrap().value, 1.0);
        assert_eq!(chrf(&["abc"], &["xyz"]).unwrap().value, 0.0);
    }

    #[test]
    fn whitespace_ignored() {
        let a = chrf(&["a b c"], &["abc"]).unwrap().value;
        assert_eq!(a, 1.0);
    }

    #[test]
    fn name_carries_beta() {
        assert_eq!(chrf(&["a"], &["a"]).unwrap().name, "chrf2");
    }
}
