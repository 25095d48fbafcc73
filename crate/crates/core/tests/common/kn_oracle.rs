//! Brute-force interpolated modified Kneser-Ney, straight from the closed-form
//! definitions. Works on strings and substring enumeration only; shares no
//! code with the library's counting or storage.

use std::collections::{HashMap, HashSet};

pub struct KnOracle {
    pub order: usize,
    padded: Vec<Vec<String>>,
    /// every predictable type: words, </s>, <unk>
    pub vocab: Vec<String>,
    discounts: Vec<[f64; 3]>,
}

impl KnOracle {
    pub fn new(sentences: &[&str], order: usize) -> Self {
        let padded: Vec<Vec<String>> = sentences
            .iter()
            .map(|s| {
                let mut v = vec!["<s>".to_string()];
                v.extend(s.split_whitespace().map(str::to_string));
                v.push("</s>".to_string());
                v
            })
            .collect();
        let mut vocab: Vec<String> = padded
            .iter()
            .flat_map(|p| p[1..].iter().cloned())
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        vocab.push("<unk>".to_string());
        vocab.sort();
        let mut o = KnOracle {
            order,
            padded,
            vocab,
            discounts: vec![],
        };
        o.discounts = (1..=order).map(|n| o.discount_for(n)).collect();
        o
    }

    /// Every contiguous n-gram of the padded sentences, except the lone <s>.
    pub fn occurring(&self, n: usize) -> HashSet<Vec<String>> {
        let mut out = HashSet::new();
        for p in &self.padded {
            if p.len() < n {
                continue;
            }
            for w in p.windows(n) {
                if n == 1 && w[0] == "<s>" {
                    continue;
                }
                out.insert(w.to_vec());
            }
        }
        out
    }

    fn raw(&self, g: &[String]) -> usize {
        let n = g.len();
        let mut c = 0;
        for p in &self.padded {
            for i in 1..p.len() {
                let start = (i + 1).saturating_sub(self.order);
                if i + 1 - start == n && p[start..=i] == *g {
                    c += 1;
                }
            }
        }
        c
    }

    /// Raw count at the top order or for <s>-initial n-grams, otherwise the
    /// number of distinct words seen immediately to the left.
    pub fn adjusted(&self, g: &[String]) -> usize {
        if g.len() == self.order || g[0] == "<s>" {
            return self.raw(g);
        }
        let mut left = HashSet::new();
        for p in &self.padded {
            for w in p.windows(g.len() + 1) {
                if w[1..] == *g {
                    left.insert(w[0].clone());
                }
            }
        }
        left.len()
    }

    fn discount_for(&self, n: usize) -> [f64; 3] {
        let mut t = [0usize; 5];
        for g in self.occurring(n) {
            let a = self.adjusted(&g);
            if (1..=4).contains(&a) {
                t[a] += 1;
            }
        }
        if t[1] == 0 || t[2] == 0 || t[3] == 0 {
            return [0.5, 0.5, 0.5];
        }
        let (t1, t2, t3, t4) = (t[1] as f64, t[2] as f64, t[3] as f64, t[4] as f64);
        let y = t1 / (t1 + 2.0 * t2);
        let d = [
            1.0 - 2.0 * y * t2 / t1,
            2.0 - 3.0 * y * t3 / t2,
            3.0 - 4.0 * y * t4 / t3,
        ];
        if d.iter().any(|&v| v <= 0.0) {
            return [0.5, 0.5, 0.5];
        }
        [d[0].clamp(0.0, 1.0), d[1].clamp(0.0, 2.0), d[2].clamp(0.0, 3.0)]
    }

    fn d(&self, n: usize, a: usize) -> f64 {
        match a {
            0 => 0.0,
            1 => self.discounts[n - 1][0],
            2 => self.discounts[n - 1][1],
            _ => self.discounts[n - 1][2],
        }
    }

    /// (denominator, gamma) for a context; gamma is None when the context
    /// was never followed by anything.
    fn context_stats(&self, h: &[String]) -> (f64, Option<f64>) {
        let n = h.len() + 1;
        let mut denom = 0.0;
        let mut mass = 0.0;
        for x in &self.vocab {
            let mut g = h.to_vec();
            g.push(x.clone());
            let a = self.adjusted(&g);
            denom += a as f64;
            mass += self.d(n, a);
        }
        if denom == 0.0 {
            (0.0, None)
        } else {
            (denom, Some(mass / denom))
        }
    }

    pub fn prob(&self, h: &[String], w: &str) -> f64 {
        let h = if h.len() >= self.order {
            &h[h.len() - (self.order - 1)..]
        } else {
            h
        };
        let n = h.len() + 1;
        let lower = if h.is_empty() {
            1.0 / self.vocab.len() as f64
        } else {
            self.prob(&h[1..], w)
        };
        let (denom, gamma) = self.context_stats(h);
        match gamma {
            None => lower,
            Some(gamma) => {
                let mut g = h.to_vec();
                g.push(w.to_string());
                let a = self.adjusted(&g);
                (a as f64 - self.d(n, a)).max(0.0) / denom + gamma * lower
            }
        }
    }

    /// log10 backoff weight of a stored context.
    pub fn log_backoff(&self, h: &[String]) -> f64 {
        self.context_stats(h).1.map_or(0.0, f64::log10)
    }

    pub fn discounts(&self, n: usize) -> [f64; 3] {
        self.discounts[n - 1]
    }

    /// log10 probability of a whole sentence, <s> conditioning, </s> scored.
    pub fn sentence_log10(&self, sentence: &str) -> f64 {
        let known: HashSet<&str> = self.vocab.iter().map(String::as_str).collect();
        let mut hist = vec!["<s>".to_string()];
        let mut total = 0.0;
        let mut words: Vec<String> = sentence
            .split_whitespace()
            .map(|w| {
                if known.contains(w) && w != "</s>" {
                    w.to_string()
                } else {
                    "<unk>".to_string()
                }
            })
            .collect();
        words.push("</s>".to_string());
        for w in words {
            total += self.prob(&hist, &w).log10();
            hist.push(w);
        }
        total
    }

    pub fn context_map(&self) -> HashMap<usize, HashSet<Vec<String>>> {
        (1..=self.order).map(|n| (n, self.occurring(n))).collect()
    }
}
