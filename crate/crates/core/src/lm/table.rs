use std::cmp::Ordering;
use std::ops::Range;

use crate::corpus::WordId;

/// Fixed-width id tuples in one contiguous, lexicographically sorted array,
/// with a parallel value array. Lookups are binary searches.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedTable<V> {
    width: usize,
    keys: Vec<WordId>,
    values: Vec<V>,
}

impl<V> SortedTable<V> {
    /// Builds from unsorted `(key, value)` pairs. Keys must be unique and
    /// exactly `width` long.
    pub fn from_entries(width: usize, mut entries: Vec<(Vec<WordId>, V)>) -> Self {
        entries.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let mut keys = Vec::with_capacity(width * entries.len());
        let mut values = Vec::with_capacity(entries.len());
        for (k, v) in entries {
            debug_assert_eq!(k.len(), width);
            keys.extend_from_slice(&k);
            values.push(v);
        }
        debug_assert!(keys
            .chunks_exact(width.max(1))
            .collect::<Vec<_>>()
            .windows(2)
            .all(|w| w[0] < w[1]));
        SortedTable {
            width,
            keys,
            values,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn key(&self, i: usize) -> &[WordId] {
        &self.keys[i * self.width..(i + 1) * self.width]
    }

    pub fn value(&self, i: usize) -> &V {
        &self.values[i]
    }

    pub fn value_mut(&mut self, i: usize) -> &mut V {
        &mut self.values[i]
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[WordId], &V)> {
        self.keys.chunks_exact(self.width).zip(&self.values)
    }

    pub fn find(&self, key: &[WordId]) -> Option<usize> {
        if key.len() != self.width {
            return None;
        }
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            match self.key(mid).cmp(key) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn get(&self, key: &[WordId]) -> Option<&V> {
        self.find(key).map(|i| &self.values[i])
    }

    /// Index range of all keys that start with `prefix`.
    pub fn prefix_range(&self, prefix: &[WordId]) -> Range<usize> {
        let p = prefix.len();
        let lower = self.partition(|k| &k[..p] < prefix);
        let upper = self.partition(|k| &k[..p] <= prefix);
        lower..upper
    }

    fn partition(&self, pred: impl Fn(&[WordId]) -> bool) -> usize {
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if pred(self.key(mid)) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }
}
