//! Line-aligned corpora: reading, pairing, combining and vocabulary overlap.
//!
//! Every corpus is one sentence per line, UTF-8, LF terminated. Text is
//! brought to Unicode canonical composition (NFC) on the way in, and tokens
//! are the whitespace split of the normalized text. Punctuation stays
//! attached to the word it touches.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use unicode_normalization::UnicodeNormalization;

use crate::translit;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid UTF-8 at byte offset {offset}")]
    InvalidUtf8 { path: PathBuf, offset: usize },
    #[error("alignment mismatch: {source_path} has {source_lines} lines but {target_path} has {target_lines}")]
    AlignmentMismatch {
        source_path: PathBuf,
        source_lines: usize,
        target_path: PathBuf,
        target_lines: usize,
    },
    #[error("sentence contains a line break")]
    Newline,
    #[error("parallel corpus sides differ in length ({source_len} vs {target_len})")]
    UnequalSides { source_len: usize, target_len: usize },
    #[error("cannot combine zero corpora")]
    NoParts,
    #[error("{0} corpus is empty")]
    Empty(&'static str),
}

/// One sentence of normalized text and its whitespace tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sentence {
    text: String,
}

impl Sentence {
    /// Normalizes `text` to NFC. Fails if it contains a line break.
    pub fn new(text: &str) -> Result<Self, CorpusError> {
        if text.contains(['\n', '\r']) {
            return Err(CorpusError::Newline);
        }
        Ok(Sentence {
            text: normalize(text),
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.text.split_whitespace()
    }

    pub fn token_vec(&self) -> Vec<&str> {
        self.tokens().collect()
    }

    pub fn is_blank(&self) -> bool {
        self.text.trim().is_empty()
    }

    /// The WX encoding of this sentence.
    pub fn to_wx(&self) -> Sentence {
        Sentence {
            text: translit::to_wx(&self.text),
        }
    }
}

impl AsRef<str> for Sentence {
    fn as_ref(&self) -> &str {
        &self.text
    }
}

impl std::fmt::Display for Sentence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.text)
    }
}

fn normalize(text: &str) -> String {
    text.nfc().collect()
}

/// Whitespace tokenization of NFC text. Idempotent.
pub fn tokenize(text: &str) -> Vec<String> {
    normalize(text).split_whitespace().map(str::to_owned).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonolingualCorpus {
    pub sentences: Vec<Sentence>,
    pub language: String,
}

impl MonolingualCorpus {
    pub fn new(language: impl Into<String>, sentences: Vec<Sentence>) -> Self {
        MonolingualCorpus {
            sentences,
            language: language.into(),
        }
    }

    /// Builds a corpus from string slices, normalizing each.
    pub fn from_lines<S: AsRef<str>>(
        language: impl Into<String>,
        lines: &[S],
    ) -> Result<Self, CorpusError> {
        let sentences = lines
            .iter()
            .map(|l| Sentence::new(l.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(language, sentences))
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Sentence> {
        self.sentences.iter()
    }

    pub fn to_wx(&self) -> MonolingualCorpus {
        MonolingualCorpus {
            sentences: self.sentences.iter().map(Sentence::to_wx).collect(),
            language: self.language.clone(),
        }
    }

    /// The set of distinct tokens.
    pub fn types(&self) -> BTreeSet<&str> {
        self.sentences.iter().flat_map(|s| s.tokens()).collect()
    }

    pub fn write(&self, path: &Path) -> Result<(), CorpusError> {
        write_lines(path, self.sentences.iter())
    }
}

/// Source and target sides, aligned by index.
#[derive(Debug, Clone, PartialEq)]
pub struct ParallelCorpus {
    source: Vec<Sentence>,
    target: Vec<Sentence>,
    pub name: String,
}

impl ParallelCorpus {
    pub fn new(
        name: impl Into<String>,
        source: Vec<Sentence>,
        target: Vec<Sentence>,
    ) -> Result<Self, CorpusError> {
        if source.len() != target.len() {
            return Err(CorpusError::UnequalSides {
                source_len: source.len(),
                target_len: target.len(),
            });
        }
        Ok(ParallelCorpus {
            source,
            target,
            name: name.into(),
        })
    }

    pub fn from_pairs<S: AsRef<str>>(
        name: impl Into<String>,
        pairs: &[(S, S)],
    ) -> Result<Self, CorpusError> {
        let mut source = Vec::with_capacity(pairs.len());
        let mut target = Vec::with_capacity(pairs.len());
        for (s, t) in pairs {
            source.push(Sentence::new(s.as_ref())?);
            target.push(Sentence::new(t.as_ref())?);
        }
        Self::new(name, source, target)
    }

    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    pub fn source(&self) -> &[Sentence] {
        &self.source
    }

    pub fn target(&self) -> &[Sentence] {
        &self.target
    }

    pub fn pair(&self, i: usize) -> Option<(&Sentence, &Sentence)> {
        Some((self.source.get(i)?, self.target.get(i)?))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Sentence, &Sentence)> {
        self.source.iter().zip(&self.target)
    }

    pub fn source_corpus(&self, language: &str) -> MonolingualCorpus {
        MonolingualCorpus::new(language, self.source.clone())
    }

    pub fn target_corpus(&self, language: &str) -> MonolingualCorpus {
        MonolingualCorpus::new(language, self.target.clone())
    }

    /// The sub-corpus at `indices`, in the order given.
    pub fn select(&self, name: impl Into<String>, indices: &[usize]) -> ParallelCorpus {
        ParallelCorpus {
            source: indices.iter().map(|&i| self.source[i].clone()).collect(),
            target: indices.iter().map(|&i| self.target[i].clone()).collect(),
            name: name.into(),
        }
    }

    pub fn push(&mut self, source: Sentence, target: Sentence) {
        self.source.push(source);
        self.target.push(target);
    }

    /// Writes `<prefix>.src` and `<prefix>.tgt`.
    pub fn write(&self, prefix: &Path) -> Result<(PathBuf, PathBuf), CorpusError> {
        let src = with_suffix(prefix, "src");
        let tgt = with_suffix(prefix, "tgt");
        write_lines(&src, self.source.iter())?;
        write_lines(&tgt, self.target.iter())?;
        Ok((src, tgt))
    }
}

pub(crate) fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

fn write_lines<'a>(
    path: &Path,
    lines: impl Iterator<Item = &'a Sentence>,
) -> Result<(), CorpusError> {
    let mut buf = String::new();
    for s in lines {
        buf.push_str(s.text());
        buf.push('\n');
    }
    fs::write(path, buf).map_err(|source| CorpusError::Io {
        path: path.to_owned(),
        source,
    })
}

/// A corpus read from disk, with the number of blank lines that were skipped.
#[derive(Debug, Clone)]
pub struct ReadReport<T> {
    pub corpus: T,
    pub skipped_blank: usize,
}

fn read_utf8(path: &Path) -> Result<String, CorpusError> {
    let bytes = fs::read(path).map_err(|source| CorpusError::Io {
        path: path.to_owned(),
        source,
    })?;
    String::from_utf8(bytes).map_err(|e| CorpusError::InvalidUtf8 {
        path: path.to_owned(),
        offset: e.utf8_error().valid_up_to(),
    })
}

fn split_lines(content: &str) -> Vec<&str> {
    let mut lines: Vec<&str> = content
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .collect();
    if content.is_empty() || content.ends_with('\n') {
        lines.pop();
    }
    lines
}

/// Reads one sentence per non-blank line.
pub fn read_corpus(
    path: &Path,
    language: &str,
) -> Result<ReadReport<MonolingualCorpus>, CorpusError> {
    let content = read_utf8(path)?;
    let mut sentences = Vec::new();
    let mut skipped_blank = 0;
    for line in split_lines(&content) {
        if line.trim().is_empty() {
            skipped_blank += 1;
            continue;
        }
        sentences.push(Sentence::new(line)?);
    }
    Ok(ReadReport {
        corpus: MonolingualCorpus::new(language, sentences),
        skipped_blank,
    })
}

/// Reads two line-aligned files. A blank line on either side drops the
/// whole pair; `skipped_blank` counts dropped pairs.
pub fn read_parallel(
    source_path: &Path,
    target_path: &Path,
    name: &str,
) -> Result<ReadReport<ParallelCorpus>, CorpusError> {
    let src = read_utf8(source_path)?;
    let tgt = read_utf8(target_path)?;
    let src_lines = split_lines(&src);
    let tgt_lines = split_lines(&tgt);
    if src_lines.len() != tgt_lines.len() {
        return Err(CorpusError::AlignmentMismatch {
            source_path: source_path.to_owned(),
            source_lines: src_lines.len(),
            target_path: target_path.to_owned(),
            target_lines: tgt_lines.len(),
        });
    }
    let mut source = Vec::with_capacity(src_lines.len());
    let mut target = Vec::with_capacity(tgt_lines.len());
    let mut skipped_blank = 0;
    for (s, t) in src_lines.iter().zip(&tgt_lines) {
        if s.trim().is_empty() || t.trim().is_empty() {
            skipped_blank += 1;
            continue;
        }
        source.push(Sentence::new(s)?);
        target.push(Sentence::new(t)?);
    }
    Ok(ReadReport {
        corpus: ParallelCorpus::new(name, source, target)?,
        skipped_blank,
    })
}

/// Concatenates `parts` in order under a new name.
pub fn combine_domains(parts: &[ParallelCorpus], name: &str) -> Result<ParallelCorpus, CorpusError> {
    if parts.is_empty() {
        return Err(CorpusError::NoParts);
    }
    let total = parts.iter().map(ParallelCorpus::len).sum();
    let mut source = Vec::with_capacity(total);
    let mut target = Vec::with_capacity(total);
    for p in parts {
        source.extend_from_slice(&p.source);
        target.extend_from_slice(&p.target);
    }
    ParallelCorpus::new(name, source, target)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OverlapMode {
    /// Compare WX encodings of both corpora.
    #[default]
    Wx,
    /// Compare the text as written.
    Raw,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Overlap {
    pub count: usize,
    pub words: BTreeSet<String>,
}

/// Intersection of the word-type sets of two corpora.
pub fn overlap_vocab(
    a: &MonolingualCorpus,
    b: &MonolingualCorpus,
    mode: OverlapMode,
) -> Result<Overlap, CorpusError> {
    if a.is_empty() {
        return Err(CorpusError::Empty("first"));
    }
    if b.is_empty() {
        return Err(CorpusError::Empty("second"));
    }
    let types = |c: &MonolingualCorpus| -> BTreeSet<String> {
        match mode {
            OverlapMode::Raw => c.types().into_iter().map(str::to_owned).collect(),
            OverlapMode::Wx => c
                .iter()
                .flat_map(|s| s.tokens().map(translit::to_wx).collect::<Vec<_>>())
                .collect(),
        }
    };
    let ta = types(a);
    let tb = types(b);
    let words: BTreeSet<String> = ta.intersection(&tb).cloned().collect();
    Ok(Overlap {
        count: words.len(),
        words,
    })
}

pub const UNK: &str = "<unk>";
pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";

pub type WordId = u32;

/// Word/id bijection with the three sentence markers at fixed ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    ids: HashMap<String, WordId>,
    words: Vec<String>,
}

impl Vocabulary {
    pub const UNK_ID: WordId = 0;
    pub const BOS_ID: WordId = 1;
    pub const EOS_ID: WordId = 2;

    pub fn new() -> Self {
        let mut v = Vocabulary {
            ids: HashMap::new(),
            words: Vec::new(),
        };
        for w in [UNK, BOS, EOS] {
            v.words.push(w.to_owned());
            v.ids.insert(w.to_owned(), v.words.len() as WordId - 1);
        }
        v
    }

    /// Vocabulary over `words`, assigned ids in sorted order after the markers.
    pub fn from_words<'a>(words: impl IntoIterator<Item = &'a str>) -> Self {
        let mut v = Vocabulary::new();
        let sorted: BTreeSet<&str> = words.into_iter().collect();
        for w in sorted {
            v.insert(w);
        }
        v
    }

    pub fn insert(&mut self, word: &str) -> WordId {
        if let Some(&id) = self.ids.get(word) {
            return id;
        }
        let id = self.words.len() as WordId;
        self.words.push(word.to_owned());
        self.ids.insert(word.to_owned(), id);
        id
    }

    pub fn get(&self, word: &str) -> Option<WordId> {
        self.ids.get(word).copied()
    }

    /// Id of a token in running text. Unknown words and literal markers map
    /// to the unknown id.
    pub fn token_id(&self, word: &str) -> WordId {
        match self.ids.get(word) {
            Some(&id) if id != Self::BOS_ID && id != Self::EOS_ID => id,
            _ => Self::UNK_ID,
        }
    }

    pub fn word(&self, id: WordId) -> &str {
        &self.words[id as usize]
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = (WordId, &str)> {
        self.words
            .iter()
            .enumerate()
            .map(|(i, w)| (i as WordId, w.as_str()))
    }
}

impl Default for Vocabulary {
    fn default() -> Self {
        Self::new()
    }
}
