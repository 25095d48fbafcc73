//! Two-pass scoring of files too large to hold in memory.
//!
//! The first pass scores every non-blank line and keeps only the raw
//! scores, spilling them to a temporary file past a budget. The second pass
//! rereads the input and writes `index\traw\tsss\tsentence` rows.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::Path;

use rayon::prelude::*;

use super::{scale, ScoreOptions, ScoredSentence, ScoringRun, SelectionError, SentenceScorer};
use crate::corpus::{CorpusError, Sentence};

const BATCH: usize = 4096;

/// Raw scores held in memory up to a budget, then in an anonymous temp file.
pub struct ScoreBuffer {
    memory: Vec<f64>,
    budget: usize,
    spill: Option<BufWriter<File>>,
    len: usize,
}

impl ScoreBuffer {
    /// `budget` is the number of scores kept in memory.
    pub fn new(budget: usize) -> Self {
        ScoreBuffer {
            memory: Vec::new(),
            budget,
            spill: None,
            len: 0,
        }
    }

    pub fn push(&mut self, value: f64) -> io::Result<()> {
        self.len += 1;
        if self.memory.len() < self.budget {
            self.memory.push(value);
            return Ok(());
        }
        if self.spill.is_none() {
            self.spill = Some(BufWriter::new(tempfile::tempfile()?));
        }
        self.spill.as_mut().unwrap().write_all(&value.to_le_bytes())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn spilled(&self) -> bool {
        self.spill.is_some()
    }

    /// Consumes the buffer, yielding scores in push order.
    pub fn drain(self) -> io::Result<impl Iterator<Item = io::Result<f64>>> {
        let spill = match self.spill {
            Some(w) => {
                let mut f = w.into_inner().map_err(|e| e.into_error())?;
                f.seek(SeekFrom::Start(0))?;
                Some(BufReader::new(f))
            }
            None => None,
        };
        let rest = spill.into_iter().flat_map(|mut r| {
            std::iter::from_fn(move || {
                let mut b = [0u8; 8];
                match r.read_exact(&mut b) {
                    Ok(()) => Some(Ok(f64::from_le_bytes(b))),
                    Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => None,
                    Err(e) => Some(Err(e)),
                }
            })
        });
        Ok(self.memory.into_iter().map(Ok).chain(rest))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamSummary {
    pub scored: usize,
    pub skipped_blank: usize,
    pub min: f64,
    pub max: f64,
    pub degenerate: bool,
    pub spilled: bool,
    pub warnings: Vec<String>,
}

/// Calls `f` on batches of non-blank, normalized lines.
fn for_each_batch(
    path: &Path,
    mut f: impl FnMut(Vec<Sentence>) -> Result<(), SelectionError>,
) -> Result<usize, SelectionError> {
    let io_err = |source| CorpusError::Io {
        path: path.to_owned(),
        source,
    };
    let mut reader = BufReader::new(File::open(path).map_err(io_err)?);
    let mut offset = 0usize;
    let mut line = Vec::new();
    let mut batch = Vec::with_capacity(BATCH);
    let mut skipped = 0;
    loop {
        line.clear();
        let n = reader.read_until(b'\n', &mut line).map_err(io_err)?;
        if n == 0 {
            break;
        }
        let text = std::str::from_utf8(&line).map_err(|e| CorpusError::InvalidUtf8 {
            path: path.to_owned(),
            offset: offset + e.valid_up_to(),
        })?;
        offset += n;
        let text = text.strip_suffix('\n').unwrap_or(text);
        let text = text.strip_suffix('\r').unwrap_or(text);
        if text.trim().is_empty() {
            skipped += 1;
            continue;
        }
        batch.push(Sentence::new(text)?);
        if batch.len() == BATCH {
            f(std::mem::replace(&mut batch, Vec::with_capacity(BATCH)))?;
        }
    }
    if !batch.is_empty() {
        f(batch)?;
    }
    Ok(skipped)
}

/// Scores every non-blank line of `input` and writes TSV rows to `out`.
/// At most `memory_budget` raw scores are held in memory at once.
pub fn score_file<S: SentenceScorer + ?Sized, W: Write>(
    scorer: &S,
    input: &Path,
    options: ScoreOptions,
    memory_budget: usize,
    out: &mut W,
) -> Result<StreamSummary, SelectionError> {
    let mut buffer = ScoreBuffer::new(memory_budget);
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    let skipped_blank = for_each_batch(input, |batch| {
        let raw: Vec<f64> = batch
            .par_iter()
            .map(|s| options.raw_score(scorer, s.text()))
            .collect();
        for v in raw {
            if !v.is_finite() {
                return Err(SelectionError::NonFinite {
                    index: buffer.len(),
                    value: v,
                });
            }
            min = min.min(v);
            max = max.max(v);
            buffer.push(v)?;
        }
        Ok(())
    })?;
    if buffer.is_empty() {
        return Err(SelectionError::NoCandidates);
    }
    let scored = buffer.len();
    let spilled = buffer.spilled();
    let degenerate = min == max;
    let mut warnings = Vec::new();
    if degenerate {
        let msg = format!("all {scored} raw scores equal {min}; every SSS set to 1.0");
        log::warn!("{msg}");
        warnings.push(msg);
    }

    let mut raw = buffer.drain()?;
    let mut index = 0usize;
    for_each_batch(input, |batch| {
        for s in batch {
            let r = raw.next().expect("input changed between passes")?;
            write_row(out, index, r, scale(r, min, max), s.text())?;
            index += 1;
        }
        Ok(())
    })?;
    if index != scored {
        return Err(SelectionError::ScoredFile {
            line: index,
            reason: "input changed between passes".into(),
        });
    }
    Ok(StreamSummary {
        scored,
        skipped_blank,
        min,
        max,
        degenerate,
        spilled,
        warnings,
    })
}

fn write_row<W: Write>(out: &mut W, index: usize, raw: f64, sss: f64, text: &str) -> io::Result<()> {
    writeln!(out, "{index}\t{raw:.6}\t{sss:.6}\t{text}")
}

/// Writes an in-memory run in the same format as [`score_file`].
pub fn write_scored_tsv<W: Write>(
    out: &mut W,
    run: &ScoringRun,
    sentences: &[Sentence],
) -> io::Result<()> {
    for s in &run.scores {
        write_row(out, s.index, s.raw, s.sss, sentences[s.index].text())?;
    }
    Ok(())
}

/// Reads a scored file back. Rows must be numbered 0, 1, 2, ... in order.
pub fn read_scored_tsv(path: &Path) -> Result<ScoringRun, SelectionError> {
    let content = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_owned(),
        source,
    })?;
    let mut scores = Vec::new();
    for (i, line) in content.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let bad = |reason: &str| SelectionError::ScoredFile {
            line: i + 1,
            reason: reason.to_owned(),
        };
        let mut cols = line.splitn(4, '\t');
        let mut field = |name: &str| cols.next().ok_or_else(|| bad(&format!("missing {name} column")));
        let index: usize = field("index")?.parse().map_err(|_| bad("index is not an integer"))?;
        let raw: f64 = field("raw")?.parse().map_err(|_| bad("raw score is not a number"))?;
        let sss: f64 = field("sss")?.parse().map_err(|_| bad("sss is not a number"))?;
        if index != scores.len() {
            return Err(bad(&format!("expected index {}, found {index}", scores.len())));
        }
        if !(0.0..=1.0).contains(&sss) || !raw.is_finite() {
            return Err(bad("score out of range"));
        }
        scores.push(ScoredSentence { index, raw, sss });
    }
    if scores.is_empty() {
        return Err(SelectionError::NoCandidates);
    }
    let (min, max) = scores
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.raw), hi.max(s.raw)));
    Ok(ScoringRun {
        scores,
        min,
        max,
        degenerate: min == max,
        warnings: Vec::new(),
    })
}
