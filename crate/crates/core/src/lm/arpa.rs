//! ARPA text format.
//!
//! ```text
//! \data\
//! ngram 1=K1
//! ngram 2=K2
//!
//! \1-grams:
//! -1.2345<TAB>word<TAB>-0.3010
//! ...
//! \2-grams:
//! -0.5<TAB>w1 w2
//!
//! \end\
//! ```
//!
//! The backoff column is present for every order below the highest.
//! Reading is whitespace-tolerant and reports the line of the first problem.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::table::SortedTable;
use super::{Entry, LmError, NGramModel, BOS_LOG10_PROB};
use crate::corpus::{Vocabulary, WordId, UNK};

/// Substituted for `<unk>` when an ARPA file does not list it.
const MISSING_UNK_LOG10_PROB: f64 = -100.0;

#[derive(Debug, thiserror::Error)]
pub enum ArpaError {
    #[error("cannot access ARPA file: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: malformed header: {reason}")]
    Header { line: usize, reason: String },
    #[error("line {line}: {order}-grams section declares {declared} entries but lists {found}")]
    CountMismatch {
        line: usize,
        order: usize,
        declared: usize,
        found: usize,
    },
    #[error("line {line}: non-numeric {field} {text:?}")]
    NonNumeric {
        line: usize,
        field: &'static str,
        text: String,
    },
    #[error("line {line}: expected {expected} words in a {expected}-gram entry")]
    Arity { line: usize, expected: usize },
    #[error("line {line}: unexpected section {text:?}")]
    Section { line: usize, text: String },
    #[error("line {line}: word {word:?} has no unigram entry")]
    UnknownWord { line: usize, word: String },
    #[error("line {line}: duplicate n-gram")]
    Duplicate { line: usize },
    #[error("line {line}: missing \\end\\ marker")]
    MissingEnd { line: usize },
}

fn fmt_f64(v: f64) -> String {
    // Shortest representation that reads back to the same f64.
    let s = format!("{v}");
    if s == "-0" {
        "0".to_owned()
    } else {
        s
    }
}

/// Renders `model` as ARPA text.
pub fn write_arpa<W: Write>(model: &NGramModel, out: W) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "\\data\\")?;
    for n in 1..=model.order {
        writeln!(out, "ngram {}={}", n, model.entries(n))?;
    }
    let mut line = String::new();
    for n in 1..=model.order {
        writeln!(out)?;
        writeln!(out, "\\{n}-grams:")?;
        for (key, e) in model.table(n).iter() {
            line.clear();
            let _ = write!(line, "{}\t", fmt_f64(e.log10_prob));
            for (i, id) in key.iter().enumerate() {
                if i > 0 {
                    line.push(' ');
                }
                line.push_str(model.vocab.word(*id));
            }
            if n < model.order {
                let _ = write!(line, "\t{}", fmt_f64(e.log10_backoff));
            }
            writeln!(out, "{line}")?;
        }
    }
    writeln!(out)?;
    writeln!(out, "\\end\\")?;
    out.flush()
}

pub fn export_arpa(model: &NGramModel, path: &Path) -> Result<(), LmError> {
    let f = fs::File::create(path).map_err(ArpaError::from)?;
    write_arpa(model, f).map_err(ArpaError::from)?;
    Ok(())
}

pub fn import_arpa(path: &Path) -> Result<NGramModel, LmError> {
    let text = fs::read_to_string(path).map_err(ArpaError::from)?;
    Ok(read_arpa(&text)?)
}

struct RawEntry<'a> {
    line: usize,
    words: Vec<&'a str>,
    prob: f64,
    backoff: f64,
}

fn parse_number(text: &str, line: usize, field: &'static str) -> Result<f64, ArpaError> {
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| ArpaError::NonNumeric {
            line,
            field,
            text: text.to_owned(),
        })
}

/// Parses ARPA text into a model.
pub fn read_arpa(text: &str) -> Result<NGramModel, ArpaError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).peekable();

    // Header.
    let mut last_line = 0;
    loop {
        match lines.next() {
            Some((_, "")) => continue,
            Some((_, "\\data\\")) => break,
            Some((line, other)) => {
                return Err(ArpaError::Header {
                    line,
                    reason: format!("expected \\data\\, found {other:?}"),
                })
            }
            None => {
                return Err(ArpaError::Header {
                    line: 1,
                    reason: "empty file".into(),
                })
            }
        }
    }
    let mut declared: Vec<usize> = Vec::new();
    while let Some(&(line, l)) = lines.peek() {
        last_line = line;
        if l.is_empty() {
            lines.next();
            if !declared.is_empty() {
                break;
            }
            continue;
        }
        let Some(rest) = l.strip_prefix("ngram ") else {
            break;
        };
        lines.next();
        let (n, c) = rest.split_once('=').ok_or_else(|| ArpaError::Header {
            line,
            reason: format!("expected `ngram N=COUNT`, found {l:?}"),
        })?;
        let n: usize = n.trim().parse().map_err(|_| ArpaError::Header {
            line,
            reason: format!("bad order {n:?}"),
        })?;
        let c: usize = c.trim().parse().map_err(|_| ArpaError::Header {
            line,
            reason: format!("bad count {c:?}"),
        })?;
        if n != declared.len() + 1 {
            return Err(ArpaError::Header {
                line,
                reason: format!("orders must be listed 1, 2, ... in sequence; got {n}"),
            });
        }
        declared.push(c);
    }
    if declared.is_empty() {
        return Err(ArpaError::Header {
            line: last_line.max(1),
            reason: "no `ngram N=COUNT` lines".into(),
        });
    }
    let order = declared.len();

    // Sections.
    let mut sections: Vec<Vec<RawEntry>> = Vec::with_capacity(order);
    let mut current: Option<usize> = None;
    let mut ended = false;
    let close = |current: Option<usize>, sections: &Vec<Vec<RawEntry>>, line: usize| {
        if let Some(n) = current {
            let found = sections[n - 1].len();
            if found != declared[n - 1] {
                return Err(ArpaError::CountMismatch {
                    line,
                    order: n,
                    declared: declared[n - 1],
                    found,
                });
            }
        }
        Ok(())
    };
    for (line, l) in lines {
        last_line = line;
        if l.is_empty() {
            continue;
        }
        if l.starts_with('\\') {
            close(current, &sections, line)?;
            if l == "\\end\\" {
                ended = true;
                break;
            }
            let n = l
                .strip_prefix('\\')
                .and_then(|s| s.strip_suffix("-grams:"))
                .and_then(|s| s.parse::<usize>().ok())
                .filter(|&n| n == sections.len() + 1 && n <= order)
                .ok_or_else(|| ArpaError::Section {
                    line,
                    text: l.to_owned(),
                })?;
            sections.push(Vec::with_capacity(declared[n - 1]));
            current = Some(n);
            continue;
        }
        let n = current.ok_or_else(|| ArpaError::Section {
            line,
            text: l.to_owned(),
        })?;
        let fields: Vec<&str> = l.split_whitespace().collect();
        let has_backoff = match fields.len() {
            k if k == n + 1 => false,
            k if k == n + 2 && n < order => true,
            _ => return Err(ArpaError::Arity { line, expected: n }),
        };
        let prob = parse_number(fields[0], line, "probability")?;
        let backoff = if has_backoff {
            parse_number(fields[n + 1], line, "backoff")?
        } else {
            0.0
        };
        sections[n - 1].push(RawEntry {
            line,
            words: fields[1..=n].to_vec(),
            prob,
            backoff,
        });
    }
    if !ended {
        return Err(ArpaError::MissingEnd { line: last_line + 1 });
    }
    if sections.len() != order {
        return Err(ArpaError::Section {
            line: last_line,
            text: format!("missing \\{}-grams: section", sections.len() + 1),
        });
    }

    let mut vocab = Vocabulary::new();
    let mut unigram_words: Vec<&str> = sections[0].iter().map(|e| e.words[0]).collect();
    unigram_words.sort_unstable();
    unigram_words.dedup();
    for w in unigram_words {
        vocab.insert(w);
    }

    let mut tables = Vec::with_capacity(order);
    for (i, section) in sections.iter().enumerate() {
        let n = i + 1;
        let mut entries: Vec<(Vec<WordId>, Entry)> = Vec::with_capacity(section.len() + 1);
        for e in section {
            let ids = e
                .words
                .iter()
                .map(|w| {
                    vocab.get(w).ok_or_else(|| ArpaError::UnknownWord {
                        line: e.line,
                        word: (*w).to_owned(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let prob = if ids == [Vocabulary::BOS_ID] {
                BOS_LOG10_PROB
            } else {
                e.prob
            };
            entries.push((
                ids,
                Entry {
                    log10_prob: prob,
                    log10_backoff: e.backoff,
                },
            ));
        }
        if n == 1 {
            let listed: std::collections::HashSet<WordId> =
                entries.iter().map(|(k, _)| k[0]).collect();
            for (id, prob) in [
                (Vocabulary::UNK_ID, MISSING_UNK_LOG10_PROB),
                (Vocabulary::BOS_ID, BOS_LOG10_PROB),
            ] {
                if !listed.contains(&id) {
                    if id == Vocabulary::UNK_ID {
                        log::warn!("ARPA file has no {UNK}; using log10 p = {prob}");
                    }
                    entries.push((
                        vec![id],
                        Entry {
                            log10_prob: prob,
                            log10_backoff: 0.0,
                        },
                    ));
                }
            }
        }
        let mut sorted: Vec<&Vec<WordId>> = entries.iter().map(|(k, _)| k).collect();
        sorted.sort_unstable();
        if let Some(pos) = sorted.windows(2).position(|w| w[0] == w[1]) {
            let dup = sorted[pos];
            let line = section
                .iter()
                .filter(|e| {
                    e.words
                        .iter()
                        .map(|w| vocab.get(w))
                        .collect::<Option<Vec<_>>>()
                        .as_ref()
                        == Some(dup)
                })
                .map(|e| e.line)
                .nth(1)
                .unwrap_or(0);
            return Err(ArpaError::Duplicate { line });
        }
        tables.push(SortedTable::from_entries(n, entries));
    }

    Ok(NGramModel {
        order,
        vocab,
        tables,
        discounts: Vec::new(),
        warnings: Vec::new(),
    })
}
