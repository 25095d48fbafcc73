//! Devanagari ⇄ WX transliteration.
//!
//! WX writes every Devanagari letter as a single ASCII character. A consonant
//! carries the inherent vowel `a` unless a vowel sign or a virama follows it;
//! the virama itself has no WX image, so `क्` is just `k`. Decoding reverses
//! this: a consonant followed by `a` is bare, followed by another vowel takes
//! the vowel sign, and followed by anything else gets a virama.
//!
//! One case is ambiguous in plain WX: a virama followed by an independent
//! vowel (`क्अ` would encode like `क`). There, and before a stray virama or
//! nukta, the virama is written through as the raw codepoint so decoding
//! stays exact.
//!
//! Characters outside the table, including nukta, ZWJ/ZWNJ, digits and
//! punctuation, pass through unchanged and are counted in [`TranslitReport`].

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::OnceLock;

const DEFAULT_TABLE: &str = include_str!("../data/wx.tsv");

pub const VIRAMA: char = '\u{94D}';
pub const NUKTA: char = '\u{93C}';
const INHERENT: char = '\u{905}';

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("line {line}: expected CODEPOINT<TAB>WX")]
    Malformed { line: usize },
    #[error("line {line}: bad codepoint {text:?}")]
    BadCodepoint { line: usize, text: String },
    #[error("line {line}: U+{cp:04X} is not a Devanagari letter or sign this table can hold")]
    Unsupported { line: usize, cp: u32 },
    #[error("line {line}: U+{cp:04X} listed twice")]
    DuplicateCodepoint { line: usize, cp: u32 },
    #[error("line {line}: WX {wx:?} already used")]
    DuplicateWx { line: usize, wx: String },
    #[error("line {line}: WX image must be non-empty ASCII")]
    BadWx { line: usize },
    #[error("vowel sign U+{0:04X} has no independent vowel with the same WX image")]
    OrphanSign(u32),
    #[error("table has no entry for the inherent vowel U+0905")]
    NoInherentVowel,
    #[error("cannot read table: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    Consonant,
    Vowel,
    VowelSign,
    Modifier,
    Virama,
}

fn classify(cp: u32) -> Option<Class> {
    match cp {
        0x900..=0x903 => Some(Class::Modifier),
        0x904..=0x914 | 0x960 | 0x961 | 0x972..=0x977 => Some(Class::Vowel),
        0x915..=0x939 | 0x978..=0x97F => Some(Class::Consonant),
        0x93A | 0x93B | 0x93E..=0x94C | 0x94E | 0x94F | 0x955..=0x957 | 0x962 | 0x963 => {
            Some(Class::VowelSign)
        }
        0x94D => Some(Class::Virama),
        _ => None,
    }
}

/// The codepoint ↔ WX mapping with the inherent-vowel rules.
#[derive(Debug, Clone)]
pub struct TransliterationTable {
    encode: HashMap<char, (Class, String)>,
    decode: HashMap<String, (Class, char)>,
    vowel_sign: HashMap<char, char>,
    inherent: String,
    has_virama: bool,
    max_key_chars: usize,
}

/// What `to_wx` left untouched.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TranslitReport {
    pub passthrough: usize,
    pub by_char: BTreeMap<char, usize>,
}

impl TranslitReport {
    fn note(&mut self, c: char) {
        self.passthrough += 1;
        *self.by_char.entry(c).or_default() += 1;
    }
}

impl TransliterationTable {
    /// Parses `CODEPOINT<TAB>WX` lines. Lines starting with `#` are comments.
    /// An empty WX field is allowed only for the virama.
    pub fn parse(data: &str) -> Result<Self, TableError> {
        let mut encode = HashMap::new();
        let mut decode: HashMap<String, (Class, char)> = HashMap::new();
        let mut has_virama = false;
        for (i, raw) in data.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let (cp_text, wx) = raw.split_once('\t').ok_or(TableError::Malformed { line })?;
            let hex = cp_text
                .trim()
                .strip_prefix("U+")
                .or_else(|| cp_text.trim().strip_prefix("u+"))
                .unwrap_or(cp_text.trim());
            let cp = u32::from_str_radix(hex, 16)
                .ok()
                .and_then(|v| char::from_u32(v).map(|c| (v, c)));
            let (cp, ch) = cp.ok_or_else(|| TableError::BadCodepoint {
                line,
                text: cp_text.to_owned(),
            })?;
            let class = classify(cp).ok_or(TableError::Unsupported { line, cp })?;
            if encode.contains_key(&ch) {
                return Err(TableError::DuplicateCodepoint { line, cp });
            }
            if class == Class::Virama {
                if !wx.is_empty() {
                    return Err(TableError::BadWx { line });
                }
                has_virama = true;
                encode.insert(ch, (class, String::new()));
                continue;
            }
            if wx.is_empty() || !wx.is_ascii() || wx.chars().any(char::is_whitespace) {
                return Err(TableError::BadWx { line });
            }
            // Vowel signs share their image with the independent vowel.
            if class != Class::VowelSign {
                if decode.contains_key(wx) {
                    return Err(TableError::DuplicateWx {
                        line,
                        wx: wx.to_owned(),
                    });
                }
                decode.insert(wx.to_owned(), (class, ch));
            }
            encode.insert(ch, (class, wx.to_owned()));
        }

        let mut vowel_sign = HashMap::new();
        let mut sign_images = HashMap::new();
        for (&ch, (class, wx)) in &encode {
            if *class == Class::VowelSign {
                match decode.get(wx) {
                    Some(&(Class::Vowel, v)) => {
                        if sign_images.insert(wx.clone(), ch).is_some() {
                            return Err(TableError::DuplicateWx {
                                line: 0,
                                wx: wx.clone(),
                            });
                        }
                        vowel_sign.insert(v, ch);
                    }
                    _ => return Err(TableError::OrphanSign(ch as u32)),
                }
            }
        }
        let inherent = encode
            .get(&INHERENT)
            .map(|(_, wx)| wx.clone())
            .ok_or(TableError::NoInherentVowel)?;
        let max_key_chars = decode.keys().map(|k| k.chars().count()).max().unwrap_or(1);
        Ok(TransliterationTable {
            encode,
            decode,
            vowel_sign,
            inherent,
            has_virama,
            max_key_chars,
        })
    }

    pub fn load(path: &Path) -> Result<Self, TableError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// The table shipped in `data/wx.tsv`.
    pub fn standard() -> &'static TransliterationTable {
        static TABLE: OnceLock<TransliterationTable> = OnceLock::new();
        TABLE.get_or_init(|| TransliterationTable::parse(DEFAULT_TABLE).expect("bundled WX table"))
    }

    /// Every codepoint the table covers, in codepoint order.
    pub fn covered(&self) -> Vec<char> {
        let mut v: Vec<char> = self.encode.keys().copied().collect();
        v.sort_unstable();
        v
    }

    pub fn image(&self, c: char) -> Option<&str> {
        self.encode.get(&c).map(|(_, wx)| wx.as_str())
    }

    fn class(&self, c: char) -> Option<Class> {
        self.encode.get(&c).map(|(class, _)| *class)
    }

    fn virama_needs_escape(&self, next: Option<char>) -> bool {
        match next {
            Some(VIRAMA) | Some(NUKTA) => true,
            Some(c) => self.class(c) == Some(Class::Vowel),
            None => false,
        }
    }

    pub fn to_wx(&self, text: &str) -> String {
        self.to_wx_with_report(text).0
    }

    pub fn to_wx_with_report(&self, text: &str) -> (String, TranslitReport) {
        let mut out = String::with_capacity(text.len());
        let mut report = TranslitReport::default();
        let mut pending = false;
        let mut chars = text.chars().peekable();
        while let Some(c) = chars.next() {
            let class = self.class(c);
            if pending {
                match class {
                    Some(Class::VowelSign) => {
                        out.push_str(&self.encode[&c].1);
                        pending = false;
                        continue;
                    }
                    Some(Class::Virama) => {
                        if self.virama_needs_escape(chars.peek().copied()) {
                            out.push(VIRAMA);
                        }
                        pending = false;
                        continue;
                    }
                    _ if c == NUKTA => {
                        out.push(c);
                        report.note(c);
                        continue;
                    }
                    _ => {
                        out.push_str(&self.inherent);
                        pending = false;
                    }
                }
            }
            match class {
                Some(Class::Consonant) => {
                    out.push_str(&self.encode[&c].1);
                    pending = true;
                }
                Some(Class::Vowel) | Some(Class::Modifier) => out.push_str(&self.encode[&c].1),
                // Stray vowel signs and viramas have no consonant to attach to.
                _ => {
                    out.push(c);
                    report.note(c);
                }
            }
        }
        if pending {
            out.push_str(&self.inherent);
        }
        (out, report)
    }

    fn longest_match<'a>(&self, rest: &'a str) -> Option<(&'a str, Class, char)> {
        let ends = rest
            .char_indices()
            .map(|(i, c)| i + c.len_utf8())
            .take(self.max_key_chars)
            .collect::<Vec<_>>();
        ends.iter().rev().find_map(|&end| {
            self.decode
                .get(&rest[..end])
                .map(|&(class, ch)| (&rest[..end], class, ch))
        })
    }

    pub fn from_wx(&self, text: &str) -> String {
        let mut out = String::with_capacity(text.len() * 3);
        let mut pending = false;
        let mut rest = text;
        while !rest.is_empty() {
            let next = rest.chars().next().unwrap();
            if pending {
                if next == NUKTA {
                    out.push(next);
                    rest = &rest[next.len_utf8()..];
                    continue;
                }
                if next == VIRAMA {
                    out.push(VIRAMA);
                    rest = &rest[next.len_utf8()..];
                    pending = false;
                    continue;
                }
                pending = false;
                match self.longest_match(rest) {
                    Some((key, Class::Vowel, INHERENT)) => {
                        rest = &rest[key.len()..];
                        continue;
                    }
                    Some((key, Class::Vowel, v)) if self.vowel_sign.contains_key(&v) => {
                        out.push(self.vowel_sign[&v]);
                        rest = &rest[key.len()..];
                        continue;
                    }
                    _ => {
                        if self.has_virama {
                            out.push(VIRAMA);
                        }
                    }
                }
            }
            match self.longest_match(rest) {
                Some((key, class, ch)) => {
                    out.push(ch);
                    pending = class == Class::Consonant;
                    rest = &rest[key.len()..];
                }
                None => {
                    out.push(next);
                    rest = &rest[next.len_utf8()..];
                }
            }
        }
        if pending && self.has_virama {
            out.push(VIRAMA);
        }
        out
    }
}

/// Encodes with the standard table.
pub fn to_wx(text: &str) -> String {
    TransliterationTable::standard().to_wx(text)
}

/// Decodes with the standard table.
pub fn from_wx(text: &str) -> String {
    TransliterationTable::standard().from_wx(text)
}
