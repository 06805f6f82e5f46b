//! Bilingual dictionary loading and lookup.
//!
//! Two line formats are accepted and normalize into the same [`Lexicon`]:
//!
//! * plain TSV: `headword<TAB>gloss|gloss|...`
//! * EDICT-like: `headword [reading] /gloss/gloss/` (the reading is
//!   optional and ignored; `EntL...` entry ids and bare `(P)` priority
//!   markers are dropped from the gloss list)
//!
//! Gloss order is meaningful: the glosser shows the first *n*, so the file
//! author controls salience. Headwords of bicameral scripts are
//! case-folded at load and lookup. Duplicate headwords merge, concatenating
//! glosses in file order and dropping exact duplicates; malformed lines are
//! counted, not fatal.

use std::collections::HashMap;
use std::path::Path;

use thiserror::Error;

use crate::tokenizer::NormalizationResult;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexEntry {
    pub headword: String,
    /// Target-language equivalents in source-file order; never empty.
    pub glosses: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexFormat {
    Tsv,
    EdictLike,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub entries: usize,
    pub merged: usize,
    pub malformed: usize,
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("lexicon i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("lexicon has no valid entries ({malformed} malformed lines)")]
    NoEntries { malformed: usize },
}

/// An in-memory bilingual dictionary. Immutable after load; shared read
/// access from any number of request handlers is safe.
#[derive(Debug, Clone)]
pub struct Lexicon {
    source_lang: String,
    target_lang: String,
    /// Case-folded headword → entry. Probing every length from the longest
    /// headword down gives the longest-prefix behaviour the unspaced
    /// matcher needs.
    entries: HashMap<String, LexEntry>,
    max_headword_chars: usize,
}

impl Lexicon {
    pub fn new(source_lang: &str, target_lang: &str) -> Lexicon {
        Lexicon {
            source_lang: source_lang.to_string(),
            target_lang: target_lang.to_string(),
            entries: HashMap::new(),
            max_headword_chars: 0,
        }
    }

    pub fn source_lang(&self) -> &str {
        &self.source_lang
    }

    pub fn target_lang(&self) -> &str {
        &self.target_lang
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_headword_chars(&self) -> usize {
        self.max_headword_chars
    }

    /// Inserts or merges an entry; returns true when it merged into an
    /// existing headword. Empty glosses are dropped; an entry is only
    /// created if at least one gloss remains.
    pub fn insert(&mut self, headword: &str, glosses: Vec<String>) -> bool {
        let glosses: Vec<String> = glosses
            .into_iter()
            .map(|g| g.trim().to_string())
            .filter(|g| !g.is_empty())
            .collect();
        if glosses.is_empty() || headword.trim().is_empty() {
            return false;
        }
        let headword = headword.trim();
        let key = fold(headword);
        self.max_headword_chars = self.max_headword_chars.max(key.chars().count());
        match self.entries.get_mut(&key) {
            Some(entry) => {
                for g in glosses {
                    if !entry.glosses.contains(&g) {
                        entry.glosses.push(g);
                    }
                }
                true
            }
            None => {
                self.entries.insert(
                    key,
                    LexEntry {
                        headword: headword.to_string(),
                        glosses,
                    },
                );
                false
            }
        }
    }

    pub fn get(&self, form: &str) -> Option<&LexEntry> {
        self.entries.get(&fold(form))
    }

    pub fn contains_headword(&self, form: &str) -> bool {
        self.entries.contains_key(&fold(form))
    }

    /// Resolves each normalized part to its first matching entry: lemma
    /// candidates are tried in order and the first hit wins; later
    /// candidates are never consulted.
    pub fn lookup<'a>(&'a self, norm: &NormalizationResult) -> Vec<Option<&'a LexEntry>> {
        norm.parts
            .iter()
            .map(|part| part.candidates.iter().find_map(|c| self.get(c)))
            .collect()
    }

    /// Parses dictionary text in the given format.
    pub fn load_from_str(
        src: &str,
        format: LexFormat,
        source_lang: &str,
        target_lang: &str,
    ) -> Result<(Lexicon, LoadStats), LexiconError> {
        let mut lex = Lexicon::new(source_lang, target_lang);
        let mut stats = LoadStats::default();
        for raw in src.lines() {
            let line = raw.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parsed = match format {
                LexFormat::Tsv => parse_tsv_line(line),
                LexFormat::EdictLike => parse_edict_line(line),
            };
            match parsed {
                Some((headword, glosses)) => {
                    if lex.insert(&headword, glosses) {
                        stats.merged += 1;
                    }
                }
                None => stats.malformed += 1,
            }
        }
        if lex.is_empty() {
            return Err(LexiconError::NoEntries {
                malformed: stats.malformed,
            });
        }
        stats.entries = lex.len();
        Ok((lex, stats))
    }

    /// Loads a dictionary file, detecting the format from the first data
    /// line: a tab means TSV, otherwise the EDICT-like slash format.
    pub fn load_from_path(
        path: &Path,
        source_lang: &str,
        target_lang: &str,
    ) -> Result<(Lexicon, LoadStats), LexiconError> {
        let src = std::fs::read_to_string(path)?;
        let format = detect_format(&src);
        Lexicon::load_from_str(&src, format, source_lang, target_lang)
    }
}

fn fold(s: &str) -> String {
    s.to_lowercase()
}

pub fn detect_format(src: &str) -> LexFormat {
    for line in src.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        return if line.contains('\t') {
            LexFormat::Tsv
        } else {
            LexFormat::EdictLike
        };
    }
    LexFormat::Tsv
}

fn parse_tsv_line(line: &str) -> Option<(String, Vec<String>)> {
    let (head, rest) = line.split_once('\t')?;
    let head = head.trim();
    if head.is_empty() {
        return None;
    }
    let glosses: Vec<String> = rest
        .split('|')
        .map(|g| g.trim().to_string())
        .filter(|g| !g.is_empty())
        .collect();
    if glosses.is_empty() {
        return None;
    }
    Some((head.to_string(), glosses))
}

fn parse_edict_line(line: &str) -> Option<(String, Vec<String>)> {
    let slash = line.find('/')?;
    let before = line[..slash].trim();
    let head = before.split_whitespace().next()?;
    let glosses: Vec<String> = line[slash..]
        .split('/')
        .map(str::trim)
        .filter(|g| !g.is_empty() && *g != "(P)" && !is_entry_id(g))
        .map(str::to_string)
        .collect();
    if glosses.is_empty() {
        return None;
    }
    Some((head.to_string(), glosses))
}

fn is_entry_id(g: &str) -> bool {
    g.strip_prefix("EntL")
        .map(|rest| !rest.is_empty() && rest.chars().all(|c| c.is_ascii_alphanumeric()))
        .unwrap_or(false)
}
