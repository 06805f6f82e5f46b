//! Coarse writing-script classification.
//!
//! The gloss policy shows an unknown word as-is when it is written in a
//! script the user reads, and elides it otherwise. That decision only needs
//! a coarse per-token script, so this is a small range table over the
//! scripts the proxy is likely to meet, not a full Unicode script database.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Script {
    Latin,
    Greek,
    Cyrillic,
    Hebrew,
    Arabic,
    Devanagari,
    Thai,
    Hiragana,
    Katakana,
    Han,
    Hangul,
    Other,
}

impl Script {
    /// Script of a single character, or `None` for characters shared across
    /// scripts (digits, punctuation, whitespace).
    pub fn of_char(c: char) -> Option<Script> {
        let cp = c as u32;
        let script = match cp {
            0x0041..=0x005A | 0x0061..=0x007A => Script::Latin,
            0x00C0..=0x024F | 0x1E00..=0x1EFF => Script::Latin,
            0x0370..=0x03FF | 0x1F00..=0x1FFF => Script::Greek,
            0x0400..=0x052F => Script::Cyrillic,
            0x0590..=0x05FF => Script::Hebrew,
            0x0600..=0x06FF | 0x0750..=0x077F => Script::Arabic,
            0x0900..=0x097F => Script::Devanagari,
            0x0E00..=0x0E7F => Script::Thai,
            0x3040..=0x309F => Script::Hiragana,
            0x30A0..=0x30FF | 0x31F0..=0x31FF | 0xFF66..=0xFF9F => Script::Katakana,
            0x3400..=0x4DBF | 0x4E00..=0x9FFF | 0xF900..=0xFAFF => Script::Han,
            0x1100..=0x11FF | 0x3130..=0x318F | 0xAC00..=0xD7AF => Script::Hangul,
            _ => return None,
        };
        Some(script)
    }

    /// Dominant script of a string: the most frequent per-character script,
    /// ties resolved toward the earliest such character. `Other` when no
    /// character carries a script.
    pub fn dominant(text: &str) -> Script {
        let mut counts: Vec<(Script, usize, usize)> = Vec::new();
        for (pos, c) in text.chars().enumerate() {
            if let Some(s) = Script::of_char(c) {
                match counts.iter_mut().find(|(sc, _, _)| *sc == s) {
                    Some(entry) => entry.1 += 1,
                    None => counts.push((s, 1, pos)),
                }
            }
        }
        counts
            .into_iter()
            .max_by(|a, b| a.1.cmp(&b.1).then(b.2.cmp(&a.2)))
            .map(|(s, _, _)| s)
            .unwrap_or(Script::Other)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownScript(pub String);

impl fmt::Display for UnknownScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown script name `{}`", self.0)
    }
}

impl std::error::Error for UnknownScript {}

impl FromStr for Script {
    type Err = UnknownScript;

    fn from_str(s: &str) -> Result<Script, UnknownScript> {
        match s.trim().to_ascii_lowercase().as_str() {
            "latin" => Ok(Script::Latin),
            "greek" => Ok(Script::Greek),
            "cyrillic" => Ok(Script::Cyrillic),
            "hebrew" => Ok(Script::Hebrew),
            "arabic" => Ok(Script::Arabic),
            "devanagari" => Ok(Script::Devanagari),
            "thai" => Ok(Script::Thai),
            "hiragana" => Ok(Script::Hiragana),
            "katakana" => Ok(Script::Katakana),
            "han" | "kanji" => Ok(Script::Han),
            "hangul" => Ok(Script::Hangul),
            other => Err(UnknownScript(other.to_string())),
        }
    }
}
