//! Character n-gram language identification.
//!
//! Segments cut out of a page are often just a few words and cannot be
//! relied on to contain function words, so identification works on smoothed
//! character n-gram statistics. A [`LanguageProfile`] is trained offline
//! from a corpus and shipped as a data file; at request time the page text
//! is scored against every loaded profile and the best one wins.
//!
//! Profiles store raw n-gram counts; add-one smoothing is applied at
//! scoring time over a fixed notional character alphabet shared by every
//! profile, so any string gets a finite score and scores stay comparable
//! across languages whose training alphabets differ wildly in size (26
//! letters vs. thousands of kanji).

use std::collections::{BTreeMap, HashMap};
use std::io::{self, BufRead, Write};
use std::path::Path;

use thiserror::Error;

/// Default n-gram order.
pub const DEFAULT_ORDER: usize = 3;

/// Default confidence threshold: the best score must beat the runner-up by
/// this many nats for the identification to count as confident.
pub const DEFAULT_MARGIN_THRESHOLD: f64 = 2.0;

/// Minimum training corpus length in characters.
pub const MIN_CORPUS_CHARS: usize = 100;

/// Start-of-text padding symbol (appears only in conditioning contexts).
pub const PAD_BEGIN: char = '\u{2}';
/// End-of-text symbol (part of the prediction alphabet).
pub const PAD_END: char = '\u{3}';

/// Size of the notional character alphabet the add-one smoothing spreads
/// its mass over. Fixed and shared across profiles: per-context
/// probabilities sum to one over this alphabet, and an unseen n-gram costs
/// the same under every profile regardless of training alphabet size.
pub const SMOOTHING_ALPHABET: u32 = 65_536;

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("training corpus has {have} characters, need at least {need}")]
    CorpusTooShort { have: usize, need: usize },
    #[error("n-gram order must be at least 1")]
    BadOrder,
    #[error("profile i/o: {0}")]
    Io(#[from] io::Error),
    #[error("profile parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdentifyError {
    #[error("no language profiles loaded")]
    NoProfiles,
    #[error("cannot identify empty text")]
    EmptyText,
}

/// Smoothed conditional character n-gram model for one language.
#[derive(Debug, Clone)]
pub struct LanguageProfile {
    lang: String,
    n: usize,
    prior: f64,
    /// Full n-gram → raw count. Ordered so profile files are diffable.
    counts: BTreeMap<String, u32>,
    /// (n-1)-gram context → total count of continuations.
    context_totals: HashMap<String, u32>,
}

impl LanguageProfile {
    pub fn lang(&self) -> &str {
        &self.lang
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Log prior probability added to every score; 0 (uniform, no
    /// preference) unless configured.
    pub fn prior(&self) -> f64 {
        self.prior
    }

    pub fn set_prior(&mut self, prior: f64) {
        self.prior = prior;
    }

    pub fn ngram_count(&self, ngram: &str) -> u32 {
        self.counts.get(ngram).copied().unwrap_or(0)
    }

    pub fn context_total(&self, context: &str) -> u32 {
        self.context_totals.get(context).copied().unwrap_or(0)
    }

    /// Add-one-smoothed log probability of `ngram` (context = all but the
    /// last character): (count + 1) / (context total + [`SMOOTHING_ALPHABET`]).
    pub fn ngram_log_prob(&self, ngram: &str) -> f64 {
        let split = ngram.char_indices().last().map(|(i, _)| i).unwrap_or(0);
        let context = &ngram[..split];
        let count = self.ngram_count(ngram) as f64;
        let total = self.context_total(context) as f64;
        ((count + 1.0) / (total + SMOOTHING_ALPHABET as f64)).ln()
    }

    /// Log-likelihood of `text` under this profile plus the prior.
    pub fn score(&self, text: &str) -> f64 {
        let mut padded: Vec<char> = Vec::with_capacity(text.chars().count() + self.n);
        padded.extend(std::iter::repeat_n(PAD_BEGIN, self.n - 1));
        padded.extend(text.chars());
        padded.push(PAD_END);
        let mut sum = self.prior;
        let mut gram = String::with_capacity(self.n * 4);
        for window in padded.windows(self.n) {
            gram.clear();
            gram.extend(window.iter());
            sum += self.ngram_log_prob(&gram);
        }
        sum
    }

    /// Writes the profile in the versioned line format:
    /// `langid-profile v1 <lang> n=<order>` then one
    /// `<escaped-ngram>\t<count>` line per n-gram, sorted.
    pub fn save<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "langid-profile v1 {} n={}", self.lang, self.n)?;
        for (gram, count) in &self.counts {
            writeln!(w, "{}\t{}", escape_ngram(gram), count)?;
        }
        Ok(())
    }

    pub fn save_to_path(&self, path: &Path) -> io::Result<()> {
        let file = std::fs::File::create(path)?;
        self.save(io::BufWriter::new(file))
    }

    /// Loads a profile file; log-probabilities are recomputed from the raw
    /// counts so the files stay human-editable.
    pub fn load<R: BufRead>(r: R) -> Result<LanguageProfile, ProfileError> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .transpose()?
            .ok_or_else(|| ProfileError::Parse {
                line: 1,
                msg: "empty file".into(),
            })?;
        let mut parts = header.split_whitespace();
        match (parts.next(), parts.next()) {
            (Some("langid-profile"), Some("v1")) => {}
            _ => {
                return Err(ProfileError::Parse {
                    line: 1,
                    msg: "expected header `langid-profile v1 <lang> n=<order>`".into(),
                })
            }
        }
        let lang = parts
            .next()
            .ok_or_else(|| ProfileError::Parse {
                line: 1,
                msg: "missing language code".into(),
            })?
            .to_string();
        let n: usize = parts
            .next()
            .and_then(|s| s.strip_prefix("n="))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ProfileError::Parse {
                line: 1,
                msg: "missing or bad n=<order>".into(),
            })?;
        if n < 1 {
            return Err(ProfileError::BadOrder);
        }
        let mut counts = BTreeMap::new();
        for (idx, line) in lines.enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 2;
            let (gram_raw, count_raw) =
                line.split_once('\t').ok_or_else(|| ProfileError::Parse {
                    line: lineno,
                    msg: "expected <ngram>\\t<count>".into(),
                })?;
            let gram = unescape_ngram(gram_raw)
                .map_err(|msg| ProfileError::Parse { line: lineno, msg })?;
            if gram.chars().count() != n {
                return Err(ProfileError::Parse {
                    line: lineno,
                    msg: format!("n-gram `{gram_raw}` does not have {n} characters"),
                });
            }
            let count: u32 = count_raw.trim().parse().map_err(|_| ProfileError::Parse {
                line: lineno,
                msg: format!("bad count `{count_raw}`"),
            })?;
            counts.insert(gram, count);
        }
        if counts.is_empty() {
            return Err(ProfileError::Parse {
                line: 2,
                msg: "profile has no n-gram counts".into(),
            });
        }
        Ok(LanguageProfile::from_counts(lang, n, counts))
    }

    pub fn load_from_path(path: &Path) -> Result<LanguageProfile, ProfileError> {
        let file = std::fs::File::open(path)?;
        LanguageProfile::load(io::BufReader::new(file))
    }

    fn from_counts(lang: String, n: usize, counts: BTreeMap<String, u32>) -> LanguageProfile {
        let mut context_totals: HashMap<String, u32> = HashMap::new();
        for (gram, count) in &counts {
            let split = gram.char_indices().last().map(|(i, _)| i).unwrap_or(0);
            *context_totals.entry(gram[..split].to_string()).or_insert(0) += count;
        }
        LanguageProfile {
            lang,
            n,
            prior: 0.0,
            counts,
            context_totals,
        }
    }
}

/// Trains a profile from a corpus. The corpus must have at least
/// [`MIN_CORPUS_CHARS`] characters; the model pads with begin/end symbols
/// and applies add-one smoothing at scoring time.
pub fn train_profile(corpus: &str, lang: &str, n: usize) -> Result<LanguageProfile, ProfileError> {
    if n < 1 {
        return Err(ProfileError::BadOrder);
    }
    // The padding symbols are control characters; drop any that appear
    // literally so they cannot be confused with the model's own.
    let chars: Vec<char> = corpus
        .chars()
        .filter(|c| !matches!(*c, PAD_BEGIN | PAD_END))
        .collect();
    if chars.len() < MIN_CORPUS_CHARS {
        return Err(ProfileError::CorpusTooShort {
            have: chars.len(),
            need: MIN_CORPUS_CHARS,
        });
    }
    let mut padded: Vec<char> = Vec::with_capacity(chars.len() + n);
    padded.extend(std::iter::repeat_n(PAD_BEGIN, n - 1));
    padded.extend(chars);
    padded.push(PAD_END);
    let mut counts: BTreeMap<String, u32> = BTreeMap::new();
    for window in padded.windows(n) {
        let gram: String = window.iter().collect();
        *counts.entry(gram).or_insert(0) += 1;
    }
    Ok(LanguageProfile::from_counts(lang.to_string(), n, counts))
}

/// The outcome of identifying one piece of text.
#[derive(Debug, Clone, PartialEq)]
pub struct Identification {
    pub lang: String,
    /// Log-likelihood (plus prior) under the winning profile.
    pub score: f64,
    /// Gap to the runner-up; infinite when only one profile is loaded.
    pub margin: f64,
    pub confident: bool,
}

/// Scores `text` against every profile and returns the best language.
/// Ties break toward the lexicographically smallest language code, so the
/// result does not depend on profile order.
pub fn identify(
    text: &str,
    profiles: &[LanguageProfile],
    margin_threshold: f64,
) -> Result<Identification, IdentifyError> {
    if profiles.is_empty() {
        return Err(IdentifyError::NoProfiles);
    }
    if text.is_empty() {
        return Err(IdentifyError::EmptyText);
    }
    let mut scored: Vec<(&LanguageProfile, f64)> =
        profiles.iter().map(|p| (p, p.score(text))).collect();
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.0.lang.cmp(&b.0.lang))
    });
    let (best, best_score) = (scored[0].0, scored[0].1);
    let margin = if scored.len() > 1 {
        best_score - scored[1].1
    } else {
        f64::INFINITY
    };
    Ok(Identification {
        lang: best.lang.clone(),
        score: best_score,
        margin,
        confident: margin >= margin_threshold,
    })
}

/// Escapes an n-gram for the profile file: control characters, whitespace
/// and the backslash become `\u{...}`, everything else stays literal.
fn escape_ngram(gram: &str) -> String {
    let mut out = String::with_capacity(gram.len());
    for c in gram.chars() {
        if c.is_control() || c.is_whitespace() || c == '\\' {
            out.push_str(&format!("\\u{{{:x}}}", c as u32));
        } else {
            out.push(c);
        }
    }
    out
}

fn unescape_ngram(s: &str) -> Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(pos) = rest.find('\\') {
        out.push_str(&rest[..pos]);
        let tail = &rest[pos..];
        let hex_end = tail
            .strip_prefix("\\u{")
            .and_then(|t| t.find('}').map(|e| (t, e)));
        match hex_end {
            Some((t, e)) => {
                let cp =
                    u32::from_str_radix(&t[..e], 16).map_err(|_| format!("bad escape in `{s}`"))?;
                let c = char::from_u32(cp).ok_or_else(|| format!("bad code point in `{s}`"))?;
                out.push(c);
                rest = &t[e + 1..];
            }
            None => return Err(format!("bad escape in `{s}`")),
        }
    }
    out.push_str(rest);
    Ok(out)
}
