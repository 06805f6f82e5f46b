//! Language-dependent word identification and normalization.
//!
//! Space-delimited languages go through [`tokenize_spaced`] and then
//! [`normalize`], which applies per-language rewrite rules: enclitic
//! splitting (Spanish `damelo` → `da + me + lo`) and inflectional
//! suffix-to-root candidates (`da` → try `dar` too). Unspaced scripts go
//! through [`segment_unspaced`], a greedy longest-match over the lexicon's
//! headwords standing in for a full morphological analyzer.
//!
//! Rule tables are data files, not code: `split:<suffix>-><part>+<part>`
//! strips a suffix and appends the listed parts after the remaining stem
//! (rules re-apply to the stem, so stacked enclitics unwind), and
//! `root:<suffix>-><suffix>` generates an extra lookup candidate. Rules
//! apply in file order; `#` starts a comment.

use std::path::Path;

use thiserror::Error;

use crate::lexicon::Lexicon;

/// Default cap on headword length for the unspaced matcher.
pub const DEFAULT_MAX_WORD_LEN: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Word,
    Punctuation,
    Number,
}

/// A token with its character span within the segment. Tokens plus the
/// skipped whitespace tile the segment exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    /// Character offsets (start, end) within the segment text.
    pub span: (usize, usize),
    pub kind: TokenKind,
}

impl Token {
    pub fn word(surface: &str) -> Token {
        Token {
            surface: surface.to_string(),
            span: (0, surface.chars().count()),
            kind: TokenKind::Word,
        }
    }
}

fn kind_of(c: char) -> Option<TokenKind> {
    if c.is_whitespace() {
        None
    } else if c.is_numeric() {
        Some(TokenKind::Number)
    } else if c.is_alphabetic() {
        Some(TokenKind::Word)
    } else {
        Some(TokenKind::Punctuation)
    }
}

/// Tokenizes space-delimited text: maximal runs of letters become word
/// tokens, digit runs number tokens, anything else that is not whitespace
/// punctuation tokens.
pub fn tokenize_spaced(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut current: Option<(TokenKind, usize, String)> = None;
    let mut pos = 0usize;
    for c in text.chars() {
        let kind = kind_of(c);
        match (&mut current, kind) {
            (Some((k, _, surface)), Some(nk)) if *k == nk => surface.push(c),
            (cur, next) => {
                if let Some((k, start, surface)) = cur.take() {
                    tokens.push(Token {
                        surface,
                        span: (start, pos),
                        kind: k,
                    });
                }
                if let Some(nk) = next {
                    *cur = Some((nk, pos, c.to_string()));
                }
            }
        }
        pos += 1;
    }
    if let Some((k, start, surface)) = current {
        tokens.push(Token {
            surface,
            span: (start, pos),
            kind: k,
        });
    }
    tokens
}

/// One sub-lexeme of a normalized token, with its dictionary lookup forms
/// in priority order. The first candidate is always the surface form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedPart {
    pub surface: String,
    pub candidates: Vec<String>,
}

/// Result of normalizing one word token: clitic splitting may produce more
/// than one part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizationResult {
    pub parts: Vec<NormalizedPart>,
}

#[derive(Debug, Error)]
pub enum RuleTableError {
    #[error("rule table i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("rule table parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Ordered rewrite rules for one language.
#[derive(Debug, Clone, Default)]
pub struct RuleTable {
    splits: Vec<(String, Vec<String>)>,
    roots: Vec<(String, String)>,
}

impl RuleTable {
    /// No rules: normalization passes every token through unchanged. Also
    /// the right table for a language with no rule file.
    pub fn empty() -> RuleTable {
        RuleTable::default()
    }

    pub fn is_empty(&self) -> bool {
        self.splits.is_empty() && self.roots.is_empty()
    }

    pub fn parse(src: &str) -> Result<RuleTable, RuleTableError> {
        let mut table = RuleTable::default();
        for (idx, raw) in src.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let bad = |msg: &str| RuleTableError::Parse {
                line: lineno,
                msg: msg.to_string(),
            };
            let (kind, rest) = line.split_once(':').ok_or_else(|| bad("missing `:`"))?;
            let (lhs, rhs) = rest.split_once("->").ok_or_else(|| bad("missing `->`"))?;
            let lhs = lhs.trim();
            if lhs.is_empty() {
                return Err(bad("empty pattern"));
            }
            match kind.trim() {
                "split" => {
                    let parts: Vec<String> = rhs
                        .split('+')
                        .map(|p| p.trim().to_string())
                        .filter(|p| !p.is_empty())
                        .collect();
                    if parts.is_empty() {
                        return Err(bad("split rule needs at least one part"));
                    }
                    table.splits.push((lhs.to_string(), parts));
                }
                "root" => {
                    let repl = rhs.trim();
                    if repl.is_empty() {
                        return Err(bad("root rule needs a replacement suffix"));
                    }
                    table.roots.push((lhs.to_string(), repl.to_string()));
                }
                other => return Err(bad(&format!("unknown rule kind `{other}`"))),
            }
        }
        Ok(table)
    }

    pub fn load_from_path(path: &Path) -> Result<RuleTable, RuleTableError> {
        RuleTable::parse(&std::fs::read_to_string(path)?)
    }
}

/// Applies the rule table to a word token: enclitic splitting first, then
/// root-form candidates per part. Unmatched tokens (or an empty table, as
/// for an unknown language) pass through with the surface as sole
/// candidate. Non-word tokens always pass through.
pub fn normalize(token: &Token, rules: &RuleTable) -> NormalizationResult {
    if token.kind != TokenKind::Word {
        return NormalizationResult {
            parts: vec![NormalizedPart {
                surface: token.surface.clone(),
                candidates: vec![token.surface.clone()],
            }],
        };
    }
    let lower = token.surface.to_lowercase();
    let parts = split_clitics(&lower, rules)
        .into_iter()
        .map(|p| {
            let candidates = root_candidates(&p, rules);
            NormalizedPart {
                surface: p,
                candidates,
            }
        })
        .collect();
    NormalizationResult { parts }
}

fn split_clitics(word: &str, rules: &RuleTable) -> Vec<String> {
    for (suffix, parts) in &rules.splits {
        if word.len() > suffix.len() && word.ends_with(suffix.as_str()) {
            let stem = &word[..word.len() - suffix.len()];
            if stem.chars().count() >= 2 {
                let mut out = split_clitics(stem, rules);
                out.extend(parts.iter().cloned());
                return out;
            }
        }
    }
    vec![word.to_string()]
}

fn root_candidates(part: &str, rules: &RuleTable) -> Vec<String> {
    let mut candidates = vec![part.to_string()];
    for (suffix, repl) in &rules.roots {
        if part.len() > suffix.len() && part.ends_with(suffix.as_str()) {
            let cand = format!("{}{}", &part[..part.len() - suffix.len()], repl);
            if !candidates.contains(&cand) {
                candidates.push(cand);
            }
        }
    }
    candidates
}

/// Greedy longest-match segmentation for scripts without word delimiters:
/// at each position take the longest lexicon headword (at most
/// `max_word_len` characters) that matches; when nothing matches, emit a
/// single-character token and advance. With an empty lexicon every
/// character becomes a token.
pub fn segment_unspaced(text: &str, lexicon: &Lexicon, max_word_len: usize) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut pos = 0;
    let cap = max_word_len.min(lexicon.max_headword_chars());
    while pos < chars.len() {
        let c = chars[pos];
        if c.is_whitespace() {
            pos += 1;
            continue;
        }
        let limit = cap.min(chars.len() - pos);
        let mut matched = None;
        for len in (1..=limit).rev() {
            let cand: String = chars[pos..pos + len].iter().collect();
            if lexicon.contains_headword(&cand) {
                matched = Some((cand, len));
                break;
            }
        }
        match matched {
            Some((surface, len)) => {
                tokens.push(Token {
                    surface,
                    span: (pos, pos + len),
                    kind: TokenKind::Word,
                });
                pos += len;
            }
            None => {
                tokens.push(Token {
                    surface: c.to_string(),
                    span: (pos, pos + 1),
                    kind: kind_of(c).unwrap_or(TokenKind::Punctuation),
                });
                pos += 1;
            }
        }
    }
    tokens
}

/// The demonstration Spanish rule table: the nine enclitic pronouns and the
/// common -ar/-er/-ir inflection suffixes, enough for `damelo` → `da me lo`
/// and `da` → `dar`.
pub fn spanish_demo_rules() -> RuleTable {
    RuleTable::parse(
        "split:nos->nos\n\
         split:los->los\n\
         split:las->las\n\
         split:les->les\n\
         split:me->me\n\
         split:te->te\n\
         split:lo->lo\n\
         split:la->la\n\
         split:le->le\n\
         root:amos->ar\n\
         root:as->ar\n\
         root:a->ar\n\
         root:es->er\n\
         root:es->ir\n\
         root:e->er\n\
         root:e->ir\n",
    )
    .expect("built-in table parses")
}
