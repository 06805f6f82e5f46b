//! The page pipeline: decode → segment → identify → tokenize → look up →
//! gloss → reassemble → rewrite links → inject the coverage banner.

use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use thiserror::Error;
use url::Url;

use gist_core::encoding::{detect_charset, to_internal, Charset, CharsetEvidence};
use gist_core::glosser::{gloss_token, render_segment, GlossOutcome, GlossPolicy, GlossedToken};
use gist_core::langid::{identify, LanguageProfile, ProfileError};
use gist_core::lexicon::{Lexicon, LexiconError};
use gist_core::script::Script;
use gist_core::segmenter::{reassemble, segment, ReassembleError, Segment};
use gist_core::tokenizer::{
    normalize, segment_unspaced, tokenize_spaced, RuleTable, RuleTableError, Token, TokenKind,
};

use crate::config::ProxyConfig;
use crate::links::{rewrite_links, LinkStats};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("loading profile {path}: {source}")]
    Profile {
        path: String,
        #[source]
        source: ProfileError,
    },
    #[error("loading lexicon {path}: {source}")]
    Lexicon {
        path: String,
        #[source]
        source: LexiconError,
    },
    #[error("loading rule table {path}: {source}")]
    Rules {
        path: String,
        #[source]
        source: RuleTableError,
    },
    #[error("profile {path} is for `{file_lang}` but config key names `{key_lang}`")]
    ProfileLangMismatch {
        path: String,
        file_lang: String,
        key_lang: String,
    },
}

/// Everything the pipeline needs, loaded once and shared immutably.
#[derive(Debug)]
pub struct Services {
    pub profiles: Vec<LanguageProfile>,
    pub lexicons: Vec<Lexicon>,
    pub rules: HashMap<String, RuleTable>,
    pub unspaced: BTreeSet<String>,
    pub policy: GlossPolicy,
    pub margin_threshold: f64,
    pub max_word_len: usize,
    pub proxy_base: Url,
    pub default_target_lang: String,
}

impl Services {
    pub fn from_config(config: &ProxyConfig) -> Result<Services, ServiceError> {
        let mut profiles = Vec::new();
        for (lang, path) in &config.profiles {
            let profile =
                LanguageProfile::load_from_path(path).map_err(|source| ServiceError::Profile {
                    path: path.display().to_string(),
                    source,
                })?;
            if profile.lang() != lang {
                return Err(ServiceError::ProfileLangMismatch {
                    path: path.display().to_string(),
                    file_lang: profile.lang().to_string(),
                    key_lang: lang.clone(),
                });
            }
            profiles.push(profile);
        }
        let mut lexicons = Vec::new();
        for (src, dst, path) in &config.lexicons {
            let (lex, stats) = Lexicon::load_from_path(path, src, dst).map_err(|source| {
                ServiceError::Lexicon {
                    path: path.display().to_string(),
                    source,
                }
            })?;
            eprintln!(
                "lexicon {src}->{dst} from {}: {} entries, {} merged, {} malformed",
                path.display(),
                stats.entries,
                stats.merged,
                stats.malformed
            );
            lexicons.push(lex);
        }
        let mut rules = HashMap::new();
        for (lang, path) in &config.rules {
            let table = RuleTable::load_from_path(path).map_err(|source| ServiceError::Rules {
                path: path.display().to_string(),
                source,
            })?;
            rules.insert(lang.clone(), table);
        }
        Ok(Services {
            profiles,
            lexicons,
            rules,
            unspaced: config.unspaced.clone(),
            policy: GlossPolicy {
                max_glosses: config.max_glosses,
                user_scripts: config.user_scripts.clone(),
                ellipsis_marker: config.ellipsis_marker.clone(),
            },
            margin_threshold: config.margin_threshold,
            max_word_len: config.max_word_len,
            proxy_base: config.proxy_base(),
            default_target_lang: config.default_target_lang.clone(),
        })
    }

    pub fn lexicon_for(&self, source: &str, target: &str) -> Option<&Lexicon> {
        self.lexicons
            .iter()
            .find(|l| l.source_lang() == source && l.target_lang() == target)
    }

    /// True when at least one loaded lexicon glosses into `lang`.
    pub fn supports_target(&self, lang: &str) -> bool {
        self.lexicons.iter().any(|l| l.target_lang() == lang)
    }

    /// Target languages offered on the entry form, sorted.
    pub fn target_langs(&self) -> Vec<String> {
        let mut langs: BTreeSet<String> = self
            .lexicons
            .iter()
            .map(|l| l.target_lang().to_string())
            .collect();
        langs.insert(self.default_target_lang.clone());
        langs.into_iter().collect()
    }
}

/// Optional per-request tweaks to the configured gloss policy.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PolicyOverrides {
    pub max_glosses: Option<usize>,
    pub ellipsis_marker: Option<String>,
}

impl PolicyOverrides {
    pub fn is_empty(&self) -> bool {
        self.max_glosses.is_none() && self.ellipsis_marker.is_none()
    }

    fn apply(&self, base: &GlossPolicy) -> GlossPolicy {
        GlossPolicy {
            max_glosses: self.max_glosses.unwrap_or(base.max_glosses).max(1),
            user_scripts: base.user_scripts.clone(),
            ellipsis_marker: self
                .ellipsis_marker
                .clone()
                .unwrap_or_else(|| base.ellipsis_marker.clone()),
        }
    }
}

/// Per-page counters shown in the banner and aggregated by the server.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PageStats {
    pub segments: usize,
    pub segments_gisted: usize,
    /// Sub-lexeme units that went through the gloss policy (clitic parts
    /// count individually).
    pub tokens: usize,
    pub glossed: usize,
    pub unknown_cognate: usize,
    pub elided: usize,
    pub passthrough: usize,
    /// Languages identified across segments, including the user's own.
    pub languages: BTreeSet<String>,
    pub links: LinkStats,
}

#[derive(Debug, Clone)]
pub struct GistResult {
    pub html: String,
    pub stats: PageStats,
    pub elapsed: Duration,
}

#[derive(Debug, Error)]
pub enum GistError {
    #[error("page declares unsupported charset `{0}` and is not plain ASCII")]
    UnsupportedCharset(String),
    #[error("no loaded dictionary glosses into `{0}`")]
    UnsupportedTargetLang(String),
    #[error("page structure error: {0}")]
    Reassemble(#[from] ReassembleError),
}

/// Runs the whole pipeline over fetched bytes with the configured policy.
pub fn gist_document(
    bytes: &[u8],
    transport_charset: Option<&str>,
    base_url: &Url,
    user_lang: &str,
    services: &Services,
) -> Result<GistResult, GistError> {
    gist_document_with(
        bytes,
        transport_charset,
        base_url,
        user_lang,
        services,
        &PolicyOverrides::default(),
    )
}

/// Runs the whole pipeline over fetched bytes, with optional per-request
/// policy overrides.
pub fn gist_document_with(
    bytes: &[u8],
    transport_charset: Option<&str>,
    base_url: &Url,
    user_lang: &str,
    services: &Services,
    overrides: &PolicyOverrides,
) -> Result<GistResult, GistError> {
    let started = Instant::now();
    if !services.supports_target(user_lang) {
        return Err(GistError::UnsupportedTargetLang(user_lang.to_string()));
    }
    let policy = overrides.apply(&services.policy);

    let evidence = CharsetEvidence::gather(bytes, transport_charset);
    check_declared_charsets(bytes, &evidence)?;
    let charset = detect_charset(bytes, &evidence);
    let text = to_internal(bytes, charset);

    let (mut skeleton, segments) = segment(&text.text, base_url.clone());

    let mut stats = PageStats {
        segments: segments.len(),
        ..PageStats::default()
    };

    let identifications = identify_segments(&segments, services);
    let doc_lang = document_majority(&identifications);

    let mut replacements: HashMap<usize, String> = HashMap::new();
    for (seg, ident) in segments.iter().zip(&identifications) {
        let lang = match ident {
            Some((lang, confident)) => {
                if *confident {
                    Some(lang.clone())
                } else {
                    doc_lang.clone().or_else(|| Some(lang.clone()))
                }
            }
            None => fallback_language(services, user_lang),
        };
        match lang {
            Some(lang) if lang != user_lang => {
                stats.languages.insert(lang.clone());
                if let Some(lexicon) = services.lexicon_for(&lang, user_lang) {
                    let rendered = gist_segment(seg, &lang, lexicon, services, &policy, &mut stats);
                    replacements.insert(seg.id, rendered);
                    stats.segments_gisted += 1;
                } else {
                    replacements.insert(seg.id, seg.text.clone());
                }
            }
            Some(lang) => {
                stats.languages.insert(lang);
                replacements.insert(seg.id, seg.text.clone());
            }
            None => {
                replacements.insert(seg.id, seg.text.clone());
            }
        }
    }

    stats.links = rewrite_links(&mut skeleton, &services.proxy_base, user_lang);
    let body = reassemble(&skeleton, &replacements)?;
    let html = inject_banner(&body, &stats, user_lang);

    Ok(GistResult {
        html,
        stats,
        elapsed: started.elapsed(),
    })
}

/// A page whose declared charsets are all unsupported is refused unless its
/// body is pure ASCII (which every supported charset reads identically).
/// Wrong-but-supported declarations follow the normal precedence rules.
fn check_declared_charsets(bytes: &[u8], evidence: &CharsetEvidence) -> Result<(), GistError> {
    let declared: Vec<&str> = [
        evidence.document_hint.as_deref(),
        evidence.transport_hint.as_deref(),
    ]
    .into_iter()
    .flatten()
    .collect();
    if declared.is_empty() {
        return Ok(());
    }
    if declared.iter().any(|l| Charset::parse(l).is_ok()) {
        return Ok(());
    }
    if bytes.iter().all(|&b| b < 0x80) {
        return Ok(());
    }
    Err(GistError::UnsupportedCharset(declared[0].to_string()))
}

fn identify_segments(segments: &[Segment], services: &Services) -> Vec<Option<(String, bool)>> {
    segments
        .iter()
        .map(|seg| {
            if services.profiles.is_empty() {
                return None;
            }
            identify(&seg.text, &services.profiles, services.margin_threshold)
                .ok()
                .map(|id| (id.lang, id.confident))
        })
        .collect()
}

/// Page-level majority language: confident identifications vote first; if
/// none are confident, all identifications vote. Ties break toward the
/// lexicographically smallest code.
fn document_majority(identifications: &[Option<(String, bool)>]) -> Option<String> {
    let tally = |confident_only: bool| -> Option<String> {
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for ident in identifications.iter().flatten() {
            if !confident_only || ident.1 {
                *counts.entry(ident.0.as_str()).or_insert(0) += 1;
            }
        }
        counts
            .into_iter()
            .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(a.0)))
            .map(|(lang, _)| lang.to_string())
    };
    tally(true).or_else(|| tally(false))
}

/// With no profiles loaded, assume the page is in the single language we
/// can gloss into the user's, when that is unambiguous.
fn fallback_language(services: &Services, user_lang: &str) -> Option<String> {
    let mut sources = services
        .lexicons
        .iter()
        .filter(|l| l.target_lang() == user_lang)
        .map(|l| l.source_lang().to_string());
    let first = sources.next()?;
    if sources.next().is_some() {
        None
    } else {
        Some(first)
    }
}

fn gist_segment(
    seg: &Segment,
    lang: &str,
    lexicon: &Lexicon,
    services: &Services,
    policy: &GlossPolicy,
    stats: &mut PageStats,
) -> String {
    static EMPTY_RULES: std::sync::OnceLock<RuleTable> = std::sync::OnceLock::new();
    let rules = services
        .rules
        .get(lang)
        .unwrap_or_else(|| EMPTY_RULES.get_or_init(RuleTable::empty));

    let tokens = if services.unspaced.contains(lang) {
        segment_unspaced(&seg.text, lexicon, services.max_word_len)
    } else {
        tokenize_spaced(&seg.text)
    };

    let mut glossed: Vec<GlossedToken> = Vec::with_capacity(tokens.len());
    for token in &tokens {
        if token.kind != TokenKind::Word {
            glossed.push(gloss_token(None, token, policy, Script::Other));
            continue;
        }
        let norm = normalize(token, rules);
        let entries = lexicon.lookup(&norm);
        if norm.parts.len() == 1 {
            glossed.push(gloss_token(
                entries[0],
                token,
                policy,
                Script::dominant(&token.surface),
            ));
        } else {
            for (part, entry) in norm.parts.iter().zip(entries) {
                let part_token = Token {
                    surface: part.surface.clone(),
                    span: token.span,
                    kind: TokenKind::Word,
                };
                glossed.push(gloss_token(
                    entry,
                    &part_token,
                    policy,
                    Script::dominant(&part.surface),
                ));
            }
        }
    }
    for g in &glossed {
        stats.tokens += 1;
        match g.outcome {
            GlossOutcome::SingleGloss(_) | GlossOutcome::MultiGloss(_) => stats.glossed += 1,
            GlossOutcome::UnknownCognate(_) => stats.unknown_cognate += 1,
            GlossOutcome::UnknownElided => stats.elided += 1,
            GlossOutcome::Passthrough(_) => stats.passthrough += 1,
        }
    }
    render_segment(&glossed)
}

/// Injects the coverage banner right after `<body>` (or at the top of the
/// document when there is none). Deterministic: no timing information.
fn inject_banner(html: &str, stats: &PageStats, user_lang: &str) -> String {
    let languages = stats
        .languages
        .iter()
        .cloned()
        .collect::<Vec<_>>()
        .join(", ");
    let banner = format!(
        "<div style=\"border:1px solid #996;background:#ffc;color:#000;\
         padding:4px 8px;font:13px sans-serif\">gisting proxy &rarr; {user}: \
         {gisted}/{segments} segments glossed; {tokens} words \
         ({glossed} glossed, {cognate} shown as-is, {elided} elided, {passthrough} other); \
         languages seen: {languages}; links through proxy: {proxied}</div>\n",
        user = user_lang,
        gisted = stats.segments_gisted,
        segments = stats.segments,
        tokens = stats.tokens,
        glossed = stats.glossed,
        cognate = stats.unknown_cognate,
        elided = stats.elided,
        passthrough = stats.passthrough,
        languages = if languages.is_empty() {
            "none".to_string()
        } else {
            languages
        },
        proxied = stats.links.proxied,
    );
    let lower = html.to_ascii_lowercase();
    if let Some(body_at) = lower.find("<body") {
        if let Some(gt) = lower[body_at..].find('>') {
            let insert_at = body_at + gt + 1;
            let mut out = String::with_capacity(html.len() + banner.len());
            out.push_str(&html[..insert_at]);
            out.push_str(&banner);
            out.push_str(&html[insert_at..]);
            return out;
        }
    }
    format!("{banner}{html}")
}
