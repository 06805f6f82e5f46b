//! Gloss presentation policy and segment rendering.
//!
//! The policy for a looked-up word:
//!
//! * one dictionary gloss → show it plainly;
//! * several glosses → show up to `max_glosses` of them, parenthesized and
//!   comma separated, e.g. `(doctor's office, clinic, dispensary)`;
//! * not in the dictionary but written in a script the user reads → show
//!   the word itself (it may be a useful cognate);
//! * not in the dictionary otherwise → an ellipsis, so unfamiliar scripts
//!   distract as little as possible. Adjacent elided words collapse into a
//!   single ellipsis.
//!
//! Punctuation and numbers pass through unchanged. Word order is preserved;
//! this layer performs no reordering and emits plain text only — wrapping
//! glosses in markup is the proxy's job.

use std::collections::BTreeSet;

use crate::lexicon::LexEntry;
use crate::script::Script;
use crate::tokenizer::{Token, TokenKind};

/// How glosses are presented. `max_glosses` must be at least 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlossPolicy {
    pub max_glosses: usize,
    /// Scripts the user reads; unknown words in these scripts are shown
    /// as-is rather than elided.
    pub user_scripts: BTreeSet<Script>,
    pub ellipsis_marker: String,
}

impl Default for GlossPolicy {
    fn default() -> GlossPolicy {
        GlossPolicy {
            max_glosses: 3,
            user_scripts: BTreeSet::from([Script::Latin]),
            ellipsis_marker: "\u{2026}".to_string(),
        }
    }
}

/// What happened to one token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GlossOutcome {
    SingleGloss(String),
    /// Glosses shown, truncated to `max_glosses`.
    MultiGloss(Vec<String>),
    /// Unknown word shown as-is because its script is one the user reads.
    UnknownCognate(String),
    UnknownElided,
    /// Punctuation or number, passed through unchanged.
    Passthrough(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlossedToken {
    pub outcome: GlossOutcome,
    pub kind: TokenKind,
    /// Plain-text rendering of this token.
    pub rendered: String,
}

/// Applies the presentation policy to one token and its (optional)
/// dictionary entry. `token_script` is the dominant script of the surface
/// form, standing in for the charset-identity test of pre-Unicode pages.
pub fn gloss_token(
    entry: Option<&LexEntry>,
    token: &Token,
    policy: &GlossPolicy,
    token_script: Script,
) -> GlossedToken {
    if token.kind != TokenKind::Word {
        return GlossedToken {
            outcome: GlossOutcome::Passthrough(token.surface.clone()),
            kind: token.kind,
            rendered: token.surface.clone(),
        };
    }
    match entry {
        Some(e) if e.glosses.len() == 1 => GlossedToken {
            outcome: GlossOutcome::SingleGloss(e.glosses[0].clone()),
            kind: token.kind,
            rendered: e.glosses[0].clone(),
        },
        Some(e) => {
            let shown: Vec<String> = e
                .glosses
                .iter()
                .take(policy.max_glosses.max(1))
                .cloned()
                .collect();
            let rendered = if shown.len() == 1 {
                shown[0].clone()
            } else {
                format!("({})", shown.join(", "))
            };
            GlossedToken {
                outcome: GlossOutcome::MultiGloss(shown),
                kind: token.kind,
                rendered,
            }
        }
        None => {
            if policy.user_scripts.contains(&token_script) {
                GlossedToken {
                    outcome: GlossOutcome::UnknownCognate(token.surface.clone()),
                    kind: token.kind,
                    rendered: token.surface.clone(),
                }
            } else {
                GlossedToken {
                    outcome: GlossOutcome::UnknownElided,
                    kind: token.kind,
                    rendered: policy.ellipsis_marker.clone(),
                }
            }
        }
    }
}

/// Joins rendered tokens into segment text: single spaces between tokens,
/// punctuation attached to the preceding form, and runs of elided tokens
/// collapsed into one ellipsis.
pub fn render_segment(glossed: &[GlossedToken]) -> String {
    let mut out = String::new();
    let mut prev_elided = false;
    for g in glossed {
        let elided = matches!(g.outcome, GlossOutcome::UnknownElided);
        if elided && prev_elided {
            continue;
        }
        let attach = g.kind == TokenKind::Punctuation;
        if !out.is_empty() && !attach {
            out.push(' ');
        }
        out.push_str(&g.rendered);
        prev_elided = elided;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(glosses: &[&str]) -> LexEntry {
        LexEntry {
            headword: "h".to_string(),
            glosses: glosses.iter().map(|g| g.to_string()).collect(),
        }
    }

    fn word(surface: &str) -> Token {
        Token::word(surface)
    }

    #[test]
    fn multiple_glosses_are_parenthesized_and_comma_separated() {
        let e = entry(&["doctor's office", "clinic", "dispensary"]);
        let g = gloss_token(
            Some(&e),
            &word("医院"),
            &GlossPolicy::default(),
            Script::Han,
        );
        assert_eq!(g.rendered, "(doctor's office, clinic, dispensary)");
        assert!(matches!(g.outcome, GlossOutcome::MultiGloss(ref v) if v.len() == 3));
    }

    #[test]
    fn unknown_word_in_user_script_shows_as_is() {
        let g = gloss_token(
            None,
            &word("bonjour"),
            &GlossPolicy::default(),
            Script::dominant("bonjour"),
        );
        assert_eq!(g.rendered, "bonjour");
        assert!(matches!(g.outcome, GlossOutcome::UnknownCognate(_)));
    }

    #[test]
    fn unknown_word_in_foreign_script_is_elided() {
        let g = gloss_token(
            None,
            &word("です"),
            &GlossPolicy::default(),
            Script::dominant("です"),
        );
        assert_eq!(g.rendered, "\u{2026}");
        assert_eq!(g.outcome, GlossOutcome::UnknownElided);
    }

    #[test]
    fn single_gloss_has_no_parentheses() {
        let e = entry(&["give"]);
        let g = gloss_token(
            Some(&e),
            &word("dar"),
            &GlossPolicy::default(),
            Script::Latin,
        );
        assert_eq!(g.rendered, "give");
        assert!(matches!(g.outcome, GlossOutcome::SingleGloss(_)));
    }

    #[test]
    fn gloss_list_truncates_at_max() {
        let e = entry(&["a", "b", "c", "d"]);
        let g = gloss_token(Some(&e), &word("x"), &GlossPolicy::default(), Script::Latin);
        assert_eq!(g.rendered, "(a, b, c)");
    }

    #[test]
    fn max_glosses_changes_truncation_not_category() {
        let e = entry(&["a", "b", "c", "d"]);
        for max in 1..=6 {
            let policy = GlossPolicy {
                max_glosses: max,
                ..GlossPolicy::default()
            };
            let g = gloss_token(Some(&e), &word("x"), &policy, Script::Latin);
            match g.outcome {
                GlossOutcome::MultiGloss(shown) => {
                    assert_eq!(shown.len(), max.min(4));
                }
                other => panic!("category changed to {other:?} at max={max}"),
            }
        }
    }

    #[test]
    fn rendered_multi_gloss_matches_the_grammar() {
        let e = entry(&["g1", "g2", "g3"]);
        let g = gloss_token(Some(&e), &word("x"), &GlossPolicy::default(), Script::Latin);
        let inner = g
            .rendered
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .expect("parenthesized");
        let parts: Vec<&str> = inner.split(", ").collect();
        assert!(parts.len() >= 2 && parts.len() <= 3);
    }

    #[test]
    fn render_joins_with_single_spaces() {
        let tokens: Vec<GlossedToken> = ["give", "me", "it"]
            .iter()
            .map(|g| GlossedToken {
                outcome: GlossOutcome::SingleGloss(g.to_string()),
                kind: TokenKind::Word,
                rendered: g.to_string(),
            })
            .collect();
        assert_eq!(render_segment(&tokens), "give me it");
    }

    #[test]
    fn adjacent_elided_tokens_collapse() {
        let policy = GlossPolicy::default();
        let elided = gloss_token(None, &word("です"), &policy, Script::Hiragana);
        let single = GlossedToken {
            outcome: GlossOutcome::SingleGloss("clinic".into()),
            kind: TokenKind::Word,
            rendered: "clinic".into(),
        };
        let out = render_segment(&[elided.clone(), elided, single]);
        assert_eq!(out, "\u{2026} clinic");
    }

    #[test]
    fn punctuation_attaches_without_space() {
        let give = GlossedToken {
            outcome: GlossOutcome::SingleGloss("give".into()),
            kind: TokenKind::Word,
            rendered: "give".into(),
        };
        let comma = GlossedToken {
            outcome: GlossOutcome::Passthrough(",".into()),
            kind: TokenKind::Punctuation,
            rendered: ",".into(),
        };
        let me = GlossedToken {
            outcome: GlossOutcome::SingleGloss("me".into()),
            kind: TokenKind::Word,
            rendered: "me".into(),
        };
        assert_eq!(render_segment(&[give, comma, me]), "give, me");
    }

    #[test]
    fn empty_segment_renders_empty() {
        assert_eq!(render_segment(&[]), "");
    }

    #[test]
    fn numbers_pass_through() {
        let t = Token {
            surface: "42".into(),
            span: (0, 2),
            kind: TokenKind::Number,
        };
        let g = gloss_token(None, &t, &GlossPolicy::default(), Script::Other);
        assert_eq!(g.rendered, "42");
        assert!(matches!(g.outcome, GlossOutcome::Passthrough(_)));
    }
}
