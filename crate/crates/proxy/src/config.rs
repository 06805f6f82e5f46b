//! Line-oriented `key = value` configuration.
//!
//! ```text
//! # the gisting proxy
//! port = 8080
//! timeout_s = 15
//! max_body_bytes = 5242880
//! max_glosses = 3
//! user_scripts = latin
//! ellipsis_marker = …
//! default_target_lang = en
//! profile.es = profiles/es.profile
//! profile.en = profiles/en.profile
//! lexicon.es-en = lexicons/es-en.tsv
//! rules.es = rules/es.rules
//! unspaced = ja
//! ```
//!
//! Full-line `#` comments and blank lines are ignored; unknown keys are
//! startup errors. Relative paths resolve against the config file's
//! directory.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use thiserror::Error;
use url::Url;

use gist_core::script::Script;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("config line {line}: {msg}")]
    Bad { line: usize, msg: String },
}

#[derive(Debug, Clone)]
pub struct ProxyConfig {
    pub bind: String,
    pub port: u16,
    pub timeout_s: u64,
    pub max_body_bytes: usize,
    pub max_glosses: usize,
    pub user_scripts: BTreeSet<Script>,
    pub ellipsis_marker: String,
    pub margin_threshold: f64,
    pub max_word_len: usize,
    pub default_target_lang: String,
    /// Public base URL used when rewriting links; defaults to the bind
    /// address and port.
    pub proxy_base: Option<Url>,
    pub profiles: Vec<(String, PathBuf)>,
    /// Per-language log prior added to identification scores; uniform
    /// (zero) when absent.
    pub priors: Vec<(String, f64)>,
    /// (source language, target language, path)
    pub lexicons: Vec<(String, String, PathBuf)>,
    pub rules: Vec<(String, PathBuf)>,
    /// Languages written without word delimiters; their segments go through
    /// dictionary-driven segmentation instead of whitespace tokenization.
    pub unspaced: BTreeSet<String>,
}

impl Default for ProxyConfig {
    fn default() -> ProxyConfig {
        ProxyConfig {
            bind: "127.0.0.1".to_string(),
            port: 8080,
            timeout_s: 15,
            max_body_bytes: 5 * 1024 * 1024,
            max_glosses: 3,
            user_scripts: BTreeSet::from([Script::Latin]),
            ellipsis_marker: "\u{2026}".to_string(),
            margin_threshold: gist_core::langid::DEFAULT_MARGIN_THRESHOLD,
            max_word_len: gist_core::tokenizer::DEFAULT_MAX_WORD_LEN,
            default_target_lang: "en".to_string(),
            proxy_base: None,
            profiles: Vec::new(),
            lexicons: Vec::new(),
            rules: Vec::new(),
            unspaced: BTreeSet::new(),
        }
    }
}

impl ProxyConfig {
    /// The base URL links are rewritten against.
    pub fn proxy_base(&self) -> Url {
        self.proxy_base.clone().unwrap_or_else(|| {
            Url::parse(&format!("http://{}:{}/", self.bind, self.port))
                .expect("bind/port form a valid URL")
        })
    }
}

pub fn load_config(path: &Path) -> Result<ProxyConfig, ConfigError> {
    let src = std::fs::read_to_string(path)?;
    let base_dir = path.parent().unwrap_or_else(|| Path::new("."));
    parse_config_str(&src, base_dir)
}

pub fn parse_config_str(src: &str, base_dir: &Path) -> Result<ProxyConfig, ConfigError> {
    let mut config = ProxyConfig::default();
    for (idx, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = idx + 1;
        let bad = |msg: String| ConfigError::Bad { line: lineno, msg };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad("expected `key = value`".into()))?;
        let key = key.trim();
        let value = value.trim();
        let path_value = || resolve(base_dir, value);
        match key {
            "bind" => config.bind = value.to_string(),
            "port" => {
                config.port = value
                    .parse()
                    .map_err(|_| bad(format!("bad port `{value}`")))?
            }
            "timeout_s" => {
                config.timeout_s = value
                    .parse()
                    .map_err(|_| bad(format!("bad timeout_s `{value}`")))?
            }
            "max_body_bytes" => {
                config.max_body_bytes = value
                    .parse()
                    .map_err(|_| bad(format!("bad max_body_bytes `{value}`")))?
            }
            "max_glosses" => {
                let n: usize = value
                    .parse()
                    .map_err(|_| bad(format!("bad max_glosses `{value}`")))?;
                if n == 0 {
                    return Err(bad("max_glosses must be at least 1".into()));
                }
                config.max_glosses = n;
            }
            "user_scripts" => {
                let mut scripts = BTreeSet::new();
                for name in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let script: Script = name.parse().map_err(|e| bad(format!("{e}")))?;
                    scripts.insert(script);
                }
                if scripts.is_empty() {
                    return Err(bad("user_scripts must name at least one script".into()));
                }
                config.user_scripts = scripts;
            }
            "ellipsis_marker" => config.ellipsis_marker = value.to_string(),
            "margin_threshold" => {
                config.margin_threshold = value
                    .parse()
                    .map_err(|_| bad(format!("bad margin_threshold `{value}`")))?
            }
            "max_word_len" => {
                config.max_word_len = value
                    .parse()
                    .map_err(|_| bad(format!("bad max_word_len `{value}`")))?
            }
            "default_target_lang" => config.default_target_lang = value.to_string(),
            "proxy_base" => {
                config.proxy_base =
                    Some(Url::parse(value).map_err(|e| bad(format!("bad proxy_base: {e}")))?)
            }
            "unspaced" => {
                config.unspaced = value
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect()
            }
            _ => {
                if let Some(lang) = key.strip_prefix("profile.") {
                    config.profiles.push((lang.to_string(), path_value()));
                } else if let Some(pair) = key.strip_prefix("lexicon.") {
                    let (src_lang, dst_lang) = pair.split_once('-').ok_or_else(|| {
                        bad(format!(
                            "lexicon key must be `lexicon.<src>-<dst>`, got `{key}`"
                        ))
                    })?;
                    config.lexicons.push((
                        src_lang.to_string(),
                        dst_lang.to_string(),
                        path_value(),
                    ));
                } else if let Some(lang) = key.strip_prefix("rules.") {
                    config.rules.push((lang.to_string(), path_value()));
                } else {
                    return Err(bad(format!("unknown key `{key}`")));
                }
            }
        }
    }
    Ok(config)
}

fn resolve(base_dir: &Path, value: &str) -> PathBuf {
    let p = Path::new(value);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base_dir.join(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_key_kinds() {
        let src = "# comment\n\
                   port = 9090\n\
                   timeout_s = 3\n\
                   max_body_bytes = 1000\n\
                   max_glosses = 2\n\
                   user_scripts = latin, cyrillic\n\
                   ellipsis_marker = ...\n\
                   default_target_lang = en\n\
                   profile.es = p/es.profile\n\
                   lexicon.es-en = l/es-en.tsv\n\
                   rules.es = r/es.rules\n\
                   unspaced = ja, zh\n";
        let config = parse_config_str(src, Path::new("/base")).unwrap();
        assert_eq!(config.port, 9090);
        assert_eq!(config.timeout_s, 3);
        assert_eq!(config.max_glosses, 2);
        assert_eq!(config.user_scripts.len(), 2);
        assert_eq!(config.ellipsis_marker, "...");
        assert_eq!(config.profiles[0].1, Path::new("/base/p/es.profile"));
        assert_eq!(
            config.lexicons[0],
            ("es".into(), "en".into(), PathBuf::from("/base/l/es-en.tsv"))
        );
        assert_eq!(config.rules[0].0, "es");
        assert!(config.unspaced.contains("ja"));
    }

    #[test]
    fn unknown_keys_fail_with_line() {
        let err = parse_config_str("port = 1\nbogus = x\n", Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(err.to_string().contains("bogus"), "{err}");
    }

    #[test]
    fn bad_values_fail() {
        assert!(parse_config_str("port = many\n", Path::new(".")).is_err());
        assert!(parse_config_str("max_glosses = 0\n", Path::new(".")).is_err());
        assert!(parse_config_str("user_scripts = klingon\n", Path::new(".")).is_err());
        assert!(parse_config_str("lexicon.es = x\n", Path::new(".")).is_err());
        assert!(parse_config_str("just a line\n", Path::new(".")).is_err());
    }

    #[test]
    fn default_proxy_base_uses_bind_and_port() {
        let config = parse_config_str("port = 1234\n", Path::new(".")).unwrap();
        assert_eq!(config.proxy_base().as_str(), "http://127.0.0.1:1234/");
        let config =
            parse_config_str("proxy_base = http://gist.example/\n", Path::new(".")).unwrap();
        assert_eq!(config.proxy_base().as_str(), "http://gist.example/");
    }
}
