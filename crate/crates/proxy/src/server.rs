//! The HTTP service: entry form, /gist, /health and /stats endpoints.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::Html;
use axum::routing::get;
use axum::Router;
use thiserror::Error;
use url::Url;

use gist_core::segmenter::escape_text;

use crate::config::ProxyConfig;
use crate::fetch::{build_client, fetch, FetchError};
use crate::links::unwrap_proxied;
use crate::pipeline::{gist_document_with, GistError, PolicyOverrides, Services};

#[derive(Debug, Error)]
pub enum ServeError {
    #[error(transparent)]
    Services(#[from] crate::pipeline::ServiceError),
    #[error("cannot bind {addr}: {source}")]
    Bind {
        addr: String,
        #[source]
        source: std::io::Error,
    },
    #[error("server error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Default)]
struct Counters {
    requests: AtomicU64,
    pages_gisted: AtomicU64,
    errors: AtomicU64,
    segments: AtomicU64,
    tokens: AtomicU64,
    glossed: AtomicU64,
    unknown_shown: AtomicU64,
    elided: AtomicU64,
    links_proxied: AtomicU64,
}

struct AppState {
    services: Services,
    config: ProxyConfig,
    client: reqwest::Client,
    counters: Counters,
}

/// Loads all resources and runs the proxy until interrupted.
pub fn serve(config: ProxyConfig) -> Result<(), ServeError> {
    let services = Services::from_config(&config)?;
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?;
    runtime.block_on(run(config, services))
}

async fn run(config: ProxyConfig, services: Services) -> Result<(), ServeError> {
    let addr = format!("{}:{}", config.bind, config.port);
    let client = build_client(Duration::from_secs(config.timeout_s));
    let state = Arc::new(AppState {
        services,
        config,
        client,
        counters: Counters::default(),
    });
    let app = Router::new()
        .route("/", get(entry_form))
        .route("/gist", get(handle_gist))
        .route("/health", get(health))
        .route("/stats", get(stats))
        .with_state(state);
    let listener = tokio::net::TcpListener::bind(&addr)
        .await
        .map_err(|source| ServeError::Bind {
            addr: addr.clone(),
            source,
        })?;
    eprintln!("gisting proxy listening on http://{addr}/");
    axum::serve(listener, app).await?;
    Ok(())
}

async fn entry_form(State(state): State<Arc<AppState>>) -> Html<String> {
    let options: String = state
        .services
        .target_langs()
        .iter()
        .map(|lang| {
            let selected = if *lang == state.services.default_target_lang {
                " selected"
            } else {
                ""
            };
            format!("<option value=\"{lang}\"{selected}>{lang}</option>")
        })
        .collect();
    Html(format!(
        "<!doctype html>\n<html><head><title>gisting proxy</title></head>\n\
         <body>\n<h1>gisting proxy</h1>\n\
         <p>Fetches a page, replaces its words with glosses in your language,\n\
         and keeps further navigation on the proxy.</p>\n\
         <form action=\"/gist\" method=\"get\">\n\
         <label>Page URL: <input type=\"text\" name=\"url\" size=\"60\" \
         placeholder=\"http://example.com/\"></label>\n\
         <label>Gloss into: <select name=\"to\">{options}</select></label>\n\
         <input type=\"submit\" value=\"Gist it\">\n\
         </form>\n</body></html>\n"
    ))
}

async fn handle_gist(
    State(state): State<Arc<AppState>>,
    Query(params): Query<HashMap<String, String>>,
) -> (StatusCode, Html<String>) {
    state.counters.requests.fetch_add(1, Ordering::Relaxed);
    let user_lang = params
        .get("to")
        .cloned()
        .unwrap_or_else(|| state.services.default_target_lang.clone());
    let Some(raw_url) = params.get("url") else {
        return error_page(
            &state,
            StatusCode::BAD_REQUEST,
            "missing `url` parameter",
            "",
        );
    };
    let parsed = match Url::parse(raw_url) {
        Ok(u) => u,
        Err(e) => {
            return error_page(
                &state,
                StatusCode::BAD_REQUEST,
                &format!("bad `url` parameter `{}`", escape_text(raw_url)),
                &e.to_string(),
            )
        }
    };
    // Gisting an already-proxied URL unwraps instead of nesting.
    let target = unwrap_proxied(&parsed, &state.services.proxy_base).unwrap_or(parsed);
    if !matches!(target.scheme(), "http" | "https") {
        return error_page(
            &state,
            StatusCode::BAD_REQUEST,
            &format!("unsupported URL scheme `{}`", target.scheme()),
            "only http and https pages can be gisted",
        );
    }
    if !state.services.supports_target(&user_lang) {
        return error_page(
            &state,
            StatusCode::BAD_REQUEST,
            &format!("no dictionary glosses into `{}`", escape_text(&user_lang)),
            "configure a lexicon.<src>-<dst> entry for this language",
        );
    }
    let fetched = match fetch(&state.client, &target, state.config.max_body_bytes).await {
        Ok(f) => f,
        Err(e) => {
            let status = match &e {
                FetchError::Status { .. } => StatusCode::BAD_GATEWAY,
                FetchError::Timeout => StatusCode::GATEWAY_TIMEOUT,
                FetchError::TooLarge { .. } => StatusCode::BAD_GATEWAY,
                FetchError::UnsupportedContentType(_) => StatusCode::UNSUPPORTED_MEDIA_TYPE,
                FetchError::Request(_) => StatusCode::BAD_GATEWAY,
            };
            return error_page(
                &state,
                status,
                &format!("could not fetch {}", escape_text(target.as_str())),
                &e.to_string(),
            );
        }
    };
    // per-request policy overrides: ?n= caps the gloss list, ?ellipsis=
    // changes the elision marker
    let overrides = PolicyOverrides {
        max_glosses: params.get("n").and_then(|v| v.parse().ok()),
        ellipsis_marker: params.get("ellipsis").cloned(),
    };
    let result = gist_document_with(
        &fetched.bytes,
        fetched.transport_charset.as_deref(),
        &fetched.final_url,
        &user_lang,
        &state.services,
        &overrides,
    );
    match result {
        Ok(result) => {
            let c = &state.counters;
            c.pages_gisted.fetch_add(1, Ordering::Relaxed);
            c.segments
                .fetch_add(result.stats.segments as u64, Ordering::Relaxed);
            c.tokens
                .fetch_add(result.stats.tokens as u64, Ordering::Relaxed);
            c.glossed
                .fetch_add(result.stats.glossed as u64, Ordering::Relaxed);
            c.unknown_shown
                .fetch_add(result.stats.unknown_cognate as u64, Ordering::Relaxed);
            c.elided
                .fetch_add(result.stats.elided as u64, Ordering::Relaxed);
            c.links_proxied
                .fetch_add(result.stats.links.proxied as u64, Ordering::Relaxed);
            (StatusCode::OK, Html(result.html))
        }
        Err(e) => {
            let status = match &e {
                GistError::UnsupportedCharset(_) => StatusCode::UNSUPPORTED_MEDIA_TYPE,
                GistError::UnsupportedTargetLang(_) => StatusCode::BAD_REQUEST,
                GistError::Reassemble(_) => StatusCode::INTERNAL_SERVER_ERROR,
            };
            error_page(
                &state,
                status,
                &format!("cannot gist {}", escape_text(target.as_str())),
                &e.to_string(),
            )
        }
    }
}

fn error_page(
    state: &AppState,
    status: StatusCode,
    title: &str,
    detail: &str,
) -> (StatusCode, Html<String>) {
    state.counters.errors.fetch_add(1, Ordering::Relaxed);
    let detail_html = if detail.is_empty() {
        String::new()
    } else {
        format!("<p>{}</p>", escape_text(detail))
    };
    (
        status,
        Html(format!(
            "<!doctype html>\n<html><head><title>gisting proxy error</title></head>\n\
             <body><h1>{status} &mdash; {title}</h1>{detail_html}\
             <p><a href=\"/\">back to the entry form</a></p></body></html>\n",
            status = status.as_u16(),
        )),
    )
}

async fn health(State(state): State<Arc<AppState>>) -> String {
    let mut out = String::from("status: ok\n");
    for p in &state.services.profiles {
        out.push_str(&format!("profile: {} (n={})\n", p.lang(), p.order()));
    }
    for l in &state.services.lexicons {
        out.push_str(&format!(
            "lexicon: {}->{} ({} entries)\n",
            l.source_lang(),
            l.target_lang(),
            l.len()
        ));
    }
    let mut rule_langs: Vec<&String> = state.services.rules.keys().collect();
    rule_langs.sort();
    for lang in rule_langs {
        out.push_str(&format!("rules: {lang}\n"));
    }
    if !state.services.unspaced.is_empty() {
        let langs: Vec<&str> = state.services.unspaced.iter().map(String::as_str).collect();
        out.push_str(&format!("unspaced: {}\n", langs.join(", ")));
    }
    out
}

async fn stats(State(state): State<Arc<AppState>>) -> String {
    let c = &state.counters;
    let value = serde_json::json!({
        "requests": c.requests.load(Ordering::Relaxed),
        "pages_gisted": c.pages_gisted.load(Ordering::Relaxed),
        "errors": c.errors.load(Ordering::Relaxed),
        "segments": c.segments.load(Ordering::Relaxed),
        "tokens": c.tokens.load(Ordering::Relaxed),
        "glossed": c.glossed.load(Ordering::Relaxed),
        "unknown_shown": c.unknown_shown.load(Ordering::Relaxed),
        "elided": c.elided.load(Ordering::Relaxed),
        "links_proxied": c.links_proxied.load(Ordering::Relaxed),
    });
    format!("{value:#}\n")
}
