//! Outbound page fetching.
//!
//! A single redirect-following GET with identity transfer-encoding, a
//! configurable timeout and a body size cap.

use std::time::Duration;

use thiserror::Error;
use url::Url;

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("upstream returned status {status}")]
    Status { status: u16 },
    #[error("fetch timed out")]
    Timeout,
    #[error("fetch failed: {0}")]
    Request(String),
    #[error("body exceeds the {cap}-byte cap")]
    TooLarge { cap: usize },
    #[error("unsupported content type `{0}`")]
    UnsupportedContentType(String),
}

#[derive(Debug, Clone)]
pub struct Fetched {
    /// URL after redirects; pages are rewritten relative to this.
    pub final_url: Url,
    pub bytes: Vec<u8>,
    /// Charset label from the Content-Type header, if any.
    pub transport_charset: Option<String>,
    pub status: u16,
}

pub fn build_client(timeout: Duration) -> reqwest::Client {
    reqwest::Client::builder()
        .timeout(timeout)
        .redirect(reqwest::redirect::Policy::limited(5))
        .build()
        .expect("client configuration is static")
}

pub async fn fetch(
    client: &reqwest::Client,
    url: &Url,
    max_body_bytes: usize,
) -> Result<Fetched, FetchError> {
    let response = client
        .get(url.clone())
        .header(reqwest::header::ACCEPT_ENCODING, "identity")
        .send()
        .await
        .map_err(|e| {
            if e.is_timeout() {
                FetchError::Timeout
            } else {
                FetchError::Request(e.to_string())
            }
        })?;
    let status = response.status().as_u16();
    if !response.status().is_success() {
        return Err(FetchError::Status { status });
    }
    let content_type = response
        .headers()
        .get(reqwest::header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .map(str::to_string);
    if let Some(ct) = &content_type {
        let mime = ct
            .split(';')
            .next()
            .unwrap_or("")
            .trim()
            .to_ascii_lowercase();
        let ok = mime.is_empty()
            || mime.starts_with("text/")
            || mime == "application/xhtml+xml"
            || mime == "application/xml";
        if !ok {
            return Err(FetchError::UnsupportedContentType(mime));
        }
    }
    let transport_charset = content_type.as_deref().and_then(charset_of);
    let final_url = response.url().clone();
    let mut bytes = Vec::new();
    let mut response = response;
    while let Some(chunk) = response.chunk().await.map_err(|e| {
        if e.is_timeout() {
            FetchError::Timeout
        } else {
            FetchError::Request(e.to_string())
        }
    })? {
        if bytes.len() + chunk.len() > max_body_bytes {
            return Err(FetchError::TooLarge {
                cap: max_body_bytes,
            });
        }
        bytes.extend_from_slice(&chunk);
    }
    Ok(Fetched {
        final_url,
        bytes,
        transport_charset,
        status,
    })
}

/// One-shot synchronous fetch for CLI use.
pub fn fetch_blocking(
    url: &Url,
    timeout: Duration,
    max_body_bytes: usize,
) -> Result<Fetched, FetchError> {
    let runtime = tokio::runtime::Builder::new_current_thread()
        .enable_all()
        .build()
        .map_err(|e| FetchError::Request(e.to_string()))?;
    let client = build_client(timeout);
    runtime.block_on(fetch(&client, url, max_body_bytes))
}

/// Extracts the charset parameter from a Content-Type header value.
pub fn charset_of(content_type: &str) -> Option<String> {
    for param in content_type.split(';').skip(1) {
        let param = param.trim();
        if let Some(value) = param
            .strip_prefix("charset=")
            .or_else(|| param.strip_prefix("CHARSET="))
            .or_else(|| param.strip_prefix("Charset="))
        {
            let value = value.trim().trim_matches(|c| c == '"' || c == '\'');
            if !value.is_empty() {
                return Some(value.to_string());
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charset_parameter_extraction() {
        assert_eq!(
            charset_of("text/html; charset=EUC-JP").as_deref(),
            Some("EUC-JP")
        );
        assert_eq!(
            charset_of("text/html; charset=\"utf-8\"").as_deref(),
            Some("utf-8")
        );
        assert_eq!(charset_of("text/html"), None);
    }
}
