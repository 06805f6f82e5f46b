//! The gisting proxy: HTTP service and page pipeline.
//!
//! For a requested page the proxy fetches the bytes, resolves the charset,
//! segments the markup, identifies the language of each segment, glosses
//! the words of segments in languages the user does not read, rewrites all
//! hyperlinks so navigation keeps flowing through the proxy, injects a
//! coverage banner, and serves the result. Everything the pipeline needs
//! (language profiles, dictionaries, rule tables, gloss policy) is loaded
//! once at startup into an immutable [`Services`] value shared by all
//! request handlers.

pub mod config;
pub mod fetch;
pub mod links;
pub mod pipeline;
pub mod server;

pub use config::{load_config, parse_config_str, ConfigError, ProxyConfig};
pub use fetch::{fetch, FetchError, Fetched};
pub use links::{proxied_url, rewrite_links, unwrap_proxied, LinkStats};
pub use pipeline::{
    gist_document, gist_document_with, GistError, GistResult, PageStats, PolicyOverrides, Services,
};
pub use server::serve;
