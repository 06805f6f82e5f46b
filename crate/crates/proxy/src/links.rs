//! Link rewriting: navigation flows back through the proxy.
//!
//! Every hyperlink target is resolved to absolute form against the page's
//! base URL, then http(s) anchors are replaced by
//! `<proxy>/gist?url=<percent-encoded-absolute>&to=<lang>`. Embedded
//! resources (images, stylesheets, scripts) are resolved to absolute form
//! but not routed through the proxy. Fragment-only links are untouched, and
//! anchors that already point at the proxy are unwrapped rather than
//! wrapped twice.

use url::Url;

use gist_core::segmenter::{PageSkeleton, Slot};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LinkStats {
    /// Anchors now pointing at the proxy's /gist endpoint.
    pub proxied: usize,
    /// Attributes resolved to absolute form without proxying.
    pub resolved: usize,
    /// Fragment-only targets left alone.
    pub fragments: usize,
    /// Targets that failed to parse and were left unmodified.
    pub unparseable: usize,
}

const ANCHOR_TAGS: &[&str] = &["a", "area"];
/// (tag, attribute) pairs naming embedded resources.
const RESOURCE_ATTRS: &[(&str, &str)] = &[
    ("img", "src"),
    ("script", "src"),
    ("iframe", "src"),
    ("embed", "src"),
    ("source", "src"),
    ("input", "src"),
    ("link", "href"),
];

/// The proxy URL for a target page.
pub fn proxied_url(proxy_base: &Url, target: &Url, user_lang: &str) -> Url {
    let mut out = proxy_base.clone();
    let path = format!("{}/gist", proxy_base.path().trim_end_matches('/'));
    out.set_path(&path);
    out.set_fragment(None);
    out.query_pairs_mut()
        .clear()
        .append_pair("url", target.as_str())
        .append_pair("to", user_lang);
    out
}

/// If `url` is already a proxy /gist URL, extracts the inner target.
pub fn unwrap_proxied(url: &Url, proxy_base: &Url) -> Option<Url> {
    if url.scheme() != proxy_base.scheme()
        || url.host_str() != proxy_base.host_str()
        || url.port_or_known_default() != proxy_base.port_or_known_default()
    {
        return None;
    }
    let gist_path = format!("{}/gist", proxy_base.path().trim_end_matches('/'));
    if url.path() != gist_path {
        return None;
    }
    url.query_pairs()
        .find(|(k, _)| k == "url")
        .and_then(|(_, v)| Url::parse(&v).ok())
}

/// Rewrites anchors and resource references in place.
pub fn rewrite_links(skeleton: &mut PageSkeleton, proxy_base: &Url, user_lang: &str) -> LinkStats {
    let mut stats = LinkStats::default();
    let base = skeleton.base_url.clone();
    for slot in &mut skeleton.slots {
        let Slot::Tag(tag) = slot else { continue };
        if tag.closing {
            continue;
        }
        let name = tag.name.clone();
        if ANCHOR_TAGS.contains(&name.as_str()) {
            let Some(href) = tag.attr("href").map(str::to_string) else {
                continue;
            };
            if href.starts_with('#') {
                stats.fragments += 1;
                continue;
            }
            match base.join(&href) {
                Ok(resolved) => match resolved.scheme() {
                    "http" | "https" => {
                        let inner = unwrap_proxied(&resolved, proxy_base).unwrap_or(resolved);
                        let new = proxied_url(proxy_base, &inner, user_lang);
                        if new.as_str() != href {
                            tag.set_attr("href", new.as_str());
                        }
                        stats.proxied += 1;
                    }
                    _ => {
                        if resolved.as_str() != href {
                            tag.set_attr("href", resolved.as_str());
                        }
                        stats.resolved += 1;
                    }
                },
                Err(_) => stats.unparseable += 1,
            }
            continue;
        }
        for (res_tag, attr) in RESOURCE_ATTRS {
            if name == *res_tag {
                let Some(value) = tag.attr(attr).map(str::to_string) else {
                    continue;
                };
                if value.starts_with('#') {
                    stats.fragments += 1;
                    continue;
                }
                match base.join(&value) {
                    Ok(resolved) => {
                        if resolved.as_str() != value {
                            tag.set_attr(attr, resolved.as_str());
                        }
                        stats.resolved += 1;
                    }
                    Err(_) => stats.unparseable += 1,
                }
            }
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use gist_core::segmenter::{identity_replacements, reassemble, segment};
    use std::collections::HashMap;

    fn base() -> Url {
        Url::parse("http://h/a/").unwrap()
    }

    fn proxy() -> Url {
        Url::parse("http://127.0.0.1:8080/").unwrap()
    }

    fn rewrite(html: &str) -> (String, LinkStats) {
        let (mut skel, segs) = segment(html, base());
        let stats = rewrite_links(&mut skel, &proxy(), "en");
        let out = reassemble(&skel, &identity_replacements(&segs)).unwrap();
        (out, stats)
    }

    #[test]
    fn relative_anchor_is_resolved_and_proxied() {
        let (out, stats) = rewrite("<a href=\"page2.html\">next</a>");
        assert!(
            out.contains(
                "href=\"http://127.0.0.1:8080/gist?url=http%3A%2F%2Fh%2Fa%2Fpage2.html&amp;to=en\""
            ),
            "{out}"
        );
        assert_eq!(stats.proxied, 1);
    }

    #[test]
    fn fragment_links_are_untouched() {
        let (out, stats) = rewrite("<a href=\"#top\">top</a>");
        assert!(out.contains("href=\"#top\""), "{out}");
        assert_eq!(stats.fragments, 1);
        assert_eq!(stats.proxied, 0);
    }

    #[test]
    fn images_are_resolved_but_not_proxied() {
        let (out, stats) = rewrite("<img src=\"pic.png\">");
        assert!(out.contains("src=\"http://h/a/pic.png\""), "{out}");
        assert_eq!(stats.resolved, 1);
        assert_eq!(stats.proxied, 0);
    }

    #[test]
    fn stylesheets_and_scripts_are_resolved() {
        let (out, _) =
            rewrite("<link rel=\"stylesheet\" href=\"s.css\"><script src=\"j.js\"></script>");
        assert!(out.contains("href=\"http://h/a/s.css\""), "{out}");
        assert!(out.contains("src=\"http://h/a/j.js\""), "{out}");
    }

    #[test]
    fn mailto_is_left_unproxied() {
        let (out, stats) = rewrite("<a href=\"mailto:x@y\">mail</a>");
        assert!(out.contains("href=\"mailto:x@y\""), "{out}");
        assert_eq!(stats.resolved, 1);
        assert_eq!(stats.proxied, 0);
    }

    #[test]
    fn already_proxied_anchor_is_not_double_wrapped() {
        let inner = Url::parse("http://other/site.html").unwrap();
        let once = proxied_url(&proxy(), &inner, "en");
        let html = format!("<a href=\"{once}\">x</a>");
        let (mut skel, _) = segment(&html, base());
        rewrite_links(&mut skel, &proxy(), "en");
        let out = reassemble(&skel, &HashMap::from([(0, "x".to_string())])).unwrap();
        let wraps = out.matches("url=http%3A%2F%2F127.0.0.1").count();
        assert_eq!(wraps, 0, "inner proxy URL leaked into the target: {out}");
        assert!(out.contains("url=http%3A%2F%2Fother%2Fsite.html"), "{out}");
    }

    #[test]
    fn unwrap_recovers_the_inner_url() {
        let target = Url::parse("http://h/a/page2.html?q=1").unwrap();
        let wrapped = proxied_url(&proxy(), &target, "en");
        let inner = unwrap_proxied(&wrapped, &proxy()).unwrap();
        assert_eq!(inner, target);
        assert_eq!(unwrap_proxied(&target, &proxy()), None);
    }

    #[test]
    fn unparseable_targets_are_counted_and_left_alone() {
        let (out, stats) = rewrite("<a href=\"http://[bad\">x</a>");
        assert!(out.contains("href=\"http://[bad\""), "{out}");
        assert_eq!(stats.unparseable, 1);
    }

    #[test]
    fn absolute_cross_origin_anchor_is_proxied() {
        let (out, stats) = rewrite("<a href=\"https://elsewhere.example/p\">x</a>");
        assert!(
            out.contains("url=https%3A%2F%2Felsewhere.example%2Fp"),
            "{out}"
        );
        assert_eq!(stats.proxied, 1);
    }
}
