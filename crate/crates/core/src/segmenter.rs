//! Markup-based page segmentation and re-emission.
//!
//! A page is divided into structurally distinct text pieces ([`Segment`])
//! and a [`PageSkeleton`] holding everything needed to emit the page again
//! with transformed segment text in place. Parsing is tolerant and
//! non-validating: tags close implicitly, stray markup degrades to literal
//! chunks, and no input panics.
//!
//! Boundary rules: block-level elements (`p`, `li`, `td`, `th`, `h1`–`h6`,
//! `div`, `br`, `title`, `option`, and every other structural or unknown
//! tag) split segments. Pure formatting tags (`b`, `i`, `span`, ...) do not
//! split; they are absorbed into the segment span and dropped when the
//! segment text is replaced. Anchors are kept as markup so their targets
//! can be rewritten and their text glossed in place, which means `<a>` also
//! delimits segments; a segment whose text sits inside an anchor is tagged
//! [`SegmentContext::AnchorText`]. Text inside `script`, `style`,
//! `textarea` and comments is preserved verbatim but never segmented.

use std::collections::HashMap;

use thiserror::Error;
use url::Url;

/// Kind of the element enclosing a segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SegmentContext {
    Heading,
    Paragraph,
    ListItem,
    TableCell,
    AnchorText,
    Title,
    OtherBlock,
}

impl SegmentContext {
    fn from_tag(name: &str) -> SegmentContext {
        match name {
            "h1" | "h2" | "h3" | "h4" | "h5" | "h6" => SegmentContext::Heading,
            "p" => SegmentContext::Paragraph,
            "li" => SegmentContext::ListItem,
            "td" | "th" => SegmentContext::TableCell,
            "title" => SegmentContext::Title,
            _ => SegmentContext::OtherBlock,
        }
    }
}

/// One structurally distinct piece of page text.
///
/// `text` is entity-decoded, whitespace-collapsed and trimmed, and is never
/// empty. Ids are strictly increasing in document order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub id: usize,
    pub text: String,
    pub context: SegmentContext,
    /// Byte offsets of the segment's span in the source document.
    pub source_span: (usize, usize),
}

/// A parsed attribute; `value` is entity-decoded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attr {
    pub name: String,
    pub value: Option<String>,
}

/// A parsed element tag kept in the skeleton. Unmodified tags re-emit their
/// original bytes; modified tags are rebuilt from parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tag {
    pub name: String,
    pub attrs: Vec<Attr>,
    pub closing: bool,
    pub self_closing: bool,
    raw: String,
    modified: bool,
}

impl Tag {
    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|a| a.name == name)
            .and_then(|a| a.value.as_deref())
    }

    pub fn set_attr(&mut self, name: &str, value: &str) {
        self.modified = true;
        match self.attrs.iter_mut().find(|a| a.name == name) {
            Some(attr) => attr.value = Some(value.to_string()),
            None => self.attrs.push(Attr {
                name: name.to_string(),
                value: Some(value.to_string()),
            }),
        }
    }

    fn serialize(&self, out: &mut String) {
        if !self.modified {
            out.push_str(&self.raw);
            return;
        }
        out.push('<');
        if self.closing {
            out.push('/');
        }
        out.push_str(&self.name);
        for attr in &self.attrs {
            out.push(' ');
            out.push_str(&attr.name);
            if let Some(v) = &attr.value {
                out.push_str("=\"");
                out.push_str(&escape_attr(v));
                out.push('"');
            }
        }
        if self.self_closing {
            out.push_str(" /");
        }
        out.push('>');
    }
}

/// One piece of the re-emittable page.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slot {
    /// Literal markup emitted verbatim: comments, doctype, raw-text element
    /// content, inter-element whitespace.
    Markup(String),
    /// A parsed element tag, rewritable in place.
    Tag(Tag),
    /// Reference to a segment by id.
    Segment(usize),
}

/// The markup scaffold of a page: ordered slots referencing each segment
/// exactly once, plus the absolute URL the page was fetched from.
#[derive(Debug, Clone)]
pub struct PageSkeleton {
    pub slots: Vec<Slot>,
    pub base_url: Url,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReassembleError {
    #[error("no replacement text for segment {0}")]
    MissingSegment(usize),
}

/// Formatting tags that never delimit segments. Inside a segment span they
/// are dropped when the text is replaced.
const INLINE_TAGS: &[&str] = &[
    "b", "i", "em", "strong", "u", "s", "strike", "small", "big", "sub", "sup", "tt", "code",
    "kbd", "samp", "var", "abbr", "acronym", "cite", "q", "dfn", "mark", "span", "font", "nobr",
    "bdi", "bdo", "ins", "del", "label", "time", "ruby", "rt", "rp", "data", "wbr",
];

const VOID_TAGS: &[&str] = &[
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param", "source",
    "track", "wbr",
];

/// Elements whose content is captured verbatim and excluded from gisting.
const RAW_TEXT_TAGS: &[&str] = &["script", "style", "textarea", "xmp", "svg", "math"];

/// Elements that implicitly close an open `p`.
const P_CLOSERS: &[&str] = &[
    "address",
    "article",
    "aside",
    "blockquote",
    "dd",
    "div",
    "dl",
    "dt",
    "fieldset",
    "figure",
    "footer",
    "form",
    "h1",
    "h2",
    "h3",
    "h4",
    "h5",
    "h6",
    "header",
    "hr",
    "li",
    "main",
    "nav",
    "ol",
    "p",
    "pre",
    "section",
    "table",
    "ul",
];

fn is_inline(name: &str) -> bool {
    INLINE_TAGS.contains(&name)
}

fn is_void(name: &str) -> bool {
    VOID_TAGS.contains(&name)
}

fn is_raw_text(name: &str) -> bool {
    RAW_TEXT_TAGS.contains(&name)
}

/// Splits a page into its skeleton and segments.
///
/// The input need not be well-formed; pathological markup degrades to one
/// segment per recovered text run.
pub fn segment(html: &str, base_url: Url) -> (PageSkeleton, Vec<Segment>) {
    let mut asm = Assembler::default();
    let bytes = html.as_bytes();
    let mut pos = 0;

    while pos < bytes.len() {
        let Some(lt) = next_markup(bytes, pos) else {
            asm.text(&html[pos..], pos);
            break;
        };
        if lt > pos {
            asm.text(&html[pos..lt], pos);
        }
        pos = match bytes[lt + 1] {
            b'!' | b'?' => {
                let end = if html[lt..].starts_with("<!--") {
                    html[lt..]
                        .find("-->")
                        .map(|p| lt + p + 3)
                        .unwrap_or(bytes.len())
                } else {
                    html[lt..]
                        .find('>')
                        .map(|p| lt + p + 1)
                        .unwrap_or(bytes.len())
                };
                asm.markup(&html[lt..end]);
                end
            }
            _ => {
                let (tag, end) = parse_tag(html, lt);
                if !tag.closing && !tag.self_closing && is_raw_text(&tag.name) {
                    let close_pat = format!("</{}", tag.name);
                    let content_end = find_ci(bytes, end, close_pat.as_bytes());
                    asm.tag(tag, end);
                    match content_end {
                        Some(c) => {
                            if c > end {
                                asm.markup(&html[end..c]);
                            }
                            let (close, close_end) = parse_tag(html, c);
                            asm.tag(close, close_end);
                            close_end
                        }
                        None => {
                            if end < bytes.len() {
                                asm.markup(&html[end..]);
                            }
                            bytes.len()
                        }
                    }
                } else if !tag.closing && !tag.self_closing && tag.name == "title" {
                    // RCDATA: entity-decoded text, no tags, until the close tag.
                    let content_end = find_ci(bytes, end, b"</title");
                    asm.tag(tag, end);
                    match content_end {
                        Some(c) => {
                            if c > end {
                                asm.text(&html[end..c], end);
                            }
                            let (close, close_end) = parse_tag(html, c);
                            asm.tag(close, close_end);
                            close_end
                        }
                        None => {
                            if end < bytes.len() {
                                asm.text(&html[end..], end);
                            }
                            bytes.len()
                        }
                    }
                } else {
                    let e = end;
                    asm.tag(tag, e);
                    e
                }
            }
        };
    }
    let (slots, segments) = asm.finish();
    (PageSkeleton { slots, base_url }, segments)
}

/// Emits the page with each segment replaced by the given text
/// (markup-escaped). Every segment id must be covered; pass
/// [`identity_replacements`] to re-emit the original text.
pub fn reassemble(
    skeleton: &PageSkeleton,
    replacements: &HashMap<usize, String>,
) -> Result<String, ReassembleError> {
    let mut out = String::new();
    for slot in &skeleton.slots {
        match slot {
            Slot::Markup(raw) => out.push_str(raw),
            Slot::Tag(tag) => tag.serialize(&mut out),
            Slot::Segment(id) => {
                let text = replacements
                    .get(id)
                    .ok_or(ReassembleError::MissingSegment(*id))?;
                out.push_str(&escape_text(text));
            }
        }
    }
    Ok(out)
}

pub fn identity_replacements(segments: &[Segment]) -> HashMap<usize, String> {
    segments.iter().map(|s| (s.id, s.text.clone())).collect()
}

/// Collapses all whitespace runs to single spaces and trims the ends.
pub fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            _ => out.push(c),
        }
    }
    out
}

pub fn escape_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

/// Decodes the common named entities and numeric references; anything
/// unrecognized stays literal.
pub fn decode_entities(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut i = 0;
    while i < s.len() {
        if s.as_bytes()[i] == b'&' {
            if let Some((c, consumed)) = parse_entity(&s[i..]) {
                out.push(c);
                i += consumed;
                continue;
            }
        }
        let c = s[i..].chars().next().unwrap();
        out.push(c);
        i += c.len_utf8();
    }
    out
}

fn parse_entity(s: &str) -> Option<(char, usize)> {
    let semi = s[1..].find(';')?;
    if semi == 0 || semi > 40 {
        return None;
    }
    let body = &s[1..1 + semi];
    let consumed = semi + 2;
    if let Some(num) = body.strip_prefix('#') {
        let cp = if let Some(hex) = num.strip_prefix('x').or_else(|| num.strip_prefix('X')) {
            u32::from_str_radix(hex, 16).ok()?
        } else {
            num.parse::<u32>().ok()?
        };
        return char::from_u32(cp).map(|c| (c, consumed));
    }
    let c = match body {
        "amp" => '&',
        "lt" => '<',
        "gt" => '>',
        "quot" => '"',
        "apos" => '\'',
        "nbsp" => '\u{A0}',
        _ => return None,
    };
    Some((c, consumed))
}

/// Next position of a `<` that actually starts markup.
fn next_markup(bytes: &[u8], from: usize) -> Option<usize> {
    let mut i = from;
    while i < bytes.len() {
        if bytes[i] == b'<' && i + 1 < bytes.len() {
            let n = bytes[i + 1];
            if n.is_ascii_alphabetic()
                || n == b'!'
                || n == b'?'
                || (n == b'/' && i + 2 < bytes.len() && bytes[i + 2].is_ascii_alphabetic())
            {
                return Some(i);
            }
        }
        i += 1;
    }
    None
}

/// Case-insensitive search for an ASCII pattern.
fn find_ci(bytes: &[u8], from: usize, pat: &[u8]) -> Option<usize> {
    if from >= bytes.len() || bytes.len() - from < pat.len() {
        return None;
    }
    bytes[from..]
        .windows(pat.len())
        .position(|w| w.eq_ignore_ascii_case(pat))
        .map(|p| from + p)
}

/// Parses a tag starting at `start` (which must point at `<`). Returns the
/// tag and the byte offset just past it. Tolerates EOF mid-tag.
fn parse_tag(html: &str, start: usize) -> (Tag, usize) {
    let bytes = html.as_bytes();
    let mut i = start + 1;
    let closing = i < bytes.len() && bytes[i] == b'/';
    if closing {
        i += 1;
    }
    let name_start = i;
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_alphanumeric() || b == b'-' || b == b'_' || b == b':' {
            i += 1;
        } else {
            break;
        }
    }
    let name = html[name_start..i].to_ascii_lowercase();
    let mut attrs = Vec::new();
    let mut self_closing = false;
    loop {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if i >= bytes.len() {
            break;
        }
        match bytes[i] {
            b'>' => {
                i += 1;
                break;
            }
            b'/' => {
                if i + 1 < bytes.len() && bytes[i + 1] == b'>' {
                    self_closing = true;
                    i += 2;
                    break;
                }
                i += 1;
            }
            b'=' | b'"' | b'\'' => i += 1,
            _ => {
                let aname_start = i;
                while i < bytes.len() {
                    let b = bytes[i];
                    if b.is_ascii_whitespace() || b == b'=' || b == b'>' || b == b'/' {
                        break;
                    }
                    i += 1;
                }
                let aname = html[aname_start..i].to_ascii_lowercase();
                while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                    i += 1;
                }
                let value = if i < bytes.len() && bytes[i] == b'=' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                        i += 1;
                    }
                    if i < bytes.len() && (bytes[i] == b'"' || bytes[i] == b'\'') {
                        let quote = bytes[i];
                        i += 1;
                        let vstart = i;
                        while i < bytes.len() && bytes[i] != quote {
                            i += 1;
                        }
                        let v = &html[vstart..i];
                        if i < bytes.len() {
                            i += 1;
                        }
                        Some(decode_entities(v))
                    } else {
                        let vstart = i;
                        while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'>'
                        {
                            i += 1;
                        }
                        Some(decode_entities(&html[vstart..i]))
                    }
                } else {
                    None
                };
                if !aname.is_empty() {
                    attrs.push(Attr { name: aname, value });
                }
            }
        }
    }
    let tag = Tag {
        name,
        attrs,
        closing,
        self_closing,
        raw: html[start..i].to_string(),
        modified: false,
    };
    (tag, i)
}

struct Pending {
    id: usize,
    text: String,
    start: usize,
    end: usize,
    context: SegmentContext,
}

#[derive(Default)]
struct Assembler {
    slots: Vec<Slot>,
    segments: Vec<Segment>,
    stack: Vec<String>,
    anchor_depth: usize,
    pending: Option<Pending>,
    /// Inline tags and whitespace runs whose fate depends on what follows:
    /// absorbed into the next segment's span, or flushed at a boundary.
    prebuffer: Vec<Slot>,
}

impl Assembler {
    fn text(&mut self, raw: &str, start: usize) {
        let decoded = decode_entities(raw);
        if let Some(p) = &mut self.pending {
            p.text.push_str(&decoded);
            p.end = start + raw.len();
            return;
        }
        if decoded.trim().is_empty() {
            if self.prebuffer.is_empty() {
                self.slots.push(Slot::Markup(raw.to_string()));
            } else {
                self.prebuffer.push(Slot::Markup(raw.to_string()));
            }
            return;
        }
        let context = if self.anchor_depth > 0 {
            SegmentContext::AnchorText
        } else {
            self.stack
                .last()
                .map(|t| SegmentContext::from_tag(t))
                .unwrap_or(SegmentContext::OtherBlock)
        };
        let id = self.segments.len();
        self.prebuffer.clear();
        // Keep literal leading whitespace as markup so re-emission does not
        // swallow it into the collapsed segment text.
        let ws_end = raw.find(|c: char| !c.is_whitespace()).unwrap_or(0);
        if ws_end > 0 {
            self.slots.push(Slot::Markup(raw[..ws_end].to_string()));
        }
        self.slots.push(Slot::Segment(id));
        self.pending = Some(Pending {
            id,
            text: decode_entities(&raw[ws_end..]),
            start: start + ws_end,
            end: start + raw.len(),
            context,
        });
    }

    fn markup(&mut self, raw: &str) {
        self.boundary();
        self.slots.push(Slot::Markup(raw.to_string()));
    }

    fn tag(&mut self, tag: Tag, end: usize) {
        if is_inline(&tag.name) {
            if let Some(p) = &mut self.pending {
                p.end = end;
            } else {
                self.prebuffer.push(Slot::Tag(tag));
            }
            return;
        }
        self.boundary();
        if tag.closing {
            if tag.name == "a" {
                self.anchor_depth = self.anchor_depth.saturating_sub(1);
            } else {
                self.pop_to(&tag.name);
            }
        } else {
            if tag.name == "a" {
                // Anchors do not nest; an open anchor is implicitly closed.
                self.anchor_depth = 1;
            } else {
                self.implicit_close(&tag.name);
                if !tag.self_closing && !is_void(&tag.name) && self.stack.len() < 256 {
                    self.stack.push(tag.name.clone());
                }
            }
        }
        self.slots.push(Slot::Tag(tag));
    }

    fn implicit_close(&mut self, name: &str) {
        match name {
            "li" => {
                while self.stack.last().map(String::as_str) == Some("li") {
                    self.stack.pop();
                }
            }
            "td" | "th" => {
                while matches!(
                    self.stack.last().map(String::as_str),
                    Some("td") | Some("th")
                ) {
                    self.stack.pop();
                }
            }
            "tr" => {
                while matches!(
                    self.stack.last().map(String::as_str),
                    Some("td") | Some("th")
                ) {
                    self.stack.pop();
                }
                if self.stack.last().map(String::as_str) == Some("tr") {
                    self.stack.pop();
                }
            }
            "dd" | "dt" => {
                while matches!(
                    self.stack.last().map(String::as_str),
                    Some("dd") | Some("dt")
                ) {
                    self.stack.pop();
                }
            }
            "option" => {
                while self.stack.last().map(String::as_str) == Some("option") {
                    self.stack.pop();
                }
            }
            _ => {}
        }
        if P_CLOSERS.contains(&name) && self.stack.last().map(String::as_str) == Some("p") {
            self.stack.pop();
        }
    }

    fn pop_to(&mut self, name: &str) {
        if let Some(pos) = self.stack.iter().rposition(|t| t == name) {
            self.stack.truncate(pos);
        }
    }

    fn boundary(&mut self) {
        if let Some(p) = self.pending.take() {
            // Trailing whitespace would vanish in the collapsed text; keep
            // it as markup so words do not fuse with a following element.
            let trailing: String = p
                .text
                .chars()
                .rev()
                .take_while(|c| c.is_whitespace())
                .collect();
            let text = collapse_whitespace(&p.text);
            debug_assert!(!text.is_empty());
            self.segments.push(Segment {
                id: p.id,
                text,
                context: p.context,
                source_span: (p.start, p.end),
            });
            if !trailing.is_empty() {
                self.slots
                    .push(Slot::Markup(trailing.chars().rev().collect()));
            }
        }
        self.slots.append(&mut self.prebuffer);
    }

    fn finish(mut self) -> (Vec<Slot>, Vec<Segment>) {
        self.boundary();
        (self.slots, self.segments)
    }
}
