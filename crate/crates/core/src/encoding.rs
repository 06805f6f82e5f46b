//! Character encoding detection and conversion into the internal Unicode
//! representation.
//!
//! A page arrives as raw bytes plus whatever charset evidence the transport
//! and the document itself provide. Detection precedence is: in-document
//! declaration, then transport header, then byte sniffing, then an
//! ISO-8859-1 fallback (which accepts any byte sequence). Conversion always
//! succeeds; undecodable sequences become U+FFFD and set the `lossy` flag so
//! a dirty page degrades instead of failing.

use std::fmt;

use thiserror::Error;

/// The fixed set of charsets the pipeline accepts.
///
/// Extension is a registry addition here plus a `sniff` scorer when the
/// charset is multi-byte; nothing downstream knows about charsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Charset {
    Utf8,
    EucJp,
    ShiftJis,
    Iso8859_1,
    UsAscii,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unsupported charset label `{0}`")]
pub struct UnsupportedCharset(pub String);

impl Charset {
    pub const ALL: [Charset; 5] = [
        Charset::Utf8,
        Charset::EucJp,
        Charset::ShiftJis,
        Charset::Iso8859_1,
        Charset::UsAscii,
    ];

    /// Parses a case-insensitive IANA-style label. Hyphen and underscore are
    /// interchangeable; "sjis", "latin-1" and "ascii" are accepted aliases.
    pub fn parse(label: &str) -> Result<Charset, UnsupportedCharset> {
        let norm: String = label
            .trim()
            .trim_matches(|c| c == '"' || c == '\'')
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| {
                if c == '_' {
                    '-'
                } else {
                    c.to_ascii_lowercase()
                }
            })
            .collect();
        match norm.as_str() {
            "utf-8" | "utf8" => Ok(Charset::Utf8),
            "euc-jp" | "eucjp" => Ok(Charset::EucJp),
            "shift-jis" | "shiftjis" | "sjis" | "x-sjis" => Ok(Charset::ShiftJis),
            "iso-8859-1" | "iso8859-1" | "latin-1" | "latin1" => Ok(Charset::Iso8859_1),
            "us-ascii" | "ascii" => Ok(Charset::UsAscii),
            _ => Err(UnsupportedCharset(label.trim().to_string())),
        }
    }

    /// Canonical label, lowercase IANA preferred form.
    pub fn label(self) -> &'static str {
        match self {
            Charset::Utf8 => "utf-8",
            Charset::EucJp => "euc-jp",
            Charset::ShiftJis => "shift_jis",
            Charset::Iso8859_1 => "iso-8859-1",
            Charset::UsAscii => "us-ascii",
        }
    }
}

impl fmt::Display for Charset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Everything known about a page's charset before detection runs.
#[derive(Debug, Clone, Default)]
pub struct CharsetEvidence {
    /// Label from protocol headers (e.g. `Content-Type: ...; charset=x`).
    pub transport_hint: Option<String>,
    /// Label from an in-document declaration (`<meta charset=...>` or the
    /// http-equiv form).
    pub document_hint: Option<String>,
    /// Result of byte sniffing, with a confidence in `[0, 1]`.
    pub sniffed: Option<(Charset, f64)>,
}

impl CharsetEvidence {
    /// Collects all three evidence sources for a byte buffer: scans the
    /// first 2 KiB for a meta declaration, records the transport hint, and
    /// runs the sniffer. For non-empty input at least the sniffer populates.
    pub fn gather(bytes: &[u8], transport_hint: Option<&str>) -> CharsetEvidence {
        CharsetEvidence {
            transport_hint: transport_hint.map(str::to_string),
            document_hint: scan_meta_charset(bytes),
            sniffed: sniff(bytes),
        }
    }
}

/// Resolves the charset of `bytes` given the available evidence.
///
/// Precedence: document hint, transport hint, sniffed label, ISO-8859-1.
/// Hint labels that do not parse as a supported charset are skipped, so this
/// never fails; callers that want to refuse pages with unsupported declared
/// charsets should check the hint labels with [`Charset::parse`] first.
pub fn detect_charset(bytes: &[u8], evidence: &CharsetEvidence) -> Charset {
    if let Some(cs) = evidence
        .document_hint
        .as_deref()
        .and_then(|l| Charset::parse(l).ok())
    {
        return cs;
    }
    if let Some(cs) = evidence
        .transport_hint
        .as_deref()
        .and_then(|l| Charset::parse(l).ok())
    {
        return cs;
    }
    if let Some((cs, _)) = evidence.sniffed {
        return cs;
    }
    sniff(bytes).map(|(cs, _)| cs).unwrap_or(Charset::Iso8859_1)
}

/// Guesses the charset of a byte buffer.
///
/// Pure 7-bit input gets the minimal label US-ASCII. Otherwise each
/// multi-byte candidate is validated and scored by the fraction of bytes
/// consumed by multi-byte sequences in its assigned code ranges; the best
/// valid candidate wins, ties broken UTF-8 > EUC-JP > Shift-JIS. If nothing
/// validates the answer is ISO-8859-1, which accepts all bytes.
///
/// Returns `None` only for empty input.
pub fn sniff(bytes: &[u8]) -> Option<(Charset, f64)> {
    if bytes.is_empty() {
        return None;
    }
    if bytes.iter().all(|&b| b < 0x80) {
        return Some((Charset::UsAscii, 1.0));
    }
    if bytes.starts_with(&[0xEF, 0xBB, 0xBF]) {
        return Some((Charset::Utf8, 1.0));
    }
    // Priority order doubles as the tie-break.
    let candidates = [
        (Charset::Utf8, utf8_score(bytes)),
        (Charset::EucJp, euc_jp_score(bytes)),
        (Charset::ShiftJis, shift_jis_score(bytes)),
    ];
    let mut best: Option<(Charset, f64)> = None;
    for (cs, score) in candidates {
        if let Some(s) = score {
            if best.is_none_or(|(_, bs)| s > bs) {
                best = Some((cs, s));
            }
        }
    }
    Some(best.unwrap_or((Charset::Iso8859_1, 0.0)))
}

/// Fraction of bytes inside multi-byte sequences, or `None` if invalid.
fn utf8_score(bytes: &[u8]) -> Option<f64> {
    if std::str::from_utf8(bytes).is_err() {
        return None;
    }
    let multi = bytes.iter().filter(|&&b| b >= 0x80).count();
    Some(multi as f64 / bytes.len() as f64)
}

fn euc_jp_score(bytes: &[u8]) -> Option<f64> {
    let mut i = 0;
    let mut multi = 0usize;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            0x00..=0x7F => i += 1,
            // half-width katakana: 0x8E + A1..DF
            0x8E => {
                if i + 1 >= bytes.len() || !(0xA1..=0xDF).contains(&bytes[i + 1]) {
                    return None;
                }
                multi += 2;
                i += 2;
            }
            // JIS X 0212: 0x8F + two bytes in A1..FE
            0x8F => {
                if i + 2 >= bytes.len()
                    || !(0xA1..=0xFE).contains(&bytes[i + 1])
                    || !(0xA1..=0xFE).contains(&bytes[i + 2])
                {
                    return None;
                }
                multi += 3;
                i += 3;
            }
            // JIS X 0208: lead and trail both in A1..FE
            0xA1..=0xFE => {
                if i + 1 >= bytes.len() || !(0xA1..=0xFE).contains(&bytes[i + 1]) {
                    return None;
                }
                multi += 2;
                i += 2;
            }
            _ => return None,
        }
    }
    Some(multi as f64 / bytes.len() as f64)
}

fn shift_jis_score(bytes: &[u8]) -> Option<f64> {
    let mut i = 0;
    let mut multi = 0usize;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            0x00..=0x7F => i += 1,
            // half-width katakana, single byte
            0xA1..=0xDF => i += 1,
            0x81..=0x9F | 0xE0..=0xFC => {
                if i + 1 >= bytes.len() {
                    return None;
                }
                let t = bytes[i + 1];
                if !((0x40..=0x7E).contains(&t) || (0x80..=0xFC).contains(&t)) {
                    return None;
                }
                multi += 2;
                i += 2;
            }
            _ => return None,
        }
    }
    Some(multi as f64 / bytes.len() as f64)
}

/// A decoded document: Unicode text plus provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InternalText {
    pub text: String,
    pub source_charset: Charset,
    /// True when any byte sequence was undecodable and replaced by U+FFFD.
    pub lossy: bool,
}

/// Decodes `bytes` as `charset`. Every byte is consumed; invalid sequences
/// become the replacement character and set `lossy`.
pub fn to_internal(bytes: &[u8], charset: Charset) -> InternalText {
    let (text, lossy) = match charset {
        Charset::Utf8 => match String::from_utf8_lossy(bytes) {
            std::borrow::Cow::Borrowed(s) => (s.to_string(), false),
            std::borrow::Cow::Owned(s) => (s, true),
        },
        Charset::EucJp => {
            let (cow, had_errors) = encoding_rs::EUC_JP.decode_without_bom_handling(bytes);
            (cow.into_owned(), had_errors)
        }
        Charset::ShiftJis => {
            let (cow, had_errors) = encoding_rs::SHIFT_JIS.decode_without_bom_handling(bytes);
            (cow.into_owned(), had_errors)
        }
        Charset::Iso8859_1 => {
            // Latin-1 maps each byte to the same code point; never lossy.
            (bytes.iter().map(|&b| char::from(b)).collect(), false)
        }
        Charset::UsAscii => {
            let mut lossy = false;
            let text = bytes
                .iter()
                .map(|&b| {
                    if b < 0x80 {
                        char::from(b)
                    } else {
                        lossy = true;
                        char::REPLACEMENT_CHARACTER
                    }
                })
                .collect();
            (text, lossy)
        }
    };
    InternalText {
        text,
        source_charset: charset,
        lossy,
    }
}

/// Encodes text into `charset` bytes. Returns the bytes and whether any
/// character was unmappable (replaced with `?` for the hand-rolled charsets,
/// or a numeric reference by the EUC-JP/Shift-JIS encoders).
pub fn encode(text: &str, charset: Charset) -> (Vec<u8>, bool) {
    match charset {
        Charset::Utf8 => (text.as_bytes().to_vec(), false),
        Charset::EucJp => {
            let (cow, _, unmappable) = encoding_rs::EUC_JP.encode(text);
            (cow.into_owned(), unmappable)
        }
        Charset::ShiftJis => {
            let (cow, _, unmappable) = encoding_rs::SHIFT_JIS.encode(text);
            (cow.into_owned(), unmappable)
        }
        Charset::Iso8859_1 => {
            let mut lossy = false;
            let bytes = text
                .chars()
                .map(|c| {
                    if (c as u32) <= 0xFF {
                        c as u8
                    } else {
                        lossy = true;
                        b'?'
                    }
                })
                .collect();
            (bytes, lossy)
        }
        Charset::UsAscii => {
            let mut lossy = false;
            let bytes = text
                .chars()
                .map(|c| {
                    if (c as u32) < 0x80 {
                        c as u8
                    } else {
                        lossy = true;
                        b'?'
                    }
                })
                .collect();
            (bytes, lossy)
        }
    }
}

/// Scans the head of the document for a `<meta ... charset=...>` label.
fn scan_meta_charset(bytes: &[u8]) -> Option<String> {
    let head = &bytes[..bytes.len().min(2048)];
    let lower: Vec<u8> = head.iter().map(|b| b.to_ascii_lowercase()).collect();
    let mut from = 0;
    while let Some(pos) = find_sub(&lower[from..], b"<meta") {
        let start = from + pos;
        let end = find_sub(&lower[start..], b">")
            .map(|p| start + p)
            .unwrap_or(lower.len());
        let tag = &lower[start..end];
        if let Some(cpos) = find_sub(tag, b"charset") {
            if let Some(label) = parse_charset_value(&tag[cpos + b"charset".len()..]) {
                return Some(label);
            }
        }
        from = end;
        if from >= lower.len() {
            break;
        }
    }
    None
}

fn parse_charset_value(rest: &[u8]) -> Option<String> {
    let mut i = 0;
    while i < rest.len() && (rest[i] as char).is_ascii_whitespace() {
        i += 1;
    }
    if i >= rest.len() || rest[i] != b'=' {
        return None;
    }
    i += 1;
    while i < rest.len()
        && ((rest[i] as char).is_ascii_whitespace() || rest[i] == b'"' || rest[i] == b'\'')
    {
        i += 1;
    }
    let start = i;
    while i < rest.len() {
        let c = rest[i] as char;
        if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' || c == ':' {
            i += 1;
        } else {
            break;
        }
    }
    if i == start {
        None
    } else {
        Some(String::from_utf8_lossy(&rest[start..i]).into_owned())
    }
}

fn find_sub(haystack: &[u8], needle: &[u8]) -> Option<usize> {
    if needle.is_empty() || haystack.len() < needle.len() {
        return None;
    }
    haystack.windows(needle.len()).position(|w| w == needle)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_parsing_and_aliases() {
        for (label, cs) in [
            ("UTF-8", Charset::Utf8),
            ("utf8", Charset::Utf8),
            ("EUC-JP", Charset::EucJp),
            ("Shift_JIS", Charset::ShiftJis),
            ("shift-jis", Charset::ShiftJis),
            ("sjis", Charset::ShiftJis),
            ("ISO-8859-1", Charset::Iso8859_1),
            ("latin-1", Charset::Iso8859_1),
            ("US-ASCII", Charset::UsAscii),
            ("ascii", Charset::UsAscii),
        ] {
            assert_eq!(Charset::parse(label).unwrap(), cs, "label {label}");
        }
        assert!(Charset::parse("koi8-r").is_err());
        assert!(Charset::parse("").is_err());
    }

    #[test]
    fn pure_ascii_sniffs_as_minimal_label() {
        let evidence = CharsetEvidence::gather(b"just plain text", None);
        assert_eq!(
            detect_charset(b"just plain text", &evidence),
            Charset::UsAscii
        );
    }

    #[test]
    fn japanese_euc_bytes_sniff_as_euc_jp() {
        // U+25EF is row 1 cell 94, so its EUC-JP encoding is 0xA1 0xFE, and
        // 0xFE is not a valid byte anywhere in Shift-JIS. Verify the fixture
        // really is invalid Shift-JIS by a brute-force decode attempt, then
        // check the sniffer picks EUC-JP.
        let text = "日本語◯のテキストです。";
        let (bytes, lossy) = encode(text, Charset::EucJp);
        assert!(!lossy);
        assert!(
            shift_jis_score(&bytes).is_none(),
            "fixture must not validate as Shift-JIS"
        );
        let (_, had_errors) = encoding_rs::SHIFT_JIS.decode_without_bom_handling(&bytes);
        assert!(had_errors, "reference decoder must also reject the fixture");
        let evidence = CharsetEvidence::gather(&bytes, None);
        assert_eq!(detect_charset(&bytes, &evidence), Charset::EucJp);
    }

    #[test]
    fn document_hint_beats_sniffer() {
        let (bytes, _) = encode("日本語", Charset::EucJp);
        let evidence = CharsetEvidence {
            transport_hint: None,
            document_hint: Some("Shift_JIS".to_string()),
            sniffed: sniff(&bytes),
        };
        assert_eq!(detect_charset(&bytes, &evidence), Charset::ShiftJis);
    }

    #[test]
    fn document_hint_beats_transport_hint() {
        let evidence = CharsetEvidence {
            transport_hint: Some("utf-8".into()),
            document_hint: Some("euc-jp".into()),
            sniffed: None,
        };
        assert_eq!(detect_charset(b"x", &evidence), Charset::EucJp);
    }

    #[test]
    fn unsupported_hints_fall_through() {
        let evidence = CharsetEvidence {
            transport_hint: Some("koi8-r".into()),
            document_hint: Some("big5".into()),
            sniffed: None,
        };
        assert_eq!(detect_charset(b"plain", &evidence), Charset::UsAscii);
    }

    #[test]
    fn meta_charset_scan() {
        let html = b"<html><head><meta http-equiv=\"Content-Type\" content=\"text/html; charset=EUC-JP\"></head>";
        assert_eq!(scan_meta_charset(html).as_deref(), Some("euc-jp"));
        let html5 = b"<!doctype html><meta charset='utf-8'><title>t</title>";
        assert_eq!(scan_meta_charset(html5).as_deref(), Some("utf-8"));
        assert_eq!(scan_meta_charset(b"<p>no declaration</p>"), None);
    }

    #[test]
    fn ascii_identity_decode() {
        let out = to_internal(b"hello", Charset::UsAscii);
        assert_eq!(out.text, "hello");
        assert!(!out.lossy);
    }

    #[test]
    fn euc_jp_first_kanji_of_row_16() {
        // 0xB0A1 is row 16 column 1 in JIS X 0208, U+4E9C per the published
        // mapping tables.
        let out = to_internal(&[0xB0, 0xA1], Charset::EucJp);
        assert_eq!(out.text, "\u{4E9C}");
        assert!(!out.lossy);
        let (bytes, lossy) = encode("\u{4E9C}", Charset::EucJp);
        assert_eq!(bytes, vec![0xB0, 0xA1]);
        assert!(!lossy);
    }

    #[test]
    fn invalid_utf8_byte_is_replaced() {
        let out = to_internal(&[0xFF], Charset::Utf8);
        assert_eq!(out.text, "\u{FFFD}");
        assert!(out.lossy);
    }

    #[test]
    fn latin1_accepts_every_byte() {
        let all: Vec<u8> = (0u8..=255).collect();
        let out = to_internal(&all, Charset::Iso8859_1);
        assert!(!out.lossy);
        let (back, lossy) = encode(&out.text, Charset::Iso8859_1);
        assert!(!lossy);
        assert_eq!(back, all);
    }

    #[test]
    fn detection_is_deterministic() {
        let (bytes, _) = encode("テスト text", Charset::Utf8);
        let e1 = CharsetEvidence::gather(&bytes, Some("utf-8"));
        let a = detect_charset(&bytes, &e1);
        let b = detect_charset(&bytes, &e1);
        assert_eq!(a, b);
    }

    mod properties {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            /// The sniffer never proposes a label the bytes are invalid
            /// under, except the ISO-8859-1 fallback which accepts all
            /// bytes; confidence stays in [0, 1].
            #[test]
            fn sniffed_label_validates_the_bytes(bytes in proptest::collection::vec(any::<u8>(), 1..80)) {
                let (cs, confidence) = sniff(&bytes).expect("non-empty input always sniffs");
                prop_assert!((0.0..=1.0).contains(&confidence));
                match cs {
                    Charset::UsAscii => prop_assert!(bytes.iter().all(|&b| b < 0x80)),
                    Charset::Utf8 => prop_assert!(utf8_score(&bytes).is_some() || bytes.starts_with(&[0xEF, 0xBB, 0xBF])),
                    Charset::EucJp => prop_assert!(euc_jp_score(&bytes).is_some()),
                    Charset::ShiftJis => prop_assert!(shift_jis_score(&bytes).is_some()),
                    Charset::Iso8859_1 => {}
                }
            }

            /// Decoding consumes every byte under every supported charset.
            #[test]
            fn decoding_is_total(bytes in proptest::collection::vec(any::<u8>(), 0..80)) {
                for cs in Charset::ALL {
                    let out = to_internal(&bytes, cs);
                    prop_assert!(out.text.chars().all(|c| c != '\0' || bytes.contains(&0)));
                    if !bytes.is_empty() {
                        prop_assert!(!out.text.is_empty(), "bytes vanished under {cs}");
                    }
                }
            }
        }
    }
}
