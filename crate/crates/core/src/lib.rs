//! Core text pipeline for word-by-word gisting of web pages.
//!
//! The pipeline turns a fetched page in an unknown language into a page of
//! target-language glosses while preserving the surrounding markup:
//!
//! 1. [`encoding`] — detect the byte encoding and convert to Unicode text.
//! 2. [`segmenter`] — split the page into structurally distinct text pieces
//!    using the markup, keeping a skeleton that can re-emit the page.
//! 3. [`langid`] — identify the language of each piece with a character
//!    n-gram model that works on very short strings.
//! 4. [`tokenizer`] — language-dependent word identification: whitespace
//!    tokenization with clitic splitting and root-form candidates for
//!    space-delimited languages, dictionary-driven longest-match
//!    segmentation for unspaced scripts.
//! 5. [`lexicon`] — bilingual dictionary loading and lookup.
//! 6. [`glosser`] — per-word gloss presentation policy and segment
//!    rendering.
//!
//! Everything here is pure computation over immutable inputs; the crate has
//! no I/O beyond loading data files, so all types are safe to share across
//! concurrent request handlers once constructed.

pub mod encoding;
pub mod glosser;
pub mod langid;
pub mod lexicon;
pub mod script;
pub mod segmenter;
pub mod tokenizer;
