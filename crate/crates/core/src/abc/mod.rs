//! ABC notation documents.
//!
//! A tune is kept as an ordered list of classified lines together with their
//! original terminators, so `serialize_tune(parse_tune(t)) == t` byte for byte.

mod token;
mod validate;

pub use token::{tokenize_music_line, Construct, MusicToken, TokenKind, TokenizeError};
pub use validate::{validate, Issue, Severity, ValidationReport};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LineKind {
    Metadata,
    Music,
    Comment,
    Blank,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LineEnding {
    #[default]
    None,
    Lf,
    CrLf,
}

impl LineEnding {
    pub fn as_str(self) -> &'static str {
        match self {
            LineEnding::None => "",
            LineEnding::Lf => "\n",
            LineEnding::CrLf => "\r\n",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeaderField {
    pub tag: char,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BodyLine {
    pub kind: LineKind,
    /// Line text without its terminator.
    pub text: String,
    pub ending: LineEnding,
    /// Non-empty only for music lines.
    pub tokens: Vec<MusicToken>,
}

impl BodyLine {
    pub fn is_key_declaration(&self) -> bool {
        self.kind == LineKind::Metadata && is_key_declaration(&self.text)
    }

    /// `(tag, value)` for a field line; the value is trimmed.
    pub fn field(&self) -> Option<(char, &str)> {
        if self.kind != LineKind::Metadata {
            return None;
        }
        let tag = self.text.chars().next()?;
        Some((tag, self.text[2..].trim()))
    }

    pub fn notes(&self) -> impl Iterator<Item = &MusicToken> {
        self.tokens.iter().filter(|t| t.kind == TokenKind::Note)
    }

    pub(crate) fn classified(text: String, ending: LineEnding) -> Result<Self, TokenizeError> {
        let kind = classify_line(&text);
        let tokens = if kind == LineKind::Music {
            tokenize_music_line(&text)?
        } else {
            Vec::new()
        };
        Ok(BodyLine {
            kind,
            text,
            ending,
            tokens,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: {source}")]
pub struct ParseError {
    /// Byte offset within the whole tune text.
    pub offset: usize,
    #[source]
    pub source: TokenizeError,
}

/// A parsed ABC tune.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbcTune {
    header_fields: Vec<HeaderField>,
    lines: Vec<BodyLine>,
    raw_text: String,
}

impl AbcTune {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut lines = Vec::new();
        let mut offset = 0;
        for (body, ending) in split_lines(text) {
            let line = BodyLine::classified(body.to_string(), ending).map_err(|e| ParseError {
                offset: offset + e.offset,
                source: e,
            })?;
            offset += body.len() + ending.as_str().len();
            lines.push(line);
        }
        Ok(AbcTune {
            header_fields: extract_header(&lines),
            lines,
            raw_text: text.to_string(),
        })
    }

    /// Rebuild derived state after lines were rewritten or removed.
    pub(crate) fn from_lines(lines: Vec<BodyLine>) -> Self {
        let raw_text = concat_lines(&lines);
        AbcTune {
            header_fields: extract_header(&lines),
            lines,
            raw_text,
        }
    }

    pub fn header_fields(&self) -> &[HeaderField] {
        &self.header_fields
    }

    /// First header value for `tag`.
    pub fn field(&self, tag: char) -> Option<&str> {
        self.header_fields
            .iter()
            .find(|f| f.tag == tag)
            .map(|f| f.value.as_str())
    }

    pub fn lines(&self) -> &[BodyLine] {
        &self.lines
    }

    pub fn into_lines(self) -> Vec<BodyLine> {
        self.lines
    }

    pub fn music_lines(&self) -> impl Iterator<Item = &BodyLine> {
        self.lines.iter().filter(|l| l.kind == LineKind::Music)
    }

    pub fn raw_text(&self) -> &str {
        &self.raw_text
    }

    pub fn serialize(&self) -> String {
        concat_lines(&self.lines)
    }
}

pub fn parse_tune(text: &str) -> Result<AbcTune, ParseError> {
    AbcTune::parse(text)
}

pub fn serialize_tune(tune: &AbcTune) -> String {
    tune.serialize()
}

fn concat_lines(lines: &[BodyLine]) -> String {
    let mut out = String::with_capacity(lines.iter().map(|l| l.text.len() + 2).sum());
    for line in lines {
        out.push_str(&line.text);
        out.push_str(line.ending.as_str());
    }
    out
}

/// Header fields run from the top of the tune through the first `K:` line,
/// or up to the first music line when there is none.
fn extract_header(lines: &[BodyLine]) -> Vec<HeaderField> {
    let mut fields: Vec<HeaderField> = Vec::new();
    for line in lines {
        match line.kind {
            LineKind::Music => break,
            LineKind::Metadata => {
                let (tag, value) = line.field().expect("metadata lines carry a field");
                if tag == '+' {
                    if let Some(last) = fields.last_mut() {
                        last.value.push(' ');
                        last.value.push_str(value);
                    }
                    continue;
                }
                fields.push(HeaderField {
                    tag,
                    value: value.to_string(),
                });
                if tag == 'K' {
                    break;
                }
            }
            LineKind::Comment | LineKind::Blank => {}
        }
    }
    fields
}

/// Splits on `\n`, remembering whether each line ended in `\n`, `\r\n` or nothing.
pub(crate) fn split_lines(text: &str) -> impl Iterator<Item = (&str, LineEnding)> {
    let mut rest = text;
    std::iter::from_fn(move || {
        if rest.is_empty() {
            return None;
        }
        match rest.find('\n') {
            Some(i) => {
                let (body, ending) = match rest[..i].strip_suffix('\r') {
                    Some(b) => (b, LineEnding::CrLf),
                    None => (&rest[..i], LineEnding::Lf),
                };
                rest = &rest[i + 1..];
                Some((body, ending))
            }
            None => {
                let body = rest;
                rest = "";
                Some((body, LineEnding::None))
            }
        }
    })
}

/// Field lines are a letter followed by `:`, or a `+:` continuation.
/// `A:|` style openings are music (a note followed by a repeat bar).
fn is_field_line(line: &str) -> bool {
    let b = line.as_bytes();
    if b.len() < 2 || b[1] != b':' {
        return false;
    }
    if b[0] == b'+' {
        return true;
    }
    b[0].is_ascii_alphabetic() && !matches!(b.get(2), Some(b'|' | b':'))
}

/// Classify a single line (without terminator). Never fails: anything that
/// is not blank, a comment, or a field line is music.
pub fn classify_line(line: &str) -> LineKind {
    if line.trim().is_empty() {
        LineKind::Blank
    } else if line.starts_with('%') {
        LineKind::Comment
    } else if is_field_line(line) {
        LineKind::Metadata
    } else {
        LineKind::Music
    }
}

pub fn is_key_declaration(line: &str) -> bool {
    line.starts_with("K:") && is_field_line(line)
}

/// Split a multi-tune file into tune texts. A tune starts at a paragraph
/// whose first non-comment line is an `X:` field; paragraphs that do not
/// start a tune stay attached to the preceding one. Separator blank lines
/// are dropped, and so is a comment-only file header before the first tune.
pub fn split_tunes(text: &str) -> Vec<String> {
    let mut tunes: Vec<String> = Vec::new();
    let mut paragraph = String::new();
    let mut pending_blank = String::new();

    for (body, ending) in split_lines(text) {
        if body.trim().is_empty() {
            if paragraph.is_empty() {
                if !tunes.is_empty() {
                    pending_blank.push_str(body);
                    pending_blank.push_str(ending.as_str());
                }
            } else {
                flush_paragraph(&mut tunes, &mut paragraph, &mut pending_blank);
                pending_blank.push_str(body);
                pending_blank.push_str(ending.as_str());
            }
            continue;
        }
        paragraph.push_str(body);
        paragraph.push_str(ending.as_str());
    }
    flush_paragraph(&mut tunes, &mut paragraph, &mut pending_blank);
    tunes
}

fn flush_paragraph(tunes: &mut Vec<String>, paragraph: &mut String, pending_blank: &mut String) {
    if paragraph.is_empty() {
        return;
    }
    let first_content = split_lines(paragraph)
        .map(|(l, _)| l)
        .find(|l| !l.starts_with('%'));
    let starts_tune = first_content.is_some_and(|l| l.starts_with("X:"));
    match tunes.last_mut() {
        None if first_content.is_none() => {}
        Some(last) if !starts_tune => {
            last.push_str(pending_blank);
            last.push_str(paragraph);
        }
        _ => tunes.push(paragraph.clone()),
    }
    paragraph.clear();
    pending_blank.clear();
}
