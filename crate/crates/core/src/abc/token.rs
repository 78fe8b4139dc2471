//! Tokenizer for ABC music lines.
//!
//! Tokens tile the line: every byte belongs to exactly one token. Letters
//! inside annotations, inline fields, decorations and trailing comments are
//! never reported as notes, which is what lets the degradation stages touch
//! pitches without breaking the surrounding syntax.

use std::fmt;
use std::ops::Range;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Note,
    Rest,
    Barline,
    InlineField,
    ChordStart,
    ChordEnd,
    Annotation,
    Duration,
    Tie,
    Slur,
    Decoration,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MusicToken {
    pub kind: TokenKind,
    /// Byte range within the line.
    pub span: Range<usize>,
    pub note_letter: Option<char>,
    pub accidental: Option<String>,
    /// Positive for `'`, negative for `,`.
    pub octave_marks: i32,
    pub duration_text: Option<String>,
    /// True for notes written inside a `{...}` grace group.
    pub in_grace: bool,
}

impl MusicToken {
    fn plain(kind: TokenKind, span: Range<usize>) -> Self {
        MusicToken {
            kind,
            span,
            note_letter: None,
            accidental: None,
            octave_marks: 0,
            duration_text: None,
            in_grace: false,
        }
    }

    /// Byte offset (within the line) of the note letter, if this is a note.
    pub fn letter_offset(&self) -> Option<usize> {
        self.note_letter
            .map(|_| self.span.start + self.accidental.as_ref().map_or(0, String::len))
    }

    pub fn text<'a>(&self, line: &'a str) -> &'a str {
        &line[self.span.clone()]
    }

    /// Annotation body without the surrounding quotes.
    pub fn annotation_text<'a>(&self, line: &'a str) -> Option<&'a str> {
        (self.kind == TokenKind::Annotation).then(|| &line[self.span.start + 1..self.span.end - 1])
    }

    /// `(tag, value)` of an inline field such as `[K:G]`.
    pub fn inline_field<'a>(&self, line: &'a str) -> Option<(char, &'a str)> {
        if self.kind != TokenKind::InlineField {
            return None;
        }
        let inner = &line[self.span.start + 1..self.span.end - 1];
        let tag = inner.chars().next()?;
        Some((tag, &inner[2..]))
    }

    pub(crate) fn shifted(mut self, delta: isize) -> Self {
        self.span = shift(self.span.start, delta)..shift(self.span.end, delta);
        self
    }
}

fn shift(pos: usize, delta: isize) -> usize {
    (pos as isize + delta) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construct {
    Annotation,
    Chord,
    InlineField,
}

impl fmt::Display for Construct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Construct::Annotation => "annotation",
            Construct::Chord => "chord",
            Construct::InlineField => "inline field",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unterminated {construct} starting at byte {offset}")]
pub struct TokenizeError {
    pub offset: usize,
    pub construct: Construct,
}

fn is_note_letter(b: u8) -> bool {
    matches!(b, b'A'..=b'G' | b'a'..=b'g')
}

/// Split a music line into tokens.
pub fn tokenize_music_line(line: &str) -> Result<Vec<MusicToken>, TokenizeError> {
    Tokenizer {
        line,
        bytes: line.as_bytes(),
        pos: 0,
        chord_start: None,
        in_grace: false,
        tokens: Vec::new(),
    }
    .run()
}

struct Tokenizer<'a> {
    line: &'a str,
    bytes: &'a [u8],
    pos: usize,
    chord_start: Option<usize>,
    in_grace: bool,
    tokens: Vec<MusicToken>,
}

impl<'a> Tokenizer<'a> {
    fn peek(&self, ahead: usize) -> Option<u8> {
        self.bytes.get(self.pos + ahead).copied()
    }

    fn eat_while(&mut self, pred: impl Fn(u8) -> bool) -> usize {
        let start = self.pos;
        while self.pos < self.bytes.len() && pred(self.bytes[self.pos]) {
            self.pos += 1;
        }
        self.pos - start
    }

    fn find_from(&self, from: usize, needle: u8) -> Option<usize> {
        self.bytes[from..]
            .iter()
            .position(|&b| b == needle)
            .map(|i| from + i)
    }

    fn push(&mut self, kind: TokenKind, start: usize) {
        self.tokens.push(MusicToken::plain(kind, start..self.pos));
    }

    fn run(mut self) -> Result<Vec<MusicToken>, TokenizeError> {
        while self.pos < self.bytes.len() {
            let start = self.pos;
            let b = self.bytes[start];
            match b {
                b' ' | b'\t' | b'\r' => {
                    self.eat_while(|c| matches!(c, b' ' | b'\t' | b'\r'));
                    self.push(TokenKind::Other, start);
                }
                b'%' => {
                    self.pos = self.bytes.len();
                    self.push(TokenKind::Other, start);
                }
                b'"' => {
                    let end = self.find_from(start + 1, b'"').ok_or(TokenizeError {
                        offset: start,
                        construct: Construct::Annotation,
                    })?;
                    self.pos = end + 1;
                    self.push(TokenKind::Annotation, start);
                }
                b'!' | b'+' => match self.find_from(start + 1, b) {
                    Some(end)
                        if end > start + 1
                            && self.bytes[start + 1..end]
                                .iter()
                                .all(|c| c.is_ascii_graphic()) =>
                    {
                        self.pos = end + 1;
                        self.push(TokenKind::Decoration, start);
                    }
                    _ => {
                        self.pos += 1;
                        self.push(TokenKind::Other, start);
                    }
                },
                b'.' | b'~' => {
                    self.pos += 1;
                    self.push(TokenKind::Decoration, start);
                }
                b'[' => self.open_bracket()?,
                b']' => {
                    self.pos += 1;
                    if self.chord_start.take().is_some() {
                        self.push(TokenKind::ChordEnd, start);
                    } else {
                        self.push(TokenKind::Other, start);
                    }
                }
                b'|' => {
                    self.pos += 1;
                    self.eat_while(|c| matches!(c, b'|' | b':'));
                    self.finish_barline(start);
                }
                b':' if matches!(self.peek(1), Some(b':' | b'|')) => {
                    self.eat_while(|c| c == b':');
                    self.eat_while(|c| c == b'|');
                    self.eat_while(|c| c == b':');
                    self.finish_barline(start);
                }
                b'{' | b'}' => {
                    self.in_grace = b == b'{';
                    self.pos += 1;
                    self.push(TokenKind::Other, start);
                }
                b'(' if self.peek(1).is_some_and(|c| c.is_ascii_digit()) => {
                    // tuplet marker such as (3 or (3:2:3
                    self.pos += 1;
                    self.eat_while(|c| c.is_ascii_digit() || c == b':');
                    self.push(TokenKind::Other, start);
                }
                b'(' | b')' => {
                    self.pos += 1;
                    self.push(TokenKind::Slur, start);
                }
                b'-' => {
                    self.pos += 1;
                    self.push(TokenKind::Tie, start);
                }
                b'^' | b'_' | b'=' => self.note_with_accidental(),
                _ if is_note_letter(b) => self.note(start),
                b'z' | b'Z' => {
                    self.pos += 1;
                    let duration = self.duration();
                    let mut tok = MusicToken::plain(TokenKind::Rest, start..self.pos);
                    tok.duration_text = duration;
                    self.tokens.push(tok);
                }
                b'0'..=b'9' | b'/' => {
                    self.eat_while(|c| c.is_ascii_digit() || c == b'/');
                    self.push(TokenKind::Duration, start);
                }
                _ if b.is_ascii() => {
                    self.pos += 1;
                    self.push(TokenKind::Other, start);
                }
                _ => {
                    let width = self.line[start..].chars().next().map_or(1, char::len_utf8);
                    self.pos += width;
                    self.push(TokenKind::Other, start);
                }
            }
        }
        if let Some(offset) = self.chord_start {
            return Err(TokenizeError {
                offset,
                construct: Construct::Chord,
            });
        }
        Ok(self.tokens)
    }

    fn open_bracket(&mut self) -> Result<(), TokenizeError> {
        let start = self.pos;
        match (self.peek(1), self.peek(2)) {
            (Some(b'|'), _) => {
                self.pos += 2;
                self.finish_barline(start);
            }
            (Some(tag), Some(b':')) if tag.is_ascii_alphabetic() => {
                let end = self.find_from(start + 3, b']').ok_or(TokenizeError {
                    offset: start,
                    construct: Construct::InlineField,
                })?;
                self.pos = end + 1;
                self.push(TokenKind::InlineField, start);
            }
            (Some(d), _) if d.is_ascii_digit() => {
                // volta bracket such as [1 or [2
                self.pos += 1;
                self.eat_while(|c| c.is_ascii_digit() || c == b',' || c == b'-');
                self.push(TokenKind::Other, start);
            }
            _ => {
                if self.chord_start.is_some() {
                    return Err(TokenizeError {
                        offset: start,
                        construct: Construct::Chord,
                    });
                }
                self.chord_start = Some(start);
                self.pos += 1;
                self.push(TokenKind::ChordStart, start);
            }
        }
        Ok(())
    }

    fn finish_barline(&mut self, start: usize) {
        if self.peek(0) == Some(b']') {
            self.pos += 1;
        }
        // volta number directly after the bar, e.g. |1 or :|2
        self.eat_while(|c| c.is_ascii_digit());
        self.push(TokenKind::Barline, start);
    }

    fn note_with_accidental(&mut self) {
        let start = self.pos;
        let first = self.bytes[start];
        self.pos += 1;
        if first != b'=' && self.peek(0) == Some(first) {
            self.pos += 1;
        }
        match self.peek(0) {
            Some(c) if is_note_letter(c) => self.note(start),
            _ => {
                self.pos = start + 1;
                self.push(TokenKind::Other, start);
            }
        }
    }

    /// Parses from `self.pos` (at the letter); `start` may precede it by the accidental.
    fn note(&mut self, start: usize) {
        let accidental = (self.pos > start).then(|| self.line[start..self.pos].to_string());
        let letter = self.bytes[self.pos] as char;
        self.pos += 1;
        let mut octave_marks = 0i32;
        while let Some(c) = self.peek(0) {
            match c {
                b'\'' => octave_marks += 1,
                b',' => octave_marks -= 1,
                _ => break,
            }
            self.pos += 1;
        }
        let duration_text = self.duration();
        self.tokens.push(MusicToken {
            kind: TokenKind::Note,
            span: start..self.pos,
            note_letter: Some(letter),
            accidental,
            octave_marks,
            duration_text,
            in_grace: self.in_grace,
        });
    }

    fn duration(&mut self) -> Option<String> {
        let start = self.pos;
        (self.eat_while(|c| c.is_ascii_digit() || c == b'/') > 0)
            .then(|| self.line[start..self.pos].to_string())
    }
}
