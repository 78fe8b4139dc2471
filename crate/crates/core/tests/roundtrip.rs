mod common;

use abcforge::abc::{parse_tune, tokenize_music_line, validate, LineKind, TokenKind};
use proptest::prelude::*;

#[test]
fn fixture_corpus_round_trips_byte_for_byte() {
    let tunes = common::fixture_tunes();
    assert!(tunes.len() >= 50, "only {} fixture tunes", tunes.len());
    for (i, text) in tunes.iter().enumerate() {
        let tune = parse_tune(text).unwrap_or_else(|e| panic!("tune {i}: {e}"));
        assert_eq!(tune.serialize(), *text, "tune {i}");
        assert!(validate(text).is_valid, "tune {i} invalid");
    }
}

#[test]
fn fixture_corpus_round_trips_with_crlf() {
    for text in common::fixture_tunes() {
        let crlf = text.replace('\n', "\r\n");
        assert_eq!(parse_tune(&crlf).unwrap().serialize(), crlf);
    }
}

#[test]
fn fixture_corpus_has_long_and_short_tunes() {
    let lens: Vec<usize> = common::fixture_tunes()
        .iter()
        .map(|t| t.chars().count())
        .collect();
    assert!(lens.iter().filter(|&&n| n > 500).count() >= 3);
    assert!(lens.contains(&500));
}

#[test]
fn generated_tunes_round_trip() {
    for seed in 0..2000 {
        let text = common::random_tune(seed);
        let tune = parse_tune(&text).unwrap_or_else(|e| panic!("seed {seed}: {e}\n{text}"));
        assert_eq!(tune.serialize(), text, "seed {seed}");
        let report = validate(&text);
        assert!(report.is_valid, "seed {seed}: {:?}\n{text}", report.issues);
    }
}

proptest! {
    #[test]
    fn tokens_tile_every_music_line(seed in any::<u64>()) {
        let text = common::random_tune(seed);
        let tune = parse_tune(&text).unwrap();
        for line in tune.music_lines() {
            let mut pos = 0;
            for tok in &line.tokens {
                prop_assert_eq!(tok.span.start, pos);
                prop_assert!(tok.span.end > tok.span.start);
                pos = tok.span.end;
            }
            prop_assert_eq!(pos, line.text.len());
        }
    }

    #[test]
    fn note_letters_point_at_letters(seed in any::<u64>()) {
        let text = common::random_tune(seed);
        let tune = parse_tune(&text).unwrap();
        for line in tune.music_lines() {
            for tok in line.tokens.iter().filter(|t| t.kind == TokenKind::Note) {
                let at = tok.letter_offset().unwrap();
                let letter = tok.note_letter.unwrap();
                prop_assert_eq!(line.text.as_bytes()[at] as char, letter);
                prop_assert!(letter.is_ascii_alphabetic());
            }
        }
    }

    #[test]
    fn arbitrary_text_never_panics(text in "[ -~\n]{0,200}") {
        let _ = validate(&text);
        if let Ok(tune) = parse_tune(&text) {
            prop_assert_eq!(tune.serialize(), text);
        }
    }

    #[test]
    fn tokenizer_tiles_arbitrary_lines(line in "[A-Ga-gz^_=,'0-9/|:\\[\\] (){}.~!+-]{0,80}") {
        if let Ok(tokens) = tokenize_music_line(&line) {
            let joined: String = tokens.iter().map(|t| t.text(&line)).collect();
            prop_assert_eq!(joined, line);
        }
    }
}

#[test]
fn line_kinds_of_a_fixture_tune() {
    let tune = parse_tune(&common::fixture_tunes()[52]).unwrap();
    let kinds: Vec<LineKind> = tune.lines().iter().map(|l| l.kind).collect();
    assert!(kinds.contains(&LineKind::Comment));
    assert!(kinds.contains(&LineKind::Music));
    assert_eq!(tune.field('T'), Some("Da Slockit Light"));
}
