//! Shared fixtures and a random generator of valid ABC tunes.
#![allow(dead_code)]

pub mod linalg;

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

pub fn fixture_tunes() -> Vec<String> {
    let text = std::fs::read_to_string(fixture("tunes.abc")).unwrap();
    abcforge::abc::split_tunes(&text)
}

const KEYS: &[&str] = &[
    "C",
    "G",
    "D",
    "A",
    "E",
    "F",
    "Bb",
    "Eb",
    "D#",
    "Am",
    "Em",
    "Dmix",
    "Ador",
    "Edor",
    "Gmaj",
    "F#m",
    "C clef=treble",
    "G % key of G",
];
const LETTERS: &[u8] = b"CDEFGABcdefgab";
const DURATIONS: &[&str] = &["", "", "", "2", "3", "4", "/2", "/", "3/2", ">"];
const DECORATIONS: &[&str] = &["~", ".", "!trill!", "!fermata!", "+roll+"];
const BARLINES: &[&str] = &["|", "|", "|", "||", "|]", "|:", ":|", "::", "[|", ":||:"];
const ANNOTATIONS: &[&str] = &["\"G\"", "\"Am7\"", "\"^fine\"", "\"_D.C.\"", "\"D/F#\""];

fn note(rng: &mut ChaCha8Rng) -> String {
    let mut s = String::new();
    if rng.gen_bool(0.15) {
        s.push_str(["^", "_", "=", "^^", "__"].choose(rng).unwrap());
    }
    s.push(*LETTERS.choose(rng).unwrap() as char);
    match rng.gen_range(0..8) {
        0 => s.push('\''),
        1 => s.push(','),
        _ => {}
    }
    s.push_str(DURATIONS.choose(rng).unwrap());
    s
}

fn element(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..20) {
        0..=9 => note(rng),
        10 => format!("z{}", DURATIONS.choose(rng).unwrap()),
        11 => format!("[{}{}{}]", note(rng), note(rng), note(rng)),
        12 => format!("{}{}", ANNOTATIONS.choose(rng).unwrap(), note(rng)),
        13 => format!("{}{}", DECORATIONS.choose(rng).unwrap(), note(rng)),
        14 => format!("{{g}}{}", note(rng)),
        15 => format!("(3{}{}{}", note(rng), note(rng), note(rng)),
        16 => format!("({}{})", note(rng), note(rng)),
        17 => format!("{}-{}", note(rng), note(rng)),
        18 => " ".into(),
        _ => ["[K:G]", "[M:3/4]", "[L:1/4]", "[K:Ador]"]
            .choose(rng)
            .unwrap()
            .to_string(),
    }
}

fn music_line(rng: &mut ChaCha8Rng) -> String {
    let mut line = String::new();
    if rng.gen_bool(0.3) {
        line.push_str(BARLINES.choose(rng).unwrap());
    }
    for bar in 0..rng.gen_range(1..=4) {
        if bar == 1 && rng.gen_bool(0.1) {
            line.push_str("[1 ");
        }
        for _ in 0..rng.gen_range(1..=6) {
            line.push_str(&element(rng));
        }
        line.push_str(BARLINES.choose(rng).unwrap());
    }
    if rng.gen_bool(0.1) {
        line.push_str(" % end of phrase");
    }
    line
}

/// A random tune that passes validation. Line endings, optional headers,
/// body comments and lyric lines vary with the seed.
pub fn random_tune(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eol = if rng.gen_bool(0.2) { "\r\n" } else { "\n" };
    let mut lines = vec![format!("X:{}", rng.gen_range(1..1000))];
    if rng.gen_bool(0.7) {
        lines.push("T:Generated tune".into());
    }
    if rng.gen_bool(0.5) {
        lines.push(
            ["M:4/4", "M:6/8", "M:3/4", "M:C|"]
                .choose(&mut rng)
                .unwrap()
                .to_string(),
        );
    }
    if rng.gen_bool(0.5) {
        lines.push("L:1/8".into());
    }
    if rng.gen_bool(0.2) {
        lines.push("% header comment".into());
    }
    lines.push(format!("K:{}", KEYS.choose(&mut rng).unwrap()));
    for _ in 0..rng.gen_range(1..=8) {
        match rng.gen_range(0..12) {
            0 => lines.push("% body comment".into()),
            1 => lines.push("W:words under the tune".into()),
            2 => lines.push(format!("K:{}", KEYS.choose(&mut rng).unwrap())),
            _ => {}
        }
        lines.push(music_line(&mut rng));
    }
    let mut text = lines.join(eol);
    if rng.gen_bool(0.8) {
        text.push_str(eol);
    }
    text
}
