//! Dominant-language identification for the ResponseLanguage check.
//!
//! Script shares decide the non-Latin languages; among Latin-script languages
//! the trigram detector from `whatlang` picks, restricted to the shipped set.

use std::sync::OnceLock;

use whatlang::{Detector, Lang};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScriptCounts {
    pub latin: usize,
    pub cyrillic: usize,
    pub han: usize,
    pub kana: usize,
    pub hangul: usize,
    pub other: usize,
}

impl ScriptCounts {
    pub fn of(text: &str) -> ScriptCounts {
        let mut s = ScriptCounts::default();
        for c in text.chars().filter(|c| c.is_alphabetic()) {
            match c as u32 {
                0x41..=0x5A | 0x61..=0x7A | 0xC0..=0x24F | 0x1E00..=0x1EFF => s.latin += 1,
                0x400..=0x52F => s.cyrillic += 1,
                0x3040..=0x30FF | 0x31F0..=0x31FF | 0xFF66..=0xFF9D => s.kana += 1,
                0xAC00..=0xD7AF | 0x1100..=0x11FF | 0x3130..=0x318F => s.hangul += 1,
                0x4E00..=0x9FFF | 0x3400..=0x4DBF | 0xF900..=0xFAFF | 0x20000..=0x2FFFF => s.han += 1,
                _ => s.other += 1,
            }
        }
        s
    }

    pub fn total(&self) -> usize {
        self.latin + self.cyrillic + self.han + self.kana + self.hangul + self.other
    }
}

/// Kana share of the CJK letters above which Han-script text counts as Japanese.
const KANA_SHARE_FOR_JAPANESE: f64 = 0.1;

const LATIN: [(&str, Lang); 6] = [
    ("en", Lang::Eng),
    ("fr", Lang::Fra),
    ("de", Lang::Deu),
    ("es", Lang::Spa),
    ("it", Lang::Ita),
    ("pt", Lang::Por),
];

fn latin_detector() -> &'static Detector {
    static D: OnceLock<Detector> = OnceLock::new();
    D.get_or_init(|| Detector::with_allowlist(LATIN.iter().map(|(_, l)| *l).collect()))
}

/// Returns the detected language code and the share of letters written in the
/// winning script, or `None` for text without letters.
pub fn detect(text: &str) -> Option<(&'static str, f64)> {
    let s = ScriptCounts::of(text);
    let total = s.total();
    if total == 0 {
        return None;
    }
    let cjk = s.han + s.kana;
    let candidates = [
        ("latin", s.latin),
        ("ru", s.cyrillic),
        ("cjk", cjk),
        ("ko", s.hangul),
    ];
    let (script, count) = candidates.iter().copied().max_by_key(|(_, n)| *n).unwrap();
    let share = count as f64 / total as f64;
    let code = match script {
        "latin" => {
            let latin_only: String = text
                .split_whitespace()
                .filter(|w| w.chars().any(|c| c.is_ascii_alphabetic()))
                .collect::<Vec<_>>()
                .join(" ");
            let lang = latin_detector().detect_lang(&latin_only)?;
            LATIN.iter().find(|(_, l)| *l == lang).map(|(code, _)| *code)?
        }
        "cjk" if s.kana as f64 / cjk as f64 >= KANA_SHARE_FOR_JAPANESE => "ja",
        "cjk" => "zh",
        other => other,
    };
    Some((code, share))
}

/// True iff `language` is detected and its script covers at least `threshold`
/// of the letters.
pub fn is_language(text: &str, language: &str, threshold: f64) -> bool {
    matches!(detect(text), Some((code, share)) if code == language && share >= threshold)
}
