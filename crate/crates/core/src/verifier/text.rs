//! Segmentation primitives shared by the Length and Format checks.

use serde::{Deserialize, Serialize};

const MARKDOWN_MARKERS: [char; 3] = ['*', '#', '>'];

/// Tokens that end in a period without ending a sentence. Compared lowercase,
/// after stripping leading opening punctuation.
pub const ABBREVIATIONS: &[&str] = &[
    "e.g.", "i.e.", "dr.", "mr.", "mrs.", "ms.", "prof.", "st.", "vs.", "jr.", "sr.", "p.s.",
    "p.p.s.", "a.m.", "p.m.", "u.s.", "inc.", "no.", "fig.",
];

const CLOSERS: &[char] = &['"', '\'', ')', ']', '\u{201D}', '\u{2019}', '*'];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParagraphMode {
    /// Paragraphs are separated by lines consisting of `***`.
    Divider,
    /// Paragraphs are separated by one or more empty lines.
    BlankLine,
}

/// Whitespace-delimited tokens after deleting `*`, `#` and `>`.
pub fn words(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|t| t.chars().filter(|c| !MARKDOWN_MARKERS.contains(c)).collect::<String>())
        .filter(|t| !t.is_empty())
        .collect()
}

pub fn count_words(text: &str) -> usize {
    text.split_whitespace()
        .filter(|t| t.chars().any(|c| !MARKDOWN_MARKERS.contains(&c)))
        .count()
}

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_fullwidth_terminal(c: char) -> bool {
    matches!(c, '\u{3002}' | '\u{FF01}' | '\u{FF1F}')
}

/// Byte offsets just past each sentence boundary (terminator plus closers).
fn sentence_ends(text: &str) -> Vec<usize> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut ends = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (_, c) = chars[i];
        let fullwidth = is_fullwidth_terminal(c);
        if !is_terminal(c) && !fullwidth {
            i += 1;
            continue;
        }
        let run_start = i;
        let mut j = i;
        while j < chars.len() && (is_terminal(chars[j].1) || is_fullwidth_terminal(chars[j].1)) {
            j += 1;
        }
        let last_terminal = j - 1;
        while j < chars.len() && CLOSERS.contains(&chars[j].1) {
            j += 1;
        }
        let at_break = j == chars.len() || chars[j].1.is_whitespace();
        let boundary = (fullwidth || at_break) && !is_abbreviation(text, &chars, run_start, last_terminal);
        if boundary {
            ends.push(chars.get(j).map_or(text.len(), |(b, _)| *b));
        }
        i = j.max(i + 1);
    }
    ends
}

fn is_abbreviation(text: &str, chars: &[(usize, char)], run_start: usize, last_terminal: usize) -> bool {
    if chars[last_terminal].1 != '.' || last_terminal != run_start {
        return false;
    }
    let mut k = run_start;
    while k > 0 && !chars[k - 1].1.is_whitespace() {
        k -= 1;
    }
    let end = chars[last_terminal].0 + 1;
    let token = text[chars[k].0..end]
        .trim_start_matches(|c: char| !c.is_alphanumeric())
        .to_lowercase();
    ABBREVIATIONS.contains(&token.as_str())
}

/// Sentences: segments ending in `.`, `!` or `?` (runs allowed, optionally
/// followed by closing quotes or brackets) before whitespace or end of text,
/// or in a fullwidth `。！？`. Known abbreviations do not end a sentence, a
/// segment must contain a letter, and unterminated trailing text is
/// not a sentence.
pub fn sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    for end in sentence_ends(text) {
        let seg = text[start..end].trim();
        if seg.chars().any(char::is_alphabetic) {
            out.push(seg);
        }
        start = end;
    }
    out
}

pub fn count_sentences(text: &str) -> usize {
    sentences(text).len()
}

pub fn split_paragraphs(text: &str, mode: ParagraphMode) -> Vec<String> {
    let mut out = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    let mut flush = |current: &mut Vec<&str>| {
        let joined = current.join("\n");
        let trimmed = joined.trim();
        if !trimmed.is_empty() {
            out.push(trimmed.to_string());
        }
        current.clear();
    };
    for line in text.lines() {
        let separator = match mode {
            ParagraphMode::Divider => line.trim() == "***",
            ParagraphMode::BlankLine => line.trim().is_empty(),
        };
        if separator {
            flush(&mut current);
        } else {
            current.push(line);
        }
    }
    flush(&mut current);
    out
}
