//! Rule-based constraint checkers.
//!
//! Every check is a pure function of the response text and the constraint
//! instance. Responses are NFC-normalized first.

pub mod language;
pub mod text;

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::constraints::{ConstraintInstance, Relation, Rule};
use crate::error::Result;

pub use text::{count_sentences, count_words, split_paragraphs, ParagraphMode};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub satisfied: bool,
    pub detail: String,
}

impl Verdict {
    fn new(satisfied: bool, detail: impl Into<String>) -> Verdict {
        Verdict {
            satisfied,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifierConfig {
    /// Relative tolerance of the `around` relation.
    pub around_tolerance: f64,
    /// Minimum share of letters in the target language's script.
    pub language_threshold: f64,
}

impl Default for VerifierConfig {
    fn default() -> Self {
        VerifierConfig {
            around_tolerance: 0.1,
            language_threshold: 0.5,
        }
    }
}

/// Checks `response` against `instance` with the default configuration.
pub fn verify(response: &str, instance: &ConstraintInstance) -> Result<Verdict> {
    Verifier::default().verify(response, instance)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Verifier {
    pub config: VerifierConfig,
}

impl Verifier {
    pub fn new(config: VerifierConfig) -> Verifier {
        Verifier { config }
    }

    pub fn verify(&self, response: &str, instance: &ConstraintInstance) -> Result<Verdict> {
        let normalized: String = response.nfc().collect();
        Ok(self.check(&normalized, &instance.rule()?))
    }

    /// Verdicts for several constraints against one response, in order.
    pub fn verify_all(&self, response: &str, instances: &[ConstraintInstance]) -> Result<Vec<Verdict>> {
        let normalized: String = response.nfc().collect();
        instances
            .iter()
            .map(|c| Ok(self.check(&normalized, &c.rule()?)))
            .collect()
    }

    /// Checks an already normalized response against a typed rule.
    pub fn check(&self, text: &str, rule: &Rule) -> Verdict {
        match rule {
            Rule::IncludeKeywords { keywords } => {
                let missing: Vec<&str> = keywords
                    .iter()
                    .filter(|k| keyword_count(text, k) == 0)
                    .map(String::as_str)
                    .collect();
                if missing.is_empty() {
                    Verdict::new(true, "all keywords present")
                } else {
                    Verdict::new(false, format!("missing keywords: {}", missing.join(" ")))
                }
            }
            Rule::ExcludeKeywords { keywords } => {
                let found: Vec<&str> = keywords
                    .iter()
                    .filter(|k| keyword_count(text, k) > 0)
                    .map(String::as_str)
                    .collect();
                if found.is_empty() {
                    Verdict::new(true, "no forbidden keywords")
                } else {
                    Verdict::new(false, format!("forbidden keywords present: {}", found.join(" ")))
                }
            }
            Rule::KeywordFrequency { keyword, n } => {
                let count = keyword_count(text, keyword);
                Verdict::new(count == *n, format!("`{keyword}` occurs {count} times, need {n}"))
            }
            Rule::LetterFrequency { letter, n } => {
                let count = letter_count(text, *letter);
                Verdict::new(count == *n, format!("letter `{letter}` occurs {count} times, need {n}"))
            }
            Rule::ResponseLanguage { language } => match language::detect(text) {
                Some((code, share)) => Verdict::new(
                    code == language && share >= self.config.language_threshold,
                    format!("detected {code} (script share {share:.2}), need {language}"),
                ),
                None => Verdict::new(false, "no letters to identify a language"),
            },
            Rule::NumberParagraphs { n } => {
                let count = split_paragraphs(text, ParagraphMode::Divider).len();
                Verdict::new(count == *n, format!("{count} paragraphs separated by ***, need {n}"))
            }
            Rule::NumberWords { relation, n } => {
                let count = count_words(text);
                Verdict::new(
                    self.relation_holds(*relation, count, *n),
                    format!("{count} words, need {} {n}", relation.phrase()),
                )
            }
            Rule::NumberSentences { relation, n } => {
                let count = count_sentences(text);
                Verdict::new(
                    self.relation_holds(*relation, count, *n),
                    format!("{count} sentences, need {} {n}", relation.phrase()),
                )
            }
            Rule::ParagraphsFirstWord { n, i, first_word } => {
                let paragraphs = split_paragraphs(text, ParagraphMode::BlankLine);
                if paragraphs.len() != *n {
                    return Verdict::new(false, format!("{} paragraphs, need {n}", paragraphs.len()));
                }
                let got = first_word_of(&paragraphs[*i - 1]);
                Verdict::new(
                    got == first_word.to_lowercase(),
                    format!("paragraph {i} starts with `{got}`, need `{first_word}`"),
                )
            }
            Rule::Postscript { marker } => {
                let paragraphs = split_paragraphs(text, ParagraphMode::BlankLine);
                let marker_lc = marker.to_lowercase();
                let found = paragraphs.last().is_some_and(|p| {
                    p.lines()
                        .any(|l| l.trim_start().to_lowercase().starts_with(&marker_lc))
                });
                Verdict::new(found, format!("postscript `{marker}` in last paragraph: {found}"))
            }
            Rule::NumberPlaceholders { n } => {
                let count = placeholder_re().find_iter(text).count();
                Verdict::new(count >= *n, format!("{count} placeholders, need at least {n}"))
            }
            Rule::NumberBullets { n } => {
                let count = text.lines().filter(|l| l.trim_start().starts_with("* ")).count();
                Verdict::new(count == *n, format!("{count} bullet points, need {n}"))
            }
            Rule::Title => {
                let found = title_re()
                    .captures_iter(text)
                    .any(|c| !c[1].trim().is_empty());
                Verdict::new(found, if found { "title found" } else { "no <<title>>" })
            }
            Rule::ChooseFrom { options } => {
                let lc = text.to_lowercase();
                match options.iter().find(|o| lc.contains(&o.to_lowercase())) {
                    Some(o) => Verdict::new(true, format!("contains option `{o}`")),
                    None => Verdict::new(false, "none of the options present"),
                }
            }
            Rule::NumberHighlightedSections { n } => {
                let count = highlight_re().find_iter(text).count();
                Verdict::new(count >= *n, format!("{count} highlighted sections, need at least {n}"))
            }
            Rule::MultipleSections { n, splitter } => {
                let count = section_count(text, splitter);
                Verdict::new(count == *n, format!("{count} `{splitter}` headers, need {n}"))
            }
            Rule::JsonFormat => match parse_json(text) {
                Ok(true) => Verdict::new(true, "valid JSON object or array"),
                Ok(false) => Verdict::new(false, "JSON is a scalar, not an object or array"),
                Err(e) => Verdict::new(false, format!("not JSON: {e}")),
            },
            Rule::AllUppercase => {
                let lower = text.chars().filter(|c| c.is_lowercase()).count();
                let upper = text.chars().filter(|c| c.is_uppercase()).count();
                Verdict::new(
                    lower == 0 && upper > 0,
                    format!("{lower} lowercase and {upper} uppercase letters"),
                )
            }
            Rule::AllLowercase => {
                let lower = text.chars().filter(|c| c.is_lowercase()).count();
                let upper = text.chars().filter(|c| c.is_uppercase()).count();
                Verdict::new(
                    upper == 0 && lower > 0,
                    format!("{upper} uppercase and {lower} lowercase letters"),
                )
            }
            Rule::CapitalWordFrequency { n } => {
                let count = capital_word_count(text);
                Verdict::new(count >= *n, format!("{count} all-capital words, need at least {n}"))
            }
            Rule::EndChecker { phrase } => {
                let ok = text
                    .trim_end()
                    .to_lowercase()
                    .ends_with(&phrase.trim().to_lowercase());
                Verdict::new(ok, format!("ends with `{phrase}`: {ok}"))
            }
            Rule::Quotation => {
                let t = text.trim();
                let ok = t.chars().count() >= 2
                    && ((t.starts_with('"') && t.ends_with('"'))
                        || (t.starts_with('\u{201C}') && t.ends_with('\u{201D}')));
                Verdict::new(ok, format!("wrapped in double quotes: {ok}"))
            }
            Rule::NoCommas => {
                let offsets: Vec<usize> = text
                    .char_indices()
                    .filter(|(_, c)| matches!(c, ',' | '\u{FF0C}'))
                    .map(|(i, _)| i)
                    .collect();
                if offsets.is_empty() {
                    Verdict::new(true, "no commas")
                } else {
                    let shown: Vec<String> = offsets.iter().take(5).map(usize::to_string).collect();
                    Verdict::new(
                        false,
                        format!("found {} commas at offsets {}", offsets.len(), shown.join(" ")),
                    )
                }
            }
        }
    }

    fn relation_holds(&self, relation: Relation, count: usize, n: usize) -> bool {
        match relation {
            Relation::AtLeast => count >= n,
            Relation::AtMost => count <= n,
            Relation::Around => {
                (count as f64 - n as f64).abs() <= self.config.around_tolerance * n as f64
            }
        }
    }
}

/// Case-insensitive whole-word occurrences of `keyword`.
pub fn keyword_count(text: &str, keyword: &str) -> usize {
    let pattern = format!(r"(?i)\b{}\b", regex::escape(keyword.trim()));
    Regex::new(&pattern)
        .map(|re| re.find_iter(text).count())
        .unwrap_or(0)
}

/// Case-insensitive occurrences of a single letter.
pub fn letter_count(text: &str, letter: char) -> usize {
    let target: Vec<char> = letter.to_lowercase().collect();
    text.chars()
        .filter(|c| c.to_lowercase().eq(target.iter().copied()))
        .count()
}

/// Alphabetic runs of at least two letters, all uppercase.
pub fn capital_word_count(text: &str) -> usize {
    text.split(|c: char| !c.is_alphabetic())
        .filter(|w| w.chars().count() >= 2 && w.chars().all(char::is_uppercase))
        .count()
}

pub fn section_count(text: &str, splitter: &str) -> usize {
    let pattern = format!(
        r"(?im)^[ \t]*(?:#+[ \t]*)?{}[ \t]+\d+",
        regex::escape(splitter.trim())
    );
    Regex::new(&pattern)
        .map(|re| re.find_iter(text).count())
        .unwrap_or(0)
}

fn first_word_of(paragraph: &str) -> String {
    paragraph
        .split_whitespace()
        .next()
        .unwrap_or("")
        .trim_matches(|c: char| !c.is_alphanumeric())
        .to_lowercase()
}

/// Parses the trimmed text, minus surrounding code fences; `Ok(true)` for an
/// object or array.
fn parse_json(text: &str) -> std::result::Result<bool, serde_json::Error> {
    let mut body = text.trim();
    if let Some(rest) = body.strip_prefix("```") {
        // Drop an info string such as `json` on the fence line.
        body = match rest.find('\n') {
            Some(nl) if rest[..nl].chars().all(|c| c.is_alphanumeric() || c.is_whitespace()) => &rest[nl + 1..],
            _ => rest,
        };
        body = body.trim_end();
        body = body.strip_suffix("```").unwrap_or(body);
    }
    let value: serde_json::Value = serde_json::from_str(body.trim())?;
    Ok(value.is_object() || value.is_array())
}

fn placeholder_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\[[^\[\]\n]+\]").unwrap())
}

fn title_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"<<([^\n<>]+)>>").unwrap())
}

fn highlight_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\*[^\s*](?:[^\n*]*[^\s*])?\*").unwrap())
}
