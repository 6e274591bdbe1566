//! Builds responses that pass or fail a chosen subset of constraints.
//!
//! A response is planned as a set of structural counts (chunks, headers,
//! bullets, inline tokens) and rendered from a frozen random stream, so the
//! free knobs (filler sentences, extra words, letter and capital tokens) can
//! be solved one at a time against the real checkers.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unicode_normalization::UnicodeNormalization;

use super::vocab;
use crate::constraints::{ConstraintInstance, ConstraintKind, Relation, Rule};
use crate::error::{Error, Result};
use crate::verifier::{capital_word_count, count_sentences, count_words, letter_count, Verifier};

const PLAN_ATTEMPTS: usize = 20;
const LANGUAGE_BUMPS: usize = 12;
const WORD_SPREAD: usize = 30;
const SENTENCE_SPREAD: usize = 3;

/// Renders a response whose verdict on `constraints[j]` equals `wanted[j]`.
///
/// Conflicting constraints (per the shipped matrix) are not supported
/// together. Deterministic in `seed`.
pub fn compose_response(constraints: &[ConstraintInstance], wanted: &[bool], seed: u64) -> Result<String> {
    if constraints.len() != wanted.len() {
        return Err(Error::Argument(format!(
            "{} constraints but {} wanted verdicts",
            constraints.len(),
            wanted.len()
        )));
    }
    let rules = constraints
        .iter()
        .map(ConstraintInstance::rule)
        .collect::<Result<Vec<Rule>>>()?;
    let verifier = Verifier::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last_miss = String::new();
    for _ in 0..PLAN_ATTEMPTS {
        let plan = Plan::draw(&rules, wanted, &mut rng)?;
        match solve(&plan, &rules, wanted, &verifier, &mut rng) {
            Ok(text) => return Ok(text),
            Err(miss) => last_miss = miss,
        }
    }
    Err(Error::Synthetic(format!(
        "no response after {PLAN_ATTEMPTS} plans: {last_miss}"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Case {
    Normal,
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy)]
struct Window {
    lo: usize,
    hi: usize,
}

#[derive(Debug, Clone)]
struct Plan {
    filler: &'static [&'static str],
    terminator: &'static str,
    case: Case,
    json: Option<bool>,
    quote: bool,
    chunks: usize,
    divider: bool,
    /// Forced lead word per chunk.
    leads: Vec<Option<String>>,
    title: bool,
    headers: usize,
    bullets: usize,
    keywords: Vec<String>,
    placeholders: usize,
    highlights: usize,
    comma: bool,
    option: Option<String>,
    postscript: Option<String>,
    ending: Option<String>,
    letter: Option<(char, usize)>,
    caps: Option<usize>,
    words: Option<Vec<Window>>,
    sentences: Option<Vec<Window>>,
    stream: ChaCha8Rng,
}

#[derive(Debug, Clone, Copy, Default)]
struct Knobs {
    extra: usize,
    sentences: usize,
    letters: usize,
    caps: usize,
}

fn off_by_one<R: Rng>(n: usize, rng: &mut R) -> usize {
    if n > 1 && rng.random_bool(0.5) {
        n - 1
    } else {
        n + 1
    }
}

fn below<R: Rng>(n: usize, rng: &mut R) -> usize {
    rng.random_range(0..n)
}

fn at_least<R: Rng>(n: usize, rng: &mut R) -> usize {
    n + rng.random_range(0..=2)
}

/// Count windows whose members satisfy (or violate) a relation.
fn windows(relation: Relation, n: usize, satisfied: bool, spread: usize) -> Vec<Window> {
    let tolerance = crate::verifier::VerifierConfig::default().around_tolerance;
    match (relation, satisfied) {
        (Relation::AtLeast, true) => vec![Window { lo: n, hi: n + spread }],
        (Relation::AtLeast, false) => vec![Window { lo: 0, hi: n - 1 }],
        (Relation::AtMost, true) => vec![Window { lo: 0, hi: n }],
        (Relation::AtMost, false) => vec![Window { lo: n + 1, hi: n + 1 + spread }],
        (Relation::Around, sat) => {
            let inside = |c: usize| (c as f64 - n as f64).abs() <= tolerance * n as f64;
            let lo = (0..=n).find(|&c| inside(c)).unwrap_or(n);
            let hi = (n..=3 * n + 1).take_while(|&c| inside(c)).last().unwrap_or(n);
            if sat {
                vec![Window { lo, hi }]
            } else {
                let mut out = vec![Window { lo: hi + 1, hi: hi + 1 + spread }];
                if lo > 0 {
                    out.insert(0, Window { lo: 0, hi: lo - 1 });
                }
                out
            }
        }
    }
}

/// Picks a count at or above `floor` from one of the windows.
fn pick<R: Rng>(windows: &[Window], floor: usize, spread: usize, rng: &mut R) -> Option<usize> {
    let feasible: Vec<Window> = windows
        .iter()
        .filter(|w| w.hi >= floor)
        .map(|w| Window {
            lo: w.lo.max(floor),
            hi: w.hi.min(w.lo.max(floor) + spread),
        })
        .collect();
    let w = feasible.choose(rng)?;
    Some(rng.random_range(w.lo..=w.hi))
}

impl Plan {
    fn draw<R: Rng>(rules: &[Rule], wanted: &[bool], rng: &mut R) -> Result<Plan> {
        let mut plan = Plan {
            filler: vocab::ENGLISH,
            terminator: ".",
            case: Case::Normal,
            json: None,
            quote: false,
            chunks: rng.random_range(1..=3),
            divider: false,
            leads: Vec::new(),
            title: false,
            headers: 0,
            bullets: 0,
            keywords: Vec::new(),
            placeholders: 0,
            highlights: 0,
            comma: false,
            option: None,
            postscript: None,
            ending: None,
            letter: None,
            caps: None,
            words: None,
            sentences: None,
            stream: ChaCha8Rng::seed_from_u64(rng.random()),
        };
        let mut first_word: Option<(usize, String)> = None;
        for (rule, &sat) in rules.iter().zip(wanted) {
            match rule {
                Rule::IncludeKeywords { keywords } => {
                    if sat {
                        plan.keywords.extend(keywords.iter().cloned());
                    }
                }
                Rule::ExcludeKeywords { keywords } => {
                    if !sat {
                        plan.keywords.push(keywords.choose(rng).expect("non-empty").clone());
                    }
                }
                Rule::KeywordFrequency { keyword, n } => {
                    let count = if sat { *n } else { off_by_one(*n, rng) };
                    plan.keywords.extend(std::iter::repeat_n(keyword.clone(), count));
                }
                Rule::LetterFrequency { letter, n } => {
                    let count = if sat { *n } else { off_by_one(*n, rng) };
                    plan.letter = Some((*letter, count));
                }
                Rule::ResponseLanguage { language } => {
                    let body = match (sat, language.as_str()) {
                        (true, code) => code,
                        (false, "en") => "ru",
                        (false, _) => "en",
                    };
                    plan.filler = vocab::filler(body).ok_or_else(|| {
                        Error::Config(format!("no synthetic vocabulary for language `{body}`"))
                    })?;
                    plan.terminator = vocab::terminator(body);
                }
                Rule::NumberParagraphs { n } => {
                    plan.divider = true;
                    plan.chunks = if sat { *n } else { off_by_one(*n, rng) };
                }
                Rule::NumberWords { relation, n } => {
                    plan.words = Some(windows(*relation, *n, sat, WORD_SPREAD));
                }
                Rule::NumberSentences { relation, n } => {
                    plan.sentences = Some(windows(*relation, *n, sat, SENTENCE_SPREAD));
                }
                Rule::ParagraphsFirstWord { n, i, first_word: word } => {
                    if sat {
                        plan.chunks = *n;
                        first_word = Some((*i - 1, word.clone()));
                    } else if rng.random_bool(0.5) {
                        plan.chunks = off_by_one(*n, rng);
                        first_word = Some((*i - 1, word.clone()));
                    } else {
                        plan.chunks = *n;
                    }
                }
                Rule::Postscript { marker } => {
                    if sat {
                        plan.postscript = Some(marker.clone());
                    }
                }
                Rule::NumberPlaceholders { n } => {
                    plan.placeholders = if sat { at_least(*n, rng) } else { below(*n, rng) };
                }
                Rule::NumberBullets { n } => {
                    plan.bullets = if sat { *n } else { off_by_one(*n, rng) };
                }
                Rule::Title => plan.title = sat,
                Rule::ChooseFrom { options } => {
                    if sat {
                        plan.option = options.choose(rng).cloned();
                    }
                }
                Rule::NumberHighlightedSections { n } => {
                    plan.highlights = if sat { at_least(*n, rng) } else { below(*n, rng) };
                }
                Rule::MultipleSections { n, .. } => {
                    plan.headers = if sat { *n } else { off_by_one(*n, rng) };
                }
                Rule::JsonFormat => {
                    if sat {
                        plan.json = Some(rng.random_bool(0.5));
                    }
                }
                Rule::AllUppercase => {
                    if sat {
                        plan.case = Case::Upper;
                    }
                }
                Rule::AllLowercase => {
                    if sat {
                        plan.case = Case::Lower;
                    }
                }
                Rule::CapitalWordFrequency { n } => {
                    plan.caps = Some(if sat { at_least(*n, rng) } else { below(*n, rng) });
                }
                Rule::EndChecker { phrase } => {
                    if sat {
                        plan.ending = Some(phrase.clone());
                    }
                }
                Rule::Quotation => plan.quote = sat,
                Rule::NoCommas => plan.comma = !sat,
            }
        }
        if plan.json.is_some() {
            plan.chunks = 1;
        }
        plan.leads = vec![None; plan.chunks];
        if let Some((index, word)) = first_word {
            if index < plan.chunks {
                plan.leads[index] = Some(word);
            }
        }
        Ok(plan)
    }

    fn render(&self, knobs: Knobs) -> String {
        let mut rng = self.stream.clone();
        let word = |rng: &mut ChaCha8Rng| self.filler.choose(rng).expect("non-empty").to_string();

        let mut inline: Vec<String> = self.keywords.clone();
        inline.extend((0..self.placeholders).map(|_| {
            format!("[{}]", vocab::PLACEHOLDERS.choose(&mut rng).expect("non-empty"))
        }));
        for _ in 0..self.highlights {
            inline.push(format!("*{} {}*", word(&mut rng), word(&mut rng)));
        }
        if let Some((letter, _)) = self.letter {
            let tokens = vocab::letter_tokens(letter);
            inline.extend((0..knobs.letters).map(|_| tokens.choose(&mut rng).expect("tracked letter").to_string()));
        }
        inline.extend((0..knobs.caps).map(|_| vocab::CAPS_TOKENS.choose(&mut rng).expect("non-empty").to_string()));
        inline.shuffle(&mut rng);
        let inline_total = inline.len();

        let mut structural: Vec<String> = (1..=self.headers).map(|k| format!("Section {k}")).collect();
        structural.extend((0..self.bullets).map(|_| format!("* {} {}", word(&mut rng), word(&mut rng))));

        let chunks = self.chunks;
        let share = |total: usize, c: usize| total / chunks + usize::from(c < total % chunks);
        let mut paragraphs = Vec::with_capacity(chunks);
        let mut inline_iter = inline.into_iter();
        let mut structural_iter = structural.clone().into_iter();
        let mut structural_left = structural.len();
        for c in 0..chunks {
            let mut lead: Vec<String> = Vec::new();
            let first = self.leads[c].clone().unwrap_or_else(|| word(&mut rng));
            lead.push(if self.case == Case::Normal { capitalize(&first) } else { first });
            for _ in 0..share(knobs.sentences, c) {
                let mut sentence: Vec<String> = (0..3).map(|_| word(&mut rng)).collect();
                sentence.last_mut().expect("three words").push_str(self.terminator);
                lead.extend(sentence);
            }
            let tail = 1 + share(knobs.extra, c);
            for t in 0..tail {
                let mut w = word(&mut rng);
                if self.comma && c == 0 && t == 0 {
                    w.push(',');
                }
                lead.push(w);
            }
            lead.extend(inline_iter.by_ref().take(share(inline_total, c)));

            let mut lines = vec![lead.join(" ")];
            if c == 0 && self.title {
                lines.push(format!("<<{} {}>>", capitalize(&word(&mut rng)), word(&mut rng)));
            }
            let chunks_left = chunks - c;
            let count = structural_left.div_ceil(chunks_left);
            lines.extend(structural_iter.by_ref().take(count));
            structural_left -= count.min(structural_left);
            if c + 1 == chunks {
                if let Some(option) = &self.option {
                    lines.push(option.clone());
                }
                if let Some(marker) = &self.postscript {
                    lines.push(format!("{marker} {} {}", word(&mut rng), word(&mut rng)));
                }
                if let Some(ending) = &self.ending {
                    lines.push(ending.clone());
                }
            }
            paragraphs.push(lines);
        }

        let mut text = match self.json {
            Some(fenced) => {
                let body = paragraphs.concat().join(" ");
                let value = serde_json::json!({ "response": body });
                let pretty = serde_json::to_string_pretty(&value).expect("string map");
                if fenced {
                    format!("```json\n{pretty}\n```")
                } else {
                    pretty
                }
            }
            None => {
                let joined: Vec<String> = paragraphs.iter().map(|p| p.join("\n")).collect();
                joined.join(if self.divider { "\n\n***\n\n" } else { "\n\n" })
            }
        };
        if self.quote {
            text = format!("\"{text}\"");
        }
        let text = match self.case {
            Case::Normal => text,
            Case::Upper => text.to_uppercase(),
            Case::Lower => text.to_lowercase(),
        };
        text.nfc().collect()
    }
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Solves the free knobs against the plan's targets and checks every
/// verdict; the error names the mismatching kinds.
fn solve<R: Rng>(
    plan: &Plan,
    rules: &[Rule],
    wanted: &[bool],
    verifier: &Verifier,
    rng: &mut R,
) -> std::result::Result<String, String> {
    let mut knobs = Knobs::default();
    let base = plan.render(knobs);
    if let Some((letter, target)) = plan.letter {
        knobs.letters = target
            .checked_sub(letter_count(&base, letter))
            .ok_or("fixed text already exceeds the letter target")?;
    }
    if let Some(target) = plan.caps {
        knobs.caps = target
            .checked_sub(capital_word_count(&base))
            .ok_or("fixed text already exceeds the capital word target")?;
    }
    let floor = count_sentences(&plan.render(knobs));
    knobs.sentences = match &plan.sentences {
        Some(windows) => pick(windows, floor, SENTENCE_SPREAD, rng).ok_or("sentence target infeasible")? - floor,
        None => rng.random_range(0..=2),
    };
    let floor = count_words(&plan.render(knobs));
    knobs.extra = match &plan.words {
        Some(windows) => pick(windows, floor, WORD_SPREAD, rng).ok_or("word target infeasible")? - floor,
        None => rng.random_range(0..=8),
    };

    let mut mismatch = String::new();
    for _ in 0..LANGUAGE_BUMPS {
        let text = plan.render(knobs);
        let verdicts: Vec<bool> = rules
            .iter()
            .map(|r| verifier.check(&text, r).satisfied)
            .collect();
        let wrong: Vec<ConstraintKind> = rules
            .iter()
            .zip(verdicts.iter().zip(wanted))
            .filter(|(_, (got, want))| got != want)
            .map(|(r, _)| r.kind())
            .collect();
        if wrong.is_empty() {
            return Ok(text);
        }
        mismatch = format!("mismatched {wrong:?}");
        // A short body can lose the language vote to fixed English tokens.
        if wrong == [ConstraintKind::ResponseLanguage] && plan.words.is_none() {
            knobs.extra += 10;
            continue;
        }
        break;
    }
    Err(mismatch)
}
