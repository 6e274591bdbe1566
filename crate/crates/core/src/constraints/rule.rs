use super::{language_name, ConstraintInstance, ConstraintKind, ParamValue, Relation};
use crate::error::{Error, Result};

/// Typed parameters of a constraint instance, one variant per kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    IncludeKeywords { keywords: Vec<String> },
    ExcludeKeywords { keywords: Vec<String> },
    KeywordFrequency { keyword: String, n: usize },
    LetterFrequency { letter: char, n: usize },
    ResponseLanguage { language: String },
    NumberParagraphs { n: usize },
    NumberWords { relation: Relation, n: usize },
    NumberSentences { relation: Relation, n: usize },
    /// `i` is 1-based.
    ParagraphsFirstWord { n: usize, i: usize, first_word: String },
    Postscript { marker: String },
    NumberPlaceholders { n: usize },
    NumberBullets { n: usize },
    Title,
    ChooseFrom { options: Vec<String> },
    NumberHighlightedSections { n: usize },
    MultipleSections { n: usize, splitter: String },
    JsonFormat,
    AllUppercase,
    AllLowercase,
    CapitalWordFrequency { n: usize },
    EndChecker { phrase: String },
    Quotation,
    NoCommas,
}

struct Reader<'a> {
    instance: &'a ConstraintInstance,
}

impl Reader<'_> {
    fn missing(&self, name: &str, expected: &str) -> Error {
        Error::Data(format!(
            "{}: parameter `{name}` missing or not {expected}",
            self.instance.kind
        ))
    }

    fn count(&self, name: &str) -> Result<usize> {
        match self.instance.params.get(name).and_then(ParamValue::as_int) {
            Some(v) if v >= 1 => Ok(v as usize),
            _ => Err(self.missing(name, "a positive integer")),
        }
    }

    fn text(&self, name: &str) -> Result<String> {
        match self.instance.params.get(name).and_then(ParamValue::as_text) {
            Some(v) if !v.trim().is_empty() => Ok(v.to_string()),
            _ => Err(self.missing(name, "non-empty text")),
        }
    }

    fn list(&self, name: &str) -> Result<Vec<String>> {
        match self.instance.params.get(name).and_then(ParamValue::as_list) {
            Some(v) if !v.is_empty() && v.iter().all(|s| !s.trim().is_empty()) => Ok(v.to_vec()),
            _ => Err(self.missing(name, "a non-empty list")),
        }
    }
}

impl Rule {
    pub fn from_instance(instance: &ConstraintInstance) -> Result<Rule> {
        let r = Reader { instance };
        Ok(match instance.kind {
            ConstraintKind::IncludeKeywords => Rule::IncludeKeywords {
                keywords: r.list("keywords")?,
            },
            ConstraintKind::ExcludeKeywords => Rule::ExcludeKeywords {
                keywords: r.list("keywords")?,
            },
            ConstraintKind::KeywordFrequency => Rule::KeywordFrequency {
                keyword: r.text("keyword")?,
                n: r.count("N")?,
            },
            ConstraintKind::LetterFrequency => {
                let text = r.text("letter")?;
                let mut chars = text.chars();
                let letter = match (chars.next(), chars.next()) {
                    (Some(c), None) if c.is_alphabetic() => c,
                    _ => return Err(r.missing("letter", "a single letter")),
                };
                Rule::LetterFrequency {
                    letter,
                    n: r.count("N")?,
                }
            }
            ConstraintKind::ResponseLanguage => {
                let language = r.text("language")?;
                if language_name(&language).is_none() {
                    return Err(Error::Data(format!("unsupported language `{language}`")));
                }
                Rule::ResponseLanguage { language }
            }
            ConstraintKind::NumberParagraphs => Rule::NumberParagraphs { n: r.count("N")? },
            ConstraintKind::NumberWords => Rule::NumberWords {
                relation: r.text("relation")?.parse()?,
                n: r.count("N")?,
            },
            ConstraintKind::NumberSentences => Rule::NumberSentences {
                relation: r.text("relation")?.parse()?,
                n: r.count("N")?,
            },
            ConstraintKind::ParagraphsFirstWord => {
                let n = r.count("N")?;
                let i = r.count("i")?;
                if i > n {
                    return Err(Error::Data(format!(
                        "ParagraphsFirstWord: paragraph index {i} exceeds N={n}"
                    )));
                }
                Rule::ParagraphsFirstWord {
                    n,
                    i,
                    first_word: r.text("first_word")?,
                }
            }
            ConstraintKind::Postscript => Rule::Postscript {
                marker: r.text("marker")?,
            },
            ConstraintKind::NumberPlaceholders => Rule::NumberPlaceholders { n: r.count("N")? },
            ConstraintKind::NumberBullets => Rule::NumberBullets { n: r.count("N")? },
            ConstraintKind::Title => Rule::Title,
            ConstraintKind::ChooseFrom => Rule::ChooseFrom {
                options: r.list("options")?,
            },
            ConstraintKind::NumberHighlightedSections => {
                Rule::NumberHighlightedSections { n: r.count("N")? }
            }
            ConstraintKind::MultipleSections => Rule::MultipleSections {
                n: r.count("N")?,
                splitter: r.text("splitter")?,
            },
            ConstraintKind::JsonFormat => Rule::JsonFormat,
            ConstraintKind::AllUppercase => Rule::AllUppercase,
            ConstraintKind::AllLowercase => Rule::AllLowercase,
            ConstraintKind::CapitalWordFrequency => Rule::CapitalWordFrequency { n: r.count("N")? },
            ConstraintKind::EndChecker => Rule::EndChecker {
                phrase: r.text("phrase")?,
            },
            ConstraintKind::Quotation => Rule::Quotation,
            ConstraintKind::NoCommas => Rule::NoCommas,
        })
    }

    pub fn kind(&self) -> ConstraintKind {
        match self {
            Rule::IncludeKeywords { .. } => ConstraintKind::IncludeKeywords,
            Rule::ExcludeKeywords { .. } => ConstraintKind::ExcludeKeywords,
            Rule::KeywordFrequency { .. } => ConstraintKind::KeywordFrequency,
            Rule::LetterFrequency { .. } => ConstraintKind::LetterFrequency,
            Rule::ResponseLanguage { .. } => ConstraintKind::ResponseLanguage,
            Rule::NumberParagraphs { .. } => ConstraintKind::NumberParagraphs,
            Rule::NumberWords { .. } => ConstraintKind::NumberWords,
            Rule::NumberSentences { .. } => ConstraintKind::NumberSentences,
            Rule::ParagraphsFirstWord { .. } => ConstraintKind::ParagraphsFirstWord,
            Rule::Postscript { .. } => ConstraintKind::Postscript,
            Rule::NumberPlaceholders { .. } => ConstraintKind::NumberPlaceholders,
            Rule::NumberBullets { .. } => ConstraintKind::NumberBullets,
            Rule::Title => ConstraintKind::Title,
            Rule::ChooseFrom { .. } => ConstraintKind::ChooseFrom,
            Rule::NumberHighlightedSections { .. } => ConstraintKind::NumberHighlightedSections,
            Rule::MultipleSections { .. } => ConstraintKind::MultipleSections,
            Rule::JsonFormat => ConstraintKind::JsonFormat,
            Rule::AllUppercase => ConstraintKind::AllUppercase,
            Rule::AllLowercase => ConstraintKind::AllLowercase,
            Rule::CapitalWordFrequency { .. } => ConstraintKind::CapitalWordFrequency,
            Rule::EndChecker { .. } => ConstraintKind::EndChecker,
            Rule::Quotation => ConstraintKind::Quotation,
            Rule::NoCommas => ConstraintKind::NoCommas,
        }
    }
}
