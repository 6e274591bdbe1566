//! Constraint taxonomy: kinds, groups, parameterized instances and conflicts.

mod conflicts;
mod rule;
mod taxonomy;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use conflicts::{ConflictCondition, ConflictMatrix, ConflictRationale, ConflictRule};
pub use rule::Rule;
pub use taxonomy::{lexicon, Domain, KindSpec, ParamSpec, Taxonomy};

pub const VARIANTS_PER_KIND: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConstraintGroup {
    Keyword,
    Language,
    Length,
    Content,
    Format,
    ChangeCase,
    StartEnd,
    Punctuation,
}

impl ConstraintGroup {
    pub const ALL: [ConstraintGroup; 8] = [
        ConstraintGroup::Keyword,
        ConstraintGroup::Language,
        ConstraintGroup::Length,
        ConstraintGroup::Content,
        ConstraintGroup::Format,
        ConstraintGroup::ChangeCase,
        ConstraintGroup::StartEnd,
        ConstraintGroup::Punctuation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConstraintGroup::Keyword => "Keyword",
            ConstraintGroup::Language => "Language",
            ConstraintGroup::Length => "Length",
            ConstraintGroup::Content => "Content",
            ConstraintGroup::Format => "Format",
            ConstraintGroup::ChangeCase => "ChangeCase",
            ConstraintGroup::StartEnd => "StartEnd",
            ConstraintGroup::Punctuation => "Punctuation",
        }
    }

    pub fn kinds(self) -> impl Iterator<Item = ConstraintKind> {
        ConstraintKind::ALL.into_iter().filter(move |k| k.group() == self)
    }
}

impl fmt::Display for ConstraintGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConstraintGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConstraintGroup::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::Data(format!("unknown constraint group `{s}`")))
    }
}

macro_rules! kinds {
    ($($kind:ident => $group:ident),+ $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
        pub enum ConstraintKind {
            $($kind),+
        }

        impl ConstraintKind {
            pub const ALL: [ConstraintKind; kinds!(@count $($kind)+)] = [$(ConstraintKind::$kind),+];

            pub fn group(self) -> ConstraintGroup {
                match self {
                    $(ConstraintKind::$kind => ConstraintGroup::$group),+
                }
            }

            pub fn name(self) -> &'static str {
                match self {
                    $(ConstraintKind::$kind => stringify!($kind)),+
                }
            }
        }
    };
    (@count) => { 0 };
    (@count $head:ident $($tail:ident)*) => { 1 + kinds!(@count $($tail)*) };
}

kinds! {
    IncludeKeywords => Keyword,
    ExcludeKeywords => Keyword,
    KeywordFrequency => Keyword,
    LetterFrequency => Keyword,
    ResponseLanguage => Language,
    NumberParagraphs => Length,
    NumberWords => Length,
    NumberSentences => Length,
    ParagraphsFirstWord => Length,
    Postscript => Content,
    NumberPlaceholders => Content,
    NumberBullets => Format,
    Title => Format,
    ChooseFrom => Format,
    NumberHighlightedSections => Format,
    MultipleSections => Format,
    JsonFormat => Format,
    AllUppercase => ChangeCase,
    AllLowercase => ChangeCase,
    CapitalWordFrequency => ChangeCase,
    EndChecker => StartEnd,
    Quotation => StartEnd,
    NoCommas => Punctuation,
}

impl ConstraintKind {
    pub fn index(self) -> usize {
        self as usize
    }
}

// Kinds order by name so that every tie-break in the crate is "stable kind-name order".
impl Ord for ConstraintKind {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.name().cmp(other.name())
    }
}

impl PartialOrd for ConstraintKind {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConstraintKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConstraintKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownKind(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtLeast,
    Around,
    AtMost,
}

impl Relation {
    pub const ALL: [Relation; 3] = [Relation::AtLeast, Relation::Around, Relation::AtMost];

    pub fn code(self) -> &'static str {
        match self {
            Relation::AtLeast => "at_least",
            Relation::Around => "around",
            Relation::AtMost => "at_most",
        }
    }

    pub fn phrase(self) -> &'static str {
        match self {
            Relation::AtLeast => "at least",
            Relation::Around => "around",
            Relation::AtMost => "at most",
        }
    }
}

impl FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Relation::ALL
            .into_iter()
            .find(|r| r.code() == s)
            .ok_or_else(|| Error::Data(format!("unknown relation `{s}`")))
    }
}

/// Parameter value; serialized untagged so records read naturally
/// (`"N": 3`, `"letter": "q"`, `"keywords": ["garden"]`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Text(String),
    List(Vec<String>),
}

impl ParamValue {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            ParamValue::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            ParamValue::Text(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[String]> {
        match self {
            ParamValue::List(v) => Some(v),
            _ => None,
        }
    }
}

pub type Params = BTreeMap<String, ParamValue>;

/// One parameterized, rendered constraint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintInstance {
    pub kind: ConstraintKind,
    #[serde(default)]
    pub params: Params,
    pub variant_index: usize,
    pub rendered_text: String,
}

impl ConstraintInstance {
    pub fn group(&self) -> ConstraintGroup {
        self.kind.group()
    }

    /// Typed view of the parameters; fails if a parameter is missing or ill-typed.
    pub fn rule(&self) -> Result<Rule> {
        Rule::from_instance(self)
    }

    /// Words the instance pins down (keywords, first words). Used to keep
    /// keyword parameters disjoint inside one combination.
    pub fn lexical_words(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for name in ["keywords", "keyword", "first_word"] {
            match self.params.get(name) {
                Some(ParamValue::List(items)) => out.extend(items.iter().map(String::as_str)),
                Some(ParamValue::Text(word)) => out.push(word.as_str()),
                _ => {}
            }
        }
        out
    }
}

pub(crate) fn language_name(code: &str) -> Option<&'static str> {
    Some(match code {
        "en" => "English",
        "fr" => "French",
        "de" => "German",
        "es" => "Spanish",
        "it" => "Italian",
        "pt" => "Portuguese",
        "ru" => "Russian",
        "zh" => "Chinese",
        "ja" => "Japanese",
        "ko" => "Korean",
        _ => return None,
    })
}
