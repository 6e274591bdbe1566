use std::collections::{BTreeSet, HashSet};
use std::path::Path;
use std::sync::OnceLock;

use rand::seq::{IndexedRandom, IteratorRandom};
use rand::Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{
    language_name, ConstraintGroup, ConstraintInstance, ConstraintKind, ParamValue, Params,
    Relation, VARIANTS_PER_KIND,
};
use crate::error::{Error, Result};

const TAXONOMY_JSON: &str = include_str!("../../data/taxonomy.json");
const LEXICON_TXT: &str = include_str!("../../data/lexicon.txt");

/// Value domain of one parameter, as declared in the taxonomy file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Domain {
    KeywordList { min: usize, max: usize },
    Word,
    Int { min: i64, max: i64 },
    ChoiceInt { values: Vec<i64> },
    Relation,
    Language,
    Letter { values: Vec<String> },
    Text { values: Vec<String> },
    OptionSet { values: Vec<Vec<String>> },
    /// 1-based index into the paragraphs counted by the named integer parameter.
    ParagraphIndex { of: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub domain: Domain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindSpec {
    pub kind: ConstraintKind,
    pub group: ConstraintGroup,
    pub parameter_schema: Vec<ParamSpec>,
    pub templates: Vec<String>,
}

impl KindSpec {
    fn param(&self, name: &str) -> Option<&ParamSpec> {
        self.parameter_schema.iter().find(|p| p.name == name)
    }
}

#[derive(Deserialize)]
struct TaxonomyFile {
    version: u32,
    languages: Vec<String>,
    kinds: Vec<KindSpec>,
}

/// The constraint registry: per-kind schemas and description variants, the
/// language set and the keyword lexicon.
#[derive(Debug, Clone)]
pub struct Taxonomy {
    specs: Vec<KindSpec>,
    languages: Vec<String>,
    lexicon: Vec<String>,
}

fn placeholder_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\{([A-Za-z_][A-Za-z0-9_]*)\}").unwrap())
}

/// The packaged common-noun lexicon keywords are drawn from.
pub fn lexicon() -> &'static [String] {
    static LEX: OnceLock<Vec<String>> = OnceLock::new();
    LEX.get_or_init(|| parse_lexicon(LEXICON_TXT))
}

fn parse_lexicon(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

fn ordinal(i: i64) -> String {
    let suffix = match (i % 10, i % 100) {
        (_, 11..=13) => "th",
        (1, _) => "st",
        (2, _) => "nd",
        (3, _) => "rd",
        _ => "th",
    };
    format!("{i}{suffix}")
}

impl Taxonomy {
    pub fn builtin() -> &'static Taxonomy {
        static TAX: OnceLock<Taxonomy> = OnceLock::new();
        TAX.get_or_init(|| {
            Taxonomy::from_json(TAXONOMY_JSON).expect("packaged taxonomy is valid")
        })
    }

    pub fn from_json(json: &str) -> Result<Taxonomy> {
        let file: TaxonomyFile = serde_json::from_str(json)
            .map_err(|e| Error::Config(format!("taxonomy file: {e}")))?;
        if file.version != 1 {
            return Err(Error::Config(format!(
                "unsupported taxonomy version {}",
                file.version
            )));
        }
        let mut slots: Vec<Option<KindSpec>> = vec![None; ConstraintKind::ALL.len()];
        for spec in file.kinds {
            let kind = spec.kind;
            if spec.group != kind.group() {
                return Err(Error::Config(format!(
                    "{kind} listed under group {} but belongs to {}",
                    spec.group,
                    kind.group()
                )));
            }
            validate_spec(&spec, &file.languages)?;
            if slots[kind.index()].replace(spec).is_some() {
                return Err(Error::Config(format!("{kind} listed twice")));
            }
        }
        let missing: Vec<_> = ConstraintKind::ALL
            .iter()
            .filter(|k| slots[k.index()].is_none())
            .map(|k| k.name())
            .collect();
        if !missing.is_empty() {
            return Err(Error::Config(format!(
                "missing variant data for {}",
                missing.join(", ")
            )));
        }
        for code in &file.languages {
            if language_name(code).is_none() {
                return Err(Error::Config(format!("unsupported language `{code}`")));
            }
        }
        Ok(Taxonomy {
            specs: slots.into_iter().map(Option::unwrap).collect(),
            languages: file.languages,
            lexicon: lexicon().to_vec(),
        })
    }

    pub fn from_path(path: &Path) -> Result<Taxonomy> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Taxonomy::from_json(&text)
    }

    pub fn with_lexicon(mut self, words: Vec<String>) -> Result<Taxonomy> {
        let words: Vec<String> = words.into_iter().map(|w| w.trim().to_lowercase()).collect();
        if words.iter().any(|w| w.is_empty() || w.chars().any(char::is_whitespace)) {
            return Err(Error::Config("lexicon entries must be single words".into()));
        }
        if words.len() < 20 {
            return Err(Error::Config("lexicon needs at least 20 words".into()));
        }
        self.lexicon = words;
        Ok(self)
    }

    pub fn spec(&self, kind: ConstraintKind) -> &KindSpec {
        &self.specs[kind.index()]
    }

    pub fn specs(&self) -> &[KindSpec] {
        &self.specs
    }

    pub fn languages(&self) -> &[String] {
        &self.languages
    }

    pub fn lexicon(&self) -> &[String] {
        &self.lexicon
    }

    /// Samples parameters and a description variant uniformly.
    pub fn instantiate<R: Rng + ?Sized>(
        &self,
        kind: ConstraintKind,
        rng: &mut R,
    ) -> Result<ConstraintInstance> {
        self.instantiate_avoiding(kind, rng, &BTreeSet::new())
    }

    /// Like [`Taxonomy::instantiate`], but lexicon words in `taken` are not drawn.
    pub fn instantiate_avoiding<R: Rng + ?Sized>(
        &self,
        kind: ConstraintKind,
        rng: &mut R,
        taken: &BTreeSet<String>,
    ) -> Result<ConstraintInstance> {
        let spec = self.spec(kind);
        let mut params = Params::new();
        let mut used: HashSet<String> = taken.iter().cloned().collect();
        for p in &spec.parameter_schema {
            let value = match &p.domain {
                Domain::KeywordList { min, max } => {
                    let count = rng.random_range(*min..=*max);
                    let words = self.draw_words(rng, count, &used)?;
                    used.extend(words.iter().cloned());
                    ParamValue::List(words)
                }
                Domain::Word => {
                    let word = self.draw_words(rng, 1, &used)?.remove(0);
                    used.insert(word.clone());
                    ParamValue::Text(word)
                }
                Domain::Int { min, max } => ParamValue::Int(rng.random_range(*min..=*max)),
                Domain::ChoiceInt { values } => ParamValue::Int(*values.choose(rng).unwrap()),
                Domain::Relation => {
                    ParamValue::Text(Relation::ALL.choose(rng).unwrap().code().to_string())
                }
                Domain::Language => ParamValue::Text(self.languages.choose(rng).unwrap().clone()),
                Domain::Letter { values } | Domain::Text { values } => {
                    ParamValue::Text(values.choose(rng).unwrap().clone())
                }
                Domain::OptionSet { values } => ParamValue::List(values.choose(rng).unwrap().clone()),
                Domain::ParagraphIndex { of } => {
                    let n = params.get(of).and_then(ParamValue::as_int).unwrap_or(1);
                    ParamValue::Int(rng.random_range(1..=n))
                }
            };
            params.insert(p.name.clone(), value);
        }
        let variant_index = rng.random_range(0..VARIANTS_PER_KIND);
        let mut instance = ConstraintInstance {
            kind,
            params,
            variant_index,
            rendered_text: String::new(),
        };
        instance.rendered_text = self.render(&instance)?;
        Ok(instance)
    }

    fn draw_words<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        count: usize,
        used: &HashSet<String>,
    ) -> Result<Vec<String>> {
        let pool = self.lexicon.iter().filter(|w| !used.contains(*w));
        let words: Vec<String> = pool.choose_multiple(rng, count).into_iter().cloned().collect();
        if words.len() < count {
            return Err(Error::Config("lexicon exhausted while drawing keywords".into()));
        }
        Ok(words)
    }

    /// Deterministic substitution of the parameters into the instance's variant.
    pub fn render(&self, instance: &ConstraintInstance) -> Result<String> {
        let spec = self.spec(instance.kind);
        let template = spec.templates.get(instance.variant_index).ok_or_else(|| {
            Error::Data(format!(
                "{}: variant index {} out of range",
                instance.kind, instance.variant_index
            ))
        })?;
        let mut out = String::with_capacity(template.len() + 32);
        let mut last = 0;
        for cap in placeholder_re().captures_iter(template) {
            let whole = cap.get(0).unwrap();
            let name = &cap[1];
            out.push_str(&template[last..whole.start()]);
            out.push_str(&self.format_param(spec, instance, name)?);
            last = whole.end();
        }
        out.push_str(&template[last..]);
        Ok(out)
    }

    fn format_param(
        &self,
        spec: &KindSpec,
        instance: &ConstraintInstance,
        name: &str,
    ) -> Result<String> {
        let missing = || {
            Error::Data(format!(
                "{}: template placeholder `{{{name}}}` has no matching parameter",
                instance.kind
            ))
        };
        let param = spec.param(name).ok_or_else(missing)?;
        let value = instance.params.get(name).ok_or_else(missing)?;
        let bad = || Error::Data(format!("{}: parameter `{name}` has the wrong type", instance.kind));
        Ok(match (&param.domain, value) {
            (Domain::KeywordList { .. }, ParamValue::List(words)) => words.join(", "),
            (Domain::OptionSet { .. }, ParamValue::List(options)) => options
                .iter()
                .map(|o| format!("\"{o}\""))
                .collect::<Vec<_>>()
                .join(", "),
            (Domain::Int { .. } | Domain::ChoiceInt { .. }, ParamValue::Int(v)) => v.to_string(),
            (Domain::ParagraphIndex { .. }, ParamValue::Int(v)) => ordinal(*v),
            (Domain::Relation, ParamValue::Text(code)) => code.parse::<Relation>()?.phrase().to_string(),
            (Domain::Language, ParamValue::Text(code)) => language_name(code)
                .ok_or_else(|| Error::Data(format!("unsupported language `{code}`")))?
                .to_string(),
            (Domain::Word | Domain::Letter { .. } | Domain::Text { .. }, ParamValue::Text(t)) => {
                t.clone()
            }
            _ => return Err(bad()),
        })
    }

    /// Checks that the instance's parameters lie in the kind's schema and that
    /// its stored text matches a fresh rendering.
    pub fn check_instance(&self, instance: &ConstraintInstance) -> Result<()> {
        let spec = self.spec(instance.kind);
        let kind = instance.kind;
        let err = |msg: String| Error::Data(format!("{kind}: {msg}"));
        for name in instance.params.keys() {
            if spec.param(name).is_none() {
                return Err(err(format!("unexpected parameter `{name}`")));
            }
        }
        for p in &spec.parameter_schema {
            let value = instance
                .params
                .get(&p.name)
                .ok_or_else(|| err(format!("missing parameter `{}`", p.name)))?;
            let ok = match (&p.domain, value) {
                (Domain::KeywordList { min, max }, ParamValue::List(words)) => {
                    (*min..=*max).contains(&words.len())
                        && words.iter().all(|w| !w.is_empty() && !w.contains(char::is_whitespace))
                }
                (Domain::Word, ParamValue::Text(w)) => !w.is_empty() && !w.contains(char::is_whitespace),
                (Domain::Int { min, max }, ParamValue::Int(v)) => (*min..=*max).contains(v),
                (Domain::ChoiceInt { values }, ParamValue::Int(v)) => values.contains(v),
                (Domain::Relation, ParamValue::Text(t)) => t.parse::<Relation>().is_ok(),
                (Domain::Language, ParamValue::Text(t)) => self.languages.contains(t),
                (Domain::Letter { values } | Domain::Text { values }, ParamValue::Text(t)) => {
                    values.contains(t)
                }
                (Domain::OptionSet { values }, ParamValue::List(o)) => values.contains(o),
                (Domain::ParagraphIndex { of }, ParamValue::Int(v)) => {
                    let n = instance.params.get(of).and_then(ParamValue::as_int).unwrap_or(0);
                    (1..=n).contains(v)
                }
                _ => false,
            };
            if !ok {
                return Err(err(format!("parameter `{}` outside its domain", p.name)));
            }
        }
        if self.render(instance)? != instance.rendered_text {
            return Err(err("rendered text does not match its template".into()));
        }
        Ok(())
    }
}

fn validate_spec(spec: &KindSpec, languages: &[String]) -> Result<()> {
    let kind = spec.kind;
    let err = |msg: String| Error::Config(format!("{kind}: {msg}"));
    if spec.templates.len() != VARIANTS_PER_KIND {
        return Err(err(format!(
            "expected {VARIANTS_PER_KIND} templates, found {}",
            spec.templates.len()
        )));
    }
    let mut seen = HashSet::new();
    for (idx, p) in spec.parameter_schema.iter().enumerate() {
        if !seen.insert(p.name.as_str()) {
            return Err(err(format!("duplicate parameter `{}`", p.name)));
        }
        let sane = match &p.domain {
            Domain::KeywordList { min, max } => *min >= 1 && min <= max,
            Domain::Int { min, max } => *min >= 1 && min <= max,
            Domain::ChoiceInt { values } => !values.is_empty() && values.iter().all(|v| *v >= 1),
            Domain::Letter { values } => {
                !values.is_empty() && values.iter().all(|v| v.chars().count() == 1)
            }
            Domain::Text { values } => !values.is_empty(),
            Domain::OptionSet { values } => !values.is_empty() && values.iter().all(|o| o.len() >= 2),
            Domain::Language => !languages.is_empty(),
            Domain::ParagraphIndex { of } => spec.parameter_schema[..idx]
                .iter()
                .any(|q| &q.name == of && matches!(q.domain, Domain::Int { .. })),
            Domain::Word | Domain::Relation => true,
        };
        if !sane {
            return Err(err(format!("parameter `{}` has an empty or invalid domain", p.name)));
        }
    }
    for (i, t) in spec.templates.iter().enumerate() {
        if t.trim().is_empty() {
            return Err(err(format!("template {i} is empty")));
        }
        for cap in placeholder_re().captures_iter(t) {
            if spec.param(&cap[1]).is_none() {
                return Err(err(format!(
                    "template {i} references unknown parameter `{}`",
                    &cap[1]
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn builtin_loads_all_kinds() {
        let tax = Taxonomy::builtin();
        assert_eq!(tax.specs().len(), 23);
        assert_eq!(tax.languages().len(), 10);
        assert_eq!(tax.lexicon().len(), 1000);
        for k in ConstraintKind::ALL {
            assert_eq!(tax.spec(k).kind, k);
            assert_eq!(tax.spec(k).templates.len(), 8);
        }
    }

    #[test]
    fn lexicon_words_are_distinct_plain_nouns() {
        let words = lexicon();
        let set: HashSet<_> = words.iter().collect();
        assert_eq!(set.len(), words.len());
        for w in words {
            assert!(w.len() >= 3 && w.chars().all(|c| c.is_ascii_lowercase()), "{w}");
        }
    }

    #[test]
    fn no_commas_instance_is_parameterless() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let inst = Taxonomy::builtin().instantiate(ConstraintKind::NoCommas, &mut rng).unwrap();
        assert!(inst.params.is_empty());
        assert!(Taxonomy::builtin().spec(ConstraintKind::NoCommas).templates.contains(&inst.rendered_text));
    }

    #[test]
    fn title_variants_show_double_angular_brackets() {
        let tax = Taxonomy::builtin();
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = tax.instantiate(ConstraintKind::Title, &mut rng).unwrap();
            assert!(inst.rendered_text.contains("<<") && inst.rendered_text.contains(">>"));
        }
    }

    #[test]
    fn letter_frequency_draws_stay_in_range() {
        let tax = Taxonomy::builtin();
        for seed in 0..1000 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = tax.instantiate(ConstraintKind::LetterFrequency, &mut rng).unwrap();
            let n = inst.params["N"].as_int().unwrap();
            assert!((2..=10).contains(&n), "N={n} at seed {seed}");
            let letter = inst.params["letter"].as_text().unwrap();
            assert!(["j", "q", "x", "z"].contains(&letter));
        }
    }

    #[test]
    fn rendering_substitutes_and_is_deterministic() {
        let tax = Taxonomy::builtin();
        let mut params = Params::new();
        params.insert("phrase".into(), ParamValue::Text("That is all.".into()));
        let mut inst = ConstraintInstance {
            kind: ConstraintKind::EndChecker,
            params,
            variant_index: 0,
            rendered_text: String::new(),
        };
        let text = tax.render(&inst).unwrap();
        assert!(text.contains("That is all."));
        inst.rendered_text = text.clone();
        assert_eq!(tax.render(&inst).unwrap(), text);
        tax.check_instance(&inst).unwrap();
    }

    #[test]
    fn number_words_renders_relation_phrase() {
        let tax = Taxonomy::builtin();
        let mut params = Params::new();
        params.insert("N".into(), ParamValue::Int(300));
        params.insert("relation".into(), ParamValue::Text("at_least".into()));
        let inst = ConstraintInstance {
            kind: ConstraintKind::NumberWords,
            params,
            variant_index: 3,
            rendered_text: String::new(),
        };
        let text = tax.render(&inst).unwrap();
        assert!(text.contains("300") && text.contains("at least"), "{text}");
    }

    #[test]
    fn ordinals() {
        let got: Vec<_> = [1, 2, 3, 4, 11, 12, 13, 21, 22].iter().map(|&i| ordinal(i)).collect();
        assert_eq!(got, ["1st", "2nd", "3rd", "4th", "11th", "12th", "13th", "21st", "22nd"]);
    }

    #[test]
    fn missing_param_is_a_data_error() {
        let inst = ConstraintInstance {
            kind: ConstraintKind::NumberBullets,
            params: Params::new(),
            variant_index: 0,
            rendered_text: String::new(),
        };
        assert!(matches!(Taxonomy::builtin().render(&inst), Err(Error::Data(_))));
    }

    #[test]
    fn broken_files_are_config_errors() {
        assert!(matches!(Taxonomy::from_json("{}"), Err(Error::Config(_))));
        let mut v: serde_json::Value = serde_json::from_str(TAXONOMY_JSON).unwrap();
        v["kinds"].as_array_mut().unwrap().pop();
        let err = Taxonomy::from_json(&v.to_string()).unwrap_err();
        assert!(err.to_string().contains("NoCommas"), "{err}");
        let mut v: serde_json::Value = serde_json::from_str(TAXONOMY_JSON).unwrap();
        v["kinds"][0]["templates"][0] = "Include {missing}.".into();
        assert!(matches!(Taxonomy::from_json(&v.to_string()), Err(Error::Config(_))));
    }

    #[test]
    fn avoided_words_are_not_drawn() {
        let tax = Taxonomy::builtin();
        let taken: BTreeSet<String> = tax.lexicon()[..990].iter().cloned().collect();
        for seed in 0..100 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = tax
                .instantiate_avoiding(ConstraintKind::IncludeKeywords, &mut rng, &taken)
                .unwrap();
            for w in inst.lexical_words() {
                assert!(!taken.contains(w));
            }
        }
    }
}
