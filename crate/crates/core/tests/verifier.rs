use probe_core::constraints::{ConflictMatrix, ConflictRationale, ConstraintInstance, ConstraintKind, ParamValue, Params, Taxonomy};
use probe_core::verifier::{count_sentences, count_words, split_paragraphs, verify, ParagraphMode, Verifier, VerifierConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

fn inst(kind: ConstraintKind, params: &[(&str, ParamValue)]) -> ConstraintInstance {
    let mut p = Params::new();
    for (k, v) in params {
        p.insert(k.to_string(), v.clone());
    }
    let mut c = ConstraintInstance {
        kind,
        params: p,
        variant_index: 0,
        rendered_text: String::new(),
    };
    c.rendered_text = Taxonomy::builtin().render(&c).unwrap();
    c
}

fn int(v: i64) -> ParamValue {
    ParamValue::Int(v)
}

fn text(v: &str) -> ParamValue {
    ParamValue::Text(v.to_string())
}

fn list(v: &[&str]) -> ParamValue {
    ParamValue::List(v.iter().map(|s| s.to_string()).collect())
}

fn sat(response: &str, c: &ConstraintInstance) -> bool {
    verify(response, c).unwrap().satisfied
}

#[derive(Deserialize)]
struct SentenceCase {
    text: String,
    sentences: usize,
}

#[test]
fn sentence_counter_matches_hand_labels() {
    let cases: Vec<SentenceCase> =
        serde_json::from_str(include_str!("fixtures/sentences.json")).unwrap();
    assert!(cases.len() >= 50);
    let wrong: Vec<String> = cases
        .iter()
        .filter(|c| count_sentences(&c.text) != c.sentences)
        .map(|c| format!("{:?}: got {}, labeled {}", c.text, count_sentences(&c.text), c.sentences))
        .collect();
    assert!(wrong.is_empty(), "{wrong:#?}");
}

#[test]
fn documented_examples() {
    use ConstraintKind::*;
    assert!(sat("Hello world", &inst(NoCommas, &[])));
    assert!(sat("<<option of joy>>\nA story...", &inst(Title, &[])));
    assert!(sat(
        "P1\n\n***\n\nP2\n\n***\n\nP3",
        &inst(NumberParagraphs, &[("N", int(3))])
    ));
    let v = verify(
        "banana banana",
        &inst(KeywordFrequency, &[("keyword", text("banana")), ("N", int(3))]),
    )
    .unwrap();
    assert!(!v.satisfied);
    assert!(v.detail.contains('2'), "{}", v.detail);
}

#[test]
fn keyword_group() {
    use ConstraintKind::*;
    let include = inst(IncludeKeywords, &[("keywords", list(&["garden", "river"]))]);
    assert!(sat("The Garden by the RIVER.", &include));
    assert!(!sat("The gardens by the river.", &include));
    let exclude = inst(ExcludeKeywords, &[("keywords", list(&["garden"]))]);
    assert!(sat("The gardens are calm.", &exclude));
    assert!(!sat("A garden.", &exclude));
    let freq = inst(KeywordFrequency, &[("keyword", text("river")), ("N", int(2))]);
    assert!(sat("River and river.", &freq));
    assert!(!sat("river river river", &freq));
    let letter = inst(LetterFrequency, &[("letter", text("z")), ("N", int(3))]);
    assert!(sat("Zebra zoo quiz", &letter));
    assert!(!sat("zz", &letter));
}

#[test]
fn language_check() {
    let fr = inst(ConstraintKind::ResponseLanguage, &[("language", text("fr"))]);
    assert!(sat("Nous avons marché le long de la rivière pendant une heure avec nos amis.", &fr));
    assert!(!sat("We walked along the river for an hour with our friends.", &fr));
    let ru = inst(ConstraintKind::ResponseLanguage, &[("language", text("ru"))]);
    assert!(sat("Сегодня мы гуляли вдоль реки целый час.", &ru));
    assert!(!sat("", &ru));
}

#[test]
fn length_group() {
    use ConstraintKind::*;
    let words = |rel: &str, n: i64| inst(NumberWords, &[("relation", text(rel)), ("N", int(n))]);
    let hundred = "word ".repeat(100);
    assert!(sat(&hundred, &words("at_least", 100)));
    assert!(!sat(&hundred, &words("at_least", 200)));
    assert!(sat(&hundred, &words("at_most", 100)));
    assert!(!sat(&"word ".repeat(101), &words("at_most", 100)));
    assert!(sat(&"word ".repeat(110), &words("around", 100)));
    assert!(sat(&"word ".repeat(90), &words("around", 100)));
    assert!(!sat(&"word ".repeat(111), &words("around", 100)));
    assert!(!sat(&"word ".repeat(89), &words("around", 100)));

    let sentences = |rel: &str, n: i64| inst(NumberSentences, &[("relation", text(rel)), ("N", int(n))]);
    assert!(sat("A. B. C.", &sentences("around", 3)));
    assert!(!sat("A. B. C. D.", &sentences("around", 3)));
    assert!(sat("A. B.", &sentences("at_most", 3)));
    assert!(!sat("A. B.", &sentences("at_least", 3)));

    let pfw = inst(
        ParagraphsFirstWord,
        &[("N", int(2)), ("i", int(2)), ("first_word", text("garden"))],
    );
    assert!(sat("Intro here.\n\n\"Garden, they said.", &pfw));
    assert!(!sat("Intro here.\n\nThe garden.", &pfw));
    assert!(!sat("Intro.\n\nGarden.\n\nMore.", &pfw));
}

#[test]
fn content_group() {
    use ConstraintKind::*;
    let ps = inst(Postscript, &[("marker", text("P.S."))]);
    assert!(sat("Body.\n\nP.S. see you", &ps));
    assert!(sat("Body.\n\nLast words.\np.s. see you", &ps));
    assert!(!sat("P.S. early\n\nBody.", &ps));
    assert!(!sat("Body.\n\nP.P.S. see you", &ps));
    let ph = inst(NumberPlaceholders, &[("N", int(2))]);
    assert!(sat("Send to [name] at [address].", &ph));
    assert!(!sat("Send to [name] at [].", &ph));
}

#[test]
fn format_group() {
    use ConstraintKind::*;
    let bullets = inst(NumberBullets, &[("N", int(2))]);
    assert!(sat("List:\n* one\n  * two\n*not a bullet*", &bullets));
    assert!(!sat("* one\n* two\n* three", &bullets));
    assert!(!sat("<< >>", &inst(Title, &[])));
    let choose = inst(
        ChooseFrom,
        &[("options", list(&["I agree.", "I disagree.", "I am not sure."]))],
    );
    assert!(sat("Well. I AGREE.", &choose));
    assert!(!sat("I agree", &choose));
    let hl = inst(NumberHighlightedSections, &[("N", int(2))]);
    assert!(sat("*one* and *two parts*", &hl));
    assert!(!sat("* one * and *two*", &hl));
    let sections = inst(MultipleSections, &[("N", int(2)), ("splitter", text("SECTION"))]);
    assert!(sat("SECTION 1\na\nSection 2\nb", &sections));
    assert!(sat("## SECTION 1\na\n## SECTION 2\nb", &sections));
    assert!(!sat("SECTION 1\na\nSECTION 2\nb\nSECTION 3", &sections));
    assert!(!sat("SECTION 1 a SECTION 2", &sections));
    let json = inst(JsonFormat, &[]);
    assert!(sat("{\"a\": 1}", &json));
    assert!(sat("```json\n{\"a\": [1, 2]}\n```", &json));
    assert!(sat("```\n[1]\n```\n", &json));
    assert!(!sat("\"just a string\"", &json));
    assert!(!sat("Here you go: {\"a\": 1}", &json));
}

#[test]
fn case_group() {
    use ConstraintKind::*;
    assert!(sat("HELLO WORLD 42!", &inst(AllUppercase, &[])));
    assert!(!sat("HELLO World", &inst(AllUppercase, &[])));
    assert!(!sat("123", &inst(AllUppercase, &[])));
    assert!(sat("hello world", &inst(AllLowercase, &[])));
    assert!(!sat("hello World", &inst(AllLowercase, &[])));
    let cwf = inst(CapitalWordFrequency, &[("N", int(2))]);
    assert!(sat("NASA and the BBC", &cwf));
    assert!(!sat("I saw A NASA probe", &cwf));
}

#[test]
fn start_end_and_punctuation() {
    use ConstraintKind::*;
    let end = inst(EndChecker, &[("phrase", text("That is all."))]);
    assert!(sat("Body.\nThat is all.  \n", &end));
    assert!(sat("BODY. THAT IS ALL.", &end));
    assert!(!sat("That is all. Really.", &end));
    assert!(sat("  \"quoted\"\n", &inst(Quotation, &[])));
    assert!(!sat("\"", &inst(Quotation, &[])));
    assert!(!sat("\"open only", &inst(Quotation, &[])));
    assert!(!sat("a\u{FF0C}b", &inst(NoCommas, &[])));
    assert!(!sat("a, b", &inst(NoCommas, &[])));
}

#[test]
fn responses_are_nfc_normalized() {
    let include = inst(ConstraintKind::IncludeKeywords, &[("keywords", list(&["café"]))]);
    assert!(sat("un cafe\u{301} noir", &include));
}

#[test]
fn around_tolerance_is_configurable() {
    let c = inst(
        ConstraintKind::NumberWords,
        &[("relation", text("around")), ("N", int(100))],
    );
    let strict = Verifier::new(VerifierConfig {
        around_tolerance: 0.0,
        ..VerifierConfig::default()
    });
    assert!(!strict.verify(&"w ".repeat(101), &c).unwrap().satisfied);
    assert!(strict.verify(&"w ".repeat(100), &c).unwrap().satisfied);
}

#[test]
fn malformed_instance_is_an_error() {
    let c = ConstraintInstance {
        kind: ConstraintKind::NumberBullets,
        params: Params::new(),
        variant_index: 0,
        rendered_text: "x".into(),
    };
    assert!(verify("* a", &c).is_err());
}

fn fragment_strategy() -> impl Strategy<Value = String> {
    let fragments = vec![
        "hello", "WORLD", "Garden", "river", " ", "\n", "\n\n", "***", ",", ".", "!", "?",
        "*", "* ", "#", "<<", ">>", "[", "]", "\"", "{", "}", ":", "P.S.", "Section 1",
        "That is all.", "zz", "NASA", "é", "，", "日本", "Это",
    ];
    prop::collection::vec(prop::sample::select(fragments), 0..40).prop_map(|v| v.concat())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn verdicts_are_pure(s in fragment_strategy()) {
        let mut rng = ChaCha8Rng::seed_from_u64(s.len() as u64);
        for kind in ConstraintKind::ALL {
            let c = Taxonomy::builtin().instantiate(kind, &mut rng).unwrap();
            prop_assert_eq!(verify(&s, &c).unwrap(), verify(&s, &c).unwrap());
        }
    }

    #[test]
    fn no_commas_is_closed_under_concatenation(a in fragment_strategy(), b in fragment_strategy()) {
        let c = inst(ConstraintKind::NoCommas, &[]);
        if sat(&a, &c) && sat(&b, &c) {
            let joined = a.clone() + &b;
            prop_assert!(sat(&joined, &c));
        }
    }

    #[test]
    fn include_and_exclude_are_monotone(a in fragment_strategy(), b in fragment_strategy()) {
        let include = inst(ConstraintKind::IncludeKeywords, &[("keywords", list(&["garden", "river"]))]);
        let exclude = inst(ConstraintKind::ExcludeKeywords, &[("keywords", list(&["garden"]))]);
        let joined = format!("{a} {b}");
        if sat(&a, &include) {
            prop_assert!(sat(&joined, &include));
        }
        if !sat(&a, &exclude) {
            prop_assert!(!sat(&joined, &exclude));
        }
    }

    #[test]
    fn word_count_is_additive(a in "[a-z ,.!?\n\t]{0,60}", b in "[a-z ,.!?\n\t]{0,60}") {
        prop_assert_eq!(count_words(&format!("{a} {b}")), count_words(&a) + count_words(&b));
    }

    #[test]
    fn paragraphs_are_trimmed_and_nonempty(s in fragment_strategy()) {
        for mode in [ParagraphMode::Divider, ParagraphMode::BlankLine] {
            for p in split_paragraphs(&s, mode) {
                prop_assert!(!p.is_empty());
                prop_assert_eq!(p.trim(), p.as_str());
            }
        }
    }
}

/// Pairs whose conflict rationale claims joint unsatisfiability must not both
/// pass on any of 10,000 generated strings.
#[test]
fn unsatisfiable_conflicts_agree_with_checkers() {
    let matrix = ConflictMatrix::builtin();
    let tax = Taxonomy::builtin();
    let pieces = [
        "{", "}", "[", "]", "\"", "\"response\": ", "\"a\"", ": ", "1", ",", "\n", "\n\n",
        "***", "\n***\n", "* ", "Section 1", "SECTION 2", "P.S. ", "That is all.", "Hope this helps.",
        "HELLO ", "hello ", "NASA ", "BBC ", "x ", "```", "```json\n", " ", "P1", "<<t>>",
    ];
    let pairs: Vec<_> = matrix
        .rules
        .iter()
        .filter(|r| r.when.is_none() && r.rationale == ConflictRationale::Unsatisfiable)
        .collect();
    assert!(!pairs.is_empty());
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for rule in pairs {
        let a = tax.instantiate(rule.a, &mut rng).unwrap();
        let b = tax.instantiate(rule.b, &mut rng).unwrap();
        for _ in 0..10_000 {
            let len = rng.random_range(0..24);
            let s: String = (0..len).map(|_| pieces[rng.random_range(0..pieces.len())]).collect();
            let both = sat(&s, &a) && sat(&s, &b);
            assert!(!both, "{} and {} both hold on {s:?}", rule.a, rule.b);
        }
    }
}
