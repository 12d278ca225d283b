//! Randomized round-trip and determinism properties.

use proptest::prelude::*;

use dg_core::ds::{ds_from_conll, ds_from_json, ds_to_conll, ds_to_json, Arc, DependencyStructure};
use dg_core::grammar::Category;
use dg_core::grammar::{parse_grammar, render_grammar, Grammar, Rule, Slot};
use dg_core::parser::{enumerate_oracle, parse, parse_via_cfg, Sentence};

const CAT_NAMES: [&str; 4] = ["A", "B", "C", "D"];
const LABELS: [&str; 4] = ["SUBJ", "OBJ", "MOD", "DET"];
const FORMS: [&str; 5] = ["alpha", "bravo", "charlie", "delta", "echo"];

fn cat(name: &str) -> Category {
    Category::new(name).unwrap()
}

type SlotSpec = (usize, Option<usize>);

#[derive(Debug, Clone)]
struct GrammarSpec {
    roots: Vec<usize>,
    leaves: Vec<usize>,
    words: Vec<(usize, Vec<usize>)>,
    rules: Vec<(usize, Vec<SlotSpec>, Vec<SlotSpec>)>,
    frames: Vec<(usize, Vec<usize>)>,
    controls: Vec<(usize, Vec<usize>)>,
}

fn slot_strategy() -> impl Strategy<Value = SlotSpec> {
    (0..CAT_NAMES.len(), proptest::option::of(0..LABELS.len()))
}

fn grammar_spec() -> impl Strategy<Value = GrammarSpec> {
    (
        proptest::collection::vec(0..CAT_NAMES.len(), 1..3),
        proptest::collection::vec(0..CAT_NAMES.len(), 0..3),
        proptest::collection::vec(
            (
                0..FORMS.len(),
                proptest::collection::vec(0..CAT_NAMES.len(), 1..3),
            ),
            1..5,
        ),
        proptest::collection::vec(
            (
                0..CAT_NAMES.len(),
                proptest::collection::vec(slot_strategy(), 0..2),
                proptest::collection::vec(slot_strategy(), 0..2),
            ),
            0..4,
        ),
        proptest::collection::vec(
            (
                0..FORMS.len(),
                proptest::collection::vec(0..LABELS.len(), 1..3),
            ),
            0..3,
        ),
        proptest::collection::vec(
            (
                0..CAT_NAMES.len(),
                proptest::collection::vec(0..LABELS.len(), 1..3),
            ),
            0..2,
        ),
    )
        .prop_map(
            |(roots, leaves, words, rules, frames, controls)| GrammarSpec {
                roots,
                leaves,
                words,
                rules,
                frames,
                controls,
            },
        )
}

/// Realize a random specification as a grammar, skipping pieces that violate
/// the construction rules (duplicate labels within a rule, clashing frames).
fn realize(spec: &GrammarSpec) -> Grammar {
    let mut b = Grammar::builder();
    for name in CAT_NAMES {
        b.category(name).unwrap();
    }
    for &r in &spec.roots {
        b.root(CAT_NAMES[r]).unwrap();
    }
    for &l in &spec.leaves {
        b.leaf(CAT_NAMES[l]).unwrap();
    }
    for (form, cats) in &spec.words {
        let names: Vec<&str> = cats.iter().map(|&c| CAT_NAMES[c]).collect();
        b.word(FORMS[*form], &names).unwrap();
    }
    for (head, left, right) in &spec.rules {
        let to_slots = |side: &[(usize, Option<usize>)]| -> Vec<Slot> {
            side.iter()
                .map(|&(c, l)| match l {
                    Some(l) => Slot::labeled(cat(CAT_NAMES[c]), LABELS[l]).unwrap(),
                    None => Slot::new(cat(CAT_NAMES[c])),
                })
                .collect()
        };
        if let Ok(rule) = Rule::new(cat(CAT_NAMES[*head]), to_slots(left), to_slots(right)) {
            if rule.arity() > 0 {
                b.rule(rule).unwrap();
            }
        }
    }
    for (form, labels) in &spec.frames {
        let names: Vec<&str> = labels.iter().map(|&l| LABELS[l]).collect();
        let _ = b.frame(FORMS[*form], &names);
    }
    for (trigger, path) in &spec.controls {
        let names: Vec<&str> = path.iter().map(|&l| LABELS[l]).collect();
        b.control(CAT_NAMES[*trigger], &names).unwrap();
    }
    b.build()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn grammar_serializer_round_trips(spec in grammar_spec()) {
        let g = realize(&spec);
        let rendered = render_grammar(&g);
        let reparsed = parse_grammar(&rendered).unwrap();
        prop_assert_eq!(&reparsed, &g);
        prop_assert_eq!(render_grammar(&reparsed), rendered);
    }

    #[test]
    fn conll_round_trips_single_headed_structures(
        heads in proptest::collection::vec(0..6usize, 1..6),
        labels in proptest::collection::vec(0..LABELS.len(), 6),
    ) {
        let n = heads.len();
        let mut arcs = Vec::new();
        for (i, &h) in heads.iter().enumerate() {
            let dep = i + 1;
            if h == 0 || h > n || h == dep {
                continue;
            }
            arcs.push(Arc::new(h, dep, LABELS[labels[i]]));
        }
        let parts = (0..n).map(|i| (format!("w{}", i + 1), cat("A"))).collect();
        let ds = DependencyStructure::from_parts(parts, arcs).unwrap();
        let text = ds_to_conll(&ds).unwrap();
        prop_assert_eq!(ds_from_conll(&text).unwrap(), vec![ds]);
    }

    #[test]
    fn json_round_trips_general_graphs(
        pairs in proptest::collection::btree_set((1..5usize, 1..5usize), 0..8),
    ) {
        let n = 5;
        let arcs: Vec<Arc> = pairs
            .iter()
            .filter(|(h, d)| h != d)
            .map(|&(h, d)| Arc::new(h, d, "F"))
            .collect();
        let parts = (0..n).map(|i| (format!("w{}", i + 1), cat("B"))).collect();
        let ds = DependencyStructure::from_parts(parts, arcs).unwrap();
        let json = ds_to_json(&ds);
        prop_assert_eq!(ds_from_json(&json).unwrap(), ds);
    }

    /// The three parsing routes agree on randomly generated grammars, not
    /// just the fixture ones.
    #[test]
    fn parse_routes_agree_on_random_grammars(spec in grammar_spec()) {
        let g = realize(&spec);
        let forms: Vec<&str> = g.lexicon().keys().map(String::as_str).collect();
        let mut sentences: Vec<Vec<String>> =
            forms.iter().map(|f| vec![f.to_string()]).collect();
        let singletons = sentences.clone();
        for _ in 0..2 {
            sentences = sentences
                .iter()
                .flat_map(|s| {
                    singletons.iter().map(move |ext| {
                        let mut longer = s.clone();
                        longer.extend(ext.iter().cloned());
                        longer
                    })
                })
                .chain(singletons.iter().cloned())
                .collect();
            sentences.sort();
            sentences.dedup();
        }
        for forms in sentences {
            let s = Sentence::new(forms).unwrap();
            let direct = parse(&g, &s).unwrap();
            prop_assert_eq!(&direct, &parse_via_cfg(&g, &s).unwrap());
            prop_assert_eq!(&direct, &enumerate_oracle(&g, &s).unwrap());
        }
    }

    /// Arbitrary text never panics the grammar reader.
    #[test]
    fn grammar_reader_is_total(text in "\\PC{0,120}") {
        let _ = parse_grammar(&text);
    }
}
