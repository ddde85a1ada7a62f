//! Round trips and parser totality.

use causaltask::scenario::{format_scenario, parse_scenario, ScenarioDocument, TaskSpec};
use causaltask::task::{CallMode, Promise};
use causaltask::token::Window;
use proptest::prelude::*;

fn coord() -> impl Strategy<Value = (i64, i64)> {
    (-50i64..50, -50i64..50)
}

fn documents() -> impl Strategy<Value = ScenarioDocument> {
    let summoning = (
        any::<bool>(),
        coord(),
        prop::collection::btree_set((coord(), coord()), 1..5),
        prop::option::of((-20i64..0, 0i64..20, 0i64..30)),
    )
        .prop_map(|(multi, start, pairs, w)| ScenarioDocument {
            task: TaskSpec::Summoning {
                mode: if multi {
                    CallMode::MultiplePossible
                } else {
                    CallMode::SingleGuaranteed
                },
                start,
                pairs: pairs.into_iter().collect(),
            },
            window: w.map(|(x_min, x_max, t_max)| Window {
                x_min,
                x_max,
                t_max,
            }),
            states: None,
            alphabet: None,
        });
    let refined = (
        any::<bool>(),
        1i64..20,
        0i64..50,
        prop::option::of(1u8..4),
        any::<bool>(),
    )
        .prop_map(|(exactly, eps, extra, states, with_a)| ScenarioDocument {
            task: TaskSpec::Refined {
                promise: if exactly {
                    Promise::ExactlyOne
                } else {
                    Promise::AtLeastOne
                },
                d: 2 * eps + extra,
                eps,
            },
            window: None,
            states,
            alphabet: with_a.then_some(3),
        });
    let original =
        (2i64..1000, prop::option::of(1u8..4), any::<bool>()).prop_map(|(d, states, with_a)| {
            ScenarioDocument {
                task: TaskSpec::Original { d },
                window: None,
                states,
                alphabet: with_a.then_some(2),
            }
        });
    prop_oneof![summoning, refined, original]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn round_trip(doc in documents()) {
        let text = format_scenario(&doc);
        let parsed = parse_scenario(&text).unwrap();
        prop_assert_eq!(&parsed, &doc);
        prop_assert_eq!(format_scenario(&parsed), text);
    }

    /// Reordering lines, adding comments and padding changes nothing.
    #[test]
    fn layout_insensitive(doc in documents(), seed in any::<u64>()) {
        let text = format_scenario(&doc);
        let mut lines: Vec<String> = text.lines().map(|l| format!("  {}  # note", l.replace(" = ", "=")) ).collect();
        // pairs keep their relative order; everything else may move
        let n = lines.len();
        for i in 0..n {
            let j = (seed as usize).wrapping_mul(i + 7) % n;
            let is_pair = |l: &String| l.trim_start().starts_with("pair");
            if !is_pair(&lines[i]) && !is_pair(&lines[j]) {
                lines.swap(i, j);
            }
        }
        lines.insert(0, "# header".into());
        lines.push(String::new());
        prop_assert_eq!(parse_scenario(&lines.join("\n")).unwrap(), doc);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn arbitrary_bytes_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
        let text = String::from_utf8_lossy(&bytes);
        if let Err(e) = parse_scenario(&text) {
            prop_assert!(!e.reason.is_empty());
            prop_assert!(e.line <= text.lines().count());
        }
    }

    /// Mutating a valid document yields a document or a located error.
    #[test]
    fn mutated_documents_never_panic(doc in documents(), pos in any::<prop::sample::Index>(), junk in "[-=#>,0-9a-zA-Z \n]{0,6}") {
        let text = format_scenario(&doc);
        let at = pos.index(text.len() + 1);
        let at = (0..=at).rev().find(|&i| text.is_char_boundary(i)).unwrap();
        let mutated = format!("{}{}{}", &text[..at], junk, &text[at..]);
        if let Ok(d) = parse_scenario(&mutated) {
            prop_assert_eq!(parse_scenario(&format_scenario(&d)).unwrap(), d);
        }
    }
}
