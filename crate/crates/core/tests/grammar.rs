use dicenote::dice::FaceSet;
use dicenote::grammar::{parse_str, tokenize, FaceItem, Faces, TokenKind};
use dicenote::Span;
use proptest::prelude::*;

fn int() -> impl Strategy<Value = String> {
    (0i64..1000).prop_map(|n| n.to_string())
}

fn sides() -> impl Strategy<Value = String> {
    let list = prop_oneof![
        proptest::collection::vec(
            prop_oneof![
                (-50i64..50).prop_map(|n| n.to_string()),
                (-50i64..50, 0i64..20).prop_map(|(a, w)| format!("{a}..{}", a + w)),
            ],
            1..5
        ),
        proptest::collection::vec("[A-Z][A-Za-z0-9_ ]{0,6}[A-Z]|'[a-z0-9 +.-]{1,5}'|\"[+-]\"", 1..5),
    ]
    .prop_map(|items| format!("{{{}}}", items.join(",")));
    prop_oneof![
        4 => (1i64..1000).prop_map(|n| n.to_string()),
        1 => Just("%".to_string()),
        1 => Just("f".to_string()),
        1 => Just("c".to_string()),
        2 => list,
    ]
}

fn condition() -> impl Strategy<Value = String> {
    (
        proptest::sample::select(vec!["==", "!=", "<", ">", "<=", ">="]),
        prop_oneof![
            (-20i64..40).prop_map(|n| n.to_string()),
            "[A-Z]{1,4}",
            "'[a-z+ -]{1,4}'",
        ],
    )
        .prop_map(|(c, t)| format!("{c}{t}"))
}

fn dice_ops() -> impl Strategy<Value = String> {
    let op = prop_oneof![
        ("[kd][hl]", proptest::option::of(1u64..10))
            .prop_map(|(kd, n)| format!("{kd}{}", n.map(|n| n.to_string()).unwrap_or_default())),
        condition().prop_map(|c| format!("f{c}")),
        (proptest::sample::select(vec!["r", "rr"]), condition()).prop_map(|(r, c)| format!("{r}{c}")),
        proptest::sample::select(vec!["!", "!o", "!p", "u"]).prop_map(String::from),
    ];
    (proptest::collection::vec(op, 0..4), any::<bool>())
        .prop_map(|(ops, count)| format!("{}{}", ops.concat(), if count { "c" } else { "" }))
}

fn expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        int(),
        "@[A-Z][A-Z0-9_]{0,5}",
        (proptest::option::of(int()), sides(), dice_ops())
            .prop_map(|(n, s, ops)| format!("{}d{s}{ops}", n.unwrap_or_default())),
    ];
    leaf.prop_recursive(4, 32, 4, |inner| {
        prop_oneof![
            (inner.clone(), proptest::sample::select(vec!["+", "-", "*", "/", "\\"]), inner.clone())
                .prop_map(|(a, op, b)| format!("{a}{op}{b}")),
            inner.clone().prop_map(|e| format!("-{e}")),
            proptest::collection::vec(inner.clone(), 1..4)
                .prop_map(|items| format!("({})", items.join(";"))),
            (inner, sides(), dice_ops()).prop_map(|(e, s, ops)| format!("({e})d{s}{ops}")),
        ]
    })
}

fn program() -> impl Strategy<Value = String> {
    proptest::collection::vec(
        prop_oneof![
            3 => expr(),
            1 => ("[A-Z][A-Z0-9_]{0,5}", expr()).prop_map(|(n, e)| format!("#{n} = {e}")),
        ],
        1..4,
    )
    .prop_map(|s| s.join(";"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn printed_trees_parse_back_identically(src in program()) {
        match parse_str(&src) {
            Ok(tree) => {
                let printed = tree.to_string();
                let reparsed = parse_str(&printed);
                prop_assert_eq!(Ok(tree), reparsed, "printed as {}", printed);
            }
            // generated text can still hit semantic parse errors such as
            // mixed faces, which is fine: it must be a structured error
            Err(e) => prop_assert!(!e.code().is_empty()),
        }
    }

    #[test]
    fn parsing_arbitrary_bytes_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..96)) {
        let src = String::from_utf8_lossy(&bytes);
        let _ = parse_str(&src);
    }

    #[test]
    fn parsing_notation_soup_never_panics(src in "[0-9dkhlrfcu!op%{}.,;#@=<>!+*/\\\\()A-Z' -]{0,48}") {
        let _ = parse_str(&src);
    }

    #[test]
    fn ranges_expand_to_every_value(a in -1000i64..1000, width in 0i64..500) {
        let b = a + width;
        let faces = Faces::Numeric(vec![FaceItem::Range(a, b)]);
        let set = FaceSet::from_faces(&faces, Span::default()).unwrap();
        prop_assert_eq!(set.len() as i64, b - a + 1);
        let values: Vec<i64> = (0..set.len()).map(|i| set.numeric(i).unwrap()).collect();
        prop_assert_eq!(values, (a..=b).collect::<Vec<_>>());
    }

    #[test]
    fn macro_names_are_never_keywords(name in "[A-Z][A-Z0-9_]{0,10}") {
        let tokens = tokenize(&name).unwrap();
        prop_assert_eq!(tokens.len(), 1);
        prop_assert_eq!(&tokens[0].kind, &TokenKind::MacroName(name.clone()));
    }
}

#[test]
fn tokens_of_the_layering_example() {
    use TokenKind::*;
    let kinds: Vec<TokenKind> = tokenize("2d20kh+2").unwrap().into_iter().map(|t| t.kind).collect();
    assert_eq!(kinds, [Int(2), Dice, Int(20), Keep, High, Plus, Int(2)]);
    assert!(tokenize("").unwrap().is_empty());
}

#[test]
fn three_to_eight_contributes_six_faces() {
    let tree = parse_str("d{1,2,3..8,9,10,100}").unwrap();
    let dicenote::grammar::Statement::Expr(dicenote::grammar::Expr::Dice { faces, .. }) =
        &tree.statements[0]
    else {
        panic!("{tree:?}")
    };
    let set = FaceSet::from_faces(faces, Span::default()).unwrap();
    let values: Vec<i64> = (0..set.len()).map(|i| set.numeric(i).unwrap()).collect();
    assert_eq!(values, [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 100]);
}

#[test]
fn generator_mostly_produces_valid_programs() {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::TestRunner;
    let mut runner = TestRunner::deterministic();
    let strategy = program();
    let total = 1000;
    let mut failures = Vec::new();
    for _ in 0..total {
        let src = strategy.new_tree(&mut runner).unwrap().current();
        if let Err(e) = parse_str(&src) {
            failures.push((src, e));
        }
    }
    assert!(failures.len() * 10 < total, "{} failures, e.g. {:?}", failures.len(), &failures[..failures.len().min(5)]);
}
