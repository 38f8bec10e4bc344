use proptest::prelude::*;
use stlrob::formula::{parse_formula, Formula, Interval, PredicateExpr};

fn expr() -> impl Strategy<Value = PredicateExpr> {
    let leaf = prop_oneof![
        (-50.0..50.0f64).prop_map(PredicateExpr::Const),
        prop::sample::select(vec!["x", "y", "speed", "x_2"]).prop_map(PredicateExpr::channel),
    ];
    leaf.prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| PredicateExpr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| PredicateExpr::sub(a, b)),
            (-5.0..5.0f64, inner.clone()).prop_map(|(c, e)| PredicateExpr::scale(c, e)),
            prop::collection::vec(inner, 1..4).prop_map(PredicateExpr::Norm),
        ]
    })
}

fn interval() -> impl Strategy<Value = Interval> {
    (0u32..20, 0u32..20).prop_map(|(a, w)| Interval::new(a as f64 * 0.25, (a + w) as f64 * 0.25).unwrap())
}

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![1 => Just(Formula::True), 6 => expr().prop_map(Formula::predicate)];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::and),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::or),
            (interval(), inner.clone()).prop_map(|(i, f)| Formula::eventually(i, f)),
            (interval(), inner.clone()).prop_map(|(i, f)| Formula::always(i, f)),
            (interval(), inner.clone(), inner).prop_map(|(i, l, r)| Formula::until(i, l, r)),
        ]
    })
}

/// Nested n-ary nodes built without the flattening constructors.
fn raw_formula() -> impl Strategy<Value = Formula> {
    let leaf = expr().prop_map(Formula::predicate);
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..4).prop_map(Formula::And),
            prop::collection::vec(inner.clone(), 1..4).prop_map(Formula::Or),
            inner.clone().prop_map(Formula::not),
            (interval(), inner).prop_map(|(i, f)| Formula::always(i, f)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn printed_formula_parses_back(f in formula()) {
        let text = f.to_string();
        let parsed = parse_formula(&text).map_err(|e| TestCaseError::fail(format!("{e}: {text}")))?;
        prop_assert_eq!(&parsed, &f, "text: {}", text);
        prop_assert_eq!(parsed.to_string(), text);
    }

    #[test]
    fn normalize_is_idempotent(f in raw_formula()) {
        let once = f.clone().normalize();
        prop_assert_eq!(once.clone().normalize(), once.clone());
        prop_assert!(once.size() <= f.size());
        prop_assert_eq!(once.horizon(), f.horizon());
    }

    #[test]
    fn normalized_formula_round_trips(f in raw_formula()) {
        let f = f.normalize();
        prop_assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
    }
}

#[test]
fn nested_conjunctions_flatten() {
    let a = parse_formula("x >= 1").unwrap();
    let b = parse_formula("y").unwrap();
    let nested = Formula::And(vec![a.clone(), Formula::And(vec![b.clone(), a.clone()])]);
    assert_eq!(nested.normalize(), Formula::And(vec![a.clone(), b, a]));
    assert_eq!(Formula::Or(vec![Formula::Or(vec![Formula::True])]).normalize(), Formula::True);
}
