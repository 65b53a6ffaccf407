mod common;

use proptest::prelude::*;
use termsat::rules::parse_theory;
use termsat::theories::BUNDLED;
use termsat::{parse_term, Number, Term};

fn arb_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        "[a-z][a-z0-9_]{0,4}".prop_map(|s| Term::atom(&s)),
        any::<i64>().prop_map(Term::int),
        any::<f64>().prop_filter("finite", |r| r.is_finite()).prop_map(Term::real),
        Just(Term::Lit(Number::Real(f64::INFINITY))),
    ];
    leaf.prop_recursive(4, 32, 4, |inner| {
        (prop_oneof![Just("+"), Just("*"), Just("f"), Just("map"), Just("=>x")], prop::collection::vec(inner, 1..4))
            .prop_map(|(op, args)| Term::app(op, args))
    })
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(t in arb_term()) {
        let text = t.to_string();
        let back = parse_term(&text).unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn whitespace_is_insignificant(t in arb_term(), pad in "[ \t\n]{1,3}") {
        let text = t.to_string().replace(' ', &pad).replace('(', &format!("({pad}"));
        prop_assert_eq!(parse_term(&text).unwrap(), t);
    }

    #[test]
    fn garbage_never_panics(s in "[()a-z0-9 ~:.+*-]{0,24}") {
        let _ = parse_term(&s);
        let _ = parse_theory("g", &s);
    }
}

#[test]
fn bundled_theories_round_trip() {
    for (name, src) in BUNDLED {
        let th = parse_theory(name, src).unwrap();
        let printed = th.to_string();
        let again = parse_theory(name, &printed).unwrap();
        assert_eq!(again.len(), th.len(), "{name}");
        assert_eq!(again.to_string(), printed, "{name}");
        for (a, b) in th.rules.iter().zip(&again.rules) {
            assert_eq!(a.name, b.name);
            assert_eq!(a.kind, b.kind);
        }
    }
}

#[test]
fn syntax_errors_carry_offsets() {
    assert_eq!(parse_term("(g (f a) b").unwrap_err().offset, 0);
    assert_eq!(parse_term("(g (f a b").unwrap_err().offset, 3);
    assert!(parse_term("(f a))").is_err());
    assert!(parse_term("()").is_err());
    assert!(parse_term("((f) a)").is_err());
    assert_eq!(common::t("(f 1 2.5 x)").size(), 4);
}
