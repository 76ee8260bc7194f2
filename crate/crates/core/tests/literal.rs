use num_bigint::BigInt;
use num_rational::BigRational;

use confocal_billiards::literal::{parse_list, parse_literal, LiteralError, Surd};
use confocal_billiards::{Mp, Q};

fn q(p: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(p), BigInt::from(d))
}

#[test]
fn integers_fractions_and_decimals() {
    assert_eq!(parse_literal("7").unwrap().as_rational(), Some(q(7, 1)));
    assert_eq!(parse_literal("20/9").unwrap().as_rational(), Some(q(20, 9)));
    assert_eq!(parse_literal("-3/6").unwrap().as_rational(), Some(q(-1, 2)));
    assert_eq!(parse_literal("1.25").unwrap().as_rational(), Some(q(5, 4)));
    assert_eq!(parse_literal("2.5e-1").unwrap().as_rational(), Some(q(1, 4)));
    assert_eq!(parse_literal("3E2").unwrap().as_rational(), Some(q(300, 1)));
    assert_eq!(parse_literal(" 1 + 2 * 3 ").unwrap().as_rational(), Some(q(7, 1)));
}

#[test]
fn surds_stay_exact() {
    let s = parse_literal("180-80*sqrt(5)").unwrap();
    assert_eq!(s, Surd { p: q(180, 1), q: q(-80, 1), r: q(5, 1) });
    assert_eq!(s.to_string(), "180-80*sqrt(5)");

    let t = parse_literal("(20/61)*(9-2*sqrt(5))").unwrap();
    assert_eq!(t.p, q(180, 61));
    assert_eq!(t.q, q(-40, 61));

    // (1 + sqrt 2)(1 - sqrt 2) = -1
    let u = parse_literal("(1+sqrt(2))*(1-sqrt(2))").unwrap();
    assert_eq!(u.as_rational(), Some(q(-1, 1)));

    // perfect squares collapse
    assert_eq!(parse_literal("sqrt(9/4)").unwrap().as_rational(), Some(q(3, 2)));

    // 1/(3 - sqrt 5) = (3 + sqrt 5)/4
    let v = parse_literal("1/(3-sqrt(5))").unwrap();
    assert_eq!(v, Surd { p: q(3, 4), q: q(1, 4), r: q(5, 1) });
}

#[test]
fn numeric_value_of_a_surd() {
    let s = parse_literal("9-sqrt(41)").unwrap();
    assert!((s.to_f64() - (9.0 - 41f64.sqrt())).abs() < 1e-15);
    let m: Mp = "9-sqrt(41)".parse().unwrap();
    // (9 - alpha)^2 = 41 to working precision
    let back = (Mp::from_int(9) - m.clone()) * (Mp::from_int(9) - m);
    assert!((back - Mp::from_int(41)).to_f64().abs() < 1e-70);
}

#[test]
fn malformed_input_is_rejected() {
    assert_eq!(parse_literal("   "), Err(LiteralError::Empty));
    assert!(matches!(parse_literal("1+"), Err(LiteralError::Unexpected { .. })));
    assert!(matches!(parse_literal("2**3"), Err(LiteralError::Unexpected { .. })));
    assert!(matches!(parse_literal("sqrt(5"), Err(LiteralError::Unexpected { .. })));
    assert!(matches!(parse_literal("1e"), Err(LiteralError::Unexpected { .. })));
    assert!(matches!(parse_literal("abc"), Err(LiteralError::Unexpected { .. })));
    assert_eq!(parse_literal("sqrt(-2)"), Err(LiteralError::NegativeRadicand));
    assert_eq!(parse_literal("1/0"), Err(LiteralError::DivisionByZero));
    assert!(matches!(parse_literal("sqrt(2)+sqrt(3)"), Err(LiteralError::MixedRadicals(..))));
    assert_eq!(parse_literal("sqrt(sqrt(2))"), Err(LiteralError::NestedRadical));
}

#[test]
fn lists_split_outside_parentheses() {
    let v = parse_list("1, (20/61)*(9-2*sqrt(5)), 4").unwrap();
    assert_eq!(v.len(), 3);
    assert_eq!(v[0].as_rational(), Some(q(1, 1)));
    assert!(!v[1].is_rational());
    assert_eq!(v[2].as_rational(), Some(q(4, 1)));
    assert!(parse_list("1,,2").is_err());
}
