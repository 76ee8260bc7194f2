use num_bigint::BigInt;
use num_rational::BigRational;

use confocal_billiards::confocal::{classify_caustics, interval_system, ConfocalFamily};
use confocal_billiards::poly::Poly;
use confocal_billiards::scalar::Scalar;
use confocal_billiards::series::{
    halphen_determinant, hankel_condition, hankel_matrix, pade_defect, pade_sqrt, sqrt_series, RankOptions,
};
use confocal_billiards::{Error, Mp, Q};

fn q(p: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(p), BigInt::from(d))
}

/// Binomial coefficients of `(1 + x)^(1/2)`.
fn half_binomial(k: usize) -> Q {
    let mut c = q(1, 1);
    for j in 0..k {
        c = c * (q(1, 2) - q(j as i64, 1)) / q(j as i64 + 1, 1);
    }
    c
}

#[test]
fn square_root_of_a_linear_factor() {
    let p = Poly::new(vec![q(1, 1), q(1, 1)]);
    let s = sqrt_series(&p, 10, None, true).unwrap();
    for k in 0..=10 {
        assert_eq!(s.coeff(k), half_binomial(k));
    }
}

#[test]
fn series_squared_reproduces_the_polynomial() {
    let p = Poly::new(vec![q(4, 1), q(-3, 1), q(1, 2), q(2, 7)]);
    let s = sqrt_series(&p, 12, None, false).unwrap();
    assert!(!s.is_normalized());
    let sq = &s.as_poly() * &s.as_poly();
    for k in 0..=12 {
        assert_eq!(sq.coeff(k), p.coeff(k), "degree {k}");
    }
}

#[test]
fn irrational_constant_needs_normalized_mode() {
    let p = Poly::new(vec![q(2, 1), q(1, 1)]);
    assert!(matches!(sqrt_series(&p, 4, None, false), Err(Error::IrrationalConstant)));
    let s = sqrt_series(&p, 4, None, true).unwrap();
    assert_eq!(s.factor(), &q(2, 1));
    assert_eq!(s.coeff(0), q(1, 1));
    let p = Poly::new(vec![q(-1, 1), q(1, 1)]);
    assert!(matches!(sqrt_series(&p, 4, None, true), Err(Error::NonPositiveConstantTerm)));
}

#[test]
fn divisor_is_applied_term_by_term() {
    let p = Poly::new(vec![q(1, 1), q(-5, 1), q(6, 1)]);
    let div = Poly::new(vec![q(1, 1), q(-2, 1)]);
    let s = sqrt_series(&p, 8, Some(&div), true).unwrap();
    let plain = sqrt_series(&p, 8, None, true).unwrap();
    // (series * divisor) reproduces the plain series
    let back = &s.as_poly() * &div;
    for k in 0..=8 {
        assert_eq!(back.coeff(k), plain.coeff(k));
    }
}

#[test]
fn window_shape_and_entries() {
    let p = Poly::new(vec![q(1, 1), q(1, 1)]);
    let s = sqrt_series(&p, 20, None, true).unwrap();
    let h = hankel_matrix(&s, 5, 3).unwrap();
    assert_eq!((h.rows(), h.cols()), (4, 3));
    assert_eq!(h.get(0, 0), &half_binomial(4));
    assert_eq!(h.get(3, 2), &half_binomial(9));
    assert!(matches!(hankel_matrix(&s, 2, 3), Err(Error::PeriodTooSmall { .. })));
    let short = sqrt_series(&p, 4, None, true).unwrap();
    assert!(matches!(hankel_matrix(&short, 5, 3), Err(Error::InsufficientOrder { .. })));
}

/// The triangle caustic of the ellipse with `a = (1, 2)` satisfies the
/// three-periodic window condition; a nearby parameter does not.
#[test]
fn three_periodic_window_in_the_plane() {
    let f = ConfocalFamily::new(vec![Mp::from_int(1), Mp::from_int(2)]).unwrap();
    let alpha: Mp = "6/(3+2*sqrt(3))".parse().unwrap();
    let opts = RankOptions::for_backend::<Mp>();
    let cs = classify_caustics(&f, std::slice::from_ref(&alpha)).unwrap();
    let s = sqrt_series(&interval_system(&cs).normalized_pol(), 8, None, true).unwrap();
    let r = hankel_condition(&s, 3, 2, &opts).unwrap();
    assert!(r.satisfied);
    let pair = pade_sqrt(&s, 3, 2, &opts).unwrap().unwrap();
    assert_eq!(pair.p.degree(), 3);
    assert_eq!(pair.q.degree(), 1);
    // p^2 - Pol q^2 vanishes below degree 2m = 6
    let pol = interval_system(&cs).normalized_pol();
    let defect = pade_defect(&pair, &pol);
    let top = defect.max_abs_coeff();
    for k in 0..6 {
        assert!(defect.coeff(k).abs().to_f64() < 1e-60 * top.max(1.0), "degree {k}");
    }

    let off = classify_caustics(&f, &[alpha + Mp::from_ratio(1, 100)]).unwrap();
    let s = sqrt_series(&interval_system(&off).normalized_pol(), 8, None, true).unwrap();
    assert!(!hankel_condition(&s, 3, 2, &opts).unwrap().satisfied);
    assert!(pade_sqrt(&s, 3, 2, &opts).unwrap().is_none());
}

/// `c = (1, 2/3, 1/3)` is symmetric about `1/2`, so a degree-two Pell
/// solution exists and the 1x1 window `C_3` vanishes exactly.
#[test]
fn exact_window_on_rational_data() {
    let f = ConfocalFamily::new(vec![q(1, 1), q(3, 1)]).unwrap();
    let opts = RankOptions::for_backend::<Q>();
    let cs = classify_caustics(&f, &[q(3, 2)]).unwrap();
    let s = sqrt_series(&interval_system(&cs).normalized_pol(), 6, None, true).unwrap();
    assert_eq!(s.coeff(3), q(0, 1));
    let r = hankel_condition(&s, 2, 2, &opts).unwrap();
    assert_eq!((r.cols, r.rank), (1, 0));
    assert!(r.satisfied);

    let cs = classify_caustics(&f, &[q(1, 2)]).unwrap();
    let s = sqrt_series(&interval_system(&cs).normalized_pol(), 6, None, true).unwrap();
    let r = hankel_condition(&s, 2, 2, &opts).unwrap();
    assert!(!r.satisfied);
    assert!(!hankel_condition(&s, 3, 2, &opts).unwrap().satisfied);
}

#[test]
fn halphen_determinants() {
    let p = Poly::new(vec![q(1, 1), q(1, 1)]);
    let s = sqrt_series(&p, 12, None, true).unwrap();
    assert_eq!(halphen_determinant(&s, 3, 0), q(1, 1));
    assert_eq!(halphen_determinant(&s, 3, 1), s.coeff(3));
    let h2 = s.coeff(3) * s.coeff(5) - s.coeff(4) * s.coeff(4);
    assert_eq!(halphen_determinant(&s, 4, 2), h2);
    // entries with negative index are zero
    assert_eq!(halphen_determinant(&s, 0, 2), s.coeff(0) * s.coeff(0) * q(-1, 1));
}
