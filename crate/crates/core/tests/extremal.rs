use num_bigint::BigInt;
use num_rational::BigRational;

use confocal_billiards::confocal::{classify_caustics, interval_system, ConfocalFamily, IntervalSystem};
use confocal_billiards::extremal::{
    analyze_alternance, d_plus_1_pattern, equioscillation, find_caustics_d_plus_1, hyperboloid_4periodic,
    hyperboloid_4periodic_exact, pell_defect, pell_solve, r_poly, unique_pair_in_family, EndpointSpec, PellOptions,
    PellProblem,
};
use confocal_billiards::poly::Poly;
use confocal_billiards::scalar::Scalar;
use confocal_billiards::{Error, Mp, Q};

fn q(p: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(p), BigInt::from(d))
}

/// `(T_k(y), U_{k-1}(y))` for a polynomial argument `y`.
fn chebyshev_of<T: Scalar>(y: &Poly<T>, k: usize) -> (Poly<T>, Poly<T>) {
    let two_y = y.scale(&T::from_i64(2));
    let (mut t0, mut t1) = (Poly::one(), y.clone());
    let (mut u0, mut u1) = (Poly::one(), two_y.clone());
    for _ in 1..k {
        let t2 = &(&two_y * &t1) - &t0;
        let u2 = &(&two_y * &u1) - &u0;
        (t0, t1, u0, u1) = (t1, t2, u1, u2);
    }
    (t1, u0)
}

fn positive_leading<T: Scalar>(p: Poly<T>) -> Poly<T> {
    if p.leading() < T::zero() {
        -&p
    } else {
        p
    }
}

#[test]
fn single_band_is_chebyshev_exactly() {
    for c in [q(1, 1), q(3, 7)] {
        let sys = IntervalSystem::from_endpoints(vec![c.clone()]).unwrap();
        let y = Poly::linear(q(-1, 1), q(2, 1) / c.clone());
        for n in 1..=6 {
            let sol = pell_solve(&sys, n, &PellOptions::for_backend::<Q>()).unwrap();
            let (t, u) = chebyshev_of(&y, n);
            let sign = if n % 2 == 1 { q(1, 1) } else { q(-1, 1) };
            assert_eq!(sol.p, t.scale(&sign), "n = {n}");
            assert_eq!(sol.q, positive_leading(u.scale(&(q(2, 1) / c.clone()))), "n = {n}");
            assert_eq!(sol.residual, 0.0);
            assert_eq!(sol.p.coeff(0), q(-1, 1));
        }
    }
}

/// The Hankel window loses accuracy with the degree in double precision.
#[test]
fn single_band_in_double_precision() {
    let c = 0.8;
    let sys = IntervalSystem::from_endpoints(vec![c]).unwrap();
    let y = Poly::linear(-1.0, 2.0 / c);
    for n in 1..=8 {
        let sol = pell_solve(&sys, n, &PellOptions::for_backend::<f64>()).unwrap();
        let (t, _) = chebyshev_of(&y, n);
        let t = t.scale(&if n % 2 == 1 { 1.0 } else { -1.0 });
        let scale = t.max_abs_coeff();
        for k in 0..=n {
            assert!((sol.p.coeff(k) - t.coeff(k)).abs() < 1e-7 * scale, "n = {n}, k = {k}");
        }
    }
}

/// Intervals symmetric about `1/2`: `u = s(1-s)` maps both bands onto
/// `[0, c_2 c_3]`, so `p_hat = -(-1)^k T_k(2u/(c_2 c_3) - 1)` at degree `2k`.
#[test]
fn symmetric_two_band_system() {
    for c2 in [q(2, 3), q(3, 4), q(5, 9)] {
        let c3 = q(1, 1) - c2.clone();
        let sys = IntervalSystem::from_endpoints(vec![q(1, 1), c2.clone(), c3.clone()]).unwrap();
        let w = c2.clone() * c3.clone();
        let u = Poly::new(vec![q(0, 1), q(1, 1), q(-1, 1)]);
        let y = &u.scale(&(q(2, 1) / w.clone())) - &Poly::one();
        for k in 1..=4 {
            let sol = pell_solve(&sys, 2 * k, &PellOptions::for_backend::<Q>()).unwrap();
            let (t, uu) = chebyshev_of(&y, k);
            let sign = if k % 2 == 1 { q(1, 1) } else { q(-1, 1) };
            assert_eq!(sol.p, t.scale(&sign), "c2 = {c2}, k = {k}");
            assert_eq!(sol.q, positive_leading(uu.scale(&(q(2, 1) / w.clone()))));
        }
        // odd degrees have no solution on a generic symmetric system
        assert!(matches!(pell_solve(&sys, 3, &PellOptions::for_backend::<Q>()), Err(Error::NoSolution { .. })));
    }
}

#[test]
fn symmetric_alternance_counts() {
    let sys: IntervalSystem<Mp> =
        IntervalSystem::from_endpoints(vec![Mp::from_int(1), Mp::from_ratio(2, 3), Mp::from_ratio(1, 3)]).unwrap();
    let sol = pell_solve(&sys, 4, &PellOptions::for_backend::<Mp>()).unwrap();
    let w = analyze_alternance(&sol, &sys).unwrap();
    assert_eq!(w.m, vec![4, 2]);
    assert_eq!(w.tau, vec![1, 1]);
    assert!(w.law_holds && w.strictly_decreasing);
    assert_eq!((w.k, w.elliptic_period, w.reduced.clone()), (2, 2, vec![2, 1]));
    assert_eq!(w.alternance_total, 5);
    let eq = equioscillation(&sol, &sys, 400);
    assert!(eq.band_excess < 1e-60);
    assert!(eq.gap_deficit > 0.0);
}

#[test]
fn degree_below_dimension_is_refused() {
    let sys = IntervalSystem::from_endpoints(vec![1.0, 0.5, 0.25]).unwrap();
    assert!(matches!(pell_solve(&sys, 1, &PellOptions::for_backend::<f64>()), Err(Error::PeriodTooSmall { .. })));
}

#[test]
fn pell_defect_of_a_known_pair() {
    // T_2(2s - 1) on [0, 1]: p = -(8s^2 - 8s + 1), q = 4(2s - 1), P = s(s-1)
    let p = Poly::new(vec![q(-1, 1), q(8, 1), q(-8, 1)]);
    let qq = Poly::new(vec![q(-4, 1), q(8, 1)]);
    let phat = Poly::from_roots(&[q(0, 1), q(1, 1)]);
    assert!(pell_defect(&p, &qq, &phat).is_zero());
}

#[test]
fn planar_triangle_caustic() {
    let f = ConfocalFamily::new(vec![Mp::from_int(1), Mp::from_int(2)]).unwrap();
    let found = find_caustics_d_plus_1(&f);
    assert!(found.admissible);
    let closed: Mp = "4*sqrt(3)-6".parse().unwrap();
    assert!((found.alpha[0].clone() - closed).abs().to_f64() < 1e-70);
    // gamma is a critical point of r in (0, 1/a_d)
    let r = r_poly(&f);
    assert!(r.derivative().eval(&found.gamma).abs().to_f64() < 1e-70);
    assert!(found.gamma > Mp::from_int(0) && found.gamma < Mp::from_ratio(1, 2));
    // the returned pair solves the Pell equation on the caustic system
    let sys = interval_system(&classify_caustics(&f, &found.alpha).unwrap());
    assert!(pell_defect(&found.p, &found.q, &sys.phat()).max_abs_coeff() < 1e-60);
}

#[test]
fn finder_pattern_by_parity() {
    let even = ConfocalFamily::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
    assert!(d_plus_1_pattern(&even, &[0.5, 2.2, 2.8]));
    assert!(!d_plus_1_pattern(&even, &[1.5, 2.2, 2.8]));
    let odd = ConfocalFamily::new(vec![1.0, 2.0, 3.0]).unwrap();
    assert!(d_plus_1_pattern(&odd, &[1.2, 1.8]));
    assert!(!d_plus_1_pattern(&odd, &[0.5, 1.8]));
}

#[test]
fn generatrix_closed_form() {
    let (a1, alpha) = hyperboloid_4periodic_exact(&q(4, 1), &q(5, 1));
    assert_eq!(a1, q(20, 9));
    assert_eq!(alpha.to_string(), "9-sqrt(41)");
    let (a1f, alf) = hyperboloid_4periodic(&4.0, &5.0);
    assert!((a1f - 20.0 / 9.0).abs() < 1e-15);
    assert!((alf - (9.0 - 41f64.sqrt())).abs() < 1e-15);
    // 3-4-5: sqrt(a2^2 + a3^2) is rational
    let (_, alpha) = hyperboloid_4periodic_exact(&q(3, 1), &q(4, 1));
    assert_eq!(alpha.as_rational(), Some(q(2, 1)));
}

#[test]
fn unique_pair_in_a_family() {
    let f = ConfocalFamily::new(vec![Mp::from_int(1), Mp::from_int(4), Mp::from_int(5)]).unwrap();
    let pair = unique_pair_in_family(&f).unwrap();
    let want: Mp = "1-2*sqrt(3)".parse().unwrap();
    assert!((pair.lambda.clone() - want).abs().to_f64() < 1e-70);
    // the shifted semi-axes satisfy a_1 = a_2 a_3 / (a_2 + a_3)
    let s = &pair.shifted;
    let lhs = s[0].clone() * (s[1].clone() + s[2].clone());
    assert!((lhs - s[1].clone() * s[2].clone()).abs().to_f64() < 1e-70);
    assert!(pair.alpha > Mp::from_int(1) && pair.alpha < Mp::from_int(4));
    let planar = ConfocalFamily::new(vec![1.0, 2.0]).unwrap();
    assert!(unique_pair_in_family(&planar).is_err());
}

#[test]
fn parametrized_newton_recovers_the_triangle() {
    let prob = PellProblem {
        endpoints: vec![EndpointSpec::Param(0), EndpointSpec::Fixed(Mp::from_int(1)), EndpointSpec::Fixed(Mp::from_int(2))],
        n: 3,
    };
    assert_eq!((prob.dim(), prob.param_count()), (2, 1));
    let sol = prob.solve(&[Mp::from_f64(0.9)], 60).unwrap();
    let closed: Mp = "4*sqrt(3)-6".parse().unwrap();
    assert!((sol.theta[0].clone() - closed).abs().to_f64() < 1e-60);
    assert!(sol.solution.residual < 1e-60);
    let w = analyze_alternance(&sol.solution, &sol.system).unwrap();
    assert_eq!(w.m, vec![3, 2]);
    assert!(prob.solve(&[Mp::from_f64(0.9), Mp::from_f64(0.1)], 10).is_err());
}

#[test]
fn mp_and_f64_agree_on_a_four_band_system() {
    let f = ConfocalFamily::new(vec![1.0, 1.5, 3.0, 4.0]).unwrap();
    let found = find_caustics_d_plus_1(&f);
    assert!(found.admissible);
    let fm = f.map(|x| Mp::from_f64(*x));
    let found_mp = find_caustics_d_plus_1(&fm);
    for (a, b) in found.alpha.iter().zip(&found_mp.alpha) {
        assert!((a - b.to_f64()).abs() < 1e-12 * b.to_f64());
    }
    let sys = interval_system(&classify_caustics(&fm, &found_mp.alpha).unwrap());
    let sol = pell_solve(&sys, 5, &PellOptions::for_backend::<Mp>()).unwrap();
    assert!(sol.residual < 1e-60);
    let w = analyze_alternance(&sol, &sys).unwrap();
    assert_eq!(w.m, vec![5, 4, 3, 2]);
    assert_eq!(w.tau, vec![0, 0, 0, 1]);
}
