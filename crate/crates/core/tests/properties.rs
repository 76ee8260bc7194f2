use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use confocal_billiards::billiard::{launch_from_caustics, line_caustics, next_impact, reflect, LaunchSeed};
use confocal_billiards::cayley::check_periodicity;
use confocal_billiards::confocal::{classify_caustics, interval_system, ConfocalFamily};
use confocal_billiards::extremal::{analyze_alternance, find_caustics_d_plus_1, pell_solve, PellOptions};
use confocal_billiards::freqmap::{rotation_number, QuadratureOptions};
use confocal_billiards::poly::Poly;
use confocal_billiards::series::{sqrt_series, RankOptions};
use confocal_billiards::{Mp, Q};

fn q(p: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(p), BigInt::from(d))
}

/// Strictly increasing semi-axes.
fn axes(d: usize) -> impl Strategy<Value = Vec<f64>> {
    (0.3f64..2.0, prop::collection::vec(0.2f64..2.0, d - 1)).prop_map(|(a1, steps)| {
        let mut a = vec![a1];
        for s in steps {
            a.push(a.last().unwrap() + s);
        }
        a
    })
}

fn rational_poly(max_deg: usize) -> impl Strategy<Value = Poly<Q>> {
    prop::collection::vec((-9i64..=9, 1i64..=5), 1..=max_deg + 1)
        .prop_map(|c| Poly::new(c.into_iter().map(|(p, d)| q(p, d)).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn merged_sequence_is_sorted_and_interleaved(a in axes(3), t in prop::collection::vec(0.01f64..0.99, 2)) {
        let fam = ConfocalFamily::new(a.clone()).unwrap();
        // one caustic in (0, a_1), one in (a_1, a_2)
        let alpha = [t[0] * a[0], a[0] + t[1] * (a[1] - a[0])];
        let cs = classify_caustics(&fam, &alpha).unwrap();
        prop_assert!(cs.b().windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(cs.b().len(), 5);
        let sys = interval_system(&cs);
        prop_assert!(sys.endpoints().windows(2).all(|w| w[0] >= w[1]));
        for j in 1..=3 {
            let (lo, hi) = sys.band(j);
            prop_assert!(lo <= hi);
        }
    }

    #[test]
    fn division_round_trip(a in rational_poly(6), b in rational_poly(3)) {
        prop_assume!(!b.is_zero());
        let (quot, rem) = a.div_rem(&b);
        prop_assert!(rem.is_zero() || rem.degree() < b.degree());
        prop_assert_eq!(&(&quot * &b) + &rem, a);
    }

    #[test]
    fn series_squares_back(c in prop::collection::vec((-9i64..=9, 1i64..=5), 1..=4)) {
        let mut coeffs = vec![q(1, 1)];
        coeffs.extend(c.into_iter().map(|(p, d)| q(p, d)));
        let p = Poly::new(coeffs);
        let s = sqrt_series(&p, 9, None, true).unwrap().as_poly();
        let sq = &s * &s;
        for k in 0..=9 {
            prop_assert_eq!(sq.coeff(k), p.coeff(k));
        }
    }

    #[test]
    fn reflection_keeps_speed_and_caustics(a in axes(3), fr in prop::collection::vec(0.1f64..0.9, 2), seed in any::<u64>()) {
        use rand::SeedableRng;
        let fam = ConfocalFamily::new(a.clone()).unwrap();
        let alpha = [fr[0] * a[0], a[0] + fr[1] * (a[1] - a[0])];
        let cs = classify_caustics(&fam, &alpha).unwrap();
        let launch = LaunchSeed::random(3, &mut rand::rngs::StdRng::seed_from_u64(seed));
        let (x, v) = launch_from_caustics(&fam, &cs, &launch).unwrap();
        let (y, _) = next_impact(&fam, &x, &v).unwrap();
        let w = reflect(&fam, &y, &v).unwrap();
        prop_assert!((w.iter().map(|c| c * c).sum::<f64>() - 1.0).abs() < 1e-12);
        let got = line_caustics(&fam, &y, &w).unwrap();
        for (g, al) in got.iter().zip(alpha) {
            prop_assert!((g - al).abs() < 1e-7 * a[2], "{} vs {}", g, al);
        }
    }

    #[test]
    fn rotation_number_scales(b in 0.5f64..3.0, extra in 0.2f64..3.0, t in 0.05f64..0.95, k in 0.1f64..10.0) {
        let a = b + extra;
        let lambda = t * b;
        let opts = QuadratureOptions::default();
        let r = rotation_number(&a, &b, &lambda, &opts).unwrap();
        let rk = rotation_number(&(k * a), &(k * b), &(k * lambda), &opts).unwrap();
        prop_assert!((r - rk).abs() < 1e-10);
        prop_assert!(r > 0.0 && r < 0.5);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn finder_output_obeys_the_degree_law(a in axes(3)) {
        let fam = ConfocalFamily::new(a.iter().map(|x| Mp::from_f64(*x)).collect()).unwrap();
        let found = find_caustics_d_plus_1(&fam);
        prop_assume!(found.admissible);
        let sys = interval_system(&classify_caustics(&fam, &found.alpha).unwrap());
        let sol = pell_solve(&sys, 4, &PellOptions::for_backend::<Mp>()).unwrap();
        let w = analyze_alternance(&sol, &sys).unwrap();
        prop_assert!(w.law_holds && w.strictly_decreasing);
        prop_assert_eq!(w.m, vec![4, 3, 2]);
    }

    #[test]
    fn periodic_at_n_is_periodic_at_2n(b in 1.2f64..4.0) {
        let fam = ConfocalFamily::new(vec![Mp::from_int(1), Mp::from_f64(b)]).unwrap();
        let found = find_caustics_d_plus_1(&fam);
        prop_assume!(found.admissible);
        let cs = classify_caustics(&fam, &found.alpha).unwrap();
        let opts = RankOptions::for_backend::<Mp>();
        let v3 = check_periodicity(&fam, &cs, 3, &opts).unwrap();
        prop_assert!(v3.periodic);
        let v6 = check_periodicity(&fam, &cs, 6, &opts).unwrap();
        prop_assert!(v6.periodic);
        prop_assert_eq!(v6.elliptic_period, v3.elliptic_period);
    }
}
