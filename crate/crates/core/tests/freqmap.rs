use std::f64::consts::PI;

use confocal_billiards::confocal::{classify_caustics, interval_system, ConfocalFamily, IntervalSystem};
use confocal_billiards::freqmap::{
    frequency, frequency_of_system, injectivity_probe, invert_frequency, rational_fit, rotation_monotonicity,
    rotation_number, singular_integral, third_kind_polynomial, QuadratureOptions,
};
use confocal_billiards::poly::Poly;
use confocal_billiards::scalar::Scalar;
use confocal_billiards::{Error, Mp};

fn opts() -> QuadratureOptions {
    QuadratureOptions::default()
}

/// Composite Simpson on `[lo, hi]` with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    let mut sum = f(lo) + f(hi);
    for k in 1..n {
        sum += f(lo + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

#[test]
fn arcsine_and_endpoint_integrals() {
    let one = |_: &f64| 1.0;
    // int_a^b ds / sqrt((s-a)(b-s)) = pi
    let v = singular_integral(&one, &[0.25, 2.0], &0.25, &2.0, &opts());
    assert!((v - PI).abs() < 1e-13);
    // one singular endpoint
    let v = singular_integral(&one, &[0.0], &0.0, &1.0, &opts());
    assert!((v - 2.0).abs() < 1e-13);
    // no singularity
    let v = singular_integral(&|s: &f64| s * s, &[], &0.0, &1.0, &opts());
    assert!((v - 1.0 / 3.0).abs() < 1e-14);
    assert_eq!(singular_integral(&one, &[], &1.0, &1.0, &opts()), 0.0);
}

#[test]
fn elliptic_integral_by_substitution() {
    // s = sin^2 t turns int_0^1 ds / sqrt(s (1-s) (3-s)) into a smooth integral
    let want = simpson(|t| 2.0 / (3.0 - t.sin().powi(2)).sqrt(), 0.0, PI / 2.0, 2000);
    let got = singular_integral(&|_: &f64| 1.0, &[0.0, 1.0, 3.0], &0.0, &1.0, &opts());
    assert!((got - want).abs() < 1e-12, "{got} vs {want}");
}

#[test]
fn multiprecision_quadrature() {
    let pi = singular_integral(&|_: &Mp| Mp::from_int(1), &[Mp::from_int(0), Mp::from_int(1)], &Mp::from_int(0), &Mp::from_int(1), &opts());
    let digits: Mp = "3.14159265358979323846264338327950288419716939937510582097494459230781640628620899862803482534211706798"
        .parse()
        .unwrap();
    assert!((pi - digits).abs().to_f64() < 1e-60);
}

/// With two bands `eta = s - r` and `r` is the weighted mean of `s` over the gap.
#[test]
fn third_kind_root_is_the_gap_mean() {
    let sys = IntervalSystem::from_endpoints(vec![1.0, 0.7, 0.4]).unwrap();
    let (lo, hi) = sys.gap(1);
    let c = sys.endpoints().to_vec();
    let (mid, h) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
    // s = mid + h cos t cancels the two gap endpoints
    let weight = |t: f64| {
        let s = mid + h * t.cos();
        let rest: f64 = c.iter().filter(|r| **r != lo && **r != hi).map(|r| (s - r).abs()).product();
        (s, 1.0 / rest.sqrt())
    };
    let num = simpson(|t| weight(t).0 * weight(t).1, 0.0, PI, 4000);
    let den = simpson(|t| weight(t).1, 0.0, PI, 4000);
    let tk = third_kind_polynomial(&sys, &opts()).unwrap();
    assert_eq!(tk.eta.degree(), 1);
    assert_eq!(tk.eta.leading(), 1.0);
    assert!((-tk.eta.coeff(0) - num / den).abs() < 1e-10);
    assert!(tk.roots_in_gaps);
    assert!(tk.gap_residuals[0] < 1e-12);
}

#[test]
fn single_band_has_unit_mass() {
    let sys = IntervalSystem::from_endpoints(vec![0.8]).unwrap();
    let f = frequency_of_system(&sys, &opts()).unwrap();
    assert_eq!(f.eta, Poly::one());
    assert!((f.total_mass - 1.0).abs() < 1e-13);
}

#[test]
fn triangle_frequencies() {
    let fam = ConfocalFamily::new(vec![1.0, 2.0]).unwrap();
    let cs = classify_caustics(&fam, &[4.0 * 3f64.sqrt() - 6.0]).unwrap();
    let f = frequency(&cs, &opts()).unwrap();
    assert!((f.f[0] - 2.0 / 3.0).abs() < 1e-11, "{:?}", f.f);
    assert!((f.f[1] - 1.0).abs() < 1e-11);
    assert!(f.strictly_increasing() && f.roots_in_gaps);
    let sum: f64 = f.band_measures.iter().sum();
    assert!((sum - f.total_mass).abs() < 1e-14);
}

#[test]
fn double_caustic_frequencies() {
    let fam = ConfocalFamily::new(vec![20.0 / 9.0, 4.0, 5.0]).unwrap();
    let al = 9.0 - 41f64.sqrt();
    let f = frequency(&classify_caustics(&fam, &[al, al]).unwrap(), &opts()).unwrap();
    for (got, want) in f.f.iter().zip([2.0 / 4.0, 3.0 / 4.0, 1.0]) {
        assert!((got - want).abs() < 1e-9, "{:?}", f.f);
    }
}

#[test]
fn rotation_number_is_scale_invariant() {
    let rho = rotation_number(&2.0, &1.0, &0.3, &opts()).unwrap();
    for k in [0.5, 3.0, 17.0] {
        let scaled = rotation_number(&(k * 2.0), &(k * 1.0), &(k * 0.3), &opts()).unwrap();
        assert!((scaled - rho).abs() < 1e-13);
    }
    // the triangle caustic sits at 1/3 in this normalization with a = 2, b = 1
    let tri = rotation_number(&2.0, &1.0, &(4.0 * 3f64.sqrt() - 6.0), &opts()).unwrap();
    assert!((tri - 1.0 / 3.0).abs() < 1e-12, "{tri}");
}

#[test]
fn rotation_number_errors() {
    assert!(matches!(rotation_number(&2.0, &1.0, &0.0, &opts()), Err(Error::DegenerateCaustic { index: 0, .. })));
    assert!(matches!(rotation_number(&2.0, &1.0, &1.0, &opts()), Err(Error::DegenerateCaustic { index: 1, .. })));
    assert!(matches!(rotation_number(&2.0, &1.0, &2.5, &opts()), Err(Error::CausticOutOfRange(_))));
    assert!(matches!(rotation_number(&1.0, &2.0, &0.5, &opts()), Err(Error::CausticOutOfRange(_))));
}

#[test]
fn rotation_is_monotone_on_each_branch() {
    let lambdas: Vec<f64> = (1..20).map(|k| k as f64 / 20.0).collect();
    let r = rotation_monotonicity(&2.0, &1.0, &lambdas, &opts()).unwrap();
    assert!(r.monotone(), "{:?}", r.values);
    let lambdas: Vec<f64> = (1..20).map(|k| 1.0 + k as f64 / 20.0).collect();
    assert!(rotation_monotonicity(&2.0, &1.0, &lambdas, &opts()).unwrap().monotone());
}

#[test]
fn continued_fractions() {
    assert_eq!(rational_fit(2.0 / 3.0 + 1e-12, 100, 1e-9), Some((2, 3)));
    assert_eq!(rational_fit(PI, 10, 1e-2), Some((22, 7)));
    assert_eq!(rational_fit(PI, 200, 1e-6), Some((355, 113)));
    assert_eq!(rational_fit(2f64.sqrt(), 10, 1e-9), None);
    assert_eq!(rational_fit(3.0, 1, 0.0), Some((3, 1)));
}

#[test]
fn inversion_recovers_the_triangle() {
    let fam = ConfocalFamily::new(vec![1.0, 2.0]).unwrap();
    let build = |th: &[f64]| Ok(interval_system(&classify_caustics(&fam, th)?));
    let th = invert_frequency(&build, &[2.0 / 3.0], &[0.5], &[(0.0, 1.0)], &opts(), 40).unwrap();
    assert!((th[0] - (4.0 * 3f64.sqrt() - 6.0)).abs() < 1e-9, "{th:?}");
}

#[test]
fn frequency_map_separates_a_grid() {
    let fam = ConfocalFamily::new(vec![1.0, 4.0, 5.0]).unwrap();
    let grid: Vec<_> = [0.2, 0.5, 0.8]
        .iter()
        .flat_map(|e| [1.5, 2.5, 3.5].map(|h| classify_caustics(&fam, &[*e, h]).unwrap()))
        .collect();
    let rep = injectivity_probe(&grid, 1e-6, &opts()).unwrap();
    assert_eq!(rep.points, 9);
    assert!(rep.same_component);
    assert!(rep.collisions.is_empty() && rep.min_distance > 1e-4);
    assert!(rep.images.iter().all(|f| f.windows(2).all(|w| w[0] < w[1])));
}
