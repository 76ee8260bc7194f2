use num_bigint::BigInt;
use num_rational::BigRational;

use confocal_billiards::linalg::{complex_roots, determinant, rank_report, real_roots, solve, Matrix};
use confocal_billiards::poly::Poly;
use confocal_billiards::scalar::Scalar;
use confocal_billiards::{Error, Mp, Q};

fn q(p: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(p), BigInt::from(d))
}

fn qpoly(c: &[i64]) -> Poly<Q> {
    Poly::new(c.iter().map(|v| q(*v, 1)).collect())
}

#[test]
fn arithmetic_and_division() {
    let a = qpoly(&[1, 2, 3]);
    let b = qpoly(&[-1, 1]);
    let prod = &a * &b;
    assert_eq!(prod, qpoly(&[-1, -1, -1, 3]));
    let (quot, rem) = prod.div_rem(&b);
    assert_eq!(quot, a);
    assert!(rem.is_zero());

    let (quot, rem) = qpoly(&[5, 0, 1]).div_rem(&qpoly(&[1, 1]));
    // x^2 + 5 = (x - 1)(x + 1) + 6
    assert_eq!(quot, qpoly(&[-1, 1]));
    assert_eq!(rem, qpoly(&[6]));

    assert_eq!((&a - &a).degree(), 0);
    assert!((&a - &a).is_zero());
    assert_eq!(a.derivative(), qpoly(&[2, 6]));
    assert_eq!(a.eval(&q(2, 1)), q(17, 1));
    assert_eq!(a.reversed(2), qpoly(&[3, 2, 1]));
    assert_eq!(a.truncate(1), qpoly(&[1, 2]));
}

#[test]
fn from_roots_vanishes_at_roots() {
    let roots = [q(1, 2), q(-3, 1), q(7, 5)];
    let p = Poly::from_roots(&roots);
    assert_eq!(p.degree(), 3);
    assert_eq!(p.leading(), q(1, 1));
    for r in &roots {
        assert_eq!(p.eval(r), q(0, 1));
    }
}

#[test]
fn real_roots_recover_known_roots() {
    let want = [-2.5, 0.125, 1.0, 3.75];
    let p = Poly::from_roots(&want.map(Mp::from_f64));
    let got = real_roots(&p, 1e-30).unwrap();
    for (g, w) in got.iter().zip(want) {
        assert!((g.to_f64() - w).abs() < 1e-60);
    }
    // x^2 + 1 has no real roots
    let p = Poly::new(vec![1.0, 0.0, 1.0]);
    assert!(matches!(real_roots(&p, 1e-8), Err(Error::ComplexRoot(_))));
    let z = complex_roots(&p);
    assert_eq!(z.len(), 2);
    for r in z {
        assert!(r.re.abs() < 1e-12 && (r.im.abs() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn double_root_is_resolved() {
    let p = Poly::from_roots(&[Mp::from_ratio(1, 3), Mp::from_ratio(1, 3), Mp::from_int(2)]);
    let got = real_roots(&p, 1e-20).unwrap();
    assert_eq!(got.len(), 3);
    assert!((got[0].to_f64() - 1.0 / 3.0).abs() < 1e-15);
    assert!((got[1].to_f64() - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn exact_solve_and_determinant() {
    let m = Matrix::from_fn(3, 3, |i, j| q(1, (i + j + 1) as i64));
    // Hilbert matrix of order 3
    assert_eq!(determinant(&m), q(1, 2160));
    let b = vec![q(1, 1), q(0, 1), q(0, 1)];
    let x = solve(&m, &b).unwrap();
    assert_eq!(x, vec![q(9, 1), q(-36, 1), q(30, 1)]);
    assert_eq!(m.mul_vec(&x), b);

    let singular = Matrix::from_fn(2, 2, |i, _| q(i as i64 + 1, 1));
    assert_eq!(determinant(&singular), q(0, 1));
    assert!(solve(&singular, &[q(1, 1), q(1, 1)]).is_err());
}

#[test]
fn rank_of_a_rank_one_matrix() {
    let m = Matrix::from_fn(4, 3, |i, j| Mp::from_int(((i + 1) * (j + 2)) as i64));
    let r = rank_report(&m, 1e-40, 1e6);
    assert_eq!(r.rank, 1);
    assert_eq!(r.nullity, 2);
    let exact = Matrix::from_fn(4, 3, |i, j| q(((i + 1) * (j + 2)) as i64, 1));
    let r = rank_report(&exact, 0.0, 1e6);
    assert_eq!(r.rank, 1);
    let v = r.null_vector.unwrap();
    assert!(exact.mul_vec(&v).iter().all(|x| *x == q(0, 1)));
}
