//! Periodicity deciders: the general rank condition with parity screens,
//! the planar determinants, the `(d+1)`-periodic conditions and the
//! six-periodic catalog in dimension three.

use std::fmt;

use num_integer::Integer;

use crate::confocal::{interval_system, CausticKind, CausticSet, ConfocalFamily, IntervalSystem};
use crate::error::{Error, Result};
use crate::extremal::{analyze_alternance, d_plus_1_pattern, pell_solve, PellOptions, WindingData};
use crate::linalg::{rank_report_with_reference, Matrix};
use crate::poly::Poly;
use crate::scalar::{negligible, Mp, Scalar};
use crate::series::{growth_scale, hankel_condition, sqrt_series, window_condition, RankOptions};

/// Why a verdict came out the way it did.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerdictReason {
    /// `C(m,d)` holds at elliptic period `m`; the Cartesian period divides `n`.
    ConditionHolds { elliptic_period: usize },
    /// Odd periods need an ellipsoid among the caustics.
    OddPeriodNeedsEllipsoid,
    /// No divisor of `n` satisfies the rank condition.
    NoConditionHolds { tested: Vec<usize> },
    /// The closing period `2m` forced by parity does not divide `n`.
    ParityDoublesPeriod { elliptic_period: usize, cartesian_period: usize },
}

impl fmt::Display for VerdictReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerdictReason::ConditionHolds { elliptic_period } => {
                write!(f, "condition C({elliptic_period},d) holds")
            }
            VerdictReason::OddPeriodNeedsEllipsoid => {
                write!(f, "odd period requires one of the caustics to be an ellipsoid")
            }
            VerdictReason::NoConditionHolds { tested } => {
                write!(f, "no candidate elliptic period satisfies the rank condition (tested {tested:?})")
            }
            VerdictReason::ParityDoublesPeriod { elliptic_period, cartesian_period } => write!(
                f,
                "elliptic period {elliptic_period} closes in Cartesian coordinates only after {cartesian_period} bounces"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicityVerdict {
    pub periodic: bool,
    pub n: usize,
    pub elliptic_period: Option<usize>,
    pub cartesian_period: Option<usize>,
    /// Winding numbers over the Cartesian period.
    pub winding: Option<Vec<usize>>,
    /// Signature over the Cartesian period.
    pub signature: Option<Vec<usize>>,
    pub pell_residual: Option<f64>,
    pub reason: VerdictReason,
}

/// `b_k` (one-based, `b_0 = 0`) is a semi-axis.
fn axis_at<T: Scalar>(caustics: &CausticSet<T>, k: usize) -> bool {
    k >= 1 && k <= caustics.b().len() && caustics.is_axis(k)
}

/// `m_j` must be even when `b_{2j}` or `b_{2j+1}` is a semi-axis.
pub fn parity_ok<T: Scalar>(caustics: &CausticSet<T>, m: &[usize]) -> bool {
    m.iter()
        .enumerate()
        .all(|(j, mj)| mj % 2 == 0 || !(axis_at(caustics, 2 * j) || axis_at(caustics, 2 * j + 1)))
}

/// Pell data at degree `n` evaluated at the working multiprecision; the
/// smallest singular direction is used, so inexact inputs still resolve.
pub fn winding_at<T: Scalar>(system: &IntervalSystem<T>, n: usize) -> Result<(WindingData, f64)> {
    let sys: IntervalSystem<Mp> = system.map(|c| c.to_mp());
    let opts = PellOptions { rank: RankOptions::for_backend::<Mp>(), force: true };
    let sol = pell_solve(&sys, n, &opts)?;
    Ok((analyze_alternance(&sol, &sys)?, sol.residual))
}

/// Decide `n`-periodicity from the rank conditions `C(m,d)` over divisors
/// `m >= d` of `n`, then fix the Cartesian period with the parity rule.
pub fn check_periodicity<T: Scalar>(
    family: &ConfocalFamily<T>,
    caustics: &CausticSet<T>,
    n: usize,
    opts: &RankOptions,
) -> Result<PeriodicityVerdict> {
    let d = family.dim();
    if n <= d {
        return Err(Error::PeriodTooSmall { n, d });
    }
    let negative = |reason| PeriodicityVerdict {
        periodic: false,
        n,
        elliptic_period: None,
        cartesian_period: None,
        winding: None,
        signature: None,
        pell_residual: None,
        reason,
    };
    if n % 2 == 1 && !caustics.kinds().contains(&CausticKind::Ellipsoid) {
        return Ok(negative(VerdictReason::OddPeriodNeedsEllipsoid));
    }
    let system = interval_system(caustics);
    let pol = system.normalized_pol();
    let series = sqrt_series(&pol, 2 * n + 2, None, true)?;
    let mut tested = Vec::new();
    for m in (d..=n).filter(|m| n.is_multiple_of(*m)) {
        tested.push(m);
        let report = hankel_condition(&series, m, d, opts)?;
        if !report.satisfied {
            continue;
        }
        let (w, residual) = winding_at(&system, m)?;
        let elliptic = w.elliptic_period;
        let reduced = w.reduced.clone();
        let cartesian = if parity_ok(caustics, &reduced) { elliptic } else { 2 * elliptic };
        let factor = cartesian / elliptic;
        let winding: Vec<usize> = reduced.iter().map(|x| x * factor).collect();
        if !n.is_multiple_of(cartesian) {
            let mut v = negative(VerdictReason::ParityDoublesPeriod { elliptic_period: elliptic, cartesian_period: cartesian });
            v.elliptic_period = Some(elliptic);
            v.cartesian_period = Some(cartesian);
            v.winding = Some(winding);
            return Ok(v);
        }
        let signature = if cartesian == m {
            Some(w.tau.clone())
        } else {
            winding_at(&system, cartesian).ok().map(|(wc, _)| wc.tau)
        };
        return Ok(PeriodicityVerdict {
            periodic: true,
            n,
            elliptic_period: Some(elliptic),
            cartesian_period: Some(cartesian),
            winding: Some(winding),
            signature,
            pell_residual: Some(residual),
            reason: VerdictReason::ConditionHolds { elliptic_period: elliptic },
        });
    }
    Ok(negative(VerdictReason::NoConditionHolds { tested }))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanarReport<T> {
    pub satisfied: bool,
    /// Determinant of the (normalized) window; 1 for an empty window.
    pub determinant: T,
    pub singular_values: Vec<f64>,
}

/// Planar determinants on the series of
/// `(1 + x(a_1-alpha)/a_1)(1 + x(a_2-alpha)/a_2)(1 + x)`:
/// `n = 2m+1` uses `C_{2+i+j}` (`m x m`), `n = 2m` uses `C_{3+i+j}`
/// (`(m-1) x (m-1)`).
pub fn planar_cayley<T: Scalar>(a1: &T, a2: &T, alpha: &T, n: usize, opts: &RankOptions) -> Result<PlanarReport<T>> {
    let family = ConfocalFamily::new(vec![a1.clone(), a2.clone()])?;
    crate::confocal::classify_caustics(&family, std::slice::from_ref(alpha))?;
    if n <= 2 {
        return Err(Error::PeriodTooSmall { n, d: 2 });
    }
    let factor = |a: &T| Poly::linear(T::one(), (a.clone() - alpha.clone()) / a.clone());
    let dt = &(&factor(a1) * &factor(a2)) * &Poly::linear(T::one(), T::one());
    let (size, offset) = if n % 2 == 1 { ((n - 1) / 2, 2) } else { (n / 2 - 1, 3) };
    let series = sqrt_series(&dt, offset + 2 * size + 2, None, true)?;
    let mat = Matrix::from_fn(size, size, |i, j| series.coeff(offset + i + j));
    let determinant = crate::linalg::determinant(&mat);
    let report = window_condition(&series, size, size, offset, opts)?;
    Ok(PlanarReport { satisfied: report.satisfied, determinant, singular_values: report.singular_values })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DPlusOneCheck {
    pub type_ok: bool,
    pub satisfied: bool,
    /// Rescaled magnitudes of the coefficients required to vanish.
    pub vanishing: Vec<f64>,
    /// Relative values of the truncated polynomial at the remaining caustics.
    pub root_values: Vec<f64>,
}

/// Conditions for `(d+1)`-periodicity: divide `sqrt(Pol)` by the product of
/// `(alpha_j - x)` over odd `j` (even `d`) or even `j` (odd `d`); the
/// coefficients `C_{h+1..d}` vanish and `C_0 + ... + C_h x^h` vanishes at the
/// other caustic parameters except the largest, where `h = ceil(d/2)`.
pub fn check_d_plus_1<T: Scalar>(
    family: &ConfocalFamily<T>,
    caustics: &CausticSet<T>,
    opts: &RankOptions,
) -> Result<DPlusOneCheck> {
    let d = family.dim();
    let alpha = caustics.alpha();
    let type_ok = d_plus_1_pattern(family, alpha);
    if !type_ok {
        return Ok(DPlusOneCheck { type_ok, satisfied: false, vanishing: Vec::new(), root_values: Vec::new() });
    }
    let (div_parity, h) = if d.is_multiple_of(2) { (1, d / 2) } else { (0, d.div_ceil(2)) };
    // one-based index j of alpha_j: divisor uses j % 2 == div_parity
    let divisor = (1..d)
        .filter(|j| j % 2 == div_parity)
        .fold(Poly::one(), |acc, j| &acc * &Poly::linear(T::one(), -(T::one() / alpha[j - 1].clone())));
    let others: Vec<T> = (1..d - 1).filter(|j| j % 2 != div_parity).map(|j| alpha[j - 1].clone()).collect();
    let pol = interval_system(caustics).normalized_pol();
    let series = sqrt_series(&pol, d + 2, Some(&divisor), true)?;
    let t = if T::EXACT { 1.0 } else { opts.scale.unwrap_or_else(|| growth_scale(&series)) };
    let scaled: Vec<f64> = (0..=d).map(|k| series.coeff(k).abs().to_f64() * t.powi(k as i32)).collect();
    let reference = scaled.iter().cloned().fold(0.0, f64::max);
    let vanishing: Vec<f64> = (h + 1..=d).map(|k| scaled[k] / reference).collect();
    let mut satisfied = (h + 1..=d).all(|k| {
        if T::EXACT {
            series.coeff(k).is_zero()
        } else {
            scaled[k] <= opts.rel_tol * reference
        }
    });
    let trunc = Poly::new(series.coeffs()[..=h].to_vec());
    let mut root_values = Vec::new();
    for x in &others {
        let v = trunc.eval(x);
        let scale = (0..=h).fold(T::zero(), |acc, k| {
            let mut pw = T::one();
            for _ in 0..k {
                pw = pw * x.clone();
            }
            acc + (series.coeff(k) * pw).abs()
        });
        root_values.push(v.abs().to_f64() / scale.to_f64().max(f64::MIN_POSITIVE));
        satisfied &= negligible(&v, &scale, opts.rel_tol);
    }
    Ok(DPlusOneCheck { type_ok, satisfied, vanishing, root_values })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiveCheck {
    /// The smaller caustic is an ellipsoid.
    pub type_ok: bool,
    pub satisfied: bool,
    /// Rescaled `|C_3|, |C_4|` relative to the largest of `C_0..C_4`.
    pub vanishing: Vec<f64>,
}

/// Five-periodic condition in dimension three: the smaller caustic is an
/// ellipsoid and `C_3 = C_4 = 0` for `sqrt(Pol)/(1 - x/alpha_1)`.
pub fn check_five_d3<T: Scalar>(
    family: &ConfocalFamily<T>,
    caustics: &CausticSet<T>,
    opts: &RankOptions,
) -> Result<FiveCheck> {
    if family.dim() != 3 {
        return Err(Error::InvalidFamily("five-periodic check needs d = 3".into()));
    }
    let type_ok = caustics.kinds()[0] == CausticKind::Ellipsoid;
    if !type_ok {
        return Ok(FiveCheck { type_ok, satisfied: false, vanishing: Vec::new() });
    }
    let alpha1 = caustics.alpha()[0].clone();
    let divisor = Poly::linear(T::one(), -(T::one() / alpha1));
    let pol = interval_system(caustics).normalized_pol();
    let series = sqrt_series(&pol, 5, Some(&divisor), true)?;
    let t = if T::EXACT { 1.0 } else { opts.scale.unwrap_or_else(|| growth_scale(&series)) };
    let scaled: Vec<f64> = (0..=4).map(|k| series.coeff(k).abs().to_f64() * t.powi(k as i32)).collect();
    let reference = scaled.iter().cloned().fold(0.0, f64::max);
    let vanishing: Vec<f64> = (3..=4).map(|k| scaled[k] / reference).collect();
    let satisfied = if T::EXACT {
        (3..=4).all(|k| series.coeff(k).is_zero())
    } else {
        vanishing.iter().all(|v| *v <= opts.rel_tol)
    };
    Ok(FiveCheck { type_ok, satisfied, vanishing })
}

/// Winding variants of six-periodic trajectories in dimension three.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SixVariant {
    W642,
    W654,
    W652,
    W632,
}

impl SixVariant {
    pub const ALL: [SixVariant; 4] = [SixVariant::W642, SixVariant::W654, SixVariant::W652, SixVariant::W632];

    pub fn winding(&self) -> [usize; 3] {
        match self {
            SixVariant::W642 => [6, 4, 2],
            SixVariant::W654 => [6, 5, 4],
            SixVariant::W652 => [6, 5, 2],
            SixVariant::W632 => [6, 3, 2],
        }
    }

    pub fn from_winding(m: &[usize]) -> Option<Self> {
        SixVariant::ALL.into_iter().find(|v| v.winding() == m)
    }

    /// Odd `m_1` (the odd variants need two 1-sheeted hyperboloids).
    pub fn odd(&self) -> bool {
        self.winding()[1] % 2 == 1
    }
}

impl fmt::Display for SixVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.winding();
        write!(f, "({a},{b},{c})")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SixCheck<T> {
    pub variant: SixVariant,
    pub condition: bool,
    pub satisfied: bool,
    /// Winding of the six-periodic Pell solution, when one exists.
    pub pell_winding: Option<Vec<usize>>,
    /// `(p_2, p_1)` with `A p_2^2 - D p_1^2 = kappa x^6` (odd variants),
    /// where `A = (1-x/alpha_1)(1-x/alpha_2)`, `D = prod(1-x/a_i)`.
    pub witness: Option<(Poly<T>, Poly<T>)>,
    /// Largest coefficient of `A p_2^2 - D p_1^2` below degree six, relative.
    pub witness_defect: Option<f64>,
    /// `B_3 B_5 - B_4^2` on the series of `sqrt(D)` (double caustic only).
    pub b_determinant: Option<T>,
    /// Relative size of the determinant against `B_4^2`.
    pub b_relative: Option<f64>,
    /// `max |C_k - (B_k - B_{k-1}/alpha)|` for `k = 4, 5` (double caustic).
    pub b_relation: Option<f64>,
}

/// Six-periodicity in dimension three for a prescribed winding variant.
pub fn check_six_d3<T: Scalar>(
    family: &ConfocalFamily<T>,
    alpha1: &T,
    alpha2: &T,
    variant: SixVariant,
    opts: &RankOptions,
) -> Result<SixCheck<T>> {
    if family.dim() != 3 {
        return Err(Error::InvalidFamily("six-periodic variants are catalogued for d = 3".into()));
    }
    let caustics = crate::confocal::classify_caustics(family, &[alpha1.clone(), alpha2.clone()])?;
    let hyper1 = caustics.kinds().iter().all(|k| *k == CausticKind::Hyperboloid { index: 1 });
    if variant.odd() && !hyper1 {
        return Err(Error::TypeMismatch(format!(
            "variant {variant} needs two 1-sheeted hyperboloids, got {} and {}",
            caustics.kinds()[0],
            caustics.kinds()[1]
        )));
    }
    let system = interval_system(&caustics);
    let pol = system.normalized_pol();
    let series = sqrt_series(&pol, 14, None, true)?;
    let a = family.a();
    let (al1, al2) = (caustics.alpha()[0].clone(), caustics.alpha()[1].clone());
    let lin = |b: &T| Poly::linear(T::one(), -(T::one() / b.clone()));
    let big_a = &lin(&al1) * &lin(&al2);
    let big_d = &(&lin(&a[0]) * &lin(&a[1])) * &lin(&a[2]);

    let mut out = SixCheck {
        variant,
        condition: false,
        satisfied: false,
        pell_winding: None,
        witness: None,
        witness_defect: None,
        b_determinant: None,
        b_relative: None,
        b_relation: None,
    };

    if al1 == al2 {
        let bser = sqrt_series(&big_d, 8, None, true)?;
        let (b3, b4, b5) = (bser.coeff(3), bser.coeff(4), bser.coeff(5));
        let det = b3.clone() * b5.clone() - b4.clone() * b4.clone();
        let rel = det.abs().to_f64() / (b3.clone() * b5.clone()).abs().to_f64().max((b4.clone() * b4).to_f64());
        let inv = T::one() / al1.clone();
        let relation = (4..=5)
            .map(|k| {
                let pred = bser.coeff(k) - bser.coeff(k - 1) * inv.clone();
                (series.coeff(k) - pred).abs().to_f64()
            })
            .fold(0.0, f64::max);
        out.b_determinant = Some(det);
        out.b_relative = Some(rel);
        out.b_relation = Some(relation);
    }

    out.condition = if variant.odd() {
        // rows k = 0..5: A x^j (j <= 2) against C x^j (j <= 1)
        let m = Matrix::from_fn(6, 5, |k, j| {
            if j < 3 {
                if k >= j { big_a.coeff(k - j) } else { T::zero() }
            } else {
                let s = j - 3;
                if k >= s { series.coeff(k - s) } else { T::zero() }
            }
        });
        let reference = m.max_abs();
        let report = rank_report_with_reference(&m, opts.rel_tol, opts.ill_ratio, reference);
        if report.rank < 5 {
            if let Some(v) = report.null_vector {
                let p2 = Poly::new(v[..3].to_vec());
                let p1 = Poly::new(v[3..].to_vec());
                let defect = &(&big_a * &(&p2 * &p2)) - &(&big_d * &(&p1 * &p1));
                let low = (0..6).map(|k| defect.coeff(k).abs().to_f64()).fold(0.0, f64::max);
                let top = defect.coeff(6).abs().to_f64();
                out.witness_defect = Some(if top > 0.0 { low / top } else { f64::INFINITY });
                out.witness = Some((p2, p1));
            }
            true
        } else {
            false
        }
    } else {
        hankel_condition(&series, 3, 3, opts)?.satisfied
    };

    if out.condition {
        if let Ok((w, _)) = winding_at(&system, 6) {
            out.satisfied = w.m == variant.winding();
            out.pell_winding = Some(w.m);
        }
    }
    Ok(out)
}

/// Reduce a winding vector by its gcd.
pub fn reduce_winding(m: &[usize]) -> (usize, Vec<usize>) {
    let k = m.iter().fold(0usize, |g, &x| g.gcd(&x)).max(1);
    (k, m.iter().map(|x| x / k).collect())
}
