//! Pell equation `p^2 - P q^2 = 1` on interval systems, alternance and
//! winding bookkeeping, and closed-form caustic constructions.

use num_integer::Integer;
use num_rational::BigRational;

use crate::confocal::{classify_caustics, interval_system, ConfocalFamily, IntervalSystem};
use crate::error::{Error, Result};
use crate::linalg::{complex_roots, real_roots, solve, Matrix};
use crate::literal::Surd;
use crate::poly::Poly;
use crate::scalar::{Real, Scalar};
use crate::series::{hankel_condition, pade_from_null, sqrt_series, RankOptions};

/// Polynomial pair `(p_hat, q_hat)` with `p_hat^2 - P_hat q_hat^2 = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PellSolution<T> {
    pub n: usize,
    pub d: usize,
    /// Degree `n`, `p_hat(0) = -1`.
    pub p: Poly<T>,
    /// Degree `n - d`, positive leading coefficient.
    pub q: Poly<T>,
    /// Constant `c` of `p^2 - Pol q^2 = c x^{2n}` before rescaling.
    pub constant: T,
    /// Largest coefficient of `p_hat^2 - P_hat q_hat^2 - 1`.
    pub residual: f64,
    /// Singular values of the Hankel window (float backends).
    pub singular_values: Vec<f64>,
}

impl<T: Scalar> PellSolution<T> {
    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U + Copy) -> PellSolution<U> {
        PellSolution {
            n: self.n,
            d: self.d,
            p: self.p.map(f),
            q: self.q.map(f),
            constant: f(&self.constant),
            residual: self.residual,
            singular_values: self.singular_values.clone(),
        }
    }
}

/// Coefficients of `p^2 - P q^2 - 1`.
pub fn pell_defect<T: Scalar>(p: &Poly<T>, q: &Poly<T>, phat: &Poly<T>) -> Poly<T> {
    &(&(p * p) - &(phat * &(q * q))) - &Poly::one()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PellOptions {
    pub rank: RankOptions,
    /// Use the smallest singular direction even when the window has full
    /// rank (approximate solutions for iterative refinement).
    pub force: bool,
}

impl PellOptions {
    pub fn for_backend<T: Scalar>() -> Self {
        PellOptions { rank: RankOptions::for_backend::<T>(), force: false }
    }
}

/// Solve the Pell equation of degree `n` on `system` through the Hankel
/// null space of the normalized square-root series.
pub fn pell_solve<T: Scalar>(system: &IntervalSystem<T>, n: usize, opts: &PellOptions) -> Result<PellSolution<T>> {
    let d = system.dim();
    if n < d {
        return Err(Error::PeriodTooSmall { n, d });
    }
    let pol = system.normalized_pol();
    let series = sqrt_series(&pol, 2 * n + 2, None, true)?;
    let report = hankel_condition(&series, n, d, &opts.rank)?;
    let h = if report.satisfied {
        if report.ill_conditioned && !opts.force {
            let sv = &report.singular_values;
            let k = sv.len();
            return Err(Error::IllConditioned { smallest: sv[k - 1], second: sv[k.saturating_sub(2)] });
        }
        report.null_vector.clone().expect("null vector")
    } else if opts.force {
        report.smallest_direction.clone().ok_or(Error::NoSolution { n, rows: n - 1, cols: n - d + 1 })?
    } else {
        return Err(Error::NoSolution { n, rows: n - 1, cols: n - d + 1 });
    };
    let pair = pade_from_null(&series, n, d, &h);
    let pn = pair.p.coeff(n);
    if pn.is_zero() {
        return Err(Error::NoSolution { n, rows: n - 1, cols: n - d + 1 });
    }
    let scale = pn.abs();
    let mut p = pair.p.reversed(n).scale(&(T::one() / scale.clone()));
    let mut q = pair.q.reversed(n - d).scale(&(T::one() / scale));
    if p.coeff(0) > T::zero() {
        p = -&p;
    }
    if q.leading() < T::zero() {
        q = -&q;
    }
    let residual = pell_defect(&p, &q, &system.phat()).max_abs_coeff();
    Ok(PellSolution { n, d, p, q, constant: pn.clone() * pn, residual, singular_values: report.singular_values })
}

/// Winding numbers, signature and elliptic data read off a Pell solution.
#[derive(Clone, Debug, PartialEq)]
pub struct WindingData {
    /// `m_0..m_{d-1}`.
    pub m: Vec<usize>,
    /// `tau_1..tau_d`: zeros of `q_hat` inside each band.
    pub tau: Vec<usize>,
    /// Alternance points contributed by band `j`, i.e. `m_{j-1} - m_j`.
    pub band_counts: Vec<usize>,
    /// Size of the maximal alternance set (`n + 1`).
    pub alternance_total: usize,
    pub k: usize,
    pub elliptic_period: usize,
    /// `m / k`.
    pub reduced: Vec<usize>,
    /// Real parts of the `q_hat` zeros, ascending.
    pub q_roots: Vec<f64>,
    /// Largest imaginary part among the `q_hat` zeros.
    pub max_imag: f64,
    /// `m_{j-1} = m_j + tau_j + 1` for all `j`, with `m_d = 0`.
    pub law_holds: bool,
    pub strictly_decreasing: bool,
}

fn sign_runs(signs: &[i32]) -> usize {
    if signs.is_empty() {
        return 0;
    }
    1 + signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Count alternance points of `p_hat` on `[0, c_{2j+1}]` to obtain `m_j`,
/// and the `q_hat` zeros per band to obtain `tau`.
pub fn analyze_alternance<T: Real>(sol: &PellSolution<T>, system: &IntervalSystem<T>) -> Result<WindingData> {
    let d = system.dim();
    let imag_tol = T::vanishing_threshold();
    let (q_roots, max_imag) = if sol.q.degree() >= 1 {
        let cz = complex_roots(&sol.q);
        let max_imag = cz.iter().map(|z| z.im.to_f64().abs()).fold(0.0, f64::max);
        (real_roots(&sol.q, imag_tol)?, max_imag)
    } else {
        (Vec::new(), 0.0)
    };
    let mut pts: Vec<T> = system.endpoints().to_vec();
    pts.extend(q_roots.iter().cloned());
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let signs: Vec<(T, i32)> = pts
        .into_iter()
        .map(|x| {
            let v = sol.p.eval(&x);
            (x, if v > T::zero() { 1 } else { -1 })
        })
        .collect();
    let slack = T::one() + T::from_f64(1e3) * T::epsilon();
    let m: Vec<usize> = (0..d)
        .map(|j| {
            let lim = system.c(2 * j + 1) * slack.clone();
            let sub: Vec<i32> = signs.iter().filter(|(x, _)| *x <= lim).map(|(_, s)| *s).collect();
            sign_runs(&sub).saturating_sub(1)
        })
        .collect();
    let tau: Vec<usize> = (1..=d)
        .map(|j| {
            let (lo, hi) = system.band(j);
            q_roots.iter().filter(|r| **r > lo && **r < hi).count()
        })
        .collect();
    let mut ext = m.clone();
    ext.push(0);
    let band_counts: Vec<usize> = (1..=d).map(|j| ext[j - 1].saturating_sub(ext[j])).collect();
    let law_holds = (1..=d).all(|j| ext[j - 1] == ext[j] + tau[j - 1] + 1);
    let strictly_decreasing = ext.windows(2).all(|w| w[0] > w[1]);
    let k = m.iter().fold(0usize, |g, &x| g.gcd(&x)).max(1);
    let all: Vec<i32> = signs.iter().map(|(_, s)| *s).collect();
    Ok(WindingData {
        alternance_total: sign_runs(&all),
        elliptic_period: m[0] / k,
        reduced: m.iter().map(|x| x / k).collect(),
        k,
        q_roots: q_roots.iter().map(|r| r.to_f64()).collect(),
        max_imag,
        law_holds,
        strictly_decreasing,
        m,
        tau,
        band_counts,
    })
}

/// Extremes of `|p_hat|` sampled on the bands and gaps.
#[derive(Clone, Debug, PartialEq)]
pub struct Equioscillation {
    /// `max |p_hat| - 1` over band samples (should be `<= 0`).
    pub band_excess: f64,
    /// `min |p_hat| - 1` over gap samples (should be `>= 0`).
    pub gap_deficit: f64,
}

pub fn equioscillation<T: Real>(sol: &PellSolution<T>, system: &IntervalSystem<T>, samples: usize) -> Equioscillation {
    let scan = |lo: T, hi: T| -> Vec<T> {
        (0..samples)
            .map(|i| {
                let t = T::from_ratio(i as i64, (samples.max(2) - 1) as i64);
                let v = sol.p.eval(&(lo.clone() + (hi.clone() - lo.clone()) * t));
                v.abs() - T::one()
            })
            .collect()
    };
    let band_excess = system
        .bands()
        .into_iter()
        .flat_map(|(lo, hi)| scan(lo, hi))
        .map(|v| v.to_f64())
        .fold(f64::NEG_INFINITY, f64::max);
    let gap_deficit = system
        .gaps()
        .into_iter()
        .filter(|(lo, hi)| lo < hi)
        .flat_map(|(lo, hi)| {
            // open interval: skip the endpoints
            let h = (hi.clone() - lo.clone()) / T::from_i64(samples as i64 + 1);
            (1..=samples)
                .map(|i| sol.p.eval(&(lo.clone() + h.clone() * T::from_i64(i as i64))).abs() - T::one())
                .collect::<Vec<_>>()
        })
        .map(|v| v.to_f64())
        .fold(f64::INFINITY, f64::min);
    Equioscillation { band_excess, gap_deficit }
}

/// Whether the caustic parameters have the type pattern required for a
/// `(d+1)`-periodic trajectory: for even `d`, `alpha_1` in `(0,a_1)` and
/// the pairs `alpha_j, alpha_{j+1}` in `(a_j, a_{j+1})` for even `j`; for odd
/// `d`, the pairs for odd `j`.
pub fn d_plus_1_pattern<T: Scalar>(family: &ConfocalFamily<T>, alpha: &[T]) -> bool {
    let a = family.a();
    let d = family.dim();
    if alpha.len() != d - 1 {
        return false;
    }
    let inside = |x: &T, lo: T, hi: &T| *x > lo && x < hi;
    let mut ok = true;
    let start = if d.is_multiple_of(2) {
        ok &= inside(&alpha[0], T::zero(), &a[0]);
        2
    } else {
        1
    };
    let mut j = start;
    while j < d - 1 {
        // one-based alpha_j, alpha_{j+1} in (a_j, a_{j+1})
        ok &= inside(&alpha[j - 1], a[j - 1].clone(), &a[j]);
        ok &= inside(&alpha[j], a[j - 1].clone(), &a[j]);
        j += 2;
    }
    ok
}

/// Output of the `(d+1)`-periodic caustic construction.
#[derive(Clone, Debug, PartialEq)]
pub struct DPlusOne<T> {
    /// Critical point of `r(s) = s prod(s - 1/a_j)` in `(0, 1/a_d)`.
    pub gamma: T,
    /// Caustic parameters, ascending (empty if some root is non-real).
    pub alpha: Vec<T>,
    pub admissible: bool,
    pub p: Poly<T>,
    pub q: Poly<T>,
}

/// `r(s) = s prod(s - 1/a_j)`.
pub fn r_poly<T: Scalar>(family: &ConfocalFamily<T>) -> Poly<T> {
    let mut roots = vec![T::zero()];
    roots.extend(family.a().iter().map(|a| T::one() / a.clone()));
    Poly::from_roots(&roots)
}

/// Root of `f` in `(lo, hi)` where `f(lo)` and `f(hi)` differ in sign, by
/// Newton steps kept inside a shrinking bracket.
pub fn bracketed_newton<T: Real>(f: &Poly<T>, lo: T, hi: T) -> T {
    let df = f.derivative();
    let (mut lo, mut hi) = (lo, hi);
    let flo_neg = f.eval(&lo) < T::zero();
    let mut x = (lo.clone() + hi.clone()) / T::from_i64(2);
    let tol = T::epsilon() * T::from_i64(8);
    for _ in 0..2000 {
        let fx = f.eval(&x);
        if fx.is_zero() {
            return x;
        }
        if (fx < T::zero()) == flo_neg {
            lo = x.clone();
        } else {
            hi = x.clone();
        }
        let dfx = df.eval(&x);
        let mut next = if dfx.is_zero() { None } else { Some(x.clone() - fx / dfx) };
        if let Some(n) = &next {
            if *n <= lo || *n >= hi {
                next = None;
            }
        }
        let next = next.unwrap_or_else(|| (lo.clone() + hi.clone()) / T::from_i64(2));
        let step = (next.clone() - x.clone()).abs();
        x = next;
        if step <= tol.clone() * x.abs() || (hi.clone() - lo.clone()) <= tol.clone() * x.abs() {
            break;
        }
    }
    x
}

/// Construct the unique caustics with winding `(d+1, d, ..., 2)`.
pub fn find_caustics_d_plus_1<T: Real>(family: &ConfocalFamily<T>) -> DPlusOne<T> {
    let d = family.dim();
    let r = r_poly(family);
    let dr = r.derivative();
    let gamma = bracketed_newton(&dr, T::zero(), T::one() / family.a()[d - 1].clone());
    let rg = r.eval(&gamma);
    let two = T::from_i64(2);
    let p = &r.scale(&(two.clone() / rg.clone())) - &Poly::one();
    let q = Poly::linear(-gamma.clone(), T::one()).scale(&(two / rg.clone()).abs());
    let shifted = &r - &Poly::constant(rg);
    let sq = Poly::from_roots(&[gamma.clone(), gamma.clone()]);
    let (rest, _) = shifted.div_rem(&sq);
    let roots = match real_roots(&rest, T::vanishing_threshold().max(1e-12)) {
        Ok(r) => r,
        Err(_) => return DPlusOne { gamma, alpha: Vec::new(), admissible: false, p, q },
    };
    if roots.iter().any(|s| *s <= T::zero()) {
        return DPlusOne { gamma, alpha: Vec::new(), admissible: false, p, q };
    }
    let mut alpha: Vec<T> = roots.iter().map(|s| T::one() / s.clone()).collect();
    alpha.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let admissible = d_plus_1_pattern(family, &alpha) && classify_caustics(family, &alpha).is_ok();
    DPlusOne { gamma, alpha, admissible, p, q }
}

/// Boundary and double-caustic parameters of the 4-periodic generatrix
/// trajectories: `a_1 = a_2 a_3/(a_2+a_3)`, `alpha = a_2+a_3-sqrt(a_2^2+a_3^2)`.
pub fn hyperboloid_4periodic<T: Real>(a2: &T, a3: &T) -> (T, T) {
    let a1 = a2.clone() * a3.clone() / (a2.clone() + a3.clone());
    let alpha = a2.clone() + a3.clone() - (a2.clone() * a2.clone() + a3.clone() * a3.clone()).sqrt();
    (a1, alpha)
}

/// Exact form of [`hyperboloid_4periodic`] for rational inputs.
pub fn hyperboloid_4periodic_exact(a2: &BigRational, a3: &BigRational) -> (BigRational, Surd) {
    let a1 = a2 * a3 / (a2 + a3);
    let root = Surd::sqrt_of(&(a2 * a2 + a3 * a3)).expect("sum of squares is non-negative");
    let alpha = Surd::rational(a2 + a3).sub(&root).expect("single radicand");
    (a1, alpha)
}

/// Ellipsoid `Q_lambda` of a 3-dimensional family bounding a 4-periodic
/// generatrix billiard, with its hyperboloid caustic in the original
/// parametrization.
#[derive(Clone, Debug, PartialEq)]
pub struct UniquePair<T> {
    pub lambda: T,
    pub alpha: T,
    /// Semi-axes squared of `Q_lambda`.
    pub shifted: Vec<T>,
}

pub fn unique_pair_in_family<T: Real>(family: &ConfocalFamily<T>) -> Result<UniquePair<T>> {
    if family.dim() != 3 {
        return Err(Error::InvalidFamily("the ellipsoid-hyperboloid pair is defined for d = 3".into()));
    }
    let a = family.a();
    let lambda = a[0].clone() - ((a[2].clone() - a[0].clone()) * (a[1].clone() - a[0].clone())).sqrt();
    let shifted: Vec<T> = a.iter().map(|x| x.clone() - lambda.clone()).collect();
    let (_, alpha_shifted) = hyperboloid_4periodic(&shifted[1], &shifted[2]);
    Ok(UniquePair { alpha: alpha_shifted + lambda.clone(), lambda, shifted })
}

/// Source of a nonzero endpoint `b` of a parametrized interval system.
#[derive(Clone, Debug, PartialEq)]
pub enum EndpointSpec<T> {
    Fixed(T),
    /// `b = theta_i`.
    Param(usize),
}

/// Pell equation of degree `n` on a system whose endpoints depend on
/// unknown parameters; `d - 1` free parameters make the system square.
#[derive(Clone, Debug, PartialEq)]
pub struct PellProblem<T> {
    pub endpoints: Vec<EndpointSpec<T>>,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamSolution<T> {
    pub theta: Vec<T>,
    pub system: IntervalSystem<T>,
    pub solution: PellSolution<T>,
    pub iterations: usize,
}

impl<T: Real> PellProblem<T> {
    pub fn dim(&self) -> usize {
        self.endpoints.len().div_ceil(2)
    }

    pub fn param_count(&self) -> usize {
        self.endpoints
            .iter()
            .filter_map(|e| match e {
                EndpointSpec::Param(i) => Some(i + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    fn b_values(&self, theta: &[T]) -> Vec<T> {
        self.endpoints
            .iter()
            .map(|e| match e {
                EndpointSpec::Fixed(v) => v.clone(),
                EndpointSpec::Param(i) => theta[*i].clone(),
            })
            .collect()
    }

    pub fn system(&self, theta: &[T]) -> Result<IntervalSystem<T>> {
        IntervalSystem::from_endpoints(self.b_values(theta).into_iter().map(|b| T::one() / b).collect())
    }

    /// Newton iteration on the coefficients of `p^2 - P q^2 - 1` in the
    /// unknowns `(p_hat, q_hat, theta)`, seeded from the nearest
    /// approximate Pell pair at `theta0`.
    pub fn solve(&self, theta0: &[T], max_iter: usize) -> Result<ParamSolution<T>> {
        let d = self.dim();
        let n = self.n;
        let np = self.param_count();
        if np != d - 1 || theta0.len() != np {
            return Err(Error::InvalidFamily(format!("expected {} free parameters, got {}", d - 1, np)));
        }
        let opts = PellOptions { rank: RankOptions::for_backend::<T>(), force: true };
        let seed = pell_solve(&self.system(theta0)?, n, &opts)?;
        let (lp, lq) = (n + 1, n - d + 1);
        let mut x: Vec<T> = seed.p.coeffs().to_vec();
        x.resize(lp, T::zero());
        let mut qc = seed.q.coeffs().to_vec();
        qc.resize(lq, T::zero());
        x.extend(qc);
        x.extend(theta0.iter().cloned());
        let unknowns = x.len();
        let target = T::epsilon().to_f64().powf(0.85);
        let mut best = f64::INFINITY;
        let mut iterations = 0;
        for it in 0..max_iter {
            iterations = it;
            let (p, q, th) = self.split(&x, lp, lq);
            let phat = self.system(&th)?.phat();
            let res = pell_defect(&p, &q, &phat);
            let norm = res.max_abs_coeff();
            if norm < target {
                break;
            }
            if it > 5 && norm >= best * 0.5 && norm < target.sqrt() {
                break;
            }
            best = best.min(norm);
            let jac = self.jacobian(&p, &q, &th, &phat, lp, lq);
            let rhs: Vec<T> = (0..unknowns).map(|k| -res.coeff(k)).collect();
            let dx = solve(&jac, &rhs)?;
            // full Newton steps, halved only to keep the parameters positive
            let mut step = T::one();
            let mut accepted = false;
            for _ in 0..30 {
                let trial: Vec<T> = x.iter().zip(&dx).map(|(a, b)| a.clone() + step.clone() * b.clone()).collect();
                let (_, _, tt) = self.split(&trial, lp, lq);
                if tt.iter().all(|t| *t > T::zero()) && self.system(&tt).is_ok() {
                    x = trial;
                    accepted = true;
                    break;
                }
                step = step / T::from_i64(2);
            }
            if !accepted {
                return Err(Error::NoConvergence(format!("Newton step left the parameter domain at residual {norm:e}")));
            }
        }
        let (mut p, mut q, theta) = self.split(&x, lp, lq);
        let system = self.system(&theta)?;
        if p.coeff(0) > T::zero() {
            p = -&p;
        }
        if q.leading() < T::zero() {
            q = -&q;
        }
        let residual = pell_defect(&p, &q, &system.phat()).max_abs_coeff();
        if !(residual < target.sqrt()) {
            return Err(Error::NoConvergence(format!("residual {residual:e}")));
        }
        let solution = PellSolution { n, d, p, q, constant: T::one(), residual, singular_values: Vec::new() };
        Ok(ParamSolution { theta, system, solution, iterations })
    }

    fn split(&self, x: &[T], lp: usize, lq: usize) -> (Poly<T>, Poly<T>, Vec<T>) {
        (Poly::new(x[..lp].to_vec()), Poly::new(x[lp..lp + lq].to_vec()), x[lp + lq..].to_vec())
    }

    fn jacobian(&self, p: &Poly<T>, q: &Poly<T>, theta: &[T], phat: &Poly<T>, lp: usize, lq: usize) -> Matrix<T> {
        let rows = 2 * self.n + 1;
        let cols = lp + lq + theta.len();
        let mut jac: Matrix<T> = Matrix::zeros(rows, cols);
        let two = T::from_i64(2);
        let pq = &phat.scale(&two) * q;
        for k in 0..lp {
            for (i, c) in p.coeffs().iter().enumerate() {
                if i + k < rows {
                    let v = jac.get(i + k, k).clone() + two.clone() * c.clone();
                    jac.set(i + k, k, v);
                }
            }
        }
        for k in 0..lq {
            for (i, c) in pq.coeffs().iter().enumerate() {
                if i + k < rows {
                    let v = jac.get(i + k, lp + k).clone() - c.clone();
                    jac.set(i + k, lp + k, v);
                }
            }
        }
        let q2 = q * q;
        for spec in &self.endpoints {
            if let EndpointSpec::Param(i) = spec {
                let th = theta[*i].clone();
                let c = T::one() / th.clone();
                // dP/dc = -P/(s-c); dc/dtheta = -1/theta^2
                let (quot, _) = phat.div_rem(&Poly::linear(-c, T::one()));
                let dphat = quot.scale(&(T::one() / (th.clone() * th)));
                let col = &dphat * &q2;
                for (row, v) in col.coeffs().iter().enumerate() {
                    if row < rows {
                        let cur = jac.get(row, lp + lq + i).clone() - v.clone();
                        jac.set(row, lp + lq + i, cur);
                    }
                }
            }
        }
        jac
    }
}

/// Interval system of a family with caustics.
pub fn system_of<T: Scalar>(family: &ConfocalFamily<T>, alpha: &[T]) -> Result<IntervalSystem<T>> {
    Ok(interval_system(&classify_caustics(family, alpha)?))
}
