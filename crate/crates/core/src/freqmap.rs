//! Equilibrium measure of the band system, the frequency map and the
//! planar rotation number.

use crate::confocal::{interval_system, CausticSet, IntervalSystem};
use crate::error::{Error, Result};
use crate::linalg::{real_roots, solve, Matrix};
use crate::poly::Poly;
use crate::scalar::{Real, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureOptions {
    pub nodes: usize,
    pub max_nodes: usize,
    /// Stop doubling once successive results differ by less than this.
    pub tol: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions { nodes: 512, max_nodes: 1 << 16, tol: 1e-12 }
    }
}

/// Entries of `roots` other than one copy each of `lo` and `hi`.
fn others<'a, T: Scalar>(roots: &'a [T], lo: Option<&'a T>, hi: Option<&'a T>) -> impl Iterator<Item = &'a T> {
    let mut skip_lo = lo;
    let mut skip_hi = hi;
    roots.iter().filter(move |r| {
        if skip_lo.is_some_and(|x| *r == x) {
            skip_lo = None;
            return false;
        }
        if skip_hi.is_some_and(|x| *r == x) {
            skip_hi = None;
            return false;
        }
        true
    })
}

/// Fejér's first rule weights on the midpoint nodes `theta_k = (k+1/2) pi/N`.
fn fejer_weights<T: Real>(n: usize) -> Vec<T> {
    let pi = T::pi();
    let two = T::from_i64(2);
    (0..n)
        .map(|k| {
            let th = pi.clone() * T::from_ratio(2 * k as i64 + 1, 2 * n as i64);
            let c2 = (two.clone() * th).cos();
            // cos(2 j theta) by the Chebyshev recurrence
            let (mut prev, mut cur) = (T::one(), c2.clone());
            let mut sum = T::zero();
            for j in 1..=n / 2 {
                sum = sum + cur.clone() / T::from_i64(4 * (j * j) as i64 - 1);
                let next = two.clone() * c2.clone() * cur.clone() - prev;
                prev = cur;
                cur = next;
            }
            two.clone() / T::from_i64(n as i64) * (T::one() - two.clone() * sum)
        })
        .collect()
}

/// One evaluation of `int_lo^hi g(s) / sqrt|prod (s - r)| ds` with `n` nodes.
///
/// With both endpoints among the roots, `s = mid + h cos(theta)` removes
/// both inverse square roots and the midpoint rule is spectrally accurate.
/// A single singular endpoint is removed by `s = end -+ L v^2`, and smooth
/// integrands use Fejér's rule.
fn integrate_once<T: Real>(g: &dyn Fn(&T) -> T, roots: &[T], lo: &T, hi: &T, n: usize) -> T {
    let lo_sing = roots.contains(lo);
    let hi_sing = roots.contains(hi);
    let pi = T::pi();
    let two = T::from_i64(2);
    let len = hi.clone() - lo.clone();
    let rest = |s: &T, a: Option<&T>, b: Option<&T>| others(roots, a, b).fold(T::one(), |acc, r| acc * (s.clone() - r.clone()).abs());
    let theta = |k: usize| pi.clone() * T::from_ratio(2 * k as i64 + 1, 2 * n as i64);
    if lo_sing && hi_sing {
        let mid = (lo.clone() + hi.clone()) / two.clone();
        let h = len / two.clone();
        let sum = (0..n).fold(T::zero(), |acc, k| {
            let s = mid.clone() + h.clone() * theta(k).cos();
            acc + g(&s) / rest(&s, Some(lo), Some(hi)).sqrt()
        });
        return sum * pi / T::from_i64(n as i64);
    }
    let w = fejer_weights::<T>(n);
    (0..n).fold(T::zero(), |acc, k| {
        let u = theta(k).cos();
        let term = if lo_sing || hi_sing {
            // v = (1+u)/2 in [0,1]; ds = 2 L v dv cancels sqrt(L) v
            let v = (T::one() + u) / two.clone();
            let (s, end) = if lo_sing {
                (lo.clone() + len.clone() * v.clone() * v.clone(), lo)
            } else {
                (hi.clone() - len.clone() * v.clone() * v.clone(), hi)
            };
            len.clone().sqrt() * g(&s) / rest(&s, Some(end), None).sqrt()
        } else {
            let s = (lo.clone() + hi.clone() + len.clone() * u) / two.clone();
            len.clone() / two.clone() * g(&s) / rest(&s, None, None).sqrt()
        };
        acc + w[k].clone() * term
    })
}

/// Doubling wrapper around [`integrate_once`].
pub fn singular_integral<T: Real>(
    g: &dyn Fn(&T) -> T,
    roots: &[T],
    lo: &T,
    hi: &T,
    opts: &QuadratureOptions,
) -> T {
    if lo == hi {
        return T::zero();
    }
    let mut n = opts.nodes.max(2);
    let mut prev = integrate_once(g, roots, lo, hi, n);
    while n < opts.max_nodes {
        n *= 2;
        let cur = integrate_once(g, roots, lo, hi, n);
        let change = (cur.clone() - prev.clone()).abs().to_f64();
        prev = cur;
        if change <= opts.tol * prev.abs().to_f64().max(1.0) {
            break;
        }
    }
    prev
}

/// `int poly / sqrt|P_hat|` over band `j` (one-based).
pub fn band_integral<T: Real>(system: &IntervalSystem<T>, poly: &Poly<T>, band: usize, opts: &QuadratureOptions) -> T {
    let (lo, hi) = system.band(band);
    singular_integral(&|s: &T| poly.eval(s), system.endpoints(), &lo, &hi, opts)
}

/// `int poly / sqrt|P_hat|` over gap `j` (one-based, `j < d`).
pub fn gap_integral<T: Real>(system: &IntervalSystem<T>, poly: &Poly<T>, gap: usize, opts: &QuadratureOptions) -> T {
    let (lo, hi) = system.gap(gap);
    singular_integral(&|s: &T| poly.eval(s), system.endpoints(), &lo, &hi, opts)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThirdKind<T> {
    /// Monic of degree `d-1`.
    pub eta: Poly<T>,
    /// Gap integrals after solving (zero-width gaps report `eta(c)`).
    pub gap_residuals: Vec<f64>,
    /// Exactly one real root of `eta` in each closed gap.
    pub roots_in_gaps: bool,
}

/// Monic `eta` of degree `d-1` whose integrals against `1/sqrt|P_hat|` vanish
/// on every gap; a gap of zero width imposes `eta(c) = 0` instead.
pub fn third_kind_polynomial<T: Real>(system: &IntervalSystem<T>, opts: &QuadratureOptions) -> Result<ThirdKind<T>> {
    let d = system.dim();
    if d == 1 {
        return Ok(ThirdKind { eta: Poly::one(), gap_residuals: Vec::new(), roots_in_gaps: true });
    }
    let k = d - 1;
    let mut a: Matrix<T> = Matrix::zeros(k, k);
    let mut rhs = vec![T::zero(); k];
    for j in 1..=k {
        let (lo, hi) = system.gap(j);
        if lo == hi {
            let mut pw = T::one();
            for col in 0..k {
                a.set(j - 1, col, pw.clone());
                pw = pw * lo.clone();
            }
            rhs[j - 1] = -pw;
        } else {
            for col in 0..k {
                a.set(j - 1, col, gap_integral(system, &Poly::monomial(col), j, opts));
            }
            rhs[j - 1] = -gap_integral(system, &Poly::monomial(k), j, opts);
        }
    }
    let e = solve(&a, &rhs)?;
    let mut coeffs = e;
    coeffs.push(T::one());
    let eta = Poly::new(coeffs);
    let gap_residuals = (1..=k)
        .map(|j| {
            let (lo, hi) = system.gap(j);
            if lo == hi {
                eta.eval(&lo).abs().to_f64()
            } else {
                gap_integral(system, &eta, j, opts).abs().to_f64()
            }
        })
        .collect();
    let roots_in_gaps = match real_roots(&eta, 1e-6) {
        Ok(roots) => {
            let slack = 1e-8 * system.c(1).to_f64();
            (1..=k).all(|j| {
                let (lo, hi) = system.gap(j);
                let (lo, hi) = (lo.to_f64() - slack, hi.to_f64() + slack);
                roots.iter().filter(|r| (lo..=hi).contains(&r.to_f64())).count() == 1
            })
        }
        Err(_) => false,
    };
    Ok(ThirdKind { eta, gap_residuals, roots_in_gaps })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyVector<T> {
    /// `f_k = mu(band d) + ... + mu(band d-k+1)`.
    pub f: Vec<T>,
    /// `mu` per band, indexed from band 1 (rightmost).
    pub band_measures: Vec<T>,
    pub eta: Poly<T>,
    pub total_mass: T,
    pub gap_residuals: Vec<f64>,
    pub roots_in_gaps: bool,
}

impl<T: Real> FrequencyVector<T> {
    pub fn strictly_increasing(&self) -> bool {
        self.f.windows(2).all(|w| w[0] < w[1])
    }
}

/// Equilibrium band masses and the cumulative frequency vector.
pub fn frequency_of_system<T: Real>(system: &IntervalSystem<T>, opts: &QuadratureOptions) -> Result<FrequencyVector<T>> {
    let d = system.dim();
    let tk = third_kind_polynomial(system, opts)?;
    // cancel double points of P_hat against the forced roots of eta
    let mut eta = tk.eta.clone();
    let mut roots: Vec<T> = Vec::new();
    let c = system.endpoints();
    let mut i = 0;
    while i < c.len() {
        if i + 1 < c.len() && c[i] == c[i + 1] {
            eta = eta.div_rem(&Poly::linear(-c[i].clone(), T::one())).0;
            i += 2;
        } else {
            roots.push(c[i].clone());
            i += 1;
        }
    }
    let pi = T::pi();
    let band_measures: Vec<T> = (1..=d)
        .map(|j| {
            let (lo, hi) = system.band(j);
            singular_integral(&|s: &T| eta.eval(s), &roots, &lo, &hi, opts).abs() / pi.clone()
        })
        .collect();
    let mut f = Vec::with_capacity(d);
    let mut acc = T::zero();
    for j in (1..=d).rev() {
        acc = acc + band_measures[j - 1].clone();
        f.push(acc.clone());
    }
    Ok(FrequencyVector {
        total_mass: acc,
        f,
        band_measures,
        eta: tk.eta,
        gap_residuals: tk.gap_residuals,
        roots_in_gaps: tk.roots_in_gaps,
    })
}

/// Frequency vector of a caustic set.
pub fn frequency<T: Real>(caustics: &CausticSet<T>, opts: &QuadratureOptions) -> Result<FrequencyVector<T>> {
    frequency_of_system(&interval_system(caustics), opts)
}

/// Planar rotation number
/// `int_0^{min(b,l)} dt/sqrt|R| / (2 int_{max(b,l)}^a dt/sqrt|R|)` with
/// `R = (l-t)(b-t)(a-t)`; for negative `l` the first integral runs over `[l, 0]`.
pub fn rotation_number<T: Real>(a: &T, b: &T, lambda: &T, opts: &QuadratureOptions) -> Result<T> {
    if lambda.is_zero() || lambda == b {
        return Err(Error::DegenerateCaustic { alpha: lambda.to_f64(), index: if lambda.is_zero() { 0 } else { 1 } });
    }
    if lambda >= a || b >= a || *b <= T::zero() {
        return Err(Error::CausticOutOfRange(lambda.to_f64()));
    }
    let roots = vec![lambda.clone(), b.clone(), a.clone()];
    let one = |_: &T| T::one();
    let upper = T::min_of(b.clone(), lambda.clone());
    let num = if upper > T::zero() {
        singular_integral(&one, &roots, &T::zero(), &upper, opts)
    } else {
        singular_integral(&one, &roots, &upper, &T::zero(), opts)
    };
    let lower = T::max_of(b.clone(), lambda.clone());
    let den = singular_integral(&one, &roots, &lower, a, opts);
    Ok(num / (T::from_i64(2) * den))
}

/// Solve `f_k(theta) = targets[k]` for `k < targets.len()` by damped Newton
/// with a finite-difference Jacobian; `build` maps parameters to a system.
/// Steps leaving the open `bounds` are shortened.
pub fn invert_frequency(
    build: &dyn Fn(&[f64]) -> Result<IntervalSystem<f64>>,
    targets: &[f64],
    theta0: &[f64],
    bounds: &[(f64, f64)],
    opts: &QuadratureOptions,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let eval = |th: &[f64]| -> Result<Vec<f64>> {
        let f = frequency_of_system(&build(th)?, opts)?;
        Ok(targets.iter().enumerate().map(|(k, t)| f.f[k] - t).collect())
    };
    let mut th = theta0.to_vec();
    let mut r = eval(&th)?;
    let size = |r: &[f64]| r.iter().map(|x| x.abs()).fold(0.0, f64::max);
    for _ in 0..max_iter {
        if size(&r) < 1e-11 {
            return Ok(th);
        }
        let n = th.len();
        let mut jac: Matrix<f64> = Matrix::zeros(targets.len(), n);
        for j in 0..n {
            let h = 1e-7 * th[j].abs().max(1e-3);
            let mut tp = th.clone();
            tp[j] += h;
            let rp = eval(&tp)?;
            for i in 0..targets.len() {
                jac.set(i, j, (rp[i] - r[i]) / h);
            }
        }
        let dx = solve(&jac, &r.iter().map(|x| -x).collect::<Vec<_>>())?;
        let mut step = 1.0;
        let mut moved = false;
        while step > 1e-6 {
            let trial: Vec<f64> = th.iter().zip(&dx).map(|(a, b)| a + step * b).collect();
            let inside = trial.iter().zip(bounds).all(|(x, (lo, hi))| x > lo && x < hi);
            if !inside {
                step *= 0.5;
                continue;
            }
            if let Ok(rt) = eval(&trial) {
                if size(&rt) < size(&r) {
                    th = trial;
                    r = rt;
                    moved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    if size(&r) < 1e-6 {
        Ok(th)
    } else {
        Err(Error::NoConvergence(format!("frequency inversion stalled at {:e}", size(&r))))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InjectivityReport {
    pub points: usize,
    pub min_distance: f64,
    /// Pairs `(i, j, distance)` closer than the threshold.
    pub collisions: Vec<(usize, usize, f64)>,
    /// Grid points that share the type pattern of the first point.
    pub same_component: bool,
    /// Frequency vectors of the grid, as f64.
    pub images: Vec<Vec<f64>>,
}

/// Frequency map over a grid of caustic sets of one type pattern; reports
/// the closest pair of images.
pub fn injectivity_probe<T: Real>(
    grid: &[CausticSet<T>],
    threshold: f64,
    opts: &QuadratureOptions,
) -> Result<InjectivityReport> {
    let images: Vec<Vec<f64>> = grid
        .iter()
        .map(|c| frequency(c, opts).map(|f| f.f.iter().map(|x| x.to_f64()).collect()))
        .collect::<Result<_>>()?;
    let same_component = grid.iter().all(|c| c.kinds() == grid[0].kinds());
    let mut min_distance = f64::INFINITY;
    let mut collisions = Vec::new();
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            let dist = images[i].iter().zip(&images[j]).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
            min_distance = min_distance.min(dist);
            if dist < threshold {
                collisions.push((i, j, dist));
            }
        }
    }
    Ok(InjectivityReport { points: images.len(), min_distance, collisions, same_component, images })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotonicityReport {
    pub values: Vec<f64>,
    pub increasing_steps: usize,
    pub decreasing_steps: usize,
}

impl MonotonicityReport {
    pub fn monotone(&self) -> bool {
        self.increasing_steps == 0 || self.decreasing_steps == 0
    }
}

/// Finite-difference signs of the rotation number along increasing `lambdas`.
pub fn rotation_monotonicity<T: Real>(a: &T, b: &T, lambdas: &[T], opts: &QuadratureOptions) -> Result<MonotonicityReport> {
    let values: Vec<f64> = lambdas.iter().map(|l| rotation_number(a, b, l, opts).map(|r| r.to_f64())).collect::<Result<_>>()?;
    let increasing_steps = values.windows(2).filter(|w| w[1] > w[0]).count();
    let decreasing_steps = values.windows(2).filter(|w| w[1] < w[0]).count();
    Ok(MonotonicityReport { values, increasing_steps, decreasing_steps })
}

/// Convergent `p/q` of `x` with `q <= max_den` and `|x - p/q| <= tol`.
pub fn rational_fit(x: f64, max_den: u64, tol: f64) -> Option<(i64, u64)> {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let (h2, k2) = (a as i64 * h1 + h0, a as u64 * k1 + k0);
        if k2 > max_den {
            return None;
        }
        if (x - h2 as f64 / k2 as f64).abs() <= tol {
            return Some((h2, k2));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac.abs() < f64::EPSILON {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}
