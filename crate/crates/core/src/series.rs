//! Truncated square-root series, the Hankel windows built from them and
//! the associated Padé-type pair.

use crate::error::{Error, Result};
use crate::linalg::{rank_report_with_reference, Matrix, RankReport};
use crate::poly::Poly;
use crate::scalar::{Real, Scalar};

/// Taylor coefficients `C_0..C_N` of `sqrt(P)/D`.
///
/// In normalized form the stored series is `sqrt(P/P(0)) * D(0)/D`, so
/// `C_0 = 1`, and the true series is `sqrt(factor)` times it with
/// `factor = P(0)/D(0)^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries<T> {
    coeffs: Vec<T>,
    factor: T,
    normalized: bool,
}

impl<T: Scalar> PowerSeries<T> {
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `P(0)/D(0)^2`; its square root multiplies a normalized series.
    pub fn factor(&self) -> &T {
        &self.factor
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Multiply the coefficients by `t` (the record is unchanged).
    pub fn scaled(&self, t: &T) -> Self {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|c| c.clone() * t.clone()).collect(),
            factor: self.factor.clone(),
            normalized: self.normalized,
        }
    }

    pub fn as_poly(&self) -> Poly<T> {
        Poly::new(self.coeffs.clone())
    }

    /// Actual coefficients of `sqrt(P)/D`; fails for exact backends when
    /// `factor` is not a perfect square.
    pub fn denormalized(&self) -> Result<Self> {
        if !self.normalized {
            return Ok(self.clone());
        }
        let r = self.factor.try_sqrt().ok_or(Error::IrrationalConstant)?;
        Ok(PowerSeries {
            coeffs: self.coeffs.iter().map(|c| c.clone() * r.clone()).collect(),
            factor: self.factor.clone(),
            normalized: false,
        })
    }
}

/// Series of `sqrt(P)` divided by an optional polynomial, to order `order`.
pub fn sqrt_series<T: Scalar>(
    p: &Poly<T>,
    order: usize,
    divisor: Option<&Poly<T>>,
    normalized: bool,
) -> Result<PowerSeries<T>> {
    let p0 = p.coeff(0);
    if p0 <= T::zero() {
        return Err(Error::NonPositiveConstantTerm);
    }
    let mut s = vec![T::one()];
    let two = T::from_i64(2);
    for n in 1..=order {
        let conv = (1..n).fold(T::zero(), |acc, k| acc + s[k].clone() * s[n - k].clone());
        s.push((p.coeff(n) / p0.clone() - conv) / two.clone());
    }
    let mut factor = p0;
    if let Some(div) = divisor {
        let d0 = div.coeff(0);
        if d0.is_zero() {
            return Err(Error::InvalidFamily("divisor vanishes at the origin".into()));
        }
        // multiply by d0/D, solving D*y = d0*s term by term
        let mut y: Vec<T> = Vec::with_capacity(order + 1);
        for n in 0..=order {
            let acc = (1..=n.min(div.degree())).fold(s[n].clone() * d0.clone(), |acc, k| {
                acc - div.coeff(k) * y[n - k].clone()
            });
            y.push(acc / d0.clone());
        }
        s = y;
        factor = factor / (d0.clone() * d0);
    }
    let series = PowerSeries { coeffs: s, factor, normalized: true };
    if normalized {
        Ok(series)
    } else {
        series.denormalized()
    }
}

/// Rank tolerances for the float backends.
#[derive(Clone, Debug, PartialEq)]
pub struct RankOptions {
    /// Singular values below `rel_tol * sigma_max` count as zero.
    pub rel_tol: f64,
    /// Null space is ambiguous when the second-smallest singular value is
    /// within this factor of the smallest.
    pub ill_ratio: f64,
    /// Geometric scale `t` applied as `C_k -> t^k C_k`; estimated from the
    /// series when `None`.
    pub scale: Option<f64>,
}

impl RankOptions {
    pub fn for_backend<T: Scalar>() -> Self {
        RankOptions { rel_tol: T::vanishing_threshold(), ill_ratio: 1e6, scale: None }
    }

    pub fn with_threshold_exp(mut self, exp: i32) -> Self {
        self.rel_tol = 10f64.powi(-exp.abs());
        self
    }
}

/// Reciprocal growth rate `1/limsup |C_k|^{1/k}` estimated from the tail.
pub fn growth_scale<T: Scalar>(series: &PowerSeries<T>) -> f64 {
    let rate = series
        .coeffs
        .iter()
        .enumerate()
        .skip(1)
        .filter_map(|(k, c)| {
            let v = c.abs().to_f64();
            (v > 0.0 && v.is_finite()).then(|| v.ln() / k as f64)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    if rate.is_finite() {
        (-rate).exp()
    } else {
        1.0
    }
}

/// The `(m-1) x (m-d+1)` window (`m >= d`) with entries `C_{d+1+i+j}`.
pub fn hankel_matrix<T: Scalar>(series: &PowerSeries<T>, m: usize, d: usize) -> Result<Matrix<T>> {
    check_window(series, m, d)?;
    Ok(Matrix::from_fn(m - 1, m - d + 1, |i, j| series.coeff(d + 1 + i + j)))
}

fn check_window<T: Scalar>(series: &PowerSeries<T>, m: usize, d: usize) -> Result<()> {
    if m < d || m < 1 {
        return Err(Error::PeriodTooSmall { n: m, d });
    }
    let need = 2 * m - 1;
    if series.order() < need {
        return Err(Error::InsufficientOrder { have: series.order() + 1, need: need + 1 });
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct HankelReport<T> {
    pub rank: usize,
    pub cols: usize,
    pub satisfied: bool,
    /// Singular values of the scaled window (float backends).
    pub singular_values: Vec<f64>,
    /// Null vector in the original (unscaled) coordinates.
    pub null_vector: Option<Vec<T>>,
    /// Direction of the smallest singular value, unscaled.
    pub smallest_direction: Option<Vec<T>>,
    pub ill_conditioned: bool,
    pub scale: f64,
}

/// Condition `C(m,d)`: the window has rank below `m-d+1`.
pub fn hankel_condition<T: Scalar>(
    series: &PowerSeries<T>,
    m: usize,
    d: usize,
    opts: &RankOptions,
) -> Result<HankelReport<T>> {
    check_window(series, m, d)?;
    window_condition(series, m - 1, m - d + 1, d + 1, opts)
}

/// Rank test on the Hankel window `C_{offset+i+j}` of the given shape,
/// after the geometric rescaling `C_k -> t^k C_k`. A window that is
/// negligible against the rescaled series counts as null.
pub fn window_condition<T: Scalar>(
    series: &PowerSeries<T>,
    rows: usize,
    cols: usize,
    offset: usize,
    opts: &RankOptions,
) -> Result<HankelReport<T>> {
    let top = offset + rows + cols - 2;
    if rows > 0 && series.order() < top {
        return Err(Error::InsufficientOrder { have: series.order() + 1, need: top + 1 });
    }
    let t = if T::EXACT { 1.0 } else { opts.scale.unwrap_or_else(|| growth_scale(series)) };
    let tt = T::from_f64(t);
    let pw: Vec<T> = (0..=top.max(cols))
        .scan(T::one(), |acc, _| {
            let cur = acc.clone();
            *acc = acc.clone() * tt.clone();
            Some(cur)
        })
        .collect();
    let h = Matrix::from_fn(rows, cols, |i, j| {
        let k = offset + i + j;
        if T::EXACT {
            series.coeff(k)
        } else {
            series.coeff(k) * pw[k].clone()
        }
    });
    let unscale = |v: Vec<T>| -> Vec<T> {
        if T::EXACT {
            v
        } else {
            v.into_iter().enumerate().map(|(j, x)| x * pw[j].clone()).collect()
        }
    };
    let zero_window = (0..rows).all(|i| (0..cols).all(|j| h.get(i, j).is_zero()));
    let report: RankReport<T> = if zero_window {
        let mut e = vec![T::zero(); cols];
        e[0] = T::one();
        RankReport {
            rank: 0,
            cols,
            singular_values: vec![0.0; cols],
            null_vector: Some(e.clone()),
            smallest_direction: Some(e),
            nullity: cols,
            ill_conditioned: false,
        }
    } else {
        let reference = (0..=top)
            .map(|k| (series.coeff(k) * pw[k].clone()).abs().to_f64())
            .fold(0.0, f64::max);
        rank_report_with_reference(&h, opts.rel_tol, opts.ill_ratio, reference)
    };
    Ok(HankelReport {
        rank: report.rank,
        cols,
        satisfied: report.rank < cols,
        singular_values: report.singular_values,
        null_vector: report.null_vector.map(unscale),
        smallest_direction: report.smallest_direction.map(unscale),
        ill_conditioned: report.ill_conditioned && !zero_window,
        scale: t,
    })
}

/// Polynomials `p` (degree `m`) and `q` (degree `m-d`) with
/// `p + q * series = O(x^{2m})`.
#[derive(Clone, Debug, PartialEq)]
pub struct PadePair<T> {
    pub p: Poly<T>,
    pub q: Poly<T>,
}

/// Build the pair from a null vector `h` of the window: `q_j = h_{m-d-j}`,
/// `p = -(q * series)` truncated to degree `m`. When the whole window
/// vanishes, `q = 1`.
pub fn pade_from_null<T: Scalar>(series: &PowerSeries<T>, m: usize, d: usize, h: &[T]) -> PadePair<T> {
    let k = m - d;
    let q = Poly::new((0..=k).map(|j| h[k - j].clone()).collect());
    let prod = &q * &Poly::new(series.coeffs[..=m].to_vec());
    PadePair { p: -&prod.truncate(m), q }
}

/// Padé-type pair when `C(m,d)` holds, otherwise `None`.
pub fn pade_sqrt<T: Scalar>(
    series: &PowerSeries<T>,
    m: usize,
    d: usize,
    opts: &RankOptions,
) -> Result<Option<PadePair<T>>> {
    let report = hankel_condition(series, m, d, opts)?;
    if !report.satisfied {
        return Ok(None);
    }
    if report.ill_conditioned {
        let sv = &report.singular_values;
        let n = sv.len();
        return Err(Error::IllConditioned { smallest: sv[n - 1], second: sv[n.saturating_sub(2)] });
    }
    let h = report.null_vector.expect("rank-deficient window has a null vector");
    Ok(Some(pade_from_null(series, m, d, &h)))
}

/// Coefficients of `p^2 - P q^2` for a pair built on the series of
/// `sqrt(P)` (normalized: `P` divided by `P(0)`).
pub fn pade_defect<T: Scalar>(pair: &PadePair<T>, pol: &Poly<T>) -> Poly<T> {
    &(&pair.p * &pair.p) - &(pol * &(&pair.q * &pair.q))
}

/// Hankel determinant `H_{k,l} = det(C_{k-l+1+i+j})`, `0 <= i,j < l`,
/// with `C_j = 0` for negative `j`.
pub fn halphen_determinant<T: Scalar>(series: &PowerSeries<T>, k: usize, l: usize) -> T {
    if l == 0 {
        return T::one();
    }
    let a = Matrix::from_fn(l, l, |i, j| {
        let idx = k as i64 - l as i64 + 1 + (i + j) as i64;
        if idx < 0 {
            T::zero()
        } else {
            series.coeff(idx as usize)
        }
    });
    crate::linalg::determinant(&a)
}

/// Normality diagnostic `H_{k,l} H_{k,l+1} H_{k+1,l} != 0` at the float
/// threshold of the backend.
pub fn halphen_normal<T: Real>(series: &PowerSeries<T>, k: usize, l: usize) -> bool {
    let tol = T::vanishing_threshold();
    [(k, l), (k, l + 1), (k + 1, l)].iter().all(|&(kk, ll)| {
        let v = halphen_determinant(series, kk, ll).abs().to_f64();
        v > tol
    })
}
