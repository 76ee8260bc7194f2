//! Confocal families, caustic classification, Jacobi coordinates and the
//! interval systems built from them.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::real_roots;
use crate::poly::Poly;
use crate::scalar::{Real, Scalar};

/// Default relative tolerance for `alpha == a_k` on float inputs.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Ellipsoid `sum x_i^2 / a_i = 1` with its confocal pencil.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfocalFamily<T> {
    a: Vec<T>,
}

impl<T: Scalar> ConfocalFamily<T> {
    /// Requires `d >= 2` and `0 < a_1 < ... < a_d`.
    pub fn new(a: Vec<T>) -> Result<Self> {
        if a.len() < 2 {
            return Err(Error::InvalidFamily(format!("dimension {} is below 2", a.len())));
        }
        if a[0] <= T::zero() {
            return Err(Error::InvalidFamily("semi-axes must be positive".into()));
        }
        if a.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidFamily("semi-axes must be strictly increasing".into()));
        }
        Ok(ConfocalFamily { a })
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[T] {
        &self.a
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> ConfocalFamily<U> {
        ConfocalFamily { a: self.a.iter().map(f).collect() }
    }

    /// `sum x_i^2 / (a_i - lambda)`, the quadratic form of `Q_lambda`.
    pub fn quadric_form(&self, x: &[T], lambda: &T) -> T {
        self.a
            .iter()
            .zip(x)
            .fold(T::zero(), |acc, (ai, xi)| acc + xi.clone() * xi.clone() / (ai.clone() - lambda.clone()))
    }

    /// `sum x_i^2 / a_i - 1`.
    pub fn boundary_residual(&self, x: &[T]) -> T {
        self.quadric_form(x, &T::zero()) - T::one()
    }
}

/// Quadric type of a caustic `Q_alpha`, by the open interval containing alpha.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CausticKind {
    /// `alpha` in `(0, a_1)`.
    Ellipsoid,
    /// `alpha` in `(a_k, a_{k+1})`; `k` axes have negative denominators.
    Hyperboloid { index: usize },
}

impl CausticKind {
    /// 0 for `(0, a_1)`, `k` for `(a_k, a_{k+1})`.
    pub fn interval(&self) -> usize {
        match self {
            CausticKind::Ellipsoid => 0,
            CausticKind::Hyperboloid { index } => *index,
        }
    }
}

impl fmt::Display for CausticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CausticKind::Ellipsoid => write!(f, "ellipsoid"),
            CausticKind::Hyperboloid { index: 1 } => write!(f, "1-sheeted hyperboloid"),
            CausticKind::Hyperboloid { index: 2 } => write!(f, "2-sheeted hyperboloid"),
            CausticKind::Hyperboloid { index } => write!(f, "hyperboloid of index {index}"),
        }
    }
}

/// Origin of an entry in the merged `b` sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endpoint {
    /// `a_{k+1}` (zero-based `k`).
    Axis(usize),
    /// `alpha_{j+1}` (zero-based `j`).
    Caustic(usize),
}

/// Caustic parameters with their types and the merged sequence `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct CausticSet<T> {
    alpha: Vec<T>,
    kinds: Vec<CausticKind>,
    b: Vec<T>,
    origin: Vec<Endpoint>,
}

impl<T: Scalar> CausticSet<T> {
    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    pub fn kinds(&self) -> &[CausticKind] {
        &self.kinds
    }

    /// `b_1 <= ... <= b_{2d-1}` (zero-based storage).
    pub fn b(&self) -> &[T] {
        &self.b
    }

    pub fn origin(&self) -> &[Endpoint] {
        &self.origin
    }

    /// `b_k` with one-based `k`; `b_0 = 0`.
    pub fn b_at(&self, k: usize) -> T {
        if k == 0 {
            T::zero()
        } else {
            self.b[k - 1].clone()
        }
    }

    /// Whether `b_k` (one-based, `k >= 1`) is one of the semi-axes.
    pub fn is_axis(&self, k: usize) -> bool {
        k >= 1 && matches!(self.origin[k - 1], Endpoint::Axis(_))
    }

    /// Whether two caustic parameters coincide.
    pub fn has_double(&self) -> bool {
        self.alpha.windows(2).any(|w| w[0] == w[1])
    }

    pub fn dim(&self) -> usize {
        self.alpha.len() + 1
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> CausticSet<U> {
        CausticSet {
            alpha: self.alpha.iter().map(&f).collect(),
            kinds: self.kinds.clone(),
            b: self.b.iter().map(&f).collect(),
            origin: self.origin.clone(),
        }
    }
}

/// Classify with the default degeneracy tolerance.
pub fn classify_caustics<T: Scalar>(family: &ConfocalFamily<T>, alpha: &[T]) -> Result<CausticSet<T>> {
    classify_caustics_with_tol(family, alpha, DEGENERACY_TOL)
}

/// Type labels, merged sequence and the interleaving check `alpha_j in {b_{2j-1}, b_{2j}}`.
pub fn classify_caustics_with_tol<T: Scalar>(
    family: &ConfocalFamily<T>,
    alpha: &[T],
    tol: f64,
) -> Result<CausticSet<T>> {
    let d = family.dim();
    if alpha.len() != d - 1 {
        return Err(Error::CausticCount { expected: d - 1, got: alpha.len() });
    }
    let a = family.a();
    let mut alpha = alpha.to_vec();
    alpha.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    let mut kinds = Vec::with_capacity(d - 1);
    for al in &alpha {
        if *al <= T::zero() || *al >= a[d - 1] {
            return Err(Error::CausticOutOfRange(al.to_f64()));
        }
        for (k, ak) in a.iter().enumerate() {
            let diff = (al.clone() - ak.clone()).abs();
            let degenerate = if T::EXACT { diff.is_zero() } else { diff.to_f64() < tol * ak.to_f64() };
            if degenerate {
                return Err(Error::DegenerateCaustic { alpha: al.to_f64(), index: k + 1 });
            }
        }
        let below = a.iter().filter(|ak| *ak < al).count();
        kinds.push(if below == 0 { CausticKind::Ellipsoid } else { CausticKind::Hyperboloid { index: below } });
    }
    let mut merged: Vec<(T, Endpoint)> = a
        .iter()
        .enumerate()
        .map(|(k, v)| (v.clone(), Endpoint::Axis(k)))
        .chain(alpha.iter().enumerate().map(|(j, v)| (v.clone(), Endpoint::Caustic(j))))
        .collect();
    merged.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
    for (pos, (_, e)) in merged.iter().enumerate() {
        if let Endpoint::Caustic(j) = e {
            // one-based: alpha_{j+1} must sit at b_{2j+1} or b_{2j+2}
            let k = pos + 1;
            if k != 2 * j + 1 && k != 2 * j + 2 {
                return Err(Error::AudinViolation(format!(
                    "alpha_{} = {} sits at b_{}, expected b_{} or b_{}",
                    j + 1,
                    alpha[*j],
                    k,
                    2 * j + 1,
                    2 * j + 2
                )));
            }
        }
    }
    let (b, origin) = merged.into_iter().unzip();
    Ok(CausticSet { alpha, kinds, b, origin })
}

/// Ascending Jacobi elliptic coordinates of a point.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiPoint<T> {
    pub lambda: Vec<T>,
}

/// The polynomial `prod(a_i - l) - sum x_i^2 prod_{k != i}(a_k - l)` in `l`.
pub fn jacobi_polynomial<T: Scalar>(family: &ConfocalFamily<T>, x: &[T]) -> Poly<T> {
    let a = family.a();
    let factor = |k: usize| Poly::linear(a[k].clone(), -T::one());
    let full = (0..a.len()).fold(Poly::one(), |acc, k| &acc * &factor(k));
    let mut p = full;
    for i in 0..a.len() {
        let others = (0..a.len()).filter(|&k| k != i).fold(Poly::one(), |acc, k| &acc * &factor(k));
        p = &p - &others.scale(&(x[i].clone() * x[i].clone()));
    }
    p
}

/// Roots in `lambda` of `Q_lambda(x) = 1`, ascending.
pub fn jacobi_coordinates<T: Real>(family: &ConfocalFamily<T>, x: &[T]) -> Result<JacobiPoint<T>> {
    if x.iter().all(|v| v.is_zero()) {
        return Err(Error::DegeneratePoint);
    }
    let p = jacobi_polynomial(family, x);
    let lambda = real_roots(&p, 1e-6).map_err(|_| Error::DegeneratePoint)?;
    if lambda.len() != family.dim() {
        return Err(Error::DegeneratePoint);
    }
    Ok(JacobiPoint { lambda })
}

/// Inverse map: Cartesian point in the orthant given by `positive[i]`.
pub fn cartesian_from_jacobi<T: Real>(family: &ConfocalFamily<T>, lambda: &[T], positive: &[bool]) -> Vec<T> {
    let a = family.a();
    (0..a.len())
        .map(|i| {
            let num = lambda.iter().fold(T::one(), |acc, l| acc * (a[i].clone() - l.clone()));
            let den = (0..a.len())
                .filter(|&k| k != i)
                .fold(T::one(), |acc, k| acc * (a[i].clone() - a[k].clone()));
            let sq = num / den;
            let v = if sq <= T::zero() { T::zero() } else { sq.sqrt() };
            if positive[i] {
                v
            } else {
                -v
            }
        })
        .collect()
}

/// Reciprocals `c_1 >= ... >= c_{2d-1} > c_{2d} = 0` with bands and gaps.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalSystem<T> {
    c: Vec<T>,
}

impl<T: Scalar> IntervalSystem<T> {
    /// From the nonzero endpoints (any order); zero is appended.
    pub fn from_endpoints(mut nonzero: Vec<T>) -> Result<Self> {
        if nonzero.is_empty() || nonzero.len().is_multiple_of(2) {
            return Err(Error::InvalidFamily("an interval system needs an odd number of nonzero endpoints".into()));
        }
        if nonzero.iter().any(|c| *c <= T::zero()) {
            return Err(Error::InvalidFamily("interval endpoints must be positive".into()));
        }
        nonzero.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
        nonzero.push(T::zero());
        Ok(IntervalSystem { c: nonzero })
    }

    pub fn dim(&self) -> usize {
        self.c.len() / 2
    }

    /// `c_k`, one-based.
    pub fn c(&self, k: usize) -> T {
        self.c[k - 1].clone()
    }

    pub fn endpoints(&self) -> &[T] {
        &self.c
    }

    /// Band `j` (one-based) is `[c_{2j}, c_{2j-1}]`, returned as `(lo, hi)`.
    pub fn band(&self, j: usize) -> (T, T) {
        (self.c(2 * j), self.c(2 * j - 1))
    }

    /// Gap `j` (one-based, `j < d`) is `(c_{2j+1}, c_{2j})`.
    pub fn gap(&self, j: usize) -> (T, T) {
        (self.c(2 * j + 1), self.c(2 * j))
    }

    pub fn bands(&self) -> Vec<(T, T)> {
        (1..=self.dim()).map(|j| self.band(j)).collect()
    }

    pub fn gaps(&self) -> Vec<(T, T)> {
        (1..self.dim()).map(|j| self.gap(j)).collect()
    }

    /// `s * prod_{k < 2d} (s - c_k)`, of degree `2d`.
    pub fn phat(&self) -> Poly<T> {
        Poly::from_roots(&self.c)
    }

    /// `prod_{k < 2d} (1 - c_k x)`: the boundary-and-caustic polynomial in
    /// `x = 1/s`, normalized to constant term 1.
    pub fn normalized_pol(&self) -> Poly<T> {
        self.c[..self.c.len() - 1]
            .iter()
            .fold(Poly::one(), |acc, ck| &acc * &Poly::linear(T::one(), -ck.clone()))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> IntervalSystem<U> {
        IntervalSystem { c: self.c.iter().map(f).collect() }
    }
}

/// Interval system of a caustic set: `c_k = 1 / b_k`.
pub fn interval_system<T: Scalar>(caustics: &CausticSet<T>) -> IntervalSystem<T> {
    let mut c: Vec<T> = caustics.b().iter().map(|b| T::one() / b.clone()).collect();
    c.push(T::zero());
    IntervalSystem { c }
}
