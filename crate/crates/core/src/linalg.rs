//! Dense linear algebra and polynomial root finding over the scalar backends.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::{Real, Scalar};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.abs().to_f64()).fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(T::zero(), |acc, j| acc + self.get(i, j).clone() * v[j].clone()))
            .collect()
    }
}

/// Solve `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    let n = a.rows;
    assert_eq!(n, a.cols, "solve needs a square matrix");
    assert_eq!(n, b.len());
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let scale = m.max_abs();
    let tiny = scale * T::unit_roundoff() * (n as f64);
    for k in 0..n {
        let mut piv = k;
        for i in k + 1..n {
            if m.get(i, k).abs() > m.get(piv, k).abs() {
                piv = i;
            }
        }
        let pv = m.get(piv, k).clone();
        if pv.is_zero() || (!T::EXACT && pv.abs().to_f64() <= tiny) {
            return Err(Error::SingularSystem);
        }
        if piv != k {
            for j in 0..n {
                let t = m.get(k, j).clone();
                m.set(k, j, m.get(piv, j).clone());
                m.set(piv, j, t);
            }
            rhs.swap(k, piv);
        }
        for i in k + 1..n {
            let f = m.get(i, k).clone() / pv.clone();
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let v = m.get(i, j).clone() - f.clone() * m.get(k, j).clone();
                m.set(i, j, v);
            }
            rhs[i] = rhs[i].clone() - f * rhs[k].clone();
        }
    }
    let mut x = vec![T::zero(); n];
    for k in (0..n).rev() {
        let mut acc = rhs[k].clone();
        for j in k + 1..n {
            acc = acc - m.get(k, j).clone() * x[j].clone();
        }
        x[k] = acc / m.get(k, k).clone();
    }
    Ok(x)
}

/// Determinant by elimination (exact for rationals).
pub fn determinant<T: Scalar>(a: &Matrix<T>) -> T {
    let n = a.rows;
    assert_eq!(n, a.cols);
    let mut m = a.clone();
    let mut det = T::one();
    for k in 0..n {
        let mut piv = k;
        for i in k + 1..n {
            if m.get(i, k).abs() > m.get(piv, k).abs() {
                piv = i;
            }
        }
        let pv = m.get(piv, k).clone();
        if pv.is_zero() {
            return T::zero();
        }
        if piv != k {
            for j in 0..n {
                let t = m.get(k, j).clone();
                m.set(k, j, m.get(piv, j).clone());
                m.set(piv, j, t);
            }
            det = -det;
        }
        det = det * pv.clone();
        for i in k + 1..n {
            let f = m.get(i, k).clone() / pv.clone();
            for j in k..n {
                let v = m.get(i, j).clone() - f.clone() * m.get(k, j).clone();
                m.set(i, j, v);
            }
        }
    }
    det
}

/// Rank and null-space information for a (possibly rectangular) matrix.
#[derive(Clone, Debug)]
pub struct RankReport<T> {
    pub rank: usize,
    pub cols: usize,
    /// Singular values in descending order (float backends only; padded with
    /// zeros up to the column count).
    pub singular_values: Vec<f64>,
    /// A null vector when `rank < cols`. For float backends this is the
    /// right singular vector of the smallest singular value.
    pub null_vector: Option<Vec<T>>,
    /// Right singular vector of the smallest singular value, even at full rank
    /// (float backends); equals `null_vector` for exact backends.
    pub smallest_direction: Option<Vec<T>>,
    pub nullity: usize,
    /// Null space numerically ambiguous: the two smallest singular values are
    /// within the configured ratio, or the exact nullity exceeds one.
    pub ill_conditioned: bool,
}

/// Rank analysis: fraction-free style elimination for exact backends,
/// one-sided Jacobi SVD with threshold `rel_tol * sigma_max` for floats.
pub fn rank_report<T: Scalar>(a: &Matrix<T>, rel_tol: f64, ill_ratio: f64) -> RankReport<T> {
    rank_report_with_reference(a, rel_tol, ill_ratio, 0.0)
}

/// As [`rank_report`], with the float threshold `rel_tol * max(sigma_max,
/// reference)` so that a uniformly tiny matrix can count as zero.
pub fn rank_report_with_reference<T: Scalar>(
    a: &Matrix<T>,
    rel_tol: f64,
    ill_ratio: f64,
    reference: f64,
) -> RankReport<T> {
    if T::EXACT {
        exact_rank(a)
    } else {
        svd_rank(a, rel_tol, ill_ratio, reference)
    }
}

fn exact_rank<T: Scalar>(a: &Matrix<T>) -> RankReport<T> {
    let (rows, cols) = (a.rows, a.cols);
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m.get(i, c).is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                let t = m.get(r, j).clone();
                m.set(r, j, m.get(p, j).clone());
                m.set(p, j, t);
            }
        }
        let pv = m.get(r, c).clone();
        for j in 0..cols {
            let v = m.get(r, j).clone() / pv.clone();
            m.set(r, j, v);
        }
        for i in 0..rows {
            if i == r || m.get(i, c).is_zero() {
                continue;
            }
            let f = m.get(i, c).clone();
            for j in 0..cols {
                let v = m.get(i, j).clone() - f.clone() * m.get(r, j).clone();
                m.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let null_vector = free.first().map(|&fc| {
        let mut v = vec![T::zero(); cols];
        v[fc] = T::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -m.get(row, fc).clone();
        }
        v
    });
    RankReport {
        rank: r,
        cols,
        singular_values: Vec::new(),
        smallest_direction: null_vector.clone(),
        null_vector,
        nullity: free.len(),
        ill_conditioned: free.len() > 1,
    }
}

fn svd_rank<T: Scalar>(a: &Matrix<T>, rel_tol: f64, ill_ratio: f64, reference: f64) -> RankReport<T> {
    let (sv, v) = jacobi_svd(a);
    let cols = a.cols;
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| sv[j].partial_cmp(&sv[i]).unwrap_or(std::cmp::Ordering::Equal));
    let sigma: Vec<T> = order.iter().map(|&i| sv[i].clone()).collect();
    let sigma_f: Vec<f64> = sigma.iter().map(|s| s.to_f64()).collect();
    let smax = sigma.first().cloned().unwrap_or_else(T::zero);
    let floor = T::from_f64(reference);
    let thresh = T::max_of(smax.clone(), floor) * T::from_f64(rel_tol);
    let nullity = sigma.iter().filter(|s| smax.is_zero() || **s <= thresh).count();
    let smallest = order.last().map(|&k| (0..cols).map(|i| v.get(i, k).clone()).collect::<Vec<T>>());
    let mut ill = nullity > 1;
    if nullity == 1 && cols >= 2 {
        let s1 = sigma[cols - 1].clone();
        let s2 = sigma[cols - 2].clone();
        if !s1.is_zero() && s2 < s1 * T::from_f64(ill_ratio) {
            ill = true;
        }
    }
    RankReport {
        rank: cols - nullity,
        cols,
        singular_values: sigma_f,
        null_vector: if nullity > 0 { smallest.clone() } else { None },
        smallest_direction: smallest,
        nullity,
        ill_conditioned: ill,
    }
}

/// One-sided Jacobi SVD. Returns the singular values (one per column, in
/// column order) and the right singular vectors as columns of `V`.
pub fn jacobi_svd<T: Scalar>(a: &Matrix<T>) -> (Vec<T>, Matrix<T>) {
    let (m, n) = (a.rows, a.cols);
    let mut u: Vec<Vec<T>> = (0..n).map(|j| (0..m).map(|i| a.get(i, j).clone()).collect()).collect();
    let mut v = Matrix::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() });
    let tol = T::from_f64(T::unit_roundoff() * 8.0);
    let dot = |x: &[T], y: &[T]| x.iter().zip(y).fold(T::zero(), |acc, (p, q)| acc + p.clone() * q.clone());
    let sqrt = |x: T| x.try_sqrt().expect("float backend has square roots");
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&u[p], &u[p]);
                let beta = dot(&u[q], &u[q]);
                let gamma = dot(&u[p], &u[q]);
                if gamma.is_zero() {
                    continue;
                }
                let bound = sqrt(alpha.clone() * beta.clone()) * tol.clone();
                if gamma.abs() <= bound {
                    continue;
                }
                rotated = true;
                let two = T::from_i64(2);
                let zeta = (beta - alpha) / (two * gamma);
                let one = T::one();
                let denom = zeta.abs() + sqrt(one.clone() + zeta.clone() * zeta.clone());
                let t = if zeta.is_neg() { -(one.clone() / denom) } else { one.clone() / denom };
                let c = one.clone() / sqrt(one + t.clone() * t.clone());
                let s = c.clone() * t;
                for i in 0..m {
                    let up = u[p][i].clone();
                    let uq = u[q][i].clone();
                    u[p][i] = c.clone() * up.clone() - s.clone() * uq.clone();
                    u[q][i] = s.clone() * up + c.clone() * uq;
                }
                for i in 0..n {
                    let vp = v.get(i, p).clone();
                    let vq = v.get(i, q).clone();
                    v.set(i, p, c.clone() * vp.clone() - s.clone() * vq.clone());
                    v.set(i, q, s.clone() * vp + c.clone() * vq);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let sv = u.iter().map(|col| sqrt(dot(col, col))).collect();
    (sv, v)
}

/// All complex roots of `p` (with multiplicity), by Aberth iteration in the
/// working precision seeded from f64 companion-matrix eigenvalues.
pub fn complex_roots<T: Real>(p: &Poly<T>) -> Vec<Complex<T>> {
    let n = p.degree();
    if p.is_zero() || n == 0 {
        return Vec::new();
    }
    let c = p.coeffs();
    if n == 1 {
        return vec![Complex::new(-c[0].clone() / c[1].clone(), T::zero())];
    }
    let lead = c[n].to_f64();
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -c[i].to_f64() / lead;
    }
    let seeds = comp.complex_eigenvalues();
    let mut z: Vec<Complex<T>> = seeds
        .iter()
        .enumerate()
        .map(|(k, s)| {
            // Nudge exact coincidences apart so Aberth corrections stay finite.
            let jitter = 1e-9 * (k as f64 + 1.0) * (1.0 + s.norm());
            Complex::new(T::from_f64(s.re), T::from_f64(s.im + jitter * 1e-3))
        })
        .collect();
    let dp = p.derivative();
    let eps = T::epsilon().to_f64();
    let one = Complex::new(T::one(), T::zero());
    for _ in 0..200 {
        let mut max_step = 0.0f64;
        let mut max_mag = 0.0f64;
        for k in 0..n {
            let pz = p.eval_complex(&z[k]);
            if pz.re.is_zero() && pz.im.is_zero() {
                continue;
            }
            let w = pz / dp.eval_complex(&z[k]);
            let mut sum = Complex::new(T::zero(), T::zero());
            for j in 0..n {
                if j != k {
                    let diff = z[k].clone() - z[j].clone();
                    if !(diff.re.is_zero() && diff.im.is_zero()) {
                        sum = sum + one.clone() / diff;
                    }
                }
            }
            let step = w.clone() / (one.clone() - w * sum);
            let sn = cnorm(&step);
            if sn.is_finite() {
                z[k] = z[k].clone() - step;
                max_step = max_step.max(sn);
            }
            max_mag = max_mag.max(cnorm(&z[k]));
        }
        if max_step <= eps * 4.0 * (1.0 + max_mag) {
            break;
        }
    }
    z
}

fn cnorm<T: Real>(z: &Complex<T>) -> f64 {
    z.re.to_f64().hypot(z.im.to_f64())
}

/// Real roots of `p`, ascending with multiplicity. Roots whose imaginary part
/// exceeds `imag_tol` (relative to `1 + |z|`) produce [`Error::ComplexRoot`].
/// Near-double clusters are resolved from the critical point between them.
pub fn real_roots<T: Real>(p: &Poly<T>, imag_tol: f64) -> Result<Vec<T>> {
    let roots = complex_roots(p);
    let scale = roots.iter().map(cnorm).fold(1.0, f64::max);
    let cluster = T::epsilon().to_f64().sqrt() * 1e3 * scale;
    let mut used = vec![false; roots.len()];
    let mut out = Vec::new();
    let dp = p.derivative();
    let ddp = dp.derivative();
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let partner = (i + 1..roots.len()).find(|&j| {
            !used[j]
                && (roots[i].re.to_f64() - roots[j].re.to_f64()).abs() < cluster
                && roots[i].im.to_f64().abs() < cluster
                && roots[j].im.to_f64().abs() < cluster
        });
        if let Some(j) = partner {
            used[j] = true;
            let mid = (roots[i].re.clone() + roots[j].re.clone()) / T::from_i64(2);
            let (a, b) = resolve_cluster(p, &dp, &ddp, mid);
            out.push(a);
            out.push(b);
            continue;
        }
        let im = roots[i].im.to_f64().abs();
        if im > imag_tol * (1.0 + cnorm(&roots[i])) {
            return Err(Error::ComplexRoot(im));
        }
        out.push(roots[i].re.clone());
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

fn resolve_cluster<T: Real>(p: &Poly<T>, dp: &Poly<T>, ddp: &Poly<T>, start: T) -> (T, T) {
    let mut xi = start;
    for _ in 0..100 {
        let d2 = ddp.eval(&xi);
        if d2.is_zero() {
            break;
        }
        let step = dp.eval(&xi) / d2;
        xi = xi - step.clone();
        if step.abs() <= xi.abs() * T::epsilon() * T::from_i64(4) {
            break;
        }
    }
    let pv = p.eval(&xi);
    let d2 = ddp.eval(&xi);
    let disc = -(T::from_i64(2) * pv) / d2;
    if disc <= T::zero() {
        return (xi.clone(), xi);
    }
    let h = disc.sqrt();
    let mut lo = xi.clone() - h.clone();
    let mut hi = xi.clone() + h;
    for r in [&mut lo, &mut hi] {
        for _ in 0..50 {
            let d = dp.eval(r);
            if d.is_zero() {
                break;
            }
            let next = r.clone() - p.eval(r) / d;
            if p.eval(&next).abs() >= p.eval(r).abs() {
                break;
            }
            *r = next;
        }
    }
    (lo, hi)
}
