//! Direct simulation inside the ellipsoid: reflection, chord stepping,
//! Chasles caustics of a line, launching from prescribed caustics, closure
//! detection and empirical winding counts.

use crate::confocal::{cartesian_from_jacobi, jacobi_coordinates, CausticSet, ConfocalFamily, Endpoint};
use crate::error::{Error, Result};
use crate::linalg::real_roots;
use crate::poly::Poly;
use crate::scalar::{Real, Scalar};

fn dot<T: Scalar>(u: &[T], v: &[T]) -> T {
    u.iter().zip(v).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
}

fn norm<T: Real>(u: &[T]) -> T {
    dot(u, u).sqrt()
}

fn normalized<T: Real>(u: Vec<T>) -> Vec<T> {
    let n = norm(&u);
    u.into_iter().map(|x| x / n.clone()).collect()
}

fn boundary_tol<T: Real>() -> f64 {
    T::epsilon().to_f64().sqrt().max(1e-30) * 1e2
}

/// Specular reflection of `dir` at a boundary point.
pub fn reflect<T: Real>(family: &ConfocalFamily<T>, point: &[T], dir: &[T]) -> Result<Vec<T>> {
    let res = family.boundary_residual(point).abs().to_f64();
    if res > boundary_tol::<T>() {
        return Err(Error::OffBoundary(res));
    }
    let nrm = normalized(point.iter().zip(family.a()).map(|(x, a)| x.clone() / a.clone()).collect());
    let proj = dot(dir, &nrm) * T::from_i64(2);
    Ok(dir.iter().zip(&nrm).map(|(v, n)| v.clone() - proj.clone() * n.clone()).collect())
}

/// Second intersection of the line `point + t dir` with the boundary.
/// Returns the new point and the chord parameter `t`.
pub fn next_impact<T: Real>(family: &ConfocalFamily<T>, point: &[T], dir: &[T]) -> Result<(Vec<T>, T)> {
    let a = family.a();
    let qa = dir.iter().zip(a).fold(T::zero(), |acc, (v, ai)| acc + v.clone() * v.clone() / ai.clone());
    let qb = point.iter().zip(dir).zip(a).fold(T::zero(), |acc, ((x, v), ai)| acc + x.clone() * v.clone() / ai.clone());
    let mut t = -(T::from_i64(2) * qb) / qa.clone();
    if t.to_f64() < 1e-10 {
        return Err(Error::TangentLine(t.to_f64()));
    }
    for _ in 0..3 {
        let y: Vec<T> = point.iter().zip(dir).map(|(x, v)| x.clone() + t.clone() * v.clone()).collect();
        let f = family.boundary_residual(&y);
        let df = y.iter().zip(dir).zip(a).fold(T::zero(), |acc, ((yi, vi), ai)| {
            acc + T::from_i64(2) * yi.clone() * vi.clone() / ai.clone()
        });
        if df.is_zero() {
            break;
        }
        t = t - f / df;
    }
    let y = point.iter().zip(dir).map(|(x, v)| x.clone() + t.clone() * v.clone()).collect();
    Ok((y, t))
}

/// Parameters of the `d-1` confocal quadrics tangent to a line, ascending.
///
/// Uses `sum_{i<k} (x_i v_k - x_k v_i)^2 prod_{l != i,k} e_l
/// = sum_i v_i^2 prod_{l != i} e_l` with `e_l = a_l - lambda`.
pub fn line_caustics<T: Real>(family: &ConfocalFamily<T>, point: &[T], dir: &[T]) -> Result<Vec<T>> {
    let a = family.a();
    let d = a.len();
    let e = |l: usize| Poly::linear(a[l].clone(), -T::one());
    let prod_except = |skip: &[usize]| (0..d).filter(|l| !skip.contains(l)).fold(Poly::one(), |acc, l| &acc * &e(l));
    let mut p = Poly::zero();
    for i in 0..d {
        for k in i + 1..d {
            let m = point[i].clone() * dir[k].clone() - point[k].clone() * dir[i].clone();
            p = &p + &prod_except(&[i, k]).scale(&(m.clone() * m));
        }
        p = &p - &prod_except(&[i]).scale(&(dir[i].clone() * dir[i].clone()));
    }
    let roots = real_roots(&p, 1e-6).map_err(|_| Error::DegenerateLine)?;
    let tol = boundary_tol::<T>();
    if roots.len() != d - 1 || roots.iter().any(|r| a.iter().any(|ai| (r.clone() - ai.clone()).abs().to_f64() < tol * ai.to_f64())) {
        return Err(Error::DegenerateLine);
    }
    Ok(roots)
}

/// Starting data for [`launch_from_caustics`].
#[derive(Clone, Debug, PartialEq)]
pub struct LaunchSeed {
    /// Position of `lambda_2..lambda_d` inside `[b_{2j-2}, b_{2j-1}]`, in `[0,1]`.
    pub fractions: Vec<f64>,
    /// Sign of each Cartesian coordinate of the start point.
    pub orthant: Vec<bool>,
    /// Sign of the direction components along `lambda_2..lambda_d`.
    pub dir_signs: Vec<bool>,
}

impl LaunchSeed {
    pub fn centered(d: usize) -> Self {
        LaunchSeed { fractions: vec![0.5; d - 1], orthant: vec![true; d], dir_signs: vec![true; d - 1] }
    }

    pub fn random(d: usize, rng: &mut impl rand::Rng) -> Self {
        LaunchSeed {
            fractions: (0..d - 1).map(|_| rng.gen_range(0.05..0.95)).collect(),
            orthant: (0..d).map(|_| rng.gen_bool(0.5)).collect(),
            dir_signs: (0..d - 1).map(|_| rng.gen_bool(0.5)).collect(),
        }
    }
}

/// Unit normals to the coordinate quadrics through `x`.
fn jacobi_frame<T: Real>(family: &ConfocalFamily<T>, x: &[T], lambda: &[T]) -> Vec<Vec<T>> {
    let a = family.a();
    let tol = boundary_tol::<T>();
    lambda
        .iter()
        .map(|l| {
            if let Some(hit) = a.iter().position(|ai| (ai.clone() - l.clone()).abs().to_f64() < tol * ai.to_f64()) {
                let mut e = vec![T::zero(); a.len()];
                e[hit] = T::one();
                e
            } else {
                normalized(x.iter().zip(a).map(|(xi, ai)| xi.clone() / (ai.clone() - l.clone())).collect())
            }
        })
        .collect()
}

/// Boundary point with Jacobi coordinates `(0, lambda_2, ..)` and the inward
/// unit direction tangent to the quadrics `Q_alpha`.
///
/// In the Jacobi frame the squared direction components are
/// `prod_k (lambda_j - alpha_k) / prod_{k != j} (lambda_j - lambda_k)`.
pub fn launch_at<T: Real>(
    family: &ConfocalFamily<T>,
    alpha: &[T],
    lambda: &[T],
    orthant: &[bool],
    dir_signs: &[bool],
) -> Result<(Vec<T>, Vec<T>)> {
    let d = family.dim();
    let x = cartesian_from_jacobi(family, lambda, orthant);
    let frame = jacobi_frame(family, &x, lambda);
    let tol = T::from_f64(boundary_tol::<T>());
    let mut v = vec![T::zero(); d];
    for j in 0..d {
        let num = alpha.iter().fold(T::one(), |acc, al| acc * (lambda[j].clone() - al.clone()));
        let den = (0..d).filter(|&k| k != j).fold(T::one(), |acc, k| acc * (lambda[j].clone() - lambda[k].clone()));
        let mut w = num / den;
        if w < T::zero() {
            if -w.clone() > tol.clone() {
                return Err(Error::NoTangentDirection);
            }
            w = T::zero();
        }
        let mut c = w.sqrt();
        if j == 0 || !dir_signs[j - 1] {
            c = -c;
        }
        for (vi, ni) in v.iter_mut().zip(&frame[j]) {
            *vi = vi.clone() + c.clone() * ni.clone();
        }
    }
    Ok((x, normalized(v)))
}

/// Boundary point and direction whose line is tangent to the given caustics.
pub fn launch_from_caustics<T: Real>(
    family: &ConfocalFamily<T>,
    caustics: &CausticSet<T>,
    seed: &LaunchSeed,
) -> Result<(Vec<T>, Vec<T>)> {
    let d = family.dim();
    let mut lambda = vec![T::zero()];
    for j in 2..=d {
        let lo = caustics.b_at(2 * j - 2);
        let hi = caustics.b_at(2 * j - 1);
        let f = T::from_f64(seed.fractions[j - 2].clamp(0.0, 1.0));
        lambda.push(lo.clone() + (hi - lo) * f);
    }
    launch_at(family, caustics.alpha(), &lambda, &seed.orthant, &seed.dir_signs)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    pub impacts: Vec<Vec<T>>,
    /// Direction of the segment leaving each impact.
    pub directions: Vec<Vec<T>>,
    pub caustic_params: Vec<Vec<T>>,
    pub closed: bool,
    /// Closure error at `period`, or the smallest error seen.
    pub closure_error: f64,
    pub period: Option<usize>,
}

impl<T: Real> Trajectory<T> {
    /// Largest spread of any caustic parameter across segments.
    pub fn caustic_spread(&self) -> f64 {
        let Some(first) = self.caustic_params.first() else {
            return 0.0;
        };
        (0..first.len())
            .map(|k| {
                let vals: Vec<f64> = self.caustic_params.iter().map(|c| c[k].to_f64()).collect();
                let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                hi - lo
            })
            .fold(0.0, f64::max)
    }

    /// Largest boundary residual over the impacts.
    pub fn max_boundary_residual(&self, family: &ConfocalFamily<T>) -> f64 {
        self.impacts.iter().map(|p| family.boundary_residual(p).abs().to_f64()).fold(0.0, f64::max)
    }
}

/// Iterate chord and reflection up to `n_max` bounces, stopping at the first
/// return with `|x_n - x_0| + |v_n - v_0| < closure_tol`.
pub fn trace<T: Real>(
    family: &ConfocalFamily<T>,
    point: &[T],
    dir: &[T],
    n_max: usize,
    closure_tol: f64,
) -> Result<Trajectory<T>> {
    let mut impacts = vec![point.to_vec()];
    let mut directions = vec![dir.to_vec()];
    let mut caustic_params = Vec::new();
    let (mut x, mut v) = (point.to_vec(), dir.to_vec());
    let mut best = f64::INFINITY;
    for k in 1..=n_max {
        caustic_params.push(line_caustics(family, &x, &v)?);
        let (y, _) = next_impact(family, &x, &v)?;
        v = reflect(family, &y, &v)?;
        x = y;
        impacts.push(x.clone());
        directions.push(v.clone());
        let dx: Vec<T> = x.iter().zip(point).map(|(a, b)| a.clone() - b.clone()).collect();
        let dv: Vec<T> = v.iter().zip(dir).map(|(a, b)| a.clone() - b.clone()).collect();
        let err = norm(&dx).to_f64() + norm(&dv).to_f64();
        if err < closure_tol {
            return Ok(Trajectory { impacts, directions, caustic_params, closed: true, closure_error: err, period: Some(k) });
        }
        best = best.min(err);
    }
    Ok(Trajectory { impacts, directions, caustic_params, closed: false, closure_error: best, period: None })
}

/// Parameter of the tangency point of `x + t v` with `Q_alpha`.
fn tangency_parameter<T: Real>(family: &ConfocalFamily<T>, x: &[T], v: &[T], alpha: &T) -> T {
    let a = family.a();
    let (mut qa, mut qb) = (T::zero(), T::zero());
    for i in 0..a.len() {
        let e = a[i].clone() - alpha.clone();
        qa = qa + v[i].clone() * v[i].clone() / e.clone();
        qb = qb + x[i].clone() * v[i].clone() / e;
    }
    -qb / qa
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindingOptions {
    /// Relative half-split of a double caustic for the companion trajectory.
    pub companion_delta: f64,
    /// Events closer than this (relative chord length) to an impact are ambiguous.
    pub event_tol: f64,
}

impl WindingOptions {
    pub fn for_backend<T: Real>() -> Self {
        let eps = T::epsilon().to_f64();
        WindingOptions { companion_delta: eps.powf(0.3).max(1e-25), event_tol: eps.sqrt().max(1e-30) }
    }
}

fn count_tangencies<T: Real>(
    family: &ConfocalFamily<T>,
    traj: &Trajectory<T>,
    n: usize,
    alpha: &T,
    tol: f64,
) -> Result<usize> {
    let mut count = 0;
    for k in 0..n {
        let (x, v, y) = (&traj.impacts[k], &traj.directions[k], &traj.impacts[k + 1]);
        let len: Vec<T> = y.iter().zip(x).map(|(a, b)| a.clone() - b.clone()).collect();
        let l = norm(&len);
        let t = tangency_parameter(family, x, v, alpha);
        let rel = (t.clone() / l).to_f64();
        if rel.abs() < tol || (rel - 1.0).abs() < tol {
            return Err(Error::AmbiguousEvent { segment: k });
        }
        if rel > 0.0 && rel < 1.0 {
            count += 1;
        }
    }
    Ok(count)
}

/// Empirical winding numbers of a closed trajectory: `m_0` is the period and
/// `m_j` counts the points where `lambda_{j+1}` reaches `b_{2j}`, either as a
/// tangency with a caustic or as a crossing of the coordinate hyperplane.
/// A double caustic is resolved on a companion trajectory with the pair
/// split by `delta`.
pub fn count_winding<T: Real>(
    family: &ConfocalFamily<T>,
    traj: &Trajectory<T>,
    caustics: &CausticSet<T>,
    opts: &WindingOptions,
) -> Result<Vec<usize>> {
    let n = traj.period.ok_or(Error::NotClosed)?;
    let d = family.dim();
    let mut m = vec![n];
    for j in 1..d {
        let low_k = 2 * j;
        let low = caustics.b_at(low_k);
        match caustics.origin()[low_k - 1] {
            Endpoint::Caustic(_) => {
                let high = caustics.b_at(low_k + 1);
                if high == low {
                    m.push(companion_count(family, traj, caustics, low_k, n, opts)?);
                } else {
                    m.push(count_tangencies(family, traj, n, &low, opts.event_tol)?);
                }
            }
            Endpoint::Axis(k) => {
                let mut count = 0;
                for s in 0..n {
                    let (u, w) = (&traj.impacts[s][k], &traj.impacts[s + 1][k]);
                    if u.abs().to_f64() < opts.event_tol || w.abs().to_f64() < opts.event_tol {
                        return Err(Error::AmbiguousEvent { segment: s });
                    }
                    if (u.clone() * w.clone()) < T::zero() {
                        count += 1;
                    }
                }
                m.push(count);
            }
        }
    }
    Ok(m)
}

fn companion_count<T: Real>(
    family: &ConfocalFamily<T>,
    traj: &Trajectory<T>,
    caustics: &CausticSet<T>,
    low_k: usize,
    n: usize,
    opts: &WindingOptions,
) -> Result<usize> {
    let low = caustics.b_at(low_k);
    let delta = low.clone() * T::from_f64(opts.companion_delta);
    let mut alpha: Vec<T> = caustics.alpha().to_vec();
    let mut split = false;
    for k in 0..alpha.len() {
        if alpha[k] == low {
            alpha[k] = if split { low.clone() + delta.clone() } else { low.clone() - delta.clone() };
            split = true;
        }
    }
    let x0 = &traj.impacts[0];
    let v0 = &traj.directions[0];
    let mut lambda = jacobi_coordinates(family, x0)?.lambda;
    lambda[0] = T::zero();
    let frame = jacobi_frame(family, x0, &lambda);
    let orthant: Vec<bool> = x0.iter().map(|x| *x >= T::zero()).collect();
    let dir_signs: Vec<bool> = frame[1..].iter().map(|nj| dot(v0, nj) >= T::zero()).collect();
    let (x, v) = launch_at(family, &alpha, &lambda, &orthant, &dir_signs)?;
    let mut companion = trace(family, &x, &v, n, 0.0)?;
    companion.period = Some(n);
    count_tangencies(family, &companion, n, &(low - delta), opts.event_tol)
}

/// Smallest `k` such that impact `k` and its outgoing direction are the
/// image of impact 0 and its direction under a reflection in coordinate
/// hyperplanes, up to `tol` relative to the chord scale.
pub fn jacobi_period<T: Real>(family: &ConfocalFamily<T>, traj: &Trajectory<T>, tol: f64) -> Option<usize> {
    let scale = family.a()[family.dim() - 1].sqrt().to_f64();
    let (x0, v0) = (&traj.impacts[0], &traj.directions[0]);
    let last = traj.period.unwrap_or(traj.impacts.len() - 1).min(traj.directions.len() - 1);
    (1..=last).find(|&k| {
        let (x, v) = (&traj.impacts[k], &traj.directions[k]);
        (0..x0.len()).all(|i| {
            let flip = (x[i].clone() * x0[i].clone()).to_f64() < 0.0;
            let (xs, vs) = if flip { (-x[i].clone(), -v[i].clone()) } else { (x[i].clone(), v[i].clone()) };
            (xs - x0[i].clone()).abs().to_f64() <= tol * scale && (vs - v0[i].clone()).abs().to_f64() <= tol
        })
    })
}
