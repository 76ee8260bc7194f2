use std::path::Path;

use rand::rngs::StdRng;
use rand::SeedableRng;

use confocal_billiards::billiard::{count_winding, launch_from_caustics, trace, LaunchSeed, Trajectory, WindingOptions};
use confocal_billiards::catalog::{d3_catalog, CatalogEntry, CatalogOptions, RouteResult};
use confocal_billiards::cayley::{check_d_plus_1, check_periodicity, reduce_winding};
use confocal_billiards::confocal::{classify_caustics, interval_system, CausticSet, ConfocalFamily, IntervalSystem};
use confocal_billiards::extremal::{
    analyze_alternance, equioscillation, find_caustics_d_plus_1, hyperboloid_4periodic, hyperboloid_4periodic_exact,
    pell_solve, unique_pair_in_family, PellOptions,
};
use confocal_billiards::freqmap::{frequency, rational_fit, rotation_monotonicity, QuadratureOptions};
use confocal_billiards::literal::{parse_list, parse_literal, Surd};
use confocal_billiards::poly::Poly;
use confocal_billiards::scalar::set_precision;
use confocal_billiards::series::RankOptions;
use confocal_billiards::Mp;

use crate::error::{CliError, Result};
use crate::report::*;

/// Run-wide settings shared by every command.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub precision: usize,
    pub threshold_exp: Option<i32>,
    pub max_nodes: usize,
    pub closure_tol: f64,
    pub jobs: usize,
    pub seed: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { precision: 256, threshold_exp: None, max_nodes: 1 << 16, closure_tol: 1e-30, jobs: 1, seed: None }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.precision < 64 {
            return Err(CliError::Usage(format!("precision must be at least 64 bits, got {}", self.precision)));
        }
        if !(self.closure_tol > 0.0) {
            return Err(CliError::Usage("closure tolerance must be positive".into()));
        }
        if self.threshold_exp.is_some_and(|e| e <= 0) {
            return Err(CliError::Usage("threshold exponent must be positive".into()));
        }
        Ok(())
    }

    pub fn rank(&self) -> RankOptions {
        let base = RankOptions::for_backend::<Mp>();
        match self.threshold_exp {
            Some(e) => base.with_threshold_exp(e),
            None => base,
        }
    }

    pub fn quadrature(&self) -> QuadratureOptions {
        QuadratureOptions { max_nodes: self.max_nodes.max(2), ..QuadratureOptions::default() }
    }

    /// Launch seed: centered, or drawn from the configured RNG seed.
    pub fn launch(&self, d: usize) -> LaunchSeed {
        match self.seed {
            Some(s) => LaunchSeed::random(d, &mut StdRng::seed_from_u64(s)),
            None => LaunchSeed::centered(d),
        }
    }
}

pub fn parse_values(list: &str) -> Result<Vec<Surd>> {
    parse_list(list).map_err(|e| CliError::Usage(format!("cannot parse {list:?}: {e}")))
}

pub fn parse_value(s: &str) -> Result<Surd> {
    parse_literal(s).map_err(|e| CliError::Usage(format!("cannot parse {s:?}: {e}")))
}

fn mp_all(v: &[Surd]) -> Vec<Mp> {
    v.iter().map(Surd::to_mp).collect()
}

fn strings<T: std::fmt::Display>(v: &[T]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn coeff_strings(p: &Poly<Mp>) -> Vec<String> {
    strings(p.coeffs())
}

fn finite(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::MAX
    }
}

fn setup(a: &[Surd], alpha: &[Surd]) -> Result<(ConfocalFamily<Mp>, CausticSet<Mp>)> {
    let family = ConfocalFamily::new(mp_all(a))?;
    let caustics = classify_caustics(&family, &mp_all(alpha))?;
    Ok((family, caustics))
}

fn simulation_of(family: &ConfocalFamily<Mp>, caustics: &CausticSet<Mp>, traj: &Trajectory<Mp>) -> Result<SimulationReport> {
    let winding = if traj.closed {
        Some(count_winding(family, traj, caustics, &WindingOptions::for_backend::<Mp>())?)
    } else {
        None
    };
    Ok(SimulationReport {
        closed: traj.closed,
        period: traj.period,
        closure_error: finite(traj.closure_error),
        caustic_spread: traj.caustic_spread(),
        elliptic_period: winding.as_ref().map(|m| reduce_winding(m).1[0]),
        winding,
    })
}

pub fn check(cfg: &RunConfig, a: &[Surd], alpha: &[Surd], n: usize, simulate: bool) -> Result<CheckReport> {
    set_precision(cfg.precision);
    let (family, caustics) = setup(a, alpha)?;
    let verdict = check_periodicity(&family, &caustics, n, &cfg.rank())?;
    let simulation = if simulate {
        let (x, v) = launch_from_caustics(&family, &caustics, &cfg.launch(family.dim()))?;
        let traj = trace(&family, &x, &v, n, cfg.closure_tol)?;
        Some(simulation_of(&family, &caustics, &traj)?)
    } else {
        None
    };
    Ok(CheckReport {
        a: strings(a),
        alpha: strings(alpha),
        kinds: strings(caustics.kinds()),
        n,
        periodic: verdict.periodic,
        elliptic_period: verdict.elliptic_period,
        cartesian_period: verdict.cartesian_period,
        winding: verdict.winding,
        signature: verdict.signature,
        pell_residual: verdict.pell_residual,
        reason: verdict.reason.to_string(),
        simulation,
    })
}

pub fn simulate(cfg: &RunConfig, a: &[Surd], alpha: &[Surd], bounces: usize, fractions: Option<Vec<f64>>) -> Result<TrajectoryReport> {
    set_precision(cfg.precision);
    let (family, caustics) = setup(a, alpha)?;
    let d = family.dim();
    let mut seed = cfg.launch(d);
    if let Some(f) = fractions {
        if f.len() != d - 1 {
            return Err(CliError::Usage(format!("expected {} launch fractions, got {}", d - 1, f.len())));
        }
        seed.fractions = f;
    }
    let (x, v) = launch_from_caustics(&family, &caustics, &seed)?;
    let traj = trace(&family, &x, &v, bounces, cfg.closure_tol)?;
    let to_f64 = |rows: &[Vec<Mp>]| rows.iter().map(|r| r.iter().map(|c| c.to_f64()).collect()).collect();
    Ok(TrajectoryReport {
        a: strings(a),
        alpha: strings(alpha),
        impacts: to_f64(&traj.impacts),
        directions: to_f64(&traj.directions),
        simulation: simulation_of(&family, &caustics, &traj)?,
    })
}

fn graph(p: &Poly<Mp>, system: &IntervalSystem<Mp>, samples: usize) -> Vec<(f64, f64)> {
    let top = system.c(1).to_f64() * 1.05;
    let p = p.map(|c| c.to_f64());
    let samples = samples.max(2);
    (0..samples)
        .map(|i| {
            let s = top * i as f64 / (samples - 1) as f64;
            (s, p.eval(&s))
        })
        .collect()
}

pub fn pell(cfg: &RunConfig, a: &[Surd], alpha: &[Surd], n: usize, force: bool, samples: usize) -> Result<PellReport> {
    set_precision(cfg.precision);
    let (_, caustics) = setup(a, alpha)?;
    let system = interval_system(&caustics);
    let sol = pell_solve(&system, n, &PellOptions { rank: cfg.rank(), force })?;
    let w = analyze_alternance(&sol, &system)?;
    let eq = equioscillation(&sol, &system, 1000);
    Ok(PellReport {
        n,
        d: sol.d,
        c: strings(system.endpoints()),
        p: coeff_strings(&sol.p),
        q: coeff_strings(&sol.q),
        residual: sol.residual,
        winding: w.m,
        signature: w.tau,
        elliptic_period: w.elliptic_period,
        q_roots: w.q_roots,
        law_holds: w.law_holds,
        band_excess: eq.band_excess,
        graph: graph(&sol.p, &system, samples),
    })
}

pub fn find_dplus1(cfg: &RunConfig, a: &[Surd]) -> Result<DPlusOneReport> {
    set_precision(cfg.precision);
    let family = ConfocalFamily::new(mp_all(a))?;
    let found = find_caustics_d_plus_1(&family);
    let (kinds, conditions_hold) = if found.admissible {
        let caustics = classify_caustics(&family, &found.alpha)?;
        let check = check_d_plus_1(&family, &caustics, &cfg.rank())?;
        (strings(caustics.kinds()), Some(check.satisfied))
    } else {
        (Vec::new(), None)
    };
    Ok(DPlusOneReport {
        a: strings(a),
        gamma: found.gamma.to_string(),
        alpha: strings(&found.alpha),
        kinds,
        admissible: found.admissible,
        conditions_hold,
    })
}

pub fn find_hyperboloid4(cfg: &RunConfig, a2: &Surd, a3: &Surd) -> Result<Hyperboloid4Report> {
    set_precision(cfg.precision);
    let exact = match (a2.as_rational(), a3.as_rational()) {
        (Some(x), Some(y)) => Some(hyperboloid_4periodic_exact(&x, &y)),
        _ => None,
    };
    let (a1, alpha) = hyperboloid_4periodic(&a2.to_mp(), &a3.to_mp());
    Ok(Hyperboloid4Report {
        a2: a2.to_string(),
        a3: a3.to_string(),
        a1_exact: exact.as_ref().map(|(x, _)| x.to_string()),
        alpha_exact: exact.as_ref().map(|(_, s)| s.to_string()),
        a1: a1.to_string(),
        alpha: alpha.to_string(),
    })
}

pub fn find_unique_pair(cfg: &RunConfig, a: &[Surd]) -> Result<UniquePairReport> {
    set_precision(cfg.precision);
    let family = ConfocalFamily::new(mp_all(a))?;
    let pair = unique_pair_in_family(&family)?;
    Ok(UniquePairReport {
        a: strings(a),
        lambda: pair.lambda.to_string(),
        alpha: pair.alpha.to_string(),
        shifted: strings(&pair.shifted),
    })
}

pub fn freq(cfg: &RunConfig, a: &[Surd], alpha: &[Surd]) -> Result<FrequencyReport> {
    let family = ConfocalFamily::new(a.iter().map(Surd::to_f64).collect())?;
    let caustics = classify_caustics(&family, &alpha.iter().map(Surd::to_f64).collect::<Vec<_>>())?;
    let f = frequency(&caustics, &cfg.quadrature())?;
    Ok(FrequencyReport {
        a: strings(a),
        alpha: strings(alpha),
        rational_fit: f.f.iter().map(|x| rational_fit(*x, 64, 1e-8)).collect(),
        monotone: f.strictly_increasing(),
        f: f.f,
        band_measures: f.band_measures,
        total_mass: f.total_mass,
        eta: f.eta.coeffs().to_vec(),
        gap_residuals: f.gap_residuals,
        roots_in_gaps: f.roots_in_gaps,
    })
}

/// Parse `lo:hi:count`.
pub fn parse_sweep(spec: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::Usage(format!("sweep must look like lo:hi:count, got {spec:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo = parse_value(parts[0])?.to_f64();
    let hi = parse_value(parts[1])?.to_f64();
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if count < 2 || !(lo < hi) {
        return Err(bad());
    }
    Ok((lo, hi, count))
}

/// Rotation numbers on `count` evenly spaced values of `lambda` in `[lo, hi]`,
/// split across `jobs` workers.
pub fn rotation_sweep(cfg: &RunConfig, a: &[Surd], lo: f64, hi: f64, count: usize) -> Result<RotationSweepReport> {
    if a.len() != 2 {
        return Err(CliError::Usage("a rotation sweep needs exactly two semi-axes".into()));
    }
    let (b, a) = (a[0].to_f64(), a[1].to_f64());
    let lambdas: Vec<f64> = (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect();
    let quad = cfg.quadrature();
    let jobs = cfg.jobs.max(1);
    let chunk = count.div_ceil(jobs);
    let parts: Vec<Result<Vec<f64>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = lambdas
            .chunks(chunk)
            .map(|ls| {
                let quad = quad.clone();
                scope.spawn(move || Ok(rotation_monotonicity(&a, &b, ls, &quad)?.values))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut rho = Vec::with_capacity(count);
    for p in parts {
        rho.extend(p?);
    }
    let increasing_steps = rho.windows(2).filter(|w| w[1] > w[0]).count();
    let decreasing_steps = rho.windows(2).filter(|w| w[1] < w[0]).count();
    Ok(RotationSweepReport {
        a,
        b,
        rows: lambdas.into_iter().zip(rho).map(|(lambda, rho)| RotationRow { lambda, rho }).collect(),
        increasing_steps,
        decreasing_steps,
    })
}

fn route(r: &RouteResult) -> RouteReport {
    RouteReport { periodic: r.periodic, period: r.period, elliptic_period: r.elliptic_period, winding: r.winding.clone() }
}

fn catalog_row(e: &CatalogEntry) -> CatalogRow {
    CatalogRow {
        key: e.key.clone(),
        title: e.title.clone(),
        a: strings(&e.a),
        alpha: strings(&e.alpha),
        kinds: strings(&e.kinds),
        n: e.n,
        constraint: e.constraint.clone(),
        constraint_holds: e.constraint_holds,
        conditions: e
            .conditions
            .iter()
            .map(|c| ConditionReport {
                label: c.label.clone(),
                satisfied: c.satisfied,
                magnitudes: c.magnitudes.iter().map(|m| finite(*m)).collect(),
            })
            .collect(),
        witness: e.witness.as_ref().map(|(p2, p1)| (coeff_strings(p2), coeff_strings(p1))),
        condition_winding: e.condition_winding.clone(),
        cayley: route(&e.cayley),
        pell: route(&e.pell),
        simulation: route(&e.simulation),
        routes_agree: e.routes_agree(),
        signature: e.alternance.tau.clone(),
        pell_residual: e.solution.residual,
        band_excess: e.equioscillation.band_excess,
        closure_error: e.closure_error,
        reflection_period: e.reflection_period,
        frequency: e.frequency.clone(),
    }
}

fn write_catalog_csv(dir: &Path, entries: &[CatalogEntry]) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    for e in entries {
        let path = dir.join(format!("{}.pell.csv", e.key));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["s", "value"])?;
        for (s, v) in &e.graph {
            w.write_record([s.to_string(), v.to_string()])?;
        }
        w.flush()?;
        files.push(path.display().to_string());

        let path = dir.join(format!("{}.trajectory.csv", e.key));
        let mut w = csv::Writer::from_path(&path)?;
        write_trajectory(&mut w, e.trajectory.iter().map(|(x, v)| (x.as_slice(), v.as_slice())))?;
        w.flush()?;
        files.push(path.display().to_string());
    }
    Ok(files)
}

/// Trajectory CSV: `bounce_index, x1..xd, v1..vd`.
pub fn write_trajectory<'a, W: std::io::Write>(
    w: &mut csv::Writer<W>,
    rows: impl Iterator<Item = (&'a [f64], &'a [f64])>,
) -> Result<()> {
    let mut header_done = false;
    for (k, (x, v)) in rows.enumerate() {
        if !header_done {
            let mut h = vec!["bounce_index".to_string()];
            h.extend((1..=x.len()).map(|i| format!("x{i}")));
            h.extend((1..=v.len()).map(|i| format!("v{i}")));
            w.write_record(&h)?;
            header_done = true;
        }
        let mut r = vec![k.to_string()];
        r.extend(x.iter().map(|c| c.to_string()));
        r.extend(v.iter().map(|c| c.to_string()));
        w.write_record(&r)?;
    }
    Ok(())
}

pub fn catalog(cfg: &RunConfig, out: Option<&Path>) -> Result<CatalogReport> {
    set_precision(cfg.precision);
    let opts = CatalogOptions { rank: cfg.rank(), quadrature: cfg.quadrature(), ..CatalogOptions::default() };
    let entries = d3_catalog(&opts)?;
    let files = match out {
        Some(dir) => write_catalog_csv(dir, &entries)?,
        None => Vec::new(),
    };
    Ok(CatalogReport { precision: cfg.precision, entries: entries.iter().map(catalog_row).collect(), files })
}
