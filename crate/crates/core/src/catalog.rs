//! Low-period catalog in dimension three, plus the five-periodic example in
//! dimension four. Every entry is decided three ways: the series
//! conditions, the Pell alternance and a traced trajectory.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::billiard::{count_winding, jacobi_period, launch_from_caustics, trace, LaunchSeed, WindingOptions};
use crate::cayley::{check_d_plus_1, check_five_d3, check_periodicity, check_six_d3, reduce_winding, PeriodicityVerdict, SixVariant};
use crate::confocal::{classify_caustics, interval_system, CausticKind, CausticSet, ConfocalFamily, IntervalSystem};
use crate::error::{Error, Result};
use crate::extremal::{
    analyze_alternance, equioscillation, find_caustics_d_plus_1, hyperboloid_4periodic_exact, pell_solve,
    unique_pair_in_family, EndpointSpec, Equioscillation, PellOptions, PellProblem, PellSolution, WindingData,
};
use crate::freqmap::{frequency, invert_frequency, QuadratureOptions};
use crate::poly::Poly;
use crate::scalar::{Mp, Scalar};
use crate::series::{sqrt_series, RankOptions};

/// Outcome of one decision route.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RouteResult {
    pub periodic: bool,
    pub period: Option<usize>,
    pub elliptic_period: Option<usize>,
    pub winding: Option<Vec<usize>>,
}

/// A named series-level condition with the magnitudes that must vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct Condition {
    pub label: String,
    pub satisfied: bool,
    pub magnitudes: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub key: String,
    pub title: String,
    pub a: Vec<Mp>,
    pub alpha: Vec<Mp>,
    pub kinds: Vec<CausticKind>,
    pub n: usize,
    /// Caustic-type constraint the entry must obey.
    pub constraint: String,
    pub constraint_holds: bool,
    pub conditions: Vec<Condition>,
    /// `(p_2, p_1)` for the odd six-periodic variants.
    pub witness: Option<(Poly<Mp>, Poly<Mp>)>,
    pub verdict: PeriodicityVerdict,
    /// Winding forced by the entry's series conditions; `None` when they
    /// only fix a class (the odd six-periodic variants share one condition).
    pub condition_winding: Option<Vec<usize>>,
    pub cayley: RouteResult,
    pub pell: RouteResult,
    pub simulation: RouteResult,
    pub solution: PellSolution<Mp>,
    pub alternance: WindingData,
    pub equioscillation: Equioscillation,
    pub closure_error: f64,
    /// First impact whose position and direction mirror the start in the
    /// coordinate hyperplanes; below the elliptic period for double caustics.
    pub reflection_period: Option<usize>,
    pub frequency: Vec<f64>,
    /// `(s, p_hat(s))` on `[0, 1.05 c_1]`.
    pub graph: Vec<(f64, f64)>,
    /// Impact points and outgoing directions over one period.
    pub trajectory: Vec<(Vec<f64>, Vec<f64>)>,
}

impl CatalogEntry {
    /// The three routes report the same periodicity, period, elliptic period
    /// and winding numbers, and the series conditions do not contradict them.
    pub fn routes_agree(&self) -> bool {
        let forced = self.condition_winding.as_ref().is_none_or(|w| Some(w) == self.pell.winding.as_ref());
        forced && self.cayley == self.pell && self.pell == self.simulation
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogOptions {
    pub rank: RankOptions,
    pub quadrature: QuadratureOptions,
    pub graph_samples: usize,
    pub launch: LaunchSeed,
    pub closure_tol: f64,
}

impl Default for CatalogOptions {
    fn default() -> Self {
        CatalogOptions {
            rank: RankOptions::for_backend::<Mp>(),
            quadrature: QuadratureOptions::default(),
            graph_samples: 601,
            launch: LaunchSeed { fractions: vec![0.5, 0.4], orthant: vec![true; 3], dir_signs: vec![true; 2] },
            closure_tol: 1e-40,
        }
    }
}

fn int(v: i64) -> Mp {
    Mp::from_int(v)
}

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn graph(sol: &PellSolution<Mp>, system: &IntervalSystem<Mp>, samples: usize) -> Vec<(f64, f64)> {
    let top = system.c(1).to_f64() * 1.05;
    let p = sol.p.map(|c| c.to_f64());
    (0..samples)
        .map(|i| {
            let s = top * i as f64 / (samples - 1) as f64;
            (s, p.eval(&s))
        })
        .collect()
}

struct Spec {
    key: &'static str,
    title: String,
    family: ConfocalFamily<Mp>,
    alpha: Vec<Mp>,
    n: usize,
    constraint: String,
    constraint_holds: bool,
    conditions: Vec<Condition>,
    witness: Option<(Poly<Mp>, Poly<Mp>)>,
    /// Winding implied by the series conditions alone, when they determine it.
    condition_winding: Option<Vec<usize>>,
}

fn assemble(spec: Spec, opts: &CatalogOptions) -> Result<CatalogEntry> {
    let family = &spec.family;
    let d = family.dim();
    let caustics = classify_caustics(family, &spec.alpha)?;
    let system = interval_system(&caustics);

    let verdict = check_periodicity(family, &caustics, spec.n, &opts.rank)?;
    let cayley = RouteResult {
        periodic: verdict.periodic,
        period: verdict.cartesian_period,
        elliptic_period: verdict.elliptic_period,
        winding: verdict.winding.clone(),
    };

    let force = PellOptions { rank: opts.rank.clone(), force: true };
    let solution = pell_solve(&system, spec.n, &force)?;
    let alternance = analyze_alternance(&solution, &system)?;
    let pell = RouteResult {
        periodic: solution.residual < 1e-30 && alternance.alternance_total == spec.n + 1,
        period: Some(alternance.m[0]),
        elliptic_period: Some(alternance.elliptic_period),
        winding: Some(alternance.m.clone()),
    };
    let equi = equioscillation(&solution, &system, 1000);

    let mut seed = opts.launch.clone();
    seed.fractions.resize(d - 1, 0.5);
    seed.orthant.resize(d, true);
    seed.dir_signs.resize(d - 1, true);
    let (x, v) = launch_from_caustics(family, &caustics, &seed)?;
    let traj = trace(family, &x, &v, 4 * spec.n, opts.closure_tol)?;
    let simulation = if traj.closed {
        let m = count_winding(family, &traj, &caustics, &WindingOptions::for_backend::<Mp>())?;
        RouteResult { periodic: true, period: traj.period, elliptic_period: Some(reduce_winding(&m).1[0]), winding: Some(m) }
    } else {
        RouteResult { periodic: false, period: None, elliptic_period: None, winding: None }
    };
    let reflection_period = jacobi_period(family, &traj, 1e-20);
    let period = traj.period.unwrap_or(spec.n);
    let trajectory = (0..period)
        .map(|k| {
            (
                traj.impacts[k].iter().map(|c| c.to_f64()).collect(),
                traj.directions[k].iter().map(|c| c.to_f64()).collect(),
            )
        })
        .collect();

    let freq = frequency(&caustics.map(|c| c.to_f64()), &opts.quadrature)?;

    Ok(CatalogEntry {
        key: spec.key.to_string(),
        title: spec.title,
        a: family.a().to_vec(),
        alpha: caustics.alpha().to_vec(),
        kinds: caustics.kinds().to_vec(),
        n: spec.n,
        constraint: spec.constraint,
        constraint_holds: spec.constraint_holds,
        conditions: spec.conditions,
        witness: spec.witness,
        verdict,
        condition_winding: spec.condition_winding,
        cayley,
        pell,
        simulation,
        graph: graph(&solution, &system, opts.graph_samples),
        solution,
        alternance,
        equioscillation: equi,
        closure_error: traj.closure_error,
        reflection_period,
        frequency: freq.f,
        trajectory,
    })
}

fn all_hyper1(c: &CausticSet<Mp>) -> bool {
    c.kinds().iter().all(|k| *k == CausticKind::Hyperboloid { index: 1 })
}

/// The four-periodic conditions with `sqrt(Pol)` divided by `(1 - x/alpha_i)`
/// and the truncation evaluated at the other caustic.
fn four_conditions(family: &ConfocalFamily<Mp>, caustics: &CausticSet<Mp>, opts: &RankOptions) -> Result<Vec<Condition>> {
    let check = check_d_plus_1(family, caustics, opts)?;
    let mut out = vec![Condition {
        label: "C3 = 0 and C0 + C1 x + C2 x^2 = 0 at alpha_1, divisor (alpha_2 - x)".into(),
        satisfied: check.satisfied,
        magnitudes: check.vanishing.iter().chain(&check.root_values).cloned().collect(),
    }];
    let alpha = caustics.alpha();
    let divisor = Poly::linear(int(1), -(int(1) / alpha[0].clone()));
    let series = sqrt_series(&interval_system(caustics).normalized_pol(), 4, Some(&divisor), true)?;
    let scale = (0..4).map(|k| series.coeff(k).abs().to_f64()).fold(0.0, f64::max);
    let x = alpha[1].clone();
    let trunc = series.coeff(0) + series.coeff(1) * x.clone() + series.coeff(2) * x.clone() * x;
    let mags = vec![series.coeff(3).abs().to_f64() / scale, trunc.abs().to_f64() / scale];
    out.push(Condition {
        label: "C3 = 0 and C0 + C1 x + C2 x^2 = 0 at alpha_2, divisor (alpha_1 - x)".into(),
        satisfied: mags.iter().all(|m| *m < opts.rel_tol),
        magnitudes: mags,
    });
    Ok(out)
}

fn four_spec(key: &'static str, title: String, family: ConfocalFamily<Mp>, alpha: Vec<Mp>, opts: &RankOptions) -> Result<Spec> {
    let caustics = classify_caustics(&family, &alpha)?;
    let conditions = four_conditions(&family, &caustics, opts)?;
    let holds = conditions[0].satisfied;
    Ok(Spec {
        key,
        title,
        constraint: "both caustics are 1-sheeted hyperboloids".into(),
        constraint_holds: all_hyper1(&caustics),
        conditions,
        witness: None,
        condition_winding: holds.then(|| vec![4, 3, 2]),
        family,
        alpha,
        n: 4,
    })
}

fn six_spec(
    key: &'static str,
    title: String,
    family: ConfocalFamily<Mp>,
    alpha: Vec<Mp>,
    variant: SixVariant,
    opts: &RankOptions,
) -> Result<Spec> {
    let caustics = classify_caustics(&family, &alpha)?;
    let mut conditions = Vec::new();
    let mut witness = None;
    let mut fired = Vec::new();
    for v in SixVariant::ALL {
        match check_six_d3(&family, &alpha[0], &alpha[1], v, opts) {
            Ok(check) => {
                if check.condition {
                    fired.push(v);
                }
                if v == variant {
                    let mut mags = Vec::new();
                    if let Some(rel) = check.b_relative {
                        mags.push(rel);
                    }
                    if let Some(w) = check.witness_defect {
                        mags.push(w);
                    }
                    conditions.push(Condition {
                        label: format!("variant {v} condition"),
                        satisfied: check.satisfied,
                        magnitudes: mags,
                    });
                    witness = check.witness;
                }
            }
            Err(Error::TypeMismatch(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let constraint = if variant.odd() {
        "both caustics are 1-sheeted hyperboloids"
    } else {
        "all winding numbers even; elliptic period 3"
    };
    let constraint_holds = if variant.odd() { all_hyper1(&caustics) } else { true };
    conditions.push(Condition {
        label: format!("conditions holding: {}", fired.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")),
        satisfied: !fired.is_empty(),
        magnitudes: Vec::new(),
    });
    let condition_winding = match fired.as_slice() {
        [v] => Some(v.winding().to_vec()),
        _ => None,
    };
    Ok(Spec { key, title, family, alpha, n: 6, constraint: constraint.into(), constraint_holds, conditions, witness, condition_winding })
}

/// Parameters of a six-periodic family on `a = (1, 4, 5)` by frequency
/// inversion and Pell-Newton polishing at the working precision.
fn polished(endpoints: Vec<EndpointSpec<Mp>>, n: usize, targets: &[f64], start: &[f64], bounds: &[(f64, f64)], quad: &QuadratureOptions) -> Result<Vec<Mp>> {
    let problem = PellProblem { endpoints, n };
    let f64_problem = PellProblem {
        endpoints: problem
            .endpoints
            .iter()
            .map(|e| match e {
                EndpointSpec::Fixed(v) => EndpointSpec::Fixed(v.to_f64()),
                EndpointSpec::Param(i) => EndpointSpec::Param(*i),
            })
            .collect(),
        n,
    };
    let build = |th: &[f64]| f64_problem.system(th);
    let seed = invert_frequency(&build, targets, start, bounds, quad, 60)?;
    let seed: Vec<Mp> = seed.iter().map(|x| Mp::from_f64(*x)).collect();
    Ok(problem.solve(&seed, 80)?.theta)
}

/// Build the full catalog at the current working precision.
pub fn d3_catalog(opts: &CatalogOptions) -> Result<Vec<CatalogEntry>> {
    let rank = &opts.rank;
    let quad = &opts.quadrature;
    let mut specs = Vec::new();

    // four-periodic, generic caustics from the (d+1) construction
    let fam = ConfocalFamily::new(vec![int(2), int(4), int(5)])?;
    let found = find_caustics_d_plus_1(&fam);
    specs.push(four_spec("4-periodic", "4-periodic trajectory, a = (2,4,5)".into(), fam, found.alpha, rank)?);

    // four-periodic along generatrices
    let (a1, al) = hyperboloid_4periodic_exact(&rat(4, 1), &rat(5, 1));
    let fam = ConfocalFamily::new(vec![Mp::from_rational(&a1), int(4), int(5)])?;
    let al = al.to_mp();
    specs.push(four_spec(
        "4-periodic-generatrix",
        format!("4-periodic trajectory on generatrices, a1 = {a1}, alpha = 9-sqrt(41)"),
        fam,
        vec![al.clone(), al],
        rank,
    )?);

    // the ellipsoid-hyperboloid pair inside a = (1,4,5)
    let base = ConfocalFamily::new(vec![int(1), int(4), int(5)])?;
    let pair = unique_pair_in_family(&base)?;
    let shifted = ConfocalFamily::new(pair.shifted.clone())?;
    let al = pair.alpha.clone() - pair.lambda.clone();
    let mut spec = four_spec(
        "4-periodic-unique-pair",
        format!("unique pair in a = (1,4,5): lambda = {:.12}, alpha = {:.12}", pair.lambda, pair.alpha),
        shifted,
        vec![al.clone(), al],
        rank,
    )?;
    spec.constraint = "billiard inside Q_lambda, caustic a 1-sheeted hyperboloid on its generatrices".into();
    specs.push(spec);

    // five-periodic on a = (1,2,5)
    let five = |v: i64| EndpointSpec::Fixed(int(v));
    let theta = polished(
        vec![EndpointSpec::Param(0), five(1), EndpointSpec::Param(1), five(2), five(5)],
        5,
        &[2.0 / 5.0, 4.0 / 5.0],
        &[0.5, 1.5],
        &[(0.0, 1.0), (1.0, 2.0)],
        quad,
    )?;
    let fam = ConfocalFamily::new(vec![int(1), int(2), int(5)])?;
    let caustics = classify_caustics(&fam, &theta)?;
    let check = check_five_d3(&fam, &caustics, rank)?;
    specs.push(Spec {
        key: "5-periodic",
        title: "5-periodic trajectory, a = (1,2,5)".into(),
        constraint: "odd period: one of the caustics is an ellipsoid".into(),
        constraint_holds: caustics.kinds().contains(&CausticKind::Ellipsoid),
        conditions: vec![Condition {
            label: "C3 = C4 = 0, divisor (alpha_1 - x)".into(),
            satisfied: check.satisfied,
            magnitudes: check.vanishing,
        }],
        witness: None,
        condition_winding: check.satisfied.then(|| vec![5, 4, 2]),
        family: fam,
        alpha: theta,
        n: 5,
    });

    // six-periodic, the double hyperboloid of elliptic period 3
    let a1: Mp = "180-80*sqrt(5)".parse()?;
    let al: Mp = "(20/61)*(9-2*sqrt(5))".parse()?;
    let fam = ConfocalFamily::new(vec![a1, int(4), int(5)])?;
    specs.push(six_spec(
        "6-periodic-642-hyperboloid",
        "(6,4,2) on a hyperboloid, a1 = 180-80*sqrt(5), alpha = (20/61)(9-2*sqrt(5))".into(),
        fam,
        vec![al.clone(), al],
        SixVariant::W642,
        rank,
    )?);

    let p = |i| EndpointSpec::Param(i);
    let fixed_145 = |lead: Vec<EndpointSpec<Mp>>| {
        let mut e = vec![EndpointSpec::Fixed(int(1))];
        e.extend(lead);
        e.push(EndpointSpec::Fixed(int(4)));
        e.push(EndpointSpec::Fixed(int(5)));
        e
    };
    let hyper = [(1.0, 4.0), (1.0, 4.0)];
    let fam = ConfocalFamily::new(vec![int(1), int(4), int(5)])?;
    for (key, variant, targets, start) in [
        ("6-periodic-642", SixVariant::W642, [2.0 / 6.0, 4.0 / 6.0], [2.0, 3.0]),
        ("6-periodic-652", SixVariant::W652, [2.0 / 6.0, 5.0 / 6.0], [1.5, 2.5]),
        ("6-periodic-632", SixVariant::W632, [2.0 / 6.0, 3.0 / 6.0], [1.5, 2.5]),
    ] {
        let theta = polished(fixed_145(vec![p(0), p(1)]), 6, &targets, &start, &hyper, quad)?;
        specs.push(six_spec(key, format!("{variant} on a = (1,4,5)"), fam.clone(), theta, variant, rank)?);
    }

    // (6,5,4): free a1 and a double caustic, polished from a1 ~ 3.303, alpha ~ 3.5
    let problem = PellProblem {
        endpoints: vec![p(0), p(1), p(1), EndpointSpec::Fixed(int(4)), EndpointSpec::Fixed(int(5))],
        n: 6,
    };
    let sol = problem.solve(&["3.303".parse()?, "3.5".parse()?], 80)?;
    let fam = ConfocalFamily::new(vec![sol.theta[0].clone(), int(4), int(5)])?;
    specs.push(six_spec(
        "6-periodic-654-hyperboloid",
        format!("(6,5,4) on a hyperboloid, a1 = {:.15}, alpha = {:.15}", sol.theta[0], sol.theta[1]),
        fam,
        vec![sol.theta[1].clone(), sol.theta[1].clone()],
        SixVariant::W654,
        rank,
    )?);

    // five-periodic in dimension four from the (d+1) construction
    let fam = ConfocalFamily::new(vec![int(1), "1.5".parse()?, int(3), int(4)])?;
    let found = find_caustics_d_plus_1(&fam);
    let caustics = classify_caustics(&fam, &found.alpha)?;
    let check = check_d_plus_1(&fam, &caustics, rank)?;
    specs.push(Spec {
        key: "d4-5-periodic",
        title: "5-periodic trajectory in dimension four, a = (1,1.5,3,4)".into(),
        constraint: "alpha_1 an ellipsoid, the other caustics paired in (a_j, a_j+1)".into(),
        constraint_holds: check.type_ok,
        conditions: vec![Condition {
            label: "(d+1)-periodic conditions".into(),
            satisfied: check.satisfied,
            magnitudes: check.vanishing.iter().chain(&check.root_values).cloned().collect(),
        }],
        witness: None,
        condition_winding: check.satisfied.then(|| vec![5, 4, 3, 2]),
        family: fam,
        alpha: found.alpha,
        n: 5,
    });

    specs.into_iter().map(|s| assemble(s, opts)).collect()
}
