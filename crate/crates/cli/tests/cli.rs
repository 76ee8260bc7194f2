use std::path::PathBuf;
use std::process::{Command, Output};

use confocal_billiards_cli::report::{
    CatalogReport, CheckReport, Envelope, FrequencyReport, Hyperboloid4Report, PellReport, TrajectoryReport, SCHEMA,
};
use serde::de::DeserializeOwned;

const HYP642_A: &str = "180-80*sqrt(5),4,5";
const HYP642_ALPHA: &str = "(20/61)*(9-2*sqrt(5)),(20/61)*(9-2*sqrt(5))";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_confocal-billiards")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json<R: DeserializeOwned>(args: &[&str]) -> Envelope<R> {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = run(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let env: Envelope<R> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(env.schema, SCHEMA);
    env
}

#[test]
fn double_hyperboloid_six_periodic_check() {
    let env: Envelope<CheckReport> = json(&["check", "--a", HYP642_A, "--alpha", HYP642_ALPHA, "--n", "6", "--simulate"]);
    assert_eq!(env.command, "check");
    let r = env.report;
    assert!(r.periodic);
    assert_eq!(r.winding, Some(vec![6, 4, 2]));
    assert_eq!((r.elliptic_period, r.cartesian_period), (Some(3), Some(6)));
    let sim = r.simulation.unwrap();
    assert_eq!(sim.period, Some(6));
    assert_eq!(sim.winding, Some(vec![6, 4, 2]));
}

#[test]
fn text_output_reports_a_negative_verdict() {
    let out = run(&["check", "--a", "2,4,5", "--alpha", "3,3.7", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("not periodic"));
}

#[test]
fn json_round_trip() {
    let args = ["check", "--a", "1,2", "--alpha", "4*sqrt(3)-6", "--n", "3"];
    let env: Envelope<CheckReport> = json(&args);
    let text = serde_json::to_string(&env).unwrap();
    let back: Envelope<CheckReport> = serde_json::from_str(&text).unwrap();
    assert_eq!(back, env);
    assert_eq!(env.report.winding, Some(vec![3, 2]));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["check", "--a", "1,2", "--alpha", "sqrt(3", "--n", "3"][..],
        &["--precision", "32", "check", "--a", "1,2", "--alpha", "0.5", "--n", "3"],
        &["check", "--a", "1,2", "--alpha", "0.5"],
        &["freq", "--a", "1,2", "--sweep-lambda", "0.9:0.1:3"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn domain_errors_exit_with_one() {
    let out = run(&["check", "--a", "1,2", "--alpha", "0.5", "--n", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["check", "--a", "1,4,5", "--alpha", "0.3,0.6", "--n", "4"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn generatrix_closed_form() {
    let r: Hyperboloid4Report = json::<Hyperboloid4Report>(&["find", "hyperboloid4", "--a2", "4", "--a3", "5"]).report;
    assert_eq!(r.a1_exact.as_deref(), Some("20/9"));
    assert_eq!(r.alpha_exact.as_deref(), Some("9-sqrt(41)"));
    assert!((r.alpha.parse::<f64>().unwrap() - (9.0 - 41f64.sqrt())).abs() < 1e-15);
}

#[test]
fn csv_headers() {
    let out = run(&["--format", "csv", "simulate", "--a", "1,2", "--alpha", "4*sqrt(3)-6", "--bounces", "3"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("bounce_index,x1,x2,v1,v2"));
    assert_eq!(lines.count(), 4);

    let out = run(&["--format", "csv", "pell", "--a", "1,2", "--alpha", "4*sqrt(3)-6", "--n", "3", "--samples", "5"]);
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("s,value"));
    assert_eq!(text.lines().count(), 6);

    let out = run(&["--format", "csv", "freq", "--a", "1,2", "--sweep-lambda", "0.1:0.9:5"]);
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("lambda,rho"));
    let rho: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(rho.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn pell_and_frequency_reports() {
    let args = ["--a", "1,2", "--alpha", "4*sqrt(3)-6"];
    let p: PellReport = json::<PellReport>(&[&["pell", "--n", "3"][..], &args].concat()).report;
    assert_eq!(p.winding, vec![3, 2]);
    assert!(p.law_holds && p.residual < 1e-60);
    assert_eq!(p.p[0].parse::<f64>().unwrap(), -1.0);
    let f: FrequencyReport = json::<FrequencyReport>(&[&["freq"][..], &args].concat()).report;
    assert_eq!(f.rational_fit, vec![Some((2, 3)), Some((1, 1))]);
}

#[test]
fn seeded_simulation_is_reproducible() {
    let args = ["--seed", "11", "simulate", "--a", "1,4,5", "--alpha", "0.5,2.5", "--bounces", "5"];
    let a: TrajectoryReport = json::<TrajectoryReport>(&args).report;
    let b: TrajectoryReport = json::<TrajectoryReport>(&args).report;
    assert_eq!(a, b);
    let c: TrajectoryReport = json::<TrajectoryReport>(&[&["--seed", "12"][..], &args[2..]].concat()).report;
    assert_ne!(a.impacts[0], c.impacts[0]);
}

#[test]
fn catalog_writes_csv_files() {
    let dir: PathBuf = std::env::temp_dir().join(format!("confocal-billiards-cli-{}", std::process::id()));
    let r: CatalogReport = json::<CatalogReport>(&["catalog", "--out", dir.to_str().unwrap()]).report;
    assert_eq!(r.entries.len(), 10);
    assert!(r.entries.iter().all(|e| e.routes_agree));
    assert_eq!(r.files.len(), 20);
    for f in &r.files {
        let text = std::fs::read_to_string(f).unwrap();
        let header = text.lines().next().unwrap();
        assert!(header == "s,value" || header.starts_with("bounce_index,x1"), "{f}: {header}");
    }
    std::fs::remove_dir_all(&dir).unwrap();
}
