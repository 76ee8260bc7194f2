//! Text and CSV renderings of the reports.

use std::fmt::Write as _;

use serde::Serialize;

use crate::commands::write_trajectory;
use crate::error::Result;
use crate::report::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

pub trait Render: Serialize {
    fn text(&self) -> String;
    fn csv(&self, w: &mut csv::Writer<Vec<u8>>) -> Result<()>;
}

pub fn emit<R: Render>(command: &str, report: &R, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&Envelope::new(command, report))?;
            s.push('\n');
            Ok(s)
        }
        Format::Text => Ok(report.text()),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            report.csv(&mut w)?;
            let bytes = w.into_inner().map_err(|e| e.into_error())?;
            Ok(String::from_utf8_lossy(&bytes).into_owned())
        }
    }
}

fn list<T: std::fmt::Display>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn opt_list(v: &Option<Vec<usize>>) -> String {
    v.as_ref().map(|m| list(m)).unwrap_or_else(|| "-".into())
}

fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_else(|| "-".into())
}

fn sim_text(out: &mut String, s: &SimulationReport) {
    let _ = writeln!(
        out,
        "simulation: closed {} period {} closure error {:.3e} winding {} elliptic period {} caustic spread {:.3e}",
        s.closed,
        opt(&s.period),
        s.closure_error,
        opt_list(&s.winding),
        opt(&s.elliptic_period),
        s.caustic_spread
    );
}

impl Render for CheckReport {
    fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "a = {}  alpha = {}", list(&self.a), list(&self.alpha));
        let _ = writeln!(out, "caustics: {}", self.kinds.join(", "));
        let _ = writeln!(out, "n = {}: {}", self.n, if self.periodic { "periodic" } else { "not periodic" });
        let _ = writeln!(out, "reason: {}", self.reason);
        if self.periodic {
            let _ = writeln!(
                out,
                "elliptic period {} cartesian period {} winding {} signature {} pell residual {}",
                opt(&self.elliptic_period),
                opt(&self.cartesian_period),
                opt_list(&self.winding),
                opt_list(&self.signature),
                self.pell_residual.map(|r| format!("{r:.3e}")).unwrap_or_else(|| "-".into())
            );
        }
        if let Some(s) = &self.simulation {
            sim_text(&mut out, s);
        }
        out
    }

    fn csv(&self, w: &mut csv::Writer<Vec<u8>>) -> Result<()> {
        w.write_record(["n", "periodic", "elliptic_period", "cartesian_period", "winding"])?;
        w.write_record([
            self.n.to_string(),
            self.periodic.to_string(),
            opt(&self.elliptic_period),
            opt(&self.cartesian_period),
            opt_list(&self.winding),
        ])?;
        Ok(())
    }
}

impl Render for TrajectoryReport {
    fn text(&self) -> String {
        let mut out = String::new();
        for (k, (x, v)) in self.impacts.iter().zip(&self.directions).enumerate() {
            let _ = writeln!(out, "{k:4}  x = {x:?}  v = {v:?}");
        }
        sim_text(&mut out, &self.simulation);
        out
    }

    fn csv(&self, w: &mut csv::Writer<Vec<u8>>) -> Result<()> {
        write_trajectory(w, self.impacts.iter().zip(&self.directions).map(|(x, v)| (x.as_slice(), v.as_slice())))
    }
}

impl Render for PellReport {
    fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n = {} d = {} residual {:.3e}", self.n, self.d, self.residual);
        let _ = writeln!(out, "p_hat coefficients: {}", list(&self.p));
        let _ = writeln!(out, "q_hat coefficients: {}", list(&self.q));
        let _ = writeln!(
            out,
            "winding {} signature {} elliptic period {} law holds {} band excess {:.3e}",
            list(&self.winding),
            list(&self.signature),
            self.elliptic_period,
            self.law_holds,
            self.band_excess
        );
        out
    }

    fn csv(&self, w: &mut csv::Writer<Vec<u8>>) -> Result<()> {
        w.write_record(["s", "value"])?;
        for (s, v) in &self.graph {
            w.write_record([s.to_string(), v.to_string()])?;
        }
        Ok(())
    }
}

impl Render for DPlusOneReport {
    fn text(&self) -> String {
        format!(
            "gamma = {}\nalpha = {}\nadmissible {}  caustics: {}  conditions hold {}\n",
            self.gamma,
            list(&self.alpha),
            self.admissible,
            self.kinds.join(", "),
            opt(&self.conditions_hold)
        )
    }

    fn csv(&self, w: &mut csv::Writer<Vec<u8>>) -> Result<()> {
        w.write_record(["index", "alpha"])?;
        for (i, a) in self.alpha.iter().enumerate() {
            w.write_record([(i + 1).to_string(), a.clone()])?;
        }
        Ok(())
    }
}

impl Render for Hyperboloid4Report {
    fn text(&self) -> String {
        format!(
            "a1 = {}  ({})\nalpha = {}  ({})\n",
            opt(&self.a1_exact),
            self.a1,
            opt(&self.alpha_exact),
            self.alpha
        )
    }

    fn csv(&self, w: &mut csv::Writer<Vec<u8>>) -> Result<()> {
        w.write_record(["a1", "alpha"])?;
        w.write_record([self.a1.clone(), self.alpha.clone()])?;
        Ok(())
    }
}

impl Render for UniquePairReport {
    fn text(&self) -> String {
        format!("lambda = {}\nalpha = {}\nshifted a = {}\n", self.lambda, self.alpha, list(&self.shifted))
    }

    fn csv(&self, w: &mut csv::Writer<Vec<u8>>) -> Result<()> {
        w.write_record(["lambda", "alpha"])?;
        w.write_record([self.lambda.clone(), self.alpha.clone()])?;
        Ok(())
    }
}

impl Render for FrequencyReport {
    fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "F = {:?}", self.f);
        let _ = writeln!(out, "band measures {:?}  total mass {}", self.band_measures, self.total_mass);
        let fits: Vec<String> = self
            .rational_fit
            .iter()
            .map(|f| f.map(|(p, q)| format!("{p}/{q}")).unwrap_or_else(|| "-".into()))
            .collect();
        let _ = writeln!(out, "rational fit {}", list(&fits));
        let _ = writeln!(out, "monotone {}  eta roots in gaps {}", self.monotone, self.roots_in_gaps);
        out
    }

    fn csv(&self, w: &mut csv::Writer<Vec<u8>>) -> Result<()> {
        w.write_record(["k", "f", "band_measure"])?;
        for (k, (f, m)) in self.f.iter().zip(self.band_measures.iter().rev()).enumerate() {
            w.write_record([(k + 1).to_string(), f.to_string(), m.to_string()])?;
        }
        Ok(())
    }
}

impl Render for RotationSweepReport {
    fn text(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let _ = writeln!(out, "{:.10}  {:.15}", r.lambda, r.rho);
        }
        let _ = writeln!(out, "increasing steps {}  decreasing steps {}", self.increasing_steps, self.decreasing_steps);
        out
    }

    fn csv(&self, w: &mut csv::Writer<Vec<u8>>) -> Result<()> {
        w.write_record(["lambda", "rho"])?;
        for r in &self.rows {
            w.write_record([r.lambda.to_string(), r.rho.to_string()])?;
        }
        Ok(())
    }
}

impl Render for CatalogReport {
    fn text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let _ = writeln!(out, "{}: {}", e.key, e.title);
            let _ = writeln!(out, "  caustics: {}; {} ({})", e.kinds.join(", "), e.constraint, e.constraint_holds);
            for c in &e.conditions {
                let _ = writeln!(out, "  {}: {}", c.label, c.satisfied);
            }
            let _ = writeln!(
                out,
                "  winding cayley {} pell {} simulation {}  signature {}  agree {}",
                opt_list(&e.cayley.winding),
                opt_list(&e.pell.winding),
                opt_list(&e.simulation.winding),
                list(&e.signature),
                e.routes_agree
            );
            let _ = writeln!(
                out,
                "  elliptic period {}  pell residual {:.2e}  closure {:.2e}  F {:?}",
                opt(&e.pell.elliptic_period),
                e.pell_residual,
                e.closure_error,
                e.frequency
            );
        }
        for f in &self.files {
            let _ = writeln!(out, "wrote {f}");
        }
        out
    }

    fn csv(&self, w: &mut csv::Writer<Vec<u8>>) -> Result<()> {
        w.write_record(["key", "n", "winding", "signature", "elliptic_period", "routes_agree"])?;
        for e in &self.entries {
            w.write_record([
                e.key.clone(),
                e.n.to_string(),
                opt_list(&e.pell.winding),
                list(&e.signature),
                opt(&e.pell.elliptic_period),
                e.routes_agree.to_string(),
            ])?;
        }
        Ok(())
    }
}
