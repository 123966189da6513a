//! Named checks of the eigenvalue bounds against measured and analytic
//! quantities, experiment spec files and self-contained reports.
//!
//! A check only passes or fails when there is an inequality that can be
//! asserted without the unspecified abstract constants; everything else is
//! `reported`, and reported outcomes never affect the exit status.

mod checks;
mod spec;

pub use checks::{
    check_lemma_l2_grid, check_lemma_l6_grid, check_lipschitz, check_pinching, check_prop_p3, check_prop_p4,
    check_theorem_t3, check_weitzenboeck, prop_p5_implication, T3Measurement,
};
pub use spec::{budget_for, BudgetOverrides, CheckConfig, ExperimentSpec, Grid};

use std::fmt::Write as _;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// A measured or evaluated quantity with nothing to assert.
    Reported,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Reported => "reported",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub status: Status,
    pub measured: Vec<Quantity>,
    pub bounds: Vec<Quantity>,
    pub tolerance: Option<f64>,
    pub notes: Vec<String>,
}

impl CheckOutcome {
    pub fn new(name: impl Into<String>, status: Status) -> Self {
        CheckOutcome {
            name: name.into(),
            status,
            measured: Vec::new(),
            bounds: Vec::new(),
            tolerance: None,
            notes: Vec::new(),
        }
    }

    pub fn measure(&mut self, label: impl Into<String>, value: f64) {
        self.measured.push(Quantity { label: label.into(), value });
    }

    pub fn bound(&mut self, label: impl Into<String>, value: f64) {
        self.bounds.push(Quantity { label: label.into(), value });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Sets the status from an assertion, keeping `Fail` once set.
    pub fn assert(&mut self, ok: bool) {
        self.status = match (self.status, ok) {
            (Status::Fail, _) | (_, false) => Status::Fail,
            _ => Status::Pass,
        };
    }

    pub fn measured_value(&self, label: &str) -> Option<f64> {
        self.measured.iter().find(|q| q.label == label).map(|q| q.value)
    }

    pub fn bound_value(&self, label: &str) -> Option<f64> {
        self.bounds.iter().find(|q| q.label == label).map(|q| q.value)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub reported: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub name: String,
    /// Seconds since the Unix epoch; the only field that differs between
    /// two runs of the same spec.
    pub generated_unix: u64,
    pub spec: ExperimentSpec,
    pub outcomes: Vec<CheckOutcome>,
    pub summary: Summary,
}

impl Report {
    /// True when no assertable check failed.
    pub fn success(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let report: Report = serde_json::from_str(&text).map_err(|e| Error::Parse {
            location: format!("{}:{}:{}", path.display(), e.line(), e.column()),
            message: e.to_string(),
        })?;
        if report.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse {
                location: path.display().to_string(),
                message: format!("unsupported schema_version {}", report.schema_version),
            });
        }
        Ok(report)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    /// One row per outcome: `name,status,tolerance,measured,bounds,notes`.
    pub fn write_outcomes_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["name", "status", "tolerance", "measured", "bounds", "notes"])?;
        for o in &self.outcomes {
            w.write_record([
                o.name.clone(),
                o.status.to_string(),
                o.tolerance.map(|t| format!("{t:e}")).unwrap_or_default(),
                o.measured.len().to_string(),
                o.bounds.len().to_string(),
                o.notes.join("; "),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Long format: `check,kind,label,value` with kind `measured` or `bound`.
    pub fn write_quantities_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["check", "kind", "label", "value"])?;
        for o in &self.outcomes {
            for (kind, list) in [("measured", &o.measured), ("bound", &o.bounds)] {
                for q in list {
                    w.write_record([o.name.as_str(), kind, q.label.as_str(), &format!("{:e}", q.value)])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `report.json`, `outcomes.csv` and `quantities.csv` into `dir`.
    pub fn write_all(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        self.write_json(&dir.join("report.json"))?;
        self.write_outcomes_csv(std::fs::File::create(dir.join("outcomes.csv"))?)?;
        self.write_quantities_csv(std::fs::File::create(dir.join("quantities.csv"))?)?;
        Ok(())
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# {}\n", if self.name.is_empty() { "report" } else { &self.name }).unwrap();
        writeln!(
            s,
            "{} passed, {} failed, {} reported\n",
            self.summary.passed, self.summary.failed, self.summary.reported
        )
        .unwrap();
        writeln!(s, "| check | status | key values | notes |").unwrap();
        writeln!(s, "|---|---|---|---|").unwrap();
        for o in &self.outcomes {
            let values: Vec<String> =
                o.measured.iter().take(4).map(|q| format!("{} = {:e}", q.label, q.value)).collect();
            let more = if o.measured.len() > 4 { format!(" (+{})", o.measured.len() - 4) } else { String::new() };
            let notes = o.notes.join("; ").replace('|', "\\|");
            writeln!(s, "| {} | {} | {}{} | {} |", o.name, o.status, values.join(", "), more, notes).unwrap();
        }
        s
    }
}

fn summarize(outcomes: &[CheckOutcome]) -> Summary {
    let mut s = Summary::default();
    for o in outcomes {
        match o.status {
            Status::Pass => s.passed += 1,
            Status::Fail => s.failed += 1,
            Status::Reported => s.reported += 1,
        }
    }
    s
}

/// Runs every configured check. Checks run concurrently; outcomes keep the
/// order of the spec.
pub fn run_spec(spec: &ExperimentSpec) -> Result<Report> {
    spec.validate()?;
    let results = par::map_slice(&spec.checks, |c| c.run(spec));
    let mut outcomes = Vec::new();
    for r in results {
        outcomes.extend(r?);
    }
    let generated_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        name: spec.name.clone(),
        generated_unix,
        spec: spec.clone(),
        summary: summarize(&outcomes),
        outcomes,
    })
}

/// Loads a JSON spec file and runs it.
pub fn run_suite(path: &Path) -> Result<Report> {
    run_spec(&ExperimentSpec::load(path)?)
}

/// The spec shipped with the crate; every assertable check in it passes.
pub const DEFAULT_SPEC: &str = include_str!("../../specs/default.json");
