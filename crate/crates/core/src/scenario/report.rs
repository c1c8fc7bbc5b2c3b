use std::fmt::Write as _;
use std::io::Write;

/// One residual compared against its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    /// The identity or estimate being checked, written as a formula.
    pub anchor: String,
    pub residual: f64,
    pub threshold: f64,
    pub bound: Bound,
    pub passed: bool,
}

/// Direction of the comparison between residual and threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    AtMost,
    AtLeast,
}

/// Ordered list of checks plus free-form diagnostic values.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerificationReport {
    pub title: String,
    pub checks: Vec<Check>,
    pub notes: Vec<(String, String)>,
}

impl VerificationReport {
    pub fn new(title: impl Into<String>) -> Self {
        Self { title: title.into(), checks: Vec::new(), notes: Vec::new() }
    }

    /// Records `residual ≤ threshold`; a non-finite residual fails.
    pub fn check(&mut self, name: impl Into<String>, anchor: impl Into<String>, residual: f64, threshold: f64) -> bool {
        let passed = residual.is_finite() && residual <= threshold;
        self.checks.push(Check { name: name.into(), anchor: anchor.into(), residual, threshold, bound: Bound::AtMost, passed });
        passed
    }

    /// Records `value ≥ minimum`, for rates and orders.
    pub fn check_at_least(&mut self, name: impl Into<String>, anchor: impl Into<String>, value: f64, minimum: f64) -> bool {
        let passed = value.is_finite() && value >= minimum;
        self.checks.push(Check {
            name: name.into(),
            anchor: anchor.into(),
            residual: value,
            threshold: minimum,
            bound: Bound::AtLeast,
            passed,
        });
        passed
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl ToString) {
        self.notes.push((key.into(), value.to_string()));
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        self.notes.extend(other.notes);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn num_failed(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.title);
        let width = self.checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{} {:<width$}  {} {:.3e}  {} {:.1e}  [{}]",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                if c.bound == Bound::AtMost { "residual" } else { "value" },
                c.residual,
                if c.bound == Bound::AtMost { "threshold" } else { "minimum" },
                c.threshold,
                c.anchor,
            );
        }
        for (k, v) in &self.notes {
            let _ = writeln!(out, "  {k}: {v}");
        }
        let _ = writeln!(
            out,
            "summary: {} checks, {} passed, {} failed",
            self.checks.len(),
            self.checks.len() - self.num_failed(),
            self.num_failed()
        );
        out
    }

    /// Columns `name, anchor, residual, threshold, status`; for lower-bound
    /// checks the threshold is written with a leading `>=`.
    pub fn write_csv(&self, w: impl Write) -> csv::Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["name", "anchor", "residual", "threshold", "status"])?;
        for c in &self.checks {
            wr.write_record([
                c.name.as_str(),
                c.anchor.as_str(),
                &format!("{:e}", c.residual),
                &match c.bound {
                    Bound::AtMost => format!("{:e}", c.threshold),
                    Bound::AtLeast => format!(">={:e}", c.threshold),
                },
                if c.passed { "pass" } else { "fail" },
            ])?;
        }
        wr.flush()?;
        Ok(())
    }
}
