use std::fmt::Write as _;

use serde::Serialize;

use super::PerformanceReport;
use crate::bench::Method;
use crate::plant::Example3Scenario;
use crate::Scalar;

/// Placeholder for cells without indices (unstable or aborted runs).
pub const DASH: &str = "-";

#[derive(Debug, Clone, Serialize)]
pub struct Table1Cell<T> {
    pub scenario: Example3Scenario,
    pub method: Method,
    pub report: PerformanceReport<T>,
}

/// IAE/ITAE of every method in every scenario of the mismatched plant:
/// methods as columns, one IAE and one ITAE row per scenario.
#[derive(Debug, Clone, Serialize)]
pub struct Table1<T> {
    pub cells: Vec<Table1Cell<T>>,
}

impl<T: Scalar> Table1<T> {
    pub fn cell(&self, scenario: Example3Scenario, method: Method) -> Option<&PerformanceReport<T>> {
        self.cells
            .iter()
            .find(|c| c.scenario == scenario && c.method == method)
            .map(|c| &c.report)
    }

    pub fn iae(&self, scenario: Example3Scenario, method: Method) -> Option<T> {
        self.cell(scenario, method).and_then(|r| r.iae)
    }

    pub fn itae(&self, scenario: Example3Scenario, method: Method) -> Option<T> {
        self.cell(scenario, method).and_then(|r| r.itae)
    }

    fn rows(&self) -> Vec<(String, &'static str, Vec<String>)> {
        let mut out = Vec::new();
        for s in Example3Scenario::ALL {
            for (name, itae) in [("IAE", false), ("ITAE", true)] {
                let values = Method::ALL
                    .iter()
                    .map(|&m| {
                        let v = if itae { self.itae(s, m) } else { self.iae(s, m) };
                        v.map_or_else(|| DASH.to_string(), |v| format!("{:.3}", v.as_f64()))
                    })
                    .collect();
                out.push((format!("({})", s.label()), name, values));
            }
        }
        out
    }

    /// Header `scenario,index,SCLC,JLC,FLC,RFLC,ADRC`, then eight rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("scenario,index");
        for m in Method::ALL {
            s.push(',');
            s.push_str(m.label());
        }
        s.push('\n');
        for (scenario, index, values) in self.rows() {
            let _ = writeln!(s, "{scenario},{index},{}", values.join(","));
        }
        s
    }

    /// Aligned plain-text rendering with a note on the error signal and the
    /// marking of unstable cells.
    pub fn to_text(&self) -> String {
        let mut s = format!("{:<6}{:<6}", "", "");
        for m in Method::ALL {
            let _ = write!(s, "{:>10}", m.label());
        }
        s.push('\n');
        for (scenario, index, values) in self.rows() {
            let _ = write!(s, "{scenario:<6}{index:<6}");
            for v in values {
                let _ = write!(s, "{v:>10}");
            }
            s.push('\n');
        }
        let signal = self
            .cells
            .first()
            .map_or("e = y_d - y", |c| c.report.error_signal.describe());
        let _ = writeln!(s, "\n{signal}, trapezoidal integration over the full horizon.");
        let _ = writeln!(s, "{DASH}: run diverged or the input transformation hit its singularity.");
        let singular: Vec<String> = self
            .cells
            .iter()
            .filter(|c| c.report.singular && c.report.has_indices())
            .map(|c| format!("{}({})", c.method.label(), c.scenario.label()))
            .collect();
        if !singular.is_empty() {
            let _ = writeln!(s, "crossed the singular manifold (indices kept): {}", singular.join(", "));
        }
        s
    }
}
