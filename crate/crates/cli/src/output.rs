use std::path::Path;

use anyhow::Result;
use scl_core::{Report64, Trace64};
use serde::Serialize;

/// `%.15g`: 15 significant digits, trailing zeros dropped, exponent form
/// outside `[1e-5, 1e15)`.
pub fn g15(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.14e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Column names in file order: `t`, `x*`, `u_commanded*`, `u_applied*`,
/// `u_p*`, `u_s*`, `xhat_p*`, `xhat_s*`, `y*`, `y_d*`, indices from 1.
pub fn trace_header(n: usize, m: usize, p: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for (name, k) in [
        ("x", n),
        ("u_commanded", m),
        ("u_applied", m),
        ("u_p", m),
        ("u_s", m),
        ("xhat_p", n),
        ("xhat_s", n),
        ("y", p),
        ("y_d", p),
    ] {
        h.extend((1..=k).map(|i| format!("{name}{i}")));
    }
    h
}

pub fn write_trace_csv(path: &Path, trace: &Trace64) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_path(path)?;
    w.write_record(trace_header(trace.n, trace.m, trace.p))?;
    for r in &trace.rows {
        let mut rec = vec![g15(r.t)];
        for v in [&r.x, &r.u_commanded, &r.u_applied, &r.u_p, &r.u_s, &r.x_hat_p, &r.x_hat_s, &r.y, &r.y_d] {
            rec.extend(v.iter().map(|&x| g15(x)));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
pub struct RunReport<'a> {
    pub example: &'a str,
    pub method: &'a str,
    pub scenario: Option<&'a str>,
    pub dt: f64,
    pub t_end: f64,
    #[serde(flatten)]
    pub report: &'a Report64,
    pub singular_transits: &'a [f64],
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
