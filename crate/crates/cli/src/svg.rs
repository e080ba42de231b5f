//! Minimal polyline charts: one panel for the states, one for the input.

use std::fmt::Write as _;

use scl_core::Trace64;

const WIDTH: f64 = 800.0;
const PANEL: f64 = 260.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const GAP: f64 = 60.0;
const MAX_POINTS: usize = 2000;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

struct Series {
    name: String,
    values: Vec<f64>,
}

fn panel(svg: &mut String, top: f64, times: &[f64], series: &[Series], y_label: &str) {
    let (t0, t1) = (times.first().copied().unwrap_or(0.0), times.last().copied().unwrap_or(1.0));
    let t1 = if t1 > t0 { t1 } else { t0 + 1.0 };
    let all = series.iter().flat_map(|s| s.values.iter().copied()).filter(|v| v.is_finite());
    let (mut lo, mut hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (lo, hi) = (-1.0, 1.0);
    }
    if hi - lo < 1e-12 {
        (lo, hi) = (lo - 1.0, hi + 1.0);
    }
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let w = WIDTH - MARGIN_L - MARGIN_R;
    let sx = |t: f64| MARGIN_L + (t - t0) / (t1 - t0) * w;
    let sy = |v: f64| top + PANEL - (v - lo) / (hi - lo) * PANEL;

    let _ = writeln!(
        svg,
        r##"<rect x="{MARGIN_L}" y="{top}" width="{w}" height="{PANEL}" fill="none" stroke="#444"/>"##
    );
    for (v, anchor_y) in [(lo, top + PANEL), (hi, top + 10.0)] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{anchor_y}" font-size="11" text-anchor="end">{v:.3}</text>"#,
            MARGIN_L - 5.0
        );
    }
    if lo < 0.0 && hi > 0.0 {
        let _ = writeln!(
            svg,
            r##"<line x1="{MARGIN_L}" y1="{0:.2}" x2="{1}" y2="{0:.2}" stroke="#bbb" stroke-dasharray="4 3"/>"##,
            sy(0.0),
            MARGIN_L + w
        );
    }
    let base = top + PANEL + 15.0;
    let _ = writeln!(svg, r#"<text x="{MARGIN_L}" y="{base}" font-size="11">{t0:.1}</text>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="{base}" font-size="11" text-anchor="end">{t1:.1}</text>"#, MARGIN_L + w);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">t [s]</text>"#,
        MARGIN_L + w / 2.0,
        base + 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{0}" font-size="12" text-anchor="middle" transform="rotate(-90 15 {0})">{y_label}</text>"#,
        top + PANEL / 2.0
    );

    let stride = times.len().div_ceil(MAX_POINTS).max(1);
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut points = String::new();
        for k in (0..times.len()).step_by(stride).chain(times.len().checked_sub(1)) {
            let v = s.values[k];
            if v.is_finite() {
                let _ = write!(points, "{:.2},{:.2} ", sx(times[k]), sy(v));
            }
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.trim_end()
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="11" fill="{color}">{}</text>"#,
            MARGIN_L + 10.0 + 90.0 * i as f64,
            top - 8.0,
            s.name
        );
    }
}

/// States (and the reference when it is nonzero) over time, then applied
/// and commanded input.
pub fn trace_svg(trace: &Trace64, title: &str) -> String {
    let times: Vec<f64> = trace.times().collect();
    let col = |f: &dyn Fn(&scl_core::plant::TraceRow<f64>) -> f64| trace.rows.iter().map(f).collect::<Vec<_>>();
    let mut states: Vec<Series> = (0..trace.n)
        .map(|i| Series { name: format!("x{}", i + 1), values: col(&|r| r.x[i]) })
        .collect();
    if trace.rows.iter().any(|r| r.y_d[0] != 0.0) {
        states.push(Series { name: "y_d".into(), values: col(&|r| r.y_d[0]) });
    }
    let mut inputs = Vec::new();
    for j in 0..trace.m {
        inputs.push(Series { name: format!("u_applied{}", j + 1), values: col(&|r| r.u_applied[j]) });
        if trace.rows.iter().any(|r| r.u_applied[j] != r.u_commanded[j]) {
            inputs.push(Series { name: format!("u_commanded{}", j + 1), values: col(&|r| r.u_commanded[j]) });
        }
    }
    let height = MARGIN_T + 2.0 * PANEL + GAP + 50.0;
    let mut svg = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">
"#
    );
    let _ = writeln!(svg, r#"<text x="{}" y="14" font-size="13" text-anchor="middle">{title}</text>"#, WIDTH / 2.0);
    panel(&mut svg, MARGIN_T + 10.0, &times, &states, "state");
    panel(&mut svg, MARGIN_T + 10.0 + PANEL + GAP, &times, &inputs, "input");
    svg.push_str("</svg>\n");
    svg
}
