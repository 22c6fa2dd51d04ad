//! Minimal standalone SVG line plots of sweep results.

use std::fmt::Write as _;

use astars_core::analytic::MetricKind;

use crate::sweep::{AxisValue, SweepResult};

const W: f64 = 720.0;
const H: f64 = 460.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

struct Series {
    label: String,
    line: Vec<(f64, f64)>,
    marks: Vec<(f64, f64)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn collect(result: &SweepResult, metric: MetricKind) -> Vec<Series> {
    let mut out: Vec<Series> = Vec::new();
    let index_of =
        |v: AxisValue| result.spec.values.iter().position(|&x| x == v).unwrap_or(0) as f64;
    for r in result.rows_for(metric) {
        let x = match r.axis_value {
            AxisValue::Scalar(x) => x,
            pair => index_of(pair),
        };
        let label = match r.mode {
            Some(m) => format!("{} {}", r.scheme.tag(), m.tag()),
            None => r.scheme.tag().to_string(),
        };
        let pos = match out.iter().position(|s| s.label == label) {
            Some(p) => p,
            None => {
                out.push(Series {
                    label,
                    line: Vec::new(),
                    marks: Vec::new(),
                });
                out.len() - 1
            }
        };
        if let Some(a) = r.analytic {
            out[pos].line.push((x, a));
        }
        if let Some(e) = r.mc {
            out[pos].marks.push((x, e.mean));
        }
    }
    out
}

/// Line plot of analytic values (lines) and Monte Carlo means (circles).
pub fn sweep_svg(result: &SweepResult, metric: MetricKind, title: &str) -> String {
    let series = collect(result, metric);
    let all = || series.iter().flat_map(|s| s.line.iter().chain(&s.marks));
    let log_y = metric.is_probability() && all().any(|p| p.1 > 0.0);
    let ty = |y: f64| if log_y { y.log10() } else { y };
    let usable = |p: &&(f64, f64)| !log_y || p.1 > 0.0;

    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in all().filter(usable) {
        x0 = x0.min(p.0);
        x1 = x1.max(p.0);
        y0 = y0.min(ty(p.1));
        y1 = y1.max(ty(p.1));
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if log_y {
        y0 = y0.floor().max(y1 - 12.0);
        y1 = y1.ceil();
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y1 = y0 + 1.0;
    }
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (ty(y).clamp(y0, y1) - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + pw / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=5 {
        let x = x0 + (x1 - x0) * i as f64 / 5.0;
        let px = sx(x);
        let _ = writeln!(
            s,
            r##"<line x1="{px}" y1="{}" x2="{px}" y2="{}" stroke="#ddd"/>"##,
            TOP,
            TOP + ph
        );
        let _ = writeln!(
            s,
            r#"<text x="{px}" y="{}" text-anchor="middle">{}</text>"#,
            TOP + ph + 16.0,
            (x * 100.0).round() / 100.0
        );
    }
    let yticks: Vec<f64> = if log_y {
        let step = ((y1 - y0) / 6.0).ceil().max(1.0);
        let mut v = Vec::new();
        let mut e = y0;
        while e <= y1 + 1e-9 {
            v.push(e);
            e += step;
        }
        v
    } else {
        (0..=5).map(|i| y0 + (y1 - y0) * i as f64 / 5.0).collect()
    };
    for t in yticks {
        let py = TOP + ph - (t - y0) / (y1 - y0) * ph;
        let label = if log_y {
            format!("1e{t}")
        } else {
            format!("{}", (t * 1000.0).round() / 1000.0)
        };
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{py}" x2="{}" y2="{py}" stroke="#ddd"/>"##,
            LEFT + pw
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{label}</text>"#,
            LEFT - 6.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        H - 12.0,
        result.spec.axis.tag()
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" transform="rotate(-90 16 {})" text-anchor="middle">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        metric.tag()
    );

    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = ser
            .line
            .iter()
            .filter(usable)
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        if pts.len() > 1 {
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            );
        }
        for &(x, y) in ser.marks.iter().filter(usable) {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="none" stroke="{color}"/>"#,
                sx(x),
                sy(y)
            );
        }
        let ly = TOP + 14.0 + 18.0 * i as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{run_sweep, RunOptions, SweepSpec};
    use astars_core::model::NetworkConfig;

    #[test]
    fn svg_is_well_formed() {
        let cfg = NetworkConfig {
            quad_k: 30,
            quad_u: 30,
            quad_q: 30,
            cheb_n: 30,
            ..NetworkConfig::table_one()
        };
        let spec = SweepSpec {
            monte_carlo: false,
            ..SweepSpec::budget(&[0.0, 10.0, 20.0], &[MetricKind::OutageR])
        };
        let res = run_sweep(
            &cfg,
            &spec,
            RunOptions {
                trials: 1000,
                seed: 0,
            },
        )
        .unwrap();
        let svg = sweep_svg(&res, MetricKind::OutageR, "a < b");
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("a &lt; b"));
        assert!(svg.contains("astars_noma ipsic"));
    }
}
