//! Minimal self-contained SVG charts.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;

const PALETTE: [&str; 6] = ["#7b3294", "#d7191c", "#1a9641", "#2c7bb6", "#111111", "#fdae61"];

/// Color used for a series; strategies keep their color across charts.
pub fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn plot_w() -> f64 {
    WIDTH - LEFT - RIGHT
}

fn plot_h() -> f64 {
    HEIGHT - TOP - BOTTOM
}

fn open(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="28" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + plot_w() / 2.0,
        escape(title)
    );
    s
}

fn axes(s: &mut String, x_label: &str, y_label: &str) {
    let (x0, y0) = (LEFT, TOP + plot_h());
    let _ = writeln!(
        s,
        r#"<path d="M{x0} {TOP} L{x0} {y0} L{} {y0}" fill="none" stroke="black"/>"#,
        LEFT + plot_w()
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w() / 2.0,
        HEIGHT - 20.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">{}</text>"#,
        TOP + plot_h() / 2.0,
        TOP + plot_h() / 2.0,
        escape(y_label)
    );
}

fn legend(s: &mut String, names: &[&str]) {
    for (i, name) in names.iter().enumerate() {
        let y = TOP + 10.0 + 20.0 * i as f64;
        let x = WIDTH - RIGHT + 15.0;
        let _ = writeln!(s, r#"<rect x="{x}" y="{}" width="12" height="12" fill="{}"/>"#, y - 10.0, color(i));
        let _ = writeln!(s, r#"<text x="{}" y="{y}">{}</text>"#, x + 18.0, escape(name));
    }
}

pub struct Series<'a> {
    pub name: &'a str,
    /// One entry per x category; `None` leaves a gap.
    pub values: Vec<Option<f64>>,
}

/// Lines over categorical x positions with a log10 y axis.
pub fn line_chart_log(title: &str, x_label: &str, y_label: &str, categories: &[String], series: &[Series<'_>]) -> String {
    let positive: Vec<f64> =
        series.iter().flat_map(|s| s.values.iter().flatten().copied()).filter(|v| *v > 0.0 && v.is_finite()).collect();
    let (lo, hi) = match (
        positive.iter().copied().fold(f64::INFINITY, f64::min),
        positive.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    ) {
        (lo, hi) if lo.is_finite() => (lo.log10().floor(), hi.log10().ceil().max(lo.log10().floor() + 1.0)),
        _ => (-1.0, 0.0),
    };
    let ymap = |v: f64| TOP + plot_h() * (1.0 - (v.log10() - lo) / (hi - lo));
    let n = categories.len().max(1);
    let xmap = |i: usize| LEFT + plot_w() * (i as f64 + 0.5) / n as f64;

    let mut s = open(title);
    axes(&mut s, x_label, y_label);
    for e in lo as i32..=hi as i32 {
        let y = ymap(10f64.powi(e));
        let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#dddddd"/>"##, LEFT + plot_w());
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">1e{e}</text>"#, LEFT - 6.0, y + 4.0);
    }
    for (i, c) in categories.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            xmap(i),
            TOP + plot_h() + 18.0,
            escape(c)
        );
    }
    for (k, ser) in series.iter().enumerate() {
        let pts: Vec<(f64, f64)> = ser
            .values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.filter(|v| *v > 0.0 && v.is_finite()).map(|v| (xmap(i), ymap(v))))
            .collect();
        if pts.len() > 1 {
            let d: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
                d.join(" "),
                color(k)
            );
        }
        for (x, y) in pts {
            let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{}"/>"#, color(k));
        }
    }
    legend(&mut s, &series.iter().map(|s| s.name).collect::<Vec<_>>());
    s.push_str("</svg>\n");
    s
}

pub struct Bar<'a> {
    pub label: &'a str,
    pub mean: f64,
    pub sd: f64,
}

/// Whisker extent `[max(mean - sd, 0), mean + sd]`.
pub fn whisker_range(mean: f64, sd: f64) -> (f64, f64) {
    ((mean - sd).max(0.0), mean + sd)
}

/// Bars with standard-deviation whiskers on a linear axis starting at zero.
pub fn bar_chart(title: &str, y_label: &str, bars: &[Bar<'_>]) -> String {
    let top = bars
        .iter()
        .map(|b| whisker_range(b.mean, b.sd).1)
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max);
    let top = if top > 0.0 { top * 1.1 } else { 1.0 };
    let ymap = |v: f64| TOP + plot_h() * (1.0 - v / top);
    let n = bars.len().max(1);
    let slot = plot_w() / n as f64;

    let mut s = open(title);
    axes(&mut s, "strategy", y_label);
    for t in 0..=5 {
        let v = top * t as f64 / 5.0;
        let y = ymap(v);
        let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#dddddd"/>"##, LEFT + plot_w());
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{v:.2e}</text>"#, LEFT - 6.0, y + 4.0);
    }
    for (i, b) in bars.iter().enumerate() {
        let cx = LEFT + slot * (i as f64 + 0.5);
        let w = slot * 0.6;
        if b.mean.is_finite() {
            let y = ymap(b.mean);
            let _ = writeln!(
                s,
                r#"<rect class="bar" x="{:.2}" y="{y:.2}" width="{w:.2}" height="{:.2}" fill="{}"/>"#,
                cx - w / 2.0,
                ymap(0.0) - y,
                color(i)
            );
            let (lo, hi) = whisker_range(b.mean, b.sd);
            let (ylo, yhi) = (ymap(lo), ymap(hi));
            let _ = writeln!(
                s,
                r##"<path class="whisker" d="M{cx:.2} {ylo:.2} L{cx:.2} {yhi:.2} M{:.2} {yhi:.2} L{:.2} {yhi:.2} M{:.2} {ylo:.2} L{:.2} {ylo:.2}" stroke="#ff8c00" stroke-width="2"/>"##,
                cx - 6.0,
                cx + 6.0,
                cx - 6.0,
                cx + 6.0
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{cx:.2}" y="{}" text-anchor="middle">{}</text>"#,
            TOP + plot_h() + 18.0,
            escape(b.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whiskers_clip_at_zero() {
        assert_eq!(whisker_range(1.0, 3.0), (0.0, 4.0));
        assert_eq!(whisker_range(2.0, 0.5), (1.5, 2.5));
    }

    #[test]
    fn bar_chart_whisker_bottom_is_axis() {
        let svg = bar_chart("t", "MAE", &[Bar { label: "a", mean: 1.0, sd: 3.0 }]);
        let baseline = format!("{:.2}", TOP + plot_h());
        let whisker = svg.lines().find(|l| l.contains("class=\"whisker\"")).unwrap();
        // the lower whisker end sits exactly on the zero line, never below it
        assert!(whisker.contains(&format!(" {baseline} L")), "{whisker}");
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn line_chart_draws_each_series() {
        let cats = vec!["100".to_string(), "200".to_string()];
        let series = [
            Series { name: "equidistant", values: vec![Some(1e-3), Some(5e-4)] },
            Series { name: "random", values: vec![Some(2e-2), None] },
        ];
        let svg = line_chart_log("MAE", "grid", "MAE", &cats, &series);
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("equidistant") && svg.contains("1e-4"));
    }
}
