//! Self-contained SVG line charts built from the sweep CSV alone, so deleting
//! the charts and re-rendering reproduces them byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{HarnessError, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// One curve: mean cumulative loss over seeds at each checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub algorithm: String,
    pub points: Vec<(f64, f64)>,
}

/// Groups sweep rows by value and algorithm (in order of first appearance)
/// and averages `cum_loss` over seeds at every checkpoint.
pub fn mean_series(csv: &str) -> Result<Vec<(String, Vec<Series>)>> {
    let mut values: Vec<(String, Vec<(String, BTreeMap<u64, (f64, usize)>)>)> = Vec::new();
    for (n, line) in csv.lines().enumerate().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 6 {
            return Err(HarnessError::usage(format!("sweep CSV line {}: expected 6 columns", n + 1)));
        }
        let bad = |what: &str| HarnessError::usage(format!("sweep CSV line {}: bad {what}", n + 1));
        let t: u64 = cells[3].parse().map_err(|_| bad("checkpoint"))?;
        let loss: f64 = cells[4].parse().map_err(|_| bad("cum_loss"))?;
        let value = match values.iter().position(|(v, _)| v == cells[0]) {
            Some(p) => p,
            None => {
                values.push((cells[0].to_string(), Vec::new()));
                values.len() - 1
            }
        };
        let algs = &mut values[value].1;
        let alg = match algs.iter().position(|(a, _)| a == cells[1]) {
            Some(p) => p,
            None => {
                algs.push((cells[1].to_string(), BTreeMap::new()));
                algs.len() - 1
            }
        };
        let slot = algs[alg].1.entry(t).or_insert((0.0, 0));
        slot.0 += loss;
        slot.1 += 1;
    }
    Ok(values
        .into_iter()
        .map(|(v, algs)| {
            let series = algs
                .into_iter()
                .map(|(algorithm, pts)| Series {
                    algorithm,
                    points: pts.into_iter().map(|(t, (sum, n))| (t as f64, sum / n as f64)).collect(),
                })
                .collect();
            (v, series)
        })
        .collect())
}

/// One `chart_<param>_<value>.svg` per swept value.
pub fn render_charts(csv: &str, param: &str) -> Result<Vec<(String, String)>> {
    Ok(mean_series(csv)?
        .into_iter()
        .map(|(value, series)| {
            let title = format!("{param} = {value}: mean cumulative loss");
            (format!("chart_{param}_{value}.svg"), line_chart(&title, &series))
        })
        .collect())
}

/// Round tick spacing giving at most `max_ticks` intervals over `[0, hi]`.
pub fn tick_step(hi: f64, max_ticks: usize) -> f64 {
    if !(hi > 0.0) {
        return 1.0;
    }
    let raw = hi / max_ticks as f64;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * mag)
}

fn label(x: f64) -> String {
    if x != 0.0 && (x.abs() >= 1e6 || x.abs() < 1e-2) {
        format!("{x:.1e}")
    } else if x.fract() == 0.0 {
        format!("{x}")
    } else {
        format!("{x:.2}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn line_chart(title: &str, series: &[Series]) -> String {
    let pts = series.iter().flat_map(|s| &s.points);
    let x_max = pts.clone().map(|p| p.0).fold(1.0, f64::max);
    let y_max = pts.map(|p| p.1).filter(|y| y.is_finite()).fold(0.0, f64::max);
    let (x_step, y_step) = (tick_step(x_max, 5), tick_step(y_max, 5));
    let x_top = (x_max / x_step).ceil() * x_step;
    let y_top = ((y_max / y_step).ceil() * y_step).max(y_step);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + x / x_top * plot_w;
    let py = |y: f64| TOP + plot_h - y / y_top * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let mut tick = 0.0;
    while tick <= x_top + x_step * 1e-9 {
        let x = px(tick);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            TOP,
            TOP + plot_h,
            TOP + plot_h + 18.0,
            label(tick)
        );
        tick += x_step;
    }
    let mut tick = 0.0;
    while tick <= y_top + y_step * 1e-9 {
        let y = py(tick);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0,
            label(tick)
        );
        tick += y_step;
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 16.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">cumulative loss</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    for (n, s) in series.iter().enumerate() {
        let color = PALETTE[n % PALETTE.len()];
        // The curve starts at the origin: nothing is lost before step 1.
        let mut path = format!("{:.2},{:.2}", px(0.0), py(0.0));
        for &(x, y) in &s.points {
            let _ = write!(path, " {:.2},{:.2}", px(x), py(y));
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{path}"/>"#
        );
        let ly = TOP + 16.0 + 18.0 * n as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            LEFT + 12.0,
            LEFT + 36.0,
            LEFT + 42.0,
            ly + 4.0,
            escape(&s.algorithm)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    const CSV: &str = "param_value,algorithm,seed,T_checkpoint,cum_loss,cum_regret
0.1,ee,1,10,4,1
0.1,ee,1,100,40,2
0.1,ucb,1,10,2,0
0.1,ucb,1,100,10,0
0.1,ee,2,10,6,1
0.1,ee,2,100,60,2
0.1,ucb,2,10,4,0
0.1,ucb,2,100,30,0
4,ee,1,100,7,7
";

    #[test]
    fn series_average_over_seeds() {
        let groups = mean_series(CSV).unwrap();
        assert_eq!(groups.len(), 2);
        let (value, series) = &groups[0];
        assert_eq!(value, "0.1");
        assert_eq!(series[0].algorithm, "ee");
        assert_eq!(series[0].points, vec![(10.0, 5.0), (100.0, 50.0)]);
        assert_eq!(series[1].points, vec![(10.0, 3.0), (100.0, 20.0)]);
        assert_eq!(groups[1].1[0].points, vec![(100.0, 7.0)]);
    }

    #[test]
    fn one_chart_per_value_with_a_curve_per_algorithm() {
        let charts = render_charts(CSV, "alpha").unwrap();
        let names: Vec<&str> = charts.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, vec!["chart_alpha_0.1.svg", "chart_alpha_4.svg"]);
        let svg = &charts[0].1;
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(">ee</text>") && svg.contains(">ucb</text>"));
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(render_charts(CSV, "alpha").unwrap(), charts);
    }

    #[test]
    fn ticks_are_round() {
        assert_eq!(tick_step(100_000.0, 5), 20_000.0);
        assert_eq!(tick_step(7.0, 5), 2.0);
        assert_eq!(tick_step(0.0, 5), 1.0);
        assert!(mean_series("h\n1,2,3\n").is_err());
    }
}
