use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::records::read_regret;
use crate::Result;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn frame(svg: &mut String, title: &str, x_label: &str, y_label: &str, y_max: f64) {
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">
<rect width="100%" height="100%" fill="white"/>
<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>
<line x1="{MARGIN}" y1="{}" x2="{}" y2="{}" stroke="black"/>
<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{}" stroke="black"/>
<text x="{}" y="{}" text-anchor="middle">{}</text>
<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>
<text x="{}" y="{}" text-anchor="end">{:.3}</text>
<text x="{}" y="{}" text-anchor="end">0</text>
"#,
        WIDTH / 2.0,
        escape(title),
        HEIGHT - MARGIN,
        WIDTH - MARGIN,
        HEIGHT - MARGIN,
        HEIGHT - MARGIN,
        WIDTH / 2.0,
        HEIGHT - 16.0,
        escape(x_label),
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label),
        MARGIN - 4.0,
        MARGIN + 4.0,
        y_max,
        MARGIN - 4.0,
        HEIGHT - MARGIN,
    );
}

/// Line chart of several series against their index.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[(String, Vec<f64>)]) -> String {
    let n = series.iter().map(|(_, v)| v.len()).max().unwrap_or(0).max(2);
    let y_max = series.iter().flat_map(|(_, v)| v.iter().copied()).filter(|v| v.is_finite()).fold(0.0, f64::max).max(1e-9);
    let (pw, ph) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let mut svg = String::new();
    frame(&mut svg, title, x_label, y_label, y_max);
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, WIDTH - MARGIN, HEIGHT - MARGIN + 16.0, n);
    for (k, (name, values)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let points: Vec<String> = values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .map(|(i, v)| {
                let x = MARGIN + pw * (i + 1) as f64 / n as f64;
                let y = HEIGHT - MARGIN - ph * v / y_max;
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, points.join(" "));
        let ly = MARGIN + 16.0 * k as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            MARGIN + 10.0,
            MARGIN + 30.0,
            MARGIN + 34.0,
            ly + 4.0,
            escape(name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Bar chart of labelled values.
pub fn bar_plot(title: &str, y_label: &str, bars: &[(String, f64)]) -> String {
    let y_max = bars.iter().map(|b| b.1).filter(|v| v.is_finite()).fold(0.0, f64::max).max(1e-9);
    let (pw, ph) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let mut svg = String::new();
    frame(&mut svg, title, "", y_label, y_max);
    let slot = pw / bars.len().max(1) as f64;
    for (k, (label, v)) in bars.iter().enumerate() {
        let h = if v.is_finite() { ph * v.max(0.0) / y_max } else { 0.0 };
        let x = MARGIN + slot * k as f64 + slot * 0.15;
        let _ = writeln!(
            svg,
            r#"<rect x="{x:.2}" y="{:.2}" width="{:.2}" height="{h:.2}" fill="{}"/><text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            HEIGHT - MARGIN - h,
            slot * 0.7,
            COLORS[k % COLORS.len()],
            x + slot * 0.35,
            HEIGHT - MARGIN + 16.0,
            escape(label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn read_table(path: &Path) -> Result<Vec<BTreeMap<String, String>>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        rows.push(headers.iter().zip(rec.iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect());
    }
    Ok(rows)
}

fn num(row: &BTreeMap<String, String>, key: &str) -> f64 {
    row.get(key).and_then(|v| v.parse().ok()).unwrap_or(f64::NAN)
}

/// Writes an `.svg` next to every recognised CSV in `dir` and returns their paths.
pub fn plot_dir(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut emit = |name: &str, svg: String| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, svg)?;
        written.push(path);
        Ok(())
    };

    let regret = dir.join("regret.csv");
    if regret.exists() {
        let mut sums: BTreeMap<String, Vec<(f64, usize)>> = BTreeMap::new();
        for r in read_regret(&regret)? {
            let key = format!("{} {}->{}", r.agent, r.dist_train, r.dist_test);
            let v = sums.entry(key).or_default();
            if v.len() <= r.trial {
                v.resize(r.trial + 1, (0.0, 0));
            }
            v[r.trial].0 += r.cumregret;
            v[r.trial].1 += 1;
        }
        let series: Vec<(String, Vec<f64>)> =
            sums.into_iter().map(|(k, v)| (k, v.iter().map(|(s, n)| s / *n as f64).collect())).collect();
        emit("regret.svg", line_plot("Cumulative regret", "trial", "mean cumulative regret", &series))?;
    }

    let curve = dir.join("curve.csv");
    if curve.exists() {
        let rewards: Vec<f64> = read_table(&curve)?.iter().map(|r| num(r, "total_reward")).collect();
        let window = (rewards.len() / 100).max(1);
        let smooth: Vec<f64> = rewards.chunks(window).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect();
        emit(
            "curve.svg",
            line_plot("Training reward", &format!("episode / {window}"), "episode reward", &[("agent".into(), smooth)]),
        )?;
    }

    let stay = dir.join("stayprob.csv");
    if stay.exists() {
        let bars: Vec<(String, f64)> =
            read_table(&stay)?.iter().map(|r| (r.get("condition").cloned().unwrap_or_default(), num(r, "p_stay"))).collect();
        emit("stayprob.svg", bar_plot("Stay probability", "P(stay)", &bars))?;
    }

    let fits = dir.join("fits.csv");
    if fits.exists() {
        let mut by: BTreeMap<String, (f64, usize)> = BTreeMap::new();
        for r in read_table(&fits)?.iter().filter(|r| r.get("model").map(String::as_str) == Some("ab")) {
            let e = by.entry(r.get("volatility").cloned().unwrap_or_default()).or_default();
            e.0 += num(r, "alpha");
            e.1 += 1;
        }
        let bars: Vec<(String, f64)> = by.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect();
        emit("fits.svg", bar_plot("Fitted learning rate (ab)", "mean alpha", &bars))?;
    }
    Ok(written)
}
