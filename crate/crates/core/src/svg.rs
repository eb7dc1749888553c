//! Static SVG charts: allocated shares as lines, value added as stacked areas.

use std::fmt::Write as _;

use crate::economics::ValueAddedTable;
use crate::level::AutomationLevel;
use crate::scenario::ScenarioRun;

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 130.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;

fn colour(level: AutomationLevel) -> &'static str {
    match level {
        AutomationLevel::L0 => "#9e9e9e",
        AutomationLevel::L1 => "#8fbbd9",
        AutomationLevel::L2 => "#1f77b4",
        AutomationLevel::L3 => "#ff7f0e",
        AutomationLevel::L4 => "#2ca02c",
        AutomationLevel::L5 => "#d62728",
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Frame {
    first_year: i32,
    last_year: i32,
    y_max: f64,
}

impl Frame {
    fn x(&self, year: i32) -> f64 {
        let span = (self.last_year - self.first_year).max(1) as f64;
        LEFT + (year - self.first_year) as f64 / span * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, value: f64) -> f64 {
        let h = HEIGHT - TOP - BOTTOM;
        TOP + h - (value / self.y_max).clamp(0.0, 1.0) * h
    }
}

/// Rounds `max` up to a 1/2/5 step and returns (axis maximum, tick step).
fn nice_axis(max: f64) -> (f64, f64) {
    if !(max > 0.0) {
        return (1.0, 0.2);
    }
    let raw = max / 5.0;
    let magnitude = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * magnitude)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * magnitude);
    ((max / step).ceil() * step, step)
}

fn open(svg: &mut String, title: &str, manifest_hash: &str) {
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, "<!-- avdiff run {manifest_hash} -->");
    let _ = writeln!(svg, "<metadata>avdiff run {manifest_hash}</metadata>");
    let _ = writeln!(svg, r##"<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(svg: &mut String, frame: &Frame, step: f64, y_label: &str, percent: bool) {
    let x0 = LEFT;
    let x1 = WIDTH - RIGHT;
    let y0 = HEIGHT - BOTTOM;
    let _ = writeln!(
        svg,
        r##"<path d="M{x0:.2},{TOP:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}" fill="none" stroke="#333333"/>"##
    );
    let mut tick = 0.0;
    while tick <= frame.y_max + step * 1e-9 {
        let y = frame.y(tick);
        let label = if percent {
            format!("{:.0}%", tick * 100.0)
        } else {
            format!("{tick}")
        };
        let _ = writeln!(
            svg,
            r##"<line x1="{x0:.2}" y1="{y:.2}" x2="{x1:.2}" y2="{y:.2}" stroke="#e0e0e0"/><text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"##,
            x0 - 6.0,
            y + 4.0
        );
        tick += step;
    }
    let first_tick = (frame.first_year + 4) / 5 * 5;
    let mut year = first_tick;
    while year <= frame.last_year {
        let x = frame.x(year);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="#333333"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{year}</text>"##,
            y0 + 5.0,
            y0 + 20.0
        );
        year += 5;
    }
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        (TOP + y0) / 2.0,
        (TOP + y0) / 2.0,
        escape(y_label)
    );
}

fn legend(svg: &mut String, levels: &[AutomationLevel]) {
    let x = WIDTH - RIGHT + 20.0;
    for (i, level) in levels.iter().rev().enumerate() {
        let y = TOP + 10.0 + i as f64 * 20.0;
        let _ = writeln!(
            svg,
            r#"<rect x="{x:.2}" y="{:.2}" width="14" height="10" fill="{}"/><text x="{:.2}" y="{y:.2}">{level}</text>"#,
            y - 9.0,
            colour(*level),
            x + 20.0
        );
    }
}

/// Allocated share of new registrations per level, one polyline each.
pub fn shares_svg(run: &ScenarioRun, manifest_hash: &str) -> String {
    let frame = Frame {
        first_year: run.horizon.first,
        last_year: run.horizon.last,
        y_max: 1.0,
    };
    let mut svg = String::new();
    open(
        &mut svg,
        &format!("{}: share of new registrations by automation level", run.name),
        manifest_hash,
    );
    axes(&mut svg, &frame, 0.2, "share of new registrations", true);

    let levels: Vec<AutomationLevel> = run.trajectories.keys().copied().collect();
    for level in &levels {
        let traj = &run.trajectories[level];
        let points: Vec<String> = run
            .horizon
            .years()
            .map(|y| format!("{:.2},{:.2}", frame.x(y), frame.y(traj.allocated_share_at(y))))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
            points.join(" "),
            colour(*level)
        );
    }
    legend(&mut svg, &levels);
    svg.push_str("</svg>\n");
    svg
}

/// Annual value added per level in billion EUR, stacked from L1 upwards.
pub fn va_stacked_svg(table: &ValueAddedTable, manifest_hash: &str) -> String {
    let years: Vec<i32> = table.horizon.years().collect();
    let levels: Vec<AutomationLevel> = table.level_totals.keys().copied().collect();

    let value = |year: i32, level: AutomationLevel| table.cell(year, level).map_or(0.0, |c| c.va_total) / 1e9;
    let peak = years
        .iter()
        .map(|&y| levels.iter().map(|&l| value(y, l)).sum::<f64>())
        .fold(0.0, f64::max);
    let (y_max, step) = nice_axis(peak);
    let frame = Frame {
        first_year: table.horizon.first,
        last_year: table.horizon.last,
        y_max,
    };

    let mut svg = String::new();
    open(
        &mut svg,
        &format!(
            "{}: value added by automation level ({} basis)",
            table.scenario_name, table.basis
        ),
        manifest_hash,
    );
    axes(&mut svg, &frame, step, "billion EUR per year", false);

    let mut lower = vec![0.0; years.len()];
    for &level in &levels {
        let upper: Vec<f64> = years
            .iter()
            .zip(&lower)
            .map(|(&y, base)| base + value(y, level))
            .collect();
        let mut d = String::new();
        for (i, (&y, top)) in years.iter().zip(&upper).enumerate() {
            let cmd = if i == 0 { 'M' } else { 'L' };
            let _ = write!(d, "{cmd}{:.2},{:.2} ", frame.x(y), frame.y(*top));
        }
        for (&y, base) in years.iter().zip(&lower).rev() {
            let _ = write!(d, "L{:.2},{:.2} ", frame.x(y), frame.y(*base));
        }
        d.push('Z');
        let _ = writeln!(
            svg,
            r#"<path d="{d}" fill="{}" fill-opacity="0.85" stroke="none"/>"#,
            colour(level)
        );
        lower = upper;
    }
    legend(&mut svg, &levels);
    svg.push_str("</svg>\n");
    svg
}
