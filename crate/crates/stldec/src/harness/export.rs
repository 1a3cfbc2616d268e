//! Artifact emission: CSV metrics, JSON episode archives, SVG top-down
//! trajectory plots. All three are plain strings written atomically enough
//! for our purposes; nothing here buffers state between calls.

use super::{BenchmarkReport, EpisodeResult, HarnessError, MetricsRow};
use crate::decode::Strategy;
use crate::scene::Scene;
use std::fmt::Write as _;
use std::path::Path;

pub const CSV_HEADER: &str = "strategy,spec,stl_sat_rate,success_rate,mean_steps,n";

/// Renders rows under the fixed header. Numbers use the shortest exact
/// decimal form, so equal inputs give byte-equal output.
pub fn csv_string(rows: &[MetricsRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.strategy.label(),
            r.spec_kind,
            r.stl_sat_rate,
            r.success_rate,
            r.mean_steps,
            r.n
        )
        .expect("string write");
    }
    out
}

pub fn export_csv(path: &Path, rows: &[MetricsRow]) -> Result<(), HarnessError> {
    Ok(std::fs::write(path, csv_string(rows))?)
}

pub fn export_episodes_json(path: &Path, report: &BenchmarkReport) -> Result<(), HarnessError> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    Ok(std::fs::write(path, text)?)
}

pub fn load_episodes_json(path: &Path) -> Result<BenchmarkReport, HarnessError> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

pub fn strategy_color(s: &Strategy) -> &'static str {
    match s {
        Strategy::Unconstrained => "#7f7f7f",
        Strategy::Filtering { .. } => "#ff7f0e",
        Strategy::Hcd => "#1f77b4",
        Strategy::Rcd { .. } => "#9467bd",
    }
}

const SCALE: f64 = 60.0;
const PAD: f64 = 24.0;

/// Draws the scene and one polyline per episode, z pointing up. Each
/// trajectory sample becomes exactly one polyline point.
pub fn render_svg(scene: &Scene, episodes: &[&EpisodeResult]) -> String {
    let b = scene.bounds;
    let w = b.width() * SCALE + 2.0 * PAD;
    let h = b.depth() * SCALE + 2.0 * PAD;
    let sx = |x: f64| PAD + (x - b.x_lo) * SCALE;
    let sy = |z: f64| PAD + (b.z_hi - z) * SCALE;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"##
    );
    let _ = writeln!(svg, r##"<rect width="{w:.0}" height="{h:.0}" fill="#ffffff"/>"##);
    let _ = writeln!(
        svg,
        r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#fafafa" stroke="#444" stroke-width="1.5"/>"##,
        sx(b.x_lo),
        sy(b.z_hi),
        b.width() * SCALE,
        b.depth() * SCALE
    );
    for room in &scene.geofence_rooms {
        let _ = writeln!(
            svg,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#2ca02c" stroke-width="2"/>"##,
            sx(room.x_lo),
            sy(room.z_hi),
            room.width() * SCALE,
            room.depth() * SCALE
        );
    }
    for abox in &scene.avoid_boxes {
        let _ = writeln!(
            svg,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#d62728" fill-opacity="0.3" stroke="#d62728" stroke-width="1.5"/>"##,
            sx(abox.x_lo),
            sy(abox.z_hi),
            abox.width() * SCALE,
            abox.depth() * SCALE
        );
    }

    // goal with its success radius, then the start pose with a heading tick
    let _ = writeln!(
        svg,
        r##"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="none" stroke="#222" stroke-width="1" stroke-dasharray="6 4"/>"##,
        sx(scene.goal.x),
        sy(scene.goal.z),
        crate::scene::SUCCESS_DISTANCE * SCALE
    );
    let _ = writeln!(
        svg,
        r##"<circle cx="{:.2}" cy="{:.2}" r="5" fill="#222"/>"##,
        sx(scene.goal.x),
        sy(scene.goal.z)
    );
    let _ = writeln!(
        svg,
        r##"<circle cx="{:.2}" cy="{:.2}" r="5" fill="none" stroke="#222" stroke-width="2"/>"##,
        sx(scene.start.x),
        sy(scene.start.z)
    );
    let _ = writeln!(
        svg,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#222" stroke-width="2"/>"##,
        sx(scene.start.x),
        sy(scene.start.z),
        sx(scene.start.x + 0.4 * scene.start.theta.cos()),
        sy(scene.start.z + 0.4 * scene.start.theta.sin())
    );

    for ep in episodes {
        let xs = ep.trajectory.channel("x").expect("trajectory has x");
        let zs = ep.trajectory.channel("z").expect("trajectory has z");
        let points: Vec<String> = xs
            .iter()
            .zip(zs)
            .map(|(x, z)| format!("{:.2},{:.2}", sx(*x), sy(*z)))
            .collect();
        let _ = writeln!(
            svg,
            r##"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5" stroke-opacity="0.85"><title>{} seed={} sat={} success={}</title></polyline>"##,
            points.join(" "),
            strategy_color(&ep.strategy),
            ep.strategy.label(),
            ep.scene_seed,
            ep.stl_satisfied,
            ep.success
        );
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn export_trajectory_svg(
    path: &Path,
    scene: &Scene,
    episodes: &[&EpisodeResult],
) -> Result<(), HarnessError> {
    Ok(std::fs::write(path, render_svg(scene, episodes))?)
}
