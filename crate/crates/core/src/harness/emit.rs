//! Artifact writers. Every CSV opens with the reproducibility header and
//! contains no timing data, so identical configs give identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::diagnostics::BoxplotStats;
use crate::error::Result;
use crate::harness::config::ExperimentConfig;
use crate::sampler::SampleArchive;

/// Shortest round-tripping representation.
fn num(v: f64) -> String {
    format!("{v:?}")
}

/// `chain_id,step,x_0,…` for every archived state taken before the chain
/// exploded.
pub fn samples_csv(config: &ExperimentConfig, archive: &SampleArchive) -> String {
    let mut s = String::new();
    writeln!(s, "{}", config.header()).unwrap();
    s.push_str("chain_id,step");
    for i in 0..archive.dim {
        write!(s, ",x_{i}").unwrap();
    }
    s.push('\n');
    for chain in 0..archive.n_chains {
        for (k, &step) in archive.steps.iter().enumerate() {
            if archive.exploded[chain].is_some_and(|e| step >= e) {
                break;
            }
            write!(s, "{chain},{step}").unwrap();
            for v in archive.sample(chain, k) {
                write!(s, ",{}", num(*v)).unwrap();
            }
            s.push('\n');
        }
    }
    s
}

/// `coordinate,m2,se` rows.
pub fn moments_csv(config: &ExperimentConfig, m2: &[f64], se: &[f64]) -> String {
    let mut s = format!("{}\ncoordinate,m2,se\n", config.header());
    for (i, (m, e)) in m2.iter().zip(se).enumerate() {
        writeln!(s, "{i},{},{}", num(*m), num(*e)).unwrap();
    }
    s
}

/// `run_id,q1,median,q3,lo_whisker,hi_whisker`, one row per benchmark cell.
pub fn boxplot_csv(config: &ExperimentConfig, stats: &[BoxplotStats]) -> String {
    let mut s = format!("{}\nrun_id,q1,median,q3,lo_whisker,hi_whisker\n", config.header());
    for b in stats {
        writeln!(
            s,
            "{},{},{},{},{},{}",
            b.label,
            num(b.q1),
            num(b.median),
            num(b.q3),
            num(b.lo_whisker),
            num(b.hi_whisker)
        )
        .unwrap();
    }
    s
}

/// Reads boxplot rows back from [`boxplot_csv`] output.
pub fn parse_boxplot_csv(text: &str) -> Vec<BoxplotStats> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("run_id"))
        .filter_map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let v = |i: usize| f.get(i)?.parse::<f64>().ok();
            Some(BoxplotStats {
                label: f.first()?.to_string(),
                n: 0,
                q1: v(1)?,
                median: v(2)?,
                q3: v(3)?,
                lo_whisker: v(4)?,
                hi_whisker: v(5)?,
                outliers: Vec::new(),
            })
        })
        .collect()
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)?;
    Ok(())
}

/// Vertical boxplots of the rows of a boxplot CSV, with a dashed reference
/// line at `oracle`. Reads only the CSV text.
pub fn boxplot_svg(csv: &str, oracle: Option<f64>, y_label: &str) -> String {
    let stats = parse_boxplot_csv(csv);
    let (w, h) = (120.0 + 110.0 * stats.len().max(1) as f64, 420.0);
    let (left, right, top, bottom) = (70.0, 20.0, 30.0, 70.0);
    let mut lo = stats.iter().map(|b| b.lo_whisker).fold(f64::INFINITY, f64::min);
    let mut hi = stats.iter().map(|b| b.hi_whisker).fold(f64::NEG_INFINITY, f64::max);
    if let Some(o) = oracle {
        lo = lo.min(o);
        hi = hi.max(o);
    }
    if !(lo.is_finite() && hi.is_finite()) {
        lo = 0.0;
        hi = 1.0;
    }
    let pad = ((hi - lo) * 0.08).max(1e-3);
    let (lo, hi) = (lo - pad, hi + pad);
    let y = |v: f64| top + (hi - v) / (hi - lo) * (h - top - bottom);
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
    // axis with five ticks
    writeln!(s, r#"<line x1="{left}" y1="{top}" x2="{left}" y2="{}" stroke="black"/>"#, h - bottom).unwrap();
    for t in 0..=4 {
        let v = lo + (hi - lo) * t as f64 / 4.0;
        let yy = y(v);
        writeln!(s, r#"<line x1="{}" y1="{yy:.2}" x2="{left}" y2="{yy:.2}" stroke="black"/>"#, left - 5.0).unwrap();
        writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{v:.4}</text>"#, left - 8.0, yy + 4.0).unwrap();
    }
    writeln!(
        s,
        r#"<text x="16" y="{:.2}" transform="rotate(-90 16 {:.2})" text-anchor="middle">{y_label}</text>"#,
        (h - bottom + top) / 2.0,
        (h - bottom + top) / 2.0
    )
    .unwrap();
    for (j, b) in stats.iter().enumerate() {
        let cx = left + 60.0 + 110.0 * j as f64;
        let (x0, x1) = (cx - 25.0, cx + 25.0);
        writeln!(s, r#"<g class="box" data-label="{}">"#, b.label).unwrap();
        writeln!(s, r#"<line x1="{cx}" y1="{:.2}" x2="{cx}" y2="{:.2}" stroke="black"/>"#, y(b.hi_whisker), y(b.q3)).unwrap();
        writeln!(s, r#"<line x1="{cx}" y1="{:.2}" x2="{cx}" y2="{:.2}" stroke="black"/>"#, y(b.q1), y(b.lo_whisker)).unwrap();
        for v in [b.lo_whisker, b.hi_whisker] {
            writeln!(s, r#"<line x1="{}" y1="{:.2}" x2="{}" y2="{:.2}" stroke="black"/>"#, cx - 12.0, y(v), cx + 12.0, y(v)).unwrap();
        }
        writeln!(
            s,
            r##"<rect x="{x0}" y="{:.2}" width="50" height="{:.2}" fill="#9ecae1" stroke="black"/>"##,
            y(b.q3),
            (y(b.q1) - y(b.q3)).max(0.5)
        )
        .unwrap();
        writeln!(s, r#"<line x1="{x0}" y1="{:.2}" x2="{x1}" y2="{:.2}" stroke="black" stroke-width="2"/>"#, y(b.median), y(b.median)).unwrap();
        writeln!(s, r#"<text x="{cx}" y="{}" text-anchor="middle">{}</text>"#, h - bottom + 20.0, b.label).unwrap();
        writeln!(s, "</g>").unwrap();
    }
    if let Some(o) = oracle {
        writeln!(
            s,
            r#"<line class="oracle" x1="{left}" y1="{:.2}" x2="{}" y2="{:.2}" stroke="red" stroke-dasharray="6 4"/>"#,
            y(o),
            w - right,
            y(o)
        )
        .unwrap();
        writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end" fill="red">oracle {o:.4}</text>"#, w - right, y(o) - 5.0).unwrap();
    }
    s.push_str("</svg>\n");
    s
}
