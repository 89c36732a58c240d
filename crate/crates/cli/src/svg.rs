//! SVG rendering of a barcode document as a grid of panels, one per grade.
//!
//! Bigraded panels sit in row `j` and column `i`; degree panels are stacked in
//! one column. Inside a panel the parameter axis is affine:
//! `x(t) = PANEL_X + MARGIN + t / t_max * PLOT_WIDTH`, with
//! `t_max = 1.1 * max(grid)` (or 1 for a one-point grid). Infinite bars end at
//! `t_max` with an arrow head.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::document::{BarcodeDocument, Grading};

pub const PANEL_WIDTH: f64 = 260.0;
pub const MARGIN: f64 = 12.0;
pub const PLOT_WIDTH: f64 = PANEL_WIDTH - 2.0 * MARGIN;
pub const HEADER: f64 = 20.0;
pub const ROW: f64 = 10.0;
pub const FOOTER: f64 = 16.0;
pub const GAP: f64 = 10.0;

/// Sort key and label of a panel: (row, column).
fn panel_of(doc: &BarcodeDocument, k: usize) -> ((i64, i64), String) {
    let r = &doc.bars[k];
    match (doc.grading, r.bidegree, r.degree) {
        (Grading::Bigraded, Some([a, b]), _) => ((b / 2, -a), format!("({a},{b})")),
        (_, _, Some(p)) => ((p as i64, 0), format!("H{p}")),
        _ => ((0, 0), String::from("?")),
    }
}

pub fn t_max(grid: &[f64]) -> f64 {
    let top = grid.iter().copied().fold(0.0, f64::max);
    if top > 0.0 {
        1.1 * top
    } else {
        1.0
    }
}

/// Horizontal position of parameter `t` inside a panel whose left edge is `panel_x`.
pub fn x_of(panel_x: f64, t: f64, t_max: f64) -> f64 {
    panel_x + MARGIN + t.min(t_max) / t_max * PLOT_WIDTH
}

pub fn render(doc: &BarcodeDocument) -> String {
    let mut panels: BTreeMap<(i64, i64), (String, Vec<usize>)> = BTreeMap::new();
    for k in 0..doc.bars.len() {
        let (key, label) = panel_of(doc, k);
        panels.entry(key).or_insert_with(|| (label, Vec::new())).1.push(k);
    }
    let rows: Vec<i64> = {
        let mut r: Vec<i64> = panels.keys().map(|k| k.0).collect();
        r.dedup();
        r
    };
    let cols: Vec<i64> = {
        let mut c: Vec<i64> = panels.keys().map(|k| k.1).collect();
        c.sort_unstable();
        c.dedup();
        c
    };
    let row_height: Vec<f64> = rows
        .iter()
        .map(|&r| {
            let most = panels
                .iter()
                .filter(|(k, _)| k.0 == r)
                .map(|(_, (_, bars))| bars.len())
                .max()
                .unwrap_or(0);
            HEADER + ROW * most as f64 + FOOTER
        })
        .collect();
    let width = GAP + cols.len().max(1) as f64 * (PANEL_WIDTH + GAP);
    let height = GAP + row_height.iter().map(|h| h + GAP).sum::<f64>().max(HEADER + FOOTER);
    let tm = t_max(&doc.grid);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let mut y = GAP;
    for (ri, &row) in rows.iter().enumerate() {
        for (ci, &col) in cols.iter().enumerate() {
            let Some((label, bars)) = panels.get(&(row, col)) else {
                continue;
            };
            let px = GAP + ci as f64 * (PANEL_WIDTH + GAP);
            let h = row_height[ri];
            let _ = writeln!(
                s,
                r##"<g><rect x="{px:.2}" y="{y:.2}" width="{PANEL_WIDTH:.2}" height="{h:.2}" fill="none" stroke="#999"/>"##
            );
            let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{label}</text>"#, px + MARGIN, y + 13.0);
            for &t in &doc.grid {
                let x = x_of(px, t, tm);
                let _ = writeln!(
                    s,
                    r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/>"##,
                    y + HEADER - 4.0,
                    y + h - FOOTER + 2.0
                );
            }
            for (n, &k) in bars.iter().enumerate() {
                let r = &doc.bars[k];
                let by = y + HEADER + ROW * n as f64 + ROW / 2.0;
                let x1 = x_of(px, r.birth, tm);
                let x2 = x_of(px, r.death.unwrap_or(tm), tm);
                let _ = writeln!(
                    s,
                    r##"<line x1="{x1:.2}" y1="{by:.2}" x2="{x2:.2}" y2="{by:.2}" stroke="#1f4e9c" stroke-width="4"/>"##
                );
                if r.death.is_none() {
                    let _ = writeln!(
                        s,
                        r##"<path d="M {x2:.2} {:.2} L {:.2} {by:.2} L {x2:.2} {:.2} Z" fill="#1f4e9c"/>"##,
                        by - 4.0,
                        x2 + 6.0,
                        by + 4.0
                    );
                }
            }
            let axis_y = y + h - FOOTER + 2.0;
            let _ = writeln!(
                s,
                r##"<line x1="{:.2}" y1="{axis_y:.2}" x2="{:.2}" y2="{axis_y:.2}" stroke="#333"/>"##,
                x_of(px, 0.0, tm),
                x_of(px, tm, tm)
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">t = {:.3}</text></g>"#,
                x_of(px, tm, tm),
                axis_y + 11.0,
                doc.grid.last().copied().unwrap_or(0.0)
            );
        }
        y += row_height[ri] + GAP;
    }
    s.push_str("</svg>\n");
    s
}
