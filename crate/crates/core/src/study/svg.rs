use std::fmt::Write;

use super::{chain_means, ObservableFit};
use crate::error::Result;
use crate::io::OutputMeta;
use crate::observables::ObservableRecord;

const PANEL_W: f64 = 360.0;
const PANEL_H: f64 = 280.0;
const MARGIN: f64 = 48.0;

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

/// Log-log scatter of per-chain means against `T` with the fitted line,
/// one panel per fit. Run metadata goes into a leading XML comment.
pub fn scaling_svg(
    records: &[ObservableRecord],
    fits: &[ObservableFit],
    meta: &OutputMeta,
) -> Result<String> {
    let cols = 2;
    let rows = fits.len().div_ceil(cols).max(1);
    let (w, h) = (cols as f64 * PANEL_W, rows as f64 * PANEL_H);
    let mut s = String::new();
    let meta_json = serde_json::to_string(meta)?.replace("--", "- -");
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(s, "<!-- {meta_json} -->");
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    for (idx, of) in fits.iter().enumerate() {
        let ox = (idx % cols) as f64 * PANEL_W;
        let oy = (idx / cols) as f64 * PANEL_H;
        let groups = chain_means(records, &of.observable)?;
        let pts: Vec<(f64, f64)> = groups
            .iter()
            .flat_map(|(t, ms)| {
                ms.iter()
                    .filter(|m| **m > 0.0)
                    .map(move |m| (t.ln(), m.ln()))
            })
            .collect();
        let (x0, x1) = range(pts.iter().map(|p| p.0));
        let line = |x: f64| of.fit.intercept + of.fit.exponent * x;
        let (y0, y1) = range(pts.iter().map(|p| p.1).chain([line(x0), line(x1)]));
        let px = |x: f64| ox + MARGIN + (x - x0) / (x1 - x0) * (PANEL_W - 1.5 * MARGIN);
        let py = |y: f64| oy + PANEL_H - MARGIN - (y - y0) / (y1 - y0) * (PANEL_H - 1.5 * MARGIN);

        let (ax, ay, bx, by) = (px(x0), py(y0), px(x1), py(y1));
        let _ = writeln!(s, r#"<g>"#);
        let _ = writeln!(
            s,
            r#"<line x1="{ax:.1}" y1="{ay:.1}" x2="{bx:.1}" y2="{ay:.1}" stroke="black"/>"#
        );
        let _ = writeln!(
            s,
            r#"<line x1="{ax:.1}" y1="{ay:.1}" x2="{ax:.1}" y2="{by:.1}" stroke="black"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}">{} : exponent {:.3} [{:.3}, {:.3}]</text>"#,
            ax,
            oy + 16.0,
            of.observable,
            of.fit.exponent,
            of.fit.ci_low,
            of.fit.ci_high
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">ln T</text>"#,
            (ax + bx) / 2.0,
            ay + 30.0
        );
        for (t, _) in &groups {
            let x = px(t.ln());
            let _ = writeln!(
                s,
                r#"<line x1="{x:.1}" y1="{ay:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/>"#,
                ay + 4.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{t}</text>"#,
                ay + 16.0
            );
        }
        for &(x, y) in &pts {
            let _ = writeln!(
                s,
                r##"<circle cx="{:.1}" cy="{:.1}" r="2.5" fill="#3465a4"/>"##,
                px(x),
                py(y)
            );
        }
        let _ = writeln!(
            s,
            r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#cc0000" stroke-width="1.5"/>"##,
            px(x0),
            py(line(x0)),
            px(x1),
            py(line(x1))
        );
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    Ok(s)
}
