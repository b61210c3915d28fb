use super::phase::Phase;
use super::scan::{PointFit, ScanRow};
use std::fmt::Write;

const W: f64 = 720.0;
const H: f64 = 480.0;
const PAD: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Log-log scatter of t_mix against N with the fitted median line per point.
/// Points in the region with two candidate exponents also get dashed lines
/// for both, anchored at the smallest-N median.
pub fn scan_svg(rows: &[ScanRow], fits: &[PointFit]) -> String {
    let pts: Vec<(f64, f64)> =
        rows.iter().filter_map(|r| r.tmix.map(|t| ((r.n as f64).ln(), (t.max(1) as f64).ln()))).collect();
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if pts.is_empty() {
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">no data</text>"#, W / 2.0, H / 2.0);
        s.push_str("</svg>\n");
        return s;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 - x0 < 1e-9 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-9 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let px = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let py = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let _ = writeln!(
        s,
        r#"<g stroke="black"><line x1="{PAD}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{b}"/></g>"#,
        b = H - PAD,
        r = W - PAD
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">ln N</text>"#, W / 2.0, H - 15.0);
    let _ = writeln!(
        s,
        r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">ln t_mix</text>"#,
        H / 2.0,
        H / 2.0
    );
    for (k, f) in fits.iter().enumerate() {
        let c = COLORS[k % COLORS.len()];
        for r in rows.iter().filter(|r| r.point_id == f.point_id) {
            if let Some(t) = r.tmix {
                let (x, y) = ((r.n as f64).ln(), (t.max(1) as f64).ln());
                let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{c}" fill-opacity="0.4"/>"#, px(x), py(y));
            }
        }
        let mut label = f.point_id.clone();
        if let Some(fit) = &f.fit {
            let (xa, xb) = (fit.medians[0].0 as f64, fit.medians[fit.medians.len() - 1].0 as f64);
            let (xa, xb) = (xa.ln(), xb.ln());
            let line = |x: f64| fit.intercept + fit.slope * x;
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{c}" stroke-width="2"/>"#,
                px(xa),
                py(line(xa)),
                px(xb),
                py(line(xb))
            );
            let _ = write!(label, ": slope {:.3}", fit.slope);
            if let Some(p) = &f.prediction {
                if p.phase == Phase::Iii {
                    let (mx, my) = (xa, fit.medians[0].1.ln());
                    for cand in [p.slope, p.alt_slope].into_iter().flatten() {
                        let _ = writeln!(
                            s,
                            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{c}" stroke-dasharray="6 4"/>"#,
                            px(mx),
                            py(my),
                            px(xb),
                            py(my + cand * (xb - mx))
                        );
                    }
                }
                if let Some(slope) = p.slope {
                    let _ = write!(label, " (predicted {slope:.2}");
                    if let Some(alt) = p.alt_slope {
                        let _ = write!(label, " or {alt:.2}");
                    }
                    label.push(')');
                }
            }
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" fill="{c}" font-size="12">{}</text>"#, PAD + 10.0, PAD + 15.0 * k as f64, escape(&label));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
