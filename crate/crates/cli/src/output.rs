//! Deterministic text emitters: 12-significant-digit CSV and a fixed-size
//! SVG line chart.

use crate::commands::SweepRow;

/// 12 significant digits, scientific notation. Identical inputs produce
/// identical bytes, which the sweep determinism contract relies on.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

pub const SWEEP_HEADER: &str = "scenario,gt,gamma,lambda,i_ab,i_ae,chi_ae,chi_ab,k_min,k_max";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 160 + 80);
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        let r = &row.report;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            row.scenario,
            sig12(row.gt),
            sig12(row.gamma),
            sig12(r.lambda),
            sig12(r.i_ab),
            sig12(r.i_ae),
            sig12(r.chi_ae),
            sig12(r.chi_ab),
            sig12(r.k_min),
            sig12(r.k_max),
        ));
    }
    out
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
];

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;

/// `k_max` against `gt`, one polyline per gamma, linear axes, legend.
pub fn sweep_svg(rows: &[SweepRow], gammas: &[f64], t_max: f64) -> String {
    let k_min = rows.iter().map(|r| r.report.k_max).fold(0.0, f64::min);
    let k_max = rows.iter().map(|r| r.report.k_max).fold(1e-6, f64::max);
    let span = (k_max - k_min).max(1e-12);

    let x_of = |gt: f64| MARGIN_LEFT + gt / t_max * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT);
    let y_of = |k: f64| {
        HEIGHT - MARGIN_BOTTOM - (k - k_min) / span * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    };

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // Axes.
    svg.push_str(&format!(
        "  <line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"black\"/>\n",
        MARGIN_LEFT,
        HEIGHT - MARGIN_BOTTOM,
        WIDTH - MARGIN_RIGHT,
        HEIGHT - MARGIN_BOTTOM
    ));
    svg.push_str(&format!(
        "  <line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"black\"/>\n",
        MARGIN_LEFT,
        MARGIN_TOP,
        MARGIN_LEFT,
        HEIGHT - MARGIN_BOTTOM
    ));
    for i in 0..=5 {
        let f = i as f64 / 5.0;
        let x = MARGIN_LEFT + f * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT);
        let y = HEIGHT - MARGIN_BOTTOM;
        svg.push_str(&format!(
            "  <line x1=\"{x:.3}\" y1=\"{y:.3}\" x2=\"{x:.3}\" y2=\"{:.3}\" stroke=\"black\"/>\n",
            y + 6.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{x:.3}\" y=\"{:.3}\" font-size=\"12\" text-anchor=\"middle\">{:.2}</text>\n",
            y + 22.0,
            f * t_max
        ));
        let ky = HEIGHT - MARGIN_BOTTOM - f * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM);
        svg.push_str(&format!(
            "  <line x1=\"{:.3}\" y1=\"{ky:.3}\" x2=\"{MARGIN_LEFT}\" y2=\"{ky:.3}\" stroke=\"black\"/>\n",
            MARGIN_LEFT - 6.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.3}\" y=\"{:.3}\" font-size=\"12\" text-anchor=\"end\">{:.4}</text>\n",
            MARGIN_LEFT - 10.0,
            ky + 4.0,
            k_min + f * span
        ));
    }
    svg.push_str(&format!(
        "  <text x=\"{:.3}\" y=\"{:.3}\" font-size=\"14\" text-anchor=\"middle\">gt</text>\n",
        (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
        HEIGHT - 12.0
    ));
    svg.push_str(&format!(
        "  <text x=\"18\" y=\"{:.3}\" font-size=\"14\" text-anchor=\"middle\" \
         transform=\"rotate(-90 18 {:.3})\">k_max (bits)</text>\n",
        HEIGHT / 2.0,
        HEIGHT / 2.0
    ));

    // One polyline per gamma, in the given order.
    for (idx, &gamma) in gammas.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let points: Vec<String> = rows
            .iter()
            .filter(|r| r.gamma == gamma)
            .map(|r| format!("{:.3},{:.3}", x_of(r.gt), y_of(r.report.k_max)))
            .collect();
        svg.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            points.join(" ")
        ));
        let ly = MARGIN_TOP + 20.0 * idx as f64;
        let lx = WIDTH - MARGIN_RIGHT + 14.0;
        svg.push_str(&format!(
            "  <line x1=\"{lx:.3}\" y1=\"{ly:.3}\" x2=\"{:.3}\" y2=\"{ly:.3}\" \
             stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            lx + 24.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.3}\" y=\"{:.3}\" font-size=\"12\">gamma = {gamma}</text>\n",
            lx + 30.0,
            ly + 4.0
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
