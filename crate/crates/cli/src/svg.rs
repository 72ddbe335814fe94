//! Static SVG plots: no scripts, no external assets, coordinates rounded
//! to two decimals so repeated runs emit identical bytes.
//!
//! Plot geometry is the contract; styling is a fixed palette. The only
//! `<rect>` elements are the data rectangles (one per tube, or one per
//! step and dimension), so consumers may count them; axes are `<line>`
//! elements and the feed-forward hull outline is a `<path>`.

use std::fmt::Write as _;

use reachtube_core::{CellBox, Interval, ReachTube, Trajectory};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 62.0;
const MARGIN_R: f64 = 18.0;
const MARGIN_T: f64 = 18.0;
const MARGIN_B: f64 = 46.0;

/// Band fill colors, cycled per state dimension.
const PALETTE: [&str; 6] = [
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#b07aa1",
];
const TUBE_FILL: &str = "#4e79a7";
const TUBE_EDGE: &str = "#2f4b6e";
const HULL_EDGE: &str = "#e15759";
const AXIS: &str = "#444444";
const TRAJECTORY: &str = "#333333";

/// Affine map from a data range onto a screen range.
#[derive(Clone, Copy)]
struct Scale {
    d0: f64,
    d1: f64,
    s0: f64,
    s1: f64,
}

impl Scale {
    /// Pads the data range by 5% (or by 0.5 if it is a single point) so
    /// geometry never touches the plot border.
    fn padded(lo: f64, hi: f64, s0: f64, s1: f64) -> Self {
        let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 };
        Self {
            d0: lo - pad,
            d1: hi + pad,
            s0,
            s1,
        }
    }

    fn map(&self, v: f64) -> f64 {
        self.s0 + (v - self.d0) / (self.d1 - self.d0) * (self.s1 - self.s0)
    }
}

fn header(out: &mut String) {
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"11\">"
    )
    .unwrap();
}

fn axis_line(out: &mut String, x1: f64, y1: f64, x2: f64, y2: f64) {
    writeln!(
        out,
        "  <line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" \
         stroke=\"{AXIS}\" stroke-width=\"1\"/>"
    )
    .unwrap();
}

fn text(out: &mut String, x: f64, y: f64, anchor: &str, label: &str) {
    writeln!(
        out,
        "  <text x=\"{x:.2}\" y=\"{y:.2}\" text-anchor=\"{anchor}\" fill=\"#222222\">{label}</text>"
    )
    .unwrap();
}

/// Short tick label: enough digits to tell ticks apart, few enough to fit.
fn tick(v: f64) -> String {
    format!("{v:.3}")
}

/// Feed-forward result in a 2-D output space: one rectangle per tube and
/// the hull as an outline.
pub fn reach2d(tubes: &[CellBox], hull: &CellBox) -> String {
    let (hx, hy) = (hull.interval(0), hull.interval(1));
    let sx = Scale::padded(hx.lo(), hx.hi(), MARGIN_L, WIDTH - MARGIN_R);
    let sy = Scale::padded(hy.lo(), hy.hi(), HEIGHT - MARGIN_B, MARGIN_T);

    let mut out = String::new();
    header(&mut out);

    axis_line(&mut out, MARGIN_L, HEIGHT - MARGIN_B, WIDTH - MARGIN_R, HEIGHT - MARGIN_B);
    axis_line(&mut out, MARGIN_L, HEIGHT - MARGIN_B, MARGIN_L, MARGIN_T);
    text(&mut out, sx.map(hx.lo()), HEIGHT - MARGIN_B + 16.0, "middle", &tick(hx.lo()));
    text(&mut out, sx.map(hx.hi()), HEIGHT - MARGIN_B + 16.0, "middle", &tick(hx.hi()));
    text(&mut out, MARGIN_L - 6.0, sy.map(hy.lo()) + 4.0, "end", &tick(hy.lo()));
    text(&mut out, MARGIN_L - 6.0, sy.map(hy.hi()) + 4.0, "end", &tick(hy.hi()));
    text(&mut out, (MARGIN_L + WIDTH - MARGIN_R) / 2.0, HEIGHT - 10.0, "middle", "output dim 0");
    writeln!(
        out,
        "  <text x=\"14\" y=\"{:.2}\" text-anchor=\"middle\" fill=\"#222222\" \
         transform=\"rotate(-90 14 {:.2})\">output dim 1</text>",
        HEIGHT / 2.0,
        HEIGHT / 2.0
    )
    .unwrap();

    writeln!(
        out,
        "  <g fill=\"{TUBE_FILL}\" fill-opacity=\"0.35\" stroke=\"{TUBE_EDGE}\" \
         stroke-width=\"0.4\">"
    )
    .unwrap();
    for cell in tubes {
        let (cx, cy) = (cell.interval(0), cell.interval(1));
        let x = sx.map(cx.lo());
        let y = sy.map(cy.hi());
        let w = (sx.map(cx.hi()) - x).max(0.5);
        let h = (sy.map(cy.lo()) - y).max(0.5);
        writeln!(
            out,
            "    <rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\"/>"
        )
        .unwrap();
    }
    out.push_str("  </g>\n");

    writeln!(
        out,
        "  <path d=\"M {:.2} {:.2} L {:.2} {:.2} L {:.2} {:.2} L {:.2} {:.2} Z\" \
         fill=\"none\" stroke=\"{HULL_EDGE}\" stroke-width=\"1.5\"/>",
        sx.map(hx.lo()),
        sy.map(hy.lo()),
        sx.map(hx.hi()),
        sy.map(hy.lo()),
        sx.map(hx.hi()),
        sy.map(hy.hi()),
        sx.map(hx.lo()),
        sy.map(hy.hi())
    )
    .unwrap();

    out.push_str("</svg>\n");
    out
}

/// Tube over time: one stacked row per state dimension, one rectangle per
/// step, optional sampled trajectories as polylines.
pub fn tube_bands(tube: &ReachTube, trajs: &[Trajectory]) -> String {
    let steps = tube.steps();
    let n_dims = steps[0].hull().dim();
    let k_f = steps.len() - 1;

    let sx = Scale::padded(-0.5, k_f as f64 + 0.5, MARGIN_L, WIDTH - MARGIN_R);
    let row_gap = 14.0;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let row_h = (plot_h - row_gap * (n_dims as f64 - 1.0)) / n_dims as f64;

    let row_scale = |d: usize| -> (Scale, f64, f64) {
        let lo = steps
            .iter()
            .map(|s| s.hull().interval(d).lo())
            .fold(f64::INFINITY, f64::min);
        let hi = steps
            .iter()
            .map(|s| s.hull().interval(d).hi())
            .fold(f64::NEG_INFINITY, f64::max);
        let top = MARGIN_T + d as f64 * (row_h + row_gap);
        (Scale::padded(lo, hi, top + row_h, top), lo, hi)
    };

    let mut out = String::new();
    header(&mut out);

    for d in 0..n_dims {
        let (sy, lo, hi) = row_scale(d);
        axis_line(&mut out, MARGIN_L, sy.s0, WIDTH - MARGIN_R, sy.s0);
        axis_line(&mut out, MARGIN_L, sy.s0, MARGIN_L, sy.s1);
        text(&mut out, MARGIN_L - 6.0, sy.map(lo) + 4.0, "end", &tick(lo));
        text(&mut out, MARGIN_L - 6.0, sy.map(hi) + 4.0, "end", &tick(hi));
        text(&mut out, WIDTH - MARGIN_R, sy.s1 - 4.0, "end", &format!("dim {d}"));

        writeln!(
            out,
            "  <g fill=\"{}\" fill-opacity=\"0.5\">",
            PALETTE[d % PALETTE.len()]
        )
        .unwrap();
        for (k, step) in steps.iter().enumerate() {
            let iv: Interval = step.hull().interval(d);
            let x = sx.map(k as f64 - 0.5);
            let w = sx.map(k as f64 + 0.5) - x;
            let y = sy.map(iv.hi());
            let h = (sy.map(iv.lo()) - y).max(0.5);
            writeln!(
                out,
                "    <rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\"/>"
            )
            .unwrap();
        }
        out.push_str("  </g>\n");

        for traj in trajs {
            let points: Vec<String> = traj
                .states
                .iter()
                .enumerate()
                .map(|(k, x)| format!("{:.2},{:.2}", sx.map(k as f64), sy.map(x[d])))
                .collect();
            writeln!(
                out,
                "  <polyline points=\"{}\" fill=\"none\" stroke=\"{TRAJECTORY}\" \
                 stroke-opacity=\"0.55\" stroke-width=\"0.8\"/>",
                points.join(" ")
            )
            .unwrap();
        }
    }

    text(&mut out, sx.map(0.0), HEIGHT - MARGIN_B + 16.0, "middle", "0");
    text(&mut out, sx.map(k_f as f64), HEIGHT - MARGIN_B + 16.0, "middle", &k_f.to_string());
    text(&mut out, (MARGIN_L + WIDTH - MARGIN_R) / 2.0, HEIGHT - 10.0, "middle", "k");

    out.push_str("</svg>\n");
    out
}
