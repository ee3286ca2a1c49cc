//! Minimal static SVG line plots: axes, ticks, and polylines. No
//! plotting dependency; the output is a plain `<svg>` document.

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// A named data series.
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Line plot of one or more series with linear axes.
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

impl LinePlot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        LinePlot {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series: Vec::new(),
        }
    }

    pub fn add_series(&mut self, label: &str, points: Vec<(f64, f64)>) {
        self.series.push(Series {
            label: label.into(),
            points,
        });
    }

    pub fn render(&self) -> String {
        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        for s in &self.series {
            for &(x, y) in &s.points {
                if x.is_finite() && y.is_finite() {
                    xs.push(x);
                    ys.push(y);
                }
            }
        }
        let (x_min, x_max) = padded_range(&xs);
        let (y_min, y_max) = padded_range(&ys);

        let plot_w = WIDTH - MARGIN_L - MARGIN_R;
        let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
        let sx = |x: f64| MARGIN_L + (x - x_min) / (x_max - x_min) * plot_w;
        let sy = |y: f64| MARGIN_T + plot_h - (y - y_min) / (y_max - y_min) * plot_h;

        let mut out = String::new();
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
        ));
        out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        out.push_str(&format!(
            "<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" \
             font-size=\"15\">{}</text>\n",
            WIDTH / 2.0,
            escape(&self.title)
        ));

        // Axes.
        out.push_str(&format!(
            "<line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
             <line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\" stroke=\"black\"/>\n",
            l = MARGIN_L,
            r = WIDTH - MARGIN_R,
            t = MARGIN_T,
            b = HEIGHT - MARGIN_B,
        ));

        // Ticks and labels.
        for k in 0..=4 {
            let fx = x_min + (x_max - x_min) * k as f64 / 4.0;
            let px = sx(fx);
            out.push_str(&format!(
                "<line x1=\"{px}\" y1=\"{b}\" x2=\"{px}\" y2=\"{b2}\" stroke=\"black\"/>\n\
                 <text x=\"{px}\" y=\"{ty}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
                 font-size=\"11\">{v}</text>\n",
                b = HEIGHT - MARGIN_B,
                b2 = HEIGHT - MARGIN_B + 5.0,
                ty = HEIGHT - MARGIN_B + 18.0,
                v = tick_label(fx),
            ));
            let fy = y_min + (y_max - y_min) * k as f64 / 4.0;
            let py = sy(fy);
            out.push_str(&format!(
                "<line x1=\"{l}\" y1=\"{py}\" x2=\"{l2}\" y2=\"{py}\" stroke=\"black\"/>\n\
                 <text x=\"{tx}\" y=\"{tyy}\" text-anchor=\"end\" font-family=\"sans-serif\" \
                 font-size=\"11\">{v}</text>\n",
                l = MARGIN_L,
                l2 = MARGIN_L - 5.0,
                tx = MARGIN_L - 8.0,
                tyy = py + 4.0,
                v = tick_label(fy),
            ));
        }
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
             font-size=\"13\">{}</text>\n",
            MARGIN_L + plot_w / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        ));
        out.push_str(&format!(
            "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
             font-size=\"13\" transform=\"rotate(-90 16 {y})\">{}</text>\n",
            MARGIN_T + plot_h / 2.0,
            escape(&self.y_label),
            y = MARGIN_T + plot_h / 2.0,
        ));

        // Series polylines and legend.
        for (i, s) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let pts: Vec<String> = s
                .points
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            out.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
                pts.join(" ")
            ));
            if !s.label.is_empty() {
                let ly = MARGIN_T + 14.0 * (i as f64 + 1.0);
                out.push_str(&format!(
                    "<line x1=\"{x1}\" y1=\"{ly}\" x2=\"{x2}\" y2=\"{ly}\" stroke=\"{color}\" \
                     stroke-width=\"1.5\"/>\n\
                     <text x=\"{tx}\" y=\"{ty}\" font-family=\"sans-serif\" font-size=\"11\">{t}\
                     </text>\n",
                    x1 = WIDTH - MARGIN_R - 130.0,
                    x2 = WIDTH - MARGIN_R - 110.0,
                    tx = WIDTH - MARGIN_R - 105.0,
                    ty = ly + 4.0,
                    t = escape(&s.label),
                ));
            }
        }

        out.push_str("</svg>\n");
        out
    }
}

fn padded_range(values: &[f64]) -> (f64, f64) {
    let mut lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-3..1e4).contains(&a) {
        format!("{v:.2e}")
    } else if a >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_well_formed_document() {
        let mut plot = LinePlot::new("period vs sigma", "sigma", "period");
        plot.add_series("period", vec![(10.0, 6.4), (20.0, 6.33), (40.0, 6.30)]);
        let tau = std::f64::consts::TAU;
        plot.add_series("target", vec![(10.0, tau), (40.0, tau)]);
        let doc = plot.render();
        assert!(doc.starts_with("<svg"));
        assert!(doc.ends_with("</svg>\n"));
        assert_eq!(doc.matches("<polyline").count(), 2);
        assert!(doc.contains("period vs sigma"));
    }

    #[test]
    fn degenerate_ranges_do_not_blow_up() {
        let mut plot = LinePlot::new("flat", "x", "y");
        plot.add_series("", vec![(1.0, 2.0), (1.0, 2.0)]);
        let doc = plot.render();
        assert!(doc.contains("<polyline"));
        assert!(!doc.contains("NaN"));
    }
}
