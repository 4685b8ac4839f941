//! ROC curves, AUC and threshold metrics.
//!
//! AUC is computed two ways: as the trapezoidal area under [`roc_curve`]
//! and as the Mann-Whitney rank statistic. With tied scores grouped into a
//! single ROC step and half credit for tied pairs the two agree exactly up
//! to rounding.

use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Error, Result};

/// Scores and true labels of one test fold.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScoredPredictions {
    pub scores: Vec<f64>,
    pub truth: Vec<bool>,
    pub fold: usize,
}

impl ScoredPredictions {
    pub fn new(scores: Vec<f64>, truth: Vec<bool>, fold: usize) -> Self {
        assert_eq!(scores.len(), truth.len(), "scores and labels differ in length");
        ScoredPredictions { scores, truth, fold }
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn n_positive(&self) -> usize {
        self.truth.iter().filter(|&&t| t).count()
    }

    /// Concatenation of several folds, fold id 0.
    pub fn pooled<'a>(parts: impl IntoIterator<Item = &'a ScoredPredictions>) -> Self {
        let mut out = ScoredPredictions::default();
        for p in parts {
            out.scores.extend_from_slice(&p.scores);
            out.truth.extend_from_slice(&p.truth);
        }
        out
    }

    fn check_both_classes(&self) -> Result<(usize, usize)> {
        let pos = self.n_positive();
        let neg = self.len() - pos;
        if pos == 0 || neg == 0 {
            return Err(Error::OneClassOnly);
        }
        Ok((pos, neg))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub fpr: Vec<f64>,
    pub tpr: Vec<f64>,
    /// Threshold of each point; the first is `+inf`.
    pub thresholds: Vec<f64>,
}

/// One point per distinct score, thresholds descending, from `(0, 0)` to `(1, 1)`.
pub fn roc_curve(p: &ScoredPredictions) -> Result<RocCurve> {
    let (pos, neg) = p.check_both_classes()?;
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| p.scores[b].total_cmp(&p.scores[a]));
    let mut curve = RocCurve {
        fpr: vec![0.0],
        tpr: vec![0.0],
        thresholds: vec![f64::INFINITY],
    };
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let s = p.scores[order[i]];
        while i < order.len() && p.scores[order[i]] == s {
            if p.truth[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        curve.fpr.push(fp as f64 / neg as f64);
        curve.tpr.push(tp as f64 / pos as f64);
        curve.thresholds.push(s);
    }
    Ok(curve)
}

impl RocCurve {
    pub fn area(&self) -> f64 {
        self.fpr
            .windows(2)
            .zip(self.tpr.windows(2))
            .map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) / 2.0)
            .sum()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "threshold,fpr,tpr")?;
        for ((t, f), r) in self.thresholds.iter().zip(&self.fpr).zip(&self.tpr) {
            writeln!(out, "{},{:.16e},{:.16e}", fmt_threshold(*t), f, r)?;
        }
        Ok(())
    }
}

fn fmt_threshold(t: f64) -> String {
    if t.is_infinite() {
        "inf".to_string()
    } else {
        format!("{t:.16e}")
    }
}

/// Trapezoidal area under the ROC curve.
pub fn auc(p: &ScoredPredictions) -> Result<f64> {
    Ok(roc_curve(p)?.area())
}

/// Mann-Whitney U statistic normalized to `[0, 1]`, ties at half credit.
pub fn rank_auc(p: &ScoredPredictions) -> Result<f64> {
    let (pos, neg) = p.check_both_classes()?;
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| p.scores[a].total_cmp(&p.scores[b]));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && p.scores[order[j]] == p.scores[order[i]] {
            j += 1;
        }
        // average of ranks i+1..=j
        let avg = (i + 1 + j) as f64 / 2.0;
        rank_sum += avg * order[i..j].iter().filter(|&&k| p.truth[k]).count() as f64;
        i = j;
    }
    let (pos, neg) = (pos as f64, neg as f64);
    Ok((rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

pub fn confusion_at(p: &ScoredPredictions, threshold: f64) -> Confusion {
    let mut c = Confusion::default();
    for (&s, &t) in p.scores.iter().zip(&p.truth) {
        match (s >= threshold, t) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    c
}

/// F1 of the rule `score >= 0.5`. Zero when nothing is a true positive.
pub fn f1_at_half(p: &ScoredPredictions) -> f64 {
    let c = confusion_at(p, 0.5);
    let denom = 2 * c.tp + c.fp + c.fn_;
    if c.tp == 0 {
        return if denom == 0 { 1.0 } else { 0.0 };
    }
    2.0 * c.tp as f64 / denom as f64
}

/// One labelled curve of an overlay plot.
pub struct RocSeries<'a> {
    pub label: String,
    pub curve: &'a RocCurve,
    pub auc: f64,
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

/// Static SVG with one polyline per series, a diagonal reference and a legend.
pub fn roc_svg(title: &str, series: &[RocSeries<'_>]) -> String {
    const SIZE: f64 = 400.0;
    const PAD: f64 = 50.0;
    let legend_h = 16.0 * series.len() as f64;
    let width = SIZE + 2.0 * PAD + 220.0;
    let height = (SIZE + 2.0 * PAD).max(PAD + legend_h + 20.0);
    let px = |x: f64| PAD + x * SIZE;
    let py = |y: f64| PAD + (1.0 - y) * SIZE;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="14">{}</text>"#,
        PAD,
        PAD - 20.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{PAD:.1}" y="{PAD:.1}" width="{SIZE:.1}" height="{SIZE:.1}" fill="none" stroke="black"/>"#
    );
    for t in 0..=5 {
        let v = t as f64 / 5.0;
        let _ = writeln!(
            s,
            r#"<line x1="{x:.1}" y1="{y0:.1}" x2="{x:.1}" y2="{y1:.1}" stroke="black"/><text x="{x:.1}" y="{yt:.1}" text-anchor="middle">{v:.1}</text>"#,
            x = px(v),
            y0 = py(0.0),
            y1 = py(0.0) + 5.0,
            yt = py(0.0) + 18.0
        );
        let _ = writeln!(
            s,
            r#"<line x1="{x0:.1}" y1="{y:.1}" x2="{x1:.1}" y2="{y:.1}" stroke="black"/><text x="{xt:.1}" y="{yy:.1}" text-anchor="end">{v:.1}</text>"#,
            x0 = px(0.0) - 5.0,
            x1 = px(0.0),
            y = py(v),
            xt = px(0.0) - 8.0,
            yy = py(v) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">False positive rate</text>"#,
        PAD + SIZE / 2.0,
        PAD + SIZE + 36.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" transform="rotate(-90 {:.1} {:.1})">True positive rate</text>"#,
        PAD - 36.0,
        PAD + SIZE / 2.0,
        PAD - 36.0,
        PAD + SIZE / 2.0
    );
    let _ = writeln!(
        s,
        r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="gray" stroke-dasharray="4 4"/>"#,
        px(0.0),
        py(0.0),
        px(1.0),
        py(1.0)
    );
    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = ser
            .curve
            .fpr
            .iter()
            .zip(&ser.curve.tpr)
            .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let ly = PAD + 10.0 + 16.0 * i as f64;
        let lx = PAD + SIZE + 20.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{} (AUC {:.3})</text>"#,
            lx + 18.0,
            lx + 24.0,
            ly + 4.0,
            escape(&ser.label),
            ser.auc
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
