//! Scoring of trajectory judgments: temporal intersection-over-union for
//! error attribution, confusion-matrix metrics for binary success, and
//! per-platform aggregation.

use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::Platform;

/// Closed time interval in seconds, `start <= end`. A zero-length interval
/// is a single instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "(f64, f64)", try_from = "(f64, f64)")]
pub struct Interval {
    start: f64,
    end: f64,
}

impl Interval {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !start.is_finite() || !end.is_finite() {
            return Err(Error::invalid_input("interval endpoints must be finite"));
        }
        if start < 0.0 {
            return Err(Error::invalid_input("interval must not start before 0"));
        }
        if start > end {
            return Err(Error::invalid_input(format!(
                "interval start {start} exceeds end {end}"
            )));
        }
        Ok(Self { start, end })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }
}

impl From<Interval> for (f64, f64) {
    fn from(v: Interval) -> Self {
        (v.start, v.end)
    }
}

impl TryFrom<(f64, f64)> for Interval {
    type Error = Error;

    fn try_from(v: (f64, f64)) -> Result<Self> {
        Interval::new(v.0, v.1)
    }
}

/// Temporal intersection-over-union of two intervals:
/// `max(0, min(ends) - max(starts)) / (max(ends) - min(starts))`.
///
/// Two identical instants have an empty union; the limit value 1.0 is
/// returned for that case, and 0.0 for an instant against any disjoint
/// interval. Symmetric and translation-invariant.
pub fn tiou(pred: &Interval, gt: &Interval) -> f64 {
    let intersection = (pred.end.min(gt.end) - pred.start.max(gt.start)).max(0.0);
    let union = pred.end.max(gt.end) - pred.start.min(gt.start);
    if union == 0.0 {
        // All four endpoints coincide.
        return 1.0;
    }
    intersection / union
}

/// Binary confusion counts. Positive class is `true`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    #[serde(rename = "tp")]
    pub true_pos: usize,
    #[serde(rename = "fp")]
    pub false_pos: usize,
    #[serde(rename = "tn")]
    pub true_neg: usize,
    #[serde(rename = "fn")]
    pub false_neg: usize,
}

impl ConfusionCounts {
    pub fn add(&mut self, pred: bool, label: bool) {
        match (pred, label) {
            (true, true) => self.true_pos += 1,
            (true, false) => self.false_pos += 1,
            (false, false) => self.true_neg += 1,
            (false, true) => self.false_neg += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }

    pub fn accuracy(&self) -> f64 {
        (self.true_pos + self.true_neg) as f64 / self.total() as f64
    }

    /// `TP / (TP + FP)`, absent when nothing was predicted positive.
    pub fn precision(&self) -> Option<f64> {
        match self.true_pos + self.false_pos {
            0 => None,
            d => Some(self.true_pos as f64 / d as f64),
        }
    }

    /// `TP / (TP + FN)`, absent when no positives exist.
    pub fn recall(&self) -> Option<f64> {
        match self.true_pos + self.false_neg {
            0 => None,
            d => Some(self.true_pos as f64 / d as f64),
        }
    }
}

/// Accuracy, precision, and recall of a prediction set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryMetrics {
    pub accuracy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recall: Option<f64>,
    pub counts: ConfusionCounts,
}

/// Standard confusion-matrix metrics over paired predictions and labels.
/// Undefined precision or recall (zero denominator) is reported as absent,
/// never as 0 or 1.
pub fn binary_metrics(preds: &[bool], labels: &[bool]) -> Result<BinaryMetrics> {
    if preds.is_empty() {
        return Err(Error::invalid_input("no predictions to score"));
    }
    if preds.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            context: "predictions vs labels",
            left: preds.len(),
            right: labels.len(),
        });
    }
    let mut counts = ConfusionCounts::default();
    for (&p, &l) in preds.iter().zip(labels.iter()) {
        counts.add(p, l);
    }
    Ok(BinaryMetrics {
        accuracy: counts.accuracy(),
        precision: counts.precision(),
        recall: counts.recall(),
        counts,
    })
}

/// One scored judgment, as read from the predictions file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub id: String,
    pub platform: Platform,
    pub pred_success: bool,
    pub gt_success: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pred_interval: Option<Interval>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gt_interval: Option<Interval>,
}

/// Metrics of one group of records (a platform, or the pooled total).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupMetrics {
    pub count: usize,
    pub accuracy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recall: Option<f64>,
    pub counts: ConfusionCounts,
    /// Mean tIoU over records carrying both intervals; absent if none do.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_tiou: Option<f64>,
    pub tiou_count: usize,
}

fn group_metrics(records: &[&EvalRecord]) -> GroupMetrics {
    let mut counts = ConfusionCounts::default();
    let mut tiou_sum = 0.0;
    let mut tiou_count = 0;
    for rec in records {
        counts.add(rec.pred_success, rec.gt_success);
        if let (Some(pred), Some(gt)) = (&rec.pred_interval, &rec.gt_interval) {
            tiou_sum += tiou(pred, gt);
            tiou_count += 1;
        }
    }
    GroupMetrics {
        count: records.len(),
        accuracy: counts.accuracy(),
        precision: counts.precision(),
        recall: counts.recall(),
        counts,
        mean_tiou: (tiou_count > 0).then(|| tiou_sum / tiou_count as f64),
        tiou_count,
    }
}

/// One report row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlatformRow {
    pub platform: Platform,
    pub metrics: GroupMetrics,
}

/// Per-platform metrics plus the pooled overall row. Overall is computed
/// over the union of records (micro average), not the mean of group scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub platforms: Vec<PlatformRow>,
    pub overall: GroupMetrics,
}

/// Groups records by platform and scores each group and the pooled total.
pub fn aggregate(records: &[EvalRecord]) -> Result<EvalReport> {
    if records.is_empty() {
        return Err(Error::invalid_input("no records to aggregate"));
    }
    let mut platforms = Vec::new();
    for platform in Platform::ALL {
        let group: Vec<&EvalRecord> =
            records.iter().filter(|r| r.platform == platform).collect();
        if !group.is_empty() {
            platforms.push(PlatformRow {
                platform,
                metrics: group_metrics(&group),
            });
        }
    }
    let all: Vec<&EvalRecord> = records.iter().collect();
    Ok(EvalReport {
        platforms,
        overall: group_metrics(&all),
    })
}

/// Reads JSON-lines prediction records; blank lines are skipped, malformed
/// lines fail with their 1-based line number.
pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Vec<EvalRecord>> {
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: EvalRecord = serde_json::from_str(&line).map_err(|e| {
            Error::invalid_input(format!("line {}: {e}", idx + 1))
        })?;
        records.push(record);
    }
    Ok(records)
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{:>7.4}", v),
        None => format!("{:>7}", "-"),
    }
}

/// Plain-text summary table: one row per platform plus overall.
pub fn render_table(report: &EvalReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<14} {:>5} {:>7} {:>7} {:>7} {:>7}\n",
        "platform", "n", "acc", "prec", "rec", "tiou"
    ));
    let mut rows: Vec<(&str, &GroupMetrics)> = report
        .platforms
        .iter()
        .map(|row| (row.platform.as_str(), &row.metrics))
        .collect();
    rows.push(("overall", &report.overall));
    for (name, m) in rows {
        out.push_str(&format!(
            "{:<14} {:>5} {:>7.4} {} {} {}\n",
            name,
            m.count,
            m.accuracy,
            fmt_opt(m.precision),
            fmt_opt(m.recall),
            fmt_opt(m.mean_tiou),
        ));
    }
    out
}
