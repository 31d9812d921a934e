//! Distribution reporting over batches of similarity records: per-metric
//! histograms, five-number summaries (type-7 linear-interpolation
//! quantiles), and means, with CSV and JSON emissions that round-trip.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TextError};
use crate::metrics::SimilarityRecord;

/// Default histogram resolution over each metric's [0, 1] range.
pub const DEFAULT_BINS: usize = 20;

/// The metrics aggregated per record. ROUGE contributes its F1 headline
/// plus recall and precision; the raw Levenshtein distance participates
/// through its normalized form, which shares the [0, 1] range.
type MetricGetter = fn(&SimilarityRecord) -> f64;

const METRICS: [(&str, MetricGetter); 14] = [
    ("bleu", |r| r.bleu),
    ("jaccard", |r| r.jaccard),
    ("cosine", |r| r.cosine),
    ("levenshtein_norm", |r| r.levenshtein_norm),
    ("rouge1_f1", |r| r.rouge1.f1),
    ("rouge1_recall", |r| r.rouge1.recall),
    ("rouge1_precision", |r| r.rouge1.precision),
    ("rouge2_f1", |r| r.rouge2.f1),
    ("rouge2_recall", |r| r.rouge2.recall),
    ("rouge2_precision", |r| r.rouge2.precision),
    ("rougeL_f1", |r| r.rouge_l.f1),
    ("rougeL_recall", |r| r.rouge_l.recall),
    ("rougeL_precision", |r| r.rouge_l.precision),
    ("jaro_winkler", |r| r.jaro_winkler),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinCount {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricDistribution {
    pub metric: String,
    pub mean: f64,
    pub summary: FiveNumber,
    pub histogram: Vec<BinCount>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionReport {
    pub records: usize,
    pub bins: usize,
    pub metrics: Vec<MetricDistribution>,
}

/// Type-7 quantile (linear interpolation) over a sorted slice.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 >= n {
        sorted[n - 1]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

fn distribution(metric: &str, values: &[f64], bins: usize) -> MetricDistribution {
    let n = values.len();
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("scores are finite"));
    let mut histogram: Vec<BinCount> = (0..bins)
        .map(|i| BinCount {
            lo: i as f64 / bins as f64,
            hi: (i + 1) as f64 / bins as f64,
            count: 0,
            mass: 0.0,
        })
        .collect();
    for &v in values {
        let idx = ((v * bins as f64).floor() as usize).min(bins - 1);
        histogram[idx].count += 1;
    }
    for bin in &mut histogram {
        bin.mass = bin.count as f64 / n as f64;
    }
    MetricDistribution {
        metric: metric.to_string(),
        mean: values.iter().sum::<f64>() / n as f64,
        summary: FiveNumber {
            min: sorted[0],
            q1: quantile(&sorted, 0.25),
            median: quantile(&sorted, 0.5),
            q3: quantile(&sorted, 0.75),
            max: sorted[n - 1],
        },
        histogram,
    }
}

/// Aggregates similarity records with the default histogram resolution.
pub fn aggregate(records: &[SimilarityRecord]) -> Result<DistributionReport> {
    aggregate_with_bins(records, DEFAULT_BINS)
}

/// Aggregates similarity records into per-metric distributions.
pub fn aggregate_with_bins(records: &[SimilarityRecord], bins: usize) -> Result<DistributionReport> {
    if records.is_empty() {
        return Err(TextError::EmptyRecords);
    }
    if bins == 0 {
        return Err(TextError::InvalidParameter {
            detail: "histogram needs at least one bin".into(),
        });
    }
    let metrics = METRICS
        .iter()
        .map(|(name, get)| {
            let values: Vec<f64> = records.iter().map(get).collect();
            distribution(name, &values, bins)
        })
        .collect();
    Ok(DistributionReport {
        records: records.len(),
        bins,
        metrics,
    })
}

impl DistributionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| TextError::BadFormat {
            detail: format!("report json: {e}"),
        })
    }

    /// One row per histogram bin and per summary statistic:
    /// `metric,kind,key,lo,hi,count,value`. No field ever contains a
    /// comma, and floats print in shortest round-trip form, so the
    /// emission parses back exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,kind,key,lo,hi,count,value\n");
        out.push_str(&format!("_report,meta,records,,,{},\n", self.records));
        out.push_str(&format!("_report,meta,bins,,,{},\n", self.bins));
        for m in &self.metrics {
            for (i, bin) in m.histogram.iter().enumerate() {
                out.push_str(&format!(
                    "{},bin,{},{},{},{},{}\n",
                    m.metric, i, bin.lo, bin.hi, bin.count, bin.mass
                ));
            }
            for (key, value) in [
                ("min", m.summary.min),
                ("q1", m.summary.q1),
                ("median", m.summary.median),
                ("q3", m.summary.q3),
                ("max", m.summary.max),
                ("mean", m.mean),
            ] {
                out.push_str(&format!("{},summary,{key},,,,{value}\n", m.metric));
            }
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |line: usize, detail: &str| TextError::BadFormat {
            detail: format!("report csv line {}: {detail}", line + 1),
        };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, "metric,kind,key,lo,hi,count,value")) => {}
            _ => {
                return Err(TextError::BadFormat {
                    detail: "report csv: missing header".into(),
                })
            }
        }
        let mut records = None;
        let mut bins_meta = None;
        let mut metrics: Vec<MetricDistribution> = Vec::new();
        for (i, line) in lines {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 7 {
                return Err(bad(i, "expected 7 fields"));
            }
            let (metric, kind, key) = (fields[0], fields[1], fields[2]);
            let parse_f64 = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| bad(i, &format!("bad float {s:?}")))
            };
            let parse_usize = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| bad(i, &format!("bad count {s:?}")))
            };
            match kind {
                "meta" => match key {
                    "records" => records = Some(parse_usize(fields[5])?),
                    "bins" => bins_meta = Some(parse_usize(fields[5])?),
                    _ => return Err(bad(i, "unknown meta key")),
                },
                "bin" => {
                    if metrics.last().map(|m| m.metric.as_str()) != Some(metric) {
                        metrics.push(MetricDistribution {
                            metric: metric.to_string(),
                            mean: 0.0,
                            summary: FiveNumber {
                                min: 0.0,
                                q1: 0.0,
                                median: 0.0,
                                q3: 0.0,
                                max: 0.0,
                            },
                            histogram: Vec::new(),
                        });
                    }
                    let m = metrics.last_mut().expect("just pushed");
                    m.histogram.push(BinCount {
                        lo: parse_f64(fields[3])?,
                        hi: parse_f64(fields[4])?,
                        count: parse_usize(fields[5])?,
                        mass: parse_f64(fields[6])?,
                    });
                }
                "summary" => {
                    let m = metrics
                        .last_mut()
                        .filter(|m| m.metric == metric)
                        .ok_or_else(|| bad(i, "summary before bins"))?;
                    let value = parse_f64(fields[6])?;
                    match key {
                        "min" => m.summary.min = value,
                        "q1" => m.summary.q1 = value,
                        "median" => m.summary.median = value,
                        "q3" => m.summary.q3 = value,
                        "max" => m.summary.max = value,
                        "mean" => m.mean = value,
                        _ => return Err(bad(i, "unknown summary key")),
                    }
                }
                _ => return Err(bad(i, "unknown row kind")),
            }
        }
        Ok(DistributionReport {
            records: records.ok_or_else(|| TextError::BadFormat {
                detail: "report csv: missing records meta row".into(),
            })?,
            bins: bins_meta.ok_or_else(|| TextError::BadFormat {
                detail: "report csv: missing bins meta row".into(),
            })?,
            metrics,
        })
    }
}
