use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::dataset::DatasetReader;
use crate::error::Result;
use crate::instance::TaskMeta;

/// Nearest-rank percentile of sorted data: the value at rank
/// `ceil(p/100 * n)` (at least 1).
pub fn nearest_rank(sorted: &[usize], p: f64) -> Option<usize> {
    if sorted.is_empty() {
        return None;
    }
    let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
    Some(sorted[rank.clamp(1, sorted.len()) - 1])
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LengthSummary {
    pub min: Option<usize>,
    pub p5: Option<usize>,
    pub p50: Option<usize>,
    pub p95: Option<usize>,
    pub max: Option<usize>,
    pub mean: Option<f64>,
}

impl LengthSummary {
    pub fn from_lengths(mut lengths: Vec<usize>) -> Self {
        lengths.sort_unstable();
        let mean = (!lengths.is_empty())
            .then(|| lengths.iter().sum::<usize>() as f64 / lengths.len() as f64);
        LengthSummary {
            min: lengths.first().copied(),
            p5: nearest_rank(&lengths, 5.0),
            p50: nearest_rank(&lengths, 50.0),
            p95: nearest_rank(&lengths, 95.0),
            max: lengths.last().copied(),
            mean,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub records: usize,
    /// Whitespace-token lengths.
    pub source_tokens: LengthSummary,
    pub target_tokens: LengthSummary,
    /// Records per task tag.
    pub tasks: BTreeMap<String, usize>,
    /// Elementary kinds appearing in task metadata (ensemble records count
    /// each of their kinds).
    pub kinds: BTreeMap<String, usize>,
}

impl StatsReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "records: {}", self.records);
        let fmt = |v: Option<usize>| v.map_or("-".to_string(), |v| v.to_string());
        for (name, s) in [
            ("source", &self.source_tokens),
            ("target", &self.target_tokens),
        ] {
            let _ = writeln!(
                out,
                "{name} tokens: min {} p5 {} p50 {} p95 {} max {} mean {}",
                fmt(s.min),
                fmt(s.p5),
                fmt(s.p50),
                fmt(s.p95),
                fmt(s.max),
                s.mean.map_or("-".to_string(), |m| format!("{m:.2}"))
            );
        }
        let _ = writeln!(out, "tasks:");
        for (t, n) in &self.tasks {
            let _ = writeln!(out, "  {t:<32} {n}");
        }
        if !self.kinds.is_empty() {
            let _ = writeln!(out, "elementary kinds:");
            for (k, n) in &self.kinds {
                let _ = writeln!(out, "  {k:<32} {n}");
            }
        }
        out
    }
}

pub fn dataset_stats(path: impl AsRef<Path>) -> Result<StatsReport> {
    let mut report = StatsReport::default();
    let mut sources = Vec::new();
    let mut targets = Vec::new();
    for record in DatasetReader::open(path)? {
        let record = record?;
        report.records += 1;
        sources.push(record.source.split_whitespace().count());
        targets.push(record.target.split_whitespace().count());
        *report.tasks.entry(record.task.clone()).or_default() += 1;
        if let Ok(TaskMeta::Elementary { records, .. }) = record.task_meta() {
            for r in records {
                *report.kinds.entry(r.kind.name().to_string()).or_default() += 1;
            }
        }
    }
    report.source_tokens = LengthSummary::from_lengths(sources);
    report.target_tokens = LengthSummary::from_lengths(targets);
    Ok(report)
}
