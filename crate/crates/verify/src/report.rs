//! Experiment reports: full JSON records plus one CSV summary row.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::fit::SlopeFit;

/// Echo of the configuration a report was produced with.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub n_list: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node_policy: Option<String>,
    /// anything experiment specific
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub extra: BTreeMap<String, serde_json::Value>,
}

/// One measured item: a polynomial at one degree, a grid point, a parameter value.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub item: Option<usize>,
    pub ratio: f64,
    /// excluded from the verdict (quadrature or cap scan did not converge)
    pub flagged: bool,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub values: BTreeMap<String, f64>,
}

impl Record {
    pub fn new(label: impl Into<String>, ratio: f64) -> Self {
        Self {
            label: label.into(),
            ratio,
            ..Self::default()
        }
    }

    pub fn n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn item(mut self, item: usize) -> Self {
        self.item = Some(item);
        self
    }

    pub fn flagged(mut self, flag: bool) -> Self {
        self.flagged = flag;
        self
    }

    pub fn with(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.to_string(), v);
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub median_ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<SlopeFit>,
    /// measured empirical constant
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    pub flagged: usize,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub extra: BTreeMap<String, f64>,
}

impl Summary {
    /// Min, max and median over the unflagged records.
    pub fn of(records: &[Record]) -> Self {
        let mut r: Vec<f64> = records
            .iter()
            .filter(|r| !r.flagged)
            .map(|r| r.ratio)
            .collect();
        r.sort_by(|a, b| a.total_cmp(b));
        let median = match r.len() {
            0 => f64::NAN,
            l if l % 2 == 1 => r[l / 2],
            l => 0.5 * (r[l / 2 - 1] + r[l / 2]),
        };
        Self {
            min_ratio: r.first().copied().unwrap_or(f64::NAN),
            max_ratio: r.last().copied().unwrap_or(f64::NAN),
            median_ratio: median,
            flagged: records.iter().filter(|r| r.flagged).count(),
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    pub criterion: String,
    pub detail: String,
}

impl Verdict {
    pub fn new(pass: bool, criterion: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            pass,
            criterion: criterion.into(),
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: ConfigEcho,
    pub records: Vec<Record>,
    pub summary: Summary,
    pub verdict: Verdict,
    /// not serialized, so that reruns produce identical artifacts
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl ExperimentReport {
    pub fn new(
        experiment: &str,
        config: ConfigEcho,
        records: Vec<Record>,
        summary: Summary,
        verdict: Verdict,
    ) -> Self {
        Self {
            experiment: experiment.to_string(),
            config,
            records,
            summary,
            verdict,
            wall_time_s: 0.0,
        }
    }

    pub fn timed(mut self, start: std::time::Instant) -> Self {
        self.wall_time_s = start.elapsed().as_secs_f64();
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict.pass
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn write_json(&self, path: &Path) -> std::io::Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_json().map_err(std::io::Error::other)?.as_bytes())?;
        f.write_all(b"\n")
    }

    /// Header plus one summary row.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let s = &self.summary;
        let mut header: Vec<String> = [
            "experiment",
            "records",
            "flagged",
            "min_ratio",
            "median_ratio",
            "max_ratio",
            "slope",
            "slope_lo95",
            "slope_hi95",
            "constant",
            "pass",
        ]
        .map(String::from)
        .to_vec();
        header.extend(s.extra.keys().cloned());
        w.write_record(&header)?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut row = vec![
            self.experiment.clone(),
            self.records.len().to_string(),
            s.flagged.to_string(),
            s.min_ratio.to_string(),
            s.median_ratio.to_string(),
            s.max_ratio.to_string(),
            opt(s.slope.map(|f| f.slope)),
            opt(s.slope.map(|f| f.lo95)),
            opt(s.slope.map(|f| f.hi95)),
            opt(s.constant),
            self.verdict.pass.to_string(),
        ];
        row.extend(s.extra.values().map(|v| v.to_string()));
        w.write_record(&row)?;
        w.flush()?;
        Ok(())
    }

    pub fn verdict_line(&self) -> String {
        format!(
            "{} {}: {} ({})",
            if self.verdict.pass { "PASS" } else { "FAIL" },
            self.experiment,
            self.verdict.criterion,
            self.verdict.detail
        )
    }
}
