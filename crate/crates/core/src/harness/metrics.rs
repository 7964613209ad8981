use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::episode::EpisodeLog;

/// Summary statistics with the population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Contract("statistics of an empty sample".into()));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 {
            sorted[mid]
        } else {
            (sorted[mid - 1] + sorted[mid]) / 2.0
        };
        Ok(Self {
            mean,
            median,
            std: var.sqrt(),
            min: sorted[0],
            max: sorted[sorted.len() - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsTable {
    pub v_r: Stats,
    pub omega_r: Stats,
    pub x_box: Stats,
    pub d_ped: Stats,
    pub episodes: usize,
    pub rows: usize,
    /// Episode count per final status.
    pub terminations: BTreeMap<String, usize>,
}

/// Statistics pooled over every row of every log.
pub fn compute_metrics(logs: &[EpisodeLog]) -> Result<MetricsTable> {
    let rows: Vec<_> = logs.iter().flat_map(|l| &l.rows).collect();
    if rows.is_empty() {
        return Err(Error::Contract("metrics need at least one logged row".into()));
    }
    let col = |f: fn(&super::StepRecord) -> f64| -> Result<Stats> {
        Stats::from_values(&rows.iter().map(|r| f(r)).collect::<Vec<_>>())
    };
    let mut terminations = BTreeMap::new();
    for l in logs.iter().filter(|l| !l.rows.is_empty()) {
        *terminations.entry(l.status().as_str().to_string()).or_insert(0) += 1;
    }
    Ok(MetricsTable {
        v_r: col(|r| r.v_r)?,
        omega_r: col(|r| r.omega_r)?,
        x_box: col(|r| r.x_box)?,
        d_ped: col(|r| r.d_ped)?,
        episodes: logs.len(),
        rows: rows.len(),
        terminations,
    })
}

impl MetricsTable {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metrics serialize") + "\n"
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Plain-text table in the layout of the usual results table.
    pub fn render_table(&self) -> String {
        let mut s = format!(
            "{:<10}{:>12}{:>12}{:>12}{:>12}{:>12}\n",
            "", "Mean", "Median", "Std. Dev.", "Min.", "Max."
        );
        for (name, st) in [
            ("v_r", &self.v_r),
            ("omega_r", &self.omega_r),
            ("x_box", &self.x_box),
            ("d_ped", &self.d_ped),
        ] {
            s += &format!(
                "{:<10}{:>12.4}{:>12.4}{:>12.4}{:>12.4}{:>12.4}\n",
                name, st.mean, st.median, st.std, st.min, st.max
            );
        }
        let ends: Vec<String> = self.terminations.iter().map(|(k, v)| format!("{k}={v}")).collect();
        s += &format!("episodes {} rows {} ({})\n", self.episodes, self.rows, ends.join(", "));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_column() {
        let s = Stats::from_values(&[2.5; 7]).unwrap();
        assert_eq!((s.mean, s.median, s.min, s.max, s.std), (2.5, 2.5, 2.5, 2.5, 0.0));
    }

    #[test]
    fn one_two_three() {
        let s = Stats::from_values(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!((s.mean, s.median), (2.0, 2.0));
        assert!((s.std - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(Stats::from_values(&[4.0, 1.0, 2.0, 3.0]).unwrap().median, 2.5);
    }

    #[test]
    fn empty_is_error() {
        assert!(Stats::from_values(&[]).is_err());
        assert!(compute_metrics(&[]).is_err());
        assert!(compute_metrics(&[EpisodeLog::default()]).is_err());
    }
}
