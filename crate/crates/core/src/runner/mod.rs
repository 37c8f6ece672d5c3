//! Named, reproducible experiments.
//!
//! Each experiment regenerates one quantitative result of the platform
//! study as a numeric table: nonlinearity spectra, gate-fidelity maps,
//! digital-simulation traces, Bloch-Redfield lifetimes, thermal sensitivity.
//! Identical configuration yields byte-identical tables; nothing in the
//! pipeline draws randomness.

mod config;
mod experiments;

pub use config::{parse_config, validate_config, ConfigMap, ExperimentConfig};
pub use experiments::registry;

use crate::Result;

/// Rectangular numeric table with echo metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Parameter echo and provenance, key = value lines.
    pub metadata: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new(headers: &[&str]) -> Self {
        ResultTable {
            headers: headers.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.headers.len(), "ragged table row");
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: impl std::fmt::Display) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    /// Column index by header name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    /// All values of one column.
    pub fn values(&self, name: &str) -> Vec<f64> {
        match self.column(name) {
            Some(i) => self.rows.iter().map(|r| r[i]).collect(),
            None => Vec::new(),
        }
    }

    /// Deterministic text rendering: '#'-prefixed metadata, a header line,
    /// comma-separated rows at 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        out.push_str(&self.headers.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_sig(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// 12-significant-digit numeric formatting shared by every table.
pub fn format_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{v:.11e}")
}

/// Run a registered experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    experiments::dispatch(cfg)
}

/// Initialize the shared worker pool once, honoring the `EMQSIM_WORKERS`
/// environment variable and the `workers.count` config knob (config wins).
pub fn init_workers(count: Option<usize>) {
    use std::sync::Once;
    static ONCE: Once = Once::new();
    ONCE.call_once(|| {
        let env_cap = std::env::var("EMQSIM_WORKERS").ok().and_then(|s| s.parse::<usize>().ok());
        let n = count.or(env_cap);
        if let Some(n) = n {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rendering_is_deterministic() {
        let mut t = ResultTable::new(&["a", "b"]);
        t.meta("k", "v");
        t.push_row(vec![1.0, 2.5e-7]);
        t.push_row(vec![0.0, -3.25]);
        let one = t.to_csv();
        let two = t.to_csv();
        assert_eq!(one, two);
        assert!(one.starts_with("# k = v\na,b\n"));
        assert!(one.contains("2.50000000000e-7"));
    }

    #[test]
    #[should_panic(expected = "ragged")]
    fn ragged_rows_are_rejected() {
        let mut t = ResultTable::new(&["a", "b"]);
        t.push_row(vec![1.0]);
    }
}
