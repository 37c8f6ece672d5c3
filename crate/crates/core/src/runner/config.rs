//! Flat key-value experiment configuration with dotted namespaces.
//!
//! Grammar, line by line: `key = value` with `#` comments and blank lines
//! ignored; keys are dotted lowercase identifiers; values are numbers or
//! comma-separated number lists. Unknown keys, malformed syntax and
//! out-of-range values are reported with line/column positions.

use std::collections::BTreeMap;

use crate::dynamics::{Frame, IntegratorConfig};
use crate::model::{NonlinearityModel, SystemParams};
use crate::{Error, Result};

/// Parsed `key = values` map with source locations.
#[derive(Debug, Clone, Default)]
pub struct ConfigMap {
    entries: BTreeMap<String, (usize, usize, Vec<f64>)>,
}

impl ConfigMap {
    pub fn get(&self, key: &str) -> Option<f64> {
        self.entries.get(key).map(|(_, _, v)| v[0])
    }

    pub fn get_list(&self, key: &str) -> Option<&[f64]> {
        self.entries.get(key).map(|(_, _, v)| v.as_slice())
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|s| s.as_str())
    }

    fn location(&self, key: &str) -> (usize, usize) {
        self.entries.get(key).map(|(l, c, _)| (*l, *c)).unwrap_or((0, 0))
    }
}

/// Parse the flat config text.
pub fn parse_config(text: &str) -> Result<ConfigMap> {
    let mut map = ConfigMap::default();
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let eq = match line.find('=') {
            Some(p) => p,
            None => {
                return Err(Error::Config {
                    line: line_no,
                    col: line.len(),
                    message: "expected 'key = value'".into(),
                })
            }
        };
        let key = line[..eq].trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '.' || c == '_')
        {
            return Err(Error::Config {
                line: line_no,
                col: 1,
                message: format!("malformed key '{key}'"),
            });
        }
        let val_str = line[eq + 1..].trim();
        let mut vals = Vec::new();
        for (k, piece) in val_str.split(',').enumerate() {
            let piece = piece.trim();
            match piece.parse::<f64>() {
                Ok(v) => vals.push(v),
                Err(_) => {
                    return Err(Error::Config {
                        line: line_no,
                        col: eq + 2 + k,
                        message: format!("'{piece}' is not a number"),
                    })
                }
            }
        }
        if vals.is_empty() {
            return Err(Error::Config { line: line_no, col: eq + 2, message: "empty value".into() });
        }
        map.entries.insert(key.to_string(), (line_no, eq + 2, vals));
    }
    Ok(map)
}

/// Experiment run description: name, resolved parameters, knobs.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub name: String,
    pub params: SystemParams,
    pub integrator: IntegratorConfig,
    pub fast: bool,
    pub workers: Option<usize>,
    /// Raw map for experiment-specific keys (sweeps, grids, time spans).
    pub extra: ConfigMap,
    /// Echo of every key that contributed, defaults included.
    pub echo: Vec<(String, String)>,
}

const SYSTEM_KEYS: &[&str] = &[
    "system.omega1_mhz",
    "system.omega2_mhz",
    "system.transmon_mhz",
    "system.beta_mhz",
    "system.g_mhz",
    "system.gamma_nr_hz",
    "system.gamma_nr_d_hz",
    "system.gamma_tr_hz",
    "system.gamma_tr_d_hz",
    "integrator.samples_per_period",
    "workers.count",
];

/// Experiment-specific keys accepted in addition to the common set.
fn extra_keys(experiment: &str) -> &'static [&'static str] {
    match experiment {
        "fig2" => &["sweep.g_mhz", "rabi.omega_nr_mhz", "rabi.omega_sc_mhz"],
        "fig3a" | "fig3b" => &[
            "sweep.gamma_nr_d_hz",
            "sweep.gamma_tr_d_hz",
            "grid.points_per_axis",
        ],
        "fig4" => &["sweep.delta_mhz", "pulse.v0_mhz"],
        "fig5a" => &["spin1.d_mhz", "spin1.e_mhz", "trotter.steps", "trace.points", "sweep.gamma_nr_d_hz"],
        "fig5b" => &["tim.t_max_us", "trotter.steps", "trace.points", "sweep.gamma_nr_d_hz", "pulse.v0_mhz"],
        "fig6" => &["sweep.u_over_omega", "nl.omega_mhz"],
        "fig7" => &["sweep.g_mhz", "rabi.omega_nr_mhz", "rabi.omega_sc_mhz", "bath.gamma_sc_hz", "bath.gamma_sc_d_hz"],
        "tablea" => &["nl.delta_target_mhz", "nl.n_max"],
        "thermal" => &["bath.n_bar", "sweep.chi_hz"],
        _ => &[],
    }
}

/// Validate raw config text against an experiment's key set and fill
/// defaults (the standard operating point of the platform).
pub fn validate_config(experiment: &str, text: &str) -> Result<ExperimentConfig> {
    let map = parse_config(text)?;
    let allowed: Vec<&str> = SYSTEM_KEYS
        .iter()
        .chain(extra_keys(experiment).iter())
        .copied()
        .collect();
    for key in map.keys() {
        if !allowed.contains(&key) {
            let (line, col) = map.location(key);
            return Err(Error::Config {
                line,
                col,
                message: format!("unknown key '{key}' for experiment '{experiment}'"),
            });
        }
    }

    let mut p = SystemParams::default();
    let mut echo: Vec<(String, String)> = Vec::new();
    let take = |key: &str, slot: &mut f64, echo: &mut Vec<(String, String)>| {
        if let Some(v) = map.get(key) {
            *slot = v;
            echo.push((key.to_string(), format!("{v} (config)")));
        } else {
            echo.push((key.to_string(), format!("{slot} (default)")));
        }
    };
    take("system.omega1_mhz", &mut p.omega1_mhz, &mut echo);
    take("system.omega2_mhz", &mut p.omega2_mhz, &mut echo);
    take("system.transmon_mhz", &mut p.transmon_mhz, &mut echo);
    let mut beta = 3.0;
    take("system.beta_mhz", &mut beta, &mut echo);
    p.nonlinearity1 = NonlinearityModel::DiagonalKerr { beta_mhz: beta };
    p.nonlinearity2 = NonlinearityModel::DiagonalKerr { beta_mhz: beta };
    let mut g = 6.0;
    take("system.g_mhz", &mut g, &mut echo);
    p.g1_mhz = g;
    p.g2_mhz = g;
    let mut gamma_nr = 50.0;
    take("system.gamma_nr_hz", &mut gamma_nr, &mut echo);
    p.gamma1_hz = gamma_nr;
    p.gamma2_hz = gamma_nr;
    let mut gamma_nr_d = 100.0;
    take("system.gamma_nr_d_hz", &mut gamma_nr_d, &mut echo);
    p.gamma1_d_hz = gamma_nr_d;
    p.gamma2_d_hz = gamma_nr_d;
    take("system.gamma_tr_hz", &mut p.gamma_tr_hz, &mut echo);
    take("system.gamma_tr_d_hz", &mut p.gamma_tr_d_hz, &mut echo);
    p.validate().map_err(|e| Error::Config {
        line: 0,
        col: 0,
        message: format!("system parameters out of range: {e}"),
    })?;

    let mut integrator = IntegratorConfig::default();
    if let Some(v) = map.get("integrator.samples_per_period") {
        if !(1.0..=10_000.0).contains(&v) {
            let (line, col) = map.location("integrator.samples_per_period");
            return Err(Error::Config {
                line,
                col,
                message: "samples_per_period outside [1, 10000]".into(),
            });
        }
        integrator.samples_per_period = v;
        echo.push(("integrator.samples_per_period".into(), format!("{v} (config)")));
    } else {
        echo.push(("integrator.samples_per_period".into(), "40 (default)".into()));
    }
    integrator.frame = Frame::InteractionPicture;

    let workers = map.get("workers.count").map(|v| v as usize);

    Ok(ExperimentConfig {
        name: experiment.to_string(),
        params: p,
        integrator,
        fast: false,
        workers,
        extra: map,
        echo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_the_operating_point() {
        let cfg = validate_config("fig3a", "").unwrap();
        assert_eq!(cfg.params.omega1_mhz, 85.0);
        assert_eq!(cfg.params.omega2_mhz, 75.0);
        assert_eq!(cfg.params.g1_mhz, 6.0);
        assert_eq!(cfg.params.gamma1_hz, 50.0);
        assert_eq!(cfg.params.gamma_tr_hz, 1.0e5);
        assert!(matches!(
            cfg.params.nonlinearity1,
            NonlinearityModel::DiagonalKerr { beta_mhz } if beta_mhz == 3.0
        ));
        assert!(cfg.echo.iter().any(|(k, v)| k == "system.omega1_mhz" && v.contains("default")));
    }

    #[test]
    fn negative_rate_is_a_validation_error() {
        let err = validate_config("fig3a", "system.gamma_nr_hz = -5\n").unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
    }

    #[test]
    fn unknown_key_lists_position() {
        let err = validate_config("fig2", "nonsense.key = 1\n").unwrap_err();
        match err {
            Error::Config { line, message, .. } => {
                assert_eq!(line, 1);
                assert!(message.contains("unknown key"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_value_reports_line_and_column() {
        let err = parse_config("system.g_mhz = banana\n").unwrap_err();
        match err {
            Error::Config { line, col, .. } => {
                assert_eq!(line, 1);
                assert!(col > 10);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn overrides_take_effect_and_are_echoed() {
        let cfg = validate_config("fig2", "system.g_mhz = 4.5\n# comment\n").unwrap();
        assert_eq!(cfg.params.g1_mhz, 4.5);
        assert!(cfg.echo.iter().any(|(k, v)| k == "system.g_mhz" && v.contains("config")));
    }

    #[test]
    fn lists_parse_into_sweeps() {
        let cfg = validate_config("fig2", "sweep.g_mhz = 0, 10, 20\n").unwrap();
        assert_eq!(cfg.extra.get_list("sweep.g_mhz").unwrap(), &[0.0, 10.0, 20.0]);
    }
}
