//! Scenario configuration, time-series files and profile generation.

mod config;
mod profiles;
pub mod synthetic;

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{
    aging_model, BessParams, CderParams, ProfileFiles, PvParams, ScenarioConfig, ScenarioFile,
    SolverConfig, TariffConfig, TariffMode, DAYS_PER_YEAR,
};
pub use profiles::{
    fit_to_horizon, generate_multi_year, reduce_to_representative_days, representative_day_indices,
    MultiYearProfiles, HOURS_PER_YEAR,
};

use crate::degradation::AgingModel;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: field `{field}`: {message}")]
    Parse {
        path: PathBuf,
        field: String,
        message: String,
    },
    #[error("{path}, row {row}: {message}")]
    Csv {
        path: PathBuf,
        row: usize,
        message: String,
    },
    #[error("invalid `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("{what} has {got} values, expected {expected}")]
    Length {
        what: String,
        expected: usize,
        got: usize,
    },
}

/// Import prices per representative hour, `[d * T + t]`, in $/MWh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TariffSchedule {
    pub mode: TariffMode,
    pub import_price: Vec<f64>,
    /// Export price as a fraction of the import price.
    pub export_factor: f64,
}

impl TariffSchedule {
    pub fn fixed(price: f64, steps: usize, export_factor: f64) -> Self {
        Self {
            mode: TariffMode::Fixed,
            import_price: vec![price; steps],
            export_factor,
        }
    }

    pub fn export_price(&self, i: usize) -> f64 {
        self.export_factor * self.import_price[i]
    }
}

/// A fully loaded scenario: parameters plus base-year series already
/// brought to `rep_days × hours_per_day` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub cder: CderParams,
    pub pv: PvParams,
    pub bess: BessParams,
    pub tariff: TariffSchedule,
    pub base_load: Vec<f64>,
    pub base_pv_cf: Vec<f64>,
    pub solver: SolverConfig,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.config.validate()?;
        self.cder.validate()?;
        self.pv.validate()?;
        self.bess.validate()?;
        self.solver.validate()?;
        let steps = self.config.steps_per_year();
        for (what, series) in [
            ("load profile", &self.base_load),
            ("PV capacity factor profile", &self.base_pv_cf),
            ("tariff", &self.tariff.import_price),
        ] {
            if series.len() != steps {
                return Err(ScenarioError::Length {
                    what: what.into(),
                    expected: steps,
                    got: series.len(),
                });
            }
        }
        let bad = |field: &str, message: &str| {
            Err(ScenarioError::Invalid {
                field: field.into(),
                message: message.into(),
            })
        };
        if self.base_load.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return bad("profiles.load", "values must be finite and >= 0");
        }
        if self.base_pv_cf.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return bad("profiles.pv_cf", "values must lie in [0, 1]");
        }
        if self
            .tariff
            .import_price
            .iter()
            .any(|v| !(v.is_finite() && *v >= 0.0))
        {
            return bad("tariff", "prices must be finite and >= 0");
        }
        if !(0.0..=1.0).contains(&self.tariff.export_factor) {
            return bad("tariff.export_factor", "must be in [0, 1]");
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        self.config.alpha()
    }

    pub fn profiles(&self) -> Result<MultiYearProfiles, ScenarioError> {
        generate_multi_year(&self.base_load, &self.base_pv_cf, &self.config)
    }

    pub fn aging_model(&self) -> Result<AgingModel, ScenarioError> {
        aging_model(&self.bess, &self.pv)
    }
}

fn read_text(path: &Path) -> Result<String, ScenarioError> {
    fs::read_to_string(path).map_err(|source| ScenarioError::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a two-column `hour,<value>` CSV. Hours must run 0, 1, 2, ...
pub fn read_series_csv(path: &Path, value_column: &str) -> Result<Vec<f64>, ScenarioError> {
    let text = read_text(path)?;
    let csv_err = |row: usize, message: String| ScenarioError::Csv {
        path: path.to_path_buf(),
        row,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| csv_err(1, e.to_string()))?;
    if headers.len() != 2 || &headers[0] != "hour" || &headers[1] != value_column {
        return Err(csv_err(
            1,
            format!(
                "header must be `hour,{value_column}`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| csv_err(row, e.to_string()))?;
        let hour: usize = record[0]
            .parse()
            .map_err(|_| csv_err(row, format!("bad hour `{}`", &record[0])))?;
        if hour != i {
            return Err(csv_err(row, format!("expected hour {i}, found {hour}")));
        }
        let value: f64 = record[1]
            .parse()
            .map_err(|_| csv_err(row, format!("bad value `{}`", &record[1])))?;
        if !value.is_finite() {
            return Err(csv_err(row, format!("non-finite value `{}`", &record[1])));
        }
        out.push(value);
    }
    Ok(out)
}

pub fn write_series_csv(
    path: &Path,
    value_column: &str,
    values: &[f64],
) -> Result<(), ScenarioError> {
    let mut text = format!("hour,{value_column}\n");
    for (i, v) in values.iter().enumerate() {
        text.push_str(&format!("{i},{v}\n"));
    }
    fs::write(path, text).map_err(|source| ScenarioError::Write {
        path: path.to_path_buf(),
        source,
    })
}

pub const LOAD_COLUMN: &str = "value";
pub const PRICE_COLUMN: &str = "price_usd_per_mwh";

/// Parses a scenario JSON document and the CSV files it references.
pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = read_text(path)?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let file: ScenarioFile =
        serde_path_to_error::deserialize(de).map_err(|e| ScenarioError::Parse {
            path: path.to_path_buf(),
            field: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
    let base = path.parent().unwrap_or(Path::new("."));
    file.horizon.validate()?;
    let cfg = &file.horizon;
    let steps = cfg.steps_per_year();

    let load = read_series_csv(&base.join(&file.profiles.load), LOAD_COLUMN)?;
    let cf = read_series_csv(&base.join(&file.profiles.pv_cf), LOAD_COLUMN)?;
    let tariff = match file.tariff.mode {
        TariffMode::Fixed => {
            if file.tariff.price_file.is_some() {
                return Err(ScenarioError::Invalid {
                    field: "tariff.price_file".into(),
                    message: "not used with a fixed tariff; set fixed_price".into(),
                });
            }
            let price = match file.tariff.fixed_price {
                Some(p) => p,
                None if cfg.is_islanded() => 0.0,
                None => {
                    return Err(ScenarioError::Invalid {
                        field: "tariff.fixed_price".into(),
                        message: "required for a grid-connected fixed tariff".into(),
                    })
                }
            };
            TariffSchedule::fixed(price, steps, file.tariff.export_factor)
        }
        mode => {
            let Some(rel) = &file.tariff.price_file else {
                return Err(ScenarioError::Invalid {
                    field: "tariff.price_file".into(),
                    message: "required for tou and wholesale tariffs".into(),
                });
            };
            let prices = read_series_csv(&base.join(rel), PRICE_COLUMN)?;
            TariffSchedule {
                mode,
                import_price: fit_to_horizon(&prices, cfg, "tariff")?,
                export_factor: file.tariff.export_factor,
            }
        }
    };

    let scenario = Scenario {
        base_load: fit_to_horizon(&load, cfg, "load profile")?,
        base_pv_cf: fit_to_horizon(&cf, cfg, "PV capacity factor profile")?,
        config: file.horizon,
        cder: file.cder,
        pv: file.pv,
        bess: file.bess,
        tariff,
        solver: file.solver,
    };
    scenario.validate()?;
    Ok(scenario)
}

/// Writes `scenario.json` plus its CSV series into `dir` and returns the
/// JSON path. Series are written at horizon resolution.
pub fn save_scenario(scenario: &Scenario, dir: &Path) -> Result<PathBuf, ScenarioError> {
    let write_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ScenarioError::Write { path, source }
    };
    fs::create_dir_all(dir).map_err(write_err(dir))?;
    write_series_csv(&dir.join("load.csv"), LOAD_COLUMN, &scenario.base_load)?;
    write_series_csv(&dir.join("pv_cf.csv"), LOAD_COLUMN, &scenario.base_pv_cf)?;
    let prices = &scenario.tariff.import_price;
    let uniform = prices.windows(2).all(|w| w[0] == w[1]);
    let tariff = if scenario.tariff.mode == TariffMode::Fixed && uniform {
        TariffConfig {
            mode: TariffMode::Fixed,
            fixed_price: Some(prices.first().copied().unwrap_or(0.0)),
            price_file: None,
            export_factor: scenario.tariff.export_factor,
        }
    } else {
        write_series_csv(&dir.join("tariff.csv"), PRICE_COLUMN, prices)?;
        TariffConfig {
            mode: match scenario.tariff.mode {
                TariffMode::Fixed => TariffMode::Tou,
                m => m,
            },
            fixed_price: None,
            price_file: Some("tariff.csv".into()),
            export_factor: scenario.tariff.export_factor,
        }
    };
    let file = ScenarioFile {
        horizon: scenario.config.clone(),
        cder: scenario.cder.clone(),
        pv: scenario.pv.clone(),
        bess: scenario.bess.clone(),
        tariff,
        profiles: ProfileFiles {
            load: "load.csv".into(),
            pv_cf: "pv_cf.csv".into(),
        },
        solver: scenario.solver.clone(),
    };
    let path = dir.join("scenario.json");
    let json = serde_json::to_string_pretty(&file).expect("scenario serializes");
    fs::write(&path, json + "\n").map_err(write_err(&path))?;
    Ok(path)
}
