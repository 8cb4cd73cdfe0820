use serde::{Deserialize, Serialize};

use super::config::{ScenarioConfig, DAYS_PER_YEAR};
use super::ScenarioError;

pub const HOURS_PER_YEAR: usize = 8760;

/// Day indices (0-based) kept when reducing a year to `days` representative
/// days: `floor((k + 0.5) * 365 / days)` for `k = 0..days`.
pub fn representative_day_indices(days: u32) -> Result<Vec<usize>, ScenarioError> {
    if !(1..=DAYS_PER_YEAR).contains(&days) {
        return Err(ScenarioError::Invalid {
            field: "horizon.rep_days".into(),
            message: format!("{days} outside 1..=365"),
        });
    }
    Ok((0..days)
        .map(|k| ((k as f64 + 0.5) * DAYS_PER_YEAR as f64 / days as f64).floor() as usize)
        .collect())
}

/// Keeps the hourly values of the representative days of an 8760-hour year.
pub fn reduce_to_representative_days(series: &[f64], days: u32) -> Result<Vec<f64>, ScenarioError> {
    if series.len() != HOURS_PER_YEAR {
        return Err(ScenarioError::Length {
            what: "hourly series".into(),
            expected: HOURS_PER_YEAR,
            got: series.len(),
        });
    }
    Ok(representative_day_indices(days)?
        .into_iter()
        .flat_map(|d| series[d * 24..(d + 1) * 24].iter().copied())
        .collect())
}

/// Brings a raw series to `rep_days × hours_per_day` values: a full year is
/// reduced to representative days, an already reduced series is kept.
pub fn fit_to_horizon(
    series: &[f64],
    cfg: &ScenarioConfig,
    what: &str,
) -> Result<Vec<f64>, ScenarioError> {
    let steps = cfg.steps_per_year();
    if series.len() == steps {
        return Ok(series.to_vec());
    }
    if series.len() == HOURS_PER_YEAR && cfg.hours_per_day == 24 {
        return reduce_to_representative_days(series, cfg.rep_days);
    }
    Err(ScenarioError::Length {
        what: what.into(),
        expected: steps,
        got: series.len(),
    })
}

/// Per-year load and PV capacity factor, each indexed `[year][d * T + t]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiYearProfiles {
    pub hours_per_day: usize,
    pub load: Vec<Vec<f64>>,
    pub pv_cf: Vec<Vec<f64>>,
}

impl MultiYearProfiles {
    pub fn years(&self) -> usize {
        self.load.len()
    }

    pub fn days(&self) -> usize {
        self.load
            .first()
            .map_or(0, |l| l.len() / self.hours_per_day)
    }

    /// `y` is 0-based here.
    pub fn load_at(&self, y: usize, d: usize, t: usize) -> f64 {
        self.load[y][d * self.hours_per_day + t]
    }

    pub fn pv_cf_at(&self, y: usize, d: usize, t: usize) -> f64 {
        self.pv_cf[y][d * self.hours_per_day + t]
    }

    pub fn peak_load(&self) -> f64 {
        self.load.iter().flatten().copied().fold(0.0, f64::max)
    }

    /// One year (0-based) as a single-year profile set.
    pub fn year(&self, y: usize) -> MultiYearProfiles {
        MultiYearProfiles {
            hours_per_day: self.hours_per_day,
            load: vec![self.load[y].clone()],
            pv_cf: vec![self.pv_cf[y].clone()],
        }
    }
}

/// Replicates base-year series over the horizon; load grows geometrically,
/// capacity factors stay fixed.
pub fn generate_multi_year(
    base_load: &[f64],
    base_cf: &[f64],
    cfg: &ScenarioConfig,
) -> Result<MultiYearProfiles, ScenarioError> {
    let load = fit_to_horizon(base_load, cfg, "load profile")?;
    let cf = fit_to_horizon(base_cf, cfg, "PV capacity factor profile")?;
    let years = cfg.planning_years as usize;
    Ok(MultiYearProfiles {
        hours_per_day: cfg.hours_per_day as usize,
        load: (0..years)
            .map(|y| {
                let g = (1.0 + cfg.load_growth).powi(y as i32);
                load.iter().map(|v| v * g).collect()
            })
            .collect(),
        pv_cf: vec![cf; years],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(years: u32, days: u32, growth: f64) -> ScenarioConfig {
        ScenarioConfig {
            planning_years: years,
            rep_days: days,
            load_growth: growth,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn full_year_is_identity() {
        let s: Vec<f64> = (0..HOURS_PER_YEAR).map(|i| i as f64).collect();
        assert_eq!(reduce_to_representative_days(&s, 365).unwrap(), s);
        assert_eq!(
            representative_day_indices(365).unwrap(),
            (0..365).collect::<Vec<_>>()
        );
    }

    #[test]
    fn stride_rule() {
        assert_eq!(representative_day_indices(1).unwrap(), vec![182]);
        assert_eq!(representative_day_indices(2).unwrap(), vec![91, 273]);
        assert_eq!(
            representative_day_indices(7).unwrap(),
            vec![26, 78, 130, 182, 234, 286, 338]
        );
        assert!(representative_day_indices(0).is_err());
        assert!(representative_day_indices(366).is_err());
    }

    #[test]
    fn seven_day_reduction() {
        let s: Vec<f64> = (0..HOURS_PER_YEAR).map(|i| (i / 24) as f64).collect();
        let r = reduce_to_representative_days(&s, 7).unwrap();
        assert_eq!(r.len(), 168);
        assert_eq!(r[0], 26.0);
        assert_eq!(r[24 * 6 + 23], 338.0);
        assert_eq!(cfg(1, 7, 0.0).alpha(), 365.0 / 7.0);
    }

    #[test]
    fn constant_series_stays_constant() {
        let r = reduce_to_representative_days(&[0.3; HOURS_PER_YEAR], 12).unwrap();
        assert!(r.iter().all(|&v| v == 0.3));
    }

    #[test]
    fn growth() {
        let base = vec![0.8; 24];
        let flat = generate_multi_year(&base, &[0.0; 24], &cfg(3, 1, 0.0)).unwrap();
        assert!(flat.load.iter().all(|y| y == &base));
        let grown = generate_multi_year(&base, &[0.0; 24], &cfg(25, 1, 0.005)).unwrap();
        assert!((grown.peak_load() - 0.8 * 1.005f64.powi(24)).abs() < 1e-12);
        assert!((grown.peak_load() - 0.9017).abs() < 1e-4);
    }

    #[test]
    fn length_mismatch() {
        assert!(generate_multi_year(&[1.0; 10], &[0.0; 24], &cfg(1, 1, 0.0)).is_err());
    }
}
