//! Seeded synthetic year-long series for fixtures and demos.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::HOURS_PER_YEAR;

pub const RESIDENTIAL_PEAK: f64 = 0.8;
pub const RESIDENTIAL_MIN: f64 = 0.05;
pub const RESIDENTIAL_MEAN: f64 = 0.17;

/// Maps a non-constant shape onto `[min, peak]` as `min + (peak - min) · r^k`
/// with `r` the shape rescaled to `[0, 1]` and `k` chosen so the mean hits
/// `mean`. Extremes are hit exactly.
pub fn fit_shape(shape: &[f64], min: f64, peak: f64, mean: f64) -> Vec<f64> {
    let lo = shape.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = shape.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert!(hi > lo, "shape must not be constant");
    assert!(
        min < mean && mean < peak,
        "mean must lie strictly inside [min, peak]"
    );
    let r: Vec<f64> = shape.iter().map(|v| (v - lo) / (hi - lo)).collect();
    let target = (mean - min) / (peak - min);
    let mean_at = |k: f64| r.iter().map(|x| x.powf(k)).sum::<f64>() / r.len() as f64;
    // mean_at is decreasing in k
    let (mut a, mut b) = (1e-3_f64, 1e3_f64);
    for _ in 0..200 {
        let m = (a * b).sqrt();
        if mean_at(m) > target {
            a = m;
        } else {
            b = m;
        }
    }
    let k = (a * b).sqrt();
    r.iter().map(|x| min + (peak - min) * x.powf(k)).collect()
}

fn day_of(h: usize) -> f64 {
    (h / 24) as f64
}

/// Residential feeder load in MW: morning and evening peaks, summer cooling
/// swell, hourly noise. Peak 0.8, minimum 0.05, mean 0.17.
pub fn residential_load(seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut day_level = 1.0;
    let shape: Vec<f64> = (0..HOURS_PER_YEAR)
        .map(|h| {
            let hour = (h % 24) as f64;
            if h % 24 == 0 {
                day_level = rng.gen_range(0.85..1.15);
            }
            let season = 1.0 + 0.45 * (2.0 * PI * (day_of(h) - 200.0) / 365.0).cos();
            let morning = (-((hour - 7.5) / 1.8).powi(2)).exp();
            let evening = 1.6 * (-((hour - 19.0) / 2.5).powi(2)).exp();
            let base = 0.35 + morning + evening;
            base * season * day_level * rng.gen_range(0.9..1.1)
        })
        .collect();
    fit_shape(&shape, RESIDENTIAL_MIN, RESIDENTIAL_PEAK, RESIDENTIAL_MEAN)
}

/// PV capacity factor: half-sine daylight window that widens in summer,
/// scaled by a daily clearness draw.
pub fn pv_capacity_factor(seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut clearness = 1.0;
    (0..HOURS_PER_YEAR)
        .map(|h| {
            if h % 24 == 0 {
                clearness = rng.gen_range(0.35..1.0);
            }
            let hour = (h % 24) as f64 + 0.5;
            let summer = (2.0 * PI * (day_of(h) - 172.0) / 365.0).cos();
            let half_day = 6.0 + 1.5 * summer;
            let x = (hour - (12.5 - half_day)) / (2.0 * half_day);
            if !(0.0..=1.0).contains(&x) {
                return 0.0;
            }
            let peak = 0.8 + 0.1 * summer;
            (peak * clearness * (PI * x).sin()).clamp(0.0, 1.0)
        })
        .collect()
}

/// Three-level time-of-use tariff in $/MWh: off-peak overnight, shoulder
/// by day, peak 16:00 to 21:00.
pub fn tou_prices() -> Vec<f64> {
    (0..HOURS_PER_YEAR)
        .map(|h| match h % 24 {
            0..=6 | 22..=23 => 60.0,
            16..=20 => 180.0,
            _ => 100.0,
        })
        .collect()
}

/// Wholesale-like hourly prices in $/MWh with a daily double hump and noise,
/// floored at zero.
pub fn wholesale_prices(seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..HOURS_PER_YEAR)
        .map(|h| {
            let hour = (h % 24) as f64;
            let hump = 25.0 * (-((hour - 8.0) / 2.0).powi(2)).exp()
                + 45.0 * (-((hour - 18.5) / 2.0).powi(2)).exp();
            let season = 8.0 * (2.0 * PI * (day_of(h) - 200.0) / 365.0).cos();
            (30.0 + hump + season + rng.gen_range(-8.0..8.0)).max(0.0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residential_statistics() {
        let load = residential_load(7);
        assert_eq!(load.len(), HOURS_PER_YEAR);
        let max = load.iter().copied().fold(0.0, f64::max);
        let min = load.iter().copied().fold(f64::INFINITY, f64::min);
        let mean = load.iter().sum::<f64>() / load.len() as f64;
        assert!((max - 0.8).abs() < 1e-12);
        assert!((min - 0.05).abs() < 1e-12);
        assert!((mean - 0.17).abs() < 1e-9, "mean {mean}");
        assert_eq!(load, residential_load(7));
    }

    #[test]
    fn pv_in_range_and_dark_at_night() {
        let cf = pv_capacity_factor(3);
        assert!(cf.iter().all(|v| (0.0..=1.0).contains(v)));
        for d in 0..365 {
            assert_eq!(cf[d * 24], 0.0);
            assert_eq!(cf[d * 24 + 23], 0.0);
        }
        assert!(cf.iter().copied().fold(0.0, f64::max) > 0.5);
    }

    #[test]
    fn prices_are_nonnegative() {
        assert!(wholesale_prices(1).iter().all(|&p| p >= 0.0));
        assert_eq!(tou_prices()[17], 180.0);
    }
}
