use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::DegradationError;

/// Piecewise-linear cycle life versus depth of discharge.
///
/// Points are `(dod, cycles)` with DOD strictly increasing and cycle life
/// strictly decreasing. Queries outside `[first dod, max_dod]` clamp to the
/// nearest end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct CycleLifeCurve {
    points: Vec<(f64, f64)>,
}

impl CycleLifeCurve {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, DegradationError> {
        if points.len() < 2 {
            return Err(DegradationError::InvalidCurve(
                "at least two points are required".into(),
            ));
        }
        for &(dod, cycles) in &points {
            if !(dod > 0.0 && dod <= 1.0) {
                return Err(DegradationError::InvalidCurve(format!(
                    "DOD {dod} outside (0, 1]"
                )));
            }
            if !(cycles > 0.0 && cycles.is_finite()) {
                return Err(DegradationError::InvalidCurve(format!(
                    "cycle life {cycles} must be positive"
                )));
            }
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(DegradationError::InvalidCurve(
                    "DOD values must be strictly increasing".into(),
                ));
            }
            if w[1].1 >= w[0].1 {
                return Err(DegradationError::InvalidCurve(
                    "cycle life must be strictly decreasing in DOD".into(),
                ));
            }
        }
        Ok(Self { points })
    }

    /// LFP-style curve: 14,500 cycles at 10% DOD down to 2,000 at 100%.
    pub fn lfp_default() -> Self {
        Self::new(vec![
            (0.10, 14_500.0),
            (0.20, 12_000.0),
            (0.30, 9_500.0),
            (0.40, 7_500.0),
            (0.50, 6_000.0),
            (0.60, 4_800.0),
            (0.70, 3_800.0),
            (0.80, 2_900.0),
            (0.90, 2_200.0),
            (1.00, 2_000.0),
        ])
        .expect("built-in curve is valid")
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn max_dod(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    /// Cycle life at the deepest DOD on the curve.
    pub fn cl_at_max(&self) -> f64 {
        self.points[self.points.len() - 1].1
    }

    /// Cycle life at `dod`, interpolated linearly between curve points.
    pub fn cycle_life(&self, dod: f64) -> f64 {
        let first = self.points[0];
        if dod <= first.0 {
            return first.1;
        }
        for w in self.points.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if dod == x1 {
                return y1;
            }
            if dod < x1 {
                return y0 + (y1 - y0) * (dod - x0) / (x1 - x0);
            }
        }
        self.cl_at_max()
    }
}

impl TryFrom<Vec<(f64, f64)>> for CycleLifeCurve {
    type Error = DegradationError;

    fn try_from(points: Vec<(f64, f64)>) -> Result<Self, Self::Error> {
        Self::new(points)
    }
}

impl From<CycleLifeCurve> for Vec<(f64, f64)> {
    fn from(curve: CycleLifeCurve) -> Self {
        curve.points
    }
}

/// Ratio of cycle life at the curve's deepest DOD to cycle life at `dod`.
/// Shallow cycles weigh less than one full-depth cycle.
pub fn degradation_factor(dod: f64, curve: &CycleLifeCurve) -> f64 {
    curve.cl_at_max() / curve.cycle_life(dod)
}

pub const DEFAULT_BIN_WIDTH: f64 = 0.05;

/// Cycle counts grouped into uniform DOD bins.
///
/// Bin `k` collects depths that round to `k * bin_width`, so it is centred
/// on that midpoint. Counts may be fractional (half cycles).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DodHistogram {
    bin_width: f64,
    counts: BTreeMap<u32, f64>,
}

impl DodHistogram {
    pub fn new(bin_width: f64) -> Self {
        assert!(bin_width > 0.0 && bin_width <= 1.0, "bin width in (0, 1]");
        Self {
            bin_width,
            counts: BTreeMap::new(),
        }
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    pub fn bin_index(&self, dod: f64) -> u32 {
        (dod / self.bin_width).round() as u32
    }

    pub fn add(&mut self, dod: f64, count: f64) {
        debug_assert!(count >= 0.0);
        *self.counts.entry(self.bin_index(dod)).or_insert(0.0) += count;
    }

    /// Adds another histogram's counts bin by bin.
    pub fn merge(&mut self, other: &DodHistogram) {
        assert_eq!(self.bin_width, other.bin_width, "bin widths differ");
        for (&k, &c) in &other.counts {
            *self.counts.entry(k).or_insert(0.0) += c;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.counts.values().sum()
    }

    /// Count in the bin whose midpoint is nearest `dod`.
    pub fn count_at(&self, dod: f64) -> f64 {
        self.counts
            .get(&self.bin_index(dod))
            .copied()
            .unwrap_or(0.0)
    }

    /// `(bin midpoint, count)` pairs in increasing DOD order.
    pub fn bins(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.counts
            .iter()
            .map(move |(&k, &c)| (k as f64 * self.bin_width, c))
    }

    pub fn raw_counts(&self) -> &BTreeMap<u32, f64> {
        &self.counts
    }
}

/// Equivalent full cycles for one modelled year: `alpha · Σ DF(dod)·count`.
pub fn equivalent_full_cycles(hist: &DodHistogram, curve: &CycleLifeCurve, alpha: f64) -> f64 {
    alpha
        * hist
            .bins()
            .map(|(dod, count)| degradation_factor(dod, curve) * count)
            .sum::<f64>()
}

/// Capacity lost per equivalent full cycle, in MWh.
pub fn degradation_per_cycle(rated: f64, eol_frac: f64, cycles_at_max_dod: f64) -> f64 {
    (1.0 - eol_frac) * rated / cycles_at_max_dod
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn factor_is_one_at_max_dod() {
        let curve = CycleLifeCurve::lfp_default();
        assert_eq!(degradation_factor(curve.max_dod(), &curve), 1.0);
    }

    #[test]
    fn factor_is_a_ratio() {
        let curve = CycleLifeCurve::new(vec![(0.5, 4000.0), (1.0, 2000.0)]).unwrap();
        assert_eq!(degradation_factor(0.5, &curve), 0.5);
    }

    #[test]
    fn shallow_factor_interpolates_default_curve() {
        let curve = CycleLifeCurve::lfp_default();
        // midway between 14,500 (10%) and 12,000 (20%) is 13,250
        assert_relative_eq!(curve.cycle_life(0.15), 13_250.0);
        assert_relative_eq!(degradation_factor(0.15, &curve), 2000.0 / 13_250.0);
        assert!((degradation_factor(0.15, &curve) - 0.151).abs() < 5e-4);
    }

    #[test]
    fn queries_clamp_to_the_curve() {
        let curve = CycleLifeCurve::lfp_default();
        assert_eq!(curve.cycle_life(0.0), 14_500.0);
        assert_eq!(curve.cycle_life(0.02), 14_500.0);
        assert_eq!(curve.cycle_life(1.2), 2_000.0);
    }

    #[test]
    fn rejects_non_monotone_curves() {
        assert!(CycleLifeCurve::new(vec![(0.2, 100.0), (0.1, 50.0)]).is_err());
        assert!(CycleLifeCurve::new(vec![(0.1, 100.0), (0.2, 150.0)]).is_err());
        assert!(CycleLifeCurve::new(vec![(0.1, 100.0)]).is_err());
        assert!(CycleLifeCurve::new(vec![(0.0, 100.0), (0.5, 50.0)]).is_err());
    }

    #[test]
    fn efc_examples() {
        let curve = CycleLifeCurve::lfp_default();
        let empty = DodHistogram::new(DEFAULT_BIN_WIDTH);
        assert_eq!(equivalent_full_cycles(&empty, &curve, 1.0), 0.0);

        let mut ten = DodHistogram::new(DEFAULT_BIN_WIDTH);
        ten.add(1.0, 10.0);
        assert_eq!(equivalent_full_cycles(&ten, &curve, 1.0), 10.0);

        let mut one = DodHistogram::new(DEFAULT_BIN_WIDTH);
        one.add(1.0, 1.0);
        assert_relative_eq!(
            equivalent_full_cycles(&one, &curve, 365.0 / 7.0),
            52.142857142857146
        );
    }

    #[test]
    fn dpc_examples() {
        assert_relative_eq!(
            degradation_per_cycle(1.0, 0.8, 2000.0),
            1.0e-4,
            epsilon = 1e-18
        );
        assert_relative_eq!(
            degradation_per_cycle(2.725, 0.8, 2000.0),
            2.725e-4,
            max_relative = 1e-12
        );
        assert_eq!(degradation_per_cycle(1.0, 1.0, 2000.0), 0.0);
    }

    #[test]
    fn binning_rounds_to_nearest_midpoint() {
        let mut h = DodHistogram::new(0.05);
        h.add(0.5, 1.0);
        h.add(0.51, 0.5);
        h.add(0.474, 0.5);
        assert_eq!(h.count_at(0.5), 1.5);
        assert_eq!(h.count_at(0.45), 0.5);
        let bins: Vec<_> = h.bins().collect();
        assert_eq!(bins.len(), 2);
        assert_relative_eq!(bins[1].0, 0.5);
    }

    #[test]
    fn curve_serde_round_trip() {
        let curve = CycleLifeCurve::lfp_default();
        let json = serde_json::to_string(&curve).unwrap();
        let back: CycleLifeCurve = serde_json::from_str(&json).unwrap();
        assert_eq!(back, curve);
        assert!(serde_json::from_str::<CycleLifeCurve>("[[0.1, 10], [0.2, 20]]").is_err());
    }
}
