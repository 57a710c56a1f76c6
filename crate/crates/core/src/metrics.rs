//! Balance indicators and their aggregation over time and runs.

use thiserror::Error;

use crate::sim::SimTime;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("no runs to aggregate")]
    NoRuns,
    #[error("run {run} has a different measurement grid")]
    GridMismatch { run: usize },
    #[error("smoothing window {smoothing} is not a positive multiple of the {window} s grid")]
    Smoothing { smoothing: f64, window: f64 },
}

/// Relative difference `|a - b| / (a + b)`, zero when both are zero.
pub fn xi(a: f64, b: f64) -> f64 {
    let total = a + b;
    if total == 0.0 {
        0.0
    } else {
        (a - b).abs() / total
    }
}

/// Population standard deviation (divisor N).
pub fn sigma(loads: &[f64]) -> f64 {
    assert!(!loads.is_empty(), "sigma of an empty load vector");
    let n = loads.len() as f64;
    // shifted so that equal loads give exactly zero
    let origin = loads[0];
    let mean = loads.iter().map(|l| l - origin).sum::<f64>() / n;
    (loads.iter().map(|l| (l - origin - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// One measurement-grid point of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSample {
    pub time: SimTime,
    /// Only defined for two servers.
    pub xi_f: Option<f64>,
    pub xi_b: Option<f64>,
    pub sigma_f: f64,
    pub sigma_b: f64,
    /// Active flows per server at the tick.
    pub flows: Vec<f64>,
    /// Bytes per server: received during the window (simulator) or the
    /// byte-valued load (analytic model).
    pub bytes: Vec<f64>,
}

impl MetricSample {
    pub fn from_loads(time: SimTime, flows: Vec<f64>, bytes: Vec<f64>) -> Self {
        let pair = |v: &[f64]| (v.len() == 2).then(|| xi(v[0], v[1]));
        Self {
            time,
            xi_f: pair(&flows),
            xi_b: pair(&bytes),
            sigma_f: sigma(&flows),
            sigma_b: sigma(&bytes),
            flows,
            bytes,
        }
    }
}

/// Grid times `window, 2 window, ...` up to and including `horizon`.
pub fn measurement_grid(horizon: f64, window: f64) -> Vec<SimTime> {
    let n = (horizon / window + 1e-9).floor() as usize;
    (1..=n).map(|k| k as f64 * window).collect()
}

/// Mean over runs at every grid point, optionally block-averaged in time.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateSeries {
    pub window: f64,
    pub runs: usize,
    pub times: Vec<SimTime>,
    pub xi_f: Vec<Option<f64>>,
    pub xi_b: Vec<Option<f64>>,
    pub sigma_f: Vec<f64>,
    pub sigma_b: Vec<f64>,
    pub flows: Vec<Vec<f64>>,
    pub bytes: Vec<Vec<f64>>,
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        f64::NAN
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

fn mean_opt(xs: &[Option<f64>]) -> Option<f64> {
    let v: Option<Vec<f64>> = xs.iter().copied().collect();
    v.filter(|v| !v.is_empty()).map(|v| mean(&v))
}

fn mean_rows(rows: &[Vec<f64>]) -> Vec<f64> {
    let width = rows.first().map_or(0, Vec::len);
    (0..width)
        .map(|k| rows.iter().map(|r| r[k]).sum::<f64>() / rows.len() as f64)
        .collect()
}

impl AggregateSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Scenario scalars: means over the grid (equal to the mean over grid and runs).
    pub fn mean_xi_f(&self) -> Option<f64> {
        mean_opt(&self.xi_f)
    }

    pub fn mean_xi_b(&self) -> Option<f64> {
        mean_opt(&self.xi_b)
    }

    pub fn mean_sigma_f(&self) -> f64 {
        mean(&self.sigma_f)
    }

    pub fn mean_sigma_b(&self) -> f64 {
        mean(&self.sigma_b)
    }

    /// Block average over `smoothing` seconds; a trailing partial block is dropped.
    pub fn smoothed(&self, smoothing: f64) -> Result<Self, MetricsError> {
        let ratio = smoothing / self.window;
        let k = ratio.round();
        if !(k >= 1.0) || (ratio - k).abs() > 1e-9 {
            return Err(MetricsError::Smoothing {
                smoothing,
                window: self.window,
            });
        }
        let k = k as usize;
        let blocks = self.len() / k;
        let block = |b: usize| b * k..(b + 1) * k;
        Ok(Self {
            window: smoothing,
            runs: self.runs,
            times: (0..blocks).map(|b| self.times[(b + 1) * k - 1]).collect(),
            xi_f: (0..blocks).map(|b| mean_opt(&self.xi_f[block(b)])).collect(),
            xi_b: (0..blocks).map(|b| mean_opt(&self.xi_b[block(b)])).collect(),
            sigma_f: (0..blocks).map(|b| mean(&self.sigma_f[block(b)])).collect(),
            sigma_b: (0..blocks).map(|b| mean(&self.sigma_b[block(b)])).collect(),
            flows: (0..blocks).map(|b| mean_rows(&self.flows[block(b)])).collect(),
            bytes: (0..blocks).map(|b| mean_rows(&self.bytes[block(b)])).collect(),
        })
    }
}

/// Pointwise mean over runs, then block smoothing when `smoothing` is given.
pub fn aggregate(
    runs: &[Vec<MetricSample>],
    window: f64,
    smoothing: Option<f64>,
) -> Result<AggregateSeries, MetricsError> {
    let first = runs.first().ok_or(MetricsError::NoRuns)?;
    for (run, samples) in runs.iter().enumerate() {
        let same = samples.len() == first.len()
            && samples
                .iter()
                .zip(first)
                .all(|(a, b)| a.time == b.time && a.flows.len() == b.flows.len());
        if !same {
            return Err(MetricsError::GridMismatch { run });
        }
    }
    let at = |i: usize| runs.iter().map(move |r| &r[i]);
    let n = first.len();
    let series = AggregateSeries {
        window,
        runs: runs.len(),
        times: first.iter().map(|s| s.time).collect(),
        xi_f: (0..n).map(|i| mean_opt(&at(i).map(|s| s.xi_f).collect::<Vec<_>>())).collect(),
        xi_b: (0..n).map(|i| mean_opt(&at(i).map(|s| s.xi_b).collect::<Vec<_>>())).collect(),
        sigma_f: (0..n).map(|i| mean(&at(i).map(|s| s.sigma_f).collect::<Vec<_>>())).collect(),
        sigma_b: (0..n).map(|i| mean(&at(i).map(|s| s.sigma_b).collect::<Vec<_>>())).collect(),
        flows: (0..n).map(|i| mean_rows(&at(i).map(|s| s.flows.clone()).collect::<Vec<_>>())).collect(),
        bytes: (0..n).map(|i| mean_rows(&at(i).map(|s| s.bytes.clone()).collect::<Vec<_>>())).collect(),
    };
    match smoothing {
        Some(s) => series.smoothed(s),
        None => Ok(series),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn xi_examples() {
        assert_eq!(xi(3.0, 1.0), 0.5);
        assert_eq!(xi(7.0, 7.0), 0.0);
        assert_eq!(xi(0.0, 0.0), 0.0);
        assert_eq!(xi(8192.0, 0.0), 1.0);
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(&[1.0, 1.0, 1.0]), 0.0);
        assert_eq!(sigma(&[0.0, 2.0]), 1.0);
        assert!((sigma(&[1.0, 0.0, 0.0]) - 2f64.sqrt() / 3.0).abs() < 1e-15);
    }

    #[test]
    fn sample_from_window_bytes() {
        let s = MetricSample::from_loads(2.0, vec![3.0, 1.0], vec![4096.0, 4096.0]);
        assert_eq!(s.xi_b, Some(0.0));
        assert_eq!(s.xi_f, Some(0.5));
        let s = MetricSample::from_loads(2.0, vec![1.0, 1.0], vec![8192.0, 0.0]);
        assert_eq!(s.xi_b, Some(1.0));
        let three = MetricSample::from_loads(2.0, vec![1.0, 0.0, 0.0], vec![0.0; 3]);
        assert_eq!(three.xi_f, None);
    }

    #[test]
    fn grid_is_inclusive() {
        assert_eq!(measurement_grid(10.0, 2.0), vec![2.0, 4.0, 6.0, 8.0, 10.0]);
        assert_eq!(measurement_grid(300.0, 2.0).len(), 150);
        assert!(measurement_grid(1.0, 2.0).is_empty());
    }

    fn series(values: &[f64]) -> Vec<MetricSample> {
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| MetricSample {
                time: 2.0 * (i + 1) as f64,
                xi_f: Some(v),
                xi_b: Some(v),
                sigma_f: v,
                sigma_b: v,
                flows: vec![v, 0.0],
                bytes: vec![v, 0.0],
            })
            .collect()
    }

    #[test]
    fn single_run_is_identity() {
        let run = series(&[0.1, 0.5, 0.3]);
        let agg = aggregate(std::slice::from_ref(&run), 2.0, None).unwrap();
        assert_eq!(agg.xi_b, vec![Some(0.1), Some(0.5), Some(0.3)]);
        assert_eq!(agg.sigma_f, vec![0.1, 0.5, 0.3]);
        assert_eq!(agg.runs, 1);
    }

    #[test]
    fn mirrored_runs_average_to_center() {
        let c = 0.4;
        let v = [0.1, 0.7, 0.25];
        let mirrored: Vec<f64> = v.iter().map(|x| -x + 2.0 * c).collect();
        let agg = aggregate(&[series(&v), series(&mirrored)], 2.0, None).unwrap();
        for x in agg.sigma_b {
            assert!((x - c).abs() < 1e-12);
        }
    }

    #[test]
    fn block_smoothing() {
        let agg = aggregate(&[series(&[0.0, 0.3, 0.6, 0.9, 0.9, 0.9, 0.1])], 2.0, Some(6.0)).unwrap();
        assert_eq!(agg.times, vec![6.0, 12.0]);
        assert!((agg.sigma_b[0] - 0.3).abs() < 1e-12);
        assert!((agg.sigma_b[1] - 0.9).abs() < 1e-12);
        assert_eq!(agg.window, 6.0);
        assert!(aggregate(&[series(&[0.0])], 2.0, Some(5.0)).is_err());
    }

    #[test]
    fn grid_mismatch_and_empty() {
        assert_eq!(aggregate(&[], 2.0, None), Err(MetricsError::NoRuns));
        let err = aggregate(&[series(&[0.1, 0.2]), series(&[0.1])], 2.0, None);
        assert_eq!(err, Err(MetricsError::GridMismatch { run: 1 }));
    }

    #[test]
    fn scalar_means() {
        let agg = aggregate(&[series(&[0.2, 0.4]), series(&[0.4, 0.6])], 2.0, None).unwrap();
        assert!((agg.mean_xi_b().unwrap() - 0.4).abs() < 1e-12);
        assert!((agg.mean_sigma_f() - 0.4).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn xi_symmetric_bounded_and_scale_free(a in 0.0f64..1e9, b in 0.0f64..1e9, c in 1e-3f64..1e3) {
            let x = xi(a, b);
            prop_assert!((0.0..=1.0).contains(&x));
            prop_assert_eq!(x, xi(b, a));
            prop_assert!((xi(c * a, c * b) - x).abs() < 1e-9);
        }

        #[test]
        fn sigma_scales_and_vanishes_on_equal(loads in prop::collection::vec(0.0f64..1e6, 1..8), c in 0.0f64..100.0, v in 0.0f64..1e6) {
            let s = sigma(&loads);
            prop_assert!(s >= 0.0);
            let scaled: Vec<f64> = loads.iter().map(|l| c * l).collect();
            prop_assert!((sigma(&scaled) - c * s).abs() <= 1e-9 * (1.0 + c * s));
            prop_assert_eq!(sigma(&vec![v; loads.len()]), 0.0);
        }

        #[test]
        fn aggregation_commutes_with_scaling(vals in prop::collection::vec(prop::collection::vec(0.0f64..10.0, 6), 1..5), c in 0.1f64..10.0) {
            let runs: Vec<_> = vals.iter().map(|v| series(v)).collect();
            let scaled: Vec<_> = vals.iter().map(|v| series(&v.iter().map(|x| c * x).collect::<Vec<_>>())).collect();
            let a = aggregate(&runs, 2.0, Some(4.0)).unwrap();
            let b = aggregate(&scaled, 2.0, Some(4.0)).unwrap();
            for (x, y) in a.sigma_b.iter().zip(&b.sigma_b) {
                prop_assert!((c * x - y).abs() < 1e-9);
            }
        }
    }
}
