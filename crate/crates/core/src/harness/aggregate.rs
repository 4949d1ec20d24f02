use super::config::SweepMode;
use super::sweep::TrialRecord;
use crate::bbp::BbpPrediction;
use crate::error::{Error, Result};

/// Mean and standard error (`sample sd / sqrt(count)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub se: f64,
    pub count: usize,
}

impl Stat {
    /// `None` for an empty sample. A single value has `se = 0`.
    pub fn of(values: &[f64]) -> Option<Self> {
        let count = values.len();
        if count == 0 {
            return None;
        }
        let c = count as f64;
        let mean = values.iter().sum::<f64>() / c;
        let se = if count == 1 {
            0.0
        } else {
            let ss: f64 = values.iter().map(|x| (x - mean).powi(2)).sum();
            (ss / (c - 1.0)).sqrt() / c.sqrt()
        };
        Some(Self { mean, se, count })
    }
}

/// Statistics of one `(lambda, axis)` group over its successful trials.
///
/// Overlap statistics average the absolute overlaps.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub mode: SweepMode,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub q: usize,
    pub lambda: f64,
    pub axis: Option<usize>,
    pub trials: usize,
    pub failures: usize,
    pub s1_hat: Option<Stat>,
    pub beta_hat: Option<Stat>,
    pub overlap_left: Option<Stat>,
    pub overlap_right: Option<Stat>,
    pub prediction: BbpPrediction,
}

impl AggregateRow {
    /// Every trial in the group failed; the statistics are absent.
    pub fn all_failed(&self) -> bool {
        self.failures == self.trials
    }
}

/// Groups by `(lambda index, axis)` in first-seen order.
pub fn aggregate(records: &[TrialRecord]) -> Result<Vec<AggregateRow>> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("no records to aggregate".into()));
    }
    let mut keys: Vec<(usize, Option<usize>)> = Vec::new();
    for r in records {
        let key = (r.lambda_index, r.axis);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    Ok(keys
        .into_iter()
        .map(|key| {
            let group: Vec<&TrialRecord> = records
                .iter()
                .filter(|r| (r.lambda_index, r.axis) == key)
                .collect();
            let ok: Vec<&TrialRecord> =
                group.iter().copied().filter(|r| r.status.is_ok()).collect();
            let stat = |f: fn(&TrialRecord) -> Option<f64>| {
                Stat::of(&ok.iter().filter_map(|r| f(r)).collect::<Vec<_>>())
            };
            let first = group[0];
            AggregateRow {
                mode: first.mode,
                n: first.n,
                m: first.m,
                k: first.k,
                q: first.q,
                lambda: first.lambda,
                axis: first.axis,
                trials: group.len(),
                failures: group.len() - ok.len(),
                s1_hat: stat(|r| r.s1_hat),
                beta_hat: stat(|r| r.beta_hat),
                overlap_left: stat(|r| r.overlap_left),
                overlap_right: stat(|r| r.overlap_right),
                prediction: first.prediction,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn stat_small_samples() {
        assert_eq!(Stat::of(&[]), None);
        let one = Stat::of(&[3.5]).unwrap();
        assert_eq!((one.mean, one.se), (3.5, 0.0));
        let two = Stat::of(&[1.0, 4.0]).unwrap();
        assert_eq!(two.mean, 2.5);
        assert!((two.se - 1.5).abs() < 1e-15);
    }

    #[test]
    fn stat_standard_error_matches_sigma() {
        let mut r = crate::rng::stream(3);
        let dist = Normal::new(2.0, 0.7).unwrap();
        let xs: Vec<f64> = (0..500).map(|_| dist.sample(&mut r)).collect();
        let s = Stat::of(&xs).unwrap();
        let target = 0.7 / 500f64.sqrt();
        assert!((s.se / target - 1.0).abs() < 0.2);
    }
}
