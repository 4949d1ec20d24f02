use rayon::prelude::*;

use super::config::{SignalKind, SweepConfig, SweepMode};
use crate::bbp::{beta_hat, predict, BbpPrediction};
use crate::error::{Error, Result};
use crate::linalg::{dot, gram, top_singular_triple_with_gram, DenseMatrix, PowerOptions};
use crate::rng::{self, substream, trial_seed};
use crate::tensor::{
    algorithm1, memory_cap_from_env, normalized_unfold, sample_spiked_tensor, vec_kron,
    RecoveryOptions, SpikedTensorModel,
};

const SIGNAL_TAG: u64 = 1;
const NOISE_TAG: u64 = 2;
const POWER_TAG: u64 = 3;

/// Outcome of one trial (one row per axis in tensor mode with `q = 1`).
#[derive(Debug, Clone, PartialEq)]
pub enum TrialStatus {
    Ok,
    Failed(String),
}

impl TrialStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, TrialStatus::Ok)
    }
}

impl std::fmt::Display for TrialStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TrialStatus::Ok => f.write_str("ok"),
            TrialStatus::Failed(msg) => write!(f, "failed: {}", msg.replace(['\n', '\r'], " ")),
        }
    }
}

/// Observed quantities are `None` on failed rows.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub mode: SweepMode,
    pub n: usize,
    /// Columns of the matrix analysed (`n^{k-q}` in tensor mode).
    pub m: usize,
    pub k: usize,
    pub q: usize,
    pub lambda_index: usize,
    pub lambda: f64,
    pub trial: usize,
    pub seed: u64,
    pub s1_hat: Option<f64>,
    pub beta_hat: Option<f64>,
    /// `|<v_hat, v>|`.
    pub overlap_left: Option<f64>,
    /// `|<u_hat, u>|`.
    pub overlap_right: Option<f64>,
    /// 1-based axis in tensor mode with `q = 1`.
    pub axis: Option<usize>,
    pub prediction: BbpPrediction,
    pub status: TrialStatus,
}

#[derive(Debug, Clone, Copy)]
struct Observed {
    s1_hat: f64,
    beta_hat: f64,
    overlap_left: f64,
    overlap_right: f64,
}

struct Job {
    lambda_index: usize,
    lambda: f64,
    trial: usize,
    seed: u64,
}

fn jobs(config: &SweepConfig) -> Vec<Job> {
    let mut out = Vec::with_capacity(config.lambda_grid.len() * config.trials);
    for (lambda_index, &lambda) in config.lambda_grid.iter().enumerate() {
        for trial in 0..config.trials {
            out.push(Job {
                lambda_index,
                lambda,
                trial,
                seed: trial_seed(config.base_seed, lambda_index, trial),
            });
        }
    }
    out
}

fn basis(len: usize) -> Vec<f64> {
    let mut e = vec![0.0; len];
    e[0] = 1.0;
    e
}

fn signals(config: &SweepConfig, lengths: &[usize], seed: u64) -> Vec<Vec<f64>> {
    match config.signal_kind {
        SignalKind::GaussianUnit => {
            let mut r = rng::stream(substream(seed, SIGNAL_TAG));
            lengths
                .iter()
                .map(|&l| rng::unit_gaussian(&mut r, l))
                .collect()
        }
        SignalKind::Basis => lengths.iter().map(|&l| basis(l)).collect(),
        SignalKind::Given => config.signals.clone().unwrap_or_default(),
    }
}

fn record(config: &SweepConfig, job: &Job, prediction: BbpPrediction) -> TrialRecord {
    TrialRecord {
        mode: config.mode,
        n: config.n,
        m: config.cols(),
        k: config.order(),
        q: config.q,
        lambda_index: job.lambda_index,
        lambda: job.lambda,
        trial: job.trial,
        seed: job.seed,
        s1_hat: None,
        beta_hat: None,
        overlap_left: None,
        overlap_right: None,
        axis: None,
        prediction,
        status: TrialStatus::Ok,
    }
}

fn fill(mut rec: TrialRecord, outcome: Result<Observed>) -> TrialRecord {
    match outcome {
        Ok(o) => {
            rec.s1_hat = Some(o.s1_hat);
            rec.beta_hat = Some(o.beta_hat);
            rec.overlap_left = Some(o.overlap_left);
            rec.overlap_right = Some(o.overlap_right);
        }
        Err(e) => rec.status = TrialStatus::Failed(e.to_string()),
    }
    rec
}

/// Top singular triple of `beta v u^T + noise` scaled to `phi`.
fn matrix_trial(
    mut m: DenseMatrix,
    beta: f64,
    v: &[f64],
    u: &[f64],
    phi: f64,
    power_seed: u64,
) -> Result<Observed> {
    if beta != 0.0 {
        m.add_rank_one(beta, v, u);
    }
    let g = gram(&m);
    let t = top_singular_triple_with_gram(&m, &g, &PowerOptions::with_seed(power_seed))?;
    Ok(Observed {
        s1_hat: t.value,
        beta_hat: beta_hat(t.value, phi).value,
        overlap_left: dot(&t.left, v).abs().min(1.0),
        overlap_right: dot(&t.right, u).abs().min(1.0),
    })
}

fn run_matrix_job(config: &SweepConfig, job: &Job) -> Result<TrialRecord> {
    let (n, m) = (config.n, config.cols());
    let phi = config.phi();
    let beta = config.beta(job.lambda);
    let prediction = predict(job.lambda, phi)?;
    let sig = signals(config, &[n, m], job.seed);
    let noise = config.noise_kind.sample(
        &mut rng::stream(substream(job.seed, NOISE_TAG)),
        n * m,
        1.0 / (n as f64).sqrt(),
    );
    let outcome = DenseMatrix::new(n, m, noise).and_then(|z| {
        matrix_trial(
            z,
            beta,
            &sig[0],
            &sig[1],
            phi,
            substream(job.seed, POWER_TAG),
        )
    });
    Ok(fill(record(config, job, prediction), outcome))
}

fn run_tensor_job(config: &SweepConfig, job: &Job, cap: u64) -> Result<Vec<TrialRecord>> {
    let (n, k, q) = (config.n, config.order(), config.q);
    let phi = config.phi();
    let beta = config.beta(job.lambda);
    let prediction = predict(job.lambda, phi)?;
    let model = SpikedTensorModel::new(
        beta,
        signals(config, &vec![n; k], job.seed),
        substream(job.seed, NOISE_TAG),
        config.noise_kind,
    );
    let base = record(config, job, prediction);
    let x = match sample_spiked_tensor(&model, cap) {
        Ok(x) => x,
        Err(e @ Error::MemoryCap { .. }) => return Err(e),
        Err(e) => return Ok(vec![fill(base, Err(e))]),
    };
    let power_seed = substream(job.seed, POWER_TAG);

    if q == 1 {
        let opts = RecoveryOptions {
            power: PowerOptions::with_seed(power_seed),
            ..Default::default()
        };
        let rows = algorithm1(&x, &opts)
            .into_iter()
            .enumerate()
            .map(|(axis, est)| {
                let outcome = est.map(|e| {
                    let others: Vec<Vec<f64>> = (0..k)
                        .filter(|&j| j != axis)
                        .map(|j| model.signals[j].clone())
                        .collect();
                    Observed {
                        s1_hat: e.s1_hat,
                        beta_hat: e.beta_hat,
                        overlap_left: dot(&e.v_hat, &model.signals[axis]).abs().min(1.0),
                        overlap_right: dot(&e.u_hat, &vec_kron(&others)).abs().min(1.0),
                    }
                });
                let mut rec = fill(base.clone(), outcome);
                rec.axis = Some(axis + 1);
                rec
            })
            .collect();
        return Ok(rows);
    }

    // Normalized unfolding along the leading q axes: a spiked matrix with
    // strength beta / n^{(q-1)/2} and the same lambda.
    let axes: Vec<usize> = (0..q).collect();
    let outcome = normalized_unfold(&x, &axes).and_then(|mat| {
        let scale = (n as f64).powf((q as f64 - 1.0) / 2.0);
        let g = gram(&mat);
        let t = top_singular_triple_with_gram(&mat, &g, &PowerOptions::with_seed(power_seed))?;
        let v_i = vec_kron(&model.signals[..q]);
        let u_i = vec_kron(&model.signals[q..]);
        Ok(Observed {
            s1_hat: t.value,
            beta_hat: beta_hat(t.value, phi).value * scale,
            overlap_left: dot(&t.left, &v_i).abs().min(1.0),
            overlap_right: dot(&t.right, &u_i).abs().min(1.0),
        })
    });
    Ok(vec![fill(base, outcome)])
}

/// Matrix sweep: one record per `(lambda, trial)`, in grid-then-trial order.
///
/// Trials run on the current rayon pool; each draws from its own stream, so
/// the records do not depend on the number of workers.
pub fn run_matrix_sweep(config: &SweepConfig) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    if config.mode != SweepMode::Matrix {
        return Err(Error::Config("run_matrix_sweep needs mode = matrix".into()));
    }
    jobs(config)
        .par_iter()
        .map(|job| run_matrix_job(config, job))
        .collect()
}

/// Tensor sweep: `k` records per `(lambda, trial)` (one per axis) for
/// `q = 1`, a single record otherwise.
pub fn run_tensor_sweep(config: &SweepConfig) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    if config.mode != SweepMode::Tensor {
        return Err(Error::Config("run_tensor_sweep needs mode = tensor".into()));
    }
    let cap = match config.memory_cap {
        Some(cap) => cap,
        None => memory_cap_from_env()?,
    };
    let nested: Vec<Vec<TrialRecord>> = jobs(config)
        .par_iter()
        .map(|job| run_tensor_job(config, job, cap))
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

pub fn run_sweep(config: &SweepConfig) -> Result<Vec<TrialRecord>> {
    match config.mode {
        SweepMode::Matrix => run_matrix_sweep(config),
        SweepMode::Tensor => run_tensor_sweep(config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_counts_and_order() {
        let config = SweepConfig::matrix(8, 32, vec![0.0, 3.0], 3, 5);
        let recs = run_matrix_sweep(&config).unwrap();
        assert_eq!(recs.len(), 6);
        let keys: Vec<_> = recs.iter().map(|r| (r.lambda_index, r.trial)).collect();
        assert_eq!(keys, vec![(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]);
        assert!(recs.iter().all(|r| r.status.is_ok() && r.axis.is_none()));

        let tconfig = SweepConfig::tensor(6, 3, vec![1.0], 2, 5);
        let recs = run_tensor_sweep(&tconfig).unwrap();
        assert_eq!(recs.len(), 6);
        let axes: Vec<_> = recs.iter().map(|r| r.axis.unwrap()).collect();
        assert_eq!(axes, vec![1, 2, 3, 1, 2, 3]);
        assert!(recs.iter().all(|r| r.m == 36 && r.k == 3));
    }

    #[test]
    fn worker_count_does_not_change_records() {
        let config = SweepConfig::matrix(10, 40, vec![0.5, 2.0], 4, 11);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_matrix_sweep(&config).unwrap());
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| run_matrix_sweep(&config).unwrap());
        assert_eq!(one, many);
    }

    #[test]
    fn basis_signals_and_large_lambda() {
        let config = SweepConfig {
            signal_kind: SignalKind::Basis,
            ..SweepConfig::matrix(20, 80, vec![20.0], 1, 1)
        };
        let r = &run_matrix_sweep(&config).unwrap()[0];
        assert!(r.overlap_left.unwrap() > 0.99);
        assert!((r.s1_hat.unwrap() / r.prediction.outlier - 1.0).abs() < 0.05);
    }

    #[test]
    fn memory_cap_fails_the_sweep() {
        let config = SweepConfig {
            memory_cap: Some(100),
            ..SweepConfig::tensor(6, 3, vec![1.0], 1, 0)
        };
        assert!(matches!(
            run_tensor_sweep(&config),
            Err(Error::MemoryCap { .. })
        ));
    }

    #[test]
    fn higher_unfolding_records() {
        let config = SweepConfig {
            q: 2,
            ..SweepConfig::tensor(5, 4, vec![3.0], 2, 0)
        };
        let recs = run_tensor_sweep(&config).unwrap();
        assert_eq!(recs.len(), 2);
        assert!(recs
            .iter()
            .all(|r| r.axis.is_none() && r.m == 25 && r.q == 2));
    }
}
