use std::path::{Path, PathBuf};

use spiked_unfold::bbp::{
    critical_snr, master_equation_root_with, predict as bbp_predict, tensor_critical_beta,
    MasterOptions,
};
use spiked_unfold::harness::{
    aggregate, run_sweep, spectrum_histogram, write_aggregates_csv, write_histogram_csv,
    write_json, write_records_csv, AggregateMeta, AggregateRow, Stat, SweepConfig,
};
use spiked_unfold::linalg::{full_singular_values, DenseMatrix};
use spiked_unfold::mp_law::MpLaw;
use spiked_unfold::rng::{self, substream, trial_seed, NoiseKind};
use spiked_unfold::tensor::unfold_phi;

use crate::svg::{PlotSpec, Point, Series, Style};
use crate::{CliError, DensityArgs, OracleArgs, Outcome, PredictArgs, SweepArgs};

const ORACLE_TOL: f64 = 1e-8;
const THEORY_POINTS: usize = 200;

pub fn predict(a: &PredictArgs) -> Result<Outcome, CliError> {
    let (phi, tensor) = match (a.phi, a.n, a.k) {
        (Some(phi), None, None) => (phi, None),
        (None, Some(n), Some(k)) => {
            if k < 2 || n < 2 || a.q == 0 || 2 * a.q > k {
                return Err(CliError::Usage(format!(
                    "need n >= 2, k >= 2 and 1 <= q <= k/2, got n {n}, k {k}, q {}",
                    a.q
                )));
            }
            (unfold_phi(n, k, a.q), Some((n, k)))
        }
        _ => return Err(CliError::Usage("give either --phi, or --n and --k".into())),
    };
    let p = bbp_predict(a.lambda, phi)?;
    println!("lambda           {}", a.lambda);
    println!("phi              {phi}");
    println!("threshold        {}", critical_snr(phi)?);
    if let Some((n, k)) = tensor {
        let beta_c = tensor_critical_beta(n, k);
        println!("beta_c           {beta_c}");
        println!("beta             {}", a.lambda * beta_c);
    } else {
        println!("beta             {}", a.lambda * phi.sqrt());
    }
    println!("above_threshold  {}", p.above_threshold);
    println!("outlier          {}", p.outlier);
    println!("overlap_left     {}", p.left_overlap);
    println!("overlap_right    {}", p.right_overlap);
    Ok(Outcome::Ok)
}

fn sweep_config(a: &SweepArgs) -> Result<SweepConfig, CliError> {
    let mut cfg = if let Some(path) = &a.config {
        SweepConfig::load(path)?
    } else {
        let n =
            a.n.ok_or_else(|| CliError::Usage("--n is required without --config".into()))?;
        if a.lambda.is_empty() {
            return Err(CliError::Usage(
                "--lambda is required without --config".into(),
            ));
        }
        let trials = a.trials.unwrap_or(1);
        let seed = a.seed.unwrap_or(0);
        match (a.m, a.k) {
            (Some(m), None) => SweepConfig::matrix(n, m, a.lambda.clone(), trials, seed),
            (None, Some(k)) => SweepConfig::tensor(n, k, a.lambda.clone(), trials, seed),
            _ => return Err(CliError::Usage("give --m (matrix) or --k (tensor)".into())),
        }
    };
    if let Some(q) = a.q {
        cfg.q = q;
    }
    if let Some(t) = a.trials {
        cfg.trials = t;
    }
    if let Some(s) = a.seed {
        cfg.base_seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn sweep(a: &SweepArgs) -> Result<Outcome, CliError> {
    let cfg = sweep_config(a)?;
    let out = a
        .out
        .clone()
        .or_else(|| cfg.output_path.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    create_dir(&out)?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = a.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        pool = pool.num_threads(jobs);
    }
    let records = pool.build()?.install(|| run_sweep(&cfg))?;
    let rows = aggregate(&records)?;

    let records_path = out.join("records.csv");
    let aggregate_path = out.join("aggregate.csv");
    write_records_csv(&records_path, &records)?;
    write_aggregates_csv(&aggregate_path, &rows)?;
    write_json(&out.join("meta.json"), &AggregateMeta::new(&cfg))?;
    println!("records    {}", records_path.display());
    println!("aggregate  {}", aggregate_path.display());

    if a.plot {
        for spec in sweep_plots(&cfg, &rows, &out) {
            write_plot(&spec)?;
            println!("plot       {}", spec.output.display());
        }
    }

    let failures = records.iter().filter(|r| !r.status.is_ok()).count();
    if failures > 0 {
        eprintln!("{failures} of {} trial records failed", records.len());
        return Ok(Outcome::Failures);
    }
    Ok(Outcome::Ok)
}

fn group_name(axis: Option<usize>) -> String {
    axis.map_or_else(String::new, |a| format!(" (axis {a})"))
}

fn scatter(
    rows: &[AggregateRow],
    axis: Option<usize>,
    name: String,
    stat: impl Fn(&AggregateRow) -> Option<Stat>,
) -> Option<Series> {
    let points: Vec<Point> = rows
        .iter()
        .filter(|r| r.axis == axis)
        .filter_map(|r| stat(r).map(|s| Point::with_err(r.lambda, s.mean, s.se)))
        .collect();
    (!points.is_empty()).then(|| Series::new(name, points, Style::Scatter))
}

fn theory(cfg: &SweepConfig, name: &str, f: impl Fn(f64) -> Option<f64>) -> Option<Series> {
    let lo = cfg.lambda_grid.first().copied()?;
    let hi = cfg.lambda_grid.last().copied()?;
    let points: Vec<Point> = (0..THEORY_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (THEORY_POINTS - 1) as f64)
        .filter_map(|l| f(l).map(|y| Point::new(l, y)))
        .collect();
    (!points.is_empty()).then(|| Series::new(name, points, Style::Line))
}

fn sweep_plots(cfg: &SweepConfig, rows: &[AggregateRow], out: &Path) -> Vec<PlotSpec> {
    let phi = cfg.phi();
    let mut axes: Vec<Option<usize>> = rows.iter().map(|r| r.axis).collect();
    axes.sort_unstable();
    axes.dedup();
    let pred = |l: f64| bbp_predict(l, phi).ok();

    let mut s1 = Vec::new();
    let mut overlap = Vec::new();
    for &axis in &axes {
        let g = group_name(axis);
        s1.extend(scatter(rows, axis, format!("s1_hat{g}"), |r| r.s1_hat));
        overlap.extend(scatter(rows, axis, format!("left{g}"), |r| r.overlap_left));
        overlap.extend(scatter(rows, axis, format!("right{g}"), |r| {
            r.overlap_right
        }));
    }
    s1.extend(theory(cfg, "predicted outlier", |l| {
        pred(l).map(|p| p.outlier)
    }));
    overlap.extend(theory(cfg, "predicted left", |l| {
        pred(l).map(|p| p.left_overlap)
    }));
    overlap.extend(theory(cfg, "predicted right", |l| {
        pred(l).map(|p| p.right_overlap)
    }));

    let title = format!("{} sweep, n = {}, phi = {phi:.4}", cfg.mode.as_str(), cfg.n);
    [
        ("s1.svg", "top singular value", s1),
        ("overlap.svg", "overlap", overlap),
    ]
    .into_iter()
    .filter(|(_, _, series)| !series.is_empty())
    .map(|(file, y, series)| PlotSpec {
        title: title.clone(),
        x_label: "lambda".into(),
        y_label: y.into(),
        series,
        output: out.join(file),
    })
    .collect()
}

/// Per-trial comparison of the master-equation root against the dense top
/// singular value of `beta v u^T + Z`.
pub fn oracle_check(a: &OracleArgs) -> Result<Outcome, CliError> {
    if a.n < 1 || a.m < a.n {
        return Err(CliError::Usage(format!(
            "need 1 <= n <= m, got n {}, m {}",
            a.n, a.m
        )));
    }
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let phi = (a.m as f64 / a.n as f64).sqrt();
    let beta = a.lambda * phi.sqrt();
    let opts = if a.zero_noise {
        MasterOptions {
            edge_window: Some(0.0),
        }
    } else {
        MasterOptions::default()
    };
    println!(
        "n {} m {} phi {phi} lambda {} beta {beta}",
        a.n, a.m, a.lambda
    );

    let (mut passed, mut failed, mut none) = (0, 0, 0);
    for t in 0..a.trials {
        let seed = trial_seed(a.seed, 0, t);
        let mut r = rng::stream(substream(seed, 1));
        let v = rng::unit_gaussian(&mut r, a.n);
        let u = rng::unit_gaussian(&mut r, a.m);
        let data = if a.zero_noise {
            vec![0.0; a.n * a.m]
        } else {
            let std_dev = 1.0 / (a.n as f64).sqrt();
            NoiseKind::Gaussian.sample(&mut rng::stream(substream(seed, 2)), a.n * a.m, std_dev)
        };
        let z = DenseMatrix::new(a.n, a.m, data)?;
        let mut x = z.clone();
        x.add_rank_one(beta, &v, &u);
        let s1 = full_singular_values(&x)?[0];
        match master_equation_root_with(&z, &v, &u, beta, &opts)? {
            Some(root) => {
                let gap = (root - s1).abs();
                let ok = gap <= ORACLE_TOL;
                if ok {
                    passed += 1;
                } else {
                    failed += 1;
                }
                println!(
                    "trial {t}: x* {root} s1 {s1} |x* - s1| {gap:.3e} {}",
                    if ok { "pass" } else { "FAIL" }
                );
            }
            None => {
                none += 1;
                println!("trial {t}: no outlier (s1 {s1})");
            }
        }
    }

    let outcome = if none == a.trials {
        println!(
            "summary: no outlier in all {} trials (sub-threshold)",
            a.trials
        );
        Outcome::Ok
    } else if none > 0 {
        println!(
            "summary: indeterminate, {none} of {} trials without an outlier",
            a.trials
        );
        Outcome::Indeterminate
    } else if failed > 0 {
        println!("summary: {failed} of {} trials failed", a.trials);
        Outcome::Failures
    } else {
        println!("summary: all {passed} trials pass");
        Outcome::Ok
    };
    Ok(outcome)
}

pub fn density(a: &DensityArgs) -> Result<Outcome, CliError> {
    let hist = spectrum_histogram(a.n, a.m, a.seed, a.bins)?;
    create_dir(&a.out)?;
    let csv = a.out.join("density.csv");
    write_histogram_csv(&csv, &hist)?;

    let law = MpLaw::new(hist.phi)?;
    let (lo, hi) = law.singular_edges();
    let theory: Vec<Point> = (0..=400)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / 400.0;
            Point::new(x, law.singular_density(x))
        })
        .collect();
    let empirical: Vec<Point> = hist
        .bins
        .iter()
        .flat_map(|b| [Point::new(b.lo, b.density), Point::new(b.hi, b.density)])
        .collect();
    let spec = PlotSpec {
        title: format!(
            "singular values, n = {}, m = {}, phi = {:.4}",
            a.n, a.m, hist.phi
        ),
        x_label: "singular value".into(),
        y_label: "density".into(),
        series: vec![
            Series::new("empirical", empirical, Style::Line),
            Series::new("limit density", theory, Style::Line),
        ],
        output: a.out.join("density.svg"),
    };
    write_plot(&spec)?;
    println!("phi        {}", hist.phi);
    println!("mass       {}", hist.mass());
    println!("histogram  {}", csv.display());
    println!("plot       {}", spec.output.display());
    Ok(Outcome::Ok)
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_plot(spec: &PlotSpec) -> Result<(), CliError> {
    let svg = spec.render()?;
    std::fs::write(&spec.output, svg).map_err(|source| CliError::Io {
        path: spec.output.clone(),
        source,
    })
}
