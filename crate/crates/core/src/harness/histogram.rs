use crate::error::{Error, Result};
use crate::linalg::{full_singular_values, DenseMatrix, DENSE_GUARD};
use crate::mp_law::MpLaw;
use crate::rng::{self, NoiseKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub center: f64,
    /// Empirical frequency divided by the bin width.
    pub density: f64,
    /// `rho_phi` at the bin center.
    pub theory: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub phi: f64,
    pub singular_values: Vec<f64>,
    pub bins: Vec<HistogramBin>,
}

impl Histogram {
    /// `sum density * width`; one up to rounding.
    pub fn mass(&self) -> f64 {
        self.bins.iter().map(|b| b.density * (b.hi - b.lo)).sum()
    }

    /// Fraction of singular values outside `[lo, hi]`.
    pub fn mass_outside(&self, lo: f64, hi: f64) -> f64 {
        let out = self
            .singular_values
            .iter()
            .filter(|&&s| s < lo || s > hi)
            .count();
        out as f64 / self.singular_values.len() as f64
    }
}

/// Bins `values` over `[lo, hi]` into `bins` equal cells (the last one
/// closed) and samples `law` at the centers.
pub fn bin_values(values: &[f64], lo: f64, hi: f64, bins: usize, law: &MpLaw) -> Vec<HistogramBin> {
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &s in values {
        let idx = (((s - lo) / width).floor().max(0.0) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let total = values.len() as f64;
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let b_lo = lo + i as f64 * width;
            let b_hi = if i + 1 == bins {
                hi
            } else {
                lo + (i + 1) as f64 * width
            };
            let center = 0.5 * (b_lo + b_hi);
            HistogramBin {
                lo: b_lo,
                hi: b_hi,
                center,
                density: c as f64 / (total * (b_hi - b_lo)),
                theory: law.singular_density(center),
            }
        })
        .collect()
}

/// Empirical singular value histogram of one `n x m` Gaussian noise matrix
/// with entry variance `1/n`, next to `rho_phi`.
pub fn spectrum_histogram(n: usize, m: usize, seed: u64, bins: usize) -> Result<Histogram> {
    if bins == 0 {
        return Err(Error::InvalidArgument("bins must be at least 1".into()));
    }
    if n > DENSE_GUARD {
        return Err(Error::TooLarge {
            order: n,
            limit: DENSE_GUARD,
        });
    }
    let law = MpLaw::from_dims(n, m)?;
    let noise = NoiseKind::Gaussian.sample(&mut rng::stream(seed), n * m, 1.0 / (n as f64).sqrt());
    let z = DenseMatrix::new(n, m, noise)?;
    let values = full_singular_values(&z)?;
    let (edge_lo, edge_hi) = law.singular_edges();
    let lo = values[n - 1].min(edge_lo).max(0.0);
    let hi = values[0].max(edge_hi);
    let bins = bin_values(&values, lo, hi, bins, &law);
    Ok(Histogram {
        phi: law.phi(),
        singular_values: values,
        bins,
    })
}
