//! The Marchenko–Pastur family for long random matrices.
//!
//! For an `n x m` noise matrix `Z` with i.i.d. entries of variance `1/n` and
//! `phi = sqrt(m / n) >= 1`, the eigenvalues of `Z Z^T / phi` follow
//!
//! ```text
//! rho_MP(x) = sqrt((x - a)(b - x)) / (2 pi x / phi),   a, b = (sqrt(phi) -+ 1/sqrt(phi))^2
//! ```
//!
//! and the singular values `s = sqrt(phi x)` of `Z` follow the pushforward
//!
//! ```text
//! rho_phi(s) = 2 (s / phi) rho_MP(s^2 / phi)
//!            = sqrt((s^2 - (phi-1)^2)((phi+1)^2 - s^2)) / (pi s),   s in [phi-1, phi+1].
//! ```
//!
//! The Stieltjes transform of the symmetrized singular law,
//! `m(z) = int rho_sym(x) / (z - x) dx`, solves
//! `m^2 + ((phi^2 - 1)/z - z) m + 1 = 0`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;

/// A point `E + i eta` at which the Stieltjes transform is evaluated.
pub type ComplexPoint = Complex64;

const QUAD_TOL: f64 = 1e-14;
const QUANTILE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpLaw {
    phi: f64,
}

impl MpLaw {
    pub fn new(phi: f64) -> Result<Self> {
        if !phi.is_finite() || phi < 1.0 {
            return Err(Error::InvalidArgument(format!(
                "phi must be a finite number >= 1, got {phi}"
            )));
        }
        Ok(Self { phi })
    }

    /// Law of an `n x m` matrix, `phi = sqrt(m / n)`. Requires `m >= n`.
    pub fn from_dims(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m < n {
            return Err(Error::InvalidArgument(format!(
                "need 0 < n <= m, got n = {n}, m = {m}"
            )));
        }
        Self::new((m as f64 / n as f64).sqrt())
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Support of `rho_MP`: `((sqrt(phi) - 1/sqrt(phi))^2, (sqrt(phi) + 1/sqrt(phi))^2)`.
    pub fn eigen_edges(&self) -> (f64, f64) {
        let r = self.phi.sqrt();
        ((r - 1.0 / r).powi(2), (r + 1.0 / r).powi(2))
    }

    /// Support of `rho_phi`: `(phi - 1, phi + 1)`.
    pub fn singular_edges(&self) -> (f64, f64) {
        (self.phi - 1.0, self.phi + 1.0)
    }

    pub fn mp_density(&self, x: f64) -> f64 {
        let (a, b) = self.eigen_edges();
        if !(x > a && x < b) {
            return 0.0;
        }
        ((x - a) * (b - x)).sqrt() / (2.0 * PI * x / self.phi)
    }

    pub fn singular_density(&self, s: f64) -> f64 {
        let (lo, hi) = self.singular_edges();
        if !(s > lo && s < hi) || s <= 0.0 {
            return 0.0;
        }
        let s2 = s * s;
        ((s2 - lo * lo) * (hi * hi - s2)).sqrt() / (PI * s)
    }

    /// `int_x^infinity rho_MP`.
    ///
    /// Both edges carry square-root behaviour (and for `phi = 1` the lower
    /// edge an inverse square root), so each half of the support is integrated
    /// after the substitution `x = edge -+ t^2`.
    pub fn mp_tail_mass(&self, x: f64) -> f64 {
        let (a, b) = self.eigen_edges();
        if x >= b {
            return 0.0;
        }
        let x = x.max(a);
        let c = 0.5 * (a + b);
        let phi = self.phi;
        // x = b - t^2, dx = 2t dt. The t factor cancels the sqrt(b - x) zero.
        let upper = |t: f64| {
            let y = b - t * t;
            if y <= a {
                return 0.0;
            }
            2.0 * t * t * (y - a).sqrt() * phi / (2.0 * PI * y)
        };
        // x = a + t^2.
        let lower = |t: f64| {
            let y = a + t * t;
            if y >= b || y <= 0.0 {
                // y = 0 only when a = 0 (phi = 1) at t = 0: the limit of the
                // integrand is 2 sqrt(b) phi / (2 pi) with x = t^2.
                return if a == 0.0 && t == 0.0 {
                    2.0 * b.sqrt() * phi / (2.0 * PI)
                } else {
                    0.0
                };
            }
            2.0 * t * t * (b - y).sqrt() * phi / (2.0 * PI * y)
        };
        if x >= c {
            adaptive_simpson(&upper, 0.0, (b - x).sqrt(), QUAD_TOL)
        } else {
            adaptive_simpson(&upper, 0.0, (b - c).sqrt(), QUAD_TOL)
                + adaptive_simpson(&lower, (x - a).sqrt(), (c - a).sqrt(), QUAD_TOL)
        }
    }

    /// The `i`-th `1/n` quantile `nu_i`: `(i - 1/2) / n = int_{nu_i}^infinity rho_MP`.
    /// Decreasing in `i`.
    pub fn mp_quantile(&self, i: usize, n: usize) -> Result<f64> {
        if n == 0 || i == 0 || i > n {
            return Err(Error::InvalidArgument(format!(
                "quantile index must satisfy 1 <= i <= n, got i = {i}, n = {n}"
            )));
        }
        let target = (i as f64 - 0.5) / n as f64;
        Ok(self.invert_tail_mass(target))
    }

    /// Bisection on the tail mass, bracketed by the support.
    pub(crate) fn invert_tail_mass(&self, target: f64) -> f64 {
        let (a, b) = self.eigen_edges();
        let (mut lo, mut hi) = (a, b);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let mass = self.mp_tail_mass(mid);
            if (mass - target).abs() <= QUANTILE_TOL * 1e-3 {
                return mid;
            }
            if mass > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Predicted ordered singular values `s_i = sqrt(phi nu_i)`, descending.
    pub fn predicted_singular_locations(&self, n: usize) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        (1..=n)
            .map(|i| Ok((self.phi * self.mp_quantile(i, n)?).sqrt()))
            .collect()
    }

    fn on_support(&self, z: Complex64) -> bool {
        if z.im != 0.0 {
            return false;
        }
        let e = z.re.abs();
        let (lo, hi) = self.singular_edges();
        (e > lo && e < hi) || (lo == 0.0 && e == 0.0)
    }

    /// Stieltjes transform of the symmetrized singular law. Chooses the root
    /// of modulus at most one, which is the branch that vanishes at infinity
    /// and has `Im m < 0` on the upper half plane.
    pub fn stieltjes(&self, z: ComplexPoint) -> Result<Complex64> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite point {z}")));
        }
        if self.on_support(z) {
            return Err(Error::OnSupport(z.re));
        }
        if z == Complex64::new(0.0, 0.0) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let w = z - (self.phi * self.phi - 1.0) / z;
        let d = (w * w - 4.0).sqrt();
        let plus = (w + d) * 0.5;
        let minus = (w - d) * 0.5;
        // The roots multiply to one; take the reciprocal of the larger for accuracy.
        let big = if plus.norm() >= minus.norm() {
            plus
        } else {
            minus
        };
        Ok(big.inv())
    }

    /// `m^2 + ((phi^2 - 1)/z - z) m + 1`.
    pub fn stieltjes_residual(&self, z: Complex64, m: Complex64) -> Complex64 {
        m * m + ((self.phi * self.phi - 1.0) / z - z) * m + 1.0
    }
}
