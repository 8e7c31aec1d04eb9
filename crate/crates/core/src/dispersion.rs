//! Bogoliubov dispersion law for quasi-particle energy.
//!
//! The dispersion interpolates between phonon-like behaviour `E ~ sqrt(k1) r`
//! at small momentum and free-particle behaviour `E ~ sqrt(k2) r^2` at large
//! momentum.  Everything else in the crate is built on the three scalar maps
//! implemented here: the energy, its derivative and its inverse.

use crate::error::{Error, Result};

/// Physical constants of the dispersion law and the transition probability.
///
/// `kappa0` is the rate prefactor of the collision kernel, `kappa1` the
/// quadratic and `kappa2` the quartic coefficient of the squared energy:
/// `E(r) = sqrt(kappa1 r^2 + kappa2 r^4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionParams {
    pub kappa0: f64,
    pub kappa1: f64,
    pub kappa2: f64,
}

impl Default for DispersionParams {
    /// Unit constants; exercises both the linear and the quadratic regime of
    /// the dispersion around `r ~ 1`.
    fn default() -> Self {
        DispersionParams {
            kappa0: 1.0,
            kappa1: 1.0,
            kappa2: 1.0,
        }
    }
}

impl DispersionParams {
    pub fn new(kappa0: f64, kappa1: f64, kappa2: f64) -> Result<Self> {
        for (name, v) in [("kappa0", kappa0), ("kappa1", kappa1), ("kappa2", kappa2)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        Ok(DispersionParams { kappa0, kappa1, kappa2 })
    }

    /// Derive the dispersion coefficients from particle mass `m`, coupling
    /// constant `g` and condensate density `n_c`:
    /// `kappa1 = g n_c / m`, `kappa2 = 1 / (4 m^2)`.
    pub fn from_physical(kappa0: f64, m: f64, g: f64, n_c: f64) -> Result<Self> {
        for (name, v) in [("m", m), ("g", g), ("n_c", n_c)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        Self::new(kappa0, g * n_c / m, 1.0 / (4.0 * m * m))
    }

    /// Quasi-particle energy `E(r) = sqrt(kappa1 r^2 + kappa2 r^4)`.
    ///
    /// Strictly increasing in `r` with `E(0) = 0`.
    pub fn energy(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::domain(format!("momentum magnitude must be >= 0, got {r}")));
        }
        Ok(self.energy_raw(r))
    }

    /// Inverse of the energy map: the momentum magnitude with energy `e`.
    ///
    /// Uses the cancellation-safe form `r^2 = 2 e^2 / (k1 + sqrt(k1^2 + 4 k2 e^2))`,
    /// equivalent to the textbook quadratic-formula root but stable when
    /// `4 k2 e^2 << k1^2`.
    pub fn energy_inverse(&self, e: f64) -> Result<f64> {
        if !(e >= 0.0) {
            return Err(Error::domain(format!("energy must be >= 0, got {e}")));
        }
        Ok(self.energy_inverse_raw(e))
    }

    /// Derivative `dE/dr = (k1 + 2 k2 r^2) / sqrt(k1 + k2 r^2)`.
    ///
    /// Positive for all `r >= 0`, with `E'(0) = sqrt(k1)`.
    pub fn energy_slope(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::domain(format!("momentum magnitude must be >= 0, got {r}")));
        }
        Ok(self.energy_slope_raw(r))
    }

    /// The ratio `E'(r) / r`, strictly decreasing in `r` (it diverges like
    /// `sqrt(k1)/r` towards the origin, so the domain excludes 0).
    pub fn slope_over_radius(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::domain(format!("momentum magnitude must be > 0, got {r}")));
        }
        Ok(self.slope_over_radius_raw(r))
    }

    #[inline]
    pub(crate) fn energy_raw(&self, r: f64) -> f64 {
        // r * sqrt(k1 + k2 r^2) avoids overflow of r^4 for large r
        r * (self.kappa1 + self.kappa2 * r * r).sqrt()
    }

    #[inline]
    pub(crate) fn energy_inverse_raw(&self, e: f64) -> f64 {
        let disc = (self.kappa1 * self.kappa1 + 4.0 * self.kappa2 * e * e).sqrt();
        (2.0 * e * e / (self.kappa1 + disc)).sqrt()
    }

    #[inline]
    pub(crate) fn energy_slope_raw(&self, r: f64) -> f64 {
        let r2 = r * r;
        (self.kappa1 + 2.0 * self.kappa2 * r2) / (self.kappa1 + self.kappa2 * r2).sqrt()
    }

    #[inline]
    pub(crate) fn slope_over_radius_raw(&self, r: f64) -> f64 {
        self.energy_slope_raw(r) / r
    }
}
