//! Independent brute-force evaluation of the collision operator.
//!
//! The energy delta is replaced by a narrow Gaussian
//! `delta_eps(x) = exp(-(x/eps)^2) / (eps sqrt(pi))` and the full
//! two-dimensional `(r, mu)` quadrature is carried out with no resonance
//! bookkeeping whatsoever.  Because the Gaussian has vanishing odd moments,
//! the result converges to the exact delta-constrained value at `O(eps^2)`
//! once the quadrature resolves the mollifier.  This path never runs inside
//! the simulation; it exists to validate the closed-form reduction and to
//! generate reference values.

use crate::dispersion::DispersionParams;
use crate::error::{Error, Result};

/// Resolution of the mollified evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifierConfig {
    /// Energy width of the Gaussian mollifier.
    pub epsilon: f64,
    /// Radial panels on `(0, r_limit]`.
    pub n_r: usize,
    /// Angular-cosine panels on `[-1, 1]`.
    pub n_mu: usize,
    /// Radial truncation of the bath integral.
    pub r_limit: f64,
}

impl MollifierConfig {
    pub fn validate(&self, rho: f64, params: &DispersionParams) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::config(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        if self.n_r < 64 || self.n_mu < 64 {
            return Err(Error::config(format!(
                "mollifier resolutions must be >= 64, got n_r={}, n_mu={}",
                self.n_r, self.n_mu
            )));
        }
        if !(self.r_limit > 0.0) {
            return Err(Error::config(format!("r_limit must be > 0, got {}", self.r_limit)));
        }
        // The mu scan is what sweeps across the delta ridge; measure the
        // energy step per mu cell where the decay ridge crosses r = rho
        // (partner radius sqrt(2) rho).  The radial direction only has to
        // resolve the smooth ridge-integrated profile, not epsilon.
        let s0 = std::f64::consts::SQRT_2 * rho;
        let de_mu = params.energy_slope_raw(s0) * rho * (rho / s0) * 2.0 / self.n_mu as f64;
        if self.epsilon < 3.0 * de_mu {
            return Err(Error::config(format!(
                "under-resolved mollifier: epsilon={} below 3 energy spacings ({:.3e})",
                self.epsilon,
                3.0 * de_mu
            )));
        }
        Ok(())
    }
}

/// Mollified `Q[f](rho)` for a nonnegative radial profile `f`.
///
/// The profile is evaluated directly (no grid, no interpolation); callers
/// that compare against the reduced operator must pass the same truncated
/// profile the grid state represents.
pub fn mollified_collision(
    f: &dyn Fn(f64) -> f64,
    rho: f64,
    config: &MollifierConfig,
    params: &DispersionParams,
) -> Result<f64> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::domain(format!("rho must be > 0, got {rho}")));
    }
    config.validate(rho, params)?;

    let eps = config.epsilon;
    let norm = 1.0 / (eps * std::f64::consts::PI.sqrt());
    // cells more than 8 widths off shell carry < 2e-28 of the mollifier mass
    let delta = |x: f64| {
        let z = x / eps;
        if z.abs() > 8.0 {
            0.0
        } else {
            (-z * z).exp() * norm
        }
    };
    let dr = config.r_limit / config.n_r as f64;
    let dmu = 2.0 / config.n_mu as f64;
    let k0 = params.kappa0;
    let e_rho = params.energy_raw(rho);
    let f_rho = f(rho);

    let mut q1 = 0.0;
    let mut q2 = 0.0;
    for i in 0..config.n_r {
        let r = (i as f64 + 0.5) * dr;
        let e_r = params.energy_raw(r);
        let f_r = f(r);
        let mut acc1 = 0.0;
        let mut acc2 = 0.0;
        for j in 0..config.n_mu {
            let mu = -1.0 + (j as f64 + 0.5) * dmu;
            // decay channel: s = |p - p1|
            let s = (rho * rho + r * r - 2.0 * rho * r * mu).sqrt();
            let w1 = delta(e_rho - e_r - params.energy_raw(s));
            if w1 > 0.0 {
                let f_s = f(s);
                acc1 += w1 * s * (f_r * f_s - f_rho * (f_r + f_s + 1.0));
            }
            // absorption channel: u = |p + p2|
            let u = (rho * rho + r * r + 2.0 * rho * r * mu).sqrt();
            let w2 = delta(params.energy_raw(u) - e_rho - e_r);
            if w2 > 0.0 {
                let f_u = f(u);
                acc2 += w2 * u * (f_u * (f_rho + f_r + 1.0) - f_rho * f_r);
            }
        }
        q1 += acc1 * r * r * r;
        q2 += acc2 * r * r * r;
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let value = two_pi * k0 * rho * dr * dmu * (q1 + 2.0 * q2);
    if !value.is_finite() {
        return Err(Error::numeric("mollified collision value not finite"));
    }
    Ok(value)
}

/// One row of an epsilon-refinement study.
#[derive(Debug, Clone, Copy)]
pub struct EpsilonStudyRow {
    pub epsilon: f64,
    pub value: f64,
    /// `|value - reduced|` against the closed-form reduction.
    pub error_vs_reduced: f64,
}

/// Result of [`epsilon_study`].
#[derive(Debug, Clone)]
pub struct EpsilonStudy {
    pub rows: Vec<EpsilonStudyRow>,
    /// Richardson limit from the two finest widths, assuming second order.
    pub extrapolated: f64,
    /// Set when the error column fails to decrease above the rounding floor.
    pub monotone: bool,
}

/// Evaluate the mollified operator along a decreasing list of widths,
/// scaling the quadrature resolution like `1/eps` from `base`, and report the
/// error against the reduced value together with the extrapolated limit.
pub fn epsilon_study(
    f: &dyn Fn(f64) -> f64,
    rho: f64,
    eps_list: &[f64],
    base: &MollifierConfig,
    params: &DispersionParams,
    reduced: f64,
) -> Result<EpsilonStudy> {
    if eps_list.len() < 3 {
        return Err(Error::config(format!(
            "epsilon study needs at least 3 widths, got {}",
            eps_list.len()
        )));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::config("epsilon list must be strictly decreasing"));
    }
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let scale = (base.epsilon / eps).max(1.0);
        let config = MollifierConfig {
            epsilon: eps,
            n_r: (base.n_r as f64 * scale).ceil() as usize,
            n_mu: (base.n_mu as f64 * scale).ceil() as usize,
            r_limit: base.r_limit,
        };
        let value = mollified_collision(f, rho, &config, params)?;
        rows.push(EpsilonStudyRow {
            epsilon: eps,
            value,
            error_vs_reduced: (value - reduced).abs(),
        });
    }
    let floor = 1e-11 * reduced.abs().max(1.0);
    let monotone = rows
        .windows(2)
        .all(|w| w[1].error_vs_reduced <= w[0].error_vs_reduced * 1.2 || w[1].error_vs_reduced < floor);
    let n = rows.len();
    let ratio = rows[n - 2].epsilon / rows[n - 1].epsilon;
    let r2 = ratio * ratio;
    let extrapolated = (r2 * rows[n - 1].value - rows[n - 2].value) / (r2 - 1.0);
    Ok(EpsilonStudy {
        rows,
        extrapolated,
        monotone,
    })
}
