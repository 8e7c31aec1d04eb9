//! Geometry of the resonance surfaces of the three-wave interaction.
//!
//! For a pivot momentum `p` (magnitude `rho`) the decay surface collects the
//! momenta `w` with `E(p-w) + E(w) = E(p)`; the absorption surface those with
//! `E(p+w) = E(p) + E(w)`; the shifted absorption surface is the absorption
//! surface translated by `p`.  All three are surfaces of revolution about the
//! `p` axis: slicing with the plane `w = alpha p + q`, `q . p = 0`, cuts a
//! ring of radius `|q_alpha|`.  This module computes ring radii, the cutoff
//! `alpha_p` beyond which the absorption ring ceases to exist, surface-measure
//! densities, areas and weighted surface integrals.
//!
//! The solver's collision quadrature does not go through this module; these
//! routines exist to verify the closed-form reduction against an independent
//! geometric route and to check the surface-integral estimates the analysis
//! rests on.

use crate::dispersion::DispersionParams;
use crate::error::{Error, Result};

/// Which resonance surface a ring quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceKind {
    /// `E(p-w) + E(w) = E(p)`, the oval through 0 and `p`.
    Decay,
    /// `E(p+w) = E(p) + E(w)`, unbounded, cut off at `alpha_p`.
    Absorb,
    /// The absorption surface translated by `p` (same rings, integrands
    /// evaluated at `|p + w|`).
    AbsorbShifted,
}

impl std::fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SurfaceKind::Decay => write!(f, "decay"),
            SurfaceKind::Absorb => write!(f, "absorb"),
            SurfaceKind::AbsorbShifted => write!(f, "absorb_shifted"),
        }
    }
}

/// Weight applied to a surface integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceWeight {
    /// Plain Euclidean surface measure.
    Euclidean,
    /// Euclidean measure divided by `|grad G|`: the measure produced by the
    /// Dirac delta on the constraint, matching the collision reduction.
    Coarea,
}

/// One parametrized ring of a resonance surface.
#[derive(Debug, Clone, Copy)]
pub struct RingSample {
    pub kind: SurfaceKind,
    pub rho: f64,
    pub alpha: f64,
    /// Ring radius `|q_alpha|`.
    pub ring_radius: f64,
    /// `d(|q_alpha|^2)/dalpha`.
    pub ring_radius_sq_slope: f64,
    /// Surface-measure density `d sigma / (dalpha dtheta)`.
    pub measure_density: f64,
    /// `|grad G|` at the ring.
    pub grad_norm: f64,
}

/// Margin (as a fraction of the alpha domain) inside which slope and
/// gradient evaluations refuse to run; the rings are degenerate at the poles.
const POLE_MARGIN: f64 = 1e-6;

fn check_rho(rho: f64) -> Result<()> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::domain(format!("pivot magnitude must be > 0, got {rho}")));
    }
    Ok(())
}

/// Decay constraint `G(alpha p + q) = E(p-w) + E(w) - E(p)` as a function of
/// `q^2`; strictly increasing in `q^2`.
pub fn decay_constraint(rho: f64, alpha: f64, q: f64, params: &DispersionParams) -> f64 {
    let q2 = q * q;
    let w = (alpha * alpha * rho * rho + q2).sqrt();
    let pw = ((1.0 - alpha) * (1.0 - alpha) * rho * rho + q2).sqrt();
    params.energy_raw(pw) + params.energy_raw(w) - params.energy_raw(rho)
}

/// Absorption constraint `Gbar(alpha p + q) = E(p+w) - E(w) - E(p)`,
/// evaluated through the difference identity
/// `E(u1) - E(u2) = (u1^2 - u2^2)(k1 + k2 (u1^2 + u2^2)) / (E(u1) + E(u2))`
/// so that no precision is lost when `|q|` is large; strictly decreasing in
/// `q^2`.
pub fn absorb_constraint(rho: f64, alpha: f64, q: f64, params: &DispersionParams) -> f64 {
    let q2 = q * q;
    let rho2 = rho * rho;
    let u1sq = (1.0 + alpha) * (1.0 + alpha) * rho2 + q2;
    let u2sq = alpha * alpha * rho2 + q2;
    let e1 = params.energy_raw(u1sq.sqrt());
    let e2 = params.energy_raw(u2sq.sqrt());
    // u1^2 - u2^2 = (1 + 2 alpha) rho^2 exactly
    let diff_sq = (1.0 + 2.0 * alpha) * rho2;
    diff_sq * (params.kappa1 + params.kappa2 * (u1sq + u2sq)) / (e1 + e2) - params.energy_raw(rho)
}

/// Cutoff `alpha_p`: the absorption ring exists exactly for `alpha < alpha_p`.
pub fn alpha_max(rho: f64, params: &DispersionParams) -> Result<f64> {
    check_rho(rho)?;
    let k1 = params.kappa1;
    let k2 = params.kappa2;
    Ok(0.5 * k1 / (k2 * rho * rho + k2.sqrt() * params.energy_raw(rho)))
}

/// Ring radius `|q_alpha|` of the requested surface.
///
/// Decay accepts `alpha` in `[0, 1]` (poles return 0 exactly); absorption
/// kinds accept `alpha` in `[0, alpha_p)`.
pub fn ring_radius(kind: SurfaceKind, rho: f64, alpha: f64, params: &DispersionParams) -> Result<f64> {
    check_rho(rho)?;
    match kind {
        SurfaceKind::Decay => {
            if !(0.0..=1.0).contains(&alpha) {
                return Err(Error::domain(format!("decay ring needs alpha in [0,1], got {alpha}")));
            }
            if alpha == 0.0 || alpha == 1.0 {
                return Ok(0.0);
            }
            // G is increasing in q^2 with G(alpha p) < 0 and G > 0 at q = rho.
            let mut lo = 0.0;
            let mut hi = rho * rho;
            for _ in 0..90 {
                let mid = 0.5 * (lo + hi);
                if decay_constraint(rho, alpha, mid.sqrt(), params) <= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok((0.5 * (lo + hi)).sqrt())
        }
        SurfaceKind::Absorb | SurfaceKind::AbsorbShifted => {
            let ap = alpha_max(rho, params)?;
            if !(0.0..ap).contains(&alpha) {
                return Err(Error::domain(format!(
                    "absorption ring needs alpha in [0, {ap}), got {alpha}"
                )));
            }
            if alpha == 0.0 {
                return Ok(0.0);
            }
            // Gbar is decreasing in q^2, positive on the axis; grow the
            // bracket until the sign flips.
            let mut hi = rho * rho * 1e-12;
            let mut grow = 0;
            while absorb_constraint(rho, alpha, hi.sqrt(), params) > 0.0 {
                hi *= 4.0;
                grow += 1;
                if grow > 500 {
                    return Err(Error::numeric(format!(
                        "absorption ring bracket would not close at rho={rho}, alpha={alpha}"
                    )));
                }
            }
            // when the seed already overshoots the root, the lower end is 0
            let mut lo = if grow == 0 { 0.0 } else { hi / 4.0 };
            for _ in 0..90 {
                let mid = 0.5 * (lo + hi);
                if absorb_constraint(rho, alpha, mid.sqrt(), params) >= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok((0.5 * (lo + hi)).sqrt())
        }
    }
}

fn check_interior(kind: SurfaceKind, rho: f64, alpha: f64, params: &DispersionParams) -> Result<f64> {
    let len = match kind {
        SurfaceKind::Decay => 1.0,
        _ => alpha_max(rho, params)?,
    };
    if !(alpha >= POLE_MARGIN * len && alpha <= (1.0 - POLE_MARGIN) * len) {
        return Err(Error::domain(format!(
            "alpha={alpha} too close to a pole of the {kind} ring domain [0, {len}]"
        )));
    }
    Ok(len)
}

/// `d(|q_alpha|^2)/dalpha` from implicit differentiation of the constraint,
/// using the exact energy slope.
pub fn ring_radius_sq_slope(
    kind: SurfaceKind,
    rho: f64,
    alpha: f64,
    params: &DispersionParams,
) -> Result<f64> {
    check_rho(rho)?;
    check_interior(kind, rho, alpha, params)?;
    let q = ring_radius(kind, rho, alpha, params)?;
    Ok(ring_slope_at(kind, rho, alpha, q, params))
}

fn ring_slope_at(kind: SurfaceKind, rho: f64, alpha: f64, q: f64, params: &DispersionParams) -> f64 {
    let rho2 = rho * rho;
    let q2 = q * q;
    match kind {
        SurfaceKind::Decay => {
            let w = (alpha * alpha * rho2 + q2).sqrt();
            let pw = ((1.0 - alpha) * (1.0 - alpha) * rho2 + q2).sqrt();
            let a = params.slope_over_radius_raw(pw);
            let b = params.slope_over_radius_raw(w);
            2.0 * rho2 * ((1.0 - alpha) * a - alpha * b) / (a + b)
        }
        SurfaceKind::Absorb | SurfaceKind::AbsorbShifted => {
            let w = (alpha * alpha * rho2 + q2).sqrt();
            let pw = ((1.0 + alpha) * (1.0 + alpha) * rho2 + q2).sqrt();
            let a = params.slope_over_radius_raw(pw);
            let b = params.slope_over_radius_raw(w);
            // d|w|^2/dalpha = 2 rho^2 a / (b - a); subtract the axial part
            2.0 * rho2 * a / (b - a) - 2.0 * alpha * rho2
        }
    }
}

/// Surface-measure density `d sigma / (dalpha dtheta)
/// = sqrt(rho^2 |q|^2 + (d(|q|^2)/dalpha)^2 / 4)`.
pub fn measure_density(
    kind: SurfaceKind,
    rho: f64,
    alpha: f64,
    params: &DispersionParams,
) -> Result<f64> {
    check_rho(rho)?;
    check_interior(kind, rho, alpha, params)?;
    let q = ring_radius(kind, rho, alpha, params)?;
    Ok(density_at(kind, rho, alpha, q, params))
}

fn density_at(kind: SurfaceKind, rho: f64, alpha: f64, q: f64, params: &DispersionParams) -> f64 {
    let slope = ring_slope_at(kind, rho, alpha, q, params);
    (rho * rho * q * q + 0.25 * slope * slope).sqrt()
}

/// Euclidean norm of the constraint gradient at the ring, decomposed in the
/// axial/transverse plane (independent of the ring angle by symmetry).
///
/// Defined on the open alpha interval (the poles carry no ring); unlike the
/// slope this stays evaluable arbitrarily close to the poles, where the
/// limit is finite.
pub fn grad_norm(kind: SurfaceKind, rho: f64, alpha: f64, params: &DispersionParams) -> Result<f64> {
    check_rho(rho)?;
    let len = match kind {
        SurfaceKind::Decay => 1.0,
        _ => alpha_max(rho, params)?,
    };
    if !(alpha > 0.0 && alpha < len) {
        return Err(Error::domain(format!(
            "alpha={alpha} is at a pole of the {kind} ring domain (0, {len})"
        )));
    }
    let q = ring_radius(kind, rho, alpha, params)?;
    Ok(grad_norm_at(kind, rho, alpha, q, params))
}

fn grad_norm_at(kind: SurfaceKind, rho: f64, alpha: f64, q: f64, params: &DispersionParams) -> f64 {
    let rho2 = rho * rho;
    let q2 = q * q;
    match kind {
        SurfaceKind::Decay => {
            let w = (alpha * alpha * rho2 + q2).sqrt();
            let pw = ((1.0 - alpha) * (1.0 - alpha) * rho2 + q2).sqrt();
            let a = params.slope_over_radius_raw(pw);
            let b = params.slope_over_radius_raw(w);
            let axial = rho * (alpha * b - (1.0 - alpha) * a);
            let transverse = q * (a + b);
            axial.hypot(transverse)
        }
        SurfaceKind::Absorb | SurfaceKind::AbsorbShifted => {
            let w = (alpha * alpha * rho2 + q2).sqrt();
            let pw = ((1.0 + alpha) * (1.0 + alpha) * rho2 + q2).sqrt();
            let a = params.slope_over_radius_raw(pw);
            let b = params.slope_over_radius_raw(w);
            let axial = rho * ((1.0 + alpha) * a - alpha * b);
            let transverse = q * (b - a);
            axial.hypot(transverse)
        }
    }
}

/// All ring quantities of one `(kind, rho, alpha)` sample.
pub fn ring_sample(
    kind: SurfaceKind,
    rho: f64,
    alpha: f64,
    params: &DispersionParams,
) -> Result<RingSample> {
    check_rho(rho)?;
    check_interior(kind, rho, alpha, params)?;
    let q = ring_radius(kind, rho, alpha, params)?;
    Ok(RingSample {
        kind,
        rho,
        alpha,
        ring_radius: q,
        ring_radius_sq_slope: ring_slope_at(kind, rho, alpha, q, params),
        measure_density: density_at(kind, rho, alpha, q, params),
        grad_norm: grad_norm_at(kind, rho, alpha, q, params),
    })
}

/// Area of the decay surface by composite midpoint quadrature in `alpha`.
pub fn surface_area(rho: f64, params: &DispersionParams, n_alpha: usize) -> Result<f64> {
    check_rho(rho)?;
    if n_alpha < 16 {
        return Err(Error::config(format!("surface_area needs n_alpha >= 16, got {n_alpha}")));
    }
    let da = 1.0 / n_alpha as f64;
    let mut total = 0.0;
    for j in 0..n_alpha {
        let alpha = (j as f64 + 0.5) * da;
        let q = ring_radius(SurfaceKind::Decay, rho, alpha, params)?;
        total += density_at(SurfaceKind::Decay, rho, alpha, q, params) * da;
    }
    Ok(2.0 * std::f64::consts::PI * total)
}

/// Weighted integral of a radial profile over a resonance surface,
/// `2 pi  int F(|point|) density (weight) dalpha`, with the default panel
/// count of 512.
///
/// With [`SurfaceWeight::Coarea`] the density is divided by `|grad G|`,
/// which is exactly the measure the Dirac delta of the collision kernel
/// induces; the Euclidean weight matches the plain surface integrals used in
/// the surface-size estimates.  `AbsorbShifted` integrates over the
/// absorption rings but evaluates `F` at `|p + w|`.
pub fn surface_integral(
    kind: SurfaceKind,
    rho: f64,
    profile: impl Fn(f64) -> f64,
    weight: SurfaceWeight,
    params: &DispersionParams,
) -> Result<f64> {
    surface_integral_n(kind, rho, profile, weight, params, 512)
}

/// [`surface_integral`] with an explicit alpha panel count.
pub fn surface_integral_n(
    kind: SurfaceKind,
    rho: f64,
    profile: impl Fn(f64) -> f64,
    weight: SurfaceWeight,
    params: &DispersionParams,
    n_alpha: usize,
) -> Result<f64> {
    check_rho(rho)?;
    if n_alpha < 16 {
        return Err(Error::config(format!(
            "surface_integral needs n_alpha >= 16, got {n_alpha}"
        )));
    }
    let domain = match kind {
        SurfaceKind::Decay => 1.0,
        _ => alpha_max(rho, params)?,
    };
    let da = domain / n_alpha as f64;
    let rho2 = rho * rho;
    let mut total = 0.0;
    for j in 0..n_alpha {
        let alpha = (j as f64 + 0.5) * da;
        let q = ring_radius(kind, rho, alpha, params)?;
        let radius = match kind {
            SurfaceKind::Decay | SurfaceKind::Absorb => (alpha * alpha * rho2 + q * q).sqrt(),
            SurfaceKind::AbsorbShifted => ((1.0 + alpha) * (1.0 + alpha) * rho2 + q * q).sqrt(),
        };
        let f = profile(radius);
        if !f.is_finite() {
            return Err(Error::numeric(format!(
                "surface integrand not finite at alpha={alpha} (radius {radius})"
            )));
        }
        let mut contrib = f * density_at(kind, rho, alpha, q, params);
        if weight == SurfaceWeight::Coarea {
            contrib /= grad_norm_at(kind, rho, alpha, q, params);
        }
        total += contrib * da;
    }
    Ok(2.0 * std::f64::consts::PI * total)
}
