//! Monotone shape-preserving piecewise-cubic interpolation.
//!
//! Standard PCHIP construction: node derivatives are the weighted harmonic
//! mean of adjacent secant slopes, zeroed at local extrema, so the Hermite
//! cubic on each interval is monotone between its endpoints and never
//! overshoots the data.  Outside the node range the interpolant continues
//! linearly with the endpoint derivative.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

/// PCHIP node derivatives for strictly increasing `x`; the slopes that make
/// the piecewise Hermite cubic shape-preserving.
pub(crate) fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let d: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    let mut m = vec![0.0; n];
    for k in 1..n - 1 {
        if d[k - 1] * d[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            m[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
        }
    }
    m[0] = edge_slope(h[0], h.get(1).copied().unwrap_or(h[0]), d[0], d.get(1).copied().unwrap_or(d[0]));
    m[n - 1] = edge_slope(
        h[n - 2],
        if n >= 3 { h[n - 3] } else { h[n - 2] },
        d[n - 2],
        if n >= 3 { d[n - 3] } else { d[n - 2] },
    );
    m
}

/// A fixed evaluation point compiled against a fixed node set: the interval
/// index and the four Hermite weights such that the interpolant value is
/// `b[0] y[k] + b[1] m[k] + b[2] y[k+1] + b[3] m[k+1]` for any data `(y, m)`
/// on those nodes.  Zero weights encode points past the truncation radius;
/// below-range points carry the linear-extension weights.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CompiledPoint {
    pub k: u32,
    pub b: [f64; 4],
}

impl CompiledPoint {
    /// Compile `q` against `nodes`; values beyond `r_cut` evaluate to zero.
    pub fn new(nodes: &[f64], q: f64, r_cut: f64) -> Self {
        let n = nodes.len();
        if q > r_cut {
            return CompiledPoint { k: 0, b: [0.0; 4] };
        }
        if q < nodes[0] {
            // linear extension from the first node
            return CompiledPoint {
                k: 0,
                b: [1.0, q - nodes[0], 0.0, 0.0],
            };
        }
        if q > nodes[n - 1] {
            return CompiledPoint {
                k: (n - 2) as u32,
                b: [0.0, 0.0, 1.0, q - nodes[n - 1]],
            };
        }
        let k = if q >= nodes[n - 2] {
            n - 2
        } else {
            nodes.partition_point(|&v| v <= q) - 1
        };
        let h = nodes[k + 1] - nodes[k];
        let t = (q - nodes[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        CompiledPoint {
            k: k as u32,
            b: [
                2.0 * t3 - 3.0 * t2 + 1.0,
                (t3 - 2.0 * t2 + t) * h,
                -2.0 * t3 + 3.0 * t2,
                (t3 - t2) * h,
            ],
        }
    }

    /// Evaluate against node data and slopes, clamped to `>= 0`.
    #[inline(always)]
    pub fn eval(&self, y: &[f64], m: &[f64]) -> f64 {
        let k = self.k as usize;
        let v = self.b[0] * y[k] + self.b[1] * m[k] + self.b[2] * y[k + 1] + self.b[3] * m[k + 1];
        v.max(0.0)
    }
}

impl MonotoneCubic {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::config(format!(
                "interpolation needs matching node/value slices of length >= 2, got {} and {}",
                x.len(),
                y.len()
            )));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::config("interpolation nodes must be strictly increasing"));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::numeric("non-finite interpolation data"));
        }

        let m = pchip_slopes(x, y);
        Ok(MonotoneCubic {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        })
    }

    /// Index of the interval containing `q` (clamped to the end intervals).
    #[inline]
    fn interval(&self, q: f64) -> usize {
        let n = self.x.len();
        if q <= self.x[0] {
            return 0;
        }
        if q >= self.x[n - 2] {
            return n - 2;
        }
        // binary search for the last node <= q
        self.x.partition_point(|&v| v <= q) - 1
    }

    pub fn eval(&self, q: f64) -> f64 {
        let n = self.x.len();
        if q < self.x[0] {
            return self.y[0] + self.m[0] * (q - self.x[0]);
        }
        if q > self.x[n - 1] {
            return self.y[n - 1] + self.m[n - 1] * (q - self.x[n - 1]);
        }
        let k = self.interval(q);
        let h = self.x[k + 1] - self.x[k];
        let t = (q - self.x[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[k] + h10 * h * self.m[k] + h01 * self.y[k + 1] + h11 * h * self.m[k + 1]
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().unwrap())
    }
}

/// One-sided three-point endpoint derivative with the usual shape clamps.
fn edge_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= 0.0 {
        0.0
    } else if d0 * d1 < 0.0 && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}
