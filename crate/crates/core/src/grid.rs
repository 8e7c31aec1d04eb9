//! Radial momentum grid and discretized radially symmetric states.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;

/// Node placement rule for [`RadialGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Uniform,
    Log,
}

impl std::fmt::Display for Spacing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Spacing::Uniform => write!(f, "uniform"),
            Spacing::Log => write!(f, "log"),
        }
    }
}

/// Strictly increasing momentum magnitudes on `(0, r_max]` together with
/// quadrature weights for integrals `int_0^rmax g(rho) drho`.
///
/// Nodes are panel midpoints, so the origin itself is never evaluated; the
/// `rho = 0` limit is handled by the profile values, not by a node.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    r_max: f64,
    spacing: Spacing,
}

impl RadialGrid {
    /// Midpoints of `n` equal panels on `[0, r_max]`.
    pub fn uniform(n: usize, r_max: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::config(format!("grid needs at least 2 nodes, got {n}")));
        }
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::config(format!("r_max must be finite and > 0, got {r_max}")));
        }
        let h = r_max / n as f64;
        let nodes: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
        let weights = vec![h; n];
        Ok(RadialGrid {
            nodes,
            weights,
            r_max,
            spacing: Spacing::Uniform,
        })
    }

    /// Midpoints in `log rho` of `n` panels on `[r_min, r_max]`; weights are
    /// the exact panel widths, so piecewise-constant profiles integrate
    /// exactly over `[r_min, r_max]`.
    pub fn log(n: usize, r_min: f64, r_max: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::config(format!("grid needs at least 2 nodes, got {n}")));
        }
        if !(r_min.is_finite() && r_max.is_finite() && 0.0 < r_min && r_min < r_max) {
            return Err(Error::config(format!(
                "log grid needs 0 < r_min < r_max, got r_min={r_min}, r_max={r_max}"
            )));
        }
        let l0 = r_min.ln();
        let dl = (r_max.ln() - l0) / n as f64;
        let nodes: Vec<f64> = (0..n).map(|i| (l0 + (i as f64 + 0.5) * dl).exp()).collect();
        let weights: Vec<f64> = (0..n)
            .map(|i| (l0 + (i as f64 + 1.0) * dl).exp() - (l0 + i as f64 * dl).exp())
            .collect();
        Ok(RadialGrid {
            nodes,
            weights,
            r_max,
            spacing: Spacing::Log,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    /// `int_0^rmax g(rho) drho` by the grid quadrature.
    pub fn integrate(&self, mut g: impl FnMut(usize, f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .enumerate()
            .map(|(i, (&rho, &w))| w * g(i, rho))
            .sum()
    }
}

/// A nonnegative radial occupation-number profile sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialState {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
    time: f64,
}

impl RadialState {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::config(format!(
                "state has {} values for a {}-node grid",
                values.len(),
                grid.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::domain(format!("state values must be finite and >= 0, found {v}")));
        }
        if !(time.is_finite() && time >= 0.0) {
            return Err(Error::domain(format!("state time must be finite and >= 0, got {time}")));
        }
        Ok(RadialState { grid, values, time })
    }

    pub fn from_profile(grid: Arc<RadialGrid>, time: f64, profile: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| profile(r)).collect();
        Self::new(grid, values, time)
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let n = grid.len();
        RadialState {
            grid,
            values: vec![0.0; n],
            time: 0.0,
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub(crate) fn with_values(&self, values: Vec<f64>, time: f64) -> Result<Self> {
        Self::new(self.grid.clone(), values, time)
    }

    /// Off-grid evaluator: shape-preserving cubic through the node values,
    /// clamped to `>= 0`, linearly extended below the first node and zero
    /// beyond `r_max` (the absorbing-tail truncation).
    pub fn evaluator(&self) -> Result<StateEvaluator> {
        let interp = MonotoneCubic::new(self.grid.nodes(), &self.values)?;
        Ok(StateEvaluator {
            interp,
            r_max: self.grid.r_max(),
        })
    }
}

/// See [`RadialState::evaluator`].
pub struct StateEvaluator {
    interp: MonotoneCubic,
    r_max: f64,
}

impl StateEvaluator {
    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        if r > self.r_max {
            0.0
        } else {
            self.interp.eval(r).max(0.0)
        }
    }
}
