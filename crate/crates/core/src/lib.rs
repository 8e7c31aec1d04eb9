//! Deterministic numerical solver and verification harness for the
//! low-temperature bosonic quantum Boltzmann equation `df/dt = Q[f]` with the
//! full Bogoliubov dispersion `E(r) = sqrt(k1 r^2 + k2 r^4)`.
//!
//! For radially symmetric states the delta-constrained collision operator
//! reduces exactly to one-dimensional resonance quadratures; this crate
//! implements that reduction, an independent mollified-delta oracle that
//! validates it, a positivity-preserving time integrator, the resonance
//! surface geometry, and diagnostics that check the analytic structure of the
//! dynamics at desk scale: conservation of energy, the H-theorem,
//! Bose-Einstein equilibria, moment boundedness, and the uniform Gaussian
//! lower envelope.
//!
//! Everything is deterministic; repeated runs are bit-identical.

pub mod cli;
pub mod collision;
pub mod config;
pub mod diagnostics;
pub mod dispersion;
pub mod error;
pub mod grid;
pub mod integrator;
pub mod interp;
pub mod oracle;
pub mod surfaces;

pub use collision::{build_kernel_table, KernelTable};
pub use config::{parse_config, render, InitialCondition, RunConfig};
pub use diagnostics::{
    conservation_report, entropy, envelope_fit, equilibrium_state, lower_bound_report, moment,
    DiagnosticsReport, EnvelopeParams,
};
pub use dispersion::DispersionParams;
pub use error::{Error, Result};
pub use grid::{RadialGrid, RadialState, Spacing};
pub use integrator::{run, step, IntegratorConfig, Scheme, Trajectory};
pub use oracle::{epsilon_study, mollified_collision, MollifierConfig};
pub use surfaces::{
    alpha_max, measure_density, ring_radius, surface_area, surface_integral, RingSample,
    SurfaceKind, SurfaceWeight,
};
