//! Energy-stable evolution of plane curves under anisotropic surface
//! diffusion, discretized with a parametric piecewise-linear finite
//! element method.
//!
//! The central object is a semi-implicit time stepper: at each step the
//! current polygon supplies the geometry (segment lengths, normals,
//! inclination angles), the orientation-dependent surface energy supplies
//! a 2x2 matrix per segment, and one sparse linear solve produces the
//! next polygon together with a discrete chemical potential. For surface
//! energies satisfying a verifiable stability condition the discrete
//! interfacial energy decreases monotonically at every step, for every
//! step size.
//!
//! Two curve topologies are supported: closed loops, and open arcs whose
//! endpoints migrate along a flat substrate (`y = 0`) driven by a
//! relaxed contact-line condition, the setting of solid-state dewetting.
//!
//! Module map:
//!
//! * [`geometry`] — polygonal curves, frames, areas, energies, mass-lumped
//!   inner products, resampling, and the symmetric-difference distance;
//! * [`anisotropy`] — surface energy densities, exact derivatives, the
//!   surface-energy matrix, and stability certifiers;
//! * [`fem`] — assembly of the per-step sparse system, the linear solver,
//!   well-posedness checks, and curvature/potential recovery;
//! * [`driver`] — simulation configuration, initial shapes, the time
//!   loop, and diagnostics;
//! * [`harness`] — mesh-refinement convergence studies against a fine
//!   reference trajectory.

pub mod anisotropy;
pub mod driver;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod harness;
pub mod io;

pub use error::{Error, Result};
