//! Sparse direct solution of the step system.
//!
//! The system is moderately sized (3 unknowns per node) and unsymmetric,
//! so a sparse LU with partial pivoting is used. The solution is
//! accepted only when it is finite and its residual is tiny relative to
//! the right-hand side; everything else surfaces as
//! [`Error::SingularSystem`] rather than silently producing garbage.

use faer::prelude::Solve;
use faer::sparse::{SparseColMat, Triplet};

use super::StepSystem;
use crate::error::{Error, Result};
use crate::geometry::{PolyCurve, Vec2};

/// Relative residual bound for accepting a solve.
const RESIDUAL_RELATIVE: f64 = 1e-10;

/// Result of solving one step system.
#[derive(Debug, Clone)]
pub struct StepSolution {
    /// The advanced polygon. Built without validation: the caller decides
    /// how to react to (rare) degenerations produced by a step.
    pub curve: PolyCurve,
    /// Nodal chemical potential.
    pub mu: Vec<f64>,
    /// Euclidean norm of `A x - b` for the returned solution.
    pub residual_norm: f64,
}

/// Solves the step system and unpacks the unknown vector into a polygon
/// and a nodal potential. Eliminated coordinates are restored to their
/// pinned value `y = 0`.
pub fn solve(system: &StepSystem) -> Result<StepSolution> {
    let triplets: Vec<Triplet<usize, usize, f64>> = system
        .triplets
        .iter()
        .map(|&(r, c, v)| Triplet::new(r, c, v))
        .collect();
    let matrix = SparseColMat::try_new_from_triplets(system.dim, system.dim, &triplets)
        .map_err(|e| Error::SingularSystem(format!("invalid triplet structure: {e:?}")))?;
    let lu = matrix
        .sp_lu()
        .map_err(|e| Error::SingularSystem(format!("sparse LU factorization failed: {e:?}")))?;
    let rhs = faer::Mat::from_fn(system.dim, 1, |i, _| system.rhs[i]);
    let solution = lu.solve(&rhs);

    let x: Vec<f64> = (0..system.dim).map(|i| solution[(i, 0)]).collect();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem(
            "solution contains non-finite entries".into(),
        ));
    }

    // Residual check against the original triplets.
    let mut residual = system.rhs.clone();
    for &(r, c, v) in &system.triplets {
        residual[r] -= v * x[c];
    }
    let residual_norm = residual.iter().map(|v| v * v).sum::<f64>().sqrt();
    let rhs_norm = system.rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    if residual_norm > RESIDUAL_RELATIVE * (1.0 + rhs_norm) {
        return Err(Error::SingularSystem(format!(
            "residual {residual_norm:.3e} exceeds {RESIDUAL_RELATIVE:.0e} * (1 + |rhs|)"
        )));
    }

    let dof = &system.dof_map;
    let n_nodes = dof.mu.len();
    let mu: Vec<f64> = (0..n_nodes).map(|i| x[dof.mu[i]]).collect();
    let nodes: Vec<Vec2> = (0..n_nodes)
        .map(|i| Vec2::new(x[dof.x[i]], dof.y[i].map_or(0.0, |d| x[d])))
        .collect();
    Ok(StepSolution {
        curve: PolyCurve::from_nodes_unchecked(system.topology, nodes),
        mu,
        residual_norm,
    })
}
