//! Certifiers for the energy-stability condition of the time stepper.
//!
//! The semi-implicit scheme dissipates the discrete interfacial energy
//! unconditionally when the density satisfies, for all angles `theta`,
//! `phi`,
//!
//! ```text
//! g(theta, phi) = 2 gamma(theta) - gamma(theta) cos(theta - phi)
//!                 - gamma'(theta) sin(theta - phi) - gamma(phi) >= 0.
//! ```
//!
//! Each certifier checks this condition (or a sufficient criterion for
//! it) and reports `Proven`, `NotProven`, or `Disproven`:
//!
//! * sufficient-condition certifiers can never disprove — failure of a
//!   sufficient criterion says nothing, so they return `NotProven`;
//! * the grid sweep and the exact k-fold bound can both prove and
//!   disprove, and attach a violating `(theta, phi)` witness when they
//!   disprove.

use std::f64::consts::PI;

use super::{metric_eigenvalues, GammaSpec};
use crate::error::{Error, Result};

/// Default resolution (per axis) of the grid sweep certifier.
pub const DEFAULT_GENERIC_GRID: usize = 720;

/// Relative tolerance below which a grid minimum still counts as
/// non-negative (quadrature and rounding slack).
const PROOF_SLACK: f64 = 1e-10;

/// A grid minimum below this value is a genuine violation, not noise.
const DISPROOF_THRESHOLD: f64 = -1e-6;

/// Relative slack for closed-form margins that are exactly zero at the
/// stability boundary.
const MARGIN_SLACK: f64 = 1e-12;

/// Sample count for the third-derivative certifier's quadratures.
const C3_SAMPLES: usize = 8192;

/// Outcome of a certifier run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The stability condition holds (up to the certifier's tolerance).
    Proven,
    /// This certifier cannot decide; the condition may still hold.
    NotProven,
    /// The condition fails; a witness pair is attached.
    Disproven,
}

/// Which certifier produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertifierMethod {
    /// Direct sweep of `g(theta, phi)` over a uniform grid.
    GenericGrid,
    /// Fourier-coefficient criterion
    /// `a0/2 >= sum_l (1 + l^2) sqrt(a_l^2 + b_l^2)`.
    FourierCondition,
    /// Mean-versus-third-derivative criterion
    /// `mean(gamma) >= 5/2 * ||gamma'''||_L2`.
    ThirdDerivative,
    /// Exact bound `|beta| <= 1 / (1 + k^2)` for k-fold densities.
    KFoldExact,
    /// Parameter-range bound `-a/2 <= b <= a` for ellipsoidal densities.
    EllipsoidalRange,
    /// Eigenvalue-ratio bound `lambda_max <= 2 lambda_min` per metric
    /// matrix.
    RiemannianEigenvalue,
}

/// Result of one certifier: verdict, a scalar slack (`margin >= 0`
/// whenever the verdict is `Proven`), and, exactly for `Disproven`, a
/// violating angle pair.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ConditionReport {
    pub method: CertifierMethod,
    pub verdict: Verdict,
    pub margin: f64,
    pub witness: Option<(f64, f64)>,
}

struct GridSweep {
    min: f64,
    argmin: (f64, f64),
    max_gamma: f64,
}

/// Evaluates `g` on a uniform `grid x grid` lattice over `[-pi, pi)^2`
/// and returns the minimum with its location. Exploits uniformity: the
/// trigonometric factors depend only on the index difference, so the
/// diagonal `g(theta, theta) = 0` is hit exactly.
fn sweep_grid(spec: &GammaSpec, grid: usize) -> Result<GridSweep> {
    let mut gamma = Vec::with_capacity(grid);
    let mut gamma_p = Vec::with_capacity(grid);
    let mut thetas = Vec::with_capacity(grid);
    let mut max_gamma = 0.0_f64;
    for i in 0..grid {
        let theta = -PI + 2.0 * PI * i as f64 / grid as f64;
        let e = spec.evaluate(theta)?;
        max_gamma = max_gamma.max(e.value);
        thetas.push(theta);
        gamma.push(e.value);
        gamma_p.push(e.d1);
    }
    // cos/sin of (theta_i - phi_j) = 2*pi*(i-j)/grid, indexed by (i - j) mod grid.
    let mut cos_d = Vec::with_capacity(grid);
    let mut sin_d = Vec::with_capacity(grid);
    for d in 0..grid {
        let (s, c) = (2.0 * PI * d as f64 / grid as f64).sin_cos();
        cos_d.push(c);
        sin_d.push(s);
    }
    let mut min = f64::INFINITY;
    let mut argmin = (0.0, 0.0);
    for i in 0..grid {
        let two_g = 2.0 * gamma[i];
        for j in 0..grid {
            let d = (grid + i - j) % grid;
            let g = two_g - gamma[i] * cos_d[d] - gamma_p[i] * sin_d[d] - gamma[j];
            if g < min {
                min = g;
                argmin = (thetas[i], thetas[j]);
            }
        }
    }
    Ok(GridSweep {
        min,
        argmin,
        max_gamma,
    })
}

/// Sweeps `g(theta, phi)` over a `grid x grid` lattice. Proves stability
/// when the minimum is non-negative up to rounding slack, disproves it
/// (with the minimizing pair as witness) when the minimum is clearly
/// negative, and abstains in between.
pub fn check_generic(spec: &GammaSpec, grid: usize) -> Result<ConditionReport> {
    if grid < 8 {
        return Err(Error::InvalidSpec(format!(
            "grid sweep needs at least 8 points per axis, got {grid}"
        )));
    }
    let sweep = sweep_grid(spec, grid)?;
    let proof_cut = -PROOF_SLACK * sweep.max_gamma.max(1.0);
    let (verdict, margin, witness) = if sweep.min >= proof_cut {
        (Verdict::Proven, sweep.min.max(0.0), None)
    } else if sweep.min < DISPROOF_THRESHOLD {
        (Verdict::Disproven, sweep.min, Some(sweep.argmin))
    } else {
        (Verdict::NotProven, sweep.min, None)
    };
    Ok(ConditionReport {
        method: CertifierMethod::GenericGrid,
        verdict,
        margin,
        witness,
    })
}

/// Default order cutoff and quadrature size for extracting coefficients
/// of non-polynomial specs in [`check_fourier`].
const FOURIER_L_MAX: u32 = 64;
const FOURIER_SAMPLES: usize = 4096;

/// Coefficients with `|a_l| + |b_l|` below this are quadrature noise and
/// are dropped before the stability sum.
const FOURIER_TRUNCATION: f64 = 1e-14;

/// Fourier-coefficient criterion: stability holds when
/// `a0/2 >= sum_l (1 + l^2) sqrt(a_l^2 + b_l^2)`. Sufficient only, so
/// failure yields `NotProven`.
pub fn check_fourier(spec: &GammaSpec) -> Result<ConditionReport> {
    let coeffs = spec.fourier_coefficients(FOURIER_L_MAX, FOURIER_SAMPLES)?;
    let mut sum = 0.0;
    for t in &coeffs.terms {
        if t.a.abs() + t.b.abs() < FOURIER_TRUNCATION {
            continue;
        }
        let lf = t.l as f64;
        sum += (1.0 + lf * lf) * t.a.hypot(t.b);
    }
    let margin = 0.5 * coeffs.a0 - sum;
    let verdict = if margin >= -MARGIN_SLACK * (0.5 * coeffs.a0).max(1.0) {
        Verdict::Proven
    } else {
        Verdict::NotProven
    };
    Ok(ConditionReport {
        method: CertifierMethod::FourierCondition,
        verdict,
        margin,
        witness: None,
    })
}

/// Third-derivative criterion: stability holds when the mean of `gamma`
/// dominates `5/2` times the L2 norm of `gamma'''` over one period.
/// Sufficient only, so failure yields `NotProven`.
pub fn check_c3(spec: &GammaSpec) -> Result<ConditionReport> {
    let mut mean = 0.0;
    let mut d3_sq = 0.0;
    for i in 0..C3_SAMPLES {
        let theta = -PI + 2.0 * PI * i as f64 / C3_SAMPLES as f64;
        mean += spec.evaluate(theta)?.value;
        let d3 = spec.third_derivative(theta)?;
        d3_sq += d3 * d3;
    }
    mean /= C3_SAMPLES as f64;
    let l2 = (d3_sq * 2.0 * PI / C3_SAMPLES as f64).sqrt();
    let margin = mean - 2.5 * l2;
    let verdict = if margin >= -MARGIN_SLACK * mean.max(1.0) {
        Verdict::Proven
    } else {
        Verdict::NotProven
    };
    Ok(ConditionReport {
        method: CertifierMethod::ThirdDerivative,
        verdict,
        margin,
        witness: None,
    })
}

/// Exact stability boundary for k-fold densities: stable precisely when
/// `|beta| <= 1 / (1 + k^2)`. Never abstains. On disproof the witness is
/// the most violating grid pair of a default-resolution sweep.
pub fn check_kfold(spec: &GammaSpec) -> Result<ConditionReport> {
    let GammaSpec::KFold { beta, k, .. } = spec else {
        return Err(Error::InvalidSpec(
            "exact k-fold certifier requires a k-fold spec".into(),
        ));
    };
    if *k == 0 {
        return Err(Error::InvalidSpec("k-fold spec needs k >= 1".into()));
    }
    let beta_max = 1.0 / (1.0 + (*k as f64) * (*k as f64));
    let margin = beta_max - beta.abs();
    if margin >= 0.0 {
        Ok(ConditionReport {
            method: CertifierMethod::KFoldExact,
            verdict: Verdict::Proven,
            margin,
            witness: None,
        })
    } else {
        let sweep = sweep_grid(spec, DEFAULT_GENERIC_GRID)?;
        Ok(ConditionReport {
            method: CertifierMethod::KFoldExact,
            verdict: Verdict::Disproven,
            margin,
            witness: Some(sweep.argmin),
        })
    }
}

/// Parameter-range criterion for ellipsoidal densities: stability holds
/// when `-a/2 <= b <= a`. Sufficient only.
pub fn check_ellipsoidal(spec: &GammaSpec) -> Result<ConditionReport> {
    let GammaSpec::Ellipsoidal { a, b } = spec else {
        return Err(Error::InvalidSpec(
            "ellipsoidal certifier requires an ellipsoidal spec".into(),
        ));
    };
    if !(*a > 0.0 && *a + *b > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "ellipsoidal spec needs a > 0 and a + b > 0 (got a = {a}, b = {b})"
        )));
    }
    let margin = (b + 0.5 * a).min(a - b);
    let verdict = if margin >= 0.0 {
        Verdict::Proven
    } else {
        Verdict::NotProven
    };
    Ok(ConditionReport {
        method: CertifierMethod::EllipsoidalRange,
        verdict,
        margin,
        witness: None,
    })
}

/// Eigenvalue-ratio criterion for metric-sum densities: stability holds
/// when every matrix satisfies `lambda_max <= 2 lambda_min`. Sufficient
/// only.
pub fn check_riemannian(spec: &GammaSpec) -> Result<ConditionReport> {
    let GammaSpec::RiemannianMetric { matrices } = spec else {
        return Err(Error::InvalidSpec(
            "eigenvalue certifier requires a metric-sum spec".into(),
        ));
    };
    spec.validate()?;
    let mut margin = f64::INFINITY;
    for m in matrices {
        let (lo, hi) = metric_eigenvalues(m);
        margin = margin.min(2.0 * lo - hi);
    }
    let verdict = if margin >= 0.0 {
        Verdict::Proven
    } else {
        Verdict::NotProven
    };
    Ok(ConditionReport {
        method: CertifierMethod::RiemannianEigenvalue,
        verdict,
        margin,
        witness: None,
    })
}

/// Runs every certifier applicable to `spec` (grid sweep, Fourier
/// criterion, third-derivative criterion, plus the variant-specific one
/// when it exists) and returns their reports in that order.
pub fn run_all_certifiers(spec: &GammaSpec) -> Result<Vec<ConditionReport>> {
    let mut reports = vec![
        check_generic(spec, DEFAULT_GENERIC_GRID)?,
        check_fourier(spec)?,
        check_c3(spec)?,
    ];
    match spec {
        GammaSpec::KFold { .. } => reports.push(check_kfold(spec)?),
        GammaSpec::Ellipsoidal { .. } => reports.push(check_ellipsoidal(spec)?),
        GammaSpec::RiemannianMetric { .. } => reports.push(check_riemannian(spec)?),
        GammaSpec::Isotropic | GammaSpec::FourierSeries { .. } => {}
    }
    Ok(reports)
}

/// True when any applicable certifier proves the stability condition.
/// The simulation driver uses this to decide whether the per-step energy
/// monotonicity assertion is armed by default.
pub fn is_certified(spec: &GammaSpec) -> Result<bool> {
    Ok(run_all_certifiers(spec)?
        .iter()
        .any(|r| r.verdict == Verdict::Proven))
}
