//! Orientation-dependent surface energy densities `gamma(theta)` and the
//! 2x2 surface-energy matrix that drives the anisotropic evolution.
//!
//! A spec describes `gamma` symbolically, so evaluation returns exact
//! first and second derivatives (no numerical differentiation). All
//! variants are smooth and `2*pi`-periodic; validation additionally checks
//! positivity of `gamma` on a fine grid.

mod certify;

pub use certify::{
    check_c3, check_ellipsoidal, check_fourier, check_generic, check_kfold, check_riemannian,
    is_certified, run_all_certifiers, CertifierMethod, ConditionReport, Verdict,
    DEFAULT_GENERIC_GRID,
};

use crate::error::{Error, Result};
use crate::geometry::Vec2;

/// Grid resolution used for positivity and weak-anisotropy sweeps.
const POSITIVITY_GRID: usize = 4096;

/// One harmonic `a * cos(l theta) + b * sin(l theta)` of a truncated
/// Fourier anisotropy.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FourierTerm {
    pub l: u32,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub b: f64,
}

/// Symbolic description of an anisotropic surface energy density.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GammaSpec {
    /// `gamma(theta) = 1`.
    Isotropic,
    /// `gamma(theta) = 1 + beta * cos(k * (theta - theta0))`, the k-fold
    /// smooth crystalline anisotropy.
    KFold {
        beta: f64,
        k: u32,
        #[serde(default)]
        theta0: f64,
    },
    /// `gamma(theta) = sqrt(a + b * cos^2(theta))`.
    Ellipsoidal { a: f64, b: f64 },
    /// `gamma(theta) = sum_k sqrt(n(theta)^T M_k n(theta))` over a family
    /// of symmetric positive definite 2x2 matrices, with
    /// `n(theta) = (-sin theta, cos theta)`.
    RiemannianMetric { matrices: Vec<[[f64; 2]; 2]> },
    /// `gamma(theta) = a0/2 + sum_terms (a cos(l theta) + b sin(l theta))`.
    FourierSeries { a0: f64, terms: Vec<FourierTerm> },
}

/// Value and first two derivatives of `gamma` at one angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaEval {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// The 2x2 matrix `G(theta) = [[gamma, -gamma'], [gamma', gamma]]` that
/// multiplies the tangential difference quotient in the weak form of the
/// anisotropic flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceEnergyMatrix {
    pub gamma: f64,
    pub gamma_prime: f64,
}

impl SurfaceEnergyMatrix {
    pub fn new(gamma: f64, gamma_prime: f64) -> Self {
        SurfaceEnergyMatrix { gamma, gamma_prime }
    }

    /// Row-major entries `[[gamma, -gamma'], [gamma', gamma]]`.
    pub fn entries(&self) -> [[f64; 2]; 2] {
        [
            [self.gamma, -self.gamma_prime],
            [self.gamma_prime, self.gamma],
        ]
    }

    /// Matrix-vector product `G v`.
    pub fn apply(&self, v: Vec2) -> Vec2 {
        Vec2::new(
            self.gamma * v.x - self.gamma_prime * v.y,
            self.gamma_prime * v.x + self.gamma * v.y,
        )
    }

    /// Determinant `gamma^2 + gamma'^2 > 0` for positive `gamma`.
    pub fn det(&self) -> f64 {
        self.gamma * self.gamma + self.gamma_prime * self.gamma_prime
    }
}

/// Value and first three derivatives of `sqrt(a + b cos^2(psi))`.
/// Returns `None` when the radicand is not strictly positive.
fn sqrt_form(a: f64, b: f64, psi: f64) -> Option<(f64, f64, f64, f64)> {
    let (s2, c2) = (2.0 * psi).sin_cos();
    let u = a + 0.5 * b * (1.0 + c2);
    if u <= 0.0 {
        return None;
    }
    let g = u.sqrt();
    let u1 = -b * s2;
    let u2 = -2.0 * b * c2;
    let u3 = 4.0 * b * s2;
    let g1 = u1 / (2.0 * g);
    let g2 = (u2 - 2.0 * g1 * g1) / (2.0 * g);
    let g3 = (u3 - 6.0 * g1 * g2) / (2.0 * g);
    Some((g, g1, g2, g3))
}

/// Eigen-structure of a symmetric 2x2 metric matrix, reduced to the
/// parameters of an angle-shifted `sqrt_form`.
#[derive(Debug, Clone, Copy)]
struct MetricTerm {
    lambda_min: f64,
    lambda_max: f64,
    /// Angle at which the normal `n(theta)` aligns with the eigenvector of
    /// the larger eigenvalue.
    theta_axis: f64,
}

fn metric_term(m: &[[f64; 2]; 2]) -> MetricTerm {
    let (m00, m01, m11) = (m[0][0], m[0][1], m[1][1]);
    let mid = 0.5 * (m00 + m11);
    let disc = (0.5 * (m00 - m11)).hypot(m01);
    let lambda_min = mid - disc;
    let lambda_max = mid + disc;
    // Eigenvector for lambda_max.
    let v = if m01.abs() > f64::EPSILON * (m00.abs() + m11.abs()) {
        Vec2::new(m01, lambda_max - m00)
    } else if m00 >= m11 {
        Vec2::new(1.0, 0.0)
    } else {
        Vec2::new(0.0, 1.0)
    };
    // Solve n(theta_axis) = v / |v| with n = (-sin, cos).
    let theta_axis = (-v.x).atan2(v.y);
    MetricTerm {
        lambda_min,
        lambda_max,
        theta_axis,
    }
}

impl GammaSpec {
    /// Checks the structural invariants of the spec and positivity of
    /// `gamma` on a 4096-point grid.
    pub fn validate(&self) -> Result<()> {
        match self {
            GammaSpec::Isotropic => {}
            GammaSpec::KFold { beta, k, theta0 } => {
                if *k == 0 {
                    return Err(Error::InvalidSpec("k-fold spec needs k >= 1".into()));
                }
                if !beta.is_finite() || !theta0.is_finite() {
                    return Err(Error::InvalidSpec("non-finite k-fold parameter".into()));
                }
            }
            GammaSpec::Ellipsoidal { a, b } => {
                if !(*a > 0.0 && *a + *b > 0.0) {
                    return Err(Error::InvalidSpec(format!(
                        "ellipsoidal spec needs a > 0 and a + b > 0 (got a = {a}, b = {b})"
                    )));
                }
            }
            GammaSpec::RiemannianMetric { matrices } => {
                if matrices.is_empty() {
                    return Err(Error::InvalidSpec(
                        "riemannian spec needs at least one metric matrix".into(),
                    ));
                }
                for (idx, m) in matrices.iter().enumerate() {
                    check_metric_spd(idx, m)?;
                }
            }
            GammaSpec::FourierSeries { a0, terms } => {
                if !a0.is_finite() {
                    return Err(Error::InvalidSpec("non-finite fourier mean".into()));
                }
                for t in terms {
                    if t.l == 0 {
                        return Err(Error::InvalidSpec(
                            "fourier terms need l >= 1; fold the constant into a0".into(),
                        ));
                    }
                    if !t.a.is_finite() || !t.b.is_finite() {
                        return Err(Error::InvalidSpec("non-finite fourier coefficient".into()));
                    }
                }
            }
        }
        // Positivity sweep; evaluate() itself rejects non-positive values.
        for i in 0..POSITIVITY_GRID {
            let theta = -std::f64::consts::PI
                + 2.0 * std::f64::consts::PI * i as f64 / POSITIVITY_GRID as f64;
            self.evaluate(theta)?;
        }
        Ok(())
    }

    /// `gamma`, `gamma'`, `gamma''` at `theta`, from closed-form
    /// differentiation of the spec. Fails with
    /// [`Error::NonPositiveGamma`] when the density is not strictly
    /// positive there.
    pub fn evaluate(&self, theta: f64) -> Result<GammaEval> {
        let (value, d1, d2, _) = self.eval_full(theta)?;
        Ok(GammaEval { value, d1, d2 })
    }

    /// Third derivative `gamma'''(theta)`, exact per variant.
    pub fn third_derivative(&self, theta: f64) -> Result<f64> {
        Ok(self.eval_full(theta)?.3)
    }

    fn eval_full(&self, theta: f64) -> Result<(f64, f64, f64, f64)> {
        let out = match self {
            GammaSpec::Isotropic => (1.0, 0.0, 0.0, 0.0),
            GammaSpec::KFold { beta, k, theta0 } => {
                let kf = *k as f64;
                let (s, c) = (kf * (theta - theta0)).sin_cos();
                (
                    1.0 + beta * c,
                    -beta * kf * s,
                    -beta * kf * kf * c,
                    beta * kf * kf * kf * s,
                )
            }
            GammaSpec::Ellipsoidal { a, b } => sqrt_form(*a, *b, theta)
                .ok_or(Error::NonPositiveGamma { theta, value: 0.0 })?,
            GammaSpec::RiemannianMetric { matrices } => {
                let mut acc = (0.0, 0.0, 0.0, 0.0);
                for m in matrices {
                    let term = metric_term(m);
                    let (g, g1, g2, g3) = sqrt_form(
                        term.lambda_min,
                        term.lambda_max - term.lambda_min,
                        theta - term.theta_axis,
                    )
                    .ok_or(Error::NonPositiveGamma { theta, value: 0.0 })?;
                    acc = (acc.0 + g, acc.1 + g1, acc.2 + g2, acc.3 + g3);
                }
                acc
            }
            GammaSpec::FourierSeries { a0, terms } => {
                let mut acc = (0.5 * a0, 0.0, 0.0, 0.0);
                for t in terms {
                    let lf = t.l as f64;
                    let (s, c) = (lf * theta).sin_cos();
                    acc.0 += t.a * c + t.b * s;
                    acc.1 += lf * (-t.a * s + t.b * c);
                    acc.2 += lf * lf * (-t.a * c - t.b * s);
                    acc.3 += lf * lf * lf * (t.a * s - t.b * c);
                }
                acc
            }
        };
        if !(out.0 > 0.0) {
            return Err(Error::NonPositiveGamma {
                theta,
                value: out.0,
            });
        }
        Ok(out)
    }

    /// The matrix `G(theta) = [[gamma, -gamma'], [gamma', gamma]]`.
    pub fn energy_matrix(&self, theta: f64) -> Result<SurfaceEnergyMatrix> {
        let e = self.evaluate(theta)?;
        Ok(SurfaceEnergyMatrix::new(e.value, e.d1))
    }

    /// Interfacial stiffness `gamma(theta) + gamma''(theta)`.
    pub fn stiffness(&self, theta: f64) -> Result<f64> {
        let e = self.evaluate(theta)?;
        Ok(e.value + e.d2)
    }

    /// True when the stiffness stays strictly positive on a 4096-point
    /// grid (the weak-anisotropy regime this solver targets).
    pub fn is_weakly_anisotropic(&self) -> Result<bool> {
        for i in 0..POSITIVITY_GRID {
            let theta = -std::f64::consts::PI
                + 2.0 * std::f64::consts::PI * i as f64 / POSITIVITY_GRID as f64;
            if self.stiffness(theta)? <= 0.0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Contact-line driving force `f(theta; sigma) = gamma(theta) cos
    /// theta - gamma'(theta) sin theta - sigma`.
    ///
    /// `sigma` is the relative substrate energy difference; values with
    /// `|sigma| > 1` describe extreme wetting regimes and are accepted
    /// with a warning.
    pub fn dewetting_force(&self, theta: f64, sigma: f64) -> Result<f64> {
        if sigma.abs() > 1.0 {
            log::warn!("substrate energy difference |sigma| = {} > 1", sigma.abs());
        }
        let e = self.evaluate(theta)?;
        Ok(e.value * theta.cos() - e.d1 * theta.sin() - sigma)
    }

    /// Cosine/sine Fourier coefficients of `gamma` up to order `l_max`,
    /// in the normalization `gamma = a0/2 + sum_l (a_l cos + b_l sin)`.
    ///
    /// Specs that are already trigonometric polynomials return their
    /// coefficients exactly; the rest are integrated with a composite
    /// trapezoid rule over `samples` points (spectrally accurate for
    /// these smooth periodic densities). `samples` must exceed
    /// `2 * (l_max + 1)` to avoid aliasing.
    pub fn fourier_coefficients(&self, l_max: u32, samples: usize) -> Result<FourierCoefficients> {
        if let Some(exact) = self.exact_fourier() {
            return Ok(exact.truncated(l_max));
        }
        if samples < 2 * (l_max as usize + 1) {
            return Err(Error::InvalidSpec(format!(
                "{samples} quadrature samples cannot resolve harmonics up to {l_max}"
            )));
        }
        let mut gammas = Vec::with_capacity(samples);
        for i in 0..samples {
            let theta =
                -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / samples as f64;
            gammas.push((theta, self.evaluate(theta)?.value));
        }
        let scale = 2.0 / samples as f64;
        let a0 = scale * gammas.iter().map(|(_, g)| g).sum::<f64>();
        let mut terms = Vec::with_capacity(l_max as usize);
        for l in 1..=l_max {
            let lf = l as f64;
            let mut a = 0.0;
            let mut b = 0.0;
            for &(theta, g) in &gammas {
                let (s, c) = (lf * theta).sin_cos();
                a += g * c;
                b += g * s;
            }
            terms.push(FourierTerm {
                l,
                a: scale * a,
                b: scale * b,
            });
        }
        Ok(FourierCoefficients { a0, terms })
    }

    /// Exact Fourier expansion for specs that are trigonometric
    /// polynomials.
    fn exact_fourier(&self) -> Option<FourierCoefficients> {
        match self {
            GammaSpec::Isotropic => Some(FourierCoefficients {
                a0: 2.0,
                terms: Vec::new(),
            }),
            GammaSpec::KFold { beta, k, theta0 } => {
                // 1 + beta cos(k(theta - theta0))
                //   = 1 + beta cos(k theta0) cos(k theta) + beta sin(k theta0) sin(k theta)
                let (s, c) = (*k as f64 * theta0).sin_cos();
                Some(FourierCoefficients {
                    a0: 2.0,
                    terms: vec![FourierTerm {
                        l: *k,
                        a: beta * c,
                        b: beta * s,
                    }],
                })
            }
            GammaSpec::FourierSeries { a0, terms } => {
                // Merge duplicate harmonics so downstream sums see one term
                // per order.
                let mut merged: std::collections::BTreeMap<u32, (f64, f64)> =
                    std::collections::BTreeMap::new();
                for t in terms {
                    let e = merged.entry(t.l).or_insert((0.0, 0.0));
                    e.0 += t.a;
                    e.1 += t.b;
                }
                Some(FourierCoefficients {
                    a0: *a0,
                    terms: merged
                        .into_iter()
                        .map(|(l, (a, b))| FourierTerm { l, a, b })
                        .collect(),
                })
            }
            GammaSpec::Ellipsoidal { .. } | GammaSpec::RiemannianMetric { .. } => None,
        }
    }
}

fn check_metric_spd(idx: usize, m: &[[f64; 2]; 2]) -> Result<()> {
    let scale = m
        .iter()
        .flatten()
        .fold(1.0_f64, |acc, v| acc.max(v.abs()));
    if m.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidSpec(format!(
            "metric matrix {idx} has non-finite entries"
        )));
    }
    if (m[0][1] - m[1][0]).abs() > 1e-12 * scale {
        return Err(Error::InvalidSpec(format!(
            "metric matrix {idx} is not symmetric: m01 = {}, m10 = {}",
            m[0][1], m[1][0]
        )));
    }
    let term = metric_term(m);
    if term.lambda_min <= 1e-10 * scale {
        return Err(Error::InvalidSpec(format!(
            "metric matrix {idx} is not positive definite: eigenvalues {:.3e}, {:.3e}",
            term.lambda_min, term.lambda_max
        )));
    }
    Ok(())
}

/// Eigenvalue pair `(lambda_min, lambda_max)` of one metric matrix,
/// exposed for the eigenvalue-ratio certifier.
pub(crate) fn metric_eigenvalues(m: &[[f64; 2]; 2]) -> (f64, f64) {
    let t = metric_term(m);
    (t.lambda_min, t.lambda_max)
}

/// Fourier expansion of a density in the `a0/2 + sum` normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients {
    pub a0: f64,
    pub terms: Vec<FourierTerm>,
}

impl FourierCoefficients {
    fn truncated(mut self, l_max: u32) -> Self {
        self.terms.retain(|t| t.l <= l_max);
        self
    }
}
