//! Numerical probes of the singular Adams inequality in dimension four.

pub mod profiles;
pub mod quad;

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

pub use profiles::{
    builtin_families, family, Bump, FamilyRegistry, PolyCap, ProfileFamily, RadialProfile, RadialTestFunction, Sampled,
    TruncatedLog, DEFAULT_FAMILY,
};
pub use quad::{integrate, QuadError, QuadResult};

/// Relative tolerance of every quadrature in this module.
pub const QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdamsError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("quadrature failed: {0}")]
    Quadrature(#[from] QuadError),
    #[error("closed forms disagree for n = {n}: {a} vs {b}")]
    Inconsistent { n: u32, a: f64, b: f64 },
}

impl AdamsError {
    pub fn is_domain(&self) -> bool {
        matches!(self, Self::InvalidInput(_))
    }
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

fn check_even(n: u32) -> Result<(), AdamsError> {
    if n < 4 || n % 2 != 0 {
        return Err(AdamsError::InvalidInput(format!("dimension must be even and at least 4, got {n}")));
    }
    Ok(())
}

/// Volume of the unit ball in even dimension n, π^{n/2}/(n/2)!.
pub fn omega(n: u32) -> Result<f64, AdamsError> {
    check_even(n)?;
    Ok(PI.powi((n / 2) as i32) / factorial(n / 2))
}

/// The two closed forms of b_{n,2}.
pub fn b_constant_forms(n: u32) -> Result<(f64, f64), AdamsError> {
    let w = omega(n)?;
    let nf = f64::from(n);
    let expo = nf / (nf - 2.0);
    let gamma = factorial(n / 2 - 2);
    let a = (4.0 * PI.powi((n / 2) as i32) / gamma).powf(expo) / w;
    let b = (w.powf(2.0 / nf) * nf * (nf - 2.0)).powf(expo);
    Ok((a, b))
}

/// Sharp Adams constant b_{n,2}; the closed forms must agree to 1e-12 relative.
pub fn b_constant(n: u32) -> Result<f64, AdamsError> {
    let (a, b) = b_constant_forms(n)?;
    if (a - b).abs() > 1e-12 * a.abs().max(b.abs()) {
        return Err(AdamsError::Inconsistent { n, a, b });
    }
    Ok(a)
}

/// b_{4,2}(1 + β).
pub fn sharp_threshold(beta: f64) -> Result<f64, AdamsError> {
    check_beta(beta)?;
    Ok(b_constant(4)? * (1.0 + beta))
}

fn check_beta(beta: f64) -> Result<(), AdamsError> {
    if !(beta > -1.0 && beta < 0.0) {
        return Err(AdamsError::InvalidInput(format!("beta must lie in (-1, 0), got {beta}")));
    }
    Ok(())
}

/// n^{2/n}·ω_n^{2/n}·(n-2)^{2-2/n}.
pub fn cov_prefactor(n: u32) -> Result<f64, AdamsError> {
    let nf = f64::from(n);
    Ok(nf.powf(2.0 / nf) * omega(n)?.powf(2.0 / nf) * (nf - 2.0).powf(2.0 - 2.0 / nf))
}

/// w(t) = prefactor·v(R·t^{-1/(n-2)}) for t ≥ 1.
pub fn cov_value(v: &RadialTestFunction, n: u32, t: f64) -> Result<f64, AdamsError> {
    if !(t >= 1.0) {
        return Err(AdamsError::InvalidInput(format!("t must be at least 1, got {t}")));
    }
    Ok(cov_prefactor(n)? * v.value(v.radius() * t.powf(-1.0 / (f64::from(n) - 2.0))))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovProfile {
    pub t: Vec<f64>,
    pub w: Vec<f64>,
}

/// The one-dimensional profile on a log-spaced grid of `points` values of t in [1, t_max].
pub fn change_of_variables(v: &RadialTestFunction, n: u32, t_max: f64, points: usize) -> Result<CovProfile, AdamsError> {
    if points < 2 || !(t_max > 1.0) {
        return Err(AdamsError::InvalidInput("need t_max > 1 and at least two points".into()));
    }
    let lt = t_max.ln();
    let t: Vec<f64> = (0..points).map(|i| (lt * i as f64 / (points - 1) as f64).exp()).collect();
    let w = t.iter().map(|&x| cov_value(v, n, x)).collect::<Result<_, _>>()?;
    Ok(CovProfile { t, w })
}

/// ‖Δv‖₂² over B_R with the radial Laplacian, by quadrature.
pub fn laplacian_norm_sq(v: &RadialTestFunction) -> Result<f64, AdamsError> {
    if v.laplacian(0.5 * v.radius()).is_none() {
        return Err(AdamsError::InvalidInput("profile has no closed-form Laplacian".into()));
    }
    let f = |r: f64| {
        let d = v.laplacian(r).unwrap_or(f64::NAN);
        d * d * r.powi(3)
    };
    let q = integrate(f, 0.0, v.radius(), &v.breakpoints(), QUAD_TOL, 0.0)?;
    Ok(2.0 * PI * PI * q.value)
}

/// ∫_{B_R} exp(b·v²)·|x|^{4β} dx.
///
/// Evaluated in z = r^{4(1+β)}, which absorbs the weight into dz.
pub fn functional(v: &RadialTestFunction, beta: f64, b: f64) -> Result<f64, AdamsError> {
    check_beta(beta)?;
    let four_a = 4.0 * (1.0 + beta);
    let z_max = v.radius().powf(four_a);
    let breaks: Vec<f64> = v.breakpoints().iter().map(|r| r.powf(four_a)).collect();
    let f = |z: f64| {
        let x = v.value(z.powf(1.0 / four_a));
        (b * x * x).exp()
    };
    let q = integrate(f, 0.0, z_max, &breaks, QUAD_TOL, 0.0)?;
    Ok(2.0 * PI * PI / four_a * q.value)
}

/// ∫_{B_R} |x|^{4β} dx = 2π²R^{4α}/(4α).
pub fn weight_volume(radius: f64, beta: f64) -> f64 {
    let a = 1.0 + beta;
    2.0 * PI * PI * radius.powf(4.0 * a) / (4.0 * a)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// |lhs - rhs| / max(|lhs|, |rhs|).
    pub gap: f64,
}

/// Both sides of the change-of-variables identity at the sharp exponent b_{4,2}(1+β).
///
/// The left side integrates over the ball; the right side integrates
/// exp(2α·w²)·t^{-1-2α} over t ∈ (1, ∞) in y = log t, with the far tail in closed form.
pub fn identity_check(v: &RadialTestFunction, beta: f64) -> Result<IdentityCheck, AdamsError> {
    let lhs = functional(v, beta, sharp_threshold(beta)?)?;
    let a = 1.0 + beta;
    let big_r = v.radius();
    let r_min = v.breakpoints().into_iter().filter(|r| *r > 0.0).fold(big_r, f64::min);
    let y_max = 2.0 * (big_r / (1e-7 * r_min)).ln();
    let pref = cov_prefactor(4)?;
    let w = |y: f64| pref * v.value(big_r * (-0.5 * y).exp());
    let f = |y: f64| {
        let wy = w(y);
        (2.0 * a * wy * wy - 2.0 * a * y).exp()
    };
    let breaks: Vec<f64> = v.breakpoints().iter().filter(|r| **r > 0.0).map(|r| 2.0 * (big_r / r).ln()).collect();
    let body = integrate(f, 0.0, y_max, &breaks, QUAD_TOL, 0.0)?.value;
    let tail = f(y_max) / (2.0 * a);
    let rhs = PI * PI * big_r.powf(4.0 * a) * (body + tail);
    let gap = (lhs - rhs).abs() / lhs.abs().max(rhs.abs());
    Ok(IdentityCheck { lhs, rhs, gap })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbePoint {
    pub depth: u32,
    pub rho: f64,
    pub value: f64,
}

/// Functional values along the normalized truncated-logarithm family, ρ = 2^{-d} for d = 1..=depth.
pub fn sharpness_probe(beta: f64, b: f64, family_depth: u32) -> Result<Vec<ProbePoint>, AdamsError> {
    sharpness_probe_with(&*family(DEFAULT_FAMILY)?, beta, b, family_depth)
}

pub fn sharpness_probe_with(
    fam: &dyn ProfileFamily,
    beta: f64,
    b: f64,
    family_depth: u32,
) -> Result<Vec<ProbePoint>, AdamsError> {
    check_beta(beta)?;
    if !(b >= 0.0) || !b.is_finite() {
        return Err(AdamsError::InvalidInput(format!("exponent must be finite and non-negative, got {b}")));
    }
    (1..=family_depth)
        .map(|d| {
            let v = fam.member(d)?;
            Ok(ProbePoint { depth: d, rho: fam.scale_of(d), value: functional(&v, beta, b)? })
        })
        .collect()
}

/// The profiles used by the identity checks: a bump, a polynomial cap and a truncated logarithm.
pub fn reference_profiles() -> Vec<(&'static str, RadialTestFunction)> {
    vec![
        ("bump", RadialTestFunction::new(Arc::new(Bump { radius: 1.0, amplitude: 0.3 }))),
        ("poly-cap", RadialTestFunction::new(Arc::new(PolyCap { radius: 2.0, amplitude: 0.25 }))),
        ("truncated-log", RadialTestFunction::new(Arc::new(TruncatedLog::normalized(1.0 / 64.0).expect("valid radius")))),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn b4_is_32_pi_squared() {
        let b = b_constant(4).unwrap();
        assert!((b - 32.0 * PI * PI).abs() <= 4.0 * f64::EPSILON * b);
        let (x, y) = b_constant_forms(6).unwrap();
        assert!((x - y).abs() < 1e-12 * x);
        assert!(b_constant(5).is_err() && b_constant(2).is_err());
    }

    #[test]
    fn prefactor_four_pi() {
        assert!((cov_prefactor(4).unwrap() - 4.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn zero_profile() {
        let v = RadialTestFunction::zero(1.5);
        let c = change_of_variables(&v, 4, 100.0, 10).unwrap();
        assert!(c.w.iter().all(|x| *x == 0.0));
        for beta in [-0.25, -0.5, -0.75] {
            let ch = identity_check(&v, beta).unwrap();
            let want = weight_volume(1.5, beta);
            assert!((ch.lhs - want).abs() < 1e-9 * want && (ch.rhs - want).abs() < 1e-9 * want, "{ch:?}");
        }
    }

    #[test]
    fn cov_is_linear_and_hits_four_pi() {
        let v = RadialTestFunction::new(Arc::new(Bump { radius: 1.0, amplitude: 1.0 }));
        let a = change_of_variables(&v, 4, 50.0, 20).unwrap();
        let b = change_of_variables(&v.scaled(3.0), 4, 50.0, 20).unwrap();
        for (x, y) in a.w.iter().zip(&b.w) {
            assert!((3.0 * x - y).abs() < 1e-12 * y.abs().max(1.0));
        }
        let flat = RadialTestFunction::new(Arc::new(Sampled::new(vec![0.9, 1.0], vec![1.0, 0.0]).unwrap()));
        assert!((cov_value(&flat, 4, 4.0).unwrap() - 4.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn norm_matches_closed_form() {
        for rho in [0.5, 1.0 / 64.0, 1e-3] {
            let v = RadialTestFunction::new(Arc::new(TruncatedLog::new(rho).unwrap()));
            let q = laplacian_norm_sq(&v).unwrap();
            let e = v.exact_laplacian_norm_sq().unwrap();
            assert!((q - e).abs() < 1e-8 * e, "{q} vs {e}");
        }
    }

    #[test]
    fn identity_holds_on_references() {
        for (name, v) in reference_profiles() {
            for beta in [-0.25, -0.5, -0.75] {
                let c = identity_check(&v, beta).unwrap();
                assert!(c.gap <= 1e-6, "{name} {beta}: {c:?}");
            }
        }
    }

    #[test]
    fn probe_at_zero_exponent_is_volume() {
        let pts = sharpness_probe(-0.5, 0.0, 4).unwrap();
        for p in pts {
            assert!((p.value - weight_volume(1.0, -0.5)).abs() < 1e-9);
        }
    }
}
