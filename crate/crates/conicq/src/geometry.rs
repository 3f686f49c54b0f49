//! Conic divisors, Gauss-Bonnet-Chern bookkeeping, the criticality trichotomy
//! and the cylinder / plane / inverted coordinate maps.
//!
//! Curvature totals are expressed in units of π².

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("dimension must be even and at least 4, got {0}")]
    InvalidDimension(u32),
    #[error("cone index {beta} for `{label}` is outside (-1, 0)")]
    InvalidBeta { label: String, beta: f64 },
    #[error("divisor is empty, the critical threshold is undefined")]
    EmptyDivisor,
    #[error("sample grid is not strictly increasing")]
    UnsortedGrid,
    #[error("radial grid contains r <= 0")]
    NonPositiveRadius,
    #[error("samples and grid have different lengths")]
    LengthMismatch,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivisorEntry {
    pub label: String,
    pub beta: f64,
}

/// A formal sum of marked points with cone indices in (-1, 0), kept sorted by index.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ConicDivisor {
    entries: Vec<DivisorEntry>,
}

impl ConicDivisor {
    pub fn new(entries: Vec<(String, f64)>) -> Result<Self, GeometryError> {
        let mut out = Vec::with_capacity(entries.len());
        for (label, beta) in entries {
            if !(beta > -1.0 && beta < 0.0) {
                return Err(GeometryError::InvalidBeta { label, beta });
            }
            out.push(DivisorEntry { label, beta });
        }
        out.sort_by(|a, b| a.beta.total_cmp(&b.beta).then_with(|| a.label.cmp(&b.label)));
        Ok(Self { entries: out })
    }

    /// Builds a divisor from bare indices labelled `p1`, `p2`, ...
    pub fn from_betas(betas: &[f64]) -> Result<Self, GeometryError> {
        Self::new(
            betas
                .iter()
                .enumerate()
                .map(|(i, &b)| (format!("p{}", i + 1), b))
                .collect(),
        )
    }

    pub fn entries(&self) -> &[DivisorEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn beta_sum(&self) -> f64 {
        self.entries.iter().map(|e| e.beta).sum()
    }

    pub fn beta_min(&self) -> Option<f64> {
        self.entries.first().map(|e| e.beta)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationInput {
    /// Total background Q-curvature integral, in units of π².
    pub k_g0_pi2: f64,
    pub divisor: ConicDivisor,
    pub dimension: u32,
}

impl ClassificationInput {
    pub fn new(k_g0_pi2: f64, divisor: ConicDivisor, dimension: u32) -> Result<Self, GeometryError> {
        check_dimension(dimension)?;
        Ok(Self { k_g0_pi2, divisor, dimension })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CriticalityLabel {
    Subcritical,
    Critical,
    Supercritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Criticality {
    pub label: CriticalityLabel,
    /// Left side minus right side of the defining inequality, in units of π².
    pub margin_pi2: f64,
    pub beta_min: f64,
}

fn check_dimension(n: u32) -> Result<(), GeometryError> {
    if n < 4 || n % 2 != 0 {
        return Err(GeometryError::InvalidDimension(n));
    }
    Ok(())
}

/// γ_n = (n-1)!·|Sⁿ|/2 in units of π².
///
/// For n = 2k, |Sⁿ| = 2·π^k·4^k·k!/(2k)!.
pub fn gamma_n_pi2(n: u32) -> Result<f64, GeometryError> {
    check_dimension(n)?;
    let k = n / 2;
    let fact = |m: u32| (1..=m).map(f64::from).product::<f64>();
    let sphere_over_pik = 2.0 * 4f64.powi(k as i32) * fact(k) / fact(2 * k);
    Ok(fact(n - 1) * sphere_over_pik / 2.0 * std::f64::consts::PI.powi(k as i32 - 2))
}

/// γ_n in absolute units.
pub fn gamma_n(n: u32) -> Result<f64, GeometryError> {
    Ok(gamma_n_pi2(n)? * std::f64::consts::PI.powi(2))
}

/// k_{g0} + γ_n·Σβᵢ, in units of π².
pub fn total_q_integral(input: &ClassificationInput) -> Result<f64, GeometryError> {
    let g = gamma_n_pi2(input.dimension)?;
    Ok(input.k_g0_pi2 + g * input.divisor.beta_sum())
}

/// Default width of the critical band: 10⁻¹²·γ_n, in units of π².
pub fn default_tolerance_pi2(n: u32) -> Result<f64, GeometryError> {
    Ok(1e-12 * gamma_n_pi2(n)?)
}

pub fn classify(input: &ClassificationInput, tol_pi2: f64) -> Result<Criticality, GeometryError> {
    let beta_min = input.divisor.beta_min().ok_or(GeometryError::EmptyDivisor)?;
    let g = gamma_n_pi2(input.dimension)?;
    let margin = total_q_integral(input)? - g * (2.0 + 2.0 * beta_min);
    let label = if margin.abs() <= tol_pi2 {
        CriticalityLabel::Critical
    } else if margin < 0.0 {
        CriticalityLabel::Subcritical
    } else {
        CriticalityLabel::Supercritical
    };
    Ok(Criticality { label, margin_pi2: margin, beta_min })
}

/// A function sampled on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampled {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Sampled {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self, GeometryError> {
        if x.len() != y.len() {
            return Err(GeometryError::LengthMismatch);
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(GeometryError::UnsortedGrid);
        }
        Ok(Self { x, y })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Linear interpolation in the abscissa; `None` outside the grid.
    pub fn interp(&self, at: f64) -> Option<f64> {
        interp_by(&self.x, &self.y, at, |v| v)
    }
}

/// A radial function u(r) sampled on a strictly increasing grid of r > 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSamples {
    pub r: Vec<f64>,
    pub u: Vec<f64>,
}

impl RadialSamples {
    pub fn new(r: Vec<f64>, u: Vec<f64>) -> Result<Self, GeometryError> {
        if r.len() != u.len() {
            return Err(GeometryError::LengthMismatch);
        }
        if r.iter().any(|&v| !(v > 0.0)) {
            return Err(GeometryError::NonPositiveRadius);
        }
        if r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(GeometryError::UnsortedGrid);
        }
        Ok(Self { r, u })
    }

    /// Linear interpolation in log r; `None` outside the grid.
    pub fn interp(&self, r: f64) -> Option<f64> {
        if !(r > 0.0) {
            return None;
        }
        interp_by(&self.r, &self.u, r, f64::ln)
    }
}

fn interp_by(xs: &[f64], ys: &[f64], at: f64, map: impl Fn(f64) -> f64) -> Option<f64> {
    let n = xs.len();
    if n == 0 || at < xs[0] || at > xs[n - 1] {
        return None;
    }
    if n == 1 {
        return Some(ys[0]);
    }
    let i = match xs.partition_point(|&x| x <= at) {
        0 => 0,
        i if i >= n => n - 2,
        i => i - 1,
    };
    let (a, b) = (map(xs[i]), map(xs[i + 1]));
    let w = (map(at) - a) / (b - a);
    Some(ys[i] + w * (ys[i + 1] - ys[i]))
}

/// Maps a cylinder profile v(t) to the planar radial function u(r) = v(log r) - log r.
pub fn cylinder_to_plane(v: &Sampled) -> RadialSamples {
    let r = v.x.iter().map(|t| t.exp()).collect();
    let u = v.x.iter().zip(&v.y).map(|(t, v)| v - t).collect();
    RadialSamples { r, u }
}

/// Inverts about the unit sphere: w(s) = u(1/s) - (2+β)·log s on the grid s = 1/r.
pub fn kelvin_invert(u: &RadialSamples, beta_inf: f64) -> Result<RadialSamples, GeometryError> {
    if u.r.iter().any(|&r| !(r > 0.0)) {
        return Err(GeometryError::NonPositiveRadius);
    }
    let mut s = Vec::with_capacity(u.r.len());
    let mut w = Vec::with_capacity(u.r.len());
    for (&r, &val) in u.r.iter().zip(&u.u).rev() {
        let si = 1.0 / r;
        s.push(si);
        w.push(val - (2.0 + beta_inf) * si.ln());
    }
    RadialSamples::new(s, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn input(k: f64, betas: &[f64]) -> ClassificationInput {
        ClassificationInput::new(k, ConicDivisor::from_betas(betas).unwrap(), 4).unwrap()
    }

    #[test]
    fn gamma_four_is_eight() {
        assert_eq!(gamma_n_pi2(4).unwrap(), 8.0);
        assert!(gamma_n_pi2(5).is_err());
        assert!(gamma_n_pi2(2).is_err());
    }

    #[test]
    fn total_integral_examples() {
        assert_eq!(total_q_integral(&input(16.0, &[-0.5, -0.5])).unwrap(), 8.0);
        assert_eq!(total_q_integral(&input(16.0, &[])).unwrap(), 16.0);
        assert!((total_q_integral(&input(16.0, &[-0.2, -0.3])).unwrap() - 12.0).abs() < 1e-14);
    }

    #[test]
    fn classify_examples() {
        let c = classify(&input(16.0, &[-0.5, -0.5]), 1e-12).unwrap();
        assert_eq!(c.label, CriticalityLabel::Critical);
        assert_eq!(c.margin_pi2, 0.0);
        let c = classify(&input(16.0, &[-0.5]), 1e-12).unwrap();
        assert_eq!(c.label, CriticalityLabel::Supercritical);
        assert_eq!(c.margin_pi2, 4.0);
        let c = classify(&input(0.0, &[-0.5, -0.5]), 1e-12).unwrap();
        assert_eq!(c.label, CriticalityLabel::Subcritical);
        assert_eq!(c.margin_pi2, -16.0);
        assert_eq!(classify(&input(16.0, &[]), 1e-12), Err(GeometryError::EmptyDivisor));
    }

    #[test]
    fn divisor_rejects_out_of_range() {
        assert!(ConicDivisor::from_betas(&[0.0]).is_err());
        assert!(ConicDivisor::from_betas(&[-1.0]).is_err());
        assert!(ConicDivisor::from_betas(&[f64::NAN]).is_err());
        let d = ConicDivisor::from_betas(&[-0.1, -0.7, -0.3]).unwrap();
        assert_eq!(d.beta_min(), Some(-0.7));
    }

    #[test]
    fn cylinder_zero_and_single() {
        let v = Sampled::new(vec![-1.0, 0.0, 2.0], vec![0.0; 3]).unwrap();
        let u = cylinder_to_plane(&v);
        for (r, u) in u.r.iter().zip(&u.u) {
            assert!((u + r.ln()).abs() < 1e-15);
        }
        let one = cylinder_to_plane(&Sampled::new(vec![0.0], vec![0.3]).unwrap());
        assert_eq!((one.r[0], one.u[0]), (1.0, 0.3));
    }

    #[test]
    fn cylinder_round_sphere() {
        let ts: Vec<f64> = (0..81).map(|i| -4.0 + 0.1 * i as f64).collect();
        let c = 0.25 * 6f64.ln();
        let vs = ts.iter().map(|t: &f64| -t.cosh().ln() + c).collect();
        let u = cylinder_to_plane(&Sampled::new(ts, vs).unwrap());
        for (r, u) in u.r.iter().zip(&u.u) {
            assert!((u - ((2.0 / (1.0 + r * r)).ln() + c)).abs() < 1e-12);
        }
    }

    #[test]
    fn kelvin_examples() {
        let r: Vec<f64> = (0..40).map(|i| 10f64.powf(0.1 * i as f64)).collect();
        let beta = -0.3;
        let u: Vec<f64> = r.iter().map(|r| -(2.0 + beta) * r.ln() + 0.7).collect();
        let w = kelvin_invert(&RadialSamples::new(r.clone(), u).unwrap(), beta).unwrap();
        assert!(w.u.iter().all(|w| (w - 0.7).abs() < 1e-13));
        assert!(w.r.windows(2).all(|p| p[1] > p[0]));

        let c = 0.25 * 6f64.ln();
        let u: Vec<f64> = r.iter().map(|r| (2.0 / (1.0 + r * r)).ln() + c).collect();
        let w = kelvin_invert(&RadialSamples::new(r, u).unwrap(), 0.0).unwrap();
        for (s, w) in w.r.iter().zip(&w.u) {
            assert!((w - ((2.0 / (1.0 + s * s)).ln() + c)).abs() < 1e-12);
        }
        let bad = RadialSamples { r: vec![0.0, 1.0], u: vec![0.0, 0.0] };
        assert_eq!(kelvin_invert(&bad, 0.0), Err(GeometryError::NonPositiveRadius));
    }

    #[test]
    fn kelvin_twice_is_identity() {
        let r: Vec<f64> = (0..50).map(|i| 10f64.powf(-2.0 + 0.08 * i as f64)).collect();
        let u: Vec<f64> = r.iter().map(|r| (1.0 + r).ln().sin()).collect();
        let orig = RadialSamples::new(r, u).unwrap();
        let back = kelvin_invert(&kelvin_invert(&orig, -0.4).unwrap(), -0.4).unwrap();
        for (i, &r) in orig.r.iter().enumerate() {
            assert!((back.interp(r).unwrap() - orig.u[i]).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn classify_permutation_invariant(mut bs in prop::collection::vec(-0.99f64..-0.01, 1..6), k in -20.0f64..40.0) {
            let a = classify(&input(k, &bs), 1e-12).unwrap();
            bs.reverse();
            let b = classify(&input(k, &bs), 1e-12).unwrap();
            prop_assert_eq!(a.label, b.label);
            prop_assert!((a.margin_pi2 - b.margin_pi2).abs() < 1e-12);
        }

        #[test]
        fn margin_affine_in_beta(bs in prop::collection::vec(-0.9f64..-0.1, 2..5), d in 0.0f64..0.05, k in 0.0f64..30.0) {
            // Shifting a non-minimal index moves the margin by γ₄·d.
            let mut sorted = bs.clone();
            sorted.sort_by(f64::total_cmp);
            let mut shifted = sorted.clone();
            let last = shifted.len() - 1;
            shifted[last] = (shifted[last] + d).min(-1e-3);
            let a = classify(&input(k, &sorted), 0.0).unwrap().margin_pi2;
            let b = classify(&input(k, &shifted), 0.0).unwrap().margin_pi2;
            prop_assert!((b - a - 8.0 * (shifted[last] - sorted[last])).abs() < 1e-10);
        }

        #[test]
        fn two_point_sphere(b0 in -0.99f64..-0.01, b1 in -0.99f64..-0.01) {
            let c = classify(&input(16.0, &[b0, b1]), 1e-12).unwrap();
            if b0 == b1 {
                prop_assert_eq!(c.label, CriticalityLabel::Critical);
            } else {
                prop_assert_eq!(c.label, CriticalityLabel::Supercritical);
            }
        }
    }
}
