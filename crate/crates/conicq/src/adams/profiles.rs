use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::{Arc, OnceLock};

use super::AdamsError;

/// A radially symmetric profile v(|x|), non-increasing and supported in B_R.
pub trait RadialProfile: Debug + Send + Sync {
    fn radius(&self) -> f64;
    fn value(&self, r: f64) -> f64;
    /// Radial Laplacian v'' + (3/r)v', when known in closed form.
    fn laplacian(&self, r: f64) -> Option<f64>;
    /// Radii where the profile changes formula.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
    /// Exact ‖Δv‖₂², when known.
    fn laplacian_norm_sq(&self) -> Option<f64> {
        None
    }
}

/// A(1 - (r/R)²)³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub radius: f64,
    pub amplitude: f64,
}

impl RadialProfile for Bump {
    fn radius(&self) -> f64 {
        self.radius
    }
    fn value(&self, r: f64) -> f64 {
        let u = (r / self.radius).powi(2);
        if u >= 1.0 {
            0.0
        } else {
            self.amplitude * (1.0 - u).powi(3)
        }
    }
    fn laplacian(&self, r: f64) -> Option<f64> {
        let u = (r / self.radius).powi(2);
        if u >= 1.0 {
            return Some(0.0);
        }
        Some(24.0 * self.amplitude / self.radius.powi(2) * (1.0 - u) * (2.0 * u - 1.0))
    }
}

/// A(1 - 3u² + 2u³) with u = (r/R)².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyCap {
    pub radius: f64,
    pub amplitude: f64,
}

impl RadialProfile for PolyCap {
    fn radius(&self) -> f64 {
        self.radius
    }
    fn value(&self, r: f64) -> f64 {
        let u = (r / self.radius).powi(2);
        if u >= 1.0 {
            0.0
        } else {
            self.amplitude * (1.0 - 3.0 * u * u + 2.0 * u * u * u)
        }
    }
    fn laplacian(&self, r: f64) -> Option<f64> {
        let u = (r / self.radius).powi(2);
        if u >= 1.0 {
            return Some(0.0);
        }
        Some(self.amplitude / self.radius.powi(2) * (96.0 * u * u - 72.0 * u))
    }
}

/// log(1/r) on [ρ, 1], capped inside ρ by L + 3/4 - s² + s⁴/4 with s = r/ρ and L = log(1/ρ).
///
/// The cap matches value, slope and curvature at r = ρ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedLog {
    pub rho: f64,
    pub amplitude: f64,
}

impl TruncatedLog {
    pub fn new(rho: f64) -> Result<Self, AdamsError> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(AdamsError::InvalidInput(format!("truncation radius must lie in (0, 1), got {rho}")));
        }
        Ok(Self { rho, amplitude: 1.0 })
    }

    /// Scaled so that ‖Δv‖₂ = 1.
    pub fn normalized(rho: f64) -> Result<Self, AdamsError> {
        let mut v = Self::new(rho)?;
        v.amplitude = 1.0 / v.laplacian_norm_sq().expect("closed form").sqrt();
        Ok(v)
    }

    pub fn depth_log(&self) -> f64 {
        -self.rho.ln()
    }

    /// Value as a function of y = log(1/r), which stays accurate deep inside the cap.
    pub fn value_log(&self, y: f64) -> f64 {
        let l = self.depth_log();
        if y <= 0.0 {
            return 0.0;
        }
        if y <= l {
            return self.amplitude * y;
        }
        let s2 = (-2.0 * (y - l)).exp();
        self.amplitude * (l + 0.75 - s2 + 0.25 * s2 * s2)
    }

    pub fn center_value(&self) -> f64 {
        self.amplitude * (self.depth_log() + 0.75)
    }
}

impl RadialProfile for TruncatedLog {
    fn radius(&self) -> f64 {
        1.0
    }
    fn value(&self, r: f64) -> f64 {
        if r >= 1.0 {
            return 0.0;
        }
        if r >= self.rho {
            return -self.amplitude * r.ln();
        }
        let s2 = (r / self.rho).powi(2);
        self.amplitude * (self.depth_log() + 0.75 - s2 + 0.25 * s2 * s2)
    }
    fn laplacian(&self, r: f64) -> Option<f64> {
        if r >= 1.0 {
            return Some(0.0);
        }
        if r >= self.rho {
            return Some(-2.0 * self.amplitude / (r * r));
        }
        let s2 = (r / self.rho).powi(2);
        Some(self.amplitude * (6.0 * s2 - 8.0) / (self.rho * self.rho))
    }
    fn breakpoints(&self) -> Vec<f64> {
        vec![self.rho]
    }
    fn laplacian_norm_sq(&self) -> Option<f64> {
        Some(self.amplitude.powi(2) * PI * PI * (8.0 * self.depth_log() + 9.0))
    }
}

/// Piecewise-linear interpolation of samples (r_i, v_i), constant inside the first radius.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampled {
    r: Vec<f64>,
    v: Vec<f64>,
}

impl Sampled {
    /// Requires increasing radii, non-increasing non-negative values and v = 0 at the last radius.
    pub fn new(r: Vec<f64>, v: Vec<f64>) -> Result<Self, AdamsError> {
        let bad = |m: &str| Err(AdamsError::InvalidInput(m.into()));
        if r.len() != v.len() || r.len() < 2 {
            return bad("need at least two samples of equal length");
        }
        if !r.windows(2).all(|w| w[1] > w[0]) || r[0] <= 0.0 {
            return bad("radii must be positive and increasing");
        }
        if !v.windows(2).all(|w| w[1] <= w[0]) || v.iter().any(|x| !(*x >= 0.0)) {
            return bad("values must be non-negative and non-increasing");
        }
        if v[v.len() - 1] != 0.0 {
            return bad("profile must vanish at the support radius");
        }
        Ok(Self { r, v })
    }

    /// Samples a profile on a log-spaced grid of n points in [r_min, R].
    pub fn from_profile(p: &dyn RadialProfile, r_min: f64, n: usize) -> Result<Self, AdamsError> {
        let big_r = p.radius();
        if n < 2 || !(r_min > 0.0 && r_min < big_r) {
            return Err(AdamsError::InvalidInput("bad sampling grid".into()));
        }
        let (a, b) = (r_min.ln(), big_r.ln());
        let r: Vec<f64> = (0..n)
            .map(|i| if i + 1 == n { big_r } else { (a + (b - a) * i as f64 / (n - 1) as f64).exp() })
            .collect();
        let v = r.iter().map(|&x| p.value(x)).collect();
        Self::new(r, v)
    }

    pub fn radii(&self) -> &[f64] {
        &self.r
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }
}

impl RadialProfile for Sampled {
    fn radius(&self) -> f64 {
        self.r[self.r.len() - 1]
    }
    fn value(&self, r: f64) -> f64 {
        if r <= self.r[0] {
            return self.v[0];
        }
        if r >= self.radius() {
            return 0.0;
        }
        let i = self.r.partition_point(|&x| x <= r) - 1;
        let w = (r - self.r[i]) / (self.r[i + 1] - self.r[i]);
        self.v[i] + w * (self.v[i + 1] - self.v[i])
    }
    fn laplacian(&self, _r: f64) -> Option<f64> {
        None
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.r.clone()
    }
}

/// A profile times a constant factor.
#[derive(Debug, Clone)]
pub struct RadialTestFunction {
    profile: Arc<dyn RadialProfile>,
    scale: f64,
}

impl RadialTestFunction {
    pub fn new(profile: Arc<dyn RadialProfile>) -> Self {
        Self { profile, scale: 1.0 }
    }

    pub fn zero(radius: f64) -> Self {
        Self { profile: Arc::new(Bump { radius, amplitude: 0.0 }), scale: 1.0 }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { profile: Arc::clone(&self.profile), scale: self.scale * factor }
    }

    pub fn profile(&self) -> &dyn RadialProfile {
        &*self.profile
    }

    pub fn radius(&self) -> f64 {
        self.profile.radius()
    }

    pub fn value(&self, r: f64) -> f64 {
        self.scale * self.profile.value(r)
    }

    pub fn laplacian(&self, r: f64) -> Option<f64> {
        self.profile.laplacian(r).map(|d| self.scale * d)
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.profile.breakpoints()
    }

    pub fn exact_laplacian_norm_sq(&self) -> Option<f64> {
        self.profile.laplacian_norm_sq().map(|n| self.scale * self.scale * n)
    }
}

/// A one-parameter family indexed by depth d ≥ 1.
pub trait ProfileFamily: Send + Sync {
    fn name(&self) -> &str;
    fn member(&self, depth: u32) -> Result<RadialTestFunction, AdamsError>;
    /// Characteristic radius of a member, 2^{-d} for the built-in families.
    fn scale_of(&self, depth: u32) -> f64 {
        0.5f64.powi(depth as i32)
    }
}

/// Normalized truncated logarithms with ρ = 2^{-d}.
#[derive(Debug, Clone, Copy, Default)]
pub struct TruncatedLogFamily;

impl ProfileFamily for TruncatedLogFamily {
    fn name(&self) -> &str {
        "truncated-log"
    }
    fn member(&self, depth: u32) -> Result<RadialTestFunction, AdamsError> {
        Ok(RadialTestFunction::new(Arc::new(TruncatedLog::normalized(self.scale_of(depth))?)))
    }
}

/// Unit-amplitude bumps of radius 2^{-d}.
#[derive(Debug, Clone, Copy, Default)]
pub struct BumpFamily;

impl ProfileFamily for BumpFamily {
    fn name(&self) -> &str {
        "bump"
    }
    fn member(&self, depth: u32) -> Result<RadialTestFunction, AdamsError> {
        Ok(RadialTestFunction::new(Arc::new(Bump { radius: self.scale_of(depth), amplitude: 1.0 })))
    }
}

/// Unit-amplitude polynomial caps of radius 2^{-d}.
#[derive(Debug, Clone, Copy, Default)]
pub struct PolyCapFamily;

impl ProfileFamily for PolyCapFamily {
    fn name(&self) -> &str {
        "poly-cap"
    }
    fn member(&self, depth: u32) -> Result<RadialTestFunction, AdamsError> {
        Ok(RadialTestFunction::new(Arc::new(PolyCap { radius: self.scale_of(depth), amplitude: 1.0 })))
    }
}

#[derive(Clone, Default)]
pub struct FamilyRegistry {
    families: BTreeMap<String, Arc<dyn ProfileFamily>>,
}

impl FamilyRegistry {
    pub fn with_builtins() -> Self {
        let mut r = Self::default();
        r.register(Arc::new(TruncatedLogFamily));
        r.register(Arc::new(BumpFamily));
        r.register(Arc::new(PolyCapFamily));
        r
    }

    pub fn register(&mut self, f: Arc<dyn ProfileFamily>) {
        self.families.insert(f.name().to_string(), f);
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn ProfileFamily>> {
        self.families.get(name).cloned()
    }

    pub fn names(&self) -> Vec<&str> {
        self.families.keys().map(String::as_str).collect()
    }
}

pub fn builtin_families() -> &'static FamilyRegistry {
    static REG: OnceLock<FamilyRegistry> = OnceLock::new();
    REG.get_or_init(FamilyRegistry::with_builtins)
}

pub fn family(name: &str) -> Result<Arc<dyn ProfileFamily>, AdamsError> {
    builtin_families()
        .get(name)
        .ok_or_else(|| AdamsError::InvalidInput(format!("unknown family {name:?}; known: {}", builtin_families().names().join(", "))))
}

pub const DEFAULT_FAMILY: &str = "truncated-log";

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_laplacian(p: &dyn RadialProfile, r: f64) -> f64 {
        let h = 1e-4 * r;
        let (a, b, c) = (p.value(r - h), p.value(r), p.value(r + h));
        (a - 2.0 * b + c) / (h * h) + 3.0 / r * (c - a) / (2.0 * h)
    }

    #[test]
    fn closed_form_laplacians() {
        let ps: Vec<Box<dyn RadialProfile>> = vec![
            Box::new(Bump { radius: 1.5, amplitude: 2.0 }),
            Box::new(PolyCap { radius: 0.7, amplitude: 1.3 }),
            Box::new(TruncatedLog::new(0.1).unwrap()),
        ];
        for p in &ps {
            for r in [0.03, 0.2, 0.45, 0.6, 0.9] {
                if r >= p.radius() {
                    continue;
                }
                let want = fd_laplacian(&**p, r);
                let got = p.laplacian(r).unwrap();
                assert!((got - want).abs() < 1e-4 * want.abs().max(1.0), "{p:?} r={r}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn cap_is_c2_at_rho() {
        let v = TruncatedLog::new(0.25).unwrap();
        let eps = 1e-9;
        assert!((v.value(0.25 - eps) - v.value(0.25 + eps)).abs() < 1e-8);
        assert!((v.laplacian(0.25 - eps).unwrap() - v.laplacian(0.25 + eps).unwrap()).abs() < 1e-5);
        assert!((v.value_log(-(0.1f64.ln())) - v.value(0.1)).abs() < 1e-14);
        assert!((v.value_log(40.0) - v.center_value()).abs() < 1e-12);
    }

    #[test]
    fn profiles_are_non_increasing() {
        let fams = builtin_families();
        for name in fams.names() {
            let v = fams.get(name).unwrap().member(3).unwrap();
            let rs: Vec<f64> = (0..400).map(|i| v.radius() * i as f64 / 399.0).collect();
            assert!(rs.windows(2).all(|w| v.value(w[1]) <= v.value(w[0]) + 1e-15), "{name}");
            assert_eq!(v.value(v.radius()), 0.0);
        }
    }

    #[test]
    fn sampled_validation_and_interp() {
        assert!(Sampled::new(vec![0.1, 1.0], vec![1.0, 0.5]).is_err());
        assert!(Sampled::new(vec![0.1, 1.0], vec![0.5, 1.0]).is_err());
        let s = Sampled::new(vec![0.5, 1.0], vec![2.0, 0.0]).unwrap();
        assert_eq!(s.value(0.1), 2.0);
        assert_eq!(s.value(0.75), 1.0);
        let b = Bump { radius: 1.0, amplitude: 1.0 };
        let s = Sampled::from_profile(&b, 1e-3, 200).unwrap();
        assert!((s.value(0.5) - b.value(0.5)).abs() < 1e-3);
    }

    #[test]
    fn registry() {
        assert_eq!(builtin_families().names(), vec!["bump", "poly-cap", "truncated-log"]);
        assert!(family("nope").is_err());
    }
}
