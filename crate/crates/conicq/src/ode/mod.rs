//! The radial constant-Q system in cylinder coordinates, its first integral,
//! the round-sphere solution and an event-aware adaptive integrator.
//!
//! The state is (x1, x2, x3, w4) with x1 = v', x2 = v'', x3 = v''' - 4v' and
//! w4 = log x4 = 4v, evolving by
//! x1' = x2, x2' = 4x1 + x3, x3' = e^{w4}, w4' = 4x1.

pub mod methods;
pub mod solver;
mod trajectory;

use serde::Serialize;
use thiserror::Error;

pub use methods::{builtin_methods, method, EmbeddedPair, MethodRegistry, Tableau, DEFAULT_METHOD};
pub use solver::{drive, Control, DriveOptions, DriveSummary, Step, Tolerance};
pub use trajectory::{
    integrate, integrate_with, Direction, Event, EventHit, IntegrateOptions, Trajectory, TrajectoryError,
};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_T_MAX: f64 = 30.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegrationError {
    #[error("step size underflow at t = {t} (h = {h:e}); the problem is stiff or blowing up")]
    StepSizeUnderflow { t: f64, h: f64 },
    #[error("step budget exhausted at t = {t}")]
    TooManySteps { t: f64 },
    #[error("non-finite derivative at t = {t}")]
    NonFinite { t: f64 },
    #[error("unknown integration method `{0}`")]
    UnknownMethod(String),
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FootballState {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub w4: f64,
}

impl FootballState {
    pub const fn new(x1: f64, x2: f64, x3: f64, w4: f64) -> Self {
        Self { x1, x2, x3, w4 }
    }

    /// Shooting data (0, p, 0, log q).
    pub fn initial(p: f64, q: f64) -> Self {
        Self::new(0.0, p, 0.0, q.ln())
    }

    pub fn x4(&self) -> f64 {
        self.w4.exp()
    }

    /// The conformal factor v = w4/4.
    pub fn v(&self) -> f64 {
        self.w4 / 4.0
    }

    /// x2' = 4x1 + x3.
    pub fn x2_prime(&self) -> f64 {
        4.0 * self.x1 + self.x3
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.x1, self.x2, self.x3, self.w4]
    }

    pub fn from_slice(y: &[f64]) -> Self {
        Self::new(y[0], y[1], y[2], y[3])
    }

    /// Image under t -> -t, which maps solutions to solutions.
    pub fn reflected(&self) -> Self {
        Self::new(-self.x1, self.x2, -self.x3, self.w4)
    }
}

/// Time derivative of the state, in the same (x1, x2, x3, w4) layout.
pub fn vector_field(s: &FootballState) -> FootballState {
    FootballState::new(s.x2, 4.0 * s.x1 + s.x3, s.w4.exp(), 4.0 * s.x1)
}

pub(crate) fn rhs(y: &[f64], out: &mut [f64]) {
    out[0] = y[1];
    out[1] = 4.0 * y[0] + y[2];
    out[2] = y[3].exp();
    out[3] = 4.0 * y[0];
}

/// c = 2x2² - 8x1² - 4x1x3 + x4.
pub fn first_integral(s: &FootballState) -> f64 {
    2.0 * s.x2 * s.x2 - 8.0 * s.x1 * s.x1 - 4.0 * s.x1 * s.x3 + s.x4()
}

/// The same quantity written as 2x2² + x3²/2 - (x2')²/2 + x4.
pub fn first_integral_alt(s: &FootballState) -> f64 {
    let xp = s.x2_prime();
    2.0 * s.x2 * s.x2 + 0.5 * s.x3 * s.x3 - 0.5 * xp * xp + s.x4()
}

/// Closed-form state of the round sphere, v(t) = -log cosh t + log(6)/4.
pub fn round_sphere_state(t: f64) -> FootballState {
    let th = t.tanh();
    let sech = 1.0 / t.cosh();
    let sech2 = sech * sech;
    // log cosh t evaluated without overflow for large |t|
    let a = t.abs();
    let log_cosh = a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2;
    FootballState::new(-th, -sech2, 2.0 * th * (sech2 + 2.0), 6f64.ln() - 4.0 * log_cosh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn field_examples() {
        let (p, q) = (-0.7, 3.5);
        let d = vector_field(&FootballState::initial(p, q));
        assert_eq!((d.x1, d.x2, d.x3, d.w4), (p, 0.0, q, 0.0));
        let d = vector_field(&FootballState::new(0.0, -1.0, 0.0, 6f64.ln()));
        assert_eq!((d.x1, d.x2, d.w4), (-1.0, 0.0, 0.0));
        assert!((d.x3 - 6.0).abs() < 1e-14);
    }

    #[test]
    fn field_matches_closed_form_derivative() {
        // derivatives of the closed form at t = 1
        let t = 1f64;
        let th = t.tanh();
        let s2 = 1.0 / t.cosh().powi(2);
        let dx1 = -s2;
        let dx2 = 2.0 * s2 * th;
        let dx3 = 2.0 * s2 * (s2 + 2.0) + 2.0 * th * (-2.0 * s2 * th);
        let dw4 = -4.0 * th;
        let d = vector_field(&round_sphere_state(t));
        assert!((d.x1 - dx1).abs() < 1e-14);
        assert!((d.x2 - dx2).abs() < 1e-14);
        assert!((d.x3 - dx3).abs() < 1e-13);
        assert!((d.w4 - dw4).abs() < 1e-14);
    }

    #[test]
    fn first_integral_examples() {
        assert!((first_integral(&FootballState::new(0.0, -1.0, 0.0, 6f64.ln())) - 8.0).abs() < 1e-14);
        assert!((first_integral(&round_sphere_state(1.0)) - 8.0).abs() < 1e-13);
        let a = -0.8;
        let c = first_integral(&FootballState::new(a, 0.0, -4.0 * a, -800.0));
        assert!((c - 8.0 * a * a).abs() < 1e-14);
    }

    #[test]
    fn round_sphere_values() {
        let s = round_sphere_state(0.0);
        assert_eq!((s.x1, s.x2, s.x3), (0.0, -1.0, 0.0));
        assert!((s.w4 - 6f64.ln()).abs() < 1e-15);
        let s = round_sphere_state(1.0);
        assert!((s.w4 - (6f64.ln() - 4.0 * 1f64.cosh().ln())).abs() < 1e-14);
        let s = round_sphere_state(400.0);
        assert_eq!(s.x1, -1.0);
        assert_eq!(s.x2, 0.0);
        assert!((s.x3 - 4.0).abs() < 1e-15);
        assert_eq!(s.x4(), 0.0);
        assert!(s.w4.is_finite());
    }

    #[test]
    fn integral_forms_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1_000_000 {
            let s = FootballState::new(
                rng.gen_range(-10.0..10.0),
                rng.gen_range(-10.0..10.0),
                rng.gen_range(-10.0..10.0),
                rng.gen_range(-10.0..5.0),
            );
            let scale = 2.0 * s.x2 * s.x2 + 8.0 * s.x1 * s.x1 + 4.0 * (s.x1 * s.x3).abs() + s.x4()
                + 0.5 * s.x3 * s.x3
                + 0.5 * s.x2_prime().powi(2);
            let diff = (first_integral(&s) - first_integral_alt(&s)).abs();
            assert!(diff <= 8.0 * f64::EPSILON * scale, "{s:?}");
        }
    }
}
