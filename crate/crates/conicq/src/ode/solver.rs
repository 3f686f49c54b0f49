//! Adaptive step-size driver with PI control and cubic Hermite dense output.

use super::methods::{EmbeddedPair, Rhs, StepWork};
use super::IntegrationError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Tolerance {
    pub fn uniform(tol: f64) -> Self {
        Self { rtol: tol, atol: tol }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveOptions {
    pub tol: Tolerance,
    pub max_steps: usize,
    /// Largest allowed |h|; `None` means the whole span.
    pub h_max: Option<f64>,
}

impl DriveOptions {
    pub fn new(tol: f64) -> Self {
        Self { tol: Tolerance::uniform(tol), max_steps: 2_000_000, h_max: None }
    }
}

/// An accepted step, with enough data for Hermite interpolation.
#[derive(Debug)]
pub struct Step<'a> {
    pub t0: f64,
    pub t1: f64,
    pub y0: &'a [f64],
    pub y1: &'a [f64],
    pub f0: &'a [f64],
    pub f1: &'a [f64],
    /// Componentwise local error estimate of the step.
    pub err: &'a [f64],
}

impl Step<'_> {
    /// Cubic Hermite interpolant at time `t` inside the step.
    pub fn interpolate(&self, t: f64, out: &mut [f64]) {
        hermite(self.t0, self.t1, self.y0, self.y1, self.f0, self.f1, t, out);
    }
}

#[allow(clippy::too_many_arguments)]
pub fn hermite(t0: f64, t1: f64, y0: &[f64], y1: &[f64], f0: &[f64], f1: &[f64], t: f64, out: &mut [f64]) {
    let h = t1 - t0;
    if h == 0.0 {
        out.copy_from_slice(y0);
        return;
    }
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    for i in 0..out.len() {
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriveSummary {
    pub t_end: f64,
    pub accepted: usize,
    pub rejected: usize,
    /// The observer asked to stop before the end of the span.
    pub stopped: bool,
}

fn scaled_norm(err: &[f64], y0: &[f64], y1: &[f64], tol: &Tolerance) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..err.len() {
        let sc = tol.atol + tol.rtol * y0[i].abs().max(y1[i].abs());
        let v = (err[i] / sc).abs();
        if !v.is_finite() {
            return f64::INFINITY;
        }
        m = m.max(v);
    }
    m
}

fn initial_step(
    method: &dyn EmbeddedPair,
    f: &mut Rhs<'_>,
    t0: f64,
    y0: &[f64],
    f0: &[f64],
    tol: &Tolerance,
    span: f64,
) -> f64 {
    let n = y0.len();
    let sc: Vec<f64> = y0.iter().map(|y| tol.atol + tol.rtol * y.abs()).collect();
    let norm = |v: &[f64]| (v.iter().zip(&sc).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / n as f64).sqrt();
    let d0 = norm(y0);
    let d1 = norm(f0);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(span.abs());
    let dir = span.signum();
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, f)| y + dir * h0 * f).collect();
    let mut f1 = vec![0.0; n];
    f(t0 + dir * h0, &y1, &mut f1);
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = norm(&diff) / h0;
    let p = method.error_order() as f64 + 1.0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / p)
    };
    let h = (100.0 * h0).min(h1).min(span.abs());
    if h.is_finite() && h > 0.0 {
        h
    } else {
        1e-6_f64.min(span.abs())
    }
}

/// Integrates from `t0` to `t1` (either direction), handing every accepted step to `observer`.
pub fn drive(
    method: &dyn EmbeddedPair,
    f: &mut Rhs<'_>,
    t0: f64,
    y0: &[f64],
    t1: f64,
    opts: &DriveOptions,
    mut observer: impl FnMut(&Step<'_>) -> Control,
) -> Result<DriveSummary, IntegrationError> {
    let n = y0.len();
    let span = t1 - t0;
    let mut summary = DriveSummary { t_end: t0, accepted: 0, rejected: 0, stopped: false };
    if span == 0.0 {
        return Ok(summary);
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut fy = vec![0.0; n];
    f(t, &y, &mut fy);
    if fy.iter().any(|v| !v.is_finite()) {
        return Err(IntegrationError::NonFinite { t });
    }
    let mut ws = StepWork::new(n, method.stages());
    let q = method.error_order() as f64 + 1.0;
    let (alpha, beta) = (0.7 / q, 0.4 / q);
    let h_max = opts.h_max.unwrap_or(span.abs()).min(span.abs());
    let mut h = initial_step(method, f, t, &y, &fy, &opts.tol, span).min(h_max);
    let mut err_prev: f64 = 1e-4;
    let mut last_rejected = false;

    while (t1 - t) * dir > 0.0 {
        if summary.accepted + summary.rejected >= opts.max_steps {
            return Err(IntegrationError::TooManySteps { t });
        }
        let h_min = 16.0 * f64::EPSILON * t.abs().max(1.0);
        if h < h_min {
            return Err(IntegrationError::StepSizeUnderflow { t, h });
        }
        let remaining = (t1 - t).abs();
        let last = h >= remaining * (1.0 - 1e-12);
        let h_try = if last { remaining } else { h };
        method.attempt(f, t, dir * h_try, &y, &fy, &mut ws);
        let finite = ws.y_new.iter().chain(ws.f_new.iter()).all(|v| v.is_finite());
        let err = if finite { scaled_norm(&ws.err, &y, &ws.y_new, &opts.tol) } else { f64::INFINITY };
        if err <= 1.0 {
            let t_new = if last { t1 } else { t + dir * h_try };
            let ctl = observer(&Step {
                t0: t,
                t1: t_new,
                y0: &y,
                y1: &ws.y_new,
                f0: &fy,
                f1: &ws.f_new,
                err: &ws.err,
            });
            t = t_new;
            y.copy_from_slice(&ws.y_new);
            fy.copy_from_slice(&ws.f_new);
            summary.accepted += 1;
            summary.t_end = t;
            if ctl == Control::Stop {
                summary.stopped = true;
                return Ok(summary);
            }
            let e = err.max(1e-10);
            let mut fac = 0.9 * e.powf(-alpha) * err_prev.powf(beta);
            fac = fac.clamp(0.2, 5.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            h = (h_try * fac).min(h_max);
            err_prev = e;
            last_rejected = false;
        } else {
            summary.rejected += 1;
            let fac = if err.is_finite() { (0.9 * err.powf(-1.0 / q)).clamp(0.2, 1.0) } else { 0.2 };
            h = h_try * fac;
            last_rejected = true;
        }
    }
    Ok(summary)
}
