//! Shooting for bounded orbits from the symmetric data (0, p, 0, log q).
//!
//! `membership` decides whether q lies in the set of trapped initial values,
//! `find_q0` bisects to its supremum q0, and `reconstruct` turns the bounded
//! orbit into curvature totals.
//!
//! Membership runs carry the sensitivity ∂x/∂q alongside the state. Local
//! error estimates divided by the sensitivity give a q-equivalent noise level;
//! an event only counts as decided when it clears that noise by a safety
//! factor, otherwise the run is Undecided and reports the side its raw
//! numerical trajectory fell on.

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{cylinder_to_plane, RadialSamples, Sampled};
use crate::ode::{
    drive, first_integral, integrate_with, method, vector_field, Control, DriveOptions, FootballState,
    IntegrateOptions, Step, Trajectory, TrajectoryError, DEFAULT_METHOD, DEFAULT_T_MAX, DEFAULT_TOL,
};

/// Safety factor between a decided event and the noise level.
const NOISE_SAFETY: f64 = 16.0;
/// Noise level past which a run can no longer decide.
const NOISE_CAP: f64 = 1e-4;
/// Divergence between the bracketing trajectories that ends the trusted part of an orbit.
const ENCLOSURE_TOL: f64 = 1e-6;
/// Magnitude at which an escaping run is stopped.
const BLOWUP: f64 = 1e6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShootingError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("integration failed at q = {q}: {source}")]
    Integration {
        q: f64,
        #[source]
        source: TrajectoryError,
    },
    #[error("lower seed q = {q} did not trap")]
    SeedNotTrapped { q: f64 },
    #[error("no escaping q found below {q_hi}")]
    BracketNotFound { q_hi: f64 },
    #[error("cone angle target alpha = {alpha} is not positive")]
    InvalidTarget { alpha: f64 },
    #[error("beta = {beta} is not bracketed for p in [-64, -2^-10]")]
    NotBracketed { beta: f64 },
}

impl ShootingError {
    /// Domain failures as opposed to numerical breakdown.
    pub fn is_domain(&self) -> bool {
        !matches!(self, ShootingError::Integration { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShootingConfig {
    pub p: f64,
    pub q_tol: f64,
    pub ode_tol: f64,
    pub t_max: f64,
    pub bracket_growth: f64,
    pub method: String,
    pub max_growth_steps: usize,
    pub max_bisections: usize,
}

impl ShootingConfig {
    pub fn new(p: f64) -> Self {
        Self {
            p,
            q_tol: 1e-12,
            ode_tol: DEFAULT_TOL,
            t_max: DEFAULT_T_MAX,
            bracket_growth: 2.0,
            method: DEFAULT_METHOD.to_string(),
            max_growth_steps: 60,
            max_bisections: 200,
        }
    }

    pub fn validate(&self) -> Result<(), ShootingError> {
        let bad = |m: &str| Err(ShootingError::InvalidConfig(m.to_string()));
        if !(self.p < 0.0 && self.p.is_finite()) {
            return bad("p must be negative and finite");
        }
        if !(self.q_tol > 0.0 && self.ode_tol > 0.0 && self.t_max > 0.0) {
            return bad("tolerances and t_max must be positive");
        }
        if !(self.bracket_growth > 1.0) {
            return bad("bracket_growth must exceed 1");
        }
        if method(&self.method).is_none() {
            return bad(&format!("unknown method `{}`", self.method));
        }
        Ok(())
    }

    fn integrate_options(&self) -> IntegrateOptions {
        IntegrateOptions { tol: self.ode_tol, method: self.method.clone(), ..IntegrateOptions::default() }
    }
}

/// Side of q0 indicated by a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Trapped side, q below q0.
    Below,
    /// Escaping side, q above q0.
    Above,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum MembershipResult {
    /// Trapped: x2 < 0, x2' < 0 and x1 < 0 held at time `t`.
    InQ { t: f64 },
    /// x2 reached zero at time `t`.
    Escaped { t: f64 },
    /// Neither event was decided before `t`; `trend` is where the numerical run went.
    Undecided { t: f64, trend: Side },
}

impl MembershipResult {
    pub fn side(&self) -> Side {
        match *self {
            MembershipResult::InQ { .. } => Side::Below,
            MembershipResult::Escaped { .. } => Side::Above,
            MembershipResult::Undecided { trend, .. } => trend,
        }
    }

    pub fn is_undecided(&self) -> bool {
        matches!(self, MembershipResult::Undecided { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipReport {
    pub result: MembershipResult,
    /// First event of the numerical run regardless of noise.
    pub raw: Side,
    /// Accumulated q-equivalent integration noise at the end of the run.
    pub q_noise: f64,
    pub trajectory: Trajectory,
}

fn augmented_rhs(y: &[f64], out: &mut [f64]) {
    let x4 = y[3].exp();
    out[0] = y[1];
    out[1] = 4.0 * y[0] + y[2];
    out[2] = x4;
    out[3] = 4.0 * y[0];
    out[4] = y[5];
    out[5] = 4.0 * y[4] + y[6];
    out[6] = x4 * y[7];
    out[7] = 4.0 * y[4];
}

fn trapped(s: &FootballState, m: [f64; 3]) -> bool {
    s.x2 < -m[0] && s.x2_prime() < -m[1] && s.x1 < -m[2]
}

fn escaped(s: &FootballState, m: f64) -> bool {
    s.x2 >= m
}

/// Noise margins for (x2, x2', x1) given the sensitivity in `y[4..8]`.
fn margins(y: &[f64], q_noise: f64, floor: f64) -> [f64; 3] {
    let k = NOISE_SAFETY * q_noise;
    [
        k * y[5].abs() + floor,
        k * (4.0 * y[4] + y[6]).abs() + floor,
        k * y[4].abs() + floor,
    ]
}

/// First time inside the step at which `pred` holds, by bisection on the dense output.
fn first_time(step: &Step<'_>, pred: impl Fn(&FootballState) -> bool) -> (f64, FootballState) {
    let (mut lo, mut hi) = (step.t0, step.t1);
    let mut buf = [0.0; 8];
    let mut hi_state = FootballState::from_slice(step.y1);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        step.interpolate(mid, &mut buf);
        let s = FootballState::from_slice(&buf);
        if pred(&s) {
            hi = mid;
            hi_state = s;
        } else {
            lo = mid;
        }
    }
    (hi, hi_state)
}

/// Decides membership of q, with noise bookkeeping and the retained trajectory.
pub fn membership_report(p: f64, q: f64, cfg: &ShootingConfig) -> Result<MembershipReport, ShootingError> {
    if !(q > 0.0) || !(p < 0.0) {
        return Err(ShootingError::InvalidConfig(format!("need p < 0 and q > 0, got p = {p}, q = {q}")));
    }
    let m = method(&cfg.method).ok_or_else(|| ShootingError::InvalidConfig(format!("unknown method `{}`", cfg.method)))?;
    let s0 = FootballState::initial(p, q);
    let y0 = [s0.x1, s0.x2, s0.x3, s0.w4, 0.0, 0.0, 0.0, 1.0 / q];
    let floor = 10.0 * cfg.ode_tol;

    let mut traj = Trajectory::single(0.0, s0);
    let mut q_noise = 0.0f64;
    let mut decided: Option<MembershipResult> = None;
    let mut raw: Option<Side> = None;
    let mut capped = false;

    let mut f = |_t: f64, y: &[f64], out: &mut [f64]| augmented_rhs(y, out);
    let opts = DriveOptions::new(cfg.ode_tol);
    let run = drive(m.as_ref(), &mut f, 0.0, &y0, cfg.t_max, &opts, |step| {
        let s1 = FootballState::from_slice(step.y1);
        traj.times.push(step.t1);
        traj.states.push(s1);
        traj.derivs.push(vector_field(&s1));

        let le = step.err[..4].iter().fold(0.0f64, |a, e| a.max(e.abs()));
        let sens = step.y1[4..8].iter().fold(0.0f64, |a, e| a.max(e.abs()));
        if sens > 0.0 {
            q_noise += le / sens;
        }
        let spread = q_noise * step.y1[4..7].iter().fold(0.0f64, |a, e| a.max(e.abs()));

        if raw.is_none() {
            if escaped(&s1, 0.0) {
                raw = Some(Side::Above);
            } else if trapped(&s1, [0.0; 3]) {
                raw = Some(Side::Below);
            }
        }
        if !capped {
            let mg = margins(step.y1, q_noise, floor);
            if escaped(&s1, mg[0]) {
                let (t, _) = first_time(step, |s| escaped(s, mg[0]));
                decided = Some(MembershipResult::Escaped { t });
                return Control::Stop;
            }
            if trapped(&s1, mg) {
                let (t, _) = first_time(step, |s| trapped(s, mg));
                decided = Some(MembershipResult::InQ { t });
                return Control::Stop;
            }
            if spread > NOISE_CAP {
                capped = true;
            }
        }
        let blown = s1.x1.abs() > BLOWUP || s1.x2.abs() > BLOWUP || s1.x3.abs() > BLOWUP || s1.w4 > BLOWUP.ln();
        if (capped && raw.is_some()) || blown {
            return Control::Stop;
        }
        Control::Continue
    });

    let t_last = traj.t_end();
    if let Err(error) = run {
        if raw.is_none() {
            let c0 = first_integral(&s0);
            traj.c0 = c0;
            return Err(ShootingError::Integration { q, source: TrajectoryError { error, partial: Box::new(traj) } });
        }
    }
    let last = *traj.last();
    let trend = |s: &FootballState| {
        // unstable amplitude near the fixed point line
        if s.x2_prime() + 2.0 * s.x2 >= 0.0 {
            Side::Above
        } else {
            Side::Below
        }
    };
    let raw = raw.unwrap_or_else(|| trend(&last));
    let result = decided.unwrap_or(MembershipResult::Undecided { t: t_last, trend: raw });
    traj.c0 = first_integral(&s0);
    traj.max_drift = traj.states.iter().map(|s| (first_integral(s) - traj.c0).abs()).fold(0.0, f64::max);
    Ok(MembershipReport { result, raw, q_noise, trajectory: traj })
}

/// Membership of q in the trapped set for slope p.
pub fn membership(p: f64, q: f64, cfg: &ShootingConfig) -> Result<MembershipResult, ShootingError> {
    membership_report(p, q, cfg).map(|r| r.result)
}

/// Final bracket of the bisection on q.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub lo_undecided: bool,
    pub hi_undecided: bool,
    pub iters: usize,
}

impl Bracket {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// Bisection stopped at the noise floor rather than at `q_tol`.
    pub fn noise_limited(&self) -> bool {
        self.lo_undecided && self.hi_undecided
    }
}

/// Seeds at q = -4p, grows the upper end until it escapes, and bisects.
pub fn bracket_q0(cfg: &ShootingConfig) -> Result<Bracket, ShootingError> {
    bracket_q0_with(cfg, |_, _| {})
}

/// As [`bracket_q0`], reporting every membership decision to `observe`.
pub fn bracket_q0_with(
    cfg: &ShootingConfig,
    mut observe: impl FnMut(f64, &MembershipResult),
) -> Result<Bracket, ShootingError> {
    cfg.validate()?;
    let p = cfg.p;
    let mut lo = -4.0 * p;
    let r = membership(p, lo, cfg)?;
    observe(lo, &r);
    if r.side() != Side::Below {
        return Err(ShootingError::SeedNotTrapped { q: lo });
    }
    let mut lo_und = r.is_undecided();
    let mut hi = lo * cfg.bracket_growth;
    let mut hi_und;
    let mut grown = 0;
    loop {
        let r = membership(p, hi, cfg)?;
        observe(hi, &r);
        if r.side() == Side::Above {
            hi_und = r.is_undecided();
            break;
        }
        lo = hi;
        lo_und = r.is_undecided();
        hi *= cfg.bracket_growth;
        grown += 1;
        if grown >= cfg.max_growth_steps {
            return Err(ShootingError::BracketNotFound { q_hi: hi });
        }
    }
    let mut iters = 0;
    while hi - lo > cfg.q_tol && !(lo_und && hi_und) && iters < cfg.max_bisections {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let r = membership(p, mid, cfg)?;
        observe(mid, &r);
        iters += 1;
        match r.side() {
            Side::Below => {
                lo = mid;
                lo_und = r.is_undecided();
            }
            Side::Above => {
                hi = mid;
                hi_und = r.is_undecided();
            }
        }
    }
    Ok(Bracket { lo, hi, lo_undecided: lo_und, hi_undecided: hi_und, iters })
}

/// √((2p² + q0)/8), the cone angle read off the first integral at the fixed point line.
pub fn extract_alpha(p: f64, q0: f64) -> f64 {
    ((2.0 * p * p + q0) / 8.0).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FootballSolution {
    pub p: f64,
    pub q0: f64,
    /// Half-width of the certified bracket around `q0`.
    pub q0_err: f64,
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    /// Bounded orbit on [0, t_end].
    #[serde(skip)]
    pub trajectory: Trajectory,
    /// End of the part of the orbit enclosed by the bracketing runs.
    pub t_end: f64,
    pub bisection_iters: usize,
    pub polish_iters: usize,
    pub noise_limited: bool,
    /// |alpha - (-x1(t_end))|.
    pub alpha_residual: f64,
}

fn max_gap(a: &FootballState, b: &FootballState) -> f64 {
    (a.x1 - b.x1)
        .abs()
        .max((a.x2 - b.x2).abs())
        .max((a.x3 - b.x3).abs())
        .max((a.x4() - b.x4()).abs())
}

/// Refines the bracket on the raw numerical side to floating-point resolution.
fn polish(p: f64, br: &Bracket, cfg: &ShootingConfig) -> Result<(MembershipReport, MembershipReport, usize), ShootingError> {
    let (mut lo, mut hi) = (br.lo, br.hi);
    let mut rep_lo = membership_report(p, lo, cfg)?;
    let mut rep_hi = membership_report(p, hi, cfg)?;
    let mut iters = 0;
    while iters < 200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let r = membership_report(p, mid, cfg)?;
        iters += 1;
        match r.raw {
            Side::Below => {
                lo = mid;
                rep_lo = r;
            }
            Side::Above => {
                hi = mid;
                rep_hi = r;
            }
        }
    }
    Ok((rep_lo, rep_hi, iters))
}

/// Solves for q0 at slope `cfg.p` and assembles the bounded orbit.
pub fn find_q0(cfg: &ShootingConfig) -> Result<FootballSolution, ShootingError> {
    let br = bracket_q0(cfg)?;
    assemble(cfg, &br)
}

fn assemble(cfg: &ShootingConfig, br: &Bracket) -> Result<FootballSolution, ShootingError> {
    let p = cfg.p;
    let (rep_lo, rep_hi, polish_iters) = polish(p, br, cfg)?;
    let (q_lo, q_hi) = (rep_lo.trajectory.first().w4.exp(), rep_hi.trajectory.first().w4.exp());
    let q0 = if q_hi - q_lo <= 4.0 * f64::EPSILON * q_hi { q_lo } else { 0.5 * (q_lo + q_hi) };
    let q0_err = (q0 - br.lo).max(br.hi - q0).max(0.0);

    // the polished runs share one numerical map and bracket its bounded orbit;
    // the orbit is trusted while they stay together
    let traj = &rep_lo.trajectory;
    let mut t_end = traj.t_end().min(rep_hi.trajectory.t_end());
    for &t in &traj.times {
        if t > t_end {
            break;
        }
        if let Some(b) = rep_hi.trajectory.sample(t) {
            let a = traj.sample(t).expect("inside span");
            if max_gap(&a, &b) > ENCLOSURE_TOL {
                t_end = t;
                break;
            }
        }
    }
    let trajectory = truncate(traj, t_end);
    let alpha = extract_alpha(p, q0);
    let alpha_residual = (alpha + trajectory.last().x1).abs();
    Ok(FootballSolution {
        p,
        q0,
        q0_err,
        alpha,
        beta: alpha - 1.0,
        c: 2.0 * p * p + q0,
        t_end,
        trajectory,
        bisection_iters: br.iters,
        polish_iters,
        noise_limited: br.noise_limited(),
        alpha_residual,
    })
}

fn truncate(traj: &Trajectory, t_end: f64) -> Trajectory {
    let mut out = traj.clone();
    let keep = traj.times.partition_point(|&t| t < t_end);
    out.times.truncate(keep);
    out.states.truncate(keep);
    out.derivs.truncate(keep);
    if let Some(s) = traj.sample(t_end) {
        if out.times.last().map_or(true, |&t| t < t_end) {
            out.times.push(t_end);
            out.states.push(s);
            out.derivs.push(vector_field(&s));
        }
    }
    out.events.retain(|h| h.t <= t_end);
    if traj.t_end() > t_end {
        out.terminated_by = None;
    }
    out.max_drift = out.states.iter().map(|s| (first_integral(s) - out.c0).abs()).fold(0.0, f64::max);
    out
}

/// Finds the slope p whose bounded orbit has cone angle 1 + `beta_target`.
pub fn solve_for_beta(beta_target: f64, template: &ShootingConfig) -> Result<FootballSolution, ShootingError> {
    let target = 1.0 + beta_target;
    if !(target > 0.0) || !target.is_finite() {
        return Err(ShootingError::InvalidTarget { alpha: target });
    }
    let alpha_at = |p: f64| -> Result<f64, ShootingError> {
        let cfg = ShootingConfig { p, ..template.clone() };
        let br = bracket_q0(&cfg)?;
        Ok(extract_alpha(p, br.mid()))
    };
    let (p_min, p_max) = (-64.0, -(2f64.powi(-10)));
    let mut a = -1.0;
    let mut fa = alpha_at(a)? - target;
    if fa == 0.0 {
        return find_q0(&ShootingConfig { p: a, ..template.clone() });
    }
    // walk away from the anchor until the residual changes sign
    let step = if fa > 0.0 { 0.5 } else { 2.0 };
    let (mut b, mut fb);
    loop {
        b = a * step;
        if b < p_min || b > p_max {
            return Err(ShootingError::NotBracketed { beta: beta_target });
        }
        fb = alpha_at(b)? - target;
        if fb == 0.0 || fb.signum() != fa.signum() {
            break;
        }
        a = b;
        fa = fb;
    }
    // Illinois regula falsi on p
    let mut side = 0i8;
    let mut p = b;
    let mut fp = fb;
    for _ in 0..200 {
        if fp.abs() <= 1e-13 * target || (b - a).abs() <= 1e-14 * a.abs().max(b.abs()) {
            break;
        }
        p = (a * fb - b * fa) / (fb - fa);
        fp = alpha_at(p)? - target;
        if fp.signum() == fb.signum() {
            b = p;
            fb = fp;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = b;
            fa = fb;
            b = p;
            fb = fp;
            side = 1;
        }
    }
    find_q0(&ShootingConfig { p, ..template.clone() })
}

/// Curvature totals and planar profile of a bounded orbit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    /// Orbit on [-t_end, t_end], mirrored through t -> -t.
    #[serde(skip)]
    pub two_sided: Trajectory,
    /// ∫x4 dt over the sampled span, by Simpson's rule on the dense output.
    pub integral_sampled: f64,
    /// Estimated ∫x4 beyond ±t_end.
    pub integral_tail: f64,
    pub integral_x4: f64,
    pub total_curvature_pi2: f64,
    /// 8(2 + 2β) in units of π².
    pub gbc_expected_pi2: f64,
    pub gbc_residual_pi2: f64,
    pub gbc_relative: f64,
    pub x3_minus: f64,
    pub x3_plus: f64,
    #[serde(skip)]
    pub u_profile: RadialSamples,
}

/// Reflects a one-sided orbit starting at t = 0 into a two-sided one.
pub fn mirror(traj: &Trajectory) -> Trajectory {
    let mut out = traj.clone();
    let n = traj.len();
    let mut times = Vec::with_capacity(2 * n);
    let mut states = Vec::with_capacity(2 * n);
    for i in (1..n).rev() {
        times.push(-traj.times[i]);
        states.push(traj.states[i].reflected());
    }
    times.extend_from_slice(&traj.times);
    states.extend_from_slice(&traj.states);
    out.derivs = states.iter().map(vector_field).collect();
    out.times = times;
    out.states = states;
    out.events.clear();
    out.max_drift = out.states.iter().map(|s| (first_integral(s) - out.c0).abs()).fold(0.0, f64::max);
    out
}

/// Composite Simpson rule for ∫x4 dt using Hermite midpoints on each step.
pub fn integrate_x4(traj: &Trajectory) -> f64 {
    let mut total = 0.0;
    for i in 0..traj.len().saturating_sub(1) {
        let (a, b) = (traj.times[i], traj.times[i + 1]);
        let mid = traj.sample(0.5 * (a + b)).expect("inside span");
        total += (b - a) / 6.0 * (traj.states[i].x4() + 4.0 * mid.x4() + traj.states[i + 1].x4());
    }
    total
}

pub fn reconstruct(sol: &FootballSolution) -> MetricReport {
    let two = mirror(&sol.trajectory);
    let integral_sampled = integrate_x4(&two);
    // near the fixed point line x4' ≈ 4·x1·x4 with x1 ≈ -α
    let tail_one = |s: &FootballState| if s.x1 < 0.0 { s.x4() / (-4.0 * s.x1) } else { 0.0 };
    let integral_tail = tail_one(two.last()) + tail_one(&two.first().reflected());
    let integral_x4 = integral_sampled + integral_tail;
    let total = 2.0 * integral_x4;
    let expected = 16.0 * sol.alpha;
    let v = Sampled {
        x: two.times.clone(),
        y: two.states.iter().map(FootballState::v).collect(),
    };
    MetricReport {
        integral_sampled,
        integral_tail,
        integral_x4,
        total_curvature_pi2: total,
        gbc_expected_pi2: expected,
        gbc_residual_pi2: (total - expected).abs(),
        gbc_relative: (total - expected).abs() / expected,
        x3_minus: two.first().x3,
        x3_plus: two.last().x3,
        u_profile: cylinder_to_plane(&v),
        two_sided: two,
    }
}

/// Integrates the even/odd gauge representative through `t_max` with the shooting tolerances.
pub fn gauge_orbit(p: f64, q: f64, cfg: &ShootingConfig) -> Result<Trajectory, ShootingError> {
    integrate_with(FootballState::initial(p, q), (0.0, cfg.t_max), &cfg.integrate_options(), &[])
        .map_err(|source| ShootingError::Integration { q, source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_examples() {
        let cfg = ShootingConfig::new(-1.0);
        assert!(matches!(membership(-1.0, 4.0, &cfg).unwrap(), MembershipResult::InQ { .. }));
        assert!(matches!(membership(-1.0, 7.0, &cfg).unwrap(), MembershipResult::Escaped { .. }));
        assert!(matches!(membership(-1.0, 6.0, &cfg).unwrap(), MembershipResult::Undecided { .. }));
    }

    #[test]
    fn extract_alpha_examples() {
        assert_eq!(extract_alpha(-1.0, 6.0), 1.0);
        let a = extract_alpha(-0.5, 2.6);
        assert!((a - ((0.5 + 2.6) / 8.0f64).sqrt()).abs() < 1e-15);
        for &(p, q) in &[(-0.3, 1.7), (-2.0, 14.4), (-5.0, 60.0)] {
            let a = extract_alpha(p, q);
            assert!((8.0 * a * a - 2.0 * p * p - q).abs() < 1e-12 * q);
        }
    }

    #[test]
    fn round_sphere_solution() {
        let sol = find_q0(&ShootingConfig::new(-1.0)).unwrap();
        assert!((sol.q0 - 6.0).abs() <= sol.q0_err, "{} +- {}", sol.q0, sol.q0_err);
        assert!(sol.q0_err < 1e-6);
        assert!((sol.alpha - 1.0).abs() < 1e-7);
        assert!((sol.c - 2.0 - sol.q0).abs() < 1e-12);
        assert!(sol.alpha_residual < 1e-4, "{sol:?}");
        let rep = reconstruct(&sol);
        assert!((rep.integral_x4 - 8.0).abs() < 1e-6, "{}", rep.integral_x4);
    }

    #[test]
    fn invalid_inputs() {
        assert!(ShootingConfig::new(1.0).validate().is_err());
        assert!(matches!(
            solve_for_beta(-1.0, &ShootingConfig::new(-1.0)),
            Err(ShootingError::InvalidTarget { .. })
        ));
        assert!(membership(-1.0, -2.0, &ShootingConfig::new(-1.0)).is_err());
    }
}
