use std::fmt;
use std::io::{self, Write};
use std::sync::Arc;

use super::methods::{method, DEFAULT_METHOD};
use super::solver::{drive, hermite, Control, DriveOptions, Step};
use super::{first_integral, rhs, vector_field, FootballState, IntegrationError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Fires when g passes from negative to non-negative.
    Rising,
    /// Fires when g passes from non-negative to negative.
    Falling,
    Either,
}

/// A named event function g(state); the event fires where g changes sign.
#[derive(Clone)]
pub struct Event {
    pub name: String,
    pub direction: Direction,
    pub terminal: bool,
    g: Arc<dyn Fn(&FootballState) -> f64 + Send + Sync>,
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Event")
            .field("name", &self.name)
            .field("direction", &self.direction)
            .field("terminal", &self.terminal)
            .finish()
    }
}

impl Event {
    pub fn new(
        name: impl Into<String>,
        direction: Direction,
        terminal: bool,
        g: impl Fn(&FootballState) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), direction, terminal, g: Arc::new(g) }
    }

    /// Terminal event firing when `pred` becomes true.
    pub fn predicate(name: impl Into<String>, pred: impl Fn(&FootballState) -> bool + Send + Sync + 'static) -> Self {
        Self::new(name, Direction::Rising, true, move |s| if pred(s) { 1.0 } else { -1.0 })
    }

    /// x2 reaches zero from below.
    pub fn x2_nonnegative() -> Self {
        Self::new("x2>=0", Direction::Rising, true, |s| s.x2)
    }

    /// x2 < 0, x2' < 0 and x1 < 0 simultaneously.
    pub fn trapped() -> Self {
        Self::predicate("trapped", |s| s.x2 < 0.0 && s.x2_prime() < 0.0 && s.x1 < 0.0)
    }

    /// Terminal crossing of x1 through `level`.
    pub fn x1_level(level: f64, direction: Direction) -> Self {
        Self::new(format!("x1={level}"), direction, true, move |s| s.x1 - level)
    }

    /// Stops once |x1|, |x2|, |x3| or x4 exceed `bound`.
    pub fn magnitude_guard(bound: f64) -> Self {
        Self::predicate("guard", move |s| {
            s.x1.abs() > bound || s.x2.abs() > bound || s.x3.abs() > bound || s.w4 > bound.ln()
        })
    }

    pub fn value(&self, s: &FootballState) -> f64 {
        (self.g)(s)
    }

    fn crossed(&self, g0: f64, g1: f64) -> bool {
        let (a, b) = (g0 >= 0.0, g1 >= 0.0);
        match self.direction {
            Direction::Rising => !a && b,
            Direction::Falling => a && !b,
            Direction::Either => a != b,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventHit {
    pub name: String,
    pub t: f64,
    pub state: FootballState,
}

/// Accepted samples of an integration, in ascending time.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<FootballState>,
    pub derivs: Vec<FootballState>,
    /// First integral at the initial state.
    pub c0: f64,
    /// Largest deviation of the first integral from `c0` over the samples.
    pub max_drift: f64,
    pub events: Vec<EventHit>,
    /// Name of the terminal event that ended the run, if any.
    pub terminated_by: Option<String>,
}

impl Trajectory {
    pub fn single(t: f64, s: FootballState) -> Self {
        Self {
            times: vec![t],
            states: vec![s],
            derivs: vec![vector_field(&s)],
            c0: first_integral(&s),
            max_drift: 0.0,
            events: Vec::new(),
            terminated_by: None,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// No terminal event fired before the end of the span.
    pub fn no_event(&self) -> bool {
        self.terminated_by.is_none()
    }

    pub fn t_start(&self) -> f64 {
        self.times[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("trajectory has at least one sample")
    }

    pub fn first(&self) -> &FootballState {
        &self.states[0]
    }

    pub fn last(&self) -> &FootballState {
        self.states.last().expect("trajectory has at least one sample")
    }

    /// Dense output at `t` by cubic Hermite interpolation; `None` outside the samples.
    pub fn sample(&self, t: f64) -> Option<FootballState> {
        let n = self.times.len();
        if n == 0 || t < self.times[0] || t > self.times[n - 1] {
            return None;
        }
        if n == 1 {
            return Some(self.states[0]);
        }
        let i = self.times.partition_point(|&x| x <= t).clamp(1, n - 1) - 1;
        let mut out = [0.0; 4];
        hermite(
            self.times[i],
            self.times[i + 1],
            &self.states[i].to_array(),
            &self.states[i + 1].to_array(),
            &self.derivs[i].to_array(),
            &self.derivs[i + 1].to_array(),
            t,
            &mut out,
        );
        Some(FootballState::from_slice(&out))
    }

    /// Uniform dense-output grid with spacing at most `dt`, endpoints included.
    pub fn dense(&self, dt: f64) -> Vec<(f64, FootballState)> {
        let (a, b) = (self.t_start(), self.t_end());
        let n = (((b - a) / dt).ceil() as usize).max(1);
        (0..=n)
            .map(|i| {
                let t = if i == n { b } else { a + (b - a) * i as f64 / n as f64 };
                (t, self.sample(t).expect("inside span"))
            })
            .collect()
    }

    /// Writes `t,x1,x2,x3,x4,v,first_integral` rows, on the accepted samples or on a uniform grid.
    pub fn write_csv<W: Write>(&self, mut w: W, dt: Option<f64>) -> io::Result<()> {
        writeln!(w, "t,x1,x2,x3,x4,v,first_integral")?;
        let rows: Vec<(f64, FootballState)> = match dt {
            Some(dt) => self.dense(dt),
            None => self.times.iter().copied().zip(self.states.iter().copied()).collect(),
        };
        for (t, s) in rows {
            writeln!(
                w,
                "{t},{},{},{},{},{},{}",
                s.x1,
                s.x2,
                s.x3,
                s.x4(),
                s.v(),
                first_integral(&s)
            )?;
        }
        Ok(())
    }

    fn recompute_drift(&mut self) {
        let c0 = self.c0;
        self.max_drift = self.states.iter().map(|s| (first_integral(s) - c0).abs()).fold(0.0, f64::max);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrateOptions {
    pub tol: f64,
    pub method: String,
    pub max_steps: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self { tol: super::DEFAULT_TOL, method: DEFAULT_METHOD.to_string(), max_steps: 2_000_000 }
    }
}

impl IntegrateOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// An integration failure together with everything accepted before it.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryError {
    pub error: IntegrationError,
    pub partial: Box<Trajectory>,
}

impl fmt::Display for TrajectoryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (after {} accepted samples)", self.error, self.partial.len())
    }
}

impl std::error::Error for TrajectoryError {}

/// Integrates with the default method.
pub fn integrate(
    s0: FootballState,
    span: (f64, f64),
    tol: f64,
    events: &[Event],
) -> Result<Trajectory, TrajectoryError> {
    integrate_with(s0, span, &IntegrateOptions::with_tol(tol), events)
}

/// Time at which `ev` switches inside a step, by bisection on the dense output.
fn locate(ev: &Event, step: &Step<'_>, g0: f64) -> (f64, FootballState) {
    let mut lo = step.t0;
    let mut hi = step.t1;
    let lo_side = g0 >= 0.0;
    let mut buf = [0.0; 4];
    let mut hi_state = FootballState::from_slice(step.y1);
    while (hi - lo).abs() > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        step.interpolate(mid, &mut buf);
        let s = FootballState::from_slice(&buf);
        if (ev.value(&s) >= 0.0) == lo_side {
            lo = mid;
        } else {
            hi = mid;
            hi_state = s;
        }
    }
    (hi, hi_state)
}

pub fn integrate_with(
    s0: FootballState,
    span: (f64, f64),
    opts: &IntegrateOptions,
    events: &[Event],
) -> Result<Trajectory, TrajectoryError> {
    let (t0, t1) = span;
    let mut traj = Trajectory::single(t0, s0);
    let fail = |error, partial| TrajectoryError { error, partial: Box::new(partial) };
    if !(opts.tol > 0.0) {
        return Err(fail(IntegrationError::InvalidTolerance(opts.tol), traj));
    }
    let m = match method(&opts.method) {
        Some(m) => m,
        None => return Err(fail(IntegrationError::UnknownMethod(opts.method.clone()), traj)),
    };
    let mut g_prev: Vec<f64> = events.iter().map(|e| e.value(&s0)).collect();
    let mut f = |_t: f64, y: &[f64], out: &mut [f64]| rhs(y, out);
    let mut dopts = DriveOptions::new(opts.tol);
    dopts.max_steps = opts.max_steps;

    let result = drive(m.as_ref(), &mut f, t0, &s0.to_array(), t1, &dopts, |step| {
        let s1 = FootballState::from_slice(step.y1);
        let mut first: Option<(f64, FootballState, usize)> = None;
        for (k, ev) in events.iter().enumerate() {
            let g1 = ev.value(&s1);
            if ev.crossed(g_prev[k], g1) {
                let (te, se) = locate(ev, step, g_prev[k]);
                traj.events.push(EventHit { name: ev.name.clone(), t: te, state: se });
                let earlier = first.map_or(true, |(t, _, _)| (te - t) * (t1 - t0) < 0.0);
                if ev.terminal && earlier {
                    first = Some((te, se, k));
                }
            }
            g_prev[k] = g1;
        }
        match first {
            Some((te, se, k)) => {
                traj.times.push(te);
                traj.states.push(se);
                traj.derivs.push(vector_field(&se));
                traj.terminated_by = Some(events[k].name.clone());
                // drop hits recorded after the terminal time
                traj.events.retain(|h| (h.t - te) * (t1 - t0) <= 0.0);
                Control::Stop
            }
            None => {
                traj.times.push(step.t1);
                traj.states.push(s1);
                traj.derivs.push(FootballState::from_slice(step.f1));
                Control::Continue
            }
        }
    });

    if t1 < t0 {
        traj.times.reverse();
        traj.states.reverse();
        traj.derivs.reverse();
    }
    traj.recompute_drift();
    match result {
        Ok(_) => Ok(traj),
        Err(e) => Err(fail(e, traj)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::round_sphere_state;

    #[test]
    fn zero_span_is_single_sample() {
        let s = FootballState::initial(-0.3, 2.0);
        let tr = integrate(s, (0.0, 0.0), 1e-10, &[]).unwrap();
        assert_eq!(tr.len(), 1);
        assert_eq!(tr.max_drift, 0.0);
        assert!(tr.no_event());
    }

    #[test]
    fn round_sphere_tracks_closed_form() {
        let tr = integrate(round_sphere_state(0.0), (0.0, 5.0), 1e-10, &[]).unwrap();
        for (t, s) in tr.times.iter().zip(&tr.states) {
            let e = round_sphere_state(*t);
            assert!((s.x1 - e.x1).abs() < 1e-6 && (s.x3 - e.x3).abs() < 1e-6, "t={t}");
        }
        assert!(tr.max_drift < 1e-8 * 9.0);
    }

    #[test]
    fn backward_run_is_ascending_and_symmetric() {
        let s0 = FootballState::initial(-1.0, 5.0);
        let fw = integrate(s0, (0.0, 2.0), 1e-10, &[]).unwrap();
        let bw = integrate(s0, (0.0, -2.0), 1e-10, &[]).unwrap();
        assert!(bw.times.windows(2).all(|w| w[1] > w[0]));
        let a = fw.last();
        let b = bw.first().reflected();
        assert!((a.x1 - b.x1).abs() < 1e-8 && (a.x3 - b.x3).abs() < 1e-8 && (a.w4 - b.w4).abs() < 1e-8);
    }

    #[test]
    fn trapped_event_fires_on_lower_seed() {
        let tr = integrate(FootballState::initial(-1.0, 4.0), (0.0, 30.0), 1e-10, &[Event::trapped()]).unwrap();
        assert_eq!(tr.terminated_by.as_deref(), Some("trapped"));
        let s = tr.last();
        assert!(s.x2 < 0.0 && s.x2_prime() <= 1e-9 && s.x1 < 0.0);
    }

    #[test]
    fn escape_event_located_precisely() {
        let tr = integrate(FootballState::initial(-1.0, 7.0), (0.0, 30.0), 1e-10, &[Event::x2_nonnegative()]).unwrap();
        assert_eq!(tr.terminated_by.as_deref(), Some("x2>=0"));
        assert!(tr.last().x2.abs() < 1e-9);
    }

    #[test]
    fn csv_header_and_rows() {
        let tr = integrate(round_sphere_state(0.0), (0.0, 1.0), 1e-8, &[]).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf, Some(0.25)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,x1,x2,x3,x4,v,first_integral");
        assert_eq!(lines.len(), 6);
    }
}
