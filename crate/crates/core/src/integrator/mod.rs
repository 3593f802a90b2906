//! Adaptive integration of the pole system with boundary-crossing events.
//!
//! Between events every pole keeps the seabed formula of the region it
//! started the segment in, so each segment is a smooth ODE. Crossings are
//! detected on the continuous extension of each accepted step, located by
//! bisection and applied by switching the crossing pole's region.

mod stepper;

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{kernel, DEFAULT_COLLISION_EPS};
use crate::error::{Error, Result};
use crate::seabed::{RegionId, Seabed};
use crate::types::{
    is_finite, validate_poles, ComplexNumber, Event, EventKind, Pole, StrengthSpec, SystemState,
    Trajectory,
};
use stepper::{dopri_step, rk4_step, Dense, StepResult, VectorField};

type C = ComplexNumber;

/// Terminate as a Zeno trap once more than `max_events` crossings fall
/// within any window of length `per_time`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZenoWindow {
    pub max_events: usize,
    pub per_time: f64,
}

impl Default for ZenoWindow {
    fn default() -> Self {
        Self {
            max_events: 64,
            per_time: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Method {
    /// Dormand–Prince 5(4) with adaptive steps.
    Dopri5,
    /// Classical Runge–Kutta with a fixed step.
    Rk4 { step: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub collision_eps: f64,
    pub event_tol: f64,
    pub zeno_window: ZenoWindow,
    pub t_end: f64,
    pub sample_interval: f64,
    pub method: Method,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-11,
            max_step: 0.1,
            collision_eps: DEFAULT_COLLISION_EPS,
            event_tol: 1e-12,
            zeno_window: ZenoWindow::default(),
            t_end: 1.0,
            sample_interval: 0.01,
            method: Method::Dopri5,
            max_steps: 10_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.t_end = t_end;
        self
    }

    pub fn with_sample_interval(mut self, dt: f64) -> Self {
        self.sample_interval = dt;
        self
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("max_step", self.max_step),
            ("collision_eps", self.collision_eps),
            ("event_tol", self.event_tol),
            ("sample_interval", self.sample_interval),
            ("zeno_window.per_time", self.zeno_window.per_time),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !self.t_end.is_finite() {
            return Err(Error::InvalidInput("t_end must be finite".into()));
        }
        if self.zeno_window.max_events < 2 {
            return Err(Error::InvalidInput(
                "zeno_window.max_events must be at least 2".into(),
            ));
        }
        if let Method::Rk4 { step } = self.method {
            if !(step.is_finite() && step > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "rk4 step must be positive, got {step}"
                )));
            }
        }
        Ok(())
    }
}

enum Strengths {
    Simple(Vec<C>),
    /// Multipole coefficients on a constant seabed of the given value.
    General(Vec<StrengthSpec>, f64),
}

struct PoleSystem<'a> {
    strengths: Strengths,
    seabed: &'a Seabed,
    regions: Vec<RegionId>,
    eps: f64,
    factors: Vec<f64>,
}

impl<'a> PoleSystem<'a> {
    fn new(poles: &[Pole], seabed: &'a Seabed, positions: &[C], eps: f64) -> Result<Self> {
        let simple: Option<Vec<C>> = poles.iter().map(|p| p.strength.simple_strength()).collect();
        let strengths = match simple {
            Some(mus) => Strengths::Simple(mus),
            None => match seabed {
                Seabed::Constant { value } => {
                    Strengths::General(poles.iter().map(|p| p.strength.clone()).collect(), *value)
                }
                _ => {
                    return Err(Error::UnsupportedStrength(
                        "multipole strengths require a constant seabed".into(),
                    ))
                }
            },
        };
        Ok(Self {
            strengths,
            seabed,
            regions: positions.iter().map(|&z| seabed.region_of(z)).collect(),
            eps,
            factors: vec![0.0; poles.len()],
        })
    }
}

impl VectorField for PoleSystem<'_> {
    fn eval(&mut self, y: &[C], out: &mut [C]) -> std::result::Result<(), (usize, usize, f64)> {
        match &self.strengths {
            Strengths::Simple(mus) => {
                for (f, (&r, &z)) in self.factors.iter_mut().zip(self.regions.iter().zip(y)) {
                    *f = self.seabed.region_value(r, z);
                }
                kernel(y, mus, &self.factors, self.eps, out)
            }
            Strengths::General(specs, scale) => {
                for v in out.iter_mut() {
                    *v = C::new(0.0, 0.0);
                }
                for i in 0..y.len() {
                    for j in i + 1..y.len() {
                        let w = y[i] - y[j];
                        let d = w.norm();
                        if !(d >= self.eps) {
                            return Err((i, j, d));
                        }
                        for (n, mu) in specs[j].iter() {
                            out[i] += (mu * w.powi(n)).conj() * *scale;
                        }
                        for (n, mu) in specs[i].iter() {
                            out[j] += (mu * (-w).powi(n)).conj() * *scale;
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

/// A located boundary crossing.
#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    pub time: f64,
    /// Indices of the poles whose region differs at `time`.
    pub poles: Vec<usize>,
    pub state: SystemState,
}

/// Bisection on an interpolant between `t0` (regions `regions`) and `t1`
/// (some watched pole in another region). Stops once the bracket is shorter
/// than `tol` in time and every watched pole moves less than `tol` across it.
fn bisect_crossing(
    interp: &mut dyn FnMut(f64, &mut Vec<C>),
    t0: f64,
    t1: f64,
    regions: &[RegionId],
    watched: &[usize],
    seabed: &Seabed,
    tol: f64,
) -> Crossing {
    let changed = |y: &[C]| -> Vec<usize> {
        watched
            .iter()
            .copied()
            .filter(|&p| seabed.region_of(y[p]) != regions[p])
            .collect()
    };
    let (mut lo, mut hi) = (t0, t1);
    let (mut ylo, mut yhi) = (Vec::new(), Vec::new());
    interp(lo, &mut ylo);
    interp(hi, &mut yhi);
    let mut ymid = Vec::new();
    for _ in 0..200 {
        let moved = watched
            .iter()
            .map(|&p| (yhi[p] - ylo[p]).norm())
            .fold(0.0, f64::max);
        if hi - lo <= tol && moved <= tol {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        interp(mid, &mut ymid);
        if changed(&ymid).is_empty() {
            lo = mid;
            std::mem::swap(&mut ylo, &mut ymid);
        } else {
            hi = mid;
            std::mem::swap(&mut yhi, &mut ymid);
        }
    }
    Crossing {
        time: hi,
        poles: changed(&yhi),
        state: SystemState::new(hi, yhi),
    }
}

/// Locates the first boundary crossing between two states, interpolating
/// positions linearly in time.
///
/// With `pole_label` only that pole is watched; otherwise the earliest
/// crossing of any pole is returned. The returned state lies within
/// `event_tol` of the locus.
pub fn locate_crossing(
    before: &SystemState,
    after: &SystemState,
    poles: &[Pole],
    pole_label: Option<&str>,
    seabed: &Seabed,
    event_tol: f64,
) -> Result<Crossing> {
    validate_poles(poles)?;
    for s in [before, after] {
        if s.len() != poles.len() {
            return Err(Error::LengthMismatch {
                positions: s.len(),
                poles: poles.len(),
            });
        }
        if s.positions.iter().any(|&z| !is_finite(z)) || !s.time.is_finite() {
            return Err(Error::NonFinite("state"));
        }
    }
    if !(event_tol > 0.0) {
        return Err(Error::InvalidInput("event_tol must be positive".into()));
    }
    if !(after.time > before.time) {
        return Err(Error::InvalidInput(
            "states must be in increasing time order".into(),
        ));
    }
    let watched: Vec<usize> = match pole_label {
        Some(label) => vec![poles
            .iter()
            .position(|p| p.label == label)
            .ok_or_else(|| Error::InvalidInput(format!("unknown pole label {label:?}")))?],
        None => (0..poles.len()).collect(),
    };
    let regions: Vec<RegionId> = before
        .positions
        .iter()
        .map(|&z| seabed.region_of(z))
        .collect();
    if watched
        .iter()
        .all(|&p| seabed.region_of(after.positions[p]) == regions[p])
    {
        return Err(Error::BracketLost(match pole_label {
            Some(l) => format!("pole {l:?} is in the same region at both ends"),
            None => "no pole changes region between the states".into(),
        }));
    }
    let (t0, t1) = (before.time, after.time);
    let mut interp = |t: f64, out: &mut Vec<C>| {
        let s = (t - t0) / (t1 - t0);
        out.clear();
        out.extend(
            before
                .positions
                .iter()
                .zip(&after.positions)
                .map(|(a, b)| a + (b - a) * s),
        );
    };
    Ok(bisect_crossing(
        &mut interp,
        t0,
        t1,
        &regions,
        &watched,
        seabed,
        event_tol,
    ))
}

fn initial_step(sys: &mut PoleSystem, y0: &[C], f0: &[C], cfg: &IntegratorConfig) -> f64 {
    let norm = |v: &[C]| {
        let s: f64 = v
            .iter()
            .zip(y0)
            .map(|(a, y)| {
                let sre = cfg.abs_tol + cfg.rel_tol * y.re.abs();
                let sim = cfg.abs_tol + cfg.rel_tol * y.im.abs();
                (a.re / sre).powi(2) + (a.im / sim).powi(2)
            })
            .sum();
        (s / (2 * v.len()).max(1) as f64).sqrt()
    };
    let d0 = norm(y0);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(cfg.max_step);
    let y1: Vec<C> = y0.iter().zip(f0).map(|(y, f)| y + f * h0).collect();
    let mut f1 = vec![C::new(0.0, 0.0); y0.len()];
    if sys.eval(&y1, &mut f1).is_err() {
        return h0 * 1e-3;
    }
    let diff: Vec<C> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(cfg.max_step)
}

fn labels(poles: &[Pole]) -> Vec<String> {
    poles.iter().map(|p| p.label.clone()).collect()
}

const THETA_PROBES: usize = 8;
const SAFETY: f64 = 0.9;

struct Run<'a, 'b> {
    cfg: &'b IntegratorConfig,
    poles: &'b [Pole],
    sys: PoleSystem<'a>,
    traj: Trajectory,
    t0: f64,
    next_sample: u64,
    recent: VecDeque<f64>,
}

impl Run<'_, '_> {
    fn grid_time(&self, k: u64) -> f64 {
        self.t0 + k as f64 * self.cfg.sample_interval
    }

    /// Emits grid samples in `(t, upto)` (`upto` included when `inclusive`).
    fn emit_samples(&mut self, t: f64, h: f64, dense: &Dense, upto: f64, inclusive: bool) {
        let mut buf = Vec::new();
        loop {
            let tg = self.grid_time(self.next_sample);
            let within = if inclusive { tg <= upto } else { tg < upto };
            let near_end = self.cfg.t_end - tg < 1e-9 * self.cfg.sample_interval;
            if !within || near_end {
                break;
            }
            if tg > t {
                dense.eval(((tg - t) / h).clamp(0.0, 1.0), &mut buf);
                self.traj.push_sample(SystemState::new(tg, buf.clone()));
            }
            self.next_sample += 1;
        }
    }

    fn terminal(
        &mut self,
        kind: EventKind,
        time: f64,
        pole: Option<usize>,
        location: C,
        detail: String,
    ) {
        self.traj.events.push(Event {
            kind,
            time,
            pole: pole.map(|p| self.poles[p].label.clone()),
            location,
            detail: Some(detail),
        });
    }

    /// Records `count` crossings at `t`; true when the Zeno window overflows.
    fn zeno(&mut self, t: f64, count: usize) -> bool {
        for _ in 0..count {
            self.recent.push_back(t);
        }
        let window = self.cfg.zeno_window;
        while let Some(&front) = self.recent.front() {
            if t - front > window.per_time {
                self.recent.pop_front();
            } else {
                break;
            }
        }
        self.recent.len() > window.max_events
    }

    fn collision_at(&mut self, t: f64, y: &[C], pair: (usize, usize), separation: f64) {
        let (i, j) = pair;
        let detail = format!(
            "poles {} and {} at separation {:e}",
            self.poles[i].label, self.poles[j].label, separation
        );
        self.terminal(
            EventKind::Collision,
            t,
            Some(i),
            (y[i] + y[j]) * 0.5,
            detail,
        );
    }
}

/// Nearest pair and the time it would take to close at the current rate.
fn closing_time(y: &[C], f: &[C]) -> Option<((usize, usize), f64, f64)> {
    let mut best: Option<((usize, usize), f64, f64)> = None;
    for i in 0..y.len() {
        for j in i + 1..y.len() {
            let d = (y[i] - y[j]).norm();
            let rate = (f[i] - f[j]).norm();
            let tau = if rate > 0.0 { d / rate } else { f64::INFINITY };
            if best.is_none_or(|(_, _, b)| tau < b) {
                best = Some(((i, j), d, tau));
            }
        }
    }
    best
}

/// Integrates the pole system from `initial` to `config.t_end`.
///
/// Samples are taken every `sample_interval` from the initial time, at every
/// event instant, and at the final time. The run ends with a terminal event:
/// `horizon` on reaching `t_end`, or `collision`, `zeno-trap` or `failure`.
pub fn integrate(
    initial: &SystemState,
    poles: &[Pole],
    seabed: &Seabed,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    config.validate()?;
    validate_poles(poles)?;
    seabed.validate()?;
    if !initial.time.is_finite() {
        return Err(Error::NonFinite("initial time"));
    }
    if initial.len() != poles.len() {
        return Err(Error::LengthMismatch {
            positions: initial.len(),
            poles: poles.len(),
        });
    }
    if initial.positions.iter().any(|&z| !is_finite(z)) {
        return Err(Error::NonFinite("initial position"));
    }
    initial.check_separated(poles, config.collision_eps)?;
    if config.t_end < initial.time {
        return Err(Error::InvalidInput(
            "t_end precedes the initial time; reverse time by negating the seabed".into(),
        ));
    }

    let sys = PoleSystem::new(poles, seabed, &initial.positions, config.collision_eps)?;
    let mut run = Run {
        cfg: config,
        poles,
        sys,
        traj: Trajectory::new(labels(poles)),
        t0: initial.time,
        next_sample: 1,
        recent: VecDeque::new(),
    };
    run.traj.push_sample(initial.clone());

    let n = poles.len();
    let t_end = config.t_end;
    let mut t = initial.time;
    let mut y = initial.positions.clone();
    let mut f = vec![C::new(0.0, 0.0); n];
    if let Err((i, j, d)) = run.sys.eval(&y, &mut f) {
        run.collision_at(t, &y, (i, j), d);
        return Ok(run.traj);
    }

    let fixed = match config.method {
        Method::Rk4 { step } => Some(step),
        Method::Dopri5 => None,
    };
    let mut h = match fixed {
        Some(step) => step,
        None if n < 2 => config.max_step,
        None => initial_step(&mut run.sys, &y, &f, config),
    };
    let mut facold = 1e-4_f64;
    let piecewise = !seabed.is_smooth();
    let all: Vec<usize> = (0..n).collect();
    let mut steps = 0usize;
    let mut probe = Vec::with_capacity(n);

    loop {
        if t >= t_end {
            run.traj.push_sample(SystemState::new(t, y.clone()));
            let loc = y.first().copied().unwrap_or_default();
            run.terminal(EventKind::Horizon, t, None, loc, "reached t_end".into());
            break;
        }
        steps += 1;
        if steps > config.max_steps {
            run.traj.push_sample(SystemState::new(t, y.clone()));
            run.terminal(
                EventKind::Failure,
                t,
                None,
                y[0],
                "step budget exhausted".into(),
            );
            break;
        }
        let h_min = 16.0 * f64::EPSILON * t.abs().max(1.0);
        let mut h_try = h.min(config.max_step.max(fixed.unwrap_or(0.0)));
        let last_step = t + 1.01 * h_try >= t_end;
        if last_step {
            h_try = t_end - t;
        }
        let result = match fixed {
            Some(_) => rk4_step(&mut run.sys, &y, &f, h_try),
            None => dopri_step(&mut run.sys, &y, &f, h_try, config.rel_tol, config.abs_tol),
        };
        let (y1, f1, err, dense) = match result {
            StepResult::Accepted { y1, f1, err, dense } => (y1, f1, err, dense),
            StepResult::Rejected { err } => {
                h = h_try / (err.powf(0.2) / SAFETY).clamp(1.0 / SAFETY, 5.0);
                if h < h_min {
                    run.traj.push_sample(SystemState::new(t, y.clone()));
                    match closing_time(&y, &f) {
                        Some((pair, d, tau)) if tau < 1e3 * h_min => {
                            run.collision_at(t, &y, pair, d)
                        }
                        _ => run.terminal(
                            EventKind::Failure,
                            t,
                            None,
                            y[0],
                            "step size underflow".into(),
                        ),
                    }
                    break;
                }
                continue;
            }
            StepResult::Collision { pair, separation } => {
                h = 0.25 * h_try;
                if h < h_min {
                    run.traj.push_sample(SystemState::new(t, y.clone()));
                    run.collision_at(t, &y, pair, separation);
                    break;
                }
                continue;
            }
        };

        if piecewise {
            let regions = &run.sys.regions;
            let first_changed = (1..=THETA_PROBES).find(|&k| {
                if k == THETA_PROBES {
                    probe.clear();
                    probe.extend_from_slice(&y1);
                } else {
                    dense.eval(k as f64 / THETA_PROBES as f64, &mut probe);
                }
                probe
                    .iter()
                    .zip(regions)
                    .any(|(&z, &r)| seabed.region_of(z) != r)
            });
            if let Some(k) = first_changed {
                let lo = t + h_try * (k - 1) as f64 / THETA_PROBES as f64;
                let hi = if k == THETA_PROBES {
                    t + h_try
                } else {
                    t + h_try * k as f64 / THETA_PROBES as f64
                };
                let mut interp = |tt: f64, out: &mut Vec<C>| {
                    if tt >= t + h_try {
                        out.clear();
                        out.extend_from_slice(&y1);
                    } else {
                        dense.eval((tt - t) / h_try, out);
                    }
                };
                let crossing =
                    bisect_crossing(&mut interp, lo, hi, regions, &all, seabed, config.event_tol);
                let tc = crossing.time;
                let mut yc = crossing.state.positions;
                // re-step exactly to the event for a state at full order
                let restep = match fixed {
                    Some(_) => rk4_step(&mut run.sys, &y, &f, tc - t),
                    None => {
                        dopri_step(&mut run.sys, &y, &f, tc - t, config.rel_tol, config.abs_tol)
                    }
                };
                if let StepResult::Accepted { y1: yr, .. } = restep {
                    if yr
                        .iter()
                        .zip(&yc)
                        .all(|(a, b)| seabed.region_of(*a) == seabed.region_of(*b))
                    {
                        yc = yr;
                    }
                }
                run.emit_samples(t, h_try, &dense, tc, false);
                let old = run.sys.regions.clone();
                let crossed: Vec<usize> = (0..n)
                    .filter(|&p| seabed.region_of(yc[p]) != old[p])
                    .collect();
                for &p in &crossed {
                    let region = seabed.region_of(yc[p]);
                    run.sys.regions[p] = region;
                    run.traj.events.push(Event {
                        kind: EventKind::BoundaryCrossing,
                        time: tc,
                        pole: Some(poles[p].label.clone()),
                        location: yc[p],
                        detail: Some(format!("region {} -> {}", old[p], region)),
                    });
                }
                run.traj.push_sample(SystemState::new(tc, yc.clone()));
                t = tc;
                y = yc;
                if let Err((i, j, d)) = run.sys.eval(&y, &mut f) {
                    run.collision_at(t, &y, (i, j), d);
                    break;
                }
                if let Some(&p) = crossed.first() {
                    if run.zeno(t, crossed.len()) {
                        let detail = format!(
                            "more than {} crossings within {:e}",
                            config.zeno_window.max_events, config.zeno_window.per_time
                        );
                        run.terminal(EventKind::ZenoTrap, t, Some(p), y[p], detail);
                        break;
                    }
                }
                h = match fixed {
                    Some(step) => step,
                    None => h_try.max(h_min * 4.0),
                };
                continue;
            }
        }

        run.emit_samples(t, h_try, &dense, t + h_try, true);
        t = if last_step { t_end } else { t + h_try };
        y = y1;
        f = f1;
        h = match fixed {
            Some(step) => step,
            None => {
                let fac11 = err.powf(0.17);
                let fac = (fac11 / facold.powf(0.04) / SAFETY).clamp(0.2, 10.0);
                facold = err.max(1e-4);
                h_try / fac
            }
        };
    }
    Ok(run.traj)
}

/// Integrates an ensemble of initial states sharing poles, seabed and config.
///
/// Members run in parallel and independently; results keep the input order.
pub fn integrate_ensemble(
    initials: &[SystemState],
    poles: &[Pole],
    seabed: &Seabed,
    config: &IntegratorConfig,
) -> Vec<Result<Trajectory>> {
    initials
        .par_iter()
        .map(|s| integrate(s, poles, seabed, config))
        .collect()
}
