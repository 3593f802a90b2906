//! Reusable simulation set-ups: pairs meeting a boundary, leapfrogging,
//! disk refraction, zigzag amplitudes and mirror caustics.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, BoundaryInteraction, RefractionOutcome};
use crate::error::{Error, Result};
use crate::integrator::{integrate, IntegratorConfig};
use crate::seabed::Seabed;
use crate::types::{ComplexNumber, EventKind, Pole, SystemState, Trajectory};

type C = ComplexNumber;

/// Labels of the two poles of a pair: `z` carries `−μ`, `w` carries `+μ`.
pub const PAIR_LABELS: [&str; 2] = ["z", "w"];

/// Wraps an angle to `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

/// Direction of travel of a small pair with axis angle `axis`, strength `μ`
/// and local seabed value `s`.
pub fn heading_of(axis: f64, mu: C, s: f64) -> f64 {
    wrap_angle(axis + (-mu.conj() * s).arg())
}

/// Axis angle `arg(w − z)` giving a small pair the heading `heading`.
pub fn axis_for_heading(heading: f64, mu: C, s: f64) -> f64 {
    wrap_angle(heading - (-mu.conj() * s).arg())
}

/// Pair `z`, `w = z + d e^{i axis}` with strengths `−μ`, `+μ`.
pub fn pair_with_axis(z: C, separation: f64, axis: f64, mu: C) -> Vec<Pole> {
    let w = z + C::from_polar(separation, axis);
    vec![
        Pole::simple(PAIR_LABELS[0], z, -mu),
        Pole::simple(PAIR_LABELS[1], w, mu),
    ]
}

/// Pair centered at `center` travelling in direction `heading` on `seabed`.
pub fn pair_with_heading(
    center: C,
    separation: f64,
    heading: f64,
    mu: C,
    seabed: &Seabed,
) -> Vec<Pole> {
    let s = seabed.eval(center);
    let axis = axis_for_heading(heading, mu, if s == 0.0 { 1.0 } else { s });
    pair_with_axis(
        center - C::from_polar(separation / 2.0, axis),
        separation,
        axis,
        mu,
    )
}

/// Axis angle of a two-pole state.
pub fn axis_angle(state: &SystemState) -> f64 {
    (state.positions[1] - state.positions[0]).arg()
}

/// Circular mean of the axis angle over the final 10% of the samples taken
/// after the last event (excluding the terminal one).
pub fn fitted_axis_angle(trajectory: &Trajectory) -> Option<f64> {
    let last_event = trajectory
        .events
        .iter()
        .filter(|e| !e.kind.is_terminal())
        .map(|e| e.time)
        .fold(f64::NEG_INFINITY, f64::max);
    let after: Vec<&SystemState> = trajectory
        .samples
        .iter()
        .filter(|s| s.time > last_event)
        .collect();
    if after.is_empty() || after[0].len() != 2 {
        return None;
    }
    let take = (after.len() / 10).max(1);
    let sum: C = after[after.len() - take..]
        .iter()
        .map(|s| C::from_polar(1.0, axis_angle(s)))
        .sum();
    Some(sum.arg())
}

/// Outcome classification of a simulated boundary encounter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimulatedSide {
    /// Both poles ended beyond the boundary.
    Transmitted,
    /// Both poles ended on the incident side.
    Returned,
    /// The run ended with the poles on different sides.
    Straddling,
    /// The run ended in a Zeno trap.
    Trapped,
}

#[derive(Debug, Clone)]
pub struct BoundaryRun {
    pub trajectory: Trajectory,
    pub side: SimulatedSide,
    /// Fitted final axis angle.
    pub theta2: Option<f64>,
    pub analytic: RefractionOutcome,
}

/// Simulates a pair meeting the step `Im z = 0`.
///
/// The pair starts below the step with axis angle `θ1`, the leading pole
/// `w` just under the line. With `mirror` the lower value is `−s1`.
pub fn run_boundary(
    interaction: &BoundaryInteraction,
    mirror: bool,
    separation: f64,
    cfg: &IntegratorConfig,
) -> Result<BoundaryRun> {
    let BoundaryInteraction { theta1, s1, s2, mu } = *interaction;
    let below = if mirror { -s1 } else { s1 };
    let seabed = Seabed::horizontal_step(0.0, below, s2);
    // with the opposite orientation the pair would move away from the step;
    // turning it round swaps the leading pole, which acts as reversing μ
    let turned = heading_of(theta1, mu, below).sin() < 0.0;
    let turn = if turned { PI } else { 0.0 };
    let law = BoundaryInteraction {
        mu: if turned { -mu } else { mu },
        ..*interaction
    };
    let analytic = if mirror {
        analytic::reflect(&law)?
    } else {
        analytic::snell(&law)?
    };
    let axis = theta1 + turn;
    let lead = C::new(0.0, -0.2 * separation);
    let z = if axis.sin() > 0.0 {
        lead - C::from_polar(separation, axis)
    } else {
        lead
    };
    let poles = pair_with_axis(z, separation, axis, mu);
    let speed = mu.norm() * s1.abs().min(s2.abs()) / separation;
    let t_end = 40.0 * separation / speed;
    let cfg = IntegratorConfig {
        t_end,
        sample_interval: t_end / 2000.0,
        ..cfg.clone()
    };
    let trajectory = integrate(&SystemState::from_poles(&poles), &poles, &seabed, &cfg)?;
    let last = trajectory.last().expect("trajectory has samples");
    let above = last.positions.iter().filter(|z| z.im >= 0.0).count();
    let side = if trajectory.terminal_event().map(|e| e.kind) == Some(EventKind::ZenoTrap) {
        SimulatedSide::Trapped
    } else {
        match above {
            2 => SimulatedSide::Transmitted,
            0 => SimulatedSide::Returned,
            _ => SimulatedSide::Straddling,
        }
    };
    Ok(BoundaryRun {
        theta2: fitted_axis_angle(&trajectory).map(|a| (a - turn).rem_euclid(2.0 * PI)),
        trajectory,
        side,
        analytic,
    })
}

#[derive(Debug, Clone)]
pub struct LeapfrogRun {
    pub trajectory: Trajectory,
    pub half_periods: usize,
    pub measured_half_period: f64,
    /// Mean midpoint displacement per half-period.
    pub advance: C,
    pub analytic: C,
}

fn midpoint(s: &SystemState) -> C {
    (s.positions[0] + s.positions[1]) * 0.5
}

/// Same-sign vortices `i S` at `Δz` and `0` over the step `Re z = 0`.
///
/// Half-periods are delimited by the clusters of crossings when the pair
/// lines up with the step; the advance is averaged over `half_periods`.
pub fn run_leapfrog(
    s1: f64,
    s2: f64,
    dz: C,
    half_periods: usize,
    cfg: &IntegratorConfig,
) -> Result<LeapfrogRun> {
    let analytic = analytic::leapfrog_advance(s1, s2, dz)?;
    if half_periods == 0 || dz.re != 0.0 || dz.im == 0.0 {
        return Err(Error::InvalidInput(
            "leapfrog needs Δz on the imaginary axis and at least one half-period".into(),
        ));
    }
    let i = C::new(0.0, 1.0);
    let poles = vec![
        Pole::simple("z", dz, i),
        Pole::simple("w", C::new(0.0, 0.0), i),
    ];
    let seabed = Seabed::vertical_step(0.0, s1, s2);
    let expected = PI * dz.norm_sqr() / (s1 + s2);
    let cfg = IntegratorConfig {
        t_end: (half_periods as f64 + 0.5) * expected,
        sample_interval: expected / 64.0,
        ..cfg.clone()
    };
    let trajectory = integrate(&SystemState::from_poles(&poles), &poles, &seabed, &cfg)?;
    let mut clusters: Vec<f64> = Vec::new();
    for e in trajectory.crossings() {
        if e.time < 1e-3 * expected {
            continue;
        }
        match clusters.last_mut() {
            Some(t) if e.time - *t < 1e-6 * expected => *t = e.time,
            _ => clusters.push(e.time),
        }
    }
    if clusters.len() < half_periods {
        return Err(Error::InvalidInput(format!(
            "observed {} half-periods, expected {half_periods}",
            clusters.len()
        )));
    }
    let at = |t: f64| {
        trajectory
            .samples
            .iter()
            .find(|s| s.time >= t)
            .map(midpoint)
            .expect("event instants are sampled")
    };
    let t_last = clusters[half_periods - 1];
    let advance = (at(t_last) - midpoint(&trajectory.samples[0])) / half_periods as f64;
    Ok(LeapfrogRun {
        measured_half_period: t_last / half_periods as f64,
        half_periods,
        advance,
        analytic,
        trajectory,
    })
}

#[derive(Debug, Clone)]
pub struct RainbowRun {
    pub trajectory: Trajectory,
    /// Magnitude of the change of heading.
    pub deflection: f64,
    pub crossings: usize,
    /// Whether the outside pole stayed out of the disk.
    pub one_pole_through: bool,
    pub analytic: f64,
}

/// A pair heading along `+x` with one pole aimed at the center of a disk of
/// radius `r` and seabed `1/r` (outside 1); the other pole at distance `d`.
pub fn run_rainbow(r: f64, d: f64, cfg: &IntegratorConfig) -> Result<RainbowRun> {
    let analytic = analytic::rainbow_angle(r, d)?;
    let seabed = Seabed::RadialStep {
        radius: r,
        inside: 1.0 / r,
        outside: 1.0,
    };
    let mu = C::new(0.0, 1.0);
    let start = -(r + 2.0 * d + 0.5);
    // heading +x: w − z = −i d, w on the axis through the center
    let w = C::new(start, 0.0);
    let poles = pair_with_axis(w + C::new(0.0, d), d, -FRAC_PI_2, mu);
    let t_end = 3.0 * (2.0 * start.abs() + 2.0 * d) * d;
    let cfg = IntegratorConfig {
        t_end,
        sample_interval: t_end / 2000.0,
        ..cfg.clone()
    };
    let trajectory = integrate(&SystemState::from_poles(&poles), &poles, &seabed, &cfg)?;
    let axis = fitted_axis_angle(&trajectory)
        .ok_or_else(|| Error::InvalidInput("no samples after the disk".into()))?;
    let deflection = heading_of(axis, mu, 1.0).abs();
    let z_min = trajectory
        .samples
        .iter()
        .map(|s| s.positions[0].norm())
        .fold(f64::INFINITY, f64::min);
    Ok(RainbowRun {
        deflection,
        crossings: trajectory.crossings().count(),
        one_pole_through: z_min > r,
        analytic,
        trajectory,
    })
}

/// Zigzag amplitude for one departure angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudePoint {
    pub theta: f64,
    pub theta_over_pi: f64,
    /// Largest `|Im|` of the pair midpoint.
    pub amplitude: f64,
    /// Largest `|Im|` reached by either pole.
    pub max_abs_im: f64,
    pub extrema: usize,
    /// Departures that approach the edge of the strip without turning.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeCurve {
    pub initial_im: f64,
    pub points: Vec<AmplitudePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSettings {
    pub separation: f64,
    pub mu: C,
    /// Integration time per chunk and maximal number of chunks.
    pub chunk: f64,
    pub max_chunks: usize,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            separation: 0.05,
            mu: C::new(0.0, 1.0),
            chunk: 0.25,
            max_chunks: 40,
        }
    }
}

fn count_extrema(values: &[f64]) -> usize {
    let mut count = 0;
    let mut last_sign = 0.0;
    for w in values.windows(2) {
        let d = w[1] - w[0];
        if d == 0.0 {
            continue;
        }
        let sign = d.signum();
        if last_sign != 0.0 && sign != last_sign {
            count += 1;
        }
        last_sign = sign;
    }
    count
}

/// Pairs released at `Im z = y0` with headings `θ` (from the real axis);
/// integrates each until two extrema of the midpoint height are observed.
pub fn amplitude_scan(
    seabed: &Seabed,
    initial_im: f64,
    thetas: &[f64],
    settings: &ScanSettings,
    cfg: &IntegratorConfig,
) -> Result<AmplitudeCurve> {
    if thetas.is_empty() {
        return Err(Error::InvalidInput("empty angle grid".into()));
    }
    if let Some(t) = thetas.iter().find(|t| !(**t >= 0.0 && **t < PI)) {
        return Err(Error::InvalidInput(format!(
            "departure angle {t} outside [0, π)"
        )));
    }
    let points = thetas
        .iter()
        .map(|&theta| scan_point(seabed, initial_im, theta, settings, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(AmplitudeCurve { initial_im, points })
}

fn scan_point(
    seabed: &Seabed,
    y0: f64,
    theta: f64,
    st: &ScanSettings,
    cfg: &IntegratorConfig,
) -> Result<AmplitudePoint> {
    let poles = pair_with_heading(C::new(0.0, y0), st.separation, theta, st.mu, seabed);
    let mut state = SystemState::from_poles(&poles);
    let mut heights = vec![midpoint(&state).im];
    let mut max_abs_im = state
        .positions
        .iter()
        .map(|z| z.im.abs())
        .fold(0.0, f64::max);
    let mut extrema = 0;
    let vertical = theta == FRAC_PI_2;
    for _ in 0..st.max_chunks {
        let chunk_cfg = IntegratorConfig {
            t_end: state.time + st.chunk,
            sample_interval: st.chunk / 200.0,
            ..cfg.clone()
        };
        let traj = integrate(&state, &poles, seabed, &chunk_cfg)?;
        for s in traj.samples.iter().skip(1) {
            heights.push(midpoint(s).im);
            max_abs_im = s
                .positions
                .iter()
                .map(|z| z.im.abs())
                .fold(max_abs_im, f64::max);
        }
        state = traj.last().expect("samples").clone();
        extrema = count_extrema(&heights);
        if traj.ended_early() || (!vertical && extrema >= 2) {
            break;
        }
    }
    let amplitude = heights.iter().map(|y| y.abs()).fold(0.0, f64::max);
    Ok(AmplitudePoint {
        theta,
        theta_over_pi: theta / PI,
        amplitude,
        max_abs_im,
        extrema,
        flagged: vertical || extrema < 2,
    })
}

/// Analytic zigzag amplitude of a small vortex pair in `S = |Im z| − h`
/// released at height `y0 ∈ (−h, h)` with heading `θ`.
pub fn trough_amplitude(depth: f64, y0: f64, theta: f64) -> f64 {
    depth - (depth - y0.abs()) * theta.cos().abs()
}

/// Ensemble initial headings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Directions {
    /// `count` headings evenly spaced around the circle, starting at `offset`.
    Uniform { offset: f64 },
    /// Uniformly random headings from a seeded generator.
    Random { seed: u64 },
}

/// Headings for an ensemble of `count` pairs.
pub fn headings(count: usize, directions: Directions) -> Vec<f64> {
    match directions {
        Directions::Uniform { offset } => (0..count)
            .map(|k| wrap_angle(offset + 2.0 * PI * k as f64 / count as f64))
            .collect(),
        Directions::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| wrap_angle(rng.gen_range(0.0..2.0 * PI)))
                .collect()
        }
    }
}

/// One pair of a caustic ensemble.
#[derive(Debug, Clone)]
pub struct CausticMember {
    pub release_x: f64,
    /// The pair straddles an end of the arc.
    pub flagged: bool,
    pub trajectory: Result<Trajectory>,
}

/// Release abscissae evenly spaced across the arc, symmetric about its axis.
pub fn caustic_releases(center: C, radius: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| center.re - radius + (k as f64 + 0.5) * 2.0 * radius / count as f64)
        .collect()
}

/// Pairs released along `Im z = release_y` heading straight up into the arc.
pub fn caustic_ensemble(
    seabed: &Seabed,
    count: usize,
    separation: f64,
    release_y: f64,
    cfg: &IntegratorConfig,
) -> Result<Vec<CausticMember>> {
    let Seabed::ArcMirror { center, radius, .. } = *seabed else {
        return Err(Error::InvalidInput(
            "caustic needs an arc mirror seabed".into(),
        ));
    };
    if count < 2 {
        return Err(Error::InvalidInput("caustic needs at least 2 pairs".into()));
    }
    let mu = C::new(0.0, -1.0);
    let xs = caustic_releases(center, radius, count);
    let states: Vec<(f64, Vec<Pole>)> = xs
        .iter()
        .map(|&x| {
            (
                x,
                pair_with_heading(C::new(x, release_y), separation, FRAC_PI_2, mu, seabed),
            )
        })
        .collect();
    use rayon::prelude::*;
    Ok(states
        .into_par_iter()
        .map(|(x, poles)| CausticMember {
            release_x: x,
            flagged: (x - center.re).abs() + separation / 2.0 >= radius,
            trajectory: integrate(&SystemState::from_poles(&poles), &poles, seabed, cfg),
        })
        .collect())
}

/// Envelope of rays travelling up, parallel to the axis, reflected by the
/// upper arc: `P(α) + (R cos α / 2)·d′(α)` for `α ∈ (−π/2, π/2)`.
pub fn caustic_envelope(center: C, radius: f64, samples: usize) -> Vec<C> {
    (1..samples)
        .map(|k| {
            let a = -FRAC_PI_2 + PI * k as f64 / samples as f64;
            let p = center + C::new(radius * a.sin(), radius * a.cos());
            let dir = C::new(-(2.0 * a).sin(), -(2.0 * a).cos());
            p + dir * (radius * a.cos() / 2.0)
        })
        .collect()
}

/// Distance from `point` to the line through the final midpoint of a pair
/// along its final heading.
pub fn ray_miss_distance(trajectory: &Trajectory, mu: C, s: f64, point: C) -> Option<f64> {
    let axis = fitted_axis_angle(trajectory)?;
    let dir = C::from_polar(1.0, heading_of(axis, mu, s));
    let p = midpoint(trajectory.last()?);
    Some((dir.conj() * (point - p)).im.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_heading_round_trip() {
        let seabed = Seabed::horizontal_step(0.0, -1.0, 2.0);
        for (mu, y) in [
            (C::new(0.0, 1.0), 1.0),
            (C::new(0.0, -1.0), -1.0),
            (C::new(1.0, 1.0), 1.0),
        ] {
            let poles = pair_with_heading(C::new(0.3, y), 0.05, 1.0, mu, &seabed);
            let s = SystemState::from_poles(&poles);
            let v = crate::dynamics::velocity_seabed(&s, &[-mu, mu], &seabed, 1e-9).unwrap();
            assert!((v.velocities[0].arg() - 1.0).abs() < 1e-12);
            assert!((midpoint(&s) - C::new(0.3, y)).norm() < 1e-15);
        }
    }

    #[test]
    fn uniform_headings_are_symmetric() {
        let h = headings(4, Directions::Uniform { offset: 0.0 });
        assert_eq!(h.len(), 4);
        assert!((h[1] - FRAC_PI_2).abs() < 1e-15);
        let r1 = headings(5, Directions::Random { seed: 3 });
        assert_eq!(r1, headings(5, Directions::Random { seed: 3 }));
    }

    #[test]
    fn envelope_cusp_is_the_paraxial_focus() {
        let env = caustic_envelope(C::new(0.0, 0.0), 2.0, 1000);
        let mid = env[env.len() / 2];
        assert!((mid - C::new(0.0, 1.0)).norm() < 1e-5);
    }

    #[test]
    fn extrema_counting() {
        assert_eq!(count_extrema(&[0.0, 1.0, 2.0, 1.0, 0.0, 1.0]), 2);
        assert_eq!(count_extrema(&[0.0, 1.0, 1.0, 2.0]), 0);
    }
}
