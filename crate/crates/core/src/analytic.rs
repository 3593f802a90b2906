//! Closed-form solutions and refraction laws.
//!
//! Angles at a boundary are pair-axis angles `θ = arg(z′ − z)` measured from
//! the boundary line, which equal the direction of travel measured from the
//! boundary normal.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{is_finite, ComplexNumber};

type C = ComplexNumber;

/// Reduced two-body problem `dZ/dt = M / conj(Z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfSimilarSpec {
    pub z0: C,
    pub m: C,
}

impl SelfSimilarSpec {
    pub fn new(z0: C, m: C) -> Result<Self> {
        if !is_finite(z0) || !is_finite(m) {
            return Err(Error::NonFinite("self-similar spec"));
        }
        if z0 == C::new(0.0, 0.0) {
            return Err(Error::InvalidInput("Z0 must be nonzero".into()));
        }
        Ok(Self { z0, m })
    }

    /// Time at which `Z` reaches 0, if `Re M < 0`.
    pub fn collapse_time(&self) -> Option<f64> {
        (self.m.re < 0.0).then(|| -self.z0.norm_sqr() / (2.0 * self.m.re))
    }
}

/// `Z(t)`: logarithmic spiral for `Re M ≠ 0`, uniform rotation for `Re M = 0`.
pub fn self_similar(spec: &SelfSimilarSpec, t: f64) -> Result<C> {
    let r2 = spec.z0.norm_sqr();
    let m = spec.m;
    if m.re == 0.0 {
        return Ok(C::from_polar(1.0, m.im / r2 * t) * spec.z0);
    }
    let t2 = 1.0 + 2.0 * m.re / r2 * t;
    if !(t2 > 0.0) {
        return Err(Error::Domain {
            t,
            collapse_time: spec.collapse_time().unwrap_or(f64::INFINITY),
        });
    }
    let big_t = t2.sqrt();
    Ok(spec.z0 * big_t * C::from_polar(1.0, m.im / m.re * big_t.ln()))
}

/// Result of reducing a pole pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairReduction {
    /// `z − c` obeys `dZ/dt = M / conj(Z)` about the fixed center `c`.
    Centered { center: C, m: C },
    /// `μ + μ′ = 0`: both poles translate with this common velocity.
    Translating { velocity: C },
}

/// Reduces the pair `(z, μ)`, `(z′, μ′)` on a uniform seabed.
pub fn pair_reduction(z: C, z2: C, mu: C, mu2: C) -> Result<PairReduction> {
    if [z, z2, mu, mu2].iter().any(|&v| !is_finite(v)) {
        return Err(Error::NonFinite("pair"));
    }
    let total = mu + mu2;
    if total == C::new(0.0, 0.0) {
        if z == z2 {
            return Err(Error::InvalidInput("coincident poles".into()));
        }
        return Ok(PairReduction::Translating {
            velocity: mu2.conj() / (z - z2).conj(),
        });
    }
    Ok(PairReduction::Centered {
        center: (mu.conj() * z + mu2.conj() * z2) / total.conj(),
        m: mu2.norm_sqr() / total,
    })
}

/// Reduced strength of `N` poles `μ` on a regular polygon around a pole `μ′`.
pub fn polygon_reduction(n: usize, mu: C, mu_center: C) -> Result<C> {
    if n < 2 {
        return Err(Error::InvalidInput(
            "polygon needs at least 2 vertices".into(),
        ));
    }
    Ok(mu.conj() * ((n as f64 - 1.0) / 2.0) + mu_center.conj())
}

/// Center strength that immobilizes the polygon: `μ′ = −(N−1)μ/2`.
pub fn immobilizing_center(n: usize, mu: C) -> C {
    -mu * ((n as f64 - 1.0) / 2.0)
}

/// Whether the polygon with these strengths stays at rest.
pub fn is_immobilized(n: usize, mu: C, mu_center: C) -> bool {
    polygon_reduction(n, mu, mu_center).is_ok_and(|m| m.norm() <= 1e-14 * (1.0 + mu.norm()))
}

/// Vertices of a regular `n`-gon of the given radius, first vertex at angle `phase`.
pub fn polygon_vertices(n: usize, center: C, radius: f64, phase: f64) -> Vec<C> {
    (0..n)
        .map(|k| center + C::from_polar(radius, phase + 2.0 * PI * k as f64 / n as f64))
        .collect()
}

/// A pair meeting a straight seabed step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryInteraction {
    pub theta1: f64,
    pub s1: f64,
    pub s2: f64,
    pub mu: C,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RefractionOutcome {
    Refracted {
        theta2: f64,
    },
    Reflected {
        theta2: f64,
    },
    /// The pair runs along the boundary.
    Skid,
    /// The pair oscillates across the boundary indefinitely.
    Trapped,
    /// Source-type strengths: the poles repel along a line instead of reflecting.
    Separated,
}

impl RefractionOutcome {
    pub fn angle(&self) -> Option<f64> {
        match *self {
            RefractionOutcome::Refracted { theta2 } | RefractionOutcome::Reflected { theta2 } => {
                Some(theta2)
            }
            RefractionOutcome::Skid => Some(FRAC_PI_2),
            _ => None,
        }
    }
}

/// `sin θ · e^{−kθ}`, conserved (times `s`) across a crossing.
pub fn snell_invariant(s: f64, theta: f64, mu: C) -> f64 {
    let k = if mu.im == 0.0 { 0.0 } else { mu.re / mu.im };
    s * theta.sin() * (-k * theta).exp()
}

const ROOT_TOL: f64 = 1e-12;
const SCAN_STEPS: usize = 4096;
/// Grazing outcomes within this margin of `π/2` are reported as skids.
const SKID_TOL: f64 = 1e-12;

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    while (b - a).abs() > ROOT_TOL {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn check_interaction(i: &BoundaryInteraction) -> Result<()> {
    if ![i.theta1, i.s1, i.s2].iter().all(|v| v.is_finite()) || !is_finite(i.mu) {
        return Err(Error::NonFinite("boundary interaction"));
    }
    if i.mu == C::new(0.0, 0.0) {
        return Err(Error::InvalidInput("μ must be nonzero".into()));
    }
    Ok(())
}

/// Refraction across a step from `s1` to `s2` (both positive).
///
/// The axis angle rotates monotonically from `θ1` while the pair straddles
/// the step; the outcome is whichever comes first: the refraction balance
/// `s2 f(θ) = s1 f(θ1)` (both poles across) or the return `f(θ) = f(θ1)`
/// (the first pole is pushed back, a reflection).
pub fn snell(i: &BoundaryInteraction) -> Result<RefractionOutcome> {
    check_interaction(i)?;
    if !(i.s1 > 0.0 && i.s2 > 0.0) {
        return Err(Error::InvalidInput(
            "refraction needs positive s1, s2".into(),
        ));
    }
    if !(i.theta1 > 0.0 && i.theta1 <= FRAC_PI_2) {
        return Err(Error::InvalidInput("θ1 must lie in (0, π/2]".into()));
    }
    let (t1, s1, s2) = (i.theta1, i.s1, i.s2);
    if i.mu.im == 0.0 || s1 == s2 {
        return Ok(RefractionOutcome::Refracted { theta2: t1 });
    }
    if i.mu.re == 0.0 {
        let x = s1 * t1.sin() / s2;
        return Ok(if (x - 1.0).abs() <= SKID_TOL {
            RefractionOutcome::Skid
        } else if x < 1.0 {
            RefractionOutcome::Refracted { theta2: x.asin() }
        } else {
            RefractionOutcome::Reflected { theta2: PI - t1 }
        });
    }
    let q1 = snell_invariant(1.0, t1, i.mu);
    let refr = |t: f64| snell_invariant(s2, t, i.mu) - s1 * q1;
    let refl = |t: f64| snell_invariant(1.0, t, i.mu) - q1;
    let dir = -((s2 - s1) * i.mu.im).signum();
    let end = if dir > 0.0 { PI } else { 0.0 };
    let dt = (end - t1) / SCAN_STEPS as f64;
    let (mut prev_t, mut prev_a, mut prev_b) = (t1, refr(t1), f64::NAN);
    for k in 1..=SCAN_STEPS {
        let t = t1 + dt * k as f64;
        let (a, b) = (refr(t), refl(t));
        if a == 0.0 || (a < 0.0) != (prev_a < 0.0) {
            let theta2 = bisect(refr, prev_t, t);
            // vertical component of the heading after the crossing
            let rise = (theta2 + (-i.mu.conj()).arg()).sin();
            return Ok(if rise.abs() <= SKID_TOL {
                RefractionOutcome::Skid
            } else if rise > 0.0 {
                RefractionOutcome::Refracted { theta2 }
            } else {
                RefractionOutcome::Reflected { theta2 }
            });
        }
        if k > 1 && (b < 0.0) != (prev_b < 0.0) {
            return Ok(RefractionOutcome::Reflected {
                theta2: bisect(refl, prev_t, t),
            });
        }
        prev_t = t;
        prev_a = a;
        prev_b = b;
    }
    Ok(RefractionOutcome::Skid)
}

/// Reflection off a mirror step (`−s1` below, `s2` above); independent of `s1`, `s2`.
pub fn reflect(i: &BoundaryInteraction) -> Result<RefractionOutcome> {
    check_interaction(i)?;
    if !(i.theta1 >= 0.0 && i.theta1 < FRAC_PI_2) {
        return Err(Error::InvalidInput("θ1 must lie in [0, π/2)".into()));
    }
    let t1 = i.theta1;
    if i.mu.im == 0.0 {
        return Ok(RefractionOutcome::Separated);
    }
    if t1 == 0.0 {
        return Ok(RefractionOutcome::Trapped);
    }
    if i.mu.re == 0.0 {
        return Ok(RefractionOutcome::Reflected { theta2: PI - t1 });
    }
    // other root of f(θ) = f(θ1), across the maximum of f
    let k = i.mu.re / i.mu.im;
    let peak = (1.0 / k).atan().rem_euclid(PI);
    let q1 = snell_invariant(1.0, t1, i.mu);
    let g = |t: f64| snell_invariant(1.0, t, i.mu) - q1;
    let theta2 = if t1 < peak {
        bisect(g, peak, PI)
    } else if t1 > peak {
        bisect(g, 0.0, peak)
    } else {
        t1
    };
    Ok(RefractionOutcome::Reflected { theta2 })
}

/// Incidence beyond which a pair moving from `s1` into `s2 < s1` is reflected.
pub fn critical_angle(s1: f64, s2: f64) -> Option<f64> {
    (s1 > 0.0 && s2 > 0.0 && s2 < s1).then(|| (s2 / s1).asin())
}

/// Net advance per half-period of a leapfrogging pair over a step `s1 | s2`.
pub fn leapfrog_advance(s1: f64, s2: f64, dz: C) -> Result<C> {
    if !(s1 > 0.0 && s2 > 0.0) {
        return Err(Error::InvalidInput("s1, s2 must be positive".into()));
    }
    Ok(C::new(0.0, (s2 - s1) / (s2 + s1) * dz.im.abs()))
}

/// Deflection of a pair passing through a disk of seabed value `r` (outside 1)
/// with one pole at distance `d` from the other.
pub fn rainbow_angle(r: f64, d: f64) -> Result<f64> {
    if !(r > 0.0 && d > 0.0) {
        return Err(Error::InvalidInput("r and d must be positive".into()));
    }
    Ok(2.0 * ((1.0 - r) / d).atan())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn inter(theta1: f64, s1: f64, s2: f64, mu: C) -> BoundaryInteraction {
        BoundaryInteraction { theta1, s1, s2, mu }
    }

    #[test]
    fn rotation_branch() {
        let spec = SelfSimilarSpec::new(c(1.0, 0.0), c(0.0, 1.0)).unwrap();
        let z = self_similar(&spec, PI).unwrap();
        assert_abs_diff_eq!(z.re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn collapse_and_expansion() {
        let sink = SelfSimilarSpec::new(c(1.0, 0.0), c(-1.0, 0.0)).unwrap();
        assert_eq!(sink.collapse_time(), Some(0.5));
        assert!(matches!(
            self_similar(&sink, 0.5),
            Err(Error::Domain { .. })
        ));
        let source = SelfSimilarSpec::new(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(self_similar(&source, 1.5).unwrap().re, 2.0, epsilon = 1e-15);
        assert!(SelfSimilarSpec::new(c(0.0, 0.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn self_similar_solves_its_ode() {
        let spec = SelfSimilarSpec::new(c(0.7, -0.4), c(-0.3, 1.2)).unwrap();
        let h = 1e-6;
        for t in [0.0, 0.1, 0.3] {
            let z = self_similar(&spec, t).unwrap();
            let dz = (self_similar(&spec, t + h).unwrap() - self_similar(&spec, t).unwrap()) / h;
            let rhs = spec.m / z.conj();
            assert!((dz - rhs).norm() < 1e-4 * rhs.norm());
        }
    }

    #[test]
    fn spiral_tends_to_rotation() {
        let z0 = c(1.0, 0.5);
        let rot = SelfSimilarSpec::new(z0, c(0.0, 0.8)).unwrap();
        let spiral = SelfSimilarSpec::new(z0, c(1e-8, 0.8)).unwrap();
        let dev = (0..=1000)
            .map(|k| {
                let t = k as f64 * 0.01;
                (self_similar(&rot, t).unwrap() - self_similar(&spiral, t).unwrap()).norm()
            })
            .fold(0.0, f64::max);
        assert!(dev < 1e-6, "deviation {dev}");
    }

    #[test]
    fn pair_reductions() {
        let PairReduction::Centered { center, .. } =
            pair_reduction(c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0)).unwrap()
        else {
            panic!()
        };
        assert!(center.norm() < 1e-15);
        let PairReduction::Centered { center, .. } =
            pair_reduction(c(0.0, 0.0), c(3.0, 0.0), c(0.0, 1.0), c(0.0, 2.0)).unwrap()
        else {
            panic!()
        };
        assert!((center - c(2.0, 0.0)).norm() < 1e-15);
        assert!(matches!(
            pair_reduction(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)).unwrap(),
            PairReduction::Translating { .. }
        ));
    }

    #[test]
    fn reduced_strength_matches_velocity() {
        // oracle: the velocity of z computed directly from the pair ODE
        let (z, z2, mu, mu2) = (c(0.3, -0.2), c(-0.5, 0.9), c(0.4, 1.1), c(-1.3, 0.6));
        let PairReduction::Centered { center, m } = pair_reduction(z, z2, mu, mu2).unwrap() else {
            panic!()
        };
        let direct = mu2.conj() / (z - z2).conj();
        let reduced = m / (z - center).conj();
        assert!((direct - reduced).norm() < 1e-14);
    }

    #[test]
    fn polygon_strengths() {
        assert_eq!(
            polygon_reduction(3, c(0.0, 1.0), c(0.0, -1.0)).unwrap(),
            c(0.0, 0.0)
        );
        assert!(is_immobilized(3, c(0.0, 1.0), c(0.0, -1.0)));
        assert_eq!(
            polygon_reduction(2, c(0.0, 1.0), c(0.0, 0.0)).unwrap(),
            c(0.0, -0.5)
        );
        assert_eq!(
            polygon_reduction(5, c(1.0, 0.0), c(0.0, 0.0)).unwrap(),
            c(2.0, 0.0)
        );
        assert!(polygon_reduction(1, c(1.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn snell_examples() {
        let out = snell(&inter(PI / 6.0, 1.0, 2.0, c(0.0, 1.0))).unwrap();
        let RefractionOutcome::Refracted { theta2 } = out else {
            panic!("{out:?}")
        };
        assert_abs_diff_eq!(theta2.sin(), 0.25, epsilon = 1e-15);
        assert_eq!(
            snell(&inter(0.7, 1.5, 1.5, c(0.3, 1.0))).unwrap(),
            RefractionOutcome::Refracted { theta2: 0.7 }
        );
        assert_eq!(
            snell(&inter(0.5f64.asin(), 2.0, 1.0, c(0.0, 1.0))).unwrap(),
            RefractionOutcome::Skid
        );
        assert_eq!(
            snell(&inter(0.7, 2.0, 1.0, c(0.0, 1.0))).unwrap(),
            RefractionOutcome::Reflected { theta2: PI - 0.7 }
        );
        assert_eq!(
            snell(&inter(0.7, 1.0, 2.0, c(1.0, 0.0))).unwrap(),
            RefractionOutcome::Refracted { theta2: 0.7 }
        );
    }

    #[test]
    fn generalized_snell_conserves_invariant() {
        let mu = c(1.0, 1.0);
        let out = snell(&inter(PI / 6.0, 1.0, 2.0, mu)).unwrap();
        let theta2 = out.angle().unwrap();
        assert!(theta2 < PI / 6.0);
        assert_abs_diff_eq!(
            snell_invariant(1.0, PI / 6.0, mu),
            snell_invariant(2.0, theta2, mu),
            epsilon = 1e-11
        );
    }

    #[test]
    fn reflection_examples() {
        let mu = c(0.0, 1.0);
        let RefractionOutcome::Reflected { theta2 } =
            reflect(&inter(PI / 4.0, 1.0, 1.0, mu)).unwrap()
        else {
            panic!()
        };
        assert_abs_diff_eq!(theta2, 3.0 * PI / 4.0, epsilon = 1e-15);
        assert_eq!(
            reflect(&inter(0.0, 1.0, 1.0, mu)).unwrap(),
            RefractionOutcome::Trapped
        );
        assert_eq!(
            reflect(&inter(PI / 4.0, 1.0, 5.0, mu)).unwrap(),
            reflect(&inter(PI / 4.0, 5.0, 1.0, mu)).unwrap()
        );
        assert_eq!(
            reflect(&inter(0.3, 1.0, 1.0, c(1.0, 0.0))).unwrap(),
            RefractionOutcome::Separated
        );
        let g = reflect(&inter(0.3, 1.0, 1.0, c(0.5, 1.0)))
            .unwrap()
            .angle()
            .unwrap();
        assert_abs_diff_eq!(
            snell_invariant(1.0, g, c(0.5, 1.0)),
            snell_invariant(1.0, 0.3, c(0.5, 1.0)),
            epsilon = 1e-11
        );
    }

    #[test]
    fn leapfrog_and_rainbow() {
        assert_eq!(
            leapfrog_advance(2.0, 2.0, c(0.0, 0.5)).unwrap(),
            c(0.0, 0.0)
        );
        assert_abs_diff_eq!(leapfrog_advance(1.0, 3.0, c(0.0, 0.5)).unwrap().im, 0.25);
        assert_abs_diff_eq!(leapfrog_advance(3.0, 1.0, c(0.0, 0.5)).unwrap().im, -0.25);
        assert_eq!(rainbow_angle(1.0, 0.3).unwrap(), 0.0);
        assert_abs_diff_eq!(
            rainbow_angle(0.5, 0.25).unwrap(),
            2.0 * 2f64.atan(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(rainbow_angle(0.5, 0.5).unwrap(), FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(critical_angle(2.0, 1.0).unwrap(), PI / 6.0, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn reflection_is_an_involution(theta1 in 0.01f64..1.56) {
            let mu = c(0.0, 1.0);
            let t2 = reflect(&inter(theta1, 1.0, 1.0, mu)).unwrap().angle().unwrap();
            // the reflected ray meets the mirror at π − θ2 from the normal
            let back = reflect(&inter(PI - t2, 1.0, 1.0, mu)).unwrap().angle().unwrap();
            prop_assert!((PI - back - theta1).abs() < 1e-12);
        }

        #[test]
        fn refraction_is_reversible(theta1 in 0.01f64..1.5, s1 in 0.2f64..5.0, s2 in 0.2f64..5.0) {
            let mu = c(0.0, 1.0);
            if let RefractionOutcome::Refracted { theta2 } = snell(&inter(theta1, s1, s2, mu)).unwrap() {
                if let RefractionOutcome::Refracted { theta2: back } = snell(&inter(theta2, s2, s1, mu)).unwrap() {
                    prop_assert!((back - theta1).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn general_refraction_balances_invariant(theta1 in 0.05f64..1.5, re in -2.0f64..2.0, s2 in 0.3f64..4.0) {
            let mu = c(re, 1.0);
            let out = snell(&inter(theta1, 1.0, s2, mu)).unwrap();
            if let RefractionOutcome::Refracted { theta2 } = out {
                let a = snell_invariant(1.0, theta1, mu);
                let b = snell_invariant(s2, theta2, mu);
                prop_assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()));
            }
        }
    }
}
