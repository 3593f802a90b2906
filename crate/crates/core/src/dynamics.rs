//! Instantaneous velocities of the poles.

use crate::error::{Error, Result};
use crate::seabed::Seabed;
use crate::types::{is_finite, ComplexNumber, Pole, SystemState};

/// Default collision threshold on pole separation.
pub const DEFAULT_COLLISION_EPS: f64 = 1e-9;

/// `dz_i/dt` for every pole, in pole order.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    pub velocities: Vec<ComplexNumber>,
}

impl VelocityField {
    pub fn max_speed(&self) -> f64 {
        self.velocities.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

fn collision(
    i: usize,
    j: usize,
    separation: f64,
    threshold: f64,
    label: impl Fn(usize) -> String,
) -> Error {
    Error::Collision {
        first: label(i),
        second: label(j),
        separation,
        threshold,
    }
}

fn index_label(i: usize) -> String {
    format!("#{i}")
}

/// Core kernel: `v_i = Σ_{j≠i} conj(μ_j) s_j / conj(z_i − z_j)`.
///
/// On a collision returns the offending pair and their separation.
pub(crate) fn kernel(
    positions: &[ComplexNumber],
    mus: &[ComplexNumber],
    factors: &[f64],
    eps: f64,
    out: &mut [ComplexNumber],
) -> std::result::Result<(), (usize, usize, f64)> {
    let n = positions.len();
    for v in out.iter_mut() {
        *v = ComplexNumber::new(0.0, 0.0);
    }
    for i in 0..n {
        for j in i + 1..n {
            let w = positions[i] - positions[j];
            let d = w.norm();
            if !(d >= eps) {
                return Err((i, j, d));
            }
            let wc = w.conj();
            // term induced on i by j, and on j by i (conj(z_j - z_i) = -wc)
            out[i] += mus[j].conj() * factors[j] / wc;
            out[j] += mus[i].conj() * factors[i] / (-wc);
        }
    }
    Ok(())
}

fn check_lengths(state: &SystemState, n: usize) -> Result<()> {
    if state.positions.len() != n {
        return Err(Error::LengthMismatch {
            positions: state.positions.len(),
            poles: n,
        });
    }
    if state.positions.iter().any(|&z| !is_finite(z)) {
        return Err(Error::NonFinite("state position"));
    }
    Ok(())
}

/// Velocities of the general multipole system with constant coefficients:
/// `dz_i/dt = Σ_{j≠i} Σ_n conj(μ_n^j (z_i − z_j)^n)`.
pub fn velocity_general(state: &SystemState, poles: &[Pole], eps: f64) -> Result<VelocityField> {
    check_lengths(state, poles.len())?;
    let z = &state.positions;
    let n = z.len();
    let mut velocities = vec![ComplexNumber::new(0.0, 0.0); n];
    for i in 0..n {
        for j in i + 1..n {
            let w = z[i] - z[j];
            let d = w.norm();
            if !(d >= eps) {
                return Err(collision(i, j, d, eps, |k| poles[k].label.clone()));
            }
            let wc = w.conj();
            for (k, mu) in poles[j].strength.iter() {
                velocities[i] += term(mu, w, wc, k);
            }
            for (k, mu) in poles[i].strength.iter() {
                velocities[j] += term(mu, -w, -wc, k);
            }
        }
    }
    Ok(VelocityField { velocities })
}

fn term(mu: ComplexNumber, w: ComplexNumber, wc: ComplexNumber, n: i32) -> ComplexNumber {
    match n {
        -1 => mu.conj() / wc,
        0 => mu.conj(),
        1 => (mu * w).conj(),
        _ => (mu * w.powi(n)).conj(),
    }
}

/// Fixed strengths, exponent −1 only:
/// `dz_i/dt = Σ_{j≠i} conj(μ^j) / (conj z_i − conj z_j)`.
pub fn velocity_fixed(
    state: &SystemState,
    mus: &[ComplexNumber],
    eps: f64,
) -> Result<VelocityField> {
    check_lengths(state, mus.len())?;
    let ones = vec![1.0; mus.len()];
    let mut velocities = vec![ComplexNumber::new(0.0, 0.0); mus.len()];
    kernel(&state.positions, mus, &ones, eps, &mut velocities)
        .map_err(|(i, j, d)| collision(i, j, d, eps, index_label))?;
    Ok(VelocityField { velocities })
}

/// Seabed-modulated strengths: each source term `j` is scaled by `S(z_j)`,
/// the seabed at the inducing pole.
pub fn velocity_seabed(
    state: &SystemState,
    mus: &[ComplexNumber],
    seabed: &Seabed,
    eps: f64,
) -> Result<VelocityField> {
    check_lengths(state, mus.len())?;
    let factors: Vec<f64> = state.positions.iter().map(|&z| seabed.eval(z)).collect();
    let mut velocities = vec![ComplexNumber::new(0.0, 0.0); mus.len()];
    kernel(&state.positions, mus, &factors, eps, &mut velocities)
        .map_err(|(i, j, d)| collision(i, j, d, eps, index_label))?;
    Ok(VelocityField { velocities })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seabed::{preset, PiecewiseLinearProfile};
    use crate::types::StrengthSpec;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> ComplexNumber {
        ComplexNumber::new(re, im)
    }
    const EPS: f64 = DEFAULT_COLLISION_EPS;

    #[test]
    fn single_pole_is_at_rest() {
        let poles = vec![Pole::simple("a", c(0.3, 0.1), c(1.0, 2.0))];
        let v = velocity_general(&SystemState::from_poles(&poles), &poles, EPS).unwrap();
        assert_eq!(v.velocities, vec![c(0.0, 0.0)]);
    }

    #[test]
    fn passive_pole_advected_by_vortex() {
        // z = 0 with μ = 0, z' = i d with μ' = −i: dz/dt = 1/d
        for d in [1.0, 0.5, 0.05] {
            let poles = vec![
                Pole::new("z", c(0.0, 0.0), StrengthSpec::new()),
                Pole::simple("w", c(0.0, d), c(0.0, -1.0)),
            ];
            let v = velocity_general(&SystemState::from_poles(&poles), &poles, EPS).unwrap();
            assert!((v.velocities[0] - c(1.0 / d, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn uniform_advection_for_exponent_zero() {
        let mu = c(0.3, -0.7);
        let nu = c(-1.2, 0.4);
        let poles = vec![
            Pole::new("a", c(0.0, 0.0), StrengthSpec::homogeneous(0, mu)),
            Pole::new("b", c(2.0, 1.0), StrengthSpec::homogeneous(0, nu)),
        ];
        let v = velocity_general(&SystemState::from_poles(&poles), &poles, EPS).unwrap();
        assert_eq!(v.velocities, vec![nu.conj(), mu.conj()]);
    }

    #[test]
    fn vortex_pair_translates() {
        let state = SystemState::new(0.0, vec![c(0.0, 0.0), c(0.0, 1.0)]);
        let v = velocity_fixed(&state, &[c(0.0, 1.0), c(0.0, -1.0)], EPS).unwrap();
        assert!((v.velocities[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((v.velocities[1] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn centred_polygon_is_immobilized() {
        for n in 2..=8 {
            let mu = c(0.4, 1.3);
            let mut zs: Vec<_> = (0..n)
                .map(|k| ComplexNumber::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))
                .collect();
            zs.push(c(0.0, 0.0));
            let mut mus = vec![mu; n];
            mus.push(-mu * ((n - 1) as f64 / 2.0));
            let v = velocity_fixed(&SystemState::new(0.0, zs), &mus, EPS).unwrap();
            assert!(v.max_speed() < 1e-14, "N={n}: {}", v.max_speed());
        }
    }

    #[test]
    fn source_chases_sink() {
        let z = c(0.2, -0.1);
        let zp = c(1.0, 0.5);
        let v = velocity_fixed(
            &SystemState::new(0.0, vec![z, zp]),
            &[c(2.0, 0.0), c(-2.0, 0.0)],
            EPS,
        )
        .unwrap();
        assert!((v.velocities[0] - v.velocities[1]).norm() < 1e-15);
        // parallel to z − z'
        let cross = (v.velocities[0] * (z - zp).conj()).im;
        assert!(cross.abs() < 1e-14);
    }

    #[test]
    fn collision_is_refused() {
        let state = SystemState::new(0.0, vec![c(0.0, 0.0), c(1e-10, 0.0)]);
        let err = velocity_fixed(&state, &[c(0.0, 1.0), c(0.0, -1.0)], EPS).unwrap_err();
        assert!(matches!(err, Error::Collision { .. }));
    }

    #[test]
    fn seabed_constant_one_reduces_to_fixed() {
        let state = SystemState::new(0.0, vec![c(0.0, 0.0), c(0.3, 1.0), c(-1.0, 0.2)]);
        let mus = [c(0.0, 1.0), c(0.5, -1.0), c(-0.2, 0.3)];
        let a = velocity_fixed(&state, &mus, EPS).unwrap();
        let b = velocity_seabed(&state, &mus, &Seabed::constant(1.0), EPS).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn vortex_pair_on_seabed_matches_pair_system() {
        let seabed = preset("sloped-step").unwrap();
        let z = c(0.1, 0.4);
        let zp = c(0.13, 0.45);
        let v = velocity_seabed(
            &SystemState::new(0.0, vec![z, zp]),
            &[c(0.0, 1.0), c(0.0, -1.0)],
            &seabed,
            EPS,
        )
        .unwrap();
        let dz = c(0.0, 1.0) * seabed.eval(zp) / (z.conj() - zp.conj());
        let dzp = -c(0.0, 1.0) * seabed.eval(z) / (zp.conj() - z.conj());
        assert!((v.velocities[0] - dz).norm() < 1e-13);
        assert!((v.velocities[1] - dzp).norm() < 1e-13);
    }

    #[test]
    fn lower_half_plane_pair_ignores_upper_step() {
        let seabed = Seabed::horizontal_step(0.0, 1.0, 2.0);
        let state = SystemState::new(0.0, vec![c(0.0, -1.0), c(0.05, -1.02)]);
        let mus = [c(0.0, 1.0), c(0.0, -1.0)];
        assert_eq!(
            velocity_seabed(&state, &mus, &seabed, EPS).unwrap(),
            velocity_fixed(&state, &mus, EPS).unwrap()
        );
    }

    fn point() -> impl Strategy<Value = ComplexNumber> {
        (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(x, y)| c(x, y))
    }

    fn separated(zs: &[ComplexNumber]) -> bool {
        zs.iter()
            .enumerate()
            .all(|(i, a)| zs[i + 1..].iter().all(|b| (a - b).norm() > 0.05))
    }

    proptest! {
        #[test]
        fn general_equals_fixed_for_simple_poles(
            zs in proptest::collection::vec(point(), 2..6),
            mus in proptest::collection::vec(point(), 6),
        ) {
            prop_assume!(separated(&zs));
            let poles: Vec<Pole> = zs.iter().zip(&mus).enumerate()
                .map(|(i, (&z, &mu))| Pole::simple(format!("p{i}"), z, mu)).collect();
            let state = SystemState::from_poles(&poles);
            let a = velocity_general(&state, &poles, EPS).unwrap();
            let b = velocity_fixed(&state, &mus[..zs.len()], EPS).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn affine_equivariance(
            zs in proptest::collection::vec(point(), 2..6),
            mus in proptest::collection::vec(point(), 6),
            a in point(), b in point(),
        ) {
            prop_assume!(separated(&zs) && a.norm() > 0.1);
            let mus = &mus[..zs.len()];
            let v = velocity_fixed(&SystemState::new(0.0, zs.clone()), mus, EPS).unwrap();
            let moved: Vec<_> = zs.iter().map(|&z| a * z + b).collect();
            let w = velocity_fixed(&SystemState::new(0.0, moved), mus, EPS).unwrap();
            for (vi, wi) in v.velocities.iter().zip(&w.velocities) {
                let expected = a / a.norm_sqr() * vi;
                prop_assert!((wi - expected).norm() <= 1e-10 * (1.0 + expected.norm()));
            }
        }

        #[test]
        fn pair_distance_rate(z in point(), zp in point(), mu in point(), nu in point()) {
            prop_assume!((z - zp).norm() > 0.05);
            let v = velocity_fixed(&SystemState::new(0.0, vec![z, zp]), &[mu, nu], EPS).unwrap();
            let rate = 2.0 * ((z - zp).conj() * (v.velocities[0] - v.velocities[1])).re;
            let expected = 2.0 * (mu + nu).re;
            prop_assert!((rate - expected).abs() < 1e-9 * (1.0 + expected.abs()));
            // opposite real parts keep the distance fixed
            let nu0 = c(-mu.re, nu.im);
            let v = velocity_fixed(&SystemState::new(0.0, vec![z, zp]), &[mu, nu0], EPS).unwrap();
            let rate = 2.0 * ((z - zp).conj() * (v.velocities[0] - v.velocities[1])).re;
            prop_assert!(rate.abs() < 1e-9);
        }

        #[test]
        fn vortex_pair_velocities_perpendicular_to_segment(
            z in point(), zp in point(), g in 0.1..3.0f64, slope in -2.0..2.0f64,
        ) {
            prop_assume!((z - zp).norm() > 0.05);
            let seabed = Seabed::ProfileOfIm {
                profile: PiecewiseLinearProfile::ramp(-1.0, 1.0, -1.0, slope).unwrap(),
            };
            let v = velocity_seabed(&SystemState::new(0.0, vec![z, zp]), &[c(0.0, g), c(0.0, -g)], &seabed, EPS).unwrap();
            for vi in &v.velocities {
                let dot = (vi * (z - zp).conj()).re;
                prop_assert!(dot.abs() <= 1e-12 * (1.0 + vi.norm()));
            }
        }

        #[test]
        fn sum_rule_for_odd_degree(
            zs in proptest::collection::vec(point(), 2..6),
            mus in proptest::collection::vec(point(), 6),
            deg in prop_oneof![Just(-3), Just(-1), Just(1), Just(3)],
        ) {
            prop_assume!(separated(&zs));
            let poles: Vec<Pole> = zs.iter().zip(&mus).enumerate()
                .map(|(i, (&z, &mu))| Pole::new(format!("p{i}"), z, StrengthSpec::homogeneous(deg, mu))).collect();
            let v = velocity_general(&SystemState::from_poles(&poles), &poles, EPS).unwrap();
            let sum: ComplexNumber = poles.iter().zip(&v.velocities).map(|(p, vi)| p.strength.get(deg).conj() * vi).sum();
            let scale: f64 = poles.iter().zip(&v.velocities).map(|(p, vi)| (p.strength.get(deg) * vi).norm()).sum();
            prop_assert!(sum.norm() <= 1e-12 * (1.0 + scale));
        }
    }
}
