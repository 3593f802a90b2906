//! Conserved quantities and their drift along trajectories.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seabed::Seabed;
use crate::types::{simple_strengths, ComplexNumber, EventKind, Pole, SystemState, Trajectory};

type C = ComplexNumber;

fn check_len(state: &SystemState, n: usize) -> Result<()> {
    if state.len() != n {
        return Err(Error::LengthMismatch {
            positions: state.len(),
            poles: n,
        });
    }
    Ok(())
}

fn separation(state: &SystemState, i: usize, j: usize) -> Result<C> {
    let w = state.positions[i] - state.positions[j];
    if w == C::new(0.0, 0.0) {
        return Err(Error::Collision {
            first: format!("#{i}"),
            second: format!("#{j}"),
            separation: 0.0,
            threshold: 0.0,
        });
    }
    Ok(w)
}

/// Pairwise Hamiltonian terms `(k_ij, w_ij)` with `H = Re Σ k_ij G(w_ij)`.
fn weighted_pairs(state: &SystemState, weights: &[C]) -> Result<Vec<(C, C)>> {
    let n = weights.len();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push((weights[i] * weights[j], separation(state, i, j)?));
        }
    }
    Ok(out)
}

fn log_term(k: C, w: C, arg: f64) -> f64 {
    k.re * w.norm().ln() - k.im * arg
}

fn power_term(k: C, w: C, n0: i32) -> f64 {
    (k * w.powi(n0 + 1) / (n0 as f64 + 1.0)).re
}

/// `Re Σ_{i<j} μ_i μ_j G(z_i − z_j)` with `G = w^{n0+1}/(n0+1)`, or `log w` for `n0 = −1`.
pub fn hamiltonian_homogeneous(state: &SystemState, mus: &[C], n0: i32) -> Result<f64> {
    check_len(state, mus.len())?;
    let pairs = weighted_pairs(state, mus)?;
    Ok(pairs
        .iter()
        .map(|&(k, w)| {
            if n0 == -1 {
                log_term(k, w, w.arg())
            } else {
                power_term(k, w, n0)
            }
        })
        .sum())
}

fn seabed_weights(state: &SystemState, mus: &[C], seabed: &Seabed) -> Vec<C> {
    mus.iter()
        .zip(&state.positions)
        .map(|(mu, &z)| mu * seabed.eval(z))
        .collect()
}

/// `Re Σ_{i<j} μ_i μ_j S(z_i) S(z_j) log(z_i − z_j)`.
pub fn hamiltonian_seabed(state: &SystemState, mus: &[C], seabed: &Seabed) -> Result<f64> {
    check_len(state, mus.len())?;
    hamiltonian_homogeneous(state, &seabed_weights(state, mus, seabed), -1)
}

fn weighted_mean(positions: impl Iterator<Item = (C, C)>) -> std::result::Result<C, ()> {
    let (mut num, mut den) = (C::new(0.0, 0.0), C::new(0.0, 0.0));
    for (mu, z) in positions {
        num += mu.conj() * z;
        den += mu.conj();
    }
    if den == C::new(0.0, 0.0) {
        Err(())
    } else {
        Ok(num / den)
    }
}

/// `c = Σ conj(μ_i) z_i / conj(Σ μ_i)`.
pub fn center_of_strength(state: &SystemState, mus: &[C]) -> Result<C> {
    check_len(state, mus.len())?;
    weighted_mean(mus.iter().copied().zip(state.positions.iter().copied()))
        .map_err(|_| Error::ZeroTotalStrength)
}

/// Difference of the centers of strength of the poles in `first` and of the rest.
pub fn subcenter_difference(state: &SystemState, mus: &[C], first: &[usize]) -> Result<C> {
    check_len(state, mus.len())?;
    if let Some(&bad) = first.iter().find(|&&i| i >= mus.len()) {
        return Err(Error::InvalidInput(format!("index {bad} out of range")));
    }
    let inside = |i: &usize| first.contains(i);
    let part = |keep: bool| {
        weighted_mean(
            (0..mus.len())
                .filter(|i| inside(i) == keep)
                .map(|i| (mus[i], state.positions[i])),
        )
        .map_err(|_| Error::ZeroSubtotalStrength)
    };
    Ok(part(true)? - part(false)?)
}

/// `conj(μ) z − conj(μ′) z′`, conserved by two poles of equal even degree.
pub fn even_degree_pair_invariant(z: C, z2: C, mu: C, mu2: C) -> C {
    mu.conj() * z - mu2.conj() * z2
}

fn vortex_weights(mus: &[C]) -> Result<Vec<f64>> {
    mus.iter()
        .enumerate()
        .map(|(i, mu)| {
            if mu.re != 0.0 {
                Err(Error::NonImaginaryStrength(format!(
                    "pole #{i} has μ = {mu}"
                )))
            } else {
                // −√−1 μ for μ = iΓ
                Ok(mu.im)
            }
        })
        .collect()
}

/// Momentum `ψ = −Σ √−1 μ_i σ(u_i)` conjugate to the symmetry of `seabed`,
/// with `u` the imaginary part, real part or squared radius.
pub fn noether_momentum(state: &SystemState, mus: &[C], seabed: &Seabed) -> Result<f64> {
    check_len(state, mus.len())?;
    let gammas = vortex_weights(mus)?;
    let sigma = seabed.antiderivative()?;
    Ok(gammas
        .iter()
        .zip(&state.positions)
        .map(|(g, &z)| g * sigma.at(z))
        .sum())
}

/// Quantity selected for a drift report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Quantity {
    /// Seabed-weighted logarithmic Hamiltonian.
    Hamiltonian,
    // Centers use the seabed-weighted strengths μ_i S(z_i), which are
    // constant between crossings on a piecewise-constant seabed.
    /// Hamiltonian of a homogeneous system of degree `n0` on a uniform seabed.
    HamiltonianHomogeneous {
        n0: i32,
    },
    CenterOfStrength,
    SubcenterDifference {
        first: Vec<usize>,
    },
    EvenDegreePair,
    NoetherMomentum,
    PairDistance {
        first: usize,
        second: usize,
    },
}

impl Quantity {
    pub fn name(&self) -> String {
        match self {
            Quantity::Hamiltonian => "hamiltonian".into(),
            Quantity::HamiltonianHomogeneous { n0 } => format!("hamiltonian-n{n0}"),
            Quantity::CenterOfStrength => "center-of-strength".into(),
            Quantity::SubcenterDifference { .. } => "subcenter-difference".into(),
            Quantity::EvenDegreePair => "even-degree-pair".into(),
            Quantity::NoetherMomentum => "noether-momentum".into(),
            Quantity::PairDistance { first, second } => format!("distance-{first}-{second}"),
        }
    }

    /// Quantities conserved only between boundary crossings.
    pub fn is_piecewise(&self) -> bool {
        matches!(
            self,
            Quantity::Hamiltonian
                | Quantity::HamiltonianHomogeneous { .. }
                | Quantity::CenterOfStrength
                | Quantity::SubcenterDifference { .. }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QuantityValue {
    Real(f64),
    Complex(C),
}

impl QuantityValue {
    fn distance(&self, other: &QuantityValue) -> f64 {
        match (self, other) {
            (QuantityValue::Real(a), QuantityValue::Real(b)) => (a - b).abs(),
            (QuantityValue::Complex(a), QuantityValue::Complex(b)) => (a - b).norm(),
            _ => f64::NAN,
        }
    }

    pub fn magnitude(&self) -> f64 {
        match self {
            QuantityValue::Real(a) => a.abs(),
            QuantityValue::Complex(a) => a.norm(),
        }
    }
}

/// Drift within one stretch of trajectory between boundary crossings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentDrift {
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
    pub start_value: QuantityValue,
    pub max_abs_drift: f64,
    pub max_rel_drift: f64,
}

/// Values of a quantity along a trajectory with drift statistics.
///
/// Relative drift divides by the larger of the reference value and the sum
/// of magnitudes of its terms, so quantities that vanish by cancellation are
/// not inflated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservedQuantityReport {
    pub quantity: String,
    #[serde(skip)]
    pub samples: Vec<(f64, QuantityValue)>,
    pub max_abs_drift: f64,
    pub max_rel_drift: f64,
    pub per_segment: Vec<SegmentDrift>,
}

/// Evaluates a quantity sample by sample, unwrapping logarithm branches.
struct Evaluator<'a> {
    quantity: &'a Quantity,
    mus: Vec<C>,
    seabed: &'a Seabed,
    args: Option<Vec<f64>>,
}

impl Evaluator<'_> {
    /// Value and term scale at one state.
    fn eval(&mut self, state: &SystemState) -> Result<(QuantityValue, f64)> {
        let mus = &self.mus;
        match self.quantity {
            Quantity::Hamiltonian | Quantity::HamiltonianHomogeneous { n0: -1 } => {
                let weights = match self.quantity {
                    Quantity::Hamiltonian => seabed_weights(state, mus, self.seabed),
                    _ => mus.clone(),
                };
                let pairs = weighted_pairs(state, &weights)?;
                let args: Vec<f64> = match &self.args {
                    None => pairs.iter().map(|(_, w)| w.arg()).collect(),
                    Some(prev) => pairs
                        .iter()
                        .zip(prev)
                        .map(|((_, w), p)| p + (w.arg() - p + PI).rem_euclid(2.0 * PI) - PI)
                        .collect(),
                };
                let mut value = 0.0;
                let mut scale = 0.0;
                for (&(k, w), &a) in pairs.iter().zip(&args) {
                    let term = log_term(k, w, a);
                    value += term;
                    scale += term.abs();
                }
                self.args = Some(args);
                Ok((QuantityValue::Real(value), scale))
            }
            Quantity::HamiltonianHomogeneous { n0 } => {
                let pairs = weighted_pairs(state, mus)?;
                let terms: Vec<f64> = pairs.iter().map(|&(k, w)| power_term(k, w, *n0)).collect();
                Ok((
                    QuantityValue::Real(terms.iter().sum()),
                    terms.iter().map(|t| t.abs()).sum(),
                ))
            }
            Quantity::CenterOfStrength => {
                let mus = &seabed_weights(state, mus, self.seabed);
                let c = center_of_strength(state, mus)?;
                let total: C = mus.iter().sum();
                let scale = mus
                    .iter()
                    .zip(&state.positions)
                    .map(|(m, z)| (m * z).norm())
                    .sum::<f64>()
                    / total.norm();
                Ok((QuantityValue::Complex(c), scale))
            }
            Quantity::SubcenterDifference { first } => {
                let mus = &seabed_weights(state, mus, self.seabed);
                let d = subcenter_difference(state, mus, first)?;
                let scale = state.positions.iter().map(|z| z.norm()).fold(0.0, f64::max);
                Ok((QuantityValue::Complex(d), scale))
            }
            Quantity::EvenDegreePair => {
                if mus.len() != 2 {
                    return Err(Error::InvalidInput(
                        "even-degree invariant needs 2 poles".into(),
                    ));
                }
                let (z, z2) = (state.positions[0], state.positions[1]);
                let v = even_degree_pair_invariant(z, z2, mus[0], mus[1]);
                Ok((
                    QuantityValue::Complex(v),
                    (mus[0] * z).norm() + (mus[1] * z2).norm(),
                ))
            }
            Quantity::NoetherMomentum => {
                let gammas = vortex_weights(mus)?;
                let sigma = self.seabed.antiderivative()?;
                let terms: Vec<f64> = gammas
                    .iter()
                    .zip(&state.positions)
                    .map(|(g, &z)| g * sigma.at(z))
                    .collect();
                Ok((
                    QuantityValue::Real(terms.iter().sum()),
                    terms.iter().map(|t| t.abs()).sum(),
                ))
            }
            Quantity::PairDistance { first, second } => {
                let n = state.len();
                if *first >= n || *second >= n {
                    return Err(Error::InvalidInput("pair index out of range".into()));
                }
                let d = (state.positions[*first] - state.positions[*second]).norm();
                Ok((QuantityValue::Real(d), d))
            }
        }
    }
}

fn strengths_for(quantity: &Quantity, poles: &[Pole]) -> Result<Vec<C>> {
    let accepts = |k: i32| match quantity {
        Quantity::HamiltonianHomogeneous { n0 } => k == *n0,
        Quantity::EvenDegreePair => k % 2 == 0,
        _ => k == -1,
    };
    if !matches!(
        quantity,
        Quantity::HamiltonianHomogeneous { .. } | Quantity::EvenDegreePair
    ) {
        return simple_strengths(poles);
    }
    poles
        .iter()
        .map(|p| {
            let mut terms = p.strength.iter();
            match (terms.next(), terms.next()) {
                (Some((k, mu)), None) if accepts(k) => Ok(mu),
                _ => Err(Error::UnsupportedStrength(format!(
                    "pole {} is not homogeneous of the required degree",
                    p.label
                ))),
            }
        })
        .collect()
}

/// Evaluates `quantity` at every sample of `trajectory` and summarizes its drift.
///
/// Piecewise quantities are compared against the value at the start of each
/// stretch between boundary crossings; the others against the first sample.
pub fn drift_report(
    trajectory: &Trajectory,
    poles: &[Pole],
    seabed: &Seabed,
    quantity: &Quantity,
) -> Result<ConservedQuantityReport> {
    if trajectory.samples.is_empty() {
        return Err(Error::InvalidInput("empty trajectory".into()));
    }
    let mut eval = Evaluator {
        quantity,
        mus: strengths_for(quantity, poles)?,
        seabed,
        args: None,
    };
    let mut values = Vec::with_capacity(trajectory.samples.len());
    let mut scales = Vec::with_capacity(trajectory.samples.len());
    for s in &trajectory.samples {
        check_len(s, poles.len())?;
        let (v, scale) = eval.eval(s)?;
        values.push((s.time, v));
        scales.push(scale);
    }

    let mut cuts: Vec<f64> = Vec::new();
    if quantity.is_piecewise() {
        for e in trajectory
            .events
            .iter()
            .filter(|e| e.kind == EventKind::BoundaryCrossing)
        {
            if cuts.last() != Some(&e.time) {
                cuts.push(e.time);
            }
        }
    }
    let mut per_segment = Vec::new();
    let mut start = 0;
    let mut cut_iter = cuts.iter().peekable();
    while start < values.len() {
        while cut_iter.peek().is_some_and(|&&c| c <= values[start].0) {
            cut_iter.next();
        }
        let end = match cut_iter.peek() {
            Some(&&c) => values[start..]
                .iter()
                .position(|(t, _)| *t >= c)
                .map_or(values.len(), |p| start + p),
            None => values.len(),
        };
        let reference = values[start].1;
        let norm = reference.magnitude().max(scales[start]);
        let max_abs = values[start..end]
            .iter()
            .map(|(_, v)| v.distance(&reference))
            .fold(0.0, f64::max);
        per_segment.push(SegmentDrift {
            t_start: values[start].0,
            t_end: values[end - 1].0,
            samples: end - start,
            start_value: reference,
            max_abs_drift: max_abs,
            max_rel_drift: if norm > 0.0 { max_abs / norm } else { max_abs },
        });
        start = end;
    }
    Ok(ConservedQuantityReport {
        quantity: quantity.name(),
        max_abs_drift: per_segment
            .iter()
            .map(|s| s.max_abs_drift)
            .fold(0.0, f64::max),
        max_rel_drift: per_segment
            .iter()
            .map(|s| s.max_rel_drift)
            .fold(0.0, f64::max),
        samples: values,
        per_segment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seabed::preset;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn st(zs: &[C]) -> SystemState {
        SystemState::new(0.0, zs.to_vec())
    }

    #[test]
    fn hamiltonian_examples() {
        let i = c(0.0, 1.0);
        assert_eq!(
            hamiltonian_homogeneous(&st(&[c(1.0, 0.0)]), &[i], -1).unwrap(),
            0.0
        );
        let unit = st(&[c(0.0, 0.0), c(1.0, 0.0)]);
        assert_abs_diff_eq!(hamiltonian_homogeneous(&unit, &[i, i], -1).unwrap(), 0.0);
        let e = st(&[c(std::f64::consts::E, 0.0), c(0.0, 0.0)]);
        assert_abs_diff_eq!(
            hamiltonian_homogeneous(&e, &[i, i], -1).unwrap(),
            -1.0,
            epsilon = 1e-15
        );
        assert!(hamiltonian_homogeneous(&st(&[c(0.0, 0.0), c(0.0, 0.0)]), &[i, i], -1).is_err());
    }

    #[test]
    fn power_hamiltonian() {
        // n0 = 1: Re(μμ′ w²/2)
        let s = st(&[c(1.0, 1.0), c(0.0, 0.0)]);
        let h = hamiltonian_homogeneous(&s, &[c(1.0, 0.0), c(2.0, 0.0)], 1).unwrap();
        assert_abs_diff_eq!(h, (c(2.0, 0.0) * c(1.0, 1.0).powi(2) / 2.0).re);
    }

    #[test]
    fn seabed_hamiltonian_scaling() {
        let s = st(&[c(0.3, -0.4), c(1.2, 0.5)]);
        let mus = [c(0.0, 1.0), c(0.0, -2.0)];
        let h1 = hamiltonian_seabed(&s, &mus, &Seabed::constant(1.0)).unwrap();
        assert_abs_diff_eq!(h1, hamiltonian_homogeneous(&s, &mus, -1).unwrap());
        let h2 = hamiltonian_seabed(&s, &mus, &Seabed::constant(2.0)).unwrap();
        assert_abs_diff_eq!(h2, 4.0 * h1, epsilon = 1e-14);
        let straddle = st(&[c(0.0, -0.5), c(0.0, 1.5)]);
        let step = Seabed::horizontal_step(0.0, 2.0, 3.0);
        let hs = hamiltonian_seabed(&straddle, &mus, &step).unwrap();
        let h = hamiltonian_homogeneous(&straddle, &mus, -1).unwrap();
        assert_abs_diff_eq!(hs, 6.0 * h, epsilon = 1e-14);
    }

    #[test]
    fn centers() {
        let s = st(&[c(0.0, 0.0), c(2.0, 2.0)]);
        assert_eq!(
            center_of_strength(&s, &[c(0.0, 1.0), c(0.0, 1.0)]).unwrap(),
            c(1.0, 1.0)
        );
        let s = st(&[c(0.0, 0.0), c(3.0, 0.0)]);
        let cs = center_of_strength(&s, &[c(0.0, 1.0), c(0.0, 2.0)]).unwrap();
        assert!((cs - c(2.0, 0.0)).norm() < 1e-15);
        assert!(matches!(
            center_of_strength(&s, &[c(0.0, 1.0), c(0.0, -1.0)]),
            Err(Error::ZeroTotalStrength)
        ));
        let d = subcenter_difference(&s, &[c(0.0, 1.0), c(0.0, -1.0)], &[0]).unwrap();
        assert_eq!(d, c(-3.0, 0.0));
        let s4 = st(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)]);
        assert!(matches!(
            subcenter_difference(
                &s4,
                &[c(0.0, 1.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, -1.0)],
                &[0, 1]
            ),
            Err(Error::ZeroSubtotalStrength)
        ));
    }

    #[test]
    fn even_degree_examples() {
        let (mu, z) = (c(0.5, 0.7), c(0.2, -1.0));
        assert_eq!(
            even_degree_pair_invariant(z, -z, mu, mu),
            mu.conj() * z * 2.0
        );
        assert_eq!(
            even_degree_pair_invariant(c(0.0, 1.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)),
            c(-2.0, 1.0)
        );
    }

    #[test]
    fn noether_examples() {
        let mus = [c(0.0, 1.0), c(0.0, -1.0)];
        let (z, z2) = (c(0.3, 0.7), c(-0.2, 1.9));
        let s = st(&[z, z2]);
        let linear = preset("linear-seabed").unwrap();
        assert_abs_diff_eq!(
            noether_momentum(&s, &mus, &linear).unwrap(),
            0.5 * (z.im * z.im - z2.im * z2.im),
            epsilon = 1e-14
        );
        let disk = Seabed::RadialStep {
            radius: 0.1,
            inside: 2.0,
            outside: 1.0,
        };
        // outside the disk σ(u) = u + (inside − outside)·r²
        let psi = noether_momentum(&s, &mus, &disk).unwrap();
        assert_abs_diff_eq!(psi, z.norm_sqr() - z2.norm_sqr(), epsilon = 1e-14);
        let flat = noether_momentum(&s, &mus, &Seabed::constant(1.0)).unwrap();
        assert_abs_diff_eq!(flat, z.im - z2.im, epsilon = 1e-15);
        assert!(matches!(
            noether_momentum(&s, &[c(1.0, 1.0), c(0.0, 1.0)], &linear),
            Err(Error::NonImaginaryStrength(_))
        ));
        assert!(matches!(
            noether_momentum(&s, &mus, &preset("caustic-arc").unwrap()),
            Err(Error::NoSymmetry)
        ));
    }

    #[test]
    fn exact_trajectory_has_zero_drift() {
        // uniform rotation of a pair of equal vortices, sampled exactly
        let mus = [c(0.0, 1.0), c(0.0, 1.0)];
        let poles = vec![
            Pole::simple("a", c(1.0, 0.0), mus[0]),
            Pole::simple("b", c(-1.0, 0.0), mus[1]),
        ];
        let mut traj = Trajectory::new(vec!["a".into(), "b".into()]);
        for k in 0..50 {
            let t = k as f64 * 0.3;
            let z = c(1.0, 0.0) * C::from_polar(1.0, -t / 2.0);
            traj.push_sample(SystemState::new(t, vec![z, -z]));
        }
        let flat = Seabed::constant(1.0);
        for q in [
            Quantity::Hamiltonian,
            Quantity::CenterOfStrength,
            Quantity::NoetherMomentum,
        ] {
            let r = drift_report(&traj, &poles, &flat, &q).unwrap();
            assert!(r.max_abs_drift < 1e-14, "{q:?} {}", r.max_abs_drift);
        }
    }

    #[test]
    fn log_branch_is_unwrapped() {
        // complex weights make the arg term visible; winding twice must not jump
        let mus = [c(1.0, 1.0), c(1.0, 0.0)];
        let poles = vec![
            Pole::simple("a", c(1.0, 0.0), mus[0]),
            Pole::simple("b", c(0.0, 0.0), mus[1]),
        ];
        let mut traj = Trajectory::new(vec!["a".into(), "b".into()]);
        for k in 0..=100 {
            let phi = 4.0 * PI * k as f64 / 100.0;
            traj.push_sample(SystemState::new(
                k as f64,
                vec![C::from_polar(1.0, phi), c(0.0, 0.0)],
            ));
        }
        let r = drift_report(
            &traj,
            &poles,
            &Seabed::constant(1.0),
            &Quantity::Hamiltonian,
        )
        .unwrap();
        // Im(μμ′) = 1: H = −arg, unwrapped to −4π
        let QuantityValue::Real(last) = r.samples.last().unwrap().1 else {
            panic!()
        };
        assert_abs_diff_eq!(last, -4.0 * PI, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn noether_flat_matches_impulse(x in -3.0f64..3.0, y in -3.0f64..3.0, g in 0.1f64..3.0) {
            let s = st(&[c(x, y), c(y, x)]);
            let mus = [c(0.0, g), c(0.0, 1.0)];
            let psi = noether_momentum(&s, &mus, &Seabed::constant(1.0)).unwrap();
            prop_assert!((psi - (g * y + x)).abs() < 1e-12);
            let disk = Seabed::RadialStep { radius: 1e-3, inside: 1.0, outside: 1.0 };
            let ang = noether_momentum(&s, &mus, &disk).unwrap();
            prop_assert!((ang - (g + 1.0) * (x * x + y * y)).abs() < 1e-10);
        }
    }
}
