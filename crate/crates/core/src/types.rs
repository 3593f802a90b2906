//! Shared domain types: poles, strengths, states and trajectories.

use std::collections::{BTreeMap, HashSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the complex plane.
pub type ComplexNumber = Complex64;

pub(crate) fn is_finite(z: ComplexNumber) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Strength coefficients `μ_n` of a pole, keyed by the integer exponent `n`.
///
/// Only the exponents present in the map contribute; zero coefficients are
/// dropped on insertion so the map stays finite and canonical.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct StrengthSpec {
    coefficients: BTreeMap<i32, ComplexNumber>,
}

impl StrengthSpec {
    pub fn new() -> Self {
        Self::default()
    }

    /// Homogeneous strength with a single exponent.
    pub fn homogeneous(n: i32, mu: ComplexNumber) -> Self {
        Self::new().with(n, mu)
    }

    /// The usual `n = -1` pole (vortex, source/sink or spiral node).
    pub fn simple(mu: ComplexNumber) -> Self {
        Self::homogeneous(-1, mu)
    }

    pub fn with(mut self, n: i32, mu: ComplexNumber) -> Self {
        self.set(n, mu);
        self
    }

    pub fn set(&mut self, n: i32, mu: ComplexNumber) {
        if mu == ComplexNumber::new(0.0, 0.0) {
            self.coefficients.remove(&n);
        } else {
            self.coefficients.insert(n, mu);
        }
    }

    pub fn get(&self, n: i32) -> ComplexNumber {
        self.coefficients.get(&n).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, ComplexNumber)> + '_ {
        self.coefficients.iter().map(|(&n, &mu)| (n, mu))
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// The single exponent, if the spec is homogeneous.
    pub fn degree(&self) -> Option<i32> {
        let mut keys = self.coefficients.keys();
        match (keys.next(), keys.next()) {
            (Some(&n), None) => Some(n),
            _ => None,
        }
    }

    /// Coefficient of the `n = -1` term when that is the only exponent.
    /// An empty spec counts as the zero pole.
    pub fn simple_strength(&self) -> Option<ComplexNumber> {
        if self.is_empty() {
            return Some(ComplexNumber::default());
        }
        match self.degree() {
            Some(-1) => Some(self.get(-1)),
            _ => None,
        }
    }
}

/// A pole: an initial position, its strengths and a unique label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub label: String,
    pub position: ComplexNumber,
    pub strength: StrengthSpec,
}

impl Pole {
    pub fn new(label: impl Into<String>, position: ComplexNumber, strength: StrengthSpec) -> Self {
        Self {
            label: label.into(),
            position,
            strength,
        }
    }

    /// Pole with a single `n = -1` strength.
    pub fn simple(label: impl Into<String>, position: ComplexNumber, mu: ComplexNumber) -> Self {
        Self::new(label, position, StrengthSpec::simple(mu))
    }
}

/// Checks label uniqueness and finiteness of positions and coefficients.
pub fn validate_poles(poles: &[Pole]) -> Result<()> {
    let mut seen = HashSet::new();
    for pole in poles {
        if !seen.insert(pole.label.as_str()) {
            return Err(Error::DuplicateLabel(pole.label.clone()));
        }
        if !is_finite(pole.position) {
            return Err(Error::NonFinite("pole position"));
        }
        if pole.strength.iter().any(|(_, mu)| !is_finite(mu)) {
            return Err(Error::NonFinite("pole strength"));
        }
    }
    Ok(())
}

/// Extracts the `n = -1` coefficients, failing for any other exponent.
pub fn simple_strengths(poles: &[Pole]) -> Result<Vec<ComplexNumber>> {
    poles
        .iter()
        .map(|p| {
            p.strength.simple_strength().ok_or_else(|| {
                Error::UnsupportedStrength(format!(
                    "pole `{}` has exponents other than -1",
                    p.label
                ))
            })
        })
        .collect()
}

/// Positions of all poles at one instant, in pole order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemState {
    pub time: f64,
    pub positions: Vec<ComplexNumber>,
}

impl SystemState {
    pub fn new(time: f64, positions: Vec<ComplexNumber>) -> Self {
        Self { time, positions }
    }

    /// The initial state encoded in the poles' positions.
    pub fn from_poles(poles: &[Pole]) -> Self {
        Self::new(0.0, poles.iter().map(|p| p.position).collect())
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn min_separation(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..self.positions.len() {
            for j in i + 1..self.positions.len() {
                let d = (self.positions[i] - self.positions[j]).norm();
                if best.is_none_or(|(_, _, b)| d < b) {
                    best = Some((i, j, d));
                }
            }
        }
        best
    }

    /// Fails with [`Error::Collision`] if two poles are closer than `threshold`.
    pub fn check_separated(&self, poles: &[Pole], threshold: f64) -> Result<()> {
        if self.positions.len() != poles.len() {
            return Err(Error::LengthMismatch {
                positions: self.positions.len(),
                poles: poles.len(),
            });
        }
        if self.positions.iter().any(|&z| !is_finite(z)) {
            return Err(Error::NonFinite("state position"));
        }
        match self.min_separation() {
            Some((i, j, d)) if d <= threshold => Err(Error::Collision {
                first: poles[i].label.clone(),
                second: poles[j].label.clone(),
                separation: d,
                threshold,
            }),
            _ => Ok(()),
        }
    }
}

/// Label pair and distance between two poles.
#[derive(Debug, Clone, PartialEq)]
pub struct Separation {
    pub first: String,
    pub second: String,
    pub distance: f64,
}

/// `|z_i - z_j|` for every pair `i < j`, keyed by labels.
pub fn pairwise_separations(state: &SystemState, poles: &[Pole]) -> Result<Vec<Separation>> {
    if state.positions.len() != poles.len() {
        return Err(Error::LengthMismatch {
            positions: state.positions.len(),
            poles: poles.len(),
        });
    }
    if poles.len() < 2 {
        return Err(Error::InvalidInput(
            "pairwise separations need at least two poles".into(),
        ));
    }
    let mut out = Vec::with_capacity(poles.len() * (poles.len() - 1) / 2);
    for i in 0..poles.len() {
        for j in i + 1..poles.len() {
            out.push(Separation {
                first: poles[i].label.clone(),
                second: poles[j].label.clone(),
                distance: (state.positions[i] - state.positions[j]).norm(),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    BoundaryCrossing,
    Collision,
    ZenoTrap,
    Horizon,
    /// Integration could not continue (lost bracket, step underflow).
    Failure,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::BoundaryCrossing => "boundary-crossing",
            EventKind::Collision => "collision",
            EventKind::ZenoTrap => "zeno-trap",
            EventKind::Horizon => "horizon",
            EventKind::Failure => "failure",
        }
    }

    /// Whether the event ends the trajectory.
    pub fn is_terminal(self) -> bool {
        !matches!(self, EventKind::BoundaryCrossing)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub kind: EventKind,
    pub time: f64,
    pub pole: Option<String>,
    pub location: ComplexNumber,
    pub detail: Option<String>,
}

/// Time-ordered samples of a run, with the events that occurred along it.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub labels: Vec<String>,
    pub samples: Vec<SystemState>,
    pub events: Vec<Event>,
}

impl Trajectory {
    pub fn new(labels: Vec<String>) -> Self {
        Self {
            labels,
            samples: Vec::new(),
            events: Vec::new(),
        }
    }

    /// Appends a sample; a sample at an already recorded time replaces the last one.
    pub fn push_sample(&mut self, state: SystemState) {
        if let Some(last) = self.samples.last_mut() {
            if state.time <= last.time {
                debug_assert!(state.time == last.time, "samples must be time ordered");
                *last = state;
                return;
            }
        }
        self.samples.push(state);
    }

    pub fn first(&self) -> Option<&SystemState> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&SystemState> {
        self.samples.last()
    }

    pub fn terminal_event(&self) -> Option<&Event> {
        self.events.iter().rev().find(|e| e.kind.is_terminal())
    }

    pub fn crossings(&self) -> impl Iterator<Item = &Event> {
        self.events
            .iter()
            .filter(|e| e.kind == EventKind::BoundaryCrossing)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Whether the run ended for a reason other than reaching `t_end`.
    pub fn ended_early(&self) -> bool {
        self.terminal_event()
            .is_some_and(|e| e.kind != EventKind::Horizon)
    }

    /// Sample positions of the pole with the given index.
    pub fn path(&self, index: usize) -> impl Iterator<Item = (f64, ComplexNumber)> + '_ {
        self.samples
            .iter()
            .map(move |s| (s.time, s.positions[index]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> ComplexNumber {
        ComplexNumber::new(re, im)
    }

    fn poles_at(zs: &[ComplexNumber]) -> Vec<Pole> {
        zs.iter()
            .enumerate()
            .map(|(i, &z)| Pole::simple(format!("p{i}"), z, c(0.0, 1.0)))
            .collect()
    }

    #[test]
    fn unit_separation() {
        let poles = poles_at(&[c(0.0, 0.0), c(0.0, 1.0)]);
        let seps = pairwise_separations(&SystemState::from_poles(&poles), &poles).unwrap();
        assert_eq!(seps.len(), 1);
        assert_eq!(seps[0].distance, 1.0);
        assert_eq!(
            (seps[0].first.as_str(), seps[0].second.as_str()),
            ("p0", "p1")
        );
    }

    #[test]
    fn right_isoceles_triangle() {
        let poles = poles_at(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]);
        let seps = pairwise_separations(&SystemState::from_poles(&poles), &poles).unwrap();
        let d: Vec<f64> = seps.iter().map(|s| s.distance).collect();
        assert_eq!(d[0], 1.0);
        assert_eq!(d[1], 1.0);
        assert!((d[2] - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn three_four_five() {
        let poles = poles_at(&[c(3.0, 4.0), c(0.0, 0.0)]);
        let seps = pairwise_separations(&SystemState::from_poles(&poles), &poles).unwrap();
        assert_eq!(seps[0].distance, 5.0);
    }

    #[test]
    fn single_pole_is_rejected() {
        let poles = poles_at(&[c(0.0, 0.0)]);
        assert!(pairwise_separations(&SystemState::from_poles(&poles), &poles).is_err());
    }

    #[test]
    fn duplicate_labels_rejected() {
        let poles = vec![
            Pole::simple("a", c(0.0, 0.0), c(0.0, 1.0)),
            Pole::simple("a", c(1.0, 0.0), c(0.0, 1.0)),
        ];
        assert_eq!(
            validate_poles(&poles),
            Err(Error::DuplicateLabel("a".into()))
        );
    }

    #[test]
    fn strength_spec_drops_zeros() {
        let spec = StrengthSpec::new()
            .with(-1, c(0.0, 1.0))
            .with(2, c(0.0, 0.0));
        assert_eq!(spec.degree(), Some(-1));
        assert_eq!(spec.simple_strength(), Some(c(0.0, 1.0)));
        let mixed = spec.with(0, c(1.0, 0.0));
        assert_eq!(mixed.degree(), None);
        assert_eq!(mixed.simple_strength(), None);
    }

    proptest! {
        #[test]
        fn separations_invariant_under_rigid_motion(
            pts in proptest::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 2..6),
            angle in 0.0..std::f64::consts::TAU,
            shift in (-5.0..5.0f64, -5.0..5.0f64),
        ) {
            let zs: Vec<_> = pts.iter().map(|&(x, y)| c(x, y)).collect();
            let poles = poles_at(&zs);
            let base = pairwise_separations(&SystemState::from_poles(&poles), &poles).unwrap();
            let rot = ComplexNumber::from_polar(1.0, angle);
            let moved: Vec<_> = zs.iter().map(|&z| rot * z + c(shift.0, shift.1)).collect();
            let moved_poles = poles_at(&moved);
            let after = pairwise_separations(&SystemState::from_poles(&moved_poles), &moved_poles).unwrap();
            for (a, b) in base.iter().zip(&after) {
                prop_assert!((a.distance - b.distance).abs() <= 1e-12 * (1.0 + a.distance));
            }
            // relabeling: reversing the pole order gives the same multiset of distances
            let mut rev = zs.clone();
            rev.reverse();
            let rev_poles = poles_at(&rev);
            let mut d1: Vec<f64> = base.iter().map(|s| s.distance).collect();
            let mut d2: Vec<f64> = pairwise_separations(&SystemState::from_poles(&rev_poles), &rev_poles)
                .unwrap().iter().map(|s| s.distance).collect();
            d1.sort_by(f64::total_cmp);
            d2.sort_by(f64::total_cmp);
            prop_assert_eq!(d1, d2);
        }
    }
}
