use num_complex::Complex64 as C;
use poleflow::invariants::{drift_report, Quantity};
use poleflow::seabed::preset;
use poleflow::{integrate, IntegratorConfig, Pole, Seabed, StrengthSpec, SystemState};
use proptest::prelude::*;

fn run(poles: &[Pole], seabed: &Seabed, t_end: f64) -> poleflow::Trajectory {
    let cfg = IntegratorConfig::default().with_t_end(t_end);
    integrate(&SystemState::from_poles(poles), poles, seabed, &cfg).unwrap()
}

fn vortices() -> Vec<Pole> {
    vec![
        Pole::simple("a", C::new(0.0, 0.0), C::new(0.0, 1.0)),
        Pole::simple("b", C::new(1.0, 0.2), C::new(0.0, -0.6)),
        Pole::simple("c", C::new(0.4, 1.1), C::new(0.0, 1.5)),
    ]
}

#[test]
fn hamiltonian_is_conserved_on_flat_seabed() {
    let poles = vortices();
    let flat = Seabed::constant(1.0);
    let traj = run(&poles, &flat, 5.0);
    let r = drift_report(&traj, &poles, &flat, &Quantity::Hamiltonian).unwrap();
    assert!(r.max_rel_drift < 1e-6, "{}", r.max_rel_drift);
}

#[test]
fn center_of_strength_is_conserved() {
    let poles = vec![
        Pole::simple("a", C::new(0.0, 0.0), C::new(0.3, 1.0)),
        Pole::simple("b", C::new(1.0, 0.2), C::new(-0.2, -0.6)),
        Pole::simple("c", C::new(0.4, 1.1), C::new(0.1, 1.5)),
    ];
    let flat = Seabed::constant(1.0);
    let traj = run(&poles, &flat, 2.0);
    let r = drift_report(&traj, &poles, &flat, &Quantity::CenterOfStrength).unwrap();
    assert!(r.max_abs_drift < 1e-8, "{}", r.max_abs_drift);
}

#[test]
fn subcenter_difference_is_conserved_for_zero_total() {
    let i = C::new(0.0, 1.0);
    let poles = vec![
        Pole::simple("a", C::new(0.0, 0.0), i),
        Pole::simple("b", C::new(0.5, 0.1), i * 2.0),
        Pole::simple("c", C::new(0.1, 1.0), -i * 1.5),
        Pole::simple("d", C::new(0.9, 0.8), -i * 1.5),
    ];
    let flat = Seabed::constant(1.0);
    let traj = run(&poles, &flat, 2.0);
    let q = Quantity::SubcenterDifference { first: vec![0, 1] };
    let r = drift_report(&traj, &poles, &flat, &q).unwrap();
    assert!(r.max_abs_drift < 1e-8, "{}", r.max_abs_drift);
}

#[test]
fn even_degree_pair_invariant_is_conserved() {
    for n in [0, 2] {
        let poles = vec![
            Pole::new(
                "a",
                C::new(0.0, 0.0),
                StrengthSpec::homogeneous(n, C::new(0.5, 1.0)),
            ),
            Pole::new(
                "b",
                C::new(1.0, 0.3),
                StrengthSpec::homogeneous(n, C::new(-0.3, 0.4)),
            ),
        ];
        let flat = Seabed::constant(1.0);
        let traj = run(&poles, &flat, 0.5);
        let r = drift_report(&traj, &poles, &flat, &Quantity::EvenDegreePair).unwrap();
        assert!(r.max_abs_drift < 1e-9, "n = {n}: {}", r.max_abs_drift);
    }
}

#[test]
fn homogeneous_hamiltonian_is_conserved_for_vortices() {
    // odd degrees, where G(z_i - z_j) is a consistent pair potential
    for n in [-1, 1, 3] {
        let poles = vec![
            Pole::new(
                "a",
                C::new(0.0, 0.0),
                StrengthSpec::homogeneous(n, C::new(0.0, 1.0)),
            ),
            Pole::new(
                "b",
                C::new(1.0, 0.3),
                StrengthSpec::homogeneous(n, C::new(0.0, -0.4)),
            ),
            Pole::new(
                "c",
                C::new(0.2, 0.9),
                StrengthSpec::homogeneous(n, C::new(0.0, 0.7)),
            ),
        ];
        let flat = Seabed::constant(1.0);
        let traj = run(&poles, &flat, 0.5);
        let h = drift_report(
            &traj,
            &poles,
            &flat,
            &Quantity::HamiltonianHomogeneous { n0: n },
        )
        .unwrap();
        assert!(h.max_rel_drift < 1e-6, "n = {n}: {}", h.max_rel_drift);
    }
}

#[test]
fn noether_momentum_survives_crossings() {
    let i = C::new(0.0, 1.0);
    let poles = vec![
        Pole::simple("z", C::new(-0.04, -0.05), -i),
        Pole::simple("w", C::new(0.0, -0.02), i),
    ];
    for name in ["snell-step", "sloped-step", "linear-seabed"] {
        let seabed = preset(name).unwrap();
        let traj = run(&poles, &seabed, 0.1);
        let r = drift_report(&traj, &poles, &seabed, &Quantity::NoetherMomentum).unwrap();
        assert!(r.max_rel_drift < 1e-6, "{name}: {}", r.max_rel_drift);
    }
}

#[test]
fn center_jumps_at_crossings_but_is_flat_between() {
    let mu = C::new(0.0, 1.0);
    let poles = vec![
        Pole::simple("z", C::new(-0.04, -0.05), -mu * 3.0),
        Pole::simple("w", C::new(0.0, -0.02), mu),
    ];
    let seabed = preset("snell-step").unwrap();
    let traj = run(&poles, &seabed, 0.1);
    let mut times: Vec<f64> = traj.crossings().map(|e| e.time).collect();
    times.dedup();
    assert!(times.len() >= 2);
    let r = drift_report(&traj, &poles, &seabed, &Quantity::CenterOfStrength).unwrap();
    assert_eq!(r.per_segment.len(), times.len() + 1);
    for seg in &r.per_segment {
        assert!(seg.max_abs_drift < 1e-8, "{seg:?}");
    }
    let jump =
        (r.per_segment[1].start_value.magnitude() - r.per_segment[0].start_value.magnitude()).abs();
    assert!(jump > 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pair_distance_is_conserved_on_any_seabed(
        x in -0.5f64..0.5, y in -0.5f64..0.5, phi in 0.0f64..std::f64::consts::TAU, which in 0usize..5,
    ) {
        let names = ["snell-step", "linear-seabed", "rainbow-disk", "trough", "leapfrog-bump"];
        let seabed = preset(names[which]).unwrap();
        let i = C::new(0.0, 1.0);
        let z = C::new(x, y);
        let poles = vec![Pole::simple("z", z, -i), Pole::simple("w", z + C::from_polar(0.05, phi), i)];
        let traj = run(&poles, &seabed, 0.05);
        let r = drift_report(&traj, &poles, &seabed, &Quantity::PairDistance { first: 0, second: 1 }).unwrap();
        prop_assert!(r.max_rel_drift < 1e-6, "{}", r.max_rel_drift);
    }

    #[test]
    fn time_reversal_returns_to_start(x in -1.0f64..1.0, y in -1.0f64..1.0, g in 0.5f64..2.0) {
        let poles = vec![
            Pole::simple("a", C::new(x, y), C::new(0.0, g)),
            Pole::simple("b", C::new(x + 0.7, y - 0.2), C::new(0.0, 1.0)),
            Pole::simple("c", C::new(x - 0.3, y + 0.6), C::new(0.2, -0.8)),
        ];
        let seabed = preset("linear-seabed").unwrap().scaled(0.3);
        let shifted = match seabed {
            Seabed::LinearOfIm { slope, .. } => Seabed::LinearOfIm { slope, offset: 2.0 },
            other => other,
        };
        let fwd = run(&poles, &shifted, 0.5);
        let mid = fwd.last().unwrap().clone();
        let back = integrate(
            &SystemState::new(0.0, mid.positions.clone()),
            &poles,
            &shifted.negated(),
            &IntegratorConfig::default().with_t_end(0.5),
        ).unwrap();
        for (a, b) in back.last().unwrap().positions.iter().zip(&fwd.first().unwrap().positions) {
            prop_assert!((a - b).norm() < 1e-6);
        }
    }

    #[test]
    fn tighter_tolerance_changes_little(x in -1.0f64..1.0) {
        let mut poles = vortices();
        poles[0].position = C::new(x, 0.0);
        let flat = Seabed::constant(1.0);
        let s0 = SystemState::from_poles(&poles);
        let a = integrate(&s0, &poles, &flat, &IntegratorConfig::default()).unwrap();
        let b = integrate(&s0, &poles, &flat, &IntegratorConfig::default().with_tolerances(5e-10, 5e-12)).unwrap();
        for (p, q) in a.last().unwrap().positions.iter().zip(&b.last().unwrap().positions) {
            prop_assert!((p - q).norm() < 1e-7);
        }
    }
}
