use std::f64::consts::{FRAC_PI_2, PI};

use bakernmr::nmr::*;
use bakernmr::qstate::{self, c, max_abs, phase_invariant_distance, Mat, UnitaryOperator};
use bakernmr::Error;
use proptest::prelude::*;

fn exact() -> HamiltonianModel {
    HamiltonianModel::exact_ratio()
}

fn z_of(idx: usize, s: Spin) -> f64 {
    let shift = match s {
        Spin::H => 2,
        Spin::C1 => 1,
        Spin::C2 => 0,
    };
    if (idx >> shift) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn dist(a: &UnitaryOperator, b: &UnitaryOperator) -> f64 {
    phase_invariant_distance(a, b).unwrap()
}

#[test]
fn hamiltonian_diagonal_from_spin_values() {
    let m = HamiltonianModel::measured(HamiltonianVariant::NoXY);
    let h = hamiltonian_matrix(&m);
    for i in 0..8 {
        let (zh, z1, z2) = (z_of(i, Spin::H), z_of(i, Spin::C1), z_of(i, Spin::C2));
        let e = (J1 * zh * z1 + J2 * z1 * z2 + J3 * zh * z2) / 4.0 + DELTA * z2 / 2.0;
        assert!((h.matrix()[(i, i)] - c(e, 0.0)).norm() < 1e-12);
        for j in 0..8 {
            if i != j {
                assert_eq!(h.matrix()[(i, j)], c(0.0, 0.0));
            }
        }
    }
}

#[test]
fn full_hamiltonian_has_carbon_flip_flop() {
    let m = HamiltonianModel::measured(HamiltonianVariant::Full).with_convention(FrequencyConvention::Cycles);
    let h = hamiltonian_matrix(&m);
    // |H C1 C2> = |0 0 1> (index 1) couples to |0 1 0> (index 2)
    let want = J2 * 2.0 * PI / 2.0;
    assert!((h.matrix()[(1, 2)] - c(want, 0.0)).norm() < 1e-9);
    assert!((h.matrix()[(5, 6)] - c(want, 0.0)).norm() < 1e-9);
    assert_eq!(h.matrix()[(1, 4)], c(0.0, 0.0));
}

#[test]
fn variant_and_convention_parse() {
    assert_eq!("noxy".parse::<HamiltonianVariant>().unwrap(), HamiltonianVariant::NoXY);
    assert_eq!("cycles".parse::<FrequencyConvention>().unwrap(), FrequencyConvention::Cycles);
    assert_eq!("C2".parse::<Spin>().unwrap(), Spin::C2);
    assert!("c2".parse::<Spin>().is_err());
    assert!("hz".parse::<FrequencyConvention>().is_err());
}

#[test]
fn canned_sequences_match_targets() {
    let m = exact();
    assert!(dist(&sequence_unitary(&t_odd(&m), &m).unwrap(), &ideal_t_odd()) < 1e-10);
    assert!(dist(&sequence_unitary(&t_even(&m), &m).unwrap(), &ideal_t_even()) < 1e-10);
    assert!(dist(&sequence_unitary(&t_regular(&m), &m).unwrap(), &ideal_t_regular(&m)) < 1e-10);
    assert!(dist(&sequence_unitary(&full_baker(&m), &m).unwrap(), &ideal_full_baker()) < 1e-10);
}

#[test]
fn uncorrected_even_step_misses() {
    let m = exact();
    let d = dist(&sequence_unitary(&t_even_uncorrected(&m), &m).unwrap(), &ideal_t_even());
    assert!(d > 1e-2, "distance {d}");
}

#[test]
fn measured_couplings_are_close_but_not_exact() {
    let m = HamiltonianModel::default();
    let d = dist(&sequence_unitary(&t_odd(&m), &m).unwrap(), &ideal_t_odd());
    assert!(d > 1e-10 && d < 0.1, "distance {d}");
}

#[test]
fn delays_in_units_of_tau1() {
    let m = exact();
    let t1 = m.tau1();
    assert!((t_odd(&m).total_delay() / t1 - 7.0).abs() < 1e-12);
    assert!((t_even(&m).total_delay() / t1 - 14.0).abs() < 1e-12);
    assert!((t_regular(&m).total_delay() / t1 - 10.5).abs() < 1e-12);
    // the regular map lasts as long as an average chaotic step
    assert!((t_regular(&m).total_delay() - 0.5 * (t_odd(&m).total_delay() + t_even(&m).total_delay())).abs() < 1e-15);
}

#[test]
fn steps_are_the_simplified_map_under_relabeling() {
    // odd step: bits (C1, H, C2) in, (C1, C2, H) out
    let odd = labeled_simplified_map([Spin::C1, Spin::H, Spin::C2]).unwrap();
    let relabel = spin_swap(Spin::H, Spin::C2).unwrap();
    assert!(dist(&(&relabel * &ideal_t_odd()), &odd) < 1e-12);
    // even step: bits (C1, C2, H) in, (C1, H, C2) out
    let even = labeled_simplified_map([Spin::C1, Spin::C2, Spin::H]).unwrap();
    assert!(dist(&(&relabel * &ideal_t_even()), &even) < 1e-12);
    // two steps return the bits to their starting spins
    let two = &ideal_t_even() * &ideal_t_odd();
    assert!(dist(&two, &(&odd * &odd)) < 1e-12);
}

#[test]
fn cnot_is_anti_controlled() {
    let m = exact();
    let u = sequence_unitary(&cnot_pulses(Spin::C1, Spin::H, &m).unwrap(), &m).unwrap();
    // -X on C1 when H is |0>, identity otherwise: an anti-controlled NOT
    // times Z on the control
    let x = -qstate::pauli_x();
    let p0 = Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]));
    let p1 = qstate::identity(2) - &p0;
    let want = embed_spins(&qstate::kron(&p0, &x).unwrap(), &[Spin::H, Spin::C1]).unwrap()
        + embed_spins(&qstate::kron(&p1, &qstate::identity(2)).unwrap(), &[Spin::H, Spin::C1]).unwrap();
    assert!(dist(&u, &UnitaryOperator::new(want).unwrap()) < 1e-10);
}

#[test]
fn swap_pulses_swap_and_square_to_identity() {
    let m = exact();
    for (a, b) in [(Spin::C1, Spin::H), (Spin::C2, Spin::C1)] {
        let seq = swap_pulses(a, b, &m).unwrap();
        let u = sequence_unitary(&seq, &m).unwrap();
        assert!(dist(&u, &spin_swap(a, b).unwrap()) < 1e-10);
        let uu = &u * &u;
        assert!(dist(&uu, &UnitaryOperator::identity(8)) < 1e-10);
    }
    assert!(matches!(swap_pulses(Spin::H, Spin::C2, &m), Err(Error::NotNeighbors(..))));
}

#[test]
fn phase_gate_edge_cases() {
    let m = exact();
    assert!(phase_gate_pulses(Pair::C1H, 0.0, &m).unwrap().is_empty());
    assert!(phase_gate_pulses(Pair::C1H, -0.3, &m).is_err());
    assert!(matches!(phase_gate_pulses(Pair::C1C2, f64::NAN, &m), Err(Error::NonFiniteAngle)));
    assert!(nmr_phase_gate(Spin::H, Spin::H, 1.0).is_err());
    assert!(z_rotation_pulses(Spin::H, 1.0, 5).is_err());
    assert!(hadamard_pulses(Spin::H, 0).is_err());
}

#[test]
fn nmr_phase_gate_phases_the_zero_zero_state() {
    let u = nmr_phase_gate(Spin::C1, Spin::C2, 0.7).unwrap();
    // relative to |11>, only states with C1 = C2 = 0 pick up e^{i 0.7}
    let m = u.matrix();
    let base = m[(3, 3)];
    for i in 0..8 {
        let ratio = m[(i, i)] / base;
        let want: f64 = if z_of(i, Spin::C1) > 0.0 && z_of(i, Spin::C2) > 0.0 { 0.7 } else { 0.0 };
        assert!((ratio - c(want.cos(), want.sin())).norm() < 1e-14, "index {i}");
    }
}

#[test]
fn dump_parse_roundtrip_is_exact() {
    let m = HamiltonianModel::default().with_convention(FrequencyConvention::Cycles);
    for name in ["t_odd", "t_even", "t_even_uncorrected", "t_regular", "full_baker"] {
        let seq = named_sequence(name, &m).unwrap();
        let text = dump(&seq);
        let back = parse(&text).unwrap();
        assert_eq!(back, seq, "{name}");
        assert_eq!(dump(&back), text);
    }
    assert!(named_sequence("t_weird", &m).is_err());
}

#[test]
fn parse_reports_line_numbers() {
    let text = "# name=x convention=angular\n# order=execution\nX H 1.0\nU -1.0\n";
    match parse(text) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(parse("X H 1.0\n"), Err(Error::Parse { line: 0, .. })));
    assert!(matches!(parse("# name=x\nZ H 1.0\n"), Err(Error::Parse { line: 2, .. })));
    assert!(matches!(parse("# name=x\nX N 1.0\n"), Err(Error::Parse { line: 2, .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn z_rotation_variants_agree(angle in -7.0f64..7.0, which in 0usize..3) {
        let s = [Spin::H, Spin::C1, Spin::C2][which];
        let m = exact();
        let want = z_rotation(s, angle);
        for v in 1..=4 {
            let u = sequence_unitary(&z_rotation_pulses(s, angle, v).unwrap(), &m).unwrap();
            prop_assert!(dist(&u, &want) < 1e-12);
        }
        for v in 1..=2 {
            let u = sequence_unitary(&hadamard_pulses(s, v).unwrap(), &m).unwrap();
            prop_assert!(dist(&u, &spin_hadamard(s)) < 1e-12);
        }
    }

    #[test]
    fn phase_gate_pulses_realize_negative_angle(theta in 0.01f64..(2.0 * PI), cycles in any::<bool>(), c1c2 in any::<bool>()) {
        let conv = if cycles { FrequencyConvention::Cycles } else { FrequencyConvention::Angular };
        let m = exact().with_convention(conv);
        let pair = if c1c2 { Pair::C1C2 } else { Pair::C1H };
        let (a, b) = pair.spins();
        let u = sequence_unitary(&phase_gate_pulses(pair, theta, &m).unwrap(), &m).unwrap();
        prop_assert!(dist(&u, &nmr_phase_gate(a, b, -theta).unwrap()) < 1e-10);
        // the spectator is left alone: u commutes with any pulse on it
        let kick = rotation_unitary(&qstate::pauli_x(), pair.spectator(), 0.9);
        let lhs = &u * &kick;
        let rhs = &kick * &u;
        prop_assert!(max_abs(&(lhs.matrix() - rhs.matrix())) < 1e-9);
    }

    #[test]
    fn noiseless_unitaries_do_not_depend_on_convention(j1 in 50.0f64..400.0, delta in -2000.0f64..2000.0) {
        let base = HamiltonianModel { j1, j2: j1 / 2.0, delta, ..exact() };
        for conv in [FrequencyConvention::Angular, FrequencyConvention::Cycles] {
            let m = base.with_convention(conv);
            prop_assert!(dist(&sequence_unitary(&t_odd(&m), &m).unwrap(), &ideal_t_odd()) < 1e-9);
            prop_assert!(dist(&sequence_unitary(&t_even(&m), &m).unwrap(), &ideal_t_even()) < 1e-9);
            prop_assert!(dist(&sequence_unitary(&t_regular(&m), &m).unwrap(), &ideal_t_regular(&m)) < 1e-9);
        }
    }

    #[test]
    fn phase_gates_commute_on_spins(s in -7.0f64..7.0, t in -7.0f64..7.0) {
        let a = nmr_phase_gate(Spin::C1, Spin::H, s).unwrap();
        let b = nmr_phase_gate(Spin::C1, Spin::C2, t).unwrap();
        prop_assert!(max_abs(&((&a * &b).matrix() - (&b * &a).matrix())) < 1e-14);
    }

    #[test]
    fn rotations_compose(a in -7.0f64..7.0, b in -7.0f64..7.0) {
        let u = rotation_unitary(&qstate::pauli_y(), Spin::C1, a).then(&rotation_unitary(&qstate::pauli_y(), Spin::C1, b));
        let v = rotation_unitary(&qstate::pauli_y(), Spin::C1, a + b);
        prop_assert!(max_abs(&(u.matrix() - v.matrix())) < 1e-12);
    }
}

#[test]
fn rotation_sign_convention() {
    // X(pi/2) = exp(i pi/4 X) sends |0> to (|0> + i|1>)/sqrt 2 on its spin
    let u = rotation_unitary(&qstate::pauli_x(), Spin::C2, FRAC_PI_2);
    let s = 0.5f64.sqrt();
    assert!((u.matrix()[(0, 0)] - c(s, 0.0)).norm() < 1e-15);
    assert!((u.matrix()[(1, 0)] - c(0.0, s)).norm() < 1e-15);
}
