use super::*;
use crate::error::Error;
use crate::simcore::{fidelity_up_to_phase, party_rng, PureState, C64};
use rand::Rng;

fn random_state(num_wires: usize, rng: &mut impl rand::Rng) -> PureState {
    let amps: Vec<C64> =
        (0..1usize << num_wires).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    PureState::from_amplitudes(amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

fn padded(state: &PureState, wires: usize) -> PureState {
    let extra = wires - state.num_wires();
    if extra == 0 {
        return state.clone();
    }
    state.tensor(&PureState::zeros(extra).unwrap()).unwrap()
}

#[test]
fn table1_rows_match_printed_axes() {
    for row in table1_rows() {
        let rot = table1_axis(&row.word).unwrap();
        assert!(same_direction(rot.axis, row.printed_axis, 1e-9), "{}: {:?}", row.word, rot.axis);
    }
}

#[test]
fn row_four_is_parallel_to_htht() {
    let rows = table1_rows();
    let htht = TLikeWord(vec![Letter::H, Letter::Phase(Angle8::T), Letter::H, Letter::Phase(Angle8::T)]);
    let r4 = table1_axis(&rows[3].word).unwrap().axis;
    assert!(same_direction(r4, table1_axis(&htht).unwrap().axis, 1e-9));
    assert!(!same_direction(r4, table1_axis(&rows[0].word).unwrap().axis, 1e-3));
}

#[test]
fn thth_axis_value() {
    let c = (std::f64::consts::PI / 8.0).cos();
    let s = (std::f64::consts::PI / 8.0).sin();
    let n = (2.0 * c * c + s * s).sqrt();
    let axis = table1_axis(&TLikeWord::phh(1, 1)).unwrap().axis;
    let expected = [c / n, s / n, c / n];
    let flip = if axis[0] * expected[0] < 0.0 { -1.0 } else { 1.0 };
    for k in 0..3 {
        assert!((flip * axis[k] - expected[k]).abs() < 1e-12);
    }
}

#[test]
fn rotation_of_rejects_identity() {
    assert!(rotation_of(&EulerTriple::IDENTITY.mat2()).is_err());
}

#[test]
fn approximation_examples() {
    let h = Gate::H(0).kind().mat2().unwrap();
    let a = approximate_single_qubit(&h, 1).unwrap();
    assert_eq!(a.word, TLikeWord(vec![Letter::H]));
    assert!(a.distance < 1e-12);

    let s = Gate::S(0).kind().mat2().unwrap();
    let a = approximate_single_qubit(&s, 4).unwrap();
    assert_eq!(a.word.len(), 2);
    assert!(a.distance < 1e-12);
    assert!(crate::simcore::Matrix::from_mat2(&a.word.mat2()).eq_up_to_phase(&Gate::S(0).matrix(), 1e-12));

    assert!(matches!(approximate_single_qubit(&h, APPROX_DEPTH_CAP + 1), Err(Error::BudgetExceeded(_))));
}

fn rotation(theta: f64, n: [f64; 3]) -> crate::simcore::Mat2 {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let i = C64::new(0.0, 1.0);
    [
        [C64::new(c, 0.0) - i * s * n[2], -i * s * n[0] - s * n[1]],
        [-i * s * n[0] + s * n[1], C64::new(c, 0.0) + i * s * n[2]],
    ]
}

#[test]
fn approximation_improves_with_depth() {
    let r3 = 1.0 / 3f64.sqrt();
    let target = rotation(0.7, [r3, r3, r3]);
    let distances: Vec<f64> =
        (0..=APPROX_DEPTH_CAP).map(|d| approximate_single_qubit(&target, d).unwrap().distance).collect();
    assert!(distances.windows(2).all(|w| w[1] <= w[0]));
    assert!(distances[12] < distances[4], "{distances:?}");
}

#[test]
fn rx_quarter_turn_is_exact_at_three_letters() {
    let target = rotation(std::f64::consts::FRAC_PI_4, [1.0, 0.0, 0.0]);
    assert!(approximate_single_qubit(&target, 2).unwrap().distance > 0.1);
    let a = approximate_single_qubit(&target, 3).unwrap();
    assert!(a.distance < 1e-12);
    assert_eq!(a.word.len(), 3);
}

#[test]
fn weak_blind_examples() {
    let mut rng = party_rng(61, 0);
    let c = Circuit::from_gates(2, [Gate::Cnot { control: 0, target: 1 }]).unwrap();
    let k = compile_weak_blind(&c, &mut rng).unwrap();
    assert_eq!(k.public.ops, vec![BobOp::Cnot { control: 0, target: 1 }]);
    assert_eq!(k.leakage.cnot_positions, Some(vec![CnotPosition { index: 0, control: 0, target: 1 }]));

    let c = Circuit::from_gates(1, [Gate::t(0)]).unwrap();
    let k = compile_weak_blind(&c, &mut rng).unwrap();
    assert_eq!(k.num_slots(), 3);
    assert_eq!(k.num_ancillas(), 6);
    assert_eq!(k.leakage.cnot_positions, Some(vec![]));

    let k = compile_weak_blind(&Circuit::new(3).unwrap(), &mut rng).unwrap();
    assert!(k.public.ops.is_empty());
    assert_eq!(k.leakage.size, 0);
}

#[test]
fn bob_alphabet_is_clifford() {
    let mut rng = party_rng(62, 0);
    for _ in 0..20 {
        let c = Circuit::random(3, 10, &mut rng).unwrap();
        for (protocol, allowed_two) in [(Protocol::WeakBlind, "cnot"), (Protocol::Blind, "cz")] {
            let k = compile(&c, protocol, &mut rng).unwrap();
            k.public.validate().unwrap();
            for op in &k.public.ops {
                match op {
                    BobOp::Cnot { .. } => assert_eq!(allowed_two, "cnot"),
                    BobOp::Cz { .. } => assert_eq!(allowed_two, "cz"),
                    BobOp::H { .. } | BobOp::Teleport { .. } => {}
                }
            }
        }
    }
}

#[test]
fn compilers_preserve_semantics() {
    let mut rng = party_rng(63, 0);
    for protocol in [Protocol::WeakBlind, Protocol::Blind] {
        for _ in 0..30 {
            let w = rng.random_range(1..=4);
            let g = rng.random_range(0..=12);
            let c = Circuit::random(w, g, &mut rng).unwrap();
            let k = compile(&c, protocol, &mut rng).unwrap();
            let psi = random_state(w, &mut rng);
            let expected = padded(&c.simulate(&psi).unwrap(), k.num_wires());
            let got = simulate_compiled(&k, &padded(&psi, k.num_wires())).unwrap();
            let f = fidelity_up_to_phase(&got, &expected).unwrap();
            assert!(f > 1.0 - 1e-9, "{protocol} {c} f={f}");
        }
    }
}

#[test]
fn blind_shape_depends_on_size_only() {
    let mut rng = party_rng(64, 0);
    let cnot = Circuit::from_gates(2, [Gate::Cnot { control: 0, target: 1 }]).unwrap();
    let id = Circuit::from_gates(2, [Gate::A(Angle8::ZERO, 0)]).unwrap();
    let a = compile_blind(&cnot, &BrickworkCaps::default(), &mut rng).unwrap();
    let b = compile_blind(&id, &BrickworkCaps::default(), &mut rng).unwrap();
    assert_eq!(a.public.shape_bytes(), b.public.shape_bytes());
    for _ in 0..10 {
        let w = rng.random_range(2..=4);
        let g = rng.random_range(1..=8);
        let x = compile_blind(&Circuit::random(w, g, &mut rng).unwrap(), &BrickworkCaps::default(), &mut rng).unwrap();
        let y = compile_blind(&Circuit::random(w, g, &mut rng).unwrap(), &BrickworkCaps::default(), &mut rng).unwrap();
        assert_eq!(x.public, y.public);
    }
}

#[test]
fn single_wire_blind_circuit() {
    let mut rng = party_rng(65, 0);
    let k = compile_blind(&Circuit::from_gates(1, [Gate::t(0)]).unwrap(), &BrickworkCaps::default(), &mut rng).unwrap();
    assert_eq!(k.num_wires(), 2);
    let active = k.angles.iter().filter(|a| **a != Angle8::ZERO).count();
    assert!((1..=3).contains(&active), "active gadgets: {active}");
}

#[test]
fn caps_are_enforced() {
    let mut rng = party_rng(66, 0);
    let c = Circuit::random(4, 10, &mut rng).unwrap();
    let caps = BrickworkCaps { max_wires: 3, max_columns: 4096 };
    assert!(matches!(compile_blind(&c, &caps, &mut rng), Err(Error::CapsExceeded(_))));
    let caps = BrickworkCaps { max_wires: 13, max_columns: 10 };
    assert!(matches!(compile_blind(&c, &caps, &mut rng), Err(Error::CapsExceeded(_))));
}

#[test]
fn leakage_read_from_public_part() {
    let mut rng = party_rng(67, 0);
    for protocol in [Protocol::WeakBlind, Protocol::Blind] {
        for _ in 0..10 {
            let c = Circuit::random(rng.random_range(1..=4), rng.random_range(0..=10), &mut rng).unwrap();
            let k = compile(&c, protocol, &mut rng).unwrap();
            assert_eq!(leakage_of(&k.public).unwrap(), k.leakage);
        }
    }
    let c = Circuit::from_gates(2, [Gate::Cnot { control: 0, target: 1 }, Gate::t(1)]).unwrap();
    let weak = compile_weak_blind(&c, &mut rng).unwrap();
    assert_eq!(leakage_of(&weak.public).unwrap().cnot_positions.unwrap().len(), 1);
    let blind = compile_blind(&c, &BrickworkCaps::default(), &mut rng).unwrap();
    let l = leakage_of(&blind.public).unwrap();
    assert_eq!((l.size, l.cnot_positions), (2, None));
}

#[test]
fn protocol_serializes_as_number() {
    assert_eq!(serde_json::to_string(&Protocol::Blind).unwrap(), "2");
    assert_eq!(serde_json::from_str::<Protocol>("1").unwrap(), Protocol::WeakBlind);
    assert!(serde_json::from_str::<Protocol>("3").is_err());
}
