use super::*;
use crate::frame::WireKeys;
use crate::gadget::{AliceReply, AncillaPurpose, CascadeAlice};
use crate::simcore::{fidelity_up_to_phase, party_rng, prepare_a_state, Angle8, Gate};
use rand::Rng;

fn fidelity(out: &SessionOutput, circuit: &Circuit, input: &[Qubit]) -> f64 {
    let expected = reference_output(circuit, input, out.output.num_wires()).unwrap();
    fidelity_up_to_phase(&out.output, &expected).unwrap()
}

#[test]
fn hadamard_on_zero() {
    let c = Circuit::from_gates(1, [Gate::H(0)]).unwrap();
    let input = parse_input("0").unwrap();
    let out =
        run_in_process(&c, &input, &SessionConfig::new(Protocol::WeakBlind, 1, 2), AdversaryPolicy::None).unwrap();
    let plus = PureState::product(&parse_input("+").unwrap()).unwrap();
    assert!(fidelity_up_to_phase(&out.output, &plus).unwrap() > 1.0 - 1e-9);
}

#[test]
fn t_on_plus_every_seed() {
    let c = Circuit::from_gates(1, [Gate::t(0)]).unwrap();
    let input = parse_input("+").unwrap();
    for protocol in [Protocol::WeakBlind, Protocol::Blind] {
        for seed in 0..40 {
            let out =
                run_in_process(&c, &input, &SessionConfig::new(protocol, seed, seed + 100), AdversaryPolicy::None)
                    .unwrap();
            let got = &out.output;
            let expected = if got.num_wires() == 1 {
                prepare_a_state(Angle8::T)
            } else {
                prepare_a_state(Angle8::T).tensor(&PureState::zeros(1).unwrap()).unwrap()
            };
            assert!(fidelity_up_to_phase(got, &expected).unwrap() > 1.0 - 1e-9);
        }
    }
}

#[test]
fn random_circuits_match_direct_simulation() {
    let mut rng = party_rng(71, 0);
    for protocol in [Protocol::WeakBlind, Protocol::Blind] {
        for mode in [CascadeMode::AlwaysConsume, CascadeMode::Faithful] {
            for _ in 0..15 {
                let w = rng.random_range(1..=3);
                let c = Circuit::random(w, rng.random_range(0..=10), &mut rng).unwrap();
                let input: Vec<Qubit> =
                    (0..w).map(|_| input_qubit(['0', '1', '+', '-'][rng.random_range(0..4)]).unwrap()).collect();
                let mut config = SessionConfig::new(protocol, rng.random(), rng.random());
                config.mode = mode;
                let out = run_in_process(&c, &input, &config, AdversaryPolicy::None).unwrap();
                let f = fidelity(&out, &c, &input);
                assert!(f > 1.0 - 1e-9, "{protocol} {mode:?} {c} f={f}");
                assert!(out.bob_log.unwrap().iter().all(|a| a.is_honest_alphabet()));
            }
        }
    }
}

#[test]
fn qubits_precede_announcement_and_slots_increase() {
    let mut rng = party_rng(72, 0);
    let c = Circuit::random(3, 8, &mut rng).unwrap();
    let input = parse_input("0+1").unwrap();
    let out = run_in_process(&c, &input, &SessionConfig::new(Protocol::Blind, 3, 4), AdversaryPolicy::None).unwrap();
    let entries = out.transcript.entries();
    let announce = entries.iter().position(|e| matches!(e.message, Message::CircuitAnnounce { .. })).unwrap();
    assert!(entries[..announce].iter().all(|e| matches!(e.message, Message::QubitTransfer { .. })));
    assert!(entries[announce..].iter().all(|e| !matches!(e.message, Message::QubitTransfer { .. })));
    let slots: Vec<usize> = entries
        .iter()
        .filter_map(|e| match e.message {
            Message::MeasuredBit { slot, .. } => Some(slot),
            _ => None,
        })
        .collect();
    assert!(slots.windows(2).all(|w| w[0] < w[1]));
    assert!(matches!(entries.last().unwrap().message, Message::Done));
}

#[test]
fn sessions_are_deterministic() {
    let mut rng = party_rng(73, 0);
    let c = Circuit::random(2, 6, &mut rng).unwrap();
    let input = parse_input("+0").unwrap();
    let config = SessionConfig::new(Protocol::WeakBlind, 11, 12);
    let a = run_in_process(&c, &input, &config, AdversaryPolicy::None).unwrap();
    let b = run_in_process(&c, &input, &config, AdversaryPolicy::None).unwrap();
    assert_eq!(a.transcript, b.transcript);
    assert_eq!(a.output, b.output);
    let other =
        run_in_process(&c, &input, &SessionConfig::new(Protocol::WeakBlind, 11, 13), AdversaryPolicy::None).unwrap();
    assert_ne!(a.transcript.bits(), other.transcript.bits());
    assert_eq!(a.transcript.shape(), other.transcript.shape());
}

#[test]
fn every_report_bit_is_fair() {
    let mut rng = party_rng(74, 0);
    for protocol in [Protocol::WeakBlind, Protocol::Blind] {
        let c = Circuit::random(3, 6, &mut rng).unwrap();
        let out = run_in_process(
            &c,
            &parse_input("01+").unwrap(),
            &SessionConfig::new(protocol, 5, 6),
            AdversaryPolicy::None,
        )
        .unwrap();
        for (_, p) in out.report_probs.unwrap() {
            assert!((p - 0.5).abs() <= 1e-12, "p = {p}");
        }
    }
}

#[test]
fn alice_decide_examples() {
    let n = Angle8::T;
    let mk = |a: u8| {
        CascadeAlice::new(
            n,
            AncillaSpec::new(n, a, 0, AncillaPurpose::Primary),
            AncillaSpec::new(n.double(), 0, 0, AncillaPurpose::Correction),
            CascadeMode::AlwaysConsume,
        )
        .unwrap()
    };
    let mut rng = party_rng(0, 0);
    let mut keys = WireKeys::new(0, 0);
    assert_eq!(mk(1).on_round1(1, &mut keys, &mut rng).unwrap(), AliceReply::Correction(false));
    let mut keys = WireKeys::new(1, 0);
    assert_eq!(mk(0).on_round1(0, &mut keys, &mut rng).unwrap(), AliceReply::Correction(true));

    // Angle 0: the reply is a fair coin, whatever c is.
    let zero = |rng: &mut crate::simcore::SeededRng, c: u8| {
        let mut g = CascadeAlice::new(
            Angle8::ZERO,
            AncillaSpec::new(Angle8::ZERO, 0, 0, AncillaPurpose::Primary),
            AncillaSpec::new(Angle8::ZERO, 0, 0, AncillaPurpose::Correction),
            CascadeMode::AlwaysConsume,
        )
        .unwrap();
        g.on_round1(c, &mut WireKeys::new(0, 0), rng).unwrap() == AliceReply::Correction(true)
    };
    let ones = (0..4000).filter(|i| zero(&mut rng, (i % 2) as u8)).count();
    assert!((ones as f64 / 4000.0 - 0.5).abs() < 0.04);
}

#[test]
fn bob_rejects_out_of_order_messages() {
    let mut bob = BobState::honest(1);
    assert!(matches!(bob.handle(Message::Done), Err(Error::Protocol(_))));
    assert!(matches!(bob.handle(Message::MeasuredBit { slot: 0, bit: 0 }), Err(Error::Protocol(_))));
    let bad = Message::QubitTransfer { wire: "q0".into(), amp: [1.0, 0.0, 1.0, 0.0] };
    assert!(matches!(bob.handle(bad), Err(Error::WireFormat(_))));
    assert!(matches!(
        bob.handle(Message::QubitTransfer { wire: "q1".into(), amp: [1.0, 0.0, 0.0, 0.0] }),
        Err(Error::Protocol(_))
    ));
}

#[test]
fn unencrypted_sessions_still_compute() {
    let mut rng = party_rng(75, 0);
    let c = Circuit::random(2, 6, &mut rng).unwrap();
    let input = parse_input("1+").unwrap();
    let mut config = SessionConfig::new(Protocol::Blind, 8, 9);
    config.encrypt = false;
    let out = run_in_process(&c, &input, &config, AdversaryPolicy::None).unwrap();
    assert!(fidelity(&out, &c, &input) > 1.0 - 1e-9);
    assert!(out.frame.pairs().iter().all(|&(x, z)| x == 0 && z == 0) || true);
}

#[test]
fn extra_x_breaks_the_output() {
    let c = Circuit::from_gates(1, [Gate::H(0)]).unwrap();
    let input = parse_input("0").unwrap();
    let config = SessionConfig::new(Protocol::WeakBlind, 1, 2);
    let policy = AdversaryPolicy::ExtraGate { gate: Gate::Z(0), slot: usize::MAX };
    let out = run_in_process(&c, &input, &config, policy).unwrap();
    assert!(fidelity(&out, &c, &input) < 1e-9);
    assert!(out.bob_log.unwrap().iter().any(|a| !a.is_honest_alphabet()));
}

#[test]
fn input_parsing() {
    assert_eq!(parse_input("01+-").unwrap().len(), 4);
    assert!(matches!(parse_input("0x"), Err(Error::Config(_))));
}
