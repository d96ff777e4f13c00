//! Trap wires and detection experiments against a deviating Bob.
//!
//! A trap is an extra register wire prepared in |0⟩ or |+⟩ that carries no
//! gates, so every slot on it is an identity slot. After decryption Alice
//! measures each trap in its own basis; any other outcome means Bob touched
//! it. Bob receives traps as ordinary encrypted wires and cannot tell them
//! apart from data wires.

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compile::{Circuit, Protocol};
pub use crate::engine::AdversaryPolicy;
use crate::engine::{input_qubit, run_in_process, SessionConfig};
use crate::error::{Error, Result};
use crate::simcore::{indexed_rng, Gate, PureState, Qubit};

const VERIFY_STREAM: u64 = 4;

/// Below this the honest trap failure probability counts as zero.
const TRAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrapState {
    Zero,
    Plus,
}

impl TrapState {
    pub fn qubit(self) -> Qubit {
        input_qubit(match self {
            TrapState::Zero => '0',
            TrapState::Plus => '+',
        })
        .expect("valid input symbol")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrapPlan {
    /// Total logical wires, traps included.
    pub n: usize,
    pub n_d: usize,
    /// Sorted trap wire indices.
    pub positions: Vec<usize>,
    pub states: Vec<TrapState>,
    /// Independent repetitions of the whole computation.
    pub s: usize,
}

impl TrapPlan {
    /// Uniform trap positions, each trap |0⟩ or |+⟩ with equal probability.
    pub fn random(n: usize, n_d: usize, s: usize, rng: &mut impl Rng) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("a trap plan needs at least one wire".into()));
        }
        if n_d > n {
            return Err(Error::Config(format!("{n_d} traps do not fit in {n} wires")));
        }
        if s == 0 {
            return Err(Error::Config("at least one repetition is needed".into()));
        }
        let mut positions = sample(rng, n, n_d).into_vec();
        positions.sort_unstable();
        let states =
            positions.iter().map(|_| if rng.random::<bool>() { TrapState::Plus } else { TrapState::Zero }).collect();
        Ok(TrapPlan { n, n_d, positions, states, s })
    }
}

/// Trap wires of an instrumented circuit and the state each must come back in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrapLedger {
    pub traps: Vec<(usize, TrapState)>,
}

#[derive(Debug, Clone)]
pub struct Instrumented {
    pub circuit: Circuit,
    pub input: Vec<Qubit>,
    /// Where each source wire now lives.
    pub data_wires: Vec<usize>,
    pub ledger: TrapLedger,
}

/// Spreads the source wires over the non-trap positions of `plan` and adds
/// the trap wires. Traps get no gates.
pub fn insert_traps(circuit: &Circuit, input: &[Qubit], plan: &TrapPlan) -> Result<Instrumented> {
    if input.len() != circuit.num_wires() {
        return Err(Error::LengthMismatch { expected: circuit.num_wires(), got: input.len() });
    }
    if circuit.num_wires() + plan.n_d != plan.n || plan.positions.len() != plan.n_d {
        return Err(Error::Config(format!(
            "plan has {} wires and {} traps but the circuit has {} wires",
            plan.n,
            plan.positions.len(),
            circuit.num_wires()
        )));
    }
    let data_wires: Vec<usize> = (0..plan.n).filter(|w| !plan.positions.contains(w)).collect();
    let mut full = Circuit::new(plan.n)?;
    for g in circuit.gates() {
        full.push(g.remap(|w| data_wires[w]))?;
    }
    let mut qubits = vec![TrapState::Zero.qubit(); plan.n];
    for (&w, q) in data_wires.iter().zip(input) {
        qubits[w] = *q;
    }
    for (&w, &t) in plan.positions.iter().zip(&plan.states) {
        qubits[w] = t.qubit();
    }
    let ledger = TrapLedger { traps: plan.positions.iter().copied().zip(plan.states.iter().copied()).collect() };
    Ok(Instrumented { circuit: full, input: qubits, data_wires, ledger })
}

/// Exact probability that measuring every trap in its basis shows a
/// deviation.
pub fn trap_failure_probability(output: &PureState, ledger: &TrapLedger) -> Result<f64> {
    let mut state = output.clone();
    let mut pass = 1.0;
    for &(w, t) in &ledger.traps {
        if w >= state.num_wires() {
            return Err(Error::Config(format!("trap wire {w} is not in a {}-wire output", state.num_wires())));
        }
        if t == TrapState::Plus {
            state.apply(&Gate::H(w))?;
        }
        let p = 1.0 - state.measure_prob(w)?;
        if p < TRAP_TOL {
            return Ok(1.0);
        }
        pass *= p;
        state.project(w, 0)?;
    }
    Ok((1.0 - pass).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrapCheck {
    Detected,
    Clean,
}

/// Alice's trap measurements on the decrypted output.
pub fn check_traps(output: &PureState, ledger: &TrapLedger, rng: &mut impl Rng) -> Result<TrapCheck> {
    let p = trap_failure_probability(output, ledger)?;
    if p <= TRAP_TOL {
        return Ok(TrapCheck::Clean);
    }
    Ok(if rng.random::<f64>() < p { TrapCheck::Detected } else { TrapCheck::Clean })
}

/// Detection probability against a Bob who damages one uniformly random wire:
/// `N_d/N` for one run, `1 − ((N − N_d)/N)^s` over `s` runs.
pub fn detection_formula(n: usize, n_d: usize, s: usize) -> f64 {
    1.0 - ((n - n_d) as f64 / n as f64).powi(s as i32)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectionReport {
    pub n: usize,
    pub n_d: usize,
    pub s: usize,
    pub policy: AdversaryPolicy,
    pub trials: usize,
    pub detected: usize,
    pub rate: f64,
    pub stderr: f64,
    /// Only for [`AdversaryPolicy::SingleRandomWire`], the model the formula
    /// assumes.
    pub formula: Option<f64>,
    pub z: Option<f64>,
}

impl DetectionReport {
    pub fn within(&self, sigmas: f64) -> Option<bool> {
        self.z.map(|z| z.abs() <= sigmas)
    }

    pub const CSV_HEADER: &'static str = "N,N_d,s,policy,trials,detected,rate,stderr,formula,z";

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{:.6},{:.6},{},{}",
            self.n,
            self.n_d,
            self.s,
            policy_name(&self.policy),
            self.trials,
            self.detected,
            self.rate,
            self.stderr,
            opt(self.formula),
            opt(self.z)
        )
    }
}

pub fn policy_name(p: &AdversaryPolicy) -> String {
    match p {
        AdversaryPolicy::None => "none".into(),
        AdversaryPolicy::ExtraGate { gate, slot } => format!("extra_gate({gate}@{slot})"),
        AdversaryPolicy::WrongMeasureReport { slot } => format!("wrong_measure_report({slot})"),
        AdversaryPolicy::SkipSlot { slot } => format!("skip_slot({slot})"),
        AdversaryPolicy::RandomPauli { rate } => format!("random_pauli({rate})"),
        AdversaryPolicy::SingleRandomWire => "single_random_wire".into(),
    }
}

/// Experiment settings for [`detection_rate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionSetup {
    pub protocol: Protocol,
    pub n_d: usize,
    pub s: usize,
    pub policy: AdversaryPolicy,
    pub trials: usize,
    pub seed: u64,
}

/// One trial: `s` independent runs, each with fresh traps and keys.
/// Detected if any run's traps fire.
fn run_trial(circuit: &Circuit, input: &[Qubit], setup: &DetectionSetup, trial: u64) -> Result<bool> {
    let n = circuit.num_wires() + setup.n_d;
    let mut rng = indexed_rng(setup.seed, trial, VERIFY_STREAM);
    for _ in 0..setup.s {
        let plan = TrapPlan::random(n, setup.n_d, setup.s, &mut rng)?;
        let inst = insert_traps(circuit, input, &plan)?;
        let mut config = SessionConfig::new(setup.protocol, rng.random(), rng.random());
        config.adversary_seed = rng.random();
        let out = run_in_process(&inst.circuit, &inst.input, &config, setup.policy)?;
        if check_traps(&out.output, &inst.ledger, &mut rng)? == TrapCheck::Detected {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Monte-Carlo detection rate of `setup.policy` over `setup.trials` trials.
pub fn detection_rate(circuit: &Circuit, input: &[Qubit], setup: &DetectionSetup) -> Result<DetectionReport> {
    let n = circuit.num_wires() + setup.n_d;
    if n == 0 || setup.trials == 0 || setup.s == 0 {
        return Err(Error::Config("detection needs N ≥ 1, at least one trial and s ≥ 1".into()));
    }
    let detected = (0..setup.trials as u64)
        .into_par_iter()
        .map(|t| run_trial(circuit, input, setup, t).map(usize::from))
        .sum::<Result<usize>>()?;
    let trials = setup.trials as f64;
    let rate = detected as f64 / trials;
    let stderr = (rate * (1.0 - rate) / trials).sqrt();
    let formula = (setup.policy == AdversaryPolicy::SingleRandomWire).then(|| detection_formula(n, setup.n_d, setup.s));
    let z = formula.map(|f| {
        let sd = (f * (1.0 - f) / trials).sqrt();
        if sd > 0.0 {
            (rate - f) / sd
        } else if rate == f {
            0.0
        } else {
            f64::INFINITY
        }
    });
    Ok(DetectionReport {
        n,
        n_d: setup.n_d,
        s: setup.s,
        policy: setup.policy,
        trials: setup.trials,
        detected,
        rate,
        stderr,
        formula,
        z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::compile;
    use crate::engine::parse_input;
    use crate::simcore::{party_rng, Angle8};

    fn plan(n: usize, positions: Vec<usize>, states: Vec<TrapState>) -> TrapPlan {
        TrapPlan { n, n_d: positions.len(), positions, states, s: 1 }
    }

    #[test]
    fn no_traps_leaves_the_circuit_alone() {
        let c = Circuit::from_gates(2, [Gate::H(0), Gate::Cnot { control: 0, target: 1 }]).unwrap();
        let inst = insert_traps(&c, &parse_input("00").unwrap(), &plan(2, vec![], vec![])).unwrap();
        assert_eq!(inst.circuit, c);
        assert!(inst.ledger.traps.is_empty());
    }

    #[test]
    fn one_zero_trap_on_four_wires() {
        let c = Circuit::from_gates(3, [Gate::t(0), Gate::Cnot { control: 1, target: 2 }]).unwrap();
        let inst = insert_traps(&c, &parse_input("+00").unwrap(), &plan(4, vec![1], vec![TrapState::Zero])).unwrap();
        assert_eq!(inst.circuit.num_wires(), 4);
        assert_eq!(inst.data_wires, vec![0, 2, 3]);
        assert!(inst.circuit.gates().iter().all(|g| !g.wires().contains(&1)));
        let out = run_in_process(
            &inst.circuit,
            &inst.input,
            &SessionConfig::new(Protocol::WeakBlind, 1, 2),
            AdversaryPolicy::None,
        )
        .unwrap();
        assert!(out.output.measure_prob(1).unwrap() < 1e-12);
        assert_eq!(trap_failure_probability(&out.output, &inst.ledger).unwrap(), 0.0);
    }

    #[test]
    fn trap_shape_matches_padded_original() {
        let mut rng = party_rng(5, 0);
        let c = Circuit::random(3, 6, &mut rng).unwrap();
        let input = parse_input("0+1").unwrap();
        for seed in 0..5 {
            let p = TrapPlan::random(5, 2, 1, &mut party_rng(seed, 9)).unwrap();
            let inst = insert_traps(&c, &input, &p).unwrap();
            let a = compile(&inst.circuit, Protocol::Blind, &mut rng).unwrap();
            let b = compile(&c.widened(5).unwrap(), Protocol::Blind, &mut rng).unwrap();
            assert_eq!(a.public.shape_bytes(), b.public.shape_bytes());
        }
        // Without CNOTs the weak-blind shape hides trap positions too.
        let single = Circuit::from_gates(2, [Gate::t(0), Gate::H(1)]).unwrap();
        let p = TrapPlan::random(4, 2, 1, &mut rng).unwrap();
        let inst = insert_traps(&single, &parse_input("00").unwrap(), &p).unwrap();
        let a = compile(&inst.circuit, Protocol::WeakBlind, &mut rng).unwrap();
        let b = compile(&single.widened(4).unwrap(), Protocol::WeakBlind, &mut rng).unwrap();
        assert_eq!(a.public.shape_bytes(), b.public.shape_bytes());
    }

    #[test]
    fn honest_bob_is_never_detected() {
        let c = Circuit::from_gates(2, [Gate::t(0), Gate::Cnot { control: 0, target: 1 }, Gate::H(1)]).unwrap();
        let input = parse_input("+0").unwrap();
        for protocol in [Protocol::WeakBlind, Protocol::Blind] {
            for seed in 0..10 {
                let p = TrapPlan::random(4, 2, 1, &mut party_rng(seed, 7)).unwrap();
                let inst = insert_traps(&c, &input, &p).unwrap();
                let out = run_in_process(
                    &inst.circuit,
                    &inst.input,
                    &SessionConfig::new(protocol, seed, seed + 1),
                    AdversaryPolicy::None,
                )
                .unwrap();
                assert!(trap_failure_probability(&out.output, &inst.ledger).unwrap() <= TRAP_TOL);
            }
        }
    }

    #[test]
    fn pauli_actions_on_each_trap_type() {
        let x = |t| {
            let mut s = PureState::product(&[TrapState::qubit(t)]).unwrap();
            s.apply(&Gate::X(0)).unwrap();
            s
        };
        let z = |t| {
            let mut s = PureState::product(&[TrapState::qubit(t)]).unwrap();
            s.apply(&Gate::Z(0)).unwrap();
            s
        };
        let ledger = |t| TrapLedger { traps: vec![(0, t)] };
        let mut rng = party_rng(0, 0);
        assert_eq!(check_traps(&x(TrapState::Zero), &ledger(TrapState::Zero), &mut rng).unwrap(), TrapCheck::Detected);
        assert_eq!(check_traps(&z(TrapState::Zero), &ledger(TrapState::Zero), &mut rng).unwrap(), TrapCheck::Clean);
        assert_eq!(check_traps(&z(TrapState::Plus), &ledger(TrapState::Plus), &mut rng).unwrap(), TrapCheck::Detected);
        assert_eq!(check_traps(&x(TrapState::Plus), &ledger(TrapState::Plus), &mut rng).unwrap(), TrapCheck::Clean);
    }

    #[test]
    fn extra_x_on_a_zero_trap_is_caught() {
        let c = Circuit::from_gates(1, [Gate::H(0)]).unwrap();
        let inst = insert_traps(&c, &parse_input("0").unwrap(), &plan(2, vec![1], vec![TrapState::Zero])).unwrap();
        let policy = AdversaryPolicy::ExtraGate { gate: Gate::X(1), slot: usize::MAX };
        let out =
            run_in_process(&inst.circuit, &inst.input, &SessionConfig::new(Protocol::WeakBlind, 3, 4), policy).unwrap();
        assert!((trap_failure_probability(&out.output, &inst.ledger).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn formula_values() {
        assert!((detection_formula(10, 2, 1) - 0.2).abs() < 1e-15);
        assert!((detection_formula(10, 2, 3) - 0.488).abs() < 1e-12);
        assert_eq!(detection_formula(5, 0, 4), 0.0);
    }

    #[test]
    fn honest_policy_detects_nothing() {
        let c = Circuit::from_gates(2, [Gate::A(Angle8::T, 0)]).unwrap();
        let setup = DetectionSetup {
            protocol: Protocol::WeakBlind,
            n_d: 2,
            s: 2,
            policy: AdversaryPolicy::None,
            trials: 200,
            seed: 1,
        };
        let r = detection_rate(&c, &parse_input("00").unwrap(), &setup).unwrap();
        assert_eq!(r.detected, 0);
        assert_eq!(r.formula, None);
    }

    #[test]
    fn single_random_wire_rate_is_near_formula() {
        let c = Circuit::from_gates(3, [Gate::H(0)]).unwrap();
        let setup = DetectionSetup {
            protocol: Protocol::WeakBlind,
            n_d: 1,
            s: 1,
            policy: AdversaryPolicy::SingleRandomWire,
            trials: 1000,
            seed: 2,
        };
        let r = detection_rate(&c, &parse_input("000").unwrap(), &setup).unwrap();
        assert_eq!(r.formula, Some(0.25));
        assert!(r.within(4.0).unwrap(), "{r:?}");
        assert!(r.csv_row().starts_with("4,1,1,single_random_wire,1000,"));
    }

    #[test]
    fn bad_plans_are_rejected() {
        let mut rng = party_rng(0, 0);
        assert!(TrapPlan::random(0, 0, 1, &mut rng).is_err());
        assert!(TrapPlan::random(3, 4, 1, &mut rng).is_err());
        let c = Circuit::new(2).unwrap();
        assert!(insert_traps(&c, &parse_input("00").unwrap(), &plan(4, vec![0], vec![TrapState::Zero])).is_err());
    }
}
