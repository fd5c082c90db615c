//! The two-path constructions: controlled-path gate, the entanglement-based
//! controlled operation and the A±B linear combination.
//!
//! After the final beamsplitters, port `"{k}r"` becomes the unprimed output
//! `"k"` and `"{k}b"` becomes the primed output `"k'"`. With the beamsplitter
//! convention of [`OpticalElement::BeamSplitter`] a primed detection picks up
//! a relative minus sign on the blue contribution, so for two slots the
//! patterns `(1,2)` and `(1',2')` both carry `(A+B)|φ⟩` and `(1,2')`,
//! `(1',2)` both carry `(A−B)|φ⟩`, with no extra per-pattern sign.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::element::{OpticalCircuit, OpticalElement};
use super::fock::FockState;
use super::source::{branch_source, prepare_branched_source, slot_port, Branch};
use crate::error::{Error, Result};
use crate::linalg::{CarrierState, Operator};

/// Output port name of slot `k` (1-based).
pub fn output_port(slot: usize, primed: bool) -> String {
    if primed {
        format!("{slot}'")
    } else {
        slot.to_string()
    }
}

/// One detector port per photon slot, each seeing exactly one photon.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DetectionPattern {
    pub ports: Vec<String>,
}

impl DetectionPattern {
    pub fn from_primes(primes: &[bool]) -> Self {
        DetectionPattern {
            ports: primes
                .iter()
                .enumerate()
                .map(|(i, &p)| output_port(i + 1, p))
                .collect(),
        }
    }

    /// All `2^n` patterns over `n` slots, unprimed first.
    pub fn all(n: usize) -> Vec<Self> {
        (0..1usize << n)
            .map(|m| {
                let primes: Vec<bool> = (0..n).map(|i| (m >> (n - 1 - i)) & 1 == 1).collect();
                Self::from_primes(&primes)
            })
            .collect()
    }

    pub fn primes(&self) -> Vec<bool> {
        self.ports.iter().map(|p| p.ends_with('\'')).collect()
    }

    pub fn port_refs(&self) -> Vec<&str> {
        self.ports.iter().map(String::as_str).collect()
    }

    /// Even number of primed ports selects the sum.
    pub fn class(&self) -> PatternClass {
        if self.primes().iter().filter(|&&p| p).count() % 2 == 0 {
            PatternClass::Sum
        } else {
            PatternClass::Difference
        }
    }
}

impl fmt::Display for DetectionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.ports.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PatternClass {
    /// `(1,2)` or `(1',2')`: realizes `A+B`.
    Sum,
    /// `(1,2')` or `(1',2)`: realizes `A−B`.
    Difference,
}

impl PatternClass {
    pub fn sign(self) -> f64 {
        match self {
            PatternClass::Sum => 1.0,
            PatternClass::Difference => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PatternClass::Sum => "sum",
            PatternClass::Difference => "difference",
        }
    }
}

impl fmt::Display for PatternClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Controlled-path gate: a single photon entering `"{target}b"` leaves in the
/// red port when the control photon is H and in the blue port when it is V,
/// with its polarization unchanged.
pub fn build_cp_gate(control_port: &str, target_port: &str) -> Result<OpticalCircuit> {
    if control_port == target_port {
        return Err(Error::InvalidElement("control and target ports must differ".into()));
    }
    let tr = format!("{target_port}r");
    let tb = format!("{target_port}b");
    if control_port == tr || control_port == tb {
        return Err(Error::InvalidElement("control port collides with a target branch".into()));
    }
    let mut c = OpticalCircuit::new();
    c.push(OpticalElement::pbs_at(&tb, &tr, 0.0))
        .push(OpticalElement::pol_cnot(control_port, &tb))
        .push(OpticalElement::pol_cnot(control_port, &tr))
        .push(OpticalElement::pbs_at(&tr, &tb, FRAC_PI_2))
        .push(OpticalElement::hwp(&tb, FRAC_PI_4));
    Ok(c.with_detectors(&[control_port, &tr, &tb]))
}

fn final_mixing(n: usize) -> Vec<OpticalElement> {
    (1..=n)
        .map(|k| OpticalElement::bs(&slot_port(k, Branch::Red), &slot_port(k, Branch::Blue)))
        .collect()
}

fn relabel_outputs(state: &mut FockState, n: usize) -> Result<()> {
    for k in 1..=n {
        state.relabel_port(&slot_port(k, Branch::Red), &output_port(k, false))?;
        state.relabel_port(&slot_port(k, Branch::Blue), &output_port(k, true))?;
    }
    Ok(())
}

/// Circuit of the entanglement-based controlled operation on `n_targets`
/// targets: `op_blue` on the blue target modes, PBS on the control pair,
/// BS on every target pair. Slot 1 is the control.
pub fn entanglement_scheme_circuit(n_targets: usize, op_blue: &Operator) -> Result<OpticalCircuit> {
    if n_targets == 0 {
        return Err(Error::DimensionMismatch("need at least one target".into()));
    }
    let blue: Vec<String> = (2..=n_targets + 1).map(|k| slot_port(k, Branch::Blue)).collect();
    let refs: Vec<&str> = blue.iter().map(String::as_str).collect();
    let mut c = OpticalCircuit::new();
    c.push(OpticalElement::joint(&refs, op_blue.clone())?)
        .push(OpticalElement::pbs_at("1r", "1b", 0.0));
    for e in final_mixing(n_targets + 1).into_iter().skip(1) {
        c.push(e);
    }
    Ok(c)
}

/// Outcome of one detection pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternOutcome {
    pub accepting: bool,
    /// Normalized conditional polarization state; `None` when the pattern
    /// never fires.
    pub state: Option<CarrierState>,
    pub probability: f64,
}

/// Runs the entanglement-based scheme on the `(n_targets+1)`-photon input
/// `(|φ⟩_r + |φ⟩_b)/√2`. Accepting patterns put the control at `"1"` and an
/// even number of targets at primed ports; their states are proportional to
/// `α|H⟩|ψ⟩ + β|V⟩·op|ψ⟩`.
pub fn run_entanglement_scheme(
    n_targets: usize,
    op_blue: &Operator,
    phi: &CarrierState,
) -> Result<BTreeMap<DetectionPattern, PatternOutcome>> {
    if !op_blue.is_qubit_operator() || op_blue.n_carriers() != n_targets {
        return Err(Error::DimensionMismatch(format!(
            "op acts on dims {:?}, expected {n_targets} qubit(s)",
            op_blue.dims_in()
        )));
    }
    if phi.dims().len() != n_targets + 1 {
        return Err(Error::DimensionMismatch(format!(
            "input has {} qubit(s), expected {}",
            phi.dims().len(),
            n_targets + 1
        )));
    }
    let n = n_targets + 1;
    let circuit = entanglement_scheme_circuit(n_targets, op_blue)?;
    let mut out = circuit.run(&prepare_branched_source(phi)?)?;
    relabel_outputs(&mut out, n)?;
    let mut result = BTreeMap::new();
    for pattern in DetectionPattern::all(n) {
        let primes = pattern.primes();
        let even_targets = primes[1..].iter().filter(|&&p| p).count() % 2 == 0;
        let s = out.coincidence_state(&pattern.port_refs())?;
        let probability = s.probability();
        result.insert(
            pattern,
            PatternOutcome {
                accepting: !primes[0] && even_targets,
                state: s.normalized(),
                probability,
            },
        );
    }
    Ok(result)
}

/// Total probability over accepting patterns.
pub fn accepting_probability(outcomes: &BTreeMap<DetectionPattern, PatternOutcome>) -> f64 {
    outcomes
        .values()
        .filter(|o| o.accepting)
        .map(|o| o.probability)
        .sum()
}

/// Coincidence amplitudes of one pattern, split by the branch the photons
/// came from. `red + blue` is the physical amplitude.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchStates {
    pub red: CarrierState,
    pub blue: CarrierState,
}

impl BranchStates {
    pub fn total(&self) -> CarrierState {
        self.red.try_add(&self.blue).expect("same dims")
    }
}

/// Two-path scheme with arbitrary element lists on each branch (red elements
/// address ports `"{k}r"`, blue elements `"{k}b"`), followed by the final
/// beamsplitters. Each branch is propagated separately, which is exact as
/// long as no element couples the two branches before the beamsplitters.
pub fn run_two_path(
    phi: &CarrierState,
    red: &[OpticalElement],
    blue: &[OpticalElement],
) -> Result<BTreeMap<DetectionPattern, BranchStates>> {
    run_two_path_sources(
        &branch_source(phi, Branch::Red)?,
        &branch_source(phi, Branch::Blue)?,
        red,
        blue,
    )
}

/// [`run_two_path`] starting from explicit red and blue source halves.
pub fn run_two_path_sources(
    red_source: &FockState,
    blue_source: &FockState,
    red: &[OpticalElement],
    blue: &[OpticalElement],
) -> Result<BTreeMap<DetectionPattern, BranchStates>> {
    let n = red_source.photons();
    let propagate = |source: &FockState, elements: &[OpticalElement]| -> Result<FockState> {
        let mut circ = OpticalCircuit::new();
        for e in elements.iter().cloned().chain(final_mixing(n)) {
            circ.push(e);
        }
        let mut s = circ.run(source)?;
        relabel_outputs(&mut s, n)?;
        Ok(s)
    };
    let r = propagate(red_source, red)?;
    let b = propagate(blue_source, blue)?;
    DetectionPattern::all(n)
        .into_iter()
        .map(|p| {
            let ports = p.port_refs();
            let states = BranchStates {
                red: r.coincidence_state(&ports)?,
                blue: b.coincidence_state(&ports)?,
            };
            Ok((p, states))
        })
        .collect()
}

/// Class outcome of the linear-combination scheme.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassOutcome {
    /// Normalized `(a±b)|φ⟩`; `None` when the class never fires.
    pub state: Option<CarrierState>,
    pub probability: f64,
}

fn joint_branch(op: &Operator, branch: Branch, n: usize) -> Result<OpticalElement> {
    let ports: Vec<String> = (1..=n).map(|k| slot_port(k, branch)).collect();
    let refs: Vec<&str> = ports.iter().map(String::as_str).collect();
    OpticalElement::joint(&refs, op.clone())
}

/// `a` acts on the red photons, `b` on the blue ones; the sum class returns
/// `(a+b)|φ⟩` with probability `‖(a+b)φ‖²/4`, the difference class `(a−b)|φ⟩`
/// with `‖(a−b)φ‖²/4`.
pub fn run_linear_combination(
    a: &Operator,
    b: &Operator,
    phi: &CarrierState,
) -> Result<BTreeMap<PatternClass, ClassOutcome>> {
    let n = phi.dims().len();
    for op in [a, b] {
        if !op.is_qubit_operator() || op.n_carriers() != n {
            return Err(Error::DimensionMismatch(format!(
                "operator on dims {:?} does not match a {n}-qubit input",
                op.dims_in()
            )));
        }
    }
    let patterns = run_two_path(
        phi,
        &[joint_branch(a, Branch::Red, n)?],
        &[joint_branch(b, Branch::Blue, n)?],
    )?;
    let mut acc: BTreeMap<PatternClass, (CarrierState, f64)> = BTreeMap::new();
    for (p, s) in patterns {
        let total = s.total();
        let e = acc
            .entry(p.class())
            .or_insert_with(|| (CarrierState::zeros(phi.dims().to_vec()), 0.0));
        e.1 += total.probability();
        e.0 = e.0.try_add(&total)?;
    }
    Ok(acc
        .into_iter()
        .map(|(k, (state, probability))| {
            (
                k,
                ClassOutcome {
                    state: if probability > 0.0 { state.normalized() } else { None },
                    probability,
                },
            )
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{self, named_gate, NamedGate};
    use crate::linalg::{c, random, ONE};
    use crate::photonic::fock::Pol;
    use crate::qudit;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn ket(v: &[f64]) -> CarrierState {
        CarrierState::qubits(v.iter().map(|&x| c(x, 0.0)).collect()).unwrap()
    }

    #[test]
    fn patterns_and_classes() {
        let ps = DetectionPattern::all(2);
        assert_eq!(ps.len(), 4);
        assert_eq!(ps[0].to_string(), "(1,2)");
        assert_eq!(ps[1].class(), PatternClass::Difference);
        assert_eq!(ps[3].class(), PatternClass::Sum);
    }

    #[test]
    fn each_pattern_carries_its_class_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random::ginibre_operator(2, &mut rng);
        let b = random::ginibre_operator(2, &mut rng);
        let phi = random::qubit_state(2, &mut rng);
        let pats = run_two_path(
            &phi,
            &[joint_branch(&a, Branch::Red, 2).unwrap()],
            &[joint_branch(&b, Branch::Blue, 2).unwrap()],
        )
        .unwrap();
        let sum = a.try_add(&b).unwrap().apply(&phi).unwrap();
        let diff = a.try_sub(&b).unwrap().apply(&phi).unwrap();
        let k = c(0.5 * FRAC_1_SQRT_2, 0.0);
        for (p, s) in pats {
            let want = match p.class() {
                PatternClass::Sum => sum.scale(k),
                PatternClass::Difference => diff.scale(k),
            };
            assert!(s.total().distance(&want) < 1e-12, "{p}");
        }
    }

    #[test]
    fn lc_identity_pair() {
        let phi = random::qubit_state(2, &mut ChaCha8Rng::seed_from_u64(1));
        let id = Operator::qubits_identity(2);
        let r = run_linear_combination(&id, &id, &phi).unwrap();
        assert!(r[&PatternClass::Difference].probability < 1e-15);
        assert!(r[&PatternClass::Difference].state.is_none());
        let s = r[&PatternClass::Sum].state.as_ref().unwrap();
        assert!(s.fidelity(&phi) > 1.0 - 1e-12);
    }

    #[test]
    fn lc_zz_on_hv() {
        let zz = named_gate(NamedGate::Z).kron(&named_gate(NamedGate::Z));
        let phi = ket(&[0.0, 1.0, 0.0, 0.0]);
        let r = run_linear_combination(&Operator::qubits_identity(2), &zz, &phi).unwrap();
        assert!(r[&PatternClass::Sum].probability < 1e-15);
        let s = r[&PatternClass::Difference].state.as_ref().unwrap();
        assert!(s.fidelity(&phi) > 1.0 - 1e-12);
        assert!((r[&PatternClass::Difference].probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lc_cnot_fires() {
        let a = gates::proj_h().kron(&Operator::qubits_identity(1));
        let b = gates::proj_v().kron(&named_gate(NamedGate::X));
        let phi = ket(&[0.0, 0.0, 1.0, 0.0]);
        let r = run_linear_combination(&a, &b, &phi).unwrap();
        let s = r[&PatternClass::Sum].state.as_ref().unwrap();
        assert!(s.fidelity(&ket(&[0.0, 0.0, 0.0, 1.0])) > 1.0 - 1e-12);
    }

    #[test]
    fn lc_dimension_mismatch() {
        let phi = ket(&[1.0, 0.0, 0.0, 0.0]);
        let x = named_gate(NamedGate::X);
        assert!(matches!(
            run_linear_combination(&x, &x, &phi),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn es_identity_returns_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let phi = random::qubit_state(2, &mut rng);
        let out = run_entanglement_scheme(1, &Operator::qubits_identity(1), &phi).unwrap();
        let acc: Vec<_> = out.values().filter(|o| o.accepting).collect();
        assert_eq!(acc.len(), 1);
        assert!(acc[0].state.as_ref().unwrap().fidelity(&phi) > 1.0 - 1e-12);
    }

    #[test]
    fn es_cnot_bell() {
        let h = FRAC_1_SQRT_2;
        let phi = ket(&[h, 0.0, h, 0.0]);
        let out = run_entanglement_scheme(1, &named_gate(NamedGate::X), &phi).unwrap();
        assert!((accepting_probability(&out) - 0.25).abs() < 1e-12);
        let bell = ket(&[h, 0.0, 0.0, h]);
        for o in out.values().filter(|o| o.accepting) {
            assert!(o.state.as_ref().unwrap().fidelity(&bell) > 1.0 - 1e-12);
        }
    }

    #[test]
    fn es_matches_add_control() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random::haar_qubit_unitary(1, &mut rng);
        let phi = random::qubit_state(2, &mut rng);
        let out = run_entanglement_scheme(1, &u, &phi).unwrap();
        let cu = qudit::add_control(&u).unwrap();
        let want = qudit::extract(&cu.apply(&qudit::embed_register(&phi, 1, 4).unwrap()).unwrap()).unwrap();
        for o in out.values().filter(|o| o.accepting) {
            assert!(o.state.as_ref().unwrap().fidelity(&want) > 1.0 - 1e-10);
        }
    }

    #[test]
    fn es_rejects_mismatched_op() {
        let phi = ket(&[1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            run_entanglement_scheme(1, &Operator::qubits_identity(2), &phi),
            Err(Error::DimensionMismatch(_))
        ));
    }

    fn cp_input(control: Pol, gamma: f64, delta: f64) -> FockState {
        let mut s = FockState::over_ports(&["1", "2r", "2b"], 2).unwrap();
        s.add_product(&[("1", control), ("2b", Pol::H)], c(gamma, 0.0)).unwrap();
        s.add_product(&[("1", control), ("2b", Pol::V)], c(delta, 0.0)).unwrap();
        s
    }

    #[test]
    fn cp_routes_target() {
        let circ = build_cp_gate("1", "2").unwrap();
        let (g, d) = (0.6, 0.8);
        let out = circ.run(&cp_input(Pol::H, g, d)).unwrap();
        let st = out.coincidence_state(&["1", "2r"]).unwrap();
        assert!(st.distance(&ket(&[g, d, 0.0, 0.0])) < 1e-12);
        let out = circ.run(&cp_input(Pol::V, g, d)).unwrap();
        let st = out.coincidence_state(&["1", "2b"]).unwrap();
        assert!(st.distance(&ket(&[0.0, 0.0, g, d])) < 1e-12);
    }

    #[test]
    fn cp_superposed_control() {
        let circ = build_cp_gate("1", "2").unwrap();
        let (g, d, h) = (0.6, 0.8, FRAC_1_SQRT_2);
        let input = cp_input(Pol::H, g, d).superpose(&cp_input(Pol::V, g, d)).unwrap().scale(c(h, 0.0));
        let out = circ.run(&input).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        let mut want = FockState::over_ports(&["1", "2r", "2b"], 2).unwrap();
        want.add_product(&[("1", Pol::H), ("2r", Pol::H)], c(h * g, 0.0)).unwrap();
        want.add_product(&[("1", Pol::H), ("2r", Pol::V)], c(h * d, 0.0)).unwrap();
        want.add_product(&[("1", Pol::V), ("2b", Pol::H)], c(h * g, 0.0)).unwrap();
        want.add_product(&[("1", Pol::V), ("2b", Pol::V)], c(h * d, 0.0)).unwrap();
        for (occ, &a) in want.terms() {
            assert!((out.amplitude(occ) - a).norm() < 1e-12);
        }
        assert_eq!(out.n_terms(), 4);
    }

    /// Single-photon-per-slot transfer matrix of the CP gate under the given
    /// target-mode dictionaries (level -> (port, pol)).
    fn cp_matrix(input: [(&str, Pol); 4], output: [(&str, Pol); 4]) -> Operator {
        let circ = build_cp_gate("1", "2").unwrap();
        let mut m = nalgebra::DMatrix::zeros(8, 8);
        for cbit in 0..2 {
            for (lvl, &(port, pol)) in input.iter().enumerate() {
                let mut s = FockState::over_ports(&["1", "2r", "2b"], 2).unwrap();
                s.add_product(&[("1", Pol::from_bit(cbit)), (port, pol)], ONE).unwrap();
                let out = circ.run(&s).unwrap();
                for cout in 0..2 {
                    for (lo, &(po, qo)) in output.iter().enumerate() {
                        let mut probe = FockState::over_ports(&["1", "2r", "2b"], 2).unwrap();
                        probe.add_product(&[("1", Pol::from_bit(cout)), (po, qo)], ONE).unwrap();
                        let (occ, _) = probe.terms().next().unwrap();
                        m[(cout * 4 + lo, cbit * 4 + lvl)] = out.amplitude(occ);
                    }
                }
            }
        }
        Operator::square(vec![2, 4], m).unwrap()
    }

    const OUT_DICT: [(&str, Pol); 4] = [("2b", Pol::H), ("2b", Pol::V), ("2r", Pol::H), ("2r", Pol::V)];

    #[test]
    fn cp_is_cxa_on_qubit_levels() {
        let m = cp_matrix(OUT_DICT, OUT_DICT);
        assert!(m.is_unitary());
        let cxa = qudit::controlled_xa(1).unwrap();
        for col in [0, 1, 4, 5] {
            for row in 0..8 {
                assert!((m.entry(row, col) - cxa.entry(row, col)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn cp_is_cxa_with_swapped_memory_inputs() {
        let input = [("2b", Pol::H), ("2b", Pol::V), ("2r", Pol::V), ("2r", Pol::H)];
        let m = cp_matrix(input, OUT_DICT);
        assert!(m.max_abs_diff(&qudit::controlled_xa(1).unwrap()) < 1e-12);
        let naive = cp_matrix(OUT_DICT, OUT_DICT);
        assert!(naive.max_abs_diff(&qudit::controlled_xa(1).unwrap()) > 0.5);
    }

    #[test]
    fn cp_rejects_same_ports() {
        assert!(build_cp_gate("2", "2").is_err());
    }
}
