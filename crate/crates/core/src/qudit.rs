//! Adding a control to an arbitrary operation by parking the target register
//! in extra carrier levels.
//!
//! Each target qubit is hosted by a four-level carrier whose levels `{0,1}`
//! are the qubit and `{2,3}` act as memory. A controlled `X_a` moves the
//! whole register into memory for one control value, the operation then acts
//! on the qubit levels only, and a second controlled `X_a` restores the
//! register. The operation itself is never decomposed or inspected, so it may
//! be unknown or non-unitary.
//!
//! Polarity: the public contract is that the operation fires when the control
//! is `|1⟩` ([`Polarity::OnOne`]). Internally the `X_a` chain triggers on
//! `|0⟩`, hiding that branch in memory.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{digits, dim_of, index_of, CarrierState, Operator, C64, EXACT_TOL, ONE, ZERO};

/// Which control value makes the operation act on the targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Polarity {
    #[default]
    OnOne,
    OnZero,
}

impl Polarity {
    /// Control value on which the `X_a` chain fires (the hidden branch).
    fn memory_trigger(self) -> usize {
        match self {
            Polarity::OnOne => 0,
            Polarity::OnZero => 1,
        }
    }
}

/// The 4×4 level swap `{0,1} <-> {2,3}`.
pub fn xa_gate() -> Operator {
    #[rustfmt::skip]
    let m = [
        0.0, 0.0, 1.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        1.0, 0.0, 0.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
    ];
    Operator::from_real(vec![4], &m).expect("4x4")
}

/// Copy a qubit register onto the bottom two levels of `carrier_dim`-level carriers.
pub fn embed_into(psi: &CarrierState, carrier_dim: usize) -> Result<CarrierState> {
    if psi.dims().iter().any(|&d| d != 2) {
        return Err(Error::DimensionMismatch(format!(
            "embed expects qubits, got carriers {:?}",
            psi.dims()
        )));
    }
    if carrier_dim < 2 {
        return Err(Error::DimensionMismatch(format!(
            "carrier dimension {carrier_dim} cannot host a qubit"
        )));
    }
    let n = psi.dims().len();
    let out_dims = vec![carrier_dim; n];
    let mut out = vec![ZERO; dim_of(&out_dims)];
    for (i, &a) in psi.amplitudes().iter().enumerate() {
        out[index_of(&digits(i, psi.dims()), &out_dims)] = a;
    }
    CarrierState::new(out_dims, out)
}

/// Qubits -> ququarts, levels `{2,3}` left empty.
pub fn embed(psi: &CarrierState) -> Result<CarrierState> {
    embed_into(psi, 4)
}

/// Keep the first `n_controls` qubits as they are and embed the rest into
/// `carrier_dim`-level carriers: the input layout of [`add_control`] and
/// [`add_multi_control`].
pub fn embed_register(phi: &CarrierState, n_controls: usize, carrier_dim: usize) -> Result<CarrierState> {
    let n = phi.dims().len();
    if n_controls >= n {
        return Err(Error::DimensionMismatch(format!(
            "{n_controls} control(s) leave no targets in a {n}-qubit register"
        )));
    }
    if phi.dims().iter().any(|&d| d != 2) || carrier_dim < 2 {
        return Err(Error::DimensionMismatch(format!(
            "cannot embed carriers {:?} into dimension {carrier_dim}",
            phi.dims()
        )));
    }
    let mut dims = vec![2; n_controls];
    dims.extend(std::iter::repeat_n(carrier_dim, n - n_controls));
    let mut out = vec![ZERO; dim_of(&dims)];
    for (i, &a) in phi.amplitudes().iter().enumerate() {
        out[index_of(&digits(i, phi.dims()), &dims)] = a;
    }
    CarrierState::new(dims, out)
}

/// Restrict every carrier to its bottom two levels. Fails when more than
/// [`EXACT_TOL`] of the squared norm sits on higher levels.
pub fn extract(state: &CarrierState) -> Result<CarrierState> {
    let dims = state.dims();
    if dims.iter().any(|&d| d < 2) {
        return Err(Error::DimensionMismatch(format!("carriers {dims:?}")));
    }
    let out_dims = vec![2; dims.len()];
    let mut out = vec![ZERO; dim_of(&out_dims)];
    let mut leaked = 0.0;
    for (i, &a) in state.amplitudes().iter().enumerate() {
        let lv = digits(i, dims);
        if lv.iter().all(|&l| l < 2) {
            out[index_of(&lv, &out_dims)] = a;
        } else {
            leaked += a.norm_sqr();
        }
    }
    if leaked >= EXACT_TOL {
        return Err(Error::ResidualMemoryPopulation { weight: leaked });
    }
    CarrierState::new(out_dims, out)
}

fn controlled_xa_with(n_targets: usize, trigger: usize) -> Operator {
    let xa = xa_gate();
    let mut chain = xa.clone();
    for _ in 1..n_targets {
        chain = chain.kron(&xa);
    }
    let t = chain.matrix().nrows();
    let mut m = DMatrix::<C64>::zeros(2 * t, 2 * t);
    for ctrl in 0..2 {
        for i in 0..t {
            for j in 0..t {
                m[(ctrl * t + i, ctrl * t + j)] = if ctrl == trigger {
                    chain.entry(i, j)
                } else if i == j {
                    ONE
                } else {
                    ZERO
                };
            }
        }
    }
    let mut dims = vec![2];
    dims.extend(std::iter::repeat_n(4, n_targets));
    Operator::square(dims, m).expect("dimensions agree")
}

/// `X_a` on every target carrier when the control is `|0⟩`; identity otherwise.
/// Carriers are `[2, 4, …, 4]`.
pub fn controlled_xa(n_targets: usize) -> Result<Operator> {
    if n_targets == 0 {
        return Err(Error::Precondition("controlled_xa needs at least one target".into()));
    }
    Ok(controlled_xa_with(n_targets, 0))
}

/// `op` on the all-qubit-level subspace of `carrier_dim`-level carriers,
/// identity on every basis state with some carrier above level 1.
pub fn qubit_level_action(op: &Operator, carrier_dim: usize) -> Result<Operator> {
    banked_action(std::slice::from_ref(op), carrier_dim)
}

/// Bank `b` of a carrier is the level pair `{2b, 2b+1}`. Applies `ops[b]` on
/// the subspace where every carrier sits in bank `b`; identity elsewhere.
fn banked_action(ops: &[Operator], carrier_dim: usize) -> Result<Operator> {
    let n = ops[0].n_carriers();
    if carrier_dim < 2 * ops.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} banks need carrier dimension {}",
            ops.len(),
            2 * ops.len()
        )));
    }
    let dims = vec![carrier_dim; n];
    let qdims = vec![2; n];
    let total = dim_of(&dims);
    let mut m = DMatrix::<C64>::identity(total, total);
    for (bank, op) in ops.iter().enumerate() {
        let to_full = |q: usize| -> usize {
            let lv: Vec<usize> = digits(q, &qdims).iter().map(|b| 2 * bank + b).collect();
            index_of(&lv, &dims)
        };
        let sub = 1 << n;
        for r in 0..sub {
            for c in 0..sub {
                m[(to_full(r), to_full(c))] = op.entry(r, c);
            }
        }
    }
    Operator::square(dims, m)
}

fn check_qubit_op(op: &Operator) -> Result<()> {
    if !op.is_qubit_operator() || op.n_carriers() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "expected a square operator on qubits, got {:?}<-{:?}",
            op.dims_out(),
            op.dims_in()
        )));
    }
    Ok(())
}

/// Controlled version of `op` on carriers `[2, 4 × n]`, firing on control `|1⟩`.
pub fn add_control(op: &Operator) -> Result<Operator> {
    add_control_with(op, Polarity::OnOne)
}

pub fn add_control_with(op: &Operator, polarity: Polarity) -> Result<Operator> {
    check_qubit_op(op)?;
    let n = op.n_carriers();
    let cxa = controlled_xa_with(n, polarity.memory_trigger());
    let middle = Operator::identity(vec![2]).kron(&qubit_level_action(op, 4)?);
    Ok(&(&cxa * &middle) * &cxa)
}

/// `k` control qubits selecting one of `2^k` operations. Targets live in
/// carriers of dimension `2^(k+1)`; control value `j` swaps every carrier's
/// bank 0 with bank `j`, and `ops[j]` acts on bank `j`.
pub fn add_multi_control(ops: &[Operator], k: usize) -> Result<Operator> {
    if k == 0 {
        return Err(Error::Precondition("at least one control qubit".into()));
    }
    let branches = 1usize << k;
    if ops.len() != branches {
        return Err(Error::DimensionMismatch(format!(
            "{} operations for {k} controls (need {branches})",
            ops.len()
        )));
    }
    for op in ops {
        check_qubit_op(op)?;
        if op.dims_in() != ops[0].dims_in() {
            return Err(Error::DimensionMismatch(
                "all operations must act on the same register".into(),
            ));
        }
    }
    let n = ops[0].n_carriers();
    let carrier_dim = 2 * branches;
    let tdims = vec![carrier_dim; n];
    let t = dim_of(&tdims);

    // Σ_j |j⟩⟨j| ⊗ S_j^{⊗n}, S_j swapping banks 0 and j; a permutation.
    let bank_swap = |level: usize, j: usize| -> usize {
        let (bank, bit) = (level / 2, level % 2);
        let nb = if bank == 0 {
            j
        } else if bank == j {
            0
        } else {
            bank
        };
        2 * nb + bit
    };
    let mut shift = DMatrix::<C64>::zeros(branches * t, branches * t);
    for j in 0..branches {
        for col in 0..t {
            let lv: Vec<usize> = digits(col, &tdims).iter().map(|&l| bank_swap(l, j)).collect();
            shift[(j * t + index_of(&lv, &tdims), j * t + col)] = ONE;
        }
    }
    let mut dims = vec![2; k];
    dims.extend_from_slice(&tdims);
    let shift = Operator::square(dims, shift)?;
    let middle = Operator::identity(vec![2; k]).kron(&banked_action(ops, carrier_dim)?);
    Ok(&(&shift * &middle) * &shift)
}

/// Compress an operator on `[2…, D…]` carriers onto the all-qubit-level
/// subspace: `P† · op · P` with `P` the embedding isometry.
pub fn restrict_to_qubit_levels(op: &Operator) -> Result<Operator> {
    if !op.is_square() {
        return Err(Error::DimensionMismatch("restriction needs a square operator".into()));
    }
    let dims = op.dims_in().to_vec();
    let qdims = vec![2; dims.len()];
    let q = dim_of(&qdims);
    let map: Vec<usize> = (0..q).map(|i| index_of(&digits(i, &qdims), &dims)).collect();
    let m = DMatrix::from_fn(q, q, |r, c| op.entry(map[r], map[c]));
    Operator::square(qdims, m)
}

/// Textbook block matrix `|0⟩⟨0| ⊗ ops[0] + |1⟩⟨1| ⊗ ops[1] + …` over `k` control qubits.
pub fn direct_controlled(ops: &[Operator], k: usize) -> Result<Operator> {
    if ops.len() != 1 << k {
        return Err(Error::DimensionMismatch("need 2^k operations".into()));
    }
    let t = ops[0].matrix().nrows();
    let mut m = DMatrix::<C64>::zeros(ops.len() * t, ops.len() * t);
    for (j, op) in ops.iter().enumerate() {
        m.view_mut((j * t, j * t), (t, t)).copy_from(op.matrix());
    }
    let mut dims = vec![2; k];
    dims.extend_from_slice(ops[0].dims_in());
    Operator::square(dims, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{named_gate, NamedGate};
    use crate::linalg::{c, random};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ket(dims: Vec<usize>, lv: &[usize]) -> CarrierState {
        CarrierState::basis(dims, lv).unwrap()
    }

    #[test]
    fn xa_moves_zero_to_two() {
        let out = xa_gate().apply(&ket(vec![4], &[0])).unwrap();
        assert_eq!(out, ket(vec![4], &[2]));
    }

    #[test]
    fn xa_self_inverse_on_one() {
        let xa = xa_gate();
        let s = ket(vec![4], &[1]);
        assert_eq!(xa.apply(&xa.apply(&s).unwrap()).unwrap(), s);
        assert_eq!(&xa * &xa, Operator::identity(vec![4]));
    }

    #[test]
    fn xa_linear_on_superposition() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = CarrierState::new(vec![4], vec![c(h, 0.0), ZERO, ZERO, c(h, 0.0)]).unwrap();
        let out = xa_gate().apply(&s).unwrap();
        let want = CarrierState::new(vec![4], vec![ZERO, c(h, 0.0), c(h, 0.0), ZERO]).unwrap();
        assert!(out.distance(&want) < 1e-15);
    }

    #[test]
    fn embed_basis_and_bell() {
        let e = embed(&ket(vec![2], &[0])).unwrap();
        assert_eq!(e, ket(vec![4], &[0]));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = CarrierState::qubits(vec![ZERO, c(h, 0.0), c(h, 0.0), ZERO]).unwrap();
        let e = embed(&psi).unwrap();
        assert_eq!(e.dims(), &[4, 4]);
        assert_eq!(e.amplitude(&[0, 1]), c(h, 0.0));
        assert_eq!(e.amplitude(&[1, 0]), c(h, 0.0));
        assert!((e.probability() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn embed_rejects_non_qubits() {
        assert!(matches!(
            embed(&ket(vec![3], &[0])),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn extract_roundtrip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..100 {
            let psi = random::qubit_state(1 + i % 3, &mut rng);
            let back = extract(&embed(&psi).unwrap()).unwrap();
            assert!(back.distance(&psi) < 1e-15);
        }
        assert_eq!(
            extract(&embed(&ket(vec![2], &[1])).unwrap()).unwrap(),
            ket(vec![2], &[1])
        );
    }

    #[test]
    fn extract_reports_leak() {
        match extract(&ket(vec![4], &[2])) {
            Err(Error::ResidualMemoryPopulation { weight }) => assert!((weight - 1.0).abs() < 1e-15),
            other => panic!("expected leak error, got {other:?}"),
        }
    }

    #[test]
    fn controlled_xa_branches() {
        let cx = controlled_xa(1).unwrap();
        assert_eq!(cx.dims_in(), &[2, 4]);
        // Oracle: permutation enumeration, trigger on control 0.
        for ctrl in 0..2 {
            for lv in 0..4 {
                let out = cx.apply(&ket(vec![2, 4], &[ctrl, lv])).unwrap();
                let want_lv = if ctrl == 0 { (lv + 2) % 4 } else { lv };
                assert_eq!(out, ket(vec![2, 4], &[ctrl, want_lv]));
            }
        }
        assert!(cx.is_unitary());
    }

    #[test]
    fn controlled_xa_squared_is_identity() {
        let cx = controlled_xa(2).unwrap();
        assert_eq!(&cx * &cx, Operator::identity(vec![2, 4, 4]));
        assert!(controlled_xa(0).is_err());
    }

    #[test]
    fn identity_op_gives_identity_on_embedded() {
        let ctl = add_control(&Operator::qubits_identity(1)).unwrap();
        let r = restrict_to_qubit_levels(&ctl).unwrap();
        assert!(r.max_abs_diff(&Operator::qubits_identity(2)) < 1e-15);
    }

    #[test]
    fn x_gives_cnot() {
        let x = named_gate(NamedGate::X);
        let ctl = add_control(&x).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = CarrierState::qubits(vec![c(h, 0.0), c(h, 0.0)]).unwrap();
        let input = plus.tensor(&embed(&ket(vec![2], &[0])).unwrap());
        let out = extract(&ctl.apply(&input).unwrap()).unwrap();
        #[rustfmt::skip]
        let cnot = Operator::from_real(vec![2, 2], &[
            1.0, 0.0, 0.0, 0.0,
            0.0, 1.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
            0.0, 0.0, 1.0, 0.0,
        ]).unwrap();
        let want = cnot.apply(&plus.tensor(&ket(vec![2], &[0]))).unwrap();
        assert!(out.distance(&want) < 1e-15);
        assert!(restrict_to_qubit_levels(&ctl).unwrap().max_abs_diff(&cnot) < 1e-15);
    }

    #[test]
    fn projector_branch_annihilated() {
        let p0 = Operator::from_real(vec![2], &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let ctl = add_control(&p0).unwrap();
        assert!(!ctl.is_unitary());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = CarrierState::qubits(vec![c(h, 0.0), c(h, 0.0)]).unwrap();
        let input = plus.tensor(&embed(&ket(vec![2], &[1])).unwrap());
        let out = ctl.apply(&input).unwrap();
        assert!((out.probability() - 0.5).abs() < 1e-15);
        assert!((out.amplitude(&[0, 1]) - c(h, 0.0)).norm() < 1e-15);
        assert!(out.amplitude(&[1, 1]).norm() < 1e-15);
    }

    #[test]
    fn on_zero_polarity_swaps_branches() {
        let x = named_gate(NamedGate::X);
        let ctl = add_control_with(&x, Polarity::OnZero).unwrap();
        let out = ctl
            .apply(&ket(vec![2], &[0]).tensor(&embed(&ket(vec![2], &[0])).unwrap()))
            .unwrap();
        assert_eq!(out, ket(vec![2, 4], &[0, 1]));
    }

    #[test]
    fn add_control_rejects_non_qubit() {
        assert!(matches!(
            add_control(&xa_gate()),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn multi_control_identity() {
        let ops = vec![Operator::qubits_identity(1); 4];
        let m = add_multi_control(&ops, 2).unwrap();
        let r = restrict_to_qubit_levels(&m).unwrap();
        assert!(r.max_abs_diff(&Operator::qubits_identity(3)) < 1e-15);
    }

    #[test]
    fn multi_control_length_checked() {
        let ops = vec![Operator::qubits_identity(1); 3];
        assert!(matches!(
            add_multi_control(&ops, 2),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn multi_control_superposed_operations() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let o1 = random::haar_qubit_unitary(1, &mut rng);
        let o2 = random::ginibre_operator(1, &mut rng);
        let psi = random::qubit_state(1, &mut rng);
        let m = add_multi_control(&[o1.clone(), o2.clone()], 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = CarrierState::qubits(vec![c(h, 0.0), c(h, 0.0)]).unwrap();
        let out = m.apply(&plus.tensor(&embed(&psi).unwrap())).unwrap();
        let want = ket(vec![2], &[0])
            .tensor(&embed(&o1.apply(&psi).unwrap()).unwrap())
            .try_add(&ket(vec![2], &[1]).tensor(&embed(&o2.apply(&psi).unwrap()).unwrap()))
            .unwrap()
            .scale(c(h, 0.0));
        assert!(out.distance(&want) < 1e-14);
    }
}
