//! Strided kernels against the dense Kronecker oracle.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdqss_core::gates::{cnot_permutation, inv_qft_matrix, pauli_u0s_matrix, qft_matrix};
use tdqss_core::oracle::{apply_dense, lift_gate, lift_single, DenseOperator};
use tdqss_core::{CnotMode, GateSpec, Matrix, RegisterShape, StateVector};

fn random_state(shape: RegisterShape, rng: &mut impl Rng) -> StateVector {
    let amps = (0..shape.len())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    StateVector::normalized(shape, amps).unwrap()
}

/// Haar-ish unitary: Gram-Schmidt on the columns of a random complex matrix.
fn random_unitary(d: usize, rng: &mut impl Rng) -> Matrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<Complex64> =
            (0..d).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        for u in &cols {
            let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= proj * y);
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            v.iter_mut().for_each(|x| *x /= norm);
            cols.push(v);
        }
    }
    Matrix::from_fn(d, |r, c| cols[c][r])
}

fn all_gate_specs(shape: RegisterShape) -> Vec<GateSpec> {
    let (d, t) = (shape.d(), shape.t());
    let mut specs = Vec::new();
    for q in 0..t {
        specs.push(GateSpec::Qft { qudit: q });
        specs.push(GateSpec::InverseQft { qudit: q });
        for s in 0..d {
            specs.push(GateSpec::Phase { qudit: q, s });
        }
    }
    let mut modes = vec![CnotMode::Add, CnotMode::Sub];
    if d.is_power_of_two() {
        modes.push(CnotMode::Xor);
    }
    for control in 0..t {
        for target in 0..t {
            if control != target {
                for &mode in &modes {
                    specs.push(GateSpec::Cnot { control, target, mode });
                }
            }
        }
    }
    specs
}

#[test]
fn random_unitaries_match_dense_lift() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for d in 2..=5 {
        for t in 1..=3 {
            let shape = RegisterShape::new(d, t).unwrap();
            for _ in 0..5 {
                let u = random_unitary(d, &mut rng);
                assert!(u.unitarity_defect() <= 1e-12);
                for q in 0..t {
                    let state = random_state(shape, &mut rng);
                    let mut fast = state.clone();
                    fast.apply_single_qudit_gate(q, &u).unwrap();
                    let slow = apply_dense(&lift_single(shape, q, &u).unwrap(), &state).unwrap();
                    assert!(fast.max_abs_diff(&slow).unwrap() <= 1e-12, "d={d} t={t} q={q}");
                    assert!((fast.norm_sqr() - 1.0).abs() <= 1e-10);
                }
            }
        }
    }
}

#[test]
fn every_gate_kind_matches_dense_lift() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (d, t) in [(2, 1), (2, 3), (3, 2), (4, 2), (4, 3), (5, 2), (8, 2), (2, 8), (16, 2), (6, 3)] {
        let shape = RegisterShape::new(d, t).unwrap();
        assert!(shape.len() <= 256);
        for spec in all_gate_specs(shape) {
            let op = lift_gate(shape, &spec).unwrap();
            assert!(op.matrix().unitarity_defect() <= 1e-12, "{spec:?}");
            for _ in 0..3 {
                let state = random_state(shape, &mut rng);
                let mut fast = state.clone();
                spec.apply(&mut fast).unwrap();
                let slow = apply_dense(&op, &state).unwrap();
                assert!(fast.max_abs_diff(&slow).unwrap() <= 1e-12, "d={d} t={t} {spec:?}");
            }
        }
    }
}

#[test]
fn gate_matrices_are_unitary() {
    for d in 2..=16 {
        assert!(qft_matrix(d).unwrap().unitarity_defect() <= 1e-12);
        assert!(inv_qft_matrix(d).unwrap().unitarity_defect() <= 1e-12);
        for s in 0..d {
            assert!(pauli_u0s_matrix(d, s).unwrap().unitarity_defect() <= 1e-12);
        }
    }
}

#[test]
fn inverse_qft_maps_every_ramp_to_its_residue() {
    for d in 2..=12 {
        let shape = RegisterShape::new(d, 1).unwrap();
        let norm = 1.0 / (d as f64).sqrt();
        for s in 0..2 * d {
            // ramp built with plain floating-point angles, independent of omega_pow
            let amps = (0..d)
                .map(|k| Complex64::from_polar(norm, std::f64::consts::TAU * (s * k) as f64 / d as f64))
                .collect();
            let mut st = StateVector::from_amplitudes(shape, amps).unwrap();
            st.apply_single_qudit_gate(0, &inv_qft_matrix(d).unwrap()).unwrap();
            let want = StateVector::basis(shape, &[s % d]).unwrap();
            assert!(st.fidelity(&want).unwrap() >= 1.0 - 1e-10, "d={d} s={s}");
        }
    }
}

#[test]
fn add_then_sub_round_trips_protocol_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for d in 2..=8 {
        let shape = RegisterShape::new(d, 2).unwrap();
        let mut amps = vec![Complex64::new(0.0, 0.0); shape.len()];
        for k in 0..d {
            amps[k * d] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let start = StateVector::normalized(shape, amps).unwrap();
        let mut modes = vec![(CnotMode::Add, CnotMode::Sub)];
        if d.is_power_of_two() {
            modes.push((CnotMode::Xor, CnotMode::Xor));
        }
        for (fwd, back) in modes {
            let mut s = start.clone();
            s.apply_two_qudit_permutation(0, 1, &cnot_permutation(d, fwd).unwrap()).unwrap();
            s.apply_two_qudit_permutation(0, 1, &cnot_permutation(d, back).unwrap()).unwrap();
            assert!(s.max_abs_diff(&start).unwrap() <= 1e-12);
        }
    }
}

#[test]
fn add_and_xor_agree_on_protocol_states_only() {
    for d in [2, 4, 8] {
        let shape = RegisterShape::new(d, 2).unwrap();
        let add = cnot_permutation(d, CnotMode::Add).unwrap();
        let sub = cnot_permutation(d, CnotMode::Sub).unwrap();
        let xor = cnot_permutation(d, CnotMode::Xor).unwrap();
        for k in 0..d {
            for (input, want) in [([k, 0], [k, k]), ([k, k], [k, 0])] {
                let target = StateVector::basis(shape, &want).unwrap();
                let fwd = if input[1] == 0 { &add } else { &sub };
                for perm in [fwd, &xor] {
                    let mut s = StateVector::basis(shape, &input).unwrap();
                    s.apply_two_qudit_permutation(0, 1, perm).unwrap();
                    assert_eq!(s, target);
                }
            }
        }
    }
    // off the protocol states the operators differ: |1,1⟩ goes to |1,2⟩ vs |1,0⟩
    let shape = RegisterShape::new(4, 2).unwrap();
    let mut via_add = StateVector::basis(shape, &[1, 1]).unwrap();
    via_add.apply_two_qudit_permutation(0, 1, &cnot_permutation(4, CnotMode::Add).unwrap()).unwrap();
    let mut via_xor = StateVector::basis(shape, &[1, 1]).unwrap();
    via_xor.apply_two_qudit_permutation(0, 1, &cnot_permutation(4, CnotMode::Xor).unwrap()).unwrap();
    assert_eq!(via_add, StateVector::basis(shape, &[1, 2]).unwrap());
    assert_eq!(via_xor, StateVector::basis(shape, &[1, 0]).unwrap());
}

#[test]
fn dense_composition_is_associative() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let shape = RegisterShape::new(3, 3).unwrap();
    let seq = [
        GateSpec::Qft { qudit: 2 },
        GateSpec::Cnot { control: 2, target: 0, mode: CnotMode::Add },
        GateSpec::Phase { qudit: 0, s: 2 },
    ];
    let product = DenseOperator::from_sequence(shape, &seq).unwrap();
    let state = random_state(shape, &mut rng);
    let mut stepwise = state.clone();
    for g in &seq {
        stepwise = apply_dense(&lift_gate(shape, g).unwrap(), &stepwise).unwrap();
    }
    let at_once = apply_dense(&product, &state).unwrap();
    assert!(at_once.max_abs_diff(&stepwise).unwrap() <= 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unitary_gates_preserve_norm(d in 2usize..=5, t in 1usize..=3, seed in any::<u64>(), q_pick in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = RegisterShape::new(d, t).unwrap();
        let mut state = random_state(shape, &mut rng);
        let u = random_unitary(d, &mut rng);
        state.apply_single_qudit_gate(q_pick % t, &u).unwrap();
        prop_assert!((state.norm_sqr() - 1.0).abs() <= 1e-10);
        let dist = state.measurement_distribution(q_pick % t).unwrap();
        prop_assert!((dist.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn permutations_preserve_probability_multiset(d in 2usize..=6, seed in any::<u64>(), mode_pick in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = RegisterShape::new(d, 3).unwrap();
        let state = random_state(shape, &mut rng);
        let mode = [CnotMode::Add, CnotMode::Sub, CnotMode::Xor][mode_pick];
        prop_assume!(mode != CnotMode::Xor || d.is_power_of_two());
        let mut out = state.clone();
        out.apply_two_qudit_permutation(2, 0, &cnot_permutation(d, mode).unwrap()).unwrap();
        let sorted = |s: &StateVector| {
            let mut p: Vec<f64> = s.amplitudes().iter().map(|a| a.norm_sqr()).collect();
            p.sort_by(f64::total_cmp);
            p
        };
        prop_assert_eq!(sorted(&state), sorted(&out));
    }
}
