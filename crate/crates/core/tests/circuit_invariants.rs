//! Combinator algebra and simulation agreement on random circuits.

mod common;

use qtk_core::circuit::{control, inverse, run, seq, to_unitary, Polarity};
use qtk_core::qnum::{controlled, StateVector, UMatrix};
use qtk_core::rng::seeded_rng;
use rand::{Rng, RngCore};

const MAXQ: usize = 14;

#[test]
fn seq_with_inverse_is_identity() {
    let mut rng = seeded_rng(2001);
    for _ in 0..30 {
        let n = 1 + (rng.next_u64() % 5) as usize;
        let gates = 1 + (rng.next_u64() % 40) as usize;
        let c = common::random_pure_circuit(&mut rng, n, gates);
        let inv = inverse(&c).unwrap();
        let round = seq(&c, &inv).unwrap();
        let u = to_unitary(&round, MAXQ).unwrap();
        u.assert_close(&UMatrix::identity(1 << n), 1e-9);
    }
}

#[test]
fn control_distributes_over_seq() {
    let mut rng = seeded_rng(2002);
    for _ in 0..15 {
        let n = 1 + (rng.next_u64() % 3) as usize;
        let a = common::random_pure_circuit(&mut rng, n, 8);
        let b = common::random_pure_circuit(&mut rng, n, 8);
        let lhs = control(&seq(&a, &b).unwrap(), Polarity::Positive).unwrap();
        let rhs = seq(
            &control(&a, Polarity::Positive).unwrap(),
            &control(&b, Polarity::Positive).unwrap(),
        )
        .unwrap();
        let ul = to_unitary(&lhs, MAXQ).unwrap();
        let ur = to_unitary(&rhs, MAXQ).unwrap();
        assert!(ul.distance(&ur) <= 1e-9);
    }
}

#[test]
fn control_is_block_diagonal() {
    let mut rng = seeded_rng(2003);
    for polarity in [Polarity::Positive, Polarity::Negative] {
        let c = common::random_pure_circuit(&mut rng, 2, 10);
        let controlled_circuit = control(&c, polarity).unwrap();
        let u = to_unitary(&c, MAXQ).unwrap();
        let expected = controlled(&u, polarity).unwrap();
        let got = to_unitary(&controlled_circuit, MAXQ).unwrap();
        assert!(got.distance(&expected) <= 1e-9);
    }
}

#[test]
fn run_agrees_with_to_unitary_on_all_basis_inputs() {
    let mut rng = seeded_rng(2004);
    for _ in 0..10 {
        let n = 1 + (rng.next_u64() % 4) as usize; // up to 4 qubits
        let c = common::random_pure_circuit(&mut rng, n, 15);
        let u = to_unitary(&c, MAXQ).unwrap();
        for idx in 0..1usize << n {
            let input = StateVector::basis_index(n, idx);
            let mut run_rng = seeded_rng(0);
            let out = run(&c, &input, &mut run_rng, MAXQ).unwrap();
            let expected = StateVector::from_amplitudes(u.mul_vec(input.amplitudes())).unwrap();
            assert!(out.state.distance(&expected) <= 1e-9);
        }
    }
}

#[test]
fn json_roundtrip_random_circuits() {
    let mut rng = seeded_rng(2005);
    for _ in 0..20 {
        let n = 1 + rng.random_range(0..4usize);
        let c = common::random_pure_circuit(&mut rng, n, 12);
        let json = c.to_json();
        let back = qtk_core::circuit::Circuit::from_json(&json).unwrap();
        assert_eq!(c, back);
        // serialization is deterministic
        assert_eq!(json, back.to_json());
    }
}
