use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use qtk_bench::fixture_circuit;
use qtk_core::circuit::{run, to_unitary};
use qtk_core::oracle;
use qtk_core::pathsum::circuit_pathsum;
use qtk_core::qlc::{self, MachineLimits};
use qtk_core::qnum::{gate_matrix, GateName, StateVector, UMatrix};
use qtk_core::rng::seeded_rng;
use qtk_core::usynth;

fn bench_statevector_apply(c: &mut Criterion) {
    let h = gate_matrix(GateName::H, &[]).unwrap();
    let cnot = gate_matrix(GateName::Cnot, &[]).unwrap();
    let state = StateVector::zeros(10);
    c.bench_function("statevector_apply_10q", |b| {
        b.iter(|| {
            let s = state.apply(&h, &[4]).unwrap();
            black_box(s.apply(&cnot, &[4, 7]).unwrap())
        })
    });
}

fn bench_circuit_simulation(c: &mut Criterion) {
    let circuit = fixture_circuit(11, 6, 80);
    let input = StateVector::zeros(6);
    c.bench_function("run_6q_80gates", |b| {
        b.iter(|| {
            let mut rng = seeded_rng(3);
            black_box(run(&circuit, &input, &mut rng, 14).unwrap())
        })
    });
    let small = fixture_circuit(13, 4, 40);
    c.bench_function("to_unitary_4q_40gates", |b| {
        b.iter(|| black_box(to_unitary(&small, 14).unwrap()))
    });
}

fn bench_qlc_eval(c: &mut Criterion) {
    let checked = qlc::load("meas (H (qinit ff))").unwrap();
    let limits = MachineLimits::default();
    c.bench_function("qlc_coin_eval", |b| {
        b.iter(|| {
            let mut rng = seeded_rng(5);
            black_box(
                qlc::eval(qlc::Program::new(checked.term.clone()), &mut rng, 100, limits)
                    .unwrap(),
            )
        })
    });
}

fn bench_oracle_synthesis(c: &mut Criterion) {
    let term =
        oracle::parse_bool("fun a b c d -> and (and a b) (not (and (not c) (not d)))").unwrap();
    c.bench_function("oracle_synth_4in", |b| {
        b.iter(|| black_box(oracle::synthesize_oracle(&term, 4).unwrap()))
    });
    let oracle_circuit = oracle::synthesize_oracle(&term, 4).unwrap();
    c.bench_function("oracle_verify_4in", |b| {
        b.iter(|| black_box(oracle::verify_oracle(&oracle_circuit.circuit, &term, 4).unwrap()))
    });
}

fn bench_householder(c: &mut Criterion) {
    let mut rng = seeded_rng(17);
    let u3 = UMatrix::random_unitary(8, &mut rng);
    c.bench_function("householder_synth_3q", |b| {
        b.iter(|| black_box(usynth::synth_householder(&u3, 14).unwrap()))
    });
}

fn bench_pathsum(c: &mut Criterion) {
    let circuit = fixture_circuit(23, 4, 30);
    c.bench_function("circuit_pathsum_4q_30gates", |b| {
        b.iter(|| black_box(circuit_pathsum(&circuit).unwrap()))
    });
}

fn bench_bfgs(c: &mut Criterion) {
    let ansatz = qtk_core::IonAnsatz::new(2, 2);
    let theta: Vec<f64> = (0..ansatz.param_count()).map(|i| 0.2 * i as f64).collect();
    let target = ansatz.eval(&theta).unwrap();
    c.bench_function("bfgs_planted_2q", |b| {
        b.iter(|| {
            let mut rng = seeded_rng(29);
            black_box(usynth::bfgs_synth(&target, 2, &mut rng, 200, 1).unwrap())
        })
    });
}

criterion_group!(
    benches,
    bench_statevector_apply,
    bench_circuit_simulation,
    bench_qlc_eval,
    bench_oracle_synthesis,
    bench_householder,
    bench_pathsum,
    bench_bfgs
);
criterion_main!(benches);
