use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use qfhe_core::{
    build_gate_selector_uqc, keygen, run_delegation, run_key_schedule, Circuit, EvaluationPlan,
    Gate, Program, RunOptions, StateVector, TransportKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_circuit(width: usize, len: usize, rng: &mut ChaCha8Rng) -> Circuit {
    let gates = (0..len)
        .map(|_| {
            let q = rng.gen_range(0..width);
            match rng.gen_range(0..7) {
                0 => Gate::X(q),
                1 => Gate::Y(q),
                2 => Gate::Z(q),
                3 => Gate::H(q),
                4 => Gate::P(q),
                5 => Gate::R(q),
                _ => Gate::Cnot {
                    control: q,
                    target: (q + 1) % width,
                },
            }
        })
        .collect();
    Circuit::with_gates(width, 0, gates).unwrap()
}

fn gate_application(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply_gate");
    for qubits in [4usize, 8, 12] {
        let state = StateVector::zero(qubits).unwrap();
        group.bench_with_input(BenchmarkId::new("H", qubits), &state, |b, s| {
            b.iter(|| s.apply_gate(black_box(&Gate::H(qubits / 2))).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("CNOT", qubits), &state, |b, s| {
            b.iter(|| {
                s.apply_gate(black_box(&Gate::Cnot { control: 0, target: qubits - 1 }))
                    .unwrap()
            })
        });
    }
    group.finish();
}

fn key_schedule(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let circuit = random_circuit(8, 1000, &mut rng);
    let ek = keygen(8, 0, &mut rng).unwrap();
    let pairs: Vec<_> = (0..circuit.r_count())
        .map(|_| qfhe_core::RandomBitPair::draw(&mut rng))
        .collect();
    c.bench_function("key_schedule_1000_gates", |b| {
        b.iter(|| run_key_schedule(black_box(&ek), &circuit, &pairs).unwrap())
    });
}

fn delegation(c: &mut Criterion) {
    let mut group = c.benchmark_group("delegation");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let circuit = random_circuit(4, 50, &mut rng);
    let plan = EvaluationPlan::new(circuit, Vec::new(), 1).unwrap();
    let ek = keygen(4, 0, &mut rng).unwrap();
    let data = StateVector::random(4, &mut rng).unwrap();
    for (name, transport) in [("inproc", TransportKind::InProc), ("socket", TransportKind::Socket)] {
        let options = RunOptions {
            transport,
            ..Default::default()
        };
        group.bench_function(name, |b| {
            b.iter(|| {
                run_delegation(&data, &ek, &plan, options, Box::new(ChaCha8Rng::seed_from_u64(3)))
                    .unwrap()
            })
        });
    }
    let menu = vec![
        Program::identity(),
        Program::new("P", vec![Gate::P(0)]),
        Program::new("X", vec![Gate::X(0)]),
        Program::new("XP", vec![Gate::P(0), Gate::X(0)]),
    ];
    let spec = build_gate_selector_uqc(1, &menu).unwrap();
    let entry = spec.entry("XP").unwrap();
    let plan = EvaluationPlan::new(spec.circuit.clone(), entry.encoding.clone(), 1).unwrap();
    let ek = keygen(1, spec.circuit.m(), &mut rng).unwrap();
    let data = StateVector::random(1, &mut rng).unwrap();
    group.bench_function("selector_xp", |b| {
        b.iter(|| {
            run_delegation(&data, &ek, &plan, RunOptions::default(), Box::new(ChaCha8Rng::seed_from_u64(4)))
                .unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, gate_application, key_schedule, delegation);
criterion_main!(benches);
