//! Quantum fully homomorphic encryption on a dense statevector simulator.
//!
//! A client one-time-pads its data with a Pauli key, a server evaluates a
//! universal quantum circuit on the ciphertext, and the client tracks how each
//! gate moves the key. Clifford gates update the key classically; every R gate
//! costs one round trip in which the client applies `X^r Z^{r'} P^x`.
//!
//! ```
//! use qfhe_core::{keygen, run_delegation, Circuit, EvaluationPlan, Gate, RunOptions, StateVector};
//! use rand::SeedableRng;
//! use rand_chacha::ChaCha8Rng;
//!
//! let mut rng = ChaCha8Rng::seed_from_u64(7);
//! let circuit = Circuit::with_gates(1, 1, vec![Gate::Cnot { control: 1, target: 0 }]).unwrap();
//! let plan = EvaluationPlan::new(circuit, vec![true], 1).unwrap();
//! let ek = keygen(1, 1, &mut rng).unwrap();
//! let data = StateVector::zero(1).unwrap();
//! let run = run_delegation(&data, &ek, &plan, RunOptions::default(), Box::new(rng)).unwrap();
//! assert!(qfhe_core::equal_up_to_phase(&run.result, &StateVector::basis(&[true]).unwrap(), 1e-12).unwrap());
//! ```

pub mod audit;
pub mod error;
pub mod pauli_frame;
pub mod protocol;
pub mod sim;
pub mod uqc;

pub use error::{QfheError, Result};
pub use pauli_frame::{
    keygen, qotp_apply, run_key_schedule, update_clifford, update_r, KeySchedule, PauliKey,
    RandomBitPair,
};
pub use protocol::{
    client_decrypt, client_encrypt, run_delegation, Delegation, EncodingRefresh, EvaluationPlan,
    RunOptions, ScheduleMode, Transcript, TransportKind,
};
pub use sim::{equal_up_to_phase, DensityMatrix, Gate, GateKind, Matrix, StateVector};
pub use uqc::{
    build_gate_selector_uqc, circuit_from_json, circuit_to_json, run_circuit, validate_uqc,
    Circuit, Program, SelectorFixture, UqcEntry, UqcReport, UqcSpec,
};
