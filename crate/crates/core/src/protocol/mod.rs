//! Client/server evaluation over a message transport.
//!
//! The server applies the circuit gate by gate. After every R gate it hands
//! the qubit to the client, which applies `X^r Z^{r'} P^{x}` and returns it.
//! Both transports drive the same two state machines: the in-process one runs
//! them in lockstep on one thread, the socket one puts each on its own thread.

pub mod backend;
pub mod client;
pub mod message;
pub mod server;
pub mod transcript;
pub mod transport;

use std::sync::{Arc, Mutex};

use rand::RngCore;

use crate::error::{QfheError, Result};
use crate::pauli_frame::{qotp_apply, PauliKey, RandomBitPair};
use crate::sim::{basis_index, StateVector};
use crate::uqc::Circuit;

pub use backend::{client_r_step, Backend, CustodyMap, Party, SharedBackend};
pub use client::{client_serve, plan_schedules, ClientRole, ScheduleMode};
pub use message::{Envelope, Message};
pub use server::{server_evaluate, ServerRole};
pub use transcript::{Counters, Direction, Transcript, TranscriptEntry, TranscriptLog};
pub use transport::{inproc_pair, socket_pair, InProcEndpoint, Recorded, SocketEndpoint, Transport};

/// Overlap below which a decrypted encoding register counts as wrong.
pub const ENCODING_TOLERANCE: f64 = 1e-9;

/// What happens to the encoding register between repetitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EncodingRefresh {
    /// The server discards the register and prepares `|e⟩` again; the client
    /// zeroes the matching key bits.
    #[default]
    Reprepare,
    /// The masked register is fed unchanged into the next repetition.
    Carry,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvaluationPlan {
    pub circuit: Circuit,
    pub encoding: Vec<bool>,
    pub repetitions: usize,
    pub refresh: EncodingRefresh,
}

impl EvaluationPlan {
    pub fn new(circuit: Circuit, encoding: Vec<bool>, repetitions: usize) -> Result<Self> {
        if repetitions == 0 {
            return Err(QfheError::InvalidDimensions(
                "at least one repetition is required".into(),
            ));
        }
        if encoding.len() != circuit.m() {
            return Err(QfheError::DimensionMismatch {
                expected: circuit.m(),
                actual: encoding.len(),
            });
        }
        Ok(Self {
            circuit,
            encoding,
            repetitions,
            refresh: EncodingRefresh::default(),
        })
    }

    pub fn with_refresh(mut self, refresh: EncodingRefresh) -> Self {
        self.refresh = refresh;
        self
    }

    pub fn r_gates(&self) -> usize {
        self.circuit.r_count() * self.repetitions
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TransportKind {
    #[default]
    InProc,
    Socket,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    pub run_id: u64,
    pub mode: ScheduleMode,
    pub transport: TransportKind,
}

fn encrypt_counted(
    data: &StateVector,
    ek: &PauliKey,
    encoding: &[bool],
) -> Result<(StateVector, usize)> {
    let n = ek.n();
    if data.num_qubits() != n {
        return Err(QfheError::DimensionMismatch {
            expected: n,
            actual: data.num_qubits(),
        });
    }
    if encoding.len() != ek.m() {
        return Err(QfheError::DimensionMismatch {
            expected: ek.m(),
            actual: encoding.len(),
        });
    }
    if !ek.encoding_bits_clear() {
        return Err(QfheError::InvalidDimensions(
            "encryption key has nonzero bits on the encoding register".into(),
        ));
    }
    let targets: Vec<usize> = (0..n).collect();
    let masked = qotp_apply(data, &ek.x()[..n], &ek.z()[..n], &targets)?;
    let full = if encoding.is_empty() {
        masked
    } else {
        masked.tensor(&StateVector::basis(encoding)?)?
    };
    Ok((full, n))
}

/// Masks the data qubits with `ek` and appends `|encoding⟩` unmasked.
pub fn client_encrypt(data: &StateVector, ek: &PauliKey, encoding: &[bool]) -> Result<StateVector> {
    encrypt_counted(data, ek, encoding).map(|(s, _)| s)
}

/// Unmasks all `n + m` qubits with `dk` and detaches the encoding register,
/// which must be `|encoding⟩` up to phase.
pub fn client_decrypt(
    result: &StateVector,
    dk: &PauliKey,
    encoding: &[bool],
) -> Result<StateVector> {
    if result.num_qubits() != dk.width() {
        return Err(QfheError::DimensionMismatch {
            expected: dk.width(),
            actual: result.num_qubits(),
        });
    }
    if encoding.len() != dk.m() {
        return Err(QfheError::DimensionMismatch {
            expected: dk.m(),
            actual: encoding.len(),
        });
    }
    let targets: Vec<usize> = (0..dk.width()).collect();
    let plain = qotp_apply(result, dk.x(), dk.z(), &targets)?;
    let cols = 1usize << dk.m();
    let e = basis_index(encoding);
    let projected: Vec<_> = plain
        .amplitudes()
        .iter()
        .skip(e)
        .step_by(cols)
        .copied()
        .collect();
    let overlap: f64 = projected.iter().map(|a| a.norm_sqr()).sum();
    if overlap < 1.0 - ENCODING_TOLERANCE {
        return Err(QfheError::EncodingMismatch(overlap));
    }
    let norm = overlap.sqrt();
    StateVector::from_amplitudes(projected.into_iter().map(|a| a / norm).collect())
}

/// Everything a finished delegation leaves with the client.
#[derive(Debug, Clone)]
pub struct Delegation {
    pub result: StateVector,
    pub transcript: Transcript,
    pub decryption_key: PauliKey,
    pub r_pairs: Vec<RandomBitPair>,
    /// XORs per key-update step, over all repetitions.
    pub xor_counts: Vec<u32>,
}

fn drive_lockstep(
    server: &mut ServerRole,
    client: &mut ClientRole,
    backend: &SharedBackend,
    log: &Arc<Mutex<TranscriptLog>>,
) -> Result<()> {
    let (s, c) = inproc_pair();
    let mut s = Recorded::new(s, Direction::Server, log.clone());
    let mut c = Recorded::new(c, Direction::Client, log.clone());
    loop {
        let out = server.resume(&mut backend.lock().unwrap())?;
        for env in &out {
            s.send(env)?;
            let got = c.recv()?;
            if let Some(reply) = client.handle(got, &mut backend.lock().unwrap())? {
                c.send(&reply)?;
            }
        }
        if server.is_done() {
            break;
        }
        let reply = s.recv()?;
        server.handle(reply, &backend.lock().unwrap())?;
    }
    if !client.is_done() {
        return Err(QfheError::ProtocolDesync(
            "server finished before the client".into(),
        ));
    }
    Ok(())
}

fn drive_threaded(
    plan: &EvaluationPlan,
    run_id: u64,
    client: ClientRole,
    backend: &SharedBackend,
    log: &Arc<Mutex<TranscriptLog>>,
) -> Result<(ServerRole, ClientRole)> {
    let (s, c) = socket_pair()?;
    let mut c = Recorded::new(c, Direction::Client, log.clone());
    std::thread::scope(|scope| {
        let client_task = scope.spawn(move || client_serve(backend, client, &mut c));
        // the server endpoint is dropped when this call returns, so a failing
        // server unblocks the client thread
        let server = {
            let mut s = Recorded::new(s, Direction::Server, log.clone());
            server_evaluate(backend, plan.clone(), run_id, &mut s)
        };
        let client = client_task
            .join()
            .map_err(|_| QfheError::Transport("client task panicked".into()))?;
        let server = server?;
        Ok((server, client?))
    })
}

/// Encrypts `data`, runs the plan with the server and client roles over the
/// chosen transport, then decrypts. `rng` supplies the client's `(r, r')`.
pub fn run_delegation(
    data: &StateVector,
    ek: &PauliKey,
    plan: &EvaluationPlan,
    options: RunOptions,
    rng: Box<dyn RngCore + Send>,
) -> Result<Delegation> {
    if ek.n() != plan.circuit.n() || ek.m() != plan.circuit.m() {
        return Err(QfheError::DimensionMismatch {
            expected: plan.circuit.width(),
            actual: ek.width(),
        });
    }
    let (cipher, mask_ops) = encrypt_counted(data, ek, &plan.encoding)?;
    let backend = Backend::new(cipher, Party::Server).shared();
    let log = Arc::new(Mutex::new(TranscriptLog::default()));
    let client = ClientRole::new(ek.clone(), plan, options.run_id, options.mode, rng)?;

    let (server, client) = match options.transport {
        TransportKind::InProc => {
            let mut server = ServerRole::new(plan.clone(), options.run_id);
            let mut client = client;
            drive_lockstep(&mut server, &mut client, &backend, &log)?;
            (server, client)
        }
        TransportKind::Socket => drive_threaded(plan, options.run_id, client, &backend, &log)?,
    };

    let dk = client
        .decryption_key()
        .ok_or_else(|| QfheError::ProtocolDesync("client did not finish".into()))?;
    let result = {
        let guard = backend.lock().unwrap();
        client_decrypt(guard.state(Party::Client)?, &dk, &plan.encoding)?
    };
    let entries = Arc::try_unwrap(log)
        .map_err(|_| QfheError::Transport("transcript still shared".into()))?
        .into_inner()
        .unwrap()
        .into_entries();
    let xor_counts = client.xor_counts();
    let mut transcript = Transcript {
        entries,
        counters: Counters {
            mask_ops,
            gates: server.gates_applied(),
            key_xors: xor_counts.iter().map(|&c| c as u64).sum(),
            max_step_xors: xor_counts.iter().copied().max().unwrap_or(0),
            messages: 0,
            r_gates: plan.r_gates(),
            repetitions: plan.repetitions,
        },
    };
    transcript.counters.messages = transcript.transfer_count();
    Ok(Delegation {
        result,
        transcript,
        decryption_key: dk,
        r_pairs: client.r_pairs(),
        xor_counts,
    })
}
