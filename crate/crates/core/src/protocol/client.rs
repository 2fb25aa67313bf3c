use rand::RngCore;

use super::backend::{client_r_step, Backend, Party, SharedBackend};
use super::message::{Envelope, Message};
use super::transport::Transport;
use super::{EncodingRefresh, EvaluationPlan};
use crate::error::{QfheError, Result};
use crate::pauli_frame::{run_key_schedule, KeySchedule, PauliKey, RandomBitPair};
use crate::sim::Gate;
use crate::uqc::Circuit;

/// How the client obtains its intermediate keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScheduleMode {
    /// Advance the key gate by gate in step with the server, drawing each
    /// `(r, r')` when its R gate is reached.
    #[default]
    Lazy,
    /// Draw all `(r, r')` and compute every key before the run starts.
    Precomputed,
}

enum KeyTrack {
    Lazy {
        key: PauliKey,
        rng: Box<dyn RngCore + Send>,
        pairs: Vec<RandomBitPair>,
        xor_counts: Vec<u32>,
    },
    Precomputed {
        schedules: Vec<KeySchedule>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    AwaitingStart,
    Evaluating,
    Done,
}

/// Key schedules for `repetitions` back-to-back runs of `circuit`, one per
/// repetition. `r_pairs` holds `r_count * repetitions` pairs in execution
/// order. With [`EncodingRefresh::Reprepare`] each repetition after the
/// first starts from the previous final key with encoding bits cleared.
pub fn plan_schedules(
    ek: &PauliKey,
    circuit: &Circuit,
    repetitions: usize,
    refresh: EncodingRefresh,
    r_pairs: &[RandomBitPair],
) -> Result<Vec<KeySchedule>> {
    let per_rep = circuit.r_count();
    if r_pairs.len() != per_rep * repetitions {
        return Err(QfheError::RPairCountMismatch {
            expected: per_rep * repetitions,
            actual: r_pairs.len(),
        });
    }
    let mut key = ek.clone();
    let mut out = Vec::with_capacity(repetitions);
    for rep in 0..repetitions {
        if rep > 0 && refresh == EncodingRefresh::Reprepare {
            key.clear_encoding_bits();
        }
        let sched = run_key_schedule(&key, circuit, &r_pairs[rep * per_rep..(rep + 1) * per_rep])?;
        key = sched.final_key().clone();
        out.push(sched);
    }
    Ok(out)
}

/// The key-holding party.
pub struct ClientRole {
    circuit: Circuit,
    repetitions: usize,
    refresh: EncodingRefresh,
    run_id: u64,
    rep: usize,
    pos: usize,
    phase: Phase,
    keys: KeyTrack,
}

impl ClientRole {
    pub fn new(
        ek: PauliKey,
        plan: &EvaluationPlan,
        run_id: u64,
        mode: ScheduleMode,
        mut rng: Box<dyn RngCore + Send>,
    ) -> Result<Self> {
        if ek.n() != plan.circuit.n() || ek.m() != plan.circuit.m() {
            return Err(QfheError::DimensionMismatch {
                expected: plan.circuit.width(),
                actual: ek.width(),
            });
        }
        let keys = match mode {
            ScheduleMode::Lazy => KeyTrack::Lazy {
                key: ek,
                rng,
                pairs: Vec::new(),
                xor_counts: Vec::new(),
            },
            ScheduleMode::Precomputed => {
                let pairs: Vec<RandomBitPair> = (0..plan.circuit.r_count() * plan.repetitions)
                    .map(|_| RandomBitPair::draw(&mut *rng))
                    .collect();
                KeyTrack::Precomputed {
                    schedules: plan_schedules(
                        &ek,
                        &plan.circuit,
                        plan.repetitions,
                        plan.refresh,
                        &pairs,
                    )?,
                }
            }
        };
        Ok(Self {
            circuit: plan.circuit.clone(),
            repetitions: plan.repetitions,
            refresh: plan.refresh,
            run_id,
            rep: 0,
            pos: 0,
            phase: Phase::AwaitingStart,
            keys,
        })
    }

    pub fn is_done(&self) -> bool {
        self.phase == Phase::Done
    }

    /// The final key, once the server has announced the end of the run.
    pub fn decryption_key(&self) -> Option<PauliKey> {
        if !self.is_done() {
            return None;
        }
        Some(match &self.keys {
            KeyTrack::Lazy { key, .. } => key.clone(),
            KeyTrack::Precomputed { schedules } => schedules.last()?.final_key().clone(),
        })
    }

    pub fn r_pairs(&self) -> Vec<RandomBitPair> {
        match &self.keys {
            KeyTrack::Lazy { pairs, .. } => pairs.clone(),
            KeyTrack::Precomputed { schedules } => {
                schedules.iter().flat_map(|s| s.r_pairs.iter().copied()).collect()
            }
        }
    }

    /// XORs spent per key-update step, over the whole run.
    pub fn xor_counts(&self) -> Vec<u32> {
        match &self.keys {
            KeyTrack::Lazy { xor_counts, .. } => xor_counts.clone(),
            KeyTrack::Precomputed { schedules } => schedules
                .iter()
                .flat_map(|s| s.xor_counts.iter().copied())
                .collect(),
        }
    }

    /// Advances through Clifford gates up to the next R gate (returning its
    /// qubit) or the end of the last repetition.
    fn walk_to_next_r(&mut self) -> Result<Option<usize>> {
        loop {
            if self.rep == self.repetitions {
                return Ok(None);
            }
            if self.pos == self.circuit.len() {
                self.pos = 0;
                self.rep += 1;
                if self.rep < self.repetitions && self.refresh == EncodingRefresh::Reprepare {
                    if let KeyTrack::Lazy { key, .. } = &mut self.keys {
                        key.clear_encoding_bits();
                    }
                }
                continue;
            }
            let gate = self.circuit.gates()[self.pos];
            if let Gate::R(w) = gate {
                return Ok(Some(w));
            }
            if let KeyTrack::Lazy {
                key, xor_counts, ..
            } = &mut self.keys
            {
                xor_counts.push(key.step(&gate, None)?);
            }
            self.pos += 1;
        }
    }

    fn correct_r(&mut self, w: usize, backend: &mut Backend) -> Result<()> {
        let (x_bit, pair) = match &mut self.keys {
            KeyTrack::Lazy { key, rng, .. } => (key.x_bit(w), RandomBitPair::draw(&mut **rng)),
            KeyTrack::Precomputed { schedules } => {
                let sched = &schedules[self.rep];
                let before = match self.pos {
                    0 => &sched.initial,
                    p => &sched.steps[p - 1],
                };
                let r_index = self.circuit.gates()[..self.pos]
                    .iter()
                    .filter(|g| !g.is_clifford())
                    .count();
                (before.x_bit(w), sched.r_pairs[r_index])
            }
        };
        client_r_step(backend, w, x_bit, pair)?;
        if let KeyTrack::Lazy {
            key,
            pairs,
            xor_counts,
            ..
        } = &mut self.keys
        {
            xor_counts.push(key.step(&Gate::R(w), Some(pair))?);
            pairs.push(pair);
        }
        self.pos += 1;
        backend.hand_over(w, Party::Client, Party::Server)
    }

    /// Reacts to one server message, returning the reply if there is one.
    pub fn handle(&mut self, env: Envelope, backend: &mut Backend) -> Result<Option<Envelope>> {
        if env.run_id != self.run_id {
            return Err(QfheError::ProtocolDesync(format!(
                "message for run {} during run {}",
                env.run_id, self.run_id
            )));
        }
        match (self.phase, env.message) {
            (Phase::AwaitingStart, Message::EvalStart { digest }) => {
                if digest != self.circuit.digest() {
                    return Err(QfheError::ProtocolDesync(
                        "server announced a different circuit".into(),
                    ));
                }
                self.phase = Phase::Evaluating;
                Ok(None)
            }
            (Phase::Evaluating, Message::SendQubit(w)) => match self.walk_to_next_r()? {
                Some(expected) if expected == w => {
                    self.correct_r(w, backend)?;
                    Ok(Some(Envelope::new(self.run_id, Message::ReturnQubit(w))))
                }
                Some(expected) => Err(QfheError::ProtocolDesync(format!(
                    "server sent qubit {} but the next R gate acts on qubit {}",
                    w + 1,
                    expected + 1
                ))),
                None => Err(QfheError::ProtocolDesync(format!(
                    "server sent qubit {} after the last R gate",
                    w + 1
                ))),
            },
            (Phase::Evaluating, Message::EvalDone) => match self.walk_to_next_r()? {
                None => {
                    self.phase = Phase::Done;
                    Ok(None)
                }
                Some(w) => Err(QfheError::ProtocolDesync(format!(
                    "evaluation ended before the R gate on qubit {}",
                    w + 1
                ))),
            },
            (phase, msg) => Err(QfheError::ProtocolDesync(format!(
                "client got {} while {phase:?}",
                msg.kind_name()
            ))),
        }
    }
}

/// Runs the client side to completion over a blocking transport.
pub fn client_serve<T: Transport>(
    backend: &SharedBackend,
    mut client: ClientRole,
    transport: &mut T,
) -> Result<ClientRole> {
    while !client.is_done() {
        let env = transport.recv()?;
        let reply = client.handle(env, &mut backend.lock().unwrap())?;
        if let Some(reply) = reply {
            transport.send(&reply)?;
        }
    }
    Ok(client)
}
