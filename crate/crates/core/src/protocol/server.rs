use super::backend::{Backend, Party, SharedBackend};
use super::message::{Envelope, Message};
use super::transport::Transport;
use super::{EncodingRefresh, EvaluationPlan};
use crate::error::{QfheError, Result};
use crate::sim::Gate;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    NotStarted,
    Running,
    Awaiting(usize),
    Done,
}

/// The evaluating party. It holds the public plan (circuit, encoding,
/// repetitions) and nothing derived from the client's keys.
#[derive(Debug)]
pub struct ServerRole {
    plan: EvaluationPlan,
    run_id: u64,
    rep: usize,
    pos: usize,
    phase: Phase,
    gates_applied: usize,
}

impl ServerRole {
    pub fn new(plan: EvaluationPlan, run_id: u64) -> Self {
        Self {
            plan,
            run_id,
            rep: 0,
            pos: 0,
            phase: Phase::NotStarted,
            gates_applied: 0,
        }
    }

    pub fn is_done(&self) -> bool {
        self.phase == Phase::Done
    }

    pub fn gates_applied(&self) -> usize {
        self.gates_applied
    }

    fn envelope(&self, message: Message) -> Envelope {
        Envelope::new(self.run_id, message)
    }

    /// Applies gates until the next R gate has been applied and its qubit
    /// handed over, or until the run finishes. Returns the messages to send.
    pub fn resume(&mut self, backend: &mut Backend) -> Result<Vec<Envelope>> {
        let mut out = Vec::new();
        match self.phase {
            Phase::Awaiting(w) => {
                return Err(QfheError::ProtocolDesync(format!(
                    "server resumed while qubit {} is with the client",
                    w + 1
                )))
            }
            Phase::Done => return Ok(out),
            Phase::NotStarted => {
                out.push(self.envelope(Message::EvalStart {
                    digest: self.plan.circuit.digest(),
                }));
                self.phase = Phase::Running;
            }
            Phase::Running => {}
        }
        let gates = self.plan.circuit.gates();
        loop {
            if self.rep == self.plan.repetitions {
                backend.hand_over_all(Party::Server, Party::Client)?;
                out.push(self.envelope(Message::EvalDone));
                self.phase = Phase::Done;
                return Ok(out);
            }
            if self.pos == gates.len() {
                self.pos = 0;
                self.rep += 1;
                if self.rep < self.plan.repetitions
                    && self.plan.refresh == EncodingRefresh::Reprepare
                {
                    backend.reprepare_tail(Party::Server, &self.plan.encoding)?;
                }
                continue;
            }
            let gate = gates[self.pos];
            backend.apply(Party::Server, &gate)?;
            self.gates_applied += 1;
            self.pos += 1;
            if let Gate::R(w) = gate {
                backend.hand_over(w, Party::Server, Party::Client)?;
                out.push(self.envelope(Message::SendQubit(w)));
                self.phase = Phase::Awaiting(w);
                return Ok(out);
            }
        }
    }

    pub fn handle(&mut self, env: Envelope, backend: &Backend) -> Result<()> {
        if env.run_id != self.run_id {
            return Err(QfheError::ProtocolDesync(format!(
                "message for run {} during run {}",
                env.run_id, self.run_id
            )));
        }
        match (self.phase, env.message) {
            (Phase::Awaiting(w), Message::ReturnQubit(v)) if v == w => {
                if backend.custody().owner(w) != Party::Server {
                    return Err(QfheError::CustodyViolation(format!(
                        "qubit {} announced as returned but still held by the client",
                        w + 1
                    )));
                }
                self.phase = Phase::Running;
                Ok(())
            }
            (phase, msg) => Err(QfheError::ProtocolDesync(format!(
                "server got {} while {phase:?}",
                msg.kind_name()
            ))),
        }
    }
}

/// Runs the server side to completion over a blocking transport.
pub fn server_evaluate<T: Transport>(
    backend: &SharedBackend,
    plan: EvaluationPlan,
    run_id: u64,
    transport: &mut T,
) -> Result<ServerRole> {
    let mut server = ServerRole::new(plan, run_id);
    loop {
        let out = server.resume(&mut backend.lock().unwrap())?;
        for env in &out {
            transport.send(env)?;
        }
        if server.is_done() {
            return Ok(server);
        }
        let reply = transport.recv()?;
        server.handle(reply, &backend.lock().unwrap())?;
    }
}
