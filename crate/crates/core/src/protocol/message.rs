//! Protocol messages and their wire form.
//!
//! A frame is a big-endian `u32` body length followed by the body:
//! `kind: u8`, `qubit: u16` (big-endian, 1-based, 0 when absent),
//! `run_id: u64` (big-endian), and for `EvalStart` only, the 32-byte
//! circuit digest. Messages never carry key bits or amplitudes.

use std::io::{Read, Write};

use crate::error::{QfheError, Result};

pub const HEADER_LEN: usize = 11;
pub const DIGEST_LEN: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Message {
    EvalStart { digest: [u8; DIGEST_LEN] },
    /// Server hands qubit `w` (0-based) to the client after an R gate.
    SendQubit(usize),
    ReturnQubit(usize),
    EvalDone,
}

impl Message {
    pub fn kind_code(&self) -> u8 {
        match self {
            Message::EvalStart { .. } => 1,
            Message::SendQubit(_) => 2,
            Message::ReturnQubit(_) => 3,
            Message::EvalDone => 4,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Message::EvalStart { .. } => "EvalStart",
            Message::SendQubit(_) => "SendQubit",
            Message::ReturnQubit(_) => "ReturnQubit",
            Message::EvalDone => "EvalDone",
        }
    }

    pub fn qubit(&self) -> Option<usize> {
        match *self {
            Message::SendQubit(w) | Message::ReturnQubit(w) => Some(w),
            _ => None,
        }
    }

    /// True for the two qubit-transfer messages counted as communication.
    pub fn is_transfer(&self) -> bool {
        self.qubit().is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Envelope {
    pub run_id: u64,
    pub message: Message,
}

impl Envelope {
    pub fn new(run_id: u64, message: Message) -> Self {
        Self { run_id, message }
    }

    pub fn encode(&self) -> Result<Vec<u8>> {
        let qubit = match self.message.qubit() {
            Some(w) => u16::try_from(w + 1)
                .map_err(|_| QfheError::Transport(format!("qubit {w} does not fit the wire")))?,
            None => 0,
        };
        let mut body = Vec::with_capacity(HEADER_LEN + DIGEST_LEN);
        body.push(self.message.kind_code());
        body.extend_from_slice(&qubit.to_be_bytes());
        body.extend_from_slice(&self.run_id.to_be_bytes());
        if let Message::EvalStart { digest } = &self.message {
            body.extend_from_slice(digest);
        }
        Ok(body)
    }

    pub fn decode(body: &[u8]) -> Result<Self> {
        if body.len() < HEADER_LEN {
            return Err(QfheError::Transport(format!("short frame of {} bytes", body.len())));
        }
        let qubit = u16::from_be_bytes([body[1], body[2]]) as usize;
        let run_id = u64::from_be_bytes(body[3..HEADER_LEN].try_into().unwrap());
        let rest = &body[HEADER_LEN..];
        let need_qubit = || {
            qubit
                .checked_sub(1)
                .ok_or_else(|| QfheError::Transport("transfer message without a qubit".into()))
        };
        let message = match body[0] {
            1 => {
                let digest: [u8; DIGEST_LEN] = rest.try_into().map_err(|_| {
                    QfheError::Transport(format!("EvalStart digest has {} bytes", rest.len()))
                })?;
                Message::EvalStart { digest }
            }
            2 => Message::SendQubit(need_qubit()?),
            3 => Message::ReturnQubit(need_qubit()?),
            4 => Message::EvalDone,
            k => return Err(QfheError::Transport(format!("unknown message kind {k}"))),
        };
        if !matches!(message, Message::EvalStart { .. }) && !rest.is_empty() {
            return Err(QfheError::Transport("trailing bytes in frame".into()));
        }
        Ok(Self { run_id, message })
    }

    pub fn write_frame<W: Write>(&self, out: &mut W) -> Result<()> {
        let body = self.encode()?;
        out.write_all(&(body.len() as u32).to_be_bytes())
            .and_then(|_| out.write_all(&body))
            .and_then(|_| out.flush())
            .map_err(|e| QfheError::Transport(e.to_string()))
    }

    pub fn read_frame<R: Read>(input: &mut R) -> Result<Self> {
        let mut len = [0u8; 4];
        input
            .read_exact(&mut len)
            .map_err(|e| QfheError::Transport(e.to_string()))?;
        let len = u32::from_be_bytes(len) as usize;
        if len > HEADER_LEN + DIGEST_LEN {
            return Err(QfheError::Transport(format!("frame of {len} bytes is too long")));
        }
        let mut body = vec![0u8; len];
        input
            .read_exact(&mut body)
            .map_err(|e| QfheError::Transport(e.to_string()))?;
        Self::decode(&body)
    }
}
