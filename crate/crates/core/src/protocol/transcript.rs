//! Run transcripts, exported as JSON lines: one record per message, then a
//! trailer record with the run counters.

use serde::{Deserialize, Serialize};

use super::message::{Envelope, Message};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Server,
    Client,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub seq: usize,
    pub from: Direction,
    pub envelope: Envelope,
}

#[derive(Debug, Default)]
pub struct TranscriptLog {
    entries: Vec<TranscriptEntry>,
}

impl TranscriptLog {
    pub fn record(&mut self, from: Direction, envelope: Envelope) {
        let seq = self.entries.len();
        self.entries.push(TranscriptEntry {
            seq,
            from,
            envelope,
        });
    }

    pub fn into_entries(self) -> Vec<TranscriptEntry> {
        self.entries
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    /// Single-qubit masks applied by the client's encryption.
    pub mask_ops: usize,
    /// UQC gates executed by the server, over all repetitions.
    pub gates: usize,
    /// XORs performed by the client's key updates.
    pub key_xors: u64,
    /// Largest XOR count of any single key-update step.
    pub max_step_xors: u32,
    /// Qubit-transfer messages (SendQubit + ReturnQubit).
    pub messages: usize,
    pub r_gates: usize,
    pub repetitions: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub entries: Vec<TranscriptEntry>,
    pub counters: Counters,
}

#[derive(Serialize, Deserialize)]
struct MessageRecord {
    seq: usize,
    from: Direction,
    kind: String,
    qubit: Option<usize>,
    run_id: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    digest: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct TrailerRecord {
    trailer: bool,
    #[serde(flatten)]
    counters: Counters,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl Transcript {
    pub fn transfer_count(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| e.envelope.message.is_transfer())
            .count()
    }

    pub fn messages(&self) -> impl Iterator<Item = &Message> {
        self.entries.iter().map(|e| &e.envelope.message)
    }

    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let rec = MessageRecord {
                seq: e.seq,
                from: e.from,
                kind: e.envelope.message.kind_name().to_owned(),
                qubit: e.envelope.message.qubit().map(|w| w + 1),
                run_id: e.envelope.run_id,
                digest: match &e.envelope.message {
                    Message::EvalStart { digest } => Some(hex(digest)),
                    _ => None,
                },
            };
            out.push_str(&serde_json::to_string(&rec).expect("record serializes"));
            out.push('\n');
        }
        let trailer = TrailerRecord {
            trailer: true,
            counters: self.counters,
        };
        out.push_str(&serde_json::to_string(&trailer).expect("trailer serializes"));
        out.push('\n');
        out
    }

    /// Reads back the counters from an exported transcript's trailer.
    pub fn trailer_counters(json_lines: &str) -> Result<Counters> {
        let last = json_lines
            .lines()
            .rfind(|l| !l.trim().is_empty())
            .ok_or_else(|| crate::error::QfheError::parse("empty transcript"))?;
        let rec: TrailerRecord = serde_json::from_str(last)?;
        Ok(rec.counters)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_lines_shape() {
        let mut log = TranscriptLog::default();
        log.record(Direction::Server, Envelope::new(3, Message::EvalStart { digest: [0xab; 32] }));
        log.record(Direction::Server, Envelope::new(3, Message::SendQubit(1)));
        log.record(Direction::Client, Envelope::new(3, Message::ReturnQubit(1)));
        log.record(Direction::Server, Envelope::new(3, Message::EvalDone));
        let t = Transcript {
            entries: log.into_entries(),
            counters: Counters {
                messages: 2,
                ..Default::default()
            },
        };
        assert_eq!(t.transfer_count(), 2);
        let text = t.to_json_lines();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[0].starts_with(r#"{"seq":0,"from":"server","kind":"EvalStart","qubit":null,"run_id":3,"digest":"abab"#));
        assert_eq!(
            lines[2],
            r#"{"seq":2,"from":"client","kind":"ReturnQubit","qubit":2,"run_id":3}"#
        );
        assert!(lines[4].starts_with(r#"{"trailer":true,"#));
        assert_eq!(Transcript::trailer_counters(&text).unwrap().messages, 2);
    }
}
