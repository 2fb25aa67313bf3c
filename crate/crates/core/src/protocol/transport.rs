use std::cell::RefCell;
use std::collections::VecDeque;
use std::net::{TcpListener, TcpStream};
use std::rc::Rc;
use std::sync::{Arc, Mutex};

use super::message::Envelope;
use super::transcript::{Direction, TranscriptLog};
use crate::error::{QfheError, Result};

/// One party's end of a lockstep message channel.
pub trait Transport {
    fn send(&mut self, env: &Envelope) -> Result<()>;
    /// Blocks until a message arrives (socket) or fails if none is queued
    /// (in-process).
    fn recv(&mut self) -> Result<Envelope>;
}

type Queue = Rc<RefCell<VecDeque<Vec<u8>>>>;

/// Single-threaded in-process channel. Messages pass through the wire
/// encoding so both transports share one codec.
pub struct InProcEndpoint {
    outbox: Queue,
    inbox: Queue,
}

pub fn inproc_pair() -> (InProcEndpoint, InProcEndpoint) {
    let a: Queue = Default::default();
    let b: Queue = Default::default();
    (
        InProcEndpoint {
            outbox: a.clone(),
            inbox: b.clone(),
        },
        InProcEndpoint {
            outbox: b,
            inbox: a,
        },
    )
}

impl Transport for InProcEndpoint {
    fn send(&mut self, env: &Envelope) -> Result<()> {
        self.outbox.borrow_mut().push_back(env.encode()?);
        Ok(())
    }

    fn recv(&mut self) -> Result<Envelope> {
        let body = self
            .inbox
            .borrow_mut()
            .pop_front()
            .ok_or_else(|| QfheError::ProtocolDesync("expected a message, queue is empty".into()))?;
        Envelope::decode(&body)
    }
}

/// Length-prefixed frames over a loopback TCP stream.
pub struct SocketEndpoint {
    stream: TcpStream,
}

impl SocketEndpoint {
    pub fn new(stream: TcpStream) -> Self {
        Self { stream }
    }
}

/// Two connected endpoints over `127.0.0.1`.
pub fn socket_pair() -> Result<(SocketEndpoint, SocketEndpoint)> {
    let io = |e: std::io::Error| QfheError::Transport(e.to_string());
    let listener = TcpListener::bind("127.0.0.1:0").map_err(io)?;
    let addr = listener.local_addr().map_err(io)?;
    let client = TcpStream::connect(addr).map_err(io)?;
    let (server, _) = listener.accept().map_err(io)?;
    server.set_nodelay(true).map_err(io)?;
    client.set_nodelay(true).map_err(io)?;
    Ok((SocketEndpoint::new(server), SocketEndpoint::new(client)))
}

impl Transport for SocketEndpoint {
    fn send(&mut self, env: &Envelope) -> Result<()> {
        env.write_frame(&mut self.stream)
    }

    fn recv(&mut self) -> Result<Envelope> {
        Envelope::read_frame(&mut self.stream)
    }
}

/// Logs every outgoing message before handing it to the inner transport.
pub struct Recorded<T> {
    inner: T,
    from: Direction,
    log: Arc<Mutex<TranscriptLog>>,
}

impl<T: Transport> Recorded<T> {
    pub fn new(inner: T, from: Direction, log: Arc<Mutex<TranscriptLog>>) -> Self {
        Self { inner, from, log }
    }
}

impl<T: Transport> Transport for Recorded<T> {
    fn send(&mut self, env: &Envelope) -> Result<()> {
        self.log.lock().unwrap().record(self.from, *env);
        self.inner.send(env)
    }

    fn recv(&mut self) -> Result<Envelope> {
        self.inner.recv()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::message::Message;

    #[test]
    fn inproc_is_fifo_per_direction() {
        let (mut s, mut c) = inproc_pair();
        s.send(&Envelope::new(1, Message::SendQubit(0))).unwrap();
        s.send(&Envelope::new(1, Message::EvalDone)).unwrap();
        c.send(&Envelope::new(1, Message::ReturnQubit(0))).unwrap();
        assert_eq!(c.recv().unwrap().message, Message::SendQubit(0));
        assert_eq!(c.recv().unwrap().message, Message::EvalDone);
        assert_eq!(s.recv().unwrap().message, Message::ReturnQubit(0));
        assert!(matches!(s.recv(), Err(QfheError::ProtocolDesync(_))));
    }

    #[test]
    fn socket_pair_carries_frames() {
        let (mut s, mut c) = socket_pair().unwrap();
        let env = Envelope::new(5, Message::EvalStart { digest: [1; 32] });
        s.send(&env).unwrap();
        assert_eq!(c.recv().unwrap(), env);
        c.send(&Envelope::new(5, Message::ReturnQubit(3))).unwrap();
        assert_eq!(s.recv().unwrap().message, Message::ReturnQubit(3));
    }
}
