//! Socket transport: length-prefixed JSON frames over TCP.

use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::time::Duration;

use crate::{
    check_tags, BoundaryMessage, Direction, Endpoint, Phase, TransportAudit, TransportError,
};

pub struct TcpEndpoint {
    stream: TcpStream,
    audit: TransportAudit,
}

impl TcpEndpoint {
    /// Wrap a connected stream; `timeout` bounds each blocking read
    /// (default 60 s).
    pub fn new(stream: TcpStream, timeout: Option<Duration>) -> Result<Self, TransportError> {
        stream
            .set_read_timeout(Some(timeout.unwrap_or(Duration::from_secs(60))))
            .map_err(|e| TransportError::Codec(e.to_string()))?;
        stream
            .set_nodelay(true)
            .map_err(|e| TransportError::Codec(e.to_string()))?;
        Ok(Self {
            stream,
            audit: TransportAudit::default(),
        })
    }
}

/// Loopback endpoint pair for single-process runs and tests.
pub fn tcp_pair() -> Result<(TcpEndpoint, TcpEndpoint), TransportError> {
    let listener =
        TcpListener::bind("127.0.0.1:0").map_err(|e| TransportError::Codec(e.to_string()))?;
    let addr = listener
        .local_addr()
        .map_err(|e| TransportError::Codec(e.to_string()))?;
    let client = TcpStream::connect(addr).map_err(|e| TransportError::Codec(e.to_string()))?;
    let (server, _) = listener
        .accept()
        .map_err(|e| TransportError::Codec(e.to_string()))?;
    Ok((
        TcpEndpoint::new(client, None)?,
        TcpEndpoint::new(server, None)?,
    ))
}

impl Endpoint for TcpEndpoint {
    fn send(&mut self, msg: &BoundaryMessage) -> Result<(), TransportError> {
        let wire = msg.encode()?;
        let len = (wire.len() as u32).to_be_bytes();
        self.stream
            .write_all(&len)
            .and_then(|_| self.stream.write_all(&wire))
            .map_err(|e| TransportError::PeerGone(e.to_string()))?;
        self.audit
            .record(Direction::Sent, &wire, msg.payload_vector_len());
        Ok(())
    }

    fn recv(
        &mut self,
        phase: Phase,
        outer_k: u32,
        inner_j: u32,
    ) -> Result<BoundaryMessage, TransportError> {
        let mut len = [0u8; 4];
        read_exact(&mut self.stream, &mut len, phase)?;
        let n = u32::from_be_bytes(len) as usize;
        if n > 64 << 20 {
            return Err(TransportError::Malformed(format!("frame of {n} bytes")));
        }
        let mut wire = vec![0u8; n];
        read_exact(&mut self.stream, &mut wire, phase)?;
        let msg = BoundaryMessage::decode(&wire)?;
        self.audit
            .record(Direction::Received, &wire, msg.payload_vector_len());
        check_tags(&msg, phase, outer_k, inner_j)?;
        Ok(msg)
    }

    fn audit(&self) -> &TransportAudit {
        &self.audit
    }

    fn take_audit(&mut self) -> TransportAudit {
        std::mem::take(&mut self.audit)
    }
}

fn read_exact(stream: &mut TcpStream, buf: &mut [u8], phase: Phase) -> Result<(), TransportError> {
    stream.read_exact(buf).map_err(|e| {
        if e.kind() == std::io::ErrorKind::WouldBlock || e.kind() == std::io::ErrorKind::TimedOut {
            TransportError::Timeout(phase.to_string())
        } else {
            TransportError::PeerGone(e.to_string())
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Payload, Sender};

    #[test]
    fn tcp_round_trip() {
        let (mut a, mut b) = tcp_pair().unwrap();
        let msg = BoundaryMessage {
            sender: Sender::Tnc,
            phase: Phase::ZBroadcast,
            outer_k: 2,
            inner_j: 5,
            payload: Payload::Z {
                z_kw: vec![10.0, 20.0],
                continue_inner: false,
            },
        };
        let t = std::thread::spawn(move || {
            a.send(&msg).unwrap();
            a
        });
        let got = b.recv(Phase::ZBroadcast, 2, 5).unwrap();
        assert_eq!(got.payload_vector_len(), 2);
        let a = t.join().unwrap();
        assert_eq!(a.audit().entries[0].wire, b.audit().entries[0].wire);
    }
}
