//! In-process transport: a pair of FIFO byte queues with the same encode /
//! decode path as the socket transport, so audits compare byte-for-byte.

use std::sync::mpsc::{channel, Receiver, Sender as MpscSender};

use crate::{
    check_tags, BoundaryMessage, Direction, Endpoint, Phase, TransportAudit, TransportError,
};

pub struct InprocEndpoint {
    tx: MpscSender<Vec<u8>>,
    rx: Receiver<Vec<u8>>,
    audit: TransportAudit,
}

/// Connected endpoint pair with in-process delivery.
pub fn inproc_pair() -> (InprocEndpoint, InprocEndpoint) {
    let (tx_a, rx_b) = channel();
    let (tx_b, rx_a) = channel();
    (
        InprocEndpoint {
            tx: tx_a,
            rx: rx_a,
            audit: TransportAudit::default(),
        },
        InprocEndpoint {
            tx: tx_b,
            rx: rx_b,
            audit: TransportAudit::default(),
        },
    )
}

impl Endpoint for InprocEndpoint {
    fn send(&mut self, msg: &BoundaryMessage) -> Result<(), TransportError> {
        let wire = msg.encode()?;
        self.audit
            .record(Direction::Sent, &wire, msg.payload_vector_len());
        self.tx
            .send(wire)
            .map_err(|_| TransportError::PeerGone("in-process receiver dropped".into()))
    }

    fn recv(
        &mut self,
        phase: Phase,
        outer_k: u32,
        inner_j: u32,
    ) -> Result<BoundaryMessage, TransportError> {
        let wire = self
            .rx
            .recv()
            .map_err(|_| TransportError::PeerGone("in-process sender dropped".into()))?;
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
