//! The only channel between the two operator agents.
//!
//! Every cross-operator datum is a typed [`BoundaryMessage`]: boundary power
//! vectors, the consensus vector, Lagrangian bound scalars, and iteration
//! tags — never network-internal variables. Both transports (in-process
//! queues and length-prefixed JSON over TCP) serialize through the same
//! encoder and record every message in an append-only audit, so a run leaves
//! a byte-exact proof of what crossed the boundary.
//!
//! Wire format: 4-byte big-endian length, then a UTF-8 JSON object with
//! fields `sender`, `phase`, `k`, `j`, `payload`.

mod inproc;
mod tcp;

pub use inproc::inproc_pair;
pub use tcp::{tcp_pair, TcpEndpoint};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("malformed message: {0}")]
    Malformed(String),
    #[error("protocol error: expected {expected}, got {got}")]
    Protocol { expected: String, got: String },
    #[error("peer gone: {0}")]
    PeerGone(String),
    #[error("timed out waiting for {0}")]
    Timeout(String),
    #[error("codec error: {0}")]
    Codec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sender {
    #[serde(rename = "PDSO")]
    Pdso,
    #[serde(rename = "TNC")]
    Tnc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    #[serde(rename = "boundary_report")]
    BoundaryReport,
    #[serde(rename = "z_broadcast")]
    ZBroadcast,
    #[serde(rename = "bound_report")]
    BoundReport,
    #[serde(rename = "binary_epoch")]
    BinaryEpoch,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Phase::BoundaryReport => "boundary_report",
            Phase::ZBroadcast => "z_broadcast",
            Phase::BoundReport => "bound_report",
            Phase::BinaryEpoch => "binary_epoch",
        };
        f.write_str(s)
    }
}

/// Message payloads carry only boundary vectors (kW) and bound scalars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    /// An operator's boundary vector and the value of its augmented
    /// subproblem at this inner pass.
    Boundary { power_kw: Vec<f64>, lagrangian: f64 },
    /// Consensus vector plus the continue flag of the inner loop.
    Z {
        z_kw: Vec<f64>,
        continue_inner: bool,
    },
    /// Lagrangian bound scalars: upper, optional intermediate lower, current
    /// lower.
    Bounds {
        phi_hat: f64,
        phi_tilde: Option<f64>,
        phi_check: f64,
    },
    /// Outer-iteration closure: quality-check verdict and stop flag.
    Epoch { forward: bool, stop: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryMessage {
    pub sender: Sender,
    pub phase: Phase,
    #[serde(rename = "k")]
    pub outer_k: u32,
    #[serde(rename = "j")]
    pub inner_j: u32,
    pub payload: Payload,
}

impl BoundaryMessage {
    /// Phase/payload pairing sanity; send rejects anything malformed.
    pub fn well_formed(&self) -> bool {
        matches!(
            (self.phase, &self.payload),
            (Phase::BoundaryReport, Payload::Boundary { .. })
                | (Phase::ZBroadcast, Payload::Z { .. })
                | (Phase::BoundReport, Payload::Bounds { .. })
                | (Phase::BinaryEpoch, Payload::Epoch { .. })
        )
    }

    /// Number of reals in the payload vector (bound scalars excluded); the
    /// privacy audit checks this never exceeds the boundary dimension.
    pub fn payload_vector_len(&self) -> usize {
        match &self.payload {
            Payload::Boundary { power_kw, .. } => power_kw.len(),
            Payload::Z { z_kw, .. } => z_kw.len(),
            Payload::Bounds { .. } | Payload::Epoch { .. } => 0,
        }
    }

    pub fn encode(&self) -> Result<Vec<u8>, TransportError> {
        if !self.well_formed() {
            return Err(TransportError::Malformed(format!(
                "phase {} does not match payload",
                self.phase
            )));
        }
        serde_json::to_vec(self).map_err(|e| TransportError::Codec(e.to_string()))
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, TransportError> {
        let msg: BoundaryMessage =
            serde_json::from_slice(bytes).map_err(|e| TransportError::Malformed(e.to_string()))?;
        if !msg.well_formed() {
            return Err(TransportError::Malformed(format!(
                "phase {} does not match payload",
                msg.phase
            )));
        }
        Ok(msg)
    }
}

/// One side of the audit: everything this endpoint sent or received, in
/// order, with the exact wire bytes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TransportAudit {
    pub entries: Vec<AuditEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub direction: Direction,
    /// Canonical wire JSON of the message.
    pub wire: String,
    /// Framed size in bytes (length prefix included).
    pub bytes: usize,
    /// Number of reals in the payload vector.
    pub payload_len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Sent,
    Received,
}

impl TransportAudit {
    pub fn record(&mut self, direction: Direction, wire: &[u8], payload_len: usize) {
        self.entries.push(AuditEntry {
            direction,
            wire: String::from_utf8_lossy(wire).into_owned(),
            bytes: wire.len() + 4,
            payload_len,
        });
    }

    /// Largest payload vector that ever crossed this endpoint.
    pub fn max_payload_len(&self) -> usize {
        self.entries.iter().map(|e| e.payload_len).max().unwrap_or(0)
    }

    /// Wire strings in one direction, for cross-transport comparison.
    pub fn wires(&self, direction: Direction) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| e.direction == direction)
            .map(|e| e.wire.as_str())
            .collect()
    }
}

/// One agent's end of the channel. Send delivers exactly once and in order;
/// recv blocks for the matching phase and iteration tags and treats any
/// mismatch as a protocol error.
pub trait Endpoint: Send {
    fn send(&mut self, msg: &BoundaryMessage) -> Result<(), TransportError>;
    fn recv(
        &mut self,
        phase: Phase,
        outer_k: u32,
        inner_j: u32,
    ) -> Result<BoundaryMessage, TransportError>;
    fn audit(&self) -> &TransportAudit;
    fn take_audit(&mut self) -> TransportAudit;
}

pub(crate) fn check_tags(
    msg: &BoundaryMessage,
    phase: Phase,
    outer_k: u32,
    inner_j: u32,
) -> Result<(), TransportError> {
    if msg.phase != phase || msg.outer_k != outer_k || msg.inner_j != inner_j {
        return Err(TransportError::Protocol {
            expected: format!("{phase} k={outer_k} j={inner_j}"),
            got: format!("{} k={} j={}", msg.phase, msg.outer_k, msg.inner_j),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn msg(phase: Phase, k: u32, j: u32) -> BoundaryMessage {
        let payload = match phase {
            Phase::BoundaryReport => Payload::Boundary {
                power_kw: vec![1.0, 2.0, 3.0],
                lagrangian: 10.5,
            },
            Phase::ZBroadcast => Payload::Z {
                z_kw: vec![0.5, 1.0, 1.5],
                continue_inner: true,
            },
            Phase::BoundReport => Payload::Bounds {
                phi_hat: 1.0,
                phi_tilde: Some(0.5),
                phi_check: 0.0,
            },
            Phase::BinaryEpoch => Payload::Epoch {
                forward: true,
                stop: false,
            },
        };
        BoundaryMessage {
            sender: Sender::Pdso,
            phase,
            outer_k: k,
            inner_j: j,
            payload,
        }
    }

    #[test]
    fn wire_fields_are_stable() {
        let m = msg(Phase::BoundaryReport, 3, 2);
        let wire = String::from_utf8(m.encode().unwrap()).unwrap();
        for field in ["\"sender\"", "\"phase\"", "\"k\"", "\"j\"", "\"payload\""] {
            assert!(wire.contains(field), "{wire}");
        }
        assert!(wire.contains("boundary_report"));
        let rt = BoundaryMessage::decode(wire.as_bytes()).unwrap();
        assert_eq!(rt, m);
    }

    #[test]
    fn malformed_pairing_rejected() {
        let mut m = msg(Phase::BoundaryReport, 0, 0);
        m.phase = Phase::BinaryEpoch;
        assert!(m.encode().is_err());
    }
}
