//! Transcript hashing and key derivation.

use alloc::vec::Vec;

use crate::crypto::Suite;
use crate::sas::SasValue;

pub const LABEL_K1: &str = "adhoc1";
pub const LABEL_K2: &str = "adhoc2";
pub const LABEL_K3: &str = "adhoc3";
pub const LABEL_SESSION: &str = "sess";
pub const LABEL_SAS: &str = "sas";

/// Append-only list of frames in canonical form (tag, session id and
/// payload; no retransmit count or checksum).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    entries: Vec<Vec<u8>>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, entry: Vec<u8>) {
        self.entries.push(entry);
    }

    pub fn entries(&self) -> &[Vec<u8>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `len(4, big-endian) || entry` for each entry, in order.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for e in &self.entries {
            out.extend_from_slice(&(e.len() as u32).to_be_bytes());
            out.extend_from_slice(e);
        }
        out
    }
}

pub fn transcript_digest<S: Suite>(suite: &S, t: &Transcript) -> S::Digest {
    suite.hash(&t.encode())
}

/// Keys protecting the identity blocks (`k1` initiator, `k2` responder)
/// and the SAS-control messages (`k3`), plus the session key and SAS.
#[derive(Clone, Debug)]
pub struct KeySchedule<S: Suite> {
    pub k1: S::Key,
    pub k2: S::Key,
    pub k3: S::Key,
    pub session_key: S::Key,
    pub sas: SasValue,
}

impl<S: Suite> PartialEq for KeySchedule<S> {
    fn eq(&self, other: &Self) -> bool {
        self.k1 == other.k1
            && self.k2 == other.k2
            && self.k3 == other.k3
            && self.session_key == other.session_key
            && self.sas == other.sas
    }
}

impl<S: Suite> Eq for KeySchedule<S> {}

pub fn derive_schedule<S: Suite>(suite: &S, z: &S::Shared, td: &S::Digest) -> KeySchedule<S> {
    KeySchedule {
        k1: suite.derive_key(z, td, LABEL_K1),
        k2: suite.derive_key(z, td, LABEL_K2),
        k3: suite.derive_key(z, td, LABEL_K3),
        session_key: suite.derive_key(z, td, LABEL_SESSION),
        sas: suite.derive_sas(z, td),
    }
}
