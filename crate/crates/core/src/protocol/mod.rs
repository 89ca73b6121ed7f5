//! The key-exchange protocol: roles, messages, framing, identity blocks and
//! the per-endpoint state machine.

mod identity;
mod message;
mod session;

pub use identity::{build_identity_block, open_identity_block, signature_digest, OpenedIdentity};
pub use message::{
    canonical_entry, decode_frame, encode_frame, make_commitment, CodecError, ControlMsg, Frame, Message, Tag,
    FRAME_OVERHEAD,
};
pub use session::{
    Action, Claim, Event, Phase, RoleNonceStrategy, SasPolicy, Session, SessionConfig, R_MAX, TIMEOUT_TICKS,
};

use core::fmt;

use crate::crypto::Suite;
use crate::sas::SasObligation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Initiator,
    Responder,
}

impl Role {
    pub fn peer(self) -> Role {
        match self {
            Role::Initiator => Role::Responder,
            Role::Responder => Role::Initiator,
        }
    }

    pub(crate) fn to_byte(self) -> u8 {
        match self {
            Role::Initiator => 0,
            Role::Responder => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Negotiation {
    Decided(Role),
    /// Equal nonces: both sides draw again.
    Retry,
}

/// The larger role nonce becomes initiator.
pub fn negotiate_role(local: u64, remote: u64) -> Negotiation {
    match local.cmp(&remote) {
        core::cmp::Ordering::Greater => Negotiation::Decided(Role::Initiator),
        core::cmp::Ordering::Less => Negotiation::Decided(Role::Responder),
        core::cmp::Ordering::Equal => Negotiation::Retry,
    }
}

/// Fixed 16-byte user identifier.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UserId(pub [u8; 16]);

impl UserId {
    /// Left-aligned, zero-padded name. Longer names are truncated.
    pub fn from_name(name: &str) -> UserId {
        let mut id = [0u8; 16];
        for (d, s) in id.iter_mut().zip(name.bytes()) {
            *d = s;
        }
        UserId(id)
    }
}

impl fmt::Debug for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("UserId(")?;
        for b in self.0 {
            write!(f, "{b:02x}")?;
        }
        f.write_str(")")
    }
}

/// Outcome of processing a peer's signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigStatus {
    Valid,
    Invalid,
    /// No card is installed for the claimed identity; the signature is not
    /// processed.
    UnverifiedNoKey,
    /// A card exists but the block carries no signature.
    Absent,
}

impl SigStatus {
    /// `0` encodes "not yet known".
    pub fn to_byte(s: Option<SigStatus>) -> u8 {
        match s {
            None => 0,
            Some(SigStatus::Valid) => 1,
            Some(SigStatus::Invalid) => 2,
            Some(SigStatus::UnverifiedNoKey) => 3,
            Some(SigStatus::Absent) => 4,
        }
    }

    pub fn from_byte(b: u8) -> Option<Option<SigStatus>> {
        Some(match b {
            0 => None,
            1 => Some(SigStatus::Valid),
            2 => Some(SigStatus::Invalid),
            3 => Some(SigStatus::UnverifiedNoKey),
            4 => Some(SigStatus::Absent),
            _ => return None,
        })
    }
}

/// SAS comparison is mandatory as soon as either side could not verify the
/// other's signature. `Invalid` aborts before reaching this point; it is
/// treated as mandatory here for safety.
pub fn auth_policy(local: SigStatus, peer: SigStatus) -> SasObligation {
    if local == SigStatus::Valid && peer == SigStatus::Valid {
        SasObligation::Optional
    } else {
        SasObligation::Mandatory
    }
}

/// Stable one-byte abort codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[repr(u8)]
pub enum AbortCode {
    CommitMismatch = 1,
    AuthFail = 2,
    RetryExhausted = 3,
    SigInvalid = 4,
    SasMismatch = 5,
    PolicyViolation = 6,
}

impl AbortCode {
    pub fn from_byte(b: u8) -> Option<AbortCode> {
        Some(match b {
            1 => AbortCode::CommitMismatch,
            2 => AbortCode::AuthFail,
            3 => AbortCode::RetryExhausted,
            4 => AbortCode::SigInvalid,
            5 => AbortCode::SasMismatch,
            6 => AbortCode::PolicyViolation,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            AbortCode::CommitMismatch => "CommitMismatch",
            AbortCode::AuthFail => "AuthFail",
            AbortCode::RetryExhausted => "RetryExhausted",
            AbortCode::SigInvalid => "SigInvalid",
            AbortCode::SasMismatch => "SasMismatch",
            AbortCode::PolicyViolation => "PolicyViolation",
        }
    }
}

impl fmt::Display for AbortCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Contents of an identity block before encryption.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityPayload<S: Suite> {
    pub user_id: UserId,
    pub fresh_nonce: S::Nonce,
    /// Over [`signature_digest`]; absent when the sender has no signing key
    /// or an attacker removed it.
    pub signature: Option<S::Signature>,
    /// The sender's verdict on the receiver's signature, when already
    /// known. Only the responder's block carries one.
    pub peer_status: Option<SigStatus>,
}
