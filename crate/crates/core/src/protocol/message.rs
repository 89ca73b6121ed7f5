use alloc::vec::Vec;
use core::fmt;

use super::{AbortCode, SigStatus};
use crate::crc::crc16_ccitt_false;
use crate::crypto::Suite;
use crate::wire::{take, take_array, Wire, WireError};

/// tag(1) + session id(4) + retransmit count(1) + payload length(2) + crc(2)
pub const FRAME_OVERHEAD: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Tag {
    RoleNonce = 0x01,
    Commit = 0x02,
    KeyShareR = 0x03,
    KeyShareI = 0x04,
    EncIdI = 0x05,
    EncIdR = 0x06,
    SasCtl = 0x07,
    Abort = 0x0F,
}

impl Tag {
    pub fn from_byte(b: u8) -> Option<Tag> {
        Some(match b {
            0x01 => Tag::RoleNonce,
            0x02 => Tag::Commit,
            0x03 => Tag::KeyShareR,
            0x04 => Tag::KeyShareI,
            0x05 => Tag::EncIdI,
            0x06 => Tag::EncIdR,
            0x07 => Tag::SasCtl,
            0x0F => Tag::Abort,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Message<S: Suite> {
    RoleNonce { r: u64 },
    Commit { c: S::Digest },
    KeyShareR { share: S::Share, salt: S::Nonce },
    KeyShareI { share: S::Share, salt: S::Nonce },
    /// Initiator identity block under `k1`.
    EncIdI { ct: S::Ciphertext },
    /// Responder identity block under `k2`.
    EncIdR { ct: S::Ciphertext },
    /// Control message under `k3`.
    SasCtl { ct: S::Ciphertext },
    Abort { code: AbortCode },
}

impl<S: Suite> Message<S> {
    pub fn tag(&self) -> Tag {
        match self {
            Message::RoleNonce { .. } => Tag::RoleNonce,
            Message::Commit { .. } => Tag::Commit,
            Message::KeyShareR { .. } => Tag::KeyShareR,
            Message::KeyShareI { .. } => Tag::KeyShareI,
            Message::EncIdI { .. } => Tag::EncIdI,
            Message::EncIdR { .. } => Tag::EncIdR,
            Message::SasCtl { .. } => Tag::SasCtl,
            Message::Abort { .. } => Tag::Abort,
        }
    }

    pub fn encode_payload(&self, out: &mut Vec<u8>) {
        match self {
            Message::RoleNonce { r } => out.extend_from_slice(&r.to_be_bytes()),
            Message::Commit { c } => c.encode(out),
            Message::KeyShareR { share, salt } | Message::KeyShareI { share, salt } => {
                share.encode(out);
                salt.encode(out);
            }
            Message::EncIdI { ct } | Message::EncIdR { ct } | Message::SasCtl { ct } => ct.encode(out),
            Message::Abort { code } => out.push(*code as u8),
        }
    }

    pub fn decode_payload(tag: Tag, payload: &[u8]) -> Result<Self, WireError> {
        let mut input = payload;
        let m = match tag {
            Tag::RoleNonce => Message::RoleNonce { r: u64::from_be_bytes(take_array(&mut input)?) },
            Tag::Commit => Message::Commit { c: S::Digest::decode(&mut input)? },
            Tag::KeyShareR => Message::KeyShareR { share: S::Share::decode(&mut input)?, salt: S::Nonce::decode(&mut input)? },
            Tag::KeyShareI => Message::KeyShareI { share: S::Share::decode(&mut input)?, salt: S::Nonce::decode(&mut input)? },
            Tag::EncIdI => Message::EncIdI { ct: S::Ciphertext::decode(&mut input)? },
            Tag::EncIdR => Message::EncIdR { ct: S::Ciphertext::decode(&mut input)? },
            Tag::SasCtl => Message::SasCtl { ct: S::Ciphertext::decode(&mut input)? },
            Tag::Abort => Message::Abort { code: AbortCode::from_byte(take(&mut input, 1)?[0]).ok_or(WireError)? },
        };
        if input.is_empty() {
            Ok(m)
        } else {
            Err(WireError)
        }
    }
}

/// Transcript form of a message: `tag || session_id || payload`.
pub fn canonical_entry<S: Suite>(m: &Message<S>, session_id: u32) -> Vec<u8> {
    let mut out = Vec::new();
    out.push(m.tag() as u8);
    out.extend_from_slice(&session_id.to_be_bytes());
    m.encode_payload(&mut out);
    out
}

/// # Panics
/// If the payload exceeds 65535 bytes.
pub fn encode_frame<S: Suite>(m: &Message<S>, session_id: u32, retransmit_count: u8) -> Vec<u8> {
    let mut payload = Vec::new();
    m.encode_payload(&mut payload);
    let len = u16::try_from(payload.len()).expect("payload exceeds frame limit");
    let mut out = Vec::with_capacity(payload.len() + FRAME_OVERHEAD);
    out.push(m.tag() as u8);
    out.extend_from_slice(&session_id.to_be_bytes());
    out.push(retransmit_count);
    out.extend_from_slice(&len.to_be_bytes());
    out.extend_from_slice(&payload);
    let crc = crc16_ccitt_false(&out);
    out.extend_from_slice(&crc.to_be_bytes());
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodecError {
    BadCrc,
    BadLength,
    UnknownTag,
    /// Checksum and framing are intact but the payload does not parse.
    BadPayload,
}

impl fmt::Display for CodecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodecError::BadCrc => "checksum mismatch",
            CodecError::BadLength => "length mismatch",
            CodecError::UnknownTag => "unknown message tag",
            CodecError::BadPayload => "malformed payload",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame<S: Suite> {
    pub message: Message<S>,
    pub session_id: u32,
    pub retransmit_count: u8,
}

impl<S: Suite> Frame<S> {
    pub fn canonical(&self) -> Vec<u8> {
        canonical_entry(&self.message, self.session_id)
    }
}

/// The checksum is verified before anything else is interpreted, so every
/// corruption it detects is reported as `BadCrc`.
pub fn decode_frame<S: Suite>(bytes: &[u8]) -> Result<Frame<S>, CodecError> {
    if bytes.len() < FRAME_OVERHEAD {
        return Err(CodecError::BadLength);
    }
    let (body, crc) = bytes.split_at(bytes.len() - 2);
    if crc16_ccitt_false(body) != u16::from_be_bytes([crc[0], crc[1]]) {
        return Err(CodecError::BadCrc);
    }
    let len = u16::from_be_bytes([body[6], body[7]]) as usize;
    if len + FRAME_OVERHEAD != bytes.len() {
        return Err(CodecError::BadLength);
    }
    let tag = Tag::from_byte(body[0]).ok_or(CodecError::UnknownTag)?;
    let session_id = u32::from_be_bytes([body[1], body[2], body[3], body[4]]);
    let message = Message::decode_payload(tag, &body[8..]).map_err(|_| CodecError::BadPayload)?;
    Ok(Frame { message, session_id, retransmit_count: body[5] })
}

/// Hash commitment to the initiator's share: `hash(share || salt)`.
pub fn make_commitment<S: Suite>(suite: &S, share: &S::Share, salt: &S::Nonce) -> S::Digest {
    let mut buf = share.to_wire();
    salt.encode(&mut buf);
    suite.hash(&buf)
}

/// Plaintext of a `SasCtl` message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlMsg {
    /// Key confirmation from the initiator, carrying its verdict on the
    /// responder's signature.
    Confirm(SigStatus),
    /// The sender's user asked for a vocal SAS comparison.
    SasRequest,
}

impl ControlMsg {
    pub fn to_bytes(self) -> Vec<u8> {
        match self {
            ControlMsg::Confirm(s) => alloc::vec![1, SigStatus::to_byte(Some(s))],
            ControlMsg::SasRequest => alloc::vec![2],
        }
    }

    pub fn from_bytes(b: &[u8]) -> Option<ControlMsg> {
        match b {
            [1, s] => Some(ControlMsg::Confirm(SigStatus::from_byte(*s)??)),
            [2] => Some(ControlMsg::SasRequest),
            _ => None,
        }
    }
}
