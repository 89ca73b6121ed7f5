use alloc::vec::Vec;

use super::{IdentityPayload, Message, Role, SigStatus, Tag, UserId};
use crate::cards::CardStore;
use crate::crypto::{AuthFailure, CryptoError, SealLedger, SeqNonce, Suite};
use crate::schedule::KeySchedule;
use crate::wire::Wire;

const SIG_DOMAIN: &[u8] = b"vake identity signature v1";

/// What a signature covers: the signer's role, the transcript digest
/// through `KeyShareI`, and the signer's identifier.
pub fn signature_digest<S: Suite>(suite: &S, signer: Role, td: &S::Digest, user_id: &UserId) -> S::Digest {
    let mut buf = Vec::from(SIG_DOMAIN);
    buf.push(signer.to_byte());
    td.encode(&mut buf);
    buf.extend_from_slice(&user_id.0);
    suite.hash(&buf)
}

fn aad(tag: Tag, session_id: u32) -> [u8; 5] {
    let s = session_id.to_be_bytes();
    [tag as u8, s[0], s[1], s[2], s[3]]
}

fn block_params<S: Suite>(schedule: &KeySchedule<S>, sender: Role) -> (&S::Key, Tag) {
    match sender {
        Role::Initiator => (&schedule.k1, Tag::EncIdI),
        Role::Responder => (&schedule.k2, Tag::EncIdR),
    }
}

/// Seals `payload` under the sender's identity key: `k1` for the initiator,
/// `k2` for the responder. The frame tag and session id are bound as
/// associated data.
pub fn build_identity_block<S: Suite>(
    suite: &S,
    schedule: &KeySchedule<S>,
    sender: Role,
    payload: &IdentityPayload<S>,
    session_id: u32,
    ledger: &mut SealLedger<S::Key>,
) -> Result<Message<S>, CryptoError> {
    let (key, tag) = block_params(schedule, sender);
    let pt = suite.encode_identity(payload);
    let ct = ledger.seal(suite, key, SeqNonce::new(sender, 0), &aad(tag, session_id), &pt)?;
    Ok(match sender {
        Role::Initiator => Message::EncIdI { ct },
        Role::Responder => Message::EncIdR { ct },
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenedIdentity<S: Suite> {
    pub peer_id: UserId,
    pub peer_nonce: S::Nonce,
    pub sig_status: SigStatus,
    /// The peer's verdict on our own signature, if it sent one.
    pub peer_view: Option<SigStatus>,
}

/// Opens a peer's identity block and judges its signature against the card
/// store as it stands now, so a revocation before this point takes effect.
pub fn open_identity_block<S: Suite>(
    suite: &S,
    schedule: &KeySchedule<S>,
    sender: Role,
    ct: &S::Ciphertext,
    session_id: u32,
    td: &S::Digest,
    cards: &CardStore<S::VerificationKey>,
) -> Result<OpenedIdentity<S>, AuthFailure> {
    let (key, tag) = block_params(schedule, sender);
    let pt = suite.aead_open(key, SeqNonce::new(sender, 0), &aad(tag, session_id), ct)?;
    let payload = suite.decode_identity(&pt).ok_or(AuthFailure)?;
    let sig_status = match (cards.lookup(&payload.user_id), &payload.signature) {
        (None, _) => SigStatus::UnverifiedNoKey,
        (Some(_), None) => SigStatus::Absent,
        (Some(vk), Some(sig)) => {
            let digest = signature_digest(suite, sender, td, &payload.user_id);
            if suite.verify_signature(vk, &digest, sig) {
                SigStatus::Valid
            } else {
                SigStatus::Invalid
            }
        }
    };
    Ok(OpenedIdentity { peer_id: payload.user_id, peer_nonce: payload.fresh_nonce, sig_status, peer_view: payload.peer_status })
}
