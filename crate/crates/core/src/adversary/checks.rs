use alloc::vec::Vec;

use crate::crypto::{Concrete, Suite, Symbolic};
use crate::protocol::{decode_frame, Claim, Message, UserId};
use crate::sas::SasValue;
use crate::term::{close_knowledge, Knowledge, Term, DEFAULT_DEPTH_BOUND};

/// Everything the attacker saw or holds after a trial.
#[derive(Debug, Clone)]
pub struct AttackerView<S: Suite> {
    /// Data-channel frames, as sent by any party.
    pub frames: Vec<Vec<u8>>,
    /// SAS values overheard on the voice channel.
    pub utterances: Vec<SasValue>,
    /// Keys of the sessions the attacker ran itself.
    pub own_keys: Vec<S::Key>,
    /// Signing keys held during the session: its own, plus any stolen
    /// beforehand.
    pub signing_keys: Vec<S::SigningKey>,
    /// Signing keys stolen once the session is over.
    pub compromised_later: Vec<S::SigningKey>,
}

impl<S: Suite> Default for AttackerView<S> {
    fn default() -> Self {
        AttackerView {
            frames: Vec::new(),
            utterances: Vec::new(),
            own_keys: Vec::new(),
            signing_keys: Vec::new(),
            compromised_later: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Compromise {
    None,
    /// The victims' signing keys leak after the session.
    PostSession,
}

/// How a backend decides what the attacker can learn.
pub trait AttackerModel: Suite {
    const MODE: &'static str;

    /// For each target, whether the attacker can obtain it.
    fn knows_keys(&self, view: &AttackerView<Self>, compromise: Compromise, targets: &[Self::Key]) -> Vec<bool>;

    /// Whether a passive listener can learn any of `ids` from `frames`.
    fn eavesdropper_learns_id(&self, frames: &[Vec<u8>], ids: &[UserId]) -> bool;
}

/// The symbolic attacker derives by knowledge closure.
impl AttackerModel for Symbolic {
    const MODE: &'static str = "symbolic";

    fn knows_keys(&self, view: &AttackerView<Self>, compromise: Compromise, targets: &[Term]) -> Vec<bool> {
        if targets.is_empty() {
            return Vec::new();
        }
        let mut k = wire_knowledge(&view.frames);
        k.extend(view.utterances.iter().map(|s| Term::data(s.0.to_be_bytes().to_vec())));
        k.extend(view.own_keys.iter().cloned());
        k.extend(view.signing_keys.iter().cloned());
        if compromise == Compromise::PostSession {
            k.extend(view.compromised_later.iter().cloned());
        }
        let closure = close_knowledge(&k, DEFAULT_DEPTH_BOUND);
        targets.iter().map(|t| closure.contains(t)).collect()
    }

    fn eavesdropper_learns_id(&self, frames: &[Vec<u8>], ids: &[UserId]) -> bool {
        let closure = close_knowledge(&wire_knowledge(frames), DEFAULT_DEPTH_BOUND);
        ids.iter().any(|id| closure.contains(&crate::crypto::id_atom(id))) || cleartext_id(frames, ids)
    }
}

/// The concrete attacker knows exactly the keys of its own sessions.
impl AttackerModel for Concrete {
    const MODE: &'static str = "concrete";

    fn knows_keys(&self, view: &AttackerView<Self>, _: Compromise, targets: &[Self::Key]) -> Vec<bool> {
        targets.iter().map(|t| view.own_keys.contains(t)).collect()
    }

    fn eavesdropper_learns_id(&self, frames: &[Vec<u8>], ids: &[UserId]) -> bool {
        cleartext_id(frames, ids)
    }
}

fn cleartext_id(frames: &[Vec<u8>], ids: &[UserId]) -> bool {
    frames.iter().any(|f| ids.iter().any(|id| f.windows(16).any(|w| w == id.0)))
}

/// The terms carried by every well-formed frame.
pub fn wire_knowledge(frames: &[Vec<u8>]) -> Knowledge {
    let mut k = Knowledge::new();
    for bytes in frames {
        let Ok(frame) = decode_frame::<Symbolic>(bytes) else { continue };
        match frame.message {
            Message::RoleNonce { r } => {
                k.insert(Term::data(r.to_be_bytes().to_vec()));
            }
            Message::Commit { c } => {
                k.insert(c);
            }
            Message::KeyShareR { share, salt } | Message::KeyShareI { share, salt } => {
                k.insert(share);
                k.insert(salt);
            }
            Message::EncIdI { ct } | Message::EncIdR { ct } | Message::SasCtl { ct } => {
                k.insert(ct);
            }
            Message::Abort { code } => {
                k.insert(Term::data(alloc::vec![code as u8]));
            }
        }
    }
    k
}

/// True iff `key` stays out of the attacker's reach.
pub fn check_secrecy<S: AttackerModel>(suite: &S, view: &AttackerView<S>, compromise: Compromise, key: &S::Key) -> bool {
    !suite.knows_keys(view, compromise, core::slice::from_ref(key))[0]
}

/// Every claim must be matched by exactly one claim of the peer it names,
/// with complementary role and equal key and nonces; and no two claims of
/// one party may share a role and nonce pair.
pub fn check_injective_agreement<S: Suite>(claims: &[Claim<S>]) -> bool {
    claims.iter().enumerate().all(|(i, c)| {
        let partners = claims
            .iter()
            .filter(|d| {
                d.own_id == c.peer_id
                    && d.peer_id == c.own_id
                    && d.role == c.role.peer()
                    && d.session_key == c.session_key
                    && d.nonces == c.nonces
            })
            .count();
        let replays = claims
            .iter()
            .enumerate()
            .filter(|&(j, d)| j != i && d.own_id == c.own_id && d.role == c.role && d.nonces == c.nonces)
            .count();
        partners == 1 && replays == 0
    })
}
