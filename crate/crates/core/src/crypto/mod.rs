//! Cryptographic primitives behind a single [`Suite`] interface.
//!
//! Two backends implement it. [`Concrete`] works on bytes (ristretto255,
//! ChaCha20-Poly1305, Ed25519, SHA-256, HKDF-SHA-256) and [`Symbolic`]
//! works on [`Term`](crate::term::Term)s under the perfect-cryptography
//! assumption. Protocol code is generic over the suite, so the same state
//! machine drives interop tests and symbolic security checks.

mod concrete;
mod symbolic;

pub use concrete::{
    Ciphertext, Concrete, Digest, PublicShare, RandomNonce, SecretScalar, SharedSecret, Signature, SigningKey,
    SymmetricKey, VerificationKey,
};
pub use symbolic::{id_atom, vk_name_for, Symbolic};

use alloc::vec::Vec;
use core::fmt::Debug;

use rand_core::{CryptoRng, RngCore};

use crate::protocol::{IdentityPayload, Role, SigStatus, UserId};
use crate::sas::SasValue;
use crate::wire::{take, take_array, Wire};

/// AEAD nonce: a per-direction message counter. The direction occupies the
/// high bit of the first byte (initiator 0, responder 1); the counter fills
/// the last eight bytes, big-endian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeqNonce {
    pub direction: Role,
    pub counter: u64,
}

impl SeqNonce {
    pub fn new(direction: Role, counter: u64) -> Self {
        SeqNonce { direction, counter }
    }

    pub fn to_bytes(self) -> [u8; 12] {
        let mut out = [0u8; 12];
        if self.direction == Role::Responder {
            out[0] = 0x80;
        }
        out[4..].copy_from_slice(&self.counter.to_be_bytes());
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CryptoError {
    /// The peer's share is not a valid group element encoding.
    InvalidShare,
    /// The peer's share is the identity element.
    LowOrderShare,
    /// A (key, nonce) pair was about to be sealed twice.
    NonceReuse,
}

impl core::fmt::Display for CryptoError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            CryptoError::InvalidShare => "invalid group element encoding",
            CryptoError::LowOrderShare => "low-order group element",
            CryptoError::NonceReuse => "AEAD nonce reuse",
        })
    }
}

/// AEAD open failed: wrong key, nonce, associated data, or tampering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuthFailure;

pub trait Suite: Clone + Debug + Default + PartialEq + Eq {
    type Scalar: Clone + Debug;
    type Share: Wire + Clone + Eq + Debug;
    type Shared: Clone + Eq + Debug;
    type Key: Clone + Eq + Debug;
    type Ciphertext: Wire + Clone + Eq + Debug;
    type SigningKey: Clone + Debug;
    type VerificationKey: Wire + Clone + Eq + Debug;
    type Signature: Wire + Clone + Eq + Debug;
    type Digest: Wire + Clone + Eq + Debug;
    type Nonce: Wire + Clone + Eq + Debug;

    fn gen_ephemeral_keypair<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> (Self::Scalar, Self::Share);

    fn gen_signing_keypair<R: RngCore + CryptoRng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> (Self::SigningKey, Self::VerificationKey);

    fn random_nonce<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> Self::Nonce;

    fn dh_shared(&self, secret: &Self::Scalar, peer: &Self::Share) -> Result<Self::Shared, CryptoError>;

    fn hash(&self, data: &[u8]) -> Self::Digest;

    /// Extract-then-expand: the transcript digest salts the extraction and
    /// `label` selects the expansion.
    fn derive_key(&self, secret: &Self::Shared, transcript: &Self::Digest, label: &str) -> Self::Key;

    /// The first 16 bits of the `sas` expansion.
    fn derive_sas(&self, secret: &Self::Shared, transcript: &Self::Digest) -> SasValue;

    fn aead_seal(&self, key: &Self::Key, nonce: SeqNonce, aad: &[u8], plaintext: &[u8]) -> Self::Ciphertext;

    fn aead_open(
        &self,
        key: &Self::Key,
        nonce: SeqNonce,
        aad: &[u8],
        ciphertext: &Self::Ciphertext,
    ) -> Result<Vec<u8>, AuthFailure>;

    fn sign_transcript(&self, sk: &Self::SigningKey, digest: &Self::Digest) -> Self::Signature;

    /// Never panics; malformed inputs verify as false.
    fn verify_signature(&self, vk: &Self::VerificationKey, digest: &Self::Digest, sig: &Self::Signature) -> bool;

    /// Plaintext layout of an identity block:
    /// `user_id(16) || nonce || peer_status(1) || has_sig(1) || [signature]`.
    fn encode_identity(&self, payload: &IdentityPayload<Self>) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&payload.user_id.0);
        payload.fresh_nonce.encode(&mut out);
        out.push(SigStatus::to_byte(payload.peer_status));
        match &payload.signature {
            Some(sig) => {
                out.push(1);
                sig.encode(&mut out);
            }
            None => out.push(0),
        }
        out
    }

    fn decode_identity(&self, bytes: &[u8]) -> Option<IdentityPayload<Self>> {
        let mut input = bytes;
        let user_id = UserId(take_array(&mut input).ok()?);
        let fresh_nonce = Self::Nonce::decode(&mut input).ok()?;
        let peer_status = SigStatus::from_byte(take(&mut input, 1).ok()?[0])?;
        let signature = match take(&mut input, 1).ok()?[0] {
            0 => None,
            1 => Some(Self::Signature::decode(&mut input).ok()?),
            _ => return None,
        };
        input.is_empty().then_some(IdentityPayload { user_id, fresh_nonce, signature, peer_status })
    }
}

/// Records every (key, nonce) pair sealed within a session and refuses a
/// second seal under the same pair.
#[derive(Debug, Clone)]
pub struct SealLedger<K> {
    used: Vec<(K, SeqNonce)>,
}

impl<K> Default for SealLedger<K> {
    fn default() -> Self {
        SealLedger { used: Vec::new() }
    }
}

impl<K: Clone + Eq> SealLedger<K> {
    pub fn seal<S: Suite<Key = K>>(
        &mut self,
        suite: &S,
        key: &K,
        nonce: SeqNonce,
        aad: &[u8],
        plaintext: &[u8],
    ) -> Result<S::Ciphertext, CryptoError> {
        if self.used.iter().any(|(k, n)| k == key && *n == nonce) {
            return Err(CryptoError::NonceReuse);
        }
        self.used.push((key.clone(), nonce));
        Ok(suite.aead_seal(key, nonce, aad, plaintext))
    }

    pub fn len(&self) -> usize {
        self.used.len()
    }

    pub fn is_empty(&self) -> bool {
        self.used.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seq_nonce_layout() {
        assert_eq!(
            SeqNonce::new(Role::Initiator, 1).to_bytes(),
            [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]
        );
        assert_eq!(
            SeqNonce::new(Role::Responder, 0x0102).to_bytes(),
            [0x80, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 2]
        );
    }

    #[test]
    fn ledger_refuses_reuse() {
        let suite = Concrete;
        let key = SymmetricKey([7; 32]);
        let mut ledger = SealLedger::default();
        let n = SeqNonce::new(Role::Initiator, 0);
        assert!(ledger.seal(&suite, &key, n, b"", b"one").is_ok());
        assert_eq!(ledger.seal(&suite, &key, n, b"", b"two"), Err(CryptoError::NonceReuse));
        // other direction or other key is fine
        assert!(ledger.seal(&suite, &key, SeqNonce::new(Role::Responder, 0), b"", b"x").is_ok());
        assert!(ledger.seal(&suite, &SymmetricKey([8; 32]), n, b"", b"x").is_ok());
        assert_eq!(ledger.len(), 3);
    }
}
