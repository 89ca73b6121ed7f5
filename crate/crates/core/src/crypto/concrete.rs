use alloc::vec::Vec;
use core::fmt;

use chacha20poly1305::aead::{Aead, KeyInit, Payload};
use chacha20poly1305::ChaCha20Poly1305;
use curve25519_dalek::constants::RISTRETTO_BASEPOINT_TABLE;
use curve25519_dalek::ristretto::CompressedRistretto;
use curve25519_dalek::Scalar;
use ed25519_dalek::{Signer, Verifier};
use hkdf::Hkdf;
use rand_core::{CryptoRng, RngCore};
use sha2::{Digest as _, Sha256};
use zeroize::Zeroize;

use super::{AuthFailure, CryptoError, SeqNonce, Suite};
use crate::sas::SasValue;
use crate::wire::{take_array, Wire, WireError};

/// Byte-level backend: ristretto255 ECDHE, ChaCha20-Poly1305, Ed25519,
/// SHA-256 and HKDF-SHA-256.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Concrete;

#[derive(Clone)]
pub struct SecretScalar(Scalar);

impl SecretScalar {
    /// Reduces 64 uniform bytes modulo the group order.
    pub fn from_wide_bytes(bytes: &[u8; 64]) -> Self {
        SecretScalar(Scalar::from_bytes_mod_order_wide(bytes))
    }

    pub fn public_share(&self) -> PublicShare {
        PublicShare((&self.0 * RISTRETTO_BASEPOINT_TABLE).compress().to_bytes())
    }
}

impl Drop for SecretScalar {
    fn drop(&mut self) {
        self.0.zeroize();
    }
}

impl fmt::Debug for SecretScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SecretScalar(..)")
    }
}

macro_rules! byte_newtype {
    ($(#[$m:meta])* $name:ident, $len:expr) => {
        $(#[$m])*
        #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub [u8; $len]);

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}(", stringify!($name))?;
                for b in &self.0 {
                    write!(f, "{b:02x}")?;
                }
                f.write_str(")")
            }
        }

        impl Wire for $name {
            fn encode(&self, out: &mut Vec<u8>) {
                out.extend_from_slice(&self.0);
            }

            fn decode(input: &mut &[u8]) -> Result<Self, WireError> {
                take_array(input).map($name)
            }
        }
    };
}

byte_newtype!(
    /// Compressed ristretto255 element.
    PublicShare,
    32
);
byte_newtype!(Digest, 32);
byte_newtype!(RandomNonce, 16);
byte_newtype!(VerificationKey, 32);
byte_newtype!(Signature, 64);

#[derive(Clone, PartialEq, Eq)]
pub struct SharedSecret(pub [u8; 32]);

impl Drop for SharedSecret {
    fn drop(&mut self) {
        self.0.zeroize();
    }
}

impl fmt::Debug for SharedSecret {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SharedSecret(..)")
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct SymmetricKey(pub [u8; 32]);

impl Drop for SymmetricKey {
    fn drop(&mut self) {
        self.0.zeroize();
    }
}

impl fmt::Debug for SymmetricKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SymmetricKey(..)")
    }
}

/// ChaCha20-Poly1305 output. Its wire form takes the rest of the payload.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Ciphertext(pub Vec<u8>);

impl Wire for Ciphertext {
    fn encode(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.0);
    }

    fn decode(input: &mut &[u8]) -> Result<Self, WireError> {
        let ct = Ciphertext(input.to_vec());
        *input = &[];
        Ok(ct)
    }
}

#[derive(Clone)]
pub struct SigningKey(ed25519_dalek::SigningKey);

impl SigningKey {
    pub fn from_bytes(seed: &[u8; 32]) -> Self {
        SigningKey(ed25519_dalek::SigningKey::from_bytes(seed))
    }

    pub fn verification_key(&self) -> VerificationKey {
        VerificationKey(self.0.verifying_key().to_bytes())
    }
}

impl fmt::Debug for SigningKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SigningKey(for {:?})", self.verification_key())
    }
}

impl Suite for Concrete {
    type Scalar = SecretScalar;
    type Share = PublicShare;
    type Shared = SharedSecret;
    type Key = SymmetricKey;
    type Ciphertext = Ciphertext;
    type SigningKey = SigningKey;
    type VerificationKey = VerificationKey;
    type Signature = Signature;
    type Digest = Digest;
    type Nonce = RandomNonce;

    fn gen_ephemeral_keypair<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> (SecretScalar, PublicShare) {
        let mut wide = [0u8; 64];
        rng.fill_bytes(&mut wide);
        let secret = SecretScalar::from_wide_bytes(&wide);
        wide.zeroize();
        let share = secret.public_share();
        (secret, share)
    }

    fn gen_signing_keypair<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> (SigningKey, VerificationKey) {
        let mut seed = [0u8; 32];
        rng.fill_bytes(&mut seed);
        let sk = SigningKey::from_bytes(&seed);
        seed.zeroize();
        let vk = sk.verification_key();
        (sk, vk)
    }

    fn random_nonce<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> RandomNonce {
        let mut n = [0u8; 16];
        rng.fill_bytes(&mut n);
        RandomNonce(n)
    }

    fn dh_shared(&self, secret: &SecretScalar, peer: &PublicShare) -> Result<SharedSecret, CryptoError> {
        let point = CompressedRistretto(peer.0).decompress().ok_or(CryptoError::InvalidShare)?;
        if point == curve25519_dalek::RistrettoPoint::default() {
            return Err(CryptoError::LowOrderShare);
        }
        Ok(SharedSecret((secret.0 * point).compress().to_bytes()))
    }

    fn hash(&self, data: &[u8]) -> Digest {
        Digest(Sha256::digest(data).into())
    }

    fn derive_key(&self, secret: &SharedSecret, transcript: &Digest, label: &str) -> SymmetricKey {
        let mut out = [0u8; 32];
        Hkdf::<Sha256>::new(Some(&transcript.0), &secret.0)
            .expand(label.as_bytes(), &mut out)
            .expect("32 bytes is a valid HKDF-SHA-256 output length");
        SymmetricKey(out)
    }

    fn derive_sas(&self, secret: &SharedSecret, transcript: &Digest) -> SasValue {
        let bits = self.derive_key(secret, transcript, crate::schedule::LABEL_SAS);
        SasValue(u16::from_be_bytes([bits.0[0], bits.0[1]]))
    }

    fn aead_seal(&self, key: &SymmetricKey, nonce: SeqNonce, aad: &[u8], plaintext: &[u8]) -> Ciphertext {
        let cipher = ChaCha20Poly1305::new((&key.0).into());
        let ct = cipher
            .encrypt((&nonce.to_bytes()).into(), Payload { msg: plaintext, aad })
            .expect("ChaCha20-Poly1305 encryption is infallible for in-memory buffers");
        Ciphertext(ct)
    }

    fn aead_open(&self, key: &SymmetricKey, nonce: SeqNonce, aad: &[u8], ct: &Ciphertext) -> Result<Vec<u8>, AuthFailure> {
        let cipher = ChaCha20Poly1305::new((&key.0).into());
        cipher
            .decrypt((&nonce.to_bytes()).into(), Payload { msg: &ct.0, aad })
            .map_err(|_| AuthFailure)
    }

    fn sign_transcript(&self, sk: &SigningKey, digest: &Digest) -> Signature {
        Signature(sk.0.sign(&digest.0).to_bytes())
    }

    fn verify_signature(&self, vk: &VerificationKey, digest: &Digest, sig: &Signature) -> bool {
        let Ok(vk) = ed25519_dalek::VerifyingKey::from_bytes(&vk.0) else {
            return false;
        };
        let sig = ed25519_dalek::Signature::from_bytes(&sig.0);
        vk.verify(&digest.0, &sig).is_ok()
    }
}
