use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand_core::{CryptoRng, RngCore};
use sha2::{Digest as _, Sha256};

use super::{AuthFailure, CryptoError, SeqNonce, Suite};
use crate::protocol::{IdentityPayload, SigStatus, UserId};
use crate::sas::SasValue;
use crate::term::Term;
use crate::wire::{take, Wire, WireError};

/// Perfect-cryptography backend. Every value is a [`Term`]; secrecy is
/// decided by knowledge closure rather than by computation.
///
/// Fresh values are atoms named from rng output: `x…` for ephemeral
/// scalars, `n…` for nonces, `sk…`/`vk…` for signing key pairs. Public
/// byte strings such as digests of public data are `Data` terms.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Symbolic;

impl Wire for Term {
    /// `len(2, big-endian) || s-expression`
    fn encode(&self, out: &mut Vec<u8>) {
        let text = self.to_sexpr();
        let len = u16::try_from(text.len()).expect("term too large for a frame");
        out.extend_from_slice(&len.to_be_bytes());
        out.extend_from_slice(text.as_bytes());
    }

    fn decode(input: &mut &[u8]) -> Result<Self, WireError> {
        let len = u16::from_be_bytes(take(input, 2)?.try_into().map_err(|_| WireError)?) as usize;
        let text = core::str::from_utf8(take(input, len)?).map_err(|_| WireError)?;
        Term::parse_sexpr(text).map_err(|_| WireError)
    }
}

fn fresh_name<R: RngCore + ?Sized>(prefix: &str, rng: &mut R) -> String {
    let mut raw = [0u8; 16];
    rng.fill_bytes(&mut raw);
    let mut name = String::from(prefix);
    for b in raw {
        name.push_str(&format!("{b:02x}"));
    }
    name
}

/// Name of the verification-key atom paired with a signing-key atom.
pub fn vk_name_for(sk_name: &str) -> Option<String> {
    sk_name.strip_prefix("sk").map(|rest| format!("vk{rest}"))
}

/// Plaintext bytes inside a symbolic ciphertext are the text of a term when
/// they parse as one, otherwise opaque public data.
fn lift(plaintext: &[u8]) -> Term {
    core::str::from_utf8(plaintext)
        .ok()
        .and_then(|s| Term::parse_sexpr(s).ok())
        .unwrap_or_else(|| Term::data(plaintext))
}

fn lower(t: &Term) -> Vec<u8> {
    match t {
        Term::Data(bytes) => bytes.clone(),
        other => other.to_sexpr().into_bytes(),
    }
}

fn aead_header(nonce: SeqNonce, aad: &[u8]) -> Term {
    let mut h = nonce.to_bytes().to_vec();
    h.extend_from_slice(aad);
    Term::data(h)
}

pub fn id_atom(id: &UserId) -> Term {
    let mut name = String::from("id:");
    for b in id.0 {
        name.push_str(&format!("{b:02x}"));
    }
    Term::atom(name)
}

fn parse_id_atom(t: &Term) -> Option<UserId> {
    let Term::Atom(name) = t else { return None };
    let hex = name.strip_prefix("id:")?;
    if hex.len() != 32 {
        return None;
    }
    let mut out = [0u8; 16];
    for (i, b) in out.iter_mut().enumerate() {
        *b = u8::from_str_radix(hex.get(2 * i..2 * i + 2)?, 16).ok()?;
    }
    Some(UserId(out))
}

impl Suite for Symbolic {
    type Scalar = Term;
    type Share = Term;
    type Shared = Term;
    type Key = Term;
    type Ciphertext = Term;
    type SigningKey = Term;
    type VerificationKey = Term;
    type Signature = Term;
    type Digest = Term;
    type Nonce = Term;

    fn gen_ephemeral_keypair<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> (Term, Term) {
        let x = Term::atom(fresh_name("x", rng));
        let share = Term::exp(x.clone());
        (x, share)
    }

    fn gen_signing_keypair<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> (Term, Term) {
        let name = fresh_name("sk", rng);
        let vk = vk_name_for(&name).expect("prefixed above");
        (Term::atom(name), Term::atom(vk))
    }

    fn random_nonce<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> Term {
        Term::atom(fresh_name("n", rng))
    }

    fn dh_shared(&self, secret: &Term, peer: &Term) -> Result<Term, CryptoError> {
        match peer {
            Term::Exp(inner) => match **inner {
                Term::Atom(_) => Ok(Term::dh(secret.clone(), peer.clone())),
                // a public exponent plays the role of a small-subgroup share
                Term::Data(_) => Err(CryptoError::LowOrderShare),
                _ => Err(CryptoError::InvalidShare),
            },
            _ => Err(CryptoError::InvalidShare),
        }
    }

    /// The preimage is public bytes, so its SHA-256 stands in for it.
    fn hash(&self, data: &[u8]) -> Term {
        Term::hash(Term::data(Sha256::digest(data).to_vec()))
    }

    fn derive_key(&self, secret: &Term, transcript: &Term, label: &str) -> Term {
        Term::kdf(label, secret.clone(), transcript.clone())
    }

    fn derive_sas(&self, secret: &Term, transcript: &Term) -> SasValue {
        let t = self.derive_key(secret, transcript, crate::schedule::LABEL_SAS);
        let h = Sha256::digest(t.to_sexpr().as_bytes());
        SasValue(u16::from_be_bytes([h[0], h[1]]))
    }

    fn aead_seal(&self, key: &Term, nonce: SeqNonce, aad: &[u8], plaintext: &[u8]) -> Term {
        Term::senc(Term::pair(aead_header(nonce, aad), lift(plaintext)), key.clone())
    }

    fn aead_open(&self, key: &Term, nonce: SeqNonce, aad: &[u8], ct: &Term) -> Result<Vec<u8>, AuthFailure> {
        let Term::Senc(body, k) = ct else { return Err(AuthFailure) };
        let Term::Pair(header, message) = &**body else { return Err(AuthFailure) };
        if **k != *key || **header != aead_header(nonce, aad) {
            return Err(AuthFailure);
        }
        Ok(lower(message))
    }

    fn sign_transcript(&self, sk: &Term, digest: &Term) -> Term {
        Term::sig(digest.clone(), sk.clone())
    }

    fn verify_signature(&self, vk: &Term, digest: &Term, sig: &Term) -> bool {
        let (Term::Atom(vk_name), Term::Sig(m, k)) = (vk, sig) else { return false };
        let Term::Atom(sk_name) = &**k else { return false };
        **m == *digest && vk_name_for(sk_name).as_deref() == Some(vk_name.as_str())
    }

    /// `pair(id, pair(nonce, pair(status, signature-or-empty)))`, so the
    /// identifier is an atom the closure can reason about.
    fn encode_identity(&self, payload: &IdentityPayload<Self>) -> Vec<u8> {
        let sig = payload.signature.clone().unwrap_or_else(|| Term::data(Vec::new()));
        Term::pair(
            id_atom(&payload.user_id),
            Term::pair(
                payload.fresh_nonce.clone(),
                Term::pair(Term::data([SigStatus::to_byte(payload.peer_status)]), sig),
            ),
        )
        .to_sexpr()
        .into_bytes()
    }

    fn decode_identity(&self, bytes: &[u8]) -> Option<IdentityPayload<Self>> {
        let t = Term::parse_sexpr(core::str::from_utf8(bytes).ok()?).ok()?;
        let Term::Pair(id, rest) = t else { return None };
        let Term::Pair(nonce, rest) = *rest else { return None };
        let Term::Pair(status, sig) = *rest else { return None };
        let Term::Data(status) = *status else { return None };
        let [status] = status[..] else { return None };
        let signature = match *sig {
            Term::Data(ref d) if d.is_empty() => None,
            s => Some(s),
        };
        Some(IdentityPayload {
            user_id: parse_id_atom(&id)?,
            fresh_nonce: *nonce,
            signature,
            peer_status: SigStatus::from_byte(status)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::Role;
    use crate::term::{derivable, Knowledge, DEFAULT_DEPTH_BOUND};
    use rand_chacha::ChaCha20Rng;
    use rand_core::SeedableRng;

    fn rng() -> ChaCha20Rng {
        ChaCha20Rng::from_seed([5; 32])
    }

    #[test]
    fn keypairs_fresh_and_deterministic() {
        let mut r = rng();
        let (_, a) = Symbolic.gen_ephemeral_keypair(&mut r);
        let (_, b) = Symbolic.gen_ephemeral_keypair(&mut r);
        assert_ne!(a, b);
        assert_eq!(Symbolic.gen_ephemeral_keypair(&mut rng()).1, a);
    }

    #[test]
    fn dh_commutes_canonically() {
        let mut r = rng();
        let (a, ga) = Symbolic.gen_ephemeral_keypair(&mut r);
        let (b, gb) = Symbolic.gen_ephemeral_keypair(&mut r);
        assert_eq!(Symbolic.dh_shared(&a, &gb).unwrap(), Symbolic.dh_shared(&b, &ga).unwrap());
        assert_eq!(Symbolic.dh_shared(&a, &a), Err(CryptoError::InvalidShare));
        assert_eq!(
            Symbolic.dh_shared(&a, &Term::exp(Term::data([1]))),
            Err(CryptoError::LowOrderShare)
        );
    }

    #[test]
    fn aead_contract() {
        let k = Term::atom("k1");
        let n = SeqNonce::new(Role::Initiator, 0);
        let ct = Symbolic.aead_seal(&k, n, b"aad", b"raw bytes");
        assert_eq!(Symbolic.aead_open(&k, n, b"aad", &ct).unwrap(), b"raw bytes");
        assert_eq!(Symbolic.aead_open(&Term::atom("k2"), n, b"aad", &ct), Err(AuthFailure));
        assert_eq!(Symbolic.aead_open(&k, n, b"aaD", &ct), Err(AuthFailure));
        assert_eq!(Symbolic.aead_open(&k, SeqNonce::new(Role::Responder, 0), b"aad", &ct), Err(AuthFailure));

        let inner = Term::pair(Term::atom("secret"), Term::data([1, 2]));
        let ct = Symbolic.aead_seal(&k, n, b"", inner.to_sexpr().as_bytes());
        assert_eq!(Symbolic.aead_open(&k, n, b"", &ct).unwrap(), inner.to_sexpr().into_bytes());
        let view: Knowledge = [ct.clone()].into_iter().collect();
        assert!(!derivable(&Term::atom("secret"), &view, DEFAULT_DEPTH_BOUND));
        let view: Knowledge = [ct, k].into_iter().collect();
        assert!(derivable(&Term::atom("secret"), &view, DEFAULT_DEPTH_BOUND));
    }

    #[test]
    fn signature_contract() {
        let mut r = rng();
        let (ska, vka) = Symbolic.gen_signing_keypair(&mut r);
        let (_, vkb) = Symbolic.gen_signing_keypair(&mut r);
        let d = Symbolic.hash(b"td");
        let s = Symbolic.sign_transcript(&ska, &d);
        assert!(Symbolic.verify_signature(&vka, &d, &s));
        assert!(!Symbolic.verify_signature(&vkb, &d, &s));
        assert!(!Symbolic.verify_signature(&vka, &Symbolic.hash(b"tD"), &s));
        assert!(!Symbolic.verify_signature(&vka, &d, &Term::data([0; 4])));
    }

    #[test]
    fn hash_contract() {
        assert_eq!(Symbolic.hash(b"x"), Symbolic.hash(b"x"));
        assert_ne!(Symbolic.hash(b"x"), Symbolic.hash(b"x\0"));
    }

    #[test]
    fn wire_round_trip() {
        let t = Term::pair(Term::atom("a"), Term::data([0xde, 0xad]));
        let bytes = t.to_wire();
        let mut input = &bytes[..];
        assert_eq!(Term::decode(&mut input).unwrap(), t);
        assert!(input.is_empty());
        assert!(Term::decode(&mut &bytes[..bytes.len() - 1]).is_err());
    }

    #[test]
    fn identity_round_trip() {
        let mut r = rng();
        let (sk, _) = Symbolic.gen_signing_keypair(&mut r);
        for signature in [None, Some(Symbolic.sign_transcript(&sk, &Symbolic.hash(b"t")))] {
            let p = IdentityPayload::<Symbolic> {
                user_id: UserId([0xab; 16]),
                fresh_nonce: Symbolic.random_nonce(&mut r),
                signature,
                peer_status: Some(SigStatus::Valid),
            };
            let back = Symbolic.decode_identity(&Symbolic.encode_identity(&p)).unwrap();
            assert_eq!(back, p);
        }
    }
}
