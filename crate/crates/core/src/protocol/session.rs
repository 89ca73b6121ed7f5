//! One endpoint's protocol state machine.
//!
//! The machine is driven entirely by [`Session::step`]: it owns no clock
//! and performs no I/O. Frames, timer expiries and user decisions come in
//! as [`Event`]s; frames to send, timer requests and results go out as
//! [`Action`]s. All randomness comes from a seeded generator held in the
//! state, so replaying the same events reproduces the same outputs.
//!
//! Happy path (initiator on the left):
//!
//! ```text
//! RoleNonce            <->  RoleNonce
//! RoleNonce, Commit     ->
//!                      <-   KeyShareR
//! KeyShareI, EncIdI     ->
//!                      <-   EncIdR
//! SasCtl(Confirm)       ->
//! ```
//!
//! Each side then enters `SasPending` when the comparison is mandatory and
//! enforced, and `Secured` otherwise.

use alloc::vec::Vec;

use rand_chacha::ChaCha20Rng;
use rand_core::RngCore;

use super::identity::{build_identity_block, open_identity_block, signature_digest};
use super::message::{canonical_entry, decode_frame, encode_frame, make_commitment, ControlMsg, Message, Tag};
use super::{auth_policy, negotiate_role, AbortCode, IdentityPayload, Negotiation, Role, SigStatus, UserId};
use crate::cards::CardStore;
use crate::crypto::{SealLedger, SeqNonce, Suite};
use crate::sas::{SasObligation, SasValue, VerificationOutcome};
use crate::schedule::{derive_schedule, transcript_digest, KeySchedule, Transcript};

/// Retries allowed per phase before giving up.
pub const R_MAX: u32 = 5;
/// Retransmission timeout in simulator ticks (one tick is a millisecond).
pub const TIMEOUT_TICKS: u64 = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub enum Phase {
    Idle,
    Negotiating,
    AwaitCommitOrShare,
    AwaitShare,
    AwaitEncId,
    /// Responder has sent its identity block and waits for key confirmation.
    AwaitConfirm,
    SasPending,
    Secured,
    Aborted,
}

/// Whether a mandatory SAS comparison is enforced before the session key is
/// released. `Waive` models users who skip authentication altogether.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SasPolicy {
    Enforce,
    Waive,
}

/// How the role nonce is drawn. Fixed extremes let a test or an attacker
/// force the outcome of negotiation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoleNonceStrategy {
    Random,
    Highest,
    Lowest,
}

#[derive(Debug, Clone)]
pub struct SessionConfig<S: Suite> {
    pub user_id: UserId,
    pub signing_key: Option<S::SigningKey>,
    pub sas_policy: SasPolicy,
    /// Responder checks the opening of the initiator's commitment.
    pub verify_commitment: bool,
    pub role_nonce: RoleNonceStrategy,
    pub r_max: u32,
    pub timeout_ticks: u64,
}

impl<S: Suite> SessionConfig<S> {
    pub fn new(user_id: UserId, signing_key: Option<S::SigningKey>) -> Self {
        SessionConfig {
            user_id,
            signing_key,
            sas_policy: SasPolicy::Enforce,
            verify_commitment: true,
            role_nonce: RoleNonceStrategy::Random,
            r_max: R_MAX,
            timeout_ticks: TIMEOUT_TICKS,
        }
    }
}

/// Serializes for event logs; frame bytes as hex.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Event {
    Start,
    /// Raw bytes from the data channel; corrupt frames are dropped.
    FrameIn(#[serde(with = "hex::serde")] Vec<u8>),
    Timeout,
    /// The local user asks for a vocal comparison.
    UserSasRequest,
    UserSasResult(VerificationOutcome),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action<S: Suite> {
    SendFrame(Vec<u8>),
    /// (Re)arm the single retransmission timer.
    StartTimer(u64),
    StopTimer,
    /// Display the SAS for vocal comparison.
    EmitSas(SasValue),
    EmitSessionKey(S::Key),
    /// `remote` is set when the peer's abort frame caused it.
    EmitAbort { code: AbortCode, remote: bool },
}

/// A completed session's view of who it talked to, for agreement checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Claim<S: Suite> {
    pub role: Role,
    pub own_id: UserId,
    pub peer_id: UserId,
    pub session_key: S::Key,
    /// (initiator's identity nonce, responder's identity nonce)
    pub nonces: (S::Nonce, S::Nonce),
}

enum Handled {
    Done,
    OutOfPhase,
}

#[derive(Debug, Clone)]
struct Peer<S: Suite> {
    id: UserId,
    nonce: S::Nonce,
    /// Our verdict on the peer's signature.
    status: SigStatus,
}

#[derive(Debug, Clone)]
pub struct Session<S: Suite> {
    suite: S,
    cfg: SessionConfig<S>,
    rng: ChaCha20Rng,
    phase: Phase,
    role: Option<Role>,
    role_nonce: u64,
    sid_candidate: u32,
    sid: Option<u32>,
    identity_nonce: Option<S::Nonce>,
    eph: Option<(S::Scalar, S::Share)>,
    salt: Option<S::Nonce>,
    commitment: Option<S::Digest>,
    transcript: Transcript,
    td: Option<S::Digest>,
    schedule: Option<KeySchedule<S>>,
    peer: Option<Peer<S>>,
    peer_view: Option<SigStatus>,
    obligation: Option<SasObligation>,
    flight: Vec<(Message<S>, u32)>,
    flight_rc: u8,
    received: Vec<Vec<u8>>,
    retries: u32,
    ledger: SealLedger<S::Key>,
    ctl_sent: u64,
    ctl_expected: u64,
    /// Unprompted repeats of the final Confirm still to send.
    lingering: u32,
    abort: Option<(AbortCode, bool)>,
}

impl<S: Suite> Session<S> {
    pub fn new(suite: S, cfg: SessionConfig<S>, rng: ChaCha20Rng) -> Self {
        Session {
            suite,
            cfg,
            rng,
            phase: Phase::Idle,
            role: None,
            role_nonce: 0,
            sid_candidate: 0,
            sid: None,
            identity_nonce: None,
            eph: None,
            salt: None,
            commitment: None,
            transcript: Transcript::new(),
            td: None,
            schedule: None,
            peer: None,
            peer_view: None,
            obligation: None,
            flight: Vec::new(),
            flight_rc: 0,
            received: Vec::new(),
            retries: 0,
            ledger: SealLedger::default(),
            ctl_sent: 0,
            ctl_expected: 0,
            lingering: 0,
            abort: None,
        }
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn role(&self) -> Option<Role> {
        self.role
    }

    pub fn config(&self) -> &SessionConfig<S> {
        &self.cfg
    }

    pub fn session_id(&self) -> Option<u32> {
        self.sid
    }

    pub fn retries(&self) -> u32 {
        self.retries
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn transcript_digest(&self) -> Option<&S::Digest> {
        self.td.as_ref()
    }

    pub fn schedule(&self) -> Option<&KeySchedule<S>> {
        self.schedule.as_ref()
    }

    pub fn sas(&self) -> Option<SasValue> {
        self.schedule.as_ref().map(|k| k.sas)
    }

    pub fn obligation(&self) -> Option<SasObligation> {
        self.obligation
    }

    pub fn peer_id(&self) -> Option<UserId> {
        self.peer.as_ref().map(|p| p.id)
    }

    /// Our verdict on the peer's signature, once its block is open.
    pub fn peer_sig_status(&self) -> Option<SigStatus> {
        self.peer.as_ref().map(|p| p.status)
    }

    pub fn abort_reason(&self) -> Option<(AbortCode, bool)> {
        self.abort
    }

    /// Present only in `Secured`.
    pub fn session_key(&self) -> Option<&S::Key> {
        match self.phase {
            Phase::Secured => self.schedule.as_ref().map(|k| &k.session_key),
            _ => None,
        }
    }

    pub fn claim(&self) -> Option<Claim<S>> {
        let key = self.session_key()?.clone();
        let peer = self.peer.as_ref()?;
        let own = self.identity_nonce.clone()?;
        let role = self.role?;
        let nonces = match role {
            Role::Initiator => (own, peer.nonce.clone()),
            Role::Responder => (peer.nonce.clone(), own),
        };
        Some(Claim { role, own_id: self.cfg.user_id, peer_id: peer.id, session_key: key, nonces })
    }

    /// The SAS this initiator would show against the responder's
    /// `KeyShareR` had it drawn each of `salts` instead of its own salt,
    /// without changing state. `None` unless an initiator waiting for a
    /// share, or on bad input.
    pub fn preview_salts(&self, key_share_r: &Message<S>, salts: &[S::Nonce]) -> Option<Vec<SasValue>> {
        if self.phase != Phase::AwaitShare || self.role != Some(Role::Initiator) {
            return None;
        }
        let Message::KeyShareR { share: peer_share, .. } = key_share_r else { return None };
        let sid = self.sid?;
        let (secret, share) = self.eph.as_ref()?;
        let z = self.suite.dh_shared(secret, peer_share).ok()?;
        let mut base = self.transcript.clone();
        base.push(canonical_entry(key_share_r, sid));
        let sas = salts
            .iter()
            .map(|salt| {
                let mut t = base.clone();
                t.push(canonical_entry(&Message::<S>::KeyShareI { share: share.clone(), salt: salt.clone() }, sid));
                self.suite.derive_sas(&z, &transcript_digest(&self.suite, &t))
            })
            .collect();
        Some(sas)
    }

    /// Replaces the initiator's salt before it is revealed. The commitment
    /// already sent is left unchanged. Returns false outside `AwaitShare`
    /// as initiator.
    pub fn override_salt(&mut self, salt: S::Nonce) -> bool {
        if self.phase != Phase::AwaitShare || self.role != Some(Role::Initiator) {
            return false;
        }
        self.salt = Some(salt);
        true
    }

    pub fn step(&mut self, event: Event, cards: &CardStore<S::VerificationKey>) -> Vec<Action<S>> {
        let mut out = Vec::new();
        match event {
            Event::Start => self.on_start(&mut out),
            Event::FrameIn(bytes) => self.on_frame(&bytes, cards, &mut out),
            Event::Timeout => self.on_timeout(&mut out),
            Event::UserSasRequest => self.on_sas_request(&mut out),
            Event::UserSasResult(outcome) => self.on_sas_result(outcome, &mut out),
        }
        out
    }

    fn draw_role_nonce(&mut self) {
        let r = self.rng.next_u64();
        self.role_nonce = match self.cfg.role_nonce {
            RoleNonceStrategy::Random => r,
            RoleNonceStrategy::Highest => u64::MAX,
            RoleNonceStrategy::Lowest => 0,
        };
        self.sid_candidate = self.rng.next_u32();
    }

    fn on_start(&mut self, out: &mut Vec<Action<S>>) {
        if self.phase != Phase::Idle {
            return;
        }
        self.draw_role_nonce();
        self.identity_nonce = Some(self.suite.random_nonce(&mut self.rng));
        self.phase = Phase::Negotiating;
        let flight = alloc::vec![(Message::RoleNonce { r: self.role_nonce }, self.sid_candidate)];
        self.send_new_flight(flight, out);
    }

    fn send_new_flight(&mut self, flight: Vec<(Message<S>, u32)>, out: &mut Vec<Action<S>>) {
        self.flight = flight;
        self.flight_rc = 0;
        self.retries = 0;
        self.emit_flight(out);
        out.push(Action::StartTimer(self.cfg.timeout_ticks));
    }

    fn emit_flight(&self, out: &mut Vec<Action<S>>) {
        for (m, sid) in &self.flight {
            out.push(Action::SendFrame(encode_frame(m, *sid, self.flight_rc)));
        }
    }

    fn resend_flight(&mut self, out: &mut Vec<Action<S>>) {
        self.flight_rc = self.flight_rc.saturating_add(1);
        self.emit_flight(out);
    }

    /// Counts a failed attempt in the current phase. Returns false if the
    /// session aborted.
    fn bump_retry(&mut self, out: &mut Vec<Action<S>>) -> bool {
        self.retries += 1;
        if self.retries > self.cfg.r_max {
            self.retries = self.cfg.r_max;
            self.fail(AbortCode::RetryExhausted, out);
            false
        } else {
            true
        }
    }

    fn fail(&mut self, code: AbortCode, out: &mut Vec<Action<S>>) {
        let sid = self.sid.unwrap_or(self.sid_candidate);
        out.push(Action::SendFrame(encode_frame(&Message::<S>::Abort { code }, sid, 0)));
        self.enter_aborted(code, false, out);
    }

    fn enter_aborted(&mut self, code: AbortCode, remote: bool, out: &mut Vec<Action<S>>) {
        self.phase = Phase::Aborted;
        self.abort = Some((code, remote));
        self.flight.clear();
        self.eph = None;
        out.push(Action::StopTimer);
        out.push(Action::EmitAbort { code, remote });
    }

    fn on_timeout(&mut self, out: &mut Vec<Action<S>>) {
        match self.phase {
            Phase::Negotiating
            | Phase::AwaitCommitOrShare
            | Phase::AwaitShare
            | Phase::AwaitEncId
            | Phase::AwaitConfirm => {
                if self.bump_retry(out) {
                    self.resend_flight(out);
                    out.push(Action::StartTimer(self.cfg.timeout_ticks));
                }
            }
            Phase::SasPending | Phase::Secured if self.lingering > 0 => {
                self.lingering -= 1;
                self.resend_flight(out);
                if self.lingering > 0 {
                    out.push(Action::StartTimer(self.cfg.timeout_ticks));
                }
            }
            _ => {}
        }
    }

    /// Whether a duplicate of the last received message means the peer
    /// missed our response. Only true where our flight answers the peer's
    /// complete flight.
    fn answers_duplicates(&self) -> bool {
        match (self.role, self.phase) {
            (Some(Role::Responder), Phase::AwaitShare | Phase::AwaitConfirm) => true,
            (Some(Role::Initiator), Phase::AwaitEncId | Phase::SasPending | Phase::Secured) => true,
            _ => false,
        }
    }

    fn on_frame(&mut self, bytes: &[u8], cards: &CardStore<S::VerificationKey>, out: &mut Vec<Action<S>>) {
        if matches!(self.phase, Phase::Idle | Phase::Aborted) {
            return;
        }
        let Ok(frame) = decode_frame::<S>(bytes) else { return };

        if self.phase == Phase::Negotiating {
            if let Message::RoleNonce { r } = frame.message {
                self.negotiate(r, frame.session_id, out);
            }
            return;
        }

        // Role nonces are settled; their retransmissions carry no news.
        if frame.message.tag() == Tag::RoleNonce || Some(frame.session_id) != self.sid {
            return;
        }
        if let Message::Abort { code } = frame.message {
            if self.phase != Phase::Secured {
                self.enter_aborted(code, true, out);
            }
            return;
        }

        let canon = frame.canonical();
        if let Some(pos) = self.received.iter().position(|r| *r == canon) {
            if pos + 1 == self.received.len() && self.answers_duplicates() {
                self.resend_flight(out);
            }
            return;
        }

        let result = match (self.role, self.phase, &frame.message) {
            (Some(Role::Responder), Phase::AwaitCommitOrShare, Message::Commit { c }) => {
                self.on_commit(c.clone(), &canon, out)
            }
            (Some(Role::Initiator), Phase::AwaitShare, Message::KeyShareR { share, .. }) => {
                self.on_key_share_r(share.clone(), &canon, out)
            }
            (Some(Role::Responder), Phase::AwaitShare, Message::KeyShareI { share, salt }) => {
                self.on_key_share_i(share.clone(), salt.clone(), &canon, out)
            }
            (Some(Role::Responder), Phase::AwaitEncId, Message::EncIdI { ct }) => {
                self.on_enc_id(Role::Initiator, ct.clone(), &canon, cards, out)
            }
            (Some(Role::Initiator), Phase::AwaitEncId, Message::EncIdR { ct }) => {
                self.on_enc_id(Role::Responder, ct.clone(), &canon, cards, out)
            }
            (Some(_), Phase::AwaitConfirm | Phase::SasPending | Phase::Secured, Message::SasCtl { ct }) => {
                self.on_control(ct.clone(), &canon, out)
            }
            _ => Handled::OutOfPhase,
        };
        if let Handled::OutOfPhase = result {
            self.bump_retry(out);
        }
    }

    fn negotiate(&mut self, remote: u64, remote_sid: u32, out: &mut Vec<Action<S>>) {
        match negotiate_role(self.role_nonce, remote) {
            Negotiation::Retry => {
                if self.bump_retry(out) {
                    self.draw_role_nonce();
                    let flight = alloc::vec![(Message::RoleNonce { r: self.role_nonce }, self.sid_candidate)];
                    let retries = self.retries;
                    self.send_new_flight(flight, out);
                    self.retries = retries;
                }
            }
            Negotiation::Decided(role) => {
                self.role = Some(role);
                let own = (Message::<S>::RoleNonce { r: self.role_nonce }, self.sid_candidate);
                let theirs = (Message::<S>::RoleNonce { r: remote }, remote_sid);
                let (first, second) = match role {
                    Role::Initiator => (&own, &theirs),
                    Role::Responder => (&theirs, &own),
                };
                self.transcript.push(canonical_entry(&first.0, first.1));
                self.transcript.push(canonical_entry(&second.0, second.1));
                self.received.push(canonical_entry(&theirs.0, theirs.1));
                match role {
                    Role::Initiator => {
                        let sid = self.sid_candidate;
                        self.sid = Some(sid);
                        let (secret, share) = self.suite.gen_ephemeral_keypair(&mut self.rng);
                        let salt = self.suite.random_nonce(&mut self.rng);
                        let c = make_commitment(&self.suite, &share, &salt);
                        self.eph = Some((secret, share));
                        self.salt = Some(salt);
                        let commit = Message::Commit { c };
                        self.transcript.push(canonical_entry(&commit, sid));
                        self.phase = Phase::AwaitShare;
                        self.send_new_flight(alloc::vec![own, (commit, sid)], out);
                    }
                    Role::Responder => {
                        self.sid = Some(remote_sid);
                        self.phase = Phase::AwaitCommitOrShare;
                        self.send_new_flight(alloc::vec![own], out);
                    }
                }
            }
        }
    }

    fn on_commit(&mut self, c: S::Digest, canon: &[u8], out: &mut Vec<Action<S>>) -> Handled {
        let sid = self.sid.expect("negotiated");
        self.received.push(canon.to_vec());
        self.transcript.push(canon.to_vec());
        self.commitment = Some(c);
        let (secret, share) = self.suite.gen_ephemeral_keypair(&mut self.rng);
        let salt = self.suite.random_nonce(&mut self.rng);
        let ksr = Message::KeyShareR { share: share.clone(), salt: salt.clone() };
        self.transcript.push(canonical_entry(&ksr, sid));
        self.eph = Some((secret, share));
        self.salt = Some(salt);
        self.phase = Phase::AwaitShare;
        self.send_new_flight(alloc::vec![(ksr, sid)], out);
        Handled::Done
    }

    fn on_key_share_r(&mut self, peer_share: S::Share, canon: &[u8], out: &mut Vec<Action<S>>) -> Handled {
        let sid = self.sid.expect("negotiated");
        let (secret, share) = self.eph.take().expect("initiator holds its share");
        let salt = self.salt.clone().expect("drawn with the share");
        let z = match self.suite.dh_shared(&secret, &peer_share) {
            Ok(z) => z,
            Err(_) => {
                self.fail(AbortCode::AuthFail, out);
                return Handled::Done;
            }
        };
        drop(secret);
        self.received.push(canon.to_vec());
        self.transcript.push(canon.to_vec());
        let ksi = Message::KeyShareI { share, salt };
        self.transcript.push(canonical_entry(&ksi, sid));
        self.derive(&z);
        let block = match self.own_identity_block(Role::Initiator, None) {
            Ok(b) => b,
            Err(_) => return Handled::Done,
        };
        self.phase = Phase::AwaitEncId;
        self.send_new_flight(alloc::vec![(ksi, sid), (block, sid)], out);
        Handled::Done
    }

    fn on_key_share_i(&mut self, peer_share: S::Share, salt: S::Nonce, canon: &[u8], out: &mut Vec<Action<S>>) -> Handled {
        if self.cfg.verify_commitment {
            let expected = make_commitment(&self.suite, &peer_share, &salt);
            if Some(&expected) != self.commitment.as_ref() {
                self.fail(AbortCode::CommitMismatch, out);
                return Handled::Done;
            }
        }
        let (secret, _) = self.eph.take().expect("responder holds its share");
        let z = match self.suite.dh_shared(&secret, &peer_share) {
            Ok(z) => z,
            Err(_) => {
                self.fail(AbortCode::AuthFail, out);
                return Handled::Done;
            }
        };
        drop(secret);
        self.received.push(canon.to_vec());
        self.transcript.push(canon.to_vec());
        self.derive(&z);
        self.phase = Phase::AwaitEncId;
        self.retries = 0;
        out.push(Action::StartTimer(self.cfg.timeout_ticks));
        Handled::Done
    }

    fn derive(&mut self, z: &S::Shared) {
        let td = transcript_digest(&self.suite, &self.transcript);
        self.schedule = Some(derive_schedule(&self.suite, z, &td));
        self.td = Some(td);
    }

    fn own_identity_block(&mut self, role: Role, peer_status: Option<SigStatus>) -> Result<Message<S>, ()> {
        let td = self.td.as_ref().expect("derived");
        let signature = self.cfg.signing_key.as_ref().map(|sk| {
            let digest = signature_digest(&self.suite, role, td, &self.cfg.user_id);
            self.suite.sign_transcript(sk, &digest)
        });
        let payload = IdentityPayload {
            user_id: self.cfg.user_id,
            fresh_nonce: self.identity_nonce.clone().expect("drawn at start"),
            signature,
            peer_status,
        };
        let schedule = self.schedule.as_ref().expect("derived");
        build_identity_block(&self.suite, schedule, role, &payload, self.sid.expect("negotiated"), &mut self.ledger)
            .map_err(|_| ())
    }

    fn on_enc_id(
        &mut self,
        sender: Role,
        ct: S::Ciphertext,
        canon: &[u8],
        cards: &CardStore<S::VerificationKey>,
        out: &mut Vec<Action<S>>,
    ) -> Handled {
        let sid = self.sid.expect("negotiated");
        let opened = open_identity_block(
            &self.suite,
            self.schedule.as_ref().expect("derived"),
            sender,
            &ct,
            sid,
            self.td.as_ref().expect("derived"),
            cards,
        );
        let Ok(opened) = opened else {
            // Tampering or corruption that slipped past the checksum.
            return Handled::OutOfPhase;
        };
        if sender == Role::Responder && opened.peer_view.is_none() {
            return Handled::OutOfPhase;
        }
        self.received.push(canon.to_vec());
        if opened.sig_status == SigStatus::Invalid {
            self.fail(AbortCode::SigInvalid, out);
            return Handled::Done;
        }
        let status = opened.sig_status;
        self.peer = Some(Peer { id: opened.peer_id, nonce: opened.peer_nonce, status });
        match sender {
            Role::Initiator => {
                let Ok(block) = self.own_identity_block(Role::Responder, Some(status)) else { return Handled::Done };
                self.phase = Phase::AwaitConfirm;
                self.send_new_flight(alloc::vec![(block, sid)], out);
            }
            Role::Responder => {
                self.peer_view = opened.peer_view;
                let Some(confirm) = self.seal_control(ControlMsg::Confirm(status)) else { return Handled::Done };
                self.flight = alloc::vec![(confirm, sid)];
                self.flight_rc = 0;
                self.emit_flight(out);
                self.finish(out);
                // Nothing acknowledges the Confirm, so repeat it a few times
                // rather than rely on the responder's retransmissions alone.
                self.lingering = self.cfg.r_max;
                out.push(Action::StartTimer(self.cfg.timeout_ticks));
            }
        }
        Handled::Done
    }

    fn seal_control(&mut self, msg: ControlMsg) -> Option<Message<S>> {
        let role = self.role?;
        let k3 = &self.schedule.as_ref()?.k3;
        let nonce = SeqNonce::new(role, self.ctl_sent);
        let ct = self
            .ledger
            .seal(&self.suite, k3, nonce, &control_aad(self.sid?), &msg.to_bytes())
            .ok()?;
        self.ctl_sent += 1;
        Some(Message::SasCtl { ct })
    }

    fn on_control(&mut self, ct: S::Ciphertext, canon: &[u8], out: &mut Vec<Action<S>>) -> Handled {
        let role = self.role.expect("negotiated");
        let k3 = &self.schedule.as_ref().expect("derived").k3;
        let nonce = SeqNonce::new(role.peer(), self.ctl_expected);
        let Ok(pt) = self.suite.aead_open(k3, nonce, &control_aad(self.sid.expect("negotiated")), &ct) else {
            return Handled::OutOfPhase;
        };
        let Some(msg) = ControlMsg::from_bytes(&pt) else { return Handled::OutOfPhase };
        match (self.phase, msg) {
            (Phase::AwaitConfirm, ControlMsg::Confirm(view)) => {
                self.received.push(canon.to_vec());
                self.ctl_expected += 1;
                self.peer_view = Some(view);
                self.flight.clear();
                self.finish(out);
                Handled::Done
            }
            (Phase::SasPending | Phase::Secured, ControlMsg::SasRequest) => {
                self.received.push(canon.to_vec());
                self.ctl_expected += 1;
                out.push(Action::EmitSas(self.sas().expect("derived")));
                Handled::Done
            }
            _ => Handled::OutOfPhase,
        }
    }

    /// Both signature verdicts are known: apply the SAS policy.
    fn finish(&mut self, out: &mut Vec<Action<S>>) {
        let local = self.peer.as_ref().expect("peer known").status;
        let view = self.peer_view.expect("peer verdict known");
        let obligation = auth_policy(local, view);
        self.obligation = Some(obligation);
        self.retries = 0;
        out.push(Action::StopTimer);
        if obligation == SasObligation::Mandatory && self.cfg.sas_policy == SasPolicy::Enforce {
            self.phase = Phase::SasPending;
            out.push(Action::EmitSas(self.sas().expect("derived")));
        } else {
            self.secure(out);
        }
    }

    fn secure(&mut self, out: &mut Vec<Action<S>>) {
        self.phase = Phase::Secured;
        let key = self.schedule.as_ref().expect("derived").session_key.clone();
        out.push(Action::EmitSessionKey(key));
    }

    fn on_sas_request(&mut self, out: &mut Vec<Action<S>>) {
        if !matches!(self.phase, Phase::SasPending | Phase::Secured) {
            return;
        }
        out.push(Action::EmitSas(self.sas().expect("derived")));
        if let (Some(m), Some(sid)) = (self.seal_control(ControlMsg::SasRequest), self.sid) {
            out.push(Action::SendFrame(encode_frame(&m, sid, 0)));
        }
    }

    fn on_sas_result(&mut self, outcome: VerificationOutcome, out: &mut Vec<Action<S>>) {
        if !matches!(self.phase, Phase::SasPending | Phase::Secured) {
            return;
        }
        let mandatory = self.phase == Phase::SasPending;
        match outcome {
            VerificationOutcome::Match => {
                if mandatory {
                    self.secure(out);
                }
            }
            VerificationOutcome::Mismatch => self.fail(AbortCode::SasMismatch, out),
            VerificationOutcome::Skipped => {
                if mandatory {
                    self.fail(AbortCode::PolicyViolation, out);
                }
            }
        }
    }
}

fn control_aad(sid: u32) -> [u8; 5] {
    let s = sid.to_be_bytes();
    [Tag::SasCtl as u8, s[0], s[1], s[2], s[3]]
}
