use alloc::vec::Vec;
use core::marker::PhantomData;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use super::{
    check_injective_agreement, AdversaryAction, AttackerModel, AttackerView, Compromise, ConfigError, Scenario,
    ScenarioConfig, ScenarioReport, TrialRecord, When,
};
use crate::cards::CardStore;
use crate::channel::{ChannelConfig, VoiceAuthChannel};
use crate::crypto::{Concrete, Suite};
use crate::protocol::{
    decode_frame, AbortCode, Claim, Event, Message, Phase, Role, RoleNonceStrategy, SasPolicy, Session, SessionConfig,
    UserId,
};
use crate::sas::{vocal_compare, SasObligation, SasValue, VerificationOutcome};
use crate::sim::{Delivery, Duplex, Endpoint, Passive, Tamper, WireRecord};

const TICK_LIMIT: u64 = 10_000_000;

fn alice() -> UserId {
    UserId::from_name("alice")
}

fn bob() -> UserId {
    UserId::from_name("bob")
}

/// Runs every trial of a scenario in the given backend.
pub fn run_scenario<S: AttackerModel>(suite: &S, cfg: &ScenarioConfig) -> Result<ScenarioReport, ConfigError> {
    cfg.validate()?;
    let trials = (0..cfg.trials).map(|i| run_trial(suite, cfg, i)).collect();
    Ok(ScenarioReport::from_trials(cfg.clone(), S::MODE, trials))
}

/// One trial: an honest session followed by the scripted one. Trials are
/// independent; trial `i` depends only on `cfg` and `i`.
pub fn run_trial<S: AttackerModel>(suite: &S, cfg: &ScenarioConfig, index: u32) -> TrialRecord {
    Trial::new(suite, cfg, index).run(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrindReport {
    pub attempts: u32,
    pub commitment: bool,
    pub trials: u32,
    /// Trials in which Alice and Bob both accepted keys the attacker holds.
    pub successes: u32,
}

impl GrindReport {
    pub fn rate(&self) -> f64 {
        f64::from(self.successes) / f64::from(self.trials)
    }
}

/// SAS grinding in scenario (c), concrete backend. The persona facing Bob
/// is forced to initiate, learns Alice's SAS first, then tries `attempts`
/// fresh salts against Bob's key share. Only the scripted session runs.
pub fn grind_sas(attempts: u32, trials: u32, seed: u64, commitment: bool) -> GrindReport {
    let mut cfg = ScenarioConfig::new(Scenario::C)
        .with_script(alloc::vec![AdversaryAction::MitmDh, AdversaryAction::GrindSas(attempts)]);
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.commitment = commitment;
    let successes = (0..trials)
        .filter(|&i| {
            let r = Trial::new(&Concrete, &cfg, i).run(false);
            r.completed && r.exposed == [true, true]
        })
        .count() as u32;
    GrindReport { attempts, commitment, trials, successes }
}

struct Trial<'a, S: AttackerModel> {
    suite: &'a S,
    cfg: &'a ScenarioConfig,
    index: u32,
    rng: ChaCha20Rng,
    keys: [(S::SigningKey, S::VerificationKey); 2],
    view: AttackerView<S>,
    claims: Vec<Claim<S>>,
    honest_keys: Vec<S::Key>,
}

/// What an honest endpoint ended with.
struct Outcome<S: Suite> {
    phase: Phase,
    abort: Option<(AbortCode, bool)>,
    key: Option<S::Key>,
    sas: Option<SasValue>,
}

impl<'a, S: AttackerModel> Trial<'a, S> {
    fn new(suite: &'a S, cfg: &'a ScenarioConfig, index: u32) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
        rng.set_stream(u64::from(index));
        let ka = suite.gen_signing_keypair(&mut rng);
        let kb = suite.gen_signing_keypair(&mut rng);
        let (sk_m, _) = suite.gen_signing_keypair(&mut rng);
        let mut view = AttackerView::default();
        view.signing_keys.push(sk_m);
        if cfg.adversary_script.contains(&AdversaryAction::StealSigningKey(When::Before)) {
            view.signing_keys.extend([ka.0.clone(), kb.0.clone()]);
        }
        view.compromised_later = alloc::vec![ka.0.clone(), kb.0.clone()];
        Trial { suite, cfg, index, rng, keys: [ka, kb], view, claims: Vec::new(), honest_keys: Vec::new() }
    }

    fn channel(&mut self) -> ChannelConfig {
        ChannelConfig { seed: self.cfg.channel.seed ^ self.rng.next_u64(), ..self.cfg.channel }
    }

    /// Alice (0) or Bob (1) with the card the scenario gives them.
    fn honest(&mut self, who: usize) -> Endpoint<S> {
        let (a_has_b, b_has_a) = self.cfg.scenario.cards(self.cfg.mirror);
        let holds = if who == 0 { a_has_b } else { b_has_a };
        let mut cards = CardStore::new();
        if holds {
            cards.install(user(1 - who), self.keys[1 - who].1.clone());
        }
        let mut sc = SessionConfig::new(user(who), Some(self.keys[who].0.clone()));
        sc.sas_policy = self.cfg.scenario.sas_policy();
        sc.verify_commitment = self.cfg.commitment;
        let rng = ChaCha20Rng::from_rng(&mut self.rng).expect("infallible");
        Endpoint::new(Session::new(self.suite.clone(), sc, rng), cards)
    }

    /// An attacker persona impersonating `who` toward the other party. It
    /// holds both public cards and never compares a SAS.
    fn persona(&mut self, who: usize, strategy: RoleNonceStrategy) -> Endpoint<S> {
        let script = &self.cfg.adversary_script;
        let signing_key = if script.contains(&AdversaryAction::StripSignature) {
            None
        } else if script.contains(&AdversaryAction::StealSigningKey(When::Before)) {
            Some(self.keys[who].0.clone())
        } else {
            Some(self.view.signing_keys[0].clone())
        };
        let mut cards = CardStore::new();
        cards.install(alice(), self.keys[0].1.clone());
        cards.install(bob(), self.keys[1].1.clone());
        let mut sc = SessionConfig::new(user(who), signing_key);
        sc.sas_policy = SasPolicy::Waive;
        sc.role_nonce = strategy;
        let rng = ChaCha20Rng::from_rng(&mut self.rng).expect("infallible");
        Endpoint::new(Session::new(self.suite.clone(), sc, rng), cards)
    }

    fn run(mut self, with_baseline: bool) -> TrialRecord {
        let mut baseline_wire = Vec::new();
        if with_baseline {
            let (a, b) = (self.honest(0), self.honest(1));
            let ch = self.channel();
            let mut legs = [Duplex::new(a, b, ch)];
            start(&mut legs[0], &mut Passive);
            legs[0].run(&mut Passive, TICK_LIMIT);
            self.voice_phase(&mut legs, (0, 0), (0, 1));
            legs[0].run(&mut Passive, TICK_LIMIT);
            for i in 0..2 {
                self.collect(&legs[0].ends[i]);
            }
            baseline_wire = legs[0].wire.clone();
            self.view.frames.extend(baseline_wire.iter().map(|w| w.bytes.clone()));
        }

        let mut script = Script::new(&self.cfg.adversary_script);
        let (ends, mitm) = if self.cfg.mitm() {
            let a = self.honest(0);
            let p1 = self.persona(1, RoleNonceStrategy::Random);
            let ch = self.channel();
            let mut leg1 = Duplex::new(a, p1, ch);
            script.prime(&mut leg1, &baseline_wire);
            start(&mut leg1, &mut script);
            leg1.run(&mut script, TICK_LIMIT);

            let attempts = self.cfg.adversary_script.iter().find_map(|a| match a {
                AdversaryAction::GrindSas(n) => Some(*n),
                _ => None,
            });
            let strategy = if attempts.is_some() { RoleNonceStrategy::Highest } else { RoleNonceStrategy::Random };
            let p2 = self.persona(0, strategy);
            let b = self.honest(1);
            let ch = self.channel();
            let mut leg2 = Duplex::new(p2, b, ch);
            let target = match leg1.ends[0].session.phase() {
                Phase::SasPending => leg1.ends[0].session.sas(),
                _ => None,
            };
            let grind_rng = ChaCha20Rng::from_rng(&mut self.rng).expect("infallible");
            let mut grind = Grind::<S>::new(attempts, target, grind_rng);
            start(&mut leg2, &mut grind);
            leg2.run(&mut grind, TICK_LIMIT);

            let mut legs = [leg1, leg2];
            self.voice_phase(&mut legs, (0, 0), (1, 1));
            let [mut leg1, mut leg2] = legs;
            leg1.run(&mut script, TICK_LIMIT);
            leg2.run(&mut grind, TICK_LIMIT);

            for persona in [&leg1.ends[1], &leg2.ends[0]] {
                if let Some(ks) = persona.session.schedule() {
                    self.view.own_keys.extend([ks.k1.clone(), ks.k2.clone(), ks.k3.clone(), ks.session_key.clone()]);
                }
            }
            for leg in [&leg1, &leg2] {
                self.view.frames.extend(leg.wire.iter().map(|w| w.bytes.clone()));
            }
            let ends = [self.collect(&leg1.ends[0]), self.collect(&leg2.ends[1])];
            (ends, true)
        } else {
            let (a, b) = (self.honest(0), self.honest(1));
            let ch = self.channel();
            let mut legs = [Duplex::new(a, b, ch)];
            script.prime(&mut legs[0], &baseline_wire);
            start(&mut legs[0], &mut script);
            legs[0].run(&mut script, TICK_LIMIT);
            self.voice_phase(&mut legs, (0, 0), (0, 1));
            legs[0].run(&mut script, TICK_LIMIT);
            self.view.frames.extend(legs[0].wire.iter().map(|w| w.bytes.clone()));
            let ends = [self.collect(&legs[0].ends[0]), self.collect(&legs[0].ends[1])];
            (ends, false)
        };

        let known = self.suite.knows_keys(&self.view, Compromise::None, &self.honest_keys);
        let known_later = self.suite.knows_keys(&self.view, Compromise::PostSession, &self.honest_keys);
        let exposed = ends.each_ref().map(|o| {
            o.key.as_ref().is_some_and(|k| self.suite.knows_keys(&self.view, Compromise::None, core::slice::from_ref(k))[0])
        });
        TrialRecord {
            index: self.index,
            completed: ends.iter().all(|o| o.phase == Phase::Secured),
            phases: [ends[0].phase, ends[1].phase],
            detected_by: ends.iter().find_map(|o| match o.abort {
                Some((code, false)) => Some(code),
                _ => None,
            }),
            attacker_has_session_key: known.iter().any(|&k| k),
            exposed,
            forward_secrecy_holds: !known_later.iter().any(|&k| k),
            injective_agreement_holds: check_injective_agreement(&self.claims),
            sas_collision: mitm && ends[0].sas.is_some() && ends[0].sas == ends[1].sas,
            identity_leak: self.suite.eavesdropper_learns_id(&self.view.frames, &[alice(), bob()]),
        }
    }

    /// Records an honest endpoint's claim and key.
    fn collect(&mut self, e: &Endpoint<S>) -> Outcome<S> {
        if let Some(c) = e.session.claim() {
            self.claims.push(c);
        }
        let key = e.session.session_key().cloned();
        if let Some(k) = &key {
            self.honest_keys.push(k.clone());
        }
        Outcome { phase: e.session.phase(), abort: e.session.abort_reason(), key, sas: e.session.sas() }
    }

    /// Alice and Bob each read out their SAS if the comparison is pending,
    /// then judge what they heard from the other. The attacker overhears.
    fn voice_phase(&mut self, legs: &mut [Duplex<S>], alice_at: (usize, usize), bob_at: (usize, usize)) {
        let mut voice = VoiceAuthChannel::new();
        let parties = [(alice_at, alice(), bob()), (bob_at, bob(), alice())];
        for &((l, i), me, _) in &parties {
            let s = &legs[l].ends[i].session;
            if s.phase() == Phase::SasPending {
                voice.announce(me, s.sas().expect("derived"));
            }
        }
        for &((l, i), _, peer) in &parties {
            let s = &legs[l].ends[i].session;
            if s.phase() != Phase::SasPending {
                continue;
            }
            // A user who hears nothing from the peer treats it as a mismatch.
            let outcome = vocal_compare(s.sas().expect("derived"), voice.receive_from(peer), SasObligation::Mandatory)
                .unwrap_or(VerificationOutcome::Mismatch);
            legs[l].input(i, Event::UserSasResult(outcome), &mut Passive);
        }
        self.view.utterances.extend(voice.tap().iter().map(|u| u.sas));
    }
}

fn user(who: usize) -> UserId {
    if who == 0 {
        alice()
    } else {
        bob()
    }
}

fn start<S: Suite, T: Tamper<S>>(d: &mut Duplex<S>, t: &mut T) {
    d.input(0, Event::Start, t);
    d.input(1, Event::Start, t);
}

/// The frame-level part of a script.
struct Script {
    drops: Vec<usize>,
    masks: Vec<(usize, Vec<u8>)>,
    replays: Vec<usize>,
    injections: Vec<Vec<u8>>,
}

impl Script {
    fn new(actions: &[AdversaryAction]) -> Self {
        let mut s = Script { drops: Vec::new(), masks: Vec::new(), replays: Vec::new(), injections: Vec::new() };
        for a in actions {
            match a {
                AdversaryAction::Drop(n) => s.drops.push(*n),
                AdversaryAction::ModifyBits(n, mask) => s.masks.push((*n, mask.clone())),
                AdversaryAction::Replay(n) => s.replays.push(*n),
                AdversaryAction::InjectFrame(b) => s.injections.push(b.clone()),
                _ => {}
            }
        }
        s
    }

    /// Queues replays and injections before the session starts.
    fn prime<S: Suite>(&self, d: &mut Duplex<S>, baseline: &[WireRecord]) {
        for bytes in &self.injections {
            d.inject(0, 0, bytes.clone());
            d.inject(1, 0, bytes.clone());
        }
        for &n in &self.replays {
            if let Some(w) = baseline.get(n) {
                d.inject(1 - w.from, w.at, w.bytes.clone());
            }
        }
    }
}

impl<S: Suite> Tamper<S> for Script {
    fn on_send(&mut self, index: usize, _: usize, mut bytes: Vec<u8>) -> Vec<Vec<u8>> {
        if self.drops.contains(&index) {
            return Vec::new();
        }
        for (_, mask) in self.masks.iter().filter(|(n, _)| *n == index) {
            for (b, m) in bytes.iter_mut().zip(mask) {
                *b ^= m;
            }
        }
        alloc::vec![bytes]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GrindState {
    Waiting,
    Done,
    Abandoned,
}

/// Salt grinding on the persona that initiates toward Bob (endpoint 0).
struct Grind<S> {
    attempts: Option<u32>,
    target: Option<SasValue>,
    rng: ChaCha20Rng,
    state: GrindState,
    _suite: PhantomData<S>,
}

impl<S: Suite> Grind<S> {
    fn new(attempts: Option<u32>, target: Option<SasValue>, rng: ChaCha20Rng) -> Self {
        Grind { attempts, target, rng, state: GrindState::Waiting, _suite: PhantomData }
    }
}

impl<S: Suite> Tamper<S> for Grind<S> {
    fn on_send(&mut self, _: usize, _: usize, bytes: Vec<u8>) -> Vec<Vec<u8>> {
        match self.state {
            GrindState::Abandoned => Vec::new(),
            _ => alloc::vec![bytes],
        }
    }

    fn on_deliver(&mut self, to: usize, bytes: &[u8], ends: &mut [Endpoint<S>; 2]) -> Delivery {
        match self.state {
            GrindState::Abandoned => return Delivery::Discard,
            GrindState::Done => return Delivery::Deliver,
            GrindState::Waiting => {}
        }
        let Some(attempts) = self.attempts else { return Delivery::Deliver };
        let persona = &mut ends[0].session;
        if to != 0 || persona.phase() != Phase::AwaitShare || persona.role() != Some(Role::Initiator) {
            return Delivery::Deliver;
        }
        let Ok(frame) = decode_frame::<S>(bytes) else { return Delivery::Deliver };
        if !matches!(frame.message, Message::KeyShareR { .. }) {
            return Delivery::Deliver;
        }
        let suite = S::default();
        let salts: Vec<S::Nonce> = (0..attempts).map(|_| suite.random_nonce(&mut self.rng)).collect();
        let hit = match (self.target, persona.preview_salts(&frame.message, &salts)) {
            (Some(target), Some(sas)) => sas.iter().position(|&s| s == target),
            _ => None,
        };
        match hit {
            Some(i) => {
                persona.override_salt(salts[i].clone());
                self.state = GrindState::Done;
                Delivery::Deliver
            }
            None => {
                self.state = GrindState::Abandoned;
                Delivery::Discard
            }
        }
    }
}
