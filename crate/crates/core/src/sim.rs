//! Tick-driven simulation of two endpoints joined by a data channel.
//!
//! The simulator owns the clock. At each step it takes the earliest pending
//! event: frame deliveries first, in send order, then timer expiries. An
//! optional [`Tamper`] hook sees every frame on its way in and out, which
//! is where scripted attacks plug in.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;

use crate::cards::CardStore;
use crate::channel::{transmit, ChannelConfig};
use crate::crypto::Suite;
use crate::protocol::{AbortCode, Action, Event, Session};
use crate::sas::SasValue;

/// A session plus everything observed at its boundary.
#[derive(Debug, Clone)]
pub struct Endpoint<S: Suite> {
    pub session: Session<S>,
    pub cards: CardStore<S::VerificationKey>,
    /// Every input, with the tick it arrived at.
    pub events: Vec<(u64, Event)>,
    pub shown_sas: Vec<SasValue>,
    pub session_key: Option<S::Key>,
    pub abort: Option<(AbortCode, bool)>,
    timer: Option<u64>,
}

impl<S: Suite> Endpoint<S> {
    pub fn new(session: Session<S>, cards: CardStore<S::VerificationKey>) -> Self {
        Endpoint { session, cards, events: Vec::new(), shown_sas: Vec::new(), session_key: None, abort: None, timer: None }
    }

    pub fn timer(&self) -> Option<u64> {
        self.timer
    }

    /// Feeds one event and returns the frames to send. Other actions update
    /// the endpoint's record.
    pub fn handle(&mut self, now: u64, event: Event) -> Vec<Vec<u8>> {
        self.events.push((now, event.clone()));
        let mut frames = Vec::new();
        for action in self.session.step(event, &self.cards) {
            match action {
                Action::SendFrame(b) => frames.push(b),
                Action::StartTimer(t) => self.timer = Some(now + t),
                Action::StopTimer => self.timer = None,
                Action::EmitSas(s) => self.shown_sas.push(s),
                Action::EmitSessionKey(k) => self.session_key = Some(k),
                Action::EmitAbort { code, remote } => self.abort = Some((code, remote)),
            }
        }
        frames
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delivery {
    Deliver,
    Discard,
    /// Stop the simulation immediately.
    Halt,
}

/// Adversary hook. The defaults forward everything untouched.
pub trait Tamper<S: Suite> {
    /// A frame leaves endpoint `from`; `index` counts frames sent so far in
    /// this simulation. Returns what actually enters the channel.
    fn on_send(&mut self, _index: usize, _from: usize, bytes: Vec<u8>) -> Vec<Vec<u8>> {
        alloc::vec![bytes]
    }

    /// A frame is about to reach endpoint `to`.
    fn on_deliver(&mut self, _to: usize, _bytes: &[u8], _ends: &mut [Endpoint<S>; 2]) -> Delivery {
        Delivery::Deliver
    }
}

/// Forwards everything.
pub struct Passive;

impl<S: Suite> Tamper<S> for Passive {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WireRecord {
    pub at: u64,
    pub from: usize,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunEnd {
    /// No deliveries pending and no timers armed.
    Quiescent,
    Halted,
    TickLimit,
}

#[derive(Debug, Clone)]
pub struct Duplex<S: Suite> {
    pub ends: [Endpoint<S>; 2],
    /// Frames as the endpoints sent them, before tampering or noise.
    pub wire: Vec<WireRecord>,
    now: u64,
    seq: u64,
    queue: BTreeMap<(u64, u64), (usize, Vec<u8>)>,
    channel: ChannelConfig,
    rng: ChaCha20Rng,
}

impl<S: Suite> Duplex<S> {
    /// Channel randomness is seeded from `channel.seed`.
    pub fn new(a: Endpoint<S>, b: Endpoint<S>, channel: ChannelConfig) -> Self {
        Duplex {
            ends: [a, b],
            wire: Vec::new(),
            now: 0,
            seq: 0,
            queue: BTreeMap::new(),
            rng: ChaCha20Rng::seed_from_u64(channel.seed),
            channel,
        }
    }

    pub fn now(&self) -> u64 {
        self.now
    }

    /// Delivers `bytes` to `to` at tick `at`, bypassing the channel.
    pub fn inject(&mut self, to: usize, at: u64, bytes: Vec<u8>) {
        self.queue.insert((at.max(self.now), self.seq), (to, bytes));
        self.seq += 1;
    }

    /// Feeds an event to one endpoint now and routes its output.
    pub fn input<T: Tamper<S> + ?Sized>(&mut self, which: usize, event: Event, tamper: &mut T) {
        let frames = self.ends[which].handle(self.now, event);
        self.send(which, frames, tamper);
    }

    fn send<T: Tamper<S> + ?Sized>(&mut self, from: usize, frames: Vec<Vec<u8>>, tamper: &mut T) {
        for bytes in frames {
            let index = self.wire.len();
            self.wire.push(WireRecord { at: self.now, from, bytes: bytes.clone() });
            for out in tamper.on_send(index, from, bytes) {
                for (delay, copy) in transmit(&self.channel, &mut self.rng, &out) {
                    self.queue.insert((self.now + delay, self.seq), (1 - from, copy));
                    self.seq += 1;
                }
            }
        }
    }

    /// Runs until nothing is pending, the hook halts, or the clock would
    /// pass `until`.
    pub fn run<T: Tamper<S> + ?Sized>(&mut self, tamper: &mut T, until: u64) -> RunEnd {
        loop {
            let delivery = self.queue.keys().next().map(|k| k.0);
            let timer = self
                .ends
                .iter()
                .enumerate()
                .filter_map(|(i, e)| e.timer.map(|t| (t, i)))
                .min();
            let next_is_delivery = match (delivery, timer) {
                (None, None) => return RunEnd::Quiescent,
                (Some(d), Some((t, _))) => d <= t,
                (Some(_), None) => true,
                (None, Some(_)) => false,
            };
            let at = if next_is_delivery { delivery.unwrap() } else { timer.unwrap().0 };
            if at > until {
                return RunEnd::TickLimit;
            }
            self.now = at;
            if next_is_delivery {
                let (_, (to, bytes)) = self.queue.pop_first().expect("peeked");
                match tamper.on_deliver(to, &bytes, &mut self.ends) {
                    Delivery::Deliver => self.input(to, Event::FrameIn(bytes), tamper),
                    Delivery::Discard => {}
                    Delivery::Halt => return RunEnd::Halted,
                }
            } else {
                let which = timer.expect("peeked").1;
                self.ends[which].timer = None;
                self.input(which, Event::Timeout, tamper);
            }
        }
    }
}
