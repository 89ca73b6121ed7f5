//! Channel models: an unreliable data channel under adversary control and
//! an authenticated voice channel for SAS utterances.

use alloc::collections::VecDeque;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::protocol::UserId;
use crate::sas::SasValue;

/// Impairments applied independently to every frame sent.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    #[serde(default)]
    pub drop_prob: f64,
    /// Independent flip probability for each bit.
    #[serde(default)]
    pub bit_error_rate: f64,
    #[serde(default)]
    pub dup_prob: f64,
    #[serde(default)]
    pub max_delay_ticks: u64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig::lossless(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProbabilityOutOfRange(pub &'static str);

impl fmt::Display for ProbabilityOutOfRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} must lie in [0, 1]", self.0)
    }
}

impl ChannelConfig {
    pub fn lossless(seed: u64) -> Self {
        ChannelConfig { drop_prob: 0.0, bit_error_rate: 0.0, dup_prob: 0.0, max_delay_ticks: 0, seed }
    }

    pub fn validate(&self) -> Result<(), ProbabilityOutOfRange> {
        for (name, p) in [
            ("drop_prob", self.drop_prob),
            ("bit_error_rate", self.bit_error_rate),
            ("dup_prob", self.dup_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(ProbabilityOutOfRange(name));
            }
        }
        Ok(())
    }
}

/// Passes one frame through the channel. The frame is duplicated with
/// `dup_prob`; each copy is then dropped with `drop_prob`, has every bit
/// flipped independently with `bit_error_rate`, and is delayed uniformly in
/// `0..=max_delay_ticks`. Returns `(delay, bytes)` per surviving copy.
///
/// # Panics
/// If a probability lies outside `[0, 1]`.
pub fn transmit<R: Rng + ?Sized>(cfg: &ChannelConfig, rng: &mut R, frame: &[u8]) -> Vec<(u64, Vec<u8>)> {
    let copies = if rng.gen_bool(cfg.dup_prob) { 2 } else { 1 };
    let mut out = Vec::with_capacity(copies);
    for _ in 0..copies {
        if rng.gen_bool(cfg.drop_prob) {
            continue;
        }
        let mut bytes = frame.to_vec();
        if cfg.bit_error_rate > 0.0 {
            for byte in bytes.iter_mut() {
                for bit in 0..8 {
                    if rng.gen_bool(cfg.bit_error_rate) {
                        *byte ^= 1 << bit;
                    }
                }
            }
        }
        let delay = rng.gen_range(0..=cfg.max_delay_ticks);
        out.push((delay, bytes));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Utterance {
    pub speaker: UserId,
    pub sas: SasValue,
}

/// An authenticated, public channel: anyone may listen, nobody can alter
/// what was said. There is deliberately no API that modifies a queued
/// utterance.
#[derive(Debug, Clone, Default)]
pub struct VoiceAuthChannel {
    queue: VecDeque<Utterance>,
    tap: Vec<Utterance>,
}

impl VoiceAuthChannel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Speaks `sas`. The adversary's tap records it as well.
    pub fn announce(&mut self, speaker: UserId, sas: SasValue) {
        let u = Utterance { speaker, sas };
        self.queue.push_back(u);
        self.tap.push(u);
    }

    pub fn receive(&mut self) -> Option<Utterance> {
        self.queue.pop_front()
    }

    /// The latest utterance by `speaker` still queued, consuming it.
    pub fn receive_from(&mut self, speaker: UserId) -> Option<SasValue> {
        let pos = self.queue.iter().rposition(|u| u.speaker == speaker)?;
        self.queue.remove(pos).map(|u| u.sas)
    }

    /// Everything ever said, as heard by an eavesdropper.
    pub fn tap(&self) -> &[Utterance] {
        &self.tap
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha20Rng;
    use rand_core::SeedableRng;

    fn frame() -> Vec<u8> {
        (0..64).collect()
    }

    #[test]
    fn lossless_is_identity() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(transmit(&ChannelConfig::lossless(0), &mut rng, &frame()), [(0, frame())]);
        }
    }

    #[test]
    fn total_loss() {
        let cfg = ChannelConfig { drop_prob: 1.0, dup_prob: 0.5, ..ChannelConfig::lossless(0) };
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for _ in 0..100 {
            assert!(transmit(&cfg, &mut rng, &frame()).is_empty());
        }
    }

    #[test]
    fn duplication_and_delay_bounds() {
        let cfg = ChannelConfig { dup_prob: 1.0, max_delay_ticks: 30, ..ChannelConfig::lossless(0) };
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let mut seen_max = 0;
        for _ in 0..200 {
            let out = transmit(&cfg, &mut rng, &frame());
            assert_eq!(out.len(), 2);
            for (d, b) in out {
                assert!(d <= 30);
                seen_max = seen_max.max(d);
                assert_eq!(b, frame());
            }
        }
        assert_eq!(seen_max, 30);
    }

    #[test]
    fn reproducible_per_seed() {
        let cfg = ChannelConfig { drop_prob: 0.3, bit_error_rate: 0.01, dup_prob: 0.2, max_delay_ticks: 9, seed: 0 };
        let run = |seed| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            (0..50).map(|_| transmit(&cfg, &mut rng, &frame())).collect::<Vec<_>>()
        };
        assert_eq!(run(5), run(5));
        assert_ne!(run(5), run(6));
    }

    #[test]
    fn validation() {
        assert!(ChannelConfig::lossless(0).validate().is_ok());
        let bad = ChannelConfig { drop_prob: 1.5, ..ChannelConfig::lossless(0) };
        assert_eq!(bad.validate(), Err(ProbabilityOutOfRange("drop_prob")));
        let bad = ChannelConfig { bit_error_rate: -0.1, ..ChannelConfig::lossless(0) };
        assert_eq!(bad.validate(), Err(ProbabilityOutOfRange("bit_error_rate")));
    }

    #[test]
    fn voice_channel_is_faithful() {
        let mut ch = VoiceAuthChannel::new();
        let alice = UserId::from_name("alice");
        ch.announce(alice, SasValue(0x2A3F));
        assert_eq!(ch.tap(), [Utterance { speaker: alice, sas: SasValue(0x2A3F) }]);
        assert_eq!(ch.receive(), Some(Utterance { speaker: alice, sas: SasValue(0x2A3F) }));
        assert_eq!(ch.receive(), None);
        assert_eq!(ch.tap().len(), 1);
    }
}
