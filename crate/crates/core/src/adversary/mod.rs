//! A scripted Dolev-Yao attacker and the property checks it is judged by.
//!
//! Each trial runs one honest session between Alice and Bob, then one
//! session under the configured script. With [`AdversaryAction::MitmDh`]
//! the attacker splits the second session into two legs and runs an
//! honest-looking persona on each: one facing Alice that claims to be Bob,
//! one facing Bob that claims to be Alice. Afterwards the trial decides
//! session-key secrecy (with and without a post-session leak of both
//! signing keys) and injective agreement over both sessions' claims.

mod checks;
mod run;

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelConfig, ProbabilityOutOfRange};
use crate::protocol::{AbortCode, Phase, SasPolicy};

pub use checks::{
    check_injective_agreement, check_secrecy, wire_knowledge, AttackerModel, AttackerView, Compromise,
};
pub use run::{grind_sas, run_scenario, run_trial, GrindReport};

/// The four authentication configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Mutual signature authentication: both cards installed.
    A,
    /// Unilateral signature authentication: one card installed.
    B,
    /// No cards; the SAS is compared vocally.
    C,
    /// No cards and no SAS comparison.
    D,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [Scenario::A, Scenario::B, Scenario::C, Scenario::D];

    pub fn letter(self) -> char {
        match self {
            Scenario::A => 'a',
            Scenario::B => 'b',
            Scenario::C => 'c',
            Scenario::D => 'd',
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Scenario::A => "mutual signature authentication",
            Scenario::B => "unilateral signature authentication",
            Scenario::C => "SAS vocal verification",
            Scenario::D => "no authentication",
        }
    }

    /// `(Alice holds Bob's card, Bob holds Alice's card)`. In (b) Bob holds
    /// Alice's card, or the reverse when `mirror` is set.
    pub fn cards(self, mirror: bool) -> (bool, bool) {
        match self {
            Scenario::A => (true, true),
            Scenario::B if mirror => (true, false),
            Scenario::B => (false, true),
            Scenario::C | Scenario::D => (false, false),
        }
    }

    pub fn sas_policy(self) -> SasPolicy {
        match self {
            Scenario::D => SasPolicy::Waive,
            _ => SasPolicy::Enforce,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum When {
    Before,
    After,
}

/// One step of an attack script. Frame indices count data-channel frames
/// in the order they are sent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryAction {
    /// Deliver everything; the default.
    Forward,
    /// Suppress frame `n`.
    Drop(usize),
    /// Re-deliver frame `n` of the preceding honest session, at the tick it
    /// was first sent.
    Replay(usize),
    /// XOR a mask into frame `n`, starting at its first byte.
    ModifyBits(usize, #[serde(with = "hex::serde")] Vec<u8>),
    /// Deliver these bytes to both parties when the session starts.
    InjectFrame(#[serde(with = "hex::serde")] Vec<u8>),
    /// Man in the middle with the attacker's own ephemeral keys.
    MitmDh,
    /// The personas send identity blocks without signatures.
    StripSignature,
    /// Take Alice's and Bob's signing keys.
    StealSigningKey(When),
    /// Try up to `n` fresh salts for the persona facing Bob, looking for
    /// one that makes Bob's SAS equal Alice's. Gives up when none does.
    GrindSas(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
}

impl Verdict {
    pub fn from_bool(holds: bool) -> Verdict {
        if holds {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    pub secrecy: Verdict,
    pub forward_secrecy: Verdict,
    pub injective_agreement: Verdict,
}

/// Verdicts a scenario file declares in advance. Unset fields are not
/// checked.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    #[serde(default)]
    pub secrecy: Option<Verdict>,
    #[serde(default)]
    pub forward_secrecy: Option<Verdict>,
    #[serde(default)]
    pub injective_agreement: Option<Verdict>,
}

impl Expectation {
    pub fn met_by(&self, v: &Verdicts) -> bool {
        self.secrecy.map_or(true, |e| e == v.secrecy)
            && self.forward_secrecy.map_or(true, |e| e == v.forward_secrecy)
            && self.injective_agreement.map_or(true, |e| e == v.injective_agreement)
    }
}

fn default_trials() -> u32 {
    100
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub adversary_script: Vec<AdversaryAction>,
    #[serde(default)]
    pub channel: ChannelConfig,
    #[serde(default = "default_trials")]
    pub trials: u32,
    #[serde(default)]
    pub seed: u64,
    /// Responders check the opening of the initiator's commitment.
    #[serde(default = "yes")]
    pub commitment: bool,
    /// Scenario (b) only: Alice holds Bob's card instead.
    #[serde(default)]
    pub mirror: bool,
    #[serde(default)]
    pub expect: Option<Expectation>,
}

impl ScenarioConfig {
    /// An honest configuration with the defaults a scenario file would get.
    pub fn new(scenario: Scenario) -> Self {
        ScenarioConfig {
            scenario,
            adversary_script: Vec::new(),
            channel: ChannelConfig::default(),
            trials: default_trials(),
            seed: 0,
            commitment: true,
            mirror: false,
            expect: None,
        }
    }

    pub fn with_script(mut self, script: Vec<AdversaryAction>) -> Self {
        self.adversary_script = script;
        self
    }

    pub fn mitm(&self) -> bool {
        self.adversary_script.contains(&AdversaryAction::MitmDh)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.trials == 0 {
            return Err(ConfigError::NoTrials);
        }
        self.channel.validate().map_err(ConfigError::Channel)?;
        if self.mirror && self.scenario != Scenario::B {
            return Err(ConfigError::MirrorOutsideB);
        }
        let mut grinds = 0;
        for a in &self.adversary_script {
            match a {
                AdversaryAction::StripSignature if !self.mitm() => return Err(ConfigError::NeedsMitm("strip_signature")),
                AdversaryAction::GrindSas(_) if !self.mitm() => return Err(ConfigError::NeedsMitm("grind_sas")),
                AdversaryAction::GrindSas(_) => grinds += 1,
                AdversaryAction::InjectFrame(b) if b.is_empty() => return Err(ConfigError::EmptyFrame),
                _ => {}
            }
        }
        if grinds > 1 {
            return Err(ConfigError::RepeatedGrind);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigError {
    NoTrials,
    Channel(ProbabilityOutOfRange),
    MirrorOutsideB,
    NeedsMitm(&'static str),
    EmptyFrame,
    RepeatedGrind,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::NoTrials => f.write_str("trials must be at least 1"),
            ConfigError::Channel(e) => write!(f, "channel: {e}"),
            ConfigError::MirrorOutsideB => f.write_str("mirror applies to scenario b only"),
            ConfigError::NeedsMitm(a) => write!(f, "{a} requires mitm_dh in the same script"),
            ConfigError::EmptyFrame => f.write_str("inject_frame needs at least one byte"),
            ConfigError::RepeatedGrind => f.write_str("at most one grind_sas per script"),
        }
    }
}

/// The fate of one trial. Per-party fields are `[Alice, Bob]` in the
/// scripted session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: u32,
    /// Both parties of the scripted session reached `Secured`.
    pub completed: bool,
    pub phases: [Phase; 2],
    /// The first local abort, Alice's before Bob's.
    pub detected_by: Option<AbortCode>,
    /// Some honest session key of the trial is known to the attacker.
    pub attacker_has_session_key: bool,
    /// Which scripted-session keys the attacker knows.
    pub exposed: [bool; 2],
    pub forward_secrecy_holds: bool,
    pub injective_agreement_holds: bool,
    /// Under a man in the middle, Alice's and Bob's SAS came out equal.
    pub sas_collision: bool,
    /// A user id was visible to a passive listener.
    pub identity_leak: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub config: ScenarioConfig,
    pub mode: &'static str,
    pub trials: Vec<TrialRecord>,
    pub verdicts: Verdicts,
}

impl ScenarioReport {
    pub fn from_trials(config: ScenarioConfig, mode: &'static str, trials: Vec<TrialRecord>) -> Self {
        let verdicts = Verdicts {
            secrecy: Verdict::from_bool(trials.iter().all(|t| !t.attacker_has_session_key)),
            forward_secrecy: Verdict::from_bool(trials.iter().all(|t| t.forward_secrecy_holds)),
            injective_agreement: Verdict::from_bool(trials.iter().all(|t| t.injective_agreement_holds)),
        };
        ScenarioReport { config, mode, trials, verdicts }
    }

    pub fn completed(&self) -> usize {
        self.trials.iter().filter(|t| t.completed).count()
    }

    /// Whether the verdicts agree with the declared expectation, if any.
    pub fn meets_expectation(&self) -> bool {
        self.config.expect.map_or(true, |e| e.met_by(&self.verdicts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_cards() {
        assert_eq!(Scenario::A.cards(false), (true, true));
        assert_eq!(Scenario::B.cards(false), (false, true));
        assert_eq!(Scenario::B.cards(true), (true, false));
        assert_eq!(Scenario::C.cards(false), (false, false));
        assert_eq!(Scenario::D.sas_policy(), SasPolicy::Waive);
        assert_eq!(Scenario::C.sas_policy(), SasPolicy::Enforce);
    }

    #[test]
    fn validation() {
        let ok = ScenarioConfig::new(Scenario::C).with_script(alloc::vec![AdversaryAction::MitmDh, AdversaryAction::GrindSas(3)]);
        assert_eq!(ok.validate(), Ok(()));
        let bad = ScenarioConfig::new(Scenario::C).with_script(alloc::vec![AdversaryAction::GrindSas(3)]);
        assert_eq!(bad.validate(), Err(ConfigError::NeedsMitm("grind_sas")));
        let mut bad = ScenarioConfig::new(Scenario::A);
        bad.mirror = true;
        assert_eq!(bad.validate(), Err(ConfigError::MirrorOutsideB));
        let mut bad = ScenarioConfig::new(Scenario::A);
        bad.trials = 0;
        assert_eq!(bad.validate(), Err(ConfigError::NoTrials));
    }

    #[test]
    fn expectation_matching() {
        let v = Verdicts { secrecy: Verdict::Yes, forward_secrecy: Verdict::Yes, injective_agreement: Verdict::No };
        assert!(Expectation::default().met_by(&v));
        assert!(Expectation { injective_agreement: Some(Verdict::No), ..Default::default() }.met_by(&v));
        assert!(!Expectation { secrecy: Some(Verdict::No), ..Default::default() }.met_by(&v));
    }
}
