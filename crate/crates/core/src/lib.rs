//! Authenticated key exchange for secure voice channels.
//!
//! An ephemeral Diffie-Hellman exchange, authenticated by signatures over
//! the transcript when the peers hold each other's verification keys and by
//! a vocally compared short authentication string (SAS) otherwise. User
//! identifiers travel only inside encrypted identity blocks.
//!
//! The crate is `no_std` with `alloc`. It contains:
//!
//! * [`crypto`]: one [`Suite`](crypto::Suite) interface with a byte-level
//!   and a symbolic backend;
//! * [`term`]: the symbolic term algebra and Dolev-Yao knowledge closure;
//! * [`schedule`], [`sas`], [`protocol`], [`cards`]: the protocol proper;
//! * [`channel`], [`sim`]: a lossy data channel, an authenticated voice
//!   channel and a tick-driven two-party simulator;
//! * [`adversary`]: scripted attacks and the secrecy and agreement checks.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod adversary;
pub mod cards;
pub mod channel;
pub mod crc;
pub mod crypto;
pub mod protocol;
pub mod sas;
pub mod schedule;
pub mod sim;
pub mod term;
pub mod wire;
