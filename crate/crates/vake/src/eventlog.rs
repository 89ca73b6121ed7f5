//! Event logs as newline-delimited JSON, one `{"at": tick, "event": ...}`
//! object per line. Feeding a log back into a fresh session with the same
//! configuration and randomness reproduces its state exactly.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use vake_core::cards::CardStore;
use vake_core::crypto::Suite;
use vake_core::protocol::{Action, Event, Session};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoggedEvent {
    pub at: u64,
    pub event: Event,
}

pub fn write_log<W: Write>(mut w: W, events: &[(u64, Event)]) -> io::Result<()> {
    for (at, event) in events {
        let line = serde_json::to_string(&LoggedEvent { at: *at, event: event.clone() })?;
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn read_log<R: BufRead>(r: R) -> io::Result<Vec<(u64, Event)>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let e: LoggedEvent = serde_json::from_str(&line)?;
        out.push((e.at, e.event));
    }
    Ok(out)
}

/// Steps `session` through `events` and returns every action it emitted.
pub fn replay<S: Suite>(
    session: &mut Session<S>,
    cards: &CardStore<S::VerificationKey>,
    events: &[(u64, Event)],
) -> Vec<Action<S>> {
    events.iter().flat_map(|(_, e)| session.step(e.clone(), cards)).collect()
}
