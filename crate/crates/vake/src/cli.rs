use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use vake_core::cards::{Installed, Revoked};
use vake_core::sas::WordList;

use crate::cardfile::{format_card, parse_user, parse_vk, CardFile};
use crate::runner::{override_all, run_file, Mode};
use crate::scenario_file::ScenarioFile;
use crate::{report, vectors};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Environment variable naming the card store file.
pub const CARD_STORE_ENV: &str = "VAKE_CARDS";

#[derive(Debug, Parser)]
#[command(name = "vake", version, about = "Authenticated key exchange for secure voice: scenarios, cards, vectors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the scenarios of a file and report the property verdicts.
    Run {
        /// Scenario file, or the name of a built-in (`table1`).
        #[arg(long)]
        scenario: String,
        #[arg(long, value_enum, default_value = "symbolic")]
        mode: Mode,
        /// Overrides every scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides every scenario's trial count.
        #[arg(long)]
        trials: Option<u32>,
        /// Write the report here instead of to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Manage the virtual card store.
    Cards {
        #[arg(long, env = CARD_STORE_ENV, default_value = "vake_cards.txt")]
        store: PathBuf,
        #[command(subcommand)]
        action: CardsAction,
    },
    /// Write golden vector files.
    Vectors {
        #[arg(long, default_value = "vectors")]
        out: PathBuf,
        /// Word list for SAS renderings: 512 lines, even words first.
        #[arg(long)]
        words: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CardsAction {
    /// Install or replace a card. USER is a name or 32 hex digits.
    Install { user: String, vk: String },
    /// Remove a card. Exits 1 if there was none.
    Revoke { user: String },
    /// Print every card as `id vk installed_at`.
    List,
}

/// Parses `argv` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "vake: {msg}");
            EXIT_CONFIG
        }
    }
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32, String> {
    match cmd {
        Command::Run { scenario, mode, seed, trials, out: path } => {
            let mut file = ScenarioFile::load(&scenario).map_err(|e| e.to_string())?;
            override_all(&mut file, seed, trials);
            file.validate(&scenario).map_err(|e| e.to_string())?;
            let reports = run_file(&file, mode).map_err(|e| e.to_string())?;
            let text = report::render(&file.name, &reports);
            match path {
                Some(p) => {
                    fs::write(&p, &text).map_err(|e| format!("{}: {e}", p.display()))?;
                    let groups: Vec<_> = reports.iter().collect();
                    for mode in ["symbolic", "concrete"] {
                        let g: Vec<_> = groups.iter().copied().filter(|r| r.mode == mode).collect();
                        if !g.is_empty() {
                            say(out, &format!("{mode}\n{}", report::matrix(&g)))?;
                        }
                    }
                    say(out, &format!("report written to {}\n", p.display()))?;
                }
                None => say(out, &text)?,
            }
            Ok(if reports.iter().all(|r| r.meets_expectation()) { EXIT_OK } else { EXIT_MISMATCH })
        }
        Command::Cards { store, action } => {
            let mut cards = CardFile::load(store).map_err(|e| e.to_string())?;
            let user = |s: &str| parse_user(s).ok_or_else(|| format!("{s:?} is neither a name of 1-16 bytes nor 32 hex digits"));
            match action {
                CardsAction::Install { user: u, vk } => {
                    let id = user(&u)?;
                    let vk = parse_vk(&vk).ok_or_else(|| format!("{vk:?} is not a 64-digit hex key"))?;
                    let now = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
                    let r = cards.install(id, vk, now).map_err(|e| e.to_string())?;
                    let word = if r == Installed::New { "installed" } else { "replaced" };
                    say(out, &format!("{word} {}\n", hex::encode(id.0)))?;
                    Ok(EXIT_OK)
                }
                CardsAction::Revoke { user: u } => {
                    let id = user(&u)?;
                    match cards.revoke(&id).map_err(|e| e.to_string())? {
                        Revoked::Ok => {
                            say(out, &format!("revoked {}\n", hex::encode(id.0)))?;
                            Ok(EXIT_OK)
                        }
                        Revoked::Absent => {
                            say(out, &format!("no card for {}\n", hex::encode(id.0)))?;
                            Ok(EXIT_MISMATCH)
                        }
                    }
                }
                CardsAction::List => {
                    for c in cards.cards() {
                        say(out, &(format_card(c) + "\n"))?;
                    }
                    Ok(EXIT_OK)
                }
            }
        }
        Command::Vectors { out: dir, words } => {
            let words = match words {
                None => WordList::default(),
                Some(p) => {
                    let text = fs::read_to_string(&p).map_err(|e| format!("{}: {e}", p.display()))?;
                    WordList::parse(&text).map_err(|e| format!("{}: {e}", p.display()))?
                }
            };
            let written = vectors::emit(&dir, &words).map_err(|e| format!("{}: {e}", dir.display()))?;
            for p in written {
                say(out, &format!("wrote {}\n", p.display()))?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn say(out: &mut dyn Write, text: &str) -> Result<(), String> {
    out.write_all(text.as_bytes()).map_err(|e| format!("stdout: {e}"))
}
