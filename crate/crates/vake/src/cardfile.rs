//! On-disk virtual card store.
//!
//! One card per line: `<hex user id> <hex verification key> <timestamp>`,
//! with the timestamp in seconds since the Unix epoch. Blank lines and
//! lines starting with `#` are ignored. Every change rewrites the whole file
//! through a temporary file in the same directory, so readers never see a
//! partial store.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use vake_core::cards::{Card, CardStore, Installed, Revoked};
use vake_core::crypto::VerificationKey;
use vake_core::protocol::UserId;

#[derive(Debug, thiserror::Error)]
pub enum CardFileError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}: {reason}")]
    Malformed { path: PathBuf, line: usize, reason: &'static str },
    #[error("{path}:{line}: second card for the same user")]
    Duplicate { path: PathBuf, line: usize },
}

#[derive(Debug)]
pub struct CardFile {
    path: PathBuf,
    store: CardStore<VerificationKey>,
}

impl CardFile {
    /// Loads the store at `path`. A missing file is an empty store.
    pub fn load(path: impl Into<PathBuf>) -> Result<CardFile, CardFileError> {
        let path = path.into();
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => String::new(),
            Err(source) => return Err(CardFileError::Io { path, source }),
        };
        let mut store = CardStore::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason| CardFileError::Malformed { path: path.clone(), line: i + 1, reason };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [id, vk, ts] = fields[..] else { return Err(bad("expected three fields")) };
            let id = parse_user_id(id).ok_or_else(|| bad("user id is not 32 hex digits"))?;
            let vk = parse_vk(vk).ok_or_else(|| bad("key is not 64 hex digits"))?;
            let ts: u64 = ts.parse().map_err(|_| bad("timestamp is not an integer"))?;
            if store.install_at(id, vk, ts) == Installed::Replaced {
                return Err(CardFileError::Duplicate { path, line: i + 1 });
            }
        }
        Ok(CardFile { path, store })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn cards(&self) -> impl Iterator<Item = &Card<VerificationKey>> {
        self.store.iter()
    }

    pub fn store(&self) -> &CardStore<VerificationKey> {
        &self.store
    }

    pub fn install(&mut self, id: UserId, vk: VerificationKey, now: u64) -> Result<Installed, CardFileError> {
        let r = self.store.install_at(id, vk, now);
        self.save()?;
        Ok(r)
    }

    pub fn revoke(&mut self, id: &UserId) -> Result<Revoked, CardFileError> {
        let r = self.store.revoke(id);
        if r == Revoked::Ok {
            self.save()?;
        }
        Ok(r)
    }

    /// The file contents for the current store, cards ordered by user id.
    pub fn render(&self) -> String {
        self.cards().map(|c| format_card(c) + "\n").collect()
    }

    fn save(&self) -> Result<(), CardFileError> {
        let io_err = |source| CardFileError::Io { path: self.path.clone(), source };
        let dir = match self.path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
        tmp.write_all(self.render().as_bytes()).map_err(io_err)?;
        tmp.as_file().sync_all().map_err(io_err)?;
        tmp.persist(&self.path).map_err(|e| io_err(e.error))?;
        Ok(())
    }
}

pub fn format_card(c: &Card<VerificationKey>) -> String {
    format!("{} {} {}", hex::encode(c.user_id.0), hex::encode(c.vk.0), c.installed_at)
}

/// 32 hex digits.
pub fn parse_user_id(s: &str) -> Option<UserId> {
    let mut id = [0u8; 16];
    hex::decode_to_slice(s, &mut id).ok()?;
    Some(UserId(id))
}

/// A user given either as 32 hex digits or as a name of up to 16 bytes.
pub fn parse_user(s: &str) -> Option<UserId> {
    if s.len() == 32 {
        if let Some(id) = parse_user_id(s) {
            return Some(id);
        }
    }
    (!s.is_empty() && s.len() <= 16).then(|| UserId::from_name(s))
}

pub fn parse_vk(s: &str) -> Option<VerificationKey> {
    let mut vk = [0u8; 32];
    hex::decode_to_slice(s, &mut vk).ok()?;
    Some(VerificationKey(vk))
}
