//! Virtual cards: peers' signature verification keys, installed out of band.

use alloc::collections::BTreeMap;

use crate::protocol::UserId;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Card<VK> {
    pub user_id: UserId,
    pub vk: VK,
    /// Logical time of installation.
    pub installed_at: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Installed {
    New,
    Replaced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Revoked {
    Ok,
    Absent,
}

/// At most one card per user id; the latest install wins. The logical clock
/// advances on every change, so the store is a pure function of its history.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CardStore<VK> {
    cards: BTreeMap<UserId, Card<VK>>,
    clock: u64,
}

impl<VK> Default for CardStore<VK> {
    fn default() -> Self {
        CardStore { cards: BTreeMap::new(), clock: 0 }
    }
}

impl<VK> CardStore<VK> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn install(&mut self, user_id: UserId, vk: VK) -> Installed {
        self.clock += 1;
        let at = self.clock;
        self.install_at(user_id, vk, at)
    }

    /// Installs with an explicit timestamp, as when loading a saved store.
    /// The clock moves past `installed_at`.
    pub fn install_at(&mut self, user_id: UserId, vk: VK, installed_at: u64) -> Installed {
        self.clock = self.clock.max(installed_at);
        match self.cards.insert(user_id, Card { user_id, vk, installed_at }) {
            Some(_) => Installed::Replaced,
            None => Installed::New,
        }
    }

    pub fn revoke(&mut self, user_id: &UserId) -> Revoked {
        self.clock += 1;
        match self.cards.remove(user_id) {
            Some(_) => Revoked::Ok,
            None => Revoked::Absent,
        }
    }

    pub fn lookup(&self, user_id: &UserId) -> Option<&VK> {
        self.cards.get(user_id).map(|c| &c.vk)
    }

    /// Cards in user-id order.
    pub fn iter(&self) -> impl Iterator<Item = &Card<VK>> {
        self.cards.values()
    }

    pub fn len(&self) -> usize {
        self.cards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cards.is_empty()
    }
}
