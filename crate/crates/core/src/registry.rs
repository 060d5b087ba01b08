//! Name → constructor tables used to select strategies at runtime.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// A named set of constructors for one family of interchangeable strategies.
#[derive(Clone, Debug)]
pub struct Registry<F> {
    kind: &'static str,
    entries: BTreeMap<&'static str, Entry<F>>,
}

#[derive(Clone, Debug)]
struct Entry<F> {
    description: &'static str,
    factory: F,
}

impl<F> Registry<F> {
    pub fn new(kind: &'static str) -> Self {
        Registry {
            kind,
            entries: BTreeMap::new(),
        }
    }

    /// Adds or replaces the constructor registered under `name`.
    pub fn register(&mut self, name: &'static str, description: &'static str, factory: F) {
        self.entries.insert(
            name,
            Entry {
                description,
                factory,
            },
        );
    }

    pub fn get(&self, name: &str) -> Result<&F> {
        self.entries
            .get(name)
            .map(|e| &e.factory)
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().collect::<Vec<_>>().join(", "),
            })
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    /// `(name, description)` pairs in name order.
    pub fn describe(&self) -> impl Iterator<Item = (&'static str, &'static str)> + '_ {
        self.entries.iter().map(|(k, e)| (*k, e.description))
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }
}
