//! Name-keyed registries of interchangeable strategies.
//!
//! Each algorithm family (Steinitz orderings, plane choices, pentagon
//! splitters, catalog surfaces, certificates) exposes a trait; implementations
//! are registered under a stable name and looked up at runtime from CLI flags.

use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Something that can be stored in a [`Registry`].
pub trait Named {
    fn name(&self) -> &'static str;
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown {kind} `{name}` (available: {available})")]
pub struct UnknownName {
    pub kind: &'static str,
    pub name: String,
    pub available: String,
}

pub struct Registry<T: ?Sized + Named> {
    kind: &'static str,
    entries: Vec<Arc<T>>,
    default: Option<&'static str>,
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: Vec::new(),
            default: None,
        }
    }

    /// Registers `item`, replacing any entry with the same name.
    pub fn register(&mut self, item: Arc<T>) -> &mut Self {
        let name = item.name();
        self.entries.retain(|e| e.name() != name);
        self.entries.push(item);
        self
    }

    pub fn with(mut self, item: Arc<T>) -> Self {
        self.register(item);
        self
    }

    pub fn with_default(mut self, name: &'static str) -> Self {
        self.default = Some(name);
        self
    }

    pub fn get(&self, name: &str) -> Result<Arc<T>, UnknownName> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .cloned()
            .ok_or_else(|| UnknownName {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn default_entry(&self) -> Option<Arc<T>> {
        self.default.and_then(|n| self.get(n).ok())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }
}

impl<T: ?Sized + Named> fmt::Debug for Registry<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry")
            .field("kind", &self.kind)
            .field("entries", &self.names())
            .field("default", &self.default)
            .finish()
    }
}
