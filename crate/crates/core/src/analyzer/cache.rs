use std::collections::{BTreeMap, BTreeSet};

/// Memo table for ground-term typings, keyed by the canonical fully
/// parenthesized term text. `hits`/`misses` are this cache's own traffic
/// stats; the work counters written to semantic files are tracked by the
/// analyzer per scope and are independent of cache mode, so cached and
/// uncached runs emit identical files.
/// Cached value: base type, adjective closure, and the cluster-firing count
/// of the original computation (replayed into work counters on first use
/// per scope, keeping counters independent of cache traffic).
pub type CachedTyping = (String, BTreeSet<String>, u64);

#[derive(Debug, Clone)]
pub struct TypeCache {
    enabled: bool,
    entries: BTreeMap<String, CachedTyping>,
    pub hits: u64,
    pub misses: u64,
}

impl Default for TypeCache {
    fn default() -> Self {
        TypeCache::new()
    }
}

impl TypeCache {
    pub fn new() -> TypeCache {
        TypeCache { enabled: true, entries: BTreeMap::new(), hits: 0, misses: 0 }
    }

    /// A cache that never reuses results: every lookup misses and every
    /// computed typing is recomputed on the next occurrence.
    pub fn disabled() -> TypeCache {
        TypeCache { enabled: false, entries: BTreeMap::new(), hits: 0, misses: 0 }
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&mut self, key: &str) -> Option<CachedTyping> {
        if !self.enabled {
            return None;
        }
        match self.entries.get(key) {
            Some(v) => {
                self.hits += 1;
                Some(v.clone())
            }
            None => None,
        }
    }

    pub fn put(&mut self, key: String, base: String, adjectives: BTreeSet<String>, firings: u64) {
        self.misses += 1;
        if self.enabled {
            self.entries.insert(key, (base, adjectives, firings));
        }
    }

    /// Fresh cache in the same mode, for a new typing scope.
    pub fn fresh_scope(&self) -> TypeCache {
        if self.enabled {
            TypeCache::new()
        } else {
            TypeCache::disabled()
        }
    }
}
