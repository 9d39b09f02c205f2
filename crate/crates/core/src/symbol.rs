//! Symbols double as attribute names and as tableau/relation values.
//!
//! User-written names are interned once and never freed. Engine-minted
//! symbols carry only a mint index and print as `@k`; they always rank above
//! every named symbol, so fresh chase values are larger than anything a user
//! can write down.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::sync::{Mutex, OnceLock};

/// A value/attribute identifier.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    Named(&'static str),
    Fresh(u32),
}

fn interner() -> &'static Mutex<HashSet<&'static str>> {
    static INTERNER: OnceLock<Mutex<HashSet<&'static str>>> = OnceLock::new();
    INTERNER.get_or_init(|| Mutex::new(HashSet::new()))
}

impl Symbol {
    /// Interns `name` and returns its symbol.
    pub fn named(name: &str) -> Symbol {
        let mut set = interner().lock().expect("symbol interner poisoned");
        if let Some(existing) = set.get(name) {
            return Symbol::Named(existing);
        }
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        set.insert(leaked);
        Symbol::Named(leaked)
    }

    pub fn fresh(index: u32) -> Symbol {
        Symbol::Fresh(index)
    }

    pub fn is_fresh(&self) -> bool {
        matches!(self, Symbol::Fresh(_))
    }

    pub fn fresh_index(&self) -> Option<u32> {
        match self {
            Symbol::Fresh(k) => Some(*k),
            Symbol::Named(_) => None,
        }
    }
}

impl Ord for Symbol {
    // Shortlex on names keeps the order well-founded and independent of the
    // order in which concurrent callers happen to intern names.
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Symbol::Named(a), Symbol::Named(b)) => a.len().cmp(&b.len()).then_with(|| a.cmp(b)),
            (Symbol::Named(_), Symbol::Fresh(_)) => Ordering::Less,
            (Symbol::Fresh(_), Symbol::Named(_)) => Ordering::Greater,
            (Symbol::Fresh(a), Symbol::Fresh(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Named(s) => f.write_str(s),
            Symbol::Fresh(k) => write!(f, "@{k}"),
        }
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Hands out fresh symbols with strictly increasing mint indices.
#[derive(Clone, Debug, Default)]
pub struct FreshSource {
    next: u32,
}

impl FreshSource {
    pub fn new() -> Self {
        Self::default()
    }

    /// A source whose first symbol ranks above every fresh symbol in `seen`.
    pub fn above<'a>(seen: impl IntoIterator<Item = &'a Symbol>) -> Self {
        let next = seen
            .into_iter()
            .filter_map(Symbol::fresh_index)
            .map(|k| k + 1)
            .max()
            .unwrap_or(0);
        FreshSource { next }
    }

    pub fn mint(&mut self) -> Symbol {
        let s = Symbol::Fresh(self.next);
        self.next += 1;
        s
    }

    /// Index the next minted symbol will get.
    pub fn watermark(&self) -> u32 {
        self.next
    }

    pub fn raise_to(&mut self, floor: u32) {
        self.next = self.next.max(floor);
    }
}

/// Shorthand for a whitespace-separated list of symbols; `@k` is fresh.
pub fn syms(names: &str) -> Vec<Symbol> {
    names
        .split_whitespace()
        .map(|w| match w.strip_prefix('@').and_then(|k| k.parse().ok()) {
            Some(k) => Symbol::fresh(k),
            None => Symbol::named(w),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_idempotent() {
        assert_eq!(Symbol::named("abc"), Symbol::named("abc"));
        assert_ne!(Symbol::named("abc"), Symbol::named("abd"));
    }

    #[test]
    fn order_is_shortlex_then_fresh() {
        let a2 = Symbol::named("a2");
        let a10 = Symbol::named("a10");
        assert!(a2 < a10);
        assert!(a10 < Symbol::fresh(0));
        assert!(Symbol::fresh(0) < Symbol::fresh(1));
    }

    #[test]
    fn fresh_source_skips_seen() {
        let seen = [Symbol::fresh(4), Symbol::named("x")];
        let mut src = FreshSource::above(seen.iter());
        assert_eq!(src.mint(), Symbol::fresh(5));
        assert_eq!(src.watermark(), 6);
    }
}
