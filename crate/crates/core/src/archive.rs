use rustc_hash::FxHashSet;
use thiserror::Error;

use crate::genotype::BitGenotype;

/// Returned by [`Archive::insert`] when a new member would exceed capacity.
/// The run owning the archive must stop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("archive is full ({capacity} distinct members)")]
pub struct ArchiveFull {
    pub capacity: usize,
}

/// Every distinct genotype visited during one run, in visiting order.
///
/// Members are never removed; membership is bitwise equality.
#[derive(Debug, Clone)]
pub struct Archive {
    seen: FxHashSet<BitGenotype>,
    order: Vec<BitGenotype>,
    capacity: usize,
}

impl Archive {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "archive capacity must be positive");
        // The set grows lazily; full pre-allocation would be wasteful for the
        // large capacities allowed on 32-bit spaces.
        let hint = capacity.min(1 << 16);
        let mut seen = FxHashSet::default();
        seen.reserve(hint);
        Self {
            seen,
            order: Vec::with_capacity(hint),
            capacity,
        }
    }

    /// Inserts `g`; `Ok(false)` means it was already a member.
    pub fn insert(&mut self, g: BitGenotype) -> Result<bool, ArchiveFull> {
        if self.seen.contains(&g) {
            return Ok(false);
        }
        if self.is_full() {
            return Err(ArchiveFull {
                capacity: self.capacity,
            });
        }
        self.seen.insert(g);
        self.order.push(g);
        Ok(true)
    }

    #[inline]
    pub fn contains(&self, g: &BitGenotype) -> bool {
        self.seen.contains(g)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn is_full(&self) -> bool {
        self.order.len() >= self.capacity
    }

    /// Members in insertion order.
    pub fn members(&self) -> &[BitGenotype] {
        &self.order
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(bits: u64) -> BitGenotype {
        BitGenotype::new(bits, 4).unwrap()
    }

    #[test]
    fn insert_semantics() {
        let mut a = Archive::new(4);
        assert_eq!(a.insert(g(0b0000)), Ok(true));
        assert_eq!(a.len(), 1);
        assert_eq!(a.insert(g(0b0000)), Ok(false));
        assert_eq!(a.len(), 1);
        assert_eq!(a.insert(g(0b0001)), Ok(true));
        assert_eq!(a.len(), 2);
    }

    #[test]
    fn full_archive_signals_termination() {
        let mut a = Archive::new(1);
        a.insert(g(3)).unwrap();
        assert_eq!(a.insert(g(4)), Err(ArchiveFull { capacity: 1 }));
        // A duplicate of a member is still reported as such.
        assert_eq!(a.insert(g(3)), Ok(false));
        assert_eq!(a.members(), &[g(3)]);
    }

    proptest! {
        #[test]
        fn size_counts_distinct_inserts(xs in proptest::collection::vec(0u64..16, 0..64)) {
            let mut a = Archive::new(16);
            for &x in &xs {
                a.insert(g(x)).unwrap();
            }
            let distinct: std::collections::BTreeSet<_> = xs.iter().collect();
            prop_assert_eq!(a.len(), distinct.len());
            prop_assert!(a.len() <= a.capacity());
        }
    }
}
